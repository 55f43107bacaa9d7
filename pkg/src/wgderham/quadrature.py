"""Polynomial-exact quadrature on element volumes, faces and edges.

Simplices use collapsed (Duffy) Gauss-Jacobi tensor rules, which are exact
to any requested degree.  Polygons and polyhedra are split into a fan around
their centroids.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi

from .geometry import PolyElement


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    kind: str
    points: np.ndarray
    weights: np.ndarray
    degree: int

    def integrate(self, values) -> np.ndarray:
        """Weighted sum over the leading (point) axis."""
        return np.tensordot(self.weights, np.asarray(values), axes=(0, 0))


def _n_points(degree: int) -> int:
    return max(1, (degree + 2) // 2)


@lru_cache(maxsize=None)
def _gauss_jacobi01(n: int, alpha: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes/weights on [0, 1] for the weight ``(1 - x) ** alpha``."""
    x, w = roots_jacobi(n, alpha, 0)
    return (x + 1) / 2, w / 2 ** (alpha + 1)


@lru_cache(maxsize=None)
def reference_triangle_rule(degree: int) -> tuple[np.ndarray, np.ndarray]:
    """Rule on the triangle (0,0), (1,0), (0,1); weights sum to 1/2."""
    n = _n_points(degree)
    a, wa = _gauss_jacobi01(n, 1)
    b, wb = _gauss_jacobi01(n, 0)
    A, B = np.meshgrid(a, b, indexing="ij")
    pts = np.stack([A.ravel(), (B * (1 - A)).ravel()], axis=1)
    return pts, np.outer(wa, wb).ravel()


@lru_cache(maxsize=None)
def reference_tetrahedron_rule(degree: int) -> tuple[np.ndarray, np.ndarray]:
    """Rule on the unit tetrahedron; weights sum to 1/6."""
    n = _n_points(degree)
    a, wa = _gauss_jacobi01(n, 2)
    b, wb = _gauss_jacobi01(n, 1)
    c, wc = _gauss_jacobi01(n, 0)
    A, B, C = np.meshgrid(a, b, c, indexing="ij")
    pts = np.stack([A, B * (1 - A), C * (1 - A) * (1 - B)], axis=-1).reshape(-1, 3)
    w = (wa[:, None, None] * wb[None, :, None] * wc[None, None, :]).ravel()
    return pts, w


def triangle_rule(p0, p1, p2, degree: int) -> tuple[np.ndarray, np.ndarray]:
    ref, w = reference_triangle_rule(degree)
    e1, e2 = np.asarray(p1) - p0, np.asarray(p2) - p0
    area = 0.5 * np.linalg.norm(np.cross(e1, e2))
    return p0 + ref[:, :1] * e1 + ref[:, 1:] * e2, w * 2 * area


def tetrahedron_rule(p0, p1, p2, p3, degree: int) -> tuple[np.ndarray, np.ndarray]:
    ref, w = reference_tetrahedron_rule(degree)
    jac = np.stack([np.asarray(p1) - p0, np.asarray(p2) - p0, np.asarray(p3) - p0], axis=1)
    return p0 + ref @ jac.T, w * abs(np.linalg.det(jac))


def _face_triangles(element: PolyElement, face_id: int):
    loop = element.faces[face_id]
    pts = element.vertices[list(loop)]
    if len(loop) == 3:
        return [tuple(pts)]
    c = element.face_centroids[face_id]
    return [(c, pts[i], pts[(i + 1) % len(pts)]) for i in range(len(pts))]


def _cached(element: PolyElement, key, build):
    cache = element._cache.setdefault("quadrature", {})
    if key not in cache:
        rule = build()
        rule.points.setflags(write=False)
        rule.weights.setflags(write=False)
        cache[key] = rule
    return cache[key]


def face_rule(element: PolyElement, face_id: int, degree: int) -> QuadratureRule:
    def build():
        parts = [triangle_rule(*tri, degree) for tri in _face_triangles(element, face_id)]
        return QuadratureRule("face", np.vstack([p for p, _ in parts]), np.concatenate([w for _, w in parts]), degree)

    return _cached(element, ("face", face_id, degree), build)


def volume_rule(element: PolyElement, degree: int) -> QuadratureRule:
    def build():
        parts = []
        for f in range(element.n_faces):
            for tri in _face_triangles(element, f):
                parts.append(tetrahedron_rule(element.centroid, *tri, degree))
        return QuadratureRule("volume", np.vstack([p for p, _ in parts]), np.concatenate([w for _, w in parts]), degree)

    return _cached(element, ("volume", degree), build)


def edge_rule(element: PolyElement, edge_id: int, degree: int) -> QuadratureRule:
    def build():
        x, w = np.polynomial.legendre.leggauss(_n_points(degree))
        half = 0.5 * element.edge_lengths[edge_id]
        pts = element.edge_midpoints[edge_id] + np.outer(x * half, element.edge_tangents[edge_id])
        return QuadratureRule("edge", pts, w * half, degree)

    return _cached(element, ("edge", edge_id, degree), build)
