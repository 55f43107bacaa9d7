"""Entity-wise L2 projections of smooth fields onto the WG spaces.

Fields are vectorized callables: ``f(points)`` with ``points`` of shape
``(n, 3)`` returns ``(n,)`` for scalars or ``(n, 3)`` for vectors.  Vertex
data are point values.  Traces are taken before projecting: tangential
components along ``(t1, t2)`` on faces, ``u . t_e`` on edges, ``w . n_f`` on
faces for slot 3.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .geometry import PolyElement
from .polybasis import edge_basis, face_basis, volume_basis
from .quadrature import edge_rule, face_rule, volume_rule
from .spaces import Family, SpaceDescriptor, WgCoefficients, dof_layout
from .weakops import edge_gram, face_gram, gram_solve, volume_gram

SmoothField = Callable[[np.ndarray], np.ndarray]

PROJECTION_QUAD_BOOST = 6


def default_projection_degree(k: int, boost: int = PROJECTION_QUAD_BOOST) -> int:
    return 2 * k + 2 + boost


@dataclass(frozen=True, eq=False)
class _EntityPlan:
    points: np.ndarray
    # coefficients = solve @ (values at points)
    solve: np.ndarray


def _plan(gram, basis_vals, qr) -> _EntityPlan:
    return _EntityPlan(qr.points, gram_solve(gram, (basis_vals * qr.weights[:, None]).T))


def _plans(element: PolyElement, desc: SpaceDescriptor, N: int):
    cache = element._cache.setdefault("projection_plans", {})
    key = (desc, N)
    if key in cache:
        return cache[key]
    dv, df, de = desc.degrees
    qr = volume_rule(element, N)
    vol = _plan(volume_gram(element, dv, N), volume_basis(element, dv).eval(qr.points), qr)
    faces, edges = [], []
    if df is not None:
        for f in range(element.n_faces):
            qf = face_rule(element, f, N)
            b = face_basis(element, f, df).eval(element.face_coords(f, qf.points))
            faces.append(_plan(face_gram(element, f, df, N), b, qf))
    if de is not None and desc.components[2]:
        for e in range(element.n_edges):
            qe = edge_rule(element, e, N)
            b = edge_basis(element, e, de).eval(element.edge_coords(e, qe.points))
            edges.append(_plan(edge_gram(element, e, de, N), b, qe))
    cache[key] = (vol, faces, edges)
    return cache[key]


def _apply(plan: _EntityPlan, values) -> np.ndarray:
    vals = np.asarray(values, dtype=float).reshape(len(plan.points), -1)
    return (plan.solve @ vals).T.ravel()


def project_entities(
    element: PolyElement,
    desc: SpaceDescriptor,
    volume: Callable | None = None,
    faces: Callable | None = None,
    edges: Callable | None = None,
    vertices: np.ndarray | None = None,
    quad_degree: int | None = None,
) -> WgCoefficients:
    """Assemble a weak function from entity-wise data.

    ``volume(points) -> (n, comps)``; ``faces(face_id, points) -> (n, comps)``
    and ``edges(edge_id, points) -> (n, comps)`` give the (already traced)
    components on each entity; ``vertices`` holds point values.
    """
    N = default_projection_degree(desc.k) if quad_degree is None else quad_degree
    layout = dof_layout(desc, element)
    vol_plan, face_plans, edge_plans = _plans(element, desc, N)
    out = np.zeros(layout.total)
    out[layout.volume] = _apply(vol_plan, volume(vol_plan.points))
    for f, plan in enumerate(face_plans):
        out[layout.faces[f]] = _apply(plan, faces(f, plan.points))
    for e, plan in enumerate(edge_plans):
        out[layout.edges[e]] = _apply(plan, edges(e, plan.points))
    if desc.has_vertices:
        out[layout.vertices] = vertices
    return WgCoefficients(desc, layout, out)


def project_slot1(element: PolyElement, family: Family, k: int, v: SmoothField,
                  quad_degree: int | None = None) -> WgCoefficients:
    return project_entities(
        element, SpaceDescriptor(family, 1, k),
        volume=v,
        faces=lambda f, x: v(x),
        edges=lambda e, x: v(x),
        vertices=np.asarray(v(element.vertices), dtype=float),
        quad_degree=quad_degree,
    )


def project_slot2(element: PolyElement, family: Family, k: int, u: SmoothField,
                  quad_degree: int | None = None) -> WgCoefficients:
    def tangential(f, x):
        t1, t2, _ = element.face_frame(f)
        ux = u(x)
        return np.stack([ux @ t1, ux @ t2], axis=1)

    return project_entities(
        element, SpaceDescriptor(family, 2, k),
        volume=u,
        faces=tangential,
        edges=lambda e, x: u(x) @ element.edge_tangents[e],
        quad_degree=quad_degree,
    )


def project_slot3(element: PolyElement, family: Family, k: int, w: SmoothField,
                  quad_degree: int | None = None) -> WgCoefficients:
    return project_entities(
        element, SpaceDescriptor(family, 3, k),
        volume=w,
        faces=lambda f, x: w(x) @ element.face_normals[f],
        quad_degree=quad_degree,
    )


def project_slot4(element: PolyElement, family: Family, k: int, p: SmoothField,
                  quad_degree: int | None = None) -> WgCoefficients:
    return project_entities(element, SpaceDescriptor(family, 4, k), volume=p, quad_degree=quad_degree)


PROJECTORS = {1: project_slot1, 2: project_slot2, 3: project_slot3, 4: project_slot4}


@dataclass(frozen=True, eq=False)
class Reconstruction:
    """Entity-wise polynomial evaluators of a weak function."""

    element: PolyElement
    coeffs: WgCoefficients

    def volume(self, points):
        b = volume_basis(self.element, self.coeffs.descriptor.degrees[0])
        return b.eval(points) @ self.coeffs.volume().T

    def face(self, face_id, points):
        b = face_basis(self.element, face_id, self.coeffs.descriptor.degrees[1])
        return b.eval(self.element.face_coords(face_id, points)) @ self.coeffs.face(face_id).T

    def edge(self, edge_id, points):
        b = edge_basis(self.element, edge_id, self.coeffs.descriptor.degrees[2])
        return b.eval(self.element.edge_coords(edge_id, points)) @ self.coeffs.edge(edge_id).T


def reproject(element: PolyElement, coeffs: WgCoefficients, quad_degree: int | None = None) -> WgCoefficients:
    """Project the entity-wise reconstruction of ``coeffs`` back onto its space."""
    rec = Reconstruction(element, coeffs)
    desc = coeffs.descriptor
    return project_entities(
        element, desc,
        volume=rec.volume,
        faces=rec.face if desc.components[1] else None,
        edges=rec.edge if desc.components[2] else None,
        vertices=coeffs.vertex_values() if desc.has_vertices else None,
        quad_degree=quad_degree,
    )


class PolynomialField:
    """A scalar or 3-vector polynomial in physical coordinates.

    ``coeffs`` has shape ``(d+1, d+1, d+1)`` for a scalar (entry ``[a, b, c]``
    multiplies ``x^a y^b z^c``) or ``(3, d+1, d+1, d+1)`` for a vector field.
    """

    def __init__(self, coeffs):
        self.coeffs = np.asarray(coeffs, dtype=float)
        self.is_vector = self.coeffs.ndim == 4

    @property
    def degree(self) -> int:
        c = self.coeffs if self.is_vector else self.coeffs[None]
        nz = np.argwhere(np.any(c != 0, axis=0))
        return int(nz.sum(axis=1).max()) if len(nz) else 0

    @classmethod
    def random(cls, rng: np.random.Generator, degree: int, vector: bool = False) -> "PolynomialField":
        a, b, c = np.meshgrid(*(np.arange(degree + 1),) * 3, indexing="ij")
        mask = (a + b + c) <= degree
        shape = ((3,) if vector else ()) + mask.shape
        return cls(rng.standard_normal(shape) * mask)

    def __call__(self, points) -> np.ndarray:
        x = np.asarray(points, dtype=float)
        if self.is_vector:
            return np.stack([np.polynomial.polynomial.polyval3d(x[:, 0], x[:, 1], x[:, 2], c)
                             for c in self.coeffs], axis=1)
        return np.polynomial.polynomial.polyval3d(x[:, 0], x[:, 1], x[:, 2], self.coeffs)

    def _partial(self, c: np.ndarray, axis: int) -> np.ndarray:
        d = np.polynomial.polynomial.polyder(c, axis=axis)
        pad = [(0, 0)] * 3
        pad[axis] = (0, 1)
        return np.pad(d, pad)

    def gradient(self) -> "PolynomialField":
        return PolynomialField(np.stack([self._partial(self.coeffs, i) for i in range(3)]))

    def curl(self) -> "PolynomialField":
        u = self.coeffs
        p = self._partial
        return PolynomialField(np.stack([
            p(u[2], 1) - p(u[1], 2),
            p(u[0], 2) - p(u[2], 0),
            p(u[1], 0) - p(u[0], 1),
        ]))

    def divergence(self) -> "PolynomialField":
        return PolynomialField(sum(self._partial(self.coeffs[i], i) for i in range(3)))

    def norm(self) -> float:
        return float(np.max(np.abs(self.coeffs)))
