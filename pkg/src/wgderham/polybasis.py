"""Scaled monomial bases for P_k on edges (1D), faces (2D) and volumes (3D)."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import comb

import numpy as np


def dim_pk(d: int, k: int) -> int:
    """Dimension of polynomials of total degree <= k in d variables."""
    if k < 0:
        return 0
    return comb(k + d, d)


@lru_cache(maxsize=None)
def monomial_exponents(d: int, k: int) -> np.ndarray:
    """Multi-indices of total degree <= k in graded lexicographic order.

    Within one degree the first variable's exponent decreases, so in 2D the
    degree-1 block is ``x, y`` and the degree-2 block is ``x^2, xy, y^2``.
    """
    out: list[tuple[int, ...]] = []

    def fill(prefix: tuple[int, ...], remaining: int, slots: int) -> None:
        if slots == 1:
            out.append(prefix + (remaining,))
            return
        for p in range(remaining, -1, -1):
            fill(prefix + (p,), remaining - p, slots - 1)

    for total in range(k + 1):
        fill((), total, d)
    exps = np.array(out, dtype=int).reshape(-1, d)
    exps.setflags(write=False)
    return exps


@dataclass(frozen=True, eq=False)
class ScalarBasis:
    """Monomials ``((x - center) / scale) ** alpha`` of total degree <= ``degree``."""

    dim: int
    degree: int
    center: np.ndarray = field(default=None)
    scale: float = 1.0

    def __post_init__(self):
        c = np.zeros(self.dim) if self.center is None else np.asarray(self.center, dtype=float)
        object.__setattr__(self, "center", c.reshape(self.dim))

    @property
    def exponents(self) -> np.ndarray:
        return monomial_exponents(self.dim, self.degree)

    @property
    def size(self) -> int:
        return dim_pk(self.dim, self.degree)

    def _powers(self, points):
        x = (np.asarray(points, dtype=float).reshape(-1, self.dim) - self.center) / self.scale
        # pw[n, j, p] = x_j ** p
        pw = np.ones(x.shape + (self.degree + 1,))
        for p in range(1, self.degree + 1):
            pw[..., p] = pw[..., p - 1] * x
        return pw

    def eval(self, points) -> np.ndarray:
        """Values of all basis functions; shape ``(npts, size)`` (or ``(size,)`` for one point)."""
        single = np.ndim(points) <= 1 and np.size(points) == self.dim
        pw = self._powers(points)
        exps = self.exponents
        vals = np.ones((pw.shape[0], len(exps)))
        for j in range(self.dim):
            vals *= pw[:, j, exps[:, j]]
        return vals[0] if single else vals

    def grad(self, points) -> np.ndarray:
        """Partial derivatives; shape ``(npts, dim, size)`` (or ``(dim, size)`` for one point)."""
        single = np.ndim(points) <= 1 and np.size(points) == self.dim
        pw = self._powers(points)
        exps = self.exponents
        out = np.empty((pw.shape[0], self.dim, len(exps)))
        for i in range(self.dim):
            g = exps[:, i] / self.scale * pw[:, i, np.maximum(exps[:, i] - 1, 0)]
            for j in range(self.dim):
                if j != i:
                    g = g * pw[:, j, exps[:, j]]
            out[:, i, :] = g
        return out[0] if single else out


def surface_curl_scalar(basis: ScalarBasis, theta1, theta2, points) -> np.ndarray:
    """``curl(theta) . n_f = d(theta2)/ds1 - d(theta1)/ds2`` for a tangential field.

    ``theta1`` and ``theta2`` are coefficient arrays (vectors, or matrices
    with one column per field) of the components along ``t1`` and ``t2`` in a
    2D face basis; ``points`` are face coordinates.
    """
    g = basis.grad(np.atleast_2d(points))
    return g[:, 0, :] @ np.asarray(theta2) - g[:, 1, :] @ np.asarray(theta1)


def rotated_surface_gradient(frame, basis: ScalarBasis, tau, points) -> np.ndarray:
    """``grad(tau) x n_f = -(dtau/ds1) t2 + (dtau/ds2) t1`` as 3D vectors.

    ``frame`` is ``(t1, t2, n)``.  Returns shape ``(npts, 3)`` for a
    coefficient vector, ``(npts, 3, m)`` for an ``(size, m)`` matrix.
    """
    t1, t2, _ = (np.asarray(v, dtype=float) for v in frame)
    g = basis.grad(np.atleast_2d(points))
    d1 = g[:, 0, :] @ np.asarray(tau)
    d2 = g[:, 1, :] @ np.asarray(tau)
    if d1.ndim == 1:
        return np.outer(d2, t1) - np.outer(d1, t2)
    return d2[:, None, :] * t1[None, :, None] - d1[:, None, :] * t2[None, :, None]


# Entity bases.  Faces use (s1, s2) coordinates from the face centroid and
# edges the arc length from the midpoint, so their centers are the origin.

def volume_basis(element, degree: int) -> ScalarBasis:
    # half the centroid-to-vertex radius keeps the k <= 5 Gram condition below 1e8
    return ScalarBasis(3, degree, element.centroid, 0.5 * element.h)


def face_basis(element, face_id: int, degree: int) -> ScalarBasis:
    loop = list(element.faces[face_id])
    scale = np.max(np.linalg.norm(element.vertices[loop] - element.face_centroids[face_id], axis=1))
    return ScalarBasis(2, degree, None, float(scale))


def edge_basis(element, edge_id: int, degree: int) -> ScalarBasis:
    return ScalarBasis(1, degree, None, 0.5 * float(element.edge_lengths[edge_id]))
