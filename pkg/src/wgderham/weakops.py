"""Weak gradient, curl and divergence as dense matrices between WG spaces.

Each operator block is obtained by writing the defining integration-by-parts
identity for every test function of the target entity space (right-hand
side, one column per domain DOF) and solving with that space's Gram matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as spl

from .geometry import PolyElement, endpoint_outward_sign
from .polybasis import (
    edge_basis,
    face_basis,
    rotated_surface_gradient,
    surface_curl_scalar,
    volume_basis,
)
from .quadrature import edge_rule, face_rule, volume_rule
from .spaces import Family, SpaceDescriptor, dof_layout

GRAM_COND_LIMIT = 1e12


class SingularGram(np.linalg.LinAlgError):
    pass


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    domain: SpaceDescriptor
    codomain: SpaceDescriptor
    entries: np.ndarray
    element: PolyElement

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    def __matmul__(self, other):
        if isinstance(other, OperatorMatrix):
            return self.entries @ other.entries
        return self.entries @ other


def default_quad_degree(k: int) -> int:
    return 2 * k + 2


def gram_solve(gram: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve ``gram @ x = rhs`` for an SPD Gram matrix.

    The system is symmetrically scaled to unit diagonal first.  Cholesky
    normally; least squares through the SVD when the scaled matrix is too
    ill-conditioned to trust the factorization.
    """
    diag = np.diag(gram)
    if np.any(diag <= 0):
        raise SingularGram("Gram matrix has a non-positive diagonal")
    d = 1.0 / np.sqrt(diag)
    scaled = gram * d[:, None] * d[None, :]
    b = rhs * d.reshape((-1,) + (1,) * (np.ndim(rhs) - 1))
    try:
        factor = spl.cho_factor(scaled)
    except np.linalg.LinAlgError as exc:
        raise SingularGram("Gram matrix is not positive definite") from exc
    if np.linalg.cond(scaled) > GRAM_COND_LIMIT:
        y = np.linalg.lstsq(scaled, b, rcond=None)[0]
    else:
        y = spl.cho_solve(factor, b)
    return y * d.reshape((-1,) + (1,) * (np.ndim(y) - 1))


def _solve_components(gram: np.ndarray, rhs: np.ndarray, ncomp: int) -> np.ndarray:
    n = gram.shape[0]
    blocks = [gram_solve(gram, rhs[c * n:(c + 1) * n]) for c in range(ncomp)]
    return np.vstack(blocks)


def _weighted_gram(values: np.ndarray, weights: np.ndarray) -> np.ndarray:
    g = (values * weights[:, None]).T @ values
    return 0.5 * (g + g.T)


def volume_gram(element: PolyElement, degree: int, quad_degree: int) -> np.ndarray:
    qr = volume_rule(element, quad_degree)
    return _weighted_gram(volume_basis(element, degree).eval(qr.points), qr.weights)


def face_gram(element: PolyElement, face_id: int, degree: int, quad_degree: int) -> np.ndarray:
    qr = face_rule(element, face_id, quad_degree)
    s = element.face_coords(face_id, qr.points)
    return _weighted_gram(face_basis(element, face_id, degree).eval(s), qr.weights)


def edge_gram(element: PolyElement, edge_id: int, degree: int, quad_degree: int) -> np.ndarray:
    qr = edge_rule(element, edge_id, quad_degree)
    s = element.edge_coords(edge_id, qr.points)
    return _weighted_gram(edge_basis(element, edge_id, degree).eval(s), qr.weights)


def mass_matrix(element: PolyElement, desc: SpaceDescriptor, quad_degree: int | None = None) -> np.ndarray:
    """L2 inner product of a WG space, summed over its entities.

    Vertex values (slot 1) enter with unit weight.
    """
    N = default_quad_degree(desc.k) if quad_degree is None else quad_degree
    layout = dof_layout(desc, element)
    dv, df, de = desc.degrees
    cv, cf, ce = desc.components
    M = np.zeros((layout.total, layout.total))
    M[layout.volume, layout.volume] = np.kron(np.eye(cv), volume_gram(element, dv, N))
    if cf:
        for f, s in enumerate(layout.faces):
            M[s, s] = np.kron(np.eye(cf), face_gram(element, f, df, N))
    if ce:
        for e, s in enumerate(layout.edges):
            M[s, s] = np.kron(np.eye(ce), edge_gram(element, e, de, N))
    M[layout.vertices, layout.vertices] = np.eye(layout.vertices.stop - layout.vertices.start)
    return M


def _setup(element, family, k, dom_slot, quad_degree):
    dom = SpaceDescriptor(family, dom_slot, k)
    cod = SpaceDescriptor(family, dom_slot + 1, k)
    N = default_quad_degree(k) if quad_degree is None else quad_degree
    return dom, cod, dof_layout(dom, element), N


def weak_gradient_volume(element: PolyElement, family: Family, k: int, quad_degree: int | None = None) -> np.ndarray:
    """Volume block of the weak gradient, shape ``(3 * dim P, dim slot 1)``.

    (grad_w v, phi)_T = -(v0, div phi)_T + (v_f, phi . n)_dT
    """
    dom, cod, layout, N = _setup(element, family, k, 1, quad_degree)
    dv, df, _ = dom.degrees
    test = volume_basis(element, cod.degrees[0])
    nt = test.size
    rhs = np.zeros((3 * nt, layout.total))

    qr = volume_rule(element, N)
    dphi = test.grad(qr.points) * qr.weights[:, None, None]
    v0 = volume_basis(element, dv).eval(qr.points)
    for c in range(3):
        rhs[c * nt:(c + 1) * nt, layout.volume] = -dphi[:, c, :].T @ v0

    for f in range(element.n_faces):
        qf = face_rule(element, f, N)
        phi = test.eval(qf.points) * qf.weights[:, None]
        vf = face_basis(element, f, df).eval(element.face_coords(f, qf.points))
        pairing = phi.T @ vf
        for c in range(3):
            rhs[c * nt:(c + 1) * nt, layout.faces[f]] = element.face_normals[f, c] * pairing

    return _solve_components(volume_gram(element, test.degree, N), rhs, 3)


def weak_gradient_face(element: PolyElement, face_id: int, family: Family, k: int,
                       quad_degree: int | None = None) -> np.ndarray:
    """Surface weak gradient on one face, shape ``(2 * dim P, dim slot 1)``.

    (grad_wf v, theta x n)_f = -(v_f, curl theta . n)_f + (v_e, theta . t)_df,
    tested with psi = theta x n running over the tangential basis, i.e.
    theta = n x psi.  psi = p t1 gives theta = p t2; psi = p t2 gives
    theta = -p t1.
    """
    dom, cod, layout, N = _setup(element, family, k, 1, quad_degree)
    _, df, de = dom.degrees
    f = face_id
    test = face_basis(element, f, cod.degrees[1])
    nt = test.size
    eye, zero = np.eye(nt), np.zeros((nt, nt))
    t1, t2, _ = element.face_frame(f)
    rhs = np.zeros((2 * nt, layout.total))

    qf = face_rule(element, f, N)
    s = element.face_coords(f, qf.points)
    vf = face_basis(element, f, df).eval(s)
    w = qf.weights[:, None]
    curl_a = surface_curl_scalar(test, zero, eye, s)   # theta = (0, p)
    curl_b = surface_curl_scalar(test, -eye, zero, s)  # theta = (-p, 0)
    rhs[:nt, layout.faces[f]] = -(curl_a * w).T @ vf
    rhs[nt:, layout.faces[f]] = -(curl_b * w).T @ vf

    for e, sign in element.face_edges[f]:
        qe = edge_rule(element, e, N)
        p = test.eval(element.face_coords(f, qe.points)) * qe.weights[:, None]
        ve = edge_basis(element, e, de).eval(element.edge_coords(e, qe.points))
        te = element.edge_tangents[e]
        pairing = p.T @ ve
        rhs[:nt, layout.edges[e]] += sign * np.dot(t2, te) * pairing
        rhs[nt:, layout.edges[e]] -= sign * np.dot(t1, te) * pairing

    return _solve_components(face_gram(element, f, test.degree, N), rhs, 2)


def weak_gradient_edge(element: PolyElement, edge_id: int, family: Family, k: int,
                       quad_degree: int | None = None) -> np.ndarray:
    """Edge weak gradient (directional derivative along ``t_e``).

    (grad_we v, phi t_e)_e = -(v_e, dphi/ds)_e + [v_n phi]_tail^head
    """
    dom, cod, layout, N = _setup(element, family, k, 1, quad_degree)
    e = edge_id
    test = edge_basis(element, e, cod.degrees[2])
    rhs = np.zeros((test.size, layout.total))

    qe = edge_rule(element, e, N)
    s = element.edge_coords(e, qe.points)
    ve = edge_basis(element, e, dom.degrees[2]).eval(s)
    dphi = test.grad(s)[:, 0, :] * qe.weights[:, None]
    rhs[:, layout.edges[e]] = -dphi.T @ ve
    half = 0.5 * element.edge_lengths[e]
    for vid, s_end in zip(element.edges[e], (-half, half)):
        sign = endpoint_outward_sign(element, e, vid)
        rhs[:, layout.vertices.start + vid] += sign * test.eval(np.array([s_end]))

    return gram_solve(edge_gram(element, e, test.degree, N), rhs)


def weak_curl_volume(element: PolyElement, family: Family, k: int, quad_degree: int | None = None) -> np.ndarray:
    """Volume block of the weak curl.

    (curl_w u, theta)_T = (u0, curl theta)_T + (u_f, theta x n)_dT
    """
    dom, cod, layout, N = _setup(element, family, k, 2, quad_degree)
    du, df, _ = dom.degrees
    test = volume_basis(element, cod.degrees[0])
    nt = test.size
    rhs = np.zeros((3 * nt, layout.total))
    axes = np.eye(3)

    qr = volume_rule(element, N)
    dpsi = test.grad(qr.points) * qr.weights[:, None, None]
    u0 = volume_basis(element, du).eval(qr.points)
    nu = u0.shape[1]
    for c in range(3):
        # curl(psi e_c) = grad(psi) x e_c
        curl = np.cross(dpsi, axes[c], axisa=1, axisc=1)
        for cp in range(3):
            cols = slice(layout.volume.start + cp * nu, layout.volume.start + (cp + 1) * nu)
            rhs[c * nt:(c + 1) * nt, cols] = curl[:, cp, :].T @ u0

    for f in range(element.n_faces):
        qf = face_rule(element, f, N)
        psi = test.eval(qf.points) * qf.weights[:, None]
        uf = face_basis(element, f, df).eval(element.face_coords(f, qf.points))
        nf = uf.shape[1]
        pairing = psi.T @ uf
        n = element.face_normals[f]
        tangents = element.face_frame(f)[:2]
        start = layout.faces[f].start
        for c in range(3):
            cross = np.cross(axes[c], n)
            for d, td in enumerate(tangents):
                rhs[c * nt:(c + 1) * nt, start + d * nf:start + (d + 1) * nf] = np.dot(td, cross) * pairing

    return _solve_components(volume_gram(element, test.degree, N), rhs, 3)


def weak_curl_face(element: PolyElement, face_id: int, family: Family, k: int,
                   quad_degree: int | None = None) -> np.ndarray:
    """Surface weak curl on one face (a scalar times ``n_f``).

    (curl_wf u, tau n)_f = (u_f, grad tau x n)_f + (u_e, tau t)_df
    """
    dom, cod, layout, N = _setup(element, family, k, 2, quad_degree)
    _, df, de = dom.degrees
    f = face_id
    test = face_basis(element, f, cod.degrees[1])
    nt = test.size
    frame = element.face_frame(f)
    rhs = np.zeros((nt, layout.total))

    qf = face_rule(element, f, N)
    s = element.face_coords(f, qf.points)
    uf = face_basis(element, f, df).eval(s)
    nf = uf.shape[1]
    rot = rotated_surface_gradient(frame, test, np.eye(nt), s) * qf.weights[:, None, None]
    start = layout.faces[f].start
    for d in range(2):
        along = np.einsum("qin,i->qn", rot, frame[d])
        rhs[:, start + d * nf:start + (d + 1) * nf] = along.T @ uf

    for e, sign in element.face_edges[f]:
        qe = edge_rule(element, e, N)
        tau = test.eval(element.face_coords(f, qe.points)) * qe.weights[:, None]
        ue = edge_basis(element, e, de).eval(element.edge_coords(e, qe.points))
        rhs[:, layout.edges[e]] += sign * tau.T @ ue

    return gram_solve(face_gram(element, f, test.degree, N), rhs)


def weak_divergence(element: PolyElement, family: Family, k: int, quad_degree: int | None = None) -> OperatorMatrix:
    """(div_w w, tau)_T = -(w0, grad tau)_T + (w_f, tau n)_dT"""
    dom, cod, layout, N = _setup(element, family, k, 3, quad_degree)
    dw, df, _ = dom.degrees
    test = volume_basis(element, cod.degrees[0])
    rhs = np.zeros((test.size, layout.total))

    qr = volume_rule(element, N)
    dtau = test.grad(qr.points) * qr.weights[:, None, None]
    w0 = volume_basis(element, dw).eval(qr.points)
    nw = w0.shape[1]
    for c in range(3):
        rhs[:, c * nw:(c + 1) * nw] = -dtau[:, c, :].T @ w0

    for f in range(element.n_faces):
        qf = face_rule(element, f, N)
        tau = test.eval(qf.points) * qf.weights[:, None]
        wf = face_basis(element, f, df).eval(element.face_coords(f, qf.points))
        rhs[:, layout.faces[f]] = tau.T @ wf

    entries = gram_solve(volume_gram(element, test.degree, N), rhs)
    return OperatorMatrix(dom, cod, entries, element)


def _cached(element, key, build):
    cache = element._cache.setdefault("weakops", {})
    if key not in cache:
        op = build()
        op.entries.setflags(write=False)
        cache[key] = op
    return cache[key]


def composite_gradient(element: PolyElement, family: Family, k: int, quad_degree: int | None = None) -> OperatorMatrix:
    """Full weak gradient, slot 1 to slot 2: volume, face and edge blocks stacked."""
    def build():
        dom, cod, _, _ = _setup(element, family, k, 1, quad_degree)
        rows = [weak_gradient_volume(element, family, k, quad_degree)]
        rows += [weak_gradient_face(element, f, family, k, quad_degree) for f in range(element.n_faces)]
        rows += [weak_gradient_edge(element, e, family, k, quad_degree) for e in range(element.n_edges)]
        return OperatorMatrix(dom, cod, np.vstack(rows), element)

    return _cached(element, ("grad", Family(family), k, quad_degree), build)


def composite_curl(element: PolyElement, family: Family, k: int, quad_degree: int | None = None) -> OperatorMatrix:
    """Full weak curl, slot 2 to slot 3: volume and face blocks stacked."""
    def build():
        dom, cod, _, _ = _setup(element, family, k, 2, quad_degree)
        rows = [weak_curl_volume(element, family, k, quad_degree)]
        rows += [weak_curl_face(element, f, family, k, quad_degree) for f in range(element.n_faces)]
        return OperatorMatrix(dom, cod, np.vstack(rows), element)

    return _cached(element, ("curl", Family(family), k, quad_degree), build)


def composite_divergence(element: PolyElement, family: Family, k: int, quad_degree: int | None = None) -> OperatorMatrix:
    return _cached(element, ("div", Family(family), k, quad_degree),
                   lambda: weak_divergence(element, family, k, quad_degree))
