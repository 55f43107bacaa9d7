import numpy as np
import pytest

from wgderham.projections import project_slot1
from wgderham.spaces import Family, SpaceDescriptor, dof_layout
from wgderham.weakops import (
    SingularGram,
    composite_curl,
    composite_divergence,
    composite_gradient,
    edge_gram,
    face_gram,
    gram_solve,
    mass_matrix,
    volume_gram,
    weak_curl_face,
    weak_curl_volume,
    weak_divergence,
    weak_gradient_edge,
    weak_gradient_face,
    weak_gradient_volume,
)

EQUAL, DESC = Family.EQUAL, Family.DESCENDING


def layout(el, slot, k=0, family=EQUAL):
    return dof_layout(SpaceDescriptor(family, slot, k), el)


def test_volume_gradient_hand_value(tet):
    # v0 = 0, v_f = 1 on z = 0 only: (|f| / |T|) n_f
    col = layout(tet, 1).faces[0].start
    got = weak_gradient_volume(tet, EQUAL, 0)[:, col]
    np.testing.assert_allclose(got, [0, 0, -3], atol=1e-12)


def test_divergence_hand_value(tet):
    col = layout(tet, 3).faces[0].start
    got = weak_divergence(tet, EQUAL, 0).entries[0, col]
    assert got == pytest.approx(3.0, abs=1e-12)


def test_face_curl_hand_value(cube):
    # u_e = induced tangent on the four edges of a unit square: perimeter / area
    f = 1
    lay = layout(cube, 2)
    u = np.zeros(lay.total)
    for e, sign in cube.face_edges[f]:
        u[lay.edges[e].start] = sign
    got = weak_curl_face(cube, f, EQUAL, 0) @ u
    np.testing.assert_allclose(got, [4.0], atol=1e-12)


def test_volume_curl_hand_value(tet):
    # u_f = t1 on face z = 0: (u_f, theta x n) = theta . (n x t1), so (|f| / |T|) t2
    lay = layout(tet, 2)
    col = lay.faces[0].start
    got = weak_curl_volume(tet, EQUAL, 0)[:, col]
    np.testing.assert_allclose(got, 3 * tet.face_t2[0], atol=1e-12)


def test_face_gradient_of_one_edge(cube):
    f = 1
    e, _ = cube.face_edges[f][0]
    col = layout(cube, 1).edges[e].start
    g = weak_gradient_face(cube, f, EQUAL, 0)[:, col]
    vec = g[0] * cube.face_t1[f] + g[1] * cube.face_t2[f]
    outward = cube.edge_midpoints[e] - cube.face_centroids[f]
    np.testing.assert_allclose(vec, outward / np.linalg.norm(outward), atol=1e-12)


@pytest.mark.parametrize("name", ["cube", "tet"])
def test_edge_gradient_head_value(elements, name):
    el = elements[name]
    lay = layout(el, 1)
    for e in range(el.n_edges):
        col = lay.vertices.start + el.edges[e][1]
        got = weak_gradient_edge(el, e, EQUAL, 0)[0, col]
        assert got == pytest.approx(1 / el.edge_lengths[e], abs=1e-12)


def test_edge_locality(prism):
    k = 1
    G = composite_gradient(prism, EQUAL, k).entries
    dom, cod = layout(prism, 1, k), layout(prism, 2, k)
    for e in range(prism.n_edges):
        rows = G[cod.edges[e]]
        allowed = np.zeros(dom.total, dtype=bool)
        allowed[dom.edges[e]] = True
        allowed[dom.vertices.start + prism.edges[e]] = True
        assert np.all(rows[:, ~allowed] == 0)


def test_constants_in_gradient_kernel(prism):
    G = composite_gradient(prism, EQUAL, 2)
    v = project_slot1(prism, EQUAL, 2, lambda x: np.full(len(x), 2.5))
    np.testing.assert_allclose(G @ v.values, 0, atol=1e-12)


@pytest.mark.parametrize("k", [1, 2])
def test_gradient_of_linear_x(tet, k):
    v = project_slot1(tet, EQUAL, k, lambda x: x[:, 0])
    g = composite_gradient(tet, EQUAL, k) @ v.values
    lay = layout(tet, 2, k)
    vol = g[lay.volume].reshape(3, -1)
    expect = np.zeros_like(vol)
    expect[0, 0] = 1.0
    np.testing.assert_allclose(vol, expect, atol=1e-12)


def test_surface_gradient_of_s1(cube):
    f, k = 2, 1
    c, t1 = cube.face_centroids[f], cube.face_t1[f]
    v = project_slot1(cube, EQUAL, k, lambda x: (x - c) @ t1)
    g = weak_gradient_face(cube, f, EQUAL, k) @ v.values
    np.testing.assert_allclose(g, [1, 0, 0, 0, 0, 0], atol=1e-12)


def test_edge_gradient_of_arc_length(cube):
    e, k = 3, 2
    m, t = cube.edge_midpoints[e], cube.edge_tangents[e]
    v = project_slot1(cube, EQUAL, k, lambda x: (x - m) @ t)
    g = weak_gradient_edge(cube, e, EQUAL, k) @ v.values
    np.testing.assert_allclose(g, [1, 0, 0], atol=1e-12)


def test_divergence_of_constant_field(prism):
    c = np.array([0.3, -1.2, 2.0])
    lay = layout(prism, 3)
    w = np.zeros(lay.total)
    w[lay.volume] = c
    for f in range(prism.n_faces):
        w[lay.faces[f].start] = c @ prism.face_normals[f]
    np.testing.assert_allclose(weak_divergence(prism, EQUAL, 0) @ w, 0, atol=1e-12)


@pytest.mark.parametrize("name, shapes", [
    ("tet", ((17, 15), (7, 17), (1, 7))),
    ("cube", ((27, 27), (9, 27), (1, 9))),
])
def test_composite_shapes(elements, name, shapes):
    el = elements[name]
    got = tuple(op(el, EQUAL, 0).shape for op in (composite_gradient, composite_curl, composite_divergence))
    assert got == shapes


@pytest.mark.parametrize("family, k", [(EQUAL, 1), (DESC, 3)])
def test_composition_vanishes(cube, family, k):
    G, C, D = (op(cube, family, k) for op in (composite_gradient, composite_curl, composite_divergence))
    assert np.abs(C @ G).max() < 1e-10
    assert np.abs(D.entries @ C.entries).max() < 1e-10


@pytest.mark.parametrize("name", ["tet", "cube", "prism"])
@pytest.mark.parametrize("k", [0, 3, 5])
def test_grams_spd_and_solvable(elements, name, k):
    el = elements[name]
    N = 2 * k + 2
    grams = [volume_gram(el, k, N), face_gram(el, 0, k, N), edge_gram(el, 0, k, N)]
    rng = np.random.default_rng(k)
    for g in grams:
        np.testing.assert_allclose(g, g.T, atol=1e-15)
        assert np.linalg.eigvalsh(g).min() > 0
        d = 1 / np.sqrt(np.diag(g))
        assert np.linalg.cond(g * np.outer(d, d)) < 1e8
        b = rng.normal(size=len(g))
        x = gram_solve(g, b)
        assert np.linalg.norm(g @ x - b) <= 1e-12 * np.linalg.norm(b) * np.linalg.cond(g * np.outer(d, d))


def test_gram_solve_rejects_indefinite():
    with pytest.raises(SingularGram):
        gram_solve(np.array([[1.0, 2.0], [2.0, 1.0]]), np.ones(2))


def test_mass_matrix_constant_normal(tet):
    # the squared L2 norm of {0, n_f} is the total face area
    desc = SpaceDescriptor(EQUAL, 3, 0)
    M = mass_matrix(tet, desc)
    x = np.zeros(len(M))
    for s in dof_layout(desc, tet).faces:
        x[s.start] = 1.0
    assert x @ M @ x == pytest.approx(tet.face_areas.sum(), rel=1e-14)


def test_operators_cached(tet):
    assert composite_gradient(tet, EQUAL, 1) is composite_gradient(tet, EQUAL, 1)
