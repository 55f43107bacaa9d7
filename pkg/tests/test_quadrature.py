from math import factorial

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wgderham.quadrature import (
    edge_rule,
    face_rule,
    reference_tetrahedron_rule,
    reference_triangle_rule,
    volume_rule,
)


def simplex_monomial(exps):
    # integral of prod x_i^a_i over the unit simplex in len(exps) dimensions
    num = np.prod([factorial(a) for a in exps])
    return num / factorial(sum(exps) + len(exps))


def test_tet_integral_of_x(tet):
    qr = volume_rule(tet, 1)
    assert qr.integrate(qr.points[:, 0]) == pytest.approx(1 / 24, rel=1e-14)


def test_tet_diagonal_face_area(tet):
    qr = face_rule(tet, 3, 0)
    assert qr.weights.sum() == pytest.approx(np.sqrt(3) / 2, rel=1e-14)


def test_edge_second_moment(cube):
    qr = edge_rule(cube, 0, 2)
    s = cube.edge_coords(0, qr.points)[:, 0]
    assert qr.integrate(s**2) == pytest.approx(1 / 12, rel=1e-14)


@pytest.mark.parametrize("degree, n", [(0, 1), (1, 1), (2, 2), (3, 2), (4, 3), (9, 5)])
def test_points_per_direction(degree, n):
    pts, _ = reference_triangle_rule(degree)
    assert len(pts) == n * n
    pts, _ = reference_tetrahedron_rule(degree)
    assert len(pts) == n**3


@settings(max_examples=40, deadline=None)
@given(st.tuples(st.integers(0, 4), st.integers(0, 4), st.integers(0, 4)))
def test_tetrahedron_monomial_exactness(exps):
    deg = sum(exps)
    pts, w = reference_tetrahedron_rule(deg)
    got = w @ np.prod(pts ** np.array(exps), axis=1)
    assert got == pytest.approx(simplex_monomial(exps), rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.tuples(st.integers(0, 6), st.integers(0, 6)))
def test_triangle_monomial_exactness(exps):
    pts, w = reference_triangle_rule(sum(exps))
    got = w @ np.prod(pts ** np.array(exps), axis=1)
    assert got == pytest.approx(simplex_monomial(exps), rel=1e-12)


@pytest.mark.parametrize("name, volume", [("tet", 1 / 6), ("cube", 1.0), ("prism", 0.5)])
def test_volume_weights(elements, name, volume):
    assert volume_rule(elements[name], 4).weights.sum() == pytest.approx(volume, rel=1e-14)


def test_cube_moment(cube):
    # int x^2 y z^3 over the unit cube = 1/3 * 1/2 * 1/4
    qr = volume_rule(cube, 6)
    x, y, z = qr.points.T
    assert qr.integrate(x**2 * y * z**3) == pytest.approx(1 / 24, rel=1e-13)


def test_prism_face_moment(prism):
    # quad face y = 0: x in [0,1], z in [0,1]; int x z = 1/4
    f = prism.faces.index((0, 1, 4, 3))
    qr = face_rule(prism, f, 2)
    assert qr.integrate(qr.points[:, 0] * qr.points[:, 2]) == pytest.approx(0.25, rel=1e-14)


def test_rules_are_cached_and_read_only(tet):
    a = volume_rule(tet, 3)
    assert volume_rule(tet, 3) is a
    with pytest.raises(ValueError):
        a.weights[0] = 0.0
