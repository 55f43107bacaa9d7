import numpy as np
import pytest

from wgderham.spaces import Family, inclusion_matrix
from wgderham.verify import (
    check_commutativity,
    check_complex,
    constant_normal_vector,
    containment_residual,
    curl_range_complement,
    dimension_table,
    exactness_report,
    kernel_basis,
    line_angle,
    numerical_rank,
    random_polynomial_trials,
    range_basis,
    subspace_equality,
    transcendental_trials,
    verify_case,
)
from wgderham.weakops import composite_curl, composite_gradient

EQUAL, DESC = Family.EQUAL, Family.DESCENDING


def test_kernel_of_small_matrix():
    a = np.array([[1.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    k = kernel_basis(a)
    assert k.shape == (3, 1)
    np.testing.assert_allclose(abs(k[:, 0]), [1 / np.sqrt(2), 1 / np.sqrt(2), 0], atol=1e-15)


def test_kernel_of_zero_matrix():
    np.testing.assert_allclose(kernel_basis(np.zeros((2, 3))), np.eye(3))


def test_rank_threshold():
    a = np.diag([1.0, 1e-6, 1e-12])
    assert numerical_rank(a) == 2
    assert numerical_rank(a, eps=1e-5) == 1
    assert range_basis(a).shape == (3, 2)


def test_subspace_equality():
    a = range_basis(np.array([[1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]))
    b = range_basis(np.array([[1.0, 1.0], [2.0, 1.0], [1.0, 0.0]]))
    ok, res = subspace_equality(a, b)
    assert ok and res < 1e-14
    c = range_basis(np.array([[1.0], [0.0], [0.0]]))
    assert containment_residual(c, a) > 0.1
    assert not subspace_equality(c, a)[0]


@pytest.mark.parametrize("a, b, angle", [
    ([1, 0], [-3, 0], 0.0),
    ([1, 0], [0, 2], np.pi / 2),
    ([1, 1], [1, 0], np.pi / 4),
])
def test_line_angle(a, b, angle):
    assert line_angle(np.array(a, float), np.array(b, float)) == pytest.approx(angle, abs=1e-15)


def test_cube_parallel_class_constants_in_kernel(cube):
    G = composite_gradient(cube, EQUAL, 0).entries
    iw = inclusion_matrix(cube)
    assert np.abs(G @ iw).max() <= 1e-10
    # a single face constant that breaks its parallel class is not in the kernel
    lone = np.zeros(G.shape[1])
    lone[1] = 1.0
    assert np.abs(G @ lone).max() > 0.1


def test_complement_uses_l2_inner_product(tet):
    target = constant_normal_vector(tet)
    comp = curl_range_complement(tet, EQUAL, 0)
    assert comp.shape[1] == 1
    assert line_angle(comp[:, 0], target) <= 1e-8
    # the plain coefficient-space complement is a different line on this tet
    euclid = kernel_basis(composite_curl(tet, EQUAL, 0).entries.T)
    assert line_angle(euclid[:, 0], target) > 1e-3


@pytest.mark.parametrize("name, ranks", [
    ("tet", {"grad": 11, "curl": 6, "div": 1}),
    ("cube", {"grad": 19, "curl": 8, "div": 1}),
])
def test_exactness_reports(elements, name, ranks):
    rep = exactness_report(elements[name])
    assert rep.passed and not rep.exploratory
    assert {n: rep.ranks[n]["rank"] for n in ranks} == ranks


def test_prism_exactness_is_exploratory(prism):
    rep = exactness_report(prism)
    assert rep.exploratory
    assert all(v.name.startswith("rank_nullity") for v in rep.verdicts)
    assert rep.ranks["grad"]["rank"] == 15


def test_higher_degree_exactness_is_exploratory(tet):
    assert exactness_report(tet, EQUAL, 1).exploratory


def test_polynomial_commutativity_tet(tet):
    trials = random_polynomial_trials(1, 10, seed=7)
    chk = check_commutativity(tet, EQUAL, 1, trials, seed=7)
    assert chk.passed
    assert max(chk.gradient, chk.curl, chk.divergence) <= 1e-10


def test_transcendental_commutativity_cube(cube):
    chk = check_commutativity(cube, DESC, 3, transcendental_trials(), quad_boost=6)
    assert chk.passed and chk.quad_degree == 14


def test_transcendental_needs_boost(tet):
    # without extra quadrature the k = 0 gradient square misses the 1e-8 bar
    low = check_commutativity(tet, EQUAL, 0, transcendental_trials(), quad_boost=0)
    high = check_commutativity(tet, EQUAL, 0, transcendental_trials(), quad_boost=6)
    assert not low.passed and low.gradient > 1e-4
    assert high.passed


def test_trials_are_seeded():
    a = random_polynomial_trials(2, 3, seed=11)
    b = random_polynomial_trials(2, 3, seed=11)
    np.testing.assert_array_equal(a[2].u.coeffs, b[2].u.coeffs)
    assert a[0].v.degree == 3


def test_transcendental_derivatives():
    t = transcendental_trials()[0]
    rng = np.random.default_rng(0)
    x = rng.random((4, 3))
    h = 1e-6
    eye = np.eye(3)
    jac_u = np.stack([(t.u(x + h * eye[i]) - t.u(x - h * eye[i])) / (2 * h) for i in range(3)], axis=2)
    curl = np.stack([jac_u[:, 2, 1] - jac_u[:, 1, 2], jac_u[:, 0, 2] - jac_u[:, 2, 0],
                     jac_u[:, 1, 0] - jac_u[:, 0, 1]], axis=1)
    np.testing.assert_allclose(t.curl_u(x), curl, atol=1e-8)
    grad_v = np.stack([(t.v(x + h * eye[i]) - t.v(x - h * eye[i])) / (2 * h) for i in range(3)], axis=1)
    np.testing.assert_allclose(t.grad_v(x), grad_v, atol=1e-8)
    jac_w = np.stack([(t.w(x + h * eye[i]) - t.w(x - h * eye[i])) / (2 * h) for i in range(3)], axis=2)
    np.testing.assert_allclose(t.div_w(x), np.trace(jac_w, axis1=1, axis2=2), atol=1e-8)


def test_complex_check_prism(prism):
    assert check_complex(prism, EQUAL, 2).passed


def test_prism_dimension_table(prism):
    table = dimension_table(prism, EQUAL, 0)
    assert table == {"slot0": 6, "slots": [21, 22, 8, 1], "alternating_sum": 0}


def test_verify_case_prism_dims_without_verdict(prism):
    rep = verify_case(prism, EQUAL, 0, ("dims",))
    assert rep.verdicts == [] and rep.notes


def test_verify_case_dump(tet):
    rep = verify_case(tet, EQUAL, 0, ("complex",), dump_matrices=True)
    d = rep.to_dict()
    assert np.array(d["matrices"]["grad"]).shape == (17, 15)
    assert "matrices" not in verify_case(tet, EQUAL, 0, ("complex",)).to_dict()
