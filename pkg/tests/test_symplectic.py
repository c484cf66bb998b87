import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from symsystole.errors import ClosureError, ConstructionError, DimensionError, InvolutionError
from symsystole.symplectic import (
    LinearInvolution,
    LoopSamples,
    averaged_liouville_eval,
    complex_conjugation,
    complex_structure,
    gram_schmidt_unitary,
    liouville_eval,
    loop_action,
    make_involution_theta,
    pairing_table,
    symplectic_form,
    symplectic_matrix,
)

finite = st.floats(-10, 10, allow_nan=False)
angles = st.floats(0, 2 * math.pi, allow_nan=False)


def vec(n):
    return arrays(np.float64, 2 * n, elements=finite)


def circle(radius=1.0, m=1000, sign=1.0, n=1):
    t = np.linspace(0.0, 2 * math.pi, m + 1)
    pts = np.zeros((m + 1, 2 * n))
    pts[:, 0] = radius * np.cos(t)
    pts[:, 1] = sign * radius * np.sin(t)
    return LoopSamples(pts, t)


# --- standard structures -------------------------------------------------


def test_symplectic_form_standard_pairing():
    assert symplectic_form([1, 0], [0, 1]) == 1.0


def test_symplectic_form_vanishes_on_diagonal():
    assert symplectic_form([3, 7], [3, 7]) == 0.0


def test_bordeaux_vector_pairs_trivially_with_its_conjugate():
    assert symplectic_form([1, 0, 0, 1], [1, 0, 0, -1]) == 0.0


def test_symplectic_form_dimension_mismatch():
    with pytest.raises(DimensionError):
        symplectic_form([1, 0], [1, 0, 0, 0])


def test_liouville_examples():
    assert liouville_eval([1, 0], [0, 1]) == 0.5
    assert liouville_eval([0, 1], [1, 0]) == -0.5
    assert liouville_eval(np.zeros(6), np.arange(6.0)) == 0.0


def test_complex_structure_squares_to_minus_identity():
    J = complex_structure(3)
    assert np.allclose(J @ J, -np.eye(6))
    assert np.allclose(J @ [1, 0, 0, 0, 0, 0], [0, 1, 0, 0, 0, 0])


def test_omega_is_j_compatible():
    # omega(u, J u) = |u|^2
    u = np.array([0.3, -1.2, 2.0, 0.5])
    assert symplectic_form(u, complex_structure(2) @ u) == pytest.approx(u @ u)


@given(vec(2), vec(2), vec(2), st.floats(-5, 5))
def test_symplectic_form_bilinear_antisymmetric(u, v, w, s):
    assert symplectic_form(u, v) == pytest.approx(-symplectic_form(v, u), abs=1e-9)
    lhs = symplectic_form(s * u + w, v)
    rhs = s * symplectic_form(u, v) + symplectic_form(w, v)
    assert lhs == pytest.approx(rhs, abs=1e-8)


# --- involutions ------------------------------------------------------------


def test_theta_zero_is_conjugation():
    rho = make_involution_theta([0.0, 0.0])
    assert np.array_equal(rho.matrix, np.diag([1.0, -1, 1, -1]))
    assert np.array_equal(complex_conjugation(2).matrix, rho.matrix)


def test_theta_pi_fixes_y_axis():
    rho = make_involution_theta([math.pi])
    assert np.allclose(rho.matrix, [[-1, 0], [0, 1]], atol=1e-15)
    assert np.allclose(np.abs(rho.fixed_basis[:, 0]), [0, 1], atol=1e-12)


def test_theta_half_pi_fixes_diagonal():
    rho = make_involution_theta([math.pi / 2])
    assert np.allclose(rho.matrix, [[0, 1], [1, 0]], atol=1e-15)
    b = rho.fixed_basis[:, 0]
    assert abs(b[0] - b[1]) < 1e-12


@given(st.lists(angles, min_size=1, max_size=4))
def test_theta_involutions_pass_invariants(theta):
    rho = make_involution_theta(theta)
    n = len(theta)
    A, J = rho.matrix, complex_structure(n)
    assert np.abs(A @ A - np.eye(2 * n)).max() < 1e-12
    assert np.abs(A.T @ J @ A + J).max() < 1e-12
    B = rho.fixed_basis
    assert B.shape == (2 * n, n)
    assert np.linalg.matrix_rank(B) == n
    assert np.abs(B.T @ symplectic_matrix(n) @ B).max() < 1e-12
    assert np.allclose(A @ B, B, atol=1e-12)


def test_from_matrix_rejects_symplectic_involution():
    with pytest.raises(InvolutionError):
        LinearInvolution.from_matrix(-np.eye(2))


def test_from_matrix_rejects_non_involution():
    with pytest.raises(InvolutionError):
        LinearInvolution.from_matrix(np.diag([2.0, -0.5]))


def test_from_matrix_rejects_odd_size():
    with pytest.raises(DimensionError):
        LinearInvolution.from_matrix(np.eye(3))


def test_distance_to_fixed_and_projection():
    rho = complex_conjugation(2)
    z = np.array([1.0, 2.0, -3.0, 4.0])
    assert rho.distance_to_fixed(z) == pytest.approx(math.hypot(2, 4))
    assert np.allclose(rho.fixed_projection(z), [1, 0, -3, 0])


# --- averaged Liouville form ------------------------------------------------


@given(vec(2), vec(2))
def test_averaged_form_equals_liouville_for_conjugation(z, v):
    rho = complex_conjugation(2)
    assert averaged_liouville_eval(z, v, rho) == pytest.approx(liouville_eval(z, v), abs=1e-9)


@given(st.lists(angles, min_size=2, max_size=2), vec(2), vec(2))
def test_averaged_form_is_anti_invariant(theta, z, v):
    rho = make_involution_theta(theta)
    lhs = averaged_liouville_eval(rho(z), rho(v), rho)
    assert lhs == pytest.approx(-averaged_liouville_eval(z, v, rho), abs=1e-8)


def test_averaged_form_vanishes_on_fixed_locus():
    rho = make_involution_theta([0.7, 2.1])
    B = rho.fixed_basis
    z, v = B @ [0.4, -1.3], B @ [2.0, 0.5]
    assert abs(averaged_liouville_eval(z, v, rho)) < 1e-14


# --- action -------------------------------------------------------------------


def test_unit_circle_action():
    assert loop_action(circle()) == pytest.approx(math.pi, abs=1e-6)


def test_negative_circle_action():
    assert loop_action(circle(sign=-1.0)) == pytest.approx(-math.pi, abs=1e-6)


def test_neck_circle_action():
    eps = 0.1
    assert loop_action(circle(math.sqrt(eps), n=2)) == pytest.approx(math.pi * eps, abs=1e-6)


def test_action_independent_of_primitive():
    loop = circle(n=2)
    rho = make_involution_theta([0.4, 1.9])
    assert loop_action(loop, rho) == pytest.approx(loop_action(loop), abs=1e-10)


def test_action_reversal_antisymmetry():
    t = np.linspace(0, 1, 401)
    pts = np.column_stack([np.cos(2 * np.pi * t) + 0.3 * np.cos(6 * np.pi * t), np.sin(2 * np.pi * t), 0.2 * np.sin(4 * np.pi * t), 0.1 * np.cos(2 * np.pi * t)])
    loop = LoopSamples(pts, t)
    assert loop_action(loop.reversed()) == pytest.approx(-loop_action(loop), abs=1e-10)


def test_open_loop_raises_with_gap():
    t = np.linspace(0, 1.5 * math.pi, 100)
    loop = LoopSamples(np.column_stack([np.cos(t), np.sin(t)]), t)
    with pytest.raises(ClosureError) as info:
        loop_action(loop)
    assert info.value.gap == pytest.approx(math.sqrt(2), rel=1e-9)


# --- unitary basis ------------------------------------------------------------


def test_gram_schmidt_bordeaux_vector():
    v1 = np.array([1.0, 0, 0, 1]) / math.sqrt(2)
    B = gram_schmidt_unitary(v1, complex_conjugation(2))
    assert np.abs(pairing_table(B) - symplectic_matrix(2)).max() < 1e-10
    assert np.allclose(B @ B.T, np.eye(4), atol=1e-12)
    assert np.allclose(B[0], v1)
    # v2 is the normalised symplectic-orthogonal part of rho(v1)
    assert np.allclose(B[2], np.array([1.0, 0, 0, -1]) / math.sqrt(2))


def test_gram_schmidt_normalises_v1():
    B = gram_schmidt_unitary([1.0, 0, 0, 1], complex_conjugation(2))
    assert symplectic_form(B[0], B[1]) == pytest.approx(1.0)


def test_gram_schmidt_rejects_invariant_plane():
    with pytest.raises(ConstructionError):
        gram_schmidt_unitary([1.0, 0, 0, 0], complex_conjugation(2))


def test_gram_schmidt_rejects_zero_and_small_n():
    with pytest.raises(ConstructionError):
        gram_schmidt_unitary(np.zeros(4), complex_conjugation(2))
    with pytest.raises(ConstructionError):
        gram_schmidt_unitary([1.0, 1.0], complex_conjugation(1))


def _brute_pairings(B):
    # oracle: evaluate each pairing from the coordinate formula
    m = len(B)
    out = np.zeros((m, m))
    for i in range(m):
        for j in range(m):
            out[i, j] = sum(B[i][2 * k] * B[j][2 * k + 1] - B[i][2 * k + 1] * B[j][2 * k] for k in range(m // 2))
    return out


def test_gram_schmidt_random_n3_against_brute_force(rng):
    rho = make_involution_theta(rng.uniform(0, 2 * np.pi, 3))
    for _ in range(5):
        B = gram_schmidt_unitary(rng.normal(size=6), rho)
        expected = np.kron(np.eye(3), [[0.0, 1.0], [-1.0, 0.0]])
        assert np.abs(_brute_pairings(B) - expected).max() < 1e-10
