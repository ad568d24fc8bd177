import math

import numpy as np
import pytest

from qbounds.bounds import (
    SolverOptions,
    diag_weight,
    envelope_from_weighted_bound,
    hcrb_general,
    hcrb_qubit,
    nagaoka_curve_qubit,
    ncrb_general,
    ncrb_objective,
    ncrb_qubit,
    rld_crb,
    sld_crb,
)
from qbounds.errors import ConvergenceError, DomainError, InfeasibleError, RLDUndefinedError, ValidationError
from qbounds.model import EstimationProblem, sld_qfi
from qbounds.randomgen import SeededRng, random_problem, random_pure_problem
from qbounds.scenarios import RotationsConfig, equal_bounds_problem, rotations_problem

S2 = math.sqrt(2.0)
C_N_HALF = 4 * (1 + S2) ** 2
C_H_HALF = 12 + 4 * S2


def test_sld_crb_values(rotated_half):
    assert sld_crb(sld_qfi(rotated_half)) == pytest.approx(12.0, rel=1e-12)
    assert sld_crb(np.eye(2)) == 2.0
    assert sld_crb(np.eye(2), diag_weight(1.5)) == pytest.approx(2.0)
    assert sld_crb([[1.0, 1.0], [1.0, 1.0]]) == math.inf


def test_weight_validation():
    with pytest.raises(ValidationError):
        sld_crb(np.eye(2), np.diag([1.0, -1.0]))
    with pytest.raises(DomainError):
        diag_weight(2.0)


def test_ncrb_qubit_values(rotated_half):
    assert ncrb_qubit(sld_qfi(rotated_half)) == pytest.approx(C_N_HALF, rel=1e-12)
    assert ncrb_qubit(np.eye(2)) == pytest.approx(4.0)
    assert ncrb_qubit(np.diag([4.0, 9.0])) == pytest.approx(25 / 36)


def test_hcrb_qubit_values(rotated_half):
    assert hcrb_qubit(rotated_half) == pytest.approx(C_H_HALF, rel=1e-12)
    assert hcrb_qubit(rotated_half) == pytest.approx((3 + 2 * S2 * 0.5) / 0.25, rel=1e-12)
    assert rld_crb(rotated_half) == pytest.approx(C_H_HALF, rel=1e-12)


def test_hcrb_qubit_equals_sld_bound_for_commuting_derivatives():
    p = EstimationProblem(np.diag([0.7, 0.3]).astype(complex), (np.diag([0.1, -0.1]), np.diag([0.05, -0.05])))
    # parallel derivatives: singular QFI
    assert hcrb_qubit(p) == math.inf
    rho = np.diag([0.7, 0.3]).astype(complex)
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    p = EstimationProblem(rho, (np.diag([0.1, -0.1]).astype(complex), 0.2 * sx))
    # real RLD information: the imaginary term vanishes
    assert hcrb_qubit(p) == pytest.approx(sld_crb(sld_qfi(p)), rel=1e-12)


def test_hcrb_qubit_requires_full_rank(rotated_pure):
    with pytest.raises(RLDUndefinedError):
        hcrb_qubit(rotated_pure)


@pytest.mark.parametrize("k", range(10))
@pytest.mark.parametrize("w", [0.4, 1.0, 1.7])
def test_hcrb_qubit_matches_solver_on_random_qubits(k, w):
    p = random_problem(2, SeededRng(31, k))
    W = diag_weight(w)
    assert hcrb_general(p, W).value == pytest.approx(hcrb_qubit(p, W), rel=1e-6)


@pytest.mark.parametrize("k", range(10))
def test_ncrb_general_matches_qubit_formula(k):
    p = random_problem(2, SeededRng(32, k))
    W = np.array([[1.2, 0.3], [0.3, 0.6]])
    assert ncrb_general(p, W).value == pytest.approx(ncrb_qubit(sld_qfi(p), W), rel=1e-5)


def test_general_solvers_on_rotations(rotated_half):
    assert ncrb_general(rotated_half).value == pytest.approx(C_N_HALF, rel=1e-8)
    assert hcrb_general(rotated_half).value == pytest.approx(C_H_HALF, rel=1e-8)


def test_equal_bounds_family_d3():
    p, expected = equal_bounds_problem(3)
    assert ncrb_general(p).value == pytest.approx(expected, rel=1e-6)


def test_result_invariants():
    p = random_problem(3, SeededRng(33))
    res = ncrb_general(p)
    X1, X2 = res.optimizer
    assert res.diagnostics.constraint_residual <= 1e-8
    for j, X in enumerate((X1, X2)):
        assert abs(np.trace(p.rho @ X)) <= 1e-8
        for i in range(2):
            assert np.trace(p.drho[i] @ X).real == pytest.approx(float(i == j), abs=1e-8)
    assert ncrb_objective(p, X1, X2) == pytest.approx(res.value, rel=1e-8)
    assert res.value >= sld_crb(sld_qfi(p)) - 1e-7
    assert res.diagnostics.final_mu == pytest.approx(1e-8)


@pytest.mark.parametrize("k", range(4))
def test_reparameterization_covariance(k):
    rng = SeededRng(34, k)
    p = random_problem(3, rng)
    A = rng.generator.standard_normal((2, 2)) + 2 * np.eye(2)
    W = np.array([[1.0, 0.2], [0.2, 0.8]])
    # derivatives A d map estimators to A^-T X, so W becomes A^-1 W A^-T
    Ainv = np.linalg.inv(A)
    lhs = ncrb_general(p.reparameterized(A), W).value
    rhs = ncrb_general(p, Ainv @ W @ Ainv.T).value
    assert lhs == pytest.approx(rhs, rel=1e-6)


def test_monotone_in_weight():
    p = random_problem(3, SeededRng(35))
    W = np.array([[0.9, 0.1], [0.1, 1.1]])
    assert ncrb_general(p, W + 1e-2 * np.eye(2)).value >= ncrb_general(p, W).value


@pytest.mark.parametrize("d", [2, 3])
def test_pure_states_have_equal_bounds(d):
    for k in range(3):
        p = random_pure_problem(d, SeededRng(36 + d, k))
        assert hcrb_general(p).value == pytest.approx(ncrb_general(p).value, rel=1e-5)


def test_singular_qfi_reports_infinity():
    p = rotations_problem(RotationsConfig(1.0, math.pi / 2, math.pi / 3))
    assert ncrb_general(p).value == math.inf
    assert hcrb_general(p).value == math.inf
    assert not ncrb_general(p).finite
    assert ncrb_qubit(sld_qfi(p)) == math.inf


def test_dependent_derivatives_are_infeasible():
    # parallel derivatives: the bound is infinite, and the constraint space
    # itself reports infeasibility when built directly
    rho = np.eye(3) / 3
    a = np.diag([1.0, -1.0, 0.0]).astype(complex)
    p = EstimationProblem(rho.astype(complex), (a, 2 * a))
    assert ncrb_general(p).value == math.inf
    from qbounds.bounds import _UnbiasedSpace

    with pytest.raises(InfeasibleError):
        _UnbiasedSpace(p)


def test_iteration_limit_raises_with_diagnostics():
    p = random_problem(4, SeededRng(37))
    with pytest.raises(ConvergenceError) as info:
        ncrb_general(p, opts=SolverOptions(max_iterations=1))
    assert info.value.diagnostics is not None


def test_nagaoka_curve():
    c = nagaoka_curve_qubit(np.eye(2), [2.0, 5.0, 1e9])
    np.testing.assert_allclose(c.v2[:2], [2.0, 1.25])
    assert c.v2[2] == pytest.approx(1.0)
    F = np.array([[3 / 16, -1 / 16], [-1 / 16, 3 / 16]])
    assert nagaoka_curve_qubit(F, [10.0]).v2[0] == pytest.approx(14.0)
    with pytest.raises(DomainError):
        nagaoka_curve_qubit(np.eye(2), [1.0])


def test_envelope_tangent_reproduces_hyperbola():
    F = sld_qfi(random_problem(2, SeededRng(38)))
    curve = envelope_from_weighted_bound(lambda W: ncrb_qubit(F, W), np.linspace(0.02, 1.98, 41), method="tangent")
    exact = nagaoka_curve_qubit(F, curve.v1).v2
    np.testing.assert_allclose(curve.v2, exact, rtol=1e-6)
    assert curve.is_monotone()


def test_envelope_vertices_converge_with_grid():
    F = sld_qfi(random_problem(2, SeededRng(39)))
    errs = []
    for n in (51, 401, 3201):
        w = np.linspace(0.2, 1.8, n)
        curve = envelope_from_weighted_bound(lambda W: ncrb_qubit(F, W), w, method="vertex")
        exact = nagaoka_curve_qubit(F, curve.v1).v2
        # finitely many supporting lines enclose a polygon around the region,
        # so its vertices sit on or below the hyperbola
        assert np.all(curve.v2 <= exact * (1 + 1e-12))
        errs.append(np.max((exact - curve.v2) / exact))
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 1e-5


def test_sld_envelope_collapses_to_corner():
    curve = envelope_from_weighted_bound(lambda W: sld_crb(np.eye(2), W), np.linspace(0.1, 1.9, 11), method="tangent")
    np.testing.assert_allclose(curve.points, [[1.0, 1.0]], atol=1e-9)


def test_envelope_drops_infinite_weights():
    def bound(W):
        return math.inf if W[0, 0] > 1.5 else ncrb_qubit(np.eye(2), W)

    curve = envelope_from_weighted_bound(bound, np.linspace(0.1, 1.9, 19))
    assert curve.flags and "infinite" in curve.flags[0]
    with pytest.raises(DomainError):
        envelope_from_weighted_bound(bound, [0.0, 1.0])


@pytest.mark.parametrize("d", [2, 3])
@pytest.mark.filterwarnings("ignore:Solution may be inaccurate")
def test_solver_agrees_with_sdp(d):
    sdp = pytest.importorskip("qbounds.sdp")
    pytest.importorskip("cvxpy")
    for k in range(2):
        p = random_problem(d, SeededRng(40 + d, k))
        W = np.array([[1.1, -0.2], [-0.2, 0.9]])
        assert ncrb_general(p, W).value == pytest.approx(sdp.ncrb_sdp(p, W).value, rel=1e-5)
        assert hcrb_general(p, W).value == pytest.approx(sdp.hcrb_sdp(p, W).value, rel=1e-5)


def test_sdp_backend_option(rotated_half):
    pytest.importorskip("cvxpy")
    res = ncrb_general(rotated_half, opts=SolverOptions(backend="sdp"))
    assert res.value == pytest.approx(C_N_HALF, rel=1e-5)
    with pytest.raises(ValidationError):
        ncrb_general(rotated_half, opts=SolverOptions(backend="nope"))
