"""Semidefinite-program backend for the general bounds (needs cvxpy).

Used as ``SolverOptions(backend="sdp")`` and as an independent cross-check
of the smoothed solver in the tests.
"""
import math

import numpy as np

from .bounds import BoundResult, SolverDiagnostics, as_weight
from .errors import ConvergenceError, ValidationError
from .linalg import psd_sqrt
from .model import EstimationProblem

try:
    import cvxpy as cp
except ImportError:  # pragma: no cover
    cp = None


def _require():
    if cp is None:
        raise ValidationError("the sdp backend needs cvxpy: pip install cvxpy")


def _unbiased_constraints(problem, X):
    cons = []
    for j in range(2):
        cons.append(cp.real(cp.trace(problem.rho @ X[j])) == 0)
        for i in range(2):
            cons.append(cp.real(cp.trace(problem.drho[i] @ X[j])) == (1.0 if i == j else 0.0))
    return cons


def _solve(prob, X, solver):
    prob.solve(solver=solver)
    if prob.status not in ("optimal", "optimal_inaccurate"):
        raise ConvergenceError(f"SDP solver finished with status {prob.status}")
    diag = SolverDiagnostics(backend=f"sdp:{solver}", message=prob.status)
    opt = tuple(0.5 * (x.value + x.value.conj().T) for x in X)
    return BoundResult(float(prob.value), optimizer=opt, diagnostics=diag)


def ncrb_sdp(problem: EstimationProblem, W=None, solver="CLARABEL") -> BoundResult:
    """Separable-measurement bound as an SDP over ``L ⪰ X X^T``.

    Minimizes ``sum_ij W_ij Tr[rho L_ij]`` subject to the block matrix
    ``[[L11, L12, X1], [L12, L22, X2], [X1, X2, I]]`` being PSD.
    """
    _require()
    W = as_weight(np.eye(2) if W is None else W)
    d = problem.dim
    X = [cp.Variable((d, d), hermitian=True) for _ in range(2)]
    L11, L12, L22 = (cp.Variable((d, d), hermitian=True) for _ in range(3))
    block = cp.bmat([[L11, L12, X[0]], [L12, L22, X[1]], [X[0], X[1], np.eye(d)]])
    rho = problem.rho
    obj = cp.real(
        W[0, 0] * cp.trace(rho @ L11) + W[1, 1] * cp.trace(rho @ L22) + 2 * W[0, 1] * cp.trace(rho @ L12)
    )
    prob = cp.Problem(cp.Minimize(obj), [block >> 0] + _unbiased_constraints(problem, X))
    return _solve(prob, X, solver)


def hcrb_sdp(problem: EstimationProblem, W=None, solver="CLARABEL") -> BoundResult:
    """Holevo bound as ``min Tr[W V]`` over real symmetric ``V ⪰ Z[X]``."""
    _require()
    W = as_weight(np.eye(2) if W is None else W)
    d = problem.dim
    root = psd_sqrt(problem.rho)
    X = [cp.Variable((d, d), hermitian=True) for _ in range(2)]
    V = cp.Variable((2, 2), symmetric=True)
    cols = cp.hstack([cp.reshape(x @ root, (d * d, 1), order="F") for x in X])
    block = cp.bmat([[V, cols.H], [cols, np.eye(d * d)]])
    prob = cp.Problem(cp.Minimize(cp.trace(W @ V)), [block >> 0] + _unbiased_constraints(problem, X))
    res = _solve(prob, X, solver)
    if not math.isfinite(res.value):
        raise ConvergenceError("SDP returned a non-finite value")
    return res
