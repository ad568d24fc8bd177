"""Cramer-Rao type bounds for two parameters and their MSE trade-off curves.

Scalar bounds take a 2x2 positive-definite weight matrix ``W`` and bound
``Tr[W V]`` for the MSE matrix ``V`` of any locally unbiased estimator:

* ``sld_crb``: ``Tr[W F^-1]`` from the SLD quantum Fisher matrix.
* ``ncrb_*``: the Nagaoka bound, the limit for separable measurements.
* ``hcrb_*``: the Holevo bound, attainable with collective measurements.

A singular QFI makes all three infinite; they return ``math.inf`` rather
than raising.
"""
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize

from . import _kernels
from .errors import ConvergenceError, DomainError, InfeasibleError, ValidationError
from .linalg import psd_sqrt, trabs_rho_commutator
from .model import EstimationProblem, rld_qfi, sld_operators, sld_qfi

SINGULAR_TOL = 1e-14
CONSTRAINT_TOL = 1e-8


# --------------------------------------------------------------------------
# weights and result containers


def as_weight(W) -> np.ndarray:
    W = np.asarray(W, dtype=np.float64)
    if W.shape != (2, 2) or not np.all(np.isfinite(W)):
        raise ValidationError(f"weight matrix must be a finite 2x2 array, got shape {W.shape}")
    if abs(W[0, 1] - W[1, 0]) > 1e-12 * (1.0 + np.max(np.abs(W))):
        raise ValidationError("weight matrix must be symmetric")
    W = 0.5 * (W + W.T)
    if np.linalg.eigvalsh(W)[0] <= 0.0:
        raise ValidationError(f"weight matrix must be positive definite, eigenvalues {np.linalg.eigvalsh(W)}")
    return W


def diag_weight(w: float) -> np.ndarray:
    """``diag(w, 2 - w)`` for ``0 < w < 2``."""
    if not 0.0 < w < 2.0:
        raise DomainError(f"scalar weight must lie in (0, 2), got {w!r}")
    return np.diag([w, 2.0 - w])


def is_singular(F) -> bool:
    F = np.asarray(F, dtype=np.float64)
    tr = np.trace(F)
    return bool(tr <= 0.0 or np.linalg.det(F) <= SINGULAR_TOL * tr * tr)


@dataclass
class SolverOptions:
    """Settings for the smoothed quasi-Newton bound solver.

    Absolute values are replaced by ``sqrt(x^2 + mu^2) - mu``; ``mu`` runs
    from ``mu_start`` down to ``mu_end`` by ``mu_factor``, re-converging at
    each stage. The final stage stops once the relative objective change
    stays below ``rel_tol`` for ``patience`` consecutive iterations (or the
    gradient norm drops below ``gtol``). ``backend="sdp"`` hands the problem
    to cvxpy instead.
    """

    mu_start: float = 1e-2
    mu_end: float = 1e-8
    mu_factor: float = 0.1
    max_iterations: int = 5000
    rel_tol: float = 1e-9
    patience: int = 5
    gtol: float = 1e-10
    backend: str = "smooth"


@dataclass
class SolverDiagnostics:
    iterations: int = 0
    final_mu: float = 0.0
    constraint_residual: float = 0.0
    history_length: int = 0
    stages: int = 0
    backend: str = "closed-form"
    message: str = ""


@dataclass
class BoundResult:
    value: float
    optimizer: Optional[Tuple[np.ndarray, np.ndarray]] = None
    diagnostics: SolverDiagnostics = field(default_factory=SolverDiagnostics)

    @property
    def finite(self) -> bool:
        return math.isfinite(self.value)


@dataclass
class UncertaintyCurve:
    """Boundary points ``(v1, v2)`` of an MSE trade-off region.

    ``v1`` is strictly increasing and ``v2`` non-increasing along ``points``.
    ``flags`` collects notes about dropped grid values.
    """

    points: np.ndarray
    descriptor: str
    flags: List[str] = field(default_factory=list)

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=np.float64).reshape(-1, 2)

    @property
    def v1(self):
        return self.points[:, 0]

    @property
    def v2(self):
        return self.points[:, 1]

    def is_monotone(self) -> bool:
        if len(self.points) < 2:
            return True
        return bool(np.all(np.diff(self.v1) > 0) and np.all(np.diff(self.v2) <= 1e-12 * np.abs(self.v2[:-1])))


# --------------------------------------------------------------------------
# closed forms


def sld_crb(qfi, W=None) -> float:
    """``Tr[W F^-1]``, or ``inf`` for singular ``F``."""
    W = as_weight(np.eye(2) if W is None else W)
    F = np.asarray(qfi, dtype=np.float64)
    if is_singular(F):
        return math.inf
    return float(np.trace(W @ np.linalg.inv(F)))


def ncrb_qubit(qfi, W=None) -> float:
    """Separable-measurement bound for qubits: ``Tr[W F^-1] + 2 sqrt(det[W F^-1])``."""
    W = as_weight(np.eye(2) if W is None else W)
    F = np.asarray(qfi, dtype=np.float64)
    if is_singular(F):
        return math.inf
    M = W @ np.linalg.inv(F)
    return float(np.trace(M) + 2.0 * math.sqrt(max(np.linalg.det(M), 0.0)))


def rld_crb(problem: EstimationProblem, W=None) -> float:
    """RLD bound ``Tr[W Re F_R^-1] + TrAbs[W Im F_R^-1]`` for a full-rank state."""
    W = as_weight(np.eye(2) if W is None else W)
    if is_singular(sld_qfi(problem)):
        return math.inf
    inv = np.linalg.inv(rld_qfi(problem))
    # W Im(inv) has eigenvalues +-i sqrt(det W) |Im inv_12|
    return float(np.trace(W @ inv.real) + 2.0 * math.sqrt(np.linalg.det(W)) * abs(inv[0, 1].imag))


def hcrb_qubit(problem: EstimationProblem, W=None) -> float:
    """Holevo bound of a full-rank two-parameter qubit problem in closed form.

    With ``C_S`` the SLD bound, ``C_R`` the RLD bound and
    ``C_Z = C_S + 2 sqrt(det W) |Im Z_12|`` (``Z = F^-1 Tr[rho L_i L_j] F^-1``)::

        C_H = C_R                                  if C_R >= (C_Z + C_S) / 2
        C_H = C_S + (C_Z - C_S)^2 / (4 (C_Z - C_R))  otherwise

    The first branch is the RLD expression; it covers e.g. the rotated-qubit
    family but not generic qubit problems.
    """
    W = as_weight(np.eye(2) if W is None else W)
    if problem.dim != 2:
        raise ValidationError(f"hcrb_qubit needs a qubit problem, got dimension {problem.dim}")
    slds = sld_operators(problem)
    F = np.array([[np.trace(problem.rho @ a @ b).real for b in slds] for a in slds])
    if is_singular(F):
        return math.inf
    c_r = rld_crb(problem, W)
    Finv = np.linalg.inv(0.5 * (F + F.T))
    im = np.array([[np.trace(problem.rho @ a @ b).imag for b in slds] for a in slds])
    im_z = Finv @ im @ Finv
    c_s = float(np.trace(W @ Finv))
    c_z = c_s + 2.0 * math.sqrt(np.linalg.det(W)) * abs(im_z[0, 1])
    if c_r >= 0.5 * (c_z + c_s):
        return c_r
    return float(c_s + (c_z - c_s) ** 2 / (4.0 * (c_z - c_r)))


# --------------------------------------------------------------------------
# general-dimension solver


class _UnbiasedSpace:
    """Affine space of Hermitian pairs obeying the locally unbiased conditions.

    ``Tr[rho X_j] = 0`` and ``Tr[drho_i X_j] = delta_ij``, written in the
    orthonormal Hermitian basis of :func:`_kernels.herm_to_vec`.
    """

    def __init__(self, problem: EstimationProblem):
        d = problem.dim
        self.dim = d
        A = np.array([_kernels.herm_to_vec(m) for m in (problem.rho, *problem.drho)])
        _, s, vt = np.linalg.svd(A)
        if s[-1] <= 1e-12 * s[0]:
            raise InfeasibleError(
                "locally unbiased constraints are infeasible: rho, drho1, drho2 are "
                f"linearly dependent (singular values {s})"
            )
        self.A = A
        self.null = vt[3:].T
        pinv = np.linalg.pinv(A)
        self.x0 = (pinv @ np.array([0.0, 1.0, 0.0]), pinv @ np.array([0.0, 0.0, 1.0]))
        self.m = self.null.shape[1]

    def matrices(self, z):
        m = self.m
        x1 = self.x0[0] + self.null @ z[:m]
        x2 = self.x0[1] + self.null @ z[m:]
        return _kernels.vec_to_herm(x1, self.dim), _kernels.vec_to_herm(x2, self.dim)

    def coordinates(self, X1, X2):
        z1 = self.null.T @ (_kernels.herm_to_vec(X1) - self.x0[0])
        z2 = self.null.T @ (_kernels.herm_to_vec(X2) - self.x0[1])
        return np.concatenate([z1, z2])

    def project_gradient(self, G1, G2):
        return np.concatenate(
            [self.null.T @ _kernels.herm_to_vec(G1), self.null.T @ _kernels.herm_to_vec(G2)]
        )

    def residual(self, X1, X2):
        targets = (np.array([0.0, 1.0, 0.0]), np.array([0.0, 0.0, 1.0]))
        res = 0.0
        for X, t in zip((X1, X2), targets):
            res = max(res, float(np.max(np.abs(self.A @ _kernels.herm_to_vec(X) - t))))
        return res


class _StopEarly(Exception):
    pass


def _smoothed_minimize(kernel, problem, W, opts: SolverOptions, F):
    space = _UnbiasedSpace(problem)
    rho = problem.rho
    sqrt_rho = psd_sqrt(rho)
    w11, w12, w22 = float(W[0, 0]), float(W[0, 1]), float(W[1, 1])
    sw = math.sqrt(np.linalg.det(W))

    L1, L2 = sld_operators(problem)
    Finv = np.linalg.inv(F)
    start = (Finv[0, 0] * L1 + Finv[0, 1] * L2, Finv[1, 0] * L1 + Finv[1, 1] * L2)
    z = space.coordinates(*start)

    def fun(z, mu):
        X1, X2 = space.matrices(z)
        f, G1, G2 = kernel(X1, X2, rho, sqrt_rho, w11, w12, w22, sw, mu)
        return f, space.project_gradient(G1, G2)

    mus = []
    mu = opts.mu_start
    while mu > opts.mu_end * (1 + 1e-9):
        mus.append(mu)
        mu *= opts.mu_factor
    mus.append(opts.mu_end)

    diag = SolverDiagnostics(backend="smooth")
    history: List[float] = []
    converged = False
    for stage, mu in enumerate(mus):
        final = stage == len(mus) - 1
        hist: List[float] = []

        def callback(intermediate_result):
            hist.append(float(intermediate_result.fun))
            if final and len(hist) > opts.patience:
                recent = np.asarray(hist[-(opts.patience + 1):])
                rel = np.abs(np.diff(recent)) / np.maximum(np.abs(recent[1:]), 1e-300)
                if np.all(rel < opts.rel_tol):
                    raise StopIteration

        res = minimize(
            fun,
            z,
            args=(mu,),
            jac=True,
            method="BFGS",
            callback=callback,
            options={"gtol": opts.gtol, "maxiter": opts.max_iterations},
        )
        z = res.x
        diag.iterations += int(res.nit)
        history.extend(hist)
        if final:
            hit_limit = res.nit >= opts.max_iterations
            stalled = len(hist) > opts.patience and np.all(
                np.abs(np.diff(hist[-(opts.patience + 1):]))
                < opts.rel_tol * np.maximum(np.abs(hist[-opts.patience:]), 1e-300)
            )
            converged = (not hit_limit) or stalled
            diag.message = str(res.message)
    diag.final_mu = mus[-1]
    diag.stages = len(mus)
    diag.history_length = len(history)
    X1, X2 = space.matrices(z)
    diag.constraint_residual = space.residual(X1, X2)
    value, _, _ = kernel(X1, X2, rho, sqrt_rho, w11, w12, w22, sw, 0.0)
    if not converged:
        raise ConvergenceError(
            f"bound solver did not converge within {opts.max_iterations} iterations "
            f"(constraint residual {diag.constraint_residual:.2e})",
            diagnostics=diag,
        )
    if diag.constraint_residual > CONSTRAINT_TOL:
        raise ConvergenceError(
            f"constraint residual {diag.constraint_residual:.2e} exceeds {CONSTRAINT_TOL:g}",
            diagnostics=diag,
        )
    return BoundResult(value=float(value), optimizer=(X1, X2), diagnostics=diag)


def _general(kind, problem, W, opts):
    W = as_weight(np.eye(2) if W is None else W)
    opts = opts or SolverOptions()
    F = sld_qfi(problem)
    if is_singular(F):
        return BoundResult(math.inf, diagnostics=SolverDiagnostics(message="singular QFI"))
    if opts.backend == "sdp":
        from . import sdp

        return getattr(sdp, f"{kind}_sdp")(problem, W)
    if opts.backend != "smooth":
        raise ValidationError(f"unknown solver backend {opts.backend!r}")
    kernel = _kernels.ncrb_value_grad if kind == "ncrb" else _kernels.hcrb_value_grad
    return _smoothed_minimize(kernel, problem, W, opts, F)


def ncrb_general(problem: EstimationProblem, W=None, opts: Optional[SolverOptions] = None) -> BoundResult:
    """Separable-measurement bound in any dimension.

    Minimizes ``Tr[W Z[X]] + sqrt(det W) TrAbs[rho [X1, X2]]`` with
    ``Z_ij = Tr[rho X_i X_j]`` over Hermitian ``X1, X2`` satisfying the
    locally unbiased conditions. The minimization starts from the SLD
    solution ``X = F^-1 L``.
    """
    return _general("ncrb", problem, W, opts)


def hcrb_general(problem: EstimationProblem, W=None, opts: Optional[SolverOptions] = None) -> BoundResult:
    """Holevo bound: ``min Tr[W Re Z[X]] + 2 sqrt(det W) |Im Z_12[X]|``."""
    return _general("hcrb", problem, W, opts)


def ncrb_objective(problem: EstimationProblem, X1, X2, W=None) -> float:
    """Unsmoothed separable-measurement objective at a given pair ``X1, X2``."""
    W = as_weight(np.eye(2) if W is None else W)
    Z = np.array([[np.trace(problem.rho @ a @ b) for b in (X1, X2)] for a in (X1, X2)])
    quad = W[0, 0] * Z[0, 0].real + W[1, 1] * Z[1, 1].real + 2 * W[0, 1] * Z[0, 1].real
    return float(quad + math.sqrt(np.linalg.det(W)) * trabs_rho_commutator(problem.rho, X1, X2))


# --------------------------------------------------------------------------
# trade-off curves


def nagaoka_curve_qubit(qfi, v1_grid: Sequence[float]) -> UncertaintyCurve:
    """Attainable qubit trade-off ``(v1 - [F^-1]_11)(v2 - [F^-1]_22) = 1/det F``."""
    F = np.asarray(qfi, dtype=np.float64)
    if is_singular(F):
        raise DomainError("trade-off hyperbola needs a nonsingular QFI")
    Finv = np.linalg.inv(F)
    a, b = Finv[0, 0], Finv[1, 1]
    k = 1.0 / np.linalg.det(F)
    v1 = np.asarray(v1_grid, dtype=np.float64)
    if np.any(v1 <= a):
        raise DomainError(f"v1 grid values must exceed [F^-1]_11 = {a!r}")
    v1 = np.unique(v1)
    return UncertaintyCurve(np.column_stack([v1, b + k / (v1 - a)]), "nagaoka")


def _upper_envelope(w, C):
    """Lines ``w v1 + (2-w) v2 = C`` as ``v2 = alpha + beta v1``; keep the maximal hull."""
    beta = -w / (2.0 - w)
    alpha = C / (2.0 - w)
    order = np.argsort(beta)
    lines: List[Tuple[float, float]] = []
    for k in order:
        a, b = alpha[k], beta[k]
        if lines and abs(lines[-1][1] - b) <= 1e-12 * max(1.0, abs(b)):
            # collinear within tolerance: keep the larger intercept
            if a > lines[-1][0]:
                lines.pop()
            else:
                continue
        while len(lines) >= 2:
            (a1, b1), (a2, b2) = lines[-2], lines[-1]
            # line 2 is redundant if line 3 overtakes line 1 before line 2 does
            x12 = (a1 - a2) / (b2 - b1)
            x13 = (a1 - a) / (b - b1)
            if x13 <= x12:
                lines.pop()
            else:
                break
        lines.append((a, b))
    pts = []
    for (a1, b1), (a2, b2) in zip(lines[:-1], lines[1:]):
        x = (a1 - a2) / (b2 - b1)
        pts.append((x, a1 + b1 * x))
    return pts


def _dedupe(points, rel=1e-10):
    pts = sorted(points)
    out = []
    for p in pts:
        if out and abs(p[0] - out[-1][0]) <= rel * max(1.0, abs(p[0])):
            # same abscissa: the boundary keeps the lower v2
            if p[1] < out[-1][1]:
                out[-1] = p
            continue
        out.append(p)
    return out


def envelope_from_weighted_bound(
    bound: Callable[[np.ndarray], float],
    w_grid: Sequence[float],
    method: str = "vertex",
    step: float = 1e-5,
    descriptor: str = "envelope",
) -> UncertaintyCurve:
    """Trade-off curve from a family of weighted bounds ``C(w)``, ``W = diag(w, 2-w)``.

    Each weight gives a half-plane ``w v1 + (2-w) v2 >= C(w)``; the region is
    their intersection.

    ``method="vertex"``
        Boundary points are the vertices of the intersection, i.e. crossings
        of consecutive supporting lines.
    ``method="tangent"``
        For each weight, the point where its line touches the envelope:
        the line equation solved together with its ``w``-derivative
        ``v1 - v2 = C'(w)``. ``C'`` is a central difference with ``step``.

    Weights where ``C`` is infinite are dropped and noted in ``flags``.
    """
    w = np.asarray(w_grid, dtype=np.float64)
    if np.any((w <= 0.0) | (w >= 2.0)):
        raise DomainError("weights must lie strictly inside (0, 2)")
    if np.any(np.diff(w) <= 0):
        raise DomainError("weight grid must be strictly increasing")
    flags = []
    if method == "vertex":
        C = np.array([bound(diag_weight(x)) for x in w], dtype=np.float64)
        ok = np.isfinite(C)
        if not np.all(ok):
            flags.append(f"dropped {int(np.sum(~ok))} weights with infinite bound: {w[~ok].tolist()}")
        pts = _upper_envelope(w[ok], C[ok])
    elif method == "tangent":
        pts = []
        dropped = []
        for x in w:
            h = min(step, 0.5 * x, 0.5 * (2.0 - x))
            c0 = bound(diag_weight(x))
            cp = bound(diag_weight(x + h))
            cm = bound(diag_weight(x - h))
            if not (math.isfinite(c0) and math.isfinite(cp) and math.isfinite(cm)):
                dropped.append(float(x))
                continue
            slope = (cp - cm) / (2.0 * h)
            # x v1 + (2-x) v2 = c0 and v1 - v2 = slope
            v2 = (c0 - x * slope) / 2.0
            pts.append((v2 + slope, v2))
        if dropped:
            flags.append(f"dropped {len(dropped)} weights with infinite bound: {dropped}")
    else:
        raise ValidationError(f"unknown envelope method {method!r}")
    pts = _dedupe(pts)
    return UncertaintyCurve(np.array(pts, dtype=np.float64).reshape(-1, 2), descriptor, flags)
