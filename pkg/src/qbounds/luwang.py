"""Lu-Wang uncertainty relation on the MSE diagonals and the bound it implies.

With ``gamma_j = 1 / (v_j F_jj)`` and ``s = sqrt(1 - c^2)`` the relation reads::

    gamma_1 + gamma_2 - 2 s sqrt((1 - gamma_1)(1 - gamma_2)) <= 2 - c^2

restricted to ``gamma_j <= 1``. Writing ``u = sqrt(1 - gamma_1)`` and
``t = sqrt(1 - gamma_2)``, the boundary is ``u^2 + t^2 + 2 s u t = c^2``,
which for ``0 <= u <= c`` has the single nonnegative root
``t = c sqrt(1 - u^2) - s u``. The bound minimizes ``v1 + v2`` along it.
"""
import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq, nnls

from .bounds import UncertaintyCurve
from .errors import DomainError, ValidationError
from .model import QfiData

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
# the bound moves by O(c^2) near c = 0, so this snap is below rounding
COMMUTING_TOL = 1e-8
# the bound moves by O(s) near c = 1, so this snap costs at most ~1e-12 relative
INCOMPATIBLE_TOL = 1e-12


@dataclass(frozen=True)
class LwurSpec:
    """Diagonal QFI entries and incompatibility coefficient.

    ``s = sqrt(1 - c^2)`` is derived from ``c`` unless given. Passing it
    explicitly keeps its relative accuracy when ``c`` is within rounding of
    1, where the bound moves like ``s``.
    """

    f11: float
    f22: float
    c_tilde: float
    s: Optional[float] = None

    def __post_init__(self):
        if not (self.f11 > 0 and self.f22 > 0):
            raise ValidationError(f"diagonal QFI entries must be positive, got ({self.f11}, {self.f22})")
        if not (0.0 <= self.c_tilde <= 1.0):
            raise ValidationError(f"c_tilde must lie in [0, 1], got {self.c_tilde!r}")
        if self.s is None:
            object.__setattr__(self, "s", math.sqrt(max(0.0, 1.0 - self.c_tilde**2)))
        elif not (0.0 <= self.s <= 1.0 and abs(self.s**2 + self.c_tilde**2 - 1.0) <= 1e-12):
            raise ValidationError(f"s = {self.s!r} is inconsistent with c_tilde = {self.c_tilde!r}")

    @classmethod
    def from_qfi(cls, data: QfiData) -> "LwurSpec":
        F = data.qfi
        f11, f22 = float(F[0, 0]), float(F[1, 1])
        if data.slds[0].shape[0] == 2 and f11 > 0 and f22 > 0:
            # qubits: 1 - c^2 = F12^2 / (F11 F22), free of cancellation
            s = min(1.0, abs(float(F[0, 1])) / math.sqrt(f11 * f22))
            return cls(f11, f22, math.sqrt(1.0 - s * s), s)
        return cls(f11, f22, float(data.c_tilde))

    @property
    def kappa(self) -> Tuple[float, float]:
        """Single-parameter SLD limits ``1/F_jj``."""
        return 1.0 / self.f11, 1.0 / self.f22


@dataclass
class LwbResult:
    value: float
    optimizer: Tuple[float, float]
    active: Dict[str, bool]
    dual: Dict[str, float] = field(default_factory=dict)


def _gammas(v1, v2, spec):
    return 1.0 / (v1 * spec.f11), 1.0 / (v2 * spec.f22)


def lwur_slack(v1: float, v2: float, spec: LwurSpec) -> float:
    """Left side minus right side of the relation; feasible iff ``<= 0``."""
    g1, g2 = _gammas(v1, v2, spec)
    for j, g in ((1, g1), (2, g2)):
        if g > 1.0 + 1e-12:
            raise DomainError(
                f"v{j} is below the single-parameter SLD limit 1/F{j}{j}; gamma{j} = {g!r} > 1"
            )
    root = math.sqrt(max(0.0, 1.0 - g1) * max(0.0, 1.0 - g2))
    return g1 + g2 - 2.0 * spec.s * root - (2.0 - spec.c_tilde**2)


def lwb_closed_c1(f11: float, f22: float) -> float:
    """Bound for fully incompatible SLDs: ``(1/sqrt(F11) + 1/sqrt(F22))^2``."""
    if not (f11 > 0 and f22 > 0):
        raise ValidationError(f"QFI diagonal entries must be positive, got ({f11}, {f22})")
    return (1.0 / math.sqrt(f11) + 1.0 / math.sqrt(f22)) ** 2


def lwb_closed_c0(f11: float, f22: float) -> float:
    """Bound for commuting SLDs: ``1/F11 + 1/F22``."""
    if not (f11 > 0 and f22 > 0):
        raise ValidationError(f"QFI diagonal entries must be positive, got ({f11}, {f22})")
    return 1.0 / f11 + 1.0 / f22


def _boundary_t(u, spec):
    c, s = spec.c_tilde, spec.s
    return max(0.0, c * math.sqrt(max(0.0, 1.0 - u * u)) - s * u)


def _boundary_gammas(u, spec):
    """``(gamma_1, gamma_2)`` on the boundary at ``u <= c``.

    ``1 - t^2`` is evaluated as ``(s sqrt(1 - u^2) + c u)^2``, which is the
    same quantity (``s^2 = 1 - c^2``) without the cancellation near ``t = 1``.
    """
    c, s = spec.c_tilde, spec.s
    r = math.sqrt(max(0.0, 1.0 - u * u))
    return r * r, (s * r + c * u) ** 2


def _boundary_point(u, spec):
    k1, k2 = spec.kappa
    g1, g2 = _boundary_gammas(u, spec)
    return k1 / g1, k2 / g2


def _objective_derivative(u, spec):
    """d(v1 + v2)/du along the boundary, for ``0 <= u < 1``."""
    k1, k2 = spec.kappa
    c, s = spec.c_tilde, spec.s
    r = math.sqrt(1.0 - u * u)
    q = s * r + c * u
    return 2.0 * k1 * u / r**4 - 2.0 * k2 * (c - s * u / r) / q**3


def _golden_bracket(fun, a, b, iters=60):
    """Golden-section search; returns a shrunken bracket around the minimum."""
    x1 = b - GOLDEN * (b - a)
    x2 = a + GOLDEN * (b - a)
    f1, f2 = fun(x1), fun(x2)
    for _ in range(iters):
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - GOLDEN * (b - a)
            f1 = fun(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + GOLDEN * (b - a)
            f2 = fun(x2)
    return a, b


def kkt_report(
    v1: float, v2: float, spec: LwurSpec, tol: float = 1e-10, boundary: Optional[float] = None
) -> Dict[str, float]:
    """Multipliers and residuals of the optimality conditions at ``(v1, v2)``.

    Constraints: the relation itself and ``gamma_j <= 1``. The relation's
    gradient is rescaled by ``sqrt((1-g1)(1-g2))`` so it stays finite at the
    box edges; the multiplier is reported for the rescaled constraint.

    ``boundary=u`` evaluates the conditions at the boundary point with that
    coordinate, taking ``gamma_j`` and ``1 - gamma_j`` from ``u`` directly.
    For small ``c`` recomputing them from ``v`` loses about ``eps / c^2`` of
    relative accuracy to cancellation.
    """
    g1, g2 = _gammas(v1, v2, spec)
    if boundary is None:
        a1, a2 = max(0.0, 1.0 - g1), max(0.0, 1.0 - g2)
    else:
        g1, g2 = _boundary_gammas(boundary, spec)
        a1, a2 = boundary**2, _boundary_t(boundary, spec) ** 2
    s = spec.s
    lwur_slack(v1, v2, spec)  # domain check
    slack = g1 + g2 - 2.0 * s * math.sqrt(a1 * a2) - (2.0 - spec.c_tilde**2)
    grads = []
    names = []
    if abs(slack) <= tol:
        r1, r2 = math.sqrt(a1), math.sqrt(a2)
        gvec = np.array([-(g1 / v1) * (r1 * r2 + s * a2), -(g2 / v2) * (r1 * r2 + s * a1)])
        # d slack / d v_j scaled by r1 r2; vanishes only when both boxes bind
        if np.linalg.norm(gvec) > 0:
            grads.append(gvec)
            names.append("lambda_lwur")
    if g1 >= 1.0 - tol:
        grads.append(np.array([-1.0, 0.0]))
        names.append("lambda_box1")
    if g2 >= 1.0 - tol:
        grads.append(np.array([0.0, -1.0]))
        names.append("lambda_box2")
    grad_f = np.array([1.0, 1.0])
    out = {"lambda_lwur": 0.0, "lambda_box1": 0.0, "lambda_box2": 0.0}
    if grads:
        G = np.column_stack(grads)
        lam, _ = nnls(G, -grad_f)
        resid = float(np.linalg.norm(grad_f + G @ lam) / np.linalg.norm(grad_f))
        out.update(dict(zip(names, map(float, lam))))
    else:
        resid = 1.0
    out["slack"], out["gamma1"], out["gamma2"] = slack, g1, g2
    out["stationarity"] = resid
    out["primal"] = max(0.0, slack, g1 - 1.0, g2 - 1.0)
    # the multiplier belongs to the rescaled constraint sqrt(a1 a2) * slack
    out["complementarity"] = abs(out["lambda_lwur"] * slack) * math.sqrt(a1 * a2)
    out["residual"] = max(out["stationarity"], out["primal"], out["complementarity"])
    return out


def _result(v1, v2, spec, tol=1e-10, boundary=None):
    dual = kkt_report(v1, v2, spec, tol, boundary)
    active = {
        "lwur": abs(dual["slack"]) <= tol,
        "box1": dual["gamma1"] >= 1.0 - tol,
        "box2": dual["gamma2"] >= 1.0 - tol,
    }
    return LwbResult(v1 + v2, (v1, v2), active, dual)


def lwb_numeric(spec: LwurSpec) -> LwbResult:
    """Minimize ``v1 + v2`` along the relation boundary without closed forms.

    The derivative of the objective along the boundary is negative at
    ``u = 0`` and positive at ``u = c``, so Brent's method on the derivative
    finds the minimizer. Golden-section search on the objective is the
    fallback if rounding spoils that sign pattern; it is not the primary
    method because for small ``c`` the objective is flat to machine
    precision over a wide range of ``u``.
    """
    c = spec.c_tilde
    if c <= 0.0:
        k1, k2 = spec.kappa
        return _result(k1, k2, spec)
    # u = 1 puts v1 at infinity, and so does u = 0 for v2 when c = 1
    hi = min(c, np.nextafter(1.0, 0.0))
    lo = 0.0 if spec.s > 0.0 else 1e-100
    if _objective_derivative(lo, spec) < 0.0 < _objective_derivative(hi, spec):
        u = brentq(_objective_derivative, lo, hi, args=(spec,), xtol=1e-300, rtol=4 * np.finfo(float).eps)
    else:
        a, b = _golden_bracket(lambda x: sum(_boundary_point(x, spec)), lo, hi)
        u = 0.5 * (a + b)
    v1, v2 = _boundary_point(u, spec)
    return _result(v1, v2, spec, boundary=u)


def lwb(spec: LwurSpec) -> LwbResult:
    """Minimum of ``v1 + v2`` allowed by the relation.

    Closed forms at the endpoints. Near ``c = 1`` the bound moves like
    ``s = sqrt(1 - c^2)``, so the snap is decided on ``s``; near ``c = 0``
    it moves like ``c^2`` and a wider snap is harmless.
    """
    k1, k2 = spec.kappa
    if spec.s <= INCOMPATIBLE_TOL:
        root = math.sqrt(k1) + math.sqrt(k2)
        v1, v2 = math.sqrt(k1) * root, math.sqrt(k2) * root
        res = _result(v1, v2, LwurSpec(spec.f11, spec.f22, 1.0, 0.0))
        res.value = lwb_closed_c1(spec.f11, spec.f22)
        return res
    if spec.c_tilde <= COMMUTING_TOL:
        res = _result(k1, k2, LwurSpec(spec.f11, spec.f22, 0.0, 1.0))
        res.value = lwb_closed_c0(spec.f11, spec.f22)
        return res
    return lwb_numeric(spec)


def lwur_boundary_v2(v1: float, spec: LwurSpec) -> float:
    """Smallest ``v2`` allowed by the relation at a given ``v1 >= 1/F11``."""
    k1, k2 = spec.kappa
    if v1 < k1 * (1.0 - 1e-12):
        raise DomainError(f"v1 = {v1!r} is below the single-parameter limit {k1!r}")
    u = math.sqrt(max(0.0, 1.0 - k1 / v1))
    if u >= spec.c_tilde:
        # relation already satisfied with gamma_2 = 1
        return k2
    return k2 / _boundary_gammas(u, spec)[1]


def lwur_boundary_curve(spec: LwurSpec, v1_grid: Sequence[float]) -> UncertaintyCurve:
    """Boundary of the region allowed by the relation, sampled on ``v1_grid``.

    Grid values below ``1/F11`` are dropped and listed in ``flags``. Where
    the relation holds for every ``v2 >= 1/F22`` the boundary is that edge.
    """
    k1, _ = spec.kappa
    pts, dropped = [], []
    for v1 in np.unique(np.asarray(v1_grid, dtype=np.float64)):
        if v1 < k1 * (1.0 - 1e-12):
            dropped.append(float(v1))
            continue
        v2 = lwur_boundary_v2(float(v1), spec)
        # reject spurious roots by substitution
        if lwur_slack(float(v1), v2, spec) > 1e-10:
            dropped.append(float(v1))
            continue
        pts.append((float(v1), v2))
    flags = [f"dropped {len(dropped)} grid values without a feasible v2: {dropped}"] if dropped else []
    return UncertaintyCurve(np.array(pts).reshape(-1, 2), "lwur", flags)
