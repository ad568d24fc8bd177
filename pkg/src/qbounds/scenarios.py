"""Named estimation problems with known bounds.

* Rotated qubit: a probe with Bloch coordinates ``(r, theta, phi)`` rotated
  by small angles about the x and y axes.
* Corner-coupled qudit: a ``d``-level problem whose separable-measurement
  bound and Lu-Wang bound coincide at ``12 (2d - 1)``.
"""
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .errors import ValidationError
from .model import EstimationProblem

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

_ANGLE_TOL = 1e-12


@dataclass(frozen=True)
class RotationsConfig:
    r: float
    theta: float
    phi: float

    def __post_init__(self):
        if not 0.0 < self.r <= 1.0:
            raise ValidationError(f"Bloch radius r must lie in (0, 1], got {self.r!r}")


@dataclass(frozen=True)
class ReferenceValues:
    ncrb: float
    hcrb: float
    c_tilde: float
    qfi: np.ndarray
    lwb: Optional[float] = None


def probe_state(cfg: RotationsConfig):
    r, t, p = cfg.r, cfg.theta, cfg.phi
    return 0.5 * np.array(
        [
            [1 + r * math.cos(t), r * np.exp(-1j * p) * math.sin(t)],
            [r * np.exp(1j * p) * math.sin(t), 1 - r * math.cos(t)],
        ]
    )


def rotations_problem(cfg: RotationsConfig) -> EstimationProblem:
    """Derivatives ``(i/2)[rho0, sigma_x]`` and ``(i/2)[rho0, sigma_y]`` at zero rotation."""
    rho = probe_state(cfg)
    drho = tuple(0.5j * (rho @ s - s @ rho) for s in (SIGMA_X, SIGMA_Y))
    return EstimationProblem(rho, drho)


def _sec(theta):
    c = math.cos(theta)
    return math.inf if abs(c) < _ANGLE_TOL else 1.0 / abs(c)


def rotations_reference(cfg: RotationsConfig) -> ReferenceValues:
    """Closed-form bounds for the rotated qubit.

    ``ncrb = (1 + |sec t|)^2 / r^2`` and
    ``hcrb = (1 + 2 r |sec t| + sec^2 t) / r^2``, both infinite at
    ``t = pi/2``. ``lwb`` is given only where it has a closed form:
    ``t = phi = pi/4`` and ``t = pi/2``.
    """
    r, t, p = cfg.r, cfg.theta, cfg.phi
    sec = _sec(t)
    if math.isinf(sec):
        ncrb = hcrb = math.inf
    else:
        ncrb = (1.0 + sec) ** 2 / r**2
        hcrb = (1.0 + 2.0 * r * sec + sec**2) / r**2
    st2 = math.sin(t) ** 2
    ct2 = math.cos(t) ** 2
    denom = (ct2 + math.cos(p) ** 2 * st2) * (ct2 + math.sin(p) ** 2 * st2)
    c_tilde = abs(math.cos(t)) / math.sqrt(denom) if denom > 0 else math.nan
    if abs(math.cos(t)) < _ANGLE_TOL:
        c_tilde = 0.0 if denom > 0 else math.nan
    qfi = r**2 * np.array(
        [
            [1 - math.cos(p) ** 2 * st2, -math.sin(p) * math.cos(p) * st2],
            [-math.sin(p) * math.cos(p) * st2, 1 - math.sin(p) ** 2 * st2],
        ]
    )
    lwb = None
    if abs(t - math.pi / 4) < _ANGLE_TOL and abs(p - math.pi / 4) < _ANGLE_TOL:
        lwb = 4.0 / r**2
    elif abs(math.cos(t)) < _ANGLE_TOL:
        s2, c2 = math.sin(p) ** 2, math.cos(p) ** 2
        lwb = (1.0 / (r**2 * s2) if s2 > 0 else math.inf) + (1.0 / (r**2 * c2) if c2 > 0 else math.inf)
    return ReferenceValues(ncrb=ncrb, hcrb=hcrb, c_tilde=c_tilde, qfi=qfi, lwb=lwb)


def equal_bounds_problem(d: int) -> Tuple[EstimationProblem, float]:
    """Qudit problem with equal separable-measurement and Lu-Wang bounds.

    The state is diagonal with ``d - 1`` entries ``1/(d - 1/2)`` and a final
    entry ``1/(2d - 1)``; derivatives are ``(i/2)[rho, M_j]`` with ``M_1``
    and ``M_2`` the x- and y-type couplings between the first and last
    levels. Returns the problem and the common bound ``12 (2d - 1)``.
    """
    if d < 2:
        raise ValidationError("dimension must be at least 2")
    lam = np.full(d, 1.0 / (d - 0.5))
    lam[-1] = 1.0 - (d - 1) / (d - 0.5)
    rho = np.diag(lam).astype(complex)
    M1 = np.zeros((d, d), dtype=complex)
    M1[0, -1] = M1[-1, 0] = 1.0
    M2 = np.zeros((d, d), dtype=complex)
    M2[0, -1] = -1j
    M2[-1, 0] = 1j
    drho = tuple(0.5j * (rho @ M - M @ rho) for M in (M1, M2))
    return EstimationProblem(rho, drho), 12.0 * (2 * d - 1)
