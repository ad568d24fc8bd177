"""POVM statistics and measurement figures of merit."""
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import DimensionError, NotPSDError, SingularOutcomeError, ValidationError
from .linalg import PSD_FLOOR, as_hermitian
from .model import EstimationProblem, QfiData, qfi_data

COMPLETENESS_TOL = 1e-10


@dataclass(frozen=True)
class Povm:
    """Finite POVM: PSD effects summing to the identity."""

    effects: np.ndarray

    def __post_init__(self):
        effects = [as_hermitian(e, f"effect {k}") for k, e in enumerate(self.effects)]
        if not effects:
            raise ValidationError("a POVM needs at least one effect")
        d = effects[0].shape[0]
        for k, e in enumerate(effects):
            if e.shape != (d, d):
                raise DimensionError(f"effect {k} has shape {e.shape}, expected {(d, d)}")
            w = np.linalg.eigvalsh(e)[0]
            if w < PSD_FLOOR:
                raise NotPSDError(f"effect {k} is not PSD: min eigenvalue {w:.3e}")
        stack = np.array(effects)
        err = float(np.linalg.norm(stack.sum(axis=0) - np.eye(d)))
        if err > COMPLETENESS_TOL:
            raise ValidationError(f"effects sum to identity only within {err:.3e} > {COMPLETENESS_TOL:g}")
        object.__setattr__(self, "effects", stack)

    @property
    def dim(self) -> int:
        return self.effects.shape[1]

    def __len__(self):
        return self.effects.shape[0]

    @classmethod
    def computational(cls, d: int = 2) -> "Povm":
        return cls(np.array([np.diag(np.eye(d)[k]).astype(complex) for k in range(d)]))

    def merged(self, i: int, j: int) -> "Povm":
        """Coarse-grained POVM with effects ``i`` and ``j`` combined."""
        keep = [e for k, e in enumerate(self.effects) if k not in (i, j)]
        return Povm(np.array(keep + [self.effects[i] + self.effects[j]]))

    def permuted(self, order: Sequence[int]) -> "Povm":
        return Povm(self.effects[np.asarray(order)])


@dataclass(frozen=True)
class RegretReport:
    classical_fisher: np.ndarray
    regret: np.ndarray
    deltas: tuple
    gap: float
    precision: float


def probabilities(problem: EstimationProblem, povm: Povm):
    """Outcome probabilities ``Tr[rho E_k]`` and their parameter derivatives.

    Returns ``(p, dp1, dp2)``; tiny negative probabilities are clipped to 0.
    """
    if povm.dim != problem.dim:
        raise DimensionError(f"POVM acts on dimension {povm.dim}, problem has {problem.dim}")
    E = povm.effects
    # Tr[A E_k] = sum_ij A_ji E_k,ij
    p = np.einsum("ji,kij->k", problem.rho, E).real
    p = np.where(p < 0.0, 0.0, p)
    dp1 = np.einsum("ji,kij->k", problem.drho[0], E).real
    dp2 = np.einsum("ji,kij->k", problem.drho[1], E).real
    return p, dp1, dp2


def classical_fisher(problem: EstimationProblem, povm: Povm, p_tol: float = 1e-12):
    """Classical Fisher matrix of the outcome distribution.

    Outcomes with ``p <= p_tol`` and vanishing derivatives are skipped. If
    such an outcome has a derivative above ``sqrt(p_tol)`` the information
    is unbounded and :class:`SingularOutcomeError` is raised.
    """
    p, dp1, dp2 = probabilities(problem, povm)
    F, bad = _kernels.fisher_from_probabilities(p, np.vstack([dp1, dp2]), p_tol)
    if bad >= 0:
        raise SingularOutcomeError(
            f"outcome {bad} has probability {p[bad]:.3e} but derivatives ({dp1[bad]:.3e}, {dp2[bad]:.3e})"
        )
    return 0.5 * (F + F.T)


def precision(fisher) -> float:
    """``1 / Tr[F^-1]``, taken as 0 when ``F`` is singular."""
    F = np.asarray(fisher, dtype=np.float64)
    tr = float(np.trace(F))
    det = float(np.linalg.det(F))
    if tr <= 0.0 or det <= 1e-14 * tr * tr:
        return 0.0
    return det / tr


def regret_from_fisher(F, qfi: np.ndarray, c_tilde: float) -> RegretReport:
    F = np.asarray(F, dtype=np.float64)
    R = qfi - F
    d1 = math.sqrt(max(R[0, 0], 0.0) / qfi[0, 0])
    d2 = math.sqrt(max(R[1, 1], 0.0) / qfi[1, 1])
    s = math.sqrt(max(0.0, 1.0 - c_tilde**2))
    gap = d1 * d1 + d2 * d2 + 2.0 * s * d1 * d2 - c_tilde**2
    return RegretReport(F, R, (d1, d2), gap, precision(F))


def regret_report(problem: EstimationProblem, povm: Povm, data: QfiData = None) -> RegretReport:
    """Information regret ``R = F_Q - F`` and the gap of the regret trade-off.

    ``deltas`` are ``sqrt(R_jj / F_Q,jj)``; ``gap`` is
    ``D1^2 + D2^2 + 2 sqrt(1 - c^2) D1 D2 - c^2`` and is nonnegative for
    every measurement. Pass ``data`` to reuse a precomputed QFI snapshot.
    """
    if data is None:
        data = qfi_data(problem)
    if not (data.qfi[0, 0] > 0 and data.qfi[1, 1] > 0):
        raise ValidationError("regret needs positive diagonal QFI entries")
    return regret_from_fisher(classical_fisher(problem, povm), data.qfi, data.c_tilde)
