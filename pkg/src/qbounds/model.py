"""Two-parameter estimation problems and their quantum Fisher descriptors."""
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from .errors import (
    DimensionError,
    NotPSDError,
    RLDUndefinedError,
    UndefinedCoefficientError,
    UnsupportedDerivativeError,
    ValidationError,
)
from .linalg import PSD_FLOOR, as_hermitian, eig_hermitian, psd_sqrt, trabs_rho_commutator

TRACE_TOL = 1e-10
RANK_TOL = 1e-10
KERNEL_RESIDUAL_TOL = 1e-6
CLAMP_TOL = 1e-9


def as_density_matrix(rho, name="rho"):
    rho = as_hermitian(rho, name)
    tr = np.trace(rho).real
    if abs(tr - 1.0) > TRACE_TOL:
        raise ValidationError(f"{name} must have unit trace within {TRACE_TOL:g}, got {tr!r}")
    w, _ = eig_hermitian(rho)
    if w[0] < PSD_FLOOR:
        raise NotPSDError(f"{name} is not PSD: min eigenvalue {w[0]:.3e} < {PSD_FLOOR:g}")
    return rho


@dataclass(frozen=True)
class EstimationProblem:
    """A state ``rho`` and its derivatives with respect to two parameters.

    Inputs are validated on construction: ``rho`` must be a density matrix and
    each derivative Hermitian and traceless (within 1e-10).
    """

    rho: np.ndarray
    drho: Tuple[np.ndarray, np.ndarray]

    def __post_init__(self):
        rho = as_density_matrix(self.rho)
        if len(self.drho) != 2:
            raise ValidationError(f"exactly two derivatives are required, got {len(self.drho)}")
        drho = []
        for i, d in enumerate(self.drho):
            d = as_hermitian(d, f"drho{i + 1}")
            if d.shape != rho.shape:
                raise DimensionError(f"drho{i + 1} has shape {d.shape}, rho has {rho.shape}")
            tr = np.trace(d)
            if abs(tr) > TRACE_TOL:
                raise ValidationError(
                    f"drho{i + 1} must be traceless within {TRACE_TOL:g}, got trace {tr.real:.3e}"
                )
            drho.append(d)
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "drho", (drho[0], drho[1]))

    @property
    def dim(self) -> int:
        return self.rho.shape[0]

    def reparameterized(self, A) -> "EstimationProblem":
        """Problem whose derivative pair is ``A @ (drho1, drho2)``."""
        A = np.asarray(A, dtype=np.float64)
        d1, d2 = self.drho
        return EstimationProblem(
            self.rho, (A[0, 0] * d1 + A[0, 1] * d2, A[1, 0] * d1 + A[1, 1] * d2)
        )


@dataclass(frozen=True)
class QfiData:
    """SLDs, SLD and RLD Fisher matrices and incompatibility, computed together."""

    slds: Tuple[np.ndarray, np.ndarray]
    qfi: np.ndarray
    c_tilde: float
    rld_qfi: Optional[np.ndarray] = None
    rank_tol: float = RANK_TOL
    sqrt_rho: Optional[np.ndarray] = field(default=None, repr=False)


def sld_operators(problem: EstimationProblem, rank_tol: float = RANK_TOL):
    """Symmetric logarithmic derivatives, built in the eigenbasis of rho.

    Matrix elements across pairs of eigenvalues summing to at most
    ``rank_tol`` are set to zero. A derivative with weight on that
    kernel block cannot be represented and raises
    :class:`UnsupportedDerivativeError`.
    """
    if rank_tol <= 0:
        raise ValidationError("rank_tol must be positive")
    lam, U = eig_hermitian(problem.rho)
    lam = np.clip(lam, 0.0, None)
    total = lam[:, None] + lam[None, :]
    support = total > rank_tol
    denom = np.where(support, total, 1.0)
    out = []
    for i, d in enumerate(problem.drho):
        dt = U.conj().T @ d @ U
        kernel_weight = float(np.max(np.abs(np.where(support, 0.0, dt)), initial=0.0))
        if kernel_weight > KERNEL_RESIDUAL_TOL:
            raise UnsupportedDerivativeError(
                f"drho{i + 1} has weight {kernel_weight:.3e} on the kernel of rho "
                f"(tolerance {KERNEL_RESIDUAL_TOL:g})"
            )
        lt = np.where(support, 2.0 * dt / denom, 0.0)
        L = U @ lt @ U.conj().T
        out.append(0.5 * (L + L.conj().T))
    return out[0], out[1]


def _fisher_from_slds(rho, slds):
    F = np.empty((2, 2))
    for i in range(2):
        for j in range(2):
            F[i, j] = np.trace(rho @ slds[i] @ slds[j]).real
    return 0.5 * (F + F.T)


def sld_qfi(problem: EstimationProblem, rank_tol: float = RANK_TOL):
    """SLD quantum Fisher matrix ``F_ij = Re Tr[rho L_i L_j]``."""
    return _fisher_from_slds(problem.rho, sld_operators(problem, rank_tol))


def rld_qfi(problem: EstimationProblem):
    """RLD quantum Fisher matrix, entries ``Tr[rho L_j (L_i)^H]`` with ``L_j = rho^-1 drho_j``."""
    w, v = eig_hermitian(problem.rho)
    if w[0] <= RANK_TOL:
        raise RLDUndefinedError(
            f"RLD needs a full-rank state; min eigenvalue {w[0]:.3e} <= {RANK_TOL:g}"
        )
    rho_inv = (v / w) @ v.conj().T
    L = [rho_inv @ d for d in problem.drho]
    F = np.empty((2, 2), dtype=np.complex128)
    for i in range(2):
        for j in range(2):
            F[i, j] = np.trace(problem.rho @ L[j] @ L[i].conj().T)
    return 0.5 * (F + F.conj().T)


def _incompatibility(rho, slds, F, sqrt_rho=None):
    f11, f22 = F[0, 0], F[1, 1]
    if min(f11, f22) <= 1e-14 * max(f11, f22, 1e-300):
        raise UndefinedCoefficientError(
            f"incompatibility needs positive diagonal QFI, got ({f11:.3e}, {f22:.3e})"
        )
    c = trabs_rho_commutator(rho, slds[0], slds[1], sqrt_rho=sqrt_rho) / (2.0 * np.sqrt(f11 * f22))
    if c > 1.0:
        if c > 1.0 + CLAMP_TOL:
            raise ValidationError(f"incompatibility coefficient {c!r} exceeds 1 beyond {CLAMP_TOL:g}")
        c = 1.0
    return float(c)


def incompatibility(problem: EstimationProblem, rank_tol: float = RANK_TOL):
    slds = sld_operators(problem, rank_tol)
    F = _fisher_from_slds(problem.rho, slds)
    return _incompatibility(problem.rho, slds, F)


def qfi_data(problem: EstimationProblem, rank_tol: float = RANK_TOL, with_rld: bool = False):
    """One consistent snapshot of SLDs, QFI, incompatibility (and RLD QFI).

    ``c_tilde`` is NaN when a diagonal QFI entry vanishes.
    """
    slds = sld_operators(problem, rank_tol)
    F = _fisher_from_slds(problem.rho, slds)
    sqrt_rho = psd_sqrt(problem.rho)
    try:
        c = _incompatibility(problem.rho, slds, F, sqrt_rho)
    except UndefinedCoefficientError:
        c = float("nan")
    rld = rld_qfi(problem) if with_rld else None
    return QfiData(slds=slds, qfi=F, c_tilde=c, rld_qfi=rld, rank_tol=rank_tol, sqrt_rho=sqrt_rho)


def lyapunov_residual(problem: EstimationProblem, slds, rank_tol: float = RANK_TOL):
    """Largest Frobenius residual of ``drho - (rho L + L rho)/2`` on the support of rho."""
    lam, U = eig_hermitian(problem.rho)
    keep = U[:, lam > rank_tol]
    P = keep @ keep.conj().T
    res = 0.0
    for d, L in zip(problem.drho, slds):
        r = d - 0.5 * (problem.rho @ L + L @ problem.rho)
        # the kernel-kernel block is excluded
        r = r - (np.eye(len(P)) - P) @ r @ (np.eye(len(P)) - P)
        res = max(res, float(np.linalg.norm(r)))
    return res


__all__ = [
    "EstimationProblem",
    "QfiData",
    "as_density_matrix",
    "incompatibility",
    "lyapunov_residual",
    "qfi_data",
    "rld_qfi",
    "sld_operators",
    "sld_qfi",
]
