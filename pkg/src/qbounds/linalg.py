"""Dense complex matrix kernel.

Small Hermitian eigenproblems, PSD square roots and the absolute-eigenvalue
trace used by the separable-measurement bound.
"""
from typing import NamedTuple

import numpy as np

from . import _kernels
from .errors import DimensionError, NotHermitianError, NotPSDError, ValidationError

HERMITIAN_TOL = 1e-12
PSD_FLOOR = -1e-10


class EigenSystem(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_square(a, name="matrix"):
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DimensionError(f"{name} must be a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValidationError(f"{name} has non-finite entries")
    return a


def hermiticity_residual(a):
    return float(np.max(np.abs(a - a.conj().T)))


def as_hermitian(a, name="matrix"):
    """Validate and return ``a`` as an exactly Hermitian complex array.

    The tolerance is ``1e-12 * (1 + max|a|)`` on the largest entry of
    ``a - a^H``; accepted input is symmetrized.
    """
    a = as_square(a, name)
    bound = HERMITIAN_TOL * (1.0 + float(np.max(np.abs(a))))
    res = hermiticity_residual(a)
    if res > bound:
        i, j = np.unravel_index(np.argmax(np.abs(a - a.conj().T)), a.shape)
        raise NotHermitianError(
            f"{name} is not Hermitian: |a[{i},{j}] - conj(a[{j},{i}])| = {res:.3e} "
            f"exceeds tolerance {bound:.3e}"
        )
    return 0.5 * (a + a.conj().T)


def eig_hermitian(a) -> EigenSystem:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending."""
    a = as_hermitian(a)
    w, v = _kernels.eigh(a)
    return EigenSystem(np.asarray(w, dtype=np.float64), np.asarray(v, dtype=np.complex128))


def psd_sqrt(a):
    """Square root of a positive semidefinite matrix.

    Eigenvalues in ``[-1e-10, 0)`` are treated as zero; anything lower raises
    :class:`NotPSDError`.
    """
    w, v = eig_hermitian(a)
    if w[0] < PSD_FLOOR:
        raise NotPSDError(f"matrix is not PSD: min eigenvalue {w[0]:.3e} < {PSD_FLOOR:g}")
    root = np.sqrt(np.clip(w, 0.0, None))
    out = (v * root) @ v.conj().T
    return 0.5 * (out + out.conj().T)


def trabs_hermitian(a):
    """Sum of absolute eigenvalues of a Hermitian matrix."""
    w, _ = eig_hermitian(a)
    return float(np.sum(np.abs(w)))


def trabs_rho_commutator(rho, x1, x2, sqrt_rho=None):
    """TrAbs of ``rho [x1, x2]``.

    Evaluated through the Hermitian matrix ``i sqrt(rho) [x1, x2] sqrt(rho)``,
    which has the same nonzero spectrum up to a factor ``i``. Swapping the
    arguments negates ``H`` exactly, so both signs are summed to make the
    result bitwise symmetric.
    """
    rho = as_hermitian(rho, "rho")
    x1 = as_hermitian(x1, "x1")
    x2 = as_hermitian(x2, "x2")
    if not (rho.shape == x1.shape == x2.shape):
        raise DimensionError(f"shape mismatch: rho {rho.shape}, x1 {x1.shape}, x2 {x2.shape}")
    if sqrt_rho is None:
        sqrt_rho = psd_sqrt(rho)
    h = 1j * (sqrt_rho @ (x1 @ x2 - x2 @ x1) @ sqrt_rho)
    h = 0.5 * (h + h.conj().T)
    w_pos, _ = _kernels.eigh(h)
    w_neg, _ = _kernels.eigh(-h)
    return 0.5 * (float(np.sum(np.abs(w_pos))) + float(np.sum(np.abs(w_neg))))
