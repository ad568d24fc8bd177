"""Hot numeric kernels.

Every function here is written so that it runs unchanged either as plain
numpy code or under ``numba.njit``; :mod:`qbounds._accel` picks the mode.
Matrices are small (d <= ~16) and dense complex128.
"""
import numpy as np

from ._accel import USE_NUMBA, maybe_njit


def jacobi_eigh_py(a, tol=1e-15, max_sweeps=100):
    """Cyclic Jacobi eigendecomposition of a complex Hermitian matrix.

    Returns ``(w, v)`` with ``w`` ascending and ``a = v @ diag(w) @ v^H``.
    """
    n = a.shape[0]
    A = np.empty((n, n), dtype=np.complex128)
    for i in range(n):
        for j in range(n):
            A[i, j] = 0.5 * (a[i, j] + np.conj(a[j, i]))
    V = np.zeros((n, n), dtype=np.complex128)
    for i in range(n):
        V[i, i] = 1.0

    scale = 0.0
    for i in range(n):
        for j in range(n):
            scale += abs(A[i, j]) ** 2
    scale = np.sqrt(scale)

    for _ in range(max_sweeps):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off += abs(A[p, q]) ** 2
        if np.sqrt(2.0 * off) <= tol * scale or off == 0.0:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                g = abs(apq)
                if g == 0.0:
                    continue
                phase = apq / g
                theta = (A[q, q].real - A[p, p].real) / (2.0 * g)
                if theta >= 0.0:
                    t = 1.0 / (theta + np.sqrt(theta * theta + 1.0))
                else:
                    t = -1.0 / (-theta + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # J acts on columns p, q:
                #   J[:, p] = c e_p - s conj(phase) e_q
                #   J[:, q] = s e_p + c conj(phase) e_q
                cph = np.conj(phase)
                for k in range(n):
                    akp = A[k, p]
                    akq = A[k, q]
                    A[k, p] = c * akp - s * cph * akq
                    A[k, q] = s * akp + c * cph * akq
                for k in range(n):
                    apk = A[p, k]
                    aqk = A[q, k]
                    A[p, k] = c * apk - s * phase * aqk
                    A[q, k] = s * apk + c * phase * aqk
                A[p, q] = 0.0
                A[q, p] = 0.0
                A[p, p] = A[p, p].real
                A[q, q] = A[q, q].real
                for k in range(n):
                    vkp = V[k, p]
                    vkq = V[k, q]
                    V[k, p] = c * vkp - s * cph * vkq
                    V[k, q] = s * vkp + c * cph * vkq

    w = np.empty(n, dtype=np.float64)
    for i in range(n):
        w[i] = A[i, i].real
    order = np.argsort(w)
    w_sorted = np.empty(n, dtype=np.float64)
    v_sorted = np.empty((n, n), dtype=np.complex128)
    for k in range(n):
        w_sorted[k] = w[order[k]]
        for i in range(n):
            v_sorted[i, k] = V[i, order[k]]
    return w_sorted, v_sorted


if USE_NUMBA:
    eigh = maybe_njit(jacobi_eigh_py)
else:
    eigh = np.linalg.eigh


def herm_to_vec_py(M):
    """Coordinates of a Hermitian matrix in the orthonormal Hermitian basis.

    Order: diagonal entries, then for each pair j < k the symmetric and
    antisymmetric coordinates ``sqrt(2) Re M[j,k]`` and ``sqrt(2) Im M[j,k]``.
    """
    n = M.shape[0]
    x = np.empty(n * n, dtype=np.float64)
    r2 = np.sqrt(2.0)
    for k in range(n):
        x[k] = M[k, k].real
    idx = n
    for j in range(n):
        for k in range(j + 1, n):
            x[idx] = r2 * M[j, k].real
            x[idx + 1] = r2 * M[j, k].imag
            idx += 2
    return x


def vec_to_herm_py(x, n):
    M = np.zeros((n, n), dtype=np.complex128)
    h = 1.0 / np.sqrt(2.0)
    for k in range(n):
        M[k, k] = x[k]
    idx = n
    for j in range(n):
        for k in range(j + 1, n):
            z = h * (x[idx] + 1j * x[idx + 1])
            M[j, k] = z
            M[k, j] = np.conj(z)
            idx += 2
    return M


herm_to_vec = maybe_njit(herm_to_vec_py)
vec_to_herm = maybe_njit(vec_to_herm_py)


def quadratic_part_py(X1, X2, rho, w11, w12, w22):
    R1 = rho @ X1
    R2 = rho @ X2
    z11 = np.trace(R1 @ X1).real
    z22 = np.trace(R2 @ X2).real
    z12 = np.trace(R1 @ X2)
    f = w11 * z11 + w22 * z22 + 2.0 * w12 * z12.real
    S1 = R1 + R1.conj().T
    S2 = R2 + R2.conj().T
    G1 = w11 * S1 + w12 * S2
    G2 = w22 * S2 + w12 * S1
    return f, G1, G2, z12


quadratic_part = maybe_njit(quadratic_part_py)


def ncrb_value_grad_py(X1, X2, rho, sqrt_rho, w11, w12, w22, sw, mu):
    """Smoothed separable-measurement objective and its matrix gradients.

    Value ``Tr[W Re Z] + sw * sum_k (sqrt(l_k^2 + mu^2) - mu)`` where
    ``l_k`` are the eigenvalues of ``i sqrt(rho) [X1, X2] sqrt(rho)``.
    Gradients are returned as Hermitian matrices ``G`` with
    ``df = Tr[G1 dX1] + Tr[G2 dX2]``.
    """
    f, G1, G2, z12 = quadratic_part(X1, X2, rho, w11, w12, w22)
    C = X1 @ X2 - X2 @ X1
    H = 1j * (sqrt_rho @ C @ sqrt_rho)
    H = 0.5 * (H + H.conj().T)
    lam, U = eigh(H)
    n = lam.shape[0]
    dphi = np.empty(n, dtype=np.float64)
    tr = 0.0
    for k in range(n):
        if mu > 0.0:
            root = np.sqrt(lam[k] * lam[k] + mu * mu)
            tr += root - mu
            dphi[k] = lam[k] / root
        else:
            tr += abs(lam[k])
            dphi[k] = np.sign(lam[k])
    f += sw * tr
    D = np.zeros((n, n), dtype=np.complex128)
    for k in range(n):
        D[k, k] = dphi[k]
    K = sqrt_rho @ (U @ D @ U.conj().T) @ sqrt_rho
    G1 = G1 + sw * 1j * (X2 @ K - K @ X2)
    G2 = G2 + sw * 1j * (K @ X1 - X1 @ K)
    return f, G1, G2


def hcrb_value_grad_py(X1, X2, rho, sqrt_rho, w11, w12, w22, sw, mu):
    """Smoothed two-parameter Holevo objective and its matrix gradients.

    Value ``Tr[W Re Z] + 2 sw (sqrt(t^2 + mu^2) - mu)`` with
    ``t = Im Tr[rho X1 X2]``.
    """
    f, G1, G2, z12 = quadratic_part(X1, X2, rho, w11, w12, w22)
    t = z12.imag
    if mu > 0.0:
        root = np.sqrt(t * t + mu * mu)
        f += 2.0 * sw * (root - mu)
        c = 2.0 * sw * t / root
    else:
        f += 2.0 * sw * abs(t)
        c = 2.0 * sw * np.sign(t)
    # d Im Tr[rho X1 X2] = Tr[(X2 rho - rho X2)/(2i) dX1] = Tr[(rho X1 - X1 rho)/(2i) dX2]
    G1 = G1 + c * (X2 @ rho - rho @ X2) / 2j
    G2 = G2 + c * (rho @ X1 - X1 @ rho) / 2j
    return f, G1, G2


ncrb_value_grad = maybe_njit(ncrb_value_grad_py)
hcrb_value_grad = maybe_njit(hcrb_value_grad_py)


def fisher_from_probabilities_py(p, dp, p_tol):
    """Classical Fisher matrix from outcome probabilities and derivatives.

    ``dp`` has shape (2, m). Returns ``(F, bad)`` where ``bad`` is the index
    of the first zero-probability outcome that carries a nonzero derivative,
    or -1.
    """
    F = np.zeros((2, 2), dtype=np.float64)
    thresh = np.sqrt(p_tol)
    bad = -1
    for k in range(p.shape[0]):
        if p[k] > p_tol:
            for i in range(2):
                for j in range(2):
                    F[i, j] += dp[i, k] * dp[j, k] / p[k]
        elif bad < 0 and (abs(dp[0, k]) > thresh or abs(dp[1, k]) > thresh):
            bad = k
    return F, bad


fisher_from_probabilities = maybe_njit(fisher_from_probabilities_py)
