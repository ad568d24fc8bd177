"""Seeded random problems and measurements.

Streams come from numpy's Philox4x64 counter-based generator keyed by the
pair ``(seed, stream_id)``, so stream ``k`` does not depend on whether any
other stream was consumed. Batch code uses the instance index as the
stream id.

Complex Gaussian entries are ``(a + i b) / sqrt(2)`` with ``a, b`` standard
normal.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import GenerationError, QBoundsError
from .linalg import psd_sqrt
from .measurement import Povm
from .model import EstimationProblem, sld_operators

MAX_REDRAWS = 100


@dataclass
class SeededRng:
    seed: int
    stream_id: int = 0
    generator: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self):
        key = np.array([self.seed & 0xFFFFFFFFFFFFFFFF, self.stream_id & 0xFFFFFFFFFFFFFFFF], dtype=np.uint64)
        self.generator = np.random.Generator(np.random.Philox(key=key))

    def complex_normal(self, shape):
        g = self.generator.standard_normal(shape + (2,) if isinstance(shape, tuple) else (shape, 2))
        return (g[..., 0] + 1j * g[..., 1]) / np.sqrt(2.0)


def ginibre(d: int, rng: SeededRng, cols: int = None):
    return rng.complex_normal((d, d if cols is None else cols))


def random_density_hs(d: int, rng: SeededRng):
    """Hilbert-Schmidt random state ``G G^H / Tr[G G^H]`` from a square Ginibre ``G``."""
    if d < 2:
        raise ValueError("dimension must be at least 2")
    G = ginibre(d, rng)
    rho = G @ G.conj().T
    rho = rho / np.trace(rho).real
    return 0.5 * (rho + rho.conj().T)


def random_traceless_hermitian(d: int, rng: SeededRng):
    if d < 2:
        raise ValueError("dimension must be at least 2")
    A = ginibre(d, rng)
    H = 0.5 * (A + A.conj().T)
    return H - (np.trace(H).real / d) * np.eye(d)


def random_problem(d: int, rng: SeededRng) -> EstimationProblem:
    """Random state with two random traceless Hermitian derivatives."""
    for _ in range(MAX_REDRAWS):
        rho = random_density_hs(d, rng)
        drho = (random_traceless_hermitian(d, rng), random_traceless_hermitian(d, rng))
        try:
            problem = EstimationProblem(rho, drho)
            sld_operators(problem)
        except QBoundsError:
            continue
        return problem
    raise GenerationError(f"no valid random problem after {MAX_REDRAWS} draws (d={d})")


def random_pure_problem(d: int, rng: SeededRng) -> EstimationProblem:
    """Pure state ``|psi><psi|`` with unitary-encoding derivatives ``-i[H_j, rho]``."""
    psi = rng.complex_normal(d)
    psi = psi / np.linalg.norm(psi)
    rho = np.outer(psi, psi.conj())
    drho = []
    for _ in range(2):
        H = random_traceless_hermitian(d, rng)
        drho.append(-1j * (H @ rho - rho @ H))
    return EstimationProblem(rho, tuple(drho))


def _normalized(blocks):
    A = sum(blocks)
    w = np.linalg.eigvalsh(A)
    if w[0] <= 1e-12:
        return None
    inv_root = np.linalg.inv(psd_sqrt(A))
    effects = [inv_root @ b @ inv_root for b in blocks]
    return Povm(np.array([0.5 * (e + e.conj().T) for e in effects]))


def random_rank1_povm(d: int, m: int, rng: SeededRng) -> Povm:
    """``m`` Gaussian kets normalized as ``A^-1/2 |psi_i><psi_i| A^-1/2``."""
    if m < d:
        raise ValueError(f"need m >= d outcomes for a full-rank frame, got m={m}, d={d}")
    for _ in range(MAX_REDRAWS):
        kets = rng.complex_normal((m, d))
        povm = _normalized([np.outer(k, k.conj()) for k in kets])
        if povm is not None:
            return povm
    raise GenerationError(f"rank-1 POVM frame stayed singular after {MAX_REDRAWS} draws")


def random_fullrank_povm(d: int, m: int, rng: SeededRng) -> Povm:
    """``m`` Ginibre Gram matrices ``G G^H`` normalized by ``A^-1/2 (.) A^-1/2``."""
    if m < 2:
        raise ValueError("need at least two outcomes")
    for _ in range(MAX_REDRAWS):
        blocks = []
        for _ in range(m):
            G = ginibre(d, rng)
            blocks.append(G @ G.conj().T)
        povm = _normalized(blocks)
        if povm is not None:
            return povm
    raise GenerationError(f"full-rank POVM frame stayed singular after {MAX_REDRAWS} draws")
