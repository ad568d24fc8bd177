"""Seeded ensemble runs over random problems and random measurements.

Instance ``k`` always draws from stream ``(seed, k)``, so rows do not depend
on the number of workers or on which other instances were computed. Rows
come back in index order.
"""
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
from typing import List, Optional, Sequence

import numpy as np

from .bounds import ncrb_general, ncrb_qubit
from .errors import QBoundsError
from .luwang import LwurSpec, lwb
from .measurement import regret_report
from .model import qfi_data
from .randomgen import SeededRng, random_fullrank_povm, random_problem, random_rank1_povm
from .scenarios import RotationsConfig, rotations_problem

PROBLEM_COLUMNS = ("index", "c_tilde", "ncrb", "lwb", "gap_normalized", "status")
MEASUREMENT_COLUMNS = ("index", "kind", "G", "precision", "F11", "F22", "F12", "status")


@dataclass(frozen=True)
class Table:
    columns: Sequence[str]
    rows: List[tuple]

    @property
    def failures(self) -> int:
        return sum(1 for r in self.rows if r[-1] not in ("ok", "reference"))

    def column(self, name: str, kind: Optional[str] = None):
        j = list(self.columns).index(name)
        rows = self.rows
        if kind is not None:
            k = list(self.columns).index("kind")
            rows = [r for r in rows if r[k] == kind]
        return np.array([r[j] for r in rows], dtype=np.float64)


def _status(exc: Exception) -> str:
    return f"error:{type(exc).__name__}"


def problem_row(index: int, d: int, seed: int) -> tuple:
    """One random problem: ``(index, c_tilde, ncrb, lwb, gap_normalized, status)``."""
    nan = math.nan
    try:
        problem = random_problem(d, SeededRng(seed, index))
        data = qfi_data(problem)
        if d == 2:
            c_n = ncrb_qubit(data.qfi)
        else:
            c_n = ncrb_general(problem).value
        c_lw = lwb(LwurSpec.from_qfi(data)).value
    except QBoundsError as exc:
        return (index, nan, nan, nan, nan, _status(exc))
    gap = (c_n - c_lw) / c_n if math.isfinite(c_n) else nan
    return (index, float(data.c_tilde), float(c_n), float(c_lw), gap, "ok")


def measurement_row(index: int, cfg: RotationsConfig, rank: str, m: int, seed: int) -> tuple:
    """One random POVM on the rotated qubit: ``(index, "sample", G, precision, F11, F22, F12, status)``."""
    nan = math.nan
    try:
        problem = rotations_problem(cfg)
        rng = SeededRng(seed, index)
        if rank == "1":
            povm = random_rank1_povm(problem.dim, m, rng)
        else:
            povm = random_fullrank_povm(problem.dim, m, rng)
        rep = regret_report(problem, povm)
    except QBoundsError as exc:
        return (index, "sample", nan, nan, nan, nan, nan, _status(exc))
    F = rep.classical_fisher
    return (index, "sample", rep.gap, rep.precision, F[0, 0], F[1, 1], F[0, 1], "ok")


def _run(fn, count: int, workers: int):
    indices = range(count)
    if workers <= 1:
        return [fn(k) for k in indices]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, indices, chunksize=max(1, count // (4 * workers))))


def random_problems_table(d: int, count: int, seed: int, workers: int = 1) -> Table:
    if d < 2 or count < 1:
        raise ValueError("need dim >= 2 and count >= 1")
    rows = _run(partial(problem_row, d=d, seed=seed), count, workers)
    return Table(PROBLEM_COLUMNS, rows)


def random_measurements_table(
    cfg: RotationsConfig, count: int, seed: int, rank: str = "1", m: int = 3, workers: int = 1
) -> Table:
    """Random POVMs on a rotated qubit plus two reference rows.

    The reference rows carry, in the ``precision`` column, the best
    separable-measurement precision ``1/C_N`` and the Lu-Wang reciprocal
    ``1/C_LW``.
    """
    if rank not in ("1", "full"):
        raise ValueError(f"rank must be '1' or 'full', got {rank!r}")
    if count < 1:
        raise ValueError("count must be positive")
    rows = _run(partial(measurement_row, cfg=cfg, rank=rank, m=m, seed=seed), count, workers)
    data = qfi_data(rotations_problem(cfg))
    c_n = ncrb_qubit(data.qfi)
    c_lw = lwb(LwurSpec.from_qfi(data)).value
    nan = math.nan
    rows.append((count, "ref_ncrb", nan, 1.0 / c_n, nan, nan, nan, "reference"))
    rows.append((count + 1, "ref_lwb", nan, 1.0 / c_lw, nan, nan, nan, "reference"))
    return Table(MEASUREMENT_COLUMNS, rows)


def format_value(x) -> str:
    """Decimal text with 15 significant digits; infinities as ``inf``."""
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".15g")


def write_table(table: Table, stream, delimiter: str = ",") -> None:
    stream.write(delimiter.join(table.columns) + "\n")
    for row in table.rows:
        stream.write(delimiter.join(format_value(x) for x in row) + "\n")
