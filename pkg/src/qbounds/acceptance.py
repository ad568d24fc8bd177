"""Acceptance suite: twelve end-to-end checks with fixed tolerances and budgets.

Each check returns ``(passed, detail)``; :func:`run_criterion` adds timing
and fails a check that exceeds its wall-clock budget.
"""
import math
import time
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from .bounds import (
    diag_weight,
    envelope_from_weighted_bound,
    hcrb_general,
    hcrb_qubit,
    nagaoka_curve_qubit,
    ncrb_general,
    ncrb_qubit,
    sld_crb,
)
from .experiments import random_measurements_table, random_problems_table
from .luwang import LwurSpec, lwb, lwb_numeric, lwur_boundary_v2, lwur_slack
from .measurement import Povm, regret_report
from .model import incompatibility, qfi_data, sld_qfi
from .randomgen import (
    SeededRng,
    random_fullrank_povm,
    random_problem,
    random_pure_problem,
    random_rank1_povm,
)
from .scenarios import RotationsConfig, equal_bounds_problem, rotations_problem, rotations_reference

SEED = 20240601
PI = math.pi


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float
    budget: Optional[float]

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        budget = f"/{self.budget:.0f}s" if self.budget else ""
        return f"[{status}] criterion {self.number:2d} {self.title}: {self.detail} ({self.seconds:.1f}s{budget})"


def _rel(a, b):
    return abs(a - b) / abs(b)


def check_rotations_grid() -> Tuple[bool, str]:
    worst_n = worst_h = worst_c = 0.0
    for r in (0.3, 0.5, 0.8, 1.0):
        for theta in (PI / 6, PI / 4, PI / 3):
            for phi in (0.0, PI / 8, PI / 4):
                cfg = RotationsConfig(r, theta, phi)
                ref = rotations_reference(cfg)
                problem = rotations_problem(cfg)
                worst_n = max(worst_n, _rel(ncrb_general(problem).value, ref.ncrb))
                if r < 1.0:
                    worst_h = max(worst_h, _rel(hcrb_general(problem).value, ref.hcrb))
                worst_c = max(worst_c, abs(incompatibility(problem) - ref.c_tilde))
    ok = worst_n <= 1e-5 and worst_h <= 1e-5 and worst_c <= 1e-9
    return ok, f"max rel err ncrb {worst_n:.1e}, hcrb {worst_h:.1e}; max |c err| {worst_c:.1e}"


def check_finite_gap() -> Tuple[bool, str]:
    worst = 0.0
    for r in (0.25, 0.5, 1.0):
        data = qfi_data(rotations_problem(RotationsConfig(r, PI / 4, PI / 4)))
        worst = max(worst, _rel(lwb_numeric(LwurSpec.from_qfi(data)).value, 4.0 / r**2))
    problem = rotations_problem(RotationsConfig(0.5, PI / 4, PI / 4))
    data = qfi_data(problem)
    got = (
        sld_crb(data.qfi),
        ncrb_general(problem).value,
        hcrb_general(problem).value,
        lwb_numeric(LwurSpec.from_qfi(data)).value,
    )
    want = (12.0, 4.0 * (1.0 + math.sqrt(2.0)) ** 2, 12.0 + 4.0 * math.sqrt(2.0), 16.0)
    dev = max(abs(g - w) for g, w in zip(got, want))
    ok = worst <= 1e-8 and dev <= 1e-6
    return ok, f"max rel err lwb vs 4/r^2 {worst:.1e}; max abs err of the r=1/2 quadruple {dev:.1e}"


def check_infinite_gap() -> Tuple[bool, str]:
    worst = 0.0
    all_inf = True
    for r, phi in ((1.0, PI / 4), (1.0, PI / 3), (0.5, PI / 6)):
        problem = rotations_problem(RotationsConfig(r, PI / 2, phi))
        data = qfi_data(problem)
        for value in (sld_crb(data.qfi), ncrb_qubit(data.qfi), hcrb_qubit(problem), ncrb_general(problem).value):
            all_inf &= math.isinf(value) and value > 0
        want = 1.0 / (r * math.sin(phi)) ** 2 + 1.0 / (r * math.cos(phi)) ** 2
        worst = max(worst, abs(lwb(LwurSpec.from_qfi(data)).value - want))
    ok = all_inf and worst <= 1e-8
    return ok, f"all CRBs infinite: {all_inf}; max abs err lwb {worst:.1e}"


def check_diagonal_qfi_qubits() -> Tuple[bool, str]:
    worst_gap = worst_c = 0.0
    for k in range(100):
        problem = random_problem(2, SeededRng(SEED + 4, k))
        _, U = np.linalg.eigh(sld_qfi(problem))
        data = qfi_data(problem.reparameterized(U.T))
        worst_c = max(worst_c, abs(data.c_tilde - 1.0))
        c_n = ncrb_qubit(data.qfi)
        worst_gap = max(worst_gap, _rel(lwb(LwurSpec.from_qfi(data)).value, c_n))
    ok = worst_c <= 1e-9 and worst_gap <= 1e-8
    return ok, f"max |c - 1| {worst_c:.1e}; max |ncrb - lwb|/ncrb {worst_gap:.1e}"


def check_equal_bounds_family() -> Tuple[bool, str]:
    worst = worst_c = 0.0
    for d in (2, 3, 4, 5):
        problem, expected = equal_bounds_problem(d)
        data = qfi_data(problem)
        worst_c = max(worst_c, abs(data.c_tilde - 1.0))
        worst = max(worst, _rel(ncrb_general(problem).value, expected), _rel(lwb(LwurSpec.from_qfi(data)).value, expected))
    ok = worst <= 1e-4 and worst_c <= 1e-9
    return ok, f"max rel err vs 12(2d-1) {worst:.1e}; max |c - 1| {worst_c:.1e}"


def check_random_problem_ordering() -> Tuple[bool, str]:
    parts = []
    ok = True
    for d in (2, 3):
        table = random_problems_table(d, 1000, SEED + 6)
        c = table.column("c_tilde")
        c_n = table.column("ncrb")
        c_lw = table.column("lwb")
        gap = table.column("gap_normalized")
        order_ok = table.failures == 0 and bool(np.all(c_lw <= c_n * (1.0 + 1e-7)))
        near = c > 0.999
        max_gap = float(gap[near].max()) if near.any() else 0.0
        ok &= order_ok and max_gap <= 1e-2
        parts.append(
            f"d={d}: {table.failures} failed rows, lwb<=ncrb {order_ok}, "
            f"{int(near.sum())} rows with c>0.999, max gap there {max_gap:.3g}"
        )
    return ok, "; ".join(parts)


def check_random_rank1_measurements() -> Tuple[bool, str]:
    table = random_measurements_table(RotationsConfig(1.0, PI / 4, PI / 4), 10_000, SEED + 7, rank="1")
    G = table.column("G", "sample")
    prec = table.column("precision", "sample")
    best = float(table.column("precision", "ref_ncrb")[0])
    top = float(prec.max())
    low = G < 1e-3
    low_ratio = float(prec[low].max() / top) if low.any() else 0.0
    ok = (
        table.failures == 0
        and G.min() < 1e-4
        and 0.8 * best <= top <= best + 1e-7
        and low.any()
        and low_ratio < 0.5
    )
    return ok, (
        f"min G {G.min():.2e}; max precision {top:.6f} vs 1/C_N {best:.6f}; "
        f"{int(low.sum())} samples with G<1e-3, best at {100 * low_ratio:.2f}% of max"
    )


def check_projective_z() -> Tuple[bool, str]:
    rep = regret_report(rotations_problem(RotationsConfig(1.0, PI / 4, PI / 4)), Povm.computational(2))
    err = float(np.abs(rep.classical_fisher - np.array([[0.5, -0.5], [-0.5, 0.5]])).max())
    ok = err <= 1e-12 and abs(rep.gap) <= 1e-9 and rep.precision == 0.0
    return ok, f"max |F err| {err:.1e}; G {rep.gap:.1e}; precision {rep.precision}"


def check_fisher_inequalities() -> Tuple[bool, str]:
    min_eig = math.inf
    min_gap = math.inf
    n = 0
    for d in (2, 3):
        for k in range(500):
            rng = SeededRng(SEED + 9 + d, k)
            problem = random_problem(d, rng)
            povm = random_rank1_povm(d, max(3, d), rng) if k % 2 == 0 else random_fullrank_povm(d, 3, rng)
            rep = regret_report(problem, povm)
            min_eig = min(min_eig, float(np.linalg.eigvalsh(rep.regret)[0]))
            min_gap = min(min_gap, rep.gap)
            n += 1
    ok = min_eig >= -1e-8 and min_gap >= -1e-9
    return ok, f"{n} pairs; min eig(F_Q - F) {min_eig:.2e}; min G {min_gap:.2e}"


def check_bound_ordering() -> Tuple[bool, str]:
    worst = -math.inf
    for d in (2, 3):
        for k in range(100):
            problem = random_problem(d, SeededRng(SEED + 10 + d, k))
            c_s = sld_crb(sld_qfi(problem))
            c_h = hcrb_general(problem).value
            c_n = ncrb_general(problem).value
            worst = max(worst, c_s - c_h, c_h - c_n)
    worst_pure = 0.0
    for k in range(50):
        problem = random_pure_problem(2 + k % 2, SeededRng(SEED + 20, k))
        c_n = ncrb_general(problem).value
        worst_pure = max(worst_pure, _rel(hcrb_general(problem).value, c_n))
    ok = worst <= 1e-7 and worst_pure <= 1e-5
    return ok, f"max ordering violation {worst:.1e}; max pure-state |hcrb - ncrb|/ncrb {worst_pure:.1e}"


def check_envelope_hyperbola() -> Tuple[bool, str]:
    weights = np.linspace(0.01, 1.99, 101)
    worst = 0.0
    for k in range(20):
        F = sld_qfi(random_problem(2, SeededRng(SEED + 11, k)))
        curve = envelope_from_weighted_bound(lambda W: ncrb_qubit(F, W), weights, method="tangent")
        exact = nagaoka_curve_qubit(F, curve.v1).v2
        worst = max(worst, float(np.max(np.abs(curve.v2 - exact) / exact)))
    ok = worst <= 1e-4
    return ok, f"max pointwise rel deviation {worst:.1e}"


def _random_spec(rng: SeededRng) -> LwurSpec:
    g = rng.generator
    return LwurSpec(float(g.uniform(0.1, 10.0)), float(g.uniform(0.1, 10.0)), float(g.uniform(0.0, 1.0)))


def _random_feasible_point(spec: LwurSpec, rng: SeededRng):
    k1, k2 = spec.kappa
    v1 = k1 / (1.0 - rng.generator.uniform(0.0, 0.99))
    v2 = lwur_boundary_v2(v1, spec) * (1.0 + rng.generator.exponential(0.5) * (rng.generator.uniform() < 0.7))
    return v1, v2


def check_lwur_convexity() -> Tuple[bool, str]:
    worst_slack = -math.inf
    for k in range(1000):
        rng = SeededRng(SEED + 12, k)
        spec = _random_spec(rng)
        a = _random_feasible_point(spec, rng)
        b = _random_feasible_point(spec, rng)
        worst_slack = max(worst_slack, lwur_slack(0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), spec))
    worst_kkt = 0.0
    for k in range(1000):
        rng = SeededRng(SEED + 13, k)
        if k % 2:
            spec = _random_spec(rng)
        else:
            spec = LwurSpec.from_qfi(qfi_data(random_problem(2 + k % 3, rng)))
        worst_kkt = max(worst_kkt, lwb_numeric(spec).dual["residual"])
    ok = worst_slack <= 1e-12 and worst_kkt <= 1e-9
    return ok, f"max midpoint slack {worst_slack:.1e}; max KKT residual {worst_kkt:.1e}"


CRITERIA: Dict[int, Tuple[str, Optional[float], Callable[[], Tuple[bool, str]]]] = {
    1: ("rotations closed forms", 60.0, check_rotations_grid),
    2: ("finite-gap rotations values", None, check_finite_gap),
    3: ("infinite-gap rotations values", None, check_infinite_gap),
    4: ("qubits with diagonal QFI", 10.0, check_diagonal_qfi_qubits),
    5: ("any-dimension equality family", 120.0, check_equal_bounds_family),
    6: ("random-problem bound ordering", 600.0, check_random_problem_ordering),
    7: ("random rank-1 measurements", 300.0, check_random_rank1_measurements),
    8: ("projective-Z golden value", None, check_projective_z),
    9: ("Fisher matrix inequalities", None, check_fisher_inequalities),
    10: ("bound ordering and pure-state equality", None, check_bound_ordering),
    11: ("weighted-bound envelope vs hyperbola", None, check_envelope_hyperbola),
    12: ("Lu-Wang region convexity and KKT", None, check_lwur_convexity),
}


def run_criterion(number: int) -> CriterionResult:
    title, budget, fn = CRITERIA[number]
    start = time.perf_counter()
    try:
        passed, detail = fn()
    except Exception as exc:  # reported, not raised: the suite keeps going
        passed, detail = False, f"raised {type(exc).__name__}: {exc}"
    seconds = time.perf_counter() - start
    if budget is not None and seconds > budget:
        passed = False
        detail += f"; over the {budget:.0f}s budget"
    return CriterionResult(number, title, bool(passed), detail, seconds, budget)


def run_all(numbers=None, stream=None) -> List[CriterionResult]:
    results = []
    for n in numbers or sorted(CRITERIA):
        res = run_criterion(n)
        if stream is not None:
            stream.write(res.line() + "\n")
            stream.flush()
        results.append(res)
    return results
