"""Golden-table reproduction: regenerate benchmark numbers and compare them
cell by cell against recorded expectations.

Each golden CSV under ``data/golden/`` stores one expectation per line:
``row,column,expected,mode,tolerance,provenance``.  Modes:

``factor``
    pass iff measured/expected lies in [1/tol, tol] (used for error cells
    printed to three significant digits),
``abs``
    pass iff |measured - expected| <= tol (observed orders, flags),
``upper``
    pass iff measured <= expected (residual bounds),
``lower``
    pass iff measured >= expected (the deliberately unstable cell),
``order_of_magnitude``
    pass iff |log10(measured/expected)| <= tol (adaptive step counts, which
    are controller-dependent).

The provenance column records whether a value was copied from a published
table (``paper``), computed by an independent derivation (``derived``) or
holds by construction (``trivial``).
"""

from __future__ import annotations

import csv
import math
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from . import conditions, tableau
from .problems import error_metrics, pendulum, prob1, prothero_robinson
from .steppers import integrate_adaptive, integrate_fixed

__all__ = ["GoldenCell", "load_golden", "compare", "reproduce_all", "GOLDEN_DIR"]

GOLDEN_DIR = Path(__file__).parent / "data" / "golden"

_MODES = ("factor", "abs", "upper", "lower", "order_of_magnitude")


@dataclass(frozen=True)
class GoldenCell:
    row: str
    column: str
    expected: float
    mode: str
    tolerance: Optional[float]
    provenance: str

    def check(self, measured: float) -> bool:
        if self.mode == "factor":
            if measured == 0.0 and self.expected == 0.0:
                return True
            if measured <= 0.0 or self.expected <= 0.0:
                return False
            r = measured / self.expected
            return 1.0 / self.tolerance <= r <= self.tolerance
        if self.mode == "abs":
            return abs(measured - self.expected) <= self.tolerance
        if self.mode == "upper":
            return measured <= self.expected
        if self.mode == "lower":
            return measured >= self.expected
        if self.mode == "order_of_magnitude":
            if measured <= 0.0 or self.expected <= 0.0:
                return False
            return abs(math.log10(measured / self.expected)) <= self.tolerance
        raise ValueError(f"unknown tolerance mode {self.mode!r}")


def load_golden(path) -> list:
    """Parse one golden CSV into a list of :class:`GoldenCell`."""
    cells = []
    with open(path, newline="") as fh:
        for rec in csv.DictReader(fh):
            mode = rec["mode"].strip()
            if mode not in _MODES:
                raise ValueError(f"{path}: unknown mode {mode!r}")
            tol = rec["tolerance"].strip()
            cells.append(
                GoldenCell(
                    row=rec["row"].strip(),
                    column=rec["column"].strip(),
                    expected=float(rec["expected"]),
                    mode=mode,
                    tolerance=float(tol) if tol else None,
                    provenance=rec["provenance"].strip(),
                )
            )
    return cells


# ---------------------------------------------------------------------------
# measurements


def _measure_tsit5da_verification() -> Dict[Tuple[str, str], float]:
    tab = tableau.tsit5da()
    rep = conditions.half_explicit_condition_residuals(tab)
    out: Dict[Tuple[str, str], float] = {}
    for p, worst in rep.max_by_order().items():
        out[("main", f"order{p}_max_residual")] = worst
    out[("main", "attained_order")] = float(rep.attained_order())
    out[("main", "stiffly_accurate")] = float(tableau.check_stiffly_accurate(tab))
    out[("main", "simplifying_max")] = float(np.max(conditions.simplifying_residuals(tab)))
    out[("main", "r_infinity")] = conditions.r_infinity(tab)
    emb = conditions.half_explicit_condition_residuals(tab, weights=tab.bhat)
    out[("embedded", "attained_order_full")] = float(emb.attained_order())
    out[("embedded", "attained_order_tree_subset")] = float(emb.attained_order(ode_only=True))
    out[("embedded", "stiffly_accurate")] = float(
        tableau.check_stiffly_accurate(tab, embedded=True)
    )
    return out


def _convergence_cells(bench, hs, embedded_hs=()) -> Dict[Tuple[str, str], float]:
    tab = tableau.tsit5da()
    prob = bench.problem_for(tab)
    out: Dict[Tuple[str, str], float] = {}
    prev = None
    for h in hs:
        key = format(h, ".2e")
        traj = integrate_fixed(prob, tab, h=h, t_end=bench.t_end)
        err = error_metrics(traj, bench).endpoint
        out[(key, "err_main")] = err
        if prev is not None and err > 0:
            out[(key, "order_main")] = math.log2(prev / err)
        prev = err
        if h in embedded_hs:
            traj = integrate_fixed(prob, tab, h=h, t_end=bench.t_end, use_embedded=True)
            out[(key, "err_embedded")] = error_metrics(traj, bench).endpoint
    return out


def _measure_prob1() -> Dict[Tuple[str, str], float]:
    hs = [1.25e-1 / 2**k for k in range(5)]
    return _convergence_cells(prob1(), hs, embedded_hs=set(hs[2:]))


def _measure_prothero_robinson() -> Dict[Tuple[str, str], float]:
    hs = [5.0e-1 / 2**k for k in range(7)]
    return _convergence_cells(prothero_robinson(), hs)


def _measure_pendulum() -> Dict[Tuple[str, str], float]:
    tab = tableau.tsit5da()
    bench = pendulum(n=5)
    prob = bench.semi_explicit
    prob.f(prob.t0, prob.y0, prob.z0)  # compile kernels outside the timed runs
    prob.g(prob.t0, prob.y0, prob.z0)
    out: Dict[Tuple[str, str], float] = {}
    results = {}
    for rtol in (1e-7, 1e-8):
        traj = integrate_adaptive(prob, tab, rtol=rtol, atol=rtol, t_end=bench.t_end)
        err = error_metrics(traj, bench).custom
        s = traj.stats
        key = f"rtol={rtol:.0e}"
        out[(key, "nsucc")] = float(s.nsucc)
        out[(key, "nfail")] = float(s.nfail)
        out[(key, "nfcn")] = float(s.nf + s.nf_jac)
        out[(key, "err_length")] = err
        results[rtol] = (s.nsucc, err)
    out[("rtol=1e-08", "err_decreased_vs_1e-07")] = float(
        results[1e-8][1] < results[1e-7][1]
    )
    out[("rtol=1e-08", "nsucc_increased_vs_1e-07")] = float(
        results[1e-8][0] > results[1e-7][0]
    )
    return out


#: table name -> (golden file, measurement function)
TABLES: Dict[str, Tuple[str, Callable[[], Dict[Tuple[str, str], float]]]] = {
    "tsit5da-verification": ("tsit5da_verification.csv", _measure_tsit5da_verification),
    "prob1-convergence": ("prob1_convergence.csv", _measure_prob1),
    "prothero-robinson-convergence": (
        "prothero_robinson_convergence.csv",
        _measure_prothero_robinson,
    ),
    "pendulum-stats": ("pendulum_stats.csv", _measure_pendulum),
}

_QUICK = ("tsit5da-verification", "prob1-convergence")


def compare(cells, measured, table_name, out) -> int:
    """Check every golden cell against the measured values; returns the
    number of failures and prints one line per cell."""
    failures = 0
    for cell in cells:
        key = (cell.row, cell.column)
        if key not in measured:
            out.write(
                f"FAIL {table_name}[{cell.row},{cell.column}]: no measured value\n"
            )
            failures += 1
            continue
        got = measured[key]
        ok = cell.check(got)
        status = "PASS" if ok else "FAIL"
        tol = "" if cell.tolerance is None else f", tol {cell.tolerance:g}"
        out.write(
            f"{status} {table_name}[{cell.row},{cell.column}]: measured "
            f"{got:.6g}, expected {cell.expected:.6g} ({cell.mode}{tol}) "
            f"[{cell.provenance}]\n"
        )
        if not ok:
            failures += 1
    return failures


def reproduce_all(quick: bool = False, out=None, golden_dir=None) -> bool:
    """Regenerate all golden tables and compare cell by cell.

    ``quick`` restricts the run to the tableau verification and the first
    convergence table (a few seconds); the full run includes the adaptive
    pendulum statistics.  Returns True iff every cell passed.
    """
    out = out if out is not None else sys.stdout
    golden_dir = Path(golden_dir) if golden_dir is not None else GOLDEN_DIR
    names = _QUICK if quick else tuple(TABLES)
    total_fail = 0
    t_start = time.perf_counter()
    for name in names:
        fname, measure = TABLES[name]
        cells = load_golden(golden_dir / fname)
        t0 = time.perf_counter()
        measured = measure()
        wall = time.perf_counter() - t0
        fails = compare(cells, measured, name, out)
        total_fail += fails
        out.write(
            f"# table {name}: {len(cells) - fails}/{len(cells)} cells pass "
            f"({wall:.2f}s)\n"
        )
    out.write(
        f"# total: {'OK' if total_fail == 0 else f'{total_fail} FAILURES'} "
        f"({time.perf_counter() - t_start:.2f}s)\n"
    )
    return total_fail == 0
