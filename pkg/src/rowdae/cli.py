"""Command-line harness: convergence tables, work-precision sweeps,
pendulum statistics, tableau verification, stability scans and golden-table
reproduction.

All data commands emit CSV with a ``#``-prefixed header echoing the full
configuration, so any output file documents the command that produced it.
Floats are printed with 17 significant digits.  Exit codes: 0 success,
1 usage/configuration error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from . import conditions, golden, problems, tableau
from .errors import (
    InconsistentInitialState,
    InvariantError,
    MissingDenseCoefficients,
    MissingExactSolution,
    NonFiniteState,
    ParseError,
    ShapeError,
    SingularIterationMatrix,
    SingularMatrix,
    StepUnderflow,
)
from .steppers import integrate_adaptive, integrate_fixed
from .problems import error_metrics

__all__ = ["main"]

_USAGE_ERRORS = (ParseError, ShapeError, InvariantError, FileNotFoundError, ValueError)
_NUMERICAL_ERRORS = (
    SingularMatrix,
    SingularIterationMatrix,
    NonFiniteState,
    StepUnderflow,
    InconsistentInitialState,
    MissingExactSolution,
    MissingDenseCoefficients,
)


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; this tool reserves 2 for
    # numerical failures, so usage problems exit 1 instead
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _fmt(x) -> str:
    if x is None:
        return ""
    return format(float(x), ".17g")


def _resolve_tableau(args):
    if getattr(args, "tableau", None):
        if getattr(args, "method", None):
            raise ValueError("--method and --tableau are mutually exclusive")
        return tableau.load_tableau(args.tableau), args.tableau
    name = getattr(args, "method", None) or "tsit5da"
    try:
        return tableau.BUILTIN[name](), name
    except KeyError:
        raise ValueError(
            f"unknown method {name!r}; built-ins: {', '.join(sorted(tableau.BUILTIN))}"
        ) from None


def _resolve_benchmark(args):
    name = getattr(args, "problem", None) or "prob1"
    if name not in problems.BENCHMARKS:
        raise ValueError(
            f"unknown problem {name!r}; choices: {', '.join(sorted(problems.BENCHMARKS))}"
        )
    kwargs = {}
    if name in ("parabolic", "hyperbolic") and getattr(args, "nx", None):
        kwargs["nx"] = args.nx
    if name == "pendulum" and getattr(args, "n", None):
        kwargs["n"] = args.n
    return problems.BENCHMARKS[name](**kwargs)


def _echo_config(out, args, fields):
    parts = [f"# rowdae {args.command}"]
    for key in fields:
        val = getattr(args, key.replace("-", "_"), None)
        if val is not None and val is not False:
            if val is True:
                parts.append(f"--{key}")
            else:
                parts.append(f"--{key} {val}")
    out.write(" ".join(parts) + "\n")


def _open_out(args):
    if getattr(args, "out", None):
        return open(args.out, "w"), True
    return sys.stdout, False


# ---------------------------------------------------------------------------
# commands


def cmd_order_test(args) -> int:
    tab, label = _resolve_tableau(args)
    bench = _resolve_benchmark(args)
    if bench.exact is None:
        raise ValueError(f"problem {bench.name!r} has no exact solution")
    _check_stiff_gate(args, tab, bench)
    t_end = args.tend if args.tend is not None else bench.t_end
    prob = bench.problem_for(tab)
    span = t_end - prob.t0
    h0 = args.h0 if args.h0 is not None else span / 16.0
    hs = [h0 / 2.0**k for k in range(args.levels)]

    rows = []
    for h in hs:
        err = error_metrics(
            integrate_fixed(prob, tab, h=h, t_end=t_end), bench
        ).endpoint
        err_emb = None
        if tab.bhat is not None:
            err_emb = error_metrics(
                integrate_fixed(prob, tab, h=h, t_end=t_end, use_embedded=True), bench
            ).endpoint
        rows.append((h, err, err_emb))

    out, close = _open_out(args)
    try:
        _echo_config(out, args, ("method", "tableau", "problem", "h0", "levels", "tend", "nx"))
        out.write("h,err_main,order_main,err_embedded,order_embedded\n")
        for i, (h, err, err_emb) in enumerate(rows):
            order = order_emb = None
            if i:
                prev = rows[i - 1]
                if err and prev[1]:
                    order = np.log2(prev[1] / err)
                if err_emb and prev[2]:
                    order_emb = np.log2(prev[2] / err_emb)
            out.write(
                f"{_fmt(h)},{_fmt(err)},{_fmt(order)},{_fmt(err_emb)},{_fmt(order_emb)}\n"
            )
    finally:
        if close:
            out.close()
    return 0


def _check_stiff_gate(args, tab, bench):
    if tab.kind == "half_explicit" and bench.stiff and not args.force:
        raise ValueError(
            f"benchmark {bench.name!r} is stiff; the explicit stages of "
            f"{tab.name or 'this method'} need tiny steps there. "
            "Pass --force to run anyway."
        )


def cmd_work_precision(args) -> int:
    tab, label = _resolve_tableau(args)
    bench = _resolve_benchmark(args)
    _check_stiff_gate(args, tab, bench)
    t_end = args.tend if args.tend is not None else bench.t_end
    prob = bench.problem_for(tab)
    tols = [float(t) for t in args.tols.split(",") if t.strip()]
    if not tols:
        raise ValueError("empty tolerance list")

    out, close = _open_out(args)
    try:
        _echo_config(out, args, ("method", "tableau", "problem", "tols", "tend", "nx", "n", "force"))
        out.write("rtol,err_l2,err_L2_interp,nsucc,nfail,nf,ng,njac,wall_seconds,status\n")
        for tol in tols:
            t0 = time.perf_counter()
            try:
                traj = integrate_adaptive(
                    prob, tab, rtol=tol, atol=tol, t_end=t_end, dense=tab.has_dense
                )
            except (StepUnderflow, SingularIterationMatrix, NonFiniteState) as exc:
                wall = time.perf_counter() - t0
                out.write(f"{_fmt(tol)},,,,,,,,{_fmt(wall)},failed: {exc.__class__.__name__}\n")
                continue
            wall = time.perf_counter() - t0
            m = error_metrics(traj, bench) if (bench.exact or bench.custom_error) else None
            s = traj.stats
            err_l2 = m.l2_steps if m else None
            err_li = m.l2_interp if m else None
            if err_l2 is None and m and m.custom is not None:
                err_l2 = m.custom
            out.write(
                f"{_fmt(tol)},{_fmt(err_l2)},{_fmt(err_li)},{s.nsucc},{s.nfail},"
                f"{s.nf + s.nf_jac},{s.ng + s.ng_jac},{s.njac},{_fmt(wall)},ok\n"
            )
    finally:
        if close:
            out.close()
    return 0


def cmd_pendulum(args) -> int:
    tab, label = _resolve_tableau(args)
    bench = problems.pendulum(n=args.n)
    prob = bench.problem_for(tab)
    rtol = args.rtol
    atol = args.atol if args.atol is not None else rtol
    t_end = args.tend if args.tend is not None else bench.t_end

    # trigger kernel compilation before the clock starts
    prob.f(prob.t0, prob.y0, prob.z0)
    prob.g(prob.t0, prob.y0, prob.z0)

    t0 = time.perf_counter()
    traj = integrate_adaptive(prob, tab, rtol=rtol, atol=atol, t_end=t_end)
    wall = time.perf_counter() - t0
    m = error_metrics(traj, bench)
    s = traj.stats

    out, close = _open_out(args)
    try:
        _echo_config(out, args, ("method", "tableau", "n", "rtol", "atol", "tend"))
        out.write("method,rtol,nsucc,nfail,nf,ng,err_length,wall_seconds\n")
        out.write(
            f"{label},{_fmt(rtol)},{s.nsucc},{s.nfail},{s.nf + s.nf_jac},"
            f"{s.ng + s.ng_jac},{_fmt(m.custom)},{_fmt(wall)}\n"
        )
    finally:
        if close:
            out.close()
    return 0


def cmd_verify_tableau(args) -> int:
    tab, label = _resolve_tableau(args)
    if tab.kind == "row":
        report = conditions.row_condition_residuals(tab)
        family = "classical linearly-implicit"
    else:
        report = conditions.half_explicit_condition_residuals(tab)
        family = "half-explicit"
    attained = report.attained_order()

    out, close = _open_out(args)
    try:
        out.write(f"# rowdae verify-tableau --{'tableau' if args.tableau else 'method'} {label}\n")
        out.write(f"tableau: {tab.name or label} (kind={tab.kind}, s={tab.s}, gamma={_fmt(tab.gamma)})\n")
        out.write(f"condition family: {family} ({len(report.conditions)} conditions)\n")
        out.write("main weights:\n")
        for p in sorted(report.max_by_order()):
            out.write(f"  order {p}: max residual {report.max_by_order()[p]:.3e}\n")
        out.write(f"  attained order: {attained}"
                  + (f" (declared {tab.order})" if tab.order else "") + "\n")
        out.write(f"stiffly accurate: {tableau.check_stiffly_accurate(tab)}\n")
        if tab.bhat is not None:
            emb = (
                conditions.row_condition_residuals(tab, weights=tab.bhat)
                if tab.kind == "row"
                else conditions.half_explicit_condition_residuals(tab, weights=tab.bhat)
            )
            out.write(
                f"embedded weights: attained order {emb.attained_order()} "
                f"(tree subset without w-factors: {emb.attained_order(ode_only=True)})\n"
            )
            out.write(f"embedded stiffly accurate: {tableau.check_stiffly_accurate(tab, embedded=True)}\n")
        simp = conditions.simplifying_residuals(tab)
        if simp.size:
            out.write(f"simplifying-assumption residuals: max {np.max(simp):.3e}\n")
        else:
            out.write("simplifying-assumption residuals: none (single stage)\n")
        out.write(f"|R(inf)|: {conditions.r_infinity(tab):.3e}\n")
    finally:
        if close:
            out.close()

    requested = args.order if args.order is not None else (tab.order or 1)
    return 0 if attained >= requested else 2


def cmd_stability(args) -> int:
    tab, label = _resolve_tableau(args)
    out, close = _open_out(args)
    try:
        _echo_config(out, args, ("method", "tableau"))
        out.write("y,abs_R\n")
        for y in np.logspace(-2, 6, 81):
            try:
                r = abs(conditions.stability_function(tab, 1j * y))
            except SingularMatrix:
                out.write(f"# singular iteration matrix at y = {_fmt(y)}, row skipped\n")
                continue
            out.write(f"{_fmt(y)},{_fmt(r)}\n")
        out.write(f"inf,{_fmt(conditions.r_infinity(tab))}\n")
    finally:
        if close:
            out.close()
    return 0


def cmd_reproduce(args) -> int:
    out, close = _open_out(args)
    try:
        ok = golden.reproduce_all(quick=args.quick, out=out)
    finally:
        if close:
            out.close()
    return 0 if ok else 2


# ---------------------------------------------------------------------------


def _build_parser() -> _Parser:
    p = _Parser(prog="rowdae", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--method", help="built-in method name (tsit5da, li-euler, ros2)")
        sp.add_argument("--tableau", help="path to a tableau file (alternative to --method)")
        sp.add_argument("--out", help="output path (default stdout)")

    sp = sub.add_parser("order-test", help="fixed-step convergence table")
    common(sp)
    sp.add_argument("--problem", default="prob1")
    sp.add_argument("--h0", type=float, help="coarsest step (default span/16)")
    sp.add_argument("--levels", type=int, default=5, help="number of halvings (default 5)")
    sp.add_argument("--tend", type=float)
    sp.add_argument("--nx", type=int, help="spatial points for the PDE problems")
    sp.add_argument("--force", action="store_true",
                    help="run explicit-stage methods on stiff benchmarks anyway")
    sp.set_defaults(func=cmd_order_test)

    sp = sub.add_parser("work-precision", help="adaptive tolerance sweep")
    common(sp)
    sp.add_argument("--problem", default="parabolic")
    sp.add_argument("--tols", default="1e-3,1e-4,1e-5,1e-6,1e-7,1e-8",
                    help="comma-separated rtol=atol list")
    sp.add_argument("--tend", type=float)
    sp.add_argument("--nx", type=int)
    sp.add_argument("--n", type=int, help="pendulum chain length")
    sp.add_argument("--force", action="store_true",
                    help="run explicit-stage methods on stiff benchmarks anyway")
    sp.set_defaults(func=cmd_work_precision)

    sp = sub.add_parser("pendulum", help="chain-pendulum statistics row")
    common(sp)
    sp.add_argument("--n", type=int, default=5)
    sp.add_argument("--rtol", type=float, default=1e-7)
    sp.add_argument("--atol", type=float, help="default: same as rtol")
    sp.add_argument("--tend", type=float)
    sp.set_defaults(func=cmd_pendulum)

    sp = sub.add_parser("verify-tableau", help="order-condition verification report")
    common(sp)
    sp.add_argument("--order", type=int,
                    help="required attained order for exit code 0 (default: declared order)")
    sp.set_defaults(func=cmd_verify_tableau)

    sp = sub.add_parser("stability", help="|R(iy)| scan along the imaginary axis")
    common(sp)
    sp.set_defaults(func=cmd_stability)

    sp = sub.add_parser("reproduce", help="regenerate and check the golden tables")
    sp.add_argument("--out", help="output path (default stdout)")
    sp.add_argument("--quick", action="store_true",
                    help="fast subset: first convergence table and tableau verification")
    sp.set_defaults(func=cmd_reproduce)
    return p


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _NUMERICAL_ERRORS as exc:
        print(f"rowdae {args.command}: {exc.__class__.__name__}: {exc}", file=sys.stderr)
        return 2
    except _USAGE_ERRORS as exc:
        print(f"rowdae {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
