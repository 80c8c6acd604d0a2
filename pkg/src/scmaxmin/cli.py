"""Command-line front end: sweeps, error tables and single simulations.

Every command writes CSV (header row, comma separated, reals in
scientific notation with 9 significant digits) to stdout or to --out.
Given identical flags, including --seed, reruns produce byte-identical
output.  Exit codes: 0 success, 2 usage error, 1 numerical failure.
"""

import argparse
import sys

from . import error as err
from .analytic import closed_form
from .circuits import smax_li, smax_novel, smax_yu
from .streams import StreamGenerator, mix64

__all__ = ["main", "build_parser"]

ARCHS = ("li", "yu", "novel")


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    return f"{value:.8e}"


def _write_csv(header, rows, out_path):
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    text = "\n".join(lines) + "\n"
    if out_path:
        with open(out_path, "w") as fp:
            fp.write(text)
    else:
        sys.stdout.write(text)


def _parse_range(text: str, cast=float):
    """start:stop:step, inclusive of stop within half a step; or one value."""
    parts = text.split(":")
    if len(parts) == 1:
        return [cast(parts[0])]
    if len(parts) != 3:
        raise ValueError(f"expected start:stop:step, got {text!r}")
    start, stop, step = (float(p) for p in parts)
    if step <= 0:
        raise ValueError("step must be positive")
    values = []
    k = 0
    while True:
        v = start + k * step
        if v > stop + step / 2:
            break
        values.append(cast(round(v, 12)))
        k += 1
    if not values:
        raise ValueError(f"empty range {text!r}")
    return values


def _parse_int_list(text: str):
    return [int(v) for v in text.split(",") if v]


def _quad_from_args(args) -> err.QuadratureConfig:
    return err.QuadratureConfig(scheme=args.scheme, resolution=args.quad_res)


def _simulate_rate(arch: str, a: float, b: float, m: int, n: int,
                   gen: StreamGenerator, slot: int) -> float:
    sa = gen.generate(a, n, sub_seed=mix64(slot, 0))
    sb = gen.generate(b, n, sub_seed=mix64(slot, 1))
    if arch == "li":
        sel = gen.generate(0.5, n, sub_seed=mix64(slot, 2))
        out = smax_li(sa, sb, sel, m)
    elif arch == "yu":
        out = smax_yu(sa, sb, m)
    else:
        out = smax_novel(sa, sb, m - 1).output
    return out.ones() / n


def _cmd_curve(args) -> None:
    b_values = args.b
    m_values = args.m
    gen = StreamGenerator(args.seed)
    header = ["b", "max_ab"]
    for m in m_values:
        header.append(f"c_closed_m{m}")
    for m in m_values:
        header.append(f"rate_sim_m{m}")
    rows = []
    for k, b in enumerate(b_values):
        row = [b, max(args.a, b)]
        for m in m_values:
            row.append(float(closed_form(args.arch, args.a, b, m)))
        for j, m in enumerate(m_values):
            row.append(
                _simulate_rate(args.arch, args.a, b, m, args.n, gen,
                               slot=k * len(m_values) + j)
            )
        rows.append(row)
    _write_csv(header, rows, args.out)


def _cmd_abs_error(args) -> None:
    quad = _quad_from_args(args)
    m_values = args.m
    rows = []
    for m in m_values:
        rows.append(
            [
                m,
                err.expected_abs_error("li", m, quad),
                err.expected_abs_error("yu", m, quad),
                err.expected_abs_error("novel", m, quad),
            ]
        )
    _write_csv(["m", "e_li", "e_yu", "e_novel"], rows, args.out)


def _cmd_error_vs_length(args) -> None:
    quad = _quad_from_args(args)
    n_values = args.n
    l_values = args.l
    header = ["l", "lower_bound"]
    for n in n_values:
        header.append(f"analytic_n{n}")
    if args.trials:
        for n in n_values:
            header.append(f"empirical_mean_n{n}")
            header.append(f"empirical_se_n{n}")
    rows = []
    for l in l_values:
        row = [l, err.lower_bound(l + 1, quad)]
        for n in n_values:
            row.append(err.expected_error_probability(l + 1, n, quad))
        if args.trials:
            for n in n_values:
                mc = err.monte_carlo_error(
                    n, l, trials=args.trials, master_seed=mix64(args.seed, n, l)
                )
                row.append(mc.mean)
                row.append(mc.std_error)
        rows.append(row)
    _write_csv(header, rows, args.out)


def _cmd_optimal_length(args) -> None:
    quad = _quad_from_args(args)
    rows = []
    for n in args.n:
        l_opt, report = err.optimal_length(n, args.l, quad)
        best = next(r for r in report.rows if r.l == l_opt)
        rows.append([n, l_opt, best.analytic])
    _write_csv(["n", "l_opt", "min_error"], rows, args.out)


def _cmd_simulate(args) -> None:
    if args.arch == "novel":
        m = args.l + 1 if args.l else args.m
        if m is None or m < 2:
            raise ValueError("give --l (or --m = L + 1) for the novel circuit")
        l = m - 1
    else:
        if args.m is None:
            raise ValueError("give --m for li/yu")
        m = args.m
        l = None
    gen = StreamGenerator(args.seed)
    sa = gen.generate(args.a, args.n, sub_seed=mix64(0, 0))
    sb = gen.generate(args.b, args.n, sub_seed=mix64(0, 1))
    header = ["rate_a", "rate_b", "rate_c", "o_r", "o_l", "o_s", "residual"]
    if args.arch == "novel":
        run = smax_novel(sa, sb, l)
        residual = run.output.ones() - (sb.ones() + run.o_r)
        row = [
            float(sa.rate()),
            float(sb.rate()),
            float(run.output.rate()),
            run.o_r,
            run.o_l,
            run.o_s,
            residual,
        ]
    else:
        if args.arch == "li":
            sel = gen.generate(0.5, args.n, sub_seed=mix64(0, 2))
            out = smax_li(sa, sb, sel, m)
        else:
            out = smax_yu(sa, sb, m)
        row = [
            float(sa.rate()),
            float(sb.rate()),
            float(out.rate()),
            None,
            None,
            None,
            None,
        ]
    _write_csv(header, [row], args.out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scmaxmin",
        description="Stochastic max/min circuits: sweeps, error tables, simulations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--seed", type=int, default=1, help="master seed")
        p.add_argument("--out", default=None, help="output CSV path (default stdout)")

    def add_quad(p):
        p.add_argument("--quad-res", type=int, default=512,
                       help="quadrature nodes per axis")
        p.add_argument("--scheme", choices=err.SCHEMES, default="midpoint-grid")

    p = sub.add_parser("curve", help="closed form and simulated rate over b")
    p.add_argument("--arch", choices=ARCHS, required=True)
    p.add_argument("--a", type=float, default=0.5, help="fixed first input")
    p.add_argument("--b", required=True, help="b range start:stop:step")
    p.add_argument("--m", type=_parse_int_list, required=True,
                   help="comma-separated state counts")
    p.add_argument("--n", type=int, default=1_000_000, help="stream length")
    add_common(p)
    p.set_defaults(func=_cmd_curve)

    p = sub.add_parser("abs-error", help="expected absolute error versus states")
    p.add_argument("--m", type=lambda s: _parse_range(s, int), default="2:50:1",
                   help="state range start:stop:step")
    add_quad(p)
    add_common(p)
    p.set_defaults(func=_cmd_abs_error)

    p = sub.add_parser("error-vs-length",
                       help="expected error probability versus register length")
    p.add_argument("--n", type=_parse_int_list, required=True,
                   help="comma-separated stream lengths")
    p.add_argument("--l", type=lambda s: _parse_range(s, int), default="1:50:1",
                   help="length range start:stop:step")
    p.add_argument("--trials", type=int, default=0,
                   help="add empirical columns with this many trials per point")
    add_quad(p)
    add_common(p)
    p.set_defaults(func=_cmd_error_vs_length)

    p = sub.add_parser("optimal-length", help="best register length per stream length")
    p.add_argument("--n", type=_parse_int_list, required=True)
    p.add_argument("--l", type=lambda s: _parse_range(s, int), default="1:50:1")
    add_quad(p)
    add_common(p)
    p.set_defaults(func=_cmd_optimal_length)

    p = sub.add_parser("simulate", help="one circuit run with event counters")
    p.add_argument("--arch", choices=ARCHS, required=True)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--m", type=int, default=None, help="state count (li/yu)")
    p.add_argument("--l", type=int, default=None, help="register length (novel)")
    p.add_argument("--n", type=int, default=10_000, help="stream length")
    add_common(p)
    p.set_defaults(func=_cmd_simulate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except ValueError as exc:  # bad range literals raised by type= callables
        parser.exit(2, f"error: {exc}\n")
    try:
        args.func(args)
    except (err.QuadratureError, ValueError, FloatingPointError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
