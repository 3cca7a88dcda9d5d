"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 IO/format error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import sys

import numpy as np

from .algorithms import METHODS, DecomposeConfig, decompose, rel_error_exact
from .linalg import NumericalError
from .synth import SynthSpec, generate
from .tensor_io import (
    DtenError,
    RawLengthError,
    import_raw,
    read_dten,
    read_model,
    write_dten,
    write_model,
    write_trace_csv,
)

EXIT_USAGE, EXIT_IO, EXIT_NUMERIC = 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    try:
        vals = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not vals or any(v < 1 for v in vals):
        raise argparse.ArgumentTypeError(f"expected positive integers, got {text!r}")
    return vals


def _eps_inner(text: str) -> float | None:
    if text == "auto":
        return None
    return float(text)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tucker-rpcd", description="Tucker decomposition toolkit")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("synth", help="generate a synthetic tensor")
    s.add_argument("--dims", type=_int_list, required=True)
    s.add_argument("--ranks", type=_int_list, required=True)
    s.add_argument("--kind", choices=("lowrank", "noisy"), default="lowrank")
    s.add_argument("--noise", type=float, default=0.1)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("-o", "--output", required=True)

    d = sub.add_parser("decompose", help="run a decomposition method")
    d.add_argument("--input", required=True)
    d.add_argument("--ranks", type=_int_list, required=True)
    d.add_argument("--method", choices=METHODS, default="rpcd-plus")
    d.add_argument("--step", type=float, default=None)
    d.add_argument("--eps", type=float, default=1e-3)
    d.add_argument("--eps-inner", type=_eps_inner, default=None)
    d.add_argument("--max-iter", type=int, default=100)
    d.add_argument("--max-inner", type=int, default=50)
    d.add_argument("--init", choices=("eye", "random", "hosvd"), default="random")
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--grad-variant", choices=("literal", "metric"), default="literal")
    d.add_argument("--trace")
    d.add_argument("--out-dir")

    i = sub.add_parser("info", help="print dims, order and norm of a tensor")
    i.add_argument("--input", required=True)

    e = sub.add_parser("error", help="relative error of a stored model")
    e.add_argument("--input", required=True)
    e.add_argument("--model", required=True)

    c = sub.add_parser("convert", help="wrap a raw float64 payload as DTEN")
    c.add_argument("--raw", required=True)
    c.add_argument("--dims", type=_int_list, required=True)
    c.add_argument("-o", "--output", required=True)

    b = sub.add_parser("bench", help="average timings over seeded instances")
    b.add_argument("--dims", type=_int_list, required=True)
    b.add_argument("--ranks", type=_int_list, required=True)
    b.add_argument("--methods", default="rpcd-plus,hooi")
    b.add_argument("--kind", choices=("lowrank", "noisy"), default="lowrank")
    b.add_argument("--noise", type=float, default=0.1)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--repeat", type=int, default=5)
    b.add_argument("--eps", type=float, default=1e-3)
    b.add_argument("--init", choices=("eye", "random", "hosvd"), default="random")
    b.add_argument("-o", "--output", required=True)
    return p


def _config(args, ranks, method) -> DecomposeConfig:
    try:
        return DecomposeConfig(
            ranks=ranks,
            method=method,
            alpha=getattr(args, "step", None),
            eps=args.eps,
            eps_inner=getattr(args, "eps_inner", None),
            max_iter=getattr(args, "max_iter", 100),
            max_inner=getattr(args, "max_inner", 50),
            init=args.init,
            seed=args.seed,
            grad_variant=getattr(args, "grad_variant", "literal"),
        )
    except ValueError as exc:
        raise UsageError(str(exc))


def _check_ranks(dims, ranks) -> None:
    if len(dims) != len(ranks):
        raise UsageError(f"{len(ranks)} ranks given for an order-{len(dims)} tensor")
    if any(r > n for n, r in zip(dims, ranks)):
        raise UsageError(f"ranks {tuple(ranks)} exceed dims {tuple(dims)}")


def _synth_spec(args, seed) -> SynthSpec:
    _check_ranks(args.dims, args.ranks)
    try:
        return SynthSpec(args.dims, args.ranks, args.kind, args.noise, seed)
    except ValueError as exc:
        raise UsageError(str(exc))


def cmd_synth(args) -> int:
    t = generate(_synth_spec(args, args.seed))
    write_dten(args.output, t)
    print(f"dims={','.join(map(str, t.dims))} norm={t.norm():.17g}")
    return 0


def cmd_decompose(args) -> int:
    x = read_dten(args.input)
    _check_ranks(x.dims, args.ranks)
    cfg = _config(args, args.ranks, args.method)
    model, trace = decompose(x, cfg)
    if args.trace:
        write_trace_csv(args.trace, trace)
    if args.out_dir:
        write_model(args.out_dir, model)
    print(
        f"final_rel_err={trace.final_rel_err:.17g} iters={trace.iterations} "
        f"elapsed_s={trace.elapsed_s:.6f}"
    )
    return 0


def cmd_info(args) -> int:
    t = read_dten(args.input)
    print(f"order={t.order} dims={','.join(map(str, t.dims))} norm={t.norm():.17g}")
    return 0


def cmd_error(args) -> int:
    x = read_dten(args.input)
    model = read_model(args.model)
    if model.dims != x.dims:
        raise UsageError(f"model dims {model.dims} do not match tensor dims {x.dims}")
    print(f"rel_err={rel_error_exact(x, model):.17g}")
    return 0


def cmd_convert(args) -> int:
    t = import_raw(args.raw, args.dims)
    write_dten(args.output, t)
    print(f"dims={','.join(map(str, t.dims))} norm={t.norm():.17g}")
    return 0


def cmd_bench(args) -> int:
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    bad = [m for m in methods if m not in METHODS]
    if bad or not methods:
        raise UsageError(f"unknown methods {bad}; choose from {METHODS}")
    if args.repeat < 1:
        raise UsageError("--repeat must be >= 1")
    configs = {m: _config(args, args.ranks, m) for m in methods}
    specs = [_synth_spec(args, args.seed + k) for k in range(args.repeat)]
    times = {m: [] for m in methods}
    errs = {m: [] for m in methods}
    for spec in specs:
        x = generate(spec)
        for m in methods:
            _, trace = decompose(x, configs[m])
            times[m].append(trace.elapsed_s)
            errs[m].append(trace.final_rel_err)
    with open(args.output, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("method", "mean_elapsed_s", "mean_rel_err", "repeats"))
        for m in methods:
            row = (m, f"{np.mean(times[m]):.17g}", f"{np.mean(errs[m]):.17g}", args.repeat)
            w.writerow(row)
            print(f"method={m} mean_elapsed_s={row[1]} mean_rel_err={row[2]} repeats={args.repeat}")
    return 0


COMMANDS = {
    "synth": cmd_synth,
    "decompose": cmd_decompose,
    "info": cmd_info,
    "error": cmd_error,
    "convert": cmd_convert,
    "bench": cmd_bench,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, DtenError, RawLengthError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (NumericalError, ArithmeticError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        # non-finite raw values and similar content problems
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
