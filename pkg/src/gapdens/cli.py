"""Command-line front end.

Subcommands: generate, profile, verify, table, probe.  Exit codes are a
stable contract: 0 success (and all checks passed), 1 at least one check
failed, 2 invalid input, 3 I/O failure.  Estimation diagnostics
(Inconclusive, Heuristic-Pass, Vacuous) are data, not errors.

The default precision comes from the GAPDENS_PRECISION environment
variable; a --config file of key=value lines overrides flags.
"""

from __future__ import annotations

import argparse
import os
import sys

from .errors import GapDensError
from .estimators import ProfileConfig, WindowPolicy, density_profile
from .families import (
    DEFAULT_STALL_WINDOW,
    FamilyKind,
    FamilySpec,
    FiniteSetReport,
    family_spec_from_tokens,
    generate,
)
from .numeric import DEFAULT_PRECISION_BITS
from .probe import ProbeThresholds, bracket_tau, partial_sums
from .report import (
    bracket_to_dict,
    finite_set_to_dict,
    profile_to_dict,
    render_pretty,
    suite_to_dict,
    sum_trace_to_dict,
    to_csv,
    to_json,
)
from .sequences import write_terms
from .table import run_table
from .verify import parse_manifest, run_check, run_manifest

ENV_PRECISION = "GAPDENS_PRECISION"

_FAMILY_PARAM_FLAGS = ("a", "alpha", "b", "k", "l", "t", "d", "coeffs", "c")


def _default_precision() -> int:
    value = os.environ.get(ENV_PRECISION)
    if value:
        try:
            return int(value)
        except ValueError:
            pass
    return DEFAULT_PRECISION_BITS


def _add_family_flags(sp, with_n=True):
    sp.add_argument("--family", choices=[k.value for k in FamilyKind if k is not FamilyKind.INTERLEAVE and k is not FamilyKind.FROM_FILE])
    sp.add_argument("--file", help="read the sequence from a file instead of a family")
    for flag in _FAMILY_PARAM_FLAGS:
        sp.add_argument(f"--{flag}", default=None)
    sp.add_argument("--stall-window", type=int, default=DEFAULT_STALL_WINDOW)
    if with_n:
        sp.add_argument("--n", type=int, default=None)


def _add_output_flags(sp):
    sp.add_argument("--format", choices=("json", "csv", "pretty"), default="pretty")
    sp.add_argument("--out", default=None, help="write output to this path (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="gapdens",
        description="gap and exponential-density invariants of integer sequences",
    )
    p.add_argument("--precision-bits", type=int, default=None)
    p.add_argument("--config", default=None, help="key=value file overriding flags")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("generate", help="emit a sequence prefix in the text format")
    _add_family_flags(sp)
    sp.add_argument("--out", default=None)

    sp = sub.add_parser("profile", help="density profile of a family or file")
    _add_family_flags(sp)
    sp.add_argument("--tail-fraction", type=float, default=0.5)
    _add_output_flags(sp)

    sp = sub.add_parser("verify", help="run theorem checks")
    _add_family_flags(sp)
    sp.add_argument("--check", choices=("sandwich", "interval", "rho-tau", "stolz", "analytic"))
    sp.add_argument("--manifest", help="file of '<check> <family> key=value...' lines")
    sp.add_argument("--tol", type=float, default=0.05)
    _add_output_flags(sp)

    sp = sub.add_parser("table", help="reproduce the reference gap-statistic table")
    sp.add_argument("--n", type=int, default=10**4)
    sp.add_argument("--union-n", type=int, default=60)
    _add_output_flags(sp)

    sp = sub.add_parser("probe", help="series convergence probe / exponent bracket")
    _add_family_flags(sp)
    sp.add_argument("--sigma", type=float, default=None)
    sp.add_argument("--bracket", nargs=2, type=float, metavar=("LO", "HI"))
    sp.add_argument("--steps", type=int, default=12)
    sp.add_argument("--conv-ratio", type=float, default=None)
    sp.add_argument("--div-ratio", type=float, default=None)
    _add_output_flags(sp)
    return p


def _apply_config(args: argparse.Namespace) -> None:
    """Apply key=value lines from --config; config values override flags."""
    if not args.config:
        return
    with open(args.config, "r", encoding="utf-8") as fp:
        for line in fp:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise GapDensError(f"malformed config line (expected key=value): {line!r}")
            key, value = line.split("=", 1)
            key = key.strip().replace("-", "_")
            value = value.strip()
            if not hasattr(args, key):
                raise GapDensError(f"config key {key!r} does not match any flag")
            current = getattr(args, key)
            if isinstance(current, bool):
                value = value.lower() in ("1", "true", "yes")
            elif isinstance(current, int):
                value = int(value)
            elif isinstance(current, float):
                value = float(value)
            elif current is None:
                for conv in (int, float):
                    try:
                        value = conv(value)
                        break
                    except ValueError:
                        continue
            setattr(args, key, value)


def _family_from_args(args) -> FamilySpec:
    if getattr(args, "file", None):
        return FamilySpec(
            kind=FamilyKind.FROM_FILE,
            n=args.n or 1,
            params={"path": args.file},
            precision_bits=args.precision_bits,
        )
    if not args.family:
        raise GapDensError("no input: give --family or --file")
    tokens = {"family": args.family}
    for flag in _FAMILY_PARAM_FLAGS:
        value = getattr(args, flag, None)
        if value is not None:
            tokens[flag] = value
    if args.family == "product" and args.stall_window != DEFAULT_STALL_WINDOW:
        tokens["stall_window"] = str(args.stall_window)
    if args.n is None:
        raise GapDensError("missing --n")
    tokens["n"] = str(args.n)
    tokens["precision_bits"] = str(args.precision_bits)
    return family_spec_from_tokens(tokens)


def _emit(args, doc: dict) -> None:
    if args.format == "json":
        text = to_json(doc) + "\n"
    elif args.format == "csv":
        text = to_csv(doc)
    else:
        text = render_pretty(doc)
    _write_out(getattr(args, "out", None), text)


def _write_out(path, text: str) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fp:
            fp.write(text)
    else:
        sys.stdout.write(text)


def cmd_generate(args) -> int:
    spec = _family_from_args(args)
    out = generate(spec)
    if isinstance(out, FiniteSetReport):
        _write_out(args.out, to_json(finite_set_to_dict(out)) + "\n")
        return 0
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fp:
            write_terms(out, fp)
    else:
        write_terms(out, sys.stdout)
    return 0


def cmd_profile(args) -> int:
    spec = _family_from_args(args)
    prefix = generate(spec)
    if isinstance(prefix, FiniteSetReport):
        raise GapDensError(
            "family produced a finite set report; profiles need a sequence prefix"
        )
    config = ProfileConfig(window=WindowPolicy(tail_fraction=args.tail_fraction))
    prof = density_profile(prefix, config)
    _emit(args, profile_to_dict(prof))
    return 0


def cmd_verify(args) -> int:
    if args.manifest:
        with open(args.manifest, "r", encoding="utf-8") as fp:
            rows = parse_manifest(fp.read())
        reports = run_manifest(rows)
    else:
        if not args.check:
            raise GapDensError("give --check or --manifest")
        prefix = None
        if args.check != "analytic":
            spec = _family_from_args(args)
            prefix = generate(spec)
            if isinstance(prefix, FiniteSetReport):
                raise GapDensError("checks need a sequence prefix, not a finite set")
        reports = [run_check(args.check, prefix, args.tol)]
    _emit(args, suite_to_dict(reports))
    return 1 if any(r.failed for r in reports) else 0


def cmd_table(args) -> int:
    doc = run_table(n=args.n, union_n=args.union_n, precision_bits=args.precision_bits)
    _emit(args, doc)
    return 0


def cmd_probe(args) -> int:
    spec = _family_from_args(args)
    prefix = generate(spec)
    if isinstance(prefix, FiniteSetReport):
        raise GapDensError("probes need a sequence prefix, not a finite set")
    if (args.sigma is None) == (args.bracket is None):
        raise GapDensError("give exactly one of --sigma or --bracket LO HI")
    thresholds = None
    if args.conv_ratio is not None or args.div_ratio is not None:
        base = ProbeThresholds()
        thresholds = ProbeThresholds(
            conv_ratio=args.conv_ratio if args.conv_ratio is not None else base.conv_ratio,
            div_ratio=args.div_ratio if args.div_ratio is not None else base.div_ratio,
        )
    if args.sigma is not None:
        trace = partial_sums(prefix, args.sigma, thresholds)
        _emit(args, sum_trace_to_dict(trace))
        return 0
    lo, hi = args.bracket
    bracket = bracket_tau(prefix, lo, hi, steps=args.steps, thresholds=thresholds)
    _emit(args, bracket_to_dict(bracket))
    return 0


_DISPATCH = {
    "generate": cmd_generate,
    "profile": cmd_profile,
    "verify": cmd_verify,
    "table": cmd_table,
    "probe": cmd_probe,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    try:
        _apply_config(args)
        if args.precision_bits is None:
            args.precision_bits = _default_precision()
        return _DISPATCH[args.command](args)
    except GapDensError as exc:
        print(f"gapdens: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"gapdens: i/o error: {exc}", file=sys.stderr)
        return 3


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
