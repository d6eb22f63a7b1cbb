"""Command-line front end.

Exit status:
    0  success
    1  a ``--check`` membership test came out false
    2  mathematically refused (no remnant, not in S_l)
    3  length cap or enumeration budget exceeded
    4  bad input (unparsable map, invalid options)
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import warnings
from typing import Sequence, TextIO

from freemaps import density, dynamics, periodic, remnant
from freemaps.errors import BudgetExceeded, CapExceeded, DomainError, NoRemnant, NotInSl, ParseError
from freemaps.parsing import format_endomorphism, parse_endomorphism, to_structured
from freemaps.words import DEFAULT_LENGTH_CAP, Endomorphism, iterate

SCHEMA = "freemaps/1"

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_REFUSED = 2
EXIT_RESOURCE = 3
EXIT_INPUT = 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="freemaps", description="Nielsen-theoretic invariants of free group endomorphisms.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def with_threads(p: argparse.ArgumentParser) -> None:
        p.add_argument("--threads", type=_positive_int, default=None, help="worker processes (default: $NIELSEN_THREADS or 1)")

    def with_map(p: argparse.ArgumentParser) -> None:
        p.add_argument("--map", required=True, help="map as 'a->abA; b->ba', a JSON object, or a file containing either")
        p.add_argument("--auto-reduce", action="store_true", help="reduce unreduced images (with a warning) instead of failing")
        p.add_argument("--format", choices=("table", "csv", "json"), default="table")

    p = sub.add_parser("remnant", help="remnant spans and R_k / S_l membership")
    with_map(p)
    p.add_argument("--check", help="Sl=<l> or Rk=<k>; exit status 1 when the map is not a member")

    p = sub.add_parser("nielsen", help="Nielsen number of a power via Wagner's algorithm")
    with_map(p)
    p.add_argument("--power", type=_positive_int, default=1)
    p.add_argument("--upto", action="store_true", help="one row for every power 1..n")
    with_threads(p)
    p.add_argument("--length-cap", type=_positive_int, default=DEFAULT_LENGTH_CAP)
    p.add_argument("--no-timing", action="store_true", help="omit elapsed times (bit-stable output)")

    p = sub.add_parser("dynamics", help="Nielsen sequence, growth and entropy bounds")
    with_map(p)
    with_threads(p)
    p.add_argument("--n-max", type=_positive_int, default=5)
    p.add_argument("--l", type=_positive_int, default=None, help="S_l level for the lower bounds (default: largest valid)")
    p.add_argument("--length-cap", type=_positive_int, default=DEFAULT_LENGTH_CAP)
    p.add_argument("--tol", type=float, default=dynamics.DEFAULT_TOL)
    p.add_argument("--csv", action="store_true", help="shorthand for --format csv")

    p = sub.add_parser("periodic", help="addresses, labels and minimal periods")
    with_map(p)
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--list", action="store_true", help="list every labelled fixed point")
    p.add_argument("--census", action="store_true", help="count round trips by minimal period")
    p.add_argument("--certified", type=_positive_int, metavar="L", help="count the minimal-period-n construction for S_L")
    p.add_argument("--budget", type=_positive_int, default=periodic.DEFAULT_BUDGET)

    p = sub.add_parser("density", help="exact or Monte Carlo densities")
    p.add_argument("--predicate", required=True, help="remnant, Rk=<k>, Sl=<l>, true or false")
    with_threads(p)
    p.add_argument("--m", type=_positive_int, required=True)
    p.add_argument("--p", type=_int_list, required=True, help="radius or comma-separated radii")
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--exact", action="store_true", help="enumerate the whole ball instead of sampling")
    p.add_argument("--budget", type=_positive_int, default=density.DEFAULT_EXACT_BUDGET)
    p.add_argument("--csv", metavar="PATH", help="also write the rows to this CSV file")
    p.add_argument("--format", choices=("table", "csv", "json"), default="table")
    return parser


def load_map(source: str, auto_reduce: bool = False) -> Endomorphism:
    if os.path.isfile(source):
        with open(source, encoding="utf-8") as fh:
            source = fh.read()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        phi = parse_endomorphism(source, auto_reduce=auto_reduce)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    return phi


def _threads(args) -> int:
    if getattr(args, "threads", None) is not None:
        return args.threads
    env = os.environ.get("NIELSEN_THREADS", "")
    return int(env) if env.isdigit() and int(env) > 0 else 1


def _fmt(x) -> str:
    if x is None:
        return "-"
    if isinstance(x, float):
        return f"{x:.6f}"
    return str(x)


def _table(header: Sequence[str], rows: Sequence[Sequence], out: TextIO) -> None:
    cells = [[_fmt(c) for c in r] for r in rows]
    widths = [max([len(h)] + [len(r[k]) for r in cells]) for k, h in enumerate(header)]
    out.write("  ".join(h.rjust(w) for h, w in zip(header, widths)).rstrip() + "\n")
    for r in cells:
        out.write("  ".join(c.rjust(w) for c, w in zip(r, widths)).rstrip() + "\n")


def _csv(header: Sequence[str], rows: Sequence[Sequence], out: TextIO) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    writer.writerows([["" if c is None else c for c in r] for r in rows])


def _json(payload: dict, out: TextIO) -> None:
    out.write(json.dumps({"schema": SCHEMA, **payload}, indent=2, sort_keys=True) + "\n")


def _emit(fmt: str, header, rows, payload: dict, out: TextIO) -> None:
    if fmt == "json":
        _json(payload, out)
    elif fmt == "csv":
        _csv(header, rows, out)
    else:
        _table(header, rows, out)


def cmd_remnant(args, out: TextIO) -> int:
    phi = load_map(args.map, args.auto_reduce)
    rd = remnant.remnant_decomposition(phi)
    level = remnant.sl_level(phi, rd)
    rows = []
    for i in range(1, phi.rank + 1):
        span = rd.span(i)
        rows.append([i, str(phi.image(i)), None if span is None else f"{span[0]}..{span[1]}", None if span is None else str(rd.remnant(i))])
    payload = {
        "command": "remnant",
        "map": to_structured(phi),
        "map_text": format_endomorphism(phi),
        "spans": [None if s is None else list(s) for s in rd.spans],
        "remnants": [None if w is None else str(w) for w in rd.remnants()],
        "has_remnant": rd.has_remnant,
        "remnant_lengths": list(rd.lengths()),
        "sl_level": level,
    }
    status = EXIT_OK
    if args.check:
        kind, _, value = args.check.partition("=")
        if kind not in ("Sl", "Rk") or not value.isdigit() or int(value) < 1:
            raise UsageError(f"--check expects Sl=<l> or Rk=<k>, got {args.check!r}")
        member = remnant.in_sl(phi, int(value), rd) if kind == "Sl" else remnant.in_rk(phi, int(value), rd)
        payload["check"] = {"set": args.check, "member": member}
        status = EXIT_OK if member else EXIT_CHECK_FAILED
    _emit(args.format, ["generator", "image", "span", "remnant"], rows, payload, out)
    if args.format == "table":
        out.write(f"has remnant: {rd.has_remnant}; largest l with map in S_l: {level}\n")
        if args.check:
            out.write(f"{args.check}: {'member' if status == EXIT_OK else 'not a member'}\n")
    return status


def cmd_nielsen(args, out: TextIO) -> int:
    phi = load_map(args.map, args.auto_reduce)
    if args.upto:
        seq = dynamics.nielsen_sequence(phi, args.power, args.length_cap, _threads(args))
        if seq.stopped_at is not None:
            raise CapExceeded(seq.reason, power=seq.stopped_at)
        rows_data = seq.rows
    else:
        power = iterate(phi, args.power, args.length_cap)
        if not remnant.has_remnant(power):
            raise NoRemnant(f"power {args.power} of {phi} does not have remnant")
        rows_data = [dynamics.nielsen_row(args.power, power)]
    header = ["n", "N", "wCount", "isolated", "lefschetz"] + ([] if args.no_timing else ["elapsed_s"])
    rows = []
    for r in rows_data:
        rows.append([r.n, r.nielsen, r.w_count, r.isolated, r.lefschetz] + ([] if args.no_timing else [round(r.elapsed, 6)]))
    payload = {
        "command": "nielsen",
        "map": to_structured(phi),
        "map_text": format_endomorphism(phi),
        "rows": [dict(zip(header, r)) for r in rows],
    }
    _emit(args.format, header, rows, payload, out)
    return EXIT_OK


def cmd_dynamics(args, out: TextIO) -> int:
    phi = load_map(args.map, args.auto_reduce)
    fmt = "csv" if args.csv else args.format
    seq = dynamics.nielsen_sequence(phi, args.n_max, args.length_cap, _threads(args))
    bounds = dynamics.asymptotic_bounds(phi, args.l, tol=args.tol)
    n_done = len(seq.rows)
    entropy = dynamics.entropy_estimates(phi, n_done, args.length_cap, args.l)
    header = ["n", "N", "N^(1/n)", "L_n", "log(L_n)/n"]
    rows = [[r.n, r.nielsen, r.root, L, rate] for r, L, rate in zip(seq.rows, entropy.lengths, entropy.rates)]
    rho = bounds.spectral
    block = {
        "l": args.l if args.l is not None else bounds.level,
        "sl_level": bounds.level,
        "lower_bound": bounds.lower,
        "upper_bound": bounds.upper,
        "upper_bound_note": "Jiang upper bound (as cited)",
        "spectral_radius": rho.value,
        "spectral_bracket": [rho.lower, rho.upper],
        "fox_magnitude_matrix": dynamics.fox_magnitude_matrix(phi).tolist(),
        "entropy_estimate": entropy.estimate,
        "entropy_lower_bound": entropy.lower_bound,
        "stopped_at": seq.stopped_at,
    }
    payload = {"command": "dynamics", "map": to_structured(phi), "map_text": format_endomorphism(phi), "rows": [dict(zip(header, r)) for r in rows], "bounds": block}
    _emit(fmt, header, rows, payload, out)
    if fmt == "table":
        out.write("\n")
        lower = "refused (" + bounds.note + ")" if bounds.lower is None else _fmt(bounds.lower)
        out.write(f"asymptotic Nielsen number: lower {lower}, upper {_fmt(bounds.upper)} (Jiang upper bound, as cited)\n")
        out.write(f"spectral radius of |Fox Jacobian|: {_fmt(rho.value)} in [{rho.lower:.12g}, {rho.upper:.12g}]\n")
        lb = "-" if entropy.lower_bound is None else _fmt(entropy.lower_bound)
        out.write(f"fundamental group entropy: estimate {_fmt(entropy.estimate)}, certified lower bound {lb}\n")
        if seq.stopped_at is not None:
            out.write(f"stopped at n={seq.stopped_at}: {seq.reason}\n")
    return EXIT_OK if seq.stopped_at is None else EXIT_RESOURCE


def cmd_periodic(args, out: TextIO) -> int:
    phi = load_map(args.map, args.auto_reduce)
    n = args.n
    total = periodic.fixed_point_count(phi, n)
    payload: dict = {"command": "periodic", "map": to_structured(phi), "map_text": format_endomorphism(phi), "n": n, "fixed_points": total}
    lines = [f"fixed points of phi^{n} (base point included): {total}"]
    header, rows = ["label", "address", "minimal_period", "orbit"], []
    if args.list:
        records = periodic.label_fixed_points(phi, n, args.budget)
        for rec in records:
            rows.append([rec.name(n), " ".join(map(str, rec.address)) or "base", rec.minimal_period, " ".join(f"{k}_{n}" for k in rec.orbit)])
        payload["points"] = [
            {"label": r.label, "address": list(r.address), "minimal_period": r.minimal_period, "orbit": list(r.orbit)} for r in records
        ]
    if args.census:
        census = periodic.minimal_period_census(phi, n, args.budget)
        payload["census"] = {str(d): c for d, c in census.items()}
        lines.append("minimal period census: " + ", ".join(f"{d}: {c}" for d, c in census.items()))
        lines.append(f"total including base point: {1 + sum(census.values())}")
    if args.certified:
        count = periodic.certified_minimal_points(phi, args.certified, n) if n >= 2 else None
        bound = dynamics.closed_form_bounds(args.certified, phi.rank, n).pn_bound if n >= 2 else None
        payload["certified"] = {"l": args.certified, "count": count, "pn_bound": bound}
        lines.append(f"certified minimal-period-{n} points (S_{args.certified}): {_fmt(count)}, closed-form bound {_fmt(bound)}")

    if args.format == "json":
        _json(payload, out)
        return EXIT_OK
    if rows:
        (_csv if args.format == "csv" else _table)(header, rows, out)
    if args.format == "table" or not rows:
        for line in lines:
            out.write(line + "\n")
    return EXIT_OK


def cmd_density(args, out: TextIO) -> int:
    pred = density.parse_predicate(args.predicate)
    header = list(density.CSV_COLUMNS)
    rows = []
    if args.exact:
        values = []
        for p in args.p:
            v = density.exact_density(pred, args.m, p, args.budget)
            values.append({"m": args.m, "p": p, "predicate": pred.name, "exact": f"{v.numerator}/{v.denominator}", "value": float(v)})
        if args.format == "json":
            _json({"command": "density", "exact": True, "rows": values}, out)
        else:
            hdr = ["m", "p", "predicate", "exact", "value"]
            (_csv if args.format == "csv" else _table)(hdr, [[r[h] for h in hdr] for r in values], out)
        return EXIT_OK
    if args.seed is None:
        raise UsageError("--seed is required for sampled densities")
    if args.samples < 1:
        raise UsageError("--samples must be positive unless --exact is given")
    estimates = density.density_curve(pred, args.m, args.p, args.samples, args.seed, _threads(args))
    rows = [[getattr(e, h) for h in header] for e in estimates]
    if args.csv:
        with open(args.csv, "w", newline="", encoding="utf-8") as fh:
            _csv(header, rows, fh)
    payload = {"command": "density", "exact": False, "chunk_size": density.CHUNK_SIZE, "rows": [e.as_row() for e in estimates]}
    _emit(args.format, header, rows, payload, out)
    return EXIT_OK


COMMANDS = {
    "remnant": cmd_remnant,
    "nielsen": cmd_nielsen,
    "dynamics": cmd_dynamics,
    "periodic": cmd_periodic,
    "density": cmd_density,
}


def run(args: argparse.Namespace, out: TextIO | None = None) -> int:
    out = out or sys.stdout
    try:
        return COMMANDS[args.command](args, out)
    except (NoRemnant, NotInSl) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    except (CapExceeded, BudgetExceeded) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (ParseError, DomainError, UsageError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return run(args)


def run_to_string(argv: Sequence[str]) -> tuple[int, str]:
    """Run the CLI and capture stdout; used by tests and notebooks."""
    buf = io.StringIO()
    status = run(build_parser().parse_args(argv), buf)
    return status, buf.getvalue()


if __name__ == "__main__":
    sys.exit(main())
