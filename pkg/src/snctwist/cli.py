"""Command-line interface.

Exit codes: 0 success, 1 mathematical negative (not semistable, degenerate
interval, failed check), 2 precondition failure (non-tree graph, outside the
hypotheses of the enumeration), 3 malformed input.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from .errors import ConfigError, PreconditionError
from .exactnum import RootBox, eventual_sign, format_rational
from .sncmodel import (
    Configuration,
    curve_builder,
    curve_genus,
    emit_config,
    load_config,
    synth_generator,
    validate,
)

EXIT_OK, EXIT_NEGATIVE, EXIT_PRECONDITION, EXIT_MALFORMED = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_MALFORMED, f"{self.prog}: error: {message}\n")


class _Out:
    """Collects a report and prints it as text lines or one JSON document."""

    def __init__(self, fmt: str, stream):
        self.fmt = fmt
        self.stream = stream
        self.lines: list[str] = []
        self.record: dict = {}

    def line(self, text: str = "") -> None:
        self.lines.append(text)

    def put(self, **kv) -> None:
        self.record.update(kv)

    def flush(self, code: int) -> int:
        if self.fmt == "machine":
            self.record.setdefault("exit_code", code)
            self.stream.write(json.dumps(self.record, indent=2, sort_keys=True) + "\n")
        else:
            for ln in self.lines:
                self.stream.write(ln + "\n")
        return code


def _add_common(p: argparse.ArgumentParser, needs_config: bool = True) -> None:
    if needs_config:
        p.add_argument("config", help="configuration file (JSON)")
    p.add_argument("--format", choices=("text", "machine"), default="text", help="output format")


def _add_bundle(p: argparse.ArgumentParser, mode: bool = True) -> None:
    p.add_argument("--bundle", default="L", help="line bundle class, e.g. 'L' or 'L+2*Y1-K' (default L)")
    p.add_argument("--polarization", default=None, help="polarization class H (default: the canonical class)")
    if mode:
        p.add_argument("--mode", choices=("minus", "plus"), default="minus")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="snctwist", description="Exact stability and twist computations on SNC fibers.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("validate", help="run the model checks on a configuration")
    _add_common(p)

    p = sub.add_parser("e", help="evaluate the defect e_Y")
    _add_common(p)
    _add_bundle(p, mode=False)
    p.add_argument("--union", required=True, help="comma-separated component names forming Y")

    p = sub.add_parser("check", help="decide semistability")
    _add_common(p)
    _add_bundle(p)
    p.add_argument("--scope", choices=("pairs", "all"), default="pairs")

    p = sub.add_parser("interval", help="twistable interval for a union and its complement")
    _add_common(p)
    _add_bundle(p)
    p.add_argument("--union", required=True, help="comma-separated component names forming Y")

    p = sub.add_parser("enumerate", help="all semistable twists (tree dual graphs)")
    _add_common(p)
    _add_bundle(p)
    p.add_argument("--trace", action="store_true", help="include the branching trace")

    p = sub.add_parser("oracle", help="cross-check the engine against independent computations")
    _add_common(p)
    _add_bundle(p)
    p.add_argument("--window", type=int, default=10, help="brute-force window W (default 10)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=100)

    p = sub.add_parser("gen", help="generate a configuration file")
    gsub = p.add_subparsers(dest="kind", required=True, parser_class=_Parser)
    g = gsub.add_parser("curve", help="nodal curve from genera and node counts")
    _add_common(g, needs_config=False)
    g.add_argument("--genera", required=True, help="comma-separated genera, e.g. 2,1")
    g.add_argument("--edges", default="", help="edges 'i-j:nodes' (0-based), comma-separated, e.g. 0-1:1")
    g.add_argument("--deg", action="append", default=[], help="bundle multidegree, e.g. L=3,2 (repeatable)")
    g.add_argument("--out", default=None, help="output path (default stdout)")
    g = gsub.add_parser("synth", help="formal fixture of any dimension over a tree")
    _add_common(g, needs_config=False)
    g.add_argument("--dim", type=int, required=True)
    g.add_argument("--tree", required=True, help="tree edges 'i-j' (0-based), comma-separated")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", default=None, help="output path (default stdout)")
    return parser


# ---------------------------------------------------------------------------
# helpers


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise ConfigError(f"expected comma-separated integers, got {text!r}") from exc


def _parse_edges(text: str) -> list[tuple[int, int, int]]:
    out = []
    for item in filter(None, (s.strip() for s in text.split(","))):
        try:
            pair, _, k = item.partition(":")
            i, j = pair.split("-")
            out.append((int(i), int(j), int(k) if k else 1))
        except ValueError as exc:
            raise ConfigError(f"bad edge {item!r}; expected i-j or i-j:nodes") from exc
    return out


def _parse_degrees(items: Sequence[str]) -> dict[str, list[int]]:
    out = {}
    for item in items:
        name, eq, vec = item.partition("=")
        if not eq or not name:
            raise ConfigError(f"bad degree spec {item!r}; expected NAME=d1,d2,...")
        out[name.strip()] = _int_list(vec)
    return out


def _load(path: str) -> Configuration:
    try:
        cfg = load_config(path)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    cfg.require_valid()
    return cfg


def _classes(cfg: Configuration, args):
    L = cfg.parse_class(args.bundle)
    if args.polarization is None:
        if cfg.canonical is None:
            raise ConfigError("no --polarization given and no canonical class designated")
        H = cfg.bundle_class(cfg.canonical)
    else:
        H = cfg.parse_class(args.polarization)
    return L, H


def _union(cfg: Configuration, text: str) -> frozenset:
    names = [s.strip() for s in text.split(",") if s.strip()]
    return cfg.subset(names)


def _names(cfg: Configuration, Y) -> list[str]:
    return [cfg.components[i] for i in sorted(Y)]


def _approx(x) -> str:
    if isinstance(x, RootBox):
        return f" (approximately {float(x):.6g})"
    return ""


# ---------------------------------------------------------------------------
# commands


def cmd_validate(args, out: _Out) -> int:
    from .sncmodel import load_config as _lc

    try:
        cfg = _lc(args.config)
    except OSError as exc:
        raise ConfigError(f"cannot read {args.config}: {exc}") from exc
    rep = validate(cfg)
    for c in rep.checks:
        out.line(f"{c.name}: {'pass' if c.passed else 'FAIL'}" + (f" ({c.witness})" if c.witness else ""))
    out.line("valid" if rep.ok else "invalid")
    out.put(valid=rep.ok, checks=[c.to_record() for c in rep.checks])
    return EXIT_OK if rep.ok else EXIT_NEGATIVE


def cmd_e(args, out: _Out) -> int:
    from .stability import e_poly, e_value

    cfg = _load(args.config)
    Y = _union(cfg, args.union)
    L = cfg.parse_class(args.bundle)
    value = e_value(cfg, Y, L)
    out.line(f"e_{cfg.format_union(Y)}({args.bundle}) = {format_rational(value)}")
    out.put(union=_names(cfg, Y), bundle=args.bundle, value=format_rational(value))
    if args.polarization is not None or cfg.canonical is not None:
        _, H = _classes(cfg, args)
        p = e_poly(cfg, Y, L, H)
        sign = eventual_sign(p)
        out.line(f"e_{cfg.format_union(Y)}({args.bundle} + m*H) = {p}   eventual sign {sign:+d}")
        out.put(poly=p.to_records(), eventual_sign=sign)
    return EXIT_OK


def cmd_check(args, out: _Out) -> int:
    from .stability import semistable_unions

    cfg = _load(args.config)
    L, H = _classes(cfg, args)
    scope = "connected_pairs" if args.scope == "pairs" else "all_unions"
    from .stability import e_poly

    failures = []
    for Y in semistable_unions(cfg, scope):
        p = e_poly(cfg, Y, L, H)
        s = eventual_sign(p)
        ok = s <= 0 if args.mode == "minus" else s >= 0
        if not ok:
            failures.append((Y, p, s))
    for Y, p, s in failures:
        out.line(f"fails on {cfg.format_union(Y)}: e = {p} (eventual sign {s:+d})")
    verdict = "semistable" if not failures else "not semistable"
    out.line(f"{args.bundle} is {verdict} ({args.mode}, scope {args.scope})")
    out.put(
        semistable=not failures,
        mode=args.mode,
        scope=args.scope,
        failures=[{"union": _names(cfg, Y), "e": p.to_records(), "eventual_sign": s} for Y, p, s in failures],
    )
    return EXIT_OK if not failures else EXIT_NEGATIVE


def cmd_interval(args, out: _Out) -> int:
    from .stability import twistable_interval

    cfg = _load(args.config)
    L, H = _classes(cfg, args)
    Y = _union(cfg, args.union)
    try:
        rep = twistable_interval(cfg, Y, L, H, args.mode)
    except ValueError as exc:
        raise PreconditionError(str(exc)) from exc
    out.line(f"Y = {cfg.format_union(Y)}: {rep.describe()}{_approx(rep.endpoint) if rep.is_unit else ''}")
    out.put(interval=rep.to_record(cfg.components))
    return EXIT_OK if rep.is_unit else EXIT_NEGATIVE


def cmd_enumerate(args, out: _Out) -> int:
    from .twistenum import apply_twist, enumerate_semistable_twists

    cfg = _load(args.config)
    L, H = _classes(cfg, args)
    res = enumerate_semistable_twists(cfg, L, H, args.mode)
    twists = [t.as_list() for t in res.twists]
    label = "Stable" if len(twists) == 1 else "StrictlySemistable"
    for t in res.twists:
        cls = apply_twist(cfg, L, t)
        out.line(f"twist {t.as_list()}: {cls.format(cfg.components)}  [{label}]")
    out.line(f"{len(twists)} semistable twist(s)")
    out.put(twists=twists, classification=label)
    if args.trace:
        out.put(trace=res.trace.to_record(cfg.components))
        out.line(json.dumps(res.trace.to_record(cfg.components), indent=2))
    return EXIT_OK


def cmd_oracle(args, out: _Out) -> int:
    from .oracle import balanced_check, brute_force_twists, degree_bound_battery, identity_battery, oracle_window
    from .twistenum import enumerate_semistable_twists

    cfg = _load(args.config)
    L, H = _classes(cfg, args)
    ok = True
    idr = identity_battery(cfg, args.samples, args.seed)
    ok &= idr.ok
    out.line(f"identity battery: {'pass' if idr.ok else 'FAIL'} {idr.checks}")
    records = {"identity": idr.to_record()}
    is_K = cfg.canonical is not None and H == cfg.bundle_class(cfg.canonical)
    if cfg.is_tree() and cfg.n > 1:
        try:
            res = enumerate_semistable_twists(cfg, L, H, args.mode)
        except PreconditionError as exc:
            out.line(f"enumeration skipped: {exc}")
            records["enumeration"] = {"skipped": str(exc)}
        else:
            W = oracle_window(res.trace.intervals(), args.window)
            brute = brute_force_twists(cfg, L, H, args.mode, W)
            agree = brute == set(res.twists)
            ok &= agree
            out.line(f"enumeration vs brute force (W={W}): {'agree' if agree else 'DISAGREE'} ({len(brute)} twist(s))")
            records["enumeration"] = {
                "window": W,
                "agree": agree,
                "engine": [t.as_list() for t in res.twists],
                "brute_force": sorted(t.as_list() for t in brute),
            }
            if not agree:
                records["enumeration"]["reproducer"] = emit_config(cfg)
    if cfg.d == 1 and is_K and curve_genus(cfg) >= 2:
        rows = balanced_check(cfg, L)
        agree = all(r.agrees for r in rows)
        ok &= agree
        out.line(f"balanced multidegree equivalence: {'agree' if agree else 'DISAGREE'} on {len(rows)} union(s)")
        records["balanced"] = [r.to_record(cfg.components) for r in rows]
    if is_K:
        reps = [degree_bound_battery(cfg, Y, L, H) for Y in cfg.proper_unions()]
        good = all(r.ok for r in reps)
        ok &= good
        out.line(f"degree bounds: {'pass' if good else 'FAIL'} on {len(reps)} union(s)")
        records["degree_bounds"] = [r.to_record() for r in reps]
    out.line("all checks agree" if ok else "disagreement found")
    out.put(ok=ok, **records)
    return EXIT_OK if ok else EXIT_NEGATIVE


def cmd_gen(args, out: _Out) -> int:
    if args.kind == "curve":
        cfg = curve_builder(_int_list(args.genera), _parse_edges(args.edges), _parse_degrees(args.deg))
    else:
        tree = [(i, j) for i, j, _ in _parse_edges(args.tree)]
        cfg = synth_generator(args.dim, tree, args.seed)
    text = emit_config(cfg)
    rep = validate(cfg)
    if not rep.ok:
        raise ConfigError("generated configuration fails validation")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        out.line(f"wrote {args.out}")
        out.put(path=args.out)
    else:
        out.stream.write(text)
        return EXIT_OK
    return EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "e": cmd_e,
    "check": cmd_check,
    "interval": cmd_interval,
    "enumerate": cmd_enumerate,
    "oracle": cmd_oracle,
    "gen": cmd_gen,
}


def main(argv: Sequence[str] | None = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    out = _Out(args.format, stdout)
    try:
        code = COMMANDS[args.command](args, out)
    except PreconditionError as exc:
        out.line(f"precondition failed: {exc}")
        out.put(error=str(exc))
        return out.flush(EXIT_PRECONDITION)
    except ConfigError as exc:
        out.line(f"malformed input: {exc}")
        out.put(error=str(exc))
        return out.flush(EXIT_MALFORMED)
    if args.command == "gen" and not getattr(args, "out", None):
        return code
    return out.flush(code)


if __name__ == "__main__":
    sys.exit(main())
