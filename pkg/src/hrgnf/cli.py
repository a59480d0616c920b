"""Command-line front end.

Exit codes: 0 success/true, 1 property false or languages differ,
2 parse/semantic error, 3 not isolated-node bounded, 4 cap exceeded,
5 empty language.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import HRGError
from .grammar import mu
from .hrgfile import load, serialize
from .normalize import STAGES, Config, is_chain, normalize
from .oracle import EnumerationBounds, enumerate_language, is_wgnf, isolation_constant, languages_equal


def _bounds(args) -> EnumerationBounds:
    return EnumerationBounds(args.max_edges, args.max_nodes)


def _config(args) -> Config:
    return Config(
        max_arity=args.max_arity,
        max_productions=args.max_productions,
        isolated_cap=args.isolated_cap,
    )


def cmd_validate(args) -> int:
    gf = load(args.file)
    g = gf.grammar
    print(f"{args.file}: ok ({len(g.productions)} productions, start {g.start})")
    return 0


def cmd_normalize(args) -> int:
    g = load(args.file).grammar
    out, report = normalize(g, _config(args), stop_after=args.stage, strict=not args.literal_type3)
    text = serialize(out)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    if args.report:
        Path(args.report).write_text(report.to_json(timestamp=not args.no_timestamp) + "\n")
    return 0


def cmd_check_wgnf(args) -> int:
    g = load(args.file).grammar
    rep = is_wgnf(g)
    if args.json:
        print(json.dumps({"wgnf": rep.holds, "productions": [{"id": i, "terminalEdges": c} for i, c in rep.per_production]}, indent=2))
    else:
        for pid, c in rep.per_production:
            if c != 1:
                print(f"{pid}: {c} terminal edges", file=sys.stderr)
        print("WGNF" if rep.holds else "not WGNF")
    return 0 if rep.holds else 1


def cmd_enumerate(args) -> int:
    g = load(args.file).grammar
    sample = enumerate_language(g, _bounds(args))
    if args.json:
        print(sample.to_json())
    else:
        for code in sorted(sample.codes):
            print(code)
        print(f"{len(sample)} graphs", file=sys.stderr)
    return 0


def cmd_equiv(args) -> int:
    g1 = load(args.file1).grammar
    g2 = load(args.file2).grammar
    v = languages_equal(g1, g2, _bounds(args))
    if args.json:
        print(json.dumps({"equal": v.holds, "witness": str(v.witness) if v.witness else None, "witnessIn": v.witness_in}))
    elif v.holds:
        print(v.detail)
    else:
        print(f"DIFFER: {v.witness} generated only by grammar {v.witness_in}")
    return 0 if v.holds else 1


def cmd_stats(args) -> int:
    g = load(args.file).grammar
    labels = g.labels
    stats = {
        "name": g.name,
        "start": g.start,
        "nonterminals": len(labels.nonterminals()),
        "terminals": len(labels.terminals()),
        "productions": len(g.productions),
        "maxArity": max((labels.arity(n) for n in labels), default=0),
        "edgeless": sum(1 for p in g.productions if not p.rhs.edges),
        "chain": sum(1 for p in g.productions if is_chain(g, p)),
        "recursive": sum(1 for p in g.productions if p.delta is not None and mu(p) == p.lhs),
        "wgnf": is_wgnf(g).holds,
        "isolatedBound": isolation_constant(g),
    }
    if args.json:
        print(json.dumps(stats, indent=2))
    else:
        for k, v in stats.items():
            print(f"{k}: {v}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hrgnf", description="Hyperedge replacement grammar normalization toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    def bounded(p):
        p.add_argument("--max-edges", type=int, default=6)
        p.add_argument("--max-nodes", type=int, default=8)

    p = sub.add_parser("validate", help="parse and check a grammar file")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("normalize", help="convert to weak Greibach normal form")
    p.add_argument("file")
    p.add_argument("--stage", choices=STAGES, help="stop after this stage")
    p.add_argument("-o", "--output")
    p.add_argument("--report", help="write the per-stage JSON report here")
    p.add_argument("--no-timestamp", action="store_true", help="omit timings from the report")
    p.add_argument("--max-arity", type=int, default=Config.max_arity)
    p.add_argument("--max-productions", type=int, default=Config.max_productions)
    p.add_argument("--isolated-cap", type=int, default=Config.isolated_cap)
    p.add_argument("--literal-type3", action="store_true", help="build type III rules for every f (over-generates)")
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("check-wgnf", help="exit 0 iff every rhs has exactly one terminal edge")
    p.add_argument("file")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_check_wgnf)

    p = sub.add_parser("enumerate", help="list the bounded language by canonical code")
    p.add_argument("file")
    bounded(p)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("equiv", help="compare two bounded languages")
    p.add_argument("file1")
    p.add_argument("file2")
    bounded(p)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_equiv)

    p = sub.add_parser("stats", help="summarize a grammar")
    p.add_argument("file")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_stats)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except HRGError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
