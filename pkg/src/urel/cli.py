"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 data or validation error,
3 guard or world limit exceeded.  Results go to standard output as sorted
TSV; diagnostics go to standard error.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import OutputGuardExceeded, UrelError, WorldLimitExceeded

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_LIMIT = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _query_text(args) -> str:
    if args.file is not None:
        return Path(args.file).read_text(encoding="utf-8")
    return args.text


def _emit_table(t, out) -> None:
    from .storage import relation_tsv

    out.write(relation_tsv(t.attrs, t.rows))


def cmd_validate(args, out) -> int:
    from .model import validate
    from .storage import load_database

    problems = validate(load_database(args.dir))
    if problems:
        for p in problems:
            print(p, file=sys.stderr)
        print(f"invalid: {len(problems)} violation(s)", file=sys.stderr)
        return EXIT_DATA
    print("valid", file=out)
    return EXIT_OK


def cmd_query(args, out) -> int:
    from .engine import evaluate
    from .oracle import poss_oracle
    from .query.ast import Poss, strip_poss
    from .query.optimizer import explain
    from .query.parser import parse
    from .query.planner import plan_query
    from .storage import load_database

    db = load_database(args.db)
    body, _ = strip_poss(parse(_query_text(args)))
    plan = plan_query(Poss(body), db, optimize=not args.no_optimize)
    if args.explain:
        print(explain(plan, db), file=out)
        print(file=out)
    result = evaluate(plan, db)
    _emit_table(result, out)
    if args.oracle:
        return _report(result, poss_oracle(body, db, args.limit), out)
    return EXIT_OK


def _report(result, expected, out) -> int:
    if result.rows == expected.rows:
        print("oracle: MATCH", file=out)
        return EXIT_OK
    print("oracle: MISMATCH", file=out)
    print(f"engine only: {sorted(result.rows - expected.rows, key=repr)}", file=sys.stderr)
    print(f"oracle only: {sorted(expected.rows - result.rows, key=repr)}", file=sys.stderr)
    return EXIT_DATA


def cmd_certain(args, out) -> int:
    from .engine import certain
    from .oracle import certain_oracle
    from .query.parser import parse
    from .storage import load_database

    db = load_database(args.db)
    q = parse(_query_text(args))
    result = certain(q, db, optimize=not args.no_optimize, guard=args.guard)
    _emit_table(result, out)
    if args.oracle:
        return _report(result, certain_oracle(q, db, args.limit), out)
    return EXIT_OK


def cmd_reduce(args, out) -> int:
    from .engine import reduce
    from .storage import load_database, save_database

    db = load_database(args.db)
    red = reduce(db)
    save_database(red, args.out)
    print(f"reduced: {db.total_rows()} -> {red.total_rows()} rows", file=out)
    return EXIT_OK


def cmd_normalize(args, out) -> int:
    from .engine import reduce
    from .normalize import normalize
    from .storage import load_database, save_database

    db = load_database(args.db)
    if args.reduce and not db.reduced:
        db = reduce(db)
    norm = normalize(db, args.guard, naming=args.naming)
    save_database(norm, args.out)
    print(f"normalized: {len(db.world)} variables -> {len(norm.world)} components, {norm.total_rows()} rows", file=out)
    return EXIT_OK


def cmd_generate(args, out) -> int:
    from .datagen import GenParams, generate, sample_queries, stats
    from .storage import save_database

    params = GenParams(s=args.scale, x=args.uncertainty, z=args.correlation, m=args.max_alts,
                       p=args.combo_prob, k=args.max_dfc, seed=args.seed)
    db = generate(params)
    root = save_database(db, args.out)
    qdir = root / "queries"
    qdir.mkdir(exist_ok=True)
    for name, text in sample_queries().items():
        (qdir / name).write_text(text, encoding="utf-8")
    _print_stats(stats(db), out)
    return EXIT_OK


def _print_stats(st, out) -> None:
    print(f"worlds_log10\t{st.worlds_log10:.6f}", file=out)
    print(f"max_rng\t{st.max_rng}", file=out)
    print(f"total_rows\t{st.total_rows}", file=out)
    for dfc, count in st.variables_by_dfc.items():
        print(f"variables_dfc_{dfc}\t{count}", file=out)


def cmd_stats(args, out) -> int:
    from .datagen import stats
    from .storage import load_database

    target = args.db or args.dir
    if target is None:
        raise _UsageError("stats needs a database directory")
    _print_stats(stats(load_database(target)), out)
    return EXIT_OK


def cmd_worlds(args, out) -> int:
    from .model import format_value
    from .oracle import enumerate_worlds, instantiate, parse_valuation
    from .storage import load_database, relation_tsv

    db = load_database(args.db)
    if args.world is not None:
        f = parse_valuation(args.world, db.world)
        for name, t in instantiate(db, f).items():
            print(f"# {name}", file=out)
            out.write(relation_tsv(t.attrs, t.rows))
        return EXIT_OK
    for f in enumerate_worlds(db.world, args.limit):
        print(";".join(f"{var}={format_value(val)}" for var, val in f.items()), file=out)
    return EXIT_OK


class _UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    from .normalize import DEFAULT_GUARD
    from .oracle import DEFAULT_LIMIT

    p = _Parser(prog="urel", description="Query and maintain U-relational databases.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("validate", help="check a database directory for validity")
    s.add_argument("dir")
    s.set_defaults(func=cmd_validate)

    for name, func, help_ in (("query", cmd_query, "print possible answers"),
                              ("certain", cmd_certain, "print certain answers")):
        s = sub.add_parser(name, help=help_)
        s.add_argument("--db", required=True)
        src = s.add_mutually_exclusive_group(required=True)
        src.add_argument("--file")
        src.add_argument("--text")
        s.add_argument("--oracle", action="store_true", help="cross-check against world enumeration")
        s.add_argument("--limit", type=int, default=DEFAULT_LIMIT, help="world limit for --oracle")
        s.add_argument("--no-optimize", action="store_true")
        if name == "query":
            s.add_argument("--explain", action="store_true")
        else:
            s.add_argument("--guard", type=int, default=DEFAULT_GUARD)
        s.set_defaults(func=func)

    s = sub.add_parser("reduce", help="remove rows that never complete")
    s.add_argument("--db", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("normalize", help="fuse variables so every descriptor has size one")
    s.add_argument("--db", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--guard", type=int, default=DEFAULT_GUARD)
    s.add_argument("--reduce", action="store_true", help="reduce first if the database is not flagged reduced")
    s.add_argument("--naming", choices=("compact", "prefix"), default="compact")
    s.set_defaults(func=cmd_normalize)

    s = sub.add_parser("generate", help="generate an uncertain database")
    s.add_argument("--scale", type=float, default=0.001)
    s.add_argument("--uncertainty", type=float, default=0.01)
    s.add_argument("--correlation", type=float, default=0.5)
    s.add_argument("--max-alts", type=int, default=8)
    s.add_argument("--combo-prob", type=float, default=0.25)
    s.add_argument("--max-dfc", type=int, default=4)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_generate)

    s = sub.add_parser("stats", help="world count, largest domain, size")
    s.add_argument("dir", nargs="?")
    s.add_argument("--db")
    s.set_defaults(func=cmd_stats)

    s = sub.add_parser("worlds", help="enumerate worlds or instantiate one")
    s.add_argument("--db", required=True)
    s.add_argument("--limit", type=int, default=DEFAULT_LIMIT)
    s.add_argument("--world", help="valuation such as 'x=1;y=2'")
    s.set_defaults(func=cmd_worlds)
    return p


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, out)
    except _UsageError as exc:
        print(f"urel: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (WorldLimitExceeded, OutputGuardExceeded) as exc:
        print(f"urel: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except (UrelError, OSError) as exc:
        print(f"urel: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA


run = main


def main_exit() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
