"""Command-line front end for batch reasoning and for launching the service.

Exit codes: 0 success, 1 task-level negative (e.g. unsatisfiable where a
model was asked for), 2 usage, parse or type errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .api import (
    base_structure, load_kb, parse_fact, parse_term, term_key, value_to_json,
    vocabulary_meta,
)
from .config import Config
from .errors import (
    ConflictingAssert, FodotError, Inconsistent, NotAConsequence, ParseErrors,
    TypeErrors, TypeMismatch, Unbounded,
)
from .inference import Reasoner, UNKNOWN_STATUS
from .lang.printer import print_rule
from .structure import assert_fact, term_text
from .values import value_text


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fodot",
        description="Reasoning over FO-dot knowledge bases")
    sub = parser.add_subparsers(dest="command", required=True)

    def task(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("file", help="knowledge base (.idp)")
        p.add_argument("--assert", dest="asserts", action="append",
                       default=[], metavar="TERM=VALUE",
                       help="add a user fact (repeatable)")
        p.add_argument("--json", action="store_true",
                       help="machine-readable output")
        p.add_argument("--solver", metavar="CMD",
                       help="external SMT solver command line")
        p.add_argument("--timeout", type=int, metavar="MS",
                       help="per-check solver timeout")
        p.add_argument("--dump-ground", action="store_true",
                       help="dump the ground theory to stderr")
        return p

    task("check", "decide satisfiability of theory plus structure")
    p = task("expand", "enumerate models")
    p.add_argument("--max-models", type=int, default=1, metavar="N")
    task("propagate", "compute all consequences")
    p = task("explain", "explain a propagated literal")
    p.add_argument("--literal", required=True,
                   help='e.g. "vote()" or "18 =< age()"')
    p = task("optimize", "minimize or maximize a term")
    p.add_argument("--term", required=True)
    p.add_argument("--direction", choices=("minimize", "maximize"),
                   default="minimize")
    task("relevance", "split atoms into relevant and irrelevant")

    dmn = sub.add_parser("dmn", help="decision table tools")
    dmn_sub = dmn.add_subparsers(dest="dmn_command", required=True)
    t = dmn_sub.add_parser("translate", help="print the table as a definition")
    t.add_argument("table", help="decision table file")
    t.add_argument("--vocab", required=True, help="vocabulary (.idp)")
    t.add_argument("--json", action="store_true")
    c = dmn_sub.add_parser("check", help="completeness and overlap check")
    c.add_argument("table")
    c.add_argument("--vocab", required=True)
    c.add_argument("--bounds", action="append", default=[],
                   metavar="TERM=LO..HI")
    c.add_argument("--json", action="store_true")

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--solver", metavar="CMD")
    serve.add_argument("--timeout", type=int, metavar="MS")
    return parser


def make_config(args) -> Config:
    config = Config.load()
    if getattr(args, "solver", None):
        import shlex
        config.solver_command = shlex.split(args.solver)
    if getattr(args, "timeout", None):
        config.timeout_ms = args.timeout
    return config


def load_problem(args):
    with open(args.file) as f:
        source = f.read()
    _, tkb = load_kb(source)
    struct = base_structure(tkb)
    for text in args.asserts:
        key, value = parse_fact(tkb, text)
        struct = assert_fact(tkb, struct, key, value)
    return tkb, struct


def emit(args, payload: dict, human: str) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, default=str))
    else:
        print(human)


def run_task(args) -> int:
    tkb, struct = load_problem(args)
    config = make_config(args)
    with Reasoner(tkb, struct, config) as reasoner:
        if args.dump_ground:
            print(reasoner.gt.dump(), file=sys.stderr)
        if args.command == "check":
            sat = reasoner.model_check()
            emit(args, {"status": "satisfiable" if sat else "unsatisfiable"},
                 "satisfiable" if sat else "unsatisfiable")
            return 0 if sat else 1
        if args.command == "expand":
            models = reasoner.model_expand(args.max_models)
            payload = {"models": [
                {term_text(k): value_to_json(v) for k, v in sorted(m.items())}
                for m in models]}
            lines = []
            for i, m in enumerate(models):
                lines.append(f"model {i + 1}:")
                for k, v in sorted(m.items()):
                    lines.append(f"  {term_text(k)} = {value_text(v)}")
            emit(args, payload, "\n".join(lines) if models else "unsatisfiable")
            return 0 if models else 1
        if args.command == "propagate":
            cons = reasoner.propagate()
            entries = [{"atom": t, "status": cons.atoms[t].status,
                        "origin": cons.atoms[t].origin}
                       for t in cons.order
                       if cons.atoms[t].status != UNKNOWN_STATUS]
            values = {term_text(k): value_to_json(v)
                      for k, v in cons.determined.items()}
            lines = [f"{e['atom']}: {e['status']}"
                     + (f" ({e['origin']})" if e["origin"] else "")
                     for e in entries]
            lines += [f"{t} = {v}" for t, v in values.items()]
            emit(args, {"atoms": entries, "values": values},
                 "\n".join(lines) if lines else "no consequences")
            return 0
        if args.command == "explain":
            literal = reasoner.ground_expr(parse_term(tkb, args.literal))
            explanation = reasoner.explain(literal, args.literal)
            payload = {"literal": args.literal, "explanation": [
                {"label": i.label, "kind": i.kind, "source": i.source}
                for i in explanation.items]}
            emit(args, payload, "\n".join(
                f"[{i.label}] {i.source}" for i in explanation.items))
            return 0
        if args.command == "optimize":
            term = parse_term(tkb, args.term)
            value, model = reasoner.optimize(term, args.direction)
            payload = {"term": args.term, "direction": args.direction,
                       "value": value_to_json(value),
                       "witness": {term_text(k): value_to_json(v)
                                   for k, v in sorted(model.items())}}
            emit(args, payload, f"{args.direction} {args.term} = "
                                f"{value_text(value)}")
            return 0
        if args.command == "relevance":
            relevant, irrelevant, _ = reasoner.relevance()
            emit(args, {"relevant": relevant, "irrelevant": irrelevant},
                 "relevant:\n" + "\n".join(f"  {a}" for a in relevant) +
                 "\nirrelevant:\n" + "\n".join(f"  {a}" for a in irrelevant))
            return 0
    return 2


def run_dmn(args) -> int:
    from . import dmn
    with open(args.vocab) as f:
        _, tkb = load_kb(f.read())
    table = dmn.parse_table_file(args.table)
    if args.dmn_command == "translate":
        definition = dmn.to_definition(table, tkb)
        rules = [print_rule(r) for r in definition.rules]
        if args.json:
            print(json.dumps({"table": table.name, "rules": rules}, indent=2))
        else:
            print("{")
            for r in rules:
                print(f"    {r}")
            print("}")
        return 0
    bounds = {}
    for spec_text in args.bounds:
        term_part, _, range_part = spec_text.partition("=")
        lo_text, _, hi_text = range_part.partition("..")
        lo = _number(lo_text)
        hi = _number(hi_text)
        bounds[term_part.strip()] = (lo, hi)
    report = dmn.check_table(table, tkb, bounds)
    payload = {
        "complete": report.complete,
        "unique": report.unique,
    }
    lines = []
    if report.complete:
        lines.append("complete: every input in bounds matches a row")
    else:
        payload["gap"] = {k: value_to_json(v)
                          for k, v in report.gap_witness.items()}
        lines.append(f"incomplete: no row matches {report.gap_witness}")
    if report.unique:
        lines.append("unique: no two rows overlap")
    else:
        i, j, w = report.overlap_witness
        payload["overlap"] = {"rows": [i + 1, j + 1],
                              "witness": {k: value_to_json(v)
                                          for k, v in w.items()}}
        lines.append(f"overlap: rows {i + 1} and {j + 1} both match {w}")
    if args.json:
        print(json.dumps(payload, indent=2))
    else:
        print("\n".join(lines))
    return 0 if report.complete and report.unique else 1


def _number(text: str):
    text = text.strip()
    try:
        return int(text)
    except ValueError:
        return Fraction(text)


def run_serve(args) -> int:
    import uvicorn

    from .service import create_app
    config = make_config(args)
    config.port = args.port
    app = create_app(config)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0
    try:
        if args.command == "serve":
            return run_serve(args)
        if args.command == "dmn":
            return run_dmn(args)
        return run_task(args)
    except (ParseErrors, TypeErrors, TypeMismatch, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (Inconsistent, NotAConsequence, Unbounded, ConflictingAssert) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except FodotError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
