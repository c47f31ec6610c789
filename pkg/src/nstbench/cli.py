"""Command-line entry point: ``nstbench <subcommand> ...``.

Exit codes: 0 verdict produced, 1 demo mismatch, 2 usage or input error,
3 internal error or missing fixture.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import catalog as C
from . import resources as R
from .demo import UnknownItem
from .finder import SearchBudget, find_model, independence
from .refuter import Bounds, HintError, check_certificate, load_hints, refute
from .refuter.certificate import Certificate
from .semantics import EvalError, check_theory, eval_formula, load_model, save_model
from .syntax import ParseError, expand, parse, render, to_json
from .theory import TheoryError, TheoryFragment, load_nst, parse_nst

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _emit(args, payload, text):
    if args.json:
        sys.stdout.write(json.dumps(payload, indent=1, sort_keys=True) + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def load_theory(spec: str) -> TheoryFragment:
    """A .nst path, or ``catalog:NAME[:p1,p2]``."""
    if spec.startswith("catalog:"):
        _, name, *rest = spec.split(":", 2)
        params = tuple(rest[0].split(",")) if rest else ()
        return C.named_construction(name, params)
    path = Path(spec)
    if not path.is_file():
        raise UsageError(f"no such theory file: {spec}")
    return load_nst(path)


def _formula(args, constants=()):
    if args.expr is not None:
        return parse(args.expr, constants)
    path = Path(args.formula)
    if not path.is_file():
        raise UsageError(f"no such formula file: {args.formula}")
    text = "\n".join(line.split("#", 1)[0] for line in path.read_text(encoding="utf-8").splitlines()).strip()
    return parse(text, constants)


def _model(path):
    if not Path(path).is_file():
        raise UsageError(f"no such model file: {path}")
    return load_model(path)


# --------------------------------------------------------------------------
# Subcommands
# --------------------------------------------------------------------------

def _theory_payload(theory, transform=None):
    rows = []
    for a in theory.axioms:
        f = transform(a.formula) if transform else a.formula
        rows.append({"label": a.label, "kind": a.kind, "main": a.main, "formula": render(f), "ast": to_json(f)})
    return {"name": theory.name, "constants": list(theory.constants), "axioms": rows}


def _source_theory(args):
    if args.file.startswith("catalog:"):
        return load_theory(args.file)
    path = Path(args.file)
    if not path.is_file():
        raise UsageError(f"no such file: {args.file}")
    return parse_nst(path.read_text(encoding="utf-8"), name=path.stem)


def _single(args, transform=None):
    f = parse(args.expr)
    g = transform(f) if transform else f
    _emit(args, {"formula": render(g), "ast": to_json(g)}, render(g))
    return EXIT_OK


def cmd_parse(args):
    if args.expr is not None:
        return _single(args)
    theory = _source_theory(args)
    _emit(args, _theory_payload(theory), theory.to_nst())
    return EXIT_OK


def cmd_expand(args):
    if args.expr is not None:
        return _single(args, expand)
    theory = _source_theory(args)
    payload = _theory_payload(theory, expand)
    text = "\n".join(f"[{r['label']}] {r['formula']}" for r in payload["axioms"])
    _emit(args, payload, text)
    return EXIT_OK


def cmd_eval(args):
    m = _model(args.model)
    f = _formula(args, tuple(m.constants))
    env = {}
    for item in args.env or ():
        name, _, val = item.partition("=")
        if not val.isdigit():
            raise UsageError(f"--env expects VAR=ELEMENT, got {item!r}")
        env[name] = int(val)
    value = eval_formula(m, f, env)
    _emit(args, {"formula": render(f), "env": env, "value": value}, "true" if value else "false")
    return EXIT_OK


def cmd_check_model(args):
    m = _model(args.model)
    theory = load_theory(args.theory)
    report = check_theory(m, theory)
    lines = [f"{label}: {'ok' if v else 'FAILS'}" for label, v in report.values.items()]
    lines.append("PASS" if report.passed else f"FAIL ({', '.join(report.failing)})")
    lines.extend(report.notes)
    _emit(args, report.to_json(), "\n".join(lines))
    return EXIT_OK


def _budget(args):
    return SearchBudget(max_size=args.max_size, canonical_only=args.canonical,
                        time_limit=args.time_limit, workers=args.workers)


def cmd_find_model(args):
    theory = load_theory(args.theory)
    res = find_model(theory, _budget(args))
    if res.found:
        if args.output:
            save_model(res.model, args.output)
        text = f"FOUND size {res.model.size}\n{res.model.dumps()}"
    elif res.status == "timeout":
        text = "NONE: time limit reached"
    else:
        text = f"NONE up to size {args.max_size} (search space exhausted)"
    _emit(args, res.to_json(), text)
    return EXIT_OK


def _bounds(args):
    rounds = args.rounds
    if args.max_depth is not None:
        rounds = min(rounds, args.max_depth)
    return Bounds(rounds=rounds, time_limit=args.time_limit)


def cmd_independence(args):
    theory = load_theory(args.theory)
    phi = _formula(args, tuple(theory.constants))
    v = independence(theory, phi, _budget(args), _bounds(args))
    text = "\n".join([v.status] + v.notes)
    _emit(args, v.to_json(), text)
    return EXIT_OK


def cmd_refute(args):
    theory = load_theory(args.theory)
    if args.check:
        path = Path(args.check)
        if not path.is_file():
            raise UsageError(f"no such certificate: {args.check}")
        res = check_certificate(Certificate.from_json(path.read_text(encoding="utf-8")), theory)
        payload = {"ok": res.ok, "reason": res.reason, "method": res.method, "atoms": res.atoms,
                   "divergent": res.divergent}
        _emit(args, payload, "VALID" if res else f"INVALID: {res.reason}")
        return EXIT_OK
    hints = None
    if args.hints:
        if not Path(args.hints).is_file():
            raise UsageError(f"no such hints file: {args.hints}")
        hints = load_hints(args.hints)
    out = refute(theory, _bounds(args), hints=hints)
    payload = {k: v for k, v in out.to_json().items() if k != "certificate"}
    if out.unsat:
        stem = Path(args.theory).stem if not args.theory.startswith("catalog:") else theory.name
        path = Path(args.output or f"{stem}.cert.json")
        path.write_text(out.certificate.dumps() + "\n", encoding="utf-8")
        payload["certificate_path"] = str(path)
        text = f"UNSAT\ncertificate: {path}"
    else:
        text = f"UNKNOWN ({out.reason}) after {out.rounds_done} round(s)"
    _emit(args, payload, text)
    return EXIT_OK


def cmd_catalog(args):
    if args.action == "list":
        rows = C.list_constructions()
        width = max(len(k) for k, _ in rows)
        _emit(args, [{"name": k, "description": d} for k, d in rows],
              "\n".join(f"{k.ljust(width)}  {d}" for k, d in rows))
        return EXIT_OK
    if not args.name:
        raise UsageError("catalog emit needs a construction name")
    theory = C.named_construction(args.name, tuple(args.params))
    text = theory.to_nst()
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    _emit(args, _theory_payload(theory), text)
    return EXIT_OK


def cmd_demo(args):
    from . import demo

    results = demo.run_demo(args.only, parallel=args.parallel)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(demo.report_json(results), encoding="utf-8")
        (out / "report.txt").write_text(demo.report_table(results), encoding="utf-8")
        if not args.no_figures:
            demo.write_figures(results, out / "figures")
    sys.stdout.write(demo.report_json(results) if args.json else demo.report_table(results))
    return EXIT_OK if all(r.passed for r in results) else EXIT_MISMATCH


# --------------------------------------------------------------------------
# Parser
# --------------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="nstbench", description="Naive set theory workbench.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    sub = p.add_subparsers(dest="command", required=True)

    for name, fn, helptext in (("parse", cmd_parse, "parse and pretty-print a formula or .nst theory"),
                               ("expand", cmd_expand, "eliminate upair/opair/extr terms")):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("file", nargs="?", help=".nst file or catalog:NAME")
        s.add_argument("-e", "--expr", help="inline formula instead of a file")
        s.set_defaults(fn=fn)

    def formula_args(s):
        g = s.add_mutually_exclusive_group(required=True)
        g.add_argument("-f", "--formula", help="file holding one sentence")
        g.add_argument("-e", "--expr", help="inline sentence")

    s = sub.add_parser("eval", parents=[common], help="evaluate a formula in a model")
    s.add_argument("-m", "--model", required=True)
    formula_args(s)
    s.add_argument("--env", action="append", metavar="VAR=ELEMENT")
    s.set_defaults(fn=cmd_eval)

    s = sub.add_parser("check-model", parents=[common], help="check extensionality and every axiom")
    s.add_argument("-m", "--model", required=True)
    s.add_argument("-t", "--theory", required=True)
    s.set_defaults(fn=cmd_check_model)

    def search_args(s):
        s.add_argument("--max-size", type=int, default=4)
        s.add_argument("--canonical", action="store_true", help="one model per isomorphism class")
        s.add_argument("--time-limit", type=float, default=None)
        s.add_argument("--workers", type=int, default=1)

    def refute_args(s):
        s.add_argument("--rounds", type=int, default=3)
        s.add_argument("--max-depth", type=int, default=None, help="cap on ground term depth")

    s = sub.add_parser("find-model", parents=[common], help="least finite model of a theory")
    s.add_argument("-t", "--theory", required=True)
    search_args(s)
    s.add_argument("-o", "--output", help="write the model JSON here")
    s.set_defaults(fn=cmd_find_model)

    s = sub.add_parser("independence", parents=[common], help="decide phi and not-phi over a theory")
    s.add_argument("-t", "--theory", required=True)
    formula_args(s)
    search_args(s)
    refute_args(s)
    s.set_defaults(fn=cmd_independence)

    s = sub.add_parser("refute", parents=[common], help="refute a theory by ground instantiation")
    s.add_argument("-t", "--theory", required=True)
    s.add_argument("--hints", help="hints JSON")
    refute_args(s)
    s.add_argument("--time-limit", type=float, default=60.0)
    s.add_argument("-o", "--output", help="certificate path (default: <theory>.cert.json)")
    s.add_argument("--check", metavar="CERT", help="verify an existing certificate instead")
    s.set_defaults(fn=cmd_refute)

    s = sub.add_parser("catalog", parents=[common], help="list or emit named constructions")
    s.add_argument("action", choices=("list", "emit"))
    s.add_argument("name", nargs="?")
    s.add_argument("params", nargs="*")
    s.add_argument("-o", "--output")
    s.set_defaults(fn=cmd_catalog)

    s = sub.add_parser("demo", parents=[common], help="run the reproduction suite")
    s.add_argument("--parallel", type=int, default=1, metavar="N")
    s.add_argument("--only", nargs="+", metavar="ID")
    s.add_argument("--out", metavar="DIR", help="write report.json, report.txt and figures/ here")
    s.add_argument("--no-figures", action="store_true")
    s.set_defaults(fn=cmd_demo)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command in ("parse", "expand") and (args.file is None) == (args.expr is None):
            raise UsageError(f"{args.command}: give exactly one of FILE or --expr")
        return args.fn(args)
    except R.FixtureError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INTERNAL
    except (UsageError, ParseError, TheoryError, C.CatalogError, EvalError, HintError, UnknownItem) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as e:  # noqa: BLE001
        print(f"internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
