"""Command-line interface.

Exit status: 0 when ``check`` impugns the null hypothesis (and for every other
successful command), 1 when ``check`` does not, 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from importlib import resources

from . import scenario as scenario_io
from .errors import ImpugnError
from .logic import defined_set, evaluate, free_vars, parse, pretty
from .logic.syntax import desugar_dotted, formula_length
from .probability import event_probability_sup, format_decimal, format_rational, parse_rational
from .structure import format_element, parse_element, reduce_anonymous
from .synthesis import SynthesisBudget
from .verdict import IMPUGNED, CheckOptions, audit_description, check

EXIT_IMPUGNED, EXIT_NOT_IMPUGNED, EXIT_ERROR = 0, 1, 2

# bundled cases and the verdict each must reproduce
GOLDEN = {
    "lottery": "IMPUGNED",
    "jury": "IMPUGNED",
    "jury_shrink": "NOT_IMPUGNED",
    "stalking": "NOT_IMPUGNED",
    "stalking_three_nights": "IMPUGNED",
    "caputo": "IMPUGNED",
    "caputo_box": "IMPUGNED",
}

LIST_LIMIT = 50


def case_text(name: str) -> str:
    return resources.files("impugn").joinpath("cases", f"{name}.scenario").read_text(encoding="utf-8")


def load_case(name: str, **kw):
    return scenario_io.loads(case_text(name), path=f"{name}.scenario", **kw)


def _emit(args, text: str, data: dict) -> None:
    if args.format == "structured":
        print(json.dumps(data, indent=2))
    else:
        print(text)


def _load(args):
    return scenario_io.load(args.file, lenient=getattr(args, "lenient", False))


def cmd_check(args) -> int:
    s = _load(args)
    if args.threshold is not None:
        s = dataclasses.replace(s, threshold=parse_rational(args.threshold))
    if args.budget is not None:
        s = dataclasses.replace(s, complexity_budget=args.budget)
    synth = SynthesisBudget.parse(args.synthesize) if args.synthesize else None
    report = check(s, CheckOptions(lenient=args.lenient, synthesis_budget=synth))
    _emit(args, report.render_text(), report.to_dict())
    return EXIT_IMPUGNED if report.verdict == IMPUGNED else EXIT_NOT_IMPUGNED


def cmd_prob(args) -> int:
    s = _load(args)
    b = event_probability_sup(s.trial.model, s.focal.prob_spec, s.structure, s.trial.outcome_sort)
    text = (f"sup = {format_decimal(b.sup)} ({format_rational(b.sup)}), at {b.attained_at}\n"
            f"inf = {format_decimal(b.inf)} ({format_rational(b.inf)}), at {b.inf_at}")
    _emit(args, text, {"name": s.name, "sup": format_decimal(b.sup), "sup_exact": format_rational(b.sup),
                       "attained_at": b.attained_at, "inf": format_decimal(b.inf),
                       "inf_exact": format_rational(b.inf), "inf_at": b.inf_at})
    return 0


def cmd_describe(args) -> int:
    s = _load(args)
    budget = SynthesisBudget.parse(args.budget) if args.budget else SynthesisBudget(
        formula_length(s.focal.formula))
    a = audit_description(s, budget)
    lines = [f"supplied formula: {pretty(s.focal.formula)}",
             f"supplied length = {a.supplied_length} (desugared: {a.desugared_length})",
             f"search budget: {budget.describe()}"]
    if a.skipped:
        lines.append(f"synthesis skipped: {a.skipped}")
    elif a.synthesized_min_length is None:
        lines.append(f"no defining formula within the budget ({a.explored} classes explored)")
    else:
        lines.append(f"shortest definition: {pretty(a.witness)} (length {a.synthesized_min_length}, "
                     f"{a.explored} classes explored)")
        lines.append(f"gap = {a.gap}")
    _emit(args, "\n".join(lines), {
        "name": s.name, "supplied_length": a.supplied_length, "desugared_length": a.desugared_length,
        "budget": budget.describe(), "synthesized_min_length": a.synthesized_min_length,
        "witness": None if a.witness is None else pretty(a.witness), "gap": a.gap,
        "explored": a.explored, "skipped": a.skipped,
    })
    return 0


def cmd_eval(args) -> int:
    s = _load(args)
    st = s.structure
    fixed = {args.var: s.trial.outcome_sort} if args.var else None
    f = parse(args.formula, st.vocabulary, fixed)
    fv = free_vars(f)
    length = formula_length(f)
    head = {"formula": pretty(f), "length": length, "desugared_length": formula_length(desugar_dotted(f))}
    if not fv:
        value = evaluate(st, f, {})
        _emit(args, f"{pretty(f)}: {'true' if value else 'false'}", {**head, "value": value})
        return 0
    if len(fv) != 1:
        raise ImpugnError(f"formula has free variables {sorted(fv)}; at most one is allowed")
    (var, sort), = fv.items()
    if args.at is not None:
        element = parse_element(st, sort, args.at)
        from .verdict import evaluate_at
        value = evaluate_at(st, f, var, element)
        _emit(args, f"{pretty(f)} at {var} = {format_element(element)}: {'true' if value else 'false'}",
              {**head, "at": format_element(element), "value": value})
        return 0
    anonymous = None
    if st.enumerable(sort):
        members = defined_set(st, f, var, sort)
        order = {e: i for i, e in enumerate(st.elements(sort))}
        listed = sorted(members, key=order.__getitem__)
    else:
        reduced, classes = reduce_anonymous(st, max(1, len(set(v for v in _vars(f)))))
        cls = classes.get(sort)
        if cls is None or not reduced.enumerable(sort):
            raise ImpugnError(f"sort {sort!r} is too large to list its defined set; use --at")
        members = defined_set(reduced, f, var, sort)
        listed = [e for e in reduced.elements(sort) if e in members and e in cls.named]
        anonymous = cls.count if cls.representatives[0] in members else 0
    shown = [format_element(e) for e in listed]
    lines = [f"{pretty(f)} defines {len(shown) + (anonymous or 0)} element(s) of {sort}:"]
    lines.extend(f"  {e}" for e in shown[:LIST_LIMIT])
    if len(shown) > LIST_LIMIT:
        lines.append(f"  ... and {len(shown) - LIST_LIMIT} more")
    if anonymous:
        lines.append(f"  plus all {anonymous} elements no relation or constant mentions")
    _emit(args, "\n".join(lines), {**head, "sort": sort, "count": len(shown) + (anonymous or 0),
                                   "elements": shown, "anonymous": anonymous or 0})
    return 0


def _vars(f):
    from .logic import variable_names
    return variable_names(f)


def cmd_cases(args) -> int:
    out_dir = args.dir
    os.makedirs(out_dir, exist_ok=True)
    rows = []
    status = 0
    for name, golden in GOLDEN.items():
        target = os.path.join(out_dir, f"{name}.scenario")
        text = case_text(name)
        wrote = False
        if args.force or not os.path.exists(target):
            with open(target, "w", encoding="utf-8") as fh:
                fh.write(text)
            wrote = True
        row = {"name": name, "file": target, "written": wrote, "golden": golden}
        if args.verify:
            verdict = check(scenario_io.load(target)).verdict
            row["verdict"] = verdict
            if verdict != golden:
                status = 1
        rows.append(row)
    lines = []
    for r in rows:
        note = "written" if r["written"] else "exists, kept"
        extra = f", re-checked: {r['verdict']}" if "verdict" in r else ""
        lines.append(f"{r['name']:<24} {r['golden']:<13} {r['file']} ({note}{extra})")
    _emit(args, "\n".join(lines), {"cases": rows})
    return status


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="impugn", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_, file=True):
        c = sub.add_parser(name, help=help_)
        if file:
            c.add_argument("file", help="scenario file")
        c.add_argument("--format", choices=("text", "structured"), default="text")
        c.add_argument("--lenient", action="store_true", help="downgrade unknown keys and errors")
        c.set_defaults(func=fn)
        return c

    c = add("check", cmd_check, "run the impugning procedure")
    c.add_argument("--synthesize", metavar="L,V,D", help="also search for the shortest definition")
    c.add_argument("--threshold", help="override the probability threshold")
    c.add_argument("--budget", type=int, help="override the complexity budget")
    add("prob", cmd_prob, "print the probability bound of the focal event")
    c = add("describe", cmd_describe, "compare the focal formula with the shortest definition")
    c.add_argument("--budget", metavar="L,V,D", help="max length, variables, quantifier depth")
    c = add("eval", cmd_eval, "evaluate an ad-hoc formula on the scenario's structure")
    c.add_argument("--formula", required=True)
    c.add_argument("--at", help="outcome at which to evaluate")
    c.add_argument("--var", help="name of the free variable, typed by the outcome sort")
    c = add("cases", cmd_cases, "write the bundled scenarios to a directory", file=False)
    c.add_argument("--dir", default=".")
    c.add_argument("--force", action="store_true", help="overwrite existing files")
    c.add_argument("--verify", action="store_true", help="re-check every written case")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ImpugnError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
