"""Command-line entry point.

Subcommands: check, normalize, eval, equal, provecheck, enumerate,
adequacy.  Exit codes: 0 success, 1 check or verdict failure, 2 usage or
parse error, 3 budget exhaustion.  With a fixed seed all outputs are
byte-stable across runs.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources

from .clones import Budget, CloneError, check_clone_laws
from .equality import free_equal, normalize_with_trace
from .firstorder import (
    RewriteSystem,
    check_fo_derivation,
    rewrite_normalize,
)
from .freealgebra import (
    CloneApp,
    FreeOp,
    FreeVar,
    check_free_derivation,
    enumerate_free_terms,
    fold_hom,
)
from .jsonio import (
    document,
    fo_derivation_from_json,
    free_derivation_from_json,
    free_derivation_to_json,
    free_term_to_json,
    load_document,
    context_from_json,
    sort_from_json,
)
from .nbe import check_normal, nbe_normalize
from .secondorder import check_algebra
from .sorts import Context, Sort
from .stlc import adequacy_harness, bool_model_hom, set_model
from .surface import (
    ParseError,
    TheoryBundle,
    parse_bundle,
    parse_context,
    parse_term,
    render_free,
    render_sort,
    sort_text,
    stock_bundle,
)

OK, FAIL, USAGE, EXHAUSTED = 0, 1, 2, 3


def load_bundle(args) -> TheoryBundle:
    if args.bundle:
        with open(args.bundle, encoding="utf-8") as handle:
            return parse_bundle(handle.read())
    return stock_bundle(args.variant)


def bundled_source(variant: str) -> str:
    name = {"stlc": "stlc", "bool": "stlc_bool", "gs": "stlc_gs"}[variant]
    return resources.files("clonal.bundles").joinpath(f"{name}.bundle").read_text()


def _emit(args, human: str, data: dict) -> None:
    if args.json:
        print(json.dumps(data, indent=2))
    else:
        print(human)


def _sort_arg(bundle, args) -> Sort:
    return sort_text(bundle.sort_set, args.sort)


def _context_arg(bundle, args):
    return parse_context(bundle, args.context)


def cmd_check(args) -> int:
    bundle = load_bundle(args)
    budget = Budget(
        max_context_len=2,
        max_depth=min(2, args.depth),
        max_sort_height=1,
        max_terms=6,
        max_tuples=4,
        max_context_triples=48,
        seed=args.seed,
    )
    reports = []
    bundle.surface.check_well_formed(bundle.sort_set.sorts_up_to_height(1))
    if bundle.base is not None:
        bundle.base.check_well_formed(bundle.sort_set.sorts_up_to_height(1))
        reports.append(check_clone_laws(bundle.base_clone, budget, subject="base clone"))
    reports.append(check_clone_laws(bundle.free, budget, subject="free algebra clone"))
    reports.append(check_algebra(bundle.free, budget, subject="free algebra"))
    ok = all(r.ok for r in reports)
    human = "\n".join(r.summary() for r in reports) + f"\ncheck: {'pass' if ok else 'FAIL'}"
    _emit(args, human, document("check-report", {
        "ok": ok, "reports": [r.to_json() for r in reports],
    }, bundle=bundle.name))
    return OK if ok else FAIL


def _base_only(t):
    """Convert an element-application tree over variables into a base term,
    when the term mentions no operators."""
    from .firstorder import fo_subst
    from .clones import Substitution
    from .firstorder import FoVar

    match t:
        case FreeVar(index=i):
            return FoVar(i)
        case CloneApp(element=e, arity_ctx=actx, args=args):
            converted = [_base_only(a) for a in args]
            if any(c is None for c in converted):
                return None
            if isinstance(e, int):
                return converted[e - 1]
            return fo_subst(e, Substitution(Context(()), actx, tuple(converted)))
    return None


def cmd_normalize(args) -> int:
    bundle = load_bundle(args)
    ctx, names = _context_arg(bundle, args)
    sort = _sort_arg(bundle, args)
    term = parse_term(bundle, args.term, sort, ctx, names)

    base_form = None if args.eta_long else _base_only(term)
    if base_form is not None and bundle.base is not None and not sort.args:
        nf, _ = rewrite_normalize(RewriteSystem(bundle.base), base_form)
        from .surface import render_fo

        human = render_fo(nf, names or [f"x{i}" for i in range(1, len(ctx) + 1)])
        _emit(args, human, document("base-normal-form", {"term": human}, bundle=bundle.name))
        return OK

    nf = nbe_normalize(bundle.free, ctx, sort, term)
    verdict = check_normal(bundle.free, ctx, sort, nf)
    if not verdict:
        print(f"normalization produced a non-normal form: {verdict.reason}", file=sys.stderr)
        return FAIL
    rendered = render_free(nf, names or [f"x{i}" for i in range(1, len(ctx) + 1)])
    payload = {"term": rendered, "tree": free_term_to_json(nf)}
    if args.witness:
        _, deriv = normalize_with_trace(bundle.free, ctx, sort, term)
        replay = check_free_derivation(bundle.free, ctx, deriv)
        if not replay.ok:
            print(f"internal witness rejected: {replay.error}", file=sys.stderr)
            return FAIL
        payload["witness"] = free_derivation_to_json(deriv)
    human = rendered if not args.witness else f"{rendered}\nwitness: checked"
    _emit(args, human, document("normal-form", payload, bundle=bundle.name))
    return OK


def cmd_eval(args) -> int:
    bundle = load_bundle(args)
    if bundle.base is None or bundle.base.name != "bool":
        print("eval needs the boolean variant (finite set model)", file=sys.stderr)
        return USAGE
    sort = _sort_arg(bundle, args)
    try:
        term = parse_term(bundle, args.term, sort)
    except ParseError as e:
        print(e, file=sys.stderr)
        return USAGE
    model = set_model(presentation=bundle.surface)
    g = bool_model_hom(bundle.free, model)
    fold = fold_hom(bundle.free, model, g)
    table = fold.apply(Context(()), sort, term)
    value = table[0]
    human = _render_value(model, sort, value)
    _emit(args, human, document("value", {"value": _value_json(model, sort, value)},
                                bundle=bundle.name))
    return OK


def _render_value(model, sort: Sort, value) -> str:
    if not sort.args:
        return str(value)
    a = sort.args[0]
    rows = [
        f"{_render_value(model, a, arg)} -> {_render_value(model, sort.args[1], res)}"
        for arg, res in zip(model.clone.space(a), value)
    ]
    return "{" + "; ".join(rows) + "}"


def _value_json(model, sort: Sort, value):
    if not sort.args:
        return value
    a, b = sort.args
    return [
        {"arg": _value_json(model, a, arg), "result": _value_json(model, b, res)}
        for arg, res in zip(model.clone.space(a), value)
    ]


def cmd_equal(args) -> int:
    bundle = load_bundle(args)
    ctx, names = _context_arg(bundle, args)
    sort = _sort_arg(bundle, args)
    left = parse_term(bundle, args.left, sort, ctx, names)
    right = parse_term(bundle, args.right, sort, ctx, names)
    mode = "search" if args.search else "normalize"
    model_hom = None
    if bundle.base is not None and bundle.base.name == "bool" and len(ctx) == 0:
        model = set_model(presentation=bundle.surface)
        g = bool_model_hom(bundle.free, model)
        fold = fold_hom(bundle.free, model, g)
        model_hom = lambda c, s, t: fold.apply(c, s, t)
    verdict = free_equal(
        bundle.free, ctx, sort, left, right, mode=mode, budget=args.budget,
        model_hom=model_hom,
    )
    payload = {"status": verdict.status}
    if verdict.witness is not None and args.witness:
        payload["witness"] = free_derivation_to_json(verdict.witness)
    if verdict.certificate is not None:
        payload["certificate"] = [str(v) for v in verdict.certificate]
    _emit(args, verdict.status, document("equality", payload, bundle=bundle.name))
    if verdict.status == "equal":
        return OK
    if verdict.status == "unknown":
        return EXHAUSTED
    return FAIL


def cmd_provecheck(args) -> int:
    bundle = load_bundle(args)
    with open(args.file, encoding="utf-8") as handle:
        data = json.load(handle)
    kind = data.get("kind")
    if kind == "fo-derivation":
        payload = load_document(data, "fo-derivation")
        if bundle.base is None:
            print("bundle has no base presentation", file=sys.stderr)
            return USAGE
        ctx = context_from_json(payload["context"])
        deriv = fo_derivation_from_json(payload["derivation"])
        verdict = check_fo_derivation(bundle.base, ctx, deriv)
        status = "accepted" if verdict.ok else f"rejected at {list(verdict.path)}: {verdict.error}"
        _emit(args, status, document("provecheck", {
            "ok": verdict.ok,
            "error": verdict.error,
            "path": list(verdict.path),
        }, bundle=bundle.name))
        return OK if verdict.ok else FAIL
    if kind == "free-derivation":
        payload = load_document(data, "free-derivation")
        ctx = context_from_json(payload["context"])
        deriv = free_derivation_from_json(payload["derivation"])
        verdict = check_free_derivation(bundle.free, ctx, deriv)
        status = "accepted" if verdict.ok else f"rejected at {list(verdict.path)}: {verdict.error}"
        _emit(args, status, document("provecheck", {
            "ok": verdict.ok,
            "error": verdict.error,
            "path": list(verdict.path),
        }, bundle=bundle.name))
        return OK if verdict.ok else FAIL
    print(f"unknown derivation document kind {kind!r}", file=sys.stderr)
    return USAGE


def cmd_enumerate(args) -> int:
    bundle = load_bundle(args)
    ctx, names = _context_arg(bundle, args)
    sort = _sort_arg(bundle, args)
    terms = enumerate_free_terms(bundle.free, ctx, sort, max_size=args.budget)
    shown = [render_free(t, names or [f"x{i}" for i in range(1, len(ctx) + 1)]) for t in terms]
    _emit(args, "\n".join(shown) if shown else "(none)", document("enumeration", {
        "count": len(terms),
        "terms": shown,
    }, bundle=bundle.name))
    return OK


def cmd_adequacy(args) -> int:
    bundle = load_bundle(args)
    if bundle.base is None or bundle.base.name != "bool":
        print("adequacy runs on the boolean variant", file=sys.stderr)
        return USAGE
    report = adequacy_harness(args.budget, bundle.free)
    human = (
        f"terms: {report.terms}\npairs checked: {report.pairs_checked}\n"
        f"normal forms: {sorted(str(n) for n in report.normal_forms)}\n"
        f"adequacy: {'pass' if report.ok else 'FAIL'}"
    )
    _emit(args, human, document("adequacy", report.to_json(), bundle=bundle.name))
    return OK if report.ok else FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clonal",
        description="Define simple type theories over clones; normalize, "
        "evaluate, and check equational proofs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--bundle", help="path to a bundle file")
        p.add_argument(
            "--variant", choices=("stlc", "bool", "gs"), default="bool",
            help="stock theory to use when no bundle file is given",
        )
        p.add_argument("--budget", type=int, default=2000, help="node/size budget")
        p.add_argument("--depth", type=int, default=4, help="enumeration depth")
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.add_argument("--witness", action="store_true", help="emit proof objects")
        p.add_argument("--seed", type=int, default=0, help="seed for sampled checks")
        p.add_argument("--context", default="", help='free variables, e.g. "x : b, f : b => b"')
        p.add_argument("--sort", default="b", help="sort of the input term(s)")

    p = sub.add_parser("check", help="well-formedness, clone laws, algebra laws")
    common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("normalize", help="eta-long beta-normal form")
    common(p)
    p.add_argument("term")
    p.add_argument(
        "--eta-long", action="store_true",
        help="always produce the full eta-long form (skip the plain base rewrite)",
    )
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("eval", help="interpret a closed term in the finite set model")
    common(p)
    p.add_argument("term")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("equal", help="decide provable equality with a witness")
    common(p)
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--search", action="store_true", help="bounded proof search")
    p.set_defaults(func=cmd_equal)

    p = sub.add_parser("provecheck", help="replay a serialized derivation")
    common(p)
    p.add_argument("file")
    p.set_defaults(func=cmd_provecheck)

    p = sub.add_parser("enumerate", help="closed or open terms up to a size bound")
    common(p)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("adequacy", help="set-model adequacy harness")
    common(p)
    p.set_defaults(func=cmd_adequacy)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return USAGE if e.code not in (0, None) else OK
    try:
        return args.func(args)
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return USAGE
    except FileNotFoundError as e:
        print(e, file=sys.stderr)
        return USAGE
    except CloneError as e:
        print(e, file=sys.stderr)
        return FAIL


if __name__ == "__main__":
    sys.exit(main())
