"""JSON forms for terms and derivations.

Every top-level document carries a schema_version; round-tripping is
bit-exact, so serialized derivations replay through the checkers
unchanged.  Indices are 1-based, matching the in-memory representation.
"""

from __future__ import annotations

from .clones import CloneError
from .firstorder import FoAxiom, FoCong, FoOp, FoRefl, FoSym, FoTrans, FoVar
from .freealgebra import (
    CloneApp,
    FAxiom,
    FCongClone,
    FCongOp,
    FRefl,
    FSubstLaw,
    FSym,
    FTrans,
    FVarLaw,
    FreeOp,
    FreeVar,
)
from .secondorder import MetaApp, SoOp, SoVar
from .sorts import Context, Sort

SCHEMA_VERSION = 1


class JsonError(CloneError):
    pass


def sort_to_json(s: Sort) -> dict:
    if not s.args:
        return {"base": s.former}
    return {"former": s.former, "args": [sort_to_json(a) for a in s.args]}


def sort_from_json(data: dict) -> Sort:
    if "base" in data:
        return Sort(data["base"])
    return Sort(data["former"], tuple(sort_from_json(a) for a in data["args"]))


def context_to_json(c: Context) -> list:
    return [sort_to_json(s) for s in c]


def context_from_json(data: list) -> Context:
    return Context(tuple(sort_from_json(s) for s in data))


# --------------------------------------------------------------------------
# First-order terms and derivations
# --------------------------------------------------------------------------


def fo_term_to_json(t) -> dict:
    match t:
        case FoVar(index=i):
            return {"kind": "var", "index": i}
        case FoOp(name=name, sort_args=sargs, args=args):
            return {
                "kind": "op",
                "name": name,
                "sort_args": [sort_to_json(s) for s in sargs],
                "args": [fo_term_to_json(a) for a in args],
            }
    raise JsonError(f"not a first-order term: {t!r}")


def fo_term_from_json(data: dict):
    match data["kind"]:
        case "var":
            return FoVar(data["index"])
        case "op":
            return FoOp(
                data["name"],
                tuple(sort_from_json(s) for s in data["sort_args"]),
                tuple(fo_term_from_json(a) for a in data["args"]),
            )
    raise JsonError(f"unknown term kind {data['kind']!r}")


def fo_derivation_to_json(d) -> dict:
    match d:
        case FoRefl(term=t):
            return {"rule": "refl", "term": fo_term_to_json(t)}
        case FoSym(child=c):
            return {"rule": "sym", "children": [fo_derivation_to_json(c)]}
        case FoTrans(left=l, right=r):
            return {
                "rule": "trans",
                "children": [fo_derivation_to_json(l), fo_derivation_to_json(r)],
            }
        case FoCong(op=op, sort_args=sargs, children=children):
            return {
                "rule": "cong",
                "op": op,
                "sort_args": [sort_to_json(s) for s in sargs],
                "children": [fo_derivation_to_json(c) for c in children],
            }
        case FoAxiom(equation=eq, sort_args=sargs, children=children):
            return {
                "rule": "axiom",
                "equation": eq,
                "sort_args": [sort_to_json(s) for s in sargs],
                "children": [fo_derivation_to_json(c) for c in children],
            }
    raise JsonError(f"not a derivation node: {d!r}")


def fo_derivation_from_json(data: dict):
    match data["rule"]:
        case "refl":
            return FoRefl(fo_term_from_json(data["term"]))
        case "sym":
            return FoSym(fo_derivation_from_json(data["children"][0]))
        case "trans":
            l, r = data["children"]
            return FoTrans(fo_derivation_from_json(l), fo_derivation_from_json(r))
        case "cong":
            return FoCong(
                data["op"],
                tuple(sort_from_json(s) for s in data["sort_args"]),
                tuple(fo_derivation_from_json(c) for c in data["children"]),
            )
        case "axiom":
            return FoAxiom(
                data["equation"],
                tuple(sort_from_json(s) for s in data["sort_args"]),
                tuple(fo_derivation_from_json(c) for c in data["children"]),
            )
    raise JsonError(f"unknown rule {data['rule']!r}")


# --------------------------------------------------------------------------
# Second-order terms
# --------------------------------------------------------------------------


def so_term_to_json(t) -> dict:
    match t:
        case SoVar(index=i):
            return {"kind": "var", "index": i}
        case MetaApp(index=i, args=args):
            return {"kind": "meta", "index": i, "args": [so_term_to_json(a) for a in args]}
        case SoOp(name=name, sort_args=sargs, args=args):
            return {
                "kind": "op",
                "name": name,
                "sort_args": [sort_to_json(s) for s in sargs],
                "args": [
                    {"binds": context_to_json(binder), "body": so_term_to_json(body)}
                    for binder, body in args
                ],
            }
    raise JsonError(f"not a second-order term: {t!r}")


def so_term_from_json(data: dict):
    match data["kind"]:
        case "var":
            return SoVar(data["index"])
        case "meta":
            return MetaApp(data["index"], tuple(so_term_from_json(a) for a in data["args"]))
        case "op":
            return SoOp(
                data["name"],
                tuple(sort_from_json(s) for s in data["sort_args"]),
                tuple(
                    (context_from_json(a["binds"]), so_term_from_json(a["body"]))
                    for a in data["args"]
                ),
            )
    raise JsonError(f"unknown term kind {data['kind']!r}")


# --------------------------------------------------------------------------
# Free terms and derivations
# --------------------------------------------------------------------------


def _element_to_json(e) -> dict:
    if isinstance(e, int):
        return {"kind": "index", "value": e}
    return fo_term_to_json(e)


def _element_from_json(data: dict):
    if data["kind"] == "index":
        return data["value"]
    return fo_term_from_json(data)


def free_term_to_json(t) -> dict:
    match t:
        case FreeVar(index=i):
            return {"kind": "var", "index": i}
        case CloneApp(element=e, arity_ctx=actx, arity_sort=asort, args=args):
            return {
                "kind": "element",
                "element": _element_to_json(e),
                "arity_ctx": context_to_json(actx),
                "arity_sort": sort_to_json(asort),
                "args": [free_term_to_json(a) for a in args],
            }
        case FreeOp(name=name, sort_args=sargs, args=args):
            return {
                "kind": "op",
                "name": name,
                "sort_args": [sort_to_json(s) for s in sargs],
                "args": [
                    {"binds": context_to_json(binder), "body": free_term_to_json(body)}
                    for binder, body in args
                ],
            }
    raise JsonError(f"not a free term: {t!r}")


def free_term_from_json(data: dict):
    match data["kind"]:
        case "var":
            return FreeVar(data["index"])
        case "element":
            return CloneApp(
                _element_from_json(data["element"]),
                context_from_json(data["arity_ctx"]),
                sort_from_json(data["arity_sort"]),
                tuple(free_term_from_json(a) for a in data["args"]),
            )
        case "op":
            return FreeOp(
                data["name"],
                tuple(sort_from_json(s) for s in data["sort_args"]),
                tuple(
                    (context_from_json(a["binds"]), free_term_from_json(a["body"]))
                    for a in data["args"]
                ),
            )
    raise JsonError(f"unknown term kind {data['kind']!r}")


def free_derivation_to_json(d) -> dict:
    match d:
        case FRefl(term=t):
            return {"rule": "refl", "term": free_term_to_json(t)}
        case FSym(child=c):
            return {"rule": "sym", "children": [free_derivation_to_json(c)]}
        case FTrans(left=l, right=r):
            return {
                "rule": "trans",
                "children": [free_derivation_to_json(l), free_derivation_to_json(r)],
            }
        case FCongClone(element=e, arity_ctx=actx, arity_sort=asort, children=children):
            return {
                "rule": "cong_element",
                "element": _element_to_json(e),
                "arity_ctx": context_to_json(actx),
                "arity_sort": sort_to_json(asort),
                "children": [free_derivation_to_json(c) for c in children],
            }
        case FCongOp(name=name, sort_args=sargs, children=children):
            return {
                "rule": "cong_op",
                "op": name,
                "sort_args": [sort_to_json(s) for s in sargs],
                "children": [free_derivation_to_json(c) for c in children],
            }
        case FAxiom(equation=eq, sort_args=sargs, children=children):
            return {
                "rule": "axiom",
                "equation": eq,
                "sort_args": [sort_to_json(s) for s in sargs],
                "children": [free_derivation_to_json(c) for c in children],
            }
        case FVarLaw(index=i, arg_ctx=actx, args=args):
            return {
                "rule": "var_collapse",
                "index": i,
                "arg_ctx": context_to_json(actx),
                "args": [free_term_to_json(a) for a in args],
            }
        case FSubstLaw(
            element=e,
            element_ctx=ectx,
            element_sort=esort,
            subst_components=comps,
            arg_ctx=actx,
            args=args,
        ):
            return {
                "rule": "subst_collapse",
                "element": _element_to_json(e),
                "element_ctx": context_to_json(ectx),
                "element_sort": sort_to_json(esort),
                "components": [_element_to_json(c) for c in comps],
                "arg_ctx": context_to_json(actx),
                "args": [free_term_to_json(a) for a in args],
            }
    raise JsonError(f"not a derivation node: {d!r}")


def free_derivation_from_json(data: dict):
    match data["rule"]:
        case "refl":
            return FRefl(free_term_from_json(data["term"]))
        case "sym":
            return FSym(free_derivation_from_json(data["children"][0]))
        case "trans":
            l, r = data["children"]
            return FTrans(free_derivation_from_json(l), free_derivation_from_json(r))
        case "cong_element":
            return FCongClone(
                _element_from_json(data["element"]),
                context_from_json(data["arity_ctx"]),
                sort_from_json(data["arity_sort"]),
                tuple(free_derivation_from_json(c) for c in data["children"]),
            )
        case "cong_op":
            return FCongOp(
                data["op"],
                tuple(sort_from_json(s) for s in data["sort_args"]),
                tuple(free_derivation_from_json(c) for c in data["children"]),
            )
        case "axiom":
            return FAxiom(
                data["equation"],
                tuple(sort_from_json(s) for s in data["sort_args"]),
                tuple(free_derivation_from_json(c) for c in data["children"]),
            )
        case "var_collapse":
            return FVarLaw(
                data["index"],
                context_from_json(data["arg_ctx"]),
                tuple(free_term_from_json(a) for a in data["args"]),
            )
        case "subst_collapse":
            return FSubstLaw(
                _element_from_json(data["element"]),
                context_from_json(data["element_ctx"]),
                sort_from_json(data["element_sort"]),
                tuple(_element_from_json(c) for c in data["components"]),
                context_from_json(data["arg_ctx"]),
                tuple(free_term_from_json(a) for a in data["args"]),
            )
    raise JsonError(f"unknown rule {data['rule']!r}")


# --------------------------------------------------------------------------
# Documents
# --------------------------------------------------------------------------


def document(kind: str, payload: dict, **extra) -> dict:
    doc = {"schema_version": SCHEMA_VERSION, "kind": kind}
    doc.update(extra)
    doc["payload"] = payload
    return doc


def load_document(data: dict, kind: str | None = None) -> dict:
    if data.get("schema_version") != SCHEMA_VERSION:
        raise JsonError(f"unsupported schema version {data.get('schema_version')!r}")
    if kind is not None and data.get("kind") != kind:
        raise JsonError(f"expected a {kind!r} document, got {data.get('kind')!r}")
    return data["payload"]
