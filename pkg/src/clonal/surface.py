"""Textual syntax: sorts, terms, and theory bundle files.

Surface terms use named variables and named metavariables, resolved to
positional indices during elaboration; raw positional variables are
written #1, #2, ...  Application is juxtaposition: a variable-headed chain
is iterated lambda application, an operator-headed chain applies the
operator to the following atoms, and ``put v1 t`` selects the put operator
for the value label v1.  Binding abstraction is written ``abs x. t`` with
an optional sort annotation on the binder.

The bundle grammar (one declaration per line, LL(1)) is documented in
docs/bundle-grammar.md and exercised by the shipped bundle files.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .clones import CloneError, VariableClone
from .firstorder import (
    FoEquationSchema,
    FoOp,
    FoOpSchema,
    FoPresentation,
    FoSignature,
    FoVar,
    RewriteEq,
    RewriteSystem,
    SearchEq,
    TmClone,
    gs_canonical_form,
)
from .freealgebra import CloneApp, FreeAlgebra, FreeOp, FreeVar
from .secondorder import (
    MetaApp,
    MetaDecl,
    SoEquationSchema,
    SoOp,
    SoOpSchema,
    SoPresentation,
    SoSignature,
    SoVar,
)
from .sorts import Context, Sort, SortSet, SortVar, instantiate_sort, match_sort


class ParseError(CloneError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(f"{message} (line {line}, column {col})")
        self.line = line
        self.col = col


@dataclass
class Token:
    kind: str  # ident, num, punct, end
    text: str
    line: int
    col: int


_TOKEN = re.compile(
    r"(?P<ws>[ \t]+)|(?P<comment>--[^\n]*)|(?P<nl>\n)"
    r"|(?P<punct>=>|\|-|[()\[\],:;.~#])"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_']*|\*)"
    r"|(?P<num>[0-9]+)"
)


def tokenize(text: str) -> list[Token]:
    out = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        pos = m.end()
        if m.lastgroup == "nl":
            line += 1
            col = 1
            continue
        if m.lastgroup in ("ws", "comment"):
            col += len(m.group())
            continue
        out.append(Token(m.lastgroup, m.group(), line, col))
        col += len(m.group())
    out.append(Token("end", "", line, col))
    return out


class Tokens:
    def __init__(self, items: list[Token]):
        self.items = items
        self.pos = 0

    def peek(self) -> Token:
        return self.items[self.pos]

    def next(self) -> Token:
        tok = self.items[self.pos]
        if tok.kind != "end":
            self.pos += 1
        return tok

    def expect(self, text: str) -> Token:
        tok = self.next()
        if tok.text != text:
            raise ParseError(f"expected {text!r}, found {tok.text!r}", tok.line, tok.col)
        return tok

    def at(self, text: str) -> bool:
        return self.peek().text == text

    def take(self, text: str) -> bool:
        if self.at(text):
            self.next()
            return True
        return False

    def ident(self) -> Token:
        tok = self.next()
        if tok.kind != "ident":
            raise ParseError(f"expected a name, found {tok.text!r}", tok.line, tok.col)
        return tok


# --------------------------------------------------------------------------
# Sorts
# --------------------------------------------------------------------------


def parse_sort(ts: Tokens, sort_set: SortSet, params: tuple[str, ...] = ()):
    left = _sort_atom(ts, sort_set, params)
    if ts.take("=>"):
        if "=>" not in sort_set.formers:
            tok = ts.peek()
            raise ParseError("this sort set has no => former", tok.line, tok.col)
        right = parse_sort(ts, sort_set, params)
        return Sort("=>", (left, right))
    return left


def _sort_atom(ts: Tokens, sort_set: SortSet, params):
    if ts.take("("):
        inner = parse_sort(ts, sort_set, params)
        ts.expect(")")
        return inner
    tok = ts.ident()
    if tok.text in params:
        return SortVar(tok.text)
    if tok.text in sort_set.base:
        return Sort(tok.text)
    raise ParseError(f"unknown sort {tok.text!r}", tok.line, tok.col)


def sort_text(sort_set: SortSet, text: str) -> Sort:
    ts = Tokens(tokenize(text))
    s = parse_sort(ts, sort_set)
    if ts.peek().kind != "end":
        tok = ts.peek()
        raise ParseError(f"trailing input after sort: {tok.text!r}", tok.line, tok.col)
    return s


# --------------------------------------------------------------------------
# Raw term syntax
# --------------------------------------------------------------------------


@dataclass
class RName:
    name: str
    line: int
    col: int


@dataclass
class RRaw:
    index: int
    line: int
    col: int


@dataclass
class RLam:
    binder: str
    annotation: object  # Sort | None
    body: object
    line: int
    col: int


@dataclass
class RChain:
    items: list
    line: int
    col: int


def parse_term_syntax(ts: Tokens, sort_set: SortSet, params=()):
    tok = ts.peek()
    if tok.text == "abs":
        ts.next()
        binder = ts.ident()
        annotation = None
        if ts.take(":"):
            annotation = parse_sort(ts, sort_set, params)
        ts.expect(".")
        body = parse_term_syntax(ts, sort_set, params)
        return RLam(binder.text, annotation, body, tok.line, tok.col)
    items = []
    while True:
        nxt = ts.peek()
        if nxt.text == "(":
            ts.next()
            inner = parse_term_syntax(ts, sort_set, params)
            ts.expect(")")
            items.append(inner)
        elif nxt.text == "#":
            ts.next()
            num = ts.next()
            if num.kind != "num":
                raise ParseError("expected an index after #", num.line, num.col)
            items.append(RRaw(int(num.text), nxt.line, nxt.col))
        elif nxt.kind == "ident" and nxt.text != "abs":
            ts.next()
            items.append(RName(nxt.text, nxt.line, nxt.col))
        else:
            break
    if not items:
        raise ParseError(f"expected a term, found {tok.text!r}", tok.line, tok.col)
    if len(items) == 1:
        return items[0]
    return RChain(items, tok.line, tok.col)


def term_syntax(sort_set: SortSet, text: str, params=()):
    ts = Tokens(tokenize(text))
    node = parse_term_syntax(ts, sort_set, params)
    if ts.peek().kind != "end":
        tok = ts.peek()
        raise ParseError(f"trailing input after term: {tok.text!r}", tok.line, tok.col)
    return node


# --------------------------------------------------------------------------
# Elaboration
# --------------------------------------------------------------------------


@dataclass
class Elaborator:
    """Turns raw syntax into checked terms against an expected sort.

    ``mode`` selects the target representation: "free" builds free-algebra
    terms over the bundle's base clone, "so" second-order terms (metavariables
    allowed), "fo" first-order terms of the base signature.
    """

    bundle: "TheoryBundle"
    mode: str
    names: list = field(default_factory=list)  # binder names, innermost last
    ctx_sorts: list = field(default_factory=list)
    metas: list = field(default_factory=list)  # (name, MetaDecl)

    def _fail(self, node, message):
        raise ParseError(message, getattr(node, "line", 0), getattr(node, "col", 0))

    # name resolution ------------------------------------------------------

    def _lookup_var(self, name: str):
        for i in range(len(self.names), 0, -1):
            if self.names[i - 1] == name:
                return i
        return None

    def _lookup_meta(self, name: str):
        for i, (n, _) in enumerate(self.metas, start=1):
            if n == name:
                return i
        return None

    def _var_term(self, i: int):
        return {"free": FreeVar, "so": SoVar, "fo": FoVar}[self.mode](i)

    # entry points ----------------------------------------------------------

    def check(self, node, expected: Sort):
        got = self._check(node, expected)
        return got

    def _check(self, node, expected):
        match node:
            case RLam(binder=x, annotation=ann, body=body):
                if self.mode == "fo":
                    self._fail(node, "binding abstraction is not first-order")
                if not (getattr(expected, "former", None) == "=>" and len(expected.args) == 2):
                    self._fail(node, f"abstraction checked at non-arrow sort {expected}")
                a, b = expected.args
                if ann is not None and ann != a:
                    self._fail(node, f"binder annotated {ann}, expected {a}")
                self.names.append(x)
                self.ctx_sorts.append(a)
                try:
                    inner = self._check(body, b)
                finally:
                    self.names.pop()
                    self.ctx_sorts.pop()
                return self._make_abs(a, b, inner)
            case RName() | RRaw():
                term, got = self._synth_atom(node)
                if got != expected:
                    self._fail(node, f"term has sort {got}, expected {expected}")
                return term
            case RChain(items=items):
                return self._check_chain(node, items, expected)
        self._fail(node, "unrecognized term")

    def synth(self, node):
        match node:
            case RName() | RRaw():
                return self._synth_atom(node)
            case RLam(annotation=ann, body=body, binder=x):
                if ann is None:
                    self._fail(node, "cannot infer the sort of an unannotated abstraction")
                self.names.append(x)
                self.ctx_sorts.append(ann)
                try:
                    inner, bsort = self.synth(body)
                finally:
                    self.names.pop()
                    self.ctx_sorts.pop()
                return self._make_abs(ann, bsort, inner), Sort("=>", (ann, bsort))
            case RChain(items=items):
                return self._synth_chain(node, items)
        self._fail(node, "unrecognized term")

    # atoms -----------------------------------------------------------------

    def _synth_atom(self, node):
        if isinstance(node, RRaw):
            if not 1 <= node.index <= len(self.ctx_sorts):
                self._fail(node, f"#{node.index} out of range")
            return self._var_term(node.index), self.ctx_sorts[node.index - 1]
        if isinstance(node, RLam):
            return self.synth(node)
        if isinstance(node, RChain):
            return self._synth_chain(node, node.items)
        name = node.name
        i = self._lookup_var(name)
        if i is not None:
            return self._var_term(i), self.ctx_sorts[i - 1]
        if self.mode == "so":
            m = self._lookup_meta(name)
            if m is not None:
                decl = self.metas[m - 1][1]
                if len(decl.ctx) != 0:
                    self._fail(node, f"metavariable {name} takes {len(decl.ctx)} arguments")
                return MetaApp(m, ()), decl.sort
        got = self._operator(node, name, [])
        if got is None:
            self._fail(node, f"unknown name {name!r}")
        return got

    # chains ------------------------------------------------------------------

    def _check_chain(self, node, items, expected):
        head = items[0]
        if isinstance(head, RName):
            name = head.name
            if self._lookup_var(name) is None:
                if self.mode == "so" and self._lookup_meta(name) is not None:
                    term, got = self._metavar(node, name, items[1:])
                    if got != expected:
                        self._fail(node, f"term has sort {got}, expected {expected}")
                    return term
                got = self._operator(node, name, items[1:], expected)
                if got is not None:
                    term, sort = got
                    if sort != expected:
                        self._fail(node, f"term has sort {sort}, expected {expected}")
                    return term
                self._fail(head, f"unknown name {name!r}")
        # lambda application chain
        return self._app_chain(node, items, expected)

    def _synth_chain(self, node, items):
        head = items[0]
        if isinstance(head, RName) and self._lookup_var(head.name) is None:
            if self.mode == "so" and self._lookup_meta(head.name) is not None:
                return self._metavar(node, head.name, items[1:])
            got = self._operator(node, head.name, items[1:])
            if got is not None:
                return got
            self._fail(head, f"unknown name {head.name!r}")
        term, sort = self.synth(head)
        for arg in items[1:]:
            if not (sort.former == "=>" and len(sort.args) == 2):
                self._fail(node, f"applying a term of non-arrow sort {sort}")
            a, b = sort.args
            arg_term = self._check(arg, a)
            term = self._make_app(a, b, term, arg_term)
            sort = b
        return term, sort

    def _app_chain(self, node, items, expected):
        # elaborate by synthesizing the head when possible; otherwise
        # synthesize the arguments and build the arrow backwards
        try:
            term, sort = self._synth_chain(node, items)
        except ParseError:
            if len(items) != 2:
                raise
            arg_term, arg_sort = self.synth(items[1])
            fun = self._check(items[0], Sort("=>", (arg_sort, expected)))
            return self._make_app(arg_sort, expected, fun, arg_term)
        if sort != expected:
            self._fail(node, f"term has sort {sort}, expected {expected}")
        return term

    # helpers -----------------------------------------------------------------

    def _make_app(self, a, b, fun, arg):
        if self.mode == "free":
            return FreeOp("app", (a, b), ((Context(()), fun), (Context(()), arg)))
        if self.mode == "so":
            return SoOp("app", (a, b), ((Context(()), fun), (Context(()), arg)))
        self._fail_mode()

    def _make_abs(self, a, b, body):
        if self.mode == "free":
            return FreeOp("abs", (a, b), ((Context((a,)), body),))
        if self.mode == "so":
            return SoOp("abs", (a, b), ((Context((a,)), body),))
        self._fail_mode()

    def _fail_mode(self):
        raise ParseError("lambda syntax is not available at first order")

    def _metavar(self, node, name, arg_nodes):
        m = self._lookup_meta(name)
        decl = self.metas[m - 1][1]
        if len(arg_nodes) != len(decl.ctx):
            self._fail(node, f"metavariable {name} takes {len(decl.ctx)} arguments")
        args = tuple(self._check(a, s) for a, s in zip(arg_nodes, decl.ctx))
        return MetaApp(m, args), decl.sort

    def _operator(self, node, name, arg_nodes, expected=None):
        """Resolve an operator-headed chain, instantiating sort parameters
        by matching the declared result against the expected sort and the
        argument templates against synthesized arguments."""
        bundle = self.bundle
        label = None
        if self.mode in ("free", "fo") or True:
            # put takes its value label as the first atom
            if (
                name == "put"
                and arg_nodes
                and isinstance(arg_nodes[0], RName)
                and bundle.base is not None
                and any(
                    o.name == f"put_{arg_nodes[0].name}"
                    for o in bundle.base.signature.operators
                )
            ):
                label = arg_nodes[0].name
                name = f"put_{label}"
                arg_nodes = arg_nodes[1:]

        schema = None
        second_order = False
        if self.mode in ("so", "free"):
            for o in bundle.surface.signature.operators:
                if o.name == name:
                    schema = o
                    second_order = True
                    break
        if schema is None and bundle.base is not None and self.mode in ("fo", "free"):
            for o in bundle.base.signature.operators:
                if o.name == name:
                    schema = o
                    break
        if schema is None:
            return None

        if second_order:
            return self._so_operator(node, schema, arg_nodes, expected)
        return self._fo_operator(node, schema, arg_nodes, expected)

    def _bind_params(self, node, schema, result_template, expected):
        binding: dict = {}
        if expected is not None:
            if not match_sort(result_template, expected, binding):
                self._fail(
                    node,
                    f"operator {schema.name} produces {result_template}, "
                    f"which does not match {expected}",
                )
        return binding

    def _elaborate_args(self, node, schema, arg_nodes, templates, binding):
        """Elaborate operator arguments in dependency order: check the ones
        whose sort templates are already determined, synthesize one of the
        rest to bind more parameters, repeat."""
        results: dict[int, object] = {}
        pending = list(range(len(arg_nodes)))
        while pending:
            progressed = False
            for i in list(pending):
                if sort_closed(templates[i], binding, schema.params):
                    results[i] = self._check(
                        arg_nodes[i], instantiate_sort(templates[i], binding)
                    )
                    pending.remove(i)
                    progressed = True
            if not pending:
                break
            if progressed:
                continue
            for i in list(pending):
                try:
                    term, got = self.synth(arg_nodes[i])
                except ParseError:
                    continue
                if not match_sort(templates[i], got, binding):
                    self._fail(
                        arg_nodes[i], f"argument sort {got} does not fit {templates[i]}"
                    )
                results[i] = term
                pending.remove(i)
                progressed = True
                break
            if not progressed:
                self._fail(
                    node,
                    f"cannot determine the sorts of {schema.name}'s arguments; "
                    "annotate a binder",
                )
        missing = [p for p in schema.params if p not in binding]
        if missing:
            self._fail(node, f"cannot infer sort parameters {missing} of {schema.name}")
        return [results[i] for i in range(len(arg_nodes))]

    def _fo_operator(self, node, schema, arg_nodes, expected):
        if len(arg_nodes) != len(schema.arg_sorts):
            self._fail(node, f"operator {schema.name} takes {len(schema.arg_sorts)} arguments")
        binding = self._bind_params(node, schema, schema.result, expected)
        args = tuple(
            self._elaborate_args(node, schema, arg_nodes, list(schema.arg_sorts), binding)
        )
        sort_args = tuple(binding[p] for p in schema.params)
        result = instantiate_sort(schema.result, binding)
        if self.mode == "fo":
            return FoOp(schema.name, sort_args, args), result
        element_ctx, element_sort = self.bundle.base.signature.arity(schema.name, sort_args)
        element = FoOp(
            schema.name, sort_args, tuple(FoVar(i) for i in range(1, len(element_ctx) + 1))
        )
        return CloneApp(element, element_ctx, element_sort, args), result

    def _so_operator(self, node, schema, arg_nodes, expected):
        if len(arg_nodes) != len(schema.binders):
            self._fail(node, f"operator {schema.name} takes {len(schema.binders)} arguments")
        binding = self._bind_params(node, schema, schema.result, expected)
        # chain syntax covers non-binding argument positions; binding ones
        # arrive only through the lambda syntax, which builds abs directly
        templates = []
        for arg_node, (binder_templates, body_template) in zip(arg_nodes, schema.binders):
            if binder_templates:
                self._fail(
                    arg_node,
                    f"operator {schema.name} binds variables; use abs-style syntax",
                )
            templates.append(body_template)
        elaborated = self._elaborate_args(node, schema, arg_nodes, templates, binding)
        args = tuple((Context(()), term) for term in elaborated)
        sort_args = tuple(binding[p] for p in schema.params)
        result = instantiate_sort(schema.result, binding)
        ctor = SoOp if self.mode == "so" else FreeOp
        return ctor(schema.name, sort_args, tuple(args)), result


def sort_closed(template, binding, params) -> bool:
    from .sorts import sort_vars

    return all(v in binding for v in sort_vars(template) if v in params)


# --------------------------------------------------------------------------
# The abs/app special case: surface `abs x. t` elaborates through _check /
# synth above; chains headed by `app` resolve through the operator path.
# --------------------------------------------------------------------------


def parse_context(bundle: "TheoryBundle", text: str) -> tuple[Context, list[str]]:
    """Parse "x : b, f : b => b" into a context plus its variable names."""
    if not text.strip():
        return Context(()), []
    ts = Tokens(tokenize(text))
    names, sorts = [], []
    while True:
        name = ts.ident()
        ts.expect(":")
        sorts.append(parse_sort(ts, bundle.sort_set))
        names.append(name.text)
        if not ts.take(","):
            break
    if ts.peek().kind != "end":
        tok = ts.peek()
        raise ParseError(f"trailing input in context: {tok.text!r}", tok.line, tok.col)
    return Context(tuple(sorts)), names


def parse_term(
    bundle: "TheoryBundle",
    text: str,
    expected: Sort,
    context: Context = Context(()),
    names: list[str] | None = None,
):
    """Parse and elaborate a surface term as a free-algebra term."""
    node = term_syntax(bundle.sort_set, text)
    elab = Elaborator(bundle, "free")
    elab.ctx_sorts = list(context)
    elab.names = list(names) if names is not None else [f"x{i}" for i in range(1, len(context) + 1)]
    return elab.check(node, expected)


# --------------------------------------------------------------------------
# Printing
# --------------------------------------------------------------------------


def render_sort(s: Sort) -> str:
    return str(s)


def render_free(t, names: list[str]) -> str:
    """Deterministic human syntax; element applications are resugared into
    operator applications."""

    def fresh(used):
        i = len(used) + 1
        while f"x{i}" in used:
            i += 1
        return f"x{i}"

    def atom(s: str) -> str:
        return f"({s})" if " " in s else s

    def go(term, env) -> str:
        match term:
            case FreeVar(index=i):
                return env[i - 1]
            case FreeOp(name="app", args=((_, f), (_, a))):
                return f"{_head(go(f, env))} {atom(go(a, env))}"
            case FreeOp(name="abs", sort_args=(A, _), args=((_, body),)):
                x = fresh(env)
                return f"abs {x} : {A}. {go(body, env + [x])}"
            case FreeOp(name=name, args=args):
                rendered = " ".join(atom(go(b, env)) for _, b in args)
                return f"{name} {rendered}" if rendered else name
            case CloneApp(element=e, args=args):
                return render_element(e, [go(a, env) for a in args])
        raise CloneError(f"cannot render {term!r}")

    def _head(s: str) -> str:
        # keep application chains left-grouped and unambiguous
        return f"({s})" if s.startswith("abs ") else s

    return go(t, list(names))


def render_element(e, pieces: list[str]) -> str:
    """A base element applied to rendered arguments, in operator syntax."""
    if isinstance(e, int):
        return pieces[e - 1]
    match e:
        case FoVar(index=i):
            return pieces[i - 1]
        case FoOp(name=name, args=args):
            rendered = [render_element(a, pieces) for a in args]
            rendered = [f"({r})" if " " in r else r for r in rendered]
            if name.startswith("put_"):
                label = name.removeprefix("put_")
                return f"put {label} {rendered[0]}"
            body = " ".join(rendered)
            return f"{name} {body}" if body else name
    raise CloneError(f"cannot render element {e!r}")


def render_fo(t, names: list[str]) -> str:
    return render_element(t, list(names))


# --------------------------------------------------------------------------
# Bundles
# --------------------------------------------------------------------------


@dataclass
class TheoryBundle:
    """A sort set, an optional first-order base presentation with its
    equality strategy, and the second-order surface presentation, wired
    into a free algebra."""

    name: str
    sort_set: SortSet
    surface: SoPresentation
    base: FoPresentation | None
    base_clone: object
    free: FreeAlgebra
    values: tuple = ()


def _nbe_strategy(free, ctx, sort, t):
    from .nbe import nbe_normalize

    return nbe_normalize(free, ctx, sort, t)


def stock_bundle(variant: str, values: tuple = ("v1", "v2")) -> TheoryBundle:
    from .firstorder import bool_clone, bool_presentation, global_state_presentation, gs_clone
    from .secondorder import stlc_presentation

    surface = stlc_presentation()
    sort_set = surface.signature.sort_set
    if variant == "stlc":
        base_clone = VariableClone(sort_set)
        free = FreeAlgebra(surface, base_clone, _nbe_strategy)
        return TheoryBundle("stlc", sort_set, surface, None, base_clone, free)
    if variant == "bool":
        base_clone = bool_clone()
        free = FreeAlgebra(surface, base_clone, _nbe_strategy)
        return TheoryBundle(
            "stlc_bool", sort_set, surface, base_clone.presentation, base_clone, free
        )
    if variant == "gs":
        base_clone = gs_clone(values)
        free = FreeAlgebra(surface, base_clone, _nbe_strategy)
        return TheoryBundle(
            "stlc_gs", sort_set, surface, base_clone.presentation, base_clone, free,
            values=values,
        )
    raise CloneError(f"unknown variant {variant!r}")


def parse_bundle(text: str) -> TheoryBundle:
    ts = Tokens(tokenize(text))
    ts.expect("bundle")
    name = ts.ident().text

    ts.expect("sorts")
    base_names = [ts.ident().text]
    while ts.peek().kind == "ident" and ts.peek().text not in (
        "typeformers", "base", "surface", "strategy", "end",
    ):
        base_names.append(ts.ident().text)
    formers: list[str] = []
    if ts.take("typeformers"):
        while ts.peek().text == "=>":
            ts.next()
            formers.append("=>")
    sort_set = SortSet(name, tuple(base_names), tuple(formers))

    base_pres = None
    base_strategy = "structural"
    surface_pres = None
    if ts.at("base"):
        ts.next()
        base_name = ts.ident().text
        ops, eqs = _parse_fo_items(ts, sort_set)
        base_pres = FoPresentation(base_name, FoSignature(sort_set, tuple(ops)), tuple(eqs))
    if ts.at("surface"):
        ts.next()
        so_name = ts.ident().text
        ops, eqs = _parse_so_items(ts, sort_set, base_pres)
        surface_pres = SoPresentation(so_name, SoSignature(sort_set, tuple(ops)), tuple(eqs))
    if surface_pres is None:
        raise ParseError("bundle has no surface presentation", ts.peek().line, 0)

    while ts.at("strategy"):
        ts.next()
        target = ts.ident().text
        tier = ts.ident().text
        if target == "base":
            base_strategy = tier
    ts.expect("end")

    if base_pres is None:
        base_clone = VariableClone(sort_set)
        values: tuple = ()
    else:
        values = tuple(
            o.name.removeprefix("put_")
            for o in base_pres.signature.operators
            if o.name.startswith("put_")
        )
        if base_strategy == "rewrite":
            base_clone = TmClone(base_pres, RewriteEq(RewriteSystem(base_pres)))
        elif base_strategy == "state_table":
            from .firstorder import CanonicalEq

            vals = values
            base_clone = TmClone(
                base_pres,
                CanonicalEq(lambda c, s, t: gs_canonical_form(vals, c, s, t)),
            )
        elif base_strategy == "search":
            base_clone = TmClone(base_pres, SearchEq())
        elif base_strategy == "structural":
            base_clone = TmClone(base_pres)
        else:
            raise ParseError(f"unknown strategy {base_strategy!r}")
    free = FreeAlgebra(surface_pres, base_clone, _nbe_strategy)
    return TheoryBundle(name, sort_set, surface_pres, base_pres, base_clone, free, values)


def _parse_params(ts: Tokens) -> tuple[str, ...]:
    if not ts.take("["):
        return ()
    params = [ts.ident().text]
    while ts.take(","):
        params.append(ts.ident().text)
    ts.expect("]")
    return tuple(params)


def _parse_sort_list(ts: Tokens, sort_set, params, stop: str):
    sorts = []
    while not ts.at(stop):
        sorts.append(parse_sort(ts, sort_set, params))
        if not ts.take(","):
            break
    return sorts


def _parse_fo_items(ts: Tokens, sort_set: SortSet):
    ops, eqs = [], []
    while True:
        if ts.at("op"):
            ts.next()
            name = ts.ident().text
            params = _parse_params(ts)
            ts.expect(":")
            args = _parse_sort_list(ts, sort_set, params, ";")
            ts.expect(";")
            result = parse_sort(ts, sort_set, params)
            ops.append(FoOpSchema(name, params, tuple(args), result))
        elif ts.at("eq"):
            sig = FoSignature(sort_set, tuple(ops))
            eqs.append(_parse_fo_equation(ts, sort_set, sig))
        else:
            return ops, eqs


def _parse_fo_equation(ts: Tokens, sort_set, sig: FoSignature):
    ts.expect("eq")
    name = ts.ident().text
    params = _parse_params(ts)
    ts.expect(":")
    var_names, var_sorts = _parse_bindings(ts, sort_set, params)
    ts.expect("|-")
    lhs_node = parse_term_syntax(ts, sort_set, params)
    ts.expect("~")
    rhs_node = parse_term_syntax(ts, sort_set, params)
    ts.expect(":")
    sort = parse_sort(ts, sort_set, params)

    shell = TheoryBundle(
        "eq", sort_set, SoPresentation("none", SoSignature(sort_set, ()), ()),
        FoPresentation("sig", sig, ()), None, None,
    )
    elab = Elaborator(shell, "fo")
    elab.names = var_names
    elab.ctx_sorts = var_sorts
    lhs = elab.check(lhs_node, sort)
    rhs = elab.check(rhs_node, sort)
    return FoEquationSchema(name, params, tuple(var_sorts), sort, lhs, rhs)


def _parse_bindings(ts: Tokens, sort_set, params):
    names, sorts = [], []
    while not ts.at("|-"):
        names.append(ts.ident().text)
        ts.expect(":")
        sorts.append(parse_sort(ts, sort_set, params))
        if not ts.take(","):
            break
    return names, sorts


def _parse_so_items(ts: Tokens, sort_set: SortSet, base_pres):
    ops, eqs = [], []
    while True:
        if ts.at("op"):
            ts.next()
            name = ts.ident().text
            params = _parse_params(ts)
            ts.expect(":")
            binders = []
            while ts.at("("):
                ts.next()
                binder_sorts = _parse_sort_list(ts, sort_set, params, ";")
                ts.expect(";")
                body_sort = parse_sort(ts, sort_set, params)
                ts.expect(")")
                binders.append((tuple(binder_sorts), body_sort))
            ts.expect(";")
            result = parse_sort(ts, sort_set, params)
            ops.append(SoOpSchema(name, params, tuple(binders), result))
        elif ts.at("eq"):
            sig = SoSignature(sort_set, tuple(ops))
            eqs.append(_parse_so_equation(ts, sort_set, sig, base_pres))
        else:
            return ops, eqs


def _parse_so_equation(ts: Tokens, sort_set, sig: SoSignature, base_pres):
    ts.expect("eq")
    name = ts.ident().text
    params = _parse_params(ts)
    ts.expect(":")
    meta_names, meta_decls = [], []
    while not ts.at("|-"):
        mname = ts.ident().text
        ts.expect(":")
        ts.expect("(")
        arg_sorts = _parse_sort_list(ts, sort_set, params, ";")
        ts.expect(";")
        msort = parse_sort(ts, sort_set, params)
        ts.expect(")")
        meta_names.append(mname)
        meta_decls.append(MetaDecl(Context(tuple(arg_sorts)), msort))
        if not ts.take(","):
            break
    ts.expect("|-")
    lhs_node = parse_term_syntax(ts, sort_set, params)
    ts.expect("~")
    rhs_node = parse_term_syntax(ts, sort_set, params)
    ts.expect(":")
    sort = parse_sort(ts, sort_set, params)

    shell = TheoryBundle(
        "eq", sort_set, SoPresentation("shell", sig, ()), base_pres, None, None,
    )
    elab = Elaborator(shell, "so")
    elab.metas = list(zip(meta_names, meta_decls))
    lhs = elab.check(lhs_node, sort)
    rhs = elab.check(rhs_node, sort)
    metactx_templates = tuple((tuple(d.ctx.entries), d.sort) for d in meta_decls)
    return SoEquationSchema(name, params, metactx_templates, sort, lhs, rhs)
