"""First-order signatures, terms, equational logic, rewriting, presented clones.

Operators are declared as schemas: a schema with no sort parameters is an
ordinary operator, while e.g. an if-then-else family indexed by its result
sort carries one parameter, instantiated lazily at the sorts in use.  Terms
store the chosen sort arguments on every operator node, so checking never
has to infer them.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .clones import Clone, CloneError, Substitution
from .sorts import (
    Context,
    Sort,
    SortSet,
    SortVar,
    instantiate_sort,
    match_sort,
)


class FoSortError(CloneError):
    """Ill-sorted first-order term; carries the path to the offending node."""

    def __init__(self, message: str, path: tuple[int, ...] = ()):
        super().__init__(f"{message} (at path {list(path)})")
        self.path = path


# --------------------------------------------------------------------------
# Terms
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class FoVar:
    index: int  # 1-based position in the context

    def __str__(self) -> str:
        return f"x{self.index}"


@dataclass(frozen=True)
class FoOp:
    name: str
    sort_args: tuple[Sort, ...]
    args: tuple["FoTerm", ...]

    def __str__(self) -> str:
        inst = "" if not self.sort_args else "[" + ",".join(map(str, self.sort_args)) + "]"
        return f"{self.name}{inst}({', '.join(map(str, self.args))})"


FoTerm = FoVar | FoOp


def fo_size(t: FoTerm) -> int:
    if isinstance(t, FoVar):
        return 1
    return 1 + sum(fo_size(a) for a in t.args)


def op(name: str, *args: FoTerm, sorts: tuple[Sort, ...] = ()) -> FoOp:
    return FoOp(name, sorts, tuple(args))


# --------------------------------------------------------------------------
# Signatures and presentations
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class FoOpSchema:
    """An operator family: concrete when ``params`` is empty."""

    name: str
    params: tuple[str, ...]
    arg_sorts: tuple  # sort templates, may contain SortVar
    result: object  # sort template

    def arity(self, sort_args: tuple[Sort, ...]) -> tuple[Context, Sort]:
        if len(sort_args) != len(self.params):
            raise FoSortError(
                f"operator {self.name} expects {len(self.params)} sort arguments, "
                f"got {len(sort_args)}"
            )
        binding = dict(zip(self.params, sort_args))
        args = Context(tuple(instantiate_sort(s, binding) for s in self.arg_sorts))
        return args, instantiate_sort(self.result, binding)


@dataclass(frozen=True)
class FoSignature:
    sort_set: SortSet
    operators: tuple[FoOpSchema, ...]

    def __post_init__(self):
        names = [o.name for o in self.operators]
        if len(names) != len(set(names)):
            raise CloneError("duplicate operator names in signature")

    def schema(self, name: str) -> FoOpSchema:
        for o in self.operators:
            if o.name == name:
                return o
        raise FoSortError(f"unknown operator {name!r}")

    def arity(self, name: str, sort_args: tuple[Sort, ...]) -> tuple[Context, Sort]:
        return self.schema(name).arity(sort_args)

    def instances(self, sorts: list[Sort]) -> list[tuple[str, tuple[Sort, ...]]]:
        """All operator instances with parameters drawn from ``sorts``."""
        out = []
        for o in self.operators:
            for combo in itertools.product(sorts, repeat=len(o.params)):
                out.append((o.name, combo))
        return out


@dataclass(frozen=True)
class FoEquationSchema:
    """A named equation family; both sides share the declared arity."""

    name: str
    params: tuple[str, ...]
    ctx: tuple  # sort templates
    sort: object  # sort template
    lhs: FoTerm  # may mention SortVar inside operator sort_args
    rhs: FoTerm

    def instantiate(self, sort_args: tuple[Sort, ...]) -> tuple[Context, Sort, FoTerm, FoTerm]:
        if len(sort_args) != len(self.params):
            raise FoSortError(f"equation {self.name} expects {len(self.params)} sort arguments")
        binding = dict(zip(self.params, sort_args))
        ctx = Context(tuple(instantiate_sort(s, binding) for s in self.ctx))
        sort = instantiate_sort(self.sort, binding)
        return ctx, sort, _subst_sorts(self.lhs, binding), _subst_sorts(self.rhs, binding)


def _subst_sorts(t: FoTerm, binding: dict[str, Sort]) -> FoTerm:
    if isinstance(t, FoVar):
        return t
    return FoOp(
        t.name,
        tuple(instantiate_sort(s, binding) for s in t.sort_args),
        tuple(_subst_sorts(a, binding) for a in t.args),
    )


@dataclass(frozen=True)
class FoPresentation:
    name: str
    signature: FoSignature
    equations: tuple[FoEquationSchema, ...]

    def equation(self, name: str) -> FoEquationSchema:
        for e in self.equations:
            if e.name == name:
                return e
        raise FoSortError(f"unknown equation {name!r}")

    def check_well_formed(self, sorts: list[Sort] | None = None):
        """Both sides of every equation re-check at the declared arity."""
        pool = sorts if sorts is not None else self.signature.sort_set.base_sorts()
        for schema in self.equations:
            for combo in itertools.product(pool, repeat=len(schema.params)):
                ctx, sort, lhs, rhs = schema.instantiate(combo)
                for side in (lhs, rhs):
                    got = fo_check_term(self.signature, ctx, side)
                    if got != sort:
                        raise FoSortError(
                            f"equation {schema.name} side has sort {got}, declared {sort}"
                        )


# --------------------------------------------------------------------------
# Checking, substitution, enumeration
# --------------------------------------------------------------------------


def fo_check_term(sig: FoSignature, ctx: Context, t: FoTerm, path: tuple[int, ...] = ()) -> Sort:
    """Return the sort of ``t`` in ``ctx``, or raise with the failing path."""
    match t:
        case FoVar(index=i):
            if not 1 <= i <= len(ctx):
                raise FoSortError(f"variable x{i} out of range for {ctx}", path)
            return ctx.sort_at(i)
        case FoOp(name=name, sort_args=sort_args, args=args):
            arg_ctx, result = sig.arity(name, sort_args)
            if len(args) != len(arg_ctx):
                raise FoSortError(
                    f"operator {name} expects {len(arg_ctx)} arguments, got {len(args)}", path
                )
            for i, (a, want) in enumerate(zip(args, arg_ctx), start=1):
                got = fo_check_term(sig, ctx, a, path + (i,))
                if got != want:
                    raise FoSortError(
                        f"argument {i} of {name} has sort {got}, expected {want}", path + (i,)
                    )
            return result
    raise FoSortError(f"not a first-order term: {t!r}", path)


def fo_subst(t: FoTerm, sigma: Substitution) -> FoTerm:
    """Simultaneous substitution, homomorphic on operator nodes."""
    match t:
        case FoVar(index=j):
            return sigma.component(j)
        case FoOp(name=name, sort_args=sort_args, args=args):
            return FoOp(name, sort_args, tuple(fo_subst(a, sigma) for a in args))
    raise FoSortError(f"not a first-order term: {t!r}")


def enumerate_fo_terms(
    sig: FoSignature,
    ctx: Context,
    sort: Sort,
    depth: int,
    instance_sorts: list[Sort] | None = None,
    limit: int | None = None,
) -> list[FoTerm]:
    """All well-sorted terms of depth <= ``depth``, duplicate-free, in a
    deterministic order (variables first, then operator layers).

    ``instance_sorts`` bounds the lazy instantiation of operator schemas;
    ``limit`` caps every intermediate pool, keeping budgeted runs cheap.
    """
    if instance_sorts is None:
        pool = list(dict.fromkeys(list(ctx) + [sort] + sig.sort_set.base_sorts()))
    else:
        pool = instance_sorts
    instances = [(n, sa, *sig.arity(n, sa)) for n, sa in sig.instances(pool)]

    by_depth: dict[tuple[Sort, int], list[FoTerm]] = {}

    def upto(s: Sort, d: int) -> list[FoTerm]:
        key = (s, d)
        if key in by_depth:
            return by_depth[key]
        out = [FoVar(i) for i in range(1, len(ctx) + 1) if ctx.sort_at(i) == s]
        if d > 0:
            for name, sort_args, arg_ctx, result in instances:
                if result != s:
                    continue
                if limit is not None and len(out) >= limit:
                    break
                pools = [upto(a, d - 1) for a in arg_ctx]
                for combo in itertools.product(*pools):
                    out.append(FoOp(name, sort_args, combo))
                    if limit is not None and len(out) >= 2 * limit:
                        break
        dedup = list(dict.fromkeys(out))
        if limit is not None:
            dedup = dedup[:limit]
        by_depth[key] = dedup
        return dedup

    return upto(sort, depth)


def enumerate_fo_terms_by_size(
    sig: FoSignature,
    ctx: Context,
    sort: Sort,
    size: int,
    instance_sorts: list[Sort] | None = None,
) -> list[FoTerm]:
    """All well-sorted terms with at most ``size`` nodes, deterministic and
    duplicate-free."""
    if instance_sorts is None:
        pool = list(dict.fromkeys(list(ctx) + [sort] + sig.sort_set.base_sorts()))
    else:
        pool = instance_sorts
    instances = [(n, sa, *sig.arity(n, sa)) for n, sa in sig.instances(pool)]

    exact: dict[tuple[Sort, int], list[FoTerm]] = {}

    def of_size(s: Sort, n: int) -> list[FoTerm]:
        key = (s, n)
        if key in exact:
            return exact[key]
        out: list[FoTerm] = []
        if n == 1:
            out.extend(FoVar(i) for i in range(1, len(ctx) + 1) if ctx.sort_at(i) == s)
        if n >= 1:
            for name, sort_args, arg_ctx, result in instances:
                if result != s:
                    continue
                k = len(arg_ctx)
                if k == 0:
                    if n == 1:
                        out.append(FoOp(name, sort_args, ()))
                    continue
                for split in _compositions(n - 1, k):
                    pools = [of_size(a, m) for a, m in zip(arg_ctx, split)]
                    for combo in itertools.product(*pools):
                        out.append(FoOp(name, sort_args, combo))
        exact[key] = out
        return out

    result: list[FoTerm] = []
    for n in range(1, size + 1):
        result.extend(of_size(sort, n))
    return list(dict.fromkeys(result))


def _compositions(total: int, parts: int):
    """All ways to write ``total`` as an ordered sum of ``parts`` positives."""
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


# --------------------------------------------------------------------------
# Equational-logic derivations
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class FoRefl:
    term: FoTerm


@dataclass(frozen=True)
class FoSym:
    child: "FoDerivation"


@dataclass(frozen=True)
class FoTrans:
    left: "FoDerivation"
    right: "FoDerivation"


@dataclass(frozen=True)
class FoCong:
    op: str
    sort_args: tuple[Sort, ...]
    children: tuple["FoDerivation", ...]


@dataclass(frozen=True)
class FoAxiom:
    """An equation instance: children derive the substituted terms pairwise.

    Child i proves t'_i ~ u'_i; the conclusion substitutes the t'_i into the
    left side of the cited equation and the u'_i into the right side.
    """

    equation: str
    sort_args: tuple[Sort, ...]
    children: tuple["FoDerivation", ...]


FoDerivation = FoRefl | FoSym | FoTrans | FoCong | FoAxiom


@dataclass
class Verdict:
    ok: bool
    lhs: FoTerm | None = None
    rhs: FoTerm | None = None
    sort: Sort | None = None
    error: str | None = None
    path: tuple[int, ...] = ()

    def __bool__(self):
        return self.ok


def check_fo_derivation(pres: FoPresentation, ctx: Context, d: FoDerivation) -> Verdict:
    """Accept iff every node is a correct instance of an equational-logic rule.

    Rejection carries the path (child indices) to the first bad node.
    """
    sig = pres.signature

    def go(node, path) -> Verdict:
        match node:
            case FoRefl(term=t):
                try:
                    sort = fo_check_term(sig, ctx, t)
                except FoSortError as e:
                    return Verdict(False, error=f"refl of ill-sorted term: {e}", path=path)
                return Verdict(True, t, t, sort)
            case FoSym(child=c):
                sub = go(c, path + (1,))
                if not sub:
                    return sub
                return Verdict(True, sub.rhs, sub.lhs, sub.sort)
            case FoTrans(left=l, right=r):
                lv = go(l, path + (1,))
                if not lv:
                    return lv
                rv = go(r, path + (2,))
                if not rv:
                    return rv
                if lv.rhs != rv.lhs:
                    return Verdict(
                        False,
                        error=f"transitivity middle terms disagree: {lv.rhs} vs {rv.lhs}",
                        path=path,
                    )
                return Verdict(True, lv.lhs, rv.rhs, lv.sort)
            case FoCong(op=name, sort_args=sort_args, children=children):
                try:
                    arg_ctx, result = sig.arity(name, sort_args)
                except FoSortError as e:
                    return Verdict(False, error=str(e), path=path)
                if len(children) != len(arg_ctx):
                    return Verdict(False, error=f"congruence arity mismatch for {name}", path=path)
                lhs_args, rhs_args = [], []
                for i, (c, want) in enumerate(zip(children, arg_ctx), start=1):
                    sub = go(c, path + (i,))
                    if not sub:
                        return sub
                    if sub.sort != want:
                        return Verdict(
                            False,
                            error=f"congruence child {i} has sort {sub.sort}, expected {want}",
                            path=path + (i,),
                        )
                    lhs_args.append(sub.lhs)
                    rhs_args.append(sub.rhs)
                return Verdict(
                    True,
                    FoOp(name, sort_args, tuple(lhs_args)),
                    FoOp(name, sort_args, tuple(rhs_args)),
                    result,
                )
            case FoAxiom(equation=eq_name, sort_args=sort_args, children=children):
                try:
                    schema = pres.equation(eq_name)
                    eq_ctx, eq_sort, lhs, rhs = schema.instantiate(sort_args)
                except FoSortError as e:
                    return Verdict(False, error=str(e), path=path)
                if len(children) != len(eq_ctx):
                    return Verdict(
                        False,
                        error=f"axiom {eq_name} needs {len(eq_ctx)} substituted positions",
                        path=path,
                    )
                lefts, rights = [], []
                for i, (c, want) in enumerate(zip(children, eq_ctx), start=1):
                    sub = go(c, path + (i,))
                    if not sub:
                        return sub
                    if sub.sort != want:
                        return Verdict(
                            False,
                            error=f"axiom child {i} has sort {sub.sort}, expected {want}",
                            path=path + (i,),
                        )
                    lefts.append(sub.lhs)
                    rights.append(sub.rhs)
                lsub = Substitution(ctx, eq_ctx, tuple(lefts))
                rsub = Substitution(ctx, eq_ctx, tuple(rights))
                return Verdict(True, fo_subst(lhs, lsub), fo_subst(rhs, rsub), eq_sort)
        return Verdict(False, error=f"unknown node {node!r}", path=path)

    return go(d, ())


def refl_children(ctx: Context, terms: tuple[FoTerm, ...]) -> tuple[FoDerivation, ...]:
    return tuple(FoRefl(t) for t in terms)


# --------------------------------------------------------------------------
# Rewriting
# --------------------------------------------------------------------------


class RewriteDivergence(Exception):
    def __init__(self, term, trace):
        super().__init__(f"step ceiling exceeded while rewriting {term}")
        self.trace = trace


@dataclass(frozen=True)
class RewriteStep:
    path: tuple[int, ...]
    equation: str
    sort_args: tuple[Sort, ...]
    instantiation: tuple[FoTerm, ...]  # one term per equation-context entry
    forward: bool
    before: FoTerm
    after: FoTerm


@dataclass(frozen=True)
class RewriteSystem:
    """Oriented equations of a presentation, used as a rewrite procedure.

    Every rule is an equation of the presentation read left to right; a rule
    whose left side is a bare variable is rejected.
    """

    presentation: FoPresentation

    def __post_init__(self):
        for schema in self.presentation.equations:
            if isinstance(schema.lhs, FoVar):
                raise CloneError(f"rule {schema.name} has a bare variable as its left side")

    def rules(self):
        return self.presentation.equations


def match_fo(pattern: FoTerm, term: FoTerm, var_binding: dict, sort_binding: dict) -> bool:
    """Match a (possibly schematic) pattern against a concrete term.

    Pattern variables bind subterms; repeated variables must match equal
    subterms.  Sort parameters inside operator instances are matched too.
    """
    match pattern:
        case FoVar(index=i):
            seen = var_binding.get(i)
            if seen is None:
                var_binding[i] = term
                return True
            return seen == term
        case FoOp(name=name, sort_args=psorts, args=pargs):
            if not isinstance(term, FoOp) or term.name != name:
                return False
            if len(psorts) != len(term.sort_args) or len(pargs) != len(term.args):
                return False
            for ps, ts in zip(psorts, term.sort_args):
                if not match_sort(ps, ts, sort_binding):
                    return False
            return all(
                match_fo(p, a, var_binding, sort_binding) for p, a in zip(pargs, term.args)
            )
    return False


def subterm_at(t: FoTerm, path: tuple[int, ...]) -> FoTerm:
    for i in path:
        t = t.args[i - 1]
    return t


def replace_at(t: FoTerm, path: tuple[int, ...], new: FoTerm) -> FoTerm:
    if not path:
        return new
    i = path[0]
    args = list(t.args)
    args[i - 1] = replace_at(args[i - 1], path[1:], new)
    return FoOp(t.name, t.sort_args, tuple(args))


def _positions(t: FoTerm, outermost: bool) -> list[tuple[int, ...]]:
    out: list[tuple[int, ...]] = []

    def walk(node, path):
        if outermost:
            out.append(path)
        if isinstance(node, FoOp):
            for i, a in enumerate(node.args, start=1):
                walk(a, path + (i,))
        if not outermost:
            out.append(path)

    walk(t, ())
    return out


def _one_step(rs: RewriteSystem, t: FoTerm, strategy: str) -> RewriteStep | None:
    outermost = strategy == "outermost"
    for path in _positions(t, outermost):
        sub = subterm_at(t, path)
        for schema in rs.rules():
            var_binding: dict = {}
            sort_binding: dict = {}
            if not match_fo(schema.lhs, sub, var_binding, sort_binding):
                continue
            if set(var_binding) != {i for i in range(1, len(schema.ctx) + 1)}:
                continue  # underdetermined instance; cannot fire as a rule
            sort_args = tuple(sort_binding[p] for p in schema.params)
            _, _, lhs, rhs = schema.instantiate(sort_args)
            eq_ctx = Context(
                tuple(
                    instantiate_sort(s, dict(zip(schema.params, sort_args)))
                    for s in schema.ctx
                )
            )
            components = tuple(var_binding[i] for i in range(1, len(eq_ctx) + 1))
            new_sub = fo_subst(rhs, Substitution(Context(()), eq_ctx, components))
            return RewriteStep(
                path, schema.name, sort_args, components, True, t, replace_at(t, path, new_sub)
            )
    return None


def rewrite_normalize(
    rs: RewriteSystem,
    t: FoTerm,
    strategy: str = "innermost",
    max_steps: int = 10_000,
) -> tuple[FoTerm, list[RewriteStep]]:
    """Rewrite to a form containing no redex; the step trace witnesses the
    equality and converts to a checkable derivation via steps_to_derivation."""
    if strategy not in ("innermost", "outermost"):
        raise CloneError(f"unknown strategy {strategy!r}")
    steps: list[RewriteStep] = []
    current = t
    for _ in range(max_steps):
        step = _one_step(rs, current, strategy)
        if step is None:
            return current, steps
        steps.append(step)
        current = step.after
    raise RewriteDivergence(t, steps)


def _wrap_congruence(whole: FoTerm, path: tuple[int, ...], inner: FoDerivation) -> FoDerivation:
    if not path:
        return inner
    i = path[0]
    children = tuple(
        _wrap_congruence(a, path[1:], inner) if j == i else FoRefl(a)
        for j, a in enumerate(whole.args, start=1)
    )
    return FoCong(whole.name, whole.sort_args, children)


def step_to_derivation(step: RewriteStep) -> FoDerivation:
    children = tuple(FoRefl(t) for t in step.instantiation)
    node: FoDerivation = FoAxiom(step.equation, step.sort_args, children)
    if not step.forward:
        node = FoSym(node)
    return _wrap_congruence(step.before, step.path, node)


def steps_to_derivation(start: FoTerm, steps: list[RewriteStep]) -> FoDerivation:
    """Chain a step trace into a single derivation of start ~ end."""
    if not steps:
        return FoRefl(start)
    d = step_to_derivation(steps[0])
    for s in steps[1:]:
        d = FoTrans(d, step_to_derivation(s))
    return d


# --------------------------------------------------------------------------
# Bounded proof search
# --------------------------------------------------------------------------


def _instantiations(schema: FoEquationSchema, matched: dict, eq_len: int, pool: list[FoTerm]):
    """Complete a partial variable binding with candidates from ``pool``."""
    missing = [i for i in range(1, eq_len + 1) if i not in matched]
    if not missing:
        yield dict(matched)
        return
    for combo in itertools.product(pool, repeat=len(missing)):
        full = dict(matched)
        full.update(dict(zip(missing, combo)))
        yield full


def _neighbours(pres: FoPresentation, ctx, t: FoTerm, pool, instance_sorts):
    """One-step convertibility moves: each equation instance applied at each
    position, in both directions."""
    out = []
    for path in _positions(t, outermost=True):
        sub = subterm_at(t, path)
        for schema in pres.equations:
            for combos in _schema_sort_args(schema, instance_sorts):
                eq_ctx, _, lhs, rhs = schema.instantiate(combos)
                for pat, other, forward in ((lhs, rhs, True), (rhs, lhs, False)):
                    var_binding: dict = {}
                    sort_binding: dict = {}
                    if not match_fo(pat, sub, var_binding, sort_binding):
                        continue
                    for full in _instantiations(schema, var_binding, len(eq_ctx), pool):
                        components = tuple(full[i] for i in range(1, len(eq_ctx) + 1))
                        inst = Substitution(ctx, eq_ctx, components)
                        new = replace_at(t, path, fo_subst(other, inst))
                        out.append(
                            (
                                new,
                                RewriteStep(
                                    path, schema.name, combos, components, forward, t, new
                                ),
                            )
                        )
    return out


def _schema_sort_args(schema, instance_sorts):
    if not schema.params:
        return [()]
    return list(itertools.product(instance_sorts, repeat=len(schema.params)))


def _subterms(t: FoTerm) -> list[FoTerm]:
    out = [t]
    if isinstance(t, FoOp):
        for a in t.args:
            out.extend(_subterms(a))
    return list(dict.fromkeys(out))


def prove_fo_equal(
    pres: FoPresentation,
    ctx: Context,
    t: FoTerm,
    u: FoTerm,
    max_nodes: int = 2000,
    instance_sorts: list[Sort] | None = None,
) -> FoDerivation | None:
    """Bidirectional best-first search for a derivation of t ~ u.

    Moves are equation instances applied at any position, in either
    direction; smaller intermediate terms are explored first, so proofs
    made of contractions are found quickly while expansion steps remain
    reachable within the budget.  Returns a checkable derivation, or None
    when the node budget is exhausted ("unknown").  Underdetermined
    variables in backward applications are instantiated from context
    variables and subterms of the two endpoints.
    """
    import heapq

    if t == u:
        return FoRefl(t)
    if instance_sorts is None:
        instance_sorts = list(
            dict.fromkeys(list(ctx) + pres.signature.sort_set.base_sorts())
        )
    pool = list(
        dict.fromkeys(
            [FoVar(i) for i in range(1, len(ctx) + 1)] + _subterms(t) + _subterms(u)
        )
    )

    parents = [{t: None}, {u: None}]
    seq = itertools.count()
    heap = [(fo_size(t), next(seq), 0, t), (fo_size(u), next(seq), 1, u)]
    popped = 0
    while heap and popped < max_nodes:
        _, _, which, current = heapq.heappop(heap)
        popped += 1
        for new, step in _neighbours(pres, ctx, current, pool, instance_sorts):
            if new in parents[which]:
                continue
            parents[which][new] = (current, step)
            if new in parents[1 - which]:
                return _join_paths(t, u, new, parents[0], parents[1])
            heapq.heappush(heap, (fo_size(new), next(seq), which, new))
    return None


def _trace_back(parents, node):
    steps = []
    while parents[node] is not None:
        node, step = parents[node]
        steps.append(step)
    steps.reverse()
    return steps


def _join_paths(t, u, meet, left_parents, right_parents):
    left_steps = _trace_back(left_parents, meet)
    right_steps = _trace_back(right_parents, meet)
    left = steps_to_derivation(t, left_steps) if left_steps else None
    right = steps_to_derivation(u, right_steps) if right_steps else None
    if left is None and right is None:
        return FoRefl(t)
    if right is None:
        return left
    if left is None:
        return FoSym(right)
    return FoTrans(left, FoSym(right))


# --------------------------------------------------------------------------
# Presented clones
# --------------------------------------------------------------------------


class EqStrategy:
    """How a presented clone decides term equality."""

    def equal(self, clone: "TmClone", ctx: Context, sort: Sort, t: FoTerm, u: FoTerm) -> bool:
        raise NotImplementedError

    def canonical(self, clone: "TmClone", ctx: Context, sort: Sort, t: FoTerm) -> FoTerm:
        return t


class StructuralEq(EqStrategy):
    """Syntactic equality; only sound when the presentation has no equations."""

    def equal(self, clone, ctx, sort, t, u):
        return t == u


class RewriteEq(EqStrategy):
    """Normalize with the oriented rules, then compare.  Decides the
    presented equality exactly when the system is confluent and terminating."""

    def __init__(self, system: RewriteSystem, strategy: str = "innermost"):
        self.system = system
        self.strategy = strategy

    def canonical(self, clone, ctx, sort, t):
        nf, _ = rewrite_normalize(self.system, t, self.strategy)
        return nf

    def equal(self, clone, ctx, sort, t, u):
        return self.canonical(clone, ctx, sort, t) == self.canonical(clone, ctx, sort, u)


class SearchEq(EqStrategy):
    """Bounded proof search; 'unknown' counts as not equal."""

    def __init__(self, max_nodes: int = 2000):
        self.max_nodes = max_nodes

    def equal(self, clone, ctx, sort, t, u):
        return prove_fo_equal(clone.presentation, ctx, t, u, self.max_nodes) is not None


class CanonicalEq(EqStrategy):
    """Equality via a supplied complete canonical-form function."""

    def __init__(self, fn):
        self.fn = fn

    def canonical(self, clone, ctx, sort, t):
        return self.fn(ctx, sort, t)

    def equal(self, clone, ctx, sort, t, u):
        return self.fn(ctx, sort, t) == self.fn(ctx, sort, u)


class TmClone(Clone):
    """The clone of terms over a presentation, up to its equations.

    Terms are represented by raw syntax; the equality strategy decides the
    quotient.  A rewrite strategy must be built from the presentation's own
    equations (checked at construction).
    """

    def __init__(self, presentation: FoPresentation, strategy: EqStrategy | None = None):
        self.sort_set = presentation.signature.sort_set
        self.presentation = presentation
        if strategy is None:
            if presentation.equations:
                raise CloneError(
                    "presentation has equations; pick an equality strategy explicitly"
                )
            strategy = StructuralEq()
        if isinstance(strategy, StructuralEq) and presentation.equations:
            raise CloneError("structural equality is only valid with no equations")
        if isinstance(strategy, RewriteEq) and strategy.system.presentation is not presentation:
            raise CloneError("rewrite strategy must orient this presentation's own equations")
        self.strategy = strategy

    def var(self, ctx: Context, i: int) -> FoTerm:
        ctx.sort_at(i)
        return FoVar(i)

    def subst(self, t: FoTerm, sigma: Substitution) -> FoTerm:
        return fo_subst(t, sigma)

    def term_eq(self, ctx, sort, t, u) -> bool:
        return self.strategy.equal(self, ctx, sort, t, u)

    def canonical(self, ctx, sort, t) -> FoTerm:
        return self.strategy.canonical(self, ctx, sort, t)

    def enumerate_terms(
        self, ctx: Context, sort: Sort, depth: int, limit: int | None = None
    ) -> list[FoTerm]:
        return enumerate_fo_terms(self.presentation.signature, ctx, sort, depth, limit=limit)

    def check(self, ctx: Context, t: FoTerm) -> Sort:
        return fo_check_term(self.presentation.signature, ctx, t)


def tm_clone(presentation: FoPresentation, strategy: EqStrategy | None = None) -> TmClone:
    return TmClone(presentation, strategy)


# --------------------------------------------------------------------------
# Stock presentations
# --------------------------------------------------------------------------

TY = SortSet("ty", ("b",), ("=>",))
BASE = Sort("b")


def put_name(value) -> str:
    return f"put_{value}"


def global_state_presentation(values: tuple) -> FoPresentation:
    """Global state over a finite value set: one get, one put per value,
    and the three interaction equation families."""
    if not values:
        raise CloneError("global state needs at least one value")
    k = len(values)
    ops = [FoOpSchema("get", (), tuple(BASE for _ in range(k)), BASE)]
    ops += [FoOpSchema(put_name(v), (), (BASE,), BASE) for v in values]

    def put(v, t):
        return FoOp(put_name(v), (), (t,))

    def get(*ts):
        return FoOp("get", (), tuple(ts))

    x = FoVar(1)
    eqs = [
        FoEquationSchema(
            "get_put", (), (BASE,), BASE, get(*(put(v, x) for v in values)), x
        )
    ]
    xs = tuple(FoVar(i) for i in range(1, k + 1))
    for i, v in enumerate(values, start=1):
        eqs.append(
            FoEquationSchema(
                f"put_get_{v}", (), tuple(BASE for _ in range(k)), BASE,
                put(v, get(*xs)), put(v, xs[i - 1]),
            )
        )
    for vi in values:
        for vj in values:
            eqs.append(
                FoEquationSchema(
                    f"put_put_{vi}_{vj}", (), (BASE,), BASE,
                    put(vi, put(vj, x)), put(vj, x),
                )
            )
    return FoPresentation(f"global_state_{k}", FoSignature(TY, tuple(ops)), tuple(eqs))


def gs_canonical_form(values: tuple, ctx: Context, sort: Sort, t: FoTerm) -> FoTerm:
    """Complete canonical form for global-state terms at the base sort:
    the state table rendered as get(put_{w_1}(a_1), ..., put_{w_k}(a_k)).

    The table reading: in state v, the term ends in state w with result
    atom a.  Two terms are provably equal iff their tables agree, so this
    decides the presented equality (unlike plain oriented rewriting).
    """
    if sort != BASE:
        return t

    def table(term) -> dict:
        match term:
            case FoVar():
                return {v: (v, term) for v in values}
            case FoOp(name="get", args=args):
                ts = [table(a) for a in args]
                return {v: ts[i][v] for i, v in enumerate(values)}
            case FoOp(name=name, args=(arg,)) if name.startswith("put_"):
                w = next(v for v in values if put_name(v) == name)
                inner = table(arg)
                return {v: inner[w] for v in values}
        raise FoSortError(f"not a global-state base term: {term}")

    tbl = table(t)
    branches = tuple(FoOp(put_name(w), (), (atom,)) for (w, atom) in (tbl[v] for v in values))
    return FoOp("get", (), branches)


def gs_expand_witness(
    values: tuple, pres: FoPresentation, t: FoTerm
) -> tuple[FoTerm, FoDerivation]:
    """Canonicalize a base global-state term with a checkable derivation.

    Returns (get(put_{w_1}(a_1), ..., put_{w_k}(a_k)), proof that the input
    equals it).  The three proof shapes are: completing a bare atom to a
    get of puts; pushing a put through an expanded argument; and an outer
    get absorbing the puts of its expanded branches.
    """
    k = len(values)
    index = {v: i for i, v in enumerate(values, start=1)}

    def complete(term) -> FoDerivation:
        # term ~ get(put_v1(term), ..., put_vk(term)), read right to left
        return FoSym(FoAxiom("get_put", (), (FoRefl(term),)))

    def expand(term) -> tuple[FoTerm, FoDerivation]:
        match term:
            case FoVar():
                branches = tuple(FoOp(put_name(v), (), (term,)) for v in values)
                return FoOp("get", (), branches), complete(term)
            case FoOp(name="get", args=args):
                subs = [expand(a) for a in args]
                # get(t_1..t_k) ~ get(T_1..T_k) by congruence on the branches
                d = FoCong("get", (), tuple(s[1] for s in subs))
                ts = tuple(s[0] for s in subs)
                cur = FoOp("get", (), ts)
                # ~ get(put_v1(cur), ..., put_vk(cur)), then select branch j
                # inside each put and collapse the double put
                d = FoTrans(d, complete(cur))
                branch_ds = []
                branches = []
                for j, v in enumerate(values, start=1):
                    # put_v(get(T_1..T_k)) ~ put_v(T_j)
                    step1 = FoAxiom(f"put_get_{v}", (), tuple(FoRefl(s) for s in ts))
                    tj = ts[j - 1]
                    # put_v(T_j) ~ put_v(put_{u_jj}(b_jj)): T_j is itself a get
                    # of puts, so this is another branch selection
                    step2 = FoAxiom(f"put_get_{v}", (), tuple(FoRefl(a) for a in tj.args))
                    inner = tj.args[j - 1]  # put_{u_jj}(b_jj)
                    # put_v(put_u(b)) ~ put_u(b)
                    u_val = next(w for w in values if put_name(w) == inner.name)
                    step3 = FoAxiom(f"put_put_{v}_{u_val}", (), (FoRefl(inner.args[0]),))
                    branch_ds.append(FoTrans(FoTrans(step1, step2), step3))
                    branches.append(inner)
                d = FoTrans(d, FoCong("get", (), tuple(branch_ds)))
                return FoOp("get", (), tuple(branches)), d
            case FoOp(name=name, args=(arg,)) if name.startswith("put_"):
                w = next(v for v in values if put_name(v) == name)
                inner_t, inner_d = expand(arg)
                # put_w(t) ~ put_w(get(puts)) ~ put_w(put_u(b)) ~ put_u(b)
                d = FoCong(name, (), (inner_d,))
                j = index[w]
                selected = inner_t.args[j - 1]  # put_{u}(b)
                d = FoTrans(
                    d, FoAxiom(f"put_get_{w}", (), tuple(FoRefl(a) for a in inner_t.args))
                )
                u_val = next(v for v in values if put_name(v) == selected.name)
                d = FoTrans(d, FoAxiom(f"put_put_{w}_{u_val}", (), (FoRefl(selected.args[0]),)))
                # ~ get(put_v(sel), ...) with the double puts collapsed per branch
                d = FoTrans(d, complete(selected))
                collapse = tuple(
                    FoAxiom(f"put_put_{v}_{u_val}", (), (FoRefl(selected.args[0]),))
                    for v in values
                )
                d = FoTrans(d, FoCong("get", (), collapse))
                return FoOp("get", (), tuple(selected for _ in range(k))), d
        raise FoSortError(f"not a global-state base term: {term}")

    return expand(t)


def gs_clone(values: tuple) -> TmClone:
    """The global-state clone with table-based canonical equality."""
    pres = global_state_presentation(values)
    return TmClone(pres, CanonicalEq(lambda ctx, sort, t: gs_canonical_form(values, ctx, sort, t)))


def bool_presentation() -> FoPresentation:
    """true, false, and a sort-indexed if-then-else with its two equations."""
    A = SortVar("A")
    ops = (
        FoOpSchema("true", (), (), BASE),
        FoOpSchema("false", (), (), BASE),
        FoOpSchema("ite", ("A",), (BASE, A, A), A),
    )
    y, z = FoVar(1), FoVar(2)
    tru = FoOp("true", (), ())
    fls = FoOp("false", (), ())
    eqs = (
        FoEquationSchema(
            "ite_true", ("A",), (A, A), A, FoOp("ite", (A,), (tru, y, z)), y
        ),
        FoEquationSchema(
            "ite_false", ("A",), (A, A), A, FoOp("ite", (A,), (fls, y, z)), z
        ),
    )
    return FoPresentation("bool", FoSignature(TY, ops), eqs)


def bool_clone() -> TmClone:
    pres = bool_presentation()
    return TmClone(pres, RewriteEq(RewriteSystem(pres)))


def monoid_presentation() -> FoPresentation:
    """Monosorted monoid presentation, used as a small test fixture."""
    star_set = SortSet("mon", ("*",))
    star = Sort("*")
    ops = (
        FoOpSchema("unit", (), (), star),
        FoOpSchema("mul", (), (star, star), star),
    )
    x1, x2, x3 = FoVar(1), FoVar(2), FoVar(3)

    def mul(a, b):
        return FoOp("mul", (), (a, b))

    unit = FoOp("unit", (), ())
    eqs = (
        FoEquationSchema(
            "assoc", (), (star, star, star), star, mul(mul(x1, x2), x3), mul(x1, mul(x2, x3))
        ),
        FoEquationSchema("unit_left", (), (star,), star, mul(unit, x1), x1),
        FoEquationSchema("unit_right", (), (star,), star, mul(x1, unit), x1),
    )
    return FoPresentation("monoid", FoSignature(star_set, ops), eqs)
