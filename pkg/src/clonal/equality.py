"""Witnessed equality for free algebras of the binding-lambda presentation.

Two procedures produce checkable proof objects:

  * a deterministic normalizer that drives a term to its eta-long
    beta-normal form, emitting one derivation node per step (beta and eta
    are presentation-equation instances; element applications are collapsed
    with the variable- and substitution-collapse laws);
  * a bidirectional best-first search over the same step set.

Canonical element applications keep the element in base-canonical form,
applied to pairwise-distinct non-element arguments listed in first-use
order, with every position used.  The semantic normalizer produces the
same shapes; the acceptance suite cross-checks the two routes.

Base clones whose canonical form rewrites a bare variable (global state
turns x into its state table) get the matching treatment here: bare
neutrals at the base sort are completed into an element application, and
variable elements at that sort are never collapsed back.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .clones import CloneError, Substitution, weakening
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
    FreeAlgebra,
    FreeOp,
    FreeTerm,
    FreeVar,
    free_check_term,
    free_rename,
    free_size,
    free_subst,
    raw_eq,
)
from .sorts import Context, Sort


class NormalizationError(CloneError):
    pass


def base_canonical(base, actx: Context, asort: Sort, e):
    fn = getattr(base, "canonical", None)
    return fn(actx, asort, e) if fn is not None else e


def base_completion_needed(free: FreeAlgebra, sort: Sort) -> bool:
    """True when the base canonicalizes a bare variable to something else
    (the state clone does); bare neutrals at that sort are then not normal
    and must be wrapped in an element application."""
    if sort.args:
        return False
    cache = getattr(free, "_completion_cache", None)
    if cache is None:
        cache = {}
        free._completion_cache = cache
    if sort not in cache:
        base = free.base
        fn = getattr(base, "canonical", None)
        if fn is None:
            cache[sort] = False
        else:
            one = Context((sort,))
            cache[sort] = fn(one, sort, base.var(one, 1)) != base.var(one, 1)
    return cache[sort]


def element_use_order(e) -> list[int]:
    """Positions mentioned by a base element, in first-use order."""
    from .firstorder import FoOp, FoVar

    if isinstance(e, int):
        return [e]
    order: list[int] = []

    def walk(t):
        if isinstance(t, FoVar):
            if t.index not in order:
                order.append(t.index)
        elif isinstance(t, FoOp):
            for a in t.args:
                walk(a)

    walk(e)
    return order


# --------------------------------------------------------------------------
# Term paths
# --------------------------------------------------------------------------


def _subterm(t: FreeTerm, path: tuple) -> FreeTerm:
    for kind, i in path:
        t = t.args[i - 1][1] if kind == "op" else t.args[i - 1]
    return t


def _replace(whole: FreeTerm, path: tuple, new: FreeTerm) -> FreeTerm:
    if not path:
        return new
    kind, i = path[0]
    args = list(whole.args)
    if kind == "op":
        binder, body = args[i - 1]
        args[i - 1] = (binder, _replace(body, path[1:], new))
        return FreeOp(whole.name, whole.sort_args, tuple(args))
    args[i - 1] = _replace(args[i - 1], path[1:], new)
    return CloneApp(whole.element, whole.arity_ctx, whole.arity_sort, tuple(args))


def _embed(whole: FreeTerm, path: tuple, inner):
    """Wrap a subterm derivation in congruence nodes along ``path``."""
    if not path:
        return inner
    kind, i = path[0]
    if kind == "op":
        children = tuple(
            _embed(body, path[1:], inner) if j == i else FRefl(body)
            for j, (_, body) in enumerate(whole.args, start=1)
        )
        return FCongOp(whole.name, whole.sort_args, children)
    children = tuple(
        _embed(a, path[1:], inner) if j == i else FRefl(a)
        for j, a in enumerate(whole.args, start=1)
    )
    return FCongClone(whole.element, whole.arity_ctx, whole.arity_sort, children)


# --------------------------------------------------------------------------
# Primitive steps: (new subterm, derivation at the subterm) or None
# --------------------------------------------------------------------------


def beta_step(free: FreeAlgebra, ctx: Context, t: FreeTerm):
    """app(abs(x. body), a) ~ body[a]."""
    match t:
        case FreeOp(name="app", sort_args=(A, B), args=((_, fun), (_, arg))) if isinstance(
            fun, FreeOp
        ) and fun.name == "abs":
            binder, body = fun.args[0]
            n = len(ctx)
            components = tuple(FreeVar(i) for i in range(1, n + 1)) + (arg,)
            reduced = free_subst(body, Substitution(ctx, ctx + binder, components))
            return reduced, FAxiom("beta", (A, B), (FRefl(body), FRefl(arg)))
    return None


def eta_expand_step(free: FreeAlgebra, ctx: Context, sort: Sort, t: FreeTerm):
    """t ~ abs(x. app(t', x)) at an arrow sort, t not an abstraction."""
    if not (sort.former == "=>" and len(sort.args) == 2):
        return None
    if isinstance(t, FreeOp) and t.name == "abs":
        return None
    A, B = sort.args
    binder = Context((A,))
    lifted = free_rename(t, weakening(ctx, binder))
    body = FreeOp(
        "app", (A, B), ((Context(()), lifted), (Context(()), FreeVar(len(ctx) + 1)))
    )
    expanded = FreeOp("abs", (A, B), ((binder, body),))
    return expanded, FSym(FAxiom("eta", (A, B), (FRefl(t),)))


def var_collapse_step(free: FreeAlgebra, ctx: Context, t: FreeTerm):
    """<e>(args) ~ args[i] when e is the i-th variable of its arity.

    Suppressed at sorts with base completion, where the variable element's
    canonical form is the normal shape rather than a redex.
    """
    if not isinstance(t, CloneApp):
        return None
    if base_completion_needed(free, t.arity_sort):
        return None
    base = free.base
    for i in range(1, len(t.arity_ctx) + 1):
        if t.arity_ctx.sort_at(i) != t.arity_sort:
            continue
        if base.term_eq(t.arity_ctx, t.arity_sort, t.element, base.var(t.arity_ctx, i)):
            return t.args[i - 1], FVarLaw(i, t.arity_ctx, t.args)
    return None


def merge_step(free: FreeAlgebra, ctx: Context, t: FreeTerm):
    """Absorb element-application arguments into the element:
    <f>(..., <g>(ts), ...) ~ <f[s]>(shared arguments)."""
    if not isinstance(t, CloneApp) or not any(isinstance(a, CloneApp) for a in t.args):
        return None
    base = free.base
    shared: list[FreeTerm] = []
    shared_sorts: list[Sort] = []

    def slot(term, sort):
        shared.append(term)
        shared_sorts.append(sort)
        return len(shared)

    entries = []
    for a, slot_sort in zip(t.args, t.arity_ctx):
        if isinstance(a, CloneApp):
            positions = tuple(slot(x, s) for x, s in zip(a.args, a.arity_ctx))
            entries.append(("elem", a, positions))
        else:
            entries.append(("var", slot(a, slot_sort)))
    new_ctx = Context(tuple(shared_sorts))
    shared_args = tuple(shared)

    children = []
    comps = []
    for entry in entries:
        if entry[0] == "var":
            _, pos = entry
            comps.append(base.var(new_ctx, pos))
            children.append(FSym(FVarLaw(pos, new_ctx, shared_args)))
        else:
            _, a, positions = entry
            mapping = dict(zip(range(1, len(a.arity_ctx) + 1), positions))
            remapped = base.subst(
                a.element,
                Substitution(
                    new_ctx, a.arity_ctx, tuple(base.var(new_ctx, mapping[p]) for p in
                                                range(1, len(a.arity_ctx) + 1))
                ),
            )
            comps.append(remapped)
            expand_args = FCongClone(
                a.element, a.arity_ctx, a.arity_sort,
                tuple(FSym(FVarLaw(p, new_ctx, shared_args)) for p in positions),
            )
            collapse = FSubstLaw(
                a.element, a.arity_ctx, a.arity_sort,
                tuple(base.var(new_ctx, p) for p in positions),
                new_ctx, shared_args,
            )
            children.append(FTrans(expand_args, collapse))
    step1 = FCongClone(t.element, t.arity_ctx, t.arity_sort, tuple(children))
    step2 = FSubstLaw(
        t.element, t.arity_ctx, t.arity_sort, tuple(comps), new_ctx, shared_args
    )
    merged = base.subst(t.element, Substitution(new_ctx, t.arity_ctx, tuple(comps)))
    return CloneApp(merged, new_ctx, t.arity_sort, shared_args), FTrans(step1, step2)


def drop_unused_step(free: FreeAlgebra, ctx: Context, t: FreeTerm):
    """Remove argument positions the element never mentions."""
    if not isinstance(t, CloneApp) or len(t.args) == 0:
        return None
    used = set(element_use_order(t.element))
    kept = [p for p in range(1, len(t.args) + 1) if p in used]
    if len(kept) == len(t.args):
        return None
    base = free.base
    new_ctx = Context(tuple(t.arity_ctx.sort_at(p) for p in kept))
    new_args = tuple(t.args[p - 1] for p in kept)
    mapping = {p: j for j, p in enumerate(kept, start=1)}
    reduced = _reindex(t.element, mapping)
    comps = tuple(base.var(t.arity_ctx, p) for p in kept)
    # <e>(args) ~ <reduced>(<var_p>(args)...) backwards, then collapse each
    law = FSubstLaw(reduced, new_ctx, t.arity_sort, comps, t.arity_ctx, t.args)
    cong = FCongClone(
        reduced, new_ctx, t.arity_sort,
        tuple(FVarLaw(p, t.arity_ctx, t.args) for p in kept),
    )
    new_term = CloneApp(reduced, new_ctx, t.arity_sort, new_args)
    return new_term, FTrans(FSym(law), cong)


def _reindex(e, mapping: dict[int, int]):
    from .firstorder import FoOp, FoVar

    if isinstance(e, int):
        return mapping[e]
    if isinstance(e, FoVar):
        return FoVar(mapping[e.index])
    if isinstance(e, FoOp):
        return FoOp(e.name, e.sort_args, tuple(_reindex(a, mapping) for a in e.args))
    raise NormalizationError(f"cannot reindex element {e!r}")


def reorder_step(free: FreeAlgebra, ctx: Context, t: FreeTerm):
    """Bring arguments into first-use order and merge duplicate arguments."""
    if not isinstance(t, CloneApp) or len(t.args) == 0:
        return None
    base = free.base
    use = element_use_order(t.element)
    if set(use) != set(range(1, len(t.args) + 1)):
        return None  # drop-unused runs first
    kept: list[int] = []
    new_index: dict[int, int] = {}
    for p in use:
        for j, q in enumerate(kept, start=1):
            if t.arity_ctx.sort_at(p) == t.arity_ctx.sort_at(q) and raw_eq(
                base, ctx, t.arity_ctx.sort_at(p), t.args[p - 1], t.args[q - 1]
            ):
                new_index[p] = j
                break
        else:
            kept.append(p)
            new_index[p] = len(kept)
    if kept == list(range(1, len(t.args) + 1)):
        return None
    new_ctx = Context(tuple(t.arity_ctx.sort_at(p) for p in kept))
    new_args = tuple(t.args[p - 1] for p in kept)
    comps = tuple(base.var(new_ctx, new_index[p]) for p in range(1, len(t.args) + 1))
    new_element = base.subst(t.element, Substitution(new_ctx, t.arity_ctx, comps))
    cong = FCongClone(
        t.element, t.arity_ctx, t.arity_sort,
        tuple(
            FSym(FVarLaw(new_index[p], new_ctx, new_args))
            for p in range(1, len(t.args) + 1)
        ),
    )
    law = FSubstLaw(t.element, t.arity_ctx, t.arity_sort, comps, new_ctx, new_args)
    return CloneApp(new_element, new_ctx, t.arity_sort, new_args), FTrans(cong, law)


def complete_neutral_step(free: FreeAlgebra, ctx: Context, sort: Sort, t: FreeTerm):
    """m ~ <var_1>(m): wrap a bare neutral so the element can take its
    canonical (e.g. state-table) form."""
    one = Context((sort,))
    return (
        CloneApp(free.base.var(one, 1), one, sort, (t,)),
        FSym(FVarLaw(1, one, (t,))),
    )


def _canonical_element(free: FreeAlgebra, t: CloneApp) -> CloneApp:
    e = base_canonical(free.base, t.arity_ctx, t.arity_sort, t.element)
    if e == t.element:
        return t
    return CloneApp(e, t.arity_ctx, t.arity_sort, t.args)


# --------------------------------------------------------------------------
# The witnessed normalizer
# --------------------------------------------------------------------------


@dataclass
class Trace:
    start: FreeTerm
    current: FreeTerm
    nodes: list

    def derivation(self):
        if not self.nodes:
            return FRefl(self.start)
        d = self.nodes[0]
        for n in self.nodes[1:]:
            d = FTrans(d, n)
        return d


class StepNormalizer:
    """Deterministic eta-long beta-normalization with a derivation trace."""

    def __init__(self, free: FreeAlgebra, max_steps: int = 100_000):
        self.free = free
        self.max_steps = max_steps
        self.steps = 0

    def normalize(self, ctx: Context, sort: Sort, t: FreeTerm):
        trace = Trace(t, t, [])
        self._normalize(trace, ctx, sort, ())
        return trace.current, trace.derivation()

    # helpers --------------------------------------------------------------

    def _apply(self, trace: Trace, path: tuple, result) -> bool:
        if result is None:
            return False
        new_sub, deriv = result
        whole = trace.current
        trace.nodes.append(_embed(whole, path, deriv))
        trace.current = _replace(whole, path, new_sub)
        self.steps += 1
        if self.steps > self.max_steps:
            raise NormalizationError("step ceiling exceeded during normalization")
        return True

    def _swap_canonical(self, trace: Trace, path: tuple, sub: CloneApp) -> CloneApp:
        canon = _canonical_element(self.free, sub)
        if canon is not sub:
            trace.current = _replace(trace.current, path, canon)
        return canon

    # head reduction --------------------------------------------------------

    def _head_reduce(self, trace: Trace, ctx: Context, path: tuple):
        """Reduce at ``path`` until head-stuck: an abstraction, a variable,
        an application with a stuck head, or an element application."""
        free = self.free
        while True:
            sub = _subterm(trace.current, path)
            if isinstance(sub, FreeOp) and sub.name == "app":
                fun = sub.args[0][1]
                if isinstance(fun, FreeOp) and fun.name == "abs":
                    self._apply(trace, path, beta_step(free, ctx, sub))
                    continue
                before = trace.current
                self._head_reduce(trace, ctx, path + (("op", 1),))
                if trace.current is not before:
                    continue
                return
            if isinstance(sub, CloneApp):
                sub = self._swap_canonical(trace, path, sub)
                if self._apply(trace, path, var_collapse_step(free, ctx, sub)):
                    continue
                return
            return

    # normalization ----------------------------------------------------------

    def _normalize(self, trace: Trace, ctx: Context, sort: Sort, path: tuple):
        free = self.free
        if sort.former == "=>" and len(sort.args) == 2:
            self._head_reduce(trace, ctx, path)
            sub = _subterm(trace.current, path)
            if not (isinstance(sub, FreeOp) and sub.name == "abs"):
                if isinstance(sub, CloneApp):
                    self._canonical_cloneapp(trace, ctx, path)
                    sub = _subterm(trace.current, path)
                self._apply(trace, path, eta_expand_step(free, ctx, sort, sub))
                sub = _subterm(trace.current, path)
            binder, _ = sub.args[0]
            _, B = sort.args
            self._normalize(trace, ctx + binder, B, path + (("op", 1),))
            return
        # base sort
        self._head_reduce(trace, ctx, path)
        sub = _subterm(trace.current, path)
        if isinstance(sub, CloneApp):
            self._canonical_cloneapp(trace, ctx, path)
            return
        # variable or stuck application chain
        if isinstance(sub, FreeOp) and sub.name == "app":
            self._normalize_neutral(trace, ctx, path)
        if base_completion_needed(free, sort):
            sub = _subterm(trace.current, path)
            self._apply(trace, path, complete_neutral_step(free, ctx, sort, sub))
            self._canonical_cloneapp(trace, ctx, path)

    def _normalize_neutral(self, trace: Trace, ctx: Context, path: tuple):
        """Normalize the pieces of a stuck application chain: the head
        recursively, each argument as a full normal form."""
        sub = _subterm(trace.current, path)
        if isinstance(sub, FreeOp) and sub.name == "app":
            A, _ = sub.sort_args
            self._normalize_neutral(trace, ctx, path + (("op", 1),))
            self._normalize(trace, ctx, A, path + (("op", 2),))
            return
        if isinstance(sub, CloneApp):
            self._canonical_cloneapp(trace, ctx, path)

    def _canonical_cloneapp(self, trace: Trace, ctx: Context, path: tuple):
        """Drive an element application to canonical shape: canonical
        element, merged arguments, unused positions dropped, first-use
        order, and the arguments themselves in normal form."""
        free = self.free
        for _ in range(10_000):
            sub = _subterm(trace.current, path)
            if not isinstance(sub, CloneApp):
                # collapsed to one of its arguments: normalize it instead
                sort = _sort_at(free, ctx, trace.current, path)
                self._normalize(trace, ctx, sort, path)
                return
            sub = self._swap_canonical(trace, path, sub)
            if self._apply(trace, path, var_collapse_step(free, ctx, sub)):
                continue
            if self._apply(trace, path, merge_step(free, ctx, sub)):
                continue
            if self._apply(trace, path, drop_unused_step(free, ctx, sub)):
                continue
            if self._apply(trace, path, reorder_step(free, ctx, sub)):
                continue
            changed = False
            for i in range(1, len(sub.args) + 1):
                slot_sort = sub.arity_ctx.sort_at(i)
                slot_path = path + (("clone", i),)
                before = trace.current
                if slot_sort.args:
                    self._normalize(trace, ctx, slot_sort, slot_path)
                else:
                    # base slots hold neutral atoms; reduce without completion
                    self._head_reduce(trace, ctx, slot_path)
                    inner = _subterm(trace.current, slot_path)
                    if not isinstance(inner, CloneApp):
                        self._normalize_neutral(trace, ctx, slot_path)
                if trace.current is not before:
                    changed = True
            sub2 = _subterm(trace.current, path)
            if isinstance(sub2, CloneApp) and any(
                isinstance(a, CloneApp) for a in sub2.args
            ):
                continue
            if not changed:
                return
        raise NormalizationError("canonicalization did not stabilize")


def _sort_at(free: FreeAlgebra, ctx: Context, whole: FreeTerm, path: tuple) -> Sort:
    c = ctx
    t = whole
    for kind, i in path:
        if kind == "op":
            binder, body = t.args[i - 1]
            c = c + binder
            t = body
        else:
            t = t.args[i - 1]
    return free_check_term(free.base, free.presentation.signature, c, t)


def canonical_cloneapp(free: FreeAlgebra, ctx: Context, t: CloneApp) -> FreeTerm:
    """The canonical shape reached by the collapse steps, without a trace.
    Arguments are not recursed into; the result may be a non-element term
    when the element is a variable."""
    for _ in range(10_000):
        if not isinstance(t, CloneApp):
            return t
        t = _canonical_element(free, t)
        for builder in (var_collapse_step, merge_step, drop_unused_step, reorder_step):
            res = builder(free, ctx, t)
            if res is not None:
                t = res[0]
                break
        else:
            return t
    raise NormalizationError("canonicalization did not stabilize")


def is_canonical_cloneapp(free: FreeAlgebra, ctx: Context, t: FreeTerm) -> bool:
    """Whether an element application is in canonical shape (canonical
    element representative, no collapse step applies)."""
    if not isinstance(t, CloneApp):
        return False
    if _canonical_element(free, t) is not t:
        return False
    return all(
        builder(free, ctx, t) is None
        for builder in (var_collapse_step, merge_step, drop_unused_step, reorder_step)
    )


def normalize_with_trace(free: FreeAlgebra, ctx: Context, sort: Sort, t: FreeTerm):
    """Eta-long beta-normal form plus a derivation of input ~ output."""
    return StepNormalizer(free).normalize(ctx, sort, t)


def step_normal_form(free: FreeAlgebra, ctx: Context, sort: Sort, t: FreeTerm) -> FreeTerm:
    return normalize_with_trace(free, ctx, sort, t)[0]


# --------------------------------------------------------------------------
# Equality verdicts
# --------------------------------------------------------------------------


@dataclass
class EqVerdict:
    status: str  # "equal" | "not_equal" | "unknown"
    witness: object = None  # derivation of t ~ u when equal
    certificate: object = None  # pair of model values certifying inequality

    def __bool__(self):
        return self.status == "equal"


def free_equal(
    free: FreeAlgebra,
    ctx: Context,
    sort: Sort,
    t: FreeTerm,
    u: FreeTerm,
    mode: str = "normalize",
    budget: int = 2000,
    model_hom=None,
) -> EqVerdict:
    """Decide t ~ u with a witness.

    normalize mode compares step-normal forms and chains the two traces
    into the witness; when the forms differ and ``model_hom`` is supplied,
    distinct model values certify the inequality.  search mode runs a
    bounded bidirectional best-first search; exhaustion yields the
    first-class verdict "unknown".
    """
    if raw_eq(free.base, ctx, sort, t, u):
        return EqVerdict("equal", FRefl(t))
    if mode == "normalize":
        nt, dt = normalize_with_trace(free, ctx, sort, t)
        nu, du = normalize_with_trace(free, ctx, sort, u)
        if raw_eq(free.base, ctx, sort, nt, nu):
            return EqVerdict("equal", FTrans(dt, FSym(du)))
        certificate = None
        if model_hom is not None:
            certificate = (model_hom(ctx, sort, t), model_hom(ctx, sort, u))
        return EqVerdict("not_equal", certificate=certificate)
    if mode == "search":
        found = _search_equal(free, ctx, sort, t, u, budget)
        if found is None:
            return EqVerdict("unknown")
        return EqVerdict("equal", found)
    raise CloneError(f"unknown equality mode {mode!r}")


def _local_moves(free: FreeAlgebra, ctx: Context, sort: Sort, t: FreeTerm):
    moves = []
    for builder in (beta_step, var_collapse_step, merge_step, drop_unused_step, reorder_step):
        res = builder(free, ctx, t)
        if res is not None:
            moves.append(res)
    res = eta_expand_step(free, ctx, sort, t)
    if res is not None:
        moves.append(res)
    if (
        base_completion_needed(free, sort)
        and not isinstance(t, CloneApp)
    ):
        moves.append(complete_neutral_step(free, ctx, sort, t))
    return moves


def _all_moves(free: FreeAlgebra, ctx: Context, sort: Sort, t: FreeTerm):
    """Single steps at every position of ``t``, embedded into whole terms.
    Derivation None marks a silent canonical-representative swap."""
    out = []

    def visit(sub: FreeTerm, c: Context, s: Sort, path: tuple):
        for new_sub, deriv in _local_moves(free, c, s, sub):
            out.append((_replace(t, path, new_sub), _embed(t, path, deriv)))
        if isinstance(sub, FreeOp):
            arity = free.presentation.signature.arity(sub.name, sub.sort_args)
            for i, ((binder, body), (_, bsort)) in enumerate(
                zip(sub.args, arity.binders), start=1
            ):
                visit(body, c + binder, bsort, path + (("op", i),))
        elif isinstance(sub, CloneApp):
            canon = _canonical_element(free, sub)
            if canon is not sub:
                out.append((_replace(t, path, canon), None))
            for i, a in enumerate(sub.args, start=1):
                visit(a, c, sub.arity_ctx.sort_at(i), path + (("clone", i),))

    visit(t, ctx, sort, ())
    return out


def _search_equal(free, ctx, sort, t, u, budget):
    import heapq

    parents = [{t: None}, {u: None}]
    seq = itertools.count()
    heap = [(free_size(t), next(seq), 0, t), (free_size(u), next(seq), 1, u)]
    popped = 0
    while heap and popped < budget:
        _, _, which, current = heapq.heappop(heap)
        popped += 1
        for new, deriv in _all_moves(free, ctx, sort, current):
            if new in parents[which]:
                continue
            parents[which][new] = (current, deriv)
            other = next(
                (o for o in parents[1 - which] if raw_eq(free.base, ctx, sort, new, o)),
                None,
            )
            if other is not None:
                left_end, right_end = (new, other) if which == 0 else (other, new)
                left = _chain(_trace_nodes(parents[0], left_end), t)
                right = _chain(_trace_nodes(parents[1], right_end), u)
                return FTrans(left, FSym(right))
            heapq.heappush(heap, (free_size(new), next(seq), which, new))
    return None


def _trace_nodes(parent_map, node):
    steps = []
    while parent_map[node] is not None:
        node, deriv = parent_map[node]
        if deriv is not None:
            steps.append(deriv)
    steps.reverse()
    return steps


def _chain(nodes, start):
    if not nodes:
        return FRefl(start)
    d = nodes[0]
    for n in nodes[1:]:
        d = FTrans(d, n)
    return d
