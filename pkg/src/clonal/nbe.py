"""Normalization by evaluation for free algebras of the lambda presentation.

Terms are evaluated into a semantic domain: functions at arrow sorts
(Kripke-style, applied through a renaming into the current context) and a
pluggable base domain at the base sort.  Reification reads back eta-long
beta-normal forms; reflection injects neutral terms as values.

Base domains supplied here:

  * variables      -- base values are bare neutral terms;
  * booleans       -- base values are rewrite-normal boolean terms over
                      neutral atoms, so a stuck conditional remains a value;
  * global state   -- base values are state tables: for every initial state,
                      a final state and a neutral result.

The read-back of an element application is exactly the canonical shape the
step normalizer reaches, so the two normalizers can be cross-checked
term-for-term.
"""

from __future__ import annotations

from dataclasses import dataclass

from .clones import CloneError, Renaming, identity_renaming, weakening
from .equality import canonical_cloneapp
from .freealgebra import (
    CloneApp,
    FreeAlgebra,
    FreeOp,
    FreeTerm,
    FreeVar,
    free_rename,
)
from .sorts import Context, Sort


class NbeError(CloneError):
    pass


class Fn:
    """A semantic function: applied at a renaming into the context where it
    was built, plus an argument value."""

    def __init__(self, apply):
        self._apply = apply

    def apply(self, ren: Renaming, arg):
        return self._apply(ren, arg)


def rename_value(domain, sort: Sort, v, ren: Renaming):
    if sort.former == "=>" and len(sort.args) == 2:
        return Fn(lambda r2, a: v.apply(ren.compose(r2), a))
    return domain.rename_base(v, ren)


# --------------------------------------------------------------------------
# Base domains
# --------------------------------------------------------------------------


class VariableDomain:
    """Base clone of variables: base values are neutral terms."""

    def atom(self, nbe, ctx, sort, neutral):
        return neutral

    def rename_base(self, v, ren):
        return free_rename(v, ren)

    def eval_element(self, nbe, ctx, element, actx, asort, arg_values):
        return arg_values[element - 1]

    def reify_base(self, nbe, ctx, sort, v) -> FreeTerm:
        return v


@dataclass(frozen=True)
class BoolVal:
    """A rewrite-normal boolean term whose variables index ``atoms``."""

    term: object  # FoTerm over atom positions
    atoms: tuple  # neutral free terms


class BoolDomain:
    """Base values are normal boolean element applications over atoms."""

    def __init__(self, base):
        from .firstorder import FoOp

        self.base = base
        self.true = FoOp("true", (), ())
        self.false = FoOp("false", (), ())

    def atom(self, nbe, ctx, sort, neutral):
        from .firstorder import FoVar

        return BoolVal(FoVar(1), (neutral,))

    def rename_base(self, v: BoolVal, ren):
        return BoolVal(v.term, tuple(free_rename(a, ren) for a in v.atoms))

    def _constant(self, term):
        return BoolVal(term, ())

    def ite(self, nbe, ctx, result_sort: Sort, cond: BoolVal, tv, ev):
        from .firstorder import FoOp

        if cond.term == self.true:
            return tv
        if cond.term == self.false:
            return ev
        if not result_sort.args:
            return self._combine(ctx, result_sort, cond, tv, ev)
        # stuck conditional at an arrow sort: read the branches back and
        # reflect the stuck element application as a neutral
        A = result_sort
        n_t = nbe.reify(ctx, A, tv)
        n_e = nbe.reify(ctx, A, ev)
        k = len(cond.atoms)
        cond_part = cond.term
        element = FoOp("ite", (A,), (cond_part, _fo_var(k + 1), _fo_var(k + 2)))
        actx = Context(tuple(_base_of(nbe) for _ in range(k)) + (A, A))
        raw = CloneApp(element, actx, A, cond.atoms + (n_t, n_e))
        neutral = canonical_cloneapp(nbe.free, ctx, raw)
        return nbe.reflect(ctx, A, neutral)

    def _combine(self, ctx, sort, cond: BoolVal, tv: BoolVal, ev: BoolVal):
        from .firstorder import FoOp, RewriteSystem, rewrite_normalize

        atoms = list(cond.atoms)

        def embed(v: BoolVal):
            mapping = {}
            for i, a in enumerate(v.atoms, start=1):
                if a in atoms:
                    mapping[i] = atoms.index(a) + 1
                else:
                    atoms.append(a)
                    mapping[i] = len(atoms)
            return _reindex_fo(v.term, mapping)

        cond_t = cond.term  # its atoms are already in place
        t_t = embed(tv)
        e_t = embed(ev)
        combined = FoOp("ite", (sort,), (cond_t, t_t, e_t))
        nf, _ = rewrite_normalize(RewriteSystem(self.base.presentation), combined)
        return _canonical_bool_val(nf, tuple(atoms))

    def eval_element(self, nbe, ctx, element, actx, asort, arg_values):
        from .firstorder import FoOp, FoVar

        def go(e, result_sort):
            match e:
                case FoVar(index=i):
                    return arg_values[i - 1]
                case FoOp(name="true"):
                    return self._constant(self.true)
                case FoOp(name="false"):
                    return self._constant(self.false)
                case FoOp(name="ite", sort_args=(A,), args=(c, t, u)):
                    return self.ite(nbe, ctx, A, go(c, _base_of(nbe)), go(t, A), go(u, A))
            raise NbeError(f"unknown boolean element node {e!r}")

        return go(element, asort)

    def reify_base(self, nbe, ctx, sort, v: BoolVal) -> FreeTerm:
        from .firstorder import FoVar

        if isinstance(v.term, FoVar):
            return v.atoms[v.term.index - 1]
        raw = CloneApp(
            v.term, Context(tuple(sort for _ in v.atoms)), sort, v.atoms
        )
        return canonical_cloneapp(nbe.free, ctx, raw)


def _fo_var(i):
    from .firstorder import FoVar

    return FoVar(i)


def _reindex_fo(e, mapping):
    from .firstorder import FoOp, FoVar

    if isinstance(e, FoVar):
        return FoVar(mapping[e.index])
    return FoOp(e.name, e.sort_args, tuple(_reindex_fo(a, mapping) for a in e.args))


def _canonical_bool_val(term, atoms):
    """Drop unused atoms, renumber in first-use order, merge duplicates."""
    from .firstorder import FoOp, FoVar

    order: list[int] = []

    def walk(t):
        if isinstance(t, FoVar):
            if t.index not in order:
                order.append(t.index)
        elif isinstance(t, FoOp):
            for a in t.args:
                walk(a)

    walk(term)
    kept: list = []
    mapping: dict[int, int] = {}
    for p in order:
        a = atoms[p - 1]
        if a in kept:
            mapping[p] = kept.index(a) + 1
        else:
            kept.append(a)
            mapping[p] = len(kept)
    return BoolVal(_reindex_fo(term, mapping) if order else term, tuple(kept))


def _base_of(nbe) -> Sort:
    return nbe.base_sort


@dataclass(frozen=True)
class GsVal:
    """A state table: branch i gives (final state, neutral result) for the
    i-th initial state."""

    branches: tuple  # of (value label, neutral FreeTerm)


class GsDomain:
    """Base values are state tables over neutral results."""

    def __init__(self, base, values: tuple):
        self.base = base
        self.values = values

    def atom(self, nbe, ctx, sort, neutral):
        return GsVal(tuple((v, neutral) for v in self.values))

    def rename_base(self, v: GsVal, ren):
        return GsVal(tuple((w, free_rename(m, ren)) for w, m in v.branches))

    def eval_element(self, nbe, ctx, element, actx, asort, arg_values):
        from .firstorder import FoOp, FoVar

        def go(e) -> GsVal:
            match e:
                case FoVar(index=i):
                    return arg_values[i - 1]
                case FoOp(name="get", args=args):
                    branch_tables = [go(a) for a in args]
                    return GsVal(
                        tuple(
                            branch_tables[i].branches[i]
                            for i in range(len(self.values))
                        )
                    )
                case FoOp(name=name, args=(arg,)) if name.startswith("put_"):
                    w = next(v for v in self.values if f"put_{v}" == name)
                    inner = go(arg)
                    j = self.values.index(w)
                    return GsVal(tuple(inner.branches[j] for _ in self.values))
            raise NbeError(f"unknown state element node {e!r}")

        return go(element)

    def reify_base(self, nbe, ctx, sort, v: GsVal) -> FreeTerm:
        from .firstorder import FoOp, FoVar

        atoms: list = []
        puts = []
        for w, m in v.branches:
            if m in atoms:
                pos = atoms.index(m) + 1
            else:
                atoms.append(m)
                pos = len(atoms)
            puts.append(FoOp(f"put_{w}", (), (FoVar(pos),)))
        element = FoOp("get", (), tuple(puts))
        actx = Context(tuple(sort for _ in atoms))
        return CloneApp(element, actx, sort, tuple(atoms))


# --------------------------------------------------------------------------
# The evaluator
# --------------------------------------------------------------------------


class Nbe:
    """Evaluator and read-back for one free algebra."""

    def __init__(self, free: FreeAlgebra, domain, base_sort: Sort | None = None):
        self.free = free
        self.domain = domain
        bases = free.sort_set.base_sorts()
        if base_sort is None:
            if len(bases) != 1:
                raise NbeError("specify the base sort explicitly")
            base_sort = bases[0]
        self.base_sort = base_sort

    # evaluation ----------------------------------------------------------
    #
    # ``ctx`` is the semantic context: every value in ``env`` lives there,
    # one (sort, value) entry per variable of the term being evaluated.

    def eval(self, ctx: Context, t: FreeTerm, env: tuple):
        match t:
            case FreeVar(index=i):
                return env[i - 1][1]
            case FreeOp(name="app", args=((_, fun), (_, arg))):
                vf = self.eval(ctx, fun, env)
                va = self.eval(ctx, arg, env)
                return vf.apply(identity_renaming(ctx), va)
            case FreeOp(name="abs", sort_args=(A, _), args=((_, body),)):
                def closure(ren: Renaming, a, __body=body, __env=env, __A=A):
                    renamed = tuple(
                        (s, rename_value(self.domain, s, v, ren)) for s, v in __env
                    )
                    return self.eval(ren.source, __body, renamed + ((__A, a),))

                return Fn(closure)
            case CloneApp(element=e, arity_ctx=actx, arity_sort=asort, args=args):
                arg_values = tuple(self.eval(ctx, a, env) for a in args)
                return self.domain.eval_element(self, ctx, e, actx, asort, arg_values)
        raise NbeError(f"cannot evaluate {t!r}")

    # read-back -----------------------------------------------------------

    def reflect(self, ctx: Context, sort: Sort, neutral: FreeTerm):
        if sort.former == "=>" and len(sort.args) == 2:
            A, B = sort.args

            def stuck(ren: Renaming, a, __n=neutral, __A=A, __B=B):
                new_ctx = ren.source
                applied = FreeOp(
                    "app",
                    (__A, __B),
                    (
                        (Context(()), free_rename(__n, ren)),
                        (Context(()), self.reify(new_ctx, __A, a)),
                    ),
                )
                return self.reflect(new_ctx, __B, applied)

            return Fn(stuck)
        return self.domain.atom(self, ctx, sort, neutral)

    def reify(self, ctx: Context, sort: Sort, value) -> FreeTerm:
        if sort.former == "=>" and len(sort.args) == 2:
            A, B = sort.args
            extended = ctx + Context((A,))
            fresh = self.reflect(extended, A, FreeVar(len(ctx) + 1))
            body = self.reify(extended, B, value.apply(weakening(ctx, Context((A,))), fresh))
            return FreeOp("abs", (A, B), ((Context((A,)), body),))
        return self.domain.reify_base(self, ctx, sort, value)

    # entry point ----------------------------------------------------------

    def normalize(self, ctx: Context, sort: Sort, t: FreeTerm) -> FreeTerm:
        env = tuple(
            (ctx.sort_at(i), self.reflect(ctx, ctx.sort_at(i), FreeVar(i)))
            for i in range(1, len(ctx) + 1)
        )
        return self.reify(ctx, sort, self.eval(ctx, t, env))


def nbe_for(free: FreeAlgebra) -> Nbe:
    """Pick the base domain matching the free algebra's base clone."""
    from .clones import VariableClone
    from .firstorder import TmClone

    base = free.base
    if isinstance(base, VariableClone):
        return Nbe(free, VariableDomain())
    if isinstance(base, TmClone):
        name = base.presentation.name
        if name == "bool":
            return Nbe(free, BoolDomain(base))
        if name.startswith("global_state"):
            values = tuple(
                schema.name.removeprefix("put_")
                for schema in base.presentation.signature.operators
                if schema.name.startswith("put_")
            )
            return Nbe(free, GsDomain(base, values))
    raise NbeError(f"no normalization domain registered for base {base!r}")


def nbe_normalize(free: FreeAlgebra, ctx: Context, sort: Sort, t: FreeTerm) -> FreeTerm:
    """Eta-long beta-normal form computed by evaluation."""
    return nbe_for(free).normalize(ctx, sort, t)


# --------------------------------------------------------------------------
# Normal-form grammar
# --------------------------------------------------------------------------


@dataclass
class NormalVerdict:
    ok: bool
    offender: FreeTerm | None = None
    reason: str | None = None

    def __bool__(self):
        return self.ok


def check_normal(free: FreeAlgebra, ctx: Context, sort: Sort, t: FreeTerm) -> NormalVerdict:
    """Grammar check for eta-long beta-normal forms.

    Neutral: a variable, an application with a neutral head and a normal
    argument, or (with a boolean-style base) a canonical stuck element
    application at an arrow sort.  Normal: an abstraction at arrow sorts;
    at the base sort a neutral (when bare neutrals are normal for the
    base), or a canonical element application over neutral atoms and
    normal higher-sort arguments.
    """
    from .equality import base_completion_needed, is_canonical_cloneapp
    from .freealgebra import free_check_term

    def neutral(c: Context, s: Sort, term) -> NormalVerdict:
        match term:
            case FreeVar():
                return NormalVerdict(True)
            case FreeOp(name="app", sort_args=(A, B), args=((_, fun), (_, arg))):
                head = neutral(c, Sort("=>", (A, B)), fun)
                if not head:
                    return head
                return normal(c, A, arg)
            case CloneApp() as ca if s.args:
                return stuck_elements(c, ca)
        return NormalVerdict(False, term, "not a neutral term")

    def stuck_elements(c: Context, ca: CloneApp) -> NormalVerdict:
        if not is_canonical_cloneapp(free, c, ca):
            return NormalVerdict(False, ca, "element application not canonical")
        for a, slot in zip(ca.args, ca.arity_ctx):
            sub = neutral(c, slot, a) if not slot.args else normal(c, slot, a)
            if not sub:
                return sub
        return NormalVerdict(True)

    def normal(c: Context, s: Sort, term) -> NormalVerdict:
        if s.former == "=>" and len(s.args) == 2:
            match term:
                case FreeOp(name="abs", args=((binder, body),)):
                    return normal(c + binder, s.args[1], body)
            return NormalVerdict(False, term, "arrow-sorted normal must be an abstraction")
        # base sort
        if isinstance(term, CloneApp):
            return stuck_elements(c, term)
        if base_completion_needed(free, s):
            return NormalVerdict(False, term, "bare neutral not normal for this base")
        return neutral(c, s, term)

    try:
        got = free_check_term(free.base, free.presentation.signature, ctx, t)
    except CloneError as e:
        return NormalVerdict(False, t, f"ill-sorted: {e}")
    if got != sort:
        return NormalVerdict(False, t, f"sort {got}, expected {sort}")
    return normal(ctx, sort, t)
