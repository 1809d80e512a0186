"""Second-order signatures: variable-binding operators, metavariables,
metasubstitution, and clone-based algebras.

A second-order operator declares, for each argument, how many variables it
binds and at what sorts.  Equations are stated over a metavariable context:
each metavariable is a placeholder parameterized by a context of term
arguments, instantiated by metasubstitution.  An algebra is a clone plus a
substitution-commuting interpretation of every operator that validates the
equations.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .clones import Budget, Clone, CloneError, ProductClone, Substitution, TerminalClone
from .sorts import (
    Context,
    Sort,
    SortSet,
    SortVar,
    instantiate_sort,
)


class SoSortError(CloneError):
    def __init__(self, message: str, path: tuple[int, ...] = ()):
        super().__init__(f"{message} (at path {list(path)})")
        self.path = path


# --------------------------------------------------------------------------
# Arities, signatures, metavariable contexts
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SoArity:
    """Binder declarations (context, sort) per argument, plus a result sort."""

    binders: tuple[tuple[Context, Sort], ...]
    result: Sort

    def __str__(self) -> str:
        parts = ", ".join(f"({ctx}; {sort})" for ctx, sort in self.binders)
        return f"({parts}; {self.result})"


@dataclass(frozen=True)
class SoOpSchema:
    """An operator family over sort parameters; concrete when params is empty."""

    name: str
    params: tuple[str, ...]
    binders: tuple[tuple[tuple, object], ...]  # ((sort templates...), result template)
    result: object

    def arity(self, sort_args: tuple[Sort, ...]) -> SoArity:
        if len(sort_args) != len(self.params):
            raise SoSortError(
                f"operator {self.name} expects {len(self.params)} sort arguments"
            )
        binding = dict(zip(self.params, sort_args))
        binders = tuple(
            (
                Context(tuple(instantiate_sort(s, binding) for s in ctx_templates)),
                instantiate_sort(sort_template, binding),
            )
            for ctx_templates, sort_template in self.binders
        )
        return SoArity(binders, instantiate_sort(self.result, binding))


@dataclass(frozen=True)
class SoSignature:
    sort_set: SortSet
    operators: tuple[SoOpSchema, ...]

    def __post_init__(self):
        names = [o.name for o in self.operators]
        if len(names) != len(set(names)):
            raise CloneError("duplicate operator names in signature")

    def schema(self, name: str) -> SoOpSchema:
        for o in self.operators:
            if o.name == name:
                return o
        raise SoSortError(f"unknown operator {name!r}")

    def arity(self, name: str, sort_args: tuple[Sort, ...]) -> SoArity:
        return self.schema(name).arity(sort_args)

    def instances(self, sorts: list[Sort]) -> list[tuple[str, tuple[Sort, ...]]]:
        out = []
        for o in self.operators:
            for combo in itertools.product(sorts, repeat=len(o.params)):
                out.append((o.name, combo))
        return out


@dataclass(frozen=True)
class MetaDecl:
    """A metavariable declaration: parameter context and result sort."""

    ctx: Context
    sort: Sort


@dataclass(frozen=True)
class MetaContext:
    entries: tuple[MetaDecl, ...] = ()

    def __len__(self):
        return len(self.entries)

    def decl(self, i: int) -> MetaDecl:
        if not 1 <= i <= len(self.entries):
            raise IndexError(f"metavariable {i} out of range")
        return self.entries[i - 1]

    def __iter__(self):
        return iter(self.entries)


# --------------------------------------------------------------------------
# Terms
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SoVar:
    index: int

    def __str__(self):
        return f"x{self.index}"


@dataclass(frozen=True)
class MetaApp:
    index: int
    args: tuple["SoTerm", ...]

    def __str__(self):
        return f"?m{self.index}({', '.join(map(str, self.args))})"


@dataclass(frozen=True)
class SoOp:
    name: str
    sort_args: tuple[Sort, ...]
    args: tuple[tuple[Context, "SoTerm"], ...]  # (binder context, body)

    def __str__(self):
        inst = "" if not self.sort_args else "[" + ",".join(map(str, self.sort_args)) + "]"
        rendered = []
        for binder, body in self.args:
            dot = "" if not len(binder) else f"{len(binder)}."
            rendered.append(f"{dot}{body}")
        return f"{self.name}{inst}({', '.join(rendered)})"


SoTerm = SoVar | MetaApp | SoOp


def so_check_term(
    sig: SoSignature,
    metactx: MetaContext,
    ctx: Context,
    t: SoTerm,
    path: tuple[int, ...] = (),
) -> Sort:
    """Sort of ``t`` under the three formation rules, or raise with a path."""
    match t:
        case SoVar(index=i):
            if not 1 <= i <= len(ctx):
                raise SoSortError(f"variable x{i} out of range for {ctx}", path)
            return ctx.sort_at(i)
        case MetaApp(index=i, args=args):
            try:
                decl = metactx.decl(i)
            except IndexError:
                raise SoSortError(f"metavariable m{i} not declared", path) from None
            if len(args) != len(decl.ctx):
                raise SoSortError(
                    f"metavariable m{i} expects {len(decl.ctx)} arguments, got {len(args)}",
                    path,
                )
            for j, (a, want) in enumerate(zip(args, decl.ctx), start=1):
                got = so_check_term(sig, metactx, ctx, a, path + (j,))
                if got != want:
                    raise SoSortError(
                        f"argument {j} of m{i} has sort {got}, expected {want}", path + (j,)
                    )
            return decl.sort
        case SoOp(name=name, sort_args=sort_args, args=args):
            arity = sig.arity(name, sort_args)
            if len(args) != len(arity.binders):
                raise SoSortError(
                    f"operator {name} expects {len(arity.binders)} arguments", path
                )
            for j, ((binder, body), (want_ctx, want_sort)) in enumerate(
                zip(args, arity.binders), start=1
            ):
                if binder != want_ctx:
                    raise SoSortError(
                        f"argument {j} of {name} binds {binder}, declared {want_ctx}",
                        path + (j,),
                    )
                got = so_check_term(sig, metactx, ctx + binder, body, path + (j,))
                if got != want_sort:
                    raise SoSortError(
                        f"argument {j} of {name} has sort {got}, expected {want_sort}",
                        path + (j,),
                    )
            return arity.result
    raise SoSortError(f"not a second-order term: {t!r}", path)


def so_rename(t: SoTerm, ren) -> SoTerm:
    """Positional renaming; binders extend the renaming with identity."""
    from .clones import Renaming

    match t:
        case SoVar(index=i):
            return SoVar(ren.apply(i))
        case MetaApp(index=i, args=args):
            return MetaApp(i, tuple(so_rename(a, ren) for a in args))
        case SoOp(name=name, sort_args=sort_args, args=args):
            out = []
            for binder, body in args:
                n = len(ren.source)
                extended = Renaming(
                    ren.source + binder,
                    ren.target + binder,
                    ren.map + tuple(range(n + 1, n + len(binder) + 1)),
                )
                out.append((binder, so_rename(body, extended)))
            return SoOp(name, sort_args, tuple(out))
    raise SoSortError(f"not a second-order term: {t!r}")


def so_subst(t: SoTerm, sigma: Substitution) -> SoTerm:
    """Simultaneous substitution of terms for variables; under a binder the
    components are weakened and the bound variables map to themselves."""
    from .clones import weakening

    match t:
        case SoVar(index=j):
            return sigma.component(j)
        case MetaApp(index=i, args=args):
            return MetaApp(i, tuple(so_subst(a, sigma) for a in args))
        case SoOp(name=name, sort_args=sort_args, args=args):
            out = []
            for binder, body in args:
                src = sigma.source + binder
                n = len(sigma.source)
                wk = weakening(sigma.source, binder)
                weakened = tuple(so_rename(c, wk) for c in sigma.components)
                fresh = tuple(SoVar(n + j) for j in range(1, len(binder) + 1))
                lifted = Substitution(src, sigma.target + binder, weakened + fresh)
                out.append((binder, so_subst(body, lifted)))
            return SoOp(name, sort_args, tuple(out))
    raise SoSortError(f"not a second-order term: {t!r}")


def so_metasubst(
    t: SoTerm,
    gamma: Context,
    inst: tuple[SoTerm, ...],
    inst_decls: MetaContext,
) -> SoTerm:
    """Metasubstitution: replace metavariable j by inst[j-1], a term over
    ``gamma`` extended by its declared parameter context.

    ``t`` lives over variable context Gamma'; the result lives over
    ``gamma + Gamma'``.  Variables of t shift past ``gamma``; a metavariable
    application becomes its replacement with the parameters substituted by
    the metasubstituted arguments.
    """
    n = len(gamma)

    def go(term: SoTerm, primed: Context) -> SoTerm:
        match term:
            case SoVar(index=j):
                return SoVar(n + j)
            case MetaApp(index=j, args=args):
                u = inst[j - 1]
                decl = inst_decls.decl(j)
                mapped = tuple(go(a, primed) for a in args)
                src = gamma + primed
                components = tuple(SoVar(i) for i in range(1, n + 1)) + mapped
                return so_subst(u, Substitution(src, gamma + decl.ctx, components))
            case SoOp(name=name, sort_args=sort_args, args=args):
                out = []
                for binder, body in args:
                    out.append((binder, go(body, primed + binder)))
                return SoOp(name, sort_args, tuple(out))
        raise SoSortError(f"not a second-order term: {term!r}")

    return go(t, Context(()))


# --------------------------------------------------------------------------
# Presentations
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SoEquationSchema:
    """An equation family: both sides share a metavariable context and sort
    and have empty variable context."""

    name: str
    params: tuple[str, ...]
    metactx: tuple  # tuples (ctx sort templates, sort template)
    sort: object
    lhs: SoTerm
    rhs: SoTerm

    def instantiate(
        self, sort_args: tuple[Sort, ...]
    ) -> tuple[MetaContext, Sort, SoTerm, SoTerm]:
        if len(sort_args) != len(self.params):
            raise SoSortError(f"equation {self.name} expects {len(self.params)} sort arguments")
        binding = dict(zip(self.params, sort_args))
        decls = tuple(
            MetaDecl(
                Context(tuple(instantiate_sort(s, binding) for s in ctx_ts)),
                instantiate_sort(sort_t, binding),
            )
            for ctx_ts, sort_t in self.metactx
        )
        return (
            MetaContext(decls),
            instantiate_sort(self.sort, binding),
            _so_subst_sorts(self.lhs, binding),
            _so_subst_sorts(self.rhs, binding),
        )


def _so_subst_sorts(t: SoTerm, binding: dict[str, Sort]) -> SoTerm:
    match t:
        case SoVar():
            return t
        case MetaApp(index=i, args=args):
            return MetaApp(i, tuple(_so_subst_sorts(a, binding) for a in args))
        case SoOp(name=name, sort_args=sort_args, args=args):
            return SoOp(
                name,
                tuple(instantiate_sort(s, binding) for s in sort_args),
                tuple(
                    (
                        Context(tuple(instantiate_sort(s, binding) for s in binder)),
                        _so_subst_sorts(body, binding),
                    )
                    for binder, body in args
                ),
            )
    raise SoSortError(f"not a second-order term: {t!r}")


@dataclass(frozen=True)
class SoPresentation:
    name: str
    signature: SoSignature
    equations: tuple[SoEquationSchema, ...]

    def equation(self, name: str) -> SoEquationSchema:
        for e in self.equations:
            if e.name == name:
                return e
        raise SoSortError(f"unknown equation {name!r}")

    def check_well_formed(self, sorts: list[Sort]):
        for schema in self.equations:
            for combo in itertools.product(sorts, repeat=len(schema.params)):
                metactx, sort, lhs, rhs = schema.instantiate(combo)
                for side in (lhs, rhs):
                    got = so_check_term(self.signature, metactx, Context(()), side)
                    if got != sort:
                        raise SoSortError(
                            f"equation {schema.name} side has sort {got}, declared {sort}"
                        )


def stlc_presentation() -> SoPresentation:
    """Application and binding abstraction per sort pair, with beta and eta."""
    A, B = SortVar("A"), SortVar("B")
    arrow_t = Sort("=>", (A, B))
    sort_set = SortSet("ty", ("b",), ("=>",))
    ops = (
        SoOpSchema("app", ("A", "B"), (((), arrow_t), ((), A)), B),
        SoOpSchema("abs", ("A", "B"), (((A,), B),), arrow_t),
    )

    def app(f, a):
        return SoOp("app", (A, B), ((Context(()), f), (Context(()), a)))

    def abs_(body):
        return SoOp("abs", (A, B), (((Context((A,))), body),))

    beta = SoEquationSchema(
        "beta",
        ("A", "B"),
        (((A,), B), ((), A)),
        B,
        app(abs_(MetaApp(1, (SoVar(1),))), MetaApp(2, ())),
        MetaApp(1, (MetaApp(2, ()),)),
    )
    eta = SoEquationSchema(
        "eta",
        ("A", "B"),
        (((), arrow_t),),
        arrow_t,
        abs_(app(MetaApp(1, ()), SoVar(1))),
        MetaApp(1, ()),
    )
    return SoPresentation("stlc", SoSignature(sort_set, ops), (beta, eta))


# --------------------------------------------------------------------------
# Algebras
# --------------------------------------------------------------------------


class Algebra:
    """A clone together with an interpretation of each operator."""

    clone: Clone
    presentation: SoPresentation

    def interpret(self, name: str, sort_args: tuple[Sort, ...], ctx: Context, args: tuple):
        """Interpret an operator at ``ctx``: args[i] is a clone term over
        ctx extended by the i-th binder context."""
        raise NotImplementedError


class TerminalAlgebra(Algebra):
    def __init__(self, presentation: SoPresentation):
        self.presentation = presentation
        self.clone = TerminalClone(presentation.signature.sort_set)

    def interpret(self, name, sort_args, ctx, args):
        return TerminalClone.POINT


class AlgebraProduct(Algebra):
    def __init__(self, left: Algebra, right: Algebra):
        if left.presentation is not right.presentation:
            raise CloneError("product of algebras for different presentations")
        self.presentation = left.presentation
        self.left = left
        self.right = right
        self.clone = ProductClone(left.clone, right.clone)

    def interpret(self, name, sort_args, ctx, args):
        return (
            self.left.interpret(name, sort_args, ctx, tuple(a[0] for a in args)),
            self.right.interpret(name, sort_args, ctx, tuple(a[1] for a in args)),
        )


def algebra_terminal(presentation: SoPresentation) -> TerminalAlgebra:
    return TerminalAlgebra(presentation)


def algebra_product(left: Algebra, right: Algebra) -> AlgebraProduct:
    return AlgebraProduct(left, right)


def interpret_term(
    alg: Algebra,
    t: SoTerm,
    metactx: MetaContext,
    xi: Context,
    gamma: Context,
    sigma: tuple,
):
    """Interpret a second-order term in an algebra.

    ``t`` has metavariable context ``metactx`` and variable context ``xi``;
    ``sigma[i]`` interprets metavariable i+1 as a clone term over ``gamma``
    extended by its declared parameter context.  The result is a clone term
    over ``gamma + xi``.
    """
    clone = alg.clone
    n = len(gamma)

    def go(term: SoTerm, cur_xi: Context):
        full = gamma + cur_xi
        match term:
            case SoVar(index=i):
                return clone.var(full, n + i)
            case MetaApp(index=i, args=args):
                decl = metactx.decl(i)
                head = tuple(clone.var(full, j) for j in range(1, n + 1))
                tail = tuple(go(a, cur_xi) for a in args)
                return clone.subst(
                    sigma[i - 1], Substitution(full, gamma + decl.ctx, head + tail)
                )
            case SoOp(name=name, sort_args=sort_args, args=args):
                interpreted = tuple(go(body, cur_xi + binder) for binder, body in args)
                return alg.interpret(name, sort_args, full, interpreted)
        raise SoSortError(f"not a second-order term: {term!r}")

    return go(t, xi)


# --------------------------------------------------------------------------
# Algebra checking
# --------------------------------------------------------------------------


def check_algebra(
    alg: Algebra,
    budget: Budget = Budget(),
    contexts: list[Context] | None = None,
    sorts: list[Sort] | None = None,
    sampler=None,
    subject: str = "algebra",
):
    """Verify substitution-commutation and the presentation's equations on
    bounded enumerations.  Failures are reported with witnesses.

    ``sampler(ctx, sort, count)`` supplies terms when exhaustive enumeration
    at a site is too large (the clone's enumerate_terms is used otherwise).
    """
    import random

    from .clones import LawCheck, LawReport

    pres = alg.presentation
    sig = pres.signature
    clone = alg.clone
    if sorts is None:
        sorts = sig.sort_set.sorts_up_to_height(budget.max_sort_height)
    if contexts is None:
        contexts = sig.sort_set.contexts_up_to(budget.max_context_len, sorts)
    report = LawReport(subject)
    rng = random.Random(budget.seed)

    def site_terms(ctx, sort, law):
        if sampler is not None:
            return sampler(ctx, sort, budget.max_terms)
        try:
            return _cap(
                clone.enumerate_terms(ctx, sort, budget.max_depth), budget.max_terms, law
            )
        except CloneError:
            # site too large to enumerate: fall back to seeded sampling;
            # a site too large even to sample is skipped, recorded as capped
            sample = getattr(clone, "sample_term", None)
            if sample is None:
                raise
            law.capped = True
            try:
                return [sample(ctx, sort, rng) for _ in range(budget.max_terms)]
            except CloneError:
                return []

    def _cap(items, cap, law):
        if len(items) > cap:
            law.capped = True
            return items[:cap]
        return items

    comm = LawCheck("operator interpretation commutes with substitution")
    for name, sort_args in sig.instances(sorts):
        arity = sig.arity(name, sort_args)
        for gamma in contexts:
            arg_pools = [
                site_terms(gamma + binder_ctx, binder_sort, comm)
                for binder_ctx, binder_sort in arity.binders
            ]
            tuples = list(itertools.product(*arg_pools))
            tuples = _cap(tuples, budget.max_tuples, comm)
            for xi in contexts:
                sigmas = _subst_tuples_for(clone, xi, gamma, site_terms, comm, budget)
                for args in tuples:
                    for sub in sigmas:
                        try:
                            lhs = clone.subst(
                                alg.interpret(name, sort_args, gamma, args), sub
                            )
                            lifted_args = tuple(
                                clone.subst(a, clone.lift(sub, binder_ctx))
                                for a, (binder_ctx, _) in zip(args, arity.binders)
                            )
                            rhs = alg.interpret(name, sort_args, xi, lifted_args)
                        except CloneError:
                            comm.capped = True  # site beyond the clone's bounds
                            continue
                        comm.checked += 1
                        if not clone.term_eq(xi, arity.result, lhs, rhs):
                            comm.fail(
                                f"{name}{list(sort_args)} at {gamma} under {sub}: "
                                f"{clone.show_term(lhs)} != {clone.show_term(rhs)}"
                            )
    report.laws.append(comm)

    eq_law = LawCheck("equations hold under all enumerated instantiations")
    for schema in pres.equations:
        for combo in itertools.product(sorts, repeat=len(schema.params)):
            metactx, sort, lhs, rhs = schema.instantiate(combo)
            for gamma in contexts:
                pools = [
                    site_terms(gamma + decl.ctx, decl.sort, eq_law) for decl in metactx
                ]
                tuples = _cap(list(itertools.product(*pools)), budget.max_tuples, eq_law)
                for sigma in tuples:
                    try:
                        lv = interpret_term(alg, lhs, metactx, Context(()), gamma, sigma)
                        rv = interpret_term(alg, rhs, metactx, Context(()), gamma, sigma)
                    except CloneError:
                        eq_law.capped = True
                        continue
                    eq_law.checked += 1
                    if not clone.term_eq(gamma, sort, lv, rv):
                        eq_law.fail(
                            f"{schema.name}{list(combo)} at {gamma}: "
                            f"{clone.show_term(lv)} != {clone.show_term(rv)}"
                        )
    report.laws.append(eq_law)
    return report


def _subst_tuples_for(clone, src, tgt, site_terms, law, budget):
    pools = [site_terms(src, tgt.sort_at(i), law) for i in range(1, len(tgt) + 1)]
    out = []
    for combo in itertools.product(*pools):
        out.append(Substitution(src, tgt, combo))
        if len(out) >= budget.max_tuples:
            law.capped = True
            break
    return out
