"""The free algebra of a second-order presentation on a base clone.

Raw free terms are built from variables, elements of the base clone applied
to argument terms, and the presentation's operators.  The equational theory
is represented by checkable proof trees whose rules are:

  * congruence for base-clone applications and for operators;
  * presentation equations instantiated by metasubstitution, with pairwise
    premises;
  * the variable-collapse law  f = var_i  applied:  <var_i>(t_1..t_n) ~ t_i;
  * the substitution-collapse law
      <f>(<s_1>(ts), ..., <s_k>(ts)) ~ <f[s]>(ts);

plus reflexivity, symmetry, and transitivity.  Base elements are stored as
raw representatives; wherever the checker compares terms it uses the base
clone's own equality, so a proof never depends on the representative chosen
inside an element application.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .clones import (
    Clone,
    CloneError,
    CloneHom,
    Renaming,
    Substitution,
    weakening,
)
from .secondorder import (
    Algebra,
    MetaApp,
    MetaContext,
    SoOp,
    SoPresentation,
    SoTerm,
    SoVar,
)
from .sorts import Context, Sort


class FreeSortError(CloneError):
    def __init__(self, message: str, path: tuple[int, ...] = ()):
        super().__init__(f"{message} (at path {list(path)})")
        self.path = path


# --------------------------------------------------------------------------
# Terms
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class FreeVar:
    index: int

    def __str__(self):
        return f"x{self.index}"


@dataclass(frozen=True)
class CloneApp:
    """A base-clone element applied to argument terms, one per entry of its
    arity context."""

    element: object
    arity_ctx: Context
    arity_sort: Sort
    args: tuple["FreeTerm", ...]

    def __str__(self):
        if not self.args:
            return f"<{self.element}>"
        return f"<{self.element}>({', '.join(map(str, self.args))})"


@dataclass(frozen=True)
class FreeOp:
    name: str
    sort_args: tuple[Sort, ...]
    args: tuple[tuple[Context, "FreeTerm"], ...]

    def __str__(self):
        rendered = []
        for binder, body in self.args:
            dot = "" if not len(binder) else f"{'.'.join('_' for _ in binder)}."
            rendered.append(f"{dot}{body}")
        return f"{self.name}({', '.join(rendered)})"


FreeTerm = FreeVar | CloneApp | FreeOp


def free_size(t: FreeTerm) -> int:
    """Node count; a clone application costs the size of its element plus
    its arguments."""
    match t:
        case FreeVar():
            return 1
        case CloneApp(element=e, args=args):
            base = e.size() if hasattr(e, "size") else _element_size(e)
            return base + sum(free_size(a) for a in args)
        case FreeOp(args=args):
            return 1 + sum(free_size(b) for _, b in args)
    raise FreeSortError(f"not a free term: {t!r}")


def _element_size(e) -> int:
    from .firstorder import FoOp, FoVar, fo_size

    if isinstance(e, (FoVar, FoOp)):
        return fo_size(e)
    return 1


def free_check_term(
    base: Clone, sig, ctx: Context, t: FreeTerm, path: tuple[int, ...] = ()
) -> Sort:
    """Sort of a raw free term, or raise with the failing path."""
    match t:
        case FreeVar(index=i):
            if not 1 <= i <= len(ctx):
                raise FreeSortError(f"variable x{i} out of range for {ctx}", path)
            return ctx.sort_at(i)
        case CloneApp(element=_, arity_ctx=actx, arity_sort=asort, args=args):
            if len(args) != len(actx):
                raise FreeSortError(
                    f"clone application expects {len(actx)} arguments, got {len(args)}", path
                )
            for i, (a, want) in enumerate(zip(args, actx), start=1):
                got = free_check_term(base, sig, ctx, a, path + (i,))
                if got != want:
                    raise FreeSortError(
                        f"clone argument {i} has sort {got}, expected {want}", path + (i,)
                    )
            return asort
        case FreeOp(name=name, sort_args=sort_args, args=args):
            arity = sig.arity(name, sort_args)
            if len(args) != len(arity.binders):
                raise FreeSortError(f"operator {name} arity mismatch", path)
            for i, ((binder, body), (want_ctx, want_sort)) in enumerate(
                zip(args, arity.binders), start=1
            ):
                if binder != want_ctx:
                    raise FreeSortError(
                        f"argument {i} of {name} binds {binder}, declared {want_ctx}",
                        path + (i,),
                    )
                got = free_check_term(base, sig, ctx + binder, body, path + (i,))
                if got != want_sort:
                    raise FreeSortError(
                        f"argument {i} of {name} has sort {got}, expected {want_sort}",
                        path + (i,),
                    )
            return arity.result
    raise FreeSortError(f"not a free term: {t!r}", path)


def free_rename(t: FreeTerm, ren: Renaming) -> FreeTerm:
    match t:
        case FreeVar(index=i):
            return FreeVar(ren.apply(i))
        case CloneApp(element=e, arity_ctx=actx, arity_sort=asort, args=args):
            return CloneApp(e, actx, asort, tuple(free_rename(a, ren) for a in args))
        case FreeOp(name=name, sort_args=sort_args, args=args):
            out = []
            for binder, body in args:
                n = len(ren.source)
                extended = Renaming(
                    ren.source + binder,
                    ren.target + binder,
                    ren.map + tuple(range(n + 1, n + len(binder) + 1)),
                )
                out.append((binder, free_rename(body, extended)))
            return FreeOp(name, sort_args, tuple(out))
    raise FreeSortError(f"not a free term: {t!r}")


def free_subst(t: FreeTerm, sigma: Substitution) -> FreeTerm:
    """Structural substitution: variables look up, clone applications and
    operators are homomorphic, with lifting under binders."""
    match t:
        case FreeVar(index=j):
            return sigma.component(j)
        case CloneApp(element=e, arity_ctx=actx, arity_sort=asort, args=args):
            return CloneApp(e, actx, asort, tuple(free_subst(a, sigma) for a in args))
        case FreeOp(name=name, sort_args=sort_args, args=args):
            out = []
            for binder, body in args:
                src = sigma.source + binder
                n = len(sigma.source)
                wk = weakening(sigma.source, binder)
                weakened = tuple(free_rename(c, wk) for c in sigma.components)
                fresh = tuple(FreeVar(n + j) for j in range(1, len(binder) + 1))
                lifted = Substitution(src, sigma.target + binder, weakened + fresh)
                out.append((binder, free_subst(body, lifted)))
            return FreeOp(name, sort_args, tuple(out))
    raise FreeSortError(f"not a free term: {t!r}")


# --------------------------------------------------------------------------
# The clone-with-algebra
# --------------------------------------------------------------------------


class FreeAlgebra(Algebra, Clone):
    """The free algebra of ``presentation`` on ``base``: simultaneously a
    clone (raw free terms, equality decided by the registered strategy) and
    an algebra (operators build syntax).

    The equality strategy is either a normalizer (a function term -> term
    producing canonical forms) or bounded proof search; see free_equal.
    """

    def __init__(self, presentation: SoPresentation, base: Clone, normalizer=None):
        if presentation.signature.sort_set != base.sort_set:
            raise CloneError("presentation and base clone sort sets differ")
        self.presentation = presentation
        self.base = base
        self.sort_set = base.sort_set
        self.normalizer = normalizer  # (free_algebra, ctx, sort, term) -> term
        self.clone = self

    # Clone interface ---------------------------------------------------

    def var(self, ctx: Context, i: int) -> FreeTerm:
        ctx.sort_at(i)
        return FreeVar(i)

    def subst(self, t: FreeTerm, sigma: Substitution) -> FreeTerm:
        return free_subst(t, sigma)

    def term_eq(self, ctx, sort, t, u) -> bool:
        if self.normalizer is not None:
            return self.normalizer(self, ctx, sort, t) == self.normalizer(self, ctx, sort, u)
        return raw_eq(self.base, ctx, sort, t, u)

    def enumerate_terms(self, ctx: Context, sort: Sort, depth: int, limit: int | None = None) -> list:
        return enumerate_free_terms(self, ctx, sort, max_depth=depth, limit=limit)

    def check(self, ctx: Context, t: FreeTerm) -> Sort:
        return free_check_term(self.base, self.presentation.signature, ctx, t)

    # Algebra interface --------------------------------------------------

    def interpret(self, name, sort_args, ctx, args):
        arity = self.presentation.signature.arity(name, sort_args)
        return FreeOp(
            name, sort_args, tuple((bc, a) for (bc, _), a in zip(arity.binders, args))
        )

    # Unit ----------------------------------------------------------------

    def unit(self, ctx: Context, sort: Sort, t) -> FreeTerm:
        """The inclusion of the base clone: t becomes the element t applied
        to the variables of its context."""
        return CloneApp(t, ctx, sort, tuple(FreeVar(i) for i in range(1, len(ctx) + 1)))


def raw_eq(base: Clone, ctx: Context, sort: Sort, t: FreeTerm, u: FreeTerm) -> bool:
    """Structural equality that compares base elements with the base clone's
    own equality (insensitive to the representative inside an element)."""
    match (t, u):
        case (FreeVar(index=i), FreeVar(index=j)):
            return i == j
        case (CloneApp() as a, CloneApp() as b):
            if a.arity_ctx != b.arity_ctx or a.arity_sort != b.arity_sort:
                return False
            if not base.term_eq(a.arity_ctx, a.arity_sort, a.element, b.element):
                return False
            return all(
                raw_eq(base, ctx, s, x, y)
                for x, y, s in zip(a.args, b.args, a.arity_ctx)
            )
        case (FreeOp() as a, FreeOp() as b):
            if a.name != b.name or a.sort_args != b.sort_args or len(a.args) != len(b.args):
                return False
            for (bc1, x), (bc2, y) in zip(a.args, b.args):
                if bc1 != bc2:
                    return False
                if not raw_eq(base, ctx + bc1, sort, x, y):
                    return False
            return True
    return False


class UnitHom(CloneHom):
    """eta : X -> F X, sending an element to itself applied to variables."""

    def __init__(self, free: FreeAlgebra):
        super().__init__(free.base, free)
        self.free = free

    def apply(self, ctx, sort, t):
        return self.free.unit(ctx, sort, t)


def unit_hom(free: FreeAlgebra) -> UnitHom:
    return UnitHom(free)


class FoldHom(CloneHom):
    """The unique algebra map F X -> Y extending f : X -> Y.clone.

    Variables go to variables, an element application becomes f of the
    element substituted at the folded arguments, and operator nodes are
    interpreted in the target algebra.
    """

    def __init__(self, free: FreeAlgebra, target: Algebra, f: CloneHom):
        super().__init__(free, target.clone)
        self.free = free
        self.target_algebra = target
        self.f = f

    def apply(self, ctx: Context, sort: Sort, t: FreeTerm):
        y = self.target_algebra.clone
        match t:
            case FreeVar(index=i):
                return y.var(ctx, i)
            case CloneApp(element=e, arity_ctx=actx, arity_sort=asort, args=args):
                folded = tuple(
                    self.apply(ctx, s, a) for a, s in zip(args, actx)
                )
                mapped = self.f.apply(actx, asort, e)
                return y.subst(mapped, Substitution(ctx, actx, folded))
            case FreeOp(name=name, sort_args=sort_args, args=args):
                arity = self.free.presentation.signature.arity(name, sort_args)
                folded = tuple(
                    self.apply(ctx + binder, bsort, body)
                    for (binder, body), (_, bsort) in zip(args, arity.binders)
                )
                return self.target_algebra.interpret(name, sort_args, ctx, folded)
        raise FreeSortError(f"not a free term: {t!r}")


def fold_hom(free: FreeAlgebra, target: Algebra, f: CloneHom) -> FoldHom:
    if f.source is not free.base:
        raise CloneError("fold requires a homomorphism out of the base clone")
    # terms are plain data, so a structurally matching clone object works;
    # only a sort-set mismatch is outright wrong
    if f.target.sort_set != target.clone.sort_set:
        raise CloneError("fold target sort set differs from the algebra's")
    return FoldHom(free, target, f)


# --------------------------------------------------------------------------
# Equational proof objects
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class FRefl:
    term: FreeTerm


@dataclass(frozen=True)
class FSym:
    child: "FreeDerivation"


@dataclass(frozen=True)
class FTrans:
    left: "FreeDerivation"
    right: "FreeDerivation"


@dataclass(frozen=True)
class FCongClone:
    """Congruence at a base-element application."""

    element: object
    arity_ctx: Context
    arity_sort: Sort
    children: tuple["FreeDerivation", ...]


@dataclass(frozen=True)
class FCongOp:
    name: str
    sort_args: tuple[Sort, ...]
    children: tuple["FreeDerivation", ...]


@dataclass(frozen=True)
class FAxiom:
    """A presentation equation with one premise per metavariable; premise i
    proves lhs-instantiation_i ~ rhs-instantiation_i over the extended
    context."""

    equation: str
    sort_args: tuple[Sort, ...]
    children: tuple["FreeDerivation", ...]


@dataclass(frozen=True)
class FVarLaw:
    """<var_i>(t_1..t_n) ~ t_i."""

    index: int
    arg_ctx: Context
    args: tuple[FreeTerm, ...]


@dataclass(frozen=True)
class FSubstLaw:
    """<f>(<s_1>(ts), ..., <s_k>(ts)) ~ <f[s]>(ts)."""

    element: object
    element_ctx: Context  # arity context of f (targets of s)
    element_sort: Sort
    subst_components: tuple  # base-clone terms s_i over arg_ctx
    arg_ctx: Context  # shared arity context of the argument tuple
    args: tuple[FreeTerm, ...]


FreeDerivation = FRefl | FSym | FTrans | FCongClone | FCongOp | FAxiom | FVarLaw | FSubstLaw


def enumerate_free_terms(
    free: FreeAlgebra,
    ctx: Context,
    sort: Sort,
    max_depth: int | None = None,
    max_size: int | None = None,
    binder_sorts: list[Sort] | None = None,
    element_ctx_len: int = 2,
    limit: int | None = None,
) -> list[FreeTerm]:
    """Deterministic, duplicate-free enumeration of well-sorted free terms.

    Exactly one of ``max_depth`` / ``max_size`` must be given.  Operator
    schemas and binder sorts are instantiated from ``binder_sorts``
    (default: sorts of height <= 1); base-clone elements range over
    contexts of length <= ``element_ctx_len`` over the same sorts.
    ``limit`` caps every intermediate pool.
    """
    if (max_depth is None) == (max_size is None):
        raise CloneError("specify exactly one of max_depth / max_size")
    if binder_sorts is None:
        binder_sorts = free.sort_set.sorts_up_to_height(1)
    sig = free.presentation.signature
    element_contexts = free.sort_set.contexts_up_to(element_ctx_len, binder_sorts)
    op_instances = [(n, sa, sig.arity(n, sa)) for n, sa in sig.instances(binder_sorts)]

    if max_depth is not None:
        memo: dict = {}

        def full(pool_out: list) -> bool:
            return limit is not None and len(pool_out) >= 2 * limit

        def upto(c: Context, s: Sort, d: int) -> list[FreeTerm]:
            key = (c, s, d)
            if key in memo:
                return memo[key]
            out: list[FreeTerm] = [
                FreeVar(i) for i in range(1, len(c) + 1) if c.sort_at(i) == s
            ]
            if d > 0:
                for actx in element_contexts:
                    if full(out):
                        break
                    try:
                        elements = free.base.enumerate_terms(
                            actx, s, d - 1, limit=limit
                        )
                    except TypeError:
                        elements = free.base.enumerate_terms(actx, s, d - 1)
                    pools = [upto(c, a, d - 1) for a in actx]
                    for e in elements:
                        for combo in itertools.product(*pools):
                            out.append(CloneApp(e, actx, s, combo))
                            if full(out):
                                break
                        if full(out):
                            break
                for name, sort_args, arity in op_instances:
                    if arity.result != s or full(out):
                        continue
                    pools = [
                        upto(c + bc, bs, d - 1) for bc, bs in arity.binders
                    ]
                    for combo in itertools.product(*pools):
                        out.append(
                            FreeOp(
                                name,
                                sort_args,
                                tuple(
                                    (bc, body)
                                    for (bc, _), body in zip(arity.binders, combo)
                                ),
                            )
                        )
                        if full(out):
                            break
            res = list(dict.fromkeys(out))
            if limit is not None:
                res = res[:limit]
            memo[key] = res
            return res

        return upto(ctx, sort, max_depth)

    from .firstorder import enumerate_fo_terms_by_size, fo_size

    exact: dict = {}

    def base_elements_of_size(actx: Context, s: Sort, n: int):
        if isinstance(free.base, Clone) and hasattr(free.base, "presentation"):
            all_terms = enumerate_fo_terms_by_size(
                free.base.presentation.signature, actx, s, n, binder_sorts
            )
            return [e for e in all_terms if fo_size(e) == n]
        # variable-like bases: elements are the positions, each of size 1
        if n == 1:
            return free.base.enumerate_terms(actx, s, 0)
        return []

    def of_size(c: Context, s: Sort, n: int) -> list[FreeTerm]:
        key = (c, s, n)
        if key in exact:
            return exact[key]
        out: list[FreeTerm] = []
        if n == 1:
            out.extend(FreeVar(i) for i in range(1, len(c) + 1) if c.sort_at(i) == s)
        for actx in element_contexts:
            k = len(actx)
            if k == 0:
                out.extend(CloneApp(e, actx, s, ()) for e in base_elements_of_size(actx, s, n))
                continue
            for esize in range(1, n - k + 1):
                elements = base_elements_of_size(actx, s, esize)
                if not elements:
                    continue
                for split in _compositions_free(n - esize, k):
                    pools = [of_size(c, a, m) for a, m in zip(actx, split)]
                    for e in elements:
                        for combo in itertools.product(*pools):
                            out.append(CloneApp(e, actx, s, combo))
        for name, sort_args, arity in op_instances:
            if arity.result != s:
                continue
            k = len(arity.binders)
            if k == 0 or n < 1 + k:
                continue
            for split in _compositions_free(n - 1, k):
                pools = [
                    of_size(c + bc, bs, m)
                    for (bc, bs), m in zip(arity.binders, split)
                ]
                for combo in itertools.product(*pools):
                    out.append(
                        FreeOp(
                            name,
                            sort_args,
                            tuple((bc, body) for (bc, _), body in zip(arity.binders, combo)),
                        )
                    )
        res = list(dict.fromkeys(out))
        exact[key] = res
        return res

    result: list[FreeTerm] = []
    for n in range(1, max_size + 1):
        result.extend(of_size(ctx, sort, n))
    return list(dict.fromkeys(result))


def _compositions_free(total: int, parts: int):
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions_free(total - first, parts - 1):
            yield (first,) + rest


@dataclass
class FreeVerdict:
    ok: bool
    lhs: FreeTerm | None = None
    rhs: FreeTerm | None = None
    sort: Sort | None = None
    error: str | None = None
    path: tuple[int, ...] = ()

    def __bool__(self):
        return self.ok


def so_to_free(free: FreeAlgebra, t: SoTerm, metactx: MetaContext, gamma: Context, inst):
    """Interpret an equation side in the free algebra: the metasubstitution
    of free terms for metavariables, following the interpretation clauses."""
    from .secondorder import interpret_term

    return interpret_term(free, t, metactx, Context(()), gamma, inst)


def check_free_derivation(free: FreeAlgebra, ctx: Context, d: FreeDerivation) -> FreeVerdict:
    """Accept iff every node instantiates one of the construction's rules.

    Where two terms must coincide (transitivity middles, conclusions) they
    are compared by raw_eq, so base-element representatives may differ by
    base-provable equalities.
    """
    base = free.base
    sig = free.presentation.signature

    def sort_of(t, c):
        return free_check_term(base, sig, c, t)

    def go(node, c: Context, path) -> FreeVerdict:
        match node:
            case FRefl(term=t):
                try:
                    s = sort_of(t, c)
                except FreeSortError as e:
                    return FreeVerdict(False, error=str(e), path=path)
                return FreeVerdict(True, t, t, s)
            case FSym(child=ch):
                sub = go(ch, c, path + (1,))
                if not sub:
                    return sub
                return FreeVerdict(True, sub.rhs, sub.lhs, sub.sort)
            case FTrans(left=l, right=r):
                lv = go(l, c, path + (1,))
                if not lv:
                    return lv
                rv = go(r, c, path + (2,))
                if not rv:
                    return rv
                if not raw_eq(base, c, lv.sort, lv.rhs, rv.lhs):
                    return FreeVerdict(
                        False,
                        error=f"transitivity middles disagree: {lv.rhs} vs {rv.lhs}",
                        path=path,
                    )
                return FreeVerdict(True, lv.lhs, rv.rhs, lv.sort)
            case FCongClone(element=e, arity_ctx=actx, arity_sort=asort, children=children):
                if len(children) != len(actx):
                    return FreeVerdict(False, error="clone congruence arity mismatch", path=path)
                ls, rs = [], []
                for i, (ch, want) in enumerate(zip(children, actx), start=1):
                    sub = go(ch, c, path + (i,))
                    if not sub:
                        return sub
                    if sub.sort != want:
                        return FreeVerdict(
                            False, error=f"clone congruence child {i} sort mismatch",
                            path=path + (i,),
                        )
                    ls.append(sub.lhs)
                    rs.append(sub.rhs)
                return FreeVerdict(
                    True,
                    CloneApp(e, actx, asort, tuple(ls)),
                    CloneApp(e, actx, asort, tuple(rs)),
                    asort,
                )
            case FCongOp(name=name, sort_args=sort_args, children=children):
                try:
                    arity = sig.arity(name, sort_args)
                except CloneError as e:
                    return FreeVerdict(False, error=str(e), path=path)
                if len(children) != len(arity.binders):
                    return FreeVerdict(False, error="operator congruence arity mismatch", path=path)
                largs, rargs = [], []
                for i, (ch, (binder, want)) in enumerate(
                    zip(children, arity.binders), start=1
                ):
                    sub = go(ch, c + binder, path + (i,))
                    if not sub:
                        return sub
                    if sub.sort != want:
                        return FreeVerdict(
                            False, error=f"operator congruence child {i} sort mismatch",
                            path=path + (i,),
                        )
                    largs.append((binder, sub.lhs))
                    rargs.append((binder, sub.rhs))
                return FreeVerdict(
                    True,
                    FreeOp(name, sort_args, tuple(largs)),
                    FreeOp(name, sort_args, tuple(rargs)),
                    arity.result,
                )
            case FAxiom(equation=eq_name, sort_args=sort_args, children=children):
                try:
                    schema = free.presentation.equation(eq_name)
                    metactx, eq_sort, lhs, rhs = schema.instantiate(sort_args)
                except CloneError as e:
                    return FreeVerdict(False, error=str(e), path=path)
                if len(children) != len(metactx):
                    return FreeVerdict(
                        False, error=f"axiom {eq_name} needs {len(metactx)} premises", path=path
                    )
                linst, rinst = [], []
                for i, (ch, decl) in enumerate(zip(children, metactx), start=1):
                    sub = go(ch, c + decl.ctx, path + (i,))
                    if not sub:
                        return sub
                    if sub.sort != decl.sort:
                        return FreeVerdict(
                            False, error=f"axiom premise {i} sort mismatch", path=path + (i,)
                        )
                    linst.append(sub.lhs)
                    rinst.append(sub.rhs)
                return FreeVerdict(
                    True,
                    so_to_free(free, lhs, metactx, c, tuple(linst)),
                    so_to_free(free, rhs, metactx, c, tuple(rinst)),
                    eq_sort,
                )
            case FVarLaw(index=i, arg_ctx=actx, args=args):
                if len(args) != len(actx) or not 1 <= i <= len(actx):
                    return FreeVerdict(False, error="variable-collapse arity mismatch", path=path)
                for j, (a, want) in enumerate(zip(args, actx), start=1):
                    try:
                        got = sort_of(a, c)
                    except FreeSortError as e:
                        return FreeVerdict(False, error=str(e), path=path + (j,))
                    if got != want:
                        return FreeVerdict(
                            False, error=f"collapse argument {j} sort mismatch", path=path + (j,)
                        )
                element = base.var(actx, i)
                return FreeVerdict(
                    True,
                    CloneApp(element, actx, actx.sort_at(i), args),
                    args[i - 1],
                    actx.sort_at(i),
                )
            case FSubstLaw(
                element=f,
                element_ctx=ectx,
                element_sort=esort,
                subst_components=comps,
                arg_ctx=actx,
                args=args,
            ):
                if len(comps) != len(ectx) or len(args) != len(actx):
                    return FreeVerdict(False, error="substitution-collapse arity mismatch", path=path)
                for j, (a, want) in enumerate(zip(args, actx), start=1):
                    try:
                        got = sort_of(a, c)
                    except FreeSortError as e:
                        return FreeVerdict(False, error=str(e), path=path + (j,))
                    if got != want:
                        return FreeVerdict(
                            False, error=f"collapse argument {j} sort mismatch", path=path + (j,)
                        )
                inner = tuple(
                    CloneApp(s, actx, ectx.sort_at(j), args)
                    for j, s in enumerate(comps, start=1)
                )
                lhs = CloneApp(f, ectx, esort, inner)
                composed = base.subst(f, Substitution(actx, ectx, comps))
                rhs = CloneApp(composed, actx, esort, args)
                return FreeVerdict(True, lhs, rhs, esort)
        return FreeVerdict(False, error=f"unknown node {node!r}", path=path)

    return go(d, ctx, ())
