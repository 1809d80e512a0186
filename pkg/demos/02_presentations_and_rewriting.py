"""First-order presentations: operators, equations, derivations, rewriting.

The global-state theory over two values is the running example: one k-ary
lookup, one update per value, and three equation families.  Plain oriented
rewriting decides many equalities but not all of them: get(x, x) ~ x is
provable yet both sides are rewrite-normal, and innermost vs outermost
runs can reach different normal forms.  The complete decision procedure
canonicalizes a term into its state table, with a checkable derivation.
"""

from clonal import (
    Context,
    RewriteSystem,
    Sort,
    check_fo_derivation,
    global_state_presentation,
    prove_fo_equal,
    rewrite_normalize,
)
from clonal.firstorder import FoOp, FoVar, gs_canonical_form, gs_expand_witness

B = Sort("b")


def get(*args):
    return FoOp("get", (), tuple(args))


def put(v, t):
    return FoOp(f"put_{v}", (), (t,))


def main():
    pres = global_state_presentation(("v1", "v2"))
    rs = RewriteSystem(pres)
    x = FoVar(1)
    g1 = Context((B,))

    print(f"{pres.name}: {len(pres.signature.operators)} operators, "
          f"{len(pres.equations)} equations")

    t = put("v1", put("v2", get(x, x)))
    nf, steps = rewrite_normalize(rs, t)
    print(f"\n{t}  rewrites in {len(steps)} steps to  {nf}")

    from clonal.firstorder import steps_to_derivation

    deriv = steps_to_derivation(t, steps)
    verdict = check_fo_derivation(pres, g1, deriv)
    print("the step trace is a checkable derivation:", verdict.ok)

    print("\nwhere plain rewriting falls short:")
    diag = get(x, x)
    print(f"  {diag} is rewrite-normal, but it is provably equal to {x}:")
    proof = prove_fo_equal(pres, g1, diag, x, max_nodes=1000)
    v = check_fo_derivation(pres, g1, proof)
    print(f"  bounded search found a derivation; kernel accepts: {v.ok}")

    tricky = get(put("v1", get(x, x)), put("v2", get(x, x)))
    inner, _ = rewrite_normalize(rs, tricky, "innermost")
    outer, _ = rewrite_normalize(rs, tricky, "outermost")
    print(f"\n  {tricky}")
    print(f"  innermost gives {inner}, outermost gives {outer} (not confluent)")

    print("\nthe state-table canonical form decides equality completely:")
    for term in (x, diag, put("v1", x)):
        canon, deriv = gs_expand_witness(("v1", "v2"), pres, term)
        ok = check_fo_derivation(pres, g1, deriv).ok
        print(f"  {term}  ~  {canon}   (witness checked: {ok})")
    same = gs_canonical_form(("v1", "v2"), g1, B, diag) == gs_canonical_form(
        ("v1", "v2"), g1, B, x
    )
    print("  canonical forms of get(x, x) and x coincide:", same)


if __name__ == "__main__":
    main()
