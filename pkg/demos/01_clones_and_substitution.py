"""Clones: term families indexed by contexts, closed under variables and
simultaneous substitution.

The clone of variables is the smallest example: its terms at a context are
the positions of the matching sort, and substitution is lookup.  This
demo walks through the three clone laws, composition of substitutions,
weakening, lifting, and the context-extension construction.
"""

from clonal import (
    Budget,
    Context,
    ContextExtensionClone,
    Sort,
    SortSet,
    Substitution,
    VariableClone,
    check_clone_laws,
    compose_subst,
    extend_context_hom,
    initial_hom,
    lift_subst,
    weaken_hom,
    weakening,
)

B = Sort("b")
N = Sort("n")
TWO = SortSet("two", ("b", "n"))


def main():
    v = VariableClone(TWO)
    two_b = Context((B, B))

    print("terms of the variable clone at ([b, b]; b):",
          v.enumerate_terms(two_b, B, 0))
    print("terms at ([b, n]; n):", v.enumerate_terms(Context((B, N)), N, 0))

    swap = Substitution(two_b, two_b, (2, 1))
    print("\nswap =", swap)
    print("swap o swap =", compose_subst(v, swap, swap), " (the identity)")

    wk = weakening(Context((B,)), Context((B,)))
    print("\nweakening [b] by [b] has position map", wk.map)

    lifted = lift_subst(v, swap, Context((B,)))
    print("lifting swap by one new entry:", lifted.components,
          " (old entries weakened, the new entry fresh)")

    print("\nthe unique map out of the variable clone sends position i to var_i:")
    h = initial_hom(v)
    print("  on [b, b]:", [h.apply(two_b, B, i) for i in (1, 2)])

    extended = ContextExtensionClone(v, Context((N,)))
    print("\ncontext extension by [n]: terms at ([b]; n) are",
          extended.enumerate_terms(Context((B,)), N, 0),
          " (the extension's own entry)")

    w = weaken_hom(v, Context((N,)))
    print("weakening into the extension fixes the original positions:",
          w.apply(two_b, B, 2))

    g = extend_context_hom(w, Context((N,)), Substitution(Context(()), Context((N,)), (1,)))
    print("the induced map out of the extension sends the extra variable to",
          g.apply(Context(()), N, extended.var(Context(()), 1)))

    print("\nchecking the three clone laws on the variable clone:")
    report = check_clone_laws(v, Budget(max_context_len=3, max_sort_height=0))
    print(report.summary())


if __name__ == "__main__":
    main()
