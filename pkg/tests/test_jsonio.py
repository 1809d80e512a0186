"""JSON round-trips: serialized terms and derivations replay bit-exactly."""

import json

from clonal.equality import normalize_with_trace
from clonal.firstorder import (
    FoAxiom,
    FoCong,
    FoOp,
    FoRefl,
    FoSym,
    FoTrans,
    FoVar,
    RewriteSystem,
    global_state_presentation,
    rewrite_normalize,
    steps_to_derivation,
)
from clonal.freealgebra import (
    CloneApp,
    check_free_derivation,
    enumerate_free_terms,
)
from clonal.jsonio import (
    document,
    fo_derivation_from_json,
    fo_derivation_to_json,
    fo_term_from_json,
    fo_term_to_json,
    free_derivation_from_json,
    free_derivation_to_json,
    free_term_from_json,
    free_term_to_json,
    load_document,
    so_term_from_json,
    so_term_to_json,
)
from clonal.secondorder import stlc_presentation
from clonal.sorts import Context, Sort, arrow
from clonal.stlc import stlc_bool, stlc_gs

B = Sort("b")


def test_fo_term_roundtrip():
    t = FoOp("get", (), (FoOp("put_v1", (), (FoVar(1),)), FoVar(2)))
    assert fo_term_from_json(fo_term_to_json(t)) == t


def test_fo_derivation_roundtrip_all_node_kinds():
    x = FoVar(1)
    d = FoTrans(
        FoSym(FoRefl(x)),
        FoCong("put_v1", (), (FoAxiom("get_put", (), (FoRefl(x),)),)),
    )
    data = fo_derivation_to_json(d)
    assert fo_derivation_from_json(data) == d
    # serialization is deterministic
    assert json.dumps(data) == json.dumps(fo_derivation_to_json(d))


def test_fo_rewrite_trace_replays_after_roundtrip():
    pres = global_state_presentation(("v1", "v2"))
    t = FoOp("put_v1", (), (FoOp("put_v2", (), (FoOp("get", (), (FoVar(1), FoVar(1))),)),))
    _, steps = rewrite_normalize(RewriteSystem(pres), t)
    d = steps_to_derivation(t, steps)
    from clonal.firstorder import check_fo_derivation

    restored = fo_derivation_from_json(fo_derivation_to_json(d))
    assert restored == d
    assert check_fo_derivation(pres, Context((B,)), restored).ok


def test_so_term_roundtrip():
    pres = stlc_presentation()
    _, _, lhs, rhs = pres.equation("beta").instantiate((B, arrow(B, B)))
    for t in (lhs, rhs):
        assert so_term_from_json(so_term_to_json(t)) == t


def test_free_term_roundtrip_over_both_bases():
    for free in (stlc_bool(), stlc_gs(("v1", "v2"))):
        ctx = Context((B,))
        for t in enumerate_free_terms(free, ctx, B, max_size=4)[:60]:
            assert free_term_from_json(free_term_to_json(t)) == t


def test_free_term_roundtrip_variable_base_elements():
    from clonal.stlc import pure_stlc

    free = pure_stlc()
    ctx = Context((B,))
    t = CloneApp(1, ctx, B, (free.var(ctx, 1),))
    assert free_term_from_json(free_term_to_json(t)) == t


def test_free_derivation_roundtrip_and_replay():
    free = stlc_gs(("v1", "v2"))
    ctx = Context((B,))
    for t in enumerate_free_terms(free, ctx, B, max_size=3)[:25]:
        _, deriv = normalize_with_trace(free, ctx, B, t)
        data = free_derivation_to_json(deriv)
        restored = free_derivation_from_json(data)
        assert restored == deriv
        assert check_free_derivation(free, ctx, restored).ok
        assert json.dumps(data) == json.dumps(free_derivation_to_json(deriv))


def test_document_wrapper_versioning():
    doc = document("normal-form", {"x": 1}, bundle="stlc")
    assert doc["schema_version"] == 1
    assert load_document(doc, "normal-form") == {"x": 1}
    bad = dict(doc, schema_version=99)
    import pytest

    from clonal.jsonio import JsonError

    with pytest.raises(JsonError):
        load_document(bad)
