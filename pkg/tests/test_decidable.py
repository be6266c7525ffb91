"""Decidability, NS/DQO/DSO, the quotient reflection, separation."""

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from fptopos.builtins import builtin_object
from fptopos.corpus import enumerate_presheaves
from fptopos.decidable import (check_dqo, check_dqo_bounded, check_dso,
                               check_dso_bounded, check_ns, congruences,
                               dec_is_topos_check, diagonal, is_connected,
                               is_decidable, ns_brute_force, pi, pi_arrow,
                               quotient, separated_reflection)
from fptopos.fincat import catalog
from fptopos.presheaf import (global_elements, is_epi, is_isomorphic,
                              make_from_generators, make_presheaf,
                              nat_transformations, terminal, two)

PT = catalog("point")
TD = catalog("two-discrete")
RG = catalog("refgraph")
GR = catalog("graph")
P2 = builtin_object(RG, "P2")
L = builtin_object(RG, "L")
D2 = builtin_object(RG, "D2")
A1 = builtin_object(GR, "A1")


def test_decidable_examples():
    assert is_decidable(make_presheaf(PT, {"*": ("a", "b")}, {}))
    assert not is_decidable(P2)
    assert not is_decidable(L)
    for C in (PT, TD, RG, GR):
        assert is_decidable(two(C)[0])


def test_diagonal_is_a_subobject_of_the_square():
    _P, delta = diagonal(P2)
    assert delta.size_vector() == (2, 3)


def test_ns_decisions():
    assert check_ns(PT).verdict == "holds"
    assert check_ns(RG).verdict == "holds"
    r = check_ns(GR)
    assert r.verdict == "fails"
    assert "y(E)" in r.witness["all_failing"]
    assert check_ns(TD).verdict == "fails"
    assert check_ns(catalog("sierpinski")).verdict == "fails"


def test_ns_brute_force_agrees_with_exact_decision():
    for name in ("point", "two-discrete", "sierpinski", "graph",
                 "refgraph"):
        C = catalog(name)
        exact = check_ns(C).holds()
        bounded = ns_brute_force(C, 2).holds()
        assert exact == bounded


def test_pi_of_terminal_and_two():
    one = terminal(RG)
    assert is_isomorphic(pi(one).quotient, one)
    t2 = two(RG)[0]
    assert is_isomorphic(pi(t2).quotient, t2)


def test_pi_of_p2_is_terminal():
    r = pi(P2)
    assert is_isomorphic(r.quotient, terminal(RG))
    assert is_epi(r.map)
    # every map to 2 factors through the quotient map
    from fptopos.presheaf import factor_through
    for h in r.two_arrows:
        assert factor_through(r.map, h) is not None


def test_pi_idempotent_on_corpus():
    for X in enumerate_presheaves(RG, 2):
        Q = pi(X).quotient
        assert is_isomorphic(pi(Q).quotient, Q)


def test_pi_arrow_functoriality_on_sample():
    maps = nat_transformations(P2, D2)
    for f in maps:
        pf = pi_arrow(f)
        assert pf.dom.name.startswith("Π") and pf.cod.name.startswith("Π")


@st.composite
def reflexive_graphs(draw):
    n = draw(st.integers(min_value=1, max_value=3))
    k = draw(st.integers(min_value=0, max_value=3))
    verts = tuple(str(i) for i in range(n))
    loops = tuple("l%d" % i for i in range(n))
    extra = tuple("e%d" % j for j in range(k))
    src = {e: str(draw(st.integers(0, n - 1))) for e in extra}
    tgt = {e: str(draw(st.integers(0, n - 1))) for e in extra}
    s = {**{"l%d" % i: str(i) for i in range(n)}, **src}
    t = {**{"l%d" % i: str(i) for i in range(n)}, **tgt}
    return make_from_generators(
        RG, {"V": verts, "E": loops + extra},
        {"s": s, "t": t, "sigma": {str(i): "l%d" % i for i in range(n)}})


@settings(max_examples=40, deadline=None)
@given(reflexive_graphs())
def test_pi_points_match_union_find_oracle(X):
    Q = pi(X).quotient
    assert len(global_elements(Q)) == oracles.component_count(X)
    # the quotient is a discrete graph: σ is a bijection onto the edges
    sigma_image = {Q.act("sigma", v) for v in Q.sets["V"]}
    assert len(sigma_image) == len(Q.sets["V"]) == len(Q.sets["E"])


def test_connectedness():
    assert is_connected(P2)
    assert is_connected(L)
    assert not is_connected(two(RG)[0])
    assert not is_connected(terminal(TD))
    from fptopos.presheaf import initial
    assert not is_connected(initial(RG))


def test_congruences_on_two_point_set():
    X = make_presheaf(PT, {"*": ("a", "b")}, {})
    rs = congruences(X)
    assert len(rs) == 2
    for R in rs:
        Q, q = quotient(X, R)
        assert is_epi(q)
    sizes = sorted(len(quotient(X, R)[0].sets["*"]) for R in rs)
    assert sizes == [1, 2]


def test_dqo_holds_on_point_and_two_discrete():
    assert check_dqo_bounded(PT, 3).holds()
    assert check_dqo_bounded(TD, 2).holds()


def test_dqo_fails_at_a1_with_diagonal_and_total():
    assert is_decidable(A1)
    r = check_dqo(A1)
    assert r.verdict == "fails"
    ws = r.witness["factoring_congruences"]
    assert len(ws) == 2
    sizes = sorted((len(w["V"]), len(w["E"])) for w in ws)
    assert sizes == [(2, 1), (4, 1)]  # the diagonal and the total relation


def test_dqo_bounded_first_witness_is_a1():
    r = check_dqo_bounded(GR, {"V": 2, "E": 1})
    assert r.verdict == "fails"
    w = r.witness["object"]
    W = make_presheaf(GR, w["sets"], w["actions"])
    assert is_isomorphic(W, A1)


def test_dso_examples():
    assert check_dso(P2).holds()
    assert check_dso(P2).witness["subobject"] == {"V": ["0", "1"],
                                                  "E": ["l0", "l1"]}
    r = check_dso(make_presheaf(TD, {"a": ("x",), "b": ()}, {}))
    assert r.verdict == "fails"
    parts = r.witness["decidable_subobjects"]
    assert parts == [{"a": [], "b": []}, {"a": ["x"], "b": []}]
    for X in enumerate_presheaves(PT, 3):
        assert check_dso(X).holds()
    assert not check_dso_bounded(TD, 1).holds()


def test_separated_reflection():
    M, m = separated_reflection(L)
    assert is_isomorphic(M, terminal(RG))
    assert is_epi(m)
    M2, _m2 = separated_reflection(P2)
    assert is_isomorphic(M2, P2)
    # decidable objects are already separated
    M3, m3 = separated_reflection(D2)
    assert is_isomorphic(M3, D2)


def test_dec_topos_two_sided_agreement():
    cases = [("point", 2), ("two-discrete", 2), ("sierpinski", 2),
             ("graph", {"V": 2, "E": 1}), ("refgraph", {"V": 1, "E": 2})]
    for name, bound in cases:
        r = dec_is_topos_check(catalog(name), bound)
        assert r.agree(), name
