"""The bounded enumeration of presheaves up to isomorphism."""

import oracles
from fptopos.corpus import canonical_key, enumerate_presheaves
from fptopos.fincat import catalog
from fptopos.presheaf import is_isomorphic, make_from_generators

PT = catalog("point")
TD = catalog("two-discrete")
RG = catalog("refgraph")
GR = catalog("graph")


def test_point_counts():
    # sets of size 0, 1, 2 — one iso class each
    assert len(enumerate_presheaves(PT, 2)) == 3


def test_two_discrete_counts():
    # pairs of sizes (0,0), (0,1), (1,0), (1,1)
    assert len(enumerate_presheaves(TD, 1)) == 4


def test_refgraph_small_counts_match_brute_force():
    for bounds in ({"V": 1, "E": 2}, {"V": 2, "E": 2}):
        index = enumerate_presheaves(RG, bounds)
        raw = list(oracles.brute_force_presheaves(RG, bounds))
        assert len(index) == oracles.recount_classes(raw)
    assert len(enumerate_presheaves(RG, {"V": 1, "E": 2})) == 3


def test_graph_counts_match_brute_force():
    bounds = {"V": 2, "E": 2}
    index = enumerate_presheaves(GR, bounds)
    raw = list(oracles.brute_force_presheaves(GR, bounds))
    assert len(index) == oracles.recount_classes(raw) == 13


def test_refgraph_bound_two_shapes():
    index = enumerate_presheaves(RG, {"V": 2, "E": 2})
    sizes = sorted((len(X.sets["V"]), len(X.sets["E"])) for X in index)
    assert sizes == [(0, 0), (1, 1), (1, 2), (2, 2)]


def test_enumeration_is_deterministic():
    a = [canonical_key(X) for X in enumerate_presheaves(RG, {"V": 2, "E": 3})]
    b = [canonical_key(X) for X in enumerate_presheaves(RG, {"V": 2, "E": 3})]
    assert a == b


def test_canonical_key_is_relabeling_invariant():
    X = make_from_generators(RG, {"V": ("p", "q"), "E": ("lp", "lq", "a")},
                      {"s": {"lp": "p", "lq": "q", "a": "p"},
                       "t": {"lp": "p", "lq": "q", "a": "q"},
                       "sigma": {"p": "lp", "q": "lq"}})
    Y = make_from_generators(RG, {"V": ("0", "1"), "E": ("x", "y", "z")},
                      {"s": {"y": "1", "z": "0", "x": "0"},
                       "t": {"y": "1", "z": "1", "x": "0"},
                       "sigma": {"0": "x", "1": "y"}})
    assert is_isomorphic(X, Y)
    assert canonical_key(X) == canonical_key(Y)


def test_every_enumerated_object_is_within_bounds():
    bounds = {"V": 2, "E": 3}
    for X in enumerate_presheaves(RG, bounds):
        for c, n in bounds.items():
            assert len(X.sets[c]) <= n


def test_no_duplicate_iso_classes():
    objs = list(enumerate_presheaves(RG, {"V": 2, "E": 3}))
    assert oracles.recount_classes(objs) == len(objs)
