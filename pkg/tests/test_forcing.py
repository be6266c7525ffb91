"""Stage-wise forcing: soundness, monotonicity, parser, fiber formulas."""

import itertools
import random

import pytest

from fptopos.builtins import builtin_object
from fptopos.errors import ParseError
from fptopos.fincat import catalog
from fptopos.forcing import (And, Bot, Eq, Exists, Forall, Implies, Mem,
                             Not, Or, PairT, PresheafSort, SubConst, Top,
                             VarT, _restrict_env, arrow_from_graph, forces,
                             graph_of, has_pneumoconnected_fibers,
                             is_graph, parse_formula, pc_object,
                             pneumoconnected_countermodel,
                             universally_valid)
from fptopos.presheaf import (make_presheaf, nat_transformations, terminal,
                              two)
from fptopos.sublattice import Subobject, subobjects

import oracles

PT = catalog("point")
RG = catalog("refgraph")
P2 = builtin_object(RG, "P2")
L = builtin_object(RG, "L")


def _point_setup():
    X = make_presheaf(PT, {"*": ("a", "b")}, {}, "X")
    xsort = PresheafSort(X)
    s1 = SubConst(Subobject(X, {"*": frozenset(["a"])}), "S1")
    s2 = SubConst(Subobject(X, {"*": frozenset()}), "S2")
    atoms = [Top(), Bot(),
             Eq(VarT("x"), VarT("x")), Eq(VarT("x"), VarT("y")),
             Mem(VarT("x"), s1), Mem(VarT("y"), s1),
             Mem(VarT("x"), s2)]
    sorts = [("x", xsort), ("y", xsort), ("z", xsort)]
    return X, xsort, atoms, sorts


def _check_against_classical(phi, X, xsort):
    free = sorted(phi.free())
    for combo in itertools.product(X.sets["*"], repeat=len(free)):
        env = {n: (xsort, v) for n, v in zip(free, combo)}
        assert forces("*", env, phi) == \
            oracles.classical_truth(phi, dict(zip(free, combo)))


def test_point_base_forcing_is_classical_exhaustive_depth_two():
    X, xsort, atoms, sorts = _point_setup()
    for phi in oracles.all_formulas(atoms, sorts[:2], 2):
        _check_against_classical(phi, X, xsort)


def test_point_base_forcing_is_classical_random_depth_three():
    X, xsort, atoms, sorts = _point_setup()
    rng = random.Random(7)
    for _ in range(500):
        phi = oracles.random_formula(rng, atoms, sorts, 3)
        _check_against_classical(phi, X, xsort)


def _refgraph_atoms():
    xsort = PresheafSort(P2)
    subs = subobjects(P2)
    consts = [SubConst(S, "S%d" % i) for i, S in enumerate(subs)]
    atoms = [Eq(VarT("x"), VarT("y")), Top(), Bot()]
    atoms += [Mem(VarT("x"), S) for S in consts[:4]]
    atoms += [Mem(VarT("y"), S) for S in consts[2:6]]
    return xsort, atoms


def test_monotonicity_under_restriction():
    xsort, atoms = _refgraph_atoms()
    sorts = [("x", xsort), ("y", xsort)]
    rng = random.Random(11)
    checked = 0
    while checked < 200:
        phi = oracles.random_formula(rng, atoms, sorts, 3)
        c = rng.choice(RG.objects)
        env = {n: (xsort, rng.choice(P2.sets[c])) for n in phi.free()}
        if not forces(c, env, phi):
            continue
        for m in RG.arrows_into(c):
            assert forces(RG.dom(m), _restrict_env(env, m), phi)
        checked += 1


def test_excluded_middle_fails_on_l():
    vert = [S for S in subobjects(L) if S.size_vector() == (1, 1)][0]
    phi = Or(Mem(VarT("x"), SubConst(vert, "S")),
             Not(Mem(VarT("x"), SubConst(vert, "S"))))
    cm = universally_valid(phi, {"x": PresheafSort(L)})
    assert cm is not None and cm.stage == "E" and cm.bindings == {"x": "e"}


def test_double_negation_elimination_countermodel_on_l():
    vert = [S for S in subobjects(L) if S.size_vector() == (1, 1)][0]
    mem = lambda: Mem(VarT("x"), SubConst(vert, "S"))
    phi = Implies(Not(Not(mem())), mem())
    cm = universally_valid(phi, {"x": PresheafSort(L)})
    assert cm is not None
    assert cm.stage == "E" and cm.bindings == {"x": "e"}


def test_pc_object_of_p2():
    pc = pc_object(P2)
    assert pc.power.carrier.size_vector() == (5, 72)
    assert tuple(len(pc.sub.parts[c]) for c in RG.objects) == (2, 2)


def test_graph_roundtrip():
    t2, _i1, _i2 = two(RG)
    for f in nat_transformations(P2, t2):
        G = graph_of(f)
        assert is_graph(P2, t2, G.sub) is None
        g = arrow_from_graph(P2, t2, G.sub)
        assert g.same_components(f)


def test_non_functional_subobject_is_not_a_graph():
    t2, _i1, _i2 = two(RG)
    from fptopos.presheaf import product
    P, _p1, _p2 = product(P2, t2)
    full = Subobject(P, {c: frozenset(P.sets[c]) for c in RG.objects})
    assert is_graph(P2, t2, full) is not None


def test_pneumo_identity_and_collapse():
    from fptopos.presheaf import identity_nat
    assert has_pneumoconnected_fibers(identity_nat(P2))
    one = terminal(RG)
    q = nat_transformations(P2, one)[0]
    assert has_pneumoconnected_fibers(q)


def test_pneumo_fails_for_two_point_collapse_on_point_base():
    X = make_presheaf(PT, {"*": ("a", "b")}, {}, "X")
    q = nat_transformations(X, terminal(PT))[0]
    cm = pneumoconnected_countermodel(q)
    assert cm is not None


# ---------------------------------------------------------------------------
# surface syntax

def _names():
    return {"P2": PresheafSort(P2), "L": PresheafSort(L)}


def test_parse_reflexivity():
    phi = parse_formula("all x : P2 . x = x", _names())
    assert universally_valid(phi, {}, base=RG) is None


def test_parse_precedence_and_quantifiers():
    text = "all x : P2 . all y : P2 . x = y or not x = y implies true"
    phi = parse_formula(text, _names())
    assert universally_valid(phi, {}, base=RG) is None
    # vertices of P2 are not internally equal-or-apart at stage E
    apart = parse_formula("all x : P2 . all y : P2 . x = y or not x = y",
                          _names())
    assert universally_valid(apart, {}, base=RG) is not None


def test_parse_membership_and_pairs():
    vert = [S for S in subobjects(L) if S.size_vector() == (1, 1)][0]
    names = dict(_names(), S=SubConst(vert, "S"))
    phi = parse_formula("exists x : L . x in S", names)
    assert universally_valid(phi, {}, base=RG) is None


def test_parse_error_carries_position():
    with pytest.raises(ParseError) as exc:
        parse_formula("all x : P2 .\n x = ", _names())
    assert exc.value.line == 2
    with pytest.raises(ParseError):
        parse_formula("all x : Mystery . x = x", _names())
