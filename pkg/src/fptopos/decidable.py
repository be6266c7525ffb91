"""Everything about dec(E) inside one finite presheaf topos.

Decidability tests, the exact NS decision, the decidable-quotient
reflection and the DQO checker, connectedness, the DSO checker,
congruence enumeration, and the ¬¬-separated reflection.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .corpus import enumerate_presheaves
from .errors import PresheafError, SizeCapError, DEFAULT_SIZE_CAP
from .fincat import FinCategory
from .presheaf import (NatTrans, Presheaf, factor_through, global_elements,
                       identity_nat, is_epi, is_isomorphic, make_presheaf,
                       nat_transformations, pel, product, quotient_by_pairs,
                       sub_presheaf, subfunctors, terminal, two, yoneda)
from .sublattice import (Subobject, complemented_subobjects, is_complemented,
                         is_nn_dense_arrow, nn_closure)


@dataclass(eq=False)
class Congruence:
    """An internal equivalence relation: a subfunctor of X×X that is
    stage-wise reflexive, symmetric and transitive."""

    ambient: Presheaf
    relation: Subobject  # of ambient×ambient (pair ids via pel)


@dataclass
class AxiomReport:
    axiom: str
    verdict: str  # holds | holds-at-bound | fails | unknown-at-bound
    witness: dict | None = None
    bound: str = "exact"

    def holds(self) -> bool:
        return self.verdict in ("holds", "holds-at-bound")

    def to_dict(self) -> dict:
        return {"axiom": self.axiom, "verdict": self.verdict,
                "bound": self.bound, "witness": self.witness}


def presheaf_snippet(X: Presheaf) -> dict:
    """Serializable witness form of a presheaf (re-checkable)."""
    return {
        "name": X.name or "X",
        "sets": {c: list(X.sets[c]) for c in X.base.objects},
        "actions": {m: dict(sorted(X.actions[m].items()))
                    for m in X.base.nonidentity_morphisms()},
    }


def subobject_snippet(S: Subobject) -> dict:
    return {c: sorted(S.parts[c]) for c in S.ambient.base.objects}


# ---------------------------------------------------------------------------
# decidability

def diagonal(X: Presheaf, cap: int = DEFAULT_SIZE_CAP):
    """The diagonal Δ_X ↣ X×X as a subobject of the product."""
    P, _p1, _p2 = product(X, X, cap)
    parts = {c: frozenset(pel(x, x) for x in X.sets[c])
             for c in X.base.objects}
    return P, Subobject(P, parts)


def is_decidable(X: Presheaf, cap: int = DEFAULT_SIZE_CAP) -> bool:
    """X is decidable iff its diagonal is complemented in Sub(X×X)."""
    _P, delta = diagonal(X, cap)
    return is_complemented(delta)


# ---------------------------------------------------------------------------
# the Nullstellensatz axiom

def check_ns(C: FinCategory) -> AxiomReport:
    """Exact NS decision: every object is initial or has a global element
    iff every representable has a global element.

    Soundness: a global element p of y(c) turns any x ∈ X(c) into the
    global element b ↦ X(p_b)(x); necessity: representables are nonempty.
    """
    failing = []
    first = None
    for c in C.objects:
        yc = yoneda(C, c)
        if not global_elements(yc):
            failing.append("y(%s)" % c)
            if first is None:
                first = yc
    if failing:
        return AxiomReport(
            "NS", "fails",
            {"representable": failing[0],
             "all_failing": failing,
             "presheaf": presheaf_snippet(first)})
    return AxiomReport("NS", "holds")


def ns_brute_force(C: FinCategory, bounds,
                   cap: int = DEFAULT_SIZE_CAP) -> AxiomReport:
    """Bounded falsifier companion to check_ns: search the corpus for a
    nonempty presheaf without global elements."""
    index = enumerate_presheaves(C, bounds, cap)
    for X in index:
        if not X.is_empty() and not global_elements(X):
            return AxiomReport("NS", "fails",
                               {"presheaf": presheaf_snippet(X)},
                               index.bound_label())
    return AxiomReport("NS", "holds-at-bound", None, index.bound_label())


# ---------------------------------------------------------------------------
# the decidable-quotient reflection Π

@dataclass(eq=False)
class PiResult:
    source: Presheaf
    quotient: Presheaf
    map: NatTrans
    two_arrows: list[NatTrans]


def pi(X: Presheaf, cap: int = DEFAULT_SIZE_CAP) -> PiResult:
    """The decidable quotient Π(X): the image of the canonical map
    X → 2^Hom(X,2), built directly (the full power of 2 is never
    materialized)."""
    C = X.base
    t2, _i1, _i2 = two(C)
    homs = sorted(nat_transformations(X, t2), key=lambda h: h.key())
    _cap_guard(len(homs), cap)
    tuples = {c: {x: "(%s)" % "|".join(h.apply(c, x) for h in homs)
                  for x in X.sets[c]}
              for c in C.objects}
    sets = {}
    for c in C.objects:
        seen = []
        for x in X.sets[c]:
            t = tuples[c][x]
            if t not in seen:
                seen.append(t)
        sets[c] = tuple(seen)
    actions = {}
    for m in C.nonidentity_morphisms():
        d, c = C.morphisms[m]
        table = {}
        for x in X.sets[c]:
            key = tuples[c][x]
            val = tuples[d][X.act(m, x)]
            if table.get(key, val) != val:
                raise PresheafError("NotFunctorial",
                                    "separated tuple action ill-defined")
            table[key] = val
        actions[m] = table
    Q = make_presheaf(C, sets, actions, "Π(%s)" % (X.name or "X"))
    q = NatTrans(X, Q, {c: dict(tuples[c]) for c in C.objects}, "p")
    return PiResult(X, Q, q, homs)


def _cap_guard(n: int, cap: int):
    if n > cap:
        raise SizeCapError("Hom(X,2) has %d elements (cap %d)" % (n, cap))


def pi_arrow(f: NatTrans, cap: int = DEFAULT_SIZE_CAP,
             pi_dom: PiResult | None = None,
             pi_cod: PiResult | None = None) -> NatTrans:
    """The induced arrow Π(f): ΠX → ΠY."""
    if pi_dom is None:
        pi_dom = pi(f.dom, cap)
    if pi_cod is None:
        pi_cod = pi(f.cod, cap)
    g = factor_through(pi_dom.map, f.then(pi_cod.map))
    if g is None:
        raise PresheafError("NotFunctorial",
                            "Π(f) failed to factor; NS+DQO may fail here")
    return g


def is_connected(X: Presheaf, cap: int = DEFAULT_SIZE_CAP) -> bool:
    """Exactly two complemented subobjects (0 and X)."""
    return len(complemented_subobjects(X, cap)) == 2


# ---------------------------------------------------------------------------
# congruences and quotients

def congruences(X: Presheaf, cap: int = DEFAULT_SIZE_CAP) -> list[Congruence]:
    """All subfunctors of X×X that are stage-wise equivalence relations."""
    P, _p1, _p2 = product(X, X, cap)
    out = []
    for parts in subfunctors(P, cap):
        if _is_equivalence(X, parts):
            out.append(Congruence(X, Subobject(P, parts)))
    return out


def _is_equivalence(X: Presheaf, parts) -> bool:
    for c in X.base.objects:
        rel = {(x, y) for x in X.sets[c] for y in X.sets[c]
               if pel(x, y) in parts[c]}
        for x in X.sets[c]:
            if (x, x) not in rel:
                return False
        for (x, y) in rel:
            if (y, x) not in rel:
                return False
        for (x, y) in rel:
            for (y2, z) in rel:
                if y2 == y and (x, z) not in rel:
                    return False
    return True


def quotient(X: Presheaf, R: Congruence):
    """Exact quotient of X by a congruence (pointwise set quotient)."""
    pairs = {}
    for c in X.base.objects:
        pairs[c] = [(x, y) for x in X.sets[c] for y in X.sets[c]
                    if pel(x, y) in R.relation.parts[c]]
    return quotient_by_pairs(X, pairs)


# ---------------------------------------------------------------------------
# DQO

def check_dqo(X: Presheaf, cap: int = DEFAULT_SIZE_CAP) -> AxiomReport:
    """DQO at X: K(X) = congruences whose quotient is decidable and
    factors every arrow X→2; DQO holds at X iff K(X) is a singleton."""
    t2, _i1, _i2 = two(X.base)
    homs = nat_transformations(X, t2)
    witnesses = []
    for R in congruences(X, cap):
        Q, q = quotient(X, R)
        if not is_decidable(Q, cap):
            continue
        if all(factor_through(q, h) is not None for h in homs):
            witnesses.append((R, Q))
    if len(witnesses) == 1:
        return AxiomReport("DQO", "holds",
                           {"object": presheaf_snippet(X)})
    return AxiomReport(
        "DQO", "fails",
        {"object": presheaf_snippet(X),
         "factoring_congruences": [subobject_snippet(R.relation)
                                   for R, _Q in witnesses]})


def check_dqo_bounded(C: FinCategory, bounds,
                      cap: int = DEFAULT_SIZE_CAP) -> AxiomReport:
    """DQO over all presheaves up to iso within the bounds."""
    index = enumerate_presheaves(C, bounds, cap)
    for X in index:
        report = check_dqo(X, cap)
        if not report.holds():
            report.verdict = "fails"
            report.bound = index.bound_label()
            return report
    return AxiomReport("DQO", "holds-at-bound", None, index.bound_label())


# ---------------------------------------------------------------------------
# DSO

def check_dso(X: Presheaf, cap: int = DEFAULT_SIZE_CAP) -> AxiomReport:
    """DSO at X: a unique decidable subobject through which every global
    point of X factors."""
    points = global_elements(X)
    candidates = []
    for parts in subfunctors(X, cap):
        S = sub_presheaf(X, parts)
        if not is_decidable(S, cap):
            continue
        if all(p.apply(c, "*") in parts[c]
               for p in points for c in X.base.objects):
            candidates.append(parts)
    if len(candidates) == 1:
        return AxiomReport(
            "DSO", "holds",
            {"object": presheaf_snippet(X),
             "subobject": {c: sorted(candidates[0][c])
                           for c in X.base.objects}})
    return AxiomReport(
        "DSO", "fails",
        {"object": presheaf_snippet(X),
         "decidable_subobjects": [{c: sorted(p[c])
                                   for c in X.base.objects}
                                  for p in candidates]})


def check_dso_bounded(C: FinCategory, bounds,
                      cap: int = DEFAULT_SIZE_CAP) -> AxiomReport:
    index = enumerate_presheaves(C, bounds, cap)
    for X in index:
        report = check_dso(X, cap)
        if not report.holds():
            report.verdict = "fails"
            report.bound = index.bound_label()
            return report
    return AxiomReport("DSO", "holds-at-bound", None, index.bound_label())


def dso_subobject(X: Presheaf, cap: int = DEFAULT_SIZE_CAP) -> Subobject:
    """The unique DSO subobject of X; raises if DSO fails at X."""
    report = check_dso(X, cap)
    if not report.holds():
        raise PresheafError("DSOFails", "DSO fails at %r" % (X.name or "X"))
    return Subobject(X, {c: frozenset(report.witness["subobject"][c])
                         for c in X.base.objects})


# ---------------------------------------------------------------------------
# ¬¬-separated reflection

def separated_reflection(X: Presheaf, cap: int = DEFAULT_SIZE_CAP):
    """Quotient of X by the ¬¬-closure of its diagonal; the result is
    ¬¬-separated and the map is the separated reflection."""
    _P, delta = diagonal(X, cap)
    closed = nn_closure(delta)
    R = Congruence(X, closed)
    if not _is_equivalence(X, closed.parts):
        raise PresheafError("NotFunctorial",
                            "¬¬Δ is not a stage-wise equivalence relation")
    M, m = quotient(X, R)
    M.name = "M(%s)" % (X.name or "X")
    # Separatedness: the diagonal of M is ¬¬-closed.
    _PM, deltaM = diagonal(M, cap)
    if nn_closure(deltaM) != deltaM:
        raise PresheafError("NotFunctorial",
                            "separated reflection is not separated")
    return M, m


# ---------------------------------------------------------------------------
# dec(E) is a topos (both sides of the criterion)

@dataclass
class TwoSidedReport:
    name: str
    left: bool
    right: bool
    details: dict = field(default_factory=dict)
    bound: str = ""

    def agree(self) -> bool:
        return self.left == self.right

    def to_dict(self) -> dict:
        return {"name": self.name, "left": self.left, "right": self.right,
                "agree": self.agree(), "bound": self.bound,
                "details": self.details}


def dec_is_topos_check(C: FinCategory, bounds,
                       cap: int = DEFAULT_SIZE_CAP) -> TwoSidedReport:
    """Compare, over the corpus: (left) every mono between decidable
    objects is complemented; (right) Π(f) is epic for every ¬¬-dense
    corpus arrow f."""
    index = enumerate_presheaves(C, bounds, cap)
    left = True
    left_witness = None
    for X in index:
        if not is_decidable(X, cap):
            continue
        for parts in subfunctors(X, cap):
            if not is_complemented(Subobject(X, parts)):
                left = False
                left_witness = {"object": presheaf_snippet(X),
                                "subobject": {c: sorted(parts[c])
                                              for c in C.objects}}
                break
        if not left:
            break

    right = True
    right_witness = None
    pis = {id(X): pi(X, cap) for X in index}
    for X in index:
        for Y in index:
            for f in nat_transformations(X, Y):
                if not is_nn_dense_arrow(f):
                    continue
                pf = pi_arrow(f, cap, pis[id(X)], pis[id(Y)])
                if not is_epi(pf):
                    right = False
                    right_witness = {"dom": presheaf_snippet(X),
                                     "cod": presheaf_snippet(Y)}
                    break
            if not right:
                break
        if not right:
            break

    details = {}
    if left_witness:
        details["non_complemented_mono"] = left_witness
    if right_witness:
        details["dense_arrow_with_nonepic_pi"] = right_witness
    return TwoSidedReport("dec-is-topos", left, right, details,
                          index.bound_label())


# ---------------------------------------------------------------------------
# convenience predicates used by harnesses

def decidable_objects(index) -> list[Presheaf]:
    return [X for X in index if is_decidable(X)]


def epis_between(X: Presheaf, Y: Presheaf) -> list[NatTrans]:
    return [f for f in nat_transformations(X, Y) if is_epi(f)]
