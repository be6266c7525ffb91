"""Corpus-level verification harnesses and counterexample search.

Everything here quantifies a property over a bounded enumeration of
presheaves (and arrows between them) and reports either "no exception
found" or the first witness in deterministic corpus order — which is
stage-size-lexicographically minimal by construction.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .corpus import enumerate_presheaves
from .decidable import (check_dqo, check_dso, is_connected, is_decidable,
                        pi, presheaf_snippet, separated_reflection,
                        subobject_snippet)
from .errors import UnknownName, DEFAULT_SIZE_CAP
from .fincat import FinCategory
from .forcing import has_pneumoconnected_fibers, pc_object
from .presheaf import (NatTrans, Presheaf, exponential, factor_through,
                       global_elements, inclusion_of, is_epi, is_isomorphic,
                       nat_transformations, pairing, product, pullback,
                       terminal, two)
from .sublattice import complemented_subobjects


@dataclass
class PropertyResult:
    """One universally-quantified check over a corpus."""

    name: str
    base: str
    bound: str
    holds: bool
    checked: int
    witness: dict | None = None

    def to_dict(self) -> dict:
        return {"name": self.name, "base": self.base, "bound": self.bound,
                "holds": self.holds, "checked": self.checked,
                "witness": self.witness}


def _run_items(items, worker, jobs: int = 1):
    """Evaluate worker over items, optionally on a thread pool; results
    are re-sorted into input order so parallelism cannot change output."""
    if jobs <= 1:
        return [worker(it) for it in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(worker, items))


# ---------------------------------------------------------------------------
# fibers

def fiber(f: NatTrans, point: NatTrans) -> Presheaf:
    """The fiber of f: X→Y over a global point b: 1→Y, as the
    subpresheaf of X of elements mapped onto the restriction of b."""
    X = f.dom
    parts = {c: frozenset(x for x in X.sets[c]
                          if f.apply(c, x) == point.apply(c, "*"))
             for c in X.base.objects}
    F, _inc = inclusion_of(X, parts)
    return F


# ---------------------------------------------------------------------------
# the three equivalent fiber conditions

def epi_conditions(q: NatTrans, decidables: list[Presheaf],
                   cap: int = DEFAULT_SIZE_CAP,
                   pc=None) -> tuple[bool, bool, bool]:
    """For an epi q: X↠Y — (i) every X→2 factors through q,
    (ii) q has pneumoconnected fibers, (iii) every map from X to a
    decidable object factors through q."""
    t2, _i1, _i2 = two(q.dom.base)
    cond_i = all(factor_through(q, h) is not None
                 for h in nat_transformations(q.dom, t2))
    cond_ii = has_pneumoconnected_fibers(q, cap, pc)
    cond_iii = all(factor_through(q, h) is not None
                   for D in decidables
                   for h in nat_transformations(q.dom, D))
    return cond_i, cond_ii, cond_iii


def lemma_report(C: FinCategory, bounds, cap: int = DEFAULT_SIZE_CAP,
                 jobs: int = 1) -> PropertyResult:
    """Check that the three fiber conditions agree for every epi between
    corpus objects."""
    index = enumerate_presheaves(C, bounds, cap)
    objs = list(index)
    decidables = [X for X in objs if is_decidable(X, cap)]
    pairs = [(X, Y) for X in objs for Y in objs]

    def worker(pair):
        X, Y = pair
        pcx = None
        for q in nat_transformations(X, Y):
            if not is_epi(q):
                continue
            if pcx is None:
                # reuse the P_c(X) object across epis out of X
                pcx = pc_object(X, cap)
            i, ii, iii = epi_conditions(q, decidables, cap, pcx)
            if not (i == ii == iii):
                return {"dom": presheaf_snippet(X),
                        "cod": presheaf_snippet(Y),
                        "epi": {c: dict(q.components[c])
                                for c in C.objects},
                        "conditions": [i, ii, iii]}
        return None

    results = _run_items(pairs, worker, jobs)
    witness = next((r for r in results if r is not None), None)
    return PropertyResult("lemma-equivalences", C.name,
                          index.bound_label(), witness is None,
                          len(pairs), witness)


# ---------------------------------------------------------------------------
# the standard property battery

def _prop_pi_structure(C, objs, cap):
    """Π idempotence, Π(1) ≅ 1, ΠX ≅ 0 ⇔ X ≅ 0."""
    one = terminal(C)
    if not is_isomorphic(pi(one, cap).quotient, one):
        return {"object": "1"}
    for X in objs:
        Q = pi(X, cap).quotient
        if not is_isomorphic(pi(Q, cap).quotient, Q):
            return {"object": presheaf_snippet(X), "failed": "idempotence"}
        if Q.is_empty() != X.is_empty():
            return {"object": presheaf_snippet(X), "failed": "zero-iff-zero"}
    return None


def _prop_connected_iff_pi_one(C, objs, cap):
    one = terminal(C)
    for X in objs:
        lhs = is_connected(X, cap)
        rhs = is_isomorphic(pi(X, cap).quotient, one)
        if lhs != rhs:
            return {"object": presheaf_snippet(X),
                    "connected": lhs, "pi_terminal": rhs}
    return None


def _prop_connected_products(C, objs, cap):
    connected = [X for X in objs if is_connected(X, cap)]
    for X in connected:
        for Y in connected:
            P, _p1, _p2 = product(X, Y, cap)
            if not is_connected(P, cap):
                return {"left": presheaf_snippet(X),
                        "right": presheaf_snippet(Y)}
    return None


def _prop_pi_products(C, objs, cap):
    for X in objs:
        for Y in objs:
            P, _p1, _p2 = product(X, Y, cap)
            lhs = pi(P, cap).quotient
            rhs, _q1, _q2 = product(pi(X, cap).quotient,
                                    pi(Y, cap).quotient, cap)
            if not is_isomorphic(lhs, rhs):
                return {"left": presheaf_snippet(X),
                        "right": presheaf_snippet(Y)}
    return None


def _prop_pneumo_fibers_connected(C, objs, cap):
    """If f has pneumoconnected fibers then no fiber over a global point
    has a nontrivial complemented subobject."""
    for X in objs:
        for Y in objs:
            arrows = nat_transformations(X, Y)
            if not arrows:
                continue
            points = global_elements(Y)
            pcx = pc_object(X, cap) if arrows else None
            for f in arrows:
                if not has_pneumoconnected_fibers(f, cap, pcx):
                    continue
                for b in points:
                    F = fiber(f, b)
                    if len(complemented_subobjects(F, cap)) > 2:
                        return {"dom": presheaf_snippet(X),
                                "cod": presheaf_snippet(Y),
                                "point": {c: b.apply(c, "*")
                                          for c in C.objects}}
    return None


def _prop_pneumo_product_closed(C, objs, cap):
    """f, g with pneumoconnected fibers ⇒ f×g has pneumoconnected
    fibers (epis only, to keep the arrow space small)."""
    epis = []
    for X in objs:
        for Y in objs:
            for f in nat_transformations(X, Y):
                if is_epi(f) and has_pneumoconnected_fibers(f, cap):
                    epis.append(f)
    for f in epis:
        for g in epis:
            P, p1, p2 = product(f.dom, g.dom, cap)
            Q, _q1, _q2 = product(f.cod, g.cod, cap)
            fg = pairing(p1.then(f), p2.then(g), Q)
            if not has_pneumoconnected_fibers(fg, cap):
                return {"left_cod": presheaf_snippet(f.cod),
                        "right_cod": presheaf_snippet(g.cod)}
    return None


def _prop_pneumo_pullback_closed(C, objs, cap):
    """Any pullback of an epi with pneumoconnected fibers again has
    pneumoconnected fibers."""
    for X in objs:
        for Y in objs:
            for f in nat_transformations(X, Y):
                if not (is_epi(f) and has_pneumoconnected_fibers(f, cap)):
                    continue
                for Z in objs:
                    for g in nat_transformations(Z, Y):
                        _P, pr1, _pr2 = pullback(g, f)
                        if not has_pneumoconnected_fibers(pr1, cap):
                            return {"arrow_dom": presheaf_snippet(X),
                                    "along_dom": presheaf_snippet(Z),
                                    "cod": presheaf_snippet(Y)}
    return None


def _prop_separated_reflection_pneumo(C, objs, cap):
    for X in objs:
        _M, m = separated_reflection(X, cap)
        if not has_pneumoconnected_fibers(m, cap):
            return {"object": presheaf_snippet(X)}
    return None


def _prop_exponential_ideal(C, objs, cap):
    decidables = [Y for Y in objs if is_decidable(Y, cap)]
    for X in objs:
        for Y in decidables:
            if not is_decidable(exponential(X, Y, cap), cap):
                return {"exponent": presheaf_snippet(X),
                        "base_object": presheaf_snippet(Y)}
    return None


def _prop_decidable_closure(C, objs, cap):
    """Decidables are closed under subobjects and binary products."""
    from .presheaf import subfunctors, sub_presheaf
    decidables = [X for X in objs if is_decidable(X, cap)]
    for X in decidables:
        for parts in subfunctors(X, cap):
            if not is_decidable(sub_presheaf(X, parts), cap):
                return {"object": presheaf_snippet(X),
                        "subobject": {c: sorted(parts[c])
                                      for c in C.objects}}
        for Y in decidables:
            P, _p1, _p2 = product(X, Y, cap)
            if not is_decidable(P, cap):
                return {"left": presheaf_snippet(X),
                        "right": presheaf_snippet(Y)}
    return None


PROPERTIES = {
    "pi-structure": _prop_pi_structure,
    "connected-iff-pi-one": _prop_connected_iff_pi_one,
    "connected-products": _prop_connected_products,
    "pi-products": _prop_pi_products,
    "pneumo-fibers-connected": _prop_pneumo_fibers_connected,
    "pneumo-product-closed": _prop_pneumo_product_closed,
    "pneumo-pullback-closed": _prop_pneumo_pullback_closed,
    "separated-reflection-pneumo": _prop_separated_reflection_pneumo,
    "exponential-ideal": _prop_exponential_ideal,
    "decidable-closure": _prop_decidable_closure,
}


def props_report(C: FinCategory, bounds, cap: int = DEFAULT_SIZE_CAP,
                 names: list[str] | None = None,
                 jobs: int = 1) -> list[PropertyResult]:
    """Run the named property checks (all by default) over the corpus."""
    index = enumerate_presheaves(C, bounds, cap)
    objs = list(index)
    selected = names if names is not None else sorted(PROPERTIES)
    for n in selected:
        if n not in PROPERTIES:
            raise UnknownName("unknown property %r (have: %s)"
                              % (n, ", ".join(sorted(PROPERTIES))))

    def worker(n):
        witness = PROPERTIES[n](C, objs, cap)
        return PropertyResult(n, C.name, index.bound_label(),
                              witness is None, len(objs), witness)

    return _run_items(selected, worker, jobs)


# ---------------------------------------------------------------------------
# counterexample search

def _search_dqo(C, objs, cap):
    for X in objs:
        r = check_dqo(X, cap)
        if not r.holds():
            return r.witness
    return None


def _search_dso(C, objs, cap):
    for X in objs:
        r = check_dso(X, cap)
        if not r.holds():
            return r.witness
    return None


def _search_pneumo_pi(C, objs, cap):
    for X in objs:
        r = pi(X, cap)
        if not has_pneumoconnected_fibers(r.map, cap):
            return {"object": presheaf_snippet(X), "family": "pi-quotient"}
    return None


def _search_pneumo_separated(C, objs, cap):
    return _prop_separated_reflection_pneumo(C, objs, cap)


def _search_pneumo_epis(C, objs, cap):
    for X in objs:
        pcx = None
        for Y in objs:
            for q in nat_transformations(X, Y):
                if not is_epi(q):
                    continue
                t2, _i1, _i2 = two(C)
                if any(factor_through(q, h) is None
                       for h in nat_transformations(X, t2)):
                    continue  # family: epis inverting all maps to 2
                if pcx is None:
                    pcx = pc_object(X, cap)
                if not has_pneumoconnected_fibers(q, cap, pcx):
                    return {"dom": presheaf_snippet(X),
                            "cod": presheaf_snippet(Y),
                            "epi": {c: dict(q.components[c])
                                    for c in C.objects}}
    return None


def _search_pi_products(C, objs, cap):
    return _prop_pi_products(C, objs, cap)


def _search_lemma(C, objs, cap):
    decidables = [X for X in objs if is_decidable(X, cap)]
    for X in objs:
        for Y in objs:
            for q in nat_transformations(X, Y):
                if not is_epi(q):
                    continue
                i, ii, iii = epi_conditions(q, decidables, cap)
                if not (i == ii == iii):
                    return {"dom": presheaf_snippet(X),
                            "cod": presheaf_snippet(Y),
                            "conditions": [i, ii, iii]}
    return None


SEARCHES = {
    "dqo-uniqueness": _search_dqo,
    "dso-uniqueness": _search_dso,
    "pneumo-pi-quotients": _search_pneumo_pi,
    "pneumo-separated-reflections": _search_pneumo_separated,
    "pneumo-two-inverting-epis": _search_pneumo_epis,
    "pi-product-preservation": _search_pi_products,
    "lemma-equivalences": _search_lemma,
}


def search_counterexample(prop: str, C: FinCategory, bounds,
                          cap: int = DEFAULT_SIZE_CAP) -> dict | None:
    """First witness violating the registered property, in deterministic
    corpus order (hence stage-size minimal); None if the bound is
    exhausted without one."""
    if prop not in SEARCHES:
        raise UnknownName("unknown property %r (have: %s)"
                          % (prop, ", ".join(sorted(SEARCHES))))
    index = enumerate_presheaves(C, bounds, cap)
    return SEARCHES[prop](C, list(index), cap)
