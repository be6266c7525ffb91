"""Objects and morphisms of the finite presheaf topos Set^(C^op).

Presheaves of finite sets, natural transformations, finite limits and
colimits, image factorizations, exponentials, the Yoneda embedding, the
subobject classifier and power objects.  Everything is computed pointwise
and deterministically: constructed element ids are canonical strings, so
repeated runs are bit-identical.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .errors import (BaseMismatch, PresheafError, ShapeMismatch,
                     SizeCapError, UnknownName, DEFAULT_SIZE_CAP)
from .fincat import FinCategory


@dataclass(eq=False)
class Presheaf:
    """A presheaf X: one finite set per base object, one restriction
    function per base morphism (contravariant: f: b→c acts X(c)→X(b))."""

    base: FinCategory
    sets: dict[str, tuple[str, ...]]
    actions: dict[str, dict[str, str]]
    name: str = ""

    def act(self, m: str, x: str) -> str:
        if self.base.is_identity(m):
            return x
        return self.actions[m][x]

    def elements(self):
        """All (stage, point) pairs in deterministic order."""
        for c in self.base.objects:
            for x in self.sets[c]:
                yield (c, x)

    def size_vector(self) -> tuple[int, ...]:
        return tuple(len(self.sets[c]) for c in self.base.objects)

    def total_size(self) -> int:
        return sum(self.size_vector())

    def is_empty(self) -> bool:
        return self.total_size() == 0

    def __repr__(self):
        label = self.name or "X"
        sizes = ", ".join("%s:%d" % (c, len(self.sets[c]))
                          for c in self.base.objects)
        return "<Presheaf %s [%s]>" % (label, sizes)


@dataclass(eq=False)
class NatTrans:
    """A natural transformation between presheaves on the same base."""

    dom: Presheaf
    cod: Presheaf
    components: dict[str, dict[str, str]]
    name: str = ""

    def apply(self, c: str, x: str) -> str:
        return self.components[c][x]

    def then(self, other: "NatTrans") -> "NatTrans":
        """other ∘ self."""
        comps = {c: {x: other.apply(c, self.apply(c, x))
                     for x in self.dom.sets[c]}
                 for c in self.dom.base.objects}
        return NatTrans(self.dom, other.cod, comps)

    def same_components(self, other: "NatTrans") -> bool:
        return self.components == other.components

    def key(self) -> tuple:
        return tuple(
            (c, tuple(sorted(self.components[c].items())))
            for c in self.dom.base.objects)

    def __repr__(self):
        return "<NatTrans %s>" % (self.name or "f")


@dataclass(frozen=True)
class Element:
    """A generalized element: a point of X at some stage."""

    stage: str
    point: str


def _same_base(X: Presheaf, Y: Presheaf):
    if X.base is not Y.base:
        raise BaseMismatch("presheaves live over different base categories")


def _cap(n: int, cap: int, what: str):
    if n > cap:
        raise SizeCapError("%s needs %d elements at one stage (cap %d)"
                           % (what, n, cap))


def pel(x: str, y: str) -> str:
    """Canonical element id for a pair; never parsed back, only compared."""
    return "(%s,%s)" % (x, y)


def validate_presheaf(C: FinCategory, raw: dict) -> Presheaf:
    """Validate a raw presheaf description against its base category.

    raw gives per-object element lists and per-(non-identity-)morphism
    action tables.  Raises PresheafError with kind MissingAction,
    DanglingElement or NotFunctorial.
    """
    sets = {}
    for c in C.objects:
        if c not in raw["sets"]:
            raise PresheafError("DanglingElement",
                                "no element list for object %r" % c)
        elems = tuple(raw["sets"][c])
        if len(set(elems)) != len(elems):
            raise PresheafError("DanglingElement",
                                "duplicate elements at %r" % c)
        sets[c] = elems
    for c in raw["sets"]:
        if c not in C.objects:
            raise PresheafError("DanglingElement",
                                "elements for unknown object %r" % c)

    actions = {}
    given = raw.get("actions", {})
    for m in given:
        if m not in C.morphisms:
            raise PresheafError("DanglingElement",
                                "action for unknown morphism %r" % m)
    for m in C.morphism_names():
        d, c = C.morphisms[m]
        if C.is_identity(m):
            table = given.get(m)
            if table is not None and \
                    any(table.get(x) != x for x in sets[c]):
                raise PresheafError("NotFunctorial",
                                    "identity action at %r is not id" % c)
            actions[m] = {x: x for x in sets[c]}
            continue
        if m not in given:
            raise PresheafError("MissingAction",
                                "no action table for morphism %r" % m)
        table = dict(given[m])
        for x in sets[c]:
            if x not in table:
                raise PresheafError("MissingAction",
                                    "action %r undefined on %r" % (m, x))
            if table[x] not in sets[d]:
                raise PresheafError(
                    "DanglingElement",
                    "action %r sends %r outside X(%r)" % (m, x, d))
        for x in table:
            if x not in sets[c]:
                raise PresheafError("DanglingElement",
                                    "action %r defined on unknown %r" % (m, x))
        actions[m] = table

    X = Presheaf(C, sets, actions, raw.get("name", ""))
    _check_functorial(X)
    return X


def _check_functorial(X: Presheaf):
    C = X.base
    for (g, f), gf in C.composition.items():
        # X(g∘f) = X(f) ∘ X(g)
        _d, c = C.morphisms[g]
        for x in X.sets[c]:
            if X.act(f, X.act(g, x)) != X.act(gf, x):
                raise PresheafError(
                    "NotFunctorial",
                    "X(%r)∘X(%r) != X(%r) at %r" % (f, g, gf, x))


def make_from_generators(C: FinCategory, sets, gen_actions,
                         name="") -> Presheaf:
    """Build a presheaf from actions on the category's generating
    morphisms, deriving composite actions from the closure words.

    X(g∘f) = X(f)∘X(g), so a word (g1,…,gn) in applicative order acts by
    applying the generator actions in reverse word order.
    """
    for g, table in gen_actions.items():
        d, c = C.morphisms[g]
        for x in sets[c]:
            if x not in table:
                raise PresheafError("MissingAction",
                                    "no image for %r under %r" % (x, g))
            if table[x] not in sets[d]:
                raise PresheafError(
                    "DanglingElement",
                    "image %r of %r under %r is not an element at %r"
                    % (table[x], x, g, d))
    actions = {}
    for m in C.nonidentity_morphisms():
        word = C.words.get(m, (m,))
        _d, c = C.morphisms[m]
        table = {}
        for x in sets[c]:
            v = x
            for g in reversed(word):
                v = gen_actions[g][v]
            table[x] = v
        actions[m] = table
    return make_presheaf(C, sets, actions, name)


def make_presheaf(C: FinCategory, sets, actions, name="") -> Presheaf:
    """Build and functoriality-check a presheaf from full tables
    (identities are filled in automatically)."""
    full = {}
    for m in C.morphism_names():
        _d, c = C.morphisms[m]
        if C.is_identity(m):
            full[m] = {x: x for x in sets[c]}
        else:
            full[m] = dict(actions[m])
    X = Presheaf(C, {c: tuple(sets[c]) for c in C.objects}, full, name)
    _check_functorial(X)
    return X


# ---------------------------------------------------------------------------
# hom-sets

def nat_transformations(X: Presheaf, Y: Presheaf) -> list[NatTrans]:
    """All natural transformations X → Y, by stage-wise backtracking with
    naturality pruning; duplicate-free, deterministic order."""
    _same_base(X, Y)
    C = X.base
    objs = list(C.objects)
    # Morphisms checkable once stage i is assigned.
    checklists = []
    for i, o in enumerate(objs):
        done = set(objs[:i + 1])
        lst = []
        for m in C.nonidentity_morphisms():
            d, c = C.morphisms[m]
            if (d == o or c == o) and d in done and c in done:
                lst.append(m)
        checklists.append(lst)

    results = []
    comp: dict[str, dict[str, str]] = {}

    def consistent(i) -> bool:
        for m in checklists[i]:
            d, c = C.morphisms[m]
            for x in X.sets[c]:
                if comp[d][X.act(m, x)] != Y.act(m, comp[c][x]):
                    return False
        return True

    def rec(i):
        if i == len(objs):
            results.append(NatTrans(
                X, Y, {o: dict(comp[o]) for o in objs}))
            return
        c = objs[i]
        xs = X.sets[c]
        if xs and not Y.sets[c]:
            return
        for vals in itertools.product(Y.sets[c], repeat=len(xs)):
            comp[c] = dict(zip(xs, vals))
            if consistent(i):
                rec(i + 1)
        comp.pop(c, None)

    rec(0)
    return results


def identity_nat(X: Presheaf) -> NatTrans:
    return NatTrans(X, X, {c: {x: x for x in X.sets[c]}
                           for c in X.base.objects}, "id")


def is_epi(f: NatTrans) -> bool:
    """Pointwise surjectivity (valid in a presheaf topos)."""
    return all(set(f.components[c].values()) == set(f.cod.sets[c])
               for c in f.dom.base.objects)


def is_mono(f: NatTrans) -> bool:
    """Pointwise injectivity."""
    return all(len(set(f.components[c].values())) == len(f.dom.sets[c])
               for c in f.dom.base.objects)


def global_elements(X: Presheaf) -> list[NatTrans]:
    return nat_transformations(terminal(X.base), X)


# ---------------------------------------------------------------------------
# finite limits and colimits

def terminal(C: FinCategory) -> Presheaf:
    sets = {c: ("*",) for c in C.objects}
    actions = {m: {"*": "*"} for m in C.nonidentity_morphisms()}
    return make_presheaf(C, sets, actions, "1")


def initial(C: FinCategory) -> Presheaf:
    sets = {c: () for c in C.objects}
    actions = {m: {} for m in C.nonidentity_morphisms()}
    return make_presheaf(C, sets, actions, "0")


def product(X: Presheaf, Y: Presheaf,
            cap: int = DEFAULT_SIZE_CAP):
    """Pointwise product with its two projections."""
    _same_base(X, Y)
    C = X.base
    sets = {}
    for c in C.objects:
        _cap(len(X.sets[c]) * len(Y.sets[c]), cap, "product")
        sets[c] = tuple(pel(x, y)
                        for x in X.sets[c] for y in Y.sets[c])
    actions = {}
    for m in C.nonidentity_morphisms():
        _d, c = C.morphisms[m]
        actions[m] = {pel(x, y): pel(X.act(m, x), Y.act(m, y))
                      for x in X.sets[c] for y in Y.sets[c]}
    P = make_presheaf(C, sets, actions, "%s×%s" % (X.name or "X",
                                                   Y.name or "Y"))
    p1 = NatTrans(P, X, {c: {pel(x, y): x for x in X.sets[c]
                             for y in Y.sets[c]} for c in C.objects}, "p1")
    p2 = NatTrans(P, Y, {c: {pel(x, y): y for x in X.sets[c]
                             for y in Y.sets[c]} for c in C.objects}, "p2")
    return P, p1, p2


def pairing(f: NatTrans, g: NatTrans, P: Presheaf) -> NatTrans:
    """⟨f, g⟩ : Z → X×Y into a product built by product()."""
    comps = {c: {z: pel(f.apply(c, z), g.apply(c, z))
                 for z in f.dom.sets[c]} for c in f.dom.base.objects}
    return NatTrans(f.dom, P, comps)


def product_many(C: FinCategory, factors: list[Presheaf],
                 cap: int = DEFAULT_SIZE_CAP):
    """n-fold pointwise product with projections (n = 0 gives 1)."""
    if not factors:
        T = terminal(C)
        return T, []
    sets = {}
    for c in C.objects:
        n = 1
        for X in factors:
            n *= len(X.sets[c])
        _cap(n, cap, "product")
        sets[c] = tuple("(%s)" % ",".join(combo) for combo in
                        itertools.product(*[X.sets[c] for X in factors]))
    actions = {}
    for m in C.nonidentity_morphisms():
        _d, c = C.morphisms[m]
        actions[m] = {
            "(%s)" % ",".join(combo):
            "(%s)" % ",".join(X.act(m, x)
                              for X, x in zip(factors, combo))
            for combo in itertools.product(*[X.sets[c] for X in factors])}
    P = make_presheaf(C, sets, actions, "prod")
    projections = []
    for i, X in enumerate(factors):
        comps = {c: {"(%s)" % ",".join(combo): combo[i]
                     for combo in itertools.product(
                         *[F.sets[c] for F in factors])}
                 for c in C.objects}
        projections.append(NatTrans(P, X, comps, "p%d" % i))
    return P, projections


def coproduct(X: Presheaf, Y: Presheaf):
    """Pointwise coproduct with its two injections."""
    _same_base(X, Y)
    C = X.base
    sets = {c: tuple("inl(%s)" % x for x in X.sets[c]) +
            tuple("inr(%s)" % y for y in Y.sets[c]) for c in C.objects}
    actions = {}
    for m in C.nonidentity_morphisms():
        _d, c = C.morphisms[m]
        table = {"inl(%s)" % x: "inl(%s)" % X.act(m, x)
                 for x in X.sets[c]}
        table.update({"inr(%s)" % y: "inr(%s)" % Y.act(m, y)
                      for y in Y.sets[c]})
        actions[m] = table
    S = make_presheaf(C, sets, actions, "%s+%s" % (X.name or "X",
                                                   Y.name or "Y"))
    i1 = NatTrans(X, S, {c: {x: "inl(%s)" % x for x in X.sets[c]}
                         for c in C.objects}, "inl")
    i2 = NatTrans(Y, S, {c: {y: "inr(%s)" % y for y in Y.sets[c]}
                         for c in C.objects}, "inr")
    return S, i1, i2


def two(C: FinCategory):
    """The boolean object 2 = 1+1 with its injections."""
    T = terminal(C)
    return coproduct(T, T)


def sub_presheaf(X: Presheaf, parts: dict, name="") -> Presheaf:
    """Standalone presheaf carried by a subfunctor (same element ids)."""
    C = X.base
    sets = {c: tuple(x for x in X.sets[c] if x in parts[c])
            for c in C.objects}
    for m in C.nonidentity_morphisms():
        d, c = C.morphisms[m]
        for x in sets[c]:
            if X.act(m, x) not in parts[d]:
                raise PresheafError(
                    "NotFunctorial",
                    "parts not closed: %r leaves the subset along %r"
                    % (x, m))
    actions = {m: {x: X.act(m, x) for x in sets[C.morphisms[m][1]]}
               for m in C.nonidentity_morphisms()}
    return make_presheaf(C, sets, actions, name)


def inclusion_of(X: Presheaf, parts: dict) -> tuple[Presheaf, NatTrans]:
    S = sub_presheaf(X, parts)
    inc = NatTrans(S, X, {c: {x: x for x in S.sets[c]}
                          for c in X.base.objects}, "inc")
    return S, inc


def equalizer(f: NatTrans, g: NatTrans):
    """Equalizer of a parallel pair, as a subpresheaf with its mono."""
    if f.dom is not g.dom or f.cod is not g.cod:
        raise ShapeMismatch("equalizer needs a parallel pair")
    X = f.dom
    parts = {c: frozenset(x for x in X.sets[c]
                          if f.apply(c, x) == g.apply(c, x))
             for c in X.base.objects}
    return inclusion_of(X, parts)


def pullback(f: NatTrans, g: NatTrans, cap: int = DEFAULT_SIZE_CAP):
    """Pullback of a cospan f: X→Z ← Y :g with its two projections."""
    if f.cod is not g.cod:
        raise ShapeMismatch("pullback needs a cospan")
    P, p1, p2 = product(f.dom, g.dom, cap)
    parts = {c: frozenset(
        pel(x, y) for x in f.dom.sets[c] for y in g.dom.sets[c]
        if f.apply(c, x) == g.apply(c, y)) for c in f.dom.base.objects}
    S, inc = inclusion_of(P, parts)
    return S, inc.then(p1), inc.then(p2)


class _UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # Keep the smaller id as representative: deterministic classes.
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra


def quotient_by_pairs(Y: Presheaf, pairs: dict) -> tuple[Presheaf, NatTrans]:
    """Pointwise quotient of Y by the stage-wise equivalence generated by
    the given pairs; class ids are "[rep]" with rep the least member."""
    C = Y.base
    reps = {}
    for c in C.objects:
        uf = _UnionFind(Y.sets[c])
        for a, b in pairs.get(c, ()):
            uf.union(a, b)
        reps[c] = {y: uf.find(y) for y in Y.sets[c]}
    sets = {c: tuple("[%s]" % r for r in
                     sorted(set(reps[c].values()),
                            key=list(Y.sets[c]).index))
            for c in C.objects}
    actions = {}
    for m in C.nonidentity_morphisms():
        d, c = C.morphisms[m]
        table = {}
        for y in Y.sets[c]:
            key = "[%s]" % reps[c][y]
            val = "[%s]" % reps[d][Y.act(m, y)]
            if table.get(key, val) != val:
                raise PresheafError("NotFunctorial",
                                    "quotient action ill-defined at %r" % m)
            table[key] = val
        actions[m] = table
    Q = make_presheaf(C, sets, actions, "%s/~" % (Y.name or "Y"))
    q = NatTrans(Y, Q, {c: {y: "[%s]" % reps[c][y] for y in Y.sets[c]}
                        for c in C.objects}, "q")
    return Q, q


def coequalizer(f: NatTrans, g: NatTrans):
    """Coequalizer of a parallel pair, computed pointwise."""
    if f.dom is not g.dom or f.cod is not g.cod:
        raise ShapeMismatch("coequalizer needs a parallel pair")
    Y = f.cod
    pairs = {c: [(f.apply(c, x), g.apply(c, x)) for x in f.dom.sets[c]]
             for c in Y.base.objects}
    return quotient_by_pairs(Y, pairs)


def image_factorization(f: NatTrans):
    """f = m ∘ e with e pointwise surjective and m pointwise injective;
    the image is the pointwise set image, a subfunctor of cod f."""
    Y = f.cod
    parts = {c: frozenset(f.components[c].values())
             for c in Y.base.objects}
    I, m = inclusion_of(Y, parts)
    e = NatTrans(f.dom, I, {c: dict(f.components[c])
                            for c in Y.base.objects}, "e")
    return e, m


def factor_through(q: NatTrans, h: NatTrans):
    """The unique g with g∘q = h when h is constant on the fibers of the
    epi q; None if no such g exists."""
    Q, Z = q.cod, h.cod
    comps = {}
    for c in Q.base.objects:
        table = {}
        for x in q.dom.sets[c]:
            key = q.apply(c, x)
            val = h.apply(c, x)
            if table.get(key, val) != val:
                return None
            table[key] = val
        if set(table) != set(Q.sets[c]):
            return None  # q not epi at this stage
        comps[c] = table
    return NatTrans(Q, Z, comps)


# ---------------------------------------------------------------------------
# Yoneda, classifier, exponentials, power objects

def yoneda(C: FinCategory, c: str) -> Presheaf:
    """The representable y(c): stage b is Hom(b, c), action by
    precomposition."""
    if c not in C.objects:
        raise UnknownName("unknown object %r" % c)
    sets = {b: tuple(C.hom(b, c)) for b in C.objects}
    actions = {}
    for m in C.nonidentity_morphisms():
        _d, b = C.morphisms[m]
        actions[m] = {h: C.compose(h, m) for h in sets[b]}
    return make_presheaf(C, sets, actions, "y(%s)" % c)


def yoneda_arrow(X: Presheaf, c: str, x: str,
                 yc: Presheaf | None = None) -> NatTrans:
    """The arrow y(c) → X classifying x ∈ X(c) (Yoneda lemma)."""
    if yc is None:
        yc = yoneda(X.base, c)
    comps = {b: {h: X.act(h, x) for h in yc.sets[b]}
             for b in X.base.objects}
    return NatTrans(yc, X, comps)


def _sieves_on(C: FinCategory, c: str) -> list[frozenset]:
    arrows = C.arrows_into(c)
    sieves = []
    for bits in itertools.product((0, 1), repeat=len(arrows)):
        S = frozenset(a for a, b in zip(arrows, bits) if b)
        closed = all(C.compose(h, g) in S
                     for h in S for g in C.arrows_into(C.dom(h)))
        if closed:
            sieves.append(S)
    return sorted(sieves, key=lambda S: (len(S), tuple(sorted(S))))


def _sieve_id(S: frozenset) -> str:
    return "{%s}" % ",".join(sorted(S))


def omega(C: FinCategory):
    """The subobject classifier: Ω(c) = sieves on c, with the arrow
    true: 1 → Ω picking the maximal sieve."""
    sieve_sets = {c: _sieves_on(C, c) for c in C.objects}
    sets = {c: tuple(_sieve_id(S) for S in sieve_sets[c])
            for c in C.objects}
    actions = {}
    for m in C.nonidentity_morphisms():
        b, c = C.morphisms[m]
        table = {}
        for S in sieve_sets[c]:
            restricted = frozenset(g for g in C.arrows_into(b)
                                   if C.compose(m, g) in S)
            table[_sieve_id(S)] = _sieve_id(restricted)
        actions[m] = table
    Om = make_presheaf(C, sets, actions, "Ω")
    truth = NatTrans(
        terminal(C), Om,
        {c: {"*": _sieve_id(frozenset(C.arrows_into(c)))}
         for c in C.objects}, "true")
    return Om, truth


def classify(X: Presheaf, parts: dict, Om: Presheaf | None = None) -> NatTrans:
    """The characteristic map X → Ω of a subfunctor."""
    C = X.base
    if Om is None:
        Om, _ = omega(C)
    comps = {}
    for c in C.objects:
        comps[c] = {}
        for x in X.sets[c]:
            sieve = frozenset(m for m in C.arrows_into(c)
                              if X.act(m, x) in parts[C.dom(m)])
            comps[c][x] = _sieve_id(sieve)
    return NatTrans(X, Om, comps, "char")


def char_to_parts(h: NatTrans) -> dict:
    """Pullback of true along a map into Ω, as subfunctor parts."""
    C = h.dom.base
    return {c: frozenset(
        x for x in h.dom.sets[c]
        if h.apply(c, x) == _sieve_id(frozenset(C.arrows_into(c))))
        for c in C.objects}


def subfunctors(X: Presheaf, cap: int = DEFAULT_SIZE_CAP) -> list[dict]:
    """All subfunctors of X as stage → frozenset part maps, enumerated as
    restriction-closed element sets; deterministic order."""
    C = X.base
    elems = list(X.elements())
    index = {e: i for i, e in enumerate(elems)}
    closure = {}
    for e in elems:
        seen = {e}
        stack = [e]
        while stack:
            c, x = stack.pop()
            for m in C.nonidentity_morphisms():
                if C.cod(m) != c:
                    continue
                nxt = (C.dom(m), X.act(m, x))
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        closure[e] = frozenset(seen)
    above = {e: frozenset(d for d in elems if e in closure[d])
             for e in elems}

    results = []

    def rec(i, inside, outside):
        if len(results) > cap:
            raise SizeCapError("more than %d subfunctors (cap)" % cap)
        while i < len(elems) and (elems[i] in inside or elems[i] in outside):
            i += 1
        if i == len(elems):
            results.append(frozenset(inside))
            return
        e = elems[i]
        cl = closure[e]
        if not (cl & outside):
            rec(i + 1, inside | cl, outside)
        rec(i + 1, inside, outside | above[e])

    rec(0, frozenset(), frozenset())
    parts_list = []
    for chosen in results:
        parts_list.append({c: frozenset(x for x in X.sets[c]
                                        if (c, x) in chosen)
                           for c in C.objects})
    parts_list.sort(key=lambda p: tuple(
        tuple(sorted(p[c])) for c in C.objects))
    return parts_list


def _encode_nat(C: FinCategory, nt: NatTrans) -> str:
    chunks = []
    for d in C.objects:
        for e in nt.dom.sets[d]:
            chunks.append("%s:%s->%s" % (d, e, nt.apply(d, e)))
    return "{" + ";".join(chunks) + "}"


def exponential(X: Presheaf, Y: Presheaf,
                cap: int = DEFAULT_SIZE_CAP) -> Presheaf:
    """The exponential Y^X: stage c is the set of natural transformations
    y(c)×X → Y, restriction by precomposition."""
    _same_base(X, Y)
    C = X.base
    stage_data = {}
    for c in C.objects:
        yc = yoneda(C, c)
        B, _p1, _p2 = product(yc, X, cap)
        homs = nat_transformations(B, Y)
        _cap(len(homs), cap, "exponential")
        stage_data[c] = (yc, B, homs)

    sets = {}
    ids = {}
    for c in C.objects:
        _yc, _B, homs = stage_data[c]
        named = sorted(((_encode_nat(C, h), h) for h in homs),
                       key=lambda t: t[0])
        sets[c] = tuple(n for n, _h in named)
        ids[c] = {n: h for n, h in named}

    actions = {}
    for m in C.nonidentity_morphisms():
        b, c = C.morphisms[m]
        table = {}
        _ycb, Bb, _homsb = stage_data[b]
        for n in sets[c]:
            theta = ids[c][n]
            comps = {}
            for d in C.objects:
                comps[d] = {}
                for g in C.hom(d, b):
                    for x in X.sets[d]:
                        comps[d][pel(g, x)] = theta.apply(
                            d, pel(C.compose(m, g), x))
            restricted = NatTrans(Bb, Y, comps)
            table[n] = _encode_nat(C, restricted)
            if table[n] not in ids[b]:
                raise PresheafError("NotFunctorial",
                                    "exponential restriction escaped stage")
        actions[m] = table
    return make_presheaf(C, sets, actions,
                         "%s^%s" % (Y.name or "Y", X.name or "X"))


@dataclass(eq=False)
class PowerObject:
    """P(X) with its membership data: each element of P(X)(c) is a
    subfunctor of X×y(c), decoded as stage → set of (x, hom) pairs."""

    of: Presheaf
    carrier: Presheaf
    relations: dict[str, dict[str, frozenset]]

    def contains(self, c: str, u: str, x: str) -> bool:
        """x ∈ u at stage c: (x, id_c) belongs to u's relation at c."""
        return (x, self.of.base.identity(c)) in self.relations[u][c]


def _relation_id(C: FinCategory, rel: dict) -> str:
    chunks = []
    for d in C.objects:
        for (x, g) in sorted(rel[d]):
            chunks.append("%s:%s:%s" % (d, x, g))
    return "{" + ";".join(chunks) + "}"


def power_object(X: Presheaf, cap: int = DEFAULT_SIZE_CAP) -> PowerObject:
    """The power object P(X): P(X)(c) = subfunctors of X×y(c), with
    restriction by pullback along id×y(f)."""
    C = X.base
    stage_rels = {}
    relations = {}
    for c in C.objects:
        yc = yoneda(C, c)
        # Relations R ⊆ X×y(c): enumerate subfunctors of the product, but
        # decoded as (x, hom) pairs per stage.
        B, _p1, _p2 = product(X, yc, cap)
        decode = {}
        for d in C.objects:
            decode[d] = {pel(x, g): (x, g)
                         for x in X.sets[d] for g in yc.sets[d]}
        subs = subfunctors(B, cap)
        _cap(len(subs), cap, "power object")
        rels = []
        for parts in subs:
            rel = {d: frozenset(decode[d][e] for e in parts[d])
                   for d in C.objects}
            rels.append(rel)
        named = sorted(((_relation_id(C, r), r) for r in rels),
                       key=lambda t: t[0])
        stage_rels[c] = dict(named)
        for n, r in named:
            relations.setdefault(n, r)

    sets = {c: tuple(sorted(stage_rels[c])) for c in C.objects}
    actions = {}
    for m in C.nonidentity_morphisms():
        b, c = C.morphisms[m]
        table = {}
        for n in sets[c]:
            rel = stage_rels[c][n]
            restricted = {}
            for d in C.objects:
                pairs = set()
                for x in X.sets[d]:
                    for g in C.hom(d, b):
                        if (x, C.compose(m, g)) in rel[d]:
                            pairs.add((x, g))
                restricted[d] = frozenset(pairs)
            rid = _relation_id(C, restricted)
            if rid not in stage_rels[b]:
                raise PresheafError("NotFunctorial",
                                    "power-object restriction escaped stage")
            table[n] = rid
        actions[m] = table
    carrier = make_presheaf(C, sets, actions, "P(%s)" % (X.name or "X"))
    return PowerObject(X, carrier, relations)


# ---------------------------------------------------------------------------
# isomorphism testing

def find_iso(X: Presheaf, Y: Presheaf):
    """A natural family of bijections X → Y, or None; exhaustive search
    with stage-wise cardinality pruning."""
    _same_base(X, Y)
    C = X.base
    if X.size_vector() != Y.size_vector():
        return None
    objs = list(C.objects)
    checklists = []
    for i, o in enumerate(objs):
        done = set(objs[:i + 1])
        checklists.append([m for m in C.nonidentity_morphisms()
                           if set(C.morphisms[m]) <= done
                           and o in C.morphisms[m]])
    comp = {}

    def consistent(i):
        for m in checklists[i]:
            d, c = C.morphisms[m]
            for x in X.sets[c]:
                if comp[d][X.act(m, x)] != Y.act(m, comp[c][x]):
                    return False
        return True

    def rec(i):
        if i == len(objs):
            return NatTrans(X, Y, {o: dict(comp[o]) for o in objs}, "iso")
        c = objs[i]
        for perm in itertools.permutations(Y.sets[c]):
            comp[c] = dict(zip(X.sets[c], perm))
            if consistent(i):
                found = rec(i + 1)
                if found is not None:
                    return found
        comp.pop(c, None)
        return None

    return rec(0)


def is_isomorphic(X: Presheaf, Y: Presheaf) -> bool:
    return find_iso(X, Y) is not None
