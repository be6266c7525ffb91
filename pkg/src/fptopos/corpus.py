"""Bounded enumeration of presheaves up to isomorphism.

Presheaves are generated per stage-size vector by assigning actions to the
base category's generating morphisms and discarding assignments that break
functoriality.  Isomorphism pruning is by canonical form: the minimum of
the relabeled action tables over all stage-wise permutations, after a
first cut on the stage cardinality vector.  The enumeration order is fully
deterministic, so regeneration is bit-identical.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .errors import SizeCapError, DEFAULT_SIZE_CAP
from .fincat import FinCategory
from .presheaf import Presheaf, PresheafError, make_from_generators


def canonical_key(X: Presheaf):
    """Canonical form of a presheaf: minimal relabeled action table over
    all per-stage permutations."""
    C = X.base
    objs = list(C.objects)
    index = {c: {x: i for i, x in enumerate(X.sets[c])} for c in objs}
    morphs = C.nonidentity_morphisms()
    best = None
    perm_spaces = [list(itertools.permutations(range(len(X.sets[c]))))
                   for c in objs]
    for perms in itertools.product(*perm_spaces):
        relabel = {c: perms[i] for i, c in enumerate(objs)}
        # relabel[c][i] is the new label of old element i at stage c
        table = []
        for m in morphs:
            d, c = C.morphisms[m]
            row = [0] * len(X.sets[c])
            for x in X.sets[c]:
                row[relabel[c][index[c][x]]] = \
                    relabel[d][index[d][X.act(m, x)]]
            table.append(tuple(row))
        key = tuple(table)
        if best is None or key < best:
            best = key
    return (X.size_vector(), best)


@dataclass
class CorpusIndex:
    """All presheaves over a base up to isomorphism within stage bounds."""

    base: FinCategory
    bounds: dict[str, int]
    presheaves: list[Presheaf] = field(default_factory=list)
    counts: dict[tuple, int] = field(default_factory=dict)

    def __iter__(self):
        return iter(self.presheaves)

    def __len__(self):
        return len(self.presheaves)

    def bound_label(self) -> str:
        return ",".join("%s<=%d" % (c, self.bounds[c])
                        for c in self.base.objects)


def _norm_bounds(C: FinCategory, bounds) -> dict[str, int]:
    if isinstance(bounds, int):
        b = {c: bounds for c in C.objects}
    else:
        b = dict(bounds)
    for c in C.objects:
        if b.get(c, 0) < 0:
            raise SizeCapError("negative bound for %r" % c)
        b.setdefault(c, 0)
    return b


def _candidates(C: FinCategory, sizes: dict[str, int]):
    """All functorial presheaves with the given stage sizes (with
    duplicates across isomorphism)."""
    sets = {c: tuple("%s%d" % (c, i) for i in range(sizes[c]))
            for c in C.objects}
    gens = C.generating_morphisms()
    spaces = []
    for m in gens:
        d, c = C.morphisms[m]
        if sets[c] and not sets[d]:
            return  # no function into an empty set
        spaces.append(list(itertools.product(sets[d],
                                             repeat=len(sets[c]))))
    for combo in itertools.product(*spaces):
        gen_actions = {}
        for m, values in zip(gens, combo):
            _d, c = C.morphisms[m]
            gen_actions[m] = dict(zip(sets[c], values))
        try:
            yield make_from_generators(C, sets, gen_actions)
        except PresheafError:
            continue


def enumerate_presheaves(C: FinCategory, bounds,
                         cap: int = DEFAULT_SIZE_CAP) -> CorpusIndex:
    """All presheaves with stage sizes within the bounds, one canonical
    representative per isomorphism class, in deterministic order."""
    b = _norm_bounds(C, bounds)
    for c in C.objects:
        if b[c] > cap:
            raise SizeCapError("bound %d at %r exceeds cap" % (b[c], c))
    seen: dict[tuple, Presheaf] = {}
    ranges = [range(b[c] + 1) for c in C.objects]
    for vector in itertools.product(*ranges):
        sizes = dict(zip(C.objects, vector))
        for X in _candidates(C, sizes):
            key = canonical_key(X)
            if key not in seen:
                seen[key] = X
    ordered = sorted(seen.items(), key=lambda kv: kv[0])
    index = CorpusIndex(C, b)
    counts: dict[tuple, int] = {}
    for i, (key, X) in enumerate(ordered):
        X.name = "X%d" % i
        index.presheaves.append(X)
        counts[key[0]] = counts.get(key[0], 0) + 1
    index.counts = counts
    return index
