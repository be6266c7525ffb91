"""Named built-in presheaves used by the CLI and the test corpus."""

from __future__ import annotations

from .errors import UnknownName
from .fincat import FinCategory
from .presheaf import (Presheaf, initial, make_from_generators, terminal,
                       two)


def _refgraph_objects(C: FinCategory) -> dict[str, Presheaf]:
    objs = {}
    # Path with two vertices joined by one edge.
    objs["P2"] = make_from_generators(
        C,
        {"V": ("0", "1"), "E": ("l0", "l1", "a")},
        {"s": {"l0": "0", "l1": "1", "a": "0"},
         "t": {"l0": "0", "l1": "1", "a": "1"},
         "sigma": {"0": "l0", "1": "l1"}},
        "P2")
    # One vertex with its degenerate loop plus one extra loop.
    objs["L"] = make_from_generators(
        C,
        {"V": ("v",), "E": ("e", "lv")},
        {"s": {"lv": "v", "e": "v"},
         "t": {"lv": "v", "e": "v"},
         "sigma": {"v": "lv"}},
        "L")
    # Discrete graphs: vertices with only their degenerate loops.
    for n in (1, 2, 3):
        verts = tuple(str(i) for i in range(n))
        loops = tuple("l%d" % i for i in range(n))
        objs["D%d" % n] = make_from_generators(
            C,
            {"V": verts, "E": loops},
            {"s": {"l%d" % i: str(i) for i in range(n)},
             "t": {"l%d" % i: str(i) for i in range(n)},
             "sigma": {str(i): "l%d" % i for i in range(n)}},
            "D%d" % n)
    return objs


def _graph_objects(C: FinCategory) -> dict[str, Presheaf]:
    # Single directed edge between two distinct vertices, no loops.
    a1 = make_from_generators(
        C,
        {"V": ("0", "1"), "E": ("a",)},
        {"s": {"a": "0"}, "t": {"a": "1"}},
        "A1")
    return {"A1": a1}


def builtin_object(C: FinCategory, name: str) -> Presheaf:
    """Resolve a builtin object name over the given base category."""
    if name == "0":
        return initial(C)
    if name == "1":
        return terminal(C)
    if name == "2":
        return two(C)[0]
    extra = {}
    if C.name == "refgraph":
        extra = _refgraph_objects(C)
    elif C.name == "graph":
        extra = _graph_objects(C)
    if name in extra:
        return extra[name]
    raise UnknownName("no builtin object %r over base %r" % (name, C.name))


def builtin_names(C: FinCategory) -> list[str]:
    names = ["0", "1", "2"]
    if C.name == "refgraph":
        names += sorted(_refgraph_objects(C))
    elif C.name == "graph":
        names += sorted(_graph_objects(C))
    return names
