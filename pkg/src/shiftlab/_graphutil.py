"""Small digraph helpers shared by the graph modules.

All functions take explicit vertex sequences and successor mappings so
they work on any of the package's graph representations without
adapters.  Vertex sequence order drives iteration, so results are
deterministic whenever the caller passes deterministic orders.
"""

from __future__ import annotations

from typing import Callable, Hashable, Iterable, Sequence, TypeVar

V = TypeVar("V", bound=Hashable)


def reachable(start: V, succ: Callable[[V], Iterable[V]]) -> set[V]:
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for w in succ(v):
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def is_strongly_connected(vertices: Sequence[V], succ, pred) -> bool:
    if not vertices:
        return True
    v0 = vertices[0]
    n = len(set(vertices))
    return len(reachable(v0, succ)) == n and len(reachable(v0, pred)) == n


def weak_components(vertices: Sequence[V], neighbors) -> list[frozenset[V]]:
    vset = set(vertices)
    assigned: set[V] = set()
    comps = []
    for v in vertices:
        if v in assigned:
            continue
        comp = reachable(v, lambda u: (w for w in neighbors(u) if w in vset))
        comps.append(frozenset(comp))
        assigned |= comp
    return comps


def is_weakly_connected(vertices: Sequence[V], neighbors) -> bool:
    if not vertices:
        return True
    return len(weak_components(vertices, neighbors)) == 1


def find_cycle(vertices: Sequence[V], succ) -> list[V] | None:
    """Some directed cycle, as a vertex list (entry point first), or None.

    Iterative DFS with the standard white/grey/black coloring; only
    vertices from the given sequence participate.
    """
    WHITE, GREY, BLACK = 0, 1, 2
    color = {v: WHITE for v in vertices}
    parent: dict[V, V] = {}
    for root in vertices:
        if color[root] != WHITE:
            continue
        stack: list[tuple[V, Iterable[V]]] = [(root, iter(succ(root)))]
        color[root] = GREY
        while stack:
            v, it = stack[-1]
            advanced = False
            for w in it:
                if w not in color:
                    continue
                if color[w] == WHITE:
                    color[w] = GREY
                    parent[w] = v
                    stack.append((w, iter(succ(w))))
                    advanced = True
                    break
                if color[w] == GREY:
                    cycle = [v]
                    while cycle[-1] != w:
                        cycle.append(parent[cycle[-1]])
                    cycle.reverse()
                    return cycle
            if not advanced:
                color[v] = BLACK
                stack.pop()
    return None
