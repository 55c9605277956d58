"""Abstract branching graphs with colorings, local rewrites, loop
tracking, and the loop-deleted quotient whose connectivity bounds the
number of distinctly colored loops.

Vertices are named strings tagged ``left``/``right``; edges carry stable
string ids that survive rewrites, so loops and move logs can reference
edges across a whole rewrite history.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from ._graphutil import is_strongly_connected, is_weakly_connected, weak_components
from .errors import (
    InadmissibleMove,
    InvariantViolation,
    PreconditionFailure,
)

# ---------------------------------------------------------------------------
# graphs and colorings


@dataclass(frozen=True)
class AbstractGraph:
    """Directed multigraph with left/right tagged vertices.

    The structural rules: left vertices have one out-edge and at least
    two in-edges, right vertices one in-edge and at least two out-edges,
    the graph is strongly connected and has no self-loops.  The excess
    ``edges - vertices`` is the branching constant ``K``.
    """

    vertices: dict[str, str]  # name -> "left" | "right"
    edges: dict[str, tuple[str, str]]  # id -> (src, dst)

    def __post_init__(self):
        for eid, (s, d) in self.edges.items():
            if s not in self.vertices or d not in self.vertices:
                raise ValueError(f"edge {eid} has unknown endpoint")
        for kind in self.vertices.values():
            if kind not in ("left", "right"):
                raise ValueError(f"unknown vertex kind {kind!r}")

    # -- structure queries

    def vertex_list(self) -> list[str]:
        return sorted(self.vertices)

    def edge_list(self) -> list[str]:
        return sorted(self.edges)

    def in_edges(self, v: str) -> list[str]:
        return [e for e in self.edge_list() if self.edges[e][1] == v]

    def out_edges(self, v: str) -> list[str]:
        return [e for e in self.edge_list() if self.edges[e][0] == v]

    def successors(self, v: str) -> list[str]:
        return [self.edges[e][1] for e in self.out_edges(v)]

    def predecessors(self, v: str) -> list[str]:
        return [self.edges[e][0] for e in self.in_edges(v)]

    @property
    def K(self) -> int:
        return len(self.edges) - len(self.vertices)

    @property
    def K_left(self) -> int:
        return sum(1 for k in self.vertices.values() if k == "left")

    @property
    def K_right(self) -> int:
        return sum(1 for k in self.vertices.values() if k == "right")

    def is_strongly_connected(self) -> bool:
        return is_strongly_connected(
            self.vertex_list(), self.successors, self.predecessors
        )

    def bispecial_edges(self) -> list[str]:
        """Edges from a left vertex to a right vertex."""
        return [
            e
            for e in self.edge_list()
            if self.vertices[self.edges[e][0]] == "left"
            and self.vertices[self.edges[e][1]] == "right"
        ]

    def degree_profile(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        lefts = sorted(
            len(self.in_edges(v)) for v, k in self.vertices.items() if k == "left"
        )
        rights = sorted(
            len(self.out_edges(v)) for v, k in self.vertices.items() if k == "right"
        )
        return tuple(lefts), tuple(rights)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, AbstractGraph)
            and self.vertices == other.vertices
            and self.edges == other.edges
        )


@dataclass(frozen=True)
class Coloring:
    """Vertex and edge colors; 0 means uncolored."""

    vertex_colors: dict[str, int]
    edge_colors: dict[str, int]

    def vertex(self, v: str) -> int:
        return self.vertex_colors.get(v, 0)

    def edge(self, e: str) -> int:
        return self.edge_colors.get(e, 0)

    def max_color(self) -> int:
        used = list(self.vertex_colors.values()) + list(self.edge_colors.values())
        return max(used, default=0)

    def with_updates(
        self, vertices: Mapping[str, int] = (), edges: Mapping[str, int] = ()
    ) -> "Coloring":
        vc = dict(self.vertex_colors)
        vc.update(vertices)
        ec = dict(self.edge_colors)
        ec.update(edges)
        return Coloring(vc, ec)

    def same_on(self, other: "Coloring", vertices: Iterable[str], edges: Iterable[str]) -> bool:
        return all(self.vertex(v) == other.vertex(v) for v in vertices) and all(
            self.edge(e) == other.edge(e) for e in edges
        )


@dataclass(frozen=True)
class Loop:
    """A directed circuit given as an edge-id tuple in circuit order."""

    edges: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.edges)


def loop_vertices(graph: AbstractGraph, loop: Loop) -> list[str]:
    """Circuit vertices in order (source of each loop edge)."""
    return [graph.edges[e][0] for e in loop.edges]


def check_loop(graph: AbstractGraph, loop: Loop) -> None:
    if len(loop.edges) < 2:
        raise PreconditionFailure("a loop needs at least two edges")
    for e, f in zip(loop.edges, loop.edges[1:] + loop.edges[:1]):
        if graph.edges[e][1] != graph.edges[f][0]:
            raise PreconditionFailure(f"edges {e},{f} are not consecutive")
    verts = loop_vertices(graph, loop)
    if len(set(verts)) != len(verts):
        raise PreconditionFailure("loop is not vertex self-avoiding")


def loops_vertex_disjoint(graph: AbstractGraph, loops: Sequence[Loop]) -> bool:
    seen: set[str] = set()
    for lp in loops:
        vs = set(loop_vertices(graph, lp))
        if vs & seen:
            return False
        seen |= vs
    return True


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[str, ...]
    K: int
    K_left: int
    K_right: int
    E: int


def validate(graph: AbstractGraph, coloring: Coloring | None = None) -> ValidationReport:
    """Check the structural notation items (1-8) and the one-graph
    coloring rules (1-4); violations name the failed item."""
    v: list[str] = []
    if graph.K_left + graph.K_right != len(graph.vertices):
        v.append("notation-1: vertex kinds do not partition the vertex set")
    for name, kind in sorted(graph.vertices.items()):
        ins, outs = len(graph.in_edges(name)), len(graph.out_edges(name))
        if kind == "left" and (outs != 1 or ins < 2):
            v.append(f"notation-2: left vertex {name} has in={ins}, out={outs}")
        if kind == "right" and (ins != 1 or outs < 2):
            v.append(f"notation-3: right vertex {name} has in={ins}, out={outs}")
    if graph.K < 1:
        v.append(f"notation-4: edge excess K={graph.K} must be >= 1")
    if not graph.is_strongly_connected():
        v.append("notation-5: graph is not strongly connected")
    for eid, (s, d) in sorted(graph.edges.items()):
        if s == d:
            v.append(f"notation-5: self-loop {eid} at {s}")
    E = 0
    if coloring is not None:
        E = coloring.max_color()
        for eid in graph.edge_list():
            c = coloring.edge(eid)
            if c < 0:
                v.append(f"rules1-1: negative color on edge {eid}")
            if c != 0:
                s, d = graph.edges[eid]
                if coloring.vertex(s) != c or coloring.vertex(d) != c:
                    v.append(
                        f"notation-8: edge {eid} colored {c} but endpoints "
                        f"{coloring.vertex(s)},{coloring.vertex(d)}"
                    )
        for name in graph.vertex_list():
            if coloring.vertex(name) < 0:
                v.append(f"rules1-1: negative color on vertex {name}")
        for color in range(1, E + 1):
            lefts = [
                w
                for w, k in graph.vertices.items()
                if k == "left" and coloring.vertex(w) == color
            ]
            rights = [
                w
                for w, k in graph.vertices.items()
                if k == "right" and coloring.vertex(w) == color
            ]
            if not lefts or not rights:
                v.append(
                    f"rules1-2: color {color} misses a left or right special vertex"
                )
        for name in graph.vertex_list():
            c = coloring.vertex(name)
            if c != 0:
                if not any(coloring.edge(e) == c for e in graph.in_edges(name)):
                    v.append(f"rules1-3: vertex {name} lacks an in-edge of color {c}")
                if not any(coloring.edge(e) == c for e in graph.out_edges(name)):
                    v.append(f"rules1-3: vertex {name} lacks an out-edge of color {c}")
        for eid in graph.edge_list():
            c = coloring.edge(eid)
            if c != 0 and not _on_monochromatic_circuit(graph, coloring, eid):
                v.append(f"rules1-4: edge {eid} is on no circuit of color {c}")
    return ValidationReport(not v, tuple(v), graph.K, graph.K_left, graph.K_right, E)


def _on_monochromatic_circuit(
    graph: AbstractGraph, coloring: Coloring, eid: str
) -> bool:
    color = coloring.edge(eid)
    s, d = graph.edges[eid]
    # search a directed path d -> s through edges of the same color
    stack = [d]
    seen = {d}
    while stack:
        x = stack.pop()
        if x == s:
            return True
        for e2 in graph.out_edges(x):
            if coloring.edge(e2) == color:
                y = graph.edges[e2][1]
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
    return False


# ---------------------------------------------------------------------------
# RBS rewrites


@dataclass(frozen=True)
class Move:
    """One local rewrite: the bispecial edge plus the chosen in-edge of
    its source and out-edge of its target."""

    e0: str
    chosen_in: str
    chosen_out: str

    def to_json(self) -> dict:
        return {"e0": self.e0, "in": self.chosen_in, "out": self.chosen_out}


def apply_rbs(
    graph: AbstractGraph,
    coloring: Coloring | None,
    e0: str,
    chosen_in: str,
    chosen_out: str,
) -> tuple[AbstractGraph, Coloring | None]:
    """Rewire around a bispecial edge.

    The bispecial edge ends up reversed; the chosen in-edge follows the
    right vertex, the chosen out-edge follows the left vertex, all other
    incident edges stay.  Raises when the choice yields a self-loop or a
    disconnected graph.  Colors are preserved off the two touched
    vertices and the rewired edge; on those three the old colors are kept
    when the result still validates, otherwise they are zeroed (least
    change first, full zeroing as fallback).
    """
    if e0 not in graph.edges:
        raise PreconditionFailure(f"unknown edge {e0}")
    u, v = graph.edges[e0]
    if graph.vertices[u] != "left" or graph.vertices[v] != "right":
        raise PreconditionFailure(f"edge {e0} is not bispecial")
    in_ids = set(graph.in_edges(u))
    out_ids = set(graph.out_edges(v))
    in_ids.discard(e0)
    out_ids.discard(e0)
    if chosen_in not in in_ids:
        raise PreconditionFailure(f"{chosen_in} does not end at {u}")
    if chosen_out not in out_ids:
        raise PreconditionFailure(f"{chosen_out} does not begin at {v}")
    new_edges: dict[str, tuple[str, str]] = {}
    for eid, (s, d) in graph.edges.items():
        if eid == e0:
            new_edges[eid] = (v, u)
        elif eid in in_ids and eid in out_ids:
            # an edge from v to u; both endpoints may move
            ns = u if eid == chosen_out else v
            nd = v if eid == chosen_in else u
            new_edges[eid] = (ns, nd)
        elif eid in in_ids:
            new_edges[eid] = (s, v if eid == chosen_in else u)
        elif eid in out_ids:
            new_edges[eid] = (u if eid == chosen_out else v, d)
        else:
            new_edges[eid] = (s, d)
    result = AbstractGraph(dict(graph.vertices), new_edges)
    for eid, (s, d) in result.edges.items():
        if s == d:
            raise InadmissibleMove(
                f"choice ({chosen_in},{chosen_out}) creates self-loop {eid}"
            )
    if not result.is_strongly_connected():
        raise InadmissibleMove(
            f"choice ({chosen_in},{chosen_out}) disconnects the graph"
        )
    if result.degree_profile() != graph.degree_profile():
        raise InvariantViolation("rewrite changed the degree profile")
    if coloring is None:
        return result, None
    new_coloring = _complete_colors(result, coloring, u, v, e0)
    return result, new_coloring


def _complete_colors(
    graph: AbstractGraph, coloring: Coloring, u: str, v: str, e0: str
) -> Coloring:
    """Least-change completion of the colors on the rewired spots."""
    zero_orders = [
        (),
        (e0,),
        (u,),
        (v,),
        (e0, u),
        (e0, v),
        (u, v),
        (e0, u, v),
    ]
    for zeros in zero_orders:
        cand = coloring.with_updates(
            vertices={x: 0 for x in zeros if x in (u, v)},
            edges={x: 0 for x in zeros if x == e0},
        )
        if validate(graph, cand).ok:
            return cand
    return coloring.with_updates(vertices={u: 0, v: 0}, edges={e0: 0})


# -- move classification ----------------------------------------------------

TWIST = "twist"
SHRINK_U = "shrink-u"
SHRINK_V = "shrink-v"
COLLAPSE = "collapse"
OUTSIDE = "outside"


def classify_move(graph: AbstractGraph, loop: Loop, move: Move) -> str:
    """Kind of the move relative to one loop.

    ``twist`` keeps the loop, ``shrink-u``/``shrink-v`` eject the left or
    right vertex of the rewired edge, ``collapse`` destroys the loop, and
    ``outside`` means the move does not touch the loop at all.
    """
    check_loop(graph, loop)
    u, v = graph.edges[move.e0]
    lverts = set(loop_vertices(graph, loop))
    if move.e0 not in loop.edges:
        if u in lverts or v in lverts:
            raise InvariantViolation(
                "a bispecial edge touching a loop vertex must be a loop edge"
            )
        return OUTSIDE
    idx = loop.edges.index(move.e0)
    loop_in = loop.edges[idx - 1]  # loop edge ending at u
    loop_out = loop.edges[(idx + 1) % len(loop.edges)]  # loop edge leaving v
    in_on_loop = move.chosen_in == loop_in
    out_on_loop = move.chosen_out == loop_out
    if in_on_loop and out_on_loop:
        return TWIST
    if not in_on_loop and not out_on_loop:
        return COLLAPSE
    if len(loop.edges) == 2:
        raise PreconditionFailure("shrink is never allowed in a 2-loop")
    if in_on_loop:  # ejects u
        lefts_on_loop = sum(
            1 for w in lverts if graph.vertices[w] == "left"
        )
        if lefts_on_loop < 2:
            raise PreconditionFailure(
                "cannot eject the loop's only left special vertex"
            )
        return SHRINK_U
    rights_on_loop = sum(1 for w in lverts if graph.vertices[w] == "right")
    if rights_on_loop < 2:
        raise PreconditionFailure(
            "cannot eject the loop's only right special vertex"
        )
    return SHRINK_V


def shrink_loop(loop: Loop, move: Move) -> Loop:
    """The loop after a shrink: the rewired edge leaves it."""
    return Loop(tuple(e for e in loop.edges if e != move.e0))


# ---------------------------------------------------------------------------
# loop-deleted quotient


@dataclass(frozen=True)
class LoopQuotient:
    """Undirected graph left after deleting tracked loop edges and
    merging each loop's left (resp. right) vertices into one.

    The count identity ``edges - vertices == K - 2E`` holds by
    construction and is asserted; being connected forces
    ``E <= (K+1)/2``.
    """

    vertices: tuple[str, ...]
    edges: tuple[tuple[str, str, str], ...]  # (edge id, endpoint, endpoint)
    K: int
    E: int

    def neighbors(self, x: str) -> list[str]:
        out = []
        for _, a, b in self.edges:
            if a == x:
                out.append(b)
            elif b == x:
                out.append(a)
        return out

    def is_connected(self) -> bool:
        return is_weakly_connected(list(self.vertices), self.neighbors)

    def components(self) -> list[frozenset[str]]:
        return weak_components(list(self.vertices), self.neighbors)


def build_xi(
    graph: AbstractGraph,
    loops: Mapping[str, Loop],
    moves: Sequence[Move] = (),
) -> LoopQuotient:
    """Apply the twist/shrink moves from the log (ignoring moves that do
    not touch the tracked loops), delete the surviving loops' edges, and
    merge each loop's special vertices by side."""
    labels = sorted(loops)
    current = graph
    track = {lab: loops[lab] for lab in labels}
    for lab in labels:
        check_loop(graph, track[lab])
    if not loops_vertex_disjoint(graph, list(track.values())):
        raise PreconditionFailure("tracked loops must be vertex-disjoint")
    for mv in moves:
        kinds = {lab: classify_move(current, track[lab], mv) for lab in labels}
        touching = [lab for lab, k in kinds.items() if k != OUTSIDE]
        if not touching:
            continue  # moves off the loops do not enter the quotient
        if len(touching) > 1:
            raise InvariantViolation("one edge cannot lie on two disjoint loops")
        lab = touching[0]
        kind = kinds[lab]
        if kind == COLLAPSE:
            raise PreconditionFailure(
                f"move log contains a collapse on tracked loop {lab}"
            )
        current, _ = apply_rbs(current, None, mv.e0, mv.chosen_in, mv.chosen_out)
        if kind in (SHRINK_U, SHRINK_V):
            track[lab] = shrink_loop(track[lab], mv)
    loop_edge_ids = {e for lp in track.values() for e in lp.edges}
    merge: dict[str, str] = {}
    for lab in labels:
        for w in loop_vertices(current, track[lab]):
            side = "l" if current.vertices[w] == "left" else "r"
            merge[w] = f"{lab}_{side}"
    vertices = sorted(
        {merge.get(w, w) for w in current.vertices} | set(merge.values())
    )
    edges = tuple(
        (eid, merge.get(s, s), merge.get(d, d))
        for eid, (s, d) in sorted(current.edges.items())
        if eid not in loop_edge_ids
    )
    xi = LoopQuotient(tuple(vertices), edges, graph.K, len(labels))
    if len(xi.edges) - len(xi.vertices) != graph.K - 2 * len(labels):
        raise InvariantViolation(
            f"count identity failed: {len(xi.edges)} - {len(xi.vertices)} != "
            f"{graph.K} - 2*{len(labels)}"
        )
    return xi


@dataclass(frozen=True)
class BoundReport:
    xi_connected: bool
    E: int
    K: int
    bound_satisfied: bool  # E <= (K+1)/2
    counting_slack: int  # edges(Xi) - (vertices(Xi) - 1)
    witness_components: tuple[tuple[str, ...], ...] | None

    def to_json(self) -> dict:
        return {
            "xi_connected": self.xi_connected,
            "E": self.E,
            "K": self.K,
            "bound": f"E <= (K+1)/2 = {(self.K + 1) / 2}",
            "bound_satisfied": self.bound_satisfied,
            "counting_slack": self.counting_slack,
            "witness_components": [list(c) for c in self.witness_components]
            if self.witness_components
            else None,
        }


def bound_check(
    graph: AbstractGraph,
    loops: Mapping[str, Loop],
    moves_or_itinerary: "Sequence[Move] | Itinerary" = (),
) -> BoundReport:
    """Build the quotient from the twist/shrink log and report whether
    its connectivity yields the loop-count bound.

    The counting inequality (a weakly connected graph on V vertices has
    at least V-1 edges) is evaluated independently of the connectivity
    verdict; for rule-conformant inputs a disconnected quotient means
    some stated rule was violated upstream, and the report says so.
    """
    if isinstance(moves_or_itinerary, Itinerary):
        moves = moves_or_itinerary.twist_shrink_moves()
    else:
        moves = list(moves_or_itinerary)
    xi = build_xi(graph, loops, moves)
    connected = xi.is_connected()
    K, E = xi.K, xi.E
    slack = len(xi.edges) - (len(xi.vertices) - 1)
    if connected and slack != K - 2 * E + 1:
        raise InvariantViolation("counting identity disagrees with slack")
    witness = None
    if not connected:
        witness = tuple(
            tuple(sorted(c)) for c in sorted(xi.components(), key=lambda c: sorted(c))
        )
    return BoundReport(
        connected,
        E,
        K,
        2 * E <= K + 1,
        slack,
        witness,
    )


# ---------------------------------------------------------------------------
# components and tags (loop-deleted bookkeeping)


@dataclass(frozen=True)
class ComponentTags:
    """Weak components of the loop-deleted graph, each tagged by the loop
    vertices it contains (one entry per tracked loop, in label order)."""

    labels: tuple[str, ...]
    components: tuple[frozenset[str], ...]
    tags: tuple[tuple[frozenset[str], ...], ...]

    def as_set(self) -> set[tuple[frozenset[str], tuple[frozenset[str], ...]]]:
        return set(zip(self.components, self.tags))


def check_conditions_a(graph: AbstractGraph, loops: Mapping[str, Loop]) -> None:
    rep = validate(graph)
    structural = [x for x in rep.violations if x.startswith("notation")]
    if structural:
        raise PreconditionFailure(f"structure violates: {structural[0]}")
    for lab in sorted(loops):
        check_loop(graph, loops[lab])
    if not loops_vertex_disjoint(graph, [loops[lab] for lab in sorted(loops)]):
        raise PreconditionFailure("circuits must be vertex-disjoint")


def components_and_tags(
    graph: AbstractGraph, loops: Mapping[str, Loop]
) -> ComponentTags:
    check_conditions_a(graph, loops)
    labels = tuple(sorted(loops))
    loop_edges = {e for lab in labels for e in loops[lab].edges}
    verts = graph.vertex_list()

    def neighbors(x: str) -> list[str]:
        out = []
        for eid, (s, d) in graph.edges.items():
            if eid in loop_edges:
                continue
            if s == x:
                out.append(d)
            elif d == x:
                out.append(s)
        return out

    comps = weak_components(verts, neighbors)
    comps = sorted(comps, key=lambda c: sorted(c))
    tags = []
    for comp in comps:
        tags.append(
            tuple(
                frozenset(set(loop_vertices(graph, loops[lab])) & comp)
                for lab in labels
            )
        )
    return ComponentTags(labels, tuple(comps), tuple(tags))


@dataclass(frozen=True)
class MoveEffect:
    kind: str  # "A" | "B" | "C"
    merged: tuple[frozenset[str], frozenset[str], frozenset[str]] | None
    ejected: str | None
    before: ComponentTags
    after: ComponentTags
    graph_after: AbstractGraph
    loops_after: dict[str, Loop]


def move_effect(
    graph: AbstractGraph, loops: Mapping[str, Loop], move: Move
) -> MoveEffect:
    """Apply one move of kind A (twist on a loop), B (shrink on a loop of
    at least three vertices) or C (rewrite off all loops) and report its
    effect on components and tags, verified against recomputation.

    Twists and off-loop rewrites must leave components and tags unchanged;
    a shrink can only merge the two components of the rewired edge's
    endpoints, dropping exactly the ejected vertex from the tags.
    """
    before = components_and_tags(graph, loops)
    labels = sorted(loops)
    kinds = {lab: classify_move(graph, loops[lab], move) for lab in labels}
    touching = [lab for lab in labels if kinds[lab] != OUTSIDE]
    if len(touching) > 1:
        raise InvariantViolation("edge on two disjoint loops")
    if touching and kinds[touching[0]] == COLLAPSE:
        raise PreconditionFailure("move not of kind A/B/C: collapse on a circuit")
    u, v = graph.edges[move.e0]
    graph2, _ = apply_rbs(graph, None, move.e0, move.chosen_in, move.chosen_out)
    loops2 = {lab: loops[lab] for lab in labels}
    kind = "C"
    ejected = None
    if touching:
        lab = touching[0]
        if kinds[lab] == TWIST:
            kind = "A"
        else:
            kind = "B"
            ejected = u if kinds[lab] == SHRINK_U else v
            loops2[lab] = shrink_loop(loops[lab], move)
    after = components_and_tags(graph2, loops2)
    merged = None
    if kind in ("A", "C"):
        if before.as_set() != after.as_set():
            raise InvariantViolation(
                f"kind-{kind} move changed components or tags"
            )
    else:
        merged = _verify_merge(before, after, u, v, ejected)  # type: ignore[arg-type]
    return MoveEffect(kind, merged, ejected, before, after, graph2, loops2)


def _verify_merge(
    before: ComponentTags, after: ComponentTags, u: str, v: str, ejected: str
) -> tuple[frozenset[str], frozenset[str], frozenset[str]]:
    comp_u = next(c for c in before.components if u in c)
    comp_v = next(c for c in before.components if v in c)
    expected_comp = comp_u | comp_v
    idx_u = before.components.index(comp_u)
    idx_v = before.components.index(comp_v)
    expected_tag = tuple(
        (su | sv) - {ejected}
        for su, sv in zip(before.tags[idx_u], before.tags[idx_v])
    )
    expected = {(expected_comp, expected_tag)}
    for c, t in zip(before.components, before.tags):
        if c not in (comp_u, comp_v):
            expected.add((c, t))
    if expected != after.as_set():
        raise InvariantViolation("shrink effect disagrees with recomputation")
    return comp_u, comp_v, expected_comp


# ---------------------------------------------------------------------------
# itineraries


@dataclass(frozen=True)
class Event:
    kind: str  # "shrink" | "spread"
    in_edge: str | None = None
    out_edge: str | None = None

    def to_json(self) -> dict:
        out: dict = {"type": self.kind}
        if self.kind == "spread":
            out["in"] = self.in_edge
            out["out"] = self.out_edge
        return out


@dataclass
class Itinerary:
    """Logged rewrite history of a tracked family of colored loops.

    Index ``i`` runs over states; ``move_lists[i]`` and ``events[i]``
    describe the transition from state ``i`` to ``i + 1``.  The history
    ends when every tracked loop has spread its color.
    """

    graphs: list[AbstractGraph]
    colorings: list[Coloring]
    partitions: list[dict[str, Loop]]
    move_lists: list[list[Move]]
    events: list[dict[str, Event]]

    @property
    def steps(self) -> int:
        return len(self.move_lists)

    def twist_shrink_moves(self) -> list[Move]:
        """All moves in order that act on a tracked loop (twists and
        shrinks; off-loop moves are excluded)."""
        out = []
        for i in range(self.steps):
            part = self.partitions[i]
            current = self.graphs[i]
            track = dict(part)
            for mv in self.move_lists[i]:
                on_loop = False
                for lab in sorted(track):
                    kind = classify_move(current, track[lab], mv)
                    if kind != OUTSIDE:
                        on_loop = True
                        if kind in (SHRINK_U, SHRINK_V):
                            track[lab] = shrink_loop(track[lab], mv)
                        break
                current, _ = apply_rbs(
                    current, None, mv.e0, mv.chosen_in, mv.chosen_out
                )
                if on_loop:
                    out.append(mv)
        return out


@dataclass(frozen=True)
class ItineraryVerdict:
    ok: bool
    violations: tuple[str, ...]


def itinerary_check(it: Itinerary) -> ItineraryVerdict:
    """Verify the itinerary conditions; violations name the item."""
    v: list[str] = []
    M = it.steps
    if not (
        len(it.graphs) == M + 1
        and len(it.colorings) == M + 1
        and len(it.partitions) == M + 1
        and len(it.events) == M
    ):
        return ItineraryVerdict(False, ("malformed: list lengths disagree",))
    for i in range(M + 1):
        rep = validate(it.graphs[i], it.colorings[i])
        if not rep.ok:
            v.append(f"state {i} invalid: {rep.violations[0]}")
        for lab in sorted(it.partitions[i]):
            lp = it.partitions[i][lab]
            try:
                check_loop(it.graphs[i], lp)
            except PreconditionFailure as exc:
                v.append(f"state {i} loop {lab}: {exc}")
    if v:
        return ItineraryVerdict(False, tuple(v))
    for i in range(M):
        part = it.partitions[i]
        if not part:
            v.append(f"item-7: empty loop family at step {i} < {M}")
        g = it.graphs[i]
        track = dict(part)
        moves_per_loop: dict[str, list[tuple[int, str]]] = {lab: [] for lab in part}
        for k, mv in enumerate(it.move_lists[i]):
            for lab in sorted(track):
                kind = classify_move(g, track[lab], mv)
                if kind == OUTSIDE:
                    continue
                if kind == COLLAPSE:
                    v.append(f"item-2: collapse on tracked loop {lab} at step {i}")
                else:
                    moves_per_loop[lab].append((k, kind))
                    if kind in (SHRINK_U, SHRINK_V):
                        track[lab] = shrink_loop(track[lab], mv)
                break
            try:
                g, _ = apply_rbs(g, None, mv.e0, mv.chosen_in, mv.chosen_out)
            except (InadmissibleMove, PreconditionFailure) as exc:
                v.append(f"item-1: move {k} at step {i} inadmissible: {exc}")
                return ItineraryVerdict(False, tuple(v))
        if g != it.graphs[i + 1]:
            v.append(f"item-1: replayed moves do not produce state {i + 1}")
        ev = it.events[i]
        if not ev:
            v.append(f"item-3: no event at step {i}")
        for lab in sorted(ev):
            if lab not in part:
                v.append(f"item-3: event for untracked loop {lab} at step {i}")
        for lab, seq in moves_per_loop.items():
            kinds = [kk for _, kk in seq]
            shrinks = [k for k, kk in seq if kk in (SHRINK_U, SHRINK_V)]
            twists = [k for k, kk in seq if kk == TWIST]
            if shrinks and twists and max(twists) > min(shrinks):
                v.append(f"item-4: twist after shrink on loop {lab} at step {i}")
            if shrinks and ev.get(lab, Event("none")).kind != "shrink":
                v.append(
                    f"item-3: loop {lab} shrank at step {i} without a shrink event"
                )
            if ev.get(lab) and ev[lab].kind == "spread" and shrinks:
                v.append(
                    f"item-3: loop {lab} has both shrink moves and a spread "
                    f"event at step {i}"
                )
        # item 5: next partition = survivors minus spread loops
        expected = {
            lab: track[lab]
            for lab in part
            if not (lab in ev and ev[lab].kind == "spread")
        }
        got = it.partitions[i + 1]
        if set(expected) != set(got) or any(
            expected[lab].edges != got[lab].edges for lab in expected
        ):
            v.append(f"item-5: loop family at step {i + 1} is not the expected one")
        # item 6: colors preserved on surviving and spreading loops
        old_c, new_c = it.colorings[i], it.colorings[i + 1]
        g_next = it.graphs[i + 1]
        for lab in sorted(part):
            lp = track.get(lab, part[lab])
            if lab in ev and ev[lab].kind == "spread":
                pass  # spreading loop: must keep its color too
            elif lab not in it.partitions[i + 1]:
                continue
            vs = loop_vertices(g_next, lp) if set(lp.edges) <= set(g_next.edges) else []
            if not new_c.same_on(old_c, vs, lp.edges):
                v.append(f"item-6: colors changed on loop {lab} at step {i + 1}")
        ejected = _ejected_vertices(it, i)
        for w in sorted(ejected):
            if new_c.vertex(w) != 0:
                v.append(f"item-6: ejected vertex {w} still colored at step {i + 1}")
        # spread events name genuinely colored outside edges
        for lab in sorted(ev):
            if ev[lab].kind != "spread":
                continue
            lp = track.get(lab, part[lab])
            color = max(
                (it.colorings[i].edge(e) for e in lp.edges), default=0
            )
            lverts = set(loop_vertices(g_next, lp))
            e_in, e_out = ev[lab].in_edge, ev[lab].out_edge
            for name, eid, end in (("entering", e_in, 1), ("leaving", e_out, 0)):
                if eid is None or eid not in g_next.edges:
                    v.append(f"item-3: spread of {lab} names no {name} edge")
                    continue
                if eid in lp.edges:
                    v.append(f"item-3: spread edge {eid} lies on loop {lab}")
                if g_next.edges[eid][end] not in lverts:
                    v.append(
                        f"item-3: spread edge {eid} does not touch loop {lab}"
                    )
                if new_c.edge(eid) != color:
                    v.append(
                        f"item-3: spread edge {eid} not colored {color}"
                    )
    if it.partitions[M]:
        v.append(f"item-7: loop family not empty at final step {M}")
    return ItineraryVerdict(not v, tuple(v))


def _ejected_vertices(it: Itinerary, i: int) -> set[str]:
    """Vertices dropped from tracked loops during step ``i``."""
    before = set()
    for lab, lp in it.partitions[i].items():
        if lab in it.partitions[i + 1]:
            before |= set(loop_vertices(it.graphs[i], lp))
    after = set()
    for lab, lp in it.partitions[i + 1].items():
        after |= set(loop_vertices(it.graphs[i + 1], lp))
    return before - after


def restrict_itinerary(it: Itinerary, keep: Iterable[str]) -> Itinerary:
    """Sub-itinerary that follows only the given loops; steps whose
    events touch none of them are merged into their successors."""
    keep_set = set(keep)
    unknown = keep_set - set(it.partitions[0])
    if unknown:
        raise PreconditionFailure(f"unknown loop labels: {sorted(unknown)}")
    kept_steps = [
        i for i in range(it.steps) if keep_set & set(it.events[i])
    ]
    graphs = [it.graphs[0]]
    colorings = [it.colorings[0]]
    partitions = [
        {lab: lp for lab, lp in it.partitions[0].items() if lab in keep_set}
    ]
    move_lists: list[list[Move]] = []
    events: list[dict[str, Event]] = []
    prev = 0
    for i in kept_steps:
        moves: list[Move] = []
        for j in range(prev, i + 1):
            moves.extend(it.move_lists[j])
        move_lists.append(moves)
        events.append(
            {lab: ev for lab, ev in it.events[i].items() if lab in keep_set}
        )
        graphs.append(it.graphs[i + 1])
        colorings.append(it.colorings[i + 1])
        partitions.append(
            {
                lab: lp
                for lab, lp in it.partitions[i + 1].items()
                if lab in keep_set
            }
        )
        prev = i + 1
    return Itinerary(graphs, colorings, partitions, move_lists, events)


# ---------------------------------------------------------------------------
# searches and random instances


def simple_cycles(graph: AbstractGraph, max_cycles: int = 200000) -> list[Loop]:
    """All vertex self-avoiding directed circuits with >= 2 edges, as
    edge-id loops; parallel edges give distinct circuits.

    Each circuit is reported once, rooted at its lexicographically least
    edge id.
    """
    out: list[Loop] = []
    edge_ids = graph.edge_list()

    def extend(path: list[str], visited: set[str], root_edge: str) -> None:
        if len(out) >= max_cycles:
            return
        last_dst = graph.edges[path[-1]][1]
        root_src = graph.edges[root_edge][0]
        for eid in edge_ids:
            s, d = graph.edges[eid]
            if s != last_dst:
                continue
            if d == root_src and len(path) >= 1:
                if eid != root_edge and eid >= root_edge:
                    cand = path + [eid]
                    if len(cand) >= 2:
                        out.append(Loop(tuple(cand)))
                continue
            if d in visited or eid <= root_edge:
                continue
            extend(path + [eid], visited | {d}, root_edge)

    for root in edge_ids:
        s, d = graph.edges[root]
        extend([root], {s, d}, root)
    return out


@dataclass(frozen=True)
class SearchResult:
    found: tuple[Coloring, dict[str, Loop]] | None
    exhausted: bool
    candidates_tried: int
    note: str


def search_colorings(
    graph: AbstractGraph, e_target: int, max_cycles: int = 200000
) -> SearchResult:
    """Look for ``e_target`` vertex-disjoint loops that do not disconnect
    the loop-deleted quotient, together with the canonical coloring that
    assigns each loop its own color.

    Any coloring satisfying the one-graph rules restricts to such a loop
    family, and conversely the canonical coloring of such a family always
    satisfies them; so this search decides attainability of ``e_target``
    distinct loop colors on the given graph.
    """
    structural = validate(graph)
    if any(x.startswith("notation") for x in structural.violations):
        raise PreconditionFailure(f"graph invalid: {structural.violations[0]}")
    cycles = simple_cycles(graph, max_cycles=max_cycles)
    exhausted = len(cycles) < max_cycles
    tried = 0
    for combo in itertools.combinations(range(len(cycles)), e_target):
        family = [cycles[i] for i in combo]
        if not loops_vertex_disjoint(graph, family):
            continue
        tried += 1
        loops = {str(i + 1): lp for i, lp in enumerate(family)}
        xi = build_xi(graph, loops)
        if not xi.is_connected():
            continue
        vcolors: dict[str, int] = {}
        ecolors: dict[str, int] = {}
        for i, lp in enumerate(family):
            for e in lp.edges:
                ecolors[e] = i + 1
            for w in loop_vertices(graph, lp):
                vcolors[w] = i + 1
        coloring = Coloring(vcolors, ecolors)
        rep = validate(graph, coloring)
        if not rep.ok:
            raise InvariantViolation(
                f"canonical loop coloring failed validation: {rep.violations[0]}"
            )
        return SearchResult((coloring, loops), exhausted, tried, "found")
    note = "exhausted" if exhausted else "cycle cap reached; search incomplete"
    return SearchResult(None, exhausted, tried, note)


def enumerate_valid_graphs(K: int, max_vertices: int = 8) -> Iterable[AbstractGraph]:
    """All structurally valid labeled graphs with the given branching
    constant and at most ``max_vertices`` vertices.

    The degree rules force at most ``K`` vertices of each kind, so the
    vertex bound only truncates when ``2K > max_vertices``.
    """
    for k_l in range(1, K + 1):
        for k_r in range(1, K + 1):
            if k_l + k_r > max_vertices:
                continue
            lefts = [f"u{i}" for i in range(1, k_l + 1)]
            rights = [f"v{i}" for i in range(1, k_r + 1)]
            verts = {**{u: "left" for u in lefts}, **{v: "right" for v in rights}}
            names = lefts + rights
            # one out-edge per left vertex
            left_targets = itertools.product(
                *[[t for t in names if t != u] for u in lefts]
            )
            pair_types = [
                (v, t) for v in rights for t in names if t != v
            ]
            n_right_edges = K + k_r
            for targets in left_targets:
                for multiset in itertools.combinations_with_replacement(
                    pair_types, n_right_edges
                ):
                    in_deg = {w: 0 for w in names}
                    out_right = {v: 0 for v in rights}
                    for u, t in zip(lefts, targets):
                        in_deg[t] += 1
                    for v, t in multiset:
                        in_deg[t] += 1
                        out_right[v] += 1
                    if any(in_deg[v] != 1 for v in rights):
                        continue
                    if any(in_deg[u] < 2 for u in lefts):
                        continue
                    if any(out_right[v] < 2 for v in rights):
                        continue
                    edges: dict[str, tuple[str, str]] = {}
                    for i, (u, t) in enumerate(zip(lefts, targets)):
                        edges[f"a{i}"] = (u, t)
                    for i, (v, t) in enumerate(multiset):
                        edges[f"b{i}"] = (v, t)
                    g = AbstractGraph(verts, edges)
                    if g.is_strongly_connected():
                        yield g


@dataclass(frozen=True)
class ExhaustionCertificate:
    K: int
    e_target: int
    max_vertices: int
    graphs_examined: int
    witnesses: int

    @property
    def impossible(self) -> bool:
        return self.witnesses == 0


def exhaustive_bound_probe(
    K: int, e_target: int, max_vertices: int = 8
) -> tuple[ExhaustionCertificate, tuple[AbstractGraph, Coloring, dict[str, Loop]] | None]:
    """Search every valid graph of branching constant ``K`` (up to the
    vertex cap) for ``e_target`` distinctly colorable disjoint loops."""
    examined = 0
    witnesses = 0
    first = None
    for g in enumerate_valid_graphs(K, max_vertices):
        examined += 1
        res = search_colorings(g, e_target)
        if res.found is not None:
            witnesses += 1
            if first is None:
                coloring, loops = res.found
                first = (g, coloring, loops)
    return (
        ExhaustionCertificate(K, e_target, max_vertices, examined, witnesses),
        first,
    )


# -- random instances --------------------------------------------------------


def random_graph_with_loops(
    rng: random.Random,
    n_loops: int | None = None,
    max_attempts: int = 2000,
) -> tuple[AbstractGraph, dict[str, Loop]]:
    """A random structurally valid graph with a family of vertex-disjoint
    tracked circuits (loops first, then random completion)."""
    for _ in range(max_attempts):
        got = _try_random_graph(rng, n_loops)
        if got is not None:
            return got
    raise InvariantViolation("random instance generation failed to converge")


def _try_random_graph(
    rng: random.Random, n_loops: int | None
) -> tuple[AbstractGraph, dict[str, Loop]] | None:
    E = n_loops if n_loops is not None else rng.choice([1, 1, 2, 2, 3])
    sizes = [rng.choice([2, 2, 3, 3, 4]) for _ in range(E)]
    verts: dict[str, str] = {}
    edges: dict[str, tuple[str, str]] = {}
    loops: dict[str, Loop] = {}
    counter = itertools.count()
    for li, size in enumerate(sizes, start=1):
        # a circuit needs at least one vertex of each kind
        kinds = ["left", "right"] + [
            rng.choice(["left", "right"]) for _ in range(size - 2)
        ]
        rng.shuffle(kinds)
        names = [f"L{li}x{j}" for j in range(size)]
        for nm, kd in zip(names, kinds):
            verts[nm] = kd
        eids = []
        for j in range(size):
            eid = f"e{next(counter):03d}"
            edges[eid] = (names[j], names[(j + 1) % size])
            eids.append(eid)
        loops[str(li)] = Loop(tuple(eids))
    n_extra = rng.choice([0, 1, 1, 2, 2, 3])
    for j in range(n_extra):
        verts[f"w{j}"] = rng.choice(["left", "right"])
    lefts = sorted(v for v, k in verts.items() if k == "left")
    rights = sorted(v for v, k in verts.items() if k == "right")
    loop_vs = {w for lp in loops.values() for e in lp.edges for w in edges[e][:1]}
    loop_vs |= {edges[e][1] for lp in loops.values() for e in lp.edges}

    # remaining out-capacity: lefts off loops need their single out-edge;
    # every right wants total out >= 2.  Remaining in-capacity: rights off
    # loops need their single in-edge; every left wants total in >= 2.
    def out_count(v: str) -> int:
        return sum(1 for s, _ in edges.values() if s == v)

    def in_count(v: str) -> int:
        return sum(1 for _, d in edges.values() if d == v)

    def add_edge(s: str, d: str) -> None:
        edges[f"e{next(counter):03d}"] = (s, d)

    for v in rights:
        if v not in loop_vs:
            sources = [
                s
                for s in lefts + rights
                if s != v and (verts[s] == "right" or out_count(s) == 0)
            ]
            if not sources:
                return None
            add_edge(rng.choice(sources), v)
    for u in lefts:
        if u not in loop_vs and out_count(u) == 0:
            targets = [t for t in lefts if t != u] + [
                t for t in rights if t != u and in_count(t) == 0
            ]
            targets = [t for t in targets if verts[t] == "left" or in_count(t) == 0]
            if not targets:
                return None
            add_edge(u, rng.choice(targets))
    for v in rights:
        while out_count(v) < 2:
            targets = [t for t in lefts if t != v]
            if not targets:
                return None
            add_edge(v, rng.choice(targets))
    for u in lefts:
        while in_count(u) < 2:
            sources = [s for s in rights if s != u]
            if not sources:
                return None
            add_edge(rng.choice(sources), u)
    # a few optional extra edges from rights to lefts
    for _ in range(rng.choice([0, 0, 1, 2])):
        if rights and lefts:
            s = rng.choice(rights)
            choices = [t for t in lefts if t != s]
            if choices:
                add_edge(s, rng.choice(choices))
    g = AbstractGraph(verts, edges)
    rep = validate(g)
    if any(x.startswith("notation") for x in rep.violations):
        return None
    try:
        for lab in loops:
            check_loop(g, loops[lab])
    except PreconditionFailure:
        return None
    return g, loops


def random_twist_shrink_log(
    rng: random.Random,
    graph: AbstractGraph,
    loops: Mapping[str, Loop],
    length: int,
) -> list[Move]:
    """A random admissible log of twist/shrink moves on the tracked loops."""
    current = graph
    track = {lab: loops[lab] for lab in sorted(loops)}
    out: list[Move] = []
    for _ in range(length):
        options: list[tuple[str, Move, str]] = []
        for lab in sorted(track):
            lp = track[lab]
            for eid in lp.edges:
                u, v = current.edges[eid]
                if current.vertices[u] != "left" or current.vertices[v] != "right":
                    continue
                idx = lp.edges.index(eid)
                loop_in = lp.edges[idx - 1]
                loop_out = lp.edges[(idx + 1) % len(lp.edges)]
                options.append((lab, Move(eid, loop_in, loop_out), TWIST))
                if len(lp.edges) >= 3:
                    lvs = loop_vertices(current, lp)
                    lefts_on = sum(1 for w in lvs if current.vertices[w] == "left")
                    rights_on = len(lvs) - lefts_on
                    for cin in current.in_edges(u):
                        if cin != loop_in and cin != eid and lefts_on >= 2:
                            options.append((lab, Move(eid, cin, loop_out), SHRINK_U))
                    for cout in current.out_edges(v):
                        if cout != loop_out and cout != eid and rights_on >= 2:
                            options.append((lab, Move(eid, loop_in, cout), SHRINK_V))
        rng.shuffle(options)
        done = False
        for lab, mv, kind in options:
            try:
                nxt, _ = apply_rbs(current, None, mv.e0, mv.chosen_in, mv.chosen_out)
            except (InadmissibleMove, PreconditionFailure):
                continue
            current = nxt
            if kind in (SHRINK_U, SHRINK_V):
                track[lab] = shrink_loop(track[lab], mv)
            out.append(mv)
            done = True
            break
        if not done:
            break
    return out


def random_abc_move(
    rng: random.Random, graph: AbstractGraph, loops: Mapping[str, Loop]
) -> Move | None:
    """A random admissible move of kind A, B or C for the instance."""
    loop_vs = {
        w for lab in loops for w in loop_vertices(graph, loops[lab])
    }
    options: list[Move] = []
    for e0 in graph.bispecial_edges():
        u, v = graph.edges[e0]
        on_loop = u in loop_vs or v in loop_vs
        lab = None
        for cand in sorted(loops):
            if e0 in loops[cand].edges:
                lab = cand
        if on_loop and lab is None:
            continue
        for cin in graph.in_edges(u):
            if cin == e0:
                continue
            for cout in graph.out_edges(v):
                if cout == e0:
                    continue
                mv = Move(e0, cin, cout)
                if lab is not None:
                    try:
                        kind = classify_move(graph, loops[lab], mv)
                    except PreconditionFailure:
                        continue
                    if kind == COLLAPSE:
                        continue
                options.append(mv)
    rng.shuffle(options)
    for mv in options:
        try:
            apply_rbs(graph, None, mv.e0, mv.chosen_in, mv.chosen_out)
        except (InadmissibleMove, PreconditionFailure):
            continue
        return mv
    return None


# ---------------------------------------------------------------------------
# serialization and DOT


def graph_to_json(graph: AbstractGraph) -> dict:
    return {
        "vertices": {v: graph.vertices[v] for v in graph.vertex_list()},
        "edges": {e: list(graph.edges[e]) for e in graph.edge_list()},
    }


def graph_from_json(obj: dict) -> AbstractGraph:
    return AbstractGraph(
        dict(obj["vertices"]),
        {e: (s, d) for e, (s, d) in obj["edges"].items()},
    )


def coloring_to_json(c: Coloring) -> dict:
    return {
        "vertices": {k: v for k, v in sorted(c.vertex_colors.items()) if v},
        "edges": {k: v for k, v in sorted(c.edge_colors.items()) if v},
    }


def coloring_from_json(obj: dict) -> Coloring:
    return Coloring(
        {k: int(v) for k, v in obj.get("vertices", {}).items()},
        {k: int(v) for k, v in obj.get("edges", {}).items()},
    )


def itinerary_to_json(it: Itinerary) -> dict:
    return {
        "schema_version": 1,
        "kind": "itinerary",
        "graphs": [graph_to_json(g) for g in it.graphs],
        "colorings": [coloring_to_json(c) for c in it.colorings],
        "partitions": [
            {lab: list(lp.edges) for lab, lp in sorted(p.items())}
            for p in it.partitions
        ],
        "moves": [[m.to_json() for m in ml] for ml in it.move_lists],
        "events": [
            {lab: ev.to_json() for lab, ev in sorted(evs.items())}
            for evs in it.events
        ],
    }


def itinerary_from_json(obj: dict) -> Itinerary:
    graphs = [graph_from_json(g) for g in obj["graphs"]]
    colorings = [coloring_from_json(c) for c in obj["colorings"]]
    partitions = [
        {lab: Loop(tuple(edges)) for lab, edges in p.items()}
        for p in obj["partitions"]
    ]
    move_lists = [
        [Move(m["e0"], m["in"], m["out"]) for m in ml] for ml in obj["moves"]
    ]
    events = []
    for evs in obj["events"]:
        step = {}
        for lab, ev in evs.items():
            if ev["type"] == "spread":
                step[lab] = Event("spread", ev["in"], ev["out"])
            else:
                step[lab] = Event("shrink")
        events.append(step)
    return Itinerary(graphs, colorings, partitions, move_lists, events)


_PALETTE = (
    "black",
    "red",
    "blue",
    "forestgreen",
    "darkorange",
    "purple",
    "teal",
    "crimson",
    "navy",
)


def abstract_dot(
    graph: AbstractGraph,
    coloring: Coloring | None = None,
    loops: Mapping[str, Loop] | None = None,
    name: str = "branching_graph",
) -> str:
    def q(s: str) -> str:
        return '"' + s.replace('"', '\\"') + '"'

    lines = [f"digraph {name} {{"]
    loop_edge_labels: dict[str, str] = {}
    if loops:
        for lab in sorted(loops):
            lines.append(f"  subgraph cluster_{lab} {{")
            lines.append(f"    label={q('loop ' + lab)};")
            for w in sorted(set(loop_vertices(graph, loops[lab]))):
                lines.append(f"    {q(w)};")
            lines.append("  }")
            for e in loops[lab].edges:
                loop_edge_labels[e] = lab
    for v in graph.vertex_list():
        shape = "box" if graph.vertices[v] == "left" else "ellipse"
        attrs = [f"shape={shape}"]
        if coloring and coloring.vertex(v):
            attrs.append(
                f"color={_PALETTE[coloring.vertex(v) % len(_PALETTE)]}"
            )
        lines.append(f"  {q(v)} [{', '.join(attrs)}];")
    for e in graph.edge_list():
        s, d = graph.edges[e]
        attrs = [f"label={q(e)}"]
        if coloring and coloring.edge(e):
            attrs.append(f"color={_PALETTE[coloring.edge(e) % len(_PALETTE)]}")
        lines.append(f"  {q(s)} -> {q(d)} [{', '.join(attrs)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def xi_dot(xi: LoopQuotient, name: str = "loop_quotient") -> str:
    def q(s: str) -> str:
        return '"' + s.replace('"', '\\"') + '"'

    lines = [f"graph {name} {{"]
    for v in xi.vertices:
        lines.append(f"  {q(v)};")
    for eid, a, b in xi.edges:
        lines.append(f"  {q(a)} -- {q(b)} [label={q(eid)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
