"""Factor graphs of a language and their evolution across word lengths.

``RauzyGraph`` is the graph whose vertices are the factors of one length
and whose edges are the factors one letter longer.  The special variant
keeps only branching vertices (left/right special words, bispecials
split in two) joined by branchless paths, which is the object the loop
machinery rewrites.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

from ._graphutil import find_cycle, is_strongly_connected, is_weakly_connected
from .errors import HorizonExceeded, InvariantViolation, PreconditionFailure
from .language import (
    LanguageOracle,
    PeriodicityReport,
    Side,
    growth_profile,
    check_rbc,
    is_regular_bispecial,
    periodicity_check,
    special_extension_map,
)
from .words import Word

if TYPE_CHECKING:  # pragma: no cover
    from .abstract_graphs import AbstractGraph


@dataclass(frozen=True)
class RauzyGraph:
    """Vertices are the length-``n`` factors, edges the length-``n+1``
    factors (from their prefix window to their suffix window)."""

    n: int
    vertices: tuple[str, ...]  # sorted code strings
    edges: tuple[str, ...]  # sorted code strings, length n+1
    left_special: frozenset[str]
    right_special: frozenset[str]
    alphabet_symbols: tuple[str, ...]

    def successors(self, v: str) -> list[str]:
        return [e[1:] for e in self.edges if e[: self.n] == v]

    def predecessors(self, v: str) -> list[str]:
        return [e[:-1] for e in self.edges if e[1:] == v]

    def in_degree(self, v: str) -> int:
        return sum(1 for e in self.edges if e[1:] == v)

    def out_degree(self, v: str) -> int:
        return sum(1 for e in self.edges if e[: self.n] == v)


def build_rauzy(oracle: LanguageOracle, n: int) -> RauzyGraph:
    if n > oracle.horizon - 2:
        raise HorizonExceeded(
            f"factor graph at length {n} needs horizon {n + 2}", required=n + 2
        )
    vertices = tuple(sorted(oracle.factor_strings(n)))
    edges = tuple(sorted(oracle.factor_strings(n + 1)))
    g = RauzyGraph(
        n,
        vertices,
        edges,
        oracle.special_strings(n, "left"),
        oracle.special_strings(n, "right"),
        oracle.alphabet.symbols,
    )
    for v in vertices:
        if g.in_degree(v) != len(oracle.left_extension_map(n)[v]):
            raise InvariantViolation(f"in-degree mismatch at {v!r}")
        if g.out_degree(v) != len(oracle.right_extension_map(n)[v]):
            raise InvariantViolation(f"out-degree mismatch at {v!r}")
    return g


SpecialVertex = tuple[str, str]  # (word data, "left" | "right")


@dataclass(frozen=True)
class SpecialEdge:
    eid: str
    src: SpecialVertex
    dst: SpecialVertex
    path: str  # code string of the path word

    @property
    def is_internal(self) -> bool:
        return self.src[0] == self.dst[0] and self.src[1] == "left" and self.dst[1] == "right"


@dataclass(frozen=True)
class SpecialRauzyGraph:
    """Branching skeleton of the factor graph at one length.

    A bispecial word appears as two vertices (its left-special and
    right-special roles) joined by an internal edge whose path word is
    the word itself.
    """

    n: int
    vertices: tuple[SpecialVertex, ...]
    edges: tuple[SpecialEdge, ...]
    left_special: frozenset[str]
    right_special: frozenset[str]

    def successors(self, v: SpecialVertex) -> list[SpecialVertex]:
        return [e.dst for e in self.edges if e.src == v]

    def predecessors(self, v: SpecialVertex) -> list[SpecialVertex]:
        return [e.src for e in self.edges if e.dst == v]

    def in_edges(self, v: SpecialVertex) -> list[SpecialEdge]:
        return [e for e in self.edges if e.dst == v]

    def out_edges(self, v: SpecialVertex) -> list[SpecialEdge]:
        return [e for e in self.edges if e.src == v]

    @property
    def vertex_count(self) -> int:
        return len(self.vertices)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def type_profile(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """Sorted in-degrees of left vertices and out-degrees of right
        vertices; invariant across evolution in the stable range."""
        lefts = sorted(
            len(self.in_edges(v)) for v in self.vertices if v[1] == "left"
        )
        rights = sorted(
            len(self.out_edges(v)) for v in self.vertices if v[1] == "right"
        )
        return tuple(lefts), tuple(rights)


def build_special_rauzy(oracle: LanguageOracle, n: int) -> SpecialRauzyGraph:
    """Construct the branching skeleton by walking maximal branchless
    paths between special words.

    Raises with a partial-result message if a branchless walk escapes the
    horizon before reaching a special word.
    """
    if n > oracle.horizon - 2:
        raise HorizonExceeded(
            f"special graph at length {n} needs horizon {n + 2}", required=n + 2
        )
    lefts = oracle.special_strings(n, "left")
    rights = oracle.special_strings(n, "right")
    specials = lefts | rights
    vertices: list[SpecialVertex] = [(w, "left") for w in sorted(lefts)]
    vertices += [(w, "right") for w in sorted(rights)]
    right_map = oracle.right_extension_map(n)
    raw_edges: list[tuple[SpecialVertex, SpecialVertex, str]] = []
    for w in sorted(specials):
        origin: SpecialVertex = (w, "right") if w in rights else (w, "left")
        for b in sorted(right_map[w]):
            path = w + b
            cur = path[1:]
            while cur not in specials:
                nxt = right_map.get(cur)
                if nxt is None or len(path) + 1 > oracle.horizon:
                    raise HorizonExceeded(
                        f"branchless path from {w!r} escapes horizon "
                        f"{oracle.horizon}; graph would be partial",
                        required=len(path) + 1,
                    )
                if len(nxt) != 1:
                    raise InvariantViolation(
                        f"interior word {cur!r} of a branchless path is special"
                    )
                (b2,) = nxt
                path += b2
                cur = path[len(path) - n :]
            dst: SpecialVertex = (cur, "left") if cur in lefts else (cur, "right")
            raw_edges.append((origin, dst, path))
    for w in sorted(lefts & rights):
        raw_edges.append(((w, "left"), (w, "right"), w))
    raw_edges.sort(key=lambda t: (t[0], t[1], t[2]))
    width = max(2, len(str(len(raw_edges))))
    edges = tuple(
        SpecialEdge(f"e{i:0{width}d}", src, dst, path)
        for i, (src, dst, path) in enumerate(raw_edges)
    )
    g = SpecialRauzyGraph(n, tuple(vertices), edges, lefts, rights)
    _assert_special_graph_invariants(oracle, g)
    return g


def _assert_special_graph_invariants(
    oracle: LanguageOracle, g: SpecialRauzyGraph
) -> None:
    left_map = oracle.left_extension_map(g.n)
    right_map = oracle.right_extension_map(g.n)
    for v in g.vertices:
        word, side = v
        if side == "left":
            if len(g.in_edges(v)) != len(left_map[word]):
                raise InvariantViolation(f"in-degree mismatch at {v}")
            if len(g.out_edges(v)) != 1:
                raise InvariantViolation(f"left vertex {v} must have one out-edge")
        else:
            if len(g.out_edges(v)) != len(right_map[word]):
                raise InvariantViolation(f"out-degree mismatch at {v}")
            if len(g.in_edges(v)) != 1:
                raise InvariantViolation(f"right vertex {v} must have one in-edge")
    loops = [e for e in g.edges if e.src == e.dst]
    if loops and not periodicity_check(oracle).periodic_within_horizon:
        raise InvariantViolation(
            f"self-loop {loops[0]} in the special graph of an "
            "aperiodic-within-horizon oracle"
        )


@dataclass(frozen=True)
class ConnectivityReport:
    strong: bool
    weak: bool


def connectivity(graph: RauzyGraph | SpecialRauzyGraph) -> ConnectivityReport:
    verts = list(graph.vertices)
    succ = graph.successors
    pred = graph.predecessors
    strong = is_strongly_connected(verts, succ, pred)
    weak = strong or is_weakly_connected(
        verts, lambda v: list(succ(v)) + list(pred(v))
    )
    return ConnectivityReport(strong, weak)


@dataclass(frozen=True)
class CircuitReport:
    """A simple closed circuit avoiding one side's special vertices.

    When such a circuit exists in the factor graph of a recurrent
    language, the language is periodic; the report carries the
    periodicity check run as a cross-check in that case.
    """

    side: Side
    circuit: tuple[str, ...] | None
    oracle_recurrent: bool | None
    periodicity: PeriodicityReport | None


def special_free_circuit(
    oracle: LanguageOracle, n: int, side: Side
) -> CircuitReport:
    g = build_rauzy(oracle, n)
    avoid = g.left_special if side == "left" else g.right_special
    allowed = [v for v in g.vertices if v not in avoid]
    allowed_set = set(allowed)
    cycle = find_cycle(
        allowed, lambda v: [w for w in g.successors(v) if w in allowed_set]
    )
    if cycle is None:
        return CircuitReport(side, None, oracle.recurrent, None)
    per = periodicity_check(oracle) if oracle.recurrent else None
    if oracle.recurrent and per is not None and not per.periodic_within_horizon:
        raise InvariantViolation(
            "special-free circuit found on a recurrent oracle that looks "
            "aperiodic within horizon; factor data is inconsistent"
        )
    return CircuitReport(side, tuple(cycle), oracle.recurrent, per)


# -- representatives ------------------------------------------------------


@dataclass(frozen=True)
class RepresentativeSet:
    """Length-``n`` windows of an edge's path word that pin down the edge.

    A window is excluded when it could also begin a different branchless
    path: the first window when the source word is right special, the
    last when the target word is left special.  For the internal edge of
    a bispecial word both exclusions apply and the set is empty.
    """

    edge: SpecialEdge
    words: tuple[str, ...]
    empty_internal: bool


def representatives(graph: SpecialRauzyGraph, edge: SpecialEdge) -> RepresentativeSet:
    n = graph.n
    path = edge.path
    count = len(path) - n + 1
    lo = 1
    hi = count
    if edge.src[0] in graph.right_special:
        lo = 2
    if edge.dst[0] in graph.left_special:
        hi = count - 1
    words = tuple(path[j - 1 : j - 1 + n] for j in range(lo, hi + 1))
    return RepresentativeSet(edge, words, not words and edge.is_internal)


# -- evolution -------------------------------------------------------------


@dataclass
class EvolutionStep:
    """One jump of the special graph to the next bispecial length.

    ``vertex_map`` sends each special vertex at length ``n`` to its
    unique same-side extension at ``n_prime``; ``edge_map`` sends each
    edge to the id of its rewritten counterpart (path words only grow,
    except for the rewritten bispecial edges, which ``rbs_events``
    lists).
    """

    n: int
    n_tilde: int
    n_prime: int
    before: SpecialRauzyGraph
    after: SpecialRauzyGraph
    vertex_map: dict[SpecialVertex, SpecialVertex]
    edge_map: dict[str, str]
    rbs_events: list[Word]
    profile_preserved: bool
    length_bound_from_n: bool | None  # n' <= K*n + C, using the call's n
    length_bound_from_tilde: bool | None  # n' <= K*n_tilde + C


def _signature(
    g: SpecialRauzyGraph, rename: dict[SpecialVertex, SpecialVertex]
) -> tuple:
    return tuple(
        sorted((rename[e.src], rename[e.dst]) for e in g.edges)
    )


def _identification(
    oracle: LanguageOracle, n1: int, n2: int
) -> dict[SpecialVertex, SpecialVertex]:
    """Map special vertices at length n1 to their counterparts at n2."""
    out: dict[SpecialVertex, SpecialVertex] = {}
    for side in ("left", "right"):
        res = special_extension_map(oracle, side, n1, n2)
        if res.mapping is None:
            w, k = res.failure_witness  # type: ignore[misc]
            raise PreconditionFailure(
                f"no unique {side} extension for {w} ({k} candidates)"
            )
        for w1, w2 in res.mapping.items():
            out[(w1.data, side)] = (w2.data, side)
    return out


def evolve(oracle: LanguageOracle, n: int) -> EvolutionStep:
    """Jump from the special graph at ``n`` to the next length at which
    it changes (one past the least bispecial length at or after ``n``).

    Verifies along the way that the graph is constant on the skipped
    lengths under the identification maps, that applying the rewrites as
    abstract moves reproduces the directly built target graph, and that
    the result is independent of the order of simultaneous rewrites.
    """
    from .abstract_graphs import apply_rbs  # local import; no cycle at module load

    top = oracle.horizon - 3
    n_tilde = None
    for m in range(n, top + 1):
        if oracle.special_strings(m, "left") & oracle.special_strings(m, "right"):
            n_tilde = m
            break
    if n_tilde is None:
        raise HorizonExceeded(
            f"no bispecial word of length in [{n}, {top}]", required=oracle.horizon + 1
        )
    n_prime = n_tilde + 1
    if n_prime > oracle.horizon - 2:
        raise HorizonExceeded(
            f"evolution target {n_prime} needs horizon {n_prime + 2}",
            required=n_prime + 2,
        )
    rbc = check_rbc(oracle, n_min=n, n_max=min(n_prime, oracle.horizon - 3))
    if not rbc.holds_within_horizon:
        raise PreconditionFailure(
            f"irregular bispecial in range: {rbc.violations[0][0]}"
        )
    before = build_special_rauzy(oracle, n)
    after = build_special_rauzy(oracle, n_prime)
    # the graph must not change on the skipped lengths
    base_sig = _signature(before, {v: v for v in before.vertices})
    for m in range(n + 1, n_tilde + 1):
        mid = build_special_rauzy(oracle, m)
        ident = _identification(oracle, n, m)
        back = {w: v for v, w in ident.items()}
        if _signature(mid, back) != base_sig:
            raise InvariantViolation(
                f"special graph changed at skipped length {m}"
            )
    vertex_map = _identification(oracle, n, n_prime)
    bis = sorted(
        oracle.special_strings(n_tilde, "left")
        & oracle.special_strings(n_tilde, "right")
    )
    rbs_events = [Word(oracle.alphabet, d) for d in bis]

    # cross-check: replay the rewrites as abstract moves, both orders
    tilde_graph = build_special_rauzy(oracle, n_tilde)
    ident_to_prime = _identification(oracle, n_tilde, n_prime)
    target_sig = tuple(
        sorted((_vertex_name(e.src), _vertex_name(e.dst)) for e in after.edges)
    )
    final_sim = None
    for order in (bis, list(reversed(bis))):
        sim = _to_abstract(tilde_graph)
        for data in order:
            w = Word(oracle.alphabet, data)
            verdict = is_regular_bispecial(oracle, w)
            a_hat = oracle.alphabet.code(verdict.left_witness)  # type: ignore[arg-type]
            b_hat = oracle.alphabet.code(verdict.right_witness)  # type: ignore[arg-type]
            e0 = _vertex_name((data, "left")), _vertex_name((data, "right"))
            e0_id = next(
                eid for eid, (s, d) in sim.edges.items() if (s, d) == e0
            )
            chosen_in = next(
                e.eid
                for e in tilde_graph.in_edges((data, "left"))
                if e.path.endswith(a_hat + data)
            )
            chosen_out = next(
                e.eid
                for e in tilde_graph.out_edges((data, "right"))
                if e.path.startswith(data + b_hat)
            )
            sim, _ = apply_rbs(sim, None, e0_id, chosen_in, chosen_out)
        sim_sig = tuple(
            sorted(
                (
                    _from_name_through(ident_to_prime, s),
                    _from_name_through(ident_to_prime, d),
                )
                for (s, d) in sim.edges.values()
            )
        )
        if sim_sig != target_sig:
            raise InvariantViolation(
                "abstract replay of the rewrites disagrees with the directly "
                "built target graph"
            )
        final_sim = sim

    assert final_sim is not None
    edge_map = _match_edges(
        oracle, before, tilde_graph, after, final_sim, ident_to_prime, n, n_tilde
    )
    profile_preserved = before.type_profile() == after.type_profile()
    gp = growth_profile(oracle)
    b_from_n = b_from_tilde = None
    if gp.K is not None and gp.constant_at(n):
        C = gp.p[oracle.horizon] - gp.K * oracle.horizon
        b_from_n = n_prime <= gp.K * n + C
        b_from_tilde = n_prime <= gp.K * n_tilde + C
    return EvolutionStep(
        n,
        n_tilde,
        n_prime,
        before,
        after,
        vertex_map,
        edge_map,
        rbs_events,
        profile_preserved,
        b_from_n,
        b_from_tilde,
    )


def _pair_by_endpoints(
    claimants: list[tuple[str, str, tuple[str, str], tuple[str, str]]],
    targets: list[SpecialEdge],
) -> dict[str, str]:
    """Assign claimants (eid, path, src, dst) to target edges sharing
    their endpoints, preferring path containment, deterministically."""
    out: dict[str, str] = {}
    taken: set[str] = set()
    for eid, path, src, dst in sorted(claimants, key=lambda t: (t[2], t[3], len(t[1]), t[1])):
        candidates = [
            f for f in targets if f.src == src and f.dst == dst and f.eid not in taken
        ]
        if not candidates:
            raise InvariantViolation(f"no counterpart for edge {eid} ({path!r})")
        contained = [f for f in candidates if path in f.path]
        pool = contained or candidates
        chosen = min(pool, key=lambda f: (len(f.path), f.path, f.eid))
        taken.add(chosen.eid)
        out[eid] = chosen.eid
    return out


def _match_edges(
    oracle: LanguageOracle,
    before: SpecialRauzyGraph,
    tilde_graph: SpecialRauzyGraph,
    after: SpecialRauzyGraph,
    final_sim: "AbstractGraph",
    ident_to_prime: dict[SpecialVertex, SpecialVertex],
    n: int,
    n_tilde: int,
) -> dict[str, str]:
    """Pair every edge with its rewritten counterpart.

    Up to the bispecial length nothing is rewritten: endpoints follow the
    identification and path words only grow, so containment pins the
    match.  Across the rewrite itself the abstract replay already moved
    every edge id to its final endpoints; those endpoints select the
    counterpart in the directly built target graph.
    """
    if n == n_tilde:
        before_to_tilde = {e.eid: e.eid for e in before.edges}
    else:
        ident = _identification(oracle, n, n_tilde)
        claimants = [
            (e.eid, e.path, ident[e.src], ident[e.dst]) for e in before.edges
        ]
        before_to_tilde = _pair_by_endpoints(claimants, list(tilde_graph.edges))
    tilde_paths = {e.eid: e.path for e in tilde_graph.edges}

    def renamed(name: str) -> SpecialVertex:
        side = "left" if name.startswith("L:") else "right"
        return ident_to_prime[(name[2:], side)]

    claimants2 = [
        (eid, tilde_paths[eid], renamed(s), renamed(d))
        for eid, (s, d) in final_sim.edges.items()
    ]
    tilde_to_after = _pair_by_endpoints(claimants2, list(after.edges))
    return {
        eid: tilde_to_after[before_to_tilde[eid]] for eid in before_to_tilde
    }


def _vertex_name(v: SpecialVertex) -> str:
    return ("L:" if v[1] == "left" else "R:") + v[0]


def _from_name_through(
    ident: dict[SpecialVertex, SpecialVertex], name: str
) -> str:
    side = "left" if name.startswith("L:") else "right"
    mapped = ident[(name[2:], side)]
    return _vertex_name(mapped)


def _to_abstract(g: SpecialRauzyGraph) -> "AbstractGraph":
    from .abstract_graphs import AbstractGraph

    vertices = {_vertex_name(v): v[1] for v in g.vertices}
    edges = {e.eid: (_vertex_name(e.src), _vertex_name(e.dst)) for e in g.edges}
    return AbstractGraph(vertices, edges)


# -- DOT export -------------------------------------------------------------


def _dot_quote(s: str) -> str:
    return '"' + s.replace('"', '\\"') + '"'


def rauzy_dot(graph: RauzyGraph, oracle: LanguageOracle | None = None, name: str = "factor_graph") -> str:
    tok = (lambda d: d) if oracle is None else (
        lambda d: str(Word(oracle.alphabet, d))
    )
    lines = [f"digraph {name} {{"]
    for v in graph.vertices:
        lines.append(f"  {_dot_quote(tok(v))};")
    for e in graph.edges:
        lines.append(
            f"  {_dot_quote(tok(e[: graph.n]))} -> {_dot_quote(tok(e[1:]))} "
            f"[label={_dot_quote(tok(e))}];"
        )
    lines.append("}")
    return "\n".join(lines) + "\n"


def special_rauzy_dot(
    graph: SpecialRauzyGraph, oracle: LanguageOracle | None = None, name: str = "special_graph"
) -> str:
    tok = (lambda d: d) if oracle is None else (
        lambda d: str(Word(oracle.alphabet, d))
    )
    label = lambda v: f"{tok(v[0])}|{v[1][0]}"
    lines = [f"digraph {name} {{"]
    for v in graph.vertices:
        lines.append(f"  {_dot_quote(label(v))};")
    for e in graph.edges:
        lines.append(
            f"  {_dot_quote(label(e.src))} -> {_dot_quote(label(e.dst))} "
            f"[label={_dot_quote(str(len(e.path)))}];"
        )
    lines.append("}")
    return "\n".join(lines) + "\n"
