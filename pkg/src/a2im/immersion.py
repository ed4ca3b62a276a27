"""Certificate-based immersion: targets, an independent verifier, and an exact solver.

A certificate is an injective branch map V(H) -> V(G) plus, for every edge
uv of H, a walk in G from the image of u to the image of v. No G-edge may be
used twice, neither inside one walk nor across walks. Branch vertices may sit
inside other walks; only edge-disjointness is required.
"""

from __future__ import annotations

import hashlib
import json
import logging
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator

from .graph import Graph, GraphError, bits_of, mask_of
from .graph6 import decode

logger = logging.getLogger(__name__)

HEdge = tuple[int, int]


class TargetError(ValueError):
    code = "target"


class BudgetExceeded(RuntimeError):
    """The search ran out of nodes or wall-clock time: the answer is undecided."""

    code = "undecided"

    def __init__(self, message: str, nodes: int):
        super().__init__(message)
        self.nodes = nodes


# -- targets -------------------------------------------------------------------


class TargetKind(str, Enum):
    CLIQUE = "clique"
    COMPLETE_BIPARTITE = "kst"
    CLIQUE_TOPPED_BIPARTITE = "kll"
    EXPLICIT = "g6"


@dataclass(frozen=True)
class TargetSpec:
    kind: TargetKind
    params: tuple[int, ...] = ()
    graph: Graph | None = None

    @classmethod
    def clique(cls, k: int) -> TargetSpec:
        return cls(TargetKind.CLIQUE, (k,))

    @classmethod
    def complete_bipartite(cls, s: int, t: int) -> TargetSpec:
        return cls(TargetKind.COMPLETE_BIPARTITE, (s, t))

    @classmethod
    def clique_topped_bipartite(cls, m: int, t: int) -> TargetSpec:
        return cls(TargetKind.CLIQUE_TOPPED_BIPARTITE, (m, t))

    @classmethod
    def explicit(cls, graph: Graph) -> TargetSpec:
        return cls(TargetKind.EXPLICIT, (), graph)

    @classmethod
    def parse(cls, text: str) -> TargetSpec:
        """Parse ``kst:S,T``, ``clique:K``, ``kll:L,T`` or ``g6:<line>``."""
        kind, sep, rest = text.partition(":")
        if not sep:
            raise TargetError(f"target {text!r} lacks a 'kind:' prefix")
        kind = kind.strip().lower()
        if kind == TargetKind.EXPLICIT.value:
            return cls.explicit(decode(rest.strip()))
        try:
            numbers = tuple(int(part) for part in rest.split(","))
        except ValueError as exc:
            raise TargetError(f"target {text!r} has non-integer parameters") from exc
        arity = {"clique": 1, "kst": 2, "kll": 2}
        if kind not in arity:
            raise TargetError(f"unknown target kind {kind!r}; use kst, clique, kll or g6")
        if len(numbers) != arity[kind]:
            raise TargetError(f"target kind {kind!r} takes {arity[kind]} parameter(s)")
        return cls(TargetKind(kind), numbers)

    def label(self) -> str:
        if self.kind is TargetKind.EXPLICIT:
            return f"g6:{self.graph.n}v/{self.graph.edge_count}e"
        return f"{self.kind.value}:" + ",".join(str(p) for p in self.params)


def make_target(spec: TargetSpec) -> Graph:
    """Concrete target graph; clique or first-part vertices get the lowest labels."""
    if spec.kind is TargetKind.EXPLICIT:
        if spec.graph is None:
            raise TargetError("explicit target without a graph")
        return spec.graph
    if any(p <= 0 for p in spec.params):
        raise TargetError(f"target parameters must be positive, got {spec.params}")
    try:
        if spec.kind is TargetKind.CLIQUE:
            return Graph.complete(spec.params[0])
        s, t = spec.params
        edges = [(i, s + j) for i in range(s) for j in range(t)]
        if spec.kind is TargetKind.CLIQUE_TOPPED_BIPARTITE:
            edges += [(i, j) for i in range(s) for j in range(i + 1, s)]
        return Graph.from_edges(s + t, edges)
    except GraphError as exc:
        raise TargetError(str(exc)) from exc


# -- certificates --------------------------------------------------------------


@dataclass(frozen=True)
class ImmersionCertificate:
    branch: tuple[int, ...]
    paths: tuple[tuple[HEdge, tuple[int, ...]], ...]

    def walk_for(self, u: int, v: int) -> tuple[int, ...] | None:
        for edge, walk in self.paths:
            if edge == (u, v):
                return walk
            if edge == (v, u):
                return tuple(reversed(walk))
        return None

    def to_dict(self) -> dict:
        return {
            "branch": list(self.branch),
            "paths": [{"h_edge": list(edge), "walk": list(walk)} for edge, walk in self.paths],
        }

    @classmethod
    def from_dict(cls, data: dict) -> ImmersionCertificate:
        return cls(
            tuple(int(v) for v in data["branch"]),
            tuple(
                ((int(item["h_edge"][0]), int(item["h_edge"][1])), tuple(int(v) for v in item["walk"]))
                for item in data["paths"]
            ),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    def digest(self) -> str:
        return hashlib.sha256(self.to_json().encode("ascii")).hexdigest()


def translate_certificate(cert: ImmersionCertificate, vertex_map: dict[int, int]) -> ImmersionCertificate:
    """Rename every G-vertex of ``cert`` through ``vertex_map``."""
    return ImmersionCertificate(
        tuple(vertex_map[v] for v in cert.branch),
        tuple((edge, tuple(vertex_map[v] for v in walk)) for edge, walk in cert.paths),
    )


class CertificateDefect(str, Enum):
    BRANCH_LENGTH = "BranchLength"
    BRANCH_OUT_OF_RANGE = "BranchOutOfRange"
    NON_INJECTIVE = "NonInjective"
    NOT_AN_H_EDGE = "NotAnHEdge"
    DUPLICATE_PATH = "DuplicatePath"
    MISSING_PATH = "MissingPath"
    EMPTY_WALK = "EmptyWalk"
    ENDPOINT_MISMATCH = "EndpointMismatch"
    NON_ADJACENT_STEP = "NonAdjacentStep"
    REPEATED_EDGE = "RepeatedEdge"
    SHARED_EDGE = "SharedEdge"


@dataclass(frozen=True)
class CertificateCheck:
    ok: bool
    reason: CertificateDefect | None = None
    witness: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.ok

    def to_dict(self) -> dict:
        return {"ok": self.ok, "reason": self.reason.value if self.reason else None, "witness": self.witness}


def _reject(reason: CertificateDefect, **witness) -> CertificateCheck:
    return CertificateCheck(False, reason, witness)


def verify_certificate(g: Graph, h: Graph, c: ImmersionCertificate) -> CertificateCheck:
    """Check a certificate in time linear in its total walk length."""
    if len(c.branch) != h.n:
        return _reject(CertificateDefect.BRANCH_LENGTH, expected=h.n, got=len(c.branch))
    images: set[int] = set()
    for a, v in enumerate(c.branch):
        if not 0 <= v < g.n:
            return _reject(CertificateDefect.BRANCH_OUT_OF_RANGE, h_vertex=a, g_vertex=v)
        if v in images:
            return _reject(CertificateDefect.NON_INJECTIVE, h_vertex=a, g_vertex=v)
        images.add(v)

    owner: dict[tuple[int, int], HEdge] = {}
    covered: set[tuple[int, int]] = set()
    for edge, walk in c.paths:
        u, v = edge
        key = (min(u, v), max(u, v))
        if not (0 <= u < h.n and 0 <= v < h.n) or u == v or not h.has_edge(u, v):
            return _reject(CertificateDefect.NOT_AN_H_EDGE, h_edge=[u, v])
        if key in covered:
            return _reject(CertificateDefect.DUPLICATE_PATH, h_edge=[u, v])
        covered.add(key)
        if not walk:
            return _reject(CertificateDefect.EMPTY_WALK, h_edge=[u, v])
        if walk[0] != c.branch[u] or walk[-1] != c.branch[v]:
            return _reject(
                CertificateDefect.ENDPOINT_MISMATCH,
                h_edge=[u, v],
                expected=[c.branch[u], c.branch[v]],
                got=[walk[0], walk[-1]],
            )
        for a, b in zip(walk, walk[1:]):
            if not (0 <= a < g.n and 0 <= b < g.n) or a == b or not g.has_edge(a, b):
                return _reject(CertificateDefect.NON_ADJACENT_STEP, h_edge=[u, v], step=[a, b])
            g_edge = (min(a, b), max(a, b))
            previous = owner.get(g_edge)
            if previous == edge:
                return _reject(CertificateDefect.REPEATED_EDGE, h_edge=[u, v], g_edge=list(g_edge))
            if previous is not None:
                return _reject(
                    CertificateDefect.SHARED_EDGE, h_edges=[list(previous), [u, v]], g_edge=list(g_edge)
                )
            owner[g_edge] = edge
    if len(covered) != h.edge_count:
        missing = next([a, b] for a, b in h.edges() if (a, b) not in covered)
        return _reject(CertificateDefect.MISSING_PATH, h_edge=missing)
    return CertificateCheck(True)


# -- search --------------------------------------------------------------------


@dataclass(frozen=True)
class SearchBudget:
    max_nodes: int | None = 5_000_000
    max_ms: int | None = 120_000

    def doubled(self) -> SearchBudget:
        return SearchBudget(
            None if self.max_nodes is None else self.max_nodes * 2,
            None if self.max_ms is None else self.max_ms * 2,
        )


class _Meter:
    def __init__(self, budget: SearchBudget | None):
        budget = budget or SearchBudget()
        self.max_nodes = budget.max_nodes
        self.deadline = None if budget.max_ms is None else time.monotonic() + budget.max_ms / 1000
        self.nodes = 0

    def tick(self) -> None:
        self.nodes += 1
        if self.max_nodes is not None and self.nodes > self.max_nodes:
            raise BudgetExceeded(f"node budget of {self.max_nodes} exhausted", self.nodes)
        if self.deadline is not None and not self.nodes & 1023 and time.monotonic() > self.deadline:
            raise BudgetExceeded("wall-clock budget exhausted", self.nodes)


def _distances_to(free: list[int], target: int, n: int) -> list[int]:
    dist = [n] * n
    dist[target] = 0
    frontier = 1 << target
    seen = frontier
    level = 0
    while frontier:
        level += 1
        nxt = 0
        for v in bits_of(frontier):
            nxt |= free[v]
        nxt &= ~seen
        for v in bits_of(nxt):
            dist[v] = level
        seen |= nxt
        frontier = nxt
    return dist


def _shortest_path_count(free: list[int], s: int, t: int, n: int, cap: int = 1 << 16) -> tuple[int, int]:
    """Return (distance, number of shortest paths capped at ``cap``); distance n if unreachable."""
    counts = {s: 1}
    frontier = 1 << s
    seen = frontier
    level = 0
    while frontier and not seen >> t & 1:
        level += 1
        nxt_counts: dict[int, int] = {}
        for v in bits_of(frontier):
            for w in bits_of(free[v] & ~seen):
                nxt_counts[w] = min(cap, nxt_counts.get(w, 0) + counts[v])
        frontier = 0
        for w in nxt_counts:
            frontier |= 1 << w
        seen |= frontier
        counts = nxt_counts
    if not seen >> t & 1:
        return n, 0
    return level, counts.get(t, 1)


def _simple_paths(free: list[int], s: int, t: int, n: int, meter: _Meter) -> Iterator[tuple[int, ...]]:
    """Simple s-t paths in the free graph, shortest first, ties in lexicographic order."""
    snapshot = tuple(free)
    dist = _distances_to(list(snapshot), t, n)
    if dist[s] >= n:
        return

    def walk(u: int, remaining: int, visited: int, trail: list[int]) -> Iterator[tuple[int, ...]]:
        meter.tick()
        if remaining == 0:
            if u == t:
                yield tuple(trail)
            return
        if u == t:
            return
        for w in bits_of(snapshot[u] & ~visited):
            if dist[w] <= remaining - 1:
                trail.append(w)
                yield from walk(w, remaining - 1, visited | 1 << w, trail)
                trail.pop()

    for length in range(dist[s], n):
        yield from walk(s, length, 1 << s, [s])


def _edge_disjoint_paths(free, s: int, sinks: int, limit: int) -> int:
    """Edge-disjoint paths from ``s`` ending at distinct vertices of ``sinks``, counted up to ``limit``.

    Unit-capacity augmenting paths over net flows; a sink absorbs one path.
    """
    flow: dict[tuple[int, int], int] = {}
    absorbed = 0
    count = 0
    while count < limit:
        parent = {s: -1}
        frontier = [s]
        end = -1
        while frontier and end < 0:
            nxt = []
            for a in frontier:
                for b in bits_of(free[a]):
                    if b in parent or flow.get((a, b), 0) >= 1:
                        continue
                    parent[b] = a
                    if sinks >> b & 1 and not absorbed >> b & 1:
                        end = b
                        break
                    nxt.append(b)
                if end >= 0:
                    break
            frontier = nxt
        if end < 0:
            break
        absorbed |= 1 << end
        b = end
        while parent[b] >= 0:
            a = parent[b]
            flow[(a, b)] = flow.get((a, b), 0) + 1
            flow[(b, a)] = flow.get((b, a), 0) - 1
            b = a
        count += 1
    return count


@dataclass
class _Demand:
    edge: HEdge
    s: int
    t: int


def _pack_paths(g: Graph, demands: list[_Demand], meter: _Meter) -> dict[HEdge, tuple[int, ...]] | None:
    """Exact edge-disjoint routing of all demands, or None if impossible."""
    n = g.n
    free = list(g.rows)
    routes: dict[HEdge, tuple[int, ...]] = {}

    def take(walk: tuple[int, ...]) -> None:
        for a, b in zip(walk, walk[1:]):
            free[a] &= ~(1 << b)
            free[b] &= ~(1 << a)

    def give(walk: tuple[int, ...]) -> None:
        for a, b in zip(walk, walk[1:]):
            free[a] |= 1 << b
            free[b] |= 1 << a

    # An adjacent branch pair can always be routed along its own edge: any
    # solution that routes it elsewhere swaps walks with whoever uses the edge.
    pending = []
    for demand in demands:
        if g.has_edge(demand.s, demand.t):
            walk = (demand.s, demand.t)
            take(walk)
            routes[demand.edge] = walk
        else:
            pending.append(demand)

    def solve(remaining: list[_Demand]) -> bool:
        meter.tick()
        if not remaining:
            return True
        need: dict[int, int] = {}
        partners: dict[int, int] = {}
        for d in remaining:
            need[d.s] = need.get(d.s, 0) + 1
            need[d.t] = need.get(d.t, 0) + 1
            partners[d.s] = partners.get(d.s, 0) | 1 << d.t
            partners[d.t] = partners.get(d.t, 0) | 1 << d.s
        if any(free[v].bit_count() < k for v, k in need.items()):
            return False
        # Cut bound: a terminal must still reach its partners by edge-disjoint paths.
        for v, k in need.items():
            if k > 1 and _edge_disjoint_paths(free, v, partners[v], k) < k:
                return False
        chosen = None
        chosen_key = None
        total = 0
        for index, d in enumerate(remaining):
            dist, count = _shortest_path_count(free, d.s, d.t, n)
            if dist >= n:
                return False
            total += dist
            key = (count, dist, index)
            if chosen_key is None or key < chosen_key:
                chosen, chosen_key = d, key
        free_edges = sum(row.bit_count() for row in free) // 2
        if total > free_edges:
            return False
        rest = [d for d in remaining if d is not chosen]
        for walk in _simple_paths(free, chosen.s, chosen.t, n, meter):
            take(walk)
            routes[chosen.edge] = walk
            if solve(rest):
                return True
            del routes[chosen.edge]
            give(walk)
        return False

    if solve(pending):
        return routes
    return None


def _twin_predecessors(h: Graph, order: list[int]) -> dict[int, int]:
    # Twin target vertices are interchangeable, so their images are kept increasing.
    previous: dict[int, int] = {}
    for pos, a in enumerate(order):
        for b in reversed(order[:pos]):
            if (h.rows[a] & ~(1 << b)) == (h.rows[b] & ~(1 << a)):
                previous[a] = b
                break
    return previous


def find_immersion(g: Graph, h: Graph, budget: SearchBudget | None = None) -> ImmersionCertificate | None:
    """Exact search for an immersion of ``h`` in ``g``.

    Returns a certificate, or None when no immersion exists. Raises
    BudgetExceeded when the budget runs out before the question is settled.
    """
    if h.n > g.n or h.edge_count > g.edge_count:
        return None
    meter = _Meter(budget)
    order = sorted(range(h.n), key=lambda a: (-h.degree(a), a))
    twin_prev = _twin_predecessors(h, order)
    g_degrees = g.degrees()
    component = g.component_ids()
    h_edges = h.edges()
    image = [-1] * h.n

    def assign(pos: int, used: int) -> dict[HEdge, tuple[int, ...]] | None:
        meter.tick()
        if pos == len(order):
            demands = [_Demand((a, b), image[a], image[b]) for a, b in h_edges]
            return _pack_paths(g, demands, meter)
        a = order[pos]
        need = h.degree(a)
        floor = image[twin_prev[a]] + 1 if a in twin_prev else 0
        placed_nbrs = [image[b] for b in bits_of(h.rows[a]) if image[b] >= 0]
        for v in range(floor, g.n):
            if used >> v & 1 or g_degrees[v] < need:
                continue
            if any(component[w] != component[v] for w in placed_nbrs):
                continue
            if len(placed_nbrs) > 1 and _edge_disjoint_paths(
                g.rows, v, mask_of(placed_nbrs), len(placed_nbrs)
            ) < len(placed_nbrs):
                continue
            image[a] = v
            routes = assign(pos + 1, used | 1 << v)
            if routes is not None:
                return routes
            image[a] = -1
        return None

    routes = assign(0, 0)
    if routes is None:
        logger.debug("no immersion of a %d-vertex target after %d nodes", h.n, meter.nodes)
        return None
    return ImmersionCertificate(tuple(image), tuple((edge, routes[edge]) for edge in h_edges))


def find_kst_immersion(g: Graph, s: int, t: int, budget: SearchBudget | None = None) -> ImmersionCertificate | None:
    """Immersion of K_{s,t}; the s-side takes target labels 0..s-1."""
    h = make_target(TargetSpec.complete_bipartite(s, t))
    if s + t > g.n:
        return None
    return find_immersion(g, h, budget)
