"""Immutable simple graphs stored as adjacency bit rows, plus the basic invariants."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Iterator

import networkx as nx

MAX_VERTICES = 62

VertexSet = frozenset[int]


class GraphError(ValueError):
    code = "graph"


def bits_of(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(vertices: Iterable[int]) -> int:
    mask = 0
    for v in vertices:
        mask |= 1 << v
    return mask


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices 0..n-1.

    ``rows[u]`` is a bit mask of the neighbours of ``u``. Instances are never
    mutated; every "edit" returns a new graph.
    """

    n: int
    rows: tuple[int, ...]
    edge_count: int = field(init=False, compare=False)

    def __post_init__(self):
        if self.n < 0 or self.n > MAX_VERTICES:
            raise GraphError(f"vertex count {self.n} outside 0..{MAX_VERTICES}")
        if len(self.rows) != self.n:
            raise GraphError(f"expected {self.n} adjacency rows, got {len(self.rows)}")
        full = (1 << self.n) - 1
        total = 0
        for u, row in enumerate(self.rows):
            if row & ~full:
                raise GraphError(f"row {u} references a vertex outside 0..{self.n - 1}")
            if row >> u & 1:
                raise GraphError(f"self-loop at vertex {u}")
            for v in bits_of(row):
                if not self.rows[v] >> u & 1:
                    raise GraphError(f"asymmetric adjacency between {u} and {v}")
            total += row.bit_count()
        object.__setattr__(self, "edge_count", total // 2)

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> Graph:
        rows = [0] * n
        for u, v in edges:
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) outside 0..{n - 1}")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return cls(n, tuple(rows))

    @classmethod
    def empty(cls, n: int) -> Graph:
        return cls(n, (0,) * n)

    @classmethod
    def complete(cls, n: int) -> Graph:
        full = (1 << n) - 1
        return cls(n, tuple(full & ~(1 << u) for u in range(n)))

    @classmethod
    def cycle(cls, n: int) -> Graph:
        if n < 3:
            raise GraphError("a cycle needs at least 3 vertices")
        return cls.from_edges(n, ((i, (i + 1) % n) for i in range(n)))

    @classmethod
    def path(cls, n: int) -> Graph:
        return cls.from_edges(n, ((i, i + 1) for i in range(n - 1)))

    @classmethod
    def petersen(cls) -> Graph:
        outer = [(i, (i + 1) % 5) for i in range(5)]
        spokes = [(i, i + 5) for i in range(5)]
        inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
        return cls.from_edges(10, outer + spokes + inner)

    # -- queries ------------------------------------------------------------

    @property
    def vertex_mask(self) -> int:
        return (1 << self.n) - 1

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.rows[u] >> v & 1)

    def degree(self, u: int) -> int:
        return self.rows[u].bit_count()

    def neighbors(self, u: int) -> VertexSet:
        return frozenset(bits_of(self.rows[u]))

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in bits_of(self.rows[u] >> (u + 1) << (u + 1))]

    def degrees(self) -> list[int]:
        return [row.bit_count() for row in self.rows]

    def max_degree(self) -> int:
        return max(self.degrees(), default=0)

    def component_ids(self) -> list[int]:
        comp = [-1] * self.n
        label = 0
        for start in range(self.n):
            if comp[start] >= 0:
                continue
            frontier = 1 << start
            seen = frontier
            while frontier:
                nxt = 0
                for v in bits_of(frontier):
                    nxt |= self.rows[v]
                frontier = nxt & ~seen
                seen |= nxt
            for v in bits_of(seen):
                comp[v] = label
            label += 1
        return comp

    # -- derived graphs -----------------------------------------------------

    def with_edge(self, u: int, v: int) -> Graph:
        rows = list(self.rows)
        rows[u] |= 1 << v
        rows[v] |= 1 << u
        return Graph(self.n, tuple(rows))

    def without_edge(self, u: int, v: int) -> Graph:
        rows = list(self.rows)
        rows[u] &= ~(1 << v)
        rows[v] &= ~(1 << u)
        return Graph(self.n, tuple(rows))

    def relabel(self, perm: list[int] | tuple[int, ...]) -> Graph:
        """Return the graph whose vertex ``perm[u]`` plays the role of ``u``."""
        rows = [0] * self.n
        for u in range(self.n):
            rows[perm[u]] = mask_of(perm[v] for v in bits_of(self.rows[u]))
        return Graph(self.n, tuple(rows))

    def induced(self, vertices: Iterable[int]) -> tuple[Graph, dict[int, int]]:
        keep = sorted(set(vertices))
        index = {old: new for new, old in enumerate(keep)}
        rows = tuple(mask_of(index[w] for w in bits_of(self.rows[old]) if w in index) for old in keep)
        return Graph(len(keep), rows), index

    def without_vertices(self, vertices: Iterable[int]) -> tuple[Graph, dict[int, int]]:
        """Delete ``vertices``; the survivors are relabelled densely in order.

        Returns the new graph and the old->new vertex map.
        """
        drop = set(vertices)
        return self.induced(v for v in range(self.n) if v not in drop)

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(self.n))
        graph.add_edges_from(self.edges())
        return graph

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={self.edges()})"


def complement(g: Graph) -> Graph:
    full = g.vertex_mask
    return Graph(g.n, tuple(full & ~row & ~(1 << u) for u, row in enumerate(g.rows)))


def common_neighbors(g: Graph, u: int, v: int) -> VertexSet:
    if u == v:
        raise GraphError(f"common_neighbors needs two distinct vertices, got {u} twice")
    return frozenset(bits_of(g.rows[u] & g.rows[v]))


def _colour_classes(rows: tuple[int, ...], candidates: int) -> tuple[list[int], list[int]]:
    # Greedy sequential colouring; bounds[i] is the colour of order[i].
    order: list[int] = []
    bounds: list[int] = []
    uncoloured = candidates
    colour = 0
    while uncoloured:
        colour += 1
        available = uncoloured
        while available:
            low = available & -available
            v = low.bit_length() - 1
            available &= ~rows[v] & ~low
            uncoloured &= ~low
            order.append(v)
            bounds.append(colour)
    return order, bounds


def clique_number(g: Graph) -> int:
    """Exact maximum clique size by branch and bound with a colouring bound."""
    rows = g.rows
    best = 0

    def expand(size: int, candidates: int) -> None:
        nonlocal best
        order, bounds = _colour_classes(rows, candidates)
        for v, bound in zip(reversed(order), reversed(bounds)):
            if size + bound <= best:
                return
            narrowed = candidates & rows[v]
            if narrowed:
                expand(size + 1, narrowed)
            elif size + 1 > best:
                best = size + 1
            candidates &= ~(1 << v)

    if g.n:
        expand(0, g.vertex_mask)
    return best


def independence_number(g: Graph) -> int:
    return clique_number(complement(g))


def has_induced_c4(g: Graph) -> bool:
    for u, v in combinations(range(g.n), 2):
        if g.has_edge(u, v):
            continue
        common = g.rows[u] & g.rows[v]
        for a in bits_of(common):
            if common & ~g.rows[a] & ~(1 << a):
                return True
    return False


def max_matching(g: Graph) -> int:
    # Edmonds' blossom algorithm; unit weights with maxcardinality gives a maximum matching.
    if g.edge_count == 0:
        return 0
    return len(nx.max_weight_matching(g.to_networkx(), maxcardinality=True))


def chromatic_number_alpha2(g: Graph) -> int:
    """χ(g) for graphs with α(g) ≤ 2: colour classes are cliques of size at most two."""
    alpha = independence_number(g)
    if alpha > 2:
        raise GraphError(f"chromatic_number_alpha2 needs independence number <= 2, got {alpha}")
    return g.n - max_matching(complement(g))


def is_alpha_critical(g: Graph) -> bool:
    alpha = independence_number(g)
    return all(independence_number(g.without_edge(u, v)) > alpha for u, v in g.edges())


def subgraph_embedding(g: Graph, h: Graph) -> tuple[int, ...] | None:
    """Injective map V(h) -> V(g) sending edges to edges, or None."""
    if h.n > g.n or h.edge_count > g.edge_count:
        return None
    order = sorted(range(h.n), key=lambda a: (-h.degree(a), a))
    g_degrees = g.degrees()
    image = [-1] * h.n

    def extend(pos: int, used: int) -> bool:
        if pos == len(order):
            return True
        a = order[pos]
        need = h.degree(a)
        mapped_nbrs = [image[b] for b in bits_of(h.rows[a]) if image[b] >= 0]
        for v in range(g.n):
            if used >> v & 1 or g_degrees[v] < need:
                continue
            if any(not g.rows[v] >> w & 1 for w in mapped_nbrs):
                continue
            image[a] = v
            if extend(pos + 1, used | 1 << v):
                return True
            image[a] = -1
        return False

    if extend(0, 0):
        return tuple(image)
    return None
