"""The verification universe: graphs with independence number at most two.

α(G) ≤ 2 exactly when the complement of G is triangle-free, so the universe is
produced by enumerating triangle-free graphs up to isomorphism and taking
complements.

Enumeration is canonical augmentation. A child on n+1 vertices is formed from
a parent by adding vertex n; it is kept iff deleting vertex n gives the same
isomorphism class as deleting the child's canonical deletion vertex (the
canonically-first vertex of maximum degree). Equal deletion classes force
equal edge counts, so the new vertex must itself have maximum degree, which
is checked before any canonical labelling. Isomorphic children of the same
parent are merged by their canonical form.
"""

from __future__ import annotations

import logging
import random
from itertools import combinations
from typing import Callable, Iterator

from .canon import canonical_form, canonical_labeling
from .graph import Graph, bits_of, complement, independence_number

logger = logging.getLogger(__name__)

DEFAULT_MAX_N = 10
ALL_GRAPHS_MAX_N = 7

Extensions = Callable[[Graph], Iterator[int]]


class EnumerationRangeError(ValueError):
    code = "enumeration_range"


def _check_range(n: int, max_n: int) -> None:
    if not 1 <= n <= max_n:
        raise EnumerationRangeError(f"n={n} outside the supported range 1..{max_n}")


def _all_subsets(g: Graph) -> Iterator[int]:
    yield from range(1 << g.n)


def _independent_subsets(g: Graph) -> Iterator[int]:
    # Every independent set of g exactly once, the empty set first.
    def extend(start: int, chosen: int, forbidden: int) -> Iterator[int]:
        yield chosen
        for v in range(start, g.n):
            if not forbidden >> v & 1:
                yield from extend(v + 1, chosen | 1 << v, forbidden | g.rows[v])

    yield from extend(0, 0, 0)


def _children(parent: Graph, extensions: Extensions) -> Iterator[Graph]:
    n = parent.n
    parent_key = canonical_form(parent)
    parent_degrees = parent.degrees()
    seen = set()
    for nbhd in extensions(parent):
        size = nbhd.bit_count()
        if any(parent_degrees[v] + (nbhd >> v & 1) > size for v in range(n)):
            continue
        rows = list(parent.rows)
        for v in bits_of(nbhd):
            rows[v] |= 1 << n
        rows.append(nbhd)
        child = Graph(n + 1, tuple(rows))
        cert, order = canonical_labeling(child)
        deletion = next(v for v in order if child.degree(v) == size)
        if deletion != n:
            reduced, _ = child.without_vertices([deletion])
            if canonical_form(reduced) != parent_key:
                continue
        if cert in seen:
            continue
        seen.add(cert)
        yield Graph(n + 1, cert)


def _orderly(n: int, extensions: Extensions) -> Iterator[Graph]:
    level = [Graph.empty(1)]
    for size in range(2, n + 1):
        level = [child for parent in level for child in _children(parent, extensions)]
        logger.debug("augmentation level %d: %d classes", size, len(level))
    yield from level


def enumerate_graphs(n: int, max_n: int = ALL_GRAPHS_MAX_N) -> Iterator[Graph]:
    """All graphs on n vertices, one per isomorphism class."""
    _check_range(n, max_n)
    yield from _orderly(n, _all_subsets)


def enumerate_triangle_free(n: int, max_n: int = DEFAULT_MAX_N) -> Iterator[Graph]:
    """Triangle-free graphs on n vertices, one per isomorphism class, in a fixed order."""
    _check_range(n, max_n)
    yield from _orderly(n, _independent_subsets)


def enumerate_alpha2(n: int, exact: bool = True, max_n: int = DEFAULT_MAX_N) -> Iterator[Graph]:
    """Graphs with α ≤ 2 on n vertices; with ``exact`` only those with α = 2."""
    for tf in enumerate_triangle_free(n, max_n):
        if exact and tf.edge_count == 0:
            continue
        yield complement(tf)


def alpha_critical_reduce(g: Graph) -> Graph:
    """Delete edges in lexicographic order whenever α is unchanged.

    One pass suffices: an edge that is critical stays critical after later
    deletions, because deleting edges never lowers α.
    """
    alpha = independence_number(g)
    current = g
    for u, v in g.edges():
        candidate = current.without_edge(u, v)
        if independence_number(candidate) == alpha:
            current = candidate
    return current


def random_triangle_free(n: int, seed: int, density: float | None = None) -> Graph:
    rng = random.Random(f"{n}:{seed}")
    pairs = list(combinations(range(n), 2))
    rng.shuffle(pairs)
    limit = len(pairs) if density is None else int(density * len(pairs))
    rows = [0] * n
    edges = 0
    for u, v in pairs:
        if edges >= limit:
            break
        if rows[u] & rows[v]:
            continue
        rows[u] |= 1 << v
        rows[v] |= 1 << u
        edges += 1
    return Graph(n, tuple(rows))


def random_alpha2(n: int, seed: int, density: float | None = None) -> Graph:
    """Complement of a random triangle-free graph, grown until maximal or ``density``."""
    if n < 1:
        raise EnumerationRangeError(f"random_alpha2 needs n >= 1, got {n}")
    return complement(random_triangle_free(n, seed, density))
