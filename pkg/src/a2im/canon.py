"""Canonical labelling by partition refinement and individualisation.

The search tree branches on the first non-singleton cell of an equitable
ordered partition. Twins (vertices whose neighbourhoods agree outside each
other) are interchangeable by an automorphism fixing everything else, so only
one twin per class is individualised. The canonical certificate is the largest
relabelled row tuple over the leaves.
"""

from __future__ import annotations

from .graph import Graph, bits_of, mask_of

Certificate = tuple[int, ...]


def _refine(rows: tuple[int, ...], cells: list[list[int]]) -> list[list[int]]:
    while True:
        for splitter in cells:
            smask = mask_of(splitter)
            refined: list[list[int]] = []
            split = False
            for cell in cells:
                if len(cell) == 1:
                    refined.append(cell)
                    continue
                groups: dict[int, list[int]] = {}
                for v in cell:
                    groups.setdefault((rows[v] & smask).bit_count(), []).append(v)
                if len(groups) == 1:
                    refined.append(cell)
                    continue
                split = True
                for key in sorted(groups):
                    refined.append(groups[key])
            if split:
                cells = refined
                break
        else:
            return cells


def _twin_representatives(rows: tuple[int, ...], cell: list[int]) -> list[int]:
    kept: list[int] = []
    for v in cell:
        if not any((rows[u] & ~(1 << v)) == (rows[v] & ~(1 << u)) for u in kept):
            kept.append(v)
    return kept


def _certificate(rows: tuple[int, ...], order: list[int]) -> Certificate:
    position = {v: i for i, v in enumerate(order)}
    return tuple(mask_of(position[w] for w in bits_of(rows[v])) for v in order)


def canonical_labeling(g: Graph) -> tuple[Certificate, tuple[int, ...]]:
    """Return ``(certificate, order)``; ``order[i]`` is the vertex placed at position i."""
    rows = g.rows
    best_cert: Certificate | None = None
    best_order: list[int] = []

    def search(cells: list[list[int]]) -> None:
        nonlocal best_cert, best_order
        cells = _refine(rows, cells)
        target = next((i for i, cell in enumerate(cells) if len(cell) > 1), None)
        if target is None:
            order = [cell[0] for cell in cells]
            cert = _certificate(rows, order)
            if best_cert is None or cert > best_cert:
                best_cert = cert
                best_order = order
            return
        cell = cells[target]
        for v in _twin_representatives(rows, cell):
            rest = [w for w in cell if w != v]
            search(cells[:target] + [[v], rest] + cells[target + 1 :])

    if g.n == 0:
        return (), ()
    initial: dict[int, list[int]] = {}
    for v in range(g.n):
        initial.setdefault(g.degree(v), []).append(v)
    search([initial[d] for d in sorted(initial)])
    return best_cert, tuple(best_order)


def canonical_form(g: Graph) -> tuple[int, Certificate]:
    return g.n, canonical_labeling(g)[0]


def canonical_graph(g: Graph) -> Graph:
    _, order = canonical_labeling(g)
    perm = [0] * g.n
    for position, v in enumerate(order):
        perm[v] = position
    return g.relabel(perm)


def is_isomorphic(g: Graph, h: Graph) -> bool:
    if g.n != h.n or g.edge_count != h.edge_count or sorted(g.degrees()) != sorted(h.degrees()):
        return False
    return canonical_form(g) == canonical_form(h)
