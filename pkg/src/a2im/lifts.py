"""Edge lifts, deletions, and the rewriting form of the immersion relation."""

from __future__ import annotations

import json
import logging
from collections import deque
from dataclasses import dataclass
from typing import Union

from .canon import canonical_form
from .graph import Graph, bits_of, subgraph_embedding

logger = logging.getLogger(__name__)


class LiftError(ValueError):
    code = "lift"


class MissingEdge(LiftError):
    code = "missing_edge"


class EqualEndpoints(LiftError):
    code = "equal_endpoints"


class ExistingChord(LiftError):
    code = "existing_chord"


class VertexDeleted(LiftError):
    code = "vertex_deleted"


class SequenceError(ValueError):
    code = "sequence"

    def __init__(self, index: int, cause: LiftError):
        super().__init__(f"step {index} is not applicable: {cause}")
        self.index = index
        self.cause = cause


@dataclass(frozen=True)
class Lift:
    u: int
    v: int
    w: int

    def to_dict(self) -> dict:
        return {"op": "lift", "u": self.u, "v": self.v, "w": self.w}


@dataclass(frozen=True)
class DeleteVertex:
    v: int

    def to_dict(self) -> dict:
        return {"op": "delete_vertex", "v": self.v}


@dataclass(frozen=True)
class DeleteEdge:
    u: int
    v: int

    def to_dict(self) -> dict:
        return {"op": "delete_edge", "u": self.u, "v": self.v}


Step = Union[Lift, DeleteVertex, DeleteEdge]
LiftSequence = list[Step]


def step_from_dict(data: dict) -> Step:
    op = data.get("op")
    if op == "lift":
        return Lift(int(data["u"]), int(data["v"]), int(data["w"]))
    if op == "delete_vertex":
        return DeleteVertex(int(data["v"]))
    if op == "delete_edge":
        return DeleteEdge(int(data["u"]), int(data["v"]))
    raise ValueError(f"unknown lift-sequence step {op!r}")


def sequence_to_json(steps: LiftSequence) -> str:
    return json.dumps([step.to_dict() for step in steps])


def sequence_from_json(text: str) -> LiftSequence:
    return [step_from_dict(item) for item in json.loads(text)]


def _require_edge(g: Graph, a: int, b: int) -> None:
    if a == b or not (0 <= a < g.n and 0 <= b < g.n) or not g.has_edge(a, b):
        raise MissingEdge(f"edge {a}{b} is not present")


def lift(g: Graph, u: int, v: int, w: int) -> Graph:
    """Replace the edges uv and vw by uw."""
    if u == w:
        raise EqualEndpoints(f"lift endpoints coincide at {u}")
    _require_edge(g, u, v)
    _require_edge(g, v, w)
    if g.has_edge(u, w):
        raise ExistingChord(f"edge {u}{w} already present")
    rows = list(g.rows)
    rows[u] = rows[u] & ~(1 << v) | (1 << w)
    rows[w] = rows[w] & ~(1 << v) | (1 << u)
    rows[v] &= ~((1 << u) | (1 << w))
    return Graph(g.n, tuple(rows))


def _apply_step(g: Graph, alive: int, step: Step) -> tuple[Graph, int]:
    touched = (step.u, step.v, step.w) if isinstance(step, Lift) else (
        (step.v,) if isinstance(step, DeleteVertex) else (step.u, step.v)
    )
    for x in touched:
        if not (0 <= x < g.n):
            raise MissingEdge(f"vertex {x} outside 0..{g.n - 1}")
        if not alive >> x & 1:
            raise VertexDeleted(f"vertex {x} was deleted earlier")
    if isinstance(step, Lift):
        return lift(g, step.u, step.v, step.w), alive
    if isinstance(step, DeleteEdge):
        _require_edge(g, step.u, step.v)
        return g.without_edge(step.u, step.v), alive
    rows = list(g.rows)
    for x in bits_of(rows[step.v]):
        rows[x] &= ~(1 << step.v)
    rows[step.v] = 0
    return Graph(g.n, tuple(rows)), alive & ~(1 << step.v)


def apply_sequence(g: Graph, steps: LiftSequence) -> tuple[Graph, dict[int, int]]:
    """Fold ``steps`` over ``g``; vertices are named by their labels in ``g``.

    Returns the final graph, relabelled densely over the surviving vertices,
    and the map from surviving input labels to the new labels.
    """
    alive = g.vertex_mask
    current = g
    for index, step in enumerate(steps):
        try:
            current, alive = _apply_step(current, alive, step)
        except LiftError as exc:
            raise SequenceError(index, exc) from exc
    return current.without_vertices(v for v in range(g.n) if not alive >> v & 1)


@dataclass(frozen=True)
class RewritingResult:
    sequence: LiftSequence | None
    exhausted: bool
    states: int

    @property
    def found(self) -> bool:
        return self.sequence is not None


def _dominates(degrees: list[int], target: list[int]) -> bool:
    ranked = sorted(degrees, reverse=True)
    return all(have >= need for have, need in zip(ranked, target))


def _finishing_steps(current: Graph, h: Graph, image: tuple[int, ...]) -> LiftSequence:
    preimage = {v: a for a, v in enumerate(image)}
    steps: LiftSequence = []
    for a, b in current.edges():
        if a in preimage and b in preimage and not h.has_edge(preimage[a], preimage[b]):
            steps.append(DeleteEdge(a, b))
    steps.extend(DeleteVertex(v) for v in range(current.n) if v not in preimage)
    return steps


def immersion_by_rewriting(g: Graph, h: Graph, budget: int | None = None) -> RewritingResult:
    """Breadth-first search over lift sequences for an immersion of ``h`` in ``g``.

    Only lifts are explored: a lift blocked by an existing chord is dominated
    by deleting the two edges instead, and deletions never enable anything
    that subgraph containment does not already cover. Intermediate graphs are
    memoised by canonical form. ``budget`` bounds the number of lifts; a
    negative answer is final only when ``exhausted`` is true.
    """
    if h.n > g.n or h.edge_count > g.edge_count:
        return RewritingResult(None, True, 0)
    depth_limit = g.edge_count - h.edge_count
    if budget is not None:
        depth_limit = min(depth_limit, budget)
    target_degrees = sorted(h.degrees(), reverse=True)

    exhausted = True
    seen = {canonical_form(g)}
    queue: deque[tuple[Graph, tuple[Lift, ...]]] = deque([(g, ())])
    while queue:
        current, steps = queue.popleft()
        image = subgraph_embedding(current, h)
        if image is not None:
            logger.debug("rewriting found an immersion after %d lifts (%d states)", len(steps), len(seen))
            return RewritingResult(list(steps) + _finishing_steps(current, h, image), True, len(seen))
        moves = _lift_moves(current)
        if len(steps) >= depth_limit:
            if moves and current.edge_count > h.edge_count:
                exhausted = False
            continue
        for u, v, w in moves:
            child = lift(current, u, v, w)
            if child.edge_count < h.edge_count or not _dominates(child.degrees(), target_degrees):
                continue
            key = canonical_form(child)
            if key in seen:
                continue
            seen.add(key)
            queue.append((child, steps + (Lift(u, v, w),)))
    return RewritingResult(None, exhausted, len(seen))


def _lift_moves(g: Graph) -> list[tuple[int, int, int]]:
    moves = []
    for v in range(g.n):
        nbrs = sorted(bits_of(g.rows[v]))
        for i, u in enumerate(nbrs):
            for w in nbrs[i + 1 :]:
                if not g.has_edge(u, w):
                    moves.append((u, v, w))
    return moves
