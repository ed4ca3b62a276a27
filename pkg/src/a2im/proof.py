"""Executable form of the minimal-counterexample argument for K_{ℓ,⌈n/2⌉-ℓ} immersions.

For non-adjacent x, y in a graph with α = 2 the vertex set splits as
C = N(x) ∩ N(y), X = V - N[y] and Y = V - N[x]; X and Y are cliques. For
a ∈ C, X'_a and X''_a are the members of X adjacent and non-adjacent to a
(Y'_a, Y''_a likewise), and X''_a is complete to Y''_a.

The claims of the argument are exposed as predicates, the two explicit
immersion constructions as certificate builders, and ``audit_proof`` walks
the claim chain on a concrete graph.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations

from .graph import Graph, VertexSet, bits_of, common_neighbors, has_induced_c4, independence_number, mask_of
from .immersion import (
    ImmersionCertificate,
    SearchBudget,
    TargetSpec,
    find_kst_immersion,
    make_target,
    translate_certificate,
    verify_certificate,
)

logger = logging.getLogger(__name__)


class DecompositionError(ValueError):
    code = "decomposition"


class PremiseViolated(ValueError):
    code = "premise_violated"

    def __init__(self, name: str, message: str):
        super().__init__(f"{name}: {message}")
        self.name = name


def half_ceil(n: int) -> int:
    return (n + 1) // 2


# -- decomposition -------------------------------------------------------------


@dataclass(frozen=True)
class Decomposition:
    x: int
    y: int
    C: VertexSet
    X: VertexSet
    Y: VertexSet
    Xp: dict[int, VertexSet]
    Xpp: dict[int, VertexSet]
    Yp: dict[int, VertexSet]
    Ypp: dict[int, VertexSet]
    XpC: VertexSet
    XppC: VertexSet
    YpC: VertexSet
    YppC: VertexSet

    def mirrored(self) -> Decomposition:
        """The same split with the roles of x and y exchanged."""
        return Decomposition(
            self.y, self.x, self.C, self.Y, self.X,
            self.Yp, self.Ypp, self.Xp, self.Xpp,
            self.YpC, self.YppC, self.XpC, self.XppC,
        )

    def to_dict(self) -> dict:
        def listed(s):
            return sorted(s)

        return {
            "x": self.x,
            "y": self.y,
            "C": listed(self.C),
            "X": listed(self.X),
            "Y": listed(self.Y),
            "per_a": {
                str(a): {
                    "Xp": listed(self.Xp[a]),
                    "Xpp": listed(self.Xpp[a]),
                    "Yp": listed(self.Yp[a]),
                    "Ypp": listed(self.Ypp[a]),
                }
                for a in sorted(self.C)
            },
            "XpC": listed(self.XpC),
            "XppC": listed(self.XppC),
            "YpC": listed(self.YpC),
            "YppC": listed(self.YppC),
        }


def _split(g: Graph, x: int, y: int) -> Decomposition:
    rows = g.rows
    c_mask = rows[x] & rows[y]
    x_mask = g.vertex_mask & ~rows[y] & ~(1 << y)
    y_mask = g.vertex_mask & ~rows[x] & ~(1 << x)
    xp, xpp, yp, ypp = {}, {}, {}, {}
    x_common, y_common = x_mask, y_mask
    for a in bits_of(c_mask):
        xp[a] = frozenset(bits_of(x_mask & rows[a]))
        xpp[a] = frozenset(bits_of(x_mask & ~rows[a]))
        yp[a] = frozenset(bits_of(y_mask & rows[a]))
        ypp[a] = frozenset(bits_of(y_mask & ~rows[a]))
        x_common &= rows[a]
        y_common &= rows[a]
    return Decomposition(
        x, y,
        frozenset(bits_of(c_mask)), frozenset(bits_of(x_mask)), frozenset(bits_of(y_mask)),
        xp, xpp, yp, ypp,
        frozenset(bits_of(x_common)), frozenset(bits_of(x_mask & ~x_common)),
        frozenset(bits_of(y_common)), frozenset(bits_of(y_mask & ~y_common)),
    )


def decompose(g: Graph, x: int, y: int, assume_alpha2: bool = False) -> Decomposition:
    """Split V(g) around the non-adjacent pair x, y.

    ``assume_alpha2`` skips the independence-number check for callers that
    already know α(g) = 2.
    """
    if not (0 <= x < g.n and 0 <= y < g.n) or x == y:
        raise DecompositionError(f"x={x}, y={y} must be two distinct vertices of the graph")
    if g.has_edge(x, y):
        raise DecompositionError(f"x={x} and y={y} are adjacent")
    alpha = 2 if assume_alpha2 else independence_number(g)
    if alpha != 2:
        raise DecompositionError(f"decomposition needs independence number 2, got {alpha}")
    return _split(g, x, y)


def non_edges(g: Graph) -> list[tuple[int, int]]:
    return [(u, v) for u, v in combinations(range(g.n), 2) if not g.has_edge(u, v)]


# -- verdicts ------------------------------------------------------------------


class VerdictStatus(str, Enum):
    HOLDS = "holds"
    VIOLATED = "violated"
    NOT_APPLICABLE = "not_applicable"


@dataclass(frozen=True)
class Verdict:
    claim: str
    status: VerdictStatus
    witness: dict = field(default_factory=dict)

    @property
    def violated(self) -> bool:
        return self.status is VerdictStatus.VIOLATED

    def to_dict(self) -> dict:
        return {"claim": self.claim, "status": self.status.value, "witness": self.witness}


def _holds(claim: str) -> Verdict:
    return Verdict(claim, VerdictStatus.HOLDS)


def _violated(claim: str, **witness) -> Verdict:
    return Verdict(claim, VerdictStatus.VIOLATED, witness)


def check_claim2(g: Graph, d: Decomposition) -> Verdict:
    """Every a in C misses some vertex of X and some vertex of Y."""
    for a in sorted(d.C):
        if not d.Xpp[a]:
            return _violated("claim2_nonempty", x=d.x, y=d.y, a=a, empty_side="X")
        if not d.Ypp[a]:
            return _violated("claim2_nonempty", x=d.x, y=d.y, a=a, empty_side="Y")
    return _holds("claim2_nonempty")


# -- common-neighbour extension -------------------------------------------------


@dataclass(frozen=True)
class ExtensionWitness:
    u: int
    v: int
    L: tuple[int, ...]
    A: VertexSet
    B: VertexSet
    Cl: VertexSet
    D: VertexSet
    f: dict[int, int]


def build_extension_witness(g: Graph, u: int, v: int, L: tuple[int, ...]) -> ExtensionWitness:
    l_mask = mask_of(L)
    nu, nv = g.rows[u], g.rows[v]
    A = frozenset(bits_of(l_mask & nu & ~nv))
    B = frozenset(bits_of(l_mask & nu & nv))
    Cl = frozenset(bits_of(l_mask & nv & ~nu))
    D = frozenset(bits_of(nu & nv & ~l_mask))
    # Ascending-order matching of Cl into D.
    f = dict(zip(sorted(Cl), sorted(D)))
    return ExtensionWitness(u, v, tuple(L), A, B, Cl, D, f)


def claim1_extend(
    g: Graph, u: int, v: int, ell: int, inner: ImmersionCertificate
) -> ImmersionCertificate:
    """Grow a K_{ℓ,k} immersion of g - {u, v} into a K_{ℓ,k+1} immersion of g.

    ``inner`` uses the labels of ``g.without_vertices({u, v})``. The new big-side
    vertex is u or v when it is complete to the ℓ-side; otherwise u joins and
    reaches each ℓ-side vertex it misses through a private common neighbour.
    """
    if not (0 <= u < g.n and 0 <= v < g.n) or u == v:
        raise PremiseViolated("distinct_pair", f"u={u}, v={v} must be distinct vertices")
    if g.has_edge(u, v):
        raise PremiseViolated("non_adjacent", f"{u} and {v} are adjacent")
    alpha = independence_number(g)
    if alpha != 2:
        raise PremiseViolated("alpha_two", f"independence number is {alpha}")
    common = len(common_neighbors(g, u, v))
    if common < ell - 1:
        raise PremiseViolated("common_neighbours", f"|N(u)∩N(v)| = {common} < ell-1 = {ell - 1}")
    k = len(inner.branch) - ell
    if ell < 1 or k < 1:
        raise PremiseViolated("inner_shape", f"inner certificate has {len(inner.branch)} branch vertices for ell={ell}")
    reduced, forward = g.without_vertices([u, v])
    check = verify_certificate(reduced, make_target(TargetSpec.complete_bipartite(ell, k)), inner)
    if not check:
        raise PremiseViolated("inner_certificate", f"inner certificate rejected: {check.reason.value}")

    back = {new: old for old, new in forward.items()}
    lifted = translate_certificate(inner, back)
    L = lifted.branch[:ell]
    joiner_index = ell + k
    if all(g.has_edge(u, c) for c in L):
        new_paths = tuple(((i, joiner_index), (c, u)) for i, c in enumerate(L))
        joiner = u
    elif all(g.has_edge(v, c) for c in L):
        new_paths = tuple(((i, joiner_index), (c, v)) for i, c in enumerate(L))
        joiner = v
    else:
        witness = build_extension_witness(g, u, v, L)
        assert witness.A | witness.B | witness.Cl == frozenset(L), "alpha = 2 forces the A/B/Cl partition"
        assert len(witness.D) >= len(witness.Cl), "common-neighbour count forces |D| >= |Cl|"
        paths = []
        for i, c in enumerate(L):
            if c in witness.Cl:
                paths.append(((i, joiner_index), (c, v, witness.f[c], u)))
            else:
                paths.append(((i, joiner_index), (c, u)))
        new_paths = tuple(paths)
        joiner = u
    return ImmersionCertificate(lifted.branch + (joiner,), lifted.paths + new_paths)


# -- non-adjacent pair inside C -------------------------------------------------


@dataclass(frozen=True)
class _Claim4Plan:
    decomposition: Decomposition
    ell: int
    S: tuple[int, ...]
    T: tuple[int, ...]
    X1: tuple[int, ...]
    Y1: tuple[int, ...]
    Z: tuple[int, ...]


def _claim4_plan(g: Graph, d: Decomposition, u: int, v: int, ell: int) -> tuple[list[str], _Claim4Plan | None]:
    failed: list[str] = []
    if u == v or u not in d.C or v not in d.C:
        return ["u_v_in_C"], None
    if g.has_edge(u, v):
        return ["u_v_non_adjacent"], None
    if len(d.Xpp[v]) < len(d.Ypp[v]):
        d = d.mirrored()
    m = half_ceil(g.n) - 1
    big = m + 1 - ell
    if ell < 1 or big < 1:
        return ["target_shape"], None
    if d.Xpp[u] & d.Xpp[v] or d.Ypp[u] & d.Ypp[v]:
        failed.append("disjoint_non_neighbours")
    if len(d.Xpp[u] | d.Xpp[v]) <= ell:
        failed.append("x_side_large")
    y1_size = max(m + 1 - len(d.X), 0)
    if len(d.Ypp[u]) < y1_size:
        failed.append("y_side_large")
    if failed:
        return failed, None

    xu = sorted(d.Xpp[u])
    if len(xu) >= ell:
        S, X1 = tuple(xu[:ell]), ()
    else:
        X1 = tuple(sorted(d.Xpp[v])[: ell - len(xu)])
        S = tuple(sorted(xu + list(X1)))
    Y1 = tuple(sorted(d.Ypp[u])[:y1_size])
    rest = sorted(d.X - frozenset(S))
    T = tuple(rest[: big - len(Y1)]) + Y1
    Z = tuple(sorted(d.Ypp[v]))
    if X1 and Y1:
        if len(Z) <= len(X1):
            failed.append("z_exceeds_x1")
        if len(Z) <= len(Y1):
            failed.append("z_exceeds_y1")
    if len(T) != big:
        failed.append("target_shape")
    if failed:
        return failed, None
    return [], _Claim4Plan(d, ell, S, T, X1, Y1, Z)


def claim4_premises(g: Graph, d: Decomposition, u: int, v: int, ell: int) -> list[str]:
    """Names of the construction premises that fail; empty when it applies."""
    failed, _ = _claim4_plan(g, d, u, v, ell)
    return failed


def claim4_construct(g: Graph, d: Decomposition, u: int, v: int, ell: int) -> ImmersionCertificate:
    """K_{ℓ,m+1-ℓ} immersion from a non-adjacent pair u, v inside C (n = 2m+1).

    The ℓ-side is X''_u plus a low-numbered part X1 of X''_v; the big side is
    the rest of X plus Y1 ⊆ Y''_u. Pairs in X1 × Y1 are joined by
    x_i - z_{(i+j) mod |Z|} - y_j over Z = Y''_v, every other pair by an edge.
    """
    failed, plan = _claim4_plan(g, d, u, v, ell)
    if plan is None:
        raise PremiseViolated(failed[0], f"construction premises fail: {', '.join(failed)}")
    x1_index = {x: i for i, x in enumerate(plan.X1)}
    y1_index = {y: j for j, y in enumerate(plan.Y1)}
    h = make_target(TargetSpec.complete_bipartite(ell, len(plan.T)))
    paths = []
    for a, b in h.edges():
        s, t = plan.S[a], plan.T[b - ell]
        if s in x1_index and t in y1_index:
            z = plan.Z[(x1_index[s] + y1_index[t]) % len(plan.Z)]
            paths.append(((a, b), (s, z, t)))
        else:
            paths.append(((a, b), (s, t)))
    return ImmersionCertificate(plan.S + plan.T, tuple(paths))


def synthetic_claim4_instance(
    xu: int, xv: int, yu: int, yv: int, x_extra: int = 0, y_extra: int = 0
) -> tuple[Graph, int, int, int, int]:
    """Blow-up graph with α = 2 realising a prescribed split around a non-adjacent u, v in C.

    Returns ``(g, x, y, u, v)``; ``decompose(g, x, y)`` has C = {u, v},
    X''_u of size ``xu``, X''_v of size ``xv`` and likewise on the Y side.
    """
    labels = iter(range(2 + xu + xv + x_extra + 2 + yu + yv + y_extra))

    def take(count: int) -> list[int]:
        return [next(labels) for _ in range(count)]

    x, = take(1)
    Xu, Xv, Xe = take(xu), take(xv), take(x_extra)
    y, = take(1)
    Yu, Yv, Ye = take(yu), take(yv), take(y_extra)
    u, v = take(2)
    X = [x] + Xu + Xv + Xe
    Y = [y] + Yu + Yv + Ye
    edges = list(combinations(X, 2)) + list(combinations(Y, 2))
    edges += [(u, w) for w in [x, y] + Xv + Xe + Yv + Ye]
    edges += [(v, w) for w in [x, y] + Xu + Xe + Yu + Ye]
    edges += [(a, b) for a in Xu for b in Yu] + [(a, b) for a in Xv for b in Yv]
    return Graph.from_edges(v + 1, edges), x, y, u, v


# -- audit ---------------------------------------------------------------------


CLAIM_ORDER = (
    "claim0_parity",
    "claim1_common_neighbours",
    "alpha_critical",
    "claim2_nonempty",
    "claim3_bounds",
    "claim4_clique",
    "induced_c4_free",
)


@dataclass(frozen=True)
class ProofAudit:
    ell: int
    n: int
    verdicts: tuple[Verdict, ...]
    fallback: dict | None = None

    @property
    def first_violation(self) -> str | None:
        return next((v.claim for v in self.verdicts if v.violated), None)

    @property
    def anomaly(self) -> bool:
        """Every claim holds and the direct search found nothing: the graph would refute the theorem."""
        return self.first_violation is None and not (self.fallback and self.fallback.get("found"))

    def to_dict(self) -> dict:
        return {
            "ell": self.ell,
            "n": self.n,
            "first_violation": self.first_violation,
            "anomaly": self.anomaly,
            "verdicts": [v.to_dict() for v in self.verdicts],
            "fallback": self.fallback,
        }


def _claim0(g: Graph, ell: int, m: int, decompositions) -> Verdict:
    if g.n % 2 == 0 or g.n < 4 * ell - 1:
        return _violated(CLAIM_ORDER[0], n=g.n, minimum=4 * ell - 1)
    return _holds(CLAIM_ORDER[0])


def _claim1(g: Graph, ell: int, m: int, decompositions) -> Verdict:
    for u, v in non_edges(g):
        common = (g.rows[u] & g.rows[v]).bit_count()
        if common > ell - 2:
            return _violated(CLAIM_ORDER[1], u=u, v=v, common=common, limit=ell - 2)
    return _holds(CLAIM_ORDER[1])


def _alpha_critical(g: Graph, ell: int, m: int, decompositions) -> Verdict:
    for u, v in g.edges():
        if independence_number(g.without_edge(u, v)) == 2:
            return _violated(CLAIM_ORDER[2], edge=[u, v])
    return _holds(CLAIM_ORDER[2])


def _claim2(g: Graph, ell: int, m: int, decompositions) -> Verdict:
    for d in decompositions():
        verdict = check_claim2(g, d)
        if verdict.violated:
            return verdict
    return _holds(CLAIM_ORDER[3])


def _claim3(g: Graph, ell: int, m: int, decompositions) -> Verdict:
    for d in decompositions():
        for a in sorted(d.C):
            checks = (
                ("|X'_a| <= ell-2", len(d.Xp[a]), ell - 2, len(d.Xp[a]) <= ell - 2),
                ("|Y'_a| <= ell-2", len(d.Yp[a]), ell - 2, len(d.Yp[a]) <= ell - 2),
                ("|X''_a| >= m+4-|Y|", len(d.Xpp[a]), m + 4 - len(d.Y), len(d.Xpp[a]) >= m + 4 - len(d.Y)),
                ("|Y''_a| >= m+4-|X|", len(d.Ypp[a]), m + 4 - len(d.X), len(d.Ypp[a]) >= m + 4 - len(d.X)),
            )
            for bound, value, limit, ok in checks:
                if not ok:
                    return _violated(CLAIM_ORDER[4], x=d.x, y=d.y, a=a, bound=bound, value=value, limit=limit)
    return _holds(CLAIM_ORDER[4])


def _claim4(g: Graph, ell: int, m: int, decompositions) -> Verdict:
    for d in decompositions():
        for a, b in combinations(sorted(d.C), 2):
            if not g.has_edge(a, b):
                return _violated(CLAIM_ORDER[5], x=d.x, y=d.y, u=a, v=b)
    return _holds(CLAIM_ORDER[5])


def _c4_free(g: Graph, ell: int, m: int, decompositions) -> Verdict:
    if has_induced_c4(g):
        return _violated(CLAIM_ORDER[6])
    return _holds(CLAIM_ORDER[6])


_CHECKS = (_claim0, _claim1, _alpha_critical, _claim2, _claim3, _claim4, _c4_free)


def audit_proof(g: Graph, ell: int, full: bool = False, budget: SearchBudget | None = None) -> ProofAudit:
    """Walk the claim chain of the minimal-counterexample argument on ``g``.

    Claims are evaluated in order and the walk stops at the first violation
    unless ``full`` is set. When every claim holds the target immersion is
    searched for directly and recorded as the fallback.
    """
    alpha = independence_number(g)
    if alpha != 2:
        raise PremiseViolated("alpha_two", f"independence number is {alpha}")
    if ell < 1 or 2 * ell > half_ceil(g.n):
        raise PremiseViolated("ell_range", f"need 1 <= ell and 2*ell <= ceil(n/2) = {half_ceil(g.n)}")
    m = half_ceil(g.n) - 1
    cache: list[Decomposition] = []

    def decompositions():
        if not cache:
            cache.extend(_split(g, x, y) for x, y in non_edges(g))
        return cache

    verdicts = []
    for check in _CHECKS:
        verdict = check(g, ell, m, decompositions)
        verdicts.append(verdict)
        if verdict.violated and not full:
            break
    audit = ProofAudit(ell, g.n, tuple(verdicts))
    if audit.first_violation is not None:
        return audit
    target = half_ceil(g.n) - ell
    cert = find_kst_immersion(g, ell, target, budget)
    fallback = {"target": f"kst:{ell},{target}", "found": cert is not None}
    if cert is not None:
        fallback["digest"] = cert.digest()
    else:
        logger.warning("no claim fired and the direct search found no K_{%d,%d} immersion", ell, target)
    return ProofAudit(ell, g.n, tuple(verdicts), fallback)
