"""Batch sweeps over the α ≤ 2 universe and the reports they produce.

Every sweep maps a per-graph worker over the universe in enumeration order.
Workers receive graph6 strings and return plain records, so they run the same
inline (``jobs == 1``) or in a process pool; ``Pool.imap`` keeps the input
order, which makes reports independent of the worker count.
"""

from __future__ import annotations

import json
import logging
import multiprocessing as mp
import time
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from functools import partial
from itertools import combinations, product
from pathlib import Path
from typing import Callable, Iterable

from .config import HarnessConfig
from .generate import EnumerationRangeError, enumerate_alpha2
from .graph import Graph, chromatic_number_alpha2, common_neighbors, has_induced_c4, independence_number
from .graph6 import decode, encode, read_graph6
from .immersion import (
    BudgetExceeded,
    ImmersionCertificate,
    SearchBudget,
    TargetSpec,
    find_immersion,
    find_kst_immersion,
    make_target,
    translate_certificate,
    verify_certificate,
)
from .proof import (
    PremiseViolated,
    audit_proof,
    claim1_extend,
    claim4_construct,
    claim4_premises,
    decompose,
    half_ceil,
    non_edges,
    synthetic_claim4_instance,
)

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1


class OutcomeStatus(str, Enum):
    FOUND = "found"
    NOT_FOUND = "not_found"
    UNDECIDED = "undecided"
    NOT_APPLICABLE = "not_applicable"
    REJECTED = "rejected"
    REFUTED = "refuted"
    ANOMALY = "anomaly"


FAILING = (OutcomeStatus.NOT_FOUND, OutcomeStatus.REJECTED, OutcomeStatus.ANOMALY)


class RunStatus(str, Enum):
    VERIFIED = "verified"
    VIOLATED = "violated"
    UNDECIDED = "undecided"

    @property
    def exit_code(self) -> int:
        return {RunStatus.VERIFIED: 0, RunStatus.VIOLATED: 1, RunStatus.UNDECIDED: 3}[self]


@dataclass(frozen=True)
class Outcome:
    param: int | None
    target: str
    status: OutcomeStatus
    digest: str | None = None
    elapsed_ms: float | None = None
    detail: dict | None = None

    def to_dict(self) -> dict:
        data = {"param": self.param, "target": self.target, "status": self.status.value}
        if self.digest is not None:
            data["digest"] = self.digest
        if self.elapsed_ms is not None:
            data["elapsed_ms"] = self.elapsed_ms
        if self.detail:
            data["detail"] = self.detail
        return data


@dataclass(frozen=True)
class GraphRecord:
    graph6: str
    outcomes: tuple[Outcome, ...]

    def to_dict(self) -> dict:
        return {"graph6": self.graph6, "outcomes": [o.to_dict() for o in self.outcomes]}


@dataclass
class VerificationReport:
    kind: str
    universe: dict
    config: dict
    records: list[GraphRecord]
    extra: dict = field(default_factory=dict)
    format_version: int = FORMAT_VERSION

    @property
    def summary(self) -> dict:
        counts = Counter(o.status for r in self.records for o in r.outcomes)
        return {
            "graphs": len(self.records),
            "outcomes": {status.value: counts.get(status, 0) for status in OutcomeStatus},
        }

    @property
    def status(self) -> RunStatus:
        counts = self.summary["outcomes"]
        if any(counts[s.value] for s in FAILING):
            return RunStatus.VIOLATED
        if counts[OutcomeStatus.UNDECIDED.value]:
            return RunStatus.UNDECIDED
        return RunStatus.VERIFIED

    def failing_records(self) -> list[GraphRecord]:
        return [r for r in self.records if any(o.status in FAILING for o in r.outcomes)]

    def to_dict(self) -> dict:
        data = {
            "format_version": self.format_version,
            "kind": self.kind,
            "universe": self.universe,
            "config": self.config,
            "status": self.status.value,
            "summary": self.summary,
            "records": [r.to_dict() for r in self.records],
        }
        if self.extra:
            data["extra"] = self.extra
        return data

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def to_text(self) -> str:
        lines = [f"{self.kind}: {self.status.value}"]
        universe = self.universe
        lines.append(f"universe: n={universe['n_min']}..{universe['n_max']}, {self.summary['graphs']} graphs")
        for status, count in self.summary["outcomes"].items():
            if count:
                lines.append(f"  {status}: {count}")
        for name, count in self.extra.get("first_violation_counts", {}).items():
            lines.append(f"  first violation {name}: {count}")
        for record in self.failing_records():
            bad = [o for o in record.outcomes if o.status in FAILING]
            lines.append(f"FAIL {record.graph6} " + ", ".join(f"{o.target}={o.status.value}" for o in bad))
        return "\n".join(lines) + "\n"


# -- universe ------------------------------------------------------------------


def load_universe(
    n_min: int,
    n_max: int,
    exact: bool,
    config: HarnessConfig,
    source: Path | str | None = None,
) -> tuple[list[Graph], dict]:
    """Graphs of the sweep in canonical order plus the report's universe descriptor."""
    if n_min > n_max:
        raise EnumerationRangeError(f"empty range n={n_min}..{n_max}")
    if source is not None:
        graphs = [g for g in read_graph6(source) if n_min <= g.n <= n_max]
    else:
        graphs = [
            g
            for n in range(n_min, n_max + 1)
            for g in enumerate_alpha2(n, exact=exact, max_n=config.max_enumeration_n)
        ]
    descriptor = {
        "n_min": n_min,
        "n_max": n_max,
        "exact_alpha2": exact,
        "source": None if source is None else str(source),
    }
    logger.info("universe n=%d..%d: %d graphs", n_min, n_max, len(graphs))
    return graphs, descriptor


def _admissible(g: Graph, exact: bool) -> bool:
    alpha = independence_number(g)
    return alpha == 2 if exact else alpha <= 2


def _map_records(worker: Callable[[str], GraphRecord], items: list[str], jobs: int) -> list[GraphRecord]:
    if jobs == 1 or len(items) <= 1:
        return [worker(item) for item in items]
    chunksize = max(1, len(items) // (jobs * 8))
    with mp.Pool(processes=jobs) as pool:
        return list(pool.imap(worker, items, chunksize=chunksize))


def _sweep(
    kind: str,
    graphs: Iterable[Graph],
    universe: dict,
    worker: Callable[..., GraphRecord],
    config: HarnessConfig,
    **params,
) -> VerificationReport:
    items = [encode(g) for g in graphs]
    records = _map_records(partial(worker, config, **params), items, config.jobs)
    report = VerificationReport(kind, universe, config.echo(), records)
    logger.info("%s finished: %s %s", kind, report.status.value, report.summary["outcomes"])
    return report


# -- outcome helpers -----------------------------------------------------------


def _elapsed(config: HarnessConfig, started: float) -> float | None:
    if not config.timings:
        return None
    return round((time.perf_counter() - started) * 1000, 3)


def _judge(
    g: Graph,
    h: Graph,
    cert: ImmersionCertificate | None,
    param: int | None,
    label: str,
    elapsed: float | None,
    detail: dict | None = None,
) -> Outcome:
    if cert is None:
        return Outcome(param, label, OutcomeStatus.NOT_FOUND, elapsed_ms=elapsed, detail=detail)
    check = verify_certificate(g, h, cert)
    if not check:
        logger.error("certificate for %s rejected: %s", label, check.reason.value)
        return Outcome(param, label, OutcomeStatus.REJECTED, elapsed_ms=elapsed, detail=check.to_dict())
    return Outcome(param, label, OutcomeStatus.FOUND, cert.digest(), elapsed, detail)


def _search(
    g: Graph, spec: TargetSpec, param: int | None, config: HarnessConfig, budget: SearchBudget | None = None
) -> Outcome:
    h = make_target(spec)
    started = time.perf_counter()
    try:
        cert = find_immersion(g, h, budget or config.budget)
    except BudgetExceeded:
        return Outcome(param, spec.label(), OutcomeStatus.UNDECIDED, elapsed_ms=_elapsed(config, started))
    return _judge(g, h, cert, param, spec.label(), _elapsed(config, started))


def _not_applicable(target: str, param: int | None = None, **detail) -> Outcome:
    return Outcome(param, target, OutcomeStatus.NOT_APPLICABLE, detail=detail or None)


# -- theorem sweep -------------------------------------------------------------


def _even_cross_check(g: Graph, spec: TargetSpec, ell: int, config: HarnessConfig) -> Outcome:
    # For even n the target on n vertices equals the one on n - 1 vertices.
    h = make_target(spec)
    label = f"{spec.label()}@g-{g.n - 1}"
    reduced, forward = g.without_vertices([g.n - 1])
    started = time.perf_counter()
    try:
        cert = find_immersion(reduced, h, config.budget)
    except BudgetExceeded:
        return Outcome(ell, label, OutcomeStatus.UNDECIDED, elapsed_ms=_elapsed(config, started))
    if cert is not None:
        back = {new: old for old, new in forward.items()}
        cert = translate_certificate(cert, back)
    return _judge(g, h, cert, ell, label, _elapsed(config, started))


def _theorem4_record(config: HarnessConfig, g6: str) -> GraphRecord:
    g = decode(g6)
    if not _admissible(g, exact=True):
        return GraphRecord(g6, (_not_applicable("alpha2"),))
    half = half_ceil(g.n)
    outcomes = []
    for ell in range(1, half // 2 + 1):
        spec = TargetSpec.complete_bipartite(ell, half - ell)
        outcomes.append(_search(g, spec, ell, config))
        if g.n % 2 == 0:
            outcomes.append(_even_cross_check(g, spec, ell, config))
    return GraphRecord(g6, tuple(outcomes))


def verify_theorem4(
    n_min: int, n_max: int, config: HarnessConfig | None = None, source: Path | str | None = None
) -> VerificationReport:
    """K_{ℓ,⌈n/2⌉-ℓ} for every graph with α = 2 and every ℓ with 2ℓ ≤ ⌈n/2⌉."""
    config = config or HarnessConfig()
    graphs, universe = load_universe(n_min, n_max, True, config, source)
    return _sweep("verify-theorem4", graphs, universe, _theorem4_record, config)


# -- induced-C4-free clique sweep ------------------------------------------------


def _quiroz_record(config: HarnessConfig, g6: str) -> GraphRecord:
    g = decode(g6)
    spec = TargetSpec.clique(half_ceil(g.n))
    if not _admissible(g, exact=False):
        return GraphRecord(g6, (_not_applicable("alpha2"),))
    if has_induced_c4(g):
        return GraphRecord(g6, (_not_applicable(spec.label(), reason="induced_c4"),))
    return GraphRecord(g6, (_search(g, spec, None, config),))


def verify_quiroz(
    n_min: int, n_max: int, config: HarnessConfig | None = None, source: Path | str | None = None
) -> VerificationReport:
    """K_{⌈n/2⌉} in every graph with α ≤ 2 and no induced C4; C4 graphs are not applicable."""
    config = config or HarnessConfig()
    graphs, universe = load_universe(n_min, n_max, False, config, source)
    return _sweep("verify-c4free", graphs, universe, _quiroz_record, config)


# -- clique-topped bipartite probe ---------------------------------------------


def _kll_record(config: HarnessConfig, g6: str, ell: int) -> GraphRecord:
    g = decode(g6)
    if not _admissible(g, exact=True):
        return GraphRecord(g6, (_not_applicable("alpha2", ell),))
    chi = chromatic_number_alpha2(g)
    if 2 * ell > chi:
        return GraphRecord(g6, (_not_applicable(f"kll:{ell},{chi - ell}", ell, chi=chi),))
    spec = TargetSpec.clique_topped_bipartite(ell, chi - ell)
    outcome = _search(g, spec, ell, config)
    if outcome.status in (OutcomeStatus.UNDECIDED, OutcomeStatus.NOT_FOUND):
        logger.info("re-checking %s on %s with a doubled budget", spec.label(), g6)
        outcome = _search(g, spec, ell, config, config.budget.doubled())
        outcome = Outcome(
            outcome.param, outcome.target, outcome.status, outcome.digest, outcome.elapsed_ms,
            {**(outcome.detail or {}), "retried": True},
        )
    if outcome.status is OutcomeStatus.NOT_FOUND:
        logger.warning("counterexample candidate for %s: %s (chi=%d)", spec.label(), g6, chi)
    return GraphRecord(g6, (outcome,))


def probe_conjecture_kll(
    n_min: int, n_max: int, ell: int, config: HarnessConfig | None = None, source: Path | str | None = None
) -> VerificationReport:
    """Search K^ℓ_{ℓ,χ-ℓ} in every graph with α = 2 and 2ℓ ≤ χ."""
    if ell < 1:
        raise ValueError(f"ell must be positive, got {ell}")
    config = config or HarnessConfig()
    graphs, universe = load_universe(n_min, n_max, True, config, source)
    report = _sweep("probe-kll", graphs, universe, _kll_record, config, ell=ell)
    report.universe = {**report.universe, "ell": ell}
    return report


# -- chromatic bipartite sweep -------------------------------------------------


def _chi_kst_record(config: HarnessConfig, g6: str) -> GraphRecord:
    g = decode(g6)
    if not _admissible(g, exact=True):
        return GraphRecord(g6, (_not_applicable("alpha2"),))
    chi = chromatic_number_alpha2(g)
    if chi < 2:
        return GraphRecord(g6, (_not_applicable("chi", chi=chi),))
    outcomes = []
    # K_{ℓ,χ-ℓ} and K_{χ-ℓ,ℓ} coincide, so ℓ ≤ χ/2 covers every ℓ < χ.
    for ell in range(1, chi // 2 + 1):
        spec = TargetSpec.complete_bipartite(ell, chi - ell)
        h = make_target(spec)
        started = time.perf_counter()
        try:
            cert = find_kst_immersion(g, ell, chi - ell, config.budget)
        except BudgetExceeded:
            outcomes.append(Outcome(ell, spec.label(), OutcomeStatus.UNDECIDED, elapsed_ms=_elapsed(config, started)))
            continue
        outcomes.append(_judge(g, h, cert, ell, spec.label(), _elapsed(config, started), {"chi": chi}))
    return GraphRecord(g6, tuple(outcomes))


def verify_chi_bipartite(
    n_min: int, n_max: int, config: HarnessConfig | None = None, source: Path | str | None = None
) -> VerificationReport:
    """K_{ℓ,χ-ℓ} for every graph with α = 2 and every 1 ≤ ℓ < χ."""
    config = config or HarnessConfig()
    graphs, universe = load_universe(n_min, n_max, True, config, source)
    return _sweep("verify-chi-kst", graphs, universe, _chi_kst_record, config)


# -- proof audit ---------------------------------------------------------------


def _audit_record(config: HarnessConfig, g6: str, ell: int | None = None) -> GraphRecord:
    g = decode(g6)
    if not _admissible(g, exact=True):
        return GraphRecord(g6, (_not_applicable("alpha2"),))
    ells = range(1, half_ceil(g.n) // 2 + 1)
    if ell is not None:
        if ell not in ells:
            return GraphRecord(g6, (_not_applicable("audit", ell),))
        ells = [ell]
    outcomes = []
    for ell in ells:
        started = time.perf_counter()
        try:
            audit = audit_proof(g, ell, full=config.full_audit, budget=config.budget)
        except BudgetExceeded:
            outcomes.append(Outcome(ell, "audit", OutcomeStatus.UNDECIDED, elapsed_ms=_elapsed(config, started)))
            continue
        elapsed = _elapsed(config, started)
        if audit.anomaly:
            logger.warning("audit anomaly on %s for ell=%d", g6, ell)
            outcomes.append(Outcome(ell, "audit", OutcomeStatus.ANOMALY, elapsed_ms=elapsed, detail=audit.to_dict()))
        elif audit.first_violation is None:
            # Every claim holds but the graph has the immersion anyway.
            detail = {"first_violation": None, "fallback": audit.fallback}
            outcomes.append(Outcome(ell, "audit", OutcomeStatus.FOUND, audit.fallback["digest"], elapsed, detail))
        else:
            detail = {"first_violation": audit.first_violation}
            if config.full_audit:
                detail["violated"] = [v.claim for v in audit.verdicts if v.violated]
            outcomes.append(Outcome(ell, "audit", OutcomeStatus.REFUTED, elapsed_ms=elapsed, detail=detail))
    return GraphRecord(g6, tuple(outcomes))


def first_violation_counts(report: VerificationReport) -> dict[str, int]:
    counts = Counter(
        o.detail["first_violation"] or "fallback"
        for r in report.records
        for o in r.outcomes
        if o.status in (OutcomeStatus.REFUTED, OutcomeStatus.FOUND)
    )
    return dict(sorted(counts.items()))


def audit_sweep(
    n_min: int,
    n_max: int,
    config: HarnessConfig | None = None,
    source: Path | str | None = None,
    ell: int | None = None,
) -> VerificationReport:
    """Run the claim audit on every (graph, ℓ).

    An audit where no claim fires and the direct search also fails is an
    anomaly. With ``ell`` only that ℓ is audited and graphs too small for it
    are not applicable.
    """
    config = config or HarnessConfig()
    graphs, universe = load_universe(n_min, n_max, True, config, source)
    report = _sweep("audit", graphs, universe, _audit_record, config, ell=ell)
    if ell is not None:
        report.universe = {**report.universe, "ell": ell}
    report.extra["first_violation_counts"] = first_violation_counts(report)
    return report


# -- construction soundness ----------------------------------------------------


def _claim1_outcomes(g: Graph, config: HarnessConfig) -> list[Outcome]:
    outcomes = []
    inner_half = half_ceil(g.n - 2)
    for u, v in non_edges(g):
        common = len(common_neighbors(g, u, v))
        reduced, _ = g.without_vertices([u, v])
        for ell in range(1, inner_half // 2 + 1):
            if common < ell - 1:
                continue
            label = f"claim1:{u},{v}"
            k = inner_half - ell
            try:
                inner = find_kst_immersion(reduced, ell, k, config.budget)
            except BudgetExceeded:
                outcomes.append(Outcome(ell, label, OutcomeStatus.UNDECIDED))
                continue
            if inner is None:
                continue
            h = make_target(TargetSpec.complete_bipartite(ell, k + 1))
            try:
                cert = claim1_extend(g, u, v, ell, inner)
            except PremiseViolated as exc:
                outcomes.append(Outcome(ell, label, OutcomeStatus.REJECTED, detail={"premise": exc.name}))
                continue
            outcomes.append(_judge(g, h, cert, ell, label, None))
    return outcomes


def _claim4_outcomes(g: Graph, x: int, y: int, label: str, decomposition=None) -> list[Outcome]:
    d = decomposition or decompose(g, x, y, assume_alpha2=True)
    outcomes = []
    half = half_ceil(g.n)
    for u, v in combinations(sorted(d.C), 2):
        if g.has_edge(u, v):
            continue
        for ell in range(1, half):
            if claim4_premises(g, d, u, v, ell):
                continue
            h = make_target(TargetSpec.complete_bipartite(ell, half - ell))
            cert = claim4_construct(g, d, u, v, ell)
            outcomes.append(_judge(g, h, cert, ell, f"{label}:{x},{y},{u},{v}", None))
    return outcomes


def _construction_record(config: HarnessConfig, g6: str) -> GraphRecord:
    g = decode(g6)
    if not _admissible(g, exact=True):
        return GraphRecord(g6, (_not_applicable("alpha2"),))
    outcomes = _claim1_outcomes(g, config)
    for x, y in non_edges(g):
        outcomes.extend(_claim4_outcomes(g, x, y, "claim4"))
    return GraphRecord(g6, tuple(outcomes))


SYNTHETIC_SIZES = range(1, 4)


def synthetic_records() -> list[GraphRecord]:
    """Claim 4 constructions on the blow-up instances with part sizes 1..3."""
    records = []
    for xu, xv, yu, yv in product(SYNTHETIC_SIZES, repeat=4):
        g, x, y, _, _ = synthetic_claim4_instance(xu, xv, yu, yv)
        outcomes = _claim4_outcomes(g, x, y, "claim4-synthetic", decompose(g, x, y))
        if outcomes:
            records.append(GraphRecord(encode(g), tuple(outcomes)))
    return records


def construction_sweep(
    n_min: int,
    n_max: int,
    config: HarnessConfig | None = None,
    source: Path | str | None = None,
    synthetic: bool = True,
) -> VerificationReport:
    """Run both explicit constructions on every instance meeting their premises and verify the output."""
    config = config or HarnessConfig()
    graphs, universe = load_universe(n_min, n_max, True, config, source)
    report = _sweep("constructions", graphs, universe, _construction_record, config)
    if synthetic:
        extra = synthetic_records()
        report.records.extend(extra)
        report.universe = {**report.universe, "synthetic_instances": len(extra)}
    return report
