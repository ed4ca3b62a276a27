from __future__ import annotations

import json
import sys
from pathlib import Path

from . import harness
from .config import HarnessConfig
from .generate import (
    ALL_GRAPHS_MAX_N,
    alpha_critical_reduce,
    enumerate_alpha2,
    enumerate_graphs,
    enumerate_triangle_free,
    random_alpha2,
)
from .graph import (
    Graph,
    chromatic_number_alpha2,
    clique_number,
    has_induced_c4,
    independence_number,
    is_alpha_critical,
    max_matching,
)
from .graph6 import decode, encode, read_graph6, write_graph6
from .immersion import TargetSpec, find_immersion, make_target, verify_certificate
from .lifts import immersion_by_rewriting

UNIVERSES = ("alpha2", "alpha2-all", "triangle-free", "all")


def _emit(text: str, output_path: Path | None) -> None:
    if output_path is None:
        sys.stdout.write(text)
        return
    output_path.write_text(text, encoding="utf-8")


def _read_graphs(input_path: Path | None) -> list[Graph]:
    if input_path is None or str(input_path) == "-":
        return read_graph6(sys.stdin)
    return read_graph6(input_path)


def _dump(data) -> str:
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def _graphs_for(universe: str, n: int, config: HarnessConfig):
    if universe == "alpha2":
        return enumerate_alpha2(n, exact=True, max_n=config.max_enumeration_n)
    if universe == "alpha2-all":
        return enumerate_alpha2(n, exact=False, max_n=config.max_enumeration_n)
    if universe == "triangle-free":
        return enumerate_triangle_free(n, max_n=config.max_enumeration_n)
    if universe == "all":
        return enumerate_graphs(n, max_n=min(config.max_enumeration_n, ALL_GRAPHS_MAX_N))
    raise ValueError(f"unknown universe {universe!r}; choose from {', '.join(UNIVERSES)}")


def run_gen(
    n_min: int,
    n_max: int | None,
    universe: str,
    config: HarnessConfig,
    output_path: Path | None = None,
    random_count: int | None = None,
    density: float | None = None,
) -> int:
    n_max = n_min if n_max is None else n_max
    if random_count is not None:
        graphs = [
            random_alpha2(n, config.seed + i, density)
            for n in range(n_min, n_max + 1)
            for i in range(random_count)
        ]
    else:
        graphs = [g for n in range(n_min, n_max + 1) for g in _graphs_for(universe, n, config)]
    if output_path is None:
        write_graph6(graphs, sys.stdout)
    else:
        with output_path.open("w", encoding="utf-8") as handle:
            write_graph6(graphs, handle)
    return 0


def graph_invariants(g: Graph) -> dict:
    alpha = independence_number(g)
    return {
        "graph6": encode(g),
        "n": g.n,
        "m": g.edge_count,
        "alpha": alpha,
        "omega": clique_number(g),
        "max_degree": g.max_degree(),
        "matching": max_matching(g),
        "chi": chromatic_number_alpha2(g) if alpha <= 2 else None,
        "induced_c4": has_induced_c4(g),
        "alpha_critical": is_alpha_critical(g),
    }


def run_alpha(input_path: Path | None, fmt: str = "json", output_path: Path | None = None) -> int:
    rows = [graph_invariants(g) for g in _read_graphs(input_path)]
    if fmt == "json":
        _emit(_dump(rows), output_path)
    else:
        lines = [
            " ".join(f"{key}={row[key]}" for key in ("graph6", "n", "m", "alpha", "omega", "chi", "matching"))
            for row in rows
        ]
        _emit("".join(line + "\n" for line in lines), output_path)
    return 0


def run_immerse(
    graph6: str,
    target: str,
    config: HarnessConfig,
    fmt: str = "json",
    output_path: Path | None = None,
    method: str = "solver",
) -> int:
    g = decode(graph6)
    spec = TargetSpec.parse(target)
    h = make_target(spec)
    result: dict = {"graph6": encode(g), "target": spec.label(), "method": method}
    if method == "rewriting":
        rewriting = immersion_by_rewriting(g, h)
        result["found"] = rewriting.found
        result["exhausted"] = rewriting.exhausted
        if rewriting.found:
            result["sequence"] = [step.to_dict() for step in rewriting.sequence]
        found = rewriting.found
    elif method == "solver":
        cert = find_immersion(g, h, config.budget)
        found = cert is not None
        result["found"] = found
        if cert is not None:
            check = verify_certificate(g, h, cert)
            result["verified"] = bool(check)
            result["certificate"] = cert.to_dict()
            result["digest"] = cert.digest()
            found = bool(check)
    else:
        raise ValueError(f"unknown method {method!r}; use solver or rewriting")
    if fmt == "json":
        _emit(_dump(result), output_path)
    else:
        status = "found" if found else "not found"
        _emit(f"{result['target']} in {result['graph6']}: {status}\n", output_path)
    return 0 if found else 1


def run_reduce_critical(input_path: Path | None, output_path: Path | None = None) -> int:
    reduced = [alpha_critical_reduce(g) for g in _read_graphs(input_path)]
    if output_path is None:
        write_graph6(reduced, sys.stdout)
    else:
        with output_path.open("w", encoding="utf-8") as handle:
            write_graph6(reduced, handle)
    return 0


def write_report(report: harness.VerificationReport, fmt: str, output_path: Path | None) -> int:
    text = report.to_json() if fmt == "json" else report.to_text()
    _emit(text, output_path)
    return report.status.exit_code


def run_sweep(
    kind: str,
    n_min: int,
    n_max: int,
    config: HarnessConfig,
    fmt: str = "json",
    output_path: Path | None = None,
    input_path: Path | None = None,
    ell: int | None = None,
) -> int:
    if kind == "verify-theorem4":
        report = harness.verify_theorem4(n_min, n_max, config, input_path)
    elif kind == "verify-c4free":
        report = harness.verify_quiroz(n_min, n_max, config, input_path)
    elif kind == "verify-chi-kst":
        report = harness.verify_chi_bipartite(n_min, n_max, config, input_path)
    elif kind == "probe-kll":
        report = harness.probe_conjecture_kll(n_min, n_max, ell or 1, config, input_path)
    elif kind == "audit":
        report = harness.audit_sweep(n_min, n_max, config, input_path, ell)
    elif kind == "constructions":
        report = harness.construction_sweep(n_min, n_max, config, input_path)
    else:
        raise ValueError(f"unknown sweep {kind!r}")
    return write_report(report, fmt, output_path)
