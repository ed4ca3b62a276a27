from __future__ import annotations

import json
import os
import sys
import tempfile
import unittest
from pathlib import Path
from unittest import mock

REPO_ROOT = Path(__file__).resolve().parents[1]
SRC_ROOT = REPO_ROOT / "src"
if str(SRC_ROOT) not in sys.path:
    sys.path.insert(0, str(SRC_ROOT))

from a2im.config import ConfigError, HarnessConfig  # noqa: E402
from a2im.generate import EnumerationRangeError  # noqa: E402
from a2im.graph import Graph, complement  # noqa: E402
from a2im.graph6 import encode, write_graph6  # noqa: E402
from a2im.harness import (  # noqa: E402
    FORMAT_VERSION,
    Outcome,
    OutcomeStatus,
    RunStatus,
    audit_sweep,
    construction_sweep,
    load_universe,
    probe_conjecture_kll,
    verify_chi_bipartite,
    verify_quiroz,
    verify_theorem4,
)
from tests.helpers.diagnostics import failure_message  # noqa: E402

SLOW = os.environ.get("A2IM_SLOW") == "1"


def graph_file(*graphs: Graph) -> Path:
    path = Path(tempfile.mkdtemp(prefix="a2im-")) / "graphs.g6"
    with path.open("w", encoding="ascii") as handle:
        write_graph6(graphs, handle)
    return path


def outcome_errors(report) -> list[str]:
    return [
        f"{record.graph6}: {outcome.to_dict()}"
        for record in report.failing_records()
        for outcome in record.outcomes
        if outcome.status in (OutcomeStatus.NOT_FOUND, OutcomeStatus.REJECTED, OutcomeStatus.ANOMALY)
    ]


class TestConfig(unittest.TestCase):
    def test_environment_values(self):
        config = HarnessConfig.from_env({"A2IM_JOBS": "3", "A2IM_BUDGET_MS": "off", "A2IM_SEED": ""})
        self.assertEqual(config.jobs, 3)
        self.assertIsNone(config.budget_ms)
        self.assertEqual(config.seed, 0)
        self.assertEqual(config.budget.max_ms, None)

    def test_cli_values_override_environment(self):
        config = HarnessConfig.from_env({"A2IM_JOBS": "3", "A2IM_SEED": "7"}).override(jobs=None, seed=11)
        self.assertEqual(config.jobs, 3)
        self.assertEqual(config.seed, 11)

    def test_invalid_values(self):
        with self.assertRaises(ConfigError):
            HarnessConfig.from_env({"A2IM_SEED": "seven"})
        with self.assertRaises(ConfigError):
            HarnessConfig.from_env({"A2IM_JOBS": "none"})
        with self.assertRaises(ConfigError):
            HarnessConfig(jobs=0)
        with self.assertRaises(ConfigError):
            HarnessConfig(budget_nodes=-5)
        with self.assertRaises(ConfigError):
            HarnessConfig().override(colour="blue")

    def test_echo_leaves_out_scheduling(self):
        self.assertNotIn("jobs", HarnessConfig(jobs=4).echo())
        self.assertNotIn("timings", HarnessConfig().echo())


class TestUniverse(unittest.TestCase):
    def test_counts_and_descriptor(self):
        graphs, universe = load_universe(4, 5, True, HarnessConfig())
        self.assertEqual(len(graphs), 6 + 13)
        self.assertEqual(universe, {"n_min": 4, "n_max": 5, "exact_alpha2": True, "source": None})

    def test_empty_range(self):
        with self.assertRaises(EnumerationRangeError):
            load_universe(6, 5, True, HarnessConfig())

    def test_file_source_is_filtered_by_order(self):
        path = graph_file(Graph.cycle(5), Graph.cycle(4), complement(Graph.petersen()))
        graphs, universe = load_universe(4, 5, True, HarnessConfig(), path)
        self.assertEqual(graphs, [Graph.cycle(5), Graph.cycle(4)])
        self.assertEqual(universe["source"], str(path))


class TestTheoremSweep(unittest.TestCase):
    def test_small_orders_verified(self):
        report = verify_theorem4(3, 7)
        errors = outcome_errors(report)
        self.assertEqual(errors, [], msg=failure_message("verify-theorem4", errors, report=report) if errors else "")
        self.assertEqual(report.status, RunStatus.VERIFIED)
        self.assertEqual(report.status.exit_code, 0)

    def test_even_orders_carry_cross_check(self):
        report = verify_theorem4(6, 6)
        targets = {o.target for r in report.records for o in r.outcomes}
        self.assertIn("kst:1,2@g-5", targets)

    def test_summary_reconciles(self):
        report = verify_theorem4(4, 6)
        summary = report.summary
        self.assertEqual(summary["graphs"], len(report.records))
        self.assertEqual(sum(summary["outcomes"].values()), sum(len(r.outcomes) for r in report.records))
        data = json.loads(report.to_json())
        self.assertEqual(data["format_version"], FORMAT_VERSION)
        self.assertEqual(data["status"], "verified")
        self.assertTrue(report.to_json().endswith("}\n"))
        self.assertTrue(report.to_text().startswith("verify-theorem4: verified"))

    def test_tiny_budget_is_undecided(self):
        report = verify_theorem4(5, 5, HarnessConfig(budget_nodes=1))
        self.assertEqual(report.status, RunStatus.UNDECIDED)
        self.assertEqual(report.status.exit_code, 3)

    def test_worker_count_does_not_change_report(self):
        single = verify_theorem4(5, 7, HarnessConfig(jobs=1)).to_json()
        pooled = verify_theorem4(5, 7, HarnessConfig(jobs=2)).to_json()
        self.assertEqual(single, pooled)


class TestCliqueSweep(unittest.TestCase):
    def test_small_orders_verified(self):
        report = verify_quiroz(3, 7)
        self.assertEqual(report.status, RunStatus.VERIFIED, msg=report.to_text())
        self.assertGreater(report.summary["outcomes"]["not_applicable"], 0)

    def test_five_cycle_and_four_cycle(self):
        report = verify_quiroz(4, 5, source=graph_file(Graph.cycle(5), Graph.cycle(4)))
        c5, c4 = report.records
        self.assertEqual(c5.graph6, encode(Graph.cycle(5)))
        self.assertEqual(c5.outcomes[0].target, "clique:3")
        self.assertEqual(c5.outcomes[0].status, OutcomeStatus.FOUND)
        self.assertEqual(c4.outcomes[0].status, OutcomeStatus.NOT_APPLICABLE)
        self.assertEqual(c4.outcomes[0].detail, {"reason": "induced_c4"})


class TestCliqueToppedProbe(unittest.TestCase):
    def test_small_orders(self):
        for ell in (1, 2):
            with self.subTest(ell=ell):
                report = probe_conjecture_kll(3, 7, ell)
                self.assertEqual(report.status, RunStatus.VERIFIED, msg=report.to_text())
                self.assertEqual(report.universe["ell"], ell)

    def test_rejects_non_positive_ell(self):
        with self.assertRaises(ValueError):
            probe_conjecture_kll(5, 5, 0)

    def test_not_found_is_rechecked_with_doubled_budget(self):
        first = Outcome(1, "kll:1,2", OutcomeStatus.NOT_FOUND)
        second = Outcome(1, "kll:1,2", OutcomeStatus.FOUND, "0" * 64)
        config = HarnessConfig()
        with mock.patch("a2im.harness._search", side_effect=[first, second]) as search:
            report = probe_conjecture_kll(5, 5, 1, config, source=graph_file(Graph.cycle(5)))
        self.assertEqual(search.call_count, 2)
        self.assertEqual(search.call_args_list[1].args[4], config.budget.doubled())
        (outcome,) = report.records[0].outcomes
        self.assertEqual(outcome.status, OutcomeStatus.FOUND)
        self.assertEqual(outcome.detail, {"retried": True})
        self.assertEqual(report.status, RunStatus.VERIFIED)


class TestChromaticBipartiteSweep(unittest.TestCase):
    def test_small_orders_verified(self):
        report = verify_chi_bipartite(3, 7)
        errors = outcome_errors(report)
        self.assertEqual(errors, [], msg=failure_message("verify-chi-kst", errors, report=report) if errors else "")
        self.assertEqual(report.status, RunStatus.VERIFIED)
        self.assertGreater(report.summary["outcomes"]["found"], 0)

    def test_every_ell_below_chi_is_covered(self):
        report = verify_chi_bipartite(5, 7)
        for record in report.records:
            chi = record.outcomes[0].detail["chi"]
            with self.subTest(graph6=record.graph6):
                self.assertEqual([o.param for o in record.outcomes], list(range(1, chi // 2 + 1)))
                self.assertEqual([o.target for o in record.outcomes], [f"kst:{ell},{chi - ell}" for ell in range(1, chi // 2 + 1)])

    def test_five_cycle(self):
        report = verify_chi_bipartite(5, 5, source=graph_file(Graph.cycle(5)))
        (outcome,) = report.records[0].outcomes
        self.assertEqual(outcome.target, "kst:1,2")
        self.assertEqual(outcome.status, OutcomeStatus.FOUND)
        self.assertEqual(outcome.detail, {"chi": 3})
        self.assertEqual(report.kind, "verify-chi-kst")


class TestAuditSweep(unittest.TestCase):
    def test_no_anomalies(self):
        report = audit_sweep(3, 7)
        self.assertEqual(report.summary["outcomes"]["anomaly"], 0)
        self.assertEqual(report.status, RunStatus.VERIFIED, msg=report.to_text())
        counts = report.extra["first_violation_counts"]
        self.assertEqual(sum(counts.values()), report.summary["outcomes"]["refuted"] + report.summary["outcomes"]["found"])

    def test_even_orders_stop_at_parity(self):
        report = audit_sweep(6, 6)
        self.assertEqual(list(report.extra["first_violation_counts"]), ["claim0_parity"])

    def test_single_ell_filter(self):
        report = audit_sweep(5, 7, ell=2)
        self.assertEqual(report.universe["ell"], 2)
        statuses: dict[str, set] = {}
        for record in report.records:
            self.assertEqual(len(record.outcomes), 1)
            # The first graph6 byte is chr(63 + n): 'D' for n=5, 'F' for n=7.
            statuses.setdefault(record.graph6[0], set()).add(record.outcomes[0].status)
        self.assertEqual(statuses["D"], {OutcomeStatus.NOT_APPLICABLE})
        self.assertEqual(statuses["E"], {OutcomeStatus.NOT_APPLICABLE})
        self.assertLessEqual(statuses["F"], {OutcomeStatus.REFUTED, OutcomeStatus.FOUND})
        self.assertIn(OutcomeStatus.REFUTED, statuses["F"])

    def test_full_audit_lists_every_violation(self):
        report = audit_sweep(5, 5, HarnessConfig(full_audit=True))
        details = [o.detail for r in report.records for o in r.outcomes if o.status is OutcomeStatus.REFUTED]
        self.assertTrue(details)
        self.assertTrue(all(d["first_violation"] == d["violated"][0] for d in details))


class TestConstructionSweep(unittest.TestCase):
    def test_constructions_verify(self):
        report = construction_sweep(3, 7)
        errors = outcome_errors(report)
        self.assertEqual(errors, [], msg=failure_message("constructions", errors, report=report) if errors else "")
        self.assertGreaterEqual(report.universe["synthetic_instances"], 10)
        self.assertGreater(report.summary["outcomes"]["found"], 0)

    def test_without_synthetic_instances(self):
        report = construction_sweep(5, 5, synthetic=False)
        self.assertNotIn("synthetic_instances", report.universe)
        labels = {o.target.split(":")[0] for r in report.records for o in r.outcomes}
        self.assertIn("claim1", labels)


@unittest.skipUnless(SLOW, "set A2IM_SLOW=1 for the sweeps on 8 and 9 vertices")
class TestLargerOrders(unittest.TestCase):
    def assertVerified(self, name, report):
        errors = outcome_errors(report)
        self.assertEqual(errors, [], msg=failure_message(name, errors, report=report) if errors else "")
        self.assertEqual(report.summary["outcomes"]["undecided"], 0)
        self.assertEqual(report.status, RunStatus.VERIFIED)

    def test_theorem_sweep(self):
        report = verify_theorem4(8, 9)
        self.assertVerified("verify-theorem4-8-9", report)
        self.assertGreater(report.summary["outcomes"]["found"], 0)

    def test_clique_sweep(self):
        report = verify_quiroz(8, 9)
        self.assertVerified("verify-c4free-8-9", report)
        self.assertGreater(report.summary["outcomes"]["not_applicable"], 0)

    def test_clique_topped_probe(self):
        for ell in (1, 2):
            with self.subTest(ell=ell):
                self.assertVerified(f"probe-kll-{ell}-8-9", probe_conjecture_kll(8, 9, ell))

    def test_audit(self):
        report = audit_sweep(8, 9)
        self.assertVerified("audit-8-9", report)
        self.assertEqual(report.summary["outcomes"]["anomaly"], 0)

    def test_constructions(self):
        self.assertVerified("constructions-8", construction_sweep(8, 8))

    def test_chromatic_bipartite_sweep(self):
        self.assertVerified("verify-chi-kst-8", verify_chi_bipartite(8, 8))


if __name__ == "__main__":
    unittest.main()
