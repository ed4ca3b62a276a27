from __future__ import annotations

import os
import sys
import unittest
from itertools import combinations, product
from pathlib import Path

REPO_ROOT = Path(__file__).resolve().parents[1]
SRC_ROOT = REPO_ROOT / "src"
if str(SRC_ROOT) not in sys.path:
    sys.path.insert(0, str(SRC_ROOT))

from a2im.generate import enumerate_alpha2  # noqa: E402
from a2im.graph import Graph, common_neighbors, complement, is_alpha_critical  # noqa: E402
from a2im.immersion import (  # noqa: E402
    ImmersionCertificate,
    TargetSpec,
    find_kst_immersion,
    make_target,
    verify_certificate,
)
from a2im.proof import (  # noqa: E402
    CLAIM_ORDER,
    DecompositionError,
    PremiseViolated,
    VerdictStatus,
    audit_proof,
    build_extension_witness,
    check_claim2,
    claim1_extend,
    claim4_construct,
    claim4_premises,
    decompose,
    half_ceil,
    non_edges,
    synthetic_claim4_instance,
)
from tests.helpers.diagnostics import failure_message  # noqa: E402

SLOW = os.environ.get("A2IM_SLOW") == "1"

C5_CHORD = Graph.cycle(5).with_edge(0, 2)

# u=0 and v=1 share only 5; 2, 3, 4, 5 form a clique.
EXTENSION_HOST = Graph.from_edges(
    6, [(0, 2), (0, 4), (0, 5), (1, 3), (1, 5)] + list(combinations(range(2, 6), 2))
)


def kst(s: int, t: int) -> Graph:
    return make_target(TargetSpec.complete_bipartite(s, t))


class TestDecomposition(unittest.TestCase):
    def test_partition_and_cliques(self):
        for n in range(3, 7):
            for g in enumerate_alpha2(n):
                for x, y in non_edges(g):
                    d = decompose(g, x, y)
                    with self.subTest(graph=g, x=x, y=y):
                        self.assertEqual(d.C | d.X | d.Y, frozenset(range(g.n)))
                        self.assertEqual(len(d.C) + len(d.X) + len(d.Y), g.n)
                        self.assertIn(x, d.X)
                        self.assertIn(y, d.Y)
                        for side in (d.X, d.Y):
                            self.assertTrue(all(g.has_edge(p, q) for p, q in combinations(side, 2)))
                        for a in d.C:
                            self.assertEqual(d.Xp[a] | d.Xpp[a], d.X)
                            self.assertTrue(all(g.has_edge(p, q) for p in d.Xpp[a] for q in d.Ypp[a]))

    def test_known_split(self):
        d = decompose(C5_CHORD, 1, 3)
        self.assertEqual(d.C, frozenset({2}))
        self.assertEqual(d.X, frozenset({0, 1}))
        self.assertEqual(d.Y, frozenset({3, 4}))
        self.assertEqual(d.Xpp[2], frozenset())
        self.assertEqual(d.Yp[2], frozenset({3}))
        self.assertEqual(d.Ypp[2], frozenset({4}))
        mirrored = d.mirrored()
        self.assertEqual((mirrored.x, mirrored.y), (3, 1))
        self.assertEqual(mirrored.X, d.Y)
        self.assertEqual(mirrored.Xpp, d.Ypp)
        self.assertEqual(d.to_dict()["per_a"]["2"]["Ypp"], [4])

    def test_errors(self):
        c5 = Graph.cycle(5)
        with self.assertRaises(DecompositionError):
            decompose(c5, 0, 1)
        with self.assertRaises(DecompositionError):
            decompose(c5, 2, 2)
        with self.assertRaises(DecompositionError):
            decompose(c5, 0, 9)
        with self.assertRaises(DecompositionError):
            decompose(Graph.empty(3), 0, 1)


class TestClaim2(unittest.TestCase):
    def test_holds_on_alpha_critical_graphs(self):
        top = 9 if SLOW else 7
        errors = []
        checked = 0
        for n in range(3, top + 1):
            for g in enumerate_alpha2(n):
                if not is_alpha_critical(g):
                    continue
                for x, y in non_edges(g):
                    verdict = check_claim2(g, decompose(g, x, y, assume_alpha2=True))
                    checked += 1
                    if verdict.violated:
                        errors.append(f"{g!r}: {verdict.to_dict()}")
        self.assertGreater(checked, 0)
        self.assertEqual(errors, [], msg=failure_message("claim2-universality", errors) if errors else "")

    def test_chorded_five_cycle_is_a_witness(self):
        verdict = check_claim2(C5_CHORD, decompose(C5_CHORD, 1, 3))
        self.assertEqual(verdict.status, VerdictStatus.VIOLATED)
        self.assertEqual(verdict.witness, {"x": 1, "y": 3, "a": 2, "empty_side": "X"})


class TestClaim1Extension(unittest.TestCase):
    def test_joiner_adjacent_to_whole_side(self):
        c5 = Graph.cycle(5)
        extended = claim1_extend(c5, 0, 2, 1, ImmersionCertificate((1, 2), (((0, 1), (1, 2)),)))
        self.assertEqual(extended.branch, (3, 4, 2))
        self.assertTrue(verify_certificate(c5, kst(1, 2), extended))

    def test_routes_through_private_common_neighbours(self):
        # Reduced labels: 2->0, 3->1, 4->2, 5->3.
        inner = ImmersionCertificate((0, 1, 2), (((0, 2), (0, 2)), ((1, 2), (1, 2))))
        extended = claim1_extend(EXTENSION_HOST, 0, 1, 2, inner)
        self.assertEqual(extended.branch, (2, 3, 4, 0))
        self.assertEqual(extended.walk_for(1, 3), (3, 1, 5, 0))
        self.assertTrue(verify_certificate(EXTENSION_HOST, kst(2, 2), extended))

    def test_extensions_found_by_scanning_small_graphs(self):
        top = 8 if SLOW else 7
        errors = []
        checked = 0
        routed = 0
        for n in range(4, top + 1):
            for g in enumerate_alpha2(n):
                for u, v in non_edges(g):
                    common = len(common_neighbors(g, u, v))
                    reduced, forward = g.without_vertices([u, v])
                    back = {new: old for old, new in forward.items()}
                    for ell in (1, 2):
                        if common < ell - 1:
                            continue
                        for k in range(1, reduced.n - ell + 1):
                            inner = find_kst_immersion(reduced, ell, k)
                            if inner is None:
                                continue
                            cert = claim1_extend(g, u, v, ell, inner)
                            checked += 1
                            side = [back[c] for c in inner.branch[:ell]]
                            if not any(all(g.has_edge(w, c) for c in side) for w in (u, v)):
                                routed += 1
                            check = verify_certificate(g, kst(ell, k + 1), cert)
                            if not check:
                                errors.append(f"{g!r} u={u} v={v} ell={ell} k={k}: {check.to_dict()}")
        self.assertEqual(errors, [], msg=failure_message("claim1-scan", errors) if errors else "")
        self.assertGreater(checked, 0)
        # Some instances need the private common-neighbour routes.
        self.assertGreater(routed, 0)

    def test_extension_witness(self):
        witness = build_extension_witness(EXTENSION_HOST, 0, 1, (2, 3))
        self.assertEqual(witness.A, frozenset({2}))
        self.assertEqual(witness.B, frozenset())
        self.assertEqual(witness.Cl, frozenset({3}))
        self.assertEqual(witness.D, frozenset({5}))
        self.assertEqual(witness.f, {3: 5})

    def test_premises(self):
        inner = ImmersionCertificate((0, 1, 2), (((0, 2), (0, 2)), ((1, 2), (1, 2))))
        cases = [
            ("distinct_pair", EXTENSION_HOST, 0, 0, 2, inner),
            ("non_adjacent", EXTENSION_HOST, 0, 2, 2, inner),
            ("alpha_two", Graph.empty(6), 0, 1, 1, inner),
            ("common_neighbours", Graph.cycle(5), 0, 2, 3, inner),
            ("inner_shape", EXTENSION_HOST, 0, 1, 2, ImmersionCertificate((0, 1), ())),
            ("inner_certificate", EXTENSION_HOST, 0, 1, 2, ImmersionCertificate((0, 1, 2), (((0, 2), (0, 2)),))),
        ]
        for name, g, u, v, ell, cert in cases:
            with self.subTest(premise=name):
                with self.assertRaises(PremiseViolated) as ctx:
                    claim1_extend(g, u, v, ell, cert)
                self.assertEqual(ctx.exception.name, name)


class TestClaim4Construction(unittest.TestCase):
    def test_synthetic_instance_layout(self):
        g, x, y, u, v = synthetic_claim4_instance(1, 3, 3, 3)
        self.assertEqual(g.n, 14)
        d = decompose(g, x, y)
        self.assertEqual(d.C, frozenset({u, v}))
        self.assertEqual([len(d.Xpp[u]), len(d.Xpp[v]), len(d.Ypp[u]), len(d.Ypp[v])], [1, 3, 3, 3])

    def test_known_instance(self):
        g, x, y, u, v = synthetic_claim4_instance(1, 3, 3, 3)
        d = decompose(g, x, y)
        self.assertEqual(claim4_premises(g, d, u, v, 2), [])
        cert = claim4_construct(g, d, u, v, 2)
        self.assertEqual(len(cert.branch), 7)
        self.assertTrue(verify_certificate(g, kst(2, 5), cert))
        self.assertTrue(any(len(walk) == 3 for _, walk in cert.paths))

    def test_synthetic_grid(self):
        verified = 0
        errors = []
        for xu, xv, yu, yv in product(range(1, 4), repeat=4):
            g, x, y, u, v = synthetic_claim4_instance(xu, xv, yu, yv)
            d = decompose(g, x, y)
            half = half_ceil(g.n)
            for ell in range(1, half):
                if claim4_premises(g, d, u, v, ell):
                    continue
                cert = claim4_construct(g, d, u, v, ell)
                check = verify_certificate(g, kst(ell, half - ell), cert)
                if check:
                    verified += 1
                else:
                    errors.append(f"{(xu, xv, yu, yv)} ell={ell}: {check.to_dict()}")
        self.assertEqual(errors, [], msg=failure_message("claim4-synthetic", errors) if errors else "")
        self.assertGreaterEqual(verified, 10)

    def test_premise_failures(self):
        g, x, y, u, v = synthetic_claim4_instance(1, 1, 1, 1)
        d = decompose(g, x, y)
        self.assertEqual(claim4_premises(g, d, x, v, 1), ["u_v_in_C"])
        self.assertIn("x_side_large", claim4_premises(g, d, u, v, 2))
        with self.assertRaises(PremiseViolated):
            claim4_construct(g, d, u, v, 2)


class TestAudit(unittest.TestCase):
    def test_five_cycle(self):
        audit = audit_proof(Graph.cycle(5), 1)
        self.assertEqual(audit.first_violation, "claim1_common_neighbours")
        self.assertFalse(audit.anomaly)
        self.assertIsNone(audit.fallback)
        self.assertEqual(len(audit.verdicts), 2)

    def test_full_audit_records_every_claim(self):
        audit = audit_proof(Graph.cycle(5), 1, full=True)
        self.assertEqual(tuple(v.claim for v in audit.verdicts), CLAIM_ORDER)
        self.assertEqual(audit.to_dict()["first_violation"], "claim1_common_neighbours")

    def test_even_order_fails_parity(self):
        audit = audit_proof(complement(Graph.cycle(6)), 1)
        self.assertEqual(audit.first_violation, "claim0_parity")

    def test_premises(self):
        with self.assertRaises(PremiseViolated) as ctx:
            audit_proof(Graph.cycle(5), 2)
        self.assertEqual(ctx.exception.name, "ell_range")
        with self.assertRaises(PremiseViolated) as ctx:
            audit_proof(Graph.empty(5), 1)
        self.assertEqual(ctx.exception.name, "alpha_two")

    def test_no_anomalies_on_small_graphs(self):
        errors = []
        for n in (5, 7):
            for g in enumerate_alpha2(n):
                for ell in range(1, half_ceil(n) // 2 + 1):
                    audit = audit_proof(g, ell)
                    if audit.anomaly:
                        errors.append(f"{g!r} ell={ell}: {audit.to_dict()}")
        self.assertEqual(errors, [], msg=failure_message("audit-anomalies", errors) if errors else "")


if __name__ == "__main__":
    unittest.main()
