from __future__ import annotations

import os
import random
import sys
import unittest
from pathlib import Path

from hypothesis import given, settings
from hypothesis import strategies as st

REPO_ROOT = Path(__file__).resolve().parents[1]
SRC_ROOT = REPO_ROOT / "src"
if str(SRC_ROOT) not in sys.path:
    sys.path.insert(0, str(SRC_ROOT))

from a2im.canon import canonical_form, canonical_graph, canonical_labeling, is_isomorphic  # noqa: E402
from a2im.generate import enumerate_graphs  # noqa: E402
from a2im.graph import Graph, complement  # noqa: E402
from tests.helpers.oracles import brute_canonical_form, labelled_graphs  # noqa: E402
from tests.helpers.strategies import small_graphs  # noqa: E402

SLOW = os.environ.get("A2IM_SLOW") == "1"


def relabelled_copies(graphs, rnd: random.Random):
    for g in graphs:
        perm = list(range(g.n))
        rnd.shuffle(perm)
        yield g
        yield g.relabel(perm)


class TestCanonicalForm(unittest.TestCase):
    @settings(max_examples=120, deadline=None)
    @given(small_graphs(max_n=9), st.randoms(use_true_random=False))
    def test_invariant_under_relabelling(self, g, rnd):
        perm = list(range(g.n))
        rnd.shuffle(perm)
        self.assertEqual(canonical_form(g.relabel(perm)), canonical_form(g))

    def test_canonical_graph_has_certificate_rows(self):
        g = Graph.petersen()
        cert, order = canonical_labeling(g)
        self.assertEqual(sorted(order), list(range(10)))
        self.assertEqual(canonical_graph(g).rows, cert)
        self.assertEqual(canonical_form(canonical_graph(g)), canonical_form(g))

    def test_separates_classes_exactly_on_five_vertices(self):
        # Same partition of the labelled graphs into classes as the permutation oracle.
        by_fast: dict = {}
        by_brute: dict = {}
        for g in labelled_graphs(5):
            by_fast.setdefault(canonical_form(g), set()).add(brute_canonical_form(g))
            by_brute.setdefault(brute_canonical_form(g), set()).add(canonical_form(g))
        self.assertEqual(len(by_fast), 34)
        self.assertTrue(all(len(v) == 1 for v in by_fast.values()))
        self.assertTrue(all(len(v) == 1 for v in by_brute.values()))

    def assertSamePartition(self, graphs):
        by_fast: dict = {}
        by_brute: dict = {}
        for g in graphs:
            fast, brute = canonical_form(g), brute_canonical_form(g)
            by_fast.setdefault(fast, set()).add(brute)
            by_brute.setdefault(brute, set()).add(fast)
        self.assertTrue(all(len(v) == 1 for v in by_fast.values()))
        self.assertTrue(all(len(v) == 1 for v in by_brute.values()))
        return len(by_brute)

    def test_separates_classes_exactly_on_six_vertices(self):
        classes = self.assertSamePartition(relabelled_copies(enumerate_graphs(6), random.Random("canon-6")))
        self.assertEqual(classes, 156)

    @unittest.skipUnless(SLOW, "set A2IM_SLOW=1 for the seven-vertex permutation oracle")
    def test_separates_classes_exactly_on_seven_vertices(self):
        classes = self.assertSamePartition(relabelled_copies(enumerate_graphs(7), random.Random("canon-7")))
        self.assertEqual(classes, 1044)

    @settings(max_examples=25, deadline=None)
    @given(small_graphs(min_n=7, max_n=7), st.randoms(use_true_random=False), st.booleans())
    def test_agrees_with_permutation_oracle_on_sampled_pairs(self, g, rnd, toggle):
        perm = list(range(7))
        rnd.shuffle(perm)
        other = g.relabel(perm)
        if toggle:
            u, v = rnd.sample(range(7), 2)
            other = other.without_edge(u, v) if other.has_edge(u, v) else other.with_edge(u, v)
        self.assertEqual(
            canonical_form(g) == canonical_form(other),
            brute_canonical_form(g) == brute_canonical_form(other),
        )

    def test_is_isomorphic(self):
        c5 = Graph.cycle(5)
        self.assertTrue(is_isomorphic(c5, complement(c5)))
        self.assertFalse(is_isomorphic(Graph.cycle(6), Graph.from_edges(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)])))
        self.assertFalse(is_isomorphic(Graph.path(4), Graph.from_edges(4, [(0, 1), (0, 2), (0, 3)])))

    def test_regular_graphs_with_symmetry(self):
        rnd = random.Random("canon")
        for g in (Graph.petersen(), complement(Graph.petersen()), Graph.cycle(8), Graph.complete(7), Graph.empty(6)):
            perm = list(range(g.n))
            rnd.shuffle(perm)
            with self.subTest(graph=g):
                self.assertEqual(canonical_form(g.relabel(perm)), canonical_form(g))

    def test_empty_graph(self):
        self.assertEqual(canonical_form(Graph.empty(0)), (0, ()))


if __name__ == "__main__":
    unittest.main()
