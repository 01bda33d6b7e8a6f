import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import (
    complete,
    path,
    petersen,
    random_degree3_graph,
    relabel_cone,
    rooted_isomorphic,
)
from qgreedy.cones import (
    CensusReport,
    LightCone,
    affected_nodes,
    canonical_key,
    dump_cone,
    enumerate_cones,
    extract_lightcone,
    extract_lightcone_multi,
    key_digest,
    parse_cone,
    tree_ball_size,
)
from qgreedy.graph import generate_regular


class TestExtraction:
    def test_path_depth1(self):
        cone = extract_lightcone(path(5), 2, 1)
        assert cone.dists == (0, 1, 1)
        assert cone.edges == ((0, 1), (0, 2))
        assert cone.source_ids == (2, 1, 3)
        assert cone.is_tree

    def test_k4_depth1_drops_far_edges(self):
        # edges between two distance-1 vertices are acausal at depth 1
        cone = extract_lightcone(complete(4), 0, 1)
        assert cone.size == 4
        assert cone.edges == ((0, 1), (0, 2), (0, 3))
        assert cone.is_tree

    def test_k4_depth2_keeps_them(self):
        cone = extract_lightcone(complete(4), 0, 2)
        assert len(cone.edges) == 6
        assert not cone.is_tree

    def test_petersen_depth2_is_tree(self):
        # girth 5: no cycle closes within the radius-2 causal region
        cone = extract_lightcone(petersen(), 0, 2)
        assert cone.size == 10
        assert cone.is_tree

    def test_respects_alive_mask(self):
        g = path(5)
        g.remove_closed_neighborhood(2)
        cone = extract_lightcone(g, 0, 2)
        assert cone.size == 1
        assert cone.edges == ()

    def test_dead_root_rejected(self):
        g = path(3)
        g.remove_closed_neighborhood(1)
        with pytest.raises(ValueError):
            extract_lightcone(g, 1, 1)

    def test_depth_zero_rejected(self):
        with pytest.raises(ValueError):
            extract_lightcone(path(3), 0, 0)

    def test_in_degrees(self):
        cone = extract_lightcone(complete(4), 0, 1)
        assert cone.in_degrees() == [3, 1, 1, 1]


def test_multi_root_size():
    cone = extract_lightcone_multi(path(5), (1, 2), 1)
    assert sorted(cone.source_ids) == [0, 1, 2, 3]
    assert cone.dists == (0, 0, 1, 1)


class TestAffectedNodes:
    def test_matches_ball(self):
        g = petersen()
        assert affected_nodes(g, 0, 1) == [n for n, _ in g.ball(0, 2)]


class TestCanonicalKeys:
    def test_relabeling_invariance_tree(self):
        rng = np.random.default_rng(0)
        cone = extract_lightcone(petersen(), 0, 2)
        k0 = canonical_key(cone)
        for _ in range(10):
            k1 = canonical_key(relabel_cone(cone, rng))
            assert k1.data == k0.data

    def test_relabeling_invariance_nontree(self):
        rng = np.random.default_rng(1)
        cone = extract_lightcone(complete(4), 0, 2)
        k0 = canonical_key(cone)
        assert not k0.is_tree
        for _ in range(10):
            assert canonical_key(relabel_cone(cone, rng)).data == k0.data

    def test_depth_disambiguates(self):
        # same underlying star, different extraction depth: keys must differ
        g = path(3)
        c1 = extract_lightcone(g, 1, 1)
        c2 = extract_lightcone(g, 1, 2)
        assert c1.dists == c2.dists and c1.edges == c2.edges
        assert canonical_key(c1).data != canonical_key(c2).data

    def test_distinguishes_shapes(self):
        g1 = path(5)
        g2 = path(3)
        k1 = canonical_key(extract_lightcone(g1, 2, 2))
        k2 = canonical_key(extract_lightcone(g2, 1, 2))
        assert k1.data != k2.data

    def test_key_carries_facts(self):
        cone = extract_lightcone(complete(4), 0, 2)
        k = canonical_key(cone)
        assert (k.size, k.edge_count, k.is_tree) == (4, 6, False)
        assert k.hex == k.data.hex()

    def test_matches_brute_force_iso(self):
        rng = np.random.default_rng(5)
        cones = []
        for seed in range(30):
            g = random_degree3_graph(rng, 12)
            root = int(rng.integers(12))
            depth = int(rng.integers(1, 3))
            cones.append(extract_lightcone(g, root, depth))
        for i in range(len(cones)):
            for j in range(i, len(cones)):
                same_key = (
                    canonical_key(cones[i]).data == canonical_key(cones[j]).data
                )
                assert same_key == rooted_isomorphic(cones[i], cones[j])

    @given(seed=st.integers(0, 10**6))
    @settings(max_examples=40, deadline=None)
    def test_relabel_never_changes_key(self, seed):
        rng = np.random.default_rng(seed)
        g = random_degree3_graph(rng, 14)
        cone = extract_lightcone(g, int(rng.integers(14)), 2)
        assert canonical_key(relabel_cone(cone, rng)).data == canonical_key(cone).data


class TestKeyDigest:
    def test_deterministic_and_distinct(self):
        a = key_digest(b"abc")
        assert a == key_digest(b"abc")
        assert a != key_digest(b"abd")
        assert 0 <= a < 2**64


class TestConeDumpFormat:
    def test_round_trip(self):
        cone = extract_lightcone(petersen(), 0, 2)
        back = parse_cone(dump_cone(cone))
        assert back.depth == cone.depth
        assert back.dists == cone.dists
        assert back.edges == cone.edges

    def test_malformed_counts_rejected(self):
        with pytest.raises(ValueError):
            parse_cone("1 3 1\n0 1\n0 1\n")  # 2 labels promised 3
        with pytest.raises(ValueError):
            parse_cone("1 2 2\n0 1\n0 1\n")  # 1 edge line promised 2


class TestCensus:
    def test_depth1_shapes(self):
        report, cones = enumerate_cones(1)
        assert (report.total, report.trees, report.nontrees) == (4, 4, 0)
        # the four cones are exactly the stars of root degree 0..3
        degs = sorted(c.in_degrees()[0] for c in cones)
        assert degs == [0, 1, 2, 3]

    def test_depth2_counts(self):
        report, cones = enumerate_cones(2)
        assert (report.total, report.trees, report.nontrees) == (75, 20, 55)
        keys = {canonical_key(c).data for c in cones}
        assert len(keys) == 75  # all distinct

    def test_extracted_cones_are_enumerated(self):
        # every cone realized by a bounded-degree residual graph must appear
        report, cones = enumerate_cones(2)
        table = {canonical_key(c).data for c in cones}
        rng = np.random.default_rng(9)
        for trial in range(40):
            g = generate_regular(24, 3, int(rng.integers(10**6)))
            for _ in range(int(rng.integers(0, 4))):
                g.remove_closed_neighborhood(int(rng.choice(g.alive_nodes())))
            for v in g.alive_nodes():
                cone = extract_lightcone(g, v, 2)
                assert canonical_key(cone).data in table

    def test_unsupported_depth_rejected(self):
        with pytest.raises(ValueError):
            enumerate_cones(4)
        with pytest.raises(ValueError):
            enumerate_cones(2, d=4)

    def test_report_consistency_guard(self):
        with pytest.raises(ValueError):
            CensusReport(depth=1, total=4, trees=2, nontrees=1)


class TestTreeBallSize:
    def test_degree3_values(self):
        assert [tree_ball_size(p, 3) for p in (1, 2, 3, 4)] == [4, 10, 22, 46]

    def test_degree2_path(self):
        assert tree_ball_size(3, 2) == 7
