import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import complete, random_degree3_graph
from qgreedy.angles import vertex_cone
from qgreedy.circuits import AngleSchedule, build_circuit
from qgreedy.cones import canonical_key, enumerate_cones, extract_lightcone
from qgreedy.engines import (
    ExpectationCache,
    ExpectationRecord,
    evaluate_cone,
    expectation_contract,
    expectation_p1_analytic,
    expectation_p1_edge,
    expectation_statevector,
    sample_shots,
)
from qgreedy.errors import ContractionBudgetExceeded, StatevectorCapExceeded


def sched(gammas, betas, lam=1.0, degree=3):
    return AngleSchedule(
        depth=len(gammas), degree=degree, lam=lam,
        gammas=tuple(gammas), betas=tuple(betas),
    )


class TestClosedForms:
    # frozen from the shipped depth-1 optimum: advice strictly decreasing in
    # degree, which is what reduces the solver to min-degree greedy
    def test_star_values_at_shipped_optimum(self, sched_p1):
        g1, b1, lam = sched_p1.gammas[0], sched_p1.betas[0], sched_p1.lam
        vals = [
            expectation_p1_analytic(k, (lam * k - 2.0) / 4.0, g1, b1, lam)
            for k in range(4)
        ]
        assert vals[0] == pytest.approx(0.5991689338879815, abs=1e-12)
        assert vals[1] == pytest.approx(0.29958446694399077, abs=1e-12)
        assert vals[2] == pytest.approx(0.0, abs=1e-12)
        assert vals[3] == pytest.approx(-0.2316361722007347, abs=1e-12)
        assert vals == sorted(vals, reverse=True)

    @given(
        gamma=st.floats(-2.0, 2.0),
        beta=st.floats(-2.0, 2.0),
        lam=st.sampled_from([1.0, 2.0]),
        degree=st.integers(0, 3),
    )
    @settings(max_examples=80, deadline=None)
    def test_vertex_form_matches_statevector(self, gamma, beta, lam, degree):
        _, cones = enumerate_cones(1)
        cone = next(c for c in cones if c.in_degrees()[0] == degree)
        s = sched((gamma,), (beta,), lam=lam)
        dense = expectation_statevector(build_circuit(cone, s))
        h = (lam * degree - 2.0) / 4.0
        closed = expectation_p1_analytic(degree, h, gamma, beta, lam)
        assert dense == pytest.approx(closed, abs=1e-10)

    @given(
        gamma=st.floats(-2.0, 2.0),
        beta=st.floats(-2.0, 2.0),
        du=st.integers(1, 3),
        dv=st.integers(1, 3),
    )
    @settings(max_examples=40, deadline=None)
    def test_edge_form_matches_statevector(self, gamma, beta, du, dv):
        # tree cone around one edge with du-1 / dv-1 extra leaves
        edges = [(0, 1)]
        nxt = 2
        for _ in range(du - 1):
            edges.append((0, nxt))
            nxt += 1
        for _ in range(dv - 1):
            edges.append((1, nxt))
            nxt += 1
        from qgreedy.cones import LightCone

        dists = (0, 0) + (1,) * (nxt - 2)
        cone = LightCone(depth=1, dists=dists, edges=tuple(sorted(edges)))
        lam = 1.0
        s = sched((gamma,), (beta,), lam=lam)
        dense = expectation_statevector(
            build_circuit(cone, s, observable=(0, 1))
        )
        closed = expectation_p1_edge(
            du, dv, (lam * du - 2.0) / 4.0, (lam * dv - 2.0) / 4.0,
            gamma, beta, lam,
        )
        assert dense == pytest.approx(closed, abs=1e-10)


class TestStatevector:
    def test_cap_enforced(self):
        cone = extract_lightcone(complete(4), 0, 2)
        with pytest.raises(StatevectorCapExceeded):
            expectation_statevector(build_circuit(cone, sched((0.1, 0.1), (0.1, 0.1))), cap=3)

    def test_zero_angles_give_zero(self):
        # |+...+> state: <Z> = 0 exactly
        cone = extract_lightcone(complete(4), 0, 2)
        circ = build_circuit(cone, sched((0.0, 0.0), (0.0, 0.0)))
        assert expectation_statevector(circ) == pytest.approx(0.0, abs=1e-15)

    def test_range(self):
        rng = np.random.default_rng(0)
        for _ in range(10):
            g = random_degree3_graph(rng, 10)
            cone = extract_lightcone(g, 0, 2)
            s = sched(rng.uniform(-2, 2, 2), rng.uniform(-2, 2, 2))
            v = expectation_statevector(build_circuit(cone, s))
            assert -1.0 - 1e-12 <= v <= 1.0 + 1e-12


class TestContraction:
    def test_agrees_with_statevector_census_sample(self, sched_p2):
        _, cones = enumerate_cones(2)
        for cone in cones[::4]:
            circ = build_circuit(cone, sched_p2)
            assert expectation_contract(circ) == pytest.approx(
                expectation_statevector(circ), abs=1e-12
            )

    def test_edge_observable(self, sched_p2):
        cone = extract_lightcone(complete(4), 0, 2)
        circ = build_circuit(cone, sched_p2, observable=(0, 1))
        assert expectation_contract(circ) == pytest.approx(
            expectation_statevector(circ), abs=1e-12
        )

    def test_tree_beyond_statevector_cap(self, sched_p3):
        # the depth-3 bulk tree: 22 qubits, trivially contractable
        cone = vertex_cone(3, 3)
        circ = build_circuit(cone, sched_p3)
        v = expectation_contract(circ)
        assert -1.0 <= v <= 1.0
        assert v == pytest.approx(expectation_statevector(circ), abs=1e-10)

    def test_budget_enforced(self, sched_p2):
        cone = extract_lightcone(complete(4), 0, 2)
        circ = build_circuit(cone, sched_p2)
        with pytest.raises(ContractionBudgetExceeded):
            expectation_contract(circ, budget=16)

    @given(seed=st.integers(0, 10**6))
    @settings(max_examples=25, deadline=None)
    def test_random_cone_agreement(self, seed):
        rng = np.random.default_rng(seed)
        g = random_degree3_graph(rng, 14)
        cone = extract_lightcone(g, int(rng.integers(14)), 2)
        s = sched(rng.uniform(-2, 2, 2), rng.uniform(-2, 2, 2))
        circ = build_circuit(cone, s)
        assert expectation_contract(circ) == pytest.approx(
            expectation_statevector(circ), abs=1e-10
        )


class TestSampleShots:
    def test_extremes_are_exact(self):
        assert sample_shots(1.0, 50, 0) == 1.0
        assert sample_shots(-1.0, 50, 0) == -1.0

    def test_seed_reproducible(self):
        a = sample_shots(0.3, 100, 42)
        assert a == sample_shots(0.3, 100, 42)
        assert -1.0 <= a <= 1.0

    def test_unbiased(self):
        rng = np.random.default_rng(0)
        draws = [sample_shots(0.25, 64, rng) for _ in range(4000)]
        assert np.mean(draws) == pytest.approx(0.25, abs=0.01)

    def test_domain_checks(self):
        with pytest.raises(ValueError):
            sample_shots(1.5, 10, 0)
        with pytest.raises(ValueError):
            sample_shots(0.0, 0, 0)


class TestCacheAndRouting:
    def test_cache_round_trip(self, sched_p2):
        cache = ExpectationCache(sched_p2)
        rec = ExpectationRecord(value=0.5, engine="statevector", cone_size=4)
        cache.insert(b"k", rec)
        assert cache.get(b"k") == rec
        assert cache.get(b"other") is None
        assert len(cache) == 1

    def test_cache_schedule_mismatch_rejected(self, sched_p1, sched_p2):
        cache = ExpectationCache(sched_p1)
        cone = extract_lightcone(complete(4), 0, 2)
        with pytest.raises(ValueError):
            evaluate_cone(cone, sched_p2, cache)

    def test_cache_hit_skips_recompute(self, sched_p2):
        cache = ExpectationCache(sched_p2)
        cone = extract_lightcone(complete(4), 0, 2)
        r1, k1 = evaluate_cone(cone, sched_p2, cache)
        # poison the store; a hit must return the stored record untouched
        cache.insert(k1.data, ExpectationRecord(123.0, "statevector", 4))
        r2, _ = evaluate_cone(cone, sched_p2, cache)
        assert r2.value == 123.0

    def test_persistence(self, sched_p2, tmp_path):
        cache = ExpectationCache(sched_p2, directory=str(tmp_path))
        cone = extract_lightcone(complete(4), 0, 2)
        rec, key = evaluate_cone(cone, sched_p2, cache)
        cache.save()
        fresh = ExpectationCache(sched_p2, directory=str(tmp_path))
        assert fresh.get(key.data) == rec

    def test_depth1_routes_analytic(self, sched_p1):
        cone = extract_lightcone(complete(4), 0, 1)
        rec, _ = evaluate_cone(cone, sched_p1)
        assert rec.engine == "analytic"
        circ = build_circuit(cone, sched_p1)
        assert rec.value == pytest.approx(expectation_statevector(circ), abs=1e-10)

    def test_small_nontree_routes_dense(self, sched_p2):
        cone = extract_lightcone(complete(4), 0, 2)
        rec, _ = evaluate_cone(cone, sched_p2)
        assert rec.engine == "statevector"

    def test_large_tree_routes_contraction(self, sched_p3):
        rec, _ = evaluate_cone(vertex_cone(3, 3), sched_p3)
        assert rec.engine == "contraction"
        assert rec.cone_size == 22

    def test_budget_falls_back_to_dense(self, sched_p2):
        cone = extract_lightcone(complete(4), 0, 2)
        rec, _ = evaluate_cone(cone, sched_p2, statevector_cap=24,
                               contraction_budget=16)
        assert rec.engine == "statevector"

    def test_no_engine_fits_raises(self, sched_p2):
        cone = extract_lightcone(complete(4), 0, 2)
        with pytest.raises(ContractionBudgetExceeded):
            evaluate_cone(cone, sched_p2, statevector_cap=3,
                          contraction_budget=16)

    def test_routing_values_agree(self, sched_p2):
        # one cone through all three paths via forced routing knobs
        cone = extract_lightcone(complete(4), 0, 2)
        dense, _ = evaluate_cone(cone, sched_p2)
        contracted, _ = evaluate_cone(cone, sched_p2, statevector_cap=3)
        assert contracted.engine == "contraction"
        assert dense.value == pytest.approx(contracted.value, abs=1e-12)

    def test_returned_key_is_canonical(self, sched_p1):
        cone = extract_lightcone(complete(4), 0, 1)
        _, key = evaluate_cone(cone, sched_p1)
        assert key.data == canonical_key(cone).data
