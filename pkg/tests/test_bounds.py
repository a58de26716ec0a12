import json
import math
import random

import pytest

from conftest import HUB, HUB_THETA1, HUB_THETA2, complete, cycle, edgeless, hub
from momenta.bounds import (REPORT_SCHEMA, BoundOptions, cut_holes, full_report, lovasz_reference,
                            lower_bound, nu, solve_nu, theta, uncertainty_constant)
from momenta.graph import CommutationGraph
from momenta.moments import IndexSetTooLarge, build_full_index_set
from oracles import brute_alpha, cycle_theta, lovasz_min_eig, random_edges


class TestTheta:
    def test_c5_ladder(self, c5):
        assert theta(c5, 1) == pytest.approx(math.sqrt(5), abs=1e-6)
        assert theta(c5, 2) == pytest.approx(2, abs=1e-6)

    @pytest.mark.parametrize("key", sorted(HUB))
    def test_hub_graphs(self, key):
        g = hub(key)
        assert theta(g, 1) == pytest.approx(HUB_THETA1[key], abs=1e-3)
        assert theta(g, 2) == pytest.approx(HUB_THETA2[key], abs=1e-3)

    def test_c7_cut(self):
        g = cycle(7)
        assert theta(g, 1) == pytest.approx(cycle_theta(7), abs=1e-6)
        assert theta(g, 1, cuts=True) <= 3 + 1e-6

    def test_chsh_square(self):
        assert theta(cycle(4), 1) == pytest.approx(2, abs=1e-6)

    def test_qutrit_levels(self, qutrit):
        t1, t2 = theta(qutrit, 1), theta(qutrit, 2)
        assert 1 - 1e-6 <= t2 <= t1 + 1e-6

    def test_levels_decrease(self):
        g = hub("s4")
        vals = [theta(g, k) for k in (1, 2, 3)]
        assert all(b <= a + 1e-6 for a, b in zip(vals, vals[1:]))


class TestCuts:
    def test_auto_requires_d2_and_holes(self, qutrit):
        assert cut_holes(cycle(5), "auto")
        assert cut_holes(complete(4), "auto") == []
        assert cut_holes(qutrit, "auto") == []
        with pytest.raises(ValueError):
            cut_holes(qutrit, "on")

    def test_off(self):
        assert cut_holes(cycle(7), "off") == []

    @pytest.mark.parametrize("m", [2, 3, 4])
    def test_hole_induction(self, m):
        assert theta(cycle(2 * m + 1), 1, cuts=True) <= m + 1e-6

    def test_cut_is_sound_on_samples(self):
        # every realized state satisfies the cut, so the cut bound stays above any sample
        g = hub("s0")
        bound = theta(g, 1, cuts=True)
        assert bound >= lower_bound(g, samples=256, seed=3)["polished"] - 1e-6


class TestNu:
    def test_single_vertex(self):
        assert nu(CommutationGraph.from_edges(1, []), 1) == pytest.approx(1, abs=1e-6)

    def test_k3(self, k3):
        assert nu(k3, 2) <= 1 + 1e-6

    def test_c5_with_theta(self, c5):
        assert nu(c5, 2, include_theta=2) <= 2 + 1e-4

    def test_superset_monotone(self, c5):
        a = nu(c5, 1)
        b = nu(c5, 1, include_theta=2)
        assert b <= a + 1e-6

    def test_cap(self, c5):
        with pytest.raises(IndexSetTooLarge):
            solve_nu(c5, 3, cap=50)


class TestUncertainty:
    @pytest.mark.parametrize("n, ub, want", [(3, 1.0, 2.0), (5, 2.0, 3.0), (2, 5.0, 0.0)])
    def test_values(self, n, ub, want):
        assert uncertainty_constant(edgeless(n), ub) == want

    def test_negative(self):
        with pytest.raises(ValueError):
            uncertainty_constant(edgeless(2), -0.1)


class TestLovaszReference:
    def test_c5(self, c5):
        assert lovasz_reference(c5) == pytest.approx(math.sqrt(5), abs=1e-6)

    @pytest.mark.parametrize("n", [2, 4, 6])
    def test_cliques(self, n):
        assert lovasz_reference(complete(n)) == pytest.approx(1, abs=1e-6)

    def test_agrees_with_min_eig_oracle(self):
        rng = random.Random(17)
        for _ in range(5):
            n = rng.randint(3, 7)
            edges = random_edges(n, rng)
            g = CommutationGraph.from_edges(n, edges)
            assert lovasz_reference(g) == pytest.approx(lovasz_min_eig(n, edges), abs=1e-5)

    def test_rejects_qudits(self, qutrit):
        with pytest.raises(ValueError):
            lovasz_reference(qutrit)


class TestReport:
    def test_c5(self, c5):
        rep = full_report(c5, graph_id="C5")
        assert rep.alpha == 2 and rep.certified == "alpha_match"
        assert rep.theta[1] == pytest.approx(math.sqrt(5), abs=1e-4)
        assert rep.theta_cut[1] == pytest.approx(2, abs=1e-4)
        assert rep.upper_bound == pytest.approx(2, abs=1e-4)
        assert rep.uncertainty_constant == pytest.approx(3, abs=1e-4)
        assert [h.vertices for h in rep.cuts_applied] == [(0, 1, 2, 3, 4)]
        assert rep.block_sizes == {"theta1": 6, "theta2": 16}

    def test_t2(self):
        rep = full_report(hub("s0"))
        assert rep.alpha == 3 and rep.certified == "alpha_match"
        assert rep.beta_interval[0] == pytest.approx(3, abs=1e-6)

    def test_edgeless(self):
        rep = full_report(edgeless(4))
        assert rep.lower_bound == pytest.approx(4, abs=1e-9)
        assert rep.upper_bound == pytest.approx(4, abs=1e-5)
        assert rep.uncertainty_constant == pytest.approx(0, abs=1e-5)

    def test_qutrit_not_certified(self, qutrit):
        rep = full_report(qutrit)
        assert rep.lower_bound == pytest.approx(1, abs=1e-6)
        assert rep.cuts_applied == [] and not rep.errors
        assert rep.certified == "none"

    def test_nu_levels_and_rank(self, k3):
        rep = full_report(k3, BoundOptions(nu_max=2))
        assert set(rep.nu) == {1, 2}
        assert rep.block_sizes["nu1"] == len(build_full_index_set(k3, 1))

    def test_index_cap_recorded(self, c5):
        rep = full_report(c5, BoundOptions(nu_max=3, index_cap=40))
        assert "nu1" in rep.errors or "nu2" in rep.errors or "nu3" in rep.errors

    def test_serializable(self, c5):
        data = json.loads(json.dumps(full_report(c5).to_dict()))
        assert data["schema"] == REPORT_SCHEMA
        w = data["alpha_witness"]
        assert len(w) == 2 and not c5.exponents[w[0]][w[1]]

    def test_deterministic(self, c5):
        a = full_report(c5, BoundOptions(seed=4)).to_dict()
        b = full_report(c5, BoundOptions(seed=4)).to_dict()
        assert a == b

    @pytest.mark.parametrize("seed", range(6))
    def test_invariants(self, seed):
        rng = random.Random(seed)
        n = rng.randint(2, 6)
        edges = random_edges(n, rng)
        g = CommutationGraph.from_edges(n, edges)
        rep = full_report(g, BoundOptions(samples=16, seed=seed))
        adj = [[False] * n for _ in range(n)]
        for i, j in edges:
            adj[i][j] = adj[j][i] = True
        assert rep.alpha == brute_alpha(n, adj)
        lo, hi = rep.beta_interval
        assert rep.alpha - 1e-9 <= lo <= hi + 1e-12
        assert hi <= min(rep.theta.values()) + 1e-9
        if 2 in rep.theta:
            assert rep.theta[2] <= rep.theta[1] + 1e-6
        assert rep.theta[1] <= n + 1e-6
        if rep.certified == "alpha_match":
            assert hi - rep.alpha <= 1e-4

    def test_sandwich_cut_soundness(self):
        # lower bound <= cut value <= uncut value for every hole-containing graph
        for g in (cycle(5), cycle(7), hub("s3"), hub("s5")):
            rep = full_report(g, BoundOptions(samples=64))
            assert rep.lower_bound <= rep.theta_cut[1] + 1e-6
            assert rep.theta_cut[1] <= rep.theta[1] + 1e-6
