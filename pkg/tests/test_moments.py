import itertools
import os
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import cycle
from momenta.algebra import (IDENTITY, StateMonomial, canonicalize_word, conj_key, involution,
                             make_monomial)
from momenta.graph import CommutationGraph
from momenta.moments import (IndexSetTooLarge, build_full_index_set, build_layout,
                             build_theta_index_set, custom_index_set, exchange_phase,
                             full_index_count, objective_key, pair_index_set, real_embedding)
from momenta.representation import haar_sample, realize_graph, state_moment_matrix
from oracles import random_table

GOLDEN = os.path.join(os.path.dirname(__file__), "golden")


def graph_from_table(table, d):
    return CommutationGraph(len(table), d, tuple(map(tuple, table)), d == 2)


def brute_full_set(g, level):
    """Canonical phase-free monomials reachable from raw letter lists of degree <= level."""
    letters = [(i, False) for i in range(g.n)]
    if not g.hermitian:
        letters += [(i, True) for i in range(g.n)]
    seqs = [s for p in range(level + 1) for s in itertools.product(letters, repeat=p)]
    out = set()

    def parts(budget):
        # multisets of non-empty expectation sequences within the budget
        yield []
        for t, s in enumerate(seqs):
            if 0 < len(s) <= budget:
                for rest in parts(budget - len(s)):
                    yield [s] + rest

    for w in seqs:
        for ex in parts(level - len(w)):
            m = make_monomial(canonicalize_word(w, g),
                              [canonicalize_word(e, g) for e in ex], 0, g)
            out.add(m.without_phase())
    return out


class TestThetaIndex:
    @pytest.mark.parametrize("n, k, size", [(5, 1, 6), (5, 2, 16), (3, 3, 8), (4, 2, 11)])
    def test_sizes(self, n, k, size):
        assert len(build_theta_index_set(cycle(n), k)) == size

    def test_k_above_n(self):
        with pytest.raises(ValueError):
            build_theta_index_set(cycle(3), 4)

    def test_structure(self, c5):
        idx = build_theta_index_set(c5, 2)
        assert idx.monomials[0] == IDENTITY
        assert len(set(idx.monomials)) == len(idx)
        for m in idx.monomials[1:]:
            ids = [i for i, _ in m.word]
            assert ids == sorted(set(ids))
            assert m.expectations == tuple(((i, 1),) for i in ids)

    def test_non_hermitian_star(self, qutrit):
        idx = build_theta_index_set(qutrit, 1)
        assert idx.monomials[1] == StateMonomial(((0, 1),), (((0, -1),),))

    def test_nested(self, c5):
        assert build_theta_index_set(c5, 1).is_prefix_of(build_theta_index_set(c5, 2))


class TestFullIndex:
    def test_single_operator(self):
        g = CommutationGraph.from_edges(1, [])
        got = set(build_full_index_set(g, 1).monomials)
        assert got == {IDENTITY, StateMonomial(((0, 1),)), StateMonomial((), (((0, 1),),))}

    def test_two_operators(self):
        g = CommutationGraph.from_edges(2, [(0, 1)])
        assert len(build_full_index_set(g, 1)) == 5

    @pytest.mark.parametrize("table, d, level", [
        ([[0, 1], [1, 0]], 2, 2), ([[0, 1], [1, 0]], 2, 3), ([[0, 0, 1], [0, 0, 1], [1, 1, 0]], 2, 3),
        ([[0, 1], [2, 0]], 3, 2), ([[0]], 4, 3)])
    def test_count_matches_brute_force(self, table, d, level):
        g = graph_from_table(table, d)
        idx = build_full_index_set(g, level)
        brute = brute_full_set(g, level)
        assert set(idx.monomials) == brute
        assert full_index_count(g, level) == len(brute)

    def test_cap(self, c5):
        with pytest.raises(IndexSetTooLarge) as exc:
            build_full_index_set(c5, 4, cap=100)
        assert exc.value.count == full_index_count(c5, 4)

    def test_prefix_property(self, c5):
        assert build_full_index_set(c5, 1).is_prefix_of(build_full_index_set(c5, 2))

    def test_custom_dedup(self, c5):
        a = StateMonomial(((0, 1),))
        idx = custom_index_set([a, StateMonomial(((0, 1),), (), 2), IDENTITY])
        assert idx.monomials == (IDENTITY, a)

    def test_pair_index(self, c5):
        assert len(pair_index_set(c5)) == 1 + 5 + 10


class TestLayout:
    def test_theta1_c5(self, c5):
        lay = build_layout(build_theta_index_set(c5, 1), c5)
        for i in range(1, 6):
            assert lay.pos_class[0, i] == lay.pos_class[i, i]
            assert lay.pos_phase[0, i] == lay.pos_phase[i, i] == 0
        assert lay.class_keys[lay.pos_class[0, 0]] == ()
        rl = real_embedding(lay)
        pinned = rl.pinned()
        for i, j in c5.edges():
            c = lay.pos_class[i + 1, j + 1]
            assert lay.conjugate[c] == (c, 2)
            assert pinned[c] == 0

    def test_theta1_reproduces_lovasz_constraints(self):
        rng = random.Random(5)
        for _ in range(10):
            n = rng.randint(2, 6)
            g = CommutationGraph.from_edges(
                n, [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.5])
            lay = build_layout(build_theta_index_set(g, 1), g)
            pinned = real_embedding(lay).pinned()
            assert pinned[lay.pos_class[0, 0]] == 1
            for i in range(n):
                assert lay.pos_class[0, i + 1] == lay.pos_class[i + 1, i + 1]
            for i in range(n):
                for j in range(n):
                    c = lay.pos_class[i + 1, j + 1]
                    assert (pinned.get(c) == 0) == bool(g.exponents[i][j])

    def test_objective_targets_diagonal(self, c5):
        lay = build_layout(build_theta_index_set(c5, 2), c5)
        for i, (c, w) in enumerate(lay.objective):
            assert w == 1.0 and lay.class_keys[c] == objective_key(c5, i)
            assert lay.pos_class[i + 1, i + 1] == c

    def test_exchange_relations_path(self):
        g = CommutationGraph.from_edges(3, [(0, 1), (1, 2)])
        idx = build_theta_index_set(g, 2)
        lay = build_layout(idx, g)
        for i, j in itertools.combinations(range(3), 2):
            u_ij = StateMonomial(((i, 1), (j, 1)), (((i, 1),), ((j, 1),)))
            u_ji = make_monomial([j, i], [[i], [j]], 0, g)
            for v in idx.monomials:
                c1, k1, p1 = lay.entry(u_ij, v)
                c2, k2, p2 = lay.entry(u_ji, v)
                assert k1 == k2 and c1 is not None
                assert (p2 - p1) % 4 == (2 * g.exponents[j][i]) % 4

    def test_principal_sublayout(self, c5):
        a = build_layout(build_theta_index_set(c5, 1), c5)
        b = build_layout(build_theta_index_set(c5, 2), c5)
        m = a.size
        for r in range(m):
            for c in range(m):
                assert a.class_keys[a.pos_class[r, c]] == b.class_keys[b.pos_class[r, c]]
                assert a.pos_phase[r, c] == b.pos_phase[r, c]

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_conjugate_pairs(self, d):
        g = graph_from_table(random_table(3, d, random.Random(d)), d)
        lay = build_layout(build_full_index_set(g, 2), g)
        for c, key in enumerate(lay.class_keys):
            cc, ph = lay.conjugate[c]
            star = involution(StateMonomial((), key), g)
            assert star == StateMonomial((), lay.class_keys[cc], ph)
            assert conj_key(key, g) == (lay.class_keys[cc], ph)
        m = lay.size
        for r in range(m):
            for c in range(m):
                cc, ph = lay.conjugate[lay.pos_class[r, c]]
                assert lay.pos_class[c, r] == cc
                assert (lay.pos_phase[c, r] + lay.pos_phase[r, c] - ph) % (2 * d) == 0

    def test_dump_golden(self):
        g = CommutationGraph.from_edges(3, [(0, 1), (1, 2)])
        got = build_layout(build_theta_index_set(g, 1), g).dump()
        with open(os.path.join(GOLDEN, "theta1_path3.txt")) as fh:
            assert got == fh.read()


class TestExchangePhase:
    def test_adjacent(self):
        g = CommutationGraph.from_edges(3, [(0, 1)])
        assert exchange_phase([2], [0], 0, 1, g) == 0
        assert exchange_phase([1], [0], 0, 1, g) == 2

    def test_range(self, c5):
        with pytest.raises(IndexError):
            exchange_phase([0], [1], 1, 2, c5)

    def test_matches_canonicalization(self, c5):
        rng = random.Random(11)
        for _ in range(200):
            k = rng.randint(1, 3)
            rows = [rng.randrange(5) for _ in range(k)]
            cols = [rng.randrange(5) for _ in range(k)]
            seq = list(reversed(rows)) + cols
            for a, b in itertools.combinations(range(len(seq)), 2):
                swapped = list(seq)
                swapped[a], swapped[b] = swapped[b], swapped[a]
                w0 = canonicalize_word(seq, c5)
                w1 = canonicalize_word(swapped, c5)
                assert w0.powers == w1.powers
                assert (w1.phase - w0.phase) % 4 == exchange_phase(rows, cols, a, b, c5)


class TestRealEmbedding:
    def test_hermitian_compact(self, c5):
        lay = build_layout(build_theta_index_set(c5, 2), c5)
        rl = real_embedding(lay)
        assert rl.compact and rl.size == lay.size
        assert all(part in ("re", "ray") for _, part in rl.labels)
        full = real_embedding(lay, compact=False)
        assert full.size == 2 * lay.size
        A, b = rl.objective_terms()
        assert A.shape[0] == 5 and not b.any()

    def test_compact_rejected_for_complex(self, qutrit):
        lay = build_layout(build_theta_index_set(qutrit, 1), qutrit)
        with pytest.raises(ValueError):
            real_embedding(lay, compact=True)
        assert not real_embedding(lay).compact

    def test_rotation_block(self):
        from momenta.moments import IndexSet, MomentLayout
        from momenta.sdp import assemble
        g = CommutationGraph.from_edges(1, [])
        lay = MomentLayout(g, IndexSet("custom", 0, (IDENTITY,)), [()], np.array([[0]]),
                           np.array([[1]]), [(0, 0)], [], {(): 0})
        p = assemble(real_embedding(lay, compact=False))
        assert np.allclose(p.F0, [[0, -1], [1, 0]])

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_class_values_roundtrip(self, d):
        g = graph_from_table(random_table(3, d, random.Random(d + 10)), d)
        lay = build_layout(build_theta_index_set(g, 2), g)
        rl = real_embedding(lay)
        x = np.random.default_rng(d).normal(size=rl.num_vars)
        M = rl.complex_matrix(x)
        assert np.allclose(M, M.conj().T)


class TestStateOracle:
    @settings(max_examples=25, deadline=None)
    @given(st.integers(1, 5), st.sampled_from([2, 3, 4]), st.integers(1, 2), st.integers(0, 2 ** 31))
    def test_state_moments_feasible(self, n, d, k, seed):
        rng = random.Random(seed)
        g = graph_from_table(random_table(n, d, rng), d)
        if d ** n > 256:
            n = 3
            g = graph_from_table(random_table(n, d, rng), d)
        k = min(k, n)
        idx = build_theta_index_set(g, k)
        lay = build_layout(idx, g)
        strings = realize_graph(g)
        psi = haar_sample(strings[0].dim, 1, seed % 1000)[0]
        M = state_moment_matrix(idx, strings, psi)
        ph = np.exp(1j * np.pi * lay.pos_phase / d)
        z = M / ph
        for c in range(lay.num_classes):
            vals = z[lay.pos_class == c]
            assert np.max(np.abs(vals - vals[0])) < 1e-9
        assert abs(z[0, 0] - 1) < 1e-9
        assert np.linalg.eigvalsh((M + M.conj().T) / 2).min() > -1e-9
