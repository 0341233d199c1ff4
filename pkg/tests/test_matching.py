import time
from functools import lru_cache

import numpy as np
import pytest

from urllc_alloc import BipartiteGraph, Matching, max_weight_matching


def brute_force(n_left, n_right, edges):
    """Exhaustive optimum + lexicographically smallest optimal pair list.

    DP over left nodes with a bitmask of used right nodes, then greedy
    lexicographic fixing against the DP value: match the current left node to
    the smallest right preserving the optimum, else leave it unmatched.
    """
    adj = {l: sorted((r, w) for (ll, r, w) in edges if ll == l) for l in range(n_left)}

    @lru_cache(maxsize=None)
    def best(l, mask):
        if l == n_left:
            return 0
        b = best(l + 1, mask)
        for r, w in adj[l]:
            if not mask & (1 << r):
                b = max(b, w + best(l + 1, mask | (1 << r)))
        return b

    total = best(0, 0)
    pairs, mask, fixed_w = [], 0, 0
    for l in range(n_left):
        for r, w in adj[l]:
            if not mask & (1 << r) and fixed_w + w + best(l + 1, mask | (1 << r)) == total:
                pairs.append((l, r))
                mask |= 1 << r
                fixed_w += w
                break
    best.cache_clear()
    return total, pairs


def random_graph(rng, max_side=7, w_hi=100):
    n_l = int(rng.integers(1, max_side + 1))
    n_r = int(rng.integers(1, max_side + 1))
    edges = []
    for l in range(n_l):
        for r in range(n_r):
            if rng.random() < 0.55:
                edges.append((l, r, int(rng.integers(1, w_hi + 1))))
    return BipartiteGraph(n_l, n_r, edges)


def check_valid(g: BipartiteGraph, m: Matching):
    lefts = [l for l, _ in m.pairs]
    rights = [r for _, r in m.pairs]
    assert len(set(lefts)) == len(lefts)
    assert len(set(rights)) == len(rights)
    edge_set = {(l, r): w for l, r, w in g.edges}
    assert all(p in edge_set for p in m.pairs)
    assert m.total_weight == sum(edge_set[p] for p in m.pairs)
    assert m.pairs == sorted(m.pairs)


def test_single_edge():
    m = max_weight_matching(BipartiteGraph(1, 1, [(0, 0, 5)]))
    assert m.pairs == [(0, 0)] and m.total_weight == 5


def test_two_by_two_diagonal():
    g = BipartiteGraph(2, 2, [(0, 0, 3), (0, 1, 1), (1, 0, 1), (1, 1, 3)])
    m = max_weight_matching(g)
    assert m.pairs == [(0, 0), (1, 1)] and m.total_weight == 6


def test_empty_edge_set():
    m = max_weight_matching(BipartiteGraph(3, 4, []))
    assert m.pairs == [] and m.total_weight == 0


def test_prefers_two_small_edges_over_one_big():
    g = BipartiteGraph(2, 2, [(0, 0, 6), (0, 1, 3), (1, 0, 4)])
    m = max_weight_matching(g)
    assert m.total_weight == 7 and m.pairs == [(0, 1), (1, 0)]


def test_tie_break_is_lexicographic():
    # both diagonals weigh 2; {(0,0),(1,1)} is the smaller pair list
    g = BipartiteGraph(2, 2, [(0, 0, 1), (0, 1, 1), (1, 0, 1), (1, 1, 1)])
    m = max_weight_matching(g)
    assert m.pairs == [(0, 0), (1, 1)]
    # matching left 0 at equal weight beats leaving it out
    g = BipartiteGraph(2, 1, [(0, 0, 2), (1, 0, 2)])
    m = max_weight_matching(g)
    assert m.pairs == [(0, 0)]


def test_oracle_weight_equality():
    rng = np.random.default_rng(11)
    for _ in range(300):
        g = random_graph(rng)
        m = max_weight_matching(g)
        check_valid(g, m)
        total, _ = brute_force(g.n_left, g.n_right, g.edges)
        assert m.total_weight == total


def test_oracle_lexicographic_equality_under_heavy_ties():
    # small weight range forces many optimal matchings
    rng = np.random.default_rng(17)
    for _ in range(400):
        g = random_graph(rng, max_side=6, w_hi=4)
        m = max_weight_matching(g)
        check_valid(g, m)
        total, pairs = brute_force(g.n_left, g.n_right, g.edges)
        assert m.total_weight == total
        assert m.pairs == pairs, (g.edges, m.pairs, pairs)


def test_unbalanced_sides():
    rng = np.random.default_rng(23)
    for n_l, n_r in [(2, 9), (9, 2), (1, 7), (7, 1)]:
        for _ in range(40):
            edges = [
                (l, r, int(rng.integers(1, 6)))
                for l in range(n_l)
                for r in range(n_r)
                if rng.random() < 0.6
            ]
            g = BipartiteGraph(n_l, n_r, edges)
            m = max_weight_matching(g)
            check_valid(g, m)
            total, pairs = brute_force(n_l, n_r, edges)
            assert m.total_weight == total
            assert m.pairs == pairs


def test_result_independent_of_edge_order():
    rng = np.random.default_rng(31)
    for _ in range(60):
        g = random_graph(rng, max_side=6, w_hi=3)
        m1 = max_weight_matching(g)
        perm = list(g.edges)
        rng.shuffle(perm)
        m2 = max_weight_matching(BipartiteGraph(g.n_left, g.n_right, perm))
        assert m1.pairs == m2.pairs


def test_malformed_graphs_rejected():
    with pytest.raises(ValueError):
        BipartiteGraph(2, 2, [(0, 2, 1)])
    with pytest.raises(ValueError):
        BipartiteGraph(2, 2, [(2, 0, 1)])
    with pytest.raises(ValueError):
        BipartiteGraph(2, 2, [(0, 0, 0)])
    with pytest.raises(ValueError):
        BipartiteGraph(2, 2, [(0, 0, 1), (0, 0, 2)])
    with pytest.raises(ValueError):
        BipartiteGraph(2, 2, [(0, 0, 1.5)])


def test_dense_200x200_under_one_second():
    rng = np.random.default_rng(41)
    n = 200
    edges = [(l, r, int(w)) for (l, r), w in np.ndenumerate(rng.integers(1, 101, (n, n)))]
    g = BipartiteGraph(n, n, edges)
    t0 = time.perf_counter()
    m = max_weight_matching(g)
    elapsed = time.perf_counter() - t0
    check_valid(g, m)
    assert len(m.pairs) == n  # dense positive weights saturate both sides
    assert elapsed < 1.0, f"200x200 solve took {elapsed:.2f}s"
