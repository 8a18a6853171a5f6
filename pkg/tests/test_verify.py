import itertools
import math

import numpy as np
import pytest
import scipy.stats as stats

from treesplice.generators import (
    complete_graph,
    cycle_graph,
    gnp_graph,
    prism_graph,
    random_regular_graph,
    wheel_graph,
)
from treesplice.graph import Graph
from treesplice.linalg import effective_resistance, spanning_tree_count
from treesplice.sampler import _batch_cover_walks, tree_edge_frequencies
from treesplice.seeds import substream
from treesplice.verify import (
    bernoulli_se,
    chernoff_tail_check,
    coupling_distance_estimate,
    enumerate_trees,
    min_tree_edge_probability,
    negative_correlation_check,
)


def chord_cycle():
    """C_5 plus one chord."""
    return Graph(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4), (0, 2)])


CORPUS = {
    "K4": complete_graph(4),
    "C5": cycle_graph(5),
    "C5+chord": chord_cycle(),
    "W5": wheel_graph(5),
    "prism": prism_graph(),
}


def test_enumeration_matches_matrix_tree_everywhere():
    for name, g in CORPUS.items():
        trees = enumerate_trees(g)
        assert len(trees) == spanning_tree_count(g), name
        as_sets = {frozenset(t.edge_ids().tolist()) for t in trees}
        assert len(as_sets) == len(trees), f"{name}: duplicate tree emitted"
        for t in trees[:10]:
            t.validate(g)


def test_enumeration_matches_on_random_graphs():
    for s in range(5):
        g = gnp_graph(7, 0.55, seed=40 + s)
        if g.m > 20 or not g.is_connected():
            continue
        assert len(enumerate_trees(g)) == spanning_tree_count(g)


def test_enumeration_cap():
    with pytest.raises(ValueError, match="20"):
        enumerate_trees(complete_graph(7))


def test_exact_marginals_match_effective_resistance():
    for name, g in CORPUS.items():
        trees = enumerate_trees(g)
        total = len(trees)
        for eid in range(g.m):
            marginal = sum(eid in set(t.edge_ids().tolist()) for t in trees) / total
            assert marginal == pytest.approx(
                effective_resistance(g, eid), abs=1e-9
            ), f"{name} edge {eid}"


def test_negative_correlation_exact_on_all_pairs():
    for name, g in CORPUS.items():
        for e1, e2 in itertools.combinations(range(g.m), 2):
            rep = negative_correlation_check(g, [e1, e2], 0, 0)
            assert rep.exact
            assert rep.inclusion_ok, f"{name} ({e1},{e2})"
            assert rep.exclusion_ok, f"{name} ({e1},{e2})"


def test_negative_correlation_k4_disjoint_pair_values():
    g = complete_graph(4)
    rep = negative_correlation_check(g, [(0, 1), (2, 3)], 0, 0)
    assert rep.joint == pytest.approx(4 / 16)
    assert rep.marginals == (0.5, 0.5)
    assert rep.joint == pytest.approx(rep.product)  # equality at this pair


def test_negative_correlation_single_edge_degenerate():
    rep = negative_correlation_check(complete_graph(4), [0], 0, 0)
    assert rep.joint == rep.product
    assert rep.inclusion_ok and rep.exclusion_ok


def test_negative_correlation_monte_carlo_on_larger_graph():
    g = random_regular_graph(30, 3, seed=3)
    rep = negative_correlation_check(g, [0, 10], 200_000, seed=5)
    assert not rep.exact
    assert rep.trials == 200_000
    assert rep.inclusion_ok and rep.exclusion_ok
    assert rep.margin > 0


def test_negative_correlation_input_validation():
    g = complete_graph(4)
    with pytest.raises(ValueError):
        negative_correlation_check(g, [], 10, 0)
    with pytest.raises(ValueError):
        negative_correlation_check(g, [0, 1, 2, 3, 4], 10, 0)


def test_chernoff_tail_small_regular_graph():
    g = random_regular_graph(64, 3, seed=11)
    assert g.is_connected()
    pick = substream(1, "cut")
    subset = np.sort(pick.choice(64, size=32, replace=False)).tolist()
    rep = chernoff_tail_check(g, subset, 50_000, seed=2)
    assert rep.passed
    assert len(rep.lambdas) == 4
    assert all(b <= 1.0 for b in rep.bounds)
    assert rep.trials == 50_000


def test_chernoff_mean_inclusion_on_k16():
    g = complete_graph(16)
    rep = chernoff_tail_check(g, list(range(8)), 50_000, seed=3)
    se = bernoulli_se(rep.p_bar, 50_000 * rep.cut_size)
    assert abs(rep.p_bar - 2 / 16) <= 4 * se


def test_chernoff_requires_enough_trials():
    with pytest.raises(ValueError):
        chernoff_tail_check(complete_graph(8), [0, 1], 100, seed=0)


def test_min_edge_probability_regular_graph_bound():
    g = random_regular_graph(50, 3, seed=6)
    assert g.is_connected()
    val = min_tree_edge_probability(g, 100_000, seed=7)
    assert val >= 1 / 3 - 0.02


def test_every_edge_beats_inverse_degree_bound():
    g = random_regular_graph(40, 4, seed=8)
    assert g.is_connected()
    trials = 60_000
    freqs = tree_edge_frequencies(g, trials, seed=9)
    for f in freqs:
        assert f >= 1 / 4 - 4 * bernoulli_se(float(f), trials)


def test_bridge_edge_probability_is_one():
    g = Graph(6, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (4, 5), (3, 5)])
    freqs = tree_edge_frequencies(g, 5_000, seed=10)
    bridge = g.edge_id(2, 3)
    assert freqs[bridge] == 1.0
    assert float(freqs.min()) < 1.0


def test_coupling_estimate_p1_collapses():
    tv = coupling_distance_estimate(6, 1.0, 60_000, seed=12)
    # Expected multinomial noise floor is ~sqrt(1296/(2*pi*N)) ~ 0.06.
    assert tv <= 0.09


def test_coupling_estimate_failure_rate_regime():
    est = coupling_distance_estimate(64, 10 * math.log(64) / 64, 60, seed=13)
    assert 0.0 <= est <= 1.0


def test_coupling_estimate_trend_in_p():
    n = 48
    rates = []
    for c in (1.5, 4.0, 12.0):
        p = min(c * math.log(n) / n, 1.0)
        rates.append(coupling_distance_estimate(n, p, 100, seed=14))
    # Average trend: denser hosts strand the walk less often.
    assert rates[-1] <= rates[0]
    assert min(rates) == rates[-1] or rates[-1] <= rates[1]


def test_uniformity_chi_square_on_enumerable_corpus():
    trials = 120_000
    for name in ("K4", "C5", "C5+chord"):
        g = CORPUS[name]
        count = spanning_tree_count(g)
        assert count <= 30
        res = _batch_cover_walks(
            g, trials, substream(15, "chisq", name), watch_edge_ids=np.arange(g.m)
        )
        _, counts = np.unique(res["masks"], return_counts=True)
        assert len(counts) == count
        chi2 = ((counts - trials / count) ** 2 / (trials / count)).sum()
        crit = stats.chi2.ppf(1 - 0.001, df=count - 1)
        assert chi2 <= crit, f"{name}: chi2={chi2:.1f} crit={crit:.1f}"
