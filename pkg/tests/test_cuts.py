import itertools
import math

import numpy as np
import pytest

from treesplice.cuts import (
    edge_expansion_exact,
    evaluate_subset,
    sample_cut_subsets,
    sampled_cut_ratios,
    sparsifier_quality,
    spectral_lower_bound,
    vertex_expansion_exact,
)
from treesplice.generators import (
    complete_graph,
    cycle_graph,
    gnp_graph,
    path_graph,
    star_graph,
)
from treesplice.graph import Graph
from treesplice.splice import WeightedGraph, splice
from treesplice.seeds import child_seed


def test_edge_expansion_known_values():
    assert edge_expansion_exact(complete_graph(4)).value == 2.0
    assert edge_expansion_exact(cycle_graph(6)).value == pytest.approx(2 / 3)
    assert edge_expansion_exact(star_graph(4)).value == 1.0


def test_vertex_expansion_known_values():
    assert vertex_expansion_exact(complete_graph(4)).value == 1.0
    assert vertex_expansion_exact(path_graph(4)).value == 0.5
    assert vertex_expansion_exact(cycle_graph(6)).value == pytest.approx(2 / 3)


def brute_expansion(g, kind):
    best = math.inf
    for r in range(1, g.n // 2 + 1):
        for subset in itertools.combinations(range(g.n), r):
            best = min(best, evaluate_subset(g, subset, kind))
    return best


@pytest.mark.parametrize("kind", ["edge", "vertex"])
def test_scan_matches_brute_force_on_random_graphs(kind):
    for s in range(6):
        g = gnp_graph(10, 0.4, seed=900 + s)
        if not g.is_connected():
            continue
        rep = (edge_expansion_exact if kind == "edge" else vertex_expansion_exact)(g)
        assert rep.value == pytest.approx(brute_expansion(g, kind), abs=1e-12)
        assert evaluate_subset(g, rep.witness, kind) == pytest.approx(rep.value)
        assert 1 <= len(rep.witness) <= g.n // 2


def test_scan_rejects_large_or_disconnected():
    with pytest.raises(ValueError, match="spectral"):
        edge_expansion_exact(complete_graph(25))
    with pytest.raises(ValueError, match="connected"):
        edge_expansion_exact(Graph(4, [(0, 1), (2, 3)]))


def test_spectral_closed_forms():
    assert spectral_lower_bound(complete_graph(30)) == pytest.approx(30, rel=1e-9)
    for n in (24, 128):
        got = spectral_lower_bound(cycle_graph(n))
        assert got == pytest.approx(2 - 2 * math.cos(2 * math.pi / n), rel=1e-6)
    with pytest.raises(ValueError):
        spectral_lower_bound(Graph(4, [(0, 1), (2, 3)]))


def test_spectral_is_a_valid_certificate_on_small_graphs():
    for s in range(6):
        g = gnp_graph(12, 0.4, seed=300 + s)
        if not g.is_connected():
            continue
        lam = spectral_lower_bound(g)
        assert edge_expansion_exact(g).value >= lam / 2 - 1e-9


def test_splicer_expansion_bounded_by_base():
    g = gnp_graph(14, 0.5, seed=17)
    assert g.is_connected()
    spl = splice(g, 2, seed=4)
    assert (
        edge_expansion_exact(spl.support).value
        <= edge_expansion_exact(g).value + 1e-12
    )


def test_mean_expansion_monotone_in_k():
    g = complete_graph(12)
    means = []
    for k in (1, 2, 3, 4):
        vals = [
            edge_expansion_exact(splice(g, k, child_seed(7, "k", k, s)).support).value
            for s in range(50)
        ]
        means.append(np.mean(vals))
    assert all(b >= a - 1e-9 for a, b in zip(means, means[1:]))


def test_cut_families_cover_requested_kinds():
    g = gnp_graph(60, 0.2, seed=21)
    assert g.is_connected()
    fams = sample_cut_subsets(g, 60, seed=2)
    kinds = {f for f, _ in fams}
    assert kinds >= {
        "min-degree-singleton",
        "random-size-class",
        "tree-component",
        "bfs-ball",
    }
    for _, members in fams:
        assert 1 <= members.size < g.n


def test_sampled_ratios_identity_is_one():
    g = gnp_graph(40, 0.3, seed=23)
    assert g.is_connected()
    for r in sampled_cut_ratios(g, g, 40, seed=3):
        assert r.ratio == 1.0


def test_sampled_ratios_of_splicer_at_most_one():
    g = complete_graph(48)
    spl = splice(g, 2, seed=5)
    for r in sampled_cut_ratios(g, spl, 60, seed=6):
        assert r.ratio <= 1.0 + 1e-12
        assert r.base_cut >= 1


def test_sparsifier_quality_identity_weights():
    g = gnp_graph(50, 0.3, seed=31)
    assert g.is_connected()
    unit = WeightedGraph(g, np.ones(g.m))
    c_low, c_high = sparsifier_quality(g, unit, 50, seed=7)
    assert c_low == pytest.approx(1.0)
    assert c_high == pytest.approx(1 / math.log(g.n))


def test_report_serialization():
    rep = edge_expansion_exact(complete_graph(6))
    d = rep.to_dict()
    assert d["kind"] == "edge" and d["method"] == "exact"
    assert d["witness"] == sorted(rep.witness)
