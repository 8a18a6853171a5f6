"""Unions of spanning trees and the uniform-weight cut sparsifier."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Graph, SamplingError, cut_edges
from .sampler import SpanningTree, sample_trees, sequential_two_trees_bp
from .seeds import child_seed

SPARSIFY_RETRY_CAP = 16


@dataclass(frozen=True)
class Splicer:
    """Union of k spanning trees: deduplicated support plus per-edge multiplicity."""

    support: Graph
    multiplicity: np.ndarray
    k: int
    source_trees: tuple[SpanningTree, ...]
    support_base_eids: np.ndarray

    @property
    def n(self) -> int:
        return self.support.n

    def validate(self) -> None:
        total = int(self.multiplicity.sum())
        expect = self.k * (self.n - 1)
        if total != expect:
            raise ValueError(f"multiplicities sum to {total}, expected {expect}")
        if self.support.m > expect:
            raise ValueError("support larger than the union can be")
        if not self.support.is_connected():
            raise ValueError("support must be connected")
        known = set(self.support_base_eids.tolist())
        for tree in self.source_trees:
            if not set(tree.edge_ids().tolist()) <= known:
                raise ValueError("a source tree has edges outside the support")


@dataclass(frozen=True)
class WeightedGraph:
    """A graph with strictly positive per-edge weights."""

    graph: Graph
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        if w.shape != (self.graph.m,):
            raise ValueError("one weight per edge required")
        if (w <= 0).any():
            raise ValueError("weights must be strictly positive")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return self.graph.n

    def cut_weight(self, subset) -> float:
        return float(self.weights[cut_edges(self.graph, subset)].sum())


def union_trees(trees: list[SpanningTree] | tuple[SpanningTree, ...]) -> Splicer:
    """Union the trees' edge sets, counting how many trees contain each edge."""
    if not trees:
        raise ValueError("need at least one tree")
    n = trees[0].n
    for t in trees:
        if t.n != n:
            raise ValueError("trees span different vertex sets")
    counts: dict[int, int] = {}
    endpoint: dict[int, tuple[int, int]] = {}
    for t in trees:
        for v in range(n):
            p = int(t.parent[v])
            if p < 0:
                continue
            eid = int(t.parent_edge[v])
            counts[eid] = counts.get(eid, 0) + 1
            endpoint[eid] = (min(p, v), max(p, v))
    eids = sorted(counts)
    support = Graph(n, [endpoint[e] for e in eids])
    mult = np.array([counts[e] for e in eids], dtype=np.int32)
    return Splicer(
        support=support,
        multiplicity=mult,
        k=len(trees),
        source_trees=tuple(trees),
        support_base_eids=np.array(eids, dtype=np.int64),
    )


def splice(graph: Graph, k: int, seed: int) -> Splicer:
    """Union of k independent uniform spanning trees of ``graph``."""
    return union_trees(sample_trees(graph, k, seed))


def sparsify_gnp(graph: Graph, p: float, seed: int) -> WeightedGraph:
    """Two-tree sparsifier with uniform weight p*n on every support edge.

    The two trees come from one continuous oriented-walk sequence; a failed
    run is retried on a fresh substream, and exhausting the retry cap raises
    SamplingError (distinguishable from invalid input, which raises
    ValueError).
    """
    if not 0.0 < p <= 1.0:
        raise ValueError(f"p must lie in (0, 1], got {p}")
    n = graph.n
    for attempt in range(SPARSIFY_RETRY_CAP):
        res = sequential_two_trees_bp(graph, p, child_seed(seed, "attempt", attempt))
        if res.success:
            spl = union_trees(list(res.trees))
            weights = np.full(spl.support.m, p * n)
            return WeightedGraph(spl.support, weights)
    raise SamplingError(
        f"sparsification failed in {SPARSIFY_RETRY_CAP} attempts"
    )
