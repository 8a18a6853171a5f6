"""Tree-table routing with failover switching, reliability and stretch experiments.

Routing state is one next-hop table per (tree, destination): the destination
determines the next edge, so each vertex stores k*n entries.  Under edge
failures a route follows its current tree until blocked, then retries the
other trees in seeded-random (or round-robin) order; a (vertex, tree) pair is
never re-entered, which bounds looping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.csgraph as csgraph

from .graph import Graph
from .seeds import BoundedDraws, child_seed, substream
from .sampler import SpanningTree
from .splice import Splicer, splice


@dataclass(frozen=True)
class RoutingState:
    trees: tuple[SpanningTree, ...]
    next_hop: np.ndarray          # (k, n destinations, n vertices), -1 undefined
    tree_edge_sets: tuple[frozenset[tuple[int, int]], ...]

    @property
    def k(self) -> int:
        return len(self.trees)

    @property
    def n(self) -> int:
        return self.trees[0].n

    def defined_entries(self) -> int:
        return int((self.next_hop >= 0).sum())


@dataclass(frozen=True)
class RouteResult:
    delivered: bool
    hops: int
    switches: int
    path: tuple[int, ...]


def build_routing(trees) -> RoutingState:
    """Next-hop tables by rooting each tree at every destination."""
    trees = tuple(trees)
    if not trees:
        raise ValueError("need at least one tree")
    n = trees[0].n
    for t in trees:
        if t.n != n:
            raise ValueError("trees span different vertex sets")
    k = len(trees)
    table = np.full((k, n, n), -1, dtype=np.int32)
    edge_sets = []
    for ti, tree in enumerate(trees):
        adj = tree.adjacency()
        edge_sets.append(
            frozenset((min(u, v), max(u, v)) for u, v in tree.edges())
        )
        for dst in range(n):
            # BFS from dst: each vertex's next hop is its BFS parent.
            row = table[ti, dst]
            row[dst] = -1
            stack = [dst]
            seen = bytearray(n)
            seen[dst] = 1
            while stack:
                v = stack.pop()
                for w in adj[v]:
                    if not seen[w]:
                        seen[w] = 1
                        row[w] = v
                        stack.append(w)
    table.setflags(write=False)
    return RoutingState(trees=trees, next_hop=table, tree_edge_sets=tuple(edge_sets))


def route(
    state: RoutingState,
    src: int,
    dst: int,
    failed=(),
    policy: str = "random",
    hop_cap: int | None = None,
    seed: int = 0,
) -> RouteResult:
    """Route src -> dst over the trees, skipping failed base edges.

    ``failed`` holds (u, v) pairs.  At each vertex the current tree's next
    hop is taken if its edge is alive; otherwise the other trees are tried in
    seeded-random order (policy "random") or cyclically (policy
    "round-robin").  The route fails when every tree's next hop is dead, when
    a (vertex, tree) state repeats, or at the hop cap (default 4n).
    """
    n = state.n
    k = state.k
    if src == dst:
        raise ValueError("src and dst must differ")
    if not (0 <= src < n and 0 <= dst < n):
        raise ValueError("vertex out of range")
    if hop_cap is None:
        hop_cap = 4 * n
    if hop_cap < 1:
        raise ValueError("hop cap must be >= 1")
    if isinstance(failed, (set, frozenset)):
        dead = failed  # caller guarantees (min, max) normalized pairs
    else:
        dead = {(min(u, v), max(u, v)) for u, v in failed}
    draws = BoundedDraws(substream(seed, "route"), size=16)
    cur = src
    tree = 0
    hops = 0
    switches = 0
    path = [src]
    visited_states = {(src, 0)}
    while cur != dst:
        if hops >= hop_cap:
            return RouteResult(False, hops, switches, tuple(path))
        order = [tree] + [t for t in range(k) if t != tree]
        if policy == "random" and k > 1:
            rest = order[1:]
            for i in range(len(rest) - 1, 0, -1):
                j = draws.below(i + 1)
                rest[i], rest[j] = rest[j], rest[i]
            order = order[:1] + rest
        elif policy not in ("random", "round-robin"):
            raise ValueError(f"unknown policy {policy!r}")
        moved = False
        for t in order:
            nh = int(state.next_hop[t, dst, cur])
            if nh < 0:
                continue
            e = (min(cur, nh), max(cur, nh))
            if e in dead:
                continue
            if (nh, t) in visited_states:
                continue
            if t != tree:
                switches += 1
                tree = t
            visited_states.add((nh, t))
            cur = nh
            path.append(nh)
            hops += 1
            moved = True
            break
        if not moved:
            return RouteResult(False, hops, switches, tuple(path))
    return RouteResult(True, hops, switches, tuple(path))


@dataclass(frozen=True)
class ReliabilityTrial:
    trial: int
    delivered_fraction: float
    ceiling_fraction: float
    mean_hops: float
    mean_switches: float


@dataclass(frozen=True)
class ReliabilitySummary:
    k: int
    failure_prob: float
    pairs: int
    trials: tuple[ReliabilityTrial, ...]

    @property
    def delivered_fraction(self) -> float:
        return float(np.mean([t.delivered_fraction for t in self.trials]))

    @property
    def ceiling_fraction(self) -> float:
        return float(np.mean([t.ceiling_fraction for t in self.trials]))

    def csv_rows(self, seed: int) -> list[dict]:
        return [
            {
                "seed": seed,
                "trial": t.trial,
                "failure_prob": self.failure_prob,
                "delivered_fraction": t.delivered_fraction,
                "ceiling_fraction": t.ceiling_fraction,
                "mean_hops": t.mean_hops,
                "mean_switches": t.mean_switches,
            }
            for t in self.trials
        ]


def _adjacency_csr(graph: Graph, keep: np.ndarray) -> sp.csr_matrix:
    eu = graph.edge_u[keep]
    ev = graph.edge_v[keep]
    ones = np.ones(eu.size)
    return sp.csr_matrix(
        (np.concatenate([ones, ones]), (np.concatenate([eu, ev]), np.concatenate([ev, eu]))),
        shape=(graph.n, graph.n),
    )


def reliability_experiment(
    graph: Graph,
    k: int,
    failure_prob: float,
    pairs: int,
    trials: int,
    seed: int,
) -> ReliabilitySummary:
    """Per trial: fail base edges independently, route random pairs over a splicer.

    Also reports the per-trial ceiling (fraction of sampled pairs still
    connected in the surviving base graph); delivery can never exceed it.
    Failure draws and pair choices depend only on (seed, trial), so runs with
    different k are paired.
    """
    if not 0.0 <= failure_prob <= 1.0:
        raise ValueError("failure_prob must lie in [0, 1]")
    if pairs < 1 or trials < 1:
        raise ValueError("pairs and trials must be >= 1")
    n = graph.n
    results = []
    for t in range(trials):
        spl = splice(graph, k, child_seed(seed, "splice", t))
        state = build_routing(spl.source_trees)
        f_rng = substream(seed, "failures", t)
        fail_mask = f_rng.random(graph.m) < failure_prob
        dead_pairs = frozenset(
            (int(u), int(v))
            for u, v in zip(graph.edge_u[fail_mask], graph.edge_v[fail_mask])
        )
        p_rng = substream(seed, "pairs", t)
        srcs = p_rng.integers(0, n, size=pairs)
        offs = p_rng.integers(1, n, size=pairs)
        dsts = (srcs + offs) % n
        labels = csgraph.connected_components(
            _adjacency_csr(graph, ~fail_mask), directed=False
        )[1]
        delivered = 0
        hop_total = 0
        switch_total = 0
        connected = 0
        for i in range(pairs):
            s, d = int(srcs[i]), int(dsts[i])
            connected += labels[s] == labels[d]
            r = route(
                state,
                s,
                d,
                failed=dead_pairs,
                seed=child_seed(seed, "route", t, i),
            )
            if r.delivered:
                delivered += 1
                hop_total += r.hops
                switch_total += r.switches
        results.append(
            ReliabilityTrial(
                trial=t,
                delivered_fraction=delivered / pairs,
                ceiling_fraction=float(connected) / pairs,
                mean_hops=hop_total / max(delivered, 1),
                mean_switches=switch_total / max(delivered, 1),
            )
        )
    return ReliabilitySummary(
        k=k, failure_prob=failure_prob, pairs=pairs, trials=tuple(results)
    )


DIAMETER_MAX_N = 4096


def _support_graph(obj) -> Graph:
    if isinstance(obj, Splicer):
        return obj.support
    return obj


def stretch_stats(
    graph: Graph, spliced, pairs: int, seed: int
) -> tuple[float, int | None]:
    """Mean distance inflation over sampled pairs, plus the exact support diameter.

    Distances are unweighted BFS hops with no failures.  The diameter comes
    from all-sources BFS and is only computed up to n = 4096 (None above).
    """
    support = _support_graph(spliced)
    if support.n != graph.n:
        raise ValueError("vertex sets differ")
    if pairs < 1:
        raise ValueError("pairs must be >= 1")
    n = graph.n
    rng = substream(seed, "stretch-pairs")
    srcs = rng.integers(0, n, size=pairs)
    offs = rng.integers(1, n, size=pairs)
    dsts = (srcs + offs) % n
    uniq_srcs = np.unique(srcs)
    keep_all = np.ones(graph.m, dtype=bool)
    base_adj = _adjacency_csr(graph, keep_all)
    sup_adj = _adjacency_csr(support, np.ones(support.m, dtype=bool))
    d_base = csgraph.shortest_path(
        base_adj, method="D", unweighted=True, indices=uniq_srcs
    )
    d_sup = csgraph.shortest_path(
        sup_adj, method="D", unweighted=True, indices=uniq_srcs
    )
    row_of = {int(s): i for i, s in enumerate(uniq_srcs)}
    ratios = []
    for s, d in zip(srcs, dsts):
        b = d_base[row_of[int(s)], int(d)]
        u = d_sup[row_of[int(s)], int(d)]
        if not math.isfinite(b) or b <= 0 or not math.isfinite(u):
            continue
        ratios.append(u / b)
    mean_stretch = float(np.mean(ratios)) if ratios else math.nan
    diameter: int | None = None
    if n <= DIAMETER_MAX_N:
        full = csgraph.shortest_path(sup_adj, method="D", unweighted=True)
        if np.isfinite(full).all():
            diameter = int(full.max())
    return mean_stretch, diameter
