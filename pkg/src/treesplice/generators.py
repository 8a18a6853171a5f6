"""Graph generators and the random edge orientation.

All generators are pure functions of (arguments, seed): the same seed gives a
bit-identical graph.  Randomized generators draw from a named substream so
different generators never share a stream.
"""

from __future__ import annotations

import math

import numpy as np

from .graph import DirectedGraph, Graph, SamplingError
from .seeds import substream

_REGULAR_RETRY_CAP = 1000
_MATCHING_RETRY_CAP = 1000


def complete_graph(n: int) -> Graph:
    """K_n: every pair adjacent, n(n-1)/2 edges."""
    if n < 2:
        raise ValueError("complete graph needs n >= 2")
    iu, iv = np.triu_indices(n, k=1)
    return Graph(n, np.column_stack([iu, iv]))


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise ValueError("cycle needs n >= 3")
    u = np.arange(n)
    return Graph(n, np.column_stack([u, (u + 1) % n]))


def path_graph(n: int) -> Graph:
    if n < 2:
        raise ValueError("path needs n >= 2")
    u = np.arange(n - 1)
    return Graph(n, np.column_stack([u, u + 1]))


def star_graph(leaves: int) -> Graph:
    """Hub vertex 0 joined to ``leaves`` leaves."""
    if leaves < 1:
        raise ValueError("star needs at least one leaf")
    return Graph(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def wheel_graph(n: int) -> Graph:
    """Hub vertex 0 plus an (n-1)-cycle on the rim; n vertices total."""
    if n < 4:
        raise ValueError("wheel needs n >= 4")
    rim = [(i, i % (n - 1) + 1) for i in range(1, n)]
    spokes = [(0, i) for i in range(1, n)]
    return Graph(n, spokes + rim)


def prism_graph() -> Graph:
    """Two triangles {0,1,2}, {3,4,5} joined by a perfect matching."""
    tri = [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]
    rungs = [(0, 3), (1, 4), (2, 5)]
    return Graph(6, tri + rungs)


def petersen_graph() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    spokes = [(i, 5 + i) for i in range(5)]
    return Graph(10, outer + spokes + inner)


def gnp_graph(n: int, p: float, seed: int) -> Graph:
    """G(n, p): each pair kept independently with probability p."""
    if n < 1:
        raise ValueError("gnp needs n >= 1")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    iu, iv = np.triu_indices(n, k=1)
    if p >= 1.0:
        keep = np.ones(iu.shape, dtype=bool)
    elif p <= 0.0:
        keep = np.zeros(iu.shape, dtype=bool)
    else:
        rng = substream(seed, "gnp")
        keep = rng.random(iu.shape[0]) < p
    return Graph(n, np.column_stack([iu[keep], iv[keep]]))


def random_regular_graph(n: int, d: int, seed: int) -> Graph:
    """Simple d-regular graph by configuration-model pairing with rejection.

    Whole pairings containing a loop or a repeated edge are discarded and
    redrawn; the retry cap failing is reported as a SamplingError.
    """
    if d < 1 or d >= n:
        raise ValueError("need 1 <= d < n")
    if (n * d) % 2 != 0:
        raise ValueError("n*d must be even for a d-regular graph")
    rng = substream(seed, "random-regular")
    stubs = np.repeat(np.arange(n, dtype=np.int64), d)
    for _ in range(_REGULAR_RETRY_CAP):
        perm = rng.permutation(n * d)
        a = stubs[perm[0::2]]
        b = stubs[perm[1::2]]
        if (a == b).any():
            continue
        lo = np.minimum(a, b)
        hi = np.maximum(a, b)
        codes = np.sort(lo * n + hi)
        if (codes[1:] == codes[:-1]).any():
            continue
        return Graph(n, np.column_stack([lo, hi]))
    raise SamplingError(
        f"no simple {d}-regular pairing found in {_REGULAR_RETRY_CAP} attempts"
    )


def random_perfect_matching(n: int, rng: np.random.Generator) -> list[tuple[int, int]]:
    """Uniform perfect matching on 0..n-1 (n even): shuffle and pair up."""
    if n % 2:
        raise ValueError("perfect matching needs an even vertex count")
    perm = rng.permutation(n)
    return [(int(perm[2 * i]), int(perm[2 * i + 1])) for i in range(n // 2)]


def hamiltonian_regular_graph(n: int, d: int, seed: int) -> Graph:
    """d-regular graph containing the cycle 0-1-...-(n-1)-0.

    The cycle contributes degree 2; each further unit of degree comes from an
    independent uniform perfect matching, redrawn whenever it collides with
    an existing edge.  Such graphs are edge expanders with high probability.
    """
    if d < 2 or d >= n:
        raise ValueError("need 2 <= d < n")
    if n < 3:
        raise ValueError("cycle needs n >= 3")
    if d > 2 and n % 2:
        raise ValueError("n must be even to add perfect matchings")
    rng = substream(seed, "hamiltonian-regular")
    edges = {(min(i, (i + 1) % n), max(i, (i + 1) % n)) for i in range(n)}
    for _ in range(d - 2):
        for attempt in range(_MATCHING_RETRY_CAP):
            cand = {
                (min(u, v), max(u, v)) for u, v in random_perfect_matching(n, rng)
            }
            if len(cand) == n // 2 and not (cand & edges):
                edges |= cand
                break
        else:
            raise SamplingError(
                f"no collision-free matching in {_MATCHING_RETRY_CAP} attempts"
            )
    return Graph(n, sorted(edges))


def orientation_probabilities(p: float) -> tuple[float, float, float]:
    """(both, forward-only, backward-only) probabilities for one edge."""
    if not 0.0 < p <= 1.0:
        raise ValueError(f"p must lie in (0, 1], got {p}")
    s = math.sqrt(1.0 - p)
    both = (2.0 - p - 2.0 * s) / p
    single = (p + s - 1.0) / p
    return both, single, single


def arc_probability(p: float) -> float:
    """Marginal probability q that a fixed arc is present when H ~ G(n,p)."""
    if not 0.0 < p <= 1.0:
        raise ValueError(f"p must lie in (0, 1], got {p}")
    return 1.0 - math.sqrt(1.0 - p)


def direct_edges_dp(graph: Graph, p: float, seed: int) -> DirectedGraph:
    """Randomly orient every edge of ``graph``: both ways, forward, or backward.

    The three outcomes have probabilities calibrated so that, when the input
    is itself a G(n,p) sample, each arc of the result appears independently
    with probability q = 1 - sqrt(1-p).  Arcs remember their source edge id.
    """
    both, single, _ = orientation_probabilities(p)
    rng = substream(seed, "direct-edges")
    r = rng.random(graph.m)
    keep_fwd = r < both + single
    keep_bwd = (r < both) | (r >= both + single)
    eids = np.arange(graph.m, dtype=np.int32)
    tails = np.concatenate([graph.edge_u[keep_fwd], graph.edge_v[keep_bwd]])
    heads = np.concatenate([graph.edge_v[keep_fwd], graph.edge_u[keep_bwd]])
    srcs = np.concatenate([eids[keep_fwd], eids[keep_bwd]])
    return DirectedGraph(graph.n, tails, heads, srcs)
