"""Named, seeded experiment presets with machine-readable output.

Each preset binds generators, samplers, and checks for one headline claim,
runs its embedded assertions, and emits a JSON summary plus CSV detail.  All
randomness flows from the single config seed through named substreams, so any
sub-result is independently replayable.  Wall-clock facts live in a separate
"meta" field; everything else in the summary is byte-reproducible.
"""

from __future__ import annotations

import csv
import io as _io
import json
import math
import time
from dataclasses import dataclass, fields
from datetime import datetime, timezone

import numpy as np

from .cuts import (
    sampled_cut_ratios,
    spectral_lower_bound,
    sparsifier_quality,
    vertex_expansion_exact,
)
from .generators import complete_graph, gnp_graph, random_regular_graph
from .graph import SamplingError
from .lowerbound import (
    forced_cut_probability_bound,
    forced_cut_event,
    lower_bound_family,
    validate_family,
)
from .routing import reliability_experiment, stretch_stats
from .sampler import aldous_broder, sequential_two_trees_bp
from .seeds import child_seed, substream
from .splice import sparsify_gnp, splice, union_trees
from .verify import bernoulli_se, chernoff_tail_check, coupling_distance_estimate


_INT_FIELDS = ("n", "d", "k", "ell", "trials", "samples", "seed")
_FLOAT_FIELDS = ("p", "failure_prob")


@dataclass
class ExperimentConfig:
    preset: str
    seed: int = 0
    n: int | None = None
    p: float | None = None
    d: int | None = None
    k: int | None = None
    ell: int | None = None
    trials: int | None = None
    samples: int | None = None
    failure_prob: float | None = None
    out_json: str | None = None
    out_csv: str | None = None

    def to_text(self) -> str:
        """Canonical flat key=value form; round-trips bit-faithfully."""
        lines = []
        for f in fields(self):
            val = getattr(self, f.name)
            if val is None:
                continue
            if isinstance(val, float):
                lines.append(f"{f.name}={val!r}")
            else:
                lines.append(f"{f.name}={val}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        values: dict = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"line {lineno}: expected key=value, got {raw!r}")
            key, _, val = line.partition("=")
            key = key.strip()
            val = val.strip()
            if key not in known:
                raise ValueError(f"line {lineno}: unknown key {key!r}")
            if key in values:
                raise ValueError(f"line {lineno}: duplicate key {key!r}")
            if key in _INT_FIELDS:
                values[key] = int(val)
            elif key in _FLOAT_FIELDS:
                values[key] = float(val)
            else:
                values[key] = val
        if "preset" not in values:
            raise ValueError("config must name a preset")
        return cls(**values)

    def params_dict(self) -> dict:
        out = {}
        for f in fields(self):
            if f.name in ("preset", "seed", "out_json", "out_csv"):
                continue
            val = getattr(self, f.name)
            if val is not None:
                out[f.name] = val
        return out


@dataclass
class Assertion:
    name: str
    passed: bool
    value: float
    bound: float
    direction: str       # ">=" or "<="
    std_error: float | None = None

    def to_dict(self) -> dict:
        out = {
            "name": self.name,
            "passed": self.passed,
            "value": self.value,
            "bound": self.bound,
            "direction": self.direction,
        }
        if self.std_error is not None:
            out["std_error"] = self.std_error
        return out


def _ge(name, value, bound, se=None) -> Assertion:
    return Assertion(name, bool(value >= bound), float(value), float(bound), ">=", se)


def _le(name, value, bound, se=None) -> Assertion:
    return Assertion(name, bool(value <= bound), float(value), float(bound), "<=", se)


def _run_bounded_degree(cfg: ExperimentConfig):
    n = cfg.n or 256
    d = cfg.d or 3
    k = cfg.k or 2
    seeds = cfg.trials or 20
    cuts = cfg.samples or 10_000
    alpha = 81.0
    bound = 1.0 / (alpha * math.log(n))
    assertions = []
    rows = []
    worst = math.inf
    for s in range(seeds):
        g = random_regular_graph(n, d, child_seed(cfg.seed, "graph", s))
        if not g.is_connected():
            g = random_regular_graph(n, d, child_seed(cfg.seed, "graph-retry", s))
        u = splice(g, k, child_seed(cfg.seed, "splice", s))
        ratios = sampled_cut_ratios(g, u, cuts, child_seed(cfg.seed, "cuts", s))
        m = min(r.ratio for r in ratios)
        worst = min(worst, m)
        rows.append({"seed_index": s, "min_ratio": m, "cuts": len(ratios)})
    assertions.append(_ge("min cut ratio across seeds", worst, bound))
    return assertions, rows, {"alpha": alpha, "bound": bound}


def _run_lower_bound(cfg: ExperimentConfig):
    n = cfg.n or 3000
    d = cfg.d or 3
    ell = cfg.ell or 1
    target_obs = cfg.samples or 100_000
    fam = lower_bound_family(n, d, ell, child_seed(cfg.seed, "family"))
    validate_family(fam)
    start = fam.start_vertex()
    bound = forced_cut_probability_bound(d, ell)
    paths = len(fam.paths)
    trees_needed = cfg.trials or -(-target_obs // paths)
    hits = 0
    total = 0
    rows = []
    for t in range(trees_needed):
        _tree, trace = aldous_broder(
            fam.graph, child_seed(cfg.seed, "tree", t), start=start
        )
        tree_hits = sum(
            forced_cut_event(fam, i, trace) for i in range(paths)
        )
        hits += tree_hits
        total += paths
        rows.append({"tree": t, "events": tree_hits, "paths": paths})
    rate = hits / total
    se = bernoulli_se(rate, total)
    assertions = [
        _ge("structural invariants hold", 1.0, 1.0),
        _ge("forced-cut event rate", rate, bound - 4.0 * se, se),
    ]
    return assertions, rows, {
        "segments": paths,
        "trees": trees_needed,
        "observations": total,
        "event_bound": bound,
    }


def _run_complete_graph(cfg: ExperimentConfig):
    n = cfg.n or 16
    k = cfg.k or 2
    seeds = cfg.trials or 100
    spectral_seeds = cfg.samples or 20
    rows = []
    good = 0
    for s in range(seeds):
        kn = complete_graph(n)
        u = splice(kn, k, child_seed(cfg.seed, "splice", s))
        rep = vertex_expansion_exact(u.support)
        ok = rep.value >= 0.5
        good += ok
        rows.append(
            {
                "kind": "exact-vertex-expansion",
                "n": n,
                "seed_index": s,
                "value": rep.value,
                "passed": int(ok),
            }
        )
    rate = good / seeds
    assertions = [
        _ge(
            "vertex expansion >= 1/2 seed fraction",
            rate,
            0.95,
            bernoulli_se(rate, seeds),
        )
    ]
    ladder = [n * 8, n * 16, n * 32, n * 64]
    means = []
    lam_min = math.inf
    for size in ladder:
        vals = []
        for s in range(spectral_seeds):
            kn = complete_graph(size)
            u = splice(kn, k, child_seed(cfg.seed, "spectral", size, s))
            lam = spectral_lower_bound(u)
            vals.append(lam)
            lam_min = min(lam_min, lam)
            rows.append(
                {
                    "kind": "lambda2",
                    "n": size,
                    "seed_index": s,
                    "value": lam,
                    "passed": int(lam >= 0.15),
                }
            )
        means.append(float(np.mean(vals)))
    assertions.append(_ge("min lambda2 across ladder", lam_min, 0.15))
    assertions.append(
        _ge("lambda2 trend (last mean / first mean)", means[-1] / means[0], 0.8)
    )
    return assertions, rows, {"ladder": ladder, "ladder_means": means}


def _run_random_graph(cfg: ExperimentConfig):
    n = cfg.n or 1024
    p = cfg.p if cfg.p is not None else min(20.0 * math.log(n) / n, 1.0)
    runs = cfg.trials or 100
    tv_trials = cfg.samples or 1_000_000
    successes = 0
    rows = []
    for t in range(runs):
        host = gnp_graph(n, p, child_seed(cfg.seed, "host", t))
        res = sequential_two_trees_bp(host, p, child_seed(cfg.seed, "walk", t))
        successes += res.success
        rows.append({"kind": "two-tree-run", "index": t, "success": int(res.success)})
    rate = successes / runs
    assertions = [
        _ge("two-tree success rate", rate, 0.9, bernoulli_se(rate, runs))
    ]
    tv = coupling_distance_estimate(6, 1.0, tv_trials, child_seed(cfg.seed, "tv"))
    assertions.append(_le("tree distribution TV at n=6, p=1", tv, 0.02))
    rows.append({"kind": "tv", "index": 0, "success": tv})
    lam_seeds = min(20, runs)
    lam_min = math.inf
    for s in range(lam_seeds):
        host = gnp_graph(n, p, child_seed(cfg.seed, "lam-host", s))
        res = sequential_two_trees_bp(host, p, child_seed(cfg.seed, "lam-walk", s))
        attempts = 0
        while not res.success and attempts < 16:
            attempts += 1
            res = sequential_two_trees_bp(
                host, p, child_seed(cfg.seed, "lam-walk-retry", s, attempts)
            )
        if not res.success:
            raise SamplingError("two-tree generation kept failing")
        u = union_trees(list(res.trees))
        lam = spectral_lower_bound(u)
        lam_min = min(lam_min, lam)
        rows.append({"kind": "lambda2", "index": s, "success": lam})
    assertions.append(_ge("min lambda2 of two-tree unions", lam_min, 0.15))
    return assertions, rows, {"p": p, "tv_trials": tv_trials}


def _run_sparsifier(cfg: ExperimentConfig):
    n = cfg.n or 1000
    p = cfg.p if cfg.p is not None else min(10.0 * math.log(n) / n, 1.0)
    seeds = cfg.trials or 20
    cuts = cfg.samples or 10_000
    rows = []
    c_low_all = math.inf
    c_high_all = 0.0
    size_ok = True
    for s in range(seeds):
        host = gnp_graph(n, p, child_seed(cfg.seed, "host", s))
        wg = sparsify_gnp(host, p, child_seed(cfg.seed, "sparsify", s))
        c_low, c_high = sparsifier_quality(
            host, wg, cuts, child_seed(cfg.seed, "cuts", s)
        )
        size_ok = size_ok and wg.graph.m <= 2 * (n - 1)
        c_low_all = min(c_low_all, c_low)
        c_high_all = max(c_high_all, c_high)
        rows.append(
            {"seed_index": s, "c_low": c_low, "c_high": c_high, "edges": wg.graph.m}
        )
    assertions = [
        _ge("min cut-weight ratio (c_low band)", c_low_all, 0.05),
        _le("max log-normalized ratio (c_high band)", c_high_all, 50.0),
        _ge("support size <= 2(n-1) in all seeds", float(size_ok), 1.0),
    ]
    return assertions, rows, {"p": p}


def _run_tail_bound(cfg: ExperimentConfig):
    n = cfg.n or 64
    d = cfg.d or 3
    trials = cfg.trials or 100_000
    n_cuts = cfg.samples or 10
    g = random_regular_graph(n, d, child_seed(cfg.seed, "graph"))
    if not g.is_connected():
        g = random_regular_graph(n, d, child_seed(cfg.seed, "graph-retry"))
    rows = []
    all_ok = True
    pick = substream(cfg.seed, "cuts")
    for c in range(n_cuts):
        subset = np.sort(pick.choice(n, size=n // 2, replace=False))
        rep = chernoff_tail_check(
            g, subset.tolist(), trials, child_seed(cfg.seed, "tail", c)
        )
        all_ok = all_ok and rep.passed
        for lam, emp, bnd, se in zip(
            rep.lambdas, rep.empirical, rep.bounds, rep.std_errors
        ):
            rows.append(
                {
                    "cut": c,
                    "lambda": lam,
                    "empirical": emp,
                    "bound": bnd,
                    "std_error": se,
                }
            )
    assertions = [_ge("tail bound holds on all cuts", float(all_ok), 1.0)]
    return assertions, rows, {"trials": trials, "cuts": n_cuts}


def _run_stretch(cfg: ExperimentConfig):
    n = cfg.n or 1024
    small = max(n // 4, 8)
    seeds = cfg.trials or 20
    pairs = cfg.samples or 2000
    diameter_cap = 4.0 * math.log2(n)
    rows = []
    big_stretches = []
    small_stretches = []
    dia_max = 0
    for s in range(seeds):
        kn = complete_graph(n)
        one = splice(kn, 1, child_seed(cfg.seed, "one-tree", n, s))
        ms, _ = stretch_stats(kn, one, pairs, child_seed(cfg.seed, "pairs", n, s))
        big_stretches.append(ms)
        rows.append({"kind": "single-tree-stretch", "n": n, "seed_index": s, "value": ms})
        ks = complete_graph(small)
        one_s = splice(ks, 1, child_seed(cfg.seed, "one-tree", small, s))
        ms_s, _ = stretch_stats(ks, one_s, pairs, child_seed(cfg.seed, "pairs", small, s))
        small_stretches.append(ms_s)
        rows.append(
            {"kind": "single-tree-stretch", "n": small, "seed_index": s, "value": ms_s}
        )
        two = splice(kn, 2, child_seed(cfg.seed, "two-tree", s))
        _, dia = stretch_stats(kn, two, pairs, child_seed(cfg.seed, "dia-pairs", s))
        dia_max = max(dia_max, int(dia))
        rows.append({"kind": "two-splicer-diameter", "n": n, "seed_index": s, "value": dia})
    ratio = float(np.mean(big_stretches)) / float(np.mean(small_stretches))
    assertions = [
        _ge("stretch growth ratio lower", ratio, 1.6),
        _le("stretch growth ratio upper", ratio, 2.4),
        _le("two-splicer diameter", float(dia_max), diameter_cap),
    ]
    return assertions, rows, {"small_n": small, "ratio": ratio}


def _run_routing(cfg: ExperimentConfig):
    n = cfg.n or 256
    k = cfg.k or 2
    failure_prob = cfg.failure_prob if cfg.failure_prob is not None else 0.05
    trials = cfg.trials or 50
    pairs = cfg.samples or 200
    g = complete_graph(n)
    base = reliability_experiment(
        g, 1, failure_prob, pairs, trials, child_seed(cfg.seed, "routes")
    )
    multi = reliability_experiment(
        g, k, failure_prob, pairs, trials, child_seed(cfg.seed, "routes")
    )
    ceiling_ok = all(
        t.delivered_fraction <= t.ceiling_fraction + 1e-12 for t in multi.trials
    ) and all(
        t.delivered_fraction <= t.ceiling_fraction + 1e-12 for t in base.trials
    )
    gain = multi.delivered_fraction - base.delivered_fraction
    assertions = [
        _ge(f"delivery gain of k={k} over k=1", gain, 0.05),
        _ge("delivery never exceeds ceiling", float(ceiling_ok), 1.0),
    ]
    rows = [dict(r, k=1) for r in base.csv_rows(cfg.seed)] + [
        dict(r, k=k) for r in multi.csv_rows(cfg.seed)
    ]
    return assertions, rows, {
        "delivery_k1": base.delivered_fraction,
        f"delivery_k{k}": multi.delivered_fraction,
    }


PRESETS = {
    "thm-bounded-degree": _run_bounded_degree,
    "thm-lower-bound": _run_lower_bound,
    "thm-complete-graph": _run_complete_graph,
    "thm-random-graph": _run_random_graph,
    "thm-sparsifier": _run_sparsifier,
    "thm-tail-bound": _run_tail_bound,
    "stretch-diameter": _run_stretch,
    "routing-reliability": _run_routing,
}


def _plain(obj):
    """Recursively strip numpy scalar types for stable JSON/CSV text."""
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def summary_json(summary: dict) -> str:
    return json.dumps(_plain(summary), sort_keys=True, indent=2) + "\n"


def strip_meta(summary_text: str) -> str:
    """Summary bytes with the wall-clock meta field removed, for comparisons."""
    data = json.loads(summary_text)
    data.pop("meta", None)
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def rows_csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    keys: list[str] = []
    for row in rows:
        for k in row:
            if k not in keys:
                keys.append(k)
    buf = _io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(
            {
                k: (repr(v) if isinstance(v, float) else v)
                for k, v in _plain(row).items()
            }
        )
    return buf.getvalue()


def run_preset(cfg: ExperimentConfig) -> tuple[dict, int]:
    """Run a preset; returns (summary, exit status).

    Status 0 when every embedded assertion passes, 1 otherwise.  Unknown
    presets raise ValueError (a usage error).  Writes the JSON summary and
    CSV detail when the config names output paths.
    """
    if cfg.preset not in PRESETS:
        raise ValueError(
            f"unknown preset {cfg.preset!r}; available: {', '.join(sorted(PRESETS))}"
        )
    t0 = time.time()
    assertions, rows, extra = PRESETS[cfg.preset](cfg)
    passed = all(a.passed for a in assertions)
    summary = {
        "preset": cfg.preset,
        "seed": cfg.seed,
        "parameters": cfg.params_dict(),
        "derived": extra,
        "assertions": [a.to_dict() for a in assertions],
        "passed": passed,
        "meta": {
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "duration_s": round(time.time() - t0, 3),
        },
    }
    if cfg.out_json:
        with open(cfg.out_json, "w", encoding="utf-8") as fh:
            fh.write(summary_json(summary))
    if cfg.out_csv:
        with open(cfg.out_csv, "w", encoding="utf-8") as fh:
            fh.write(rows_csv(rows))
    return summary, 0 if passed else 1
