"""Monte-Carlo experiments comparing the colouring plan with the baselines.

A replicate is one (topology seed, user drop) pair.  Within a replicate
each method selects its users once and then ``trials`` independent
fading realisations are drawn for every served user.  Means and
standard errors are taken across replicates.

Resource normalisation: the colouring plan serves each user on one of
``L`` orthogonal patterns, so its per-user rate carries a ``1/L`` factor;
dynamic and static clustering put every BS on one shared resource with
no such factor.  Rate coverage is ``P[log2(1 + SINR) > gamma]`` over
served users and fading, without any pre-log.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
import csv
import functools
import hashlib
import io
import json
import math

import numpy as np

from .analysis import FixedGeometry, ergodic_se_lower, rate_coverage_approx
from .association import (
    assign_single_cell,
    assign_static,
    associate_proposed,
    schedule_dynamic,
)
from .channel import (
    ScenarioParams,
    desired_gains,
    interference_gains,
    pilot_overhead_many,
    sinr,
)
from .geometry import estimate_region_areas, nearest_two_many
from .graphcolor import build_cluster_plan
from .rng import derive_seed, substream
from .topology import Rect, drop_users, generate_perturbed_grid, generate_ppp, load_topology

BASELINES = ("proposed", "dynamic", "static")
DEFAULT_GAMMAS = tuple(np.round(np.arange(0.0, 8.01, 0.5), 10))


@dataclass(frozen=True)
class TopologySpec:
    """How to build the BS layouts of an experiment.

    ``kind`` is ``"grid"`` (perturbed square grid), ``"ppp"`` or ``"file"``.
    ``count`` independent layouts are drawn for random kinds.
    """

    kind: str = "grid"
    rows: int = 7
    cols: int = 7
    cell_size: float = 200.0
    p: float = 100.0
    density: float = 25e-6
    window: tuple = (0.0, 0.0, 1400.0, 1400.0)
    analysis_window: tuple = None
    path: str = None
    count: int = 1

    def __post_init__(self):
        if self.kind not in ("grid", "ppp", "file"):
            raise ValueError(f"unknown topology kind {self.kind!r}")
        if self.count < 1:
            raise ValueError("topology count must be at least 1")
        if self.kind == "file" and not self.path:
            raise ValueError("file topology needs a path")

    def build(self, seed):
        aw = Rect(*self.analysis_window) if self.analysis_window else None
        if self.kind == "grid":
            topo = generate_perturbed_grid(self.rows, self.cols, self.cell_size, self.p, seed)
            if aw is not None:
                topo = replace(topo, analysis_window=aw)
            return topo
        if self.kind == "ppp":
            return generate_ppp(self.density, Rect(*self.window), seed, aw)
        return load_topology(self.path, analysis_window=aw)


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: ScenarioParams = field(default_factory=ScenarioParams)
    topology: TopologySpec = field(default_factory=TopologySpec)
    methods: tuple = BASELINES
    trials: int = 100
    user_drops: int = 1
    gamma_grid: tuple = DEFAULT_GAMMAS
    k_per_bs_grid: tuple = (5, 10, 20, 40, 60)
    edge_user_threshold: float = 2.0 / 3.0
    seed: int = 0
    n_dummies: int = 5000
    gain_model: str = "vector"
    proposed_share: float = None
    nk_pairs: tuple = ((3, 1), (4, 2), (10, 5))
    snr_db_grid: tuple = tuple(range(40, 161, 10))
    tagged_users: int = 10
    threads: int = 1

    def __post_init__(self):
        if self.trials < 1 or self.user_drops < 1:
            raise ValueError("trials and user_drops must be at least 1")
        if not 0 < self.edge_user_threshold < 1:
            raise ValueError("edge_user_threshold must lie in (0, 1)")
        bad = set(self.methods) - set(BASELINES)
        if bad or not self.methods:
            raise ValueError(f"methods must be a non-empty subset of {BASELINES}")
        if self.gain_model not in ("vector", "gamma"):
            raise ValueError("gain_model must be 'vector' or 'gamma'")
        if self.proposed_share is not None and not 0 <= self.proposed_share <= 1:
            raise ValueError("proposed_share must lie in [0, 1]")
        if self.tagged_users < 1:
            raise ValueError("tagged_users must be at least 1")
        if any(g < 0 for g in self.gamma_grid):
            raise ValueError("rate thresholds must be non-negative")
        if any(k <= 0 for k in self.k_per_bs_grid):
            raise ValueError("K_perBS values must be positive")

    def to_dict(self):
        d = asdict(self)
        d.pop("threads")
        return d

    def digest(self):
        blob = json.dumps(self.to_dict(), sort_keys=True, default=str).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


@dataclass
class ResultTable:
    rows: list
    metadata: dict

    def methods(self):
        return list(dict.fromkeys(r[1] for r in self.rows))

    def series(self, method):
        """``(x, mean, stderr, n)`` arrays for one method."""
        sel = [r for r in self.rows if r[1] == method]
        cols = list(zip(*sel)) if sel else [(), (), (), (), ()]
        return tuple(np.array(c, dtype=float) for c in (cols[0], cols[2], cols[3], cols[4]))

    def value(self, method, x):
        for r in self.rows:
            if r[1] == method and r[0] == x:
                return r[2]
        raise KeyError((method, x))

    def to_csv(self):
        meta = " ".join(f"{k}={v}" for k, v in self.metadata.items())
        buf = io.StringIO()
        buf.write(f"# {meta}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("x", "method", "mean", "stderr", "n"))
        for x, m, mean, se, n in self.rows:
            w.writerow((_fmt(x), m, _fmt(mean), _fmt(se), int(n)))
        return buf.getvalue()

    def write_csv(self, path):
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(self.to_csv())


def _fmt(v):
    if isinstance(v, str):
        return v
    v = float(v)
    if math.isnan(v):
        return "nan"
    return format(v, ".12g")


def _summary(values):
    v = np.asarray(values, dtype=float)
    n = len(v)
    if n == 0:
        return math.nan, math.nan, 0
    se = float(np.std(v, ddof=1) / math.sqrt(n)) if n > 1 else math.nan
    return float(np.mean(v)), se, n


# ---------------------------------------------------------------- replicates


@functools.lru_cache(maxsize=8)
def _layout(spec, seed, delta_ec, n_dummies):
    topo = spec.build(seed)
    plan = build_cluster_plan(topo, estimate_region_areas(topo, n_dummies, seed), delta_ec)
    return topo, plan


def build_layout(config, index=0):
    """Topology and cluster plan of the ``index``-th layout of an experiment."""
    sc = config.scenario
    return _layout(config.topology, derive_seed(config.seed, "topology", index), sc.delta_ec, config.n_dummies)


def _assign(method, users, topo, plan, K, seed):
    if method == "proposed":
        return associate_proposed(users, plan, topo, K, seed)
    if method == "dynamic":
        return schedule_dynamic(users, topo, K, seed)
    if method == "static":
        return assign_static(topo, users, K, seed)
    return assign_single_cell(topo, users, K, seed)


def _gamma_interference(streams, rng):
    out = np.zeros(streams.shape)
    on = streams > 0
    out[on] = rng.gamma(streams[on].astype(float))
    return out


def served_sinr(assignment, topo, users, scenario, rng, trials, gain_model="vector"):
    """SINR samples of every served user.

    Returns ``(users, sinr)`` with ``sinr`` of shape ``(n_served, trials)``,
    rows ordered like ``assignment.served``.  Interference comes from the
    BSs transmitting in the same slot, minus the serving pair; each sends
    as many streams as it has users there.
    """
    N, beta, snr = scenario.N, scenario.beta, scenario.snr
    order, blocks = [], []
    for slot in assignment.slots:
        entries = assignment.in_slot(slot)
        if not entries:
            continue
        streams = assignment.streams(slot)
        active = np.array(sorted(streams), dtype=np.int64)
        s_active = np.array([streams[b] for b in active], dtype=np.int64)
        u = np.array([e[0] for e in entries])
        a = np.array([e[1] for e in entries])
        b = np.array([-1 if e[2] is None else e[2] for e in entries])
        pos = users.positions[u]
        d0 = np.linalg.norm(pos - topo.bs[a], axis=1)
        dist = np.linalg.norm(pos[:, None, :] - topo.bs[active][None, :, :], axis=2)
        mute = (active[None, :] == a[:, None]) | (active[None, :] == b[:, None])
        st = np.where(mute, 0, s_active[None, :])
        n_c = np.array([streams[ai] - 1 + (streams.get(bi, 0) if bi >= 0 else 0) for ai, bi in zip(a, b)])
        g0 = np.empty((len(u), trials))
        for c in np.unique(n_c):
            rows = np.flatnonzero(n_c == c)
            if gain_model == "vector":
                g = desired_gains(N, int(c), rng, len(rows) * trials)
            else:
                g = rng.gamma(float(N - c), size=len(rows) * trials)
            g0[rows] = g.reshape(len(rows), trials)
        st3 = np.broadcast_to(st[:, None, :], (len(u), trials, len(active)))
        if gain_model == "vector":
            gj = interference_gains(N, st3, rng)
        else:
            gj = _gamma_interference(np.ascontiguousarray(st3), rng)
        dist3 = np.broadcast_to(dist[:, None, :], gj.shape)
        d03 = np.broadcast_to(d0[:, None], (len(u), trials))
        order.extend(entries)
        blocks.append(sinr(g0, d03, dist3, gj, beta, scenario.K, snr))
    if not blocks:
        return [], np.empty((0, trials))
    return order, np.vstack(blocks)


def _user_stats(entries, topo, users):
    """Analysis-window flag and nearest/second-nearest distance ratio."""
    u = np.array([e[0] for e in entries], dtype=np.int64)
    pos = users.positions[u]
    inside = topo.analysis_window.contains(pos)
    nt = nearest_two_many(topo.bs, pos)
    d0 = np.linalg.norm(pos - topo.bs[nt[:, 0]], axis=1)
    d1 = np.linalg.norm(pos - topo.bs[nt[:, 1]], axis=1)
    return inside, d0 / d1


def _method_metrics(method, topo, plan, users, cfg, t, d, xi):
    sc = cfg.scenario
    seed = derive_seed(cfg.seed, "assoc", t, d, xi)
    rng = substream(cfg.seed, "fading", method, t, d, xi)
    assignment = _assign(method, users, topo, plan, sc.K, seed)
    entries, s = served_sinr(assignment, topo, users, sc, rng, cfg.trials, cfg.gain_model)
    if not entries:
        return None
    inside, ratio = _user_stats(entries, topo, users)
    if not inside.any():
        return None
    pre_log = 1.0 / assignment.n_slots if method == "proposed" else 1.0
    rate = np.log2(1.0 + s[inside])
    tput = pre_log * rate
    if sc.overhead_enabled:
        tput = tput * (1.0 - pilot_overhead_many(sc.mmse, sc.N, sc.L_b, s[inside]))
    edge = ratio[inside] > cfg.edge_user_threshold
    cov = np.array([np.mean(rate > g) for g in cfg.gamma_grid])
    return dict(edge_tp=float(np.sum(np.mean(tput[edge], axis=1))), coverage=cov)


def _replicate(cfg, t, d, xi, k_per_bs):
    topo, plan = build_layout(cfg, t)
    count = int(round(k_per_bs * len(topo)))
    users = drop_users(topo, count, derive_seed(cfg.seed, "drop", t, d), k_per_bs)
    out = {}
    for m in cfg.methods:
        res = _method_metrics(m, topo, plan, users, cfg, t, d, xi)
        if m == "proposed" and cfg.proposed_share is not None and res is not None:
            alt = _method_metrics("single_cell", topo, plan, users, cfg, t, d, xi)
            if alt is not None:
                w = cfg.proposed_share
                res = {k: w * res[k] + (1 - w) * alt[k] for k in res}
        out[m] = res
    return out


def _run_task(args):
    return _replicate(*args)


def _map(cfg, tasks):
    if cfg.threads > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=cfg.threads) as ex:
            return list(ex.map(_run_task, tasks))
    return [_run_task(a) for a in tasks]


def _metadata(cfg, figure):
    from . import __version__

    return dict(config_hash=cfg.digest(), seed=cfg.seed, provenance=f"bscoloring-{__version__}:{figure}")


def _replicate_ids(cfg):
    return [(t, d) for t in range(cfg.topology.count) for d in range(cfg.user_drops)]


def run_rate_coverage(config):
    """Empirical rate coverage per method over ``config.gamma_grid``."""
    ids = _replicate_ids(config)
    results = _map(config, [(config, t, d, 0, config.scenario.k_per_bs) for t, d in ids])
    rows, meta = [], _metadata(config, "rate_coverage")
    for m in config.methods:
        reps = [r[m]["coverage"] for r in results if r[m] is not None]
        meta[f"skipped_{m}"] = len(results) - len(reps)
        for gi, g in enumerate(config.gamma_grid):
            mean, se, n = _summary([c[gi] for c in reps])
            rows.append((float(g), m, mean, se, n))
    return ResultTable(rows, meta)


def run_edge_user_throughput(config):
    """Sum throughput of served edge users per method over ``k_per_bs_grid``."""
    ids = _replicate_ids(config)
    tasks = [(config, t, d, xi, k) for xi, k in enumerate(config.k_per_bs_grid) for t, d in ids]
    results = _map(config, tasks)
    rows, meta = [], _metadata(config, "edge_throughput")
    per_x = len(ids)
    for m in config.methods:
        skipped = 0
        for xi, k in enumerate(config.k_per_bs_grid):
            chunk = results[xi * per_x : (xi + 1) * per_x]
            vals = [r[m]["edge_tp"] for r in chunk if r[m] is not None]
            skipped += per_x - len(vals)
            mean, se, n = _summary(vals)
            rows.append((float(k), m, mean, se, n))
        meta[f"skipped_{m}"] = skipped
    return ResultTable(rows, meta)


# ---------------------------------------------------------------- validation


def tagged_geometries(topo, plan, count, seed):
    """Random user positions in uncut regions of the analysis window.

    Each comes with its serving distance and the distances to every other
    BS of its pattern, all of which are assumed active.
    """
    rng = substream(seed, "tagged")
    out = []
    while len(out) < count:
        q = topo.analysis_window.sample(rng, 1)
        a, b = (int(v) for v in nearest_two_many(topo.bs, q)[0])
        ell = plan.pattern_of((a, b))
        if ell is None:
            continue
        others = [j for j in plan.bs_in_pattern(ell) if j not in (a, b)]
        d = np.linalg.norm(topo.bs[others] - q[0], axis=1)
        out.append(FixedGeometry.from_distances(float(np.linalg.norm(topo.bs[a] - q[0])), d))
    return out


def fixed_geometry_sinr(geom, N, K, beta, snr, trials, rng, gain_model="vector"):
    """Monte-Carlo SINR of a tagged user served by a cooperating pair."""
    n_int = len(geom.ratios)
    if gain_model == "vector":
        g0 = desired_gains(N, 2 * K - 1, rng, trials)
        gj = interference_gains(N, np.full((trials, n_int), K), rng)
    else:
        g0 = rng.gamma(float(N - 2 * K + 1), size=trials)
        gj = rng.gamma(float(K), size=(trials, n_int))
    dists = np.broadcast_to(geom.ratios * geom.d0, gj.shape)
    return sinr(g0, np.full(trials, geom.d0), dists, gj, beta, K, snr)


def run_validation(config, parts=("coverage", "se")):
    """Analytical curves against Monte-Carlo on tagged users of one layout.

    ``coverage`` rows: x is the rate threshold, methods
    ``coverage_approx[N=..,K=..]`` and ``coverage_mc[...]`` (interference
    limited).  ``se`` rows: x is the SNR in dB, methods
    ``se_lower[...]`` and ``se_mc[...]``.  ``config.trials`` fading draws
    are split evenly over the tagged users.
    """
    sc = config.scenario
    topo, plan = build_layout(config)
    geoms = tagged_geometries(topo, plan, config.tagged_users, config.seed)
    per = max(1, config.trials // len(geoms))
    L = plan.L
    rows, meta = [], _metadata(config, "validation")
    meta["L"] = L
    for N, K in config.nk_pairs:
        tag = f"[N={N},K={K}]"
        if "coverage" in parts:
            rng = substream(config.seed, "validation", "coverage", N, K)
            rates = [np.log2(1.0 + fixed_geometry_sinr(g, N, K, sc.beta, math.inf, per, rng, config.gain_model)) for g in geoms]
            for gam in config.gamma_grid:
                approx = np.mean([rate_coverage_approx(g, N, K, sc.beta, gam) for g in geoms])
                p = np.array([np.mean(r > gam) for r in rates])
                se = math.sqrt(float(np.sum(p * (1 - p) / per))) / len(geoms)
                rows.append((float(gam), "coverage_approx" + tag, float(approx), 0.0, len(geoms)))
                rows.append((float(gam), "coverage_mc" + tag, float(np.mean(p)), se, per * len(geoms)))
        if "se" in parts:
            rng = substream(config.seed, "validation", "se", N, K)
            for snr_db in config.snr_db_grid:
                snr = 10.0 ** (snr_db / 10.0)
                lower = np.mean([ergodic_se_lower(g, N, K, sc.beta, L, snr) for g in geoms])
                vals = [np.log2(1.0 + fixed_geometry_sinr(g, N, K, sc.beta, snr, per, rng, config.gain_model)) / L for g in geoms]
                var = sum(float(np.var(v, ddof=1)) / per for v in vals) if per > 1 else math.nan
                rows.append((float(snr_db), "se_lower" + tag, float(lower), 0.0, len(geoms)))
                rows.append((float(snr_db), "se_mc" + tag, float(np.mean([np.mean(v) for v in vals])), math.sqrt(var) / len(geoms), per * len(geoms)))
    return ResultTable(rows, meta)


def ppp_worst_case_se(N, K, beta, L, trials, seed, n_points=2000, chunk=5000):
    """Mean and standard error of ``(1/L) log2(1 + SIR)`` for a Poisson layout.

    The typical user at the origin is served by its nearest BS, nulls the
    second nearest, and hears every farther BS with ``K`` streams.  Only
    the ``n_points`` nearest BSs are generated (squared distances of a
    unit-rate planar Poisson process are partial sums of unit
    exponentials), which drops a tail of order ``1 / n_points`` from the
    interference and so can only raise the estimate.
    """
    rng = substream(seed, "ppp_worst_case")
    total, sq = 0.0, 0.0
    for s in range(0, trials, chunk):
        b = min(chunk, trials - s)
        r2 = np.cumsum(rng.exponential(size=(b, n_points)), axis=1)
        g0 = rng.gamma(float(N - 2 * K + 1), size=b)
        gj = rng.gamma(float(K), size=(b, n_points - 2))
        sir = g0 * r2[:, 0] ** (-beta / 2) / np.sum(r2[:, 2:] ** (-beta / 2) * gj, axis=1)
        v = np.log2(1.0 + sir) / L
        total += float(np.sum(v))
        sq += float(np.sum(v * v))
    mean = total / trials
    var = max(sq / trials - mean * mean, 0.0) * trials / max(trials - 1, 1)
    return mean, math.sqrt(var / trials)
