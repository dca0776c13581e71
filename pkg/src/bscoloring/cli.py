"""Command-line front end: ``plan``, ``analyze`` and ``simulate``.

Experiments are described by an INI file (see ``docs/config.md``);
command-line flags override the seed and the worker count.  Every output
starts with a ``#`` line carrying the config hash and master seed, and a
``manifest.json`` lists the artifacts with their SHA-256 digests.
"""

import argparse
import configparser
import hashlib
import json
import os
import sys

import numpy as np

from . import __version__
from .analysis import (
    FixedGeometry,
    ergodic_se_exact,
    ergodic_se_lower,
    ergodic_se_ppp_lower,
    rate_coverage_approx,
    rate_coverage_exact,
)
from .channel import ScenarioParams
from .simrunner import (
    DEFAULT_GAMMAS,
    ExperimentConfig,
    ResultTable,
    TopologySpec,
    build_layout,
    run_edge_user_throughput,
    run_rate_coverage,
    run_validation,
)
from .svgplot import line_chart

FIGURES = ("fig5", "fig6", "fig8", "fig9")
EXPRESSIONS = ("coverage_exact", "coverage_approx", "se_exact", "se_lower", "se_ppp_lower")


class ConfigError(Exception):
    pass


class OutputExists(Exception):
    pass


# ------------------------------------------------------------------ config


def _floats(text):
    return tuple(float(v) for v in text.replace(",", " ").split())


def _pairs(text):
    out = []
    for tok in text.replace(",", " ").split():
        n, _, k = tok.partition(":")
        out.append((int(n), int(k)))
    return tuple(out)


def _bool(text):
    v = text.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _opt_float(text):
    v = text.strip().lower()
    return None if v in ("", "none", "inf") else float(v)


SCENARIO_KEYS = dict(
    N=int, K=int, beta=float, snr_db=_opt_float, gamma=float, L=int, delta_ec=int,
    k_per_bs=float, mmse=float, L_b=float, overhead_enabled=_bool,
)
TOPOLOGY_KEYS = dict(
    kind=str, rows=int, cols=int, cell_size=float, p=float, density=float,
    window=_floats, analysis_window=_floats, path=str, count=int,
)
EXPERIMENT_KEYS = dict(
    seed=int, trials=int, user_drops=int, methods=lambda t: tuple(t.replace(",", " ").split()),
    gamma_grid=_floats, k_per_bs_grid=_floats, edge_user_threshold=float, n_dummies=int,
    gain_model=str, proposed_share=_opt_float, nk_pairs=_pairs, snr_db_grid=_floats,
    tagged_users=int,
)
ANALYZE_KEYS = dict(
    expressions=lambda t: tuple(t.replace(",", " ").split()), d0=float, ratios=_floats,
    distances=_floats, gamma_grid=_floats, snr_db_grid=_floats,
)
SECTIONS = dict(scenario=SCENARIO_KEYS, topology=TOPOLOGY_KEYS, experiment=EXPERIMENT_KEYS, analyze=ANALYZE_KEYS)


def read_config(path):
    """Parse an INI file into ``{section: {key: value}}`` with typed values."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    if path is not None:
        if not os.path.isfile(path):
            raise ConfigError(f"config file not found: {path}")
        try:
            with open(path, encoding="utf-8") as fh:
                parser.read_file(fh)
        except configparser.Error as exc:
            raise ConfigError(f"cannot parse {path}: {exc}") from None
    out = {}
    for name in parser.sections():
        if name not in SECTIONS:
            raise ConfigError(f"unknown section [{name}]")
        keys = SECTIONS[name]
        sec = {}
        for key, raw in parser.items(name):
            if key not in keys:
                raise ConfigError(f"unknown key {key!r} in [{name}]")
            try:
                sec[key] = keys[key](raw)
            except ValueError as exc:
                raise ConfigError(f"[{name}] {key}: {exc}") from None
        out[name] = sec
    return out


def build_config(sections, seed=None, threads=1, figure=None, p=None):
    try:
        scenario = ScenarioParams(**sections.get("scenario", {}))
        topo_kw = dict(sections.get("topology", {}))
        if p is not None:
            topo_kw["p"] = p
        if figure in ("fig5", "fig6") and "p" not in topo_kw:
            topo_kw["p"] = 200.0
        for k in ("window", "analysis_window"):
            if k in topo_kw and len(topo_kw[k]) != 4:
                raise ValueError(f"{k} needs four numbers")
        exp_kw = dict(sections.get("experiment", {}))
        if seed is not None:
            exp_kw["seed"] = seed
        if figure == "fig5" and "gamma_grid" not in exp_kw:
            exp_kw["gamma_grid"] = tuple(np.round(np.log2(1 + 10 ** (np.linspace(-10, 30, 15) / 10)), 12))
        return ExperimentConfig(
            scenario=scenario, topology=TopologySpec(**topo_kw), threads=max(1, threads), **exp_kw
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


# ------------------------------------------------------------------ output


class Writer:
    """Collects artifacts and refuses to clobber existing files."""

    def __init__(self, out_dir, force, header):
        self.out_dir = out_dir
        self.force = force
        self.header = header
        self.files = {}

    def add(self, name, text, comment=True):
        if comment:
            text = f"# {self.header}\n{text}"
        self.files[name] = text

    def commit(self, manifest):
        os.makedirs(self.out_dir, exist_ok=True)
        targets = list(self.files) + ["manifest.json"]
        clash = [n for n in targets if os.path.exists(os.path.join(self.out_dir, n))]
        if clash and not self.force:
            raise OutputExists(f"refusing to overwrite {', '.join(clash)} in {self.out_dir} (use --force)")
        arts = []
        for name, text in self.files.items():
            data = text.encode("utf-8")
            with open(os.path.join(self.out_dir, name), "wb") as fh:
                fh.write(data)
            arts.append(dict(path=name, sha256=hashlib.sha256(data).hexdigest()))
        manifest = dict(manifest, artifacts=arts)
        with open(os.path.join(self.out_dir, "manifest.json"), "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")
        return arts


def config_hash(cfg, sections):
    blob = json.dumps([cfg.to_dict(), sections], sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _table_svg(table, title, xlabel, ylabel, methods=None):
    series = {}
    for m in methods or table.methods():
        x, y, _, _ = table.series(m)
        series[m] = (x, y)
    return line_chart(series, title, xlabel, ylabel)


# ---------------------------------------------------------------- commands


def cmd_plan(cfg, writer):
    topo, plan = build_layout(cfg)
    writer.add("bs.txt", "".join(f"{float(x)!r} {float(y)!r}\n" for x, y in topo.bs))
    writer.add("edges.txt", "".join(f"{i} {j}\n" for i, j in plan.graph.edges))
    log = ["# order edge area restored"]
    back = set(plan.cut.restored)
    for k, (e, a) in enumerate(plan.cut.cut_log, 1):
        log.append(f"{k} {e[0]} {e[1]} {float(a)!r} {'yes' if e in back else 'no'}")
    writer.add("cut_log.txt", "\n".join(log) + "\n")
    writer.add("patterns.txt", plan.to_text())
    s = plan.summary()
    writer.add("summary.txt", "".join(f"{k} = {v}\n" for k, v in s.items()))
    return s


def _geometry(sec):
    d0 = sec.get("d0", 1.0)
    if "distances" in sec:
        return FixedGeometry.from_distances(d0, sec["distances"])
    return FixedGeometry(d0, sec.get("ratios", (2.0,)))


def cmd_analyze(cfg, sections, writer):
    sec = sections.get("analyze", {})
    exprs = sec.get("expressions", EXPRESSIONS)
    bad = set(exprs) - set(EXPRESSIONS)
    if bad:
        raise ConfigError(f"unknown expressions: {', '.join(sorted(bad))}")
    sc = cfg.scenario
    geom = _geometry(sec)
    gammas = sec.get("gamma_grid", DEFAULT_GAMMAS)
    snrs = sec.get("snr_db_grid", tuple(range(0, 161, 10)))
    out = {}
    for name in exprs:
        rows = []
        if name.startswith("coverage"):
            f = rate_coverage_exact if name == "coverage_exact" else rate_coverage_approx
            rows = [(g, name, f(geom, sc.N, sc.K, sc.beta, g), 0.0, 1) for g in gammas]
        elif name == "se_ppp_lower":
            rows = [(sc.beta, name, ergodic_se_ppp_lower(sc.N, sc.K, sc.beta, sc.L), 0.0, 1)]
        else:
            f = ergodic_se_exact if name == "se_exact" else ergodic_se_lower
            rows = [(s, name, f(geom, sc.N, sc.K, sc.beta, sc.L, 10 ** (s / 10)), 0.0, 1) for s in snrs]
        table = ResultTable(rows, {})
        writer.add(f"{name}.csv", table.to_csv().split("\n", 1)[1])
        out[name] = table
    return out


FIGURE_LABELS = dict(
    fig5=("rate coverage: approximation vs Monte-Carlo", "rate threshold (bits/s/Hz)", "coverage"),
    fig6=("ergodic spectral efficiency: lower bound vs Monte-Carlo", "SNR (dB)", "bits/s/Hz"),
    fig8=("edge-user sum throughput", "users per BS", "bits/s/Hz"),
    fig9=("rate coverage", "rate threshold (bits/s/Hz)", "coverage"),
)


def cmd_simulate(cfg, figure, writer):
    if figure == "fig5":
        table = run_validation(cfg, parts=("coverage",))
    elif figure == "fig6":
        table = run_validation(cfg, parts=("se",))
    elif figure == "fig8":
        table = run_edge_user_throughput(cfg)
    else:
        table = run_rate_coverage(cfg)
    writer.add(f"{figure}.csv", table.to_csv().split("\n", 1)[1])
    title, xl, yl = FIGURE_LABELS[figure]
    writer.add(f"{figure}.svg", _table_svg(table, title, xl, yl), comment=False)
    return table


# -------------------------------------------------------------------- main


def make_parser():
    ap = argparse.ArgumentParser(prog="bscoloring", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", metavar="PATH", help="INI experiment file")
        p.add_argument("--out", metavar="DIR", default=".", help="output directory (default: .)")
        p.add_argument("--seed", type=_u64, help="master seed, overrides the config")
        p.add_argument("--threads", type=int, default=1, help="worker processes for replicates")
        p.add_argument("--force", action="store_true", help="overwrite existing outputs")

    common(sub.add_parser("plan", help="build the cluster plan of a topology"))
    common(sub.add_parser("analyze", help="evaluate analytical expressions on grids"))
    sim = sub.add_parser("simulate", help="run a Monte-Carlo experiment")
    common(sim)
    sim.add_argument("--figure", choices=FIGURES, required=True)
    sim.add_argument("--p", type=float, help="perturbation square side, overrides the config")
    return ap


def _u64(text):
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def main(argv=None):
    ap = make_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        sections = read_config(args.config)
        figure = getattr(args, "figure", None)
        cfg = build_config(sections, args.seed, args.threads, figure, getattr(args, "p", None))
        digest = config_hash(cfg, sections)
        writer = Writer(args.out, args.force, f"config_hash={digest} seed={cfg.seed} version={__version__}")
        if args.command == "plan":
            result = cmd_plan(cfg, writer)
            msg = " ".join(f"{k}={v}" for k, v in result.items())
        elif args.command == "analyze":
            cmd_analyze(cfg, sections, writer)
            msg = f"wrote {len(writer.files)} tables"
        else:
            cmd_simulate(cfg, figure, writer)
            msg = f"wrote {figure}.csv and {figure}.svg"
        writer.commit(
            dict(config=args.config, out=args.out, subcommand=args.command, seed=cfg.seed, config_hash=digest)
        )
    except (ConfigError, OutputExists) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(msg)
    return 0


if __name__ == "__main__":
    sys.exit(main())
