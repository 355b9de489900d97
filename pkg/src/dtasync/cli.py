"""Command-line experiment runner.

Every subcommand writes CSV data and JSON results under ``--out`` and a
``manifest.json`` listing each output with its SHA-256 digest. Exit codes:
0 success, 1 runtime failure, 2 usage or configuration error.

``run CONFIG.json`` executes a scenario from a JSON file::

    {
      "scenario": "simulate",
      "network": {"kind": "complete", "n": 100},
      "params": {"coupling": 1.5, "alpha": 0.5, "t_end": 100},
      "seeds": [0]
    }

Top-level keys are ``scenario``, ``network``, ``params``, ``seeds``, ``out``
and ``scale``; ``params`` accepts the keyword arguments of the matching
subcommand (``-`` in option names becomes ``_``). Unknown keys are rejected.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .attention import AttentionParams, discrete_attention, phase_history
from .dynamics import FrequencyDist, SimConfig, SLConfig, simulate_batch, simulate_stuart_landau
from .estimator import EstimationProtocol, System, estimate_lambda_c, replica_seeds, sweep
from .hopfield import (GLYPHS, glyph_config, glyph_pattern, leading_eigenvalue, jacobian_at_pattern,
                       load_pattern_file, random_mask, recover, render, stability_map, zero_mode)
from .meanfield import lambda_c_neighbor, lambda_c_self, lambda_c_self_delta
from .netgraph import NetworkSpec, aspl, generate

__all__ = ["main", "RunManifest", "ConfigError", "PRESETS"]


class ConfigError(ValueError):
    """Bad arguments or configuration (exit code 2)."""


@dataclass
class RunManifest:
    command: str
    config: dict
    seeds: list
    version: str = __version__
    wall_clock: float = 0.0
    outputs: list = field(default_factory=list)

    def add(self, path: Path) -> None:
        digest = hashlib.sha256(Path(path).read_bytes()).hexdigest()
        self.outputs.append({"path": Path(path).name, "sha256": digest})

    def to_dict(self) -> dict:
        return {"command": self.command, "config": self.config, "seeds": self.seeds,
                "version": self.version, "wall_clock_s": round(self.wall_clock, 3),
                "outputs": self.outputs}

    def write(self, out_dir: Path) -> Path:
        return write_atomic(Path(out_dir) / "manifest.json", json.dumps(self.to_dict(), indent=2) + "\n")


def write_atomic(path: Path, text: str) -> Path:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)
    return path


def parse_range(text: str) -> np.ndarray:
    """``lo:hi:n`` (inclusive linspace) or a comma-separated list."""
    try:
        if ":" in text:
            lo, hi, n = text.split(":")
            n = int(n)
            if n < 1:
                raise ValueError
            return np.linspace(float(lo), float(hi), n)
        return np.array([float(x) for x in text.split(",")])
    except ValueError:
        raise ConfigError(f"cannot parse range {text!r}; use lo:hi:n or a comma list") from None


def _freq(text) -> FrequencyDist:
    try:
        return FrequencyDist.parse(text)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


# ---------------------------------------------------------------- scenarios
# Each scenario takes (out_dir, seed, jobs, scale, network-spec dict, params)
# and returns the list of written files plus a JSON-able result.

NETWORK_KEYS = {"kind", "n", "seed", "k", "p", "m", "path", "indexing"}


def _network_spec(d: dict, seed: int) -> NetworkSpec:
    unknown = set(d) - NETWORK_KEYS
    if unknown:
        raise ConfigError(f"unknown network key(s): {', '.join(sorted(unknown))}")
    d = dict(d)
    d.setdefault("kind", "complete")
    d.setdefault("seed", seed)
    return NetworkSpec(**d)


def _check_params(params: dict, allowed: set, scenario: str) -> None:
    unknown = set(params) - allowed
    if unknown:
        raise ConfigError(f"unknown parameter(s) for {scenario}: {', '.join(sorted(unknown))}")


def scenario_generate_network(out, seed, jobs, scale, net, params):
    _check_params(params, set(), "generate-network")
    spec = _network_spec(net, seed)
    g = generate(spec)
    edges_path = out / "edges.csv"
    with open(edges_path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["i", "j"])
        w.writerows(g.edges().tolist())
    result = {"name": g.name, "n": g.n, "edges": g.n_edges, "aspl": aspl(g), "sha1": g.content_hash()}
    return [edges_path], result


SIM_KEYS = {"coupling", "alpha", "beta", "noise", "dt", "t_end", "attention", "freq", "measure_window",
            "record_every", "attention_init", "model", "rho", "sl_a", "sl_b", "sl_sigma"}


def scenario_simulate(out, seed, jobs, scale, net, params, seeds=None):
    _check_params(params, SIM_KEYS, "simulate")
    p = dict(params)
    model = p.pop("model", "phase")
    spec = _network_spec(net, seed)
    g = generate(spec)
    seeds = seeds if seeds is not None else [seed]
    files, results = [], []
    freq = _freq(p.pop("freq", "delta"))
    if model == "stuart-landau":
        # noise strength doubles as sigma; amplitude dynamics have no attention_init choice
        sigma = p.pop("sl_sigma", p.pop("noise", 0.0))
        if p.pop("attention_init", "phase") != "phase":
            raise ConfigError("the Stuart-Landau model starts its attention state at z(0)")
        sl = SLConfig(a=p.pop("sl_a", 1.0), b=p.pop("sl_b", 1.0), sigma=sigma,
                      coupling=p.pop("coupling", 1.0), alpha=p.pop("alpha", 0.0), beta=p.pop("beta", 1.0),
                      dt=p.pop("dt", 0.01), t_end=p.pop("t_end", 20.0), attention=p.pop("attention", "neighbor"),
                      freq=freq, measure_window=p.pop("measure_window", 0.2),
                      record_every=p.pop("record_every", 10))
        if p:
            raise ConfigError(f"parameter(s) not used by the Stuart-Landau model: {', '.join(sorted(p))}")
        series = []
        for s in seeds:
            series.append(simulate_stuart_landau(SLConfig(**{**sl.__dict__, "seed": s}), g))
        cfg_echo = {k: v for k, v in sl.__dict__.items() if k != "freq"} | {"freq": freq.label()}
    elif model in ("phase", "opinion"):
        rho = p.pop("rho", 0.0) if model == "opinion" else None
        if model == "phase" and "rho" in p:
            raise ConfigError("rho is only used with model=opinion")
        cfg = SimConfig(coupling=p.pop("coupling", 1.0), alpha=p.pop("alpha", 0.0), beta=p.pop("beta", 1.0),
                        noise=p.pop("noise", 0.5), dt=p.pop("dt", 0.05),
                        t_end=p.pop("t_end", 2000.0 if scale == "desk" else 1e4),
                        attention=p.pop("attention", "neighbor"), freq=freq,
                        measure_window=p.pop("measure_window", 0.2), record_every=p.pop("record_every", 20),
                        attention_init=p.pop("attention_init", "phase"))
        for k in ("sl_a", "sl_b", "sl_sigma"):
            if k in p:
                raise ConfigError(f"{k} is only used with model=stuart-landau")
        series = simulate_batch(g, seeds, coupling=cfg.coupling, alpha=cfg.alpha, beta=cfg.beta,
                                noise=cfg.noise, attention=cfg.attention, freq=cfg.freq, dt=cfg.dt,
                                t_end=cfg.t_end, measure_window=cfg.measure_window,
                                record_every=cfg.record_every, attention_init=cfg.attention_init, rho=rho)
        cfg_echo = cfg.to_dict() | {"model": model} | ({"rho": rho} if rho is not None else {})
    else:
        raise ConfigError(f"unknown model {model!r}; use phase, opinion or stuart-landau")
    for s, ser in zip(seeds, series):
        path = out / f"series_seed{s}.csv"
        ser.to_csv(path)
        side = out / f"series_seed{s}.json"
        ser.write_sidecar(side, cfg_echo | {"seed": s}, g)
        files += [path, side]
        results.append({"seed": s, "R_mean": ser.R_mean})
    return files, {"runs": results}


def _system(net_spec, params, scale):
    p = dict(params)
    return System(network=net_spec, attention=p.pop("attention", "neighbor"), alpha=p.pop("alpha", 0.0),
                  beta=p.pop("beta", 1.0), noise=p.pop("noise", 0.5), coupling=p.pop("coupling", 1.0),
                  freq=_freq(p.pop("freq", "delta")), dt=p.pop("dt", 0.05),
                  t_end=p.pop("t_end", 2000.0 if scale == "desk" else 1e4),
                  measure_window=p.pop("measure_window", 0.2)), p


SYSTEM_KEYS = {"attention", "alpha", "beta", "noise", "coupling", "freq", "dt", "t_end", "measure_window"}


def scenario_sweep(out, seed, jobs, scale, net, params):
    _check_params(params, SYSTEM_KEYS | {"axis", "values", "seeds"}, "sweep")
    system, rest = _system(_network_spec(net, seed), params, scale)
    axis = rest.get("axis", "alpha")
    values = rest.get("values", "0:1:5")
    values = parse_range(values) if isinstance(values, str) else np.asarray(values, float)
    tab = sweep(system, axis, values, seeds=int(rest.get("seeds", 5)), master_seed=seed, jobs=jobs)
    path = out / f"sweep_{axis}.csv"
    tab.to_csv(path)
    return [path], {"axis": axis, "values": tab.values.tolist(), "R_mean": tab.mean.tolist(),
                    "R_sem": tab.sem.tolist()}


def scenario_estimate(out, seed, jobs, scale, net, params):
    _check_params(params, SYSTEM_KEYS | {"protocol", "grid", "seeds", "sizes", "c", "refine"},
                  "estimate-lambda-c")
    system, rest = _system(_network_spec(net, seed), params, scale)
    grid = rest.get("grid", "0.5:1.5:11")
    grid = parse_range(grid) if isinstance(grid, str) else np.asarray(grid, float)
    sizes = rest.get("sizes", [system.network.n])
    if isinstance(sizes, str):
        sizes = [int(x) for x in sizes.split(",")]
    prot = EstimationProtocol(grid=tuple(float(x) for x in grid), seeds=int(rest.get("seeds", 5)),
                              sizes=tuple(int(x) for x in sizes),
                              criterion=rest.get("protocol", "noise-floor-crossing"),
                              c=float(rest.get("c", 3.0)), refine=bool(rest.get("refine", True)),
                              master_seed=seed)
    est = estimate_lambda_c(system, prot, jobs=jobs)
    table = out / "lambda_c_table.csv"
    est.to_csv(table)
    res = out / "lambda_c.json"
    write_atomic(res, json.dumps(est.to_dict(), indent=2) + "\n")
    return [table, res], est.to_dict()


def scenario_lambda_c(out, seed, jobs, scale, net, params):
    _check_params(params, {"mode", "dist", "D", "alpha", "beta"}, "lambda-c")
    mode = params.get("mode", "neighbor")
    dist = _freq(params.get("dist", "delta"))
    D = float(params.get("D", 0.5))
    if mode == "neighbor":
        r = lambda_c_neighbor(D, dist)
    elif mode == "self":
        r = lambda_c_self(D, float(params.get("alpha", 0.0)), float(params.get("beta", 1.0)), dist)
    else:
        raise ConfigError(f"unknown mode {mode!r}; use neighbor or self")
    result = {"mode": mode, "dist": dist.label(), "D": D} | r.to_dict()
    if mode == "self" and dist.kind == "delta":
        result["closed_form"] = lambda_c_self_delta(D, float(params.get("alpha", 0.0)),
                                                    float(params.get("beta", 1.0)))
    path = out / "lambda_c.json"
    write_atomic(path, json.dumps(result, indent=2) + "\n")
    return [path], result


def _read_matrix(path):
    return np.loadtxt(path, delimiter=",", ndmin=2)


def scenario_attention_demo(out, seed, jobs, scale, net, params):
    _check_params(params, {"history", "wq", "wk", "steps", "n"}, "attention-demo")
    if params.get("history"):
        theta = _read_matrix(params["history"])
    else:
        rng = np.random.default_rng(seed)
        theta = np.cumsum(rng.normal(0.0, 0.3, (int(params.get("steps", 8)), int(params.get("n", 4)))), axis=0)
    n = theta.shape[1]
    wq = _read_matrix(params["wq"]) if params.get("wq") else np.eye(n)
    wk = _read_matrix(params["wk"]) if params.get("wk") else np.eye(n)
    att = discrete_attention(phase_history(theta), AttentionParams(wq, wk))
    kpath, mpath = out / "kernel_row.csv", out / "attention_vector.csv"
    with open(kpath, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["step", "weight"])
        w.writerows([[k, repr(float(x))] for k, x in enumerate(att.kernel_row)])
    with open(mpath, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["oscillator", "M_real", "M_imag"])
        w.writerows([[j, repr(float(m.real)), repr(float(m.imag))] for j, m in enumerate(att.M)])
    return [kpath, mpath], {"steps": int(theta.shape[0]), "n": n,
                            "kernel_row": att.kernel_row.tolist(),
                            "M": [[float(m.real), float(m.imag)] for m in att.M]}


HNN_KEYS = {"pattern", "pattern_file", "eps", "alpha", "beta", "second_order", "old", "new"}


def _hnn(params):
    eps = params.get("eps", 0.15)
    # a map overrides eps per grid cell
    cfg = glyph_config(eps=eps if isinstance(eps, (int, float)) else 0.0,
                       alpha=0.0, beta=float(params.get("beta", 1.0)),
                       old=params.get("old", "KUR"), new=params.get("new", "AMOT"),
                       second_order=params.get("second_order", "complex"))
    if params.get("pattern_file"):
        pat, label = load_pattern_file(params["pattern_file"]), Path(params["pattern_file"]).stem
    else:
        label = params.get("pattern", "A")
        pat = glyph_pattern(label)
    if pat.size != cfg.n:
        raise ConfigError(f"pattern has {pat.size} sites, network has {cfg.n}")
    return cfg, pat, label


def scenario_hopfield_map(out, seed, jobs, scale, net, params):
    _check_params(params, HNN_KEYS, "hopfield map")
    cfg, pat, label = _hnn(params)
    eps = params.get("eps", "0:0.6:13")
    alpha = params.get("alpha", "0:1:11")
    eps = parse_range(eps) if isinstance(eps, str) else np.atleast_1d(np.asarray(eps, float))
    alpha = parse_range(alpha) if isinstance(alpha, str) else np.atleast_1d(np.asarray(alpha, float))
    sm = stability_map(cfg, pat, eps, alpha)
    path = out / f"stability_{label}.csv"
    sm.to_csv(path)
    return [path], {"pattern": label, "min": float(sm.values.min()), "max": float(sm.values.max()),
                    "boundary_points": len(sm.boundary)}


def scenario_hopfield_recover(out, seed, jobs, scale, net, params):
    _check_params(params, HNN_KEYS | {"mask_frac", "steps"}, "hopfield recover")
    cfg, pat, label = _hnn(params)
    cfg = cfg.with_(alpha=float(params.get("alpha", 0.0)))
    ms, ps = np.random.SeedSequence(seed).spawn(2)
    mask = random_mask(pat.size, float(params.get("mask_frac", 0.2)), ms)
    decoded, ov = recover(cfg, pat, mask, steps=int(params.get("steps", 3000)), seed=ps)
    lead = leading_eigenvalue(jacobian_at_pattern(cfg, pat), zero_mode(pat),
                              exclude_zero=cfg.second_order == "complex")
    text = (f"pattern {label}  eps={cfg.eps:g}  alpha={cfg.alpha:g}  overlap={ov:.4f}  "
            f"leading={lead.real:+.4f}\n\ninitial (? = masked)\n{render(pat, mask)}\n\nrecovered\n"
            f"{render(decoded)}\n")
    print(text, end="")
    path = out / f"recover_{label}.txt"
    write_atomic(path, text)
    return [path], {"pattern": label, "overlap": ov, "leading_real": lead.real,
                    "exact": bool(np.array_equal(decoded, pat) or np.array_equal(decoded, -pat))}


SCENARIOS = {
    "generate-network": scenario_generate_network,
    "simulate": scenario_simulate,
    "sweep": scenario_sweep,
    "estimate-lambda-c": scenario_estimate,
    "lambda-c": scenario_lambda_c,
    "attention-demo": scenario_attention_demo,
    "hopfield-map": scenario_hopfield_map,
    "hopfield-recover": scenario_hopfield_recover,
}

# ------------------------------------------------------------------ presets

FC = {"kind": "complete"}
WS = {"kind": "watts-strogatz", "n": 200, "k": 4, "p": 0.1}


def _preset_fig3b(out, seed, jobs, scale):
    n, t_end = (200, 300.0) if scale == "desk" else (1000, 1e4)
    rows, files = [], []
    for a in (0.0, 0.25, 0.5, 0.75, 1.0):
        system = System(network=NetworkSpec("complete", n=n), attention="neighbor", alpha=a, t_end=t_end)
        prot = EstimationProtocol(grid=tuple(np.round(np.arange(0.5, 1.81, 0.1), 2)), seeds=5,
                                  master_seed=seed)
        e = estimate_lambda_c(system, prot, jobs)
        rows.append([a, e.lambda_c, e.half_width, lambda_c_neighbor(0.5).lambda_c])
    return _table(out / "fig3b.csv", ["alpha", "lambda_c_hat", "half_width", "lambda_c_analytic"], rows)


def _preset_fig3d(out, seed, jobs, scale):
    n, t_end = (200, 300.0) if scale == "desk" else (1000, 1e4)
    rows = []
    for beta in (1.0, 0.01):
        for a in (0.0, 0.2, 0.4, 0.6):
            system = System(network=NetworkSpec("complete", n=n), attention="self", alpha=a, beta=beta,
                            t_end=t_end)
            prot = EstimationProtocol(grid=tuple(np.round(np.arange(0.5, 2.21, 0.1), 2)), seeds=5,
                                      master_seed=seed)
            e = estimate_lambda_c(system, prot, jobs)
            rows.append([beta, a, e.lambda_c, e.half_width, lambda_c_self_delta(0.5, a, beta)])
    return _table(out / "fig3d.csv", ["beta", "alpha", "lambda_c_hat", "half_width", "lambda_c_analytic"], rows)


def _ws_alpha_preset(name, attention, alphas, out, seed, jobs, scale):
    t_end = 1e4
    seeds = 5 if scale == "desk" else 10
    rows = []
    net = generate(NetworkSpec(**(WS | {"seed": seed})))
    for beta in (1.0, 0.1, 0.01):
        tpl = System(network=NetworkSpec(**(WS | {"seed": seed})), attention=attention, beta=beta,
                     coupling=1.5, t_end=t_end)
        tab = sweep(tpl, "alpha", alphas, seeds=seeds, master_seed=seed, jobs=jobs, net=net)
        rows += [[beta, a, m, s] for a, m, s in zip(tab.values, tab.mean, tab.sem)]
    return _table(out / f"{name}.csv", ["beta", "alpha", "R_mean", "R_sem"], rows)


def _preset_fig4d(out, seed, jobs, scale):
    return _ws_alpha_preset("fig4d", "neighbor", (0.0, 0.25, 0.5, 0.75, 1.0), out, seed, jobs, scale)


def _preset_fig4h(out, seed, jobs, scale):
    return _ws_alpha_preset("fig4h", "self", (0.0, 0.1, 0.2, 0.3, 0.4, 0.6, 0.8, 0.95, 1.0),
                            out, seed, jobs, scale)


def _preset_fig5_style(out, seed, jobs, scale):
    # stand-ins for a low-ASPL and a high-ASPL social network; opinion pull rho = 0.1
    nets = {"erdos-renyi": NetworkSpec("erdos-renyi", n=200, p=0.5, seed=seed),
            "watts-strogatz": NetworkSpec(**(WS | {"seed": seed}))}
    alphas = np.array([0.0, 0.25, 0.5, 0.75, 1.0])
    seeds = replica_seeds(seed, 5 if scale == "desk" else 10)
    rows = []
    for label, spec in nets.items():
        g = generate(spec)
        for attention in ("neighbor", "self"):
            for beta in (1.0, 0.1, 0.01):
                pts = [(a, s) for a in alphas for s in seeds]
                res = simulate_batch(g, [s for _, s in pts], coupling=1.5, alpha=np.array([a for a, _ in pts]),
                                     beta=beta, noise=0.5, attention=attention, t_end=2000.0, rho=0.1)
                R = np.array([r.R_mean for r in res]).reshape(len(alphas), len(seeds))
                rows += [[label, round(aspl(g), 4), attention, beta, a, m, s]
                         for a, m, s in zip(alphas, R.mean(1), R.std(1, ddof=1) / np.sqrt(len(seeds)))]
    return _table(out / "fig5_style.csv", ["network", "aspl", "attention", "beta", "alpha", "R_mean", "R_sem"], rows)


def _preset_fig6_map(out, seed, jobs, scale):
    eps = np.round(np.linspace(0.0, 0.6, 13), 3)
    alpha = np.round(np.linspace(0.0, 1.0, 11), 3)
    cfg = glyph_config()
    files = []
    for letter in "KURAMOT":
        path = out / f"fig6_{letter}.csv"
        stability_map(cfg, glyph_pattern(letter), eps, alpha).to_csv(path)
        files.append(path)
    return files


def _table(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in r])
    return [path]


PRESETS = {
    "fig3b": _preset_fig3b,
    "fig3d": _preset_fig3d,
    "fig4d": _preset_fig4d,
    "fig4h": _preset_fig4h,
    "fig5-style": _preset_fig5_style,
    "fig6-map": _preset_fig6_map,
}

# ---------------------------------------------------------------- argparse


def _add_network_args(p):
    g = p.add_argument_group("network")
    g.add_argument("--network", dest="kind", default="complete",
                   choices=["complete", "watts-strogatz", "erdos-renyi", "barabasi-albert", "edge-list"])
    g.add_argument("--n", type=int, default=200)
    g.add_argument("--k", type=int, default=4)
    g.add_argument("--p", type=float, default=0.1)
    g.add_argument("--m", type=int, default=2)
    g.add_argument("--edge-list", dest="path")
    g.add_argument("--indexing", type=int, choices=[0, 1], default=1)
    g.add_argument("--network-seed", type=int, help="defaults to --seed")


def _add_system_args(p):
    p.add_argument("--attention", choices=["neighbor", "self", "none"], default="neighbor")
    p.add_argument("--coupling", type=float, default=1.0)
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--noise", type=float, default=0.5)
    p.add_argument("--freq", default="delta", help="delta or normal:<variance>")
    p.add_argument("--dt", type=float, default=0.05)
    p.add_argument("--t-end", type=float)
    p.add_argument("--measure-window", type=float, default=0.2)


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="dtasync", description=__doc__.split("\n")[0])
    top.add_argument("--seed", type=int, default=0)
    top.add_argument("--jobs", type=int, default=1)
    top.add_argument("--out", default="results")
    top.add_argument("--scale", choices=["desk", "paper"], default="desk")
    top.add_argument("--version", action="version", version=__version__)
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate-network", help="build a network, write its edge list and ASPL")
    _add_network_args(p)

    p = sub.add_parser("simulate", help="integrate one or more trajectories")
    _add_network_args(p)
    _add_system_args(p)
    p.add_argument("--model", choices=["phase", "opinion", "stuart-landau"], default="phase")
    p.add_argument("--rho", type=float, help="opinion pull strength (model=opinion)")
    p.add_argument("--sl-a", type=float, help="Stuart-Landau linear growth rate")
    p.add_argument("--sl-b", type=float, help="Stuart-Landau cubic saturation")
    p.add_argument("--record-every", type=int, default=20)
    p.add_argument("--attention-init", choices=["phase", "zero"], default="phase")
    p.add_argument("--replicas", type=int, default=1, help="seeds seed..seed+replicas-1")

    p = sub.add_parser("sweep", help="seed-averaged R over one parameter")
    _add_network_args(p)
    _add_system_args(p)
    p.add_argument("--axis", choices=["alpha", "beta", "coupling"], default="alpha")
    p.add_argument("--values", default="0:1:5")
    p.add_argument("--seeds", type=int, default=5)

    p = sub.add_parser("estimate-lambda-c", help="critical coupling from simulations")
    _add_network_args(p)
    _add_system_args(p)
    p.add_argument("--protocol", choices=["noise-floor-crossing", "finite-size-crossing"],
                   default="noise-floor-crossing")
    p.add_argument("--grid", default="0.5:1.5:11")
    p.add_argument("--seeds", type=int, default=5)
    p.add_argument("--sizes", help="comma-separated N values (defaults to --n)")
    p.add_argument("--c", type=float, default=3.0)

    p = sub.add_parser("lambda-c", help="continuum-limit critical coupling")
    p.add_argument("--mode", choices=["neighbor", "self"], default="neighbor")
    p.add_argument("--dist", default="delta", help="delta or normal:<variance>")
    p.add_argument("--D", type=float, default=0.5)
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--beta", type=float, default=1.0)

    p = sub.add_parser("attention-demo", help="discrete attention kernel of a phase history")
    p.add_argument("--history", help="CSV of phase angles, one row per time step")
    p.add_argument("--wq", help="CSV matrix W_Q (default identity)")
    p.add_argument("--wk", help="CSV matrix W_K (default identity)")
    p.add_argument("--steps", type=int, default=8)
    p.add_argument("--n", type=int, default=4)

    p = sub.add_parser("hopfield", help="associative memory with attention")
    hsub = p.add_subparsers(dest="action", required=True)
    for name in ("map", "recover"):
        h = hsub.add_parser(name)
        h.add_argument("--pattern", default="A", choices=sorted(GLYPHS))
        h.add_argument("--pattern-file")
        h.add_argument("--beta", type=float, default=1.0)
        h.add_argument("--second-order", choices=["complex", "modulus"], default="complex")
        if name == "map":
            h.add_argument("--eps", default="0:0.6:13")
            h.add_argument("--alpha", default="0:1:11")
        else:
            h.add_argument("--eps", type=float, default=0.15)
            h.add_argument("--alpha", type=float, default=0.0)
            h.add_argument("--mask-frac", type=float, default=0.2)
            h.add_argument("--steps", type=int, default=3000)

    p = sub.add_parser("preset", help="figure-style experiment at desk or paper scale")
    p.add_argument("name", choices=sorted(PRESETS))

    p = sub.add_parser("run", help="run a JSON configuration file")
    p.add_argument("config")
    return top


NET_ARGS = ("kind", "n", "k", "p", "m", "path", "indexing")


def _from_args(args) -> tuple[str, dict, dict, list | None]:
    """Translate parsed arguments into (scenario, network dict, params, seeds)."""
    cmd = args.command
    ns = vars(args)
    net = {k: ns[k] for k in NET_ARGS if k in ns and ns[k] is not None}
    if "network_seed" in ns and ns["network_seed"] is not None:
        net["seed"] = ns["network_seed"]
    if net.get("kind") != "edge-list":
        net.pop("path", None)
    skip = set(NET_ARGS) | {"network_seed", "command", "seed", "jobs", "out", "scale", "action", "replicas"}
    params = {k: v for k, v in ns.items() if k not in skip and v is not None}
    seeds = None
    if cmd == "simulate":
        seeds = list(range(args.seed, args.seed + args.replicas))
        if params.get("model") != "opinion":
            params.pop("rho", None)
    if cmd == "hopfield":
        cmd = f"hopfield-{args.action}"
        if params.get("pattern_file"):
            params.pop("pattern")
    return cmd, net, params, seeds


CONFIG_KEYS = {"scenario", "network", "params", "seeds", "out", "scale"}


def load_config(path) -> dict:
    try:
        cfg = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(cfg) - CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(sorted(unknown))}")
    if cfg.get("scenario") not in SCENARIOS:
        raise ConfigError(f"scenario must be one of {', '.join(SCENARIOS)}; got {cfg.get('scenario')!r}")
    if not isinstance(cfg.get("params", {}), dict) or not isinstance(cfg.get("network", {}), dict):
        raise ConfigError("network and params must be JSON objects")
    return cfg


def execute(scenario: str, out: Path, seed: int, jobs: int, scale: str, net: dict, params: dict,
            seeds=None, echo: dict | None = None) -> RunManifest:
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    fn = SCENARIOS[scenario]
    if scenario == "simulate":
        files, result = fn(out, seed, jobs, scale, net, params, seeds=seeds)
    else:
        files, result = fn(out, seed, jobs, scale, net, params)
    res_path = out / "result.json"
    write_atomic(res_path, json.dumps(result, indent=2, default=float) + "\n")
    manifest = RunManifest(scenario, echo or {"network": net, "params": params, "scale": scale},
                           seeds or [seed])
    for f in list(files) + [res_path]:
        manifest.add(f)
    manifest.wall_clock = time.perf_counter() - t0
    manifest.write(out)
    return manifest


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    out = Path(args.out)
    try:
        if args.command == "preset":
            out.mkdir(parents=True, exist_ok=True)
            t0 = time.perf_counter()
            files = PRESETS[args.name](out, args.seed, args.jobs, args.scale)
            m = RunManifest(f"preset {args.name}", {"preset": args.name, "scale": args.scale}, [args.seed])
            for f in files:
                m.add(f)
            m.wall_clock = time.perf_counter() - t0
            m.write(out)
            print(json.dumps(m.to_dict(), indent=2))
            return 0
        if args.command == "run":
            cfg = load_config(args.config)
            out = Path(cfg.get("out", args.out))
            seeds = cfg.get("seeds")
            seed = int(seeds[0]) if seeds else args.seed
            m = execute(cfg["scenario"], out, seed, args.jobs, cfg.get("scale", args.scale),
                        cfg.get("network", {}), cfg.get("params", {}), seeds=seeds, echo=cfg)
        else:
            scenario, net, params, seeds = _from_args(args)
            m = execute(scenario, out, args.seed, args.jobs, args.scale, net, params, seeds=seeds)
        print(json.dumps(json.loads((out / "result.json").read_text()), indent=2))
        return 0
    except ConfigError as exc:
        print(f"dtasync: error: {exc}", file=sys.stderr)
        return 2
    except (TypeError, KeyError) as exc:
        # malformed parameter values in a config file
        print(f"dtasync: error: bad configuration value: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - any runtime failure maps to exit 1
        print(f"dtasync: runtime failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
