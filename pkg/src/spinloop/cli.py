"""Experiment runner: one JSON config in, one artifact directory out.

Configs are single JSON documents (no environment configuration); outputs are
deterministic given (config, seed), with timestamps confined to
metadata.json.  Exit codes: 0 success, 1 runtime failure, 2 invalid config.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import subprocess
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .lattice.circuits import flower_parallelogram_domain
from .lattice.torus import TorusLattice
from .loop_core import LoopConfig
from .loop_samplers import FaceFlipChain
from .loop_structure import repair_identities
from .representations.dgff import dgff_covariance, dgff_sample
from .representations.hardhex import HardHexagonChain, TriangularTorusPatch
from .saw import connective_estimates, enumerate_saw
from .snapshots import export_snapshot
from .spin_core import Potential, SpinConfig
from .spin_observables import aizenman_crossing_experiment, ir_integral
from .spin_samplers import SamplerSpec, run_chain
from .stats import RNG_ALGORITHM, make_rng

KINDS = (
    "spin-sample", "loop-sample", "saw", "oracle", "ir-integral",
    "hardhex", "repair-audit", "dgff", "aizenman",
)


class ConfigError(ValueError):
    pass


def _require(config, key, types, default=None, required=False):
    if key not in config:
        if required:
            raise ConfigError(f"missing config key {key!r}")
        return default
    value = config[key]
    if not isinstance(value, types):
        raise ConfigError(f"config key {key!r} has wrong type {type(value).__name__}")
    return value


def _write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.12g}"
    return v


def _git_hash():
    try:
        out = subprocess.run(
            ["git", "rev-parse", "HEAD"], capture_output=True, text=True, timeout=5,
            cwd=os.path.dirname(os.path.abspath(__file__)),
        )
        if out.returncode == 0:
            return out.stdout.strip()
    except Exception:
        pass
    return "unknown"


# ---------------------------------------------------------------------------
# experiment bodies; each returns a JSON-serializable report


def _run_spin_sample(config, seed, out_dir, threads):
    d = _require(config, "d", int, required=True)
    n = _require(config, "n", int, required=True)
    big_l = _require(config, "L", int, required=True)
    beta = _require(config, "beta", (int, float), required=True)
    sweeps = _require(config, "sweeps", int, 1000)
    burn_in = _require(config, "burn_in", int, max(100, sweeps // 10))
    thinning = _require(config, "thinning", int, 1)
    sampler = _require(config, "sampler", str, "mixed" if n <= 3 else "metropolis")
    chains = _require(config, "chains", int, 1)
    lat = TorusLattice(d, big_l)
    reports = []
    chain_seeds = [int(make_rng(seed, stream=i).integers(2**62)) for i in range(chains)]

    def task(i):
        rows = []

        def observer(sweep, cfg):
            e = float(-beta * cfg.edge_inner_products().sum())
            m = float(np.linalg.norm(cfg.values.mean(axis=0)))
            rows.append((sweep, e, m))

        spec = SamplerSpec(
            lattice=lat, n=n, potential=Potential.ferromagnetic(float(beta)),
            sampler=sampler, sweeps=sweeps, burn_in=burn_in, thinning=thinning,
        )
        est = run_chain(
            spec, lambda c: float(np.linalg.norm(c.values.mean(axis=0))),
            seed=chain_seeds[i], on_sample=observer,
        )
        return i, rows, est

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        for i, rows, est in pool.map(task, range(chains)):
            _write_csv(
                os.path.join(out_dir, f"chain_{i}.csv"),
                ["sweep", "energy", "magnetization_norm"], rows,
            )
            cfg = est.metadata.pop("final_config")
            export_snapshot(cfg, os.path.join(out_dir, f"snapshot_{i}.json"))
            reports.append({
                "chain": i, "seed": chain_seeds[i],
                "mean_magnetization_norm": float(np.asarray(est.mean)),
                "std_error": float(np.asarray(est.std_error)),
                "autocorrelation_time": est.autocorrelation_time_estimate,
                "acceptance": est.metadata.get("acceptance_mean"),
                "mean_cluster": est.metadata.get("cluster_mean"),
            })
    return {"chains": reports}


def _loop_domain(config):
    cols = _require(config, "cols", int, 8)
    rows = _require(config, "rows", int, 6)
    return flower_parallelogram_domain(cols, rows)


def _run_loop_sample(config, seed, out_dir, threads):
    domain = _loop_domain(config)
    n = float(_require(config, "n", (int, float), required=True))
    x_raw = _require(config, "x", (int, float, str), required=True)
    x = math.inf if x_raw in ("inf", "infinity") else float(x_raw)
    steps = _require(config, "steps", int, 100_000)
    burn_in = _require(config, "burn_in", int, steps // 10)
    record_every = _require(config, "record_every", int, max(1, steps // 1000))
    rng = make_rng(seed)
    chain = FaceFlipChain(domain, n, x)
    chain.run(burn_in, rng)
    rows = []

    def observer(step, ch):
        cfg = LoopConfig(domain, ch.present)
        loops = cfg.loops()
        longest = max((len(l) for l in loops), default=0)
        rows.append((step, cfg.o, len(loops), longest))

    chain.run(steps, rng, observer=observer, observe_every=record_every)
    _write_csv(os.path.join(out_dir, "chain.csv"),
               ["step", "o", "loops", "longest_loop"], rows)
    export_snapshot(chain.config(), os.path.join(out_dir, "snapshot.json"))
    return {
        "steps": steps, "accepted": chain.accepted,
        "final_o": len(chain.present),
    }


def _run_saw(config, seed, out_dir, threads):
    k_max = _require(config, "k_max", int, 20)
    table = enumerate_saw(k_max)
    est = connective_estimates(table)
    rows = [(k, table.counts[k], est.growth.get(k, ""))
            for k in sorted(table.counts)]
    _write_csv(os.path.join(out_dir, "saw.csv"), ["k", "s_k", "growth"], rows)
    return {
        "k_max": k_max,
        "s_k_max": table.counts[k_max],
        "mu_reference": est.mu_reference,
        "final_gap": est.gap_at(k_max),
    }


def _run_oracle(config, seed, out_dir, threads):
    from . import oracle as oracle_mod

    model = _require(config, "model", str, required=True)
    cache_dir = os.path.join(out_dir, "cache")
    if model == "ising":
        n_v = _require(config, "n_vertices", int, required=True)
        edges = [tuple(e) for e in _require(config, "edges", list, required=True)]
        beta = float(_require(config, "beta", (int, float), required=True))
        result = oracle_mod.cached_scalar(
            cache_dir, model, {"n_vertices": n_v, "edges": edges, "beta": beta},
            lambda: {"log_z": oracle_mod.exact_ising(
                n_v, edges, beta=beta, materialize=False).log_z},
        )
    elif model == "loop":
        domain = _loop_domain(config)
        n = float(_require(config, "n", (int, float), required=True))
        x = float(_require(config, "x", (int, float), required=True))

        def compute():
            table = oracle_mod.exact_loop(domain, n, x, materialize=False)
            return {"log_z": table.log_z,
                    "mean_o": table.observables[("mean", "o")],
                    "mean_loops": table.observables[("mean", "L")]}

        result = oracle_mod.cached_scalar(
            cache_dir, model,
            {"circuit": domain.to_json(), "n": n, "x": x}, compute,
        )
    elif model == "fk":
        n_v = _require(config, "n_vertices", int, required=True)
        edges = [tuple(e) for e in _require(config, "edges", list, required=True)]
        p = float(_require(config, "p", (int, float), required=True))
        q = float(_require(config, "q", (int, float), required=True))
        result = oracle_mod.cached_scalar(
            cache_dir, model, {"n_vertices": n_v, "edges": edges, "p": p, "q": q},
            lambda: {"log_z": oracle_mod.exact_fk(
                n_v, edges, p, q, materialize=False).log_z},
        )
    else:
        raise ConfigError(f"unknown oracle model {model!r}")
    with open(os.path.join(out_dir, "oracle.json"), "w") as fh:
        json.dump(result, fh, sort_keys=True)
    return result


def _run_ir_integral(config, seed, out_dir, threads):
    d = _require(config, "d", int, required=True)
    grid = _require(config, "grid", int, 64)
    r = ir_integral(d, grid)
    result = {
        "d": d, "value": None if math.isinf(r.value) else r.value,
        "divergent": r.divergent, "method": r.method,
        "coarse": r.coarse, "fine": r.fine,
    }
    with open(os.path.join(out_dir, "ir_integral.json"), "w") as fh:
        json.dump(result, fh, sort_keys=True)
    return result


def _run_hardhex(config, seed, out_dir, threads):
    a = _require(config, "a", int, 12)
    b = _require(config, "b", int, 12)
    lam = float(_require(config, "lam", (int, float), required=True))
    sweeps = _require(config, "sweeps", int, 20_000)
    burn_in = _require(config, "burn_in", int, sweeps // 5)
    initial = _require(config, "initial", str, "empty")
    record_every = _require(config, "record_every", int, max(1, sweeps // 500))
    patch = TriangularTorusPatch(a, b)
    chain = HardHexagonChain(patch, lam, initial=initial)
    rng = make_rng(seed)
    for _ in range(burn_in):
        chain.sweep(rng)
    rows = []
    for s in range(sweeps):
        chain.sweep(rng)
        if (s + 1) % record_every == 0:
            d0, d1, d2 = chain.sublattice_densities()
            rows.append((s + 1, d0, d1, d2))
    _write_csv(os.path.join(out_dir, "hardhex.csv"),
               ["sweep", "density_0", "density_1", "density_2"], rows)
    export_snapshot(chain, os.path.join(out_dir, "snapshot.json"))
    dens = np.array([[r[1], r[2], r[3]] for r in rows])
    return {"lam": lam, "mean_densities": dens.mean(axis=0).tolist()}


def _run_repair_audit(config, seed, out_dir, threads):
    domain = _loop_domain(config)
    n = float(_require(config, "n", (int, float), required=True))
    x = float(_require(config, "x", (int, float), required=True))
    steps = _require(config, "steps", int, 100_000)
    burn_in = _require(config, "burn_in", int, steps // 10)
    audit_every = _require(config, "audit_every", int, max(1, steps // 1000))
    rng = make_rng(seed)
    chain = FaceFlipChain(domain, n, x)
    chain.run(burn_in, rng)
    audits = 0
    violations = 0
    max_v = 0

    def observer(step, ch):
        nonlocal audits, violations, max_v
        audits += 1
        try:
            audit = repair_identities(LoopConfig(domain, ch.present), domain.circuit)
            max_v = max(max_v, audit.v_size)
        except AssertionError:
            violations += 1
            raise

    chain.run(steps, rng, observer=observer, observe_every=audit_every)
    result = {
        "states_audited": audits, "identity_violations": violations,
        "max_deviation_size": max_v, "n": n, "x": x,
    }
    with open(os.path.join(out_dir, "repair_audit.json"), "w") as fh:
        json.dump(result, fh, sort_keys=True)
    return result


def _run_dgff(config, seed, out_dir, threads):
    big_l = _require(config, "L", int, 16)
    beta = float(_require(config, "beta", (int, float), 1.0))
    samples = _require(config, "samples", int, 2000)
    rng = make_rng(seed)
    var = dgff_covariance(big_l, beta)
    side = 2 * big_l
    acc = np.zeros((side, side))
    for _ in range(samples):
        acc += np.cos(dgff_sample(big_l, beta, rng))
    acc /= samples
    rows = []
    for r in range(1, big_l + 1):
        rows.append((r, var[r, 0], acc[r, 0], math.exp(-var[r, 0] / 2)))
    _write_csv(os.path.join(out_dir, "dgff.csv"),
               ["distance", "var_exact", "ecos_empirical", "ecos_predicted"], rows)
    return {"L": big_l, "beta": beta, "samples": samples}


def _run_aizenman(config, seed, out_dir, threads):
    big_l = _require(config, "L", int, 16)
    ell = _require(config, "ell", int, 4)
    sweeps = _require(config, "sweeps", int, 4000)
    burn_in = _require(config, "burn_in", int, 1000)
    thin = _require(config, "thinning", int, 10)
    lat = TorusLattice(2, big_l)
    pot = Potential.hard_support(1.0 / math.sqrt(2.0))
    rng = make_rng(seed)
    cfg = SpinConfig.aligned(lat, 2)
    from .spin_samplers import metropolis_sweep

    for _ in range(burn_in):
        metropolis_sweep(cfg, lat, pot, rng, 0.6)
    samples = []
    for s in range(sweeps):
        metropolis_sweep(cfg, lat, pot, rng, 0.6)
        if (s + 1) % thin == 0:
            samples.append(cfg.copy())
    report = aizenman_crossing_experiment(samples, lat, ell)
    result = {
        "ell": ell, "bound": report.bound,
        "max_correlation": report.max_correlation,
        "max_correlation_se": report.max_correlation_se,
        "p_box_crossing": report.p_top_bottom_box,
        "p_nn_crossing": report.p_left_right_nn,
        "duality_violations": report.duality_violations,
        "vortex_count": report.vortex_count,
        "n_samples": report.n_samples,
    }
    with open(os.path.join(out_dir, "aizenman.json"), "w") as fh:
        json.dump(result, fh, sort_keys=True)
    return result


RUNNERS = {
    "spin-sample": _run_spin_sample,
    "loop-sample": _run_loop_sample,
    "saw": _run_saw,
    "oracle": _run_oracle,
    "ir-integral": _run_ir_integral,
    "hardhex": _run_hardhex,
    "repair-audit": _run_repair_audit,
    "dgff": _run_dgff,
    "aizenman": _run_aizenman,
}

_KNOWN_KEYS = {
    "kind", "seed", "d", "n", "L", "beta", "sweeps", "burn_in", "thinning",
    "sampler", "chains", "cols", "rows", "x", "steps", "record_every",
    "k_max", "model", "n_vertices", "edges", "p", "q", "grid", "a", "b",
    "lam", "initial", "audit_every", "samples", "ell",
}


def validate_config(config) -> str:
    if not isinstance(config, dict):
        raise ConfigError("config must be a JSON object")
    kind = config.get("kind")
    if kind not in KINDS:
        raise ConfigError(f"config kind must be one of {KINDS}, got {kind!r}")
    unknown = set(config) - _KNOWN_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return kind


def run(config: dict, seed: int, out_dir: str, threads: int = 1,
        dry_run: bool = False) -> dict:
    kind = validate_config(config)
    if dry_run:
        return {"kind": kind, "dry_run": True}
    os.makedirs(out_dir, exist_ok=True)
    started = time.time()
    report = RUNNERS[kind](config, seed, out_dir, threads)
    metadata = {
        "schema": "v1",
        "kind": kind,
        "seed": seed,
        "rng": RNG_ALGORITHM,
        "git": _git_hash(),
        "config": config,
        "elapsed_seconds": time.time() - started,
    }
    with open(os.path.join(out_dir, "metadata.json"), "w") as fh:
        json.dump(metadata, fh, indent=2, sort_keys=True)
    return report


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="spinloop")
    sub = parser.add_subparsers(dest="command", required=True)
    runp = sub.add_parser("run", help="run an experiment from a JSON config")
    runp.add_argument("config", help="path to the JSON config")
    runp.add_argument("--seed", type=int, default=None)
    runp.add_argument("--out", default=None)
    runp.add_argument("--dry-run", action="store_true")
    runp.add_argument("--threads", type=int, default=1)
    args = parser.parse_args(argv)

    try:
        with open(args.config) as fh:
            config = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return 2
    try:
        kind = validate_config(config)
    except ConfigError as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return 2
    if args.threads < 1:
        print("--threads must be >= 1", file=sys.stderr)
        return 2

    seed = args.seed if args.seed is not None else int(config.get("seed", 0))
    out_dir = args.out or f"artifacts-{kind}"
    try:
        report = run(config, seed, out_dir, threads=args.threads,
                     dry_run=args.dry_run)
    except ConfigError as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # runtime failure: partial logs stay in out_dir
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 1
    print(json.dumps(report, sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
