"""Command-line front end.

Every subcommand takes an optional INI file (``--config``) whose sections act
as namespaces (``[reservoir]``, ``[scan]``, ``[simulate]``, ``[dynamics]``,
``[esn]``); command-line flags override file values.  Outputs are CSV plus a
``metadata.json`` sidecar echoing every resolved parameter.
"""

from __future__ import annotations

import argparse
import configparser
import dataclasses
import datetime as _dt
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from ._backend import BACKEND
from .dde import DDEIntegrator, DivergenceError, write_trajectory_csv
from .dynamics import probe_dynamics
from .esn import EsnConfig, evaluate_esn
from .harness import (
    READOUT_DIMENSION,
    EmptyAggregateError,
    InsufficientOverlapError,
    ReservoirConfig,
    ScanResult,
    ScanSpec,
    aggregate,
    default_jobs,
    preset_spec,
    scan2d,
    task_covariance,
)
from .masking import InputSchedule, generate_mask, pump_levels, write_mask_csv
from .model import ConfigurationError
from .readout import SingularSystemError, harvest
from .tasks import (
    NARMA_LENGTHS_TWO_NODE,
    SANTA_FE_LENGTHS,
    MissingDataError,
    NarmaDivergenceError,
    TaskGenerationError,
    generate_narma_task,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_MISSING_DATA = 3
EXIT_NUMERICAL = 4


def _bool(s) -> bool:
    if isinstance(s, bool):
        return s
    v = str(s).strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _triple(kind):
    def conv(s):
        if isinstance(s, (tuple, list)):
            parts = list(s)
        else:
            parts = [p for p in str(s).replace(" ", "").strip("()[]").split(",") if p]
        if len(parts) != 3:
            raise ValueError(f"expected three comma-separated values, got {s!r}")
        if kind == "range":
            return (float(parts[0]), float(parts[1]), int(parts[2]))
        return tuple(int(p) for p in parts)
    return conv


def _opt_float(s):
    return None if s in (None, "", "none", "None") else float(s)


def _opt_str(s):
    return None if s in (None, "", "none", "None") else str(s)


SCHEMA = {
    "reservoir": {
        "n_real": int, "n_virtual": int, "topology": str, "lambda": float, "phi": float,
        "kappa": float, "omega": float, "gamma_re": float, "gamma_im": float, "theta": float,
        "tau": _opt_float, "eta": float, "dt": float, "ridge": float, "observable": str,
    },
    "scan": {
        "preset": _opt_str, "reduced": int, "lambda_range": _triple("range"),
        "phi_range": _triple("range"), "task": str, "lengths": _triple("lengths"), "seed": int,
        "fixed_task": _bool, "dynamics": _bool, "santa_fe_path": _opt_str,
    },
    "simulate": {"windows": int, "duration": float, "input_seed": int, "mask_seed": int, "stride": int},
    "dynamics": {"transient_taus": float, "window_taus": float, "sample_dt": float},
    "esn": {"n_nodes": int, "spectral_radius": float, "input_scale": float, "density": float,
            "seed": int, "ridge": float, "task_seed": int, "lengths": _triple("lengths")},
}

_RESERVOIR_FIELDS = {"lambda": "lambda_pump"}


def load_config(path) -> dict[str, dict]:
    """Parse and type-check an INI file into ``{section: {key: value}}``."""
    if path is None:
        return {}
    p = Path(path)
    if not p.is_file():
        raise ConfigurationError(f"config file {str(p)!r} not found")
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        cp.read(p)
    except configparser.Error as exc:
        raise ConfigurationError(f"{p}: {exc}") from exc
    out = {}
    for sec in cp.sections():
        if sec not in SCHEMA:
            raise ConfigurationError(f"{p}: unknown section [{sec}]; expected one of {sorted(SCHEMA)}")
        out[sec] = {}
        for key, raw in cp.items(sec):
            out[sec][key] = _convert(sec, key, raw)
    return out


def _convert(sec, key, raw):
    conv = SCHEMA[sec].get(key)
    if conv is None:
        raise ConfigurationError(f"[{sec}] {key}: unknown key; expected one of {sorted(SCHEMA[sec])}")
    try:
        return conv(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(f"[{sec}] {key} = {raw!r}: {exc}") from exc


def merge(file_cfg: dict, flags: dict[str, dict]) -> dict[str, dict]:
    """Flag values (non-None) override file values section by section."""
    out = {s: dict(v) for s, v in file_cfg.items()}
    for sec, vals in flags.items():
        for key, v in vals.items():
            if v is not None:
                out.setdefault(sec, {})[key] = _convert(sec, key, v)
    return out


def reservoir_from(values: dict, base: ReservoirConfig | None = None) -> ReservoirConfig:
    """Apply ``[reservoir]`` values; N_V defaults to 256 / N_R and tau to 17 N_V."""
    kw = {_RESERVOIR_FIELDS.get(k, k): v for k, v in values.items()}
    if base is None:
        nr = kw.get("n_real", ReservoirConfig.n_real)
        if "n_virtual" not in kw:
            if nr < 1 or READOUT_DIMENSION % nr:
                raise ConfigurationError(
                    f"[reservoir] n_real = {nr}: set n_virtual explicitly when n_real does not divide {READOUT_DIMENSION}")
            kw["n_virtual"] = READOUT_DIMENSION // nr
        return ReservoirConfig(**kw)
    if ("n_real" in kw or "n_virtual" in kw) and "tau" not in kw:
        kw["tau"] = None
    if "n_real" in kw and "n_virtual" not in kw:
        kw["n_virtual"] = READOUT_DIMENSION // kw["n_real"]
    return dataclasses.replace(base, **kw)


def _reservoir_dict(cfg: ReservoirConfig) -> dict:
    d = dataclasses.asdict(cfg)
    d["lambda"] = d.pop("lambda_pump")
    return d


def resolve_scan(cfg: dict[str, dict]) -> ScanSpec:
    res = cfg.get("reservoir", {})
    sc = cfg.get("scan", {})
    task = sc.get("task", "narma10")
    if sc.get("preset"):
        spec = preset_spec(sc["preset"], n_real=res.get("n_real"), task=task,
                           reduced=sc.get("reduced", 1), base_seed=sc.get("seed", 0),
                           santa_fe_path=sc.get("santa_fe_path"), dt=res.get("dt", 0.01),
                           fixed_task=sc.get("fixed_task", False))
        rest = {k: v for k, v in res.items() if k not in ("n_real", "dt")}
        base = reservoir_from(rest, spec.base) if rest else spec.base
        over = {"base": base}
    else:
        base = reservoir_from(res)
        default_lengths = SANTA_FE_LENGTHS if task == "santafe" else NARMA_LENGTHS_TWO_NODE
        spec = ScanSpec(base=base, task=task, lengths=default_lengths)
        over = {}
        r = sc.get("reduced", 1)
        if r != 1:
            over["lengths"] = tuple(max(1, math.ceil(x / r)) for x in spec.lengths)
    for key, field_name in (("lambda_range", "lambda_range"), ("phi_range", "phi_range"),
                            ("lengths", "lengths"), ("seed", "base_seed"),
                            ("fixed_task", "fixed_task"), ("dynamics", "probe_dynamics"),
                            ("santa_fe_path", "santa_fe_path")):
        if key in sc:
            over[field_name] = sc[key]
    return dataclasses.replace(spec, **over)


def write_manifest(spec: ScanSpec, path) -> None:
    """INI file that reproduces ``spec`` exactly when passed back via --config."""
    cp = configparser.ConfigParser()
    cp["reservoir"] = {k: repr(float(v)) if isinstance(v, float) else str(v)
                       for k, v in _reservoir_dict(spec.base).items()}
    cp["scan"] = {
        "task": spec.task,
        "lambda_range": ",".join(str(x) if isinstance(x, int) else repr(float(x)) for x in spec.lambda_range),
        "phi_range": ",".join(str(x) if isinstance(x, int) else repr(float(x)) for x in spec.phi_range),
        "lengths": ",".join(str(x) for x in spec.lengths),
        "seed": str(spec.base_seed),
        "fixed_task": str(spec.fixed_task),
        "dynamics": str(spec.probe_dynamics),
        "santa_fe_path": spec.santa_fe_path or "",
    }
    with open(path, "w") as fh:
        cp.write(fh)


def _sidecar(path, command: str, resolved: dict, extra: dict | None = None) -> None:
    meta = {
        "command": command,
        "version": __version__,
        "backend": BACKEND,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        "resolved": resolved,
        **(extra or {}),
    }
    with open(path, "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True, default=str)


def _outdir(p) -> Path:
    out = Path(p)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True, default=str))


# -- subcommands ---------------------------------------------------------------

def cmd_simulate(args, cfg) -> int:
    res = reservoir_from(cfg.get("reservoir", {}))
    sim = {"windows": 10, "duration": 0.0, "input_seed": 0, "mask_seed": 0, "stride": 100,
           **cfg.get("simulate", {})}
    out = _outdir(args.out)
    integ = DDEIntegrator(res.params(), res.adjacency(), res.integrator())
    timing = res.timing()
    if sim["windows"] > 0:
        u = np.random.default_rng(sim["input_seed"]).random(sim["windows"])
        mask = generate_mask(res.n_real, res.n_virtual, sim["mask_seed"])
        levels = pump_levels(InputSchedule(u, res.eta, res.lambda_pump), mask)
        run = integ.run(levels, integ.config.steps(timing.theta, "theta"), stride=sim["stride"])
        states = harvest(run.samples, timing, res.observable)
        np.savetxt(out / "states.csv", states, delimiter=",", fmt="%.17g",
                   header=",".join([f"x{i}" for i in range(states.shape[1] - 1)] + ["bias"]), comments="")
        write_mask_csv(mask, out / "mask.csv")
    elif sim["duration"] > 0:
        level = np.full((1, res.n_real), res.lambda_pump)
        run = integ.run(level, integ.config.steps(sim["duration"], "duration"), stride=sim["stride"])
    else:
        raise ConfigurationError("[simulate] needs windows > 0 or duration > 0")
    write_trajectory_csv(out / "trajectory.csv", run.traj_t, run.traj_z)
    _sidecar(out / "metadata.json", "simulate", {"reservoir": _reservoir_dict(res), "simulate": sim},
             {"t_end": integ.t})
    print(f"wrote {out / 'trajectory.csv'} ({len(run.traj_t)} rows)")
    return EXIT_OK


def cmd_scan(args, cfg) -> int:
    spec = resolve_scan(cfg)
    out = _outdir(args.out)
    jobs = args.jobs or default_jobs()

    def progress(done, total):
        if not args.quiet:
            print(f"\r{done}/{total} cells", end="" if done < total else "\n", file=sys.stderr, flush=True)

    result = scan2d(spec, jobs=jobs, progress=progress)
    result.to_csv(out / "scan.csv")
    write_manifest(spec, out / "manifest.ini")
    _sidecar(out / "metadata.json", "scan", {"spec": spec.to_dict()},
             {"jobs": jobs, "wall_time_s": result.meta["wall_time_s"], "n_failed": result.n_failed})
    summary = {"cells": len(result.cells), "failed": result.n_failed}
    try:
        a = aggregate(result)
        summary.update(best=a.best, mean=a.mean, std=a.std, n_used=a.n_used)
    except EmptyAggregateError:
        pass
    _emit(summary)
    if result.n_failed and not args.allow_failures:
        print(f"error: {result.n_failed} cell(s) failed (pass --allow-failures to accept)", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_dynamics(args, cfg) -> int:
    res = reservoir_from(cfg.get("reservoir", {}))
    dyn = {"transient_taus": 50.0, "window_taus": 10.0, "sample_dt": 0.1, **cfg.get("dynamics", {})}
    label = probe_dynamics(res.params(), res.adjacency(), res.integrator(), **dyn)
    report = {"sync_label": label.sync.value, "extrema_levels": label.n_extrema_levels}
    if args.out:
        out = _outdir(args.out)
        _sidecar(out / "metadata.json", "dynamics", {"reservoir": _reservoir_dict(res), "dynamics": dyn}, report)
    _emit(report)
    return EXIT_OK


def cmd_esn(args, cfg) -> int:
    e = {"n_nodes": 256, "spectral_radius": 0.9, "input_scale": 1.0, "density": 0.1, "seed": 0,
         "ridge": 1e-8, "task_seed": 0, "lengths": NARMA_LENGTHS_TWO_NODE, **cfg.get("esn", {})}
    config = EsnConfig(e["n_nodes"], e["spectral_radius"], e["input_scale"], e["density"], e["seed"])
    task = generate_narma_task(e["lengths"], e["task_seed"])
    tr, te = evaluate_esn(config, task, e["ridge"])
    report = {"nrmse_train": tr, "nrmse_test": te, "task_seed_used": task.seed}
    if args.out:
        out = _outdir(args.out)
        _sidecar(out / "metadata.json", "esn", {"esn": e}, report)
    _emit(report)
    return EXIT_OK


def cmd_aggregate(args, cfg) -> int:
    rows = []
    for p in args.csv:
        a = aggregate(ScanResult.from_csv(p), args.cutoff)
        rows.append({"file": str(p), "best": a.best, "mean": a.mean, "std": a.std, "n_used": a.n_used})
    _emit(rows if len(rows) > 1 else rows[0])
    return EXIT_OK


def cmd_covariance(args, cfg) -> int:
    a, b = ScanResult.from_csv(args.csv_a), ScanResult.from_csv(args.csv_b)
    r = task_covariance(a, b, args.cutoff)
    _emit(dataclasses.asdict(r))
    return EXIT_OK


# -- argument parsing ------------------------------------------------------------

def _reservoir_flags(p):
    g = p.add_argument_group("reservoir")
    g.add_argument("--nr", dest="n_real", help="number of real oscillators N_R")
    g.add_argument("--nv", dest="n_virtual", help="virtual nodes per oscillator (default 256/N_R)")
    g.add_argument("--topology", help="ring | ring_jumps | bidirectional")
    g.add_argument("--lambda", dest="lambda_", metavar="LAMBDA", help="pump rate")
    g.add_argument("--phi", help="coupling phase")
    g.add_argument("--kappa")
    g.add_argument("--gamma-re", dest="gamma_re")
    g.add_argument("--gamma-im", dest="gamma_im")
    g.add_argument("--tau")
    g.add_argument("--eta")
    g.add_argument("--dt")
    g.add_argument("--ridge")


def _reservoir_values(args) -> dict:
    keys = ("n_real", "n_virtual", "topology", "phi", "kappa", "gamma_re", "gamma_im", "tau", "eta", "dt", "ridge")
    vals = {k: getattr(args, k, None) for k in keys}
    vals["lambda"] = getattr(args, "lambda_", None)
    return vals


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="slrc", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="integrate one configuration and dump trajectory and states")
    p.add_argument("--config")
    p.add_argument("--out", default="slrc_out")
    p.add_argument("--windows")
    p.add_argument("--duration")
    p.add_argument("--stride")
    _reservoir_flags(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("scan", help="2-D (lambda, phi) scan")
    p.add_argument("--config")
    p.add_argument("--out", default="slrc_scan")
    p.add_argument("--preset", help="fig4 | fig5 | fig6 | fig7 | fig8")
    p.add_argument("--reduced", help="divide grid counts and lengths by N")
    p.add_argument("--task", help="narma10 | santafe")
    p.add_argument("--lambda-range", dest="lambda_range", help="min,max,count")
    p.add_argument("--phi-range", dest="phi_range", help="min,max,count (max excluded)")
    p.add_argument("--lengths", help="buffer,train,test")
    p.add_argument("--seed")
    p.add_argument("--fixed-task", dest="fixed_task", action="store_const", const="true")
    p.add_argument("--no-dynamics", dest="dynamics", action="store_const", const="false")
    p.add_argument("--santafe", dest="santa_fe_path")
    p.add_argument("--jobs", type=int, default=None, help="worker processes (default: logical cores)")
    p.add_argument("--allow-failures", action="store_true")
    p.add_argument("--quiet", action="store_true")
    _reservoir_flags(p)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("dynamics", help="label the input-free dynamics at one point")
    p.add_argument("--config")
    p.add_argument("--out")
    _reservoir_flags(p)
    p.set_defaults(func=cmd_dynamics)

    p = sub.add_parser("esn", help="echo state network baseline on NARMA10")
    p.add_argument("--config")
    p.add_argument("--out")
    p.add_argument("--n-nodes", dest="n_nodes")
    p.add_argument("--seed")
    p.set_defaults(func=cmd_esn)

    p = sub.add_parser("aggregate", help="best / mean / std of scan CSVs")
    p.add_argument("csv", nargs="+")
    p.add_argument("--cutoff", type=float, default=0.95)
    p.set_defaults(func=cmd_aggregate)

    p = sub.add_parser("covariance", help="correlation between two scan CSVs")
    p.add_argument("csv_a")
    p.add_argument("csv_b")
    p.add_argument("--cutoff", type=float, default=0.9)
    p.set_defaults(func=cmd_covariance)
    return ap


def _flags(args) -> dict[str, dict]:
    cmd = args.command
    flags: dict[str, dict] = {}
    if cmd in ("simulate", "scan", "dynamics"):
        flags["reservoir"] = _reservoir_values(args)
    if cmd == "simulate":
        flags["simulate"] = {k: getattr(args, k) for k in ("windows", "duration", "stride")}
    if cmd == "scan":
        flags["scan"] = {k: getattr(args, k) for k in ("preset", "reduced", "task", "lambda_range", "phi_range",
                                                       "lengths", "seed", "fixed_task", "dynamics",
                                                       "santa_fe_path")}
    if cmd == "esn":
        flags["esn"] = {"n_nodes": args.n_nodes, "seed": args.seed}
    return flags


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = merge(load_config(getattr(args, "config", None)), _flags(args))
        return args.func(args, cfg)
    except MissingDataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISSING_DATA
    except (DivergenceError, SingularSystemError, NarmaDivergenceError, TaskGenerationError,
            FloatingPointError) as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ConfigurationError, EmptyAggregateError, InsufficientOverlapError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
