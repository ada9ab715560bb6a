"""Command-line surface for simulations, predictions and verifications.

Configuration comes from a TOML or JSON file (selected by extension)
with individual fields overridable by flags.  Commands emit CSV time
series and JSON reports into the output directory.  Exit codes: 0 ok,
1 predicate failure (a bound was violated), 2 input error, 3 numerical
failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

try:
    import tomllib  # py >= 3.11
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib

from . import asymptotics, gauge, lindblad, verify
from .errors import AccuracyError, CapacityError, DomainError, InputError, WalkError
from .generators import (
    StaticGenerator,
    chiral_adjacency,
    chiral_hamiltonian,
    ctqw_generator,
    ctrw_generator,
    gaussian_potential,
    rotating_frame_generator,
)
from .graphs import Graph, load_graph

WALK_KINDS = ("ctrw", "ctqw", "chiral", "rotating", "qsw")


@dataclass
class ExperimentConfig:
    """Resolved experiment parameters, file fields merged with flag overrides."""

    graph_path: Optional[str] = None
    kind: str = "ctqw"
    potential: Optional[dict] = None
    omega: object = None  # scalar for qsw, vector for rotating
    pairs: object = "all"
    t_min: Optional[float] = None
    t_max: Optional[float] = None
    points: int = 20
    grid: str = "log"
    tol: float = 1e-10
    seed: int = 0
    realizations: int = 75
    initial_vertex: int = 0
    envelope: str = "norm"
    workers: int = 1
    output_dir: str = "."

    def validate(self) -> None:
        if self.kind not in WALK_KINDS:
            raise InputError("kind", f"must be one of {WALK_KINDS}, got {self.kind!r}")
        if self.points < 2:
            raise InputError("points", "need at least 2 grid points")
        if self.grid not in ("log", "linear"):
            raise InputError("grid", f"must be 'log' or 'linear', got {self.grid!r}")
        if self.grid == "log" and self.t_min is not None and self.t_min <= 0:
            raise InputError("t_min", "log grids need t_min > 0")
        if self.realizations < 1:
            raise InputError("realizations", "need at least one realization")
        if self.tol <= 0:
            raise InputError("tol", "tolerance must be positive")


_CONFIG_FIELDS = {
    "graph": "graph_path",
    "graph_path": "graph_path",
    "kind": "kind",
    "potential": "potential",
    "omega": "omega",
    "pairs": "pairs",
    "t_min": "t_min",
    "t_max": "t_max",
    "points": "points",
    "grid": "grid",
    "tol": "tol",
    "seed": "seed",
    "realizations": "realizations",
    "initial_vertex": "initial_vertex",
    "envelope": "envelope",
    "workers": "workers",
    "output_dir": "output_dir",
}


def load_config_file(path: str) -> dict:
    p = Path(path)
    if not p.exists():
        raise InputError("config", f"file not found: {path}")
    data = p.read_bytes()
    if p.suffix == ".toml":
        try:
            return tomllib.loads(data.decode("utf-8"))
        except tomllib.TOMLDecodeError as exc:
            raise InputError("config", f"invalid TOML: {exc}") from exc
    try:
        return json.loads(data)
    except json.JSONDecodeError as exc:
        raise InputError("config", f"invalid JSON: {exc}") from exc


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    cfg = ExperimentConfig()
    if getattr(args, "config", None):
        raw = load_config_file(args.config)
        for key, value in raw.items():
            if key not in _CONFIG_FIELDS:
                raise InputError(key, "unknown configuration field")
            setattr(cfg, _CONFIG_FIELDS[key], value)
    overrides = {
        "graph": "graph_path",
        "kind": "kind",
        "omega": "omega",
        "t_min": "t_min",
        "t_max": "t_max",
        "points": "points",
        "seed": "seed",
        "tol": "tol",
        "output_dir": "output_dir",
        "pairs": "pairs",
        "realizations": "realizations",
        "initial_vertex": "initial_vertex",
        "envelope": "envelope",
        "workers": "workers",
        "grid": "grid",
    }
    for flag, attr in overrides.items():
        val = getattr(args, flag, None)
        if val is not None:
            setattr(cfg, attr, val)
    if isinstance(cfg.pairs, str) and cfg.pairs != "all":
        cfg.pairs = _parse_pairs_string(cfg.pairs)
    cfg.validate()
    return cfg


def _parse_pairs_string(text: str) -> list:
    pairs = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        sep = ":" if ":" in chunk else "-"
        try:
            a, b = chunk.split(sep)
            pairs.append((int(a), int(b)))
        except ValueError as exc:
            raise InputError("pairs", f"cannot parse pair {chunk!r} (use 's:t,...')") from exc
    if not pairs:
        raise InputError("pairs", "no pairs given")
    return pairs


# -- shared assembly ---------------------------------------------------------


def _load_graph(cfg: ExperimentConfig):
    if not cfg.graph_path:
        raise InputError("graph", "no graph file given (config 'graph' or --graph)")
    try:
        return load_graph(cfg.graph_path)
    except FileNotFoundError as exc:
        raise InputError("graph", f"file not found: {cfg.graph_path}") from exc


def _potential_vector(cfg: ExperimentConfig, n: int) -> Optional[np.ndarray]:
    spec = cfg.potential
    if spec is None or spec == "none":
        return None
    if isinstance(spec, (list, tuple)):
        v = np.asarray(spec, dtype=float)
    elif isinstance(spec, dict) and "file" in spec:
        try:
            v = np.asarray(json.loads(Path(spec["file"]).read_text()), dtype=float)
        except (OSError, ValueError, json.JSONDecodeError) as exc:
            raise InputError("potential.file", str(exc)) from exc
    elif spec == "gaussian" or (isinstance(spec, dict) and spec.get("kind") == "gaussian"):
        seed = spec.get("seed", cfg.seed) if isinstance(spec, dict) else cfg.seed
        if seed is None:
            raise InputError("potential.seed", "gaussian potential needs an explicit seed")
        v = gaussian_potential(n, int(seed))
    else:
        raise InputError("potential", f"unrecognized potential spec {spec!r}")
    if v.size != n:
        raise InputError("potential", f"length {v.size} does not match {n} vertices")
    return v


def _build_generator(cfg: ExperimentConfig, g: Graph, thetas: Optional[dict]):
    v = _potential_vector(cfg, g.n)
    if cfg.kind == "ctrw":
        return ctrw_generator(g)
    if cfg.kind == "ctqw":
        return ctqw_generator(g, v)
    if cfg.kind == "chiral":
        return chiral_hamiltonian(g, thetas or {})
    if cfg.kind == "rotating":
        if not isinstance(cfg.omega, (list, tuple)):
            raise InputError("omega", "the rotating walk needs a frequency vector")
        return rotating_frame_generator(g, [float(x) for x in cfg.omega])
    raise InputError("kind", f"{cfg.kind!r} has no single-particle generator")


def _build_lindbladian(cfg: ExperimentConfig, g: Graph):
    if cfg.omega is None:
        raise InputError("omega", "the dissipative walk needs a scalar omega")
    if isinstance(cfg.omega, (list, tuple)):
        raise InputError("omega", "the dissipative walk needs a scalar omega, not a vector")
    return lindblad.build_lindbladian(g, _potential_vector(cfg, g.n), float(cfg.omega))


def _time_grid(cfg: ExperimentConfig, tau: float) -> np.ndarray:
    t_min, t_max = cfg.t_min, cfg.t_max
    if t_max is None:
        t_max = 1e-2 * tau
    if t_min is None:
        t_min = 1e-3 * tau if cfg.grid == "log" else 0.0
    if t_max <= t_min:
        raise InputError("t_max", f"t_max={t_max} must exceed t_min={t_min}")
    if cfg.grid == "log":
        if t_min <= 0:
            raise InputError("t_min", "log grids need t_min > 0")
        return np.geomspace(t_min, t_max, cfg.points)
    return np.linspace(t_min, t_max, cfg.points)


def _resolve_pairs(cfg: ExperimentConfig, g: Graph) -> list:
    if cfg.pairs == "all":
        return [(s, t) for s in range(g.n) for t in range(g.n) if s != t]
    try:
        return [(g.check_vertex(int(s)), g.check_vertex(int(t))) for s, t in cfg.pairs]
    except (TypeError, ValueError) as exc:
        raise InputError("pairs", f"expected a list of [source, target]: {exc}") from exc
    except DomainError as exc:
        raise InputError("pairs", str(exc)) from exc


# -- output helpers ----------------------------------------------------------


def export_series(times, values, path) -> None:
    """CSV export at full double precision with LF endings.

    Real series use the header ``t,value``; complex ones ``t,re,im``.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values)
    if times.shape[0] != values.shape[0]:
        raise DomainError("times and values must have equal length")
    is_complex = np.iscomplexobj(values)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if is_complex:
            fh.write("t,re,im\n")
            for t, v in zip(times, values):
                fh.write(f"{t:.17g},{v.real:.17g},{v.imag:.17g}\n")
        else:
            fh.write("t,value\n")
            for t, v in zip(times, values):
                fh.write(f"{t:.17g},{float(v):.17g}\n")


def _write_json(obj, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _outdir(cfg: ExperimentConfig) -> Path:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


# -- commands ----------------------------------------------------------------


def cmd_simulate(cfg: ExperimentConfig) -> int:
    g, thetas = _load_graph(cfg)
    out = _outdir(cfg)
    if cfg.kind == "qsw":
        ql = _build_lindbladian(cfg, g)
        tau = asymptotics.timescale(StaticGenerator(ql.matrix))
        ts = _time_grid(cfg, tau)
        for u, m in _resolve_pairs(cfg, g):
            series = lindblad.density_entry_series(ql, u, (m, m), ts, cfg.tol).real
            export_series(ts, series, out / f"simulate_{u}_{m}.csv")
        return 0
    gen = _build_generator(cfg, g, thetas)
    tau = asymptotics.timescale(gen, horizon=cfg.t_max or 1.0)
    ts = _time_grid(cfg, tau)
    for s, t in _resolve_pairs(cfg, g):
        probs = asymptotics.transition_probability_series(
            gen, s, t, ts, classical=(cfg.kind == "ctrw"), tol=cfg.tol
        )
        export_series(ts, probs, out / f"simulate_{s}_{t}.csv")
    return 0


def cmd_predict(cfg: ExperimentConfig) -> int:
    g, thetas = _load_graph(cfg)
    if cfg.kind == "qsw":
        raise InputError("kind", "use the 'lindblad' command for dissipative-walk geometry")
    gen = _build_generator(cfg, g, thetas)
    tau = asymptotics.timescale(gen, horizon=cfg.t_max or 1.0)
    t_ref = cfg.t_max if cfg.t_max is not None else 1e-2 * tau
    preds = []
    for s, t in _resolve_pairs(cfg, g):
        pred, _ = asymptotics.predict(gen, g, s, t, t_ref)
        preds.append(pred.to_json_dict(classical=(cfg.kind == "ctrw")))
    _write_json(preds, _outdir(cfg) / "predictions.json")
    return 0


def cmd_verify_bound(cfg: ExperimentConfig) -> int:
    g, thetas = _load_graph(cfg)
    gen = _build_generator(cfg, g, thetas)
    tau = asymptotics.timescale(gen, horizon=cfg.t_max or 1.0)
    if cfg.t_max is None:
        cfg = _with_window(cfg, 1e-4 * tau, 2.0 * tau)
    ts = _time_grid(cfg, tau)
    pairs = _resolve_pairs(cfg, g)
    if cfg.envelope == "norm":
        reports = verify.verify_norm_bound(gen, g, ts, pairs=pairs, tol=cfg.tol)
    elif cfg.envelope in ("split", "interaction"):
        if not gen.is_static:
            raise InputError("envelope", "the split envelope applies to static generators")
        reports = verify.verify_split_bound(gen.matrix, g, ts, pairs=pairs, tol=cfg.tol)
    else:
        raise InputError("envelope", f"unknown envelope {cfg.envelope!r}")
    violated = verify.any_violation(reports)
    _write_json(
        {
            "envelope": cfg.envelope,
            "seed": cfg.seed,
            "t_grid": [float(t) for t in ts],
            "violated": violated,
            "reports": [r.to_json_dict() for r in reports],
        },
        _outdir(cfg) / "bound_report.json",
    )
    return 1 if violated else 0


def _with_window(cfg: ExperimentConfig, t_min: float, t_max: float) -> ExperimentConfig:
    import copy

    out = copy.copy(cfg)
    out.t_min, out.t_max = t_min, t_max
    return out


def cmd_fit(cfg: ExperimentConfig) -> int:
    g, thetas = _load_graph(cfg)
    out = []
    if cfg.kind == "qsw":
        ql = _build_lindbladian(cfg, g)
        tau = asymptotics.timescale(StaticGenerator(ql.matrix))
        window = _fit_window(cfg, tau)
        ts = np.geomspace(window[0], window[1], cfg.points)
        for u, m in _resolve_pairs(cfg, g):
            series = lindblad.density_entry_series(ql, u, (m, m), ts, cfg.tol).real
            fit = asymptotics.fit_exponent(list(zip(ts, series)), window)
            out.append(_fit_json((u, m), fit, verify.infer_distance(fit.slope, False)))
    else:
        gen = _build_generator(cfg, g, thetas)
        tau = asymptotics.timescale(gen, horizon=cfg.t_max or 1.0)
        window = _fit_window(cfg, tau)
        classical = cfg.kind == "ctrw"
        for s, t in _resolve_pairs(cfg, g):
            fit = verify.fitted_probability_law(
                gen, s, t, tau=tau, window=window, points=cfg.points, classical=classical
            )
            out.append(_fit_json((s, t), fit, verify.infer_distance(fit.slope, classical)))
    _write_json(out, _outdir(cfg) / "fits.json")
    return 0


def _fit_window(cfg: ExperimentConfig, tau: float) -> tuple:
    if cfg.t_min is not None and cfg.t_max is not None:
        return (cfg.t_min, cfg.t_max)
    return asymptotics.default_fit_window(tau)


def _fit_json(pair, fit, inferred) -> dict:
    return {
        "pair": list(pair),
        "slope": fit.slope,
        "intercept": fit.intercept,
        "residual": fit.residual,
        "inferred_distance": inferred,
    }


def cmd_gauge(cfg: ExperimentConfig) -> int:
    g, thetas = _load_graph(cfg)
    h = chiral_adjacency(g, thetas or {})
    result = gauge.gauge_trivialize(h)
    obj = {"trivializable": result.trivializable}
    if result.trivializable:
        obj["lambda"] = [[x.real, x.imag] for x in result.lam]
    else:
        obj["witness_cycle"] = list(result.witness_cycle)
        obj["witness_phase"] = [result.witness_phase.real, result.witness_phase.imag]
    _write_json(obj, _outdir(cfg) / "gauge.json")
    return 0


def cmd_lindblad(cfg: ExperimentConfig) -> int:
    g, _ = _load_graph(cfg)
    ql = _build_lindbladian(cfg, g)
    tau = asymptotics.timescale(StaticGenerator(ql.matrix))
    ts = _time_grid(cfg, tau)
    out = _outdir(cfg)
    u = g.check_vertex(cfg.initial_vertex)
    geometries = []
    for n, m in _resolve_pairs(cfg, g):
        series = lindblad.density_entry_series(ql, u, (n, m), ts, cfg.tol)
        export_series(ts, series, out / f"rho_{n}_{m}.csv")
        geometries.append(lindblad.lgraph_geometry(ql, (u, u), (n, m)).to_json_dict())
    _write_json(
        {
            "omega": ql.omega,
            "initial_vertex": u,
            "tau": tau,
            "geometry": geometries,
        },
        out / "lgraph_geometry.json",
    )
    _write_json(
        {
            "d": ql.d,
            "omega": ql.omega,
            "flat_index": "E_nm -> n*d + m",
            "matrix": [[[z.real, z.imag] for z in row] for row in ql.matrix],
        },
        out / "lindbladian.json",
    )
    return 0


def cmd_disorder(cfg: ExperimentConfig) -> int:
    g, _ = _load_graph(cfg)
    if cfg.pairs == "all":
        raise InputError("pairs", "the disorder protocol needs an explicit pair list")
    pairs = _resolve_pairs(cfg, g)
    result = verify.disorder_experiment(
        g,
        pairs,
        seed=cfg.seed,
        realizations=cfg.realizations,
        points=cfg.points,
        workers=cfg.workers,
    )
    out = _outdir(cfg)
    spread = result.spread()
    summary = {
        "seed": cfg.seed,
        "realizations": cfg.realizations,
        "pairs": [list(p) for p in result.pairs],
        "tau": [float(x) for x in result.taus],
        "slopes": [[float(x) for x in row] for row in result.slopes],
        "coefficients": [[float(x) for x in row] for row in result.coefficients],
        "slope_mean": [float(x) for x in result.slopes.mean(axis=0)],
        "slope_spread": [float(x) for x in spread],
    }
    _write_json(summary, out / "disorder_summary.json")
    for pair, (xs, ps) in result.collapse.items():
        export_series(xs, ps, out / f"collapse_{pair[0]}_{pair[1]}.csv")
    return 0


# -- entry point ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ctwalks",
        description="Continuous-time walks on graphs: simulation, short-time "
        "power laws, truncation bounds, gauge tests and dissipative walks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    commands = {
        "simulate": "exact transition-probability time series (CSV per pair)",
        "predict": "leading-order coefficients and exponents (JSON)",
        "verify-bound": "truncation-bound sweep over pairs and times (JSON)",
        "fit": "log-log exponent fits and inferred distances (JSON)",
        "gauge": "gauge-trivialization test of a chiral graph (JSON)",
        "lindblad": "dissipative-walk density entries and walk-graph geometry",
        "disorder": "on-site disorder universality protocol",
    }
    for name, help_text in commands.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="TOML or JSON experiment file")
        p.add_argument("--graph", help="graph file (JSON or edge list)")
        p.add_argument("--kind", choices=WALK_KINDS)
        p.add_argument("--omega", type=float, help="dissipation strength (qsw)")
        p.add_argument("--t-min", dest="t_min", type=float)
        p.add_argument("--t-max", dest="t_max", type=float)
        p.add_argument("--points", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--tol", type=float)
        p.add_argument("--output-dir", dest="output_dir")
        p.add_argument("--pairs", help="'all' or 's:t,s:t,...'")
        p.add_argument("--realizations", type=int)
        p.add_argument("--initial-vertex", dest="initial_vertex", type=int)
        p.add_argument("--envelope", choices=("norm", "split", "interaction"))
        p.add_argument("--workers", type=int)
        p.add_argument("--grid", choices=("log", "linear"))
    return parser


_COMMANDS = {
    "simulate": cmd_simulate,
    "predict": cmd_predict,
    "verify-bound": cmd_verify_bound,
    "fit": cmd_fit,
    "gauge": cmd_gauge,
    "lindblad": cmd_lindblad,
    "disorder": cmd_disorder,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        return _COMMANDS[args.command](cfg)
    except (InputError, CapacityError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except AccuracyError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except WalkError as exc:
        print(f"failure: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
