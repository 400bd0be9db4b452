"""Run and sweep orchestration: configs, predictors, summaries, file formats."""
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
import csv
import io
import json
import math

import numpy as np

from hmflab import __version__
from hmflab import diagnostics, linstab, rmt, vlasov
from hmflab.equilibria import EquilibriumSpec, PerturbationSpec, build_equilibrium, perturb
from hmflab.integrator import IntegratorConfig, evolve

__all__ = [
    "ConfigError",
    "RunConfig",
    "SweepConfig",
    "splitmix64",
    "derive_seeds",
    "run_config_from_dict",
    "sweep_config_from_dict",
    "evaluate_predictors",
    "simulate",
    "sweep",
    "write_timeseries",
    "read_timeseries",
    "dumps",
]

TIMESERIES_HEADER = ("t", "mx", "my", "m", "u", "p_total")
SWEEP_AXES = ("delta_theta", "sigma_theta", "n", "T")
PREDICTORS = ("exact", "rmt", "vlasov")
_MASK64 = (1 << 64) - 1


class ConfigError(ValueError):
    pass


def splitmix64(x):
    """One SplitMix64 output for state ``x`` (the state advances by the golden gamma)."""
    z = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_seeds(master, count):
    """``count`` child seeds from one 64-bit master seed via SplitMix64."""
    state = int(master) & _MASK64
    seeds = []
    for _ in range(count):
        seeds.append(splitmix64(state))
        state = (state + 0x9E3779B97F4A7C15) & _MASK64
    return seeds


def member_seeds(seed):
    """(equilibrium seed, perturbation seed) for one ensemble member."""
    eq_seed, pert_seed = derive_seeds(seed, 2)
    return eq_seed, pert_seed


@dataclass(frozen=True)
class RunConfig:
    equilibrium: EquilibriumSpec = field(default_factory=lambda: EquilibriumSpec("quiet_start", 1000))
    perturbation: PerturbationSpec = field(default_factory=PerturbationSpec)
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    timeseries: str | None = "timeseries.csv"
    summary: str | None = "summary.json"
    predictors: tuple = ("exact", "vlasov")
    saturation_from: float | None = None

    def with_seed(self, seed):
        eq_seed, pert_seed = member_seeds(seed)
        return replace(
            self,
            equilibrium=replace(self.equilibrium, seed=eq_seed),
            perturbation=replace(self.perturbation, seed=pert_seed),
        )

    def to_dict(self):
        eq = asdict(self.equilibrium)
        eq["params"] = dict(self.equilibrium.params)
        return {
            "equilibrium": eq,
            "perturbation": asdict(self.perturbation),
            "integrator": asdict(self.integrator),
            "outputs": {"timeseries": self.timeseries, "summary": self.summary},
            "predictors": list(self.predictors),
            "saturation_from": self.saturation_from,
        }


@dataclass(frozen=True)
class SweepConfig:
    base: RunConfig
    axis: str
    values: tuple
    seeds: tuple
    summary: str = "sweep.json"
    table: str = "sweep.csv"

    def to_dict(self):
        return {
            "base": self.base.to_dict(),
            "axis": self.axis,
            "values": list(self.values),
            "seeds": list(self.seeds),
            "outputs": {"summary": self.summary, "table": self.table},
        }


def _take(d, key, kind, default=None):
    v = d.get(key, default)
    if v is None:
        return None
    try:
        return kind(v)
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: cannot interpret {v!r} as {kind.__name__}") from None


def _known(d, allowed, where):
    if not isinstance(d, dict):
        raise ConfigError(f"{where} must be a JSON object")
    extra = set(d) - set(allowed)
    if extra:
        raise ConfigError(f"{where}: unknown field(s) {sorted(extra)}")


def run_config_from_dict(d):
    """Validate a JSON-style dict and build a :class:`RunConfig`."""
    _known(d, ("equilibrium", "perturbation", "integrator", "outputs", "predictors", "saturation_from"), "config")
    try:
        e = d.get("equilibrium", {"kind": "quiet_start", "n": 1000})
        _known(e, ("kind", "n", "delta_theta", "sigma_theta", "density", "params", "seed"), "equilibrium")
        params = e.get("params") or {}
        if not isinstance(params, dict):
            raise ConfigError("equilibrium.params must be an object")
        eq = EquilibriumSpec(
            kind=str(e.get("kind", "quiet_start")),
            n=_take(e, "n", int, 1000),
            delta_theta=_take(e, "delta_theta", float),
            sigma_theta=_take(e, "sigma_theta", float),
            density=e.get("density"),
            params=tuple(sorted(params.items())),
            seed=_take(e, "seed", int, 0),
        )
        p = d.get("perturbation", {})
        _known(p, ("epsilon", "seed"), "perturbation")
        pert = PerturbationSpec(epsilon=_take(p, "epsilon", float), seed=_take(p, "seed", int, 0))
        pert.resolve(eq.n)
        i = d.get("integrator", {})
        _known(i, ("dt", "t_end", "sample_every", "scheme"), "integrator")
        integ = IntegratorConfig(
            dt=_take(i, "dt", float, IntegratorConfig.dt),
            t_end=_take(i, "t_end", float, IntegratorConfig.t_end),
            sample_every=_take(i, "sample_every", int, 1),
            scheme=str(i.get("scheme", "yoshida4")),
        )
        o = d.get("outputs", {})
        _known(o, ("timeseries", "summary"), "outputs")
        preds = tuple(d.get("predictors", ("exact", "vlasov")))
        bad = [x for x in preds if x not in PREDICTORS]
        if bad:
            raise ConfigError(f"unknown predictor(s) {bad}")
        sat = _take(d, "saturation_from", float)
        if eq.kind == "custom_symmetric":
            vlasov.named_density(eq.density, **dict(eq.params))
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from None
    return RunConfig(
        equilibrium=eq,
        perturbation=pert,
        integrator=integ,
        timeseries=o.get("timeseries", "timeseries.csv"),
        summary=o.get("summary", "summary.json"),
        predictors=preds,
        saturation_from=sat,
    )


def sweep_config_from_dict(d):
    _known(d, ("base", "axis", "values", "seeds", "outputs"), "sweep config")
    axis = d.get("axis")
    if axis not in SWEEP_AXES:
        raise ConfigError(f"axis must be one of {SWEEP_AXES}, got {axis!r}")
    values = d.get("values")
    if not isinstance(values, list) or not values:
        raise ConfigError("values must be a non-empty list")
    try:
        values = tuple(int(v) if axis == "n" else float(v) for v in values)
    except (TypeError, ValueError):
        raise ConfigError("values must be numbers") from None
    base_d = json.loads(json.dumps(d.get("base", {})))
    if axis != "T" and isinstance(base_d, dict) and isinstance(base_d.get("equilibrium", {}), dict):
        # the swept field may be absent from the base; fill it so the base validates
        base_d.setdefault("equilibrium", {"kind": "quiet_start"}).setdefault(axis, values[0])
    base = run_config_from_dict(base_d)
    seeds = d.get("seeds", [0])
    if not isinstance(seeds, list) or not seeds:
        raise ConfigError("seeds must be a non-empty list")
    o = d.get("outputs", {})
    _known(o, ("summary", "table"), "outputs")
    cfg = SweepConfig(base, axis, values, tuple(int(s) for s in seeds),
                      o.get("summary", "sweep.json"), o.get("table", "sweep.csv"))
    for v in values:
        if axis != "T":
            _cell_config(cfg, v, cfg.seeds[0])
        elif v < 0:
            raise ConfigError("temperature values must be >= 0")
    return cfg


def _density_for(spec):
    if spec.kind == "quiet_start":
        return vlasov.named_density("uniform")
    if spec.kind in ("bicluster", "random_uniform_bicluster"):
        return vlasov.named_density("bicluster", delta_theta=spec.delta_theta)
    if spec.kind == "random_gaussian_bicluster":
        return vlasov.named_density("gaussian_bicluster", sigma_theta=spec.sigma_theta)
    return vlasov.named_density(spec.density, **dict(spec.params))


def evaluate_predictors(spec, names, state=None):
    """Theory values for an equilibrium; each entry is a small JSON-ready dict."""
    out = {}
    if "exact" in names:
        state = state if state is not None else build_equilibrium(spec)
        res = linstab.exact_growth_rate(state)
        entry = {"gamma": res.gamma, "lambda_sq": res.lambda_sq, "eigenvalues": list(res.eigenvalues),
                 "unstable": res.unstable, "method": res.method}
        if spec.kind == "quiet_start":
            entry["closed_form"] = linstab.gamma_quiet_start()
        elif spec.kind == "bicluster":
            entry["closed_form"] = linstab.gamma_bicluster(spec.n, spec.delta_theta)
            entry["large_n"] = linstab.gamma_bicluster_largeN(spec.delta_theta)
        out["exact"] = entry
    if "rmt" in names:
        out["rmt"] = _rmt_entry(spec)
    if "vlasov" in names:
        profile = _density_for(spec)
        roots = vlasov.dispersion_roots(profile)
        out["vlasov"] = {
            "gamma": vlasov.vlasov_growth_rate(profile),
            "omega_sq_plus": roots.omega_sq_plus,
            "omega_sq_minus": roots.omega_sq_minus,
            "abs_2pi_n02": 2.0 * math.pi * abs(roots.n02),
        }
    return out


def _rmt_entry(spec):
    if spec.kind == "random_uniform_bicluster":
        if spec.delta_theta >= math.pi / 2:
            return {"applicable": False, "reason": "mu = 0 at delta_theta = pi/2"}
        moments = rmt.moments_uniform(spec.delta_theta)
    elif spec.kind == "random_gaussian_bicluster":
        moments = rmt.moments_gaussian(spec.sigma_theta)
    else:
        return {"applicable": False, "reason": "random symmetric equilibria only"}
    pred = rmt.predict(spec.n, moments)
    return {"applicable": True, "gamma": pred.gamma_mean, "lambda_sq_mean": pred.lambda_sq_mean,
            "lambda_sq_var": pred.lambda_sq_var, "mu": moments.mu, "sigma_sq": moments.sigma_sq,
            "moments_source": moments.source}


@dataclass
class RunResult:
    config: RunConfig
    trajectory: object
    fit: object
    fit_error: str | None
    predictors: dict
    saturation: dict | None

    def summary(self):
        traj = self.trajectory
        fit = ({"gamma_fit": self.fit.gamma_fit, "stderr": self.fit.stderr, "window": list(self.fit.window),
                "r_squared": self.fit.r_squared, "samples": self.fit.samples, "status": "ok"}
               if self.fit is not None else {"status": "no exponential phase", "detail": self.fit_error})
        return {
            "version": __version__,
            "config": self.config.to_dict(),
            "fit": fit,
            "predictors": self.predictors,
            "conservation": {
                "max_relative_energy_drift": traj.energy_drift(),
                "max_momentum_drift": traj.momentum_drift(),
                "u0": float(traj.u[0]),
            },
            "saturation": self.saturation,
        }


def simulate(config):
    """Build, perturb and evolve one configuration; fit and evaluate theory."""
    spec = config.equilibrium
    eq_state = build_equilibrium(spec)
    start = perturb(eq_state, config.perturbation)
    traj = evolve(start, config.integrator)
    try:
        fit, err = diagnostics.fit_growth_rate(traj), None
    except diagnostics.NoExponentialPhaseError as exc:
        fit, err = None, str(exc)
    t_end = config.integrator.t_end
    sat = None
    if t_end > 0:
        t_from = config.saturation_from if config.saturation_from is not None else 0.5 * t_end
        sat = diagnostics.saturation_stats(traj, min(max(t_from, 0.0), t_end))
        sat["t_from"] = t_from
    preds = evaluate_predictors(spec, config.predictors, eq_state)
    return RunResult(config, traj, fit, err, preds, sat)


def _cell_config(sweep_cfg, value, seed):
    base = sweep_cfg.base
    eq = base.equilibrium
    try:
        if sweep_cfg.axis == "n":
            eq = replace(eq, n=int(value))
        elif sweep_cfg.axis == "delta_theta":
            eq = replace(eq, delta_theta=float(value))
        elif sweep_cfg.axis == "sigma_theta":
            eq = replace(eq, sigma_theta=float(value))
        cfg = replace(base, equilibrium=eq).with_seed(seed)
        cfg.perturbation.resolve(cfg.equilibrium.n)
    except ValueError as exc:
        raise ConfigError(f"{sweep_cfg.axis}={value}: {exc}") from None
    return cfg


def _run_cell(args):
    sweep_cfg, value, seed = args
    try:
        res = simulate(_cell_config(sweep_cfg, value, seed))
    except Exception as exc:  # a failed cell is recorded, not fatal
        return {"value": value, "seed": seed, "error": f"{type(exc).__name__}: {exc}"}
    return {
        "value": value,
        "seed": seed,
        "gamma_fit": res.fit.gamma_fit if res.fit else None,
        "fit_error": res.fit_error,
        "energy_drift": res.trajectory.energy_drift(),
        "momentum_drift": res.trajectory.momentum_drift(),
    }


def _curves(sweep_cfg, value):
    axis = sweep_cfg.axis
    if axis == "T":
        w = vlasov.warm_waterbag_growth_rate(value)
        return {"warm_waterbag": {"gamma": w.gamma, "stable": w.stable}}
    spec = _cell_config(sweep_cfg, value, sweep_cfg.seeds[0]).equilibrium
    curves = {}
    if spec.kind in ("bicluster", "random_uniform_bicluster"):
        curves["bicluster_finite_n"] = linstab.gamma_bicluster(spec.n, spec.delta_theta)
    if spec.is_random:
        entry = _rmt_entry(spec)
        curves["rmt"] = entry.get("gamma")
    if spec.kind == "quiet_start":
        curves["quiet_start"] = linstab.gamma_quiet_start()
    curves["vlasov"] = vlasov.vlasov_growth_rate(_density_for(spec))
    return curves


def sweep(sweep_cfg, jobs=1):
    """Seed-averaged fitted rates plus theory curves, one row per axis value."""
    rows = []
    if sweep_cfg.axis == "T":
        for v in sorted(sweep_cfg.values):
            rows.append({"value": v, "gamma_fit_mean": None, "gamma_fit_stderr": None,
                         "runs": 0, "failed": 0, "predictors": _curves(sweep_cfg, v), "cells": []})
        return {"version": __version__, "config": sweep_cfg.to_dict(), "rows": rows,
                "note": "T axis is prediction-only; warm initial states are not simulated"}

    tasks = [(sweep_cfg, v, s) for v in sweep_cfg.values for s in sweep_cfg.seeds]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_cell, tasks))
    else:
        results = [_run_cell(t) for t in tasks]

    by_value = {}
    for r in results:
        by_value.setdefault(r["value"], []).append(r)
    for v in sorted(by_value):
        cells = by_value[v]
        fits = np.array([c["gamma_fit"] for c in cells if c.get("gamma_fit") is not None])
        row = {
            "value": v,
            "gamma_fit_mean": float(fits.mean()) if fits.size else None,
            "gamma_fit_stderr": float(fits.std(ddof=1) / math.sqrt(fits.size)) if fits.size > 1 else None,
            "runs": int(fits.size),
            "failed": len(cells) - int(fits.size),
            "cells": cells,
        }
        try:
            row["predictors"] = _curves(sweep_cfg, v)
        except Exception as exc:
            row["predictors"] = {"error": f"{type(exc).__name__}: {exc}"}
        rows.append(row)
    return {"version": __version__, "config": sweep_cfg.to_dict(), "rows": rows}


def sweep_table(result):
    """Flat CSV rendering of a sweep result."""
    names = sorted({k for r in result["rows"] for k in r.get("predictors", {})})
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["value", "gamma_fit_mean", "gamma_fit_stderr", "runs", "failed", *names])
    for r in result["rows"]:
        preds = r.get("predictors", {})
        vals = []
        for n in names:
            p = preds.get(n)
            vals.append(_fmt(p["gamma"] if isinstance(p, dict) and "gamma" in p else p))
        w.writerow([_fmt(r["value"]), _fmt(r["gamma_fit_mean"]), _fmt(r["gamma_fit_stderr"]),
                    r["runs"], r["failed"], *vals])
    return buf.getvalue()


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def write_timeseries(trajectory, fh):
    fh.write(",".join(TIMESERIES_HEADER) + "\n")
    cols = [getattr(trajectory, name) for name in TIMESERIES_HEADER]
    for row in zip(*cols):
        fh.write(",".join(format(float(x), ".17g") for x in row) + "\n")


def read_timeseries(fh):
    """Parse a time-series CSV back into a dict of float arrays."""
    reader = csv.reader(fh)
    header = next(reader)
    if tuple(header) != TIMESERIES_HEADER:
        raise ValueError(f"unexpected header {header}")
    rows = [[float(x) for x in r] for r in reader if r]
    data = np.array(rows, dtype=float).reshape(-1, len(header))
    return {name: data[:, i] for i, name in enumerate(header)}


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"cannot serialize {type(o).__name__}")


def dumps(obj):
    return json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n"
