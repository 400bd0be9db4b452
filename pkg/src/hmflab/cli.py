"""Command-line front end.

Exit codes: 0 success, 2 invalid configuration or parameters, 3 numerical
failure, 4 I/O failure. Details go to stderr; ``predict`` prints one JSON
document on stdout.
"""
import argparse
from dataclasses import asdict
import json
import math
import os
import sys

from hmflab import __version__
from hmflab import linstab, rmt, runner, vlasov
from hmflab.equilibria import KINDS, EquilibriumSpec
from hmflab.runner import ConfigError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_IO = 4

DEFAULT_ENSEMBLE = 8


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _default_jobs():
    raw = os.environ.get("HMFLAB_JOBS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _add_overrides(p):
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--out", default=".", help="output directory (default: current)")
    p.add_argument("--seed", type=int, help="master seed (u64)")
    p.add_argument("--dt", type=float)
    p.add_argument("--t-end", type=float, dest="t_end")
    p.add_argument("--n", type=int)
    p.add_argument("--delta-theta", type=float, dest="delta_theta")
    p.add_argument("--sigma-theta", type=float, dest="sigma_theta")
    p.add_argument("--epsilon", type=float)


def build_parser():
    parser = _ArgumentParser(prog="hmflab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    sim = sub.add_parser("simulate", help="run one configuration")
    _add_overrides(sim)

    sw = sub.add_parser("sweep", help="scan one parameter with seed ensembles")
    _add_overrides(sw)
    sw.add_argument("--jobs", type=int, default=_default_jobs(),
                    help="parallel cells (default: $HMFLAB_JOBS or 1)")

    pr = sub.add_parser("predict", help="theory only, no simulation")
    pr.add_argument("kind", choices=("exact", "rmt", "vlasov", "warm"))
    pr.add_argument("--n", type=int)
    pr.add_argument("--delta-theta", type=float, dest="delta_theta")
    pr.add_argument("--sigma-theta", type=float, dest="sigma_theta")
    pr.add_argument("--seed", type=int, default=0)
    pr.add_argument("--equilibrium", choices=KINDS, help="exact: equilibrium kind")
    pr.add_argument("--distribution", choices=("uniform", "gaussian"), help="rmt: angle law")
    pr.add_argument("--density", help="vlasov: catalog density name")
    pr.add_argument("--harmonic", type=int, help="vlasov harmonic density: k")
    pr.add_argument("--amplitude", type=float, help="vlasov harmonic density: amplitude")
    pr.add_argument("--temperature", "--T", type=float, dest="temperature", help="warm: temperature")

    sub.add_parser("version", help="print the version")
    return parser


def _load_json(path):
    if path is None:
        return {}
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    return data


def _apply_overrides(d, args):
    d = json.loads(json.dumps(d))
    eq = d.setdefault("equilibrium", {"kind": "quiet_start", "n": 1000})
    integ = d.setdefault("integrator", {})
    pert = d.setdefault("perturbation", {})
    for key, target in (("n", eq), ("delta_theta", eq), ("sigma_theta", eq),
                        ("dt", integ), ("t_end", integ), ("epsilon", pert)):
        value = getattr(args, key)
        if value is not None:
            target[key] = value
    return d


def _resolve(out_dir, name):
    return name if os.path.isabs(name) else os.path.join(out_dir, name)


def _write_text(path, text):
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


def cmd_simulate(args):
    d = _apply_overrides(_load_json(args.config), args)
    cfg = runner.run_config_from_dict(d)
    if args.seed is not None:
        cfg = cfg.with_seed(args.seed)
    result = runner.simulate(cfg)
    os.makedirs(args.out, exist_ok=True)
    if cfg.timeseries:
        path = _resolve(args.out, cfg.timeseries)
        tmp = path + ".tmp"
        with open(tmp, "w", encoding="utf-8", newline="") as fh:
            runner.write_timeseries(result.trajectory, fh)
        os.replace(tmp, path)
    if cfg.summary:
        _write_text(_resolve(args.out, cfg.summary), runner.dumps(result.summary()))
    fit = result.fit
    print(f"gamma_fit={fit.gamma_fit:.6g}" if fit else "gamma_fit=none (no exponential phase)",
          file=sys.stderr)
    return EXIT_OK


def cmd_sweep(args):
    d = _load_json(args.config)
    if not d:
        raise ConfigError("sweep needs --config with axis and values")
    d["base"] = _apply_overrides(d.get("base", {}), args)
    if args.seed is not None:
        count = len(d.get("seeds") or []) or DEFAULT_ENSEMBLE
        d["seeds"] = runner.derive_seeds(args.seed, count)
    cfg = runner.sweep_config_from_dict(d)
    if args.jobs < 1:
        raise ConfigError("--jobs must be >= 1")
    result = runner.sweep(cfg, jobs=args.jobs)
    os.makedirs(args.out, exist_ok=True)
    _write_text(_resolve(args.out, cfg.summary), runner.dumps(result))
    _write_text(_resolve(args.out, cfg.table), runner.sweep_table(result))
    failed = sum(r["failed"] for r in result["rows"])
    print(f"{len(result['rows'])} rows, {failed} failed cells", file=sys.stderr)
    return EXIT_OK


def _complex(z):
    return [z.real, z.imag]


def _predict_exact(args):
    kind = args.equilibrium or ("bicluster" if args.delta_theta is not None else "quiet_start")
    spec = EquilibriumSpec(kind=kind, n=args.n if args.n is not None else 1000,
                           delta_theta=args.delta_theta, sigma_theta=args.sigma_theta, seed=args.seed)
    return {"equilibrium": asdict(spec), **runner.evaluate_predictors(spec, ("exact",))["exact"]}


def _predict_rmt(args):
    n = args.n if args.n is not None else 1000
    dist = args.distribution or ("gaussian" if args.sigma_theta is not None else "uniform")
    if dist == "uniform":
        if args.delta_theta is None:
            raise ConfigError("rmt uniform needs --delta-theta")
        moments = rmt.moments_uniform(args.delta_theta)
        extra = {"bicluster_finite_n": linstab.gamma_bicluster(n, args.delta_theta)}
    else:
        if args.sigma_theta is None:
            raise ConfigError("rmt gaussian needs --sigma-theta")
        moments = rmt.moments_gaussian(args.sigma_theta)
        extra = {}
    pred = rmt.predict(n, moments)
    return {"n": n, "distribution": dist, "delta_theta": args.delta_theta, "sigma_theta": args.sigma_theta,
            "mu": moments.mu, "sigma_sq": moments.sigma_sq, "moments_source": moments.source,
            "lambda_sq_mean": pred.lambda_sq_mean, "lambda_sq_var": pred.lambda_sq_var,
            "gamma": pred.gamma_mean, **extra}


def _predict_vlasov(args):
    name = args.density
    if name is None:
        if args.delta_theta is not None:
            name = "bicluster"
        elif args.sigma_theta is not None:
            name = "gaussian_bicluster"
        elif args.harmonic is not None:
            name = "harmonic"
        else:
            name = "uniform"
    params = {"bicluster": {"delta_theta": args.delta_theta},
              "gaussian_bicluster": {"sigma_theta": args.sigma_theta},
              "harmonic": {"k": args.harmonic, "amplitude": args.amplitude}}.get(name, {})
    missing = [k for k, v in params.items() if v is None]
    if missing:
        raise ConfigError(f"density {name!r} needs {missing}")
    profile = vlasov.named_density(name, **params)
    roots = vlasov.dispersion_roots(profile)
    return {"density": name, "params": params, "gamma": vlasov.vlasov_growth_rate(profile),
            "omega_sq_plus": roots.omega_sq_plus, "omega_sq_minus": roots.omega_sq_minus,
            "n0_0": roots.n00, "n0_1": _complex(vlasov.fourier_coefficient(profile, 1)),
            "n0_2": _complex(roots.n02), "abs_2pi_n02": 2.0 * math.pi * abs(roots.n02)}


def _predict_warm(args):
    if args.temperature is None:
        raise ConfigError("warm needs --temperature")
    rate = vlasov.warm_waterbag_growth_rate(args.temperature)
    return {"temperature": args.temperature, "gamma": rate.gamma, "stable": rate.stable}


def cmd_predict(args):
    handler = {"exact": _predict_exact, "rmt": _predict_rmt,
               "vlasov": _predict_vlasov, "warm": _predict_warm}[args.kind]
    try:
        record = handler(args)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    record = {"kind": args.kind, "version": __version__, **record}
    sys.stdout.write(runner.dumps(record))
    return EXIT_OK


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "version":
        print(f"hmflab {__version__}")
        return EXIT_OK
    handler = {"simulate": cmd_simulate, "sweep": cmd_sweep, "predict": cmd_predict}[args.command]
    try:
        return handler(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ArithmeticError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
