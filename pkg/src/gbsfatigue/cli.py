"""Command-line entry point: ``gbsfatigue <command> [options]``.

Commands
--------
dist      cdf, pdf, quantile or sample for the stable, gbs and classical-bs laws
fit       Hill index and block-sum scale from a damage CSV
simulate  Monte Carlo first-passage counts, optionally against a GBS reference
distance  Mallows distance between two samples or a sample and a stable law
verify    the acceptance checks, full or ``--quick``
fixture   write a seeded synthetic damage CSV

Every command writes a JSON report to ``--output`` or stdout. When
``--output`` receives a CSV (a ``dist --format csv`` curve or a fixture) the
report goes to stdout. Module errors end with exit status 1 and the
message stored under the report's ``"error"`` key.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field

import numpy as np

from .errors import GbsError
from .estimation import EstimationConfig, fit
from .gbs import (
    ClassicalBsParams,
    GbsParams,
    classical_bs_cdf,
    classical_bs_pdf,
    classical_bs_quantile,
    gbs_cdf,
    gbs_pdf,
    gbs_quantile,
)
from .io import GridSpec, emit_curve_csv, parse_damage_csv, write_damage_fixture, write_report
from .mallows import mallows_empirical, mallows_to_stable
from .simulation import DamageModel, calibrate_gbs, damage_sample, simulate_first_passage
from .stable import QuadratureConfig, StableParams, stable_cdf, stable_pdf, stable_quantile, stable_sample
from .verify import FULL, QUICK, run_verify, with_workers

__all__ = ["DEFAULT_SEED", "RunConfig", "build_parser", "config_from_args", "run_pipeline", "main"]

DEFAULT_SEED = 20240601
COMMANDS = ("dist", "fit", "simulate", "distance", "verify", "fixture")


@dataclass(frozen=True)
class RunConfig:
    """One CLI invocation.

    ``options`` holds the command-specific flags; ``fmt`` is ``"json"`` or
    ``"csv"`` (curves from ``dist`` only).
    """

    command: str
    options: dict = field(default_factory=dict)
    inputs: tuple[str, ...] = ()
    output: str | None = None
    seed: int = DEFAULT_SEED
    quad: QuadratureConfig = QuadratureConfig()
    fmt: str = "json"

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        if self.fmt not in ("json", "csv"):
            raise ValueError(f"format must be json or csv, got {self.fmt!r}")
        if any(not p for p in self.inputs) or self.output == "":
            raise ValueError("paths must be non-empty")


def _law(opts: dict):
    family = opts["family"]
    if family == "stable":
        return StableParams(opts["alpha"], opts.get("sigma") or 1.0, opts.get("mu") or 0.0)
    if family == "gbs":
        return GbsParams(opts["alpha"], opts["sigma"], opts["mu_x"], opts["s_star"])
    if opts.get("a") is not None and opts.get("b") is not None:
        return ClassicalBsParams(opts["a"], opts["b"])
    return ClassicalBsParams.from_damage(opts["sigma"], opts["mu_x"], opts["s_star"])


def _law_functions(family: str, law, quad: QuadratureConfig):
    if family == "stable":
        return (lambda x: stable_cdf(law, x, quad), lambda x: stable_pdf(law, x, quad),
                lambda p: stable_quantile(law, p, quad))
    if family == "gbs":
        return (lambda t: gbs_cdf(law, t, quad), lambda t: gbs_pdf(law, t, quad),
                lambda p: gbs_quantile(law, p, quad))
    return (lambda t: classical_bs_cdf(law, t), lambda t: classical_bs_pdf(law, t),
            lambda p: classical_bs_quantile(law, p))


def _law_dict(family: str, law) -> dict:
    if family == "stable":
        return {"alpha": law.alpha, "sigma": law.sigma, "mu": law.mu}
    if family == "gbs":
        return {"alpha": law.alpha, "sigma": law.sigma, "mu_x": law.mu_x, "s_star": law.s_star,
                "a_alpha": law.a_alpha, "b_alpha": law.b_alpha}
    return {"a": law.a, "b": law.b}


def _grid(opts: dict) -> GridSpec | None:
    if opts.get("grid_min") is None and opts.get("grid_max") is None:
        return None
    if opts.get("grid_min") is None or opts.get("grid_max") is None:
        raise GbsError("--grid-min and --grid-max go together")
    return GridSpec(opts["grid_min"], opts["grid_max"], opts.get("grid_points") or 101, bool(opts.get("log_grid")))


def _run_dist(cfg: RunConfig) -> dict:
    opts = cfg.options
    family, op = opts["family"], opts["op"]
    law = _law(opts)
    cdf, pdf, quantile = _law_functions(family, law, cfg.quad)
    report = {"family": family, "op": op, "params": _law_dict(family, law)}
    if op == "sample":
        if family != "stable":
            raise GbsError("sampling is available for the stable family only; use simulate for damage paths")
        n = opts.get("n") or 1000
        report.update(seed=cfg.seed, n=n, values=stable_sample(law, n, cfg.seed))
        return report
    fn = {"cdf": cdf, "pdf": pdf, "quantile": quantile}[op]
    grid = _grid(opts)
    if cfg.fmt == "csv":
        if grid is None:
            raise GbsError("CSV output needs --grid-min, --grid-max and --grid-points")
        if cfg.output is None:
            raise GbsError("CSV output needs --output")
        emit_curve_csv(fn, grid, cfg.output)
        report.update(grid={"min": grid.start, "max": grid.stop, "points": grid.points, "log": grid.log},
                      curve=cfg.output)
        return report
    points = opts.get("p") if op == "quantile" else opts.get("t")
    if points:
        at = np.asarray(points, dtype=float)
    elif grid is not None:
        at = grid.values()
    else:
        raise GbsError("give evaluation points with --t (or --p for quantiles) or a grid")
    values = np.asarray(fn(at), dtype=float)
    report.update(at=at, values=values)
    if values.size == 1:
        report["value"] = float(values[0])
    return report


def _run_fit(cfg: RunConfig) -> dict:
    if len(cfg.inputs) != 1:
        raise GbsError("fit takes exactly one --input")
    data = parse_damage_csv(cfg.inputs[0], known_mean=cfg.options.get("known_mean"))
    report = fit(data, EstimationConfig(alpha_override=cfg.options.get("alpha")))
    return {"input": cfg.inputs[0], **report.to_dict()}


def _damage_model(opts: dict) -> DamageModel:
    family = opts.get("damage") or "shifted-pareto"
    params = opts.get("damage_params")
    builders = {
        "deterministic": DamageModel.deterministic,
        "exponential": DamageModel.exponential,
        "lognormal": DamageModel.lognormal,
        "shifted-pareto": DamageModel.shifted_pareto,
        "folded-stable": DamageModel.folded_stable,
    }
    if family not in builders:
        raise GbsError(f"unknown damage family {family!r}")
    if params is None:
        params = [1.5] if family in ("shifted-pareto", "folded-stable") else [1.0] if family != "lognormal" else []
    try:
        return builders[family](*params)
    except TypeError:
        raise GbsError(f"wrong number of --damage-params for {family}") from None


def _run_simulate(cfg: RunConfig) -> dict:
    opts = cfg.options
    model = _damage_model(opts)
    s_star = opts.get("s_star")
    if s_star is None:
        raise GbsError("simulate needs --s-star")
    reference = None
    if opts.get("alpha") is not None:
        if opts.get("sigma") is not None:
            reference = GbsParams(opts["alpha"], opts["sigma"], model.mean, s_star)
        else:
            reference = calibrate_gbs(model, s_star, opts["alpha"], cfg.seed)
    report = simulate_first_passage(
        model, s_star, opts.get("reps") or 10_000, cfg.seed, reference, opts.get("workers") or 1
    )
    return report.to_dict(include_samples=bool(opts.get("include_samples")))


def _run_distance(cfg: RunConfig) -> dict:
    r = cfg.options.get("r") or 1.0
    first = parse_damage_csv(cfg.inputs[0]).values if cfg.inputs else None
    if first is None:
        raise GbsError("distance needs at least one --input")
    if len(cfg.inputs) == 2:
        second = parse_damage_csv(cfg.inputs[1]).values
        return {"inputs": list(cfg.inputs), "r": r, "distance": mallows_empirical(first, second, r)}
    if len(cfg.inputs) > 2:
        raise GbsError("distance takes one or two --input files")
    target = StableParams(cfg.options["alpha"], cfg.options.get("sigma") or 1.0, cfg.options.get("mu") or 0.0)
    res = mallows_to_stable(first, target, r, cfg.options.get("grid_points") or 10_000, cfg.quad)
    return {
        "inputs": list(cfg.inputs),
        "target": _law_dict("stable", target),
        "r": res.r,
        "distance": res.distance,
        "grid_size": res.grid_size,
        "truncation": res.truncation,
        "tail_divergent": res.tail_divergent,
    }


def _run_verify(cfg: RunConfig) -> dict:
    scale = QUICK if cfg.options.get("quick") else FULL
    if cfg.options.get("workers"):
        scale = with_workers(scale, cfg.options["workers"])
    echo = cfg.options.get("echo")
    results = run_verify(scale, on_result=(lambda r: print(r.line(), file=sys.stderr)) if echo else None)
    return {
        "scale": scale.name,
        "all_passed": all(r.passed for r in results),
        "criteria": [r.to_dict(timing=False) for r in results],
    }


def _run_fixture(cfg: RunConfig) -> dict:
    if cfg.output is None:
        raise GbsError("fixture needs --output")
    model = _damage_model(cfg.options)
    n = cfg.options.get("n") or 10**5
    write_damage_fixture(cfg.output, damage_sample(model, n, cfg.seed))
    return {"fixture": cfg.output, "n": n, "seed": cfg.seed, "model": {"family": model.family, **model.as_dict()}}


_RUNNERS = {
    "dist": _run_dist,
    "fit": _run_fit,
    "simulate": _run_simulate,
    "distance": _run_distance,
    "verify": _run_verify,
    "fixture": _run_fixture,
}


def run_pipeline(cfg: RunConfig) -> tuple[int, dict]:
    """Run one command; return the exit status and the report.

    Library errors, invalid values and I/O failures are caught and reported
    under ``"error"`` with status 1.
    """
    try:
        body = _RUNNERS[cfg.command](cfg)
        return 0, {"command": cfg.command, **body}
    except (GbsError, ValueError, OSError) as exc:
        return 1, {"command": cfg.command, "error": {"type": type(exc).__name__, "message": str(exc)}}


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--output", help="report path (default: stdout)")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)


def _law_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha", type=float)
    p.add_argument("--sigma", type=float, help="stable scale; sigma_X of the damage for classical-bs")
    p.add_argument("--mu", type=float, help="stable location")
    p.add_argument("--mu-x", type=float, help="mean damage per cycle")
    p.add_argument("--s-star", type=float, help="critical damage threshold")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gbsfatigue", description="Stable-law fatigue life toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dist", help="evaluate a distribution")
    _common(p)
    _law_flags(p)
    p.add_argument("--family", choices=["stable", "gbs", "classical-bs"], required=True)
    p.add_argument("--op", choices=["cdf", "pdf", "quantile", "sample"], required=True)
    p.add_argument("--a", type=float, help="classical-bs shape")
    p.add_argument("--b", type=float, help="classical-bs scale")
    p.add_argument("--t", type=float, nargs="+", help="evaluation points")
    p.add_argument("--p", type=float, nargs="+", help="probabilities for quantile")
    p.add_argument("--n", type=int, help="sample size")
    p.add_argument("--grid-min", type=float)
    p.add_argument("--grid-max", type=float)
    p.add_argument("--grid-points", type=int)
    p.add_argument("--log-grid", action="store_true")
    p.add_argument("--format", dest="fmt", choices=["json", "csv"], default="json")
    p.add_argument("--atol", type=float, default=1e-10, help="quadrature absolute tolerance")
    p.add_argument("--rtol", type=float, default=1e-8, help="quadrature relative tolerance")

    p = sub.add_parser("fit", help="estimate alpha and sigma from a damage CSV")
    _common(p)
    p.add_argument("--input", action="append", required=True)
    p.add_argument("--alpha", type=float, help="use this alpha for the scale instead of the Hill estimate")
    p.add_argument("--known-mean", type=float, help="centre by this mean instead of the sample mean")

    p = sub.add_parser("simulate", help="simulate first-passage counts")
    _common(p)
    p.add_argument("--damage", default="shifted-pareto",
                   choices=["deterministic", "exponential", "lognormal", "shifted-pareto", "folded-stable"])
    p.add_argument("--damage-params", type=float, nargs="*", help="family parameters in order")
    p.add_argument("--s-star", type=float, required=True)
    p.add_argument("--reps", type=int, default=10_000)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--alpha", type=float, help="compare with a GBS law of this index")
    p.add_argument("--sigma", type=float, help="GBS scale (default: estimated from the damage model)")
    p.add_argument("--include-samples", action="store_true")

    p = sub.add_parser("distance", help="Mallows distance")
    _common(p)
    p.add_argument("--input", action="append", required=True)
    p.add_argument("--r", type=float, default=1.0)
    p.add_argument("--alpha", type=float)
    p.add_argument("--sigma", type=float)
    p.add_argument("--mu", type=float)
    p.add_argument("--grid-points", type=int, help="quantile grid size against a stable target")

    p = sub.add_parser("verify", help="run the acceptance checks")
    _common(p)
    p.add_argument("--quick", action="store_true")
    p.add_argument("--workers", type=int, help="worker count for the determinism comparison")
    p.add_argument("--strict", action="store_true", help="exit 2 when a check fails")

    p = sub.add_parser("fixture", help="write a seeded synthetic damage CSV")
    _common(p)
    p.add_argument("--damage", default="shifted-pareto",
                   choices=["deterministic", "exponential", "lognormal", "shifted-pareto", "folded-stable"])
    p.add_argument("--damage-params", type=float, nargs="*")
    p.add_argument("--n", type=int, default=10**5)
    return parser


_TOP_LEVEL = {"command", "output", "seed", "input", "fmt", "atol", "rtol"}


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    opts = {k: v for k, v in vars(ns).items() if k not in _TOP_LEVEL}
    quad = QuadratureConfig(atol=getattr(ns, "atol", 1e-10), rtol=getattr(ns, "rtol", 1e-8))
    return RunConfig(
        command=ns.command,
        options=opts,
        inputs=tuple(getattr(ns, "input", None) or ()),
        output=ns.output,
        seed=ns.seed,
        quad=quad,
        fmt=getattr(ns, "fmt", "json"),
    )


def main(argv: list[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(ns)
    except (GbsError, ValueError) as exc:
        status, report = 1, {"command": ns.command, "error": {"type": type(exc).__name__, "message": str(exc)}}
    else:
        if cfg.command == "verify":
            cfg = RunConfig(**{**cfg.__dict__, "options": {**cfg.options, "echo": True}})
        status, report = run_pipeline(cfg)
    # when --output received a data file the report goes to stdout
    data_written = status == 0 and ("curve" in report or "fixture" in report)
    report_path = None if data_written else ns.output
    text = write_report(report, report_path)
    if report_path is None:
        sys.stdout.write(text)
    if status == 0 and ns.command == "verify" and getattr(ns, "strict", False) and not report["all_passed"]:
        return 2
    return status


if __name__ == "__main__":
    raise SystemExit(main())
