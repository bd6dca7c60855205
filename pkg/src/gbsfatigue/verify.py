"""Property and oracle checks for the whole pipeline.

Each check returns a :class:`CheckResult` whose ``metrics`` hold only seeded,
deterministic quantities, so two runs of the same check serialize to the same
bytes. Wall-clock time is kept apart in ``seconds``.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
from scipy import stats

from .estimation import DamageSeries, default_k_rule, estimate_sigma, hill_statistic
from .gbs import ClassicalBsParams, GbsParams, classical_bs_cdf, gbs_cdf, xi_alpha
from .io import dumps_report
from .mallows import mallows_empirical
from .simulation import (
    DamageModel,
    calibrate_gbs,
    damage_sample,
    first_passage_counts,
    ks_distance,
    simulate_first_passage,
    sum_law_check,
)
from .stable import StableParams, stable_cdf, stable_pdf, stable_quantile, stable_sample

__all__ = ["VerifyScale", "FULL", "QUICK", "CheckResult", "CHECKS", "run_check", "run_verify", "check_determinism"]


@dataclass(frozen=True)
class VerifyScale:
    """Sample sizes used by the checks."""

    name: str
    sampler_n: int = 10**6
    hill_seeds: int = 20
    sigma_n: int = 10**6
    sigma_seeds: int = 20
    sum_reps: int = 2000
    sum_seeds: int = 10
    passage_reps: int = 10**5
    control_reps: int = 10**5
    workers_many: int = 4


FULL = VerifyScale("full")
QUICK = VerifyScale("quick", passage_reps=20_000, workers_many=2)


@dataclass
class CheckResult:
    number: int
    title: str
    passed: bool
    metrics: dict = field(default_factory=dict)
    seconds: float = 0.0

    def to_dict(self, timing: bool = True) -> dict:
        out = {"criterion": self.number, "title": self.title, "passed": self.passed, "metrics": self.metrics}
        if timing:
            out["seconds"] = self.seconds
        return out

    def line(self) -> str:
        return f"criterion {self.number:2d} [{'PASS' if self.passed else 'FAIL'}] {self.title} ({self.seconds:.1f}s)"


def _gaussian_reduction(scale: VerifyScale, workers: int) -> tuple[bool, dict]:
    # gbs_cdf takes the closed form at alpha = 2, so the stable-kernel
    # composition Phi_2(xi(t/b)/a) is checked alongside it
    rng = np.random.default_rng(20240601)
    worst = 0.0
    triples = []
    for _ in range(5):
        sigma_x = float(rng.uniform(0.2, 5.0))
        mu_x = float(rng.uniform(0.5, 5.0))
        s_star = float(rng.uniform(10.0, 1000.0))
        gbs = GbsParams(2.0, sigma_x / math.sqrt(2.0), mu_x, s_star)
        bs = ClassicalBsParams.from_damage(sigma_x, mu_x, s_star)
        t = np.geomspace(gbs.b_alpha / 100.0, gbs.b_alpha * 100.0, 50)
        ref = classical_bs_cdf(bs, t)
        kernel = stable_cdf(gbs.stable_law, xi_alpha(2.0, t / gbs.b_alpha) / gbs.a_alpha)
        err = float(np.max(np.abs(gbs_cdf(gbs, t) - ref)))
        err_kernel = float(np.max(np.abs(kernel - ref)))
        worst = max(worst, err, err_kernel)
        triples.append({"sigma_x": sigma_x, "mu_x": mu_x, "s_star": s_star, "max_abs_diff": err,
                        "max_abs_diff_stable_kernel": err_kernel})
    return worst <= 1e-9, {"max_abs_diff": worst, "tolerance": 1e-9, "triples": triples}


def _density_at_mode(scale: VerifyScale, workers: int) -> tuple[bool, dict]:
    worst = 0.0
    for alpha in (1.2, 1.5, 1.8, 2.0):
        for sigma in (0.5, 1.0, 3.0):
            p = StableParams(alpha, sigma, mu=0.7)
            worst = max(worst, abs(float(stable_pdf(p, p.mu)) - p.density_at_mode))
    return worst <= 1e-8, {"max_abs_error": worst, "tolerance": 1e-8}


def _sampler_vs_cdf(scale: VerifyScale, workers: int) -> tuple[bool, dict]:
    rows = []
    for seed, (alpha, sigma) in enumerate([(1.5, 1.0), (1.8, 2.0)], start=1):
        p = StableParams(alpha, sigma)
        x = np.sort(stable_sample(p, scale.sampler_n, seed))
        grid = np.linspace(-10.0 * sigma, 10.0 * sigma, 401)
        ecdf = np.searchsorted(x, grid, side="right") / x.size
        gap = float(np.max(np.abs(ecdf - stable_cdf(p, grid))))
        rows.append({"alpha": alpha, "sigma": sigma, "seed": seed, "n": scale.sampler_n, "sup_grid_gap": gap})
    worst = max(r["sup_grid_gap"] for r in rows)
    return worst <= 0.005, {"max_gap": worst, "tolerance": 0.005, "cases": rows}


_ROUNDTRIP_SETS = [(1.1, 1.0, 0.0), (1.3, 0.5, 2.0), (1.5, 1.0, 0.0), (1.7, 3.0, -1.0), (1.9, 2.0, 5.0), (2.0, 1.0, 0.0)]


def _quantile_roundtrip(scale: VerifyScale, workers: int) -> tuple[bool, dict]:
    probs = np.array([0.01, 0.1, 0.5, 0.9, 0.99])
    worst = 0.0
    for alpha, sigma, mu in _ROUNDTRIP_SETS:
        p = StableParams(alpha, sigma, mu)
        back = stable_cdf(p, stable_quantile(p, probs))
        worst = max(worst, float(np.max(np.abs(back - probs))))
    return worst <= 1e-7, {"max_abs_error": worst, "tolerance": 1e-7, "parameter_sets": len(_ROUNDTRIP_SETS)}


def _hill_consistency(scale: VerifyScale, workers: int) -> tuple[bool, dict]:
    # exact Pareto draws enter the statistic directly as the centred sample
    n = 10**5
    k = default_k_rule(n)
    model = DamageModel.shifted_pareto(1.5)
    errors = [abs(hill_statistic(damage_sample(model, n, seed), k)[0] - 2.0 / 3.0) for seed in range(scale.hill_seeds)]
    hits = sum(e <= 0.05 for e in errors)
    need = math.ceil(0.9 * scale.hill_seeds)
    return hits >= need, {"n": n, "k": k, "hits": hits, "required": need, "abs_errors": errors}


def _sigma_consistency(scale: VerifyScale, workers: int) -> tuple[bool, dict]:
    law = StableParams(1.5, 2.0, 5.0)
    ratios = []
    for seed in range(scale.sigma_seeds):
        data = DamageSeries(stable_sample(law, scale.sigma_n, seed), known_mean=law.mu, signed=True)
        ratios.append(estimate_sigma(data, alpha=law.alpha).sigma_hat / law.sigma)
    hits = sum(abs(r - 1.0) <= 0.15 for r in ratios)
    need = math.ceil(0.9 * scale.sigma_seeds)
    return hits >= need, {"n": scale.sigma_n, "hits": hits, "required": need, "ratios": ratios}


def _stable_limit(scale: VerifyScale, workers: int) -> tuple[bool, dict]:
    model = DamageModel.shifted_pareto(1.5)
    sizes = (100, 1000, 10000)
    ks = np.zeros((scale.sum_seeds, len(sizes)))
    sigmas = []
    for seed in range(scale.sum_seeds):
        sigma = calibrate_gbs(model, 1.0, 1.5, seed).sigma
        sigmas.append(sigma)
        target = StableParams(1.5, sigma)
        for j, n in enumerate(sizes):
            ks[seed, j] = sum_law_check(model, n, scale.sum_reps, target, seed, workers).ks
    med = np.median(ks, axis=0)
    passed = bool(np.all(np.diff(med) < 0))
    return passed, {
        "sizes": list(sizes),
        "replications": scale.sum_reps,
        "median_ks": med.tolist(),
        "ks": ks.tolist(),
        "sigma_hat": sigmas,
    }


def _first_passage_law(scale: VerifyScale, workers: int) -> tuple[bool, dict]:
    seed = 7
    model = DamageModel.shifted_pareto(1.5)
    s_star = 500.0 * model.mean
    ref = calibrate_gbs(model, s_star, 1.5, seed)
    report = simulate_first_passage(model, s_star, scale.passage_reps, seed, ref, workers)
    gbs_ok = report.ks_vs_gbs <= 0.05

    control = DamageModel.exponential(1.0)
    counts = first_passage_counts(control, 50.0, scale.control_reps, seed, workers)
    # P(N_* <= n) = P(S_n > s_*) = P(Gamma(n, 1) > 50)
    def erlang(n):
        return stats.gamma.sf(50.0, np.maximum(n, 1e-300)) * (np.asarray(n) >= 1)
    at = {str(n): float(np.mean(counts <= n) - erlang(n)) for n in (40, 50, 60)}
    control_ks = ks_distance(counts, lambda t: erlang(np.floor(t)))
    control_ok = max(abs(v) for v in at.values()) <= 0.01 and control_ks <= 0.01
    return bool(gbs_ok and control_ok), {
        "gbs": report.to_dict(include_samples=False),
        "gbs_tolerance": 0.05,
        "gbs_passed": bool(gbs_ok),
        "control_diff_at_n": at,
        "control_ks": control_ks,
        "control_passed": bool(control_ok),
    }


def _mallows_axioms(scale: VerifyScale, workers: int) -> tuple[bool, dict]:
    rng = np.random.default_rng(77)
    violations = {"negative": 0, "asymmetric": 0, "identity": 0, "triangle": 0, "shift": 0}
    for _ in range(100):
        f, g, h = (rng.standard_t(3, rng.integers(5, 60)) * rng.uniform(0.5, 3) for _ in range(3))
        c = float(rng.uniform(-5, 5))
        for r in (1.0, 1.5, 2.0):
            fg, gf = mallows_empirical(f, g, r), mallows_empirical(g, f, r)
            gh, fh = mallows_empirical(g, h, r), mallows_empirical(f, h, r)
            violations["negative"] += min(fg, gh, fh) < 0
            violations["asymmetric"] += abs(fg - gf) > 1e-12 * max(1.0, fg)
            violations["identity"] += mallows_empirical(f, f, r) != 0.0
            violations["triangle"] += fh > fg + gh + 1e-12 * max(1.0, fh)
            violations["shift"] += abs(mallows_empirical(f, f + c, r) - abs(c)) > 1e-12 * abs(c)
    return sum(violations.values()) == 0, {"triples": 100, "orders": [1.0, 1.5, 2.0], "violations": violations}


@dataclass(frozen=True)
class _Check:
    title: str
    fn: Callable[[VerifyScale, int], tuple[bool, dict]]


CHECKS: dict[int, _Check] = {
    1: _Check("alpha=2 GBS equals classical Birnbaum-Saunders", _gaussian_reduction),
    2: _Check("stable density at the mode", _density_at_mode),
    3: _Check("sampler agrees with the CDF", _sampler_vs_cdf),
    4: _Check("quantile/CDF roundtrip", _quantile_roundtrip),
    5: _Check("Hill estimator on exact Pareto(1.5)", _hill_consistency),
    6: _Check("scale estimator on S_1.5(2,0,5)", _sigma_consistency),
    7: _Check("Mallows metric axioms", _mallows_axioms),
    8: _Check("normalized sums approach the stable limit", _stable_limit),
    9: _Check("first-passage count vs GBS, Erlang control", _first_passage_law),
}

DETERMINISM_SET = (3, 5, 6, 8, 9)


def run_check(number: int, scale: VerifyScale = FULL, workers: int = 1) -> CheckResult:
    check = CHECKS[number]
    start = time.perf_counter()
    passed, metrics = check.fn(scale, workers)
    return CheckResult(number, check.title, bool(passed), metrics, time.perf_counter() - start)


def check_determinism(scale: VerifyScale, first: dict[int, CheckResult]) -> CheckResult:
    start = time.perf_counter()
    base = {n: dumps_report(first[n].to_dict(timing=False)) for n in DETERMINISM_SET}
    again = {n: dumps_report(run_check(n, scale, 1).to_dict(timing=False)) for n in DETERMINISM_SET}
    many = {n: dumps_report(run_check(n, scale, scale.workers_many).to_dict(timing=False)) for n in DETERMINISM_SET}
    rerun_same = {str(n): base[n] == again[n] for n in DETERMINISM_SET}
    workers_same = {str(n): base[n] == many[n] for n in DETERMINISM_SET}
    passed = all(rerun_same.values()) and all(workers_same.values())
    metrics = {"identical_rerun": rerun_same, "identical_across_workers": workers_same, "workers_many": scale.workers_many}
    return CheckResult(10, "byte-identical reports across runs and worker counts", passed, metrics, time.perf_counter() - start)


def run_verify(
    scale: VerifyScale = FULL,
    only: tuple[int, ...] | None = None,
    on_result: Callable[[CheckResult], None] | None = None,
) -> list[CheckResult]:
    """Run the checks in order; criterion 10 reruns 3, 5, 6, 8 and 9."""
    wanted = tuple(range(1, 11)) if only is None else tuple(sorted(set(only)))
    results: dict[int, CheckResult] = {}
    need = set(wanted) | (set(DETERMINISM_SET) if 10 in wanted else set())
    out = []
    for n in sorted(need - {10}):
        results[n] = run_check(n, scale, 1)
        if n in wanted:
            out.append(results[n])
            if on_result:
                on_result(results[n])
    if 10 in wanted:
        res = check_determinism(scale, results)
        out.append(res)
        if on_result:
            on_result(res)
    return out


def with_workers(scale: VerifyScale, workers: int) -> VerifyScale:
    return replace(scale, workers_many=workers)
