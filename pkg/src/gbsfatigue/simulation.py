"""Monte Carlo first-passage engine for cumulative damage.

Each replication i owns the random stream seeded by
``SeedSequence(seed, spawn_key=(i,))``. Damages are drawn from that stream in
fixed-size chunks, so every quantity computed from replication i (its
first-passage count, any partial sum S_n) depends on (seed, i) alone and
not on how replications are split across workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.typing import ArrayLike

from .errors import DomainError, RunawayError
from .estimation import DamageSeries, EstimationConfig, estimate_sigma
from .gbs import GbsParams, gbs_cdf, gbs_quantile
from .mallows import mallows_to_quantile, mallows_to_stable
from .stable import StableParams, stable_cdf

__all__ = [
    "DamageModel",
    "FirstPassageReport",
    "SumLawReport",
    "MAX_CYCLES",
    "damage_sample",
    "replication_rng",
    "first_passage_counts",
    "partial_sums",
    "simulate_first_passage",
    "calibrate_gbs",
    "ks_distance",
    "sum_law_check",
]

MAX_CYCLES = 10**9
CHUNK = 512

_FAMILIES = {
    "deterministic": ("c",),
    "exponential": ("rate",),
    "lognormal": ("logmean", "logsd"),
    "shifted-pareto": ("alpha", "scale", "shift"),
    "folded-stable": ("alpha", "sigma", "shift"),
}


@dataclass(frozen=True)
class DamageModel:
    """Distribution of the damage accumulated over one cycle.

    Build instances through the named constructors, e.g.
    ``DamageModel.shifted_pareto(1.5)``. Every family is supported on
    [0, inf) and has a finite positive mean.
    """

    family: str
    params: tuple[float, ...]

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise DomainError(f"unknown damage family {self.family!r}; choose from {sorted(_FAMILIES)}")
        names = _FAMILIES[self.family]
        if len(self.params) != len(names):
            raise DomainError(f"{self.family} takes parameters {names}")
        p = tuple(float(v) for v in self.params)
        object.__setattr__(self, "params", p)
        if not all(math.isfinite(v) for v in p):
            raise DomainError("damage model parameters must be finite")
        d = self.as_dict()
        if self.family == "deterministic" and not d["c"] > 0:
            raise DomainError("deterministic damage must be positive")
        if self.family == "exponential" and not d["rate"] > 0:
            raise DomainError("rate must be positive")
        if self.family == "lognormal" and not d["logsd"] >= 0:
            raise DomainError("logsd must be non-negative")
        if self.family == "shifted-pareto":
            if not d["alpha"] > 1:
                raise DomainError("the Pareto index must exceed 1 for the mean to exist")
            if not (d["scale"] > 0 and d["shift"] >= 0):
                raise DomainError("Pareto scale must be positive and shift non-negative")
        if self.family == "folded-stable":
            StableParams(d["alpha"], d["sigma"])
            if not d["shift"] >= 0:
                raise DomainError("shift must be non-negative")

    @classmethod
    def deterministic(cls, c: float) -> DamageModel:
        return cls("deterministic", (c,))

    @classmethod
    def exponential(cls, rate: float = 1.0) -> DamageModel:
        return cls("exponential", (rate,))

    @classmethod
    def lognormal(cls, logmean: float = 0.0, logsd: float = 1.0) -> DamageModel:
        return cls("lognormal", (logmean, logsd))

    @classmethod
    def shifted_pareto(cls, alpha: float, scale: float = 1.0, shift: float = 0.0) -> DamageModel:
        """shift + scale * P with P(P > x) = x**(-alpha) for x >= 1."""
        return cls("shifted-pareto", (alpha, scale, shift))

    @classmethod
    def folded_stable(cls, alpha: float, sigma: float = 1.0, shift: float = 0.0) -> DamageModel:
        """shift + |Y| with Y ~ S_alpha(sigma, 0, 0)."""
        return cls("folded-stable", (alpha, sigma, shift))

    def as_dict(self) -> dict[str, float]:
        return dict(zip(_FAMILIES[self.family], self.params))

    @property
    def mean(self) -> float:
        d = self.as_dict()
        if self.family == "deterministic":
            return d["c"]
        if self.family == "exponential":
            return 1.0 / d["rate"]
        if self.family == "lognormal":
            return math.exp(d["logmean"] + 0.5 * d["logsd"] ** 2)
        if self.family == "shifted-pareto":
            return d["shift"] + d["scale"] * d["alpha"] / (d["alpha"] - 1.0)
        return d["shift"] + 2.0 * d["sigma"] * math.gamma(1.0 - 1.0 / d["alpha"]) / math.pi

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        d = self.as_dict()
        if self.family == "deterministic":
            return np.full(size, d["c"])
        if self.family == "exponential":
            return rng.standard_exponential(size) / d["rate"]
        if self.family == "lognormal":
            return np.exp(d["logmean"] + d["logsd"] * rng.standard_normal(size))
        if self.family == "shifted-pareto":
            u = 1.0 - rng.random(size)  # in (0, 1]
            return d["shift"] + d["scale"] * u ** (-1.0 / d["alpha"])
        a = d["alpha"]
        v = math.pi * (rng.random(size) - 0.5)
        w = rng.standard_exponential(size)
        y = np.sin(a * v) / np.cos(v) ** (1.0 / a) * (np.cos((1.0 - a) * v) / w) ** ((1.0 - a) / a)
        return d["shift"] + d["sigma"] * np.abs(y)


def damage_sample(model: DamageModel, n: int, seed) -> np.ndarray:
    """``n`` independent damages from a single stream seeded by ``seed``."""
    if n < 1:
        raise DomainError(f"n must be at least 1, got {n}")
    return model.draw(np.random.default_rng(seed), n)


def replication_rng(seed: int, index: int) -> np.random.Generator:
    """The stream owned by replication ``index``."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def _first_passage(model: DamageModel, s_star: float, rng: np.random.Generator, max_cycles: int) -> int:
    total = 0.0
    done = 0
    while done < max_cycles:
        cum = total + np.cumsum(model.draw(rng, CHUNK))
        hit = int(np.searchsorted(cum, s_star, side="right"))
        if hit < CHUNK:
            return done + hit + 1
        total = float(cum[-1])
        done += CHUNK
    raise RunawayError(
        f"no exceedance of s_star={s_star} within {max_cycles} cycles; is the mean damage ~0?"
    )


def _partial_sum(model: DamageModel, n: int, rng: np.random.Generator) -> float:
    # same chunked accumulation as _first_passage so both see identical sums
    total = 0.0
    done = 0
    while done < n:
        cum = total + np.cumsum(model.draw(rng, CHUNK))
        take = n - done
        if take <= CHUNK:
            return float(cum[take - 1])
        total = float(cum[-1])
        done += CHUNK
    return total


def _passage_block(args) -> np.ndarray:
    model, s_star, seed, start, stop, max_cycles = args
    return np.array(
        [_first_passage(model, s_star, replication_rng(seed, i), max_cycles) for i in range(start, stop)],
        dtype=np.int64,
    )


def _sum_block(args) -> np.ndarray:
    model, n, seed, start, stop = args
    return np.array([_partial_sum(model, n, replication_rng(seed, i)) for i in range(start, stop)])


def _run_blocks(fn: Callable, make_args: Callable[[int, int], tuple], reps: int, workers: int) -> np.ndarray:
    if workers <= 1 or reps < 2:
        return fn(make_args(0, reps))
    edges = np.linspace(0, reps, min(reps, 4 * workers) + 1).astype(int)
    jobs = [make_args(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return np.concatenate(list(pool.map(fn, jobs)))


def first_passage_counts(
    model: DamageModel,
    s_star: float,
    reps: int,
    seed: int,
    workers: int = 1,
    max_cycles: int = MAX_CYCLES,
) -> np.ndarray:
    """N_* = min{n : S_n > s_star} for replications 0..reps-1."""
    if not s_star > 0:
        raise DomainError(f"s_star must be positive, got {s_star}")
    if reps < 1:
        raise DomainError(f"reps must be at least 1, got {reps}")
    return _run_blocks(
        _passage_block, lambda a, b: (model, float(s_star), seed, a, b, max_cycles), reps, workers
    )


def partial_sums(model: DamageModel, n: int, reps: int, seed: int, workers: int = 1) -> np.ndarray:
    """S_n for replications 0..reps-1, drawn from the same streams as N_*."""
    if n < 1 or reps < 1:
        raise DomainError("n and reps must be at least 1")
    return _run_blocks(_sum_block, lambda a, b: (model, int(n), seed, a, b), reps, workers)


def ks_distance(sample: ArrayLike, cdf: Callable[[np.ndarray], np.ndarray]) -> float:
    """sup_x |F_n(x) - F(x)|, checked on both sides of every jump of F_n.

    At each distinct sample value v the empirical CDF after the jump is
    compared with F(v) and the value before the jump with F just below v
    (``nextafter(v, -inf)``), which is exact for continuous F and for step F.
    """
    x = np.sort(np.asarray(sample, dtype=float).ravel())
    if x.size == 0:
        raise DomainError("KS distance needs a non-empty sample")
    values, counts = np.unique(x, return_counts=True)
    cum = np.cumsum(counts)
    after = cum / x.size
    before = (cum - counts) / x.size
    f_at = np.asarray(cdf(values), dtype=float)
    f_below = np.asarray(cdf(np.nextafter(values, -np.inf)), dtype=float)
    return float(max(np.max(np.abs(after - f_at)), np.max(np.abs(before - f_below))))


@dataclass
class FirstPassageReport:
    n_star_samples: np.ndarray
    s_star: float
    replications: int
    seed: int
    model: DamageModel
    summary: dict = field(default_factory=dict)
    reference: GbsParams | None = None
    ks_vs_gbs: float | None = None
    mallows_vs_gbs: float | None = None

    def to_dict(self, include_samples: bool = True) -> dict:
        out = {
            "model": {"family": self.model.family, **self.model.as_dict(), "mean": self.model.mean},
            "s_star": self.s_star,
            "replications": self.replications,
            "seed": self.seed,
            "summary": dict(self.summary),
            "reference": None,
            "ks_vs_gbs": self.ks_vs_gbs,
            "mallows_vs_gbs": self.mallows_vs_gbs,
        }
        if self.reference is not None:
            ref = self.reference
            out["reference"] = {
                "alpha": ref.alpha, "sigma": ref.sigma, "mu_x": ref.mu_x, "s_star": ref.s_star,
                "a_alpha": ref.a_alpha, "b_alpha": ref.b_alpha,
            }
        if include_samples:
            out["n_star_samples"] = [int(v) for v in self.n_star_samples]
        return out


def _summary(counts: np.ndarray) -> dict:
    q = np.quantile(counts, [0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99])
    return {
        "mean": float(np.mean(counts)),
        "median": float(np.median(counts)),
        "min": int(counts.min()),
        "max": int(counts.max()),
        "quantiles": {k: float(v) for k, v in zip(["p01", "p10", "p25", "p50", "p75", "p90", "p99"], q)},
    }


def calibrate_gbs(
    model: DamageModel,
    s_star: float,
    alpha: float,
    seed: int,
    n: int = 10**6,
    config: EstimationConfig | None = None,
) -> GbsParams:
    """GBS reference with sigma estimated from a damage sample of size ``n``.

    The damage mean is taken from the model; the sample uses the stream
    ``SeedSequence(seed, spawn_key=(2**32 - 1,))``, disjoint from the
    replication streams.
    """
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(2**32 - 1,)))
    series = DamageSeries(model.draw(rng, n), known_mean=model.mean)
    sigma = estimate_sigma(series, config, alpha).sigma_hat
    return GbsParams(alpha, sigma, model.mean, s_star)


def simulate_first_passage(
    model: DamageModel,
    s_star: float,
    reps: int,
    seed: int,
    reference: GbsParams | None = None,
    workers: int = 1,
    mallows_grid: int = 10_000,
) -> FirstPassageReport:
    """Simulate N_* and, given a GBS reference, its KS and d_1 discrepancies."""
    counts = first_passage_counts(model, s_star, reps, seed, workers)
    report = FirstPassageReport(counts, float(s_star), reps, seed, model, _summary(counts), reference)
    if reference is not None:
        report.ks_vs_gbs = ks_distance(counts, lambda t: _gbs_cdf_at(reference, t))
        report.mallows_vs_gbs = mallows_to_quantile(
            counts, lambda u: gbs_quantile(reference, u, method="table"), r=1.0, m=mallows_grid
        ).distance
    return report


def _gbs_cdf_at(params: GbsParams, t: np.ndarray) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = gbs_cdf(params, t[pos])
    return out


@dataclass(frozen=True)
class SumLawReport:
    n: int
    replications: int
    target: StableParams
    ks: float
    mallows_d1: float

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "replications": self.replications,
            "target": {"alpha": self.target.alpha, "sigma": self.target.sigma, "mu": self.target.mu},
            "ks": self.ks,
            "mallows_d1": self.mallows_d1,
        }


def sum_law_check(
    model: DamageModel,
    n: int,
    reps: int,
    target: StableParams,
    seed: int,
    workers: int = 1,
    mallows_grid: int = 10_000,
) -> SumLawReport:
    """Compare (S_n - n mu_X) / n**(1/alpha) over ``reps`` replications with ``target``."""
    sums = partial_sums(model, n, reps, seed, workers)
    normalized = (sums - n * model.mean) / n ** (1.0 / target.alpha)
    ks = ks_distance(normalized, lambda x: stable_cdf(target, x, method="table"))
    d1 = mallows_to_stable(normalized, target, r=1.0, m=mallows_grid).distance
    return SumLawReport(n, reps, target, ks, d1)
