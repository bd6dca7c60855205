"""Generalized Birnbaum-Saunders fatigue-life law built on symmetric stable CDFs.

With damage mean ``mu_x`` per cycle, failure threshold ``s_star`` and an
underlying S_alpha(sigma, 0, 0) law with CDF Phi_alpha,

    P(T <= t) = Phi_alpha(xi_alpha(t / b_alpha) / a_alpha),

    a_alpha = 1 / (mu_x**(1/alpha) * s_star**(1 - 1/alpha)),
    b_alpha = s_star / mu_x,
    xi_alpha(x) = x**(1 - 1/alpha) - x**(-1/alpha).

For alpha = 2 and sigma = sigma_x / sqrt(2) this is the classical law
Phi((1/a) xi(t/b)) with a = sigma_x / sqrt(mu_x s_star).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike
from scipy import optimize, special

from .errors import BracketError, DomainError
from .stable import QuadratureConfig, StableParams, stable_cdf, stable_pdf, stable_quantile

__all__ = [
    "GbsParams",
    "ClassicalBsParams",
    "xi_alpha",
    "xi_alpha_prime",
    "xi_alpha_inv",
    "gbs_cdf",
    "gbs_pdf",
    "gbs_quantile",
    "classical_bs_cdf",
    "classical_bs_pdf",
    "classical_bs_quantile",
]

# t below this multiple of b_alpha is treated as t = 0
_TINY_RATIO = 1e-300


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 1.0 < alpha <= 2.0:
        raise DomainError(f"alpha must lie in (1, 2], got {alpha}")
    return alpha


def _positive(name: str, value: float) -> float:
    value = float(value)
    if not (value > 0.0 and math.isfinite(value)):
        raise DomainError(f"{name} must be positive and finite, got {value}")
    return value


@dataclass(frozen=True)
class GbsParams:
    """Parameters (alpha, sigma, mu_x, s_star); a_alpha and b_alpha are derived."""

    alpha: float
    sigma: float
    mu_x: float
    s_star: float

    def __post_init__(self):
        object.__setattr__(self, "alpha", _check_alpha(self.alpha))
        for name in ("sigma", "mu_x", "s_star"):
            object.__setattr__(self, name, _positive(name, getattr(self, name)))

    @property
    def a_alpha(self) -> float:
        return 1.0 / (self.mu_x ** (1.0 / self.alpha) * self.s_star ** (1.0 - 1.0 / self.alpha))

    @property
    def b_alpha(self) -> float:
        return self.s_star / self.mu_x

    @property
    def stable_law(self) -> StableParams:
        """The centred law S_alpha(sigma, 0, 0) whose CDF is Phi_alpha."""
        return StableParams(self.alpha, self.sigma, 0.0)

    def to_classical(self) -> ClassicalBsParams:
        """Classical (a, b) for the alpha = 2 member, using sigma_x = sqrt(2) sigma."""
        if self.alpha != 2.0:
            raise DomainError("only the alpha = 2 member reduces to the classical law")
        return ClassicalBsParams(math.sqrt(2.0) * self.sigma * self.a_alpha, self.b_alpha)


@dataclass(frozen=True)
class ClassicalBsParams:
    """Classical shape ``a`` and scale ``b`` (cycles)."""

    a: float
    b: float

    def __post_init__(self):
        object.__setattr__(self, "a", _positive("a", self.a))
        object.__setattr__(self, "b", _positive("b", self.b))

    @classmethod
    def from_damage(cls, sigma_x: float, mu_x: float, s_star: float) -> ClassicalBsParams:
        """a = sigma_x / sqrt(mu_x s_star), b = s_star / mu_x."""
        return cls(sigma_x / math.sqrt(mu_x * s_star), s_star / mu_x)


def _positive_array(name: str, x: ArrayLike) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0.0)):
        raise DomainError(f"{name} must be strictly positive")
    return arr


def _out(x, values):
    return float(values) if np.ndim(x) == 0 else values


def xi_alpha(alpha: float, x: ArrayLike):
    """x**(1 - 1/alpha) - x**(-1/alpha); strictly increasing with xi_alpha(1) = 0."""
    alpha = _check_alpha(alpha)
    arr = _positive_array("x", x)
    c = 1.0 / alpha
    return _out(x, arr ** (1.0 - c) - arr ** (-c))


def xi_alpha_prime(alpha: float, x: ArrayLike):
    """Derivative (1 - 1/alpha) x**(-1/alpha) + (1/alpha) x**(-1 - 1/alpha)."""
    alpha = _check_alpha(alpha)
    arr = _positive_array("x", x)
    c = 1.0 / alpha
    return _out(x, (1.0 - c) * arr ** (-c) + c * arr ** (-1.0 - c))


def _xi_inv_scalar(alpha: float, y: float) -> float:
    if y == 0.0:
        return 1.0
    if alpha == 2.0:
        return ((y + math.sqrt(y * y + 4.0)) / 2.0) ** 2
    c = 1.0 / alpha

    def g(s):
        return math.exp((1.0 - c) * s) - math.exp(-c * s) - y

    # work in s = log x, where the map is increasing and unbounded both ways
    lo, hi = (0.0, 1.0) if y > 0 else (-1.0, 0.0)
    for _ in range(200):
        if g(lo) <= 0.0 <= g(hi):
            break
        if y > 0:
            lo, hi = hi, 2.0 * hi
        else:
            lo, hi = 2.0 * lo, lo
    else:
        raise BracketError(f"could not bracket xi_alpha^-1({y})")
    return math.exp(optimize.brentq(g, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps))


def xi_alpha_inv(alpha: float, y: ArrayLike):
    """Positive solution x of xi_alpha(x) = y."""
    alpha = _check_alpha(alpha)
    arr = np.asarray(y, dtype=float)
    flat = np.array([_xi_inv_scalar(alpha, float(v)) for v in arr.ravel()])
    return _out(y, flat.reshape(arr.shape))


def _standardized_argument(params: GbsParams, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    b = params.b_alpha
    tiny = t < _TINY_RATIO * b
    x = np.where(tiny, 1.0, t / b)
    return xi_alpha(params.alpha, x) / params.a_alpha, tiny


def gbs_cdf(params: GbsParams, t: ArrayLike, quad: QuadratureConfig | None = None):
    """P(T <= t) = Phi_alpha(xi_alpha(t / b_alpha) / a_alpha) for t > 0.

    The alpha = 2 member is evaluated by the classical closed form.
    """
    if params.alpha == 2.0:
        return classical_bs_cdf(params.to_classical(), t)
    t_arr = _positive_array("t", t)
    y, tiny = _standardized_argument(params, t_arr)
    values = np.asarray(stable_cdf(params.stable_law, y, quad), dtype=float)
    return _out(t, np.where(tiny, 0.0, values))


def gbs_pdf(params: GbsParams, t: ArrayLike, quad: QuadratureConfig | None = None):
    """Density by the chain rule: phi_alpha(y) xi_alpha'(t / b) / (a b)."""
    if params.alpha == 2.0:
        return classical_bs_pdf(params.to_classical(), t)
    t_arr = _positive_array("t", t)
    y, tiny = _standardized_argument(params, t_arr)
    dens = np.asarray(stable_pdf(params.stable_law, y, quad), dtype=float)
    x = np.where(tiny, 1.0, t_arr / params.b_alpha)
    slope = xi_alpha_prime(params.alpha, x) / (params.a_alpha * params.b_alpha)
    return _out(t, np.where(tiny, 0.0, dens * slope))


def gbs_quantile(
    params: GbsParams,
    p: ArrayLike,
    quad: QuadratureConfig | None = None,
    method: str = "root",
):
    """t = b_alpha * xi_alpha^-1(a_alpha * Phi_alpha^-1(p))."""
    if params.alpha == 2.0:
        return classical_bs_quantile(params.to_classical(), p)
    y = np.asarray(stable_quantile(params.stable_law, p, quad, method=method), dtype=float)
    x = np.asarray(xi_alpha_inv(params.alpha, params.a_alpha * y), dtype=float)
    return _out(p, params.b_alpha * x)


def classical_bs_cdf(params: ClassicalBsParams, t: ArrayLike):
    """Phi((1/a) xi(t/b)) with Phi the standard normal CDF."""
    t_arr = _positive_array("t", t)
    x = t_arr / params.b
    return _out(t, special.ndtr((np.sqrt(x) - 1.0 / np.sqrt(x)) / params.a))


def classical_bs_pdf(params: ClassicalBsParams, t: ArrayLike):
    t_arr = _positive_array("t", t)
    x = t_arr / params.b
    z = (np.sqrt(x) - 1.0 / np.sqrt(x)) / params.a
    dz = (0.5 * x**-0.5 + 0.5 * x**-1.5) / (params.a * params.b)
    return _out(t, np.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi) * dz)


def classical_bs_quantile(params: ClassicalBsParams, p: ArrayLike):
    p_arr = np.asarray(p, dtype=float)
    if np.any(~((p_arr > 0.0) & (p_arr < 1.0))):
        raise DomainError("quantile probabilities must lie strictly inside (0, 1)")
    y = params.a * special.ndtri(p_arr)
    return _out(p, params.b * ((y + np.sqrt(y * y + 4.0)) / 2.0) ** 2)
