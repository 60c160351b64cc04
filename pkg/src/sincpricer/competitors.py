"""Competing Fourier pricers: cosine expansion and damped-call FFT engines.

Three established methods share this module so the sampling-series engine can
be benchmarked against them on equal terms:

* COS: expand the truncated density in cosines on [x_l, x_h] and integrate
  the payoff against each basis function in closed form.
* Lewis: a strip integral for the call with the CF evaluated on
  Im(u) = -1/2, discretized with the trapezoid rule and laid across strikes
  with one (fractional) FFT.
* Carr-Madan: the damped-call transform with damping alpha, discretized the
  same way.

All three consume the same cycles-convention CF of the drift-adjusted return
used everywhere else; the angular frequencies their formulas are written in
appear only inside this module.  The two FFT engines return call smiles;
puts follow from parity, so parity holds to rounding by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fft_engine import SmileResult, _frac_dft
from .models import MarketSpec
from .sinc_core import TruncationRange

__all__ = [
    "CosConfig",
    "LewisConfig",
    "CarrMadanConfig",
    "cos_con_digital",
    "cos_aon_digital",
    "cos_put",
    "cos_call",
    "lewis_call_quadrature",
    "lewis_call_fft",
    "carr_madan_call_fft",
]


@dataclass(frozen=True)
class CosConfig:
    """Cosine-expansion settings: number of terms and expansion interval."""

    n_f: int
    range: TruncationRange

    def __post_init__(self) -> None:
        if self.n_f < 1:
            raise ValueError("n_f must be at least 1")


def _cos_coefficients(cf, cfg: CosConfig) -> tuple[np.ndarray, np.ndarray]:
    """Density coefficients A_n and the angular basis frequencies."""
    a, b = cfg.range.x_l, cfg.range.x_h
    n = np.arange(cfg.n_f, dtype=float)
    u = n * np.pi / (b - a)
    kap = u / (2.0 * np.pi)
    samples = np.asarray(cf(kap), dtype=complex)
    coeff = (2.0 / (b - a)) * (samples * np.exp(-1j * u * a)).real
    coeff[0] *= 0.5  # the n = 0 term enters every sum with half weight
    return coeff, u


def _psi(u: np.ndarray, a: float, x1: float, x2: float) -> np.ndarray:
    """Integrals of cos(u (x - a)) over [x1, x2]."""
    out = np.empty_like(u)
    out[0] = x2 - x1
    un = u[1:]
    out[1:] = (np.sin(un * (x2 - a)) - np.sin(un * (x1 - a))) / un
    return out


def _chi(u: np.ndarray, a: float, x1: float, x2: float) -> np.ndarray:
    """Integrals of e^x cos(u (x - a)) over [x1, x2]."""
    e1, e2 = math.exp(x1), math.exp(x2)
    return (
        np.cos(u * (x2 - a)) * e2
        - np.cos(u * (x1 - a)) * e1
        + u * (np.sin(u * (x2 - a)) * e2 - np.sin(u * (x1 - a)) * e1)
    ) / (1.0 + u * u)


def cos_con_digital(cf, k: float, cfg: CosConfig) -> float:
    """Cash-or-nothing put expectation E[1_{s < k}] by cosine expansion."""
    a, b = cfg.range.x_l, cfg.range.x_h
    k = min(max(k, a), b)
    coeff, u = _cos_coefficients(cf, cfg)
    return float(coeff @ _psi(u, a, a, k))


def cos_aon_digital(cf, k: float, cfg: CosConfig) -> float:
    """Asset-or-nothing put expectation E[e^s 1_{s < k}] by cosine expansion."""
    a, b = cfg.range.x_l, cfg.range.x_h
    k = min(max(k, a), b)
    coeff, u = _cos_coefficients(cf, cfg)
    return float(coeff @ _chi(u, a, a, k))


def cos_put(cf, market: MarketSpec, strike: float, cfg: CosConfig) -> float:
    """European put by cosine expansion, assembled from the two digitals.

    Using the same digital decomposition as the sampling-series engine keeps
    the two methods comparable term for term and makes parity exact.
    """
    k = market.log_moneyness(strike)
    a, b = cfg.range.x_l, cfg.range.x_h
    kc = min(max(k, a), b)
    coeff, u = _cos_coefficients(cf, cfg)
    con = coeff @ _psi(u, a, a, kc)
    aon = coeff @ _chi(u, a, a, kc)
    return float(
        math.exp(-market.r * market.T) * strike * con
        - math.exp(-market.q * market.T) * market.s0 * aon
    )


def cos_call(cf, market: MarketSpec, strike: float, cfg: CosConfig) -> float:
    """European call by cosine expansion, via the digital complements."""
    k = market.log_moneyness(strike)
    a, b = cfg.range.x_l, cfg.range.x_h
    kc = min(max(k, a), b)
    coeff, u = _cos_coefficients(cf, cfg)
    con = coeff @ _psi(u, a, a, kc)
    aon = coeff @ _chi(u, a, a, kc)
    return float(
        math.exp(-market.q * market.T) * market.s0 * (1.0 - aon)
        - math.exp(-market.r * market.T) * strike * (1.0 - con)
    )


@dataclass(frozen=True)
class LewisConfig:
    """Strip-integral discretization: N nodes, step eta = 1 / (2 x_c beta).

    beta ties the frequency step to the truncation half-width so the two
    engines can be compared at matched resolution; larger beta refines the
    step at the cost of a shorter integration range u_max = eta (N - 1).
    """

    n: int
    beta: float
    x_c: float

    def __post_init__(self) -> None:
        if self.n < 8 or self.n & (self.n - 1):
            raise ValueError("n must be a power of two >= 8")
        if self.beta <= 0.0 or self.x_c <= 0.0:
            raise ValueError("beta and x_c must be positive")

    @property
    def eta(self) -> float:
        return 1.0 / (2.0 * self.x_c * self.beta)

    @property
    def u_max(self) -> float:
        return self.eta * (self.n - 1)


def _lewis_integrand(cf, u: np.ndarray) -> np.ndarray:
    """CF factor of the Lewis integrand on the Im(u) = -1/2 strip."""
    kap = (u - 0.5j) / (2.0 * np.pi)
    return np.asarray(cf(kap), dtype=complex) / (u * u + 0.25)


def lewis_call_quadrature(cf, market: MarketSpec, strike: float, u_max: float = 200.0) -> float:
    """Reference Lewis call by adaptive quadrature of the strip integral.

    Slow but grid-free; used to validate the FFT discretization.
    """
    from scipy.integrate import quad

    k = market.log_moneyness(strike)

    def integrand(u: float) -> float:
        val = _lewis_integrand(cf, np.array([u]))[0]
        return (np.exp(-1j * u * k) * val).real

    integral, _ = quad(integrand, 0.0, u_max, limit=400, epsabs=1e-14, epsrel=1e-12)
    return float(
        market.s0 * math.exp(-market.q * market.T)
        - math.sqrt(market.s0 * strike)
        * math.exp(-0.5 * (market.r + market.q) * market.T)
        / math.pi
        * integral
    )


def _fractional_row(x: np.ndarray, eps: float) -> np.ndarray:
    """DFT of x at frequency scale eps; plain FFT when eps = 1."""
    if eps == 1.0:
        return np.fft.fft(x)
    return _frac_dft(x, eps)


def lewis_call_fft(
    cf,
    market: MarketSpec,
    cfg: LewisConfig,
    epsilon: float = 1.0,
) -> SmileResult:
    """Call smile from the Lewis strip integral, one (fractional) FFT.

    Trapezoid discretization u_j = eta j with the j = 0 node half-weighted;
    the strike grid spans log-moneyness [-b, b) with spacing
    gamma = epsilon 2 pi / (N eta), so epsilon < 1 packs the same N strikes
    into a tighter span around the forward.
    """
    if not 0.0 < epsilon <= 1.0:
        raise ValueError("epsilon must lie in (0, 1]")
    n, eta = cfg.n, cfg.eta
    gamma = 2.0 * np.pi * epsilon / (n * eta)
    b = 0.5 * n * gamma

    u = eta * np.arange(n)
    w = np.ones(n)
    w[0] = 0.5
    x = w * eta * np.exp(1j * u * b) * _lewis_integrand(cf, u)
    transformed = _fractional_row(x, epsilon).real

    k = -b + gamma * np.arange(n)
    strikes = market.strike_from_log_moneyness(k)
    prices = (
        market.s0 * math.exp(-market.q * market.T)
        - np.sqrt(market.s0 * strikes)
        * math.exp(-0.5 * (market.r + market.q) * market.T)
        / math.pi
        * transformed
    )
    method = "lewis-fft" if epsilon == 1.0 else "lewis-frfft"
    return SmileResult(
        strikes=strikes,
        prices=prices,
        method=method,
        n_f=n,
        interpolated=np.zeros(n, dtype=bool),
        market=market,
        payoff="call",
        k_grid=k,
    )


@dataclass(frozen=True)
class CarrMadanConfig:
    """Damped-call discretization: N nodes, eta = 1 / (2 x_c beta), damping alpha."""

    n: int
    beta: float
    x_c: float
    alpha_cm: float = 0.4

    def __post_init__(self) -> None:
        if self.n < 8 or self.n & (self.n - 1):
            raise ValueError("n must be a power of two >= 8")
        if self.beta <= 0.0 or self.x_c <= 0.0:
            raise ValueError("beta and x_c must be positive")
        if self.alpha_cm <= 0.0:
            raise ValueError("alpha_cm must be positive")

    @property
    def eta(self) -> float:
        return 1.0 / (2.0 * self.x_c * self.beta)


def carr_madan_call_fft(
    cf,
    market: MarketSpec,
    cfg: CarrMadanConfig,
    epsilon: float = 1.0,
) -> SmileResult:
    """Call smile from the damped-call transform, one (fractional) FFT.

    The damped transform needs the CF of the full log-price; it is recovered
    from the drift-adjusted CF by the phase exp(i z (log S0 + (r - q) T)).
    Trapezoid weights; the strike grid is centered on the forward log-price.
    """
    if not 0.0 < epsilon <= 1.0:
        raise ValueError("epsilon must lie in (0, 1]")
    n, eta, alpha = cfg.n, cfg.eta, cfg.alpha_cm
    gamma = 2.0 * np.pi * epsilon / (n * eta)
    b = 0.5 * n * gamma
    k_center = math.log(market.s0) + (market.r - market.q) * market.T

    u = eta * np.arange(n)
    z = u - (alpha + 1.0) * 1j
    phi_full = np.asarray(cf(z / (2.0 * np.pi)), dtype=complex) * np.exp(1j * z * k_center)
    denom = alpha * alpha + alpha - u * u + 1j * (2.0 * alpha + 1.0) * u
    psi = math.exp(-market.r * market.T) * phi_full / denom

    w = np.ones(n)
    w[0] = 0.5
    x = w * eta * np.exp(1j * u * (b - k_center)) * psi
    transformed = _fractional_row(x, epsilon).real

    k = k_center - b + gamma * np.arange(n)
    strikes = np.exp(k)
    prices = np.exp(-alpha * k) / np.pi * transformed
    method = "carrmadan-fft" if epsilon == 1.0 else "carrmadan-frfft"
    return SmileResult(
        strikes=strikes,
        prices=prices,
        method=method,
        n_f=n,
        interpolated=np.zeros(n, dtype=bool),
        market=market,
        payoff="call",
        k_grid=k - k_center,
    )
