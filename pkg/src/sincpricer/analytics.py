"""Benchmarks, convergence records, implied vols, and sweep utilities.

The reporting layer: everything here turns prices into comparable numbers.
Benchmarks come from two independent engines agreeing digit by digit, error
tables from re-pricing against a benchmark over a ladder of term counts,
and smile comparisons from Black-Scholes implied vols so that methods with
different price scales across strikes can be judged on one axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

from . import competitors
from .fft_engine import ExtrapolationError, SmileResult, interpolate_strikes
from .models import MarketSpec, PricingError, black_scholes_call, black_scholes_put

__all__ = [
    "Benchmark",
    "make_benchmark",
    "closed_form_benchmark",
    "ErrorRecord",
    "convergence_study",
    "implied_vol",
    "smile_implied_vols",
    "mean_abs_iv_error",
    "SmileSpec",
    "synthetic_surface",
    "beta_sweep",
]

# Floats carry no more than this many meaningful decimal places here.
_MAX_AGREEMENT = 16
_RETAIN_CAP = 10
_LOW_AGREEMENT = 6


@dataclass(frozen=True)
class Benchmark:
    """Reference value with the number of decimals it is trusted to.

    digits is the retained precision: a candidate price is starred when it
    sits within one unit of the last retained decimal of the value.
    """

    value: float
    digits: int
    agreement: int
    source: str = "dual"

    @property
    def low_agreement(self) -> bool:
        return self.agreement < _LOW_AGREEMENT

    def matches(self, price: float) -> bool:
        # Half a unit in the last retained decimal: the candidate rounds to
        # the benchmark's digits.
        return abs(price - self.value) < 0.5 * 10.0 ** (-self.digits)

    def rel_err(self, price: float) -> float:
        """Relative error, or absolute error when the value is zero."""
        if self.value != 0.0:
            return abs(price - self.value) / abs(self.value)
        return abs(price - self.value)

    @property
    def zero_value(self) -> bool:
        """True when rel_err falls back to absolute error."""
        return self.value == 0.0


def _chop(value: float, decimals: int) -> float:
    """Truncate toward zero at the given decimal place."""
    scale = 10.0**decimals
    return math.trunc(value * scale) / scale


def _agreement_decimals(p1: float, p2: float) -> int:
    """Largest d with |p1 - p2| <= 10^-d; equality counts, capped at 16.

    Decade boundaries get a one-part-in-1e6 guard so a gap that is 1e-10 up
    to float rounding still counts as ten matching decimals.  The guard must
    cover the representation error of the inputs relative to the gap, which
    for prices of order one against a 1e-10 gap is a few parts in 1e8.
    """
    diff = abs(p1 - p2)
    if diff == 0.0:
        return _MAX_AGREEMENT
    d = int(math.floor(-math.log10(diff)))
    if diff <= 10.0 ** (-(d + 1)) * (1.0 + 1e-6):
        d += 1
    elif diff > 10.0 ** (-d) * (1.0 + 1e-6):
        d -= 1
    return min(max(d, 0), _MAX_AGREEMENT)


def make_benchmark(p1: float, p2: float) -> Benchmark:
    """Fuse two independent prices into a benchmark value.

    The two inputs must come from different engines; the benchmark keeps
    their average truncated at the agreed decimal count (at most 10).
    Agreement below 6 decimals is flagged rather than rejected, so the
    caller can warn and continue.
    """
    agreement = _agreement_decimals(p1, p2)
    retained = min(agreement, _RETAIN_CAP)
    value = _chop(0.5 * (p1 + p2), retained)
    return Benchmark(value=value, digits=retained, agreement=agreement)


def closed_form_benchmark(value: float, digits: int = _RETAIN_CAP) -> Benchmark:
    """Benchmark backed by an exact formula, trusted to `digits` decimals.

    The value is kept at full float precision (no chopping); chopping is a
    device for fusing two inexact engines and would only shift an exact
    reference off its true location.
    """
    return Benchmark(
        value=float(value),
        digits=digits,
        agreement=_MAX_AGREEMENT,
        source="closed-form",
    )


@dataclass(frozen=True)
class ErrorRecord:
    """One convergence-table row: a price at a term count vs a benchmark.

    abs_fallback marks rows whose rel_err is really an absolute error
    because the benchmark value is exactly zero.
    """

    method: str
    kind: str
    strike: float
    n_f: int
    value: float
    rel_err: float
    star: bool
    abs_fallback: bool = False


def convergence_study(
    price_fn: Callable[[int], float],
    benchmark: Benchmark,
    n_f_values: Sequence[int],
    *,
    method: str,
    kind: str,
    strike: float,
) -> list[ErrorRecord]:
    """Price at each term count and score against the benchmark."""
    records = []
    for n_f in n_f_values:
        value = float(price_fn(int(n_f)))
        records.append(
            ErrorRecord(
                method=method,
                kind=kind,
                strike=strike,
                n_f=int(n_f),
                value=value,
                rel_err=benchmark.rel_err(value),
                star=benchmark.matches(value),
                abs_fallback=benchmark.zero_value,
            )
        )
    return records


def _no_arb_bounds(market: MarketSpec, strike: float, payoff: str) -> tuple[float, float]:
    df_r = math.exp(-market.r * market.T)
    df_q = math.exp(-market.q * market.T)
    if payoff == "put":
        return max(df_r * strike - df_q * market.s0, 0.0), df_r * strike
    return max(df_q * market.s0 - df_r * strike, 0.0), df_q * market.s0


def _bs_vega(market: MarketSpec, sigma: float, strike: float) -> float:
    """dPrice/dsigma, identical for put and call."""
    srt = sigma * math.sqrt(market.T)
    if srt <= 0.0:
        return 0.0
    k = float(market.log_moneyness(strike))
    d1 = (-k + 0.5 * srt * srt) / srt
    return (
        market.s0
        * math.exp(-market.q * market.T)
        * math.sqrt(market.T)
        * math.exp(-0.5 * d1 * d1)
        / math.sqrt(2.0 * math.pi)
    )


def implied_vol(
    price: float,
    market: MarketSpec,
    strike: float,
    payoff: str = "put",
    sigma_hi: float = 5.0,
) -> float:
    """Black-Scholes implied volatility, bracketing plus a Newton polish.

    The price must lie strictly inside the no-arbitrage bounds for the
    payoff; a violation raises PricingError naming the offended bound.  The
    returned vol re-prices the input to within 1e-12 of spot scale.
    """
    if payoff not in ("put", "call"):
        raise ValueError("payoff must be 'put' or 'call'")
    pricer = black_scholes_put if payoff == "put" else black_scholes_call
    lo_bound, hi_bound = _no_arb_bounds(market, strike, payoff)
    if not math.isfinite(price):
        raise PricingError(f"price {price!r} is not finite")
    if price <= lo_bound:
        raise PricingError(
            f"{payoff} price {price:.6e} at or below the lower bound {lo_bound:.6e}"
        )
    if price >= hi_bound:
        raise PricingError(
            f"{payoff} price {price:.6e} at or above the upper bound {hi_bound:.6e}"
        )

    def objective(sigma: float) -> float:
        return pricer(market, sigma, strike) - price

    sigma_lo = 1e-9
    if objective(sigma_lo) > 0.0 or objective(sigma_hi) < 0.0:
        raise PricingError(
            f"no volatility in [{sigma_lo:.1e}, {sigma_hi}] reprices {price:.6e}"
        )
    sigma = brentq(objective, sigma_lo, sigma_hi, xtol=1e-14, rtol=8.9e-16)
    # one guarded Newton step tightens the last bits when vega allows it
    for _ in range(2):
        resid = objective(sigma)
        if abs(resid) <= 1e-12 * market.s0:
            break
        vega = _bs_vega(market, sigma, strike)
        if vega <= 0.0:
            break
        step = resid / vega
        if not math.isfinite(step) or abs(step) > 0.5:
            break
        sigma -= step
    if abs(objective(sigma)) > 1e-12 * market.s0:
        raise PricingError(
            f"implied-vol reprice misses the target by more than 1e-12 spot "
            f"(price {price:.6e}, strike {strike:.6g})"
        )
    return float(sigma)


def smile_implied_vols(
    prices: Sequence[float],
    market: MarketSpec,
    strikes: Sequence[float],
    payoff: str = "put",
) -> np.ndarray:
    """Implied vol per strike; uninvertible prices come back as nan."""
    out = np.empty(len(prices))
    for i, (p, k) in enumerate(zip(prices, strikes)):
        try:
            out[i] = implied_vol(float(p), market, float(k), payoff)
        except PricingError:
            out[i] = math.nan
    return out


def mean_abs_iv_error(ivs: np.ndarray, ref_ivs: np.ndarray) -> float:
    """Mean absolute implied-vol gap; any nan makes the answer inf."""
    ivs = np.asarray(ivs, dtype=float)
    ref_ivs = np.asarray(ref_ivs, dtype=float)
    if np.any(~np.isfinite(ivs)) or np.any(~np.isfinite(ref_ivs)):
        return math.inf
    return float(np.mean(np.abs(ivs - ref_ivs)))


@dataclass(frozen=True)
class SmileSpec:
    """One maturity slice of a synthetic quote surface."""

    maturity: float
    strikes: np.ndarray
    log_moneyness: np.ndarray


def synthetic_surface(
    s0: float = 1.0,
    r: float = 0.0,
    q: float = 0.0,
    n_maturities: int = 10,
    n_strikes: int = 11,
    t_min: float = 0.01,
    t_max: float = 2.5,
    vol_scale: float = 0.16,
) -> list[SmileSpec]:
    """Deterministic strike/maturity grid for surface-level comparisons.

    Maturities are log-spaced so the short end is well represented; each
    smile spans log-moneyness +/- min(0.5, 3.5 vol_scale sqrt(T) + 0.02),
    which tracks how far the quoted wings reach as maturity grows.
    """
    maturities = np.geomspace(t_min, t_max, n_maturities)
    smiles = []
    for t in maturities:
        half = min(0.5, 3.5 * vol_scale * math.sqrt(t) + 0.02)
        k = np.linspace(-half, half, n_strikes)
        market = MarketSpec(s0=s0, r=r, q=q, T=float(t))
        strikes = np.asarray(market.strike_from_log_moneyness(k), dtype=float)
        smiles.append(SmileSpec(maturity=float(t), strikes=strikes, log_moneyness=k))
    return smiles


def _calls_to_puts(smile: SmileResult, strikes: np.ndarray, prices: np.ndarray) -> np.ndarray:
    market = smile.market
    df_r = math.exp(-market.r * market.T)
    df_q = math.exp(-market.q * market.T)
    return prices - df_q * market.s0 + df_r * strikes


def beta_sweep(
    cf,
    market: MarketSpec,
    engine: str,
    n: int,
    betas: Sequence[float],
    x_c: float,
    strikes: Sequence[float],
    ref_ivs: np.ndarray,
    epsilon: float = 1.0,
    alpha_cm: float = 0.4,
) -> list[tuple[float, float]]:
    """Grid-search the frequency-step parameter of an FFT call engine.

    For each beta, run the engine once, interpolate the call smile to the
    target strikes, convert to puts by parity, invert to implied vols and
    score against the reference vols.  Strikes outside the engine's grid or
    uninvertible prices yield inf for that beta.
    """
    strikes = np.asarray(strikes, dtype=float)
    results = []
    for beta in betas:
        try:
            if engine == "lewis":
                cfg = competitors.LewisConfig(n=n, beta=float(beta), x_c=x_c)
                smile = competitors.lewis_call_fft(cf, market, cfg, epsilon=epsilon)
            elif engine == "carrmadan":
                cm_cfg = competitors.CarrMadanConfig(
                    n=n, beta=float(beta), x_c=x_c, alpha_cm=alpha_cm
                )
                smile = competitors.carr_madan_call_fft(cf, market, cm_cfg, epsilon=epsilon)
            else:
                raise ValueError(f"unknown engine {engine!r}")
            interp = interpolate_strikes(smile, strikes)
        except ExtrapolationError:
            results.append((float(beta), math.inf))
            continue
        puts = _calls_to_puts(smile, interp.strikes, interp.prices)
        ivs = smile_implied_vols(puts, market, interp.strikes, payoff="put")
        results.append((float(beta), mean_abs_iv_error(ivs, ref_ivs)))
    return results
