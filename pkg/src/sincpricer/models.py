"""Market data, model parameters and characteristic functions.

Frequency convention used across the package: characteristic functions take a
frequency ``kappa`` measured in cycles per unit of log-return and evaluate

    cf(kappa) = E[exp(i * 2 * pi * kappa * s_T)],

where ``s_T = log(S_T / S0) - (r - q) * T`` is the drift-adjusted log-return.
With this normalization ``cf(0) = 1`` and the martingale identity reads
``cf(-i / (2 pi)) = 1``.  Frequencies may be complex (``ComplexFrequency``
below); every implementation accepts scalars or numpy arrays elementwise.
Angular-frequency formulas enter only through ``u = 2 * pi * kappa`` computed
at the top of each function, so the cycles convention never leaks further in.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np
from scipy.special import gamma as _gamma

try:  # stdlib on 3.11+, backport otherwise
    import tomllib as _toml
except ModuleNotFoundError:  # pragma: no cover - depends on interpreter
    import tomli as _toml

__all__ = [
    "ComplexFrequency",
    "PricingError",
    "PricingWarning",
    "CfDomainError",
    "MarketSpec",
    "GbmParams",
    "HestonParams",
    "CgmyParams",
    "cf_gbm",
    "cf_heston",
    "cf_cgmy",
    "cgmy_cumulants",
    "black_scholes_put",
    "black_scholes_call",
    "lognormal_density_oracle",
    "load_model_params",
]

# A frequency in cycles; complex values probe the interior of the CF's
# analyticity strip (asset-or-nothing pricing shifts by -i/(2 pi)).
ComplexFrequency = Union[complex, np.ndarray]


class PricingError(Exception):
    """Base class for numeric failures raised by this package."""


class PricingWarning(UserWarning):
    """Non-fatal numerical conditions (clamped inputs, guarded overflow)."""


class CfDomainError(PricingError):
    """A characteristic function was evaluated outside its analyticity strip."""


@dataclass(frozen=True)
class MarketSpec:
    """Spot, flat rates and maturity shared by every pricing routine."""

    s0: float
    r: float
    q: float
    T: float

    def __post_init__(self) -> None:
        if self.s0 <= 0.0:
            raise ValueError(f"spot must be positive, got {self.s0}")
        if self.T <= 0.0:
            raise ValueError(f"maturity must be positive, got {self.T}")

    def log_moneyness(self, strike) -> np.ndarray | float:
        """Drift-adjusted log-moneyness log(K/S0) - (r - q) T."""
        strike = np.asarray(strike, dtype=float)
        if np.any(strike <= 0.0):
            raise ValueError("strikes must be positive")
        k = np.log(strike / self.s0) - (self.r - self.q) * self.T
        return float(k) if k.ndim == 0 else k

    def strike_from_log_moneyness(self, k) -> np.ndarray | float:
        k = np.asarray(k, dtype=float)
        strike = self.s0 * np.exp(k + (self.r - self.q) * self.T)
        return float(strike) if strike.ndim == 0 else strike


@dataclass(frozen=True)
class GbmParams:
    """Lognormal (Black-Scholes) diffusion parameter."""

    sigma: float

    def __post_init__(self) -> None:
        if self.sigma <= 0.0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")


@dataclass(frozen=True)
class HestonParams:
    """Square-root stochastic volatility parameters.

    lam        mean-reversion speed of the variance
    eta_vol    volatility of variance
    v_bar      long-run variance level
    v0         initial variance
    rho        spot/variance correlation
    """

    lam: float
    eta_vol: float
    v_bar: float
    v0: float
    rho: float

    def __post_init__(self) -> None:
        if self.lam < 0.0:
            raise ValueError("mean-reversion speed must be nonnegative")
        if self.eta_vol <= 0.0:
            raise ValueError("vol-of-vol must be positive")
        if self.v_bar < 0.0 or self.v0 < 0.0:
            raise ValueError("variance levels must be nonnegative")
        if not -1.0 <= self.rho <= 1.0:
            raise ValueError("correlation must lie in [-1, 1]")


@dataclass(frozen=True)
class CgmyParams:
    """Tempered-stable jump parameters C, G, M, Y.

    C scales the jump activity, G and M temper the left/right tails and
    Y in (0, 2) \\ {1} controls the small-jump behavior.  M > 1 is required
    so the exponential moment behind the martingale compensator exists.
    """

    C: float
    G: float
    M: float
    Y: float

    def __post_init__(self) -> None:
        if self.C <= 0.0:
            raise ValueError("C must be positive")
        if self.G <= 0.0 or self.M <= 0.0:
            raise ValueError("G and M must be positive")
        if self.M <= 1.0:
            raise ValueError("M must exceed 1 for the martingale correction")
        if not self.Y < 2.0:
            raise ValueError("Y must be below 2")
        if abs(self.Y) < 1e-12 or abs(self.Y - 1.0) < 1e-12:
            raise ValueError("Y = 0 and Y = 1 are excluded (gamma-function poles)")


def _as_angular(kappa: ComplexFrequency) -> np.ndarray:
    """Convert cycles to angular frequency as a complex array."""
    return 2.0 * np.pi * np.asarray(kappa, dtype=complex)


def _shaped(values: np.ndarray, kappa) -> np.ndarray | complex:
    """Return scalars for scalar input, arrays otherwise."""
    if np.isscalar(kappa) or getattr(kappa, "ndim", 1) == 0:
        return complex(values.reshape(-1)[0])
    return values


def cf_gbm(params: GbmParams, market: MarketSpec, kappa: ComplexFrequency):
    """Drift-adjusted lognormal characteristic function.

    s_T is Gaussian with mean -sigma^2 T / 2 and variance sigma^2 T, so
    cf(kappa) = exp(-(i u + u^2) sigma^2 T / 2) at u = 2 pi kappa.
    """
    u = _as_angular(kappa)
    half_var = 0.5 * params.sigma**2 * market.T
    out = np.exp(-half_var * (1j * u + u * u))
    return _shaped(out, kappa)


def cf_heston(
    params: HestonParams,
    market: MarketSpec,
    kappa: ComplexFrequency,
    exp_cap: float = 700.0,
):
    """Drift-adjusted Heston characteristic function.

    Uses the branch-stable parametrization g = (beta - d) / (beta + d) with
    principal square root and logarithm, which stays continuous in maturity.
    If the real part of the exponent exceeds ``exp_cap`` the value is replaced
    by 0 and a ``PricingWarning`` is emitted; this only happens far outside
    the frequency strip where prices are insensitive to the CF anyway.
    """
    u = _as_angular(kappa)
    lam, eta, v_bar, v0 = params.lam, params.eta_vol, params.v_bar, params.v0

    iu_plus_u2 = 1j * u + u * u
    beta = lam - 1j * params.rho * eta * u
    d = np.sqrt(beta * beta + eta * eta * iu_plus_u2)
    # u = 0 and u = -i make iu + u^2 vanish; the exact CF value there is 1
    # and (beta - d) may hit 0/0, so handle those entries explicitly.
    trivial = np.abs(iu_plus_u2) == 0.0
    beta_md = beta - d
    denom = np.where(trivial, 1.0, beta + d)
    g = beta_md / denom
    e_dt = np.exp(-d * market.T)
    log_term = np.log((1.0 - g * e_dt) / (1.0 - g))
    exponent = (
        lam * v_bar / eta**2 * (beta_md * market.T - 2.0 * log_term)
        + v0 / eta**2 * beta_md * (1.0 - e_dt) / (1.0 - g * e_dt)
    )
    exponent = np.where(trivial, 0.0, exponent)

    blown = exponent.real > exp_cap
    if np.any(blown):
        warnings.warn(
            "Heston CF exponent exceeded the overflow cap; affected "
            "frequencies return 0",
            PricingWarning,
            stacklevel=2,
        )
        exponent = np.where(blown, -np.inf, exponent)
    out = np.exp(exponent)
    return _shaped(out, kappa)


def _cgmy_psi(params: CgmyParams, u: np.ndarray) -> np.ndarray:
    """Log-CF exponent per unit time, before the martingale correction."""
    C, G, M, Y = params.C, params.G, params.M, params.Y
    gam = _gamma(-Y)
    # the constant terms go through numpy's complex power (not CPython's,
    # which rounds differently in the last ulp) so the exponent cancels
    # exactly at u = 0 and cf(0) == 1 to the bit
    m_pow = np.power(np.complex128(M), Y)
    g_pow = np.power(np.complex128(G), Y)
    return C * gam * ((M - 1j * u) ** Y - m_pow + (G + 1j * u) ** Y - g_pow)


def _cgmy_drift(params: CgmyParams) -> float:
    """Compensator making E[exp(s_T)] = 1 for the drift-adjusted return."""
    C, G, M, Y = params.C, params.G, params.M, params.Y
    gam = _gamma(-Y)
    return -C * gam * ((M - 1.0) ** Y - M**Y + (G + 1.0) ** Y - G**Y)


def cf_cgmy(params: CgmyParams, market: MarketSpec, kappa: ComplexFrequency):
    """Drift-adjusted CGMY characteristic function.

    The analyticity strip is -M < Im(u) < G in angular frequency; evaluations
    on or outside the strip raise ``CfDomainError`` because the complex powers
    would silently cross a branch cut there.
    """
    u = _as_angular(kappa)
    im = np.asarray(u.imag)
    if np.any(im <= -params.M) or np.any(im >= params.G):
        raise CfDomainError(
            "CGMY CF requires -M < Im(u) < G; got Im(u) in "
            f"[{im.min():.6g}, {im.max():.6g}] with G={params.G}, M={params.M}"
        )
    omega = _cgmy_drift(params)
    out = np.exp(market.T * (1j * u * omega + _cgmy_psi(params, u)))
    return _shaped(out, kappa)


def cgmy_cumulants(params: CgmyParams, market: MarketSpec) -> tuple[float, float, float]:
    """Closed-form cumulants (c1, c2, c4) of the drift-adjusted CGMY return."""
    C, G, M, Y = params.C, params.G, params.M, params.Y
    T = market.T
    c1 = T * (_cgmy_drift(params) + C * _gamma(1.0 - Y) * (M ** (Y - 1.0) - G ** (Y - 1.0)))
    c2 = T * C * _gamma(2.0 - Y) * (M ** (Y - 2.0) + G ** (Y - 2.0))
    c4 = T * C * _gamma(4.0 - Y) * (M ** (Y - 4.0) + G ** (Y - 4.0))
    return c1, c2, c4


def _norm_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def black_scholes_put(market: MarketSpec, sigma: float, strike: float) -> float:
    """Black-Scholes present value of a European put."""
    if strike <= 0.0:
        raise ValueError("strike must be positive")
    df_r = math.exp(-market.r * market.T)
    df_q = math.exp(-market.q * market.T)
    if sigma <= 0.0:
        return max(strike * df_r - market.s0 * df_q, 0.0)
    vol = sigma * math.sqrt(market.T)
    d1 = (math.log(market.s0 / strike) + (market.r - market.q) * market.T) / vol + 0.5 * vol
    d2 = d1 - vol
    return strike * df_r * _norm_cdf(-d2) - market.s0 * df_q * _norm_cdf(-d1)


def black_scholes_call(market: MarketSpec, sigma: float, strike: float) -> float:
    """Black-Scholes present value of a European call, via parity."""
    put = black_scholes_put(market, sigma, strike)
    return put + market.s0 * math.exp(-market.q * market.T) - strike * math.exp(
        -market.r * market.T
    )


def lognormal_density_oracle(market: MarketSpec, sigma: float, s) -> np.ndarray | float:
    """Exact density of the drift-adjusted lognormal return s_T.

    Under GBM, s_T is Gaussian with mean -sigma^2 T / 2 and variance
    sigma^2 T.  Used as the reference when validating Fourier densities.
    """
    s = np.asarray(s, dtype=float)
    var = sigma**2 * market.T
    out = np.exp(-((s + 0.5 * var) ** 2) / (2.0 * var)) / math.sqrt(2.0 * math.pi * var)
    return float(out) if out.ndim == 0 else out


_MODEL_KEYS = {"gbm", "heston", "cgmy", "rheston", "market"}


def _build_heston(fields: dict) -> HestonParams:
    fields = dict(fields)
    # accept the conventional "lambda" spelling alongside the attribute name
    if "lambda" in fields:
        fields["lam"] = fields.pop("lambda")
    return HestonParams(**fields)


def load_model_params(path: str | Path) -> dict:
    """Read model parameters from a JSON or TOML document.

    The document holds one object per model name ("gbm", "heston", "cgmy",
    "rheston") plus an optional "market" object.  Field names mirror the
    dataclass fields; "lambda" is accepted for the Heston mean-reversion
    speed.  Returns a dict mapping each present name to the built object
    ("rheston" stays a plain dict because the forward-variance curve is
    assembled separately).
    """
    path = Path(path)
    raw: dict
    if path.suffix.lower() == ".json":
        raw = json.loads(path.read_text())
    elif path.suffix.lower() == ".toml":
        with path.open("rb") as fh:
            raw = _toml.load(fh)
    else:
        raise ValueError(f"unsupported parameter file type: {path.suffix!r}")

    unknown = set(raw) - _MODEL_KEYS
    if unknown:
        raise ValueError(f"unknown model sections: {sorted(unknown)}")

    out: dict = {}
    if "market" in raw:
        out["market"] = MarketSpec(**raw["market"])
    if "gbm" in raw:
        out["gbm"] = GbmParams(**raw["gbm"])
    if "heston" in raw:
        out["heston"] = _build_heston(raw["heston"])
    if "cgmy" in raw:
        out["cgmy"] = CgmyParams(**raw["cgmy"])
    if "rheston" in raw:
        out["rheston"] = dict(raw["rheston"])
    return out
