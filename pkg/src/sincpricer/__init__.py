"""Fourier option pricing from sampled characteristic functions.

The package prices European options by expanding the truncated return
density in a Shannon sampling (sinc) series, which turns cash-or-nothing
and asset-or-nothing digitals into short sums of CF samples at odd
frequencies.  Cosine-expansion, strip-integral (Lewis) and damped-call
(Carr-Madan) engines are included for comparison, along with GBM, Heston,
CGMY and rough Heston characteristic functions, FFT/frFFT smile engines,
truncation-range selection, moment recovery, and benchmarking utilities.
"""

from .analytics import (
    Benchmark,
    ErrorRecord,
    SmileSpec,
    beta_sweep,
    closed_form_benchmark,
    convergence_study,
    implied_vol,
    make_benchmark,
    mean_abs_iv_error,
    smile_implied_vols,
    synthetic_surface,
)
from .competitors import (
    CarrMadanConfig,
    CosConfig,
    LewisConfig,
    carr_madan_call_fft,
    cos_aon_digital,
    cos_call,
    cos_con_digital,
    cos_put,
    lewis_call_fft,
    lewis_call_quadrature,
)
from .fft_engine import (
    ExtrapolationError,
    FftPlanSpec,
    QVector,
    SmileResult,
    build_q,
    fft_digitals,
    frfft_digitals,
    interpolate_strikes,
    log_moneyness_grid,
    put_smile_fft,
)
from .models import (
    CfDomainError,
    CgmyParams,
    GbmParams,
    HestonParams,
    MarketSpec,
    PricingError,
    PricingWarning,
    black_scholes_call,
    black_scholes_put,
    cf_cgmy,
    cf_gbm,
    cf_heston,
    cgmy_cumulants,
    load_model_params,
    lognormal_density_oracle,
)
from .moments import MomentSet, moments_from_cf, trunc_rule_range
from .rough_heston import (
    BlowUpError,
    ForwardVarianceCurve,
    RiccatiSolution,
    RoughHestonCf,
    RoughHestonParams,
    cf_rough_heston,
    effective_steps,
    solve_fractional_riccati,
)
from .sinc_core import (
    DigitalPrice,
    PayoffKind,
    PricingRequest,
    TruncationRange,
    TruncationSearchError,
    aon_digital,
    cdf,
    con_digital,
    digital_price,
    find_truncation,
    pdf,
    pv_call,
    pv_put,
)

__version__ = "0.1.0"

__all__ = [
    "Benchmark",
    "BlowUpError",
    "CarrMadanConfig",
    "CfDomainError",
    "CgmyParams",
    "CosConfig",
    "DigitalPrice",
    "ErrorRecord",
    "ExtrapolationError",
    "FftPlanSpec",
    "ForwardVarianceCurve",
    "GbmParams",
    "HestonParams",
    "LewisConfig",
    "MarketSpec",
    "MomentSet",
    "PayoffKind",
    "PricingError",
    "PricingRequest",
    "PricingWarning",
    "QVector",
    "RiccatiSolution",
    "RoughHestonCf",
    "RoughHestonParams",
    "SmileResult",
    "SmileSpec",
    "TruncationRange",
    "TruncationSearchError",
    "aon_digital",
    "beta_sweep",
    "black_scholes_call",
    "black_scholes_put",
    "build_q",
    "carr_madan_call_fft",
    "cdf",
    "cf_cgmy",
    "cf_gbm",
    "cf_heston",
    "cf_rough_heston",
    "cgmy_cumulants",
    "closed_form_benchmark",
    "con_digital",
    "convergence_study",
    "cos_aon_digital",
    "cos_call",
    "cos_con_digital",
    "cos_put",
    "digital_price",
    "effective_steps",
    "fft_digitals",
    "find_truncation",
    "frfft_digitals",
    "implied_vol",
    "interpolate_strikes",
    "lewis_call_fft",
    "lewis_call_quadrature",
    "load_model_params",
    "log_moneyness_grid",
    "lognormal_density_oracle",
    "make_benchmark",
    "mean_abs_iv_error",
    "moments_from_cf",
    "pdf",
    "pv_call",
    "pv_put",
    "put_smile_fft",
    "smile_implied_vols",
    "solve_fractional_riccati",
    "synthetic_surface",
    "trunc_rule_range",
]
