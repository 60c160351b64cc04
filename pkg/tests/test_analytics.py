"""Benchmark fusion, convergence scoring, implied vols, and beta sweeps.

The fusion rules are pinned with literal pairs (including the decade
boundary case where float representation error must not cost a digit), the
convergence scorer is run against the lognormal closed form, and the sweep
helper is checked end to end on a flat-vol market where every implied vol
is known in advance.
"""

import math

import numpy as np
import pytest

from sincpricer.analytics import (
    Benchmark,
    beta_sweep,
    closed_form_benchmark,
    convergence_study,
    implied_vol,
    make_benchmark,
    mean_abs_iv_error,
    smile_implied_vols,
    synthetic_surface,
)
from sincpricer.models import (
    MarketSpec,
    PricingError,
    black_scholes_call,
    black_scholes_put,
    cf_gbm,
)
from sincpricer.sinc_core import PayoffKind, PricingRequest, pv_put

from conftest import GBM_MARKET, GBM_PARAMS, bind, pinned_range

GBM_MARKET_T05 = MarketSpec(s0=1.0, r=0.1, q=0.0, T=0.5)


# ---------------------------------------------------------------------------
# Benchmark fusion


def test_make_benchmark_ten_digit_pair():
    # the float gap between these two literals lands a hair above 1e-10, so
    # this pins the decade guard as much as the chop itself
    bench = make_benchmark(0.02664951825, 0.02664951815)
    assert bench.value == 0.0266495182
    assert bench.digits == 10
    assert bench.agreement == 10
    assert not bench.low_agreement
    assert bench.source == "dual"


def test_make_benchmark_is_symmetric():
    a = make_benchmark(0.02664951825, 0.02664951815)
    b = make_benchmark(0.02664951815, 0.02664951825)
    assert a == b


def test_make_benchmark_flags_low_agreement():
    bench = make_benchmark(0.1234, 0.1239)
    assert bench.value == 0.123
    assert bench.digits == 3
    assert bench.low_agreement


def test_make_benchmark_equal_inputs_cap():
    # perfect agreement reports 16 decimals but retains at most 10
    bench = make_benchmark(0.5, 0.5)
    assert bench.agreement == 16
    assert bench.digits == 10
    assert bench.value == 0.5


def test_zero_benchmark_falls_back_to_absolute_error():
    bench = make_benchmark(0.0, 0.0)
    assert bench.zero_value
    assert bench.rel_err(2e-13) == 2e-13


def test_star_rule_is_half_a_last_digit():
    bench = make_benchmark(0.02664951825, 0.02664951815)
    assert bench.matches(bench.value + 4e-11)
    assert not bench.matches(bench.value + 6e-11)


def test_closed_form_benchmark_keeps_full_precision():
    ref = black_scholes_put(GBM_MARKET, 0.25, 1.00)
    bench = closed_form_benchmark(ref)
    assert bench.value == ref
    assert bench.digits == 10
    assert bench.agreement == 16
    assert bench.source == "closed-form"
    assert not bench.low_agreement


# ---------------------------------------------------------------------------
# Convergence scoring


@pytest.fixture(scope="module")
def gbm_price_fn():
    cf = bind(cf_gbm, GBM_PARAMS, GBM_MARKET)
    rng = pinned_range("gbm-t01")

    def price(n_f: int, strike: float = 1.00) -> float:
        req = PricingRequest(
            GBM_MARKET, cf, strike=strike, kind=PayoffKind.PV_PUT, n_f=n_f, range=rng
        )
        return pv_put(req)

    return price


def test_convergence_study_stars_the_converged_rows(gbm_price_fn):
    bench = closed_form_benchmark(black_scholes_put(GBM_MARKET, 0.25, 1.00))
    records = convergence_study(
        gbm_price_fn, bench, [20, 40, 60, 80, 100, 120],
        method="sinc", kind="pv", strike=1.00,
    )
    assert [r.n_f for r in records] == [20, 40, 60, 80, 100, 120]
    assert [r.star for r in records] == [False, False, True, True, True, True]
    # measured 1.51e-2 at 20 terms and 2.1e-15 from 80 terms on
    assert 5e-3 < records[0].rel_err < 5e-2
    assert records[-1].rel_err < 1e-12
    assert all(r.method == "sinc" and r.kind == "pv" for r in records)
    assert not records[0].abs_fallback


def test_convergence_study_coarse_out_of_money_row(gbm_price_fn):
    # the truncated-series error at 20 terms for the 0.90 strike sits near
    # 2e-1 relative; measured 0.155
    bench = closed_form_benchmark(black_scholes_put(GBM_MARKET, 0.25, 0.90))
    rec = convergence_study(
        lambda n: gbm_price_fn(n, 0.90), bench, [20],
        method="sinc", kind="pv", strike=0.90,
    )[0]
    assert 2e-1 / 3.0 < rec.rel_err < 2e-1 * 3.0
    assert not rec.star


def test_convergence_study_zero_benchmark_rows():
    bench = make_benchmark(0.0, 0.0)
    rec = convergence_study(
        lambda n: 1e-14, bench, [8], method="sinc", kind="pv", strike=0.6
    )[0]
    assert rec.abs_fallback
    assert rec.rel_err == 1e-14


# ---------------------------------------------------------------------------
# Implied vols


@pytest.mark.parametrize("sigma", [0.01, 0.1, 0.25, 0.5, 1.0, 2.0])
@pytest.mark.parametrize("payoff", ["put", "call"])
def test_implied_vol_round_trip(sigma, payoff):
    # near-the-money strike so even the 1% vol keeps both payoffs strictly
    # inside their bounds; measured worst gap 2.9e-15 across the grid
    pricer = black_scholes_put if payoff == "put" else black_scholes_call
    price = pricer(GBM_MARKET, sigma, 1.0)
    vol = implied_vol(price, GBM_MARKET, 1.0, payoff)
    assert vol == pytest.approx(sigma, abs=1e-10)
    assert abs(pricer(GBM_MARKET, vol, 1.0) - price) <= 1e-12


def test_implied_vol_rejects_prices_outside_bounds():
    df_r = math.exp(-GBM_MARKET.r * GBM_MARKET.T)
    with pytest.raises(PricingError, match="at or above the upper bound"):
        implied_vol(df_r * 1.0, GBM_MARKET, 1.0, "put")
    with pytest.raises(PricingError, match="at or below the lower bound"):
        implied_vol(0.0, GBM_MARKET, 0.95, "put")
    # intrinsic value of a deep in-the-money put is still vol-free
    with pytest.raises(PricingError, match="at or below the lower bound"):
        implied_vol(0.40, GBM_MARKET, 1.5, "put")
    # a 1% vol deep in-the-money call collapses onto its lower bound at
    # double precision, so it carries no invertible vol information
    degenerate = black_scholes_call(GBM_MARKET, 0.01, 0.95)
    with pytest.raises(PricingError, match="at or below the lower bound"):
        implied_vol(degenerate, GBM_MARKET, 0.95, "call")
    with pytest.raises(PricingError, match="not finite"):
        implied_vol(math.nan, GBM_MARKET, 1.0, "put")
    with pytest.raises(ValueError):
        implied_vol(0.02, GBM_MARKET, 1.0, "straddle")


def test_implied_vol_reports_bracket_exhaustion():
    price = black_scholes_put(GBM_MARKET, 3.0, 1.0)
    with pytest.raises(PricingError, match="no volatility"):
        implied_vol(price, GBM_MARKET, 1.0, "put", sigma_hi=2.0)


def test_smile_implied_vols_marks_bad_prices_nan():
    strikes = [0.95, 1.0, 1.05]
    prices = [black_scholes_put(GBM_MARKET, 0.25, 0.95), 2.0,
              black_scholes_put(GBM_MARKET, 0.25, 1.05)]
    ivs = smile_implied_vols(prices, GBM_MARKET, strikes, payoff="put")
    assert ivs[0] == pytest.approx(0.25, abs=1e-10)
    assert math.isnan(ivs[1])
    assert ivs[2] == pytest.approx(0.25, abs=1e-10)


def test_mean_abs_iv_error():
    assert mean_abs_iv_error(np.array([0.2, 0.3]), np.array([0.25, 0.25])) == (
        pytest.approx(0.05)
    )
    assert mean_abs_iv_error(np.array([0.2, math.nan]), np.array([0.25, 0.25])) == (
        math.inf
    )
    assert mean_abs_iv_error(np.array([0.2, 0.3]), np.array([math.inf, 0.25])) == (
        math.inf
    )


# ---------------------------------------------------------------------------
# Synthetic surface and beta sweep


def test_synthetic_surface_grid_shape():
    smiles = synthetic_surface()
    assert len(smiles) == 10
    assert smiles[0].maturity == pytest.approx(0.01)
    assert smiles[-1].maturity == pytest.approx(2.5)
    assert all(s.strikes.shape == (11,) for s in smiles)
    for s in smiles:
        half = min(0.5, 3.5 * 0.16 * math.sqrt(s.maturity) + 0.02)
        assert s.log_moneyness[0] == pytest.approx(-half)
        assert s.log_moneyness[-1] == pytest.approx(half)
        # r = q = 0 keeps strikes at plain exponentials of log-moneyness
        np.testing.assert_allclose(s.strikes, np.exp(s.log_moneyness), rtol=1e-12)
    # the long end hits the wing cap
    assert smiles[-1].log_moneyness[-1] == pytest.approx(0.5)


def test_beta_sweep_scores_every_beta_in_order():
    cf = bind(cf_gbm, GBM_PARAMS, GBM_MARKET_T05)
    strikes = [0.95, 1.0, 1.05]
    ref_ivs = np.full(3, 0.25)
    rows = beta_sweep(cf, GBM_MARKET_T05, "lewis", 1024, [0.8, 1.6], 4.5, strikes, ref_ivs)
    assert [beta for beta, _ in rows] == [0.8, 1.6]
    # flat-vol market: the sweep scores are pure discretization plus
    # interpolation error; measured 6.0e-4 and 2.7e-3
    assert all(math.isfinite(err) and err < 1e-2 for _, err in rows)

    cm_rows = beta_sweep(
        cf, GBM_MARKET_T05, "carrmadan", 1024, [1.6], 4.5, strikes, ref_ivs
    )
    # at a matched grid the two engines agree to roundoff; measured 2e-15
    assert cm_rows[0][1] == pytest.approx(rows[1][1], abs=1e-10)


def test_beta_sweep_reports_unreachable_strikes_as_inf():
    cf = bind(cf_gbm, GBM_PARAMS, GBM_MARKET_T05)
    # a tiny fractional step shrinks the strike grid to +/- 0.05 in
    # log-moneyness, leaving the 1.2 strike outside it
    rows = beta_sweep(
        cf, GBM_MARKET_T05, "lewis", 256, [1.6], 4.5, [1.2], np.array([0.25]),
        epsilon=0.001,
    )
    assert rows == [(1.6, math.inf)]


def test_beta_sweep_rejects_unknown_engine():
    cf = bind(cf_gbm, GBM_PARAMS, GBM_MARKET_T05)
    with pytest.raises(ValueError):
        beta_sweep(cf, GBM_MARKET_T05, "parseval", 256, [1.6], 4.5, [1.0], np.array([0.25]))
