"""Grid transforms: coefficient assembly, FFT/frFFT evaluation, interpolation."""

from __future__ import annotations

import math
from dataclasses import replace

import numpy as np
import pytest

import oracles
from conftest import CountingCf, GBM_MARKET, GBM_PARAMS, bind, pinned_range
from sincpricer.fft_engine import (
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
from sincpricer.models import black_scholes_put, cf_gbm
from sincpricer.sinc_core import (
    PayoffKind,
    PricingRequest,
    aon_digital,
    con_digital,
    pv_put,
)


@pytest.fixture(scope="module")
def gbm(gbm_cf):
    return gbm_cf, pinned_range("gbm-t01")


# ---------------------------------------------------------------------------
# plan validation


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(n=6, x_c=1.0),
        dict(n=24, x_c=1.0),
        dict(n=0, x_c=1.0),
        dict(n=64, x_c=0.0),
        dict(n=64, x_c=1.0, a_shift=2),
        dict(n=64, x_c=1.0, epsilon=0.0),
        dict(n=64, x_c=1.0, epsilon=1.5),
    ],
)
def test_plan_validation_rejects(kwargs):
    with pytest.raises(ValueError):
        FftPlanSpec(**kwargs)


def test_plan_n_f_accounting():
    assert FftPlanSpec(n=4096, x_c=1.0).n_f == 1024


# ---------------------------------------------------------------------------
# coefficient vector structure


def test_build_q_structure(gbm):
    cf, rng = gbm
    plan = FftPlanSpec(n=64, x_c=rng.x_c)
    q = build_q(cf, plan).values
    assert q.size == 64
    assert q[0] == np.pi / 1j
    assert q[32] == 0.0
    even = np.arange(2, 64, 2)
    assert np.all(q[even] == 0.0)
    # odd slots below N/2 plus the zero slot: N/4 + 1 nonzero entries in
    # the half-spectrum; the mirrored conjugate half doubles the odd count
    half = q[: 32 + 1]
    assert np.count_nonzero(half) == 64 // 4 + 1
    assert np.count_nonzero(q) == 64 // 2 + 1
    # mirrored slots carry the conjugate samples with the signed index
    odd = np.arange(1, 32, 2)
    np.testing.assert_allclose(q[64 - odd], np.conj(q[odd]) * -1.0, rtol=0, atol=0)


def test_build_q_point_mass_weights():
    cf = lambda kap: np.ones_like(np.asarray(kap, dtype=complex))
    q = build_q(cf, FftPlanSpec(n=32, x_c=1.0)).values
    for n in (1, 3, 5, 7, 9, 11, 13, 15):
        assert q[n] == 2.0 / n


def test_build_q_eval_count(gbm):
    cf, rng = gbm
    counter = CountingCf(cf)
    plan = FftPlanSpec(n=256, x_c=rng.x_c, a_shift=1)
    build_q(counter, plan)
    assert counter.total_evals == 256 // 4
    batch = counter.batches[0]
    np.testing.assert_allclose(
        batch.real, np.arange(1, 128, 2) / (2.0 * rng.x_c), rtol=0, atol=0
    )
    np.testing.assert_allclose(batch.imag, -1.0 / (2.0 * math.pi), rtol=1e-15)


# ---------------------------------------------------------------------------
# plain FFT


def test_fft_rejects_fractional_plan(gbm):
    cf, rng = gbm
    q = build_q(cf, FftPlanSpec(n=64, x_c=rng.x_c, epsilon=0.5))
    with pytest.raises(ValueError):
        fft_digitals(q)


def test_fft_center_row_equals_direct_con(gbm):
    cf, rng = gbm
    plan = FftPlanSpec(n=1024, x_c=rng.x_c)
    vals = fft_digitals(build_q(cf, plan))
    direct = con_digital(cf, 0.0, rng, plan.n_f)
    assert abs(vals[plan.n // 2] - direct) < 1e-14


def test_fft_matches_direct_series_everywhere(gbm):
    # same finite sum, FFT order vs direct summation order; the first node
    # sits exactly at -x_c where the direct path substitutes the clamp
    # limit, so the comparison starts one slot in
    cf, rng = gbm
    plan = FftPlanSpec(n=512, x_c=rng.x_c)
    vals = fft_digitals(build_q(cf, plan))
    grid = log_moneyness_grid(plan)
    direct = con_digital(cf, grid[1:], rng, plan.n_f)
    assert np.max(np.abs(vals[1:] - direct)) < 1e-13


def test_fft_matches_naive_dft_oracle(gbm):
    cf, rng = gbm
    q = build_q(cf, FftPlanSpec(n=256, x_c=rng.x_c))
    want = oracles.naive_digital_dft(q.values)
    np.testing.assert_allclose(fft_digitals(q), want, rtol=0, atol=1e-13)


def test_aon_grid_interpolation_accuracy(gbm):
    # dense grid, then linear interpolation at the strike 1.10: the grid
    # spacing 2 x_c / n at x_c = 0.7 keeps the quadratic interpolation
    # remainder below 1e-6 (measured 5.4e-7)
    cf, _ = gbm
    plan = FftPlanSpec(n=4096, x_c=0.7, a_shift=1)
    vals = fft_digitals(build_q(cf, plan))
    k_t = GBM_MARKET.log_moneyness(1.10)
    got = np.interp(k_t, log_moneyness_grid(plan), vals)
    want = oracles.gbm_aon_expectation(GBM_PARAMS.sigma, GBM_MARKET.T, k_t)
    assert abs(got - want) < 1e-6


# ---------------------------------------------------------------------------
# fractional FFT


def test_frfft_unit_epsilon_equals_fft(gbm):
    cf, rng = gbm
    plan = FftPlanSpec(n=512, x_c=rng.x_c)
    q = build_q(cf, plan)
    np.testing.assert_allclose(
        frfft_digitals(q), fft_digitals(q), rtol=0, atol=1e-13
    )


@pytest.mark.parametrize("n", [8, 64, 256, 1024])
@pytest.mark.parametrize("eps", [0.15, 0.5, 0.777])
def test_frfft_matches_naive_fractional_sum(n, eps):
    # dense random coefficients, not just digital-sparse ones: the chirp
    # factorization must reproduce the signed-index sum for any q.  The
    # 2/|n| envelope keeps the sums at digital scale so the naive oracle
    # itself stays well below the tolerance in roundoff
    rng = np.random.default_rng(1000 * n + int(1000 * eps))
    raw = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    signed = np.where(np.arange(n) < n // 2, np.arange(n), np.arange(n) - n)
    values = raw * 2.0 / np.maximum(np.abs(signed), 1)
    q = QVector(values=values, plan=FftPlanSpec(n=n, x_c=1.0, epsilon=eps))
    want = oracles.naive_fractional_sum(values, eps)
    np.testing.assert_allclose(frfft_digitals(q), want, rtol=0, atol=1e-12)


def test_frfft_digital_grid_matches_direct(gbm):
    # compressed grid spans epsilon x the range; every output must still be
    # the exact odd-frequency series at its own log-moneyness
    cf, rng = gbm
    plan = FftPlanSpec(n=256, x_c=rng.x_c, epsilon=0.15)
    vals = frfft_digitals(build_q(cf, plan))
    grid = log_moneyness_grid(plan)
    assert grid.max() < 0.16 * rng.x_c
    direct = con_digital(cf, grid, rng, plan.n_f)
    assert np.max(np.abs(vals - direct)) < 1e-13


# ---------------------------------------------------------------------------
# grid, smile assembly


def test_log_moneyness_grid_formula():
    plan = FftPlanSpec(n=16, x_c=2.5, epsilon=0.4)
    got = log_moneyness_grid(plan)
    want = (np.arange(16) - 8) * (2.0 * 2.5 * 0.4 / 16)
    np.testing.assert_allclose(got, want, rtol=0, atol=0)
    assert got[8] == 0.0


def test_put_smile_matches_request_pricing(gbm):
    cf, rng = gbm
    plan = FftPlanSpec(n=512, x_c=rng.x_c)
    smile = put_smile_fft(cf, GBM_MARKET, plan)
    assert smile.method == "sinc-fft"
    assert smile.payoff == "put"
    assert smile.n_f == 2 * plan.n_f
    assert not smile.interpolated.any()
    assert np.all(np.diff(smile.strikes) > 0)
    # a request with the same total budget runs each digital leg at n/4
    # terms, the exact sums the transforms evaluate
    for i in (130, 256, 380):
        req = PricingRequest(
            GBM_MARKET,
            cf,
            strike=float(smile.strikes[i]),
            kind=PayoffKind.PV_PUT,
            n_f=plan.n // 2,
            range=rng,
        )
        assert abs(smile.prices[i] - pv_put(req)) < 1e-13


def test_put_smile_epsilon_method_tag(gbm):
    cf, rng = gbm
    plan = FftPlanSpec(n=64, x_c=rng.x_c, epsilon=0.3)
    assert put_smile_fft(cf, GBM_MARKET, plan).method == "sinc-frfft"


def test_smile_determinism(gbm):
    cf, rng = gbm
    plan = FftPlanSpec(n=256, x_c=rng.x_c, epsilon=0.15)
    a = put_smile_fft(cf, GBM_MARKET, plan)
    b = put_smile_fft(cf, GBM_MARKET, plan)
    assert np.array_equal(a.prices, b.prices)
    assert np.array_equal(a.strikes, b.strikes)


# ---------------------------------------------------------------------------
# interpolation


def test_interpolation_at_node_is_exact(gbm):
    cf, rng = gbm
    smile = put_smile_fft(cf, GBM_MARKET, FftPlanSpec(n=256, x_c=rng.x_c))
    j = 140
    out = interpolate_strikes(smile, [float(smile.strikes[j])])
    assert out.prices[0] == smile.prices[j]
    assert out.interpolated.all()


def test_interpolation_linear_payoff_exact():
    # without stored digitals the interpolation acts on prices; a price
    # curve linear in log-moneyness is reproduced exactly at any target
    m = GBM_MARKET
    k = np.linspace(-0.5, 0.5, 11)
    smile = SmileResult(
        strikes=m.strike_from_log_moneyness(k),
        prices=0.3 + 1.7 * k,
        method="synthetic",
        n_f=0,
        interpolated=np.zeros(11, dtype=bool),
        market=m,
        payoff="put",
        k_grid=k,
    )
    targets = m.strike_from_log_moneyness(np.array([-0.123, 0.077, 0.4]))
    out = interpolate_strikes(smile, targets)
    want = 0.3 + 1.7 * m.log_moneyness(np.sort(targets))
    np.testing.assert_allclose(out.prices, want, rtol=0, atol=1e-14)


def test_interpolation_mid_bucket_error_scaling(gbm):
    # linear interpolation between digital grid nodes: quadratic remainder,
    # so doubling the grid shrinks the worst (mid-bucket) error ~4x
    cf, _ = gbm
    errs = []
    for n in (4096, 8192):
        plan = FftPlanSpec(n=n, x_c=0.7)
        smile = put_smile_fft(cf, GBM_MARKET, plan)
        j = int(np.searchsorted(smile.k_grid, 0.05))
        k_mid = 0.5 * (smile.k_grid[j] + smile.k_grid[j + 1])
        strike = float(GBM_MARKET.strike_from_log_moneyness(k_mid))
        out = interpolate_strikes(smile, [strike])
        errs.append(abs(out.prices[0] - black_scholes_put(GBM_MARKET, GBM_PARAMS.sigma, strike)))
    assert errs[0] < 1e-7
    assert 3.0 < errs[0] / errs[1] < 6.0


def test_interpolation_unsorted_targets_sorted_output(gbm):
    cf, rng = gbm
    smile = put_smile_fft(cf, GBM_MARKET, FftPlanSpec(n=256, x_c=rng.x_c))
    out = interpolate_strikes(smile, [1.2, 0.9, 1.05])
    np.testing.assert_allclose(out.strikes, [0.9, 1.05, 1.2], rtol=0, atol=0)
    assert np.all(np.diff(out.strikes) > 0)


def test_interpolation_refuses_extrapolation(gbm):
    cf, rng = gbm
    smile = put_smile_fft(cf, GBM_MARKET, FftPlanSpec(n=64, x_c=rng.x_c, epsilon=0.15))
    k_max = smile.k_grid[-1]
    too_big = float(GBM_MARKET.strike_from_log_moneyness(k_max + 0.05))
    with pytest.raises(ExtrapolationError):
        interpolate_strikes(smile, [too_big])
    too_small = float(GBM_MARKET.strike_from_log_moneyness(smile.k_grid[0] - 0.05))
    with pytest.raises(ExtrapolationError):
        interpolate_strikes(smile, [too_small])


def test_interpolation_reassembles_from_digitals(gbm):
    # digital-backed smiles interpolate con/aon and rebuild the price, so
    # the result carries interpolated digitals consistent with the price
    cf, rng = gbm
    smile = put_smile_fft(cf, GBM_MARKET, FftPlanSpec(n=1024, x_c=rng.x_c))
    out = interpolate_strikes(smile, [1.07])
    m = GBM_MARKET
    rebuilt = (
        math.exp(-m.r * m.T) * out.strikes[0] * out.con[0]
        - math.exp(-m.q * m.T) * m.s0 * out.aon[0]
    )
    assert abs(out.prices[0] - rebuilt) < 1e-16
