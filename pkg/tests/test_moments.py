"""Series-based moments of truncated densities and the cumulant range rule."""

from __future__ import annotations

import math

import numpy as np
import pytest

import oracles
from conftest import GBM_MARKET, GBM_PARAMS, bind
from sincpricer.models import cf_gbm
from sincpricer.moments import moments_from_cf, trunc_rule_range


def uniform_cf(x_c: float):
    """CF of the uniform density on [-x_c, x_c]: sinc(2 x_c kappa)."""

    def cf(kappa):
        return np.sinc(2.0 * x_c * np.asarray(kappa, dtype=float)) + 0.0j

    return cf


def test_uniform_density_identities_exact():
    # all series samples vanish on the grid, leaving the leading terms
    x_c = 1.7
    ms = moments_from_cf(uniform_cf(x_c), x_c, n_terms=500)
    assert abs(ms.m1) < 1e-15
    assert abs(ms.m2 - x_c**2 / 3.0) < 1e-15
    assert abs(ms.m3) < 1e-15
    assert abs(ms.m4 - x_c**4 / 5.0) < 1e-15


def test_gaussian_second_and_fourth_moments():
    # truncation at x_c = 15 sigma leaves the Gaussian moments untouched
    ms = moments_from_cf(oracles.gaussian_cf(0.2), 3.0, n_terms=5000)
    assert abs(ms.m2 - 0.04) < 1e-8
    assert abs(ms.m4 - 3.0 * 0.04**2) < 1e-7
    assert abs(ms.m1) < 1e-10
    assert abs(ms.m3) < 1e-9


def test_gaussian_c1_matches_drift_adjusted_mean():
    # the engine's return is s_T = log(S_T/S0) - (r - q) T, so the first
    # cumulant is -sigma^2 T / 2 regardless of the rate
    cf = bind(cf_gbm, GBM_PARAMS, GBM_MARKET)
    ms = moments_from_cf(cf, 2.0, n_terms=5000)
    want = -0.5 * GBM_PARAMS.sigma**2 * GBM_MARKET.T
    assert abs(ms.c1 - want) < 1e-8


def test_early_stop_cuts_terms_without_changing_values():
    full = moments_from_cf(oracles.gaussian_cf(0.2), 3.0, n_terms=10000)
    assert full.n_used < 10000
    manual = moments_from_cf(oracles.gaussian_cf(0.2), 3.0, n_terms=full.n_used)
    assert manual.m2 == pytest.approx(full.m2, abs=1e-14)
    assert manual.m4 == pytest.approx(full.m4, abs=1e-14)


def test_variance_nonnegative():
    for sigma in (0.05, 0.2, 0.6):
        ms = moments_from_cf(oracles.gaussian_cf(sigma), 12.0 * sigma, n_terms=8000)
        assert ms.c2 >= -1e-12


def test_moments_converge_to_untruncated_limits():
    sigma = 0.3
    ms = moments_from_cf(oracles.gaussian_cf(sigma), 10.0 * sigma, n_terms=8000)
    assert abs(ms.m2 - sigma**2) < 1e-8
    assert abs(ms.m4 - 3.0 * sigma**4) < 1e-8


def test_trunc_rule_gaussian_width():
    # c2 = 0.04, c4 = 0 gives [c1 - 2, c1 + 2] at scale 10
    ms = moments_from_cf(oracles.gaussian_cf(0.2), 3.0, n_terms=5000)
    rng = trunc_rule_range(ms, scale=10.0)
    assert abs(rng.x_l - (ms.c1 - 2.0)) < 1e-6
    assert abs(rng.x_h - (ms.c1 + 2.0)) < 1e-6
    # symmetric about c1 by construction
    assert rng.x_m == pytest.approx(ms.c1, abs=1e-12)


def test_trunc_rule_degenerate_scale_rejected():
    ms = moments_from_cf(oracles.gaussian_cf(0.2), 3.0, n_terms=2000)
    with pytest.raises(ValueError):
        trunc_rule_range(ms, scale=0.0)


def test_moments_input_validation():
    with pytest.raises(ValueError):
        moments_from_cf(oracles.gaussian_cf(0.2), 0.0, n_terms=100)
    with pytest.raises(ValueError):
        moments_from_cf(oracles.gaussian_cf(0.2), 1.0, n_terms=0)


def test_moment_series_uses_integer_grid():
    # samples must be drawn at kappa_n = n / (2 x_c): a CF that is 1 on that
    # grid and arbitrary elsewhere must behave like the uniform density
    x_c = 2.0
    seen = []

    def probe(kappa):
        seen.append(np.asarray(kappa, dtype=float))
        return uniform_cf(x_c)(kappa)

    moments_from_cf(probe, x_c, n_terms=64)
    grid = np.concatenate(seen)
    np.testing.assert_allclose(grid, np.arange(1, 65) / (2.0 * x_c), rtol=0, atol=0)


def test_real_even_cf_gives_zero_odd_moments():
    # m1/m3 are pure imaginary-part series, m2/m4 pure real-part: a real,
    # even CF must give exactly zero odd moments
    ms = moments_from_cf(oracles.gaussian_cf(0.4), 4.0, n_terms=3000)
    assert ms.m1 == 0.0
    assert ms.m3 == 0.0
