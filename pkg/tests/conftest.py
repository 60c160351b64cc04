"""Shared fixtures: model settings, bound CFs and pinned truncation ranges.

The pinned half-widths below are frozen outputs of ``find_truncation`` on
each bundled setting (the search itself is exercised separately).  Pinning
them keeps every other test deterministic and cheap while still running the
pricing code on the exact ranges the tables use.
"""

from __future__ import annotations

import pytest

from sincpricer.models import (
    CgmyParams,
    GbmParams,
    HestonParams,
    MarketSpec,
    cf_cgmy,
    cf_gbm,
    cf_heston,
)
from sincpricer.rough_heston import (
    ForwardVarianceCurve,
    RoughHestonCf,
    RoughHestonParams,
)
from sincpricer.sinc_core import TruncationRange

# find_truncation outputs, frozen (one per bundled table setting)
PINNED_XC = {
    "gbm-t01": 2.0149,
    "heston-t01": 2.8666,
    "heston-t1": 18.2725,
    "cgmy15-t1": 33.1179,
    "cgmy15-t001": 11.4853,
    "cgmy198-t1": 249.2832,
    "cgmy198-t001": 24.9836,
    "cgmy05-t1": 18.3889,
    "cgmy05-t001": 12.0854,
    "rheston-t1": 31.9619,
    "rheston-t001": 2.3431,
}


def pinned_range(table_id: str) -> TruncationRange:
    return TruncationRange.symmetric(PINNED_XC[table_id])


GBM_MARKET = MarketSpec(s0=1.0, r=0.1, q=0.0, T=0.1)
GBM_PARAMS = GbmParams(sigma=0.25)

HESTON_PARAMS = HestonParams(lam=1.5768, eta_vol=0.5751, v_bar=0.0398, v0=0.0175, rho=-0.5711)
HESTON_MARKET_T01 = MarketSpec(s0=1.0, r=0.0, q=0.0, T=0.1)
HESTON_MARKET_T1 = MarketSpec(s0=1.0, r=0.0, q=0.0, T=1.0)

CGMY_MARKET_T1 = MarketSpec(s0=1.0, r=0.1, q=0.0, T=1.0)
CGMY_MARKET_T001 = MarketSpec(s0=1.0, r=0.1, q=0.0, T=0.01)
CGMY_15 = CgmyParams(C=1.0, G=5.0, M=5.0, Y=1.5)
CGMY_198 = CgmyParams(C=1.0, G=5.0, M=5.0, Y=1.98)
CGMY_05 = CgmyParams(C=1.0, G=5.0, M=5.0, Y=0.5)

RHESTON_PARAMS = RoughHestonParams(H=0.05, nu=0.4, rho=-0.65)
RHESTON_CURVE = ForwardVarianceCurve.flat(0.0256)
RHESTON_MARKET_T1 = MarketSpec(s0=1.0, r=0.0, q=0.0, T=1.0)
RHESTON_MARKET_T001 = MarketSpec(s0=1.0, r=0.0, q=0.0, T=0.01)

TABLE_STRIKES = tuple((60 + 10 * i) / 100.0 for i in range(9))


def bind(cf_fn, params, market):
    """Close a model CF over its parameters, leaving only the frequency."""

    def cf(kappa):
        return cf_fn(params, market, kappa)

    return cf


@pytest.fixture(scope="session")
def gbm_cf():
    return bind(cf_gbm, GBM_PARAMS, GBM_MARKET)


@pytest.fixture(scope="session")
def heston_cf_t01():
    return bind(cf_heston, HESTON_PARAMS, HESTON_MARKET_T01)


@pytest.fixture(scope="session")
def heston_cf_t1():
    return bind(cf_heston, HESTON_PARAMS, HESTON_MARKET_T1)


@pytest.fixture(scope="session")
def cgmy15_cf_t1():
    return bind(cf_cgmy, CGMY_15, CGMY_MARKET_T1)


@pytest.fixture(scope="session")
def cgmy198_cf_t001():
    return bind(cf_cgmy, CGMY_198, CGMY_MARKET_T001)


@pytest.fixture(scope="session")
def cgmy05_cf_t001():
    return bind(cf_cgmy, CGMY_05, CGMY_MARKET_T001)


@pytest.fixture(scope="session")
def rheston_cf_t1():
    """Memoizing rough Heston CF at the bundled T = 1 setting."""
    return RoughHestonCf(RHESTON_PARAMS, RHESTON_CURVE, RHESTON_MARKET_T1, n_steps=200)


class CountingCf:
    """Wrap a CF and record every frequency batch it is asked for."""

    def __init__(self, cf):
        self.cf = cf
        self.batches = []

    def __call__(self, kappa):
        import numpy as np

        self.batches.append(np.atleast_1d(np.asarray(kappa, dtype=complex)))
        return self.cf(kappa)

    @property
    def total_evals(self) -> int:
        return sum(b.size for b in self.batches)
