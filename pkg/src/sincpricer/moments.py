"""Raw moments of the truncated density straight from CF samples.

For a density carried by [-x_c, x_c] the Fourier coefficients at the integer
grid kappa_n = n / (2 x_c) determine the first four raw moments through
closed-form sums: each moment is the integral of a polynomial against the
cosine/sine reconstruction, and the polynomial's own Fourier coefficients
are elementary.  No transform, no quadrature; accuracy is set by how fast
the CF decays along the integer grid.

The sums used here (kappa_n = n / (2 x_c), phi_n = cf(kappa_n)):

    m1 = -2 x_c     sum_n Im(phi_n) (-1)^n / (n pi)
    m2 = x_c^2 / 3 + 4 x_c^2 sum_n Re(phi_n) (-1)^n / (n pi)^2
    m3 = -2 x_c^3   sum_n Im(phi_n) (-1)^n / (n pi) (1 - 6 / (n pi)^2)
    m4 = x_c^4 / 5 + 8 x_c^4 sum_n Re(phi_n) (-1)^n / (n pi)^2 (1 - 6 / (n pi)^2)

A point mass at x0 (phi_n = exp(i 2 pi kappa_n x0)) reproduces m1 = x0 and
m2 = x0^2 exactly in the limit, and the uniform density on the full interval
kills every sum term, leaving the constants x_c^2 / 3 and x_c^4 / 5.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .sinc_core import TruncationRange

__all__ = ["MomentSet", "moments_from_cf", "trunc_rule_range"]

# Three consecutive negligible terms in a row end the summation early.
_EARLY_STOP_TOL = 1e-14
_EARLY_STOP_RUN = 3


@dataclass(frozen=True)
class MomentSet:
    """First four raw moments of the truncated density, plus bookkeeping."""

    m1: float
    m2: float
    m3: float
    m4: float
    x_c: float
    n_used: int

    @property
    def c1(self) -> float:
        return self.m1

    @property
    def c2(self) -> float:
        return self.m2 - self.m1**2

    @property
    def c3(self) -> float:
        return self.m3 - 3.0 * self.m1 * self.m2 + 2.0 * self.m1**3

    @property
    def c4(self) -> float:
        return (
            self.m4
            - 4.0 * self.m1 * self.m3
            - 3.0 * self.m2**2
            + 12.0 * self.m1**2 * self.m2
            - 6.0 * self.m1**4
        )


def moments_from_cf(cf, x_c: float, n_terms: int = 10000) -> MomentSet:
    """Sum the moment series from CF samples on the integer frequency grid.

    Terms are accumulated with compensated summation.  The series stops at
    n_terms or as soon as the sample magnitude scale |phi_n| / (n pi) stays
    below 1e-14 for three consecutive terms, whichever comes first.
    """
    if x_c <= 0.0:
        raise ValueError("x_c must be positive")
    if n_terms < 1:
        raise ValueError("n_terms must be at least 1")

    n = np.arange(1, n_terms + 1, dtype=float)
    phi = np.asarray(cf(n / (2.0 * x_c)), dtype=complex)
    npi = n * np.pi
    sign = np.where(np.arange(1, n_terms + 1) % 2 == 0, 1.0, -1.0)

    scale = np.abs(phi) / npi
    small = scale < _EARLY_STOP_TOL
    n_used = n_terms
    if n_terms >= _EARLY_STOP_RUN:
        run = np.convolve(small.astype(int), np.ones(_EARLY_STOP_RUN, dtype=int), "valid")
        hits = np.nonzero(run == _EARLY_STOP_RUN)[0]
        if hits.size:
            n_used = int(hits[0]) + _EARLY_STOP_RUN

    im = phi.imag[:n_used] * sign[:n_used] / npi[:n_used]
    re = phi.real[:n_used] * sign[:n_used] / npi[:n_used] ** 2
    cubic = 1.0 - 6.0 / npi[:n_used] ** 2

    s1 = math.fsum(im)
    s2 = math.fsum(re)
    s3 = math.fsum(im * cubic)
    s4 = math.fsum(re * cubic)

    return MomentSet(
        m1=-2.0 * x_c * s1,
        m2=x_c**2 / 3.0 + 4.0 * x_c**2 * s2,
        m3=-2.0 * x_c**3 * s3,
        m4=x_c**4 / 5.0 + 8.0 * x_c**4 * s4,
        x_c=x_c,
        n_used=n_used,
    )


def trunc_rule_range(moments: MomentSet, scale: float = 10.0) -> TruncationRange:
    """Cumulant-based truncation interval c1 -/+ scale sqrt(c2 + sqrt(c4)).

    This is the interval rule commonly paired with cosine expansions; it is
    provided so the cutting procedure can be cross-checked against it.  A
    slightly negative fourth cumulant from summation noise is clamped to
    zero; a genuinely negative one is rejected.
    """
    c1, c2, c4 = moments.c1, moments.c2, moments.c4
    if c4 < -1e-10:
        raise ValueError(f"fourth cumulant is negative ({c4:.3e}); rule not applicable")
    c4 = max(c4, 0.0)
    width_sq = c2 + math.sqrt(c4)
    if width_sq < 0.0:
        raise ValueError(f"c2 + sqrt(c4) is negative ({width_sq:.3e}); rule not applicable")
    half = scale * math.sqrt(width_sq)
    return TruncationRange(x_l=c1 - half, x_h=c1 + half)
