"""Ricean K factor from frequency-domain moments, plus normal fits.

The estimator needs only the second and fourth moments of the spectral
magnitudes, so it works on any bag of narrowband samples H_i and is
exactly invariant to a common complex scale.  Degenerate inputs are
clamped rather than raised: zero spectral variance means a pure
dominant component (K = +inf), and a negative discriminant means the
diffuse part already explains everything (K = 0).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import InsufficientSamples, InvalidInput


@dataclass
class KfEstimate:
    k_linear: float
    k_db: float
    n_samples: int

    def __post_init__(self):
        if self.k_linear < 0:
            raise InvalidInput("k_linear must be non-negative")
        if self.n_samples < 2:
            raise InvalidInput("need at least two spectral samples")


@dataclass
class NormalFit:
    """Normal distribution fitted to a batch of dB values.

    ``cdf_max_dev`` is the largest gap between the empirical CDF and the
    fitted normal CDF (the Kolmogorov-Smirnov statistic), kept as a
    goodness-of-fit indicator.  ``n_excluded`` counts non-finite values
    (pure-LOS +inf estimates) dropped before fitting.
    """

    mu: float
    sigma: float
    n_samples: int
    n_excluded: int = 0
    cdf_max_dev: float | None = None

    def __post_init__(self):
        if self.sigma < 0:
            raise InvalidInput("sigma must be non-negative")


def _as_spectrum(spectrum) -> np.ndarray:
    h = np.asarray(spectrum, dtype=np.complex128)
    if h.ndim != 1:
        raise InvalidInput("spectrum must be one-dimensional")
    if h.size < 2:
        raise InsufficientSamples("moment estimation needs at least 2 samples")
    return h


def moments(spectrum) -> tuple[float, float]:
    """Second moment g_a and excess fourth-moment spread g_v of |H_i|.

    g_a = mean(|H_i|^2); g_v = (sum |H_i|^4 - I * g_a^2) / (I - 1), an
    unbiased variance-style normalization over the I samples.
    """
    h = _as_spectrum(spectrum)
    p = np.abs(h) ** 2
    i = p.size
    g_a = float(np.mean(p))
    # plain multiplies rather than ** so the whole expression commutes
    # exactly with power-of-two rescaling of the input (libm pow does not)
    g_v = float((np.sum(p * p) - i * (g_a * g_a)) / (i - 1))
    return g_a, g_v


def estimate_kf(spectrum) -> KfEstimate:
    """Moment-method Ricean K: sqrt(g_a^2 - g_v) / (g_a - sqrt(...))."""
    h = _as_spectrum(spectrum)
    g_a, g_v = moments(h)
    if g_v <= 0.0:
        # constant |H|: no diffuse power at all (tiny negative g_v is
        # the same case seen through rounding)
        return KfEstimate(np.inf, np.inf, h.size)
    disc = g_a * g_a - g_v
    if disc <= 0.0:
        return KfEstimate(0.0, -np.inf, h.size)
    root = float(np.sqrt(disc))
    k = root / (g_a - root)
    return KfEstimate(k, float(10.0 * np.log10(k)), h.size)


def fit_normal(values_db) -> NormalFit:
    """Fit a normal distribution to finite dB values.

    Non-finite entries (the +inf of pure-LOS estimates) are excluded
    from the fit and reported in ``n_excluded``.
    """
    values = np.asarray(values_db, dtype=np.float64)
    finite = values[np.isfinite(values)]
    n_excluded = int(values.size - finite.size)
    if finite.size < 2:
        raise InsufficientSamples("normal fit needs at least 2 finite values")
    mu = float(np.mean(finite))
    sigma = float(np.std(finite))
    x = np.sort(finite)
    n = x.size
    if sigma == 0.0:
        dev = 0.0
    else:
        cdf = stats.norm.cdf(x, loc=mu, scale=sigma)
        steps_hi = np.arange(1, n + 1) / n
        steps_lo = np.arange(0, n) / n
        dev = float(np.max(np.maximum(steps_hi - cdf, cdf - steps_lo)))
    return NormalFit(mu, sigma, n, n_excluded, dev)
