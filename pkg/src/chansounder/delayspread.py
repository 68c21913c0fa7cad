"""Power-weighted delay statistics of extracted multipath components.

The RMS delay spread is the square root of the power-weighted second
central moment of the MPC delays; the mean excess delay is the first
moment.  Weights are linear powers, so the results are invariant under
uniform power scaling and under a common delay shift.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .apdp import Apdp, MpcList
from .errors import EmptyMpcSet, InvalidInput


@dataclass
class DsResult:
    mean_excess_delay_s: float
    rms_ds_s: float
    n_mpcs: int

    def __post_init__(self):
        if self.rms_ds_s < 0:
            raise InvalidInput("rms_ds_s must be non-negative")
        if self.n_mpcs < 1:
            raise InvalidInput("n_mpcs must be positive")


def _weighted_moments(delays_s: np.ndarray, powers_lin: np.ndarray) -> DsResult:
    w = powers_lin / np.sum(powers_lin)
    mean = float(np.sum(w * delays_s))
    var = float(np.sum(w * (delays_s - mean) ** 2))
    # var can undershoot zero by a few ulp for a single path
    return DsResult(mean, float(np.sqrt(max(var, 0.0))), len(delays_s))


def delay_spread(mpcs: MpcList) -> DsResult:
    """Mean excess delay and RMS delay spread of an MPC list."""
    if len(mpcs) == 0:
        raise EmptyMpcSet("no multipath components")
    return _weighted_moments(mpcs.delays_s, 10.0 ** (mpcs.powers_db / 10.0))


def delay_spread_raw(apdp: Apdp, margin_db: float = 0.0) -> DsResult:
    """Sensitivity-study variant: weight every bin above the noise floor.

    Uses all APDP bins exceeding the stored noise floor by ``margin_db``
    instead of the thresholded MPC peaks.  Requires the noise floor to
    have been estimated first.
    """
    if apdp.noise_floor_db is None:
        raise InvalidInput("estimate the noise floor before the raw-bin DS")
    keep = apdp.power_db > apdp.noise_floor_db + margin_db
    if not np.any(keep):
        raise EmptyMpcSet("no bins above the noise floor")
    delays = np.nonzero(keep)[0] * apdp.delay_bin_s
    return _weighted_moments(delays, 10.0 ** (apdp.power_db[keep] / 10.0))


def aggregate_ds(results) -> tuple[float, float]:
    """Mean and population std of the RMS delay spreads, in ns."""
    ds_ns = np.array([r.rms_ds_s for r in results]) * 1e9
    if ds_ns.size == 0:
        raise InvalidInput("no delay-spread results to aggregate")
    return float(np.mean(ds_ns)), float(np.std(ds_ns))
