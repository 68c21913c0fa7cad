"""Averaged power delay profiles and multipath component extraction.

Per-measurement CIRs are gated by SNR, the survivors averaged into an
APDP, and discrete multipath components picked off the APDP with a
dual threshold: the larger of (noise floor + 6 dB) and (peak - 25 dB).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .deconv import Cir
from .errors import AllSnapshotsRejected, EmptyMpcSet, InvalidInput

SNR_GATE_DB = 25.0
FLOOR_MARGIN_DB = 6.0
PEAK_WINDOW_DB = 25.0

# Exact-zero bins (noiseless synthetic profiles) clamp here instead of -inf.
POWER_CLAMP_LINEAR = 1e-30


@dataclass
class NoiseWindowSpec:
    """Delay-bin window used for noise floor estimation.

    Explicit ``start_bin``/``stop_bin`` win when given; otherwise the
    trailing ``tail_fraction`` of the profile is used.  The window must
    exclude the signal region; that is the caller's responsibility.
    """

    start_bin: int | None = None
    stop_bin: int | None = None
    tail_fraction: float = 0.25

    def resolve(self, n_bins: int) -> slice:
        if self.start_bin is not None:
            start = self.start_bin
            stop = self.stop_bin if self.stop_bin is not None else n_bins
        else:
            if not 0.0 < self.tail_fraction <= 1.0:
                raise InvalidInput("tail_fraction must be in (0, 1]")
            start = n_bins - max(1, int(round(n_bins * self.tail_fraction)))
            stop = n_bins
        if not 0 <= start < stop <= n_bins:
            raise InvalidInput(f"noise window [{start}, {stop}) invalid for {n_bins} bins")
        return slice(start, stop)


@dataclass(eq=False)
class Apdp:
    """Average power delay profile in dB per delay bin."""

    power_db: np.ndarray
    delay_bin_s: float
    n_averaged: int
    noise_floor_db: float | None = None

    def __post_init__(self):
        self.power_db = np.asarray(self.power_db, dtype=np.float64)
        if self.power_db.ndim != 1 or self.power_db.size == 0:
            raise InvalidInput("APDP must be a non-empty 1-D power array")
        if not np.all(np.isfinite(self.power_db)):
            raise InvalidInput("APDP powers must be finite")
        if self.n_averaged < 1:
            raise InvalidInput("n_averaged must be >= 1")

    def __len__(self):
        return self.power_db.size

    @property
    def delays_s(self) -> np.ndarray:
        return np.arange(self.power_db.size) * self.delay_bin_s


@dataclass(eq=False)
class MpcList:
    """Extracted multipath components (delay, power) above a threshold."""

    delays_s: np.ndarray
    powers_db: np.ndarray
    threshold_db: float

    def __post_init__(self):
        self.delays_s = np.asarray(self.delays_s, dtype=np.float64)
        self.powers_db = np.asarray(self.powers_db, dtype=np.float64)
        if self.delays_s.shape != self.powers_db.shape or self.delays_s.ndim != 1:
            raise InvalidInput("delays and powers must be matching 1-D arrays")
        if self.delays_s.size and np.any(np.diff(self.delays_s) <= 0):
            raise InvalidInput("MPC delays must be strictly increasing")

    def __len__(self):
        return self.delays_s.size

    @property
    def components(self) -> list[tuple[float, float]]:
        return list(zip(self.delays_s.tolist(), self.powers_db.tolist()))


def _power_db(values: np.ndarray) -> np.ndarray:
    return 10.0 * np.log10(np.maximum(values, POWER_CLAMP_LINEAR))


def _floor_db(linear_power: np.ndarray, window: NoiseWindowSpec) -> float:
    """Median power of the guard window, in dB.

    The median resists leakage from late multipath spilling into the
    window, which a mean would absorb.
    """
    sel = window.resolve(linear_power.size)
    return float(_power_db(np.median(linear_power[sel])))


def snr_gate(
    cirs: list[Cir],
    min_snr_db: float = SNR_GATE_DB,
    noise_window: NoiseWindowSpec | None = None,
) -> list[Cir]:
    """Keep the CIRs whose peak-to-noise-floor ratio meets the gate.

    SNR is the peak tap power minus the noise floor estimated from the
    trailing guard window of the same CIR, both in dB.  Raises
    :class:`AllSnapshotsRejected` when nothing survives.
    """
    window = noise_window or NoiseWindowSpec()
    kept = []
    for cir in cirs:
        p_lin = np.abs(cir.taps) ** 2
        snr = _power_db(p_lin.max()) - _floor_db(p_lin, window)
        if snr >= min_snr_db:
            kept.append(cir)
    if not kept:
        raise AllSnapshotsRejected(
            f"all {len(cirs)} CIRs below the {min_snr_db} dB SNR gate"
        )
    return kept


def average_apdp(cirs: list[Cir]) -> Apdp:
    """Bin-wise mean of |h(tau)|^2 over the gated CIRs, in dB."""
    if not cirs:
        raise InvalidInput("need at least one CIR")
    n = len(cirs[0])
    for cir in cirs[1:]:
        if len(cir) != n:
            raise InvalidInput("CIR lengths differ")
        if not np.isclose(cir.delay_bin_s, cirs[0].delay_bin_s, rtol=1e-9):
            raise InvalidInput("CIR delay bins differ")
    mean_lin = np.mean([np.abs(c.taps) ** 2 for c in cirs], axis=0)
    return Apdp(
        power_db=_power_db(mean_lin),
        delay_bin_s=cirs[0].delay_bin_s,
        n_averaged=len(cirs),
    )


def estimate_noise_floor(apdp: Apdp, window: NoiseWindowSpec | None = None) -> float:
    """Estimate the APDP noise floor and store it on the profile."""
    floor = _floor_db(10.0 ** (apdp.power_db / 10.0), window or NoiseWindowSpec())
    apdp.noise_floor_db = floor
    return floor


def _peak_bins(power_db: np.ndarray) -> np.ndarray:
    """Bins of local maxima; a plateau counts once, at its earliest bin.

    Profile edges are treated as open (missing neighbors compare low), so
    the global maximum is always a peak.
    """
    n = power_db.size
    peaks = []
    i = 0
    while i < n:
        j = i
        while j + 1 < n and power_db[j + 1] == power_db[i]:
            j += 1
        left_ok = i == 0 or power_db[i - 1] < power_db[i]
        right_ok = j == n - 1 or power_db[j + 1] < power_db[i]
        if left_ok and right_ok:
            peaks.append(i)
        i = j + 1
    return np.asarray(peaks, dtype=np.intp)


def extract_mpcs(
    apdp: Apdp,
    floor_margin_db: float = FLOOR_MARGIN_DB,
    peak_window_db: float = PEAK_WINDOW_DB,
) -> MpcList:
    """Pick multipath components off an APDP with the dual threshold.

    The decision threshold is the larger of (noise floor + 6 dB) and
    (maximum power - 25 dB); components are the local maxima at or above
    it.  Raises :class:`EmptyMpcSet` when no bin qualifies.
    """
    if apdp.noise_floor_db is None:
        raise InvalidInput("estimate the noise floor before extracting MPCs")
    threshold = max(
        apdp.noise_floor_db + floor_margin_db,
        float(apdp.power_db.max()) - peak_window_db,
    )
    bins = _peak_bins(apdp.power_db)
    bins = bins[apdp.power_db[bins] >= threshold]
    if bins.size == 0:
        raise EmptyMpcSet(
            f"no APDP bin at or above the {threshold:.2f} dB threshold"
        )
    return MpcList(
        delays_s=bins * apdp.delay_bin_s,
        powers_db=apdp.power_db[bins],
        threshold_db=threshold,
    )
