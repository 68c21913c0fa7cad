"""Calibration deconvolution: recover H(f) and the CIR from raw captures.

A measurement capture holds the probe waveform convolved with the sounder
hardware response and the propagation channel; a back-to-back calibration
capture holds the same minus the channel.  Dividing their spectra cancels
the probe and the hardware chain, and the inverse transform of the
quotient is the channel impulse response.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DegenerateCalibration, InvalidInput

DEFAULT_FLOOR_DB = -40.0


class RecordKind(Enum):
    CALIBRATION = "calibration"
    MEASUREMENT = "measurement"


@dataclass(eq=False)
class ComplexRecord:
    """A uniformly sampled complex baseband record (one snapshot).

    ``center_frequency_hz`` is carried as metadata so spectra derived from
    the record know which band they belong to.
    """

    samples: np.ndarray
    sample_rate_hz: float
    kind: RecordKind = RecordKind.MEASUREMENT
    center_frequency_hz: float = 2.4e9

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.complex128)
        if self.samples.ndim != 1 or self.samples.size == 0:
            raise InvalidInput("record must be a non-empty 1-D sample array")
        if not self.sample_rate_hz > 0:
            raise InvalidInput("sample_rate_hz must be positive")
        if not self.center_frequency_hz > 0:
            raise InvalidInput("center_frequency_hz must be positive")

    def __len__(self):
        return self.samples.size


@dataclass(eq=False)
class FrequencyResponse:
    """Complex spectrum on a uniform frequency grid."""

    bins: np.ndarray
    bin_spacing_hz: float
    center_frequency_hz: float

    def __post_init__(self):
        self.bins = np.asarray(self.bins, dtype=np.complex128)
        if self.bins.ndim != 1 or self.bins.size == 0:
            raise InvalidInput("spectrum must be a non-empty 1-D bin array")
        if not self.bin_spacing_hz > 0:
            raise InvalidInput("bin_spacing_hz must be positive")

    def __len__(self):
        return self.bins.size


@dataclass(eq=False)
class Cir:
    """Channel impulse response on a uniform delay grid.

    ``delay_bin_s`` is the delay per tap, the reciprocal of the sounding
    bandwidth (3.125 ns at 320 MHz).
    """

    taps: np.ndarray
    delay_bin_s: float

    def __post_init__(self):
        self.taps = np.asarray(self.taps, dtype=np.complex128)
        if self.taps.ndim != 1 or self.taps.size == 0:
            raise InvalidInput("CIR must be a non-empty 1-D tap array")
        if not self.delay_bin_s > 0:
            raise InvalidInput("delay_bin_s must be positive")

    def __len__(self):
        return self.taps.size

    @property
    def delays_s(self) -> np.ndarray:
        return np.arange(self.taps.size) * self.delay_bin_s

    def tap_powers_db(self, floor: float = 1e-30) -> np.ndarray:
        """Per-tap power in dB; exact zeros clamp to the given linear floor."""
        return 10.0 * np.log10(np.maximum(np.abs(self.taps) ** 2, floor))


def to_frequency_domain(record: ComplexRecord) -> FrequencyResponse:
    """Forward DFT of a record (unnormalized convention).

    The inverse used by :func:`to_cir` carries the 1/N factor, so
    ``to_cir(to_frequency_domain(x))`` reproduces ``x``.
    """
    n = len(record)
    return FrequencyResponse(
        bins=np.fft.fft(record.samples),
        bin_spacing_hz=record.sample_rate_hz / n,
        center_frequency_hz=record.center_frequency_hz,
    )


def deconvolve(
    y_rx: FrequencyResponse,
    y_th: FrequencyResponse,
    floor_db: float = DEFAULT_FLOOR_DB,
) -> FrequencyResponse:
    """Channel spectrum H = Y_rx / Y_th with a magnitude floor on Y_th.

    Bins where ``|Y_th|`` falls below ``peak * 10**(floor_db/20)`` carry no
    probe energy and would only amplify noise, so H is set to 0 there.
    """
    if len(y_rx) != len(y_th):
        raise InvalidInput(
            f"bin count mismatch: {len(y_rx)} vs {len(y_th)}"
        )
    mag = np.abs(y_th.bins)
    peak = mag.max()
    if peak == 0.0:
        raise DegenerateCalibration("calibration spectrum is identically zero")
    keep = mag >= peak * 10.0 ** (floor_db / 20.0)
    h = np.zeros(len(y_rx), dtype=np.complex128)
    h[keep] = y_rx.bins[keep] / y_th.bins[keep]
    return FrequencyResponse(
        bins=h,
        bin_spacing_hz=y_rx.bin_spacing_hz,
        center_frequency_hz=y_rx.center_frequency_hz,
    )


def occupied_bins(y_th: FrequencyResponse, floor_db: float = DEFAULT_FLOOR_DB) -> np.ndarray:
    """Boolean mask of calibration bins kept by :func:`deconvolve`."""
    mag = np.abs(y_th.bins)
    peak = mag.max()
    if peak == 0.0:
        raise DegenerateCalibration("calibration spectrum is identically zero")
    return mag >= peak * 10.0 ** (floor_db / 20.0)


def to_cir(h: FrequencyResponse) -> Cir:
    """Inverse DFT of a channel spectrum (1/N convention)."""
    n = len(h)
    return Cir(
        taps=np.fft.ifft(h.bins),
        delay_bin_s=1.0 / (h.bin_spacing_hz * n),
    )
