"""Synthetic corridor channels with known ground truth.

Generates the measurement side of the toolkit end to end: two-path
corridor tap sets (direct path plus a single bounce off the far end
wall), per-tap Rician fading snapshots probed with the sounding
waveform, and whole campaign capture trees whose path loss, delay
spread, and K factor are known by construction.  A ``truth.json``
sidecar records every generated parameter so estimator output can be
compared against what went in.

Tap gains are relative to the back-to-back calibration path, which is
what the deconvolution stage recovers; the link-budget terms then turn
received power into absolute path loss.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from .campaign import (
    CampaignManifest,
    PositionSpec,
    calibration_filename,
    capture_filename,
    save_manifest,
    write_capture,
)
from .deconv import ComplexRecord, RecordKind
from .errors import InvalidInput
from .pathloss import FSPL_1M_1GHZ_DB, PlModel, Scenario, eval_ci, eval_fi

SPEED_OF_LIGHT_M_S = 299_792_458.0

# free parameters of the oracle, picked so the end-wall reflection drops
# below the extraction threshold at a different distance per band
DEFAULT_REFLECTION_LOSS_DB = {2.4: 4.0, 5.0: 3.0, 6.0: 10.0}


class ProbeKind(Enum):
    CHIRP = "chirp"
    PN = "pn"


@dataclass
class CorridorGeometry:
    """Axial Tx/Rx placement in a straight corridor."""

    tx_pos_m: float
    rx_pos_m: float
    length_m: float = 41.0
    tx_height_m: float = 1.95
    rx_height_m: float = 1.45
    end_reflection_loss_db_per_band: dict[float, float] = field(
        default_factory=lambda: dict(DEFAULT_REFLECTION_LOSS_DB)
    )

    def __post_init__(self):
        if self.length_m <= 0:
            raise InvalidInput("corridor length must be positive")
        for name in ("tx_pos_m", "rx_pos_m"):
            v = getattr(self, name)
            if not 0.0 <= v <= self.length_m:
                raise InvalidInput(f"{name}={v} outside the corridor [0, {self.length_m}]")
        if self.tx_height_m <= 0 or self.rx_height_m <= 0:
            raise InvalidInput("antenna heights must be positive")

    @property
    def height_offset_m(self) -> float:
        return self.tx_height_m - self.rx_height_m

    def los_path_m(self) -> float:
        return math.hypot(self.rx_pos_m - self.tx_pos_m, self.height_offset_m)

    def reflection_path_m(self) -> float:
        """Single bounce off the far end wall (mirror image of the Rx)."""
        axial = 2.0 * self.length_m - self.tx_pos_m - self.rx_pos_m
        return math.hypot(axial, self.height_offset_m)


@dataclass
class Tap:
    """One channel tap: delay, mean power, and Rician K."""

    delay_s: float
    mean_power_db: float
    k_linear: float

    def __post_init__(self):
        if self.delay_s < 0:
            raise InvalidInput("tap delay must be non-negative")
        if not self.k_linear >= 0:
            raise InvalidInput("tap k_linear must be non-negative")
        if not np.isfinite(self.mean_power_db):
            raise InvalidInput("tap power must be finite")

    def mean_linear(self) -> float:
        return 10.0 ** (self.mean_power_db / 10.0)

    def deterministic_linear(self) -> float:
        p = self.mean_linear()
        if math.isinf(self.k_linear):
            return p
        return p * self.k_linear / (self.k_linear + 1.0)

    def diffuse_linear(self) -> float:
        if math.isinf(self.k_linear):
            return 0.0
        return self.mean_linear() / (self.k_linear + 1.0)


@dataclass
class TapSet:
    """A sparse tapped-delay-line channel plus its additive noise level.

    ``noise_power_db`` is the per-sample complex noise power of a
    generated record; -inf means noiseless.  An empty tap list is a
    valid all-noise channel.
    """

    taps: list[Tap]
    noise_power_db: float = float("-inf")

    def __post_init__(self):
        self.taps = sorted(self.taps, key=lambda t: t.delay_s)
        delays = [t.delay_s for t in self.taps]
        if len(set(delays)) != len(delays):
            raise InvalidInput("tap delays must be unique")

    def total_mean_linear(self) -> float:
        return sum(t.mean_linear() for t in self.taps)


def _combine(det: float, dif: float) -> tuple[float, float]:
    """(power, k) of a tap with the given deterministic/diffuse split."""
    if dif <= 0.0:
        return det, float("inf")
    return det + dif, det / dif


def _kf_db_to_linear(kf_db: float) -> float:
    if math.isinf(kf_db):
        return float("inf") if kf_db > 0 else 0.0
    return 10.0 ** (kf_db / 10.0)


def corridor_taps(
    geom: CorridorGeometry,
    band_ghz: float,
    ple: float,
    *,
    los_kf_db: float = 7.0,
    reflection_kf_db: float = 3.0,
    noise_power_db: float = float("-inf"),
) -> TapSet:
    """Direct-path and end-wall-reflection taps for one position.

    Each path's gain decays as the free-space intercept plus
    ``10 * ple * log10(path length)``; the reflection additionally pays
    the band's wall loss.  The reflection's excess delay shrinks as the
    receiver approaches the end wall, and the two taps merge when the
    paths coincide there.
    """
    if geom.tx_pos_m == geom.rx_pos_m:
        raise InvalidInput("coincident Tx and Rx positions")
    if band_ghz <= 0:
        raise InvalidInput("band must be positive (GHz)")
    d_los = geom.los_path_m()
    d_ref = geom.reflection_path_m()
    wall_loss = geom.end_reflection_loss_db_per_band.get(band_ghz, 0.0)

    def gain_db(path_m: float) -> float:
        return -(
            FSPL_1M_1GHZ_DB
            + 20.0 * math.log10(band_ghz)
            + 10.0 * ple * math.log10(path_m)
        )

    p_los = gain_db(d_los)
    p_ref = gain_db(d_ref) - wall_loss
    k_los = _kf_db_to_linear(los_kf_db)
    k_ref = _kf_db_to_linear(reflection_kf_db)
    if math.isclose(d_ref, d_los, rel_tol=1e-12):
        los = Tap(d_los / SPEED_OF_LIGHT_M_S, p_los, k_los)
        ref = Tap(d_ref / SPEED_OF_LIGHT_M_S, p_ref, k_ref)
        det = los.deterministic_linear() + ref.deterministic_linear()
        dif = los.diffuse_linear() + ref.diffuse_linear()
        p, k = _combine(det, dif)
        merged = Tap(d_los / SPEED_OF_LIGHT_M_S, 10.0 * math.log10(p), k)
        return TapSet([merged], noise_power_db)
    return TapSet(
        [
            Tap(d_los / SPEED_OF_LIGHT_M_S, p_los, k_los),
            Tap(d_ref / SPEED_OF_LIGHT_M_S, p_ref, k_ref),
        ],
        noise_power_db,
    )


def probe_waveform(record_len: int, kind: ProbeKind = ProbeKind.CHIRP, seed: int = 0):
    """Unit-amplitude sounding waveform of the requested kind.

    The default polyphase chirp has a perfectly flat spectrum, so
    deconvolving against it neither amplifies noise nor floors any bin.
    The PN kind is a seeded +/-1 sequence whose spectrum carries deep
    notches - useful for exercising the deconvolution floor.
    """
    if record_len < 2:
        raise InvalidInput("record_len must be at least 2")
    if kind is ProbeKind.CHIRP:
        n = np.arange(record_len, dtype=np.float64)
        if record_len % 2 == 0:
            phase = np.pi * n * n / record_len
        else:
            phase = np.pi * n * (n + 1.0) / record_len
        return np.exp(1j * phase)
    rng = np.random.default_rng(seed)
    return rng.choice([-1.0, 1.0], size=record_len).astype(np.complex128)


def calibration_record(
    record_len: int,
    bandwidth_hz: float,
    *,
    probe_kind: ProbeKind = ProbeKind.CHIRP,
    probe_seed: int = 0,
    center_frequency_hz: float = 2.4e9,
) -> ComplexRecord:
    """Back-to-back capture: the probe itself, assumed noiseless."""
    return ComplexRecord(
        probe_waveform(record_len, probe_kind, probe_seed),
        sample_rate_hz=bandwidth_hz,
        kind=RecordKind.CALIBRATION,
        center_frequency_hz=center_frequency_hz,
    )


def _quantized_taps(taps: TapSet, record_len: int, bandwidth_hz: float):
    """Snap taps to the delay grid; co-bin taps pool their powers.

    Returns (bins, det_lin, dif_lin) arrays sorted by bin.
    """
    pooled: dict[int, list[float]] = {}
    for tap in taps.taps:
        b = int(round(tap.delay_s * bandwidth_hz))
        if b >= record_len:
            raise InvalidInput(
                f"tap delay {tap.delay_s:.3e} s is beyond the record span "
                f"({record_len / bandwidth_hz:.3e} s)"
            )
        det, dif = pooled.setdefault(b, [0.0, 0.0])
        pooled[b] = [det + tap.deterministic_linear(), dif + tap.diffuse_linear()]
    bins = np.array(sorted(pooled), dtype=np.intp)
    det_lin = np.array([pooled[b][0] for b in bins])
    dif_lin = np.array([pooled[b][1] for b in bins])
    return bins, det_lin, dif_lin


def _realize(
    bins,
    det_amp,
    dif_var,
    noise_var: float,
    n_records: int,
    record_len: int,
    probe_fft,
    rng,
    average_of: int,
):
    """Draw records of the fading channel seen through the probe.

    Each record is statistically the coherent average of ``average_of``
    independent snapshots: the deterministic part is untouched while
    diffuse and noise variances shrink by that factor, which is exactly
    what averaging would produce.
    """
    dif_scale = np.sqrt(dif_var / (2.0 * average_of))
    noise_scale = math.sqrt(noise_var / (2.0 * average_of)) if noise_var > 0 else 0.0
    out = []
    for _ in range(n_records):
        h = np.zeros(record_len, dtype=np.complex128)
        if bins.size:
            z = rng.standard_normal((2, bins.size))
            h[bins] = det_amp + dif_scale * (z[0] + 1j * z[1])
        y = np.fft.ifft(probe_fft * np.fft.fft(h))
        if noise_scale > 0.0:
            zn = rng.standard_normal((2, record_len))
            y = y + noise_scale * (zn[0] + 1j * zn[1])
        out.append(y)
    return out


def generate_snapshots(
    taps: TapSet,
    n_snapshots: int,
    record_len: int,
    bandwidth_hz: float,
    seed: int,
    *,
    probe=None,
    probe_kind: ProbeKind = ProbeKind.CHIRP,
    probe_seed: int = 0,
    average_of: int = 1,
    center_frequency_hz: float = 2.4e9,
) -> list[ComplexRecord]:
    """Realize fading snapshots of a tap set through the probe.

    Tap delays are quantized to the delay grid (1/bandwidth); a delay
    past the record span raises InvalidInput.  ``average_of`` makes each
    returned record the average of that many snapshots (see _realize);
    the default of 1 returns raw snapshots.
    """
    if n_snapshots < 1:
        raise InvalidInput("n_snapshots must be >= 1")
    if bandwidth_hz <= 0:
        raise InvalidInput("bandwidth_hz must be positive")
    if average_of < 1:
        raise InvalidInput("average_of must be >= 1")
    if probe is None:
        probe = probe_waveform(record_len, probe_kind, probe_seed)
    probe = np.asarray(probe, dtype=np.complex128)
    if probe.shape != (record_len,):
        raise InvalidInput("probe length must equal record_len")
    bins, det_lin, dif_lin = _quantized_taps(taps, record_len, bandwidth_hz)
    noise_var = 10.0 ** (taps.noise_power_db / 10.0)
    rng = np.random.default_rng(seed)
    realized = _realize(
        bins,
        np.sqrt(det_lin),
        dif_lin,
        noise_var,
        n_snapshots,
        record_len,
        np.fft.fft(probe),
        rng,
        average_of,
    )
    return [
        ComplexRecord(
            y,
            sample_rate_hz=bandwidth_hz,
            kind=RecordKind.MEASUREMENT,
            center_frequency_hz=center_frequency_hz,
        )
        for y in realized
    ]


# ---------------------------------------------------------------------------
# campaign-level truth

@dataclass
class ModelTruth:
    """Ground-truth PL model for one (band, scenario) of a campaign."""

    model: PlModel
    ple: float
    offset_db: float | None = None
    sigma_db: float = 0.0

    def __post_init__(self):
        if self.model is PlModel.FI and self.offset_db is None:
            raise InvalidInput("FI truth needs offset_db")
        if self.model is PlModel.CI and self.offset_db is not None:
            raise InvalidInput("CI truth has no offset_db")
        if self.sigma_db < 0:
            raise InvalidInput("sigma_db must be non-negative")

    def mean_pl_db(self, d_m: float, f_ghz: float) -> float:
        if self.model is PlModel.CI:
            return eval_ci(d_m, f_ghz, self.ple)
        return eval_fi(d_m, self.ple, self.offset_db)


@dataclass
class SynthTruth:
    """Everything the campaign generator invents, in one place."""

    entries: dict[tuple[float, Scenario], ModelTruth]
    corridor_length_m: float = 43.2
    tx_height_m: float = 1.95
    rx_height_m: float = 1.45
    reflection_loss_db: dict[float, float] = field(
        default_factory=lambda: dict(DEFAULT_REFLECTION_LOSS_DB)
    )
    los_kf_db: float = 7.0
    reflection_kf_db: float = 3.0
    noise_power_db: float = -50.0
    probe_kind: ProbeKind = ProbeKind.CHIRP

    def entry_for(self, band_ghz: float, scenario: Scenario) -> ModelTruth:
        try:
            return self.entries[(band_ghz, scenario)]
        except KeyError:
            raise InvalidInput(
                f"truth has no entry for band {band_ghz} GHz / {scenario.value}"
            )

    def to_dict(self) -> dict:
        return {
            "corridor_length_m": self.corridor_length_m,
            "tx_height_m": self.tx_height_m,
            "rx_height_m": self.rx_height_m,
            "reflection_loss_db": {
                f"{b:g}": v for b, v in self.reflection_loss_db.items()
            },
            "los_kf_db": self.los_kf_db,
            "reflection_kf_db": self.reflection_kf_db,
            "noise_power_db": self.noise_power_db,
            "probe": self.probe_kind.value,
            "entries": [
                {
                    "band_ghz": band,
                    "scenario": scenario.value,
                    "model": m.model.value,
                    "ple": m.ple,
                    "offset_db": m.offset_db,
                    "sigma_db": m.sigma_db,
                }
                for (band, scenario), m in self.entries.items()
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SynthTruth":
        try:
            entries = {
                (float(e["band_ghz"]), Scenario(e["scenario"])): ModelTruth(
                    model=PlModel(e["model"]),
                    ple=float(e["ple"]),
                    offset_db=e.get("offset_db"),
                    sigma_db=float(e.get("sigma_db", 0.0)),
                )
                for e in data["entries"]
            }
        except (KeyError, ValueError) as exc:
            raise InvalidInput(f"bad truth entry: {exc}")
        kwargs = {}
        for name in (
            "corridor_length_m",
            "tx_height_m",
            "rx_height_m",
            "los_kf_db",
            "reflection_kf_db",
            "noise_power_db",
        ):
            if name in data:
                kwargs[name] = float(data[name])
        if "reflection_loss_db" in data:
            kwargs["reflection_loss_db"] = {
                float(k): float(v) for k, v in data["reflection_loss_db"].items()
            }
        if "probe" in data:
            kwargs["probe_kind"] = ProbeKind(data["probe"])
        return cls(entries=entries, **kwargs)


def save_truth(truth: SynthTruth, path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(truth.to_dict(), indent=2) + "\n")
    return path


def load_truth(path) -> SynthTruth:
    return SynthTruth.from_dict(json.loads(Path(path).read_text()))


def default_truth() -> SynthTruth:
    """Close-in truth models shaped like a measured indoor corridor."""
    ci = {
        (2.4, Scenario.LOS): (1.45, 3.05),
        (5.0, Scenario.LOS): (2.08, 3.59),
        (6.0, Scenario.LOS): (2.05, 2.39),
        (2.4, Scenario.NLOS): (2.83, 6.34),
        (5.0, Scenario.NLOS): (3.24, 6.91),
        (6.0, Scenario.NLOS): (3.37, 6.03),
    }
    entries = {
        key: ModelTruth(PlModel.CI, n, sigma_db=sigma) for key, (n, sigma) in ci.items()
    }
    return SynthTruth(entries=entries)


def _position_geometry(spec: PositionSpec, truth: SynthTruth) -> CorridorGeometry:
    if spec.tx_pos_m is not None:
        tx, rx = spec.tx_pos_m, spec.rx_pos_m
    else:
        dh = truth.tx_height_m - truth.rx_height_m
        if spec.distance_2d_m is not None:
            axial = spec.distance_2d_m
        elif spec.distance_3d_m is not None:
            if spec.distance_3d_m < abs(dh):
                raise InvalidInput(
                    f"{spec.position_id}: 3-D distance shorter than the height offset"
                )
            axial = math.sqrt(spec.distance_3d_m**2 - dh**2)
        else:
            raise InvalidInput(f"{spec.position_id}: no geometry to synthesize from")
        tx, rx = 0.0, axial
    return CorridorGeometry(
        tx_pos_m=tx,
        rx_pos_m=rx,
        length_m=truth.corridor_length_m,
        tx_height_m=truth.tx_height_m,
        rx_height_m=truth.rx_height_m,
        end_reflection_loss_db_per_band=truth.reflection_loss_db,
    )


def generate_campaign(manifest: CampaignManifest, truth: SynthTruth, seed: int, out_dir) -> Path:
    """Write a synthetic capture tree plus manifest and truth sidecar.

    Per (band, position), the two corridor taps are scaled by a common
    offset so that the expected measured power sum hits the truth
    model's path loss (plus the position's shadow-fading draw) through
    the link budget.  RNG streams are derived per (band, position) for
    shadow fading and per (band, position, rep) for fading and noise, so
    generation order cannot change the output.

    The sidecar records, per position and band, the expected profile
    power of every tap after snapshot averaging, the predicted noise
    floor and extraction threshold, and the delay spread / K factor that
    a perfect estimator would report for the visible taps.
    """
    if seed < 0:
        raise InvalidInput("seed must be non-negative")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    record_len = manifest.record_len
    bw = manifest.bandwidth_hz
    m_avg = manifest.snapshots_per_rep
    budget_db = manifest.link_budget.constant_db()
    th = manifest.thresholds
    probe = probe_waveform(record_len, truth.probe_kind, seed=0)
    probe_fft = np.fft.fft(probe)
    noise_var = 10.0 ** (truth.noise_power_db / 10.0)
    # record-level (post-averaging) noise variance per sample
    noise_var_rec = noise_var / m_avg
    floor_pred_db = (
        10.0 * math.log10(noise_var_rec / record_len)
        if noise_var_rec > 0
        else float("-inf")
    )

    truth_positions = []
    for bi, band in enumerate(manifest.bands_ghz):
        cal = ComplexRecord(
            probe,
            sample_rate_hz=bw,
            kind=RecordKind.CALIBRATION,
            center_frequency_hz=band * 1e9,
        )
        write_capture(out / calibration_filename(band), cal)
        for pi, spec in enumerate(manifest.positions):
            entry = truth.entry_for(band, spec.scenario)
            geom = _position_geometry(spec, truth)
            taps = corridor_taps(
                geom,
                band,
                entry.ple,
                los_kf_db=truth.los_kf_db,
                reflection_kf_db=truth.reflection_kf_db,
                noise_power_db=truth.noise_power_db,
            )
            d = spec.distance_m(manifest.distance_mode)
            sf = float(
                np.random.default_rng([seed, 1, bi, pi]).normal(0.0, entry.sigma_db)
            )
            pl_truth = entry.mean_pl_db(d, band)
            pl_target = pl_truth + sf

            bins, det_lin, dif_lin = _quantized_taps(taps, record_len, bw)
            expected_raw = float(np.sum(det_lin + dif_lin / m_avg))
            scale_db = (budget_db - pl_target) - 10.0 * math.log10(expected_raw)
            scale_lin = 10.0 ** (scale_db / 10.0)
            det_lin = det_lin * scale_lin
            dif_lin = dif_lin * scale_lin
            det_amp = np.sqrt(det_lin)

            for rep in range(1, manifest.reps_per_position + 1):
                rng = np.random.default_rng([seed, 2, bi, pi, rep])
                y = _realize(
                    bins, det_amp, dif_lin, noise_var, 1, record_len, probe_fft, rng, m_avg
                )[0]
                rec = ComplexRecord(
                    y,
                    sample_rate_hz=bw,
                    kind=RecordKind.MEASUREMENT,
                    center_frequency_hz=band * 1e9,
                )
                write_capture(out / capture_filename(spec.position_id, band, rep), rec)

            # what a perfect estimator would see
            expected_db = 10.0 * np.log10(det_lin + dif_lin / m_avg)
            threshold_pred = max(
                floor_pred_db + th.floor_margin_db,
                float(expected_db.max()) - th.peak_window_db,
            )
            visible = expected_db >= threshold_pred
            vis_w = (det_lin + dif_lin / m_avg)[visible]
            vis_t = bins[visible] / bw
            mean_t = float(np.sum(vis_w * vis_t) / np.sum(vis_w))
            ds_truth_s = math.sqrt(
                max(float(np.sum(vis_w * (vis_t - mean_t) ** 2) / np.sum(vis_w)), 0.0)
            )
            dom = int(np.argmax(det_lin))
            rest = (
                float(np.sum(det_lin) - det_lin[dom] + np.sum(dif_lin) / m_avg)
                + noise_var_rec
            )
            kf_truth_db = (
                10.0 * math.log10(det_lin[dom] / rest) if rest > 0 else float("inf")
            )

            truth_positions.append(
                {
                    "position_id": spec.position_id,
                    "band_ghz": band,
                    "scenario": spec.scenario.value,
                    "distance_m": d,
                    "pl_truth_db": pl_truth,
                    "sf_db": sf,
                    "pl_target_db": pl_target,
                    "scale_db": scale_db,
                    "taps": [
                        {
                            "delay_bin": int(b),
                            "delay_ns": float(b / bw * 1e9),
                            "expected_apdp_db": float(e),
                            "visible": bool(v),
                        }
                        for b, e, v in zip(bins, expected_db, visible)
                    ],
                    "noise_floor_pred_db": floor_pred_db,
                    "threshold_pred_db": threshold_pred,
                    "ds_truth_ns": ds_truth_s * 1e9,
                    "kf_truth_db": kf_truth_db,
                }
            )

    save_manifest(manifest, out / "manifest.json")
    doc = {
        "seed": seed,
        "reflection_convention": (
            "single bounce off the far end wall: path length is "
            "hypot(2*length - tx - rx, height offset)"
        ),
        "truth": truth.to_dict(),
        "positions": truth_positions,
    }
    (out / "truth.json").write_text(json.dumps(doc, indent=2) + "\n")
    return out
