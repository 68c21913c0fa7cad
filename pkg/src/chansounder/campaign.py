"""Campaign file formats and the batch processing pipeline.

This module owns the on-disk contract of a measurement campaign: the
binary capture container, the JSON manifest describing positions,
bands, and processing thresholds, and the report files (per-position
CSV, MPC CSV, summary JSON, plot-data CSVs) produced by the pipeline.

Everything here is deterministic: processing the same capture tree with
the same manifest twice yields byte-identical reports.
"""

from __future__ import annotations

import csv
import json
import math
import struct
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np
from scipy import stats

from .apdp import (
    Apdp,
    MpcList,
    average_apdp,
    estimate_noise_floor,
    extract_mpcs,
    snr_gate,
)
from .deconv import (
    ComplexRecord,
    RecordKind,
    deconvolve,
    occupied_bins,
    to_cir,
    to_frequency_domain,
)
from .delayspread import DsResult, aggregate_ds, delay_spread
from .errors import (
    AllSnapshotsRejected,
    DegenerateGeometry,
    EmptyMpcSet,
    FormatError,
    InsufficientSamples,
    InvalidInput,
    MissingCalibration,
)
from .kfactor import estimate_kf, fit_normal
from .pathloss import (
    LinkBudget,
    PlSample,
    Scenario,
    eval_ci,
    eval_fi,
    eval_fspl,
    fit_ci,
    fit_fi,
    path_loss,
    received_power,
)

CAPTURE_MAGIC = b"CHSNDCAP"
CAPTURE_VERSION = 1
_HEADER = struct.Struct("<8sI4x")
_META = struct.Struct("<dIB3xd")

_KIND_CODES = {RecordKind.CALIBRATION: 0, RecordKind.MEASUREMENT: 1}
_KIND_FROM_CODE = {v: k for k, v in _KIND_CODES.items()}


# ---------------------------------------------------------------------------
# capture container

def write_capture(path, record: ComplexRecord) -> Path:
    """Write a record to the binary capture container.

    Layout: 16-byte header (magic, u32 version), then a little-endian
    metadata block (f64 sample_rate_hz, u32 record_len, u8 kind, f64
    band_ghz), then interleaved float32 I/Q pairs.  The payload is
    stored at single precision, so a round trip is bit-exact only for
    float32-representable samples.
    """
    path = Path(path)
    iq = record.samples.astype(np.complex64).view(np.float32)
    if iq.dtype.byteorder not in ("<", "="):  # big-endian hosts
        iq = iq.astype("<f4")
    with open(path, "wb") as f:
        f.write(_HEADER.pack(CAPTURE_MAGIC, CAPTURE_VERSION))
        f.write(
            _META.pack(
                record.sample_rate_hz,
                len(record),
                _KIND_CODES[record.kind],
                record.center_frequency_hz / 1e9,
            )
        )
        f.write(iq.tobytes())
    return path


def read_capture(path) -> ComplexRecord:
    """Read a capture container back into a record.

    Raises FormatError on a bad magic, an unsupported version, or a
    truncated/overlong file; truncation messages carry the byte offset
    where the file ended.
    """
    path = Path(path)
    with open(path, "rb") as f:
        raw = f.read()
    if len(raw) < _HEADER.size:
        raise FormatError(f"{path}: truncated header, file ends at byte {len(raw)}")
    magic, version = _HEADER.unpack_from(raw, 0)
    if magic != CAPTURE_MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}")
    if version != CAPTURE_VERSION:
        raise FormatError(f"{path}: unsupported capture version {version}")
    if len(raw) < _HEADER.size + _META.size:
        raise FormatError(f"{path}: truncated metadata, file ends at byte {len(raw)}")
    rate, n, kind_code, band_ghz = _META.unpack_from(raw, _HEADER.size)
    if kind_code not in _KIND_FROM_CODE:
        raise FormatError(f"{path}: unknown record kind code {kind_code}")
    start = _HEADER.size + _META.size
    expected = start + 8 * n
    if len(raw) < expected:
        raise FormatError(
            f"{path}: truncated payload, file ends at byte {len(raw)}, "
            f"expected {expected}"
        )
    if len(raw) > expected:
        raise FormatError(f"{path}: {len(raw) - expected} trailing bytes")
    iq = np.frombuffer(raw, dtype="<f4", count=2 * n, offset=start)
    samples = iq[0::2].astype(np.float64) + 1j * iq[1::2].astype(np.float64)
    return ComplexRecord(
        samples,
        sample_rate_hz=rate,
        kind=_KIND_FROM_CODE[kind_code],
        center_frequency_hz=band_ghz * 1e9,
    )


def _band_str(band_ghz: float) -> str:
    return f"{band_ghz:g}"


def calibration_filename(band_ghz: float) -> str:
    return f"cal_b{_band_str(band_ghz)}.capt"


def capture_filename(position_id: str, band_ghz: float, rep: int) -> str:
    return f"{position_id}_b{_band_str(band_ghz)}_r{rep:02d}.capt"


# ---------------------------------------------------------------------------
# manifest

class DistanceMode(Enum):
    """Which Tx-Rx separation the PL regression runs against.

    D2 is the horizontal separation, D3 the slant range including the
    antenna height offset.  The choice is mandatory per campaign; with a
    0.5 m height difference it matters below a few meters.
    """

    D2 = "D2"
    D3 = "D3"


@dataclass
class Thresholds:
    """Detection and regularization thresholds of the processing chain."""

    snr_gate_db: float = 25.0
    peak_window_db: float = 25.0
    floor_margin_db: float = 6.0
    deconv_floor_db: float = -40.0

    def __post_init__(self):
        if self.snr_gate_db < 0:
            raise InvalidInput("snr_gate_db must be non-negative")
        if self.peak_window_db <= 0:
            raise InvalidInput("peak_window_db must be positive")
        if self.floor_margin_db < 0:
            raise InvalidInput("floor_margin_db must be non-negative")
        if self.deconv_floor_db >= 0:
            # the floor is relative to the reference-spectrum peak; at 0 dB
            # it would discard every bin but the peak itself
            raise InvalidInput("deconv_floor_db must be negative")


@dataclass
class PositionSpec:
    """One measurement position: id, scenario, geometry."""

    position_id: str
    scenario: Scenario = Scenario.LOS
    tx_pos_m: float | None = None
    rx_pos_m: float | None = None
    distance_2d_m: float | None = None
    distance_3d_m: float | None = None

    def __post_init__(self):
        if not self.position_id:
            raise InvalidInput("position_id must be non-empty")
        if (self.tx_pos_m is None) != (self.rx_pos_m is None):
            raise InvalidInput(
                f"{self.position_id}: give both tx_pos_m and rx_pos_m or neither"
            )
        for name in ("distance_2d_m", "distance_3d_m"):
            v = getattr(self, name)
            if v is not None and not v > 0:
                raise InvalidInput(f"{self.position_id}: {name} must be positive")
        if self.tx_pos_m is not None and self.distance_2d_m is not None:
            axial = abs(self.rx_pos_m - self.tx_pos_m)
            if abs(axial - self.distance_2d_m) > 1e-6 * max(1.0, axial):
                raise InvalidInput(
                    f"{self.position_id}: distance_2d_m disagrees with coordinates"
                )
        if (
            self.distance_2d_m is not None
            and self.distance_3d_m is not None
            and self.distance_3d_m < self.distance_2d_m - 1e-9
        ):
            raise InvalidInput(
                f"{self.position_id}: 3-D distance shorter than 2-D distance"
            )

    def distance_m(self, mode: DistanceMode) -> float:
        if mode is DistanceMode.D2:
            if self.distance_2d_m is not None:
                return self.distance_2d_m
            if self.tx_pos_m is not None:
                return abs(self.rx_pos_m - self.tx_pos_m)
            raise InvalidInput(f"{self.position_id}: no 2-D distance available")
        if self.distance_3d_m is None:
            raise InvalidInput(
                f"{self.position_id}: 3-D distance mode needs an explicit "
                "distance_3d_m (heights are not part of the manifest)"
            )
        return self.distance_3d_m


@dataclass
class CampaignManifest:
    """Full description of a measurement campaign and how to process it."""

    positions: list[PositionSpec]
    distance_mode: DistanceMode
    bands_ghz: list[float] = field(default_factory=lambda: [2.4, 5.0, 6.0])
    bandwidth_hz: float = 320e6
    record_len: int = 4800
    reps_per_position: int = 5
    snapshots_per_rep: int = 400
    link_budget: LinkBudget = field(default_factory=LinkBudget)
    thresholds: Thresholds = field(default_factory=Thresholds)

    def __post_init__(self):
        if not self.positions:
            raise InvalidInput("manifest needs at least one position")
        ids = [p.position_id for p in self.positions]
        if len(set(ids)) != len(ids):
            raise InvalidInput("position ids must be unique")
        if not self.bands_ghz:
            raise InvalidInput("manifest needs at least one band")
        if len(set(self.bands_ghz)) != len(self.bands_ghz):
            raise InvalidInput("bands must be unique")
        if any(b <= 0 for b in self.bands_ghz):
            raise InvalidInput("bands must be positive (GHz)")
        if self.bandwidth_hz <= 0:
            raise InvalidInput("bandwidth_hz must be positive")
        if self.record_len < 2:
            raise InvalidInput("record_len must be at least 2")
        if self.reps_per_position < 1 or self.snapshots_per_rep < 1:
            raise InvalidInput("reps and snapshots per rep must be >= 1")
        for p in self.positions:
            p.distance_m(self.distance_mode)  # fail early on unresolvable rows

    def to_dict(self) -> dict:
        return {
            "bands_ghz": list(self.bands_ghz),
            "bandwidth_hz": self.bandwidth_hz,
            "record_len": self.record_len,
            "reps_per_position": self.reps_per_position,
            "snapshots_per_rep": self.snapshots_per_rep,
            "distance_mode": self.distance_mode.value,
            "link_budget": {
                "pt_dbm": self.link_budget.pt_dbm,
                "ptht_dbm": self.link_budget.ptht_dbm,
                "pthr_dbm": self.link_budget.pthr_dbm,
                "gt_dbi": self.link_budget.gt_dbi,
                "gr_dbi": self.link_budget.gr_dbi,
                "gatt_db": self.link_budget.gatt_db,
            },
            "thresholds": {
                "snr_gate_db": self.thresholds.snr_gate_db,
                "peak_window_db": self.thresholds.peak_window_db,
                "floor_margin_db": self.thresholds.floor_margin_db,
                "deconv_floor_db": self.thresholds.deconv_floor_db,
            },
            "positions": [
                {
                    "position_id": p.position_id,
                    "scenario": p.scenario.value,
                    "tx_pos_m": p.tx_pos_m,
                    "rx_pos_m": p.rx_pos_m,
                    "distance_2d_m": p.distance_2d_m,
                    "distance_3d_m": p.distance_3d_m,
                }
                for p in self.positions
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CampaignManifest":
        try:
            mode = DistanceMode(data["distance_mode"])
        except KeyError:
            raise InvalidInput("manifest is missing the mandatory distance_mode")
        except ValueError:
            raise InvalidInput(f"unknown distance_mode {data['distance_mode']!r}")
        try:
            positions = [
                PositionSpec(
                    position_id=p["position_id"],
                    scenario=Scenario(p.get("scenario", "LOS")),
                    tx_pos_m=p.get("tx_pos_m"),
                    rx_pos_m=p.get("rx_pos_m"),
                    distance_2d_m=p.get("distance_2d_m"),
                    distance_3d_m=p.get("distance_3d_m"),
                )
                for p in data.get("positions", [])
            ]
        except (KeyError, ValueError) as e:
            raise InvalidInput(f"bad position entry: {e}")
        try:
            budget = LinkBudget(**data.get("link_budget", {}))
            thresholds = Thresholds(**data.get("thresholds", {}))
        except TypeError as e:
            raise InvalidInput(f"bad link_budget or thresholds block: {e}")
        return cls(
            positions=positions,
            distance_mode=mode,
            bands_ghz=[float(b) for b in data.get("bands_ghz", [2.4, 5.0, 6.0])],
            bandwidth_hz=float(data.get("bandwidth_hz", 320e6)),
            record_len=int(data.get("record_len", 4800)),
            reps_per_position=int(data.get("reps_per_position", 5)),
            snapshots_per_rep=int(data.get("snapshots_per_rep", 400)),
            link_budget=budget,
            thresholds=thresholds,
        )


def save_manifest(manifest: CampaignManifest, path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(manifest.to_dict(), indent=2) + "\n")
    return path


def load_manifest(path) -> CampaignManifest:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise FormatError(f"{path}: not valid JSON ({e})")
    if not isinstance(data, dict):
        raise FormatError(f"{path}: manifest must be a JSON object")
    return CampaignManifest.from_dict(data)


def default_manifest(include_nlos: bool = False) -> CampaignManifest:
    """The reference corridor campaign: 37 positions, 3 bands, 5 reps.

    Receiver positions step 0.8 m apart up to position 21 and 1.6 m
    beyond, starting 1 m from the transmitter; antenna heights 1.95 m
    (Tx) and 1.45 m (Rx) put the slant range 0.5 m above the horizontal
    run at its closest.  ``include_nlos`` appends a mirrored NLOS list
    (positions 3-37) for around-the-corner campaigns.
    """
    dh = 1.95 - 1.45
    positions = []
    for i in range(1, 38):
        rx = 1.0 + 0.8 * (i - 1) if i <= 21 else 17.0 + 1.6 * (i - 21)
        positions.append(
            PositionSpec(
                position_id=f"P{i:02d}",
                scenario=Scenario.LOS,
                tx_pos_m=0.0,
                rx_pos_m=rx,
                distance_2d_m=rx,
                distance_3d_m=math.hypot(rx, dh),
            )
        )
    if include_nlos:
        for i in range(3, 38):
            rx = 1.0 + 0.8 * (i - 1) if i <= 21 else 17.0 + 1.6 * (i - 21)
            positions.append(
                PositionSpec(
                    position_id=f"N{i:02d}",
                    scenario=Scenario.NLOS,
                    tx_pos_m=0.0,
                    rx_pos_m=rx,
                    distance_2d_m=rx,
                    distance_3d_m=math.hypot(rx, dh),
                )
            )
    return CampaignManifest(positions=positions, distance_mode=DistanceMode.D3)


# ---------------------------------------------------------------------------
# pipeline

class PositionStatus(Enum):
    OK = "OK"
    ALL_SNAPSHOTS_REJECTED = "AllSnapshotsRejected"
    EMPTY_MPC_SET = "EmptyMpcSet"


@dataclass
class PositionReport:
    """Per-(position, band) pipeline outcome; metrics set only when OK."""

    position_id: str
    band_ghz: float
    scenario: Scenario
    status: PositionStatus
    distance_m: float
    pl_db: float | None = None
    ds_ns: float | None = None
    kf_db: float | None = None
    n_mpcs: int | None = None

    def __post_init__(self):
        metrics = (self.pl_db, self.ds_ns, self.kf_db, self.n_mpcs)
        if self.status is PositionStatus.OK:
            if any(m is None for m in metrics):
                raise InvalidInput("OK report must carry all metrics")
        elif any(m is not None for m in metrics):
            raise InvalidInput(f"{self.status.value} report must carry no metrics")


@dataclass(eq=False)
class ProcessResult:
    """A report row plus the intermediates the report files need."""

    report: PositionReport
    apdp: Apdp | None = None
    mpcs: MpcList | None = None
    ds: DsResult | None = None


def _process_one(
    manifest: CampaignManifest,
    root: Path,
    band: float,
    spec: PositionSpec,
    y_th,
    occupied: np.ndarray,
) -> ProcessResult:
    th = manifest.thresholds
    cirs = []
    spectra = []
    for rep in range(1, manifest.reps_per_position + 1):
        rec = read_capture(root / capture_filename(spec.position_id, band, rep))
        if len(rec) != manifest.record_len:
            raise InvalidInput(
                f"{spec.position_id} b{_band_str(band)} r{rep}: record length "
                f"{len(rec)} does not match manifest record_len {manifest.record_len}"
            )
        h = deconvolve(to_frequency_domain(rec), y_th, th.deconv_floor_db)
        cirs.append(to_cir(h))
        spectra.append(h.bins[occupied])

    distance = spec.distance_m(manifest.distance_mode)

    def rejected(status: PositionStatus) -> ProcessResult:
        return ProcessResult(
            PositionReport(
                position_id=spec.position_id,
                band_ghz=band,
                scenario=spec.scenario,
                status=status,
                distance_m=distance,
            )
        )

    try:
        kept = snr_gate(cirs, th.snr_gate_db)
    except AllSnapshotsRejected:
        return rejected(PositionStatus.ALL_SNAPSHOTS_REJECTED)
    kept_ids = {id(c) for c in kept}
    kept_spectra = [s for c, s in zip(cirs, spectra) if id(c) in kept_ids]

    apdp = average_apdp(kept)
    estimate_noise_floor(apdp)
    try:
        mpcs = extract_mpcs(apdp, th.floor_margin_db, th.peak_window_db)
    except EmptyMpcSet:
        return rejected(PositionStatus.EMPTY_MPC_SET)

    pl = path_loss(received_power(mpcs), manifest.link_budget)
    ds = delay_spread(mpcs)
    kf = estimate_kf(np.concatenate(kept_spectra))
    report = PositionReport(
        position_id=spec.position_id,
        band_ghz=band,
        scenario=spec.scenario,
        status=PositionStatus.OK,
        distance_m=distance,
        pl_db=pl,
        ds_ns=ds.rms_ds_s * 1e9,
        kf_db=kf.k_db,
        n_mpcs=len(mpcs),
    )
    return ProcessResult(report, apdp=apdp, mpcs=mpcs, ds=ds)


def process_campaign(manifest: CampaignManifest, capture_root) -> list[ProcessResult]:
    """Run the per-position chain over every (band, position) pair.

    Band-major order; each band's calibration capture is deconvolved
    against every measurement of that band.  Per-position failures
    (gate rejection, no components) become status flags, not errors.
    """
    root = Path(capture_root)
    results = []
    for band in manifest.bands_ghz:
        cal_path = root / calibration_filename(band)
        if not cal_path.exists():
            raise MissingCalibration(
                f"no calibration capture for band {_band_str(band)} GHz at {cal_path}"
            )
        cal = read_capture(cal_path)
        if cal.kind is not RecordKind.CALIBRATION:
            raise InvalidInput(f"{cal_path} is not a calibration record")
        if len(cal) != manifest.record_len:
            raise InvalidInput(
                f"{cal_path}: record length {len(cal)} does not match manifest"
            )
        y_th = to_frequency_domain(cal)
        occupied = occupied_bins(y_th, manifest.thresholds.deconv_floor_db)
        for spec in manifest.positions:
            results.append(_process_one(manifest, root, band, spec, y_th, occupied))
    return results


# ---------------------------------------------------------------------------
# report files

def _fmt(value, spec_str: str) -> str:
    return "" if value is None else format(value, spec_str)


def _write_position_csv(results: list[ProcessResult], path: Path) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(
            [
                "position_id",
                "band_ghz",
                "scenario",
                "status",
                "distance_m",
                "pl_db",
                "ds_ns",
                "kf_db",
                "n_mpcs",
            ]
        )
        for r in results:
            rep = r.report
            w.writerow(
                [
                    rep.position_id,
                    _band_str(rep.band_ghz),
                    rep.scenario.value,
                    rep.status.value,
                    f"{rep.distance_m:.3f}",
                    _fmt(rep.pl_db, ".2f"),
                    _fmt(rep.ds_ns, ".2f"),
                    _fmt(rep.kf_db, ".2f"),
                    "" if rep.n_mpcs is None else str(rep.n_mpcs),
                ]
            )


def _write_mpc_csv(results: list[ProcessResult], path: Path) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["position_id", "band_ghz", "delay_ns", "power_db"])
        for r in results:
            if r.mpcs is None:
                continue
            for delay_s, power_db in r.mpcs.components:
                w.writerow(
                    [
                        r.report.position_id,
                        _band_str(r.report.band_ghz),
                        f"{delay_s * 1e9:.3f}",
                        f"{power_db:.2f}",
                    ]
                )


def _r2(x: float) -> float:
    return round(float(x), 2)


def _group_samples(results: list[ProcessResult]) -> dict:
    by_group: dict[tuple[float, Scenario], list[PlSample]] = {}
    for r in results:
        rep = r.report
        key = (rep.band_ghz, rep.scenario)
        by_group.setdefault(key, [])
        if rep.status is PositionStatus.OK:
            by_group[key].append(
                PlSample(
                    position_id=rep.position_id,
                    distance_m=rep.distance_m,
                    frequency_ghz=rep.band_ghz,
                    pl_db=rep.pl_db,
                    scenario=rep.scenario,
                )
            )
    return by_group


def fit_models(samples_by_group: dict) -> dict:
    """CI and FI fits per (band, scenario), errors recorded in place."""
    out: dict = {}
    for (band, scenario), samples in samples_by_group.items():
        block = {}
        for name, fitter in (("ci", fit_ci), ("fi", fit_fi)):
            try:
                fit = fitter(samples)
            except (InvalidInput, DegenerateGeometry, InsufficientSamples) as e:
                block[name] = {"error": f"{type(e).__name__}: {e}"}
                continue
            entry = {
                "ple": _r2(fit.ple),
                "sigma_db": _r2(fit.sigma_db),
                "n_samples": fit.n_samples,
            }
            if fit.offset_db is not None:
                entry["offset_db"] = _r2(fit.offset_db)
            block[name] = entry
        out.setdefault(_band_str(band), {})[scenario.value] = block
    return out


def _ds_summary(results: list[ProcessResult]) -> dict:
    groups: dict[tuple[float, Scenario], list[DsResult]] = {}
    for r in results:
        key = (r.report.band_ghz, r.report.scenario)
        groups.setdefault(key, [])
        if r.ds is not None:
            groups[key].append(r.ds)
    out: dict = {}
    for (band, scenario), ds_list in groups.items():
        if ds_list:
            mean_ns, std_ns = aggregate_ds(ds_list)
            entry = {"mean_ns": _r2(mean_ns), "std_ns": _r2(std_ns), "n": len(ds_list)}
        else:
            entry = {"error": "no usable positions"}
        out.setdefault(_band_str(band), {})[scenario.value] = entry
    return out


def _kf_summary(results: list[ProcessResult]) -> dict:
    # the default report fits KF statistics for the line-of-sight rows only
    by_band: dict[float, list[float]] = {}
    for r in results:
        if r.report.scenario is not Scenario.LOS:
            continue
        by_band.setdefault(r.report.band_ghz, [])
        if r.report.status is PositionStatus.OK:
            by_band[r.report.band_ghz].append(r.report.kf_db)
    out = {}
    for band, values in by_band.items():
        try:
            fit = fit_normal(values)
        except InsufficientSamples as e:
            out[_band_str(band)] = {"error": f"InsufficientSamples: {e}"}
            continue
        finite = sorted(v for v in values if np.isfinite(v))
        n = len(finite)
        fitted = (
            stats.norm.cdf(finite, loc=fit.mu, scale=fit.sigma)
            if fit.sigma > 0
            else np.where(np.asarray(finite) >= fit.mu, 1.0, 0.0)
        )
        out[_band_str(band)] = {
            "scenario": "LOS",
            "mu": _r2(fit.mu),
            "sigma": _r2(fit.sigma),
            "n_samples": fit.n_samples,
            "n_excluded": fit.n_excluded,
            "cdf_max_dev": round(fit.cdf_max_dev, 4),
            "cdf": [
                [_r2(v), round((i + 1) / n, 4), round(float(c), 4)]
                for i, (v, c) in enumerate(zip(finite, fitted))
            ],
        }
    return out


def _write_summary_json(
    manifest: CampaignManifest, results: list[ProcessResult], path: Path
) -> None:
    counts = {s.value: 0 for s in PositionStatus}
    for r in results:
        counts[r.report.status.value] += 1
    summary = {
        "manifest": manifest.to_dict(),
        "status_counts": counts,
        "path_loss_fits": fit_models(_group_samples(results)),
        "delay_spread_ns": _ds_summary(results),
        "k_factor_db": _kf_summary(results),
    }
    path.write_text(json.dumps(summary, indent=2) + "\n")


def _write_plot_data(
    manifest: CampaignManifest, results: list[ProcessResult], out_dir: Path
) -> list[Path]:
    paths = []
    fits = fit_models(_group_samples(results))
    for band in manifest.bands_ghz:
        band_key = _band_str(band)
        band_results = [r for r in results if r.report.band_ghz == band]

        heat = out_dir / f"apdp_heatmap_b{band_key}.csv"
        with open(heat, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["position_id", "delay_ns", "power_db"])
            for r in band_results:
                if r.apdp is None:
                    continue
                delays_ns = r.apdp.delays_s * 1e9
                for d, p in zip(delays_ns, r.apdp.power_db):
                    w.writerow([r.report.position_id, f"{d:.3f}", f"{p:.2f}"])
        paths.append(heat)

        scatter = out_dir / f"pl_scatter_b{band_key}.csv"
        with open(scatter, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(
                [
                    "position_id",
                    "scenario",
                    "distance_m",
                    "pl_db",
                    "fspl_db",
                    "ci_fit_db",
                    "fi_fit_db",
                ]
            )
            for r in band_results:
                rep = r.report
                if rep.status is not PositionStatus.OK:
                    continue
                block = fits.get(band_key, {}).get(rep.scenario.value, {})
                ci = block.get("ci", {})
                fi = block.get("fi", {})
                ci_db = (
                    f"{eval_ci(rep.distance_m, band, ci['ple']):.2f}"
                    if "ple" in ci
                    else ""
                )
                fi_db = (
                    f"{eval_fi(rep.distance_m, fi['ple'], fi['offset_db']):.2f}"
                    if "ple" in fi
                    else ""
                )
                w.writerow(
                    [
                        rep.position_id,
                        rep.scenario.value,
                        f"{rep.distance_m:.3f}",
                        f"{rep.pl_db:.2f}",
                        f"{eval_fspl(rep.distance_m, band):.2f}",
                        ci_db,
                        fi_db,
                    ]
                )
        paths.append(scatter)

        kf_path = out_dir / f"kf_cdf_b{band_key}.csv"
        values = sorted(
            r.report.kf_db
            for r in band_results
            if r.report.scenario is Scenario.LOS
            and r.report.status is PositionStatus.OK
            and np.isfinite(r.report.kf_db)
        )
        with open(kf_path, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["kf_db", "empirical_cdf", "fitted_cdf"])
            if len(values) >= 2:
                mu = float(np.mean(values))
                sigma = float(np.std(values))
                n = len(values)
                for i, v in enumerate(values):
                    fitted = (
                        stats.norm.cdf(v, loc=mu, scale=sigma)
                        if sigma > 0
                        else float(v >= mu)
                    )
                    w.writerow(
                        [f"{v:.2f}", f"{(i + 1) / n:.4f}", f"{float(fitted):.4f}"]
                    )
        paths.append(kf_path)
    return paths


def run_pipeline(manifest: CampaignManifest, capture_root, out_dir=None):
    """Process a capture tree into the position CSV and summary JSON.

    Returns (position_csv_path, summary_json_path); an MPC CSV is
    written alongside them.
    """
    out = Path(out_dir) if out_dir is not None else Path(capture_root) / "reports"
    out.mkdir(parents=True, exist_ok=True)
    results = process_campaign(manifest, capture_root)
    csv_path = out / "positions.csv"
    _write_position_csv(results, csv_path)
    _write_mpc_csv(results, out / "mpcs.csv")
    summary_path = out / "summary.json"
    _write_summary_json(manifest, results, summary_path)
    return csv_path, summary_path


def run_report(manifest: CampaignManifest, capture_root, out_dir=None) -> list[Path]:
    """Full report: pipeline outputs plus per-band plot-data CSVs."""
    out = Path(out_dir) if out_dir is not None else Path(capture_root) / "reports"
    out.mkdir(parents=True, exist_ok=True)
    results = process_campaign(manifest, capture_root)
    paths = [out / "positions.csv", out / "mpcs.csv", out / "summary.json"]
    _write_position_csv(results, paths[0])
    _write_mpc_csv(results, paths[1])
    _write_summary_json(manifest, results, paths[2])
    paths.extend(_write_plot_data(manifest, results, out))
    return paths


# ---------------------------------------------------------------------------
# standalone fit stage

def read_pl_samples(csv_path) -> list[PlSample]:
    """Parse PL samples from a position CSV.

    Needs columns position_id, scenario, band_ghz, distance_m, pl_db;
    rows whose status column (if present) is not OK are skipped.
    """
    path = Path(csv_path)
    samples = []
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        required = {"position_id", "scenario", "band_ghz", "distance_m", "pl_db"}
        missing = required - set(reader.fieldnames or [])
        if missing:
            raise FormatError(f"{path}: missing columns {sorted(missing)}")
        for i, row in enumerate(reader, start=2):
            if row.get("status") not in (None, "", PositionStatus.OK.value):
                continue
            try:
                samples.append(
                    PlSample(
                        position_id=row["position_id"],
                        distance_m=float(row["distance_m"]),
                        frequency_ghz=float(row["band_ghz"]),
                        pl_db=float(row["pl_db"]),
                        scenario=Scenario(row["scenario"]),
                    )
                )
            except (ValueError, InvalidInput) as e:
                raise FormatError(f"{path}:{i}: bad sample row ({e})")
    if not samples:
        raise InvalidInput(f"{path}: no usable PL samples")
    return samples


def fit_samples_to_json(samples: list[PlSample], out_path) -> Path:
    """Group samples by (band, scenario), fit both models, write JSON."""
    groups: dict[tuple[float, Scenario], list[PlSample]] = {}
    for s in samples:
        groups.setdefault((s.frequency_ghz, s.scenario), []).append(s)
    ordered = dict(sorted(groups.items(), key=lambda kv: (kv[0][0], kv[0][1].value)))
    out_path = Path(out_path)
    out_path.write_text(json.dumps(fit_models(ordered), indent=2) + "\n")
    return out_path
