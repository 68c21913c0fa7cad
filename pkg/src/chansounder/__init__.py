"""Channel-sounder measurement post-processing toolkit.

Turns raw complex baseband captures into channel parameters: impulse
responses via calibrated frequency-domain deconvolution, averaged power
delay profiles and multipath components, path-loss model fits, RMS
delay spreads, and Ricean K factors — plus a synthetic corridor channel
generator that serves as ground truth for all of it.
"""

from .apdp import (
    Apdp,
    MpcList,
    NoiseWindowSpec,
    average_apdp,
    estimate_noise_floor,
    extract_mpcs,
    snr_gate,
)
from .campaign import (
    CampaignManifest,
    DistanceMode,
    PositionReport,
    PositionSpec,
    PositionStatus,
    Thresholds,
    default_manifest,
    load_manifest,
    process_campaign,
    read_capture,
    run_pipeline,
    run_report,
    save_manifest,
    write_capture,
)
from .deconv import (
    Cir,
    ComplexRecord,
    FrequencyResponse,
    RecordKind,
    deconvolve,
    occupied_bins,
    to_cir,
    to_frequency_domain,
)
from .delayspread import DsResult, aggregate_ds, delay_spread, delay_spread_raw
from .errors import (
    AllSnapshotsRejected,
    ChanSounderError,
    DegenerateCalibration,
    DegenerateGeometry,
    EmptyMpcSet,
    FormatError,
    InsufficientSamples,
    InvalidInput,
    MissingCalibration,
)
from .kfactor import KfEstimate, NormalFit, estimate_kf, fit_normal, moments
from .pathloss import (
    LinkBudget,
    PlFit,
    PlModel,
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
from .synth import (
    CorridorGeometry,
    ModelTruth,
    ProbeKind,
    SynthTruth,
    Tap,
    TapSet,
    calibration_record,
    corridor_taps,
    default_truth,
    generate_campaign,
    generate_snapshots,
    load_truth,
    probe_waveform,
    save_truth,
)

__version__ = "0.1.0"

__all__ = [
    "Apdp",
    "MpcList",
    "NoiseWindowSpec",
    "average_apdp",
    "estimate_noise_floor",
    "extract_mpcs",
    "snr_gate",
    "CampaignManifest",
    "DistanceMode",
    "PositionReport",
    "PositionSpec",
    "PositionStatus",
    "Thresholds",
    "default_manifest",
    "load_manifest",
    "process_campaign",
    "read_capture",
    "run_pipeline",
    "run_report",
    "save_manifest",
    "write_capture",
    "Cir",
    "ComplexRecord",
    "FrequencyResponse",
    "RecordKind",
    "deconvolve",
    "occupied_bins",
    "to_cir",
    "to_frequency_domain",
    "DsResult",
    "aggregate_ds",
    "delay_spread",
    "delay_spread_raw",
    "AllSnapshotsRejected",
    "ChanSounderError",
    "DegenerateCalibration",
    "DegenerateGeometry",
    "EmptyMpcSet",
    "FormatError",
    "InsufficientSamples",
    "InvalidInput",
    "MissingCalibration",
    "KfEstimate",
    "NormalFit",
    "estimate_kf",
    "fit_normal",
    "moments",
    "LinkBudget",
    "PlFit",
    "PlModel",
    "PlSample",
    "Scenario",
    "eval_ci",
    "eval_fi",
    "eval_fspl",
    "fit_ci",
    "fit_fi",
    "path_loss",
    "received_power",
    "CorridorGeometry",
    "ModelTruth",
    "ProbeKind",
    "SynthTruth",
    "Tap",
    "TapSet",
    "calibration_record",
    "corridor_taps",
    "default_truth",
    "generate_campaign",
    "generate_snapshots",
    "load_truth",
    "probe_waveform",
    "save_truth",
    "__version__",
]
