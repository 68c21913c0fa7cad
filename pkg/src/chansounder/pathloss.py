"""Received power, link-budget path loss, and PL model evaluation/fitting.

Three models are supported: the close-in free-space-reference model (one
parameter, the path loss exponent n, anchored at 1 m), the
floating-intercept model (slope alpha and offset beta, ordinary least
squares), and the free-space baseline (n = 2).  Frequencies are in GHz
and distances in meters, as forced by the 32.4 dB 1 m intercept.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .apdp import MpcList
from .errors import DegenerateGeometry, EmptyMpcSet, InvalidInput

FSPL_1M_1GHZ_DB = 32.4


class Scenario(Enum):
    LOS = "LOS"
    NLOS = "NLOS"


class PlModel(Enum):
    CI = "CI"
    FI = "FI"


@dataclass
class LinkBudget:
    """Link-budget constants entering the path-loss equation.

    ``ptht_dbm``/``pthr_dbm`` are the transmit/received powers of the
    back-to-back calibration and ``gatt_db`` the attenuator inserted for
    it; together they remove the calibration's own loss from the budget.
    """

    pt_dbm: float = 20.0
    ptht_dbm: float = 20.0
    pthr_dbm: float = -10.0
    gt_dbi: float = 2.0
    gr_dbi: float = 2.0
    gatt_db: float = 30.0

    def constant_db(self) -> float:
        """Sum of all budget terms except the received power."""
        return (
            self.pt_dbm
            + self.gt_dbi
            + self.gr_dbi
            + self.pthr_dbm
            - self.ptht_dbm
            + self.gatt_db
        )


@dataclass
class PlSample:
    """One position's measured path loss."""

    position_id: str
    distance_m: float
    frequency_ghz: float
    pl_db: float
    scenario: Scenario = Scenario.LOS

    def __post_init__(self):
        if not self.distance_m > 0:
            raise InvalidInput("distance_m must be positive")
        if not np.isfinite(self.pl_db):
            raise InvalidInput("pl_db must be finite")


@dataclass
class PlFit:
    """Fitted PL model parameters and shadow-fading spread.

    ``ple`` is n for the CI model and alpha for the FI model;
    ``offset_db`` (beta) is set for FI only.  ``sigma_db`` is the
    population standard deviation of the dB residuals, so a noiseless
    fit reports exactly zero.
    """

    model: PlModel
    ple: float
    sigma_db: float
    n_samples: int
    offset_db: float | None = None

    def __post_init__(self):
        if self.model is PlModel.FI and self.offset_db is None:
            raise InvalidInput("FI fit requires offset_db")
        if self.model is PlModel.CI and self.offset_db is not None:
            raise InvalidInput("CI fit has no offset_db")
        if self.sigma_db < 0:
            raise InvalidInput("sigma_db must be non-negative")

    def evaluate(self, d_m, f_ghz: float | None = None):
        if self.model is PlModel.CI:
            if f_ghz is None:
                raise InvalidInput("CI evaluation needs the frequency")
            return eval_ci(d_m, f_ghz, self.ple)
        return eval_fi(d_m, self.ple, self.offset_db)


def received_power(mpcs: MpcList) -> float:
    """Total received power: the linear sum of all MPC powers, in dB."""
    if len(mpcs) == 0:
        raise EmptyMpcSet("no multipath components to sum")
    return float(10.0 * np.log10(np.sum(10.0 ** (mpcs.powers_db / 10.0))))


def path_loss(pr_db: float, budget: LinkBudget) -> float:
    """Path loss from received power and the link budget (all dB)."""
    return -pr_db + budget.constant_db()


def eval_ci(d_m, f_ghz, n):
    """Close-in model: 32.4 + 20 log10(f_GHz) + 10 n log10(d_m)."""
    d_m = np.asarray(d_m, dtype=np.float64)
    f_ghz = np.asarray(f_ghz, dtype=np.float64)
    if np.any(d_m <= 0) or np.any(f_ghz <= 0):
        raise InvalidInput("distance and frequency must be positive")
    out = FSPL_1M_1GHZ_DB + 20.0 * np.log10(f_ghz) + 10.0 * n * np.log10(d_m)
    return float(out) if out.ndim == 0 else out


def eval_fi(d_m, alpha, beta_db):
    """Floating-intercept model: 10 alpha log10(d_m) + beta."""
    d_m = np.asarray(d_m, dtype=np.float64)
    if np.any(d_m <= 0):
        raise InvalidInput("distance must be positive")
    out = 10.0 * alpha * np.log10(d_m) + beta_db
    return float(out) if out.ndim == 0 else out


def eval_fspl(d_m, f_ghz):
    """Free-space path loss, the n = 2 baseline of the close-in model."""
    return eval_ci(d_m, f_ghz, 2.0)


def _check_fit_inputs(samples: list[PlSample]) -> tuple[np.ndarray, np.ndarray]:
    if len(samples) < 2:
        raise InvalidInput("need at least two samples to fit")
    d = np.array([s.distance_m for s in samples])
    pl = np.array([s.pl_db for s in samples])
    if np.all(d == d[0]):
        raise DegenerateGeometry("all samples at the same distance")
    return d, pl


def fit_ci(samples: list[PlSample]) -> PlFit:
    """Least-squares path loss exponent with the intercept pinned at 1 m.

    With the free-space 1 m intercept removed, the model is linear through
    the origin in 10 log10(d), so n has the closed form
    sum(A B) / sum(B^2) with A the de-intercepted losses and B the
    log-distances.
    """
    d, pl = _check_fit_inputs(samples)
    f = samples[0].frequency_ghz
    if any(s.frequency_ghz != f for s in samples):
        raise InvalidInput("CI fit mixes frequency bands")
    a = pl - FSPL_1M_1GHZ_DB - 20.0 * np.log10(f)
    b = 10.0 * np.log10(d)
    denom = np.sum(b * b)
    if denom == 0.0:
        raise DegenerateGeometry("all samples at the 1 m reference distance")
    n = float(np.sum(a * b) / denom)
    resid = pl - eval_ci(d, f, n)
    return PlFit(
        model=PlModel.CI,
        ple=n,
        sigma_db=float(np.std(resid)),
        n_samples=len(samples),
    )


def fit_fi(samples: list[PlSample]) -> PlFit:
    """Ordinary least squares of path loss against 10 log10(distance)."""
    d, pl = _check_fit_inputs(samples)
    b = 10.0 * np.log10(d)
    alpha, beta = np.polyfit(b, pl, 1)
    resid = pl - (alpha * b + beta)
    return PlFit(
        model=PlModel.FI,
        ple=float(alpha),
        offset_db=float(beta),
        sigma_db=float(np.std(resid)),
        n_samples=len(samples),
    )
