"""Urban-macro link budget and per-sub-frame decodable-rate sampling.

Large-scale loss is the standard 128.1 + 37.6*log10(d_km) urban-macro
model with lognormal shadowing (10 dB sigma, one draw per (cell, UE) per
drop).  Fast fading is an optional per-(cell, PRB, UE, sub-frame)
Rayleigh-power perturbation in dB, which is what makes different PRBs of
the same cell look different to a user.  SNR maps to a decodable rate in
bits per PRB per sub-frame through a 15-step threshold table.

The carrier transmit power is split evenly over the carrier's PRBs (100
for a 20 MHz LTE carrier), independent of how many PRBs the allocator is
choosing among.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ChannelParams",
    "ChannelModel",
    "path_loss",
    "snr",
    "rate_from_snr",
    "default_rate_table",
    "load_rate_table",
    "save_rate_table",
    "DEFAULT_RATE_TABLE",
    "RATE_TABLE_VERSION",
]

log = logging.getLogger(__name__)

RATE_TABLE_VERSION = 1

# (min_snr_db, bits per PRB per sub-frame) steps.  Thresholds are the
# usual 15 CQI switching points; rates are truncated Shannon with a 0.6
# bandwidth-efficiency factor at 180 kHz * 1 ms, rounded to 0.1 bit.
# Frozen as version 1 so golden outputs stay pinned; regenerate with
# default_rate_table() only when bumping RATE_TABLE_VERSION.
DEFAULT_RATE_TABLE: tuple[tuple[float, float], ...] = (
    (-6.7, 30.2),
    (-4.7, 45.5),
    (-2.3, 72.1),
    (0.2, 111.6),
    (2.4, 156.9),
    (4.3, 203.5),
    (5.9, 247.3),
    (8.1, 313.0),
    (10.3, 383.4),
    (11.7, 430.0),
    (14.1, 511.8),
    (16.3, 588.4),
    (18.7, 673.0),
    (21.0, 754.6),
    (22.7, 815.2),
)

_CQI_THRESHOLDS_DB = tuple(t for t, _ in DEFAULT_RATE_TABLE)
_SHANNON_ALPHA = 0.6


@dataclass(frozen=True)
class ChannelParams:
    """Link-budget parameters (defaults: 20 MHz urban-macro downlink)."""

    tx_power_dbm: float = 46.0
    noise_density_dbm_hz: float = -174.0
    noise_figure_db: float = 5.0
    shadowing_sigma_db: float = 10.0
    bandwidth_hz: float = 20e6
    prb_bandwidth_hz: float = 180e3
    pathloss_intercept_db: float = 128.1
    pathloss_slope_db: float = 37.6
    carrier_prbs: int = 100        # PRBs sharing tx power on the carrier
    min_distance_km: float = 0.01  # clamp for the log-distance model
    fast_fading: bool = True
    subframe_s: float = 1e-3

    def __post_init__(self):
        if self.prb_bandwidth_hz <= 0:
            raise ValueError("prb_bandwidth_hz must be > 0")
        if self.shadowing_sigma_db < 0:
            raise ValueError("shadowing_sigma_db must be >= 0")
        for name in ("tx_power_dbm", "noise_density_dbm_hz", "noise_figure_db"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    @property
    def per_prb_tx_dbm(self) -> float:
        return self.tx_power_dbm - 10.0 * math.log10(self.carrier_prbs)

    @property
    def noise_floor_dbm(self) -> float:
        """Thermal noise plus receiver noise figure in one PRB."""
        return (
            self.noise_density_dbm_hz
            + 10.0 * math.log10(self.prb_bandwidth_hz)
            + self.noise_figure_db
        )


def path_loss(distance_km, params: ChannelParams | None = None):
    """Log-distance path loss in dB; distances below the clamp are lifted
    to it (the model diverges at zero range). Accepts scalars or arrays."""
    p = params or ChannelParams()
    d = np.asarray(distance_km, dtype=float)
    if np.any(d < p.min_distance_km):
        log.debug(
            "clamping %d distance(s) below %.4f km", int(np.sum(d < p.min_distance_km)),
            p.min_distance_km,
        )
        d = np.maximum(d, p.min_distance_km)
    pl = p.pathloss_intercept_db + p.pathloss_slope_db * np.log10(d)
    return float(pl) if np.isscalar(distance_km) else pl


def snr(params: ChannelParams, distance_km, shadow_db=0.0, fast_fade_db=0.0):
    """Per-PRB SNR in dB.  Positive shadow_db deepens the shadow (lowers
    SNR); fast_fade_db adds directly."""
    return (
        params.per_prb_tx_dbm
        - path_loss(distance_km, params)
        - shadow_db
        + fast_fade_db
        - params.noise_floor_dbm
    )


def rate_from_snr(snr_db, table: tuple[tuple[float, float], ...] | None = None):
    """Decodable rate for an SNR: 0 below the first step, then the highest
    step whose threshold is met, saturating at the top step.  Vectorized."""
    table = table or DEFAULT_RATE_TABLE
    thresholds = np.array([t for t, _ in table])
    rates = np.array([r for _, r in table])
    idx = np.searchsorted(thresholds, np.asarray(snr_db, dtype=float), side="right")
    out = np.where(idx > 0, rates[np.maximum(idx - 1, 0)], 0.0)
    return float(out) if np.isscalar(snr_db) else out


def default_rate_table(
    prb_bandwidth_hz: float = 180e3,
    subframe_s: float = 1e-3,
    margin_db: float = 0.0,
    alpha: float = _SHANNON_ALPHA,
) -> tuple[tuple[float, float], ...]:
    """Regenerate the truncated-Shannon step table for other PRB widths or
    implementation margins.  Rates rounded to 0.1 bit."""
    table = []
    for thr in _CQI_THRESHOLDS_DB:
        eff = alpha * math.log2(1.0 + 10.0 ** ((thr - margin_db) / 10.0))
        table.append((thr, round(eff * prb_bandwidth_hz * subframe_s, 1)))
    return tuple(table)


def load_rate_table(path) -> tuple[tuple[float, float], ...]:
    """Read a table file: lines of "min_snr_db  bits_per_prb_per_subframe",
    '#' comments ignored.  Both columns must be strictly increasing."""
    rows = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            toks = line.split()
            if len(toks) != 2:
                raise ValueError(f"{path}:{lineno}: expected two columns, got {line!r}")
            rows.append((float(toks[0]), float(toks[1])))
    _validate_table(rows, str(path))
    return tuple(rows)


def save_rate_table(path, table) -> None:
    with open(path, "w") as fh:
        fh.write(f"# snr-to-rate table v{RATE_TABLE_VERSION}\n")
        for thr, rate in table:
            fh.write(f"{thr} {rate}\n")


def _validate_table(rows, origin: str) -> None:
    if not rows:
        raise ValueError(f"{origin}: empty rate table")
    for (t0, r0), (t1, r1) in zip(rows, rows[1:]):
        if t1 <= t0 or r1 <= r0:
            raise ValueError(
                f"{origin}: table must be strictly increasing in both columns "
                f"(violated between {t0},{r0} and {t1},{r1})"
            )


class ChannelModel:
    """Samples per-sub-frame rate matrices for a fixed scenario.

    Distances are precomputed once; shadowing is drawn per drop via
    draw_shadowing and held fixed while sample_subframe is called per
    sub-frame.  All randomness comes from generators the caller passes
    in, so a fixed seed fixes the entire rate sequence.
    """

    def __init__(self, params: ChannelParams, scenario, num_prbs: int, table=None):
        self.params = params
        self.num_prbs = num_prbs
        self.table = tuple(table) if table is not None else DEFAULT_RATE_TABLE
        _validate_table(list(self.table), "rate table")
        # (C, M) distances in km, clamped once up front
        delta = scenario.cell_pos[:, None, :] - scenario.ue_pos[None, :, :]
        d_km = np.linalg.norm(delta, axis=2) / 1000.0
        self._pl_db = path_loss(d_km, params)
        self._thresholds = np.array([t for t, _ in self.table])
        self._rates = np.array([r for _, r in self.table])

    @property
    def num_cells(self) -> int:
        return self._pl_db.shape[0]

    @property
    def num_users(self) -> int:
        return self._pl_db.shape[1]

    def draw_shadowing(self, rng: np.random.Generator) -> np.ndarray:
        """One lognormal shadowing realization per (cell, UE), in dB."""
        return rng.normal(0.0, self.params.shadowing_sigma_db, size=self._pl_db.shape)

    def snr_subframe(self, shadow_db: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        """(C, N, M) SNR draw for one sub-frame."""
        p = self.params
        base = p.per_prb_tx_dbm - self._pl_db - shadow_db - p.noise_floor_dbm
        if p.fast_fading:
            power = rng.exponential(1.0, size=(self.num_cells, self.num_prbs, self.num_users))
            fade_db = 10.0 * np.log10(np.maximum(power, 1e-12))
        else:
            fade_db = 0.0
        return base[:, None, :] + fade_db

    def sample_subframe(self, shadow_db: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        """(C, N, M) decodable rates in bits per PRB per sub-frame."""
        snr_db = self.snr_subframe(shadow_db, rng)
        idx = np.searchsorted(self._thresholds, snr_db, side="right")
        return np.where(idx > 0, self._rates[np.maximum(idx - 1, 0)], 0.0)
