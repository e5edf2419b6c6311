"""Propagation and link-budget math.

Ground links (UE to BS) use the ITU/3GPP Urban Micro NLOS formula with
frozen lognormal shadowing; air-ground links are pure free space.  All
functions are stateless and deterministic, so gains can be evaluated in
any order (shadowing is generated by a counter-based generator keyed on
the link identity, never by a shared stream).
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from enum import Enum

import numpy as np

# 20*log10(4*pi/c) for d in metres and f in Hz
FSPL_CONST_DB = -147.55
FSPL_MIN_DISTANCE_M = 1.0

# Validity bounds of the UMi NLOS fit; distances outside are clamped.
UMI_MIN_DISTANCE_M = 10.0
UMI_MAX_DISTANCE_M = 5000.0

# Diagnostic tallies of clamped model inputs (not part of any result).
clamp_warnings: Counter = Counter()


class LinkKind(str, Enum):
    UE_TO_BS = "ue_to_bs"
    UE_TO_AIRPLANE = "ue_to_airplane"
    BS_TO_AIRPLANE = "bs_to_airplane"


@dataclass(frozen=True)
class LinkGain:
    """Total link gain in dB (negative of loss, antenna terms included)."""

    gain_db: float
    kind: LinkKind


def fspl_db(d_m, f_hz):
    """Free-space path loss, 20*log10(d) + 20*log10(f) - 147.55.

    Distances below 1 m are clamped to 1 m (counted in ``clamp_warnings``).
    Accepts scalars or numpy arrays.
    """
    if np.any(np.asarray(f_hz) <= 0):
        raise ValueError("f_hz must be > 0")
    d = np.asarray(d_m, dtype=float)
    n_clamped = int(np.count_nonzero(d < FSPL_MIN_DISTANCE_M))
    if n_clamped:
        clamp_warnings["fspl_short_distance"] += n_clamped
        d = np.maximum(d, FSPL_MIN_DISTANCE_M)
    out = 20.0 * np.log10(d) + 20.0 * np.log10(f_hz) + FSPL_CONST_DB
    return float(out) if np.isscalar(d_m) else out


def umi_pathloss_db(d_m, f_ghz):
    """ITU UMi NLOS path loss: 36.7*log10(d) + 22.7 + 26*log10(f_ghz).

    Valid for 10 m <= d <= 5 km; out-of-range distances are clamped to the
    bounds (counted in ``clamp_warnings``), never extrapolated.
    """
    d = np.asarray(d_m, dtype=float)
    n_out = int(np.count_nonzero((d < UMI_MIN_DISTANCE_M) | (d > UMI_MAX_DISTANCE_M)))
    if n_out:
        clamp_warnings["umi_out_of_range"] += n_out
        d = np.clip(d, UMI_MIN_DISTANCE_M, UMI_MAX_DISTANCE_M)
    out = 36.7 * np.log10(d) + 22.7 + 26.0 * np.log10(f_ghz)
    return float(out) if np.isscalar(d_m) else out


def _link_key(link_id) -> int:
    """Pack a link identity into one uint64 Philox key word."""
    if isinstance(link_id, (int, np.integer)):
        return int(link_id) & 0xFFFFFFFFFFFFFFFF
    a, b = link_id
    return ((int(a) & 0xFFFFFFFF) << 32 | (int(b) & 0xFFFFFFFF)) & 0xFFFFFFFFFFFFFFFF


def shadow_db(link_id, seed: int, sigma_db: float) -> float:
    """Frozen lognormal shadowing sample for one link, in dB.

    Zero-mean Gaussian with the given sigma, drawn from a Philox
    counter-based generator keyed on (seed, link_id), so the value is
    constant for the whole run and independent of evaluation order.
    """
    if sigma_db == 0.0:
        return 0.0
    key = np.array([seed & 0xFFFFFFFFFFFFFFFF, _link_key(link_id)], dtype=np.uint64)
    gen = np.random.Generator(np.random.Philox(key=key))
    return float(gen.normal(0.0, sigma_db))


def _distance(a, b) -> float:
    return math.dist(tuple(a), tuple(b))


def link_gain(tx_pos, rx_pos, kind: LinkKind, link_id, cfg, seed: int) -> LinkGain:
    """Total gain for one link per the scenario's channel model.

    ue_to_bs:       -UMi(d) - shadowing
    ue_to_airplane: -FSPL(d)                      (isotropic UE, no shadowing)
    bs_to_airplane: -FSPL(d) - |antenna leakage| - sidelobe isolation
    """
    kind = LinkKind(kind)
    d = _distance(tx_pos, rx_pos)
    if kind is LinkKind.UE_TO_BS:
        gain = -umi_pathloss_db(d, cfg.carrier_hz / 1e9)
        gain -= shadow_db(link_id, seed, cfg.shadow_sigma_db)
    elif kind is LinkKind.UE_TO_AIRPLANE:
        gain = -fspl_db(d, cfg.carrier_hz)
    else:
        gain = (
            -fspl_db(d, cfg.carrier_hz)
            - abs(cfg.bs_antenna_leakage_db)
            - cfg.bs_sidelobe_isolation_db
        )
    return LinkGain(gain_db=gain, kind=kind)
