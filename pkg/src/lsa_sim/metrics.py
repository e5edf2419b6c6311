"""Per-frame measurement and CSV export.

Interference at the airplane is the pure linear sum of the LSA
transmitters (no noise term), aggregated over the whole LSA carrier.
Export uses shortest round-trip float formatting and LF line endings so
identical runs produce byte-identical files.
"""

from __future__ import annotations

import logging
import math
import os
from dataclasses import dataclass

import numpy as np

from . import channel
from .scenario import ScenarioConfig

log = logging.getLogger(__name__)

DEFAULT_SNAPSHOT_TIMES_S = (2.0, 8.0, 15.0, 25.0, 40.0)

INTERFERENCE_HEADER = "t_s,policy,interference_dbm"
ENERGY_HEADER = "t_s,policy,lsa_mw,licensed_mw"
UE_POWER_HEADER = "t_s,ue_id,x_m,y_m,band,tx_power_dbm,serving_cell,n_rb"
COMMANDS_HEADER = "issued_s,effective_s,cell_id,directive,cap_dbm"
AIRPLANE_HEADER = "t_s,x_m,y_m,z_m,speed_mps,telemetry_active"

CSV_FILES = ("interference.csv", "energy.csv", "ue_power.csv", "commands.csv", "airplane.csv")


@dataclass
class BandRecord:
    """Transmissions on one band during one frame (transmitting UEs only)."""

    ue_ids: np.ndarray
    tx_power_dbm: np.ndarray
    serving_cell: np.ndarray
    n_rb: np.ndarray
    serving_all: np.ndarray  # per-UE serving cell, -1 none


@dataclass
class FrameRecord:
    t_s: float
    epoch: int
    airplane_position: tuple[float, float, float]
    airplane_speed_mps: float
    telemetry_active: bool
    interference_dbm: float | None  # None: telemetry off; -inf: no transmitters
    lsa_mw: float
    licensed_mw: float
    lsa: BandRecord
    licensed: BandRecord


def air_gain_db(ue_positions: np.ndarray, airplane_position, cfg: ScenarioConfig) -> np.ndarray:
    """Free-space UE-to-airplane gains, one per row of ue_positions."""
    if len(ue_positions) == 0:
        return np.zeros(0)
    d = np.linalg.norm(
        np.asarray(ue_positions, dtype=float) - np.asarray(airplane_position, dtype=float)[None, :],
        axis=1,
    )
    return -channel.fspl_db(d, cfg.carrier_hz)


def interference_at_airplane_dbm(tx_power_dbm, gains_db) -> float:
    """Aggregate interference, 10log10 of the plain ordered linear sum.

    Accumulates left to right in the caller's (UE id) order so the value
    is reproducible term for term; returns -inf with no transmitters.
    """
    total = 0.0
    for p, g in zip(tx_power_dbm, gains_db):
        total += 10.0 ** ((float(p) + float(g)) / 10.0)
    if total == 0.0:
        return -math.inf
    return 10.0 * math.log10(total)


def radiated_power_mw(tx_power_dbm) -> float:
    """Total radiated power of a transmitter set, in mW."""
    total = 0.0
    for p in tx_power_dbm:
        total += 10.0 ** (float(p) / 10.0)
    return total


def fmt(value) -> str:
    """CSV field formatting: shortest round-trip floats, empty for missing."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isinf(v):
            return ""
        return repr(v)
    return str(value)


def _write_csv(path, header: str, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def export_run(result, out_dir, snapshot_times=DEFAULT_SNAPSHOT_TIMES_S) -> list[str]:
    """Write the full CSV set for one run; returns the file paths written.

    Snapshot times beyond the observation window are skipped with a
    warning.  Identical (config, seed, policy) runs produce byte-identical
    files.
    """
    os.makedirs(out_dir, exist_ok=True)
    records: list[FrameRecord] = result.frames
    policy = result.policy
    cfg: ScenarioConfig = result.cfg
    paths = []

    rows = []
    for rec in records:
        intf = rec.interference_dbm
        if intf is not None and intf == -math.inf:
            intf = None
        rows.append((fmt(rec.t_s), policy, fmt(intf)))
    path = os.path.join(out_dir, "interference.csv")
    _write_csv(path, INTERFERENCE_HEADER, rows)
    paths.append(path)

    rows = [
        (fmt(rec.t_s), policy, fmt(rec.lsa_mw), fmt(rec.licensed_mw)) for rec in records
    ]
    path = os.path.join(out_dir, "energy.csv")
    _write_csv(path, ENERGY_HEADER, rows)
    paths.append(path)

    rows = []
    frame_by_index = {round(rec.t_s / cfg.frame_s): rec for rec in records}
    for t_snap in snapshot_times:
        idx = round(t_snap / cfg.frame_s)
        rec = frame_by_index.get(idx)
        if rec is None:
            log.warning("snapshot %.3f s beyond the %d-frame run; omitted", t_snap, len(records))
            continue
        for band_name, band in (("lsa", rec.lsa), ("licensed", rec.licensed)):
            tx = {
                int(u): (float(p), int(m))
                for u, p, m in zip(band.ue_ids, band.tx_power_dbm, band.n_rb)
            }
            for ue in result.deployment.ues:
                serving = int(band.serving_all[ue.id])
                p, m = tx.get(ue.id, (None, 0))
                rows.append(
                    (
                        fmt(rec.t_s),
                        str(ue.id),
                        fmt(ue.position[0]),
                        fmt(ue.position[1]),
                        band_name,
                        fmt(p),
                        "" if serving < 0 else str(serving),
                        str(m),
                    )
                )
    path = os.path.join(out_dir, "ue_power.csv")
    _write_csv(path, UE_POWER_HEADER, rows)
    paths.append(path)

    rows = []
    for cmd in result.commands:
        rows.append(
            (
                fmt(cmd.issued_at_s),
                fmt(cmd.effective_at_s),
                str(cmd.cell_id),
                cmd.directive.value,
                fmt(cmd.cap_dbm),
            )
        )
    path = os.path.join(out_dir, "commands.csv")
    _write_csv(path, COMMANDS_HEADER, rows)
    paths.append(path)

    rows = []
    for rec in records:
        x, y, z = rec.airplane_position
        rows.append(
            (fmt(rec.t_s), fmt(x), fmt(y), fmt(z), fmt(rec.airplane_speed_mps), fmt(rec.telemetry_active))
        )
    path = os.path.join(out_dir, "airplane.csv")
    _write_csv(path, AIRPLANE_HEADER, rows)
    paths.append(path)

    return paths
