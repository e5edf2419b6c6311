"""Per-frame radio access: association, uplink power control, PF scheduling.

One frame is 10 ms by default.  Each frame every UE re-associates to the
strongest enabled cell per band (no hysteresis, lowest cell id on ties),
each cell hands its whole RB budget to the UE with the best
proportional-fair metric, and transmit powers follow LTE open-loop
fractional power control clamped by the policy cap in force.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import channel
from .lsa_control import CellControl, Directive
from .scenario import Deployment, ScenarioConfig

RB_BANDWIDTH_HZ = 180e3
THERMAL_NOISE_DBM_HZ = -174.0
# per-RB thermal noise, -174 + 10log10(180 kHz) = -121.45 dBm
NOISE_PER_RB_DBM = THERMAL_NOISE_DBM_HZ + 10.0 * math.log10(RB_BANDWIDTH_HZ)
BS_NOISE_FIGURE_DB = 5.0
SPECTRAL_EFFICIENCY_CAP = 6.0  # bps/Hz

PF_BETA = 0.01
PF_EPSILON_BPS = 1.0

LSA = "lsa"
LICENSED = "licensed"
BANDS = (LSA, LICENSED)


@dataclass
class Allocation:
    """Per-cell, per-band RB grant for one frame."""

    frame_index: int
    cell_id: int
    band: str
    grants: dict[int, tuple[int, float]] = field(default_factory=dict)  # ue -> (n_rb, dBm)

    def total_rbs(self) -> int:
        return sum(m for m, _ in self.grants.values())


def sinr_target_db(cfg: ScenarioConfig, band: str) -> float:
    return cfg.sinr_target_lsa_db if band == LSA else cfg.sinr_target_licensed_db


def band_rb_budget(cfg: ScenarioConfig, band: str) -> int:
    return cfg.n_rb_lsa if band == LSA else cfg.n_rb_licensed


def associate_all(gain_db: np.ndarray, enabled: np.ndarray) -> np.ndarray:
    """Best-server association for every UE at once.

    gain_db is (n_ue, n_cell); enabled masks selectable cells.  Returns the
    serving cell id per UE, -1 where no cell is enabled.  Ties go to the
    lowest cell id (argmax picks the first maximum).
    """
    n_ue = gain_db.shape[0]
    if not enabled.any():
        return np.full(n_ue, -1, dtype=np.int64)
    masked = np.where(enabled[None, :], gain_db, -np.inf)
    return np.argmax(masked, axis=1)


def associate(ue_index: int, gain_db: np.ndarray, enabled: np.ndarray) -> int | None:
    """Serving cell for one UE (None when no cell has the band enabled)."""
    if not enabled.any():
        return None
    row = np.where(enabled, gain_db[ue_index], -np.inf)
    return int(np.argmax(row))


def uplink_power_dbm(
    pl_db: float,
    band_target_db: float,
    m_rb: int,
    cap_dbm: float,
    cfg: ScenarioConfig,
) -> float | None:
    """Open-loop power P0 + 10log10(M) + alpha*PL, clamped to limits and cap.

    P0 = SINR target + per-RB thermal noise.  Returns None when the cap
    sits below the minimum UE power: the UE is barred from the band for
    this frame rather than transmitting.
    """
    if m_rb < 1:
        raise ValueError("m_rb must be >= 1")
    if cap_dbm < cfg.min_ue_power_dbm:
        return None
    p0 = band_target_db + NOISE_PER_RB_DBM
    p = p0 + 10.0 * math.log10(m_rb) + cfg.pc_alpha * pl_db
    return min(max(p, cfg.min_ue_power_dbm), min(cfg.max_ue_power_dbm, cap_dbm))


def rate_estimate_per_rb(
    pl_db: np.ndarray, band_target_db: float, cap_dbm: np.ndarray, cfg: ScenarioConfig
) -> np.ndarray:
    """Scheduling-side per-RB rate estimate (noise-limited, M=1 power)."""
    p0 = band_target_db + NOISE_PER_RB_DBM
    p1 = np.minimum(
        np.maximum(p0 + cfg.pc_alpha * pl_db, cfg.min_ue_power_dbm),
        np.minimum(cfg.max_ue_power_dbm, cap_dbm),
    )
    snr_db = p1 - pl_db - (NOISE_PER_RB_DBM + BS_NOISE_FIGURE_DB)
    eff = np.minimum(np.log2(1.0 + 10.0 ** (snr_db / 10.0)), SPECTRAL_EFFICIENCY_CAP)
    return RB_BANDWIDTH_HZ * eff


def pf_metric(rate_per_rb: np.ndarray, pf_avg: np.ndarray) -> np.ndarray:
    return rate_per_rb / np.maximum(pf_avg, PF_EPSILON_BPS)


def select_winners(
    serving: np.ndarray, eligible: np.ndarray, metric: np.ndarray, n_cells: int
) -> np.ndarray:
    """Winning UE per cell under the frame-constant PF metric.

    The metric does not change within a frame, so greedy per-RB assignment
    gives every RB of a cell to its metric argmax; rotation across frames
    comes from the PF average updates.  Ties break to the lowest UE id.
    Returns -1 for cells with no eligible UE.
    """
    winners = np.full(n_cells, -1, dtype=np.int64)
    idx = np.flatnonzero(eligible)
    if idx.size == 0:
        return winners
    cells = serving[idx]
    order = np.lexsort((idx, -metric[idx], cells))
    cells_sorted = cells[order]
    first = np.empty(len(order), dtype=bool)
    first[0] = True
    first[1:] = cells_sorted[1:] != cells_sorted[:-1]
    winners[cells_sorted[first]] = idx[order][first]
    return winners


def pf_schedule(
    cell_id: int,
    ue_ids,
    rate_per_rb,
    pf_avg,
    powers_dbm,
    n_rb: int,
    band: str,
    frame_index: int = 0,
) -> Allocation:
    """Allocation for one cell: every RB to the UE maximising r/max(avg, eps).

    ue_ids lists the eligible associated UEs; the parallel arrays carry the
    per-RB rate estimate, the PF average, and the frame transmit power a
    full-budget grant implies.  Empty input yields an empty allocation.
    """
    alloc = Allocation(frame_index=frame_index, cell_id=cell_id, band=band)
    ue_ids = np.asarray(ue_ids, dtype=np.int64)
    if ue_ids.size == 0 or n_rb == 0:
        return alloc
    metric = pf_metric(np.asarray(rate_per_rb, dtype=float), np.asarray(pf_avg, dtype=float))
    best = int(np.lexsort((ue_ids, -metric))[0])
    alloc.grants[int(ue_ids[best])] = (n_rb, float(np.asarray(powers_dbm, dtype=float)[best]))
    return alloc


def throughput_bps(sinr_db: float, n_rb: int) -> float:
    """Shannon rate over n_rb RBs with a 6 bps/Hz efficiency ceiling."""
    if n_rb < 0:
        raise ValueError("n_rb must be >= 0")
    if n_rb == 0 or sinr_db == -math.inf:
        return 0.0
    eff = min(math.log2(1.0 + 10.0 ** (sinr_db / 10.0)), SPECTRAL_EFFICIENCY_CAP)
    return n_rb * RB_BANDWIDTH_HZ * eff


def _overlap_rbs(a_start: int, a_len: int, b_start: int, b_len: int) -> int:
    return max(0, min(a_start + a_len, b_start + b_len) - max(a_start, b_start))


def uplink_sinr_db(
    cell_id: int,
    ue_id: int,
    allocations: list[Allocation],
    gain_db: np.ndarray,
    cochannel: np.ndarray,
    cfg: ScenarioConfig,
) -> float:
    """SINR of one allocated UE given every cell's allocation this frame.

    Interference sums co-channel UEs of other cells weighted by the
    fraction of their power falling into the victim's RBs; RBs are laid
    out contiguously per cell in ascending UE id.  Noise spans the
    victim's allocated bandwidth plus the BS noise figure.
    """
    layouts: dict[tuple[int, int], tuple[int, int, float]] = {}
    for alloc in allocations:
        start = 0
        for uid in sorted(alloc.grants):
            m, p = alloc.grants[uid]
            layouts[(alloc.cell_id, uid)] = (start, m, p)
            start += m
    v_start, v_m, v_p = layouts[(cell_id, ue_id)]
    s_dbm = v_p + gain_db[ue_id, cell_id]
    i_lin = 0.0
    for (other_cell, uid), (start, m, p) in layouts.items():
        if other_cell == cell_id or not cochannel[other_cell, cell_id]:
            continue
        ov = _overlap_rbs(v_start, v_m, start, m)
        if ov == 0:
            continue
        contrib = p + gain_db[uid, cell_id] + 10.0 * math.log10(ov / m)
        i_lin += 10.0 ** (contrib / 10.0)
    n_dbm = NOISE_PER_RB_DBM + 10.0 * math.log10(v_m) + BS_NOISE_FIGURE_DB
    return s_dbm - 10.0 * math.log10(i_lin + 10.0 ** (n_dbm / 10.0))


# ---------------------------------------------------------------------------
# frame engine

@dataclass
class BandFrame:
    """What one band did during one frame."""

    serving: np.ndarray  # per-UE serving cell, -1 none
    winners: np.ndarray  # per-cell transmitting UE, -1 none
    tx_power_dbm: np.ndarray  # per-cell winner power (NaN where no winner)
    n_rb: int
    sinr_db: np.ndarray  # per-cell winner SINR (NaN where no winner)


class WorldState:
    """Mutable per-run radio state over an immutable deployment.

    Ground-link gains (UMi + frozen shadowing) are precomputed once; the
    only state evolving across frames is the PF averages and the frame
    counter, so deep-copying a WorldState snapshots the simulation.
    """

    def __init__(self, cfg: ScenarioConfig, deployment: Deployment, seed: int):
        self.cfg = cfg
        self.deployment = deployment
        self.seed = seed
        self.n_cells = len(deployment.cells)
        self.n_ues = len(deployment.ues)
        self.cell_pos = deployment.cell_positions
        self.ue_pos = deployment.ue_positions
        self.subband = np.array(
            [c.licensed_subband_index for c in deployment.cells], dtype=np.int64
        )
        self.static_lsa_enabled = np.array(
            [c.lsa_enabled for c in deployment.cells], dtype=bool
        )
        self.gain_db = self._ground_gains()
        self.pl_db = -self.gain_db
        self.pf_avg = {b: np.full(self.n_ues, PF_EPSILON_BPS) for b in BANDS}
        self.frame_index = 0
        # co-channel masks: LSA is reuse-1, licensed reuse-3
        self.cochannel = {
            LSA: np.ones((self.n_cells, self.n_cells), dtype=bool),
            LICENSED: self.subband[:, None] == self.subband[None, :],
        }

    def _ground_gains(self) -> np.ndarray:
        if self.n_ues == 0:
            return np.zeros((0, self.n_cells))
        d = np.linalg.norm(self.ue_pos[:, None, :] - self.cell_pos[None, :, :], axis=2)
        pl = channel.umi_pathloss_db(d, self.cfg.carrier_hz / 1e9)
        shadow = np.zeros_like(pl)
        if self.cfg.shadow_sigma_db > 0:
            for u in range(self.n_ues):
                for c in range(self.n_cells):
                    shadow[u, c] = channel.shadow_db((u, c), self.seed, self.cfg.shadow_sigma_db)
        return -(pl + shadow)

    def frame_time_s(self) -> float:
        return self.frame_index * self.cfg.frame_s


def _effective_caps(
    world: WorldState,
    controls: list[CellControl],
    ref_position: tuple[float, float, float] | None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray | None]:
    """Per-cell enablement and cap arrays from the effective commands."""
    enabled = world.static_lsa_enabled.copy()
    caps = np.full(world.n_cells, math.inf)
    for cid, ctl in enumerate(controls):
        if ctl.directive is Directive.SHUTDOWN:
            enabled[cid] = False
        elif ctl.directive is Directive.POWER_CAP:
            caps[cid] = ctl.cap_dbm
    ue_caps = None
    if world.cfg.per_ue_caps and ref_position is not None:
        # refine each capped cell's broadcast cap with the UE's own
        # worst-case gain toward the epoch reference position
        d = np.linalg.norm(world.ue_pos - np.asarray(ref_position)[None, :], axis=1)
        g_ue = -channel.fspl_db(d, world.cfg.carrier_hz)
        ue_caps = (
            world.cfg.interference_threshold_dbm
            - world.cfg.protective_margin_db
            - g_ue
        )
    return enabled, caps, ue_caps


def _run_band(
    world: WorldState,
    band: str,
    enabled: np.ndarray,
    caps_cell: np.ndarray,
    ue_caps: np.ndarray | None,
) -> BandFrame:
    cfg = world.cfg
    n_rb = band_rb_budget(cfg, band)
    serving = associate_all(world.gain_db, enabled)
    winners = np.full(world.n_cells, -1, dtype=np.int64)
    power = np.full(world.n_cells, np.nan)
    sinr = np.full(world.n_cells, np.nan)
    if world.n_ues == 0 or n_rb == 0 or not enabled.any():
        world.pf_avg[band] *= 1.0 - PF_BETA
        return BandFrame(serving, winners, power, n_rb, sinr)

    cap_ue = caps_cell[np.clip(serving, 0, None)]
    if ue_caps is not None and band == LSA:
        refined = np.where(np.isfinite(cap_ue), ue_caps, cap_ue)
        cap_ue = refined
    eligible = (serving >= 0) & (cap_ue >= cfg.min_ue_power_dbm)

    pl = world.pl_db[np.arange(world.n_ues), np.clip(serving, 0, None)]
    target = sinr_target_db(cfg, band)
    r1 = rate_estimate_per_rb(pl, target, cap_ue, cfg)
    metric = pf_metric(r1, world.pf_avg[band])
    winners = select_winners(serving, eligible, metric, world.n_cells)

    won = winners >= 0
    w_idx = winners[won]
    p0 = target + NOISE_PER_RB_DBM
    p_raw = p0 + 10.0 * math.log10(n_rb) + cfg.pc_alpha * pl[w_idx]
    p_tx = np.minimum(
        np.maximum(p_raw, cfg.min_ue_power_dbm),
        np.minimum(cfg.max_ue_power_dbm, cap_ue[w_idx]),
    )
    power[won] = p_tx

    # uplink SINR at each winning cell: full RB overlap between cells, so
    # the interference weight of a co-channel winner is simply its power
    g_at = world.gain_db[w_idx][:, :]  # (n_win, n_cell)
    rx_dbm = power[won][:, None] + g_at  # winner tx through its gain row
    rx_lin = 10.0 ** (rx_dbm / 10.0)
    co = world.cochannel[band][np.flatnonzero(won)][:, :]  # (n_win, n_cell)
    total_at_cell = (rx_lin * co).sum(axis=0)  # co-channel sum per victim cell
    own_cells = np.flatnonzero(won)
    s_dbm = power[won] + world.gain_db[w_idx, own_cells]
    s_lin = 10.0 ** (s_dbm / 10.0)
    n_lin = 10.0 ** ((NOISE_PER_RB_DBM + 10.0 * math.log10(n_rb) + BS_NOISE_FIGURE_DB) / 10.0)
    i_lin = total_at_cell[own_cells] - s_lin
    i_lin = np.maximum(i_lin, 0.0)
    sinr[won] = s_dbm - 10.0 * np.log10(i_lin + n_lin)

    achieved = np.zeros(world.n_ues)
    for cell, u in zip(own_cells, w_idx):
        achieved[u] = throughput_bps(float(sinr[cell]), n_rb)
    world.pf_avg[band] = (1.0 - PF_BETA) * world.pf_avg[band] + PF_BETA * achieved
    return BandFrame(serving, winners, power, n_rb, sinr)


def step_frame(
    world: WorldState,
    controls: list[CellControl],
    ref_position: tuple[float, float, float] | None = None,
):
    """Advance the world by one frame under the commands in force.

    ref_position is the active epoch's reported airplane position (only
    consulted for the per-UE cap refinement).  Returns (lsa: BandFrame,
    licensed: BandFrame) and increments the frame counter.  Deterministic:
    a deep copy stepped with the same inputs produces identical results.
    """
    enabled_lsa, caps, ue_caps = _effective_caps(world, controls, ref_position)
    lsa = _run_band(world, LSA, enabled_lsa, caps, ue_caps)
    licensed = _run_band(
        world,
        LICENSED,
        np.ones(world.n_cells, dtype=bool),
        np.full(world.n_cells, math.inf),
        None,
    )
    world.frame_index += 1
    return lsa, licensed
