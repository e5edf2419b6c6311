"""Simulation driver: control pipeline + frame engine + record collection."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import lsa_control, metrics, ran
from .lsa_control import CommandSchedule, EvacuationEvent, PolicyCommand
from .scenario import AirplaneState, Deployment, ScenarioConfig, airplane_state, build_deployment


@dataclass
class RunResult:
    cfg: ScenarioConfig
    policy: str
    seed: int
    deployment: Deployment
    frames: list[metrics.FrameRecord]
    commands: list[PolicyCommand]  # every dispatched command, issue order
    epoch_positions: dict[int, tuple[float, float, float]]


def _band_record(world: ran.WorldState, frame: ran.BandFrame) -> metrics.BandRecord:
    won = np.flatnonzero(frame.winners >= 0)
    ue_ids = frame.winners[won]
    order = np.argsort(ue_ids)  # fixed ue-id order for reproducible sums
    return metrics.BandRecord(
        ue_ids=ue_ids[order],
        tx_power_dbm=frame.tx_power_dbm[won][order],
        serving_cell=won[order],
        n_rb=np.full(len(won), frame.n_rb, dtype=np.int64),
        serving_all=frame.serving.astype(np.int16),
    )


def simulate(
    cfg: ScenarioConfig,
    policy: str,
    seed: int,
    evacuation: EvacuationEvent | None = None,
) -> RunResult:
    """Run one policy over the observation window; pure in its arguments."""
    if policy not in lsa_control.POLICIES:
        raise ValueError(f"unknown policy {policy!r}; choose one of {lsa_control.POLICIES}")
    deployment = build_deployment(cfg, seed)
    world = ran.WorldState(cfg, deployment, seed)
    schedule = CommandSchedule(world.n_cells)
    frames_per_update = round(cfg.position_update_s / cfg.frame_s)
    n_frames = round(cfg.observation_s / cfg.frame_s)
    records: list[metrics.FrameRecord] = []

    for i in range(n_frames):
        t = i * cfg.frame_s
        plane = airplane_state(cfg, t)
        if i % frames_per_update == 0:
            update = lsa_control.incumbent_report(t, plane, cfg)
            cmds = lsa_control.compute_commands(policy, update, deployment, cfg)
            cmds = lsa_control.apply_evacuation(evacuation, t, cmds)
            schedule.dispatch(
                cmds,
                t,
                cfg.control_latency_s,
                epoch=i // frames_per_update,
                reference_position=update.airplane_position,
            )
        controls = schedule.active_at(t)
        epoch = max((c.epoch for c in controls), default=-1)
        ref = schedule.epoch_positions.get(epoch)
        lsa_frame, licensed_frame = ran.step_frame(world, controls, ref)

        lsa_rec = _band_record(world, lsa_frame)
        lic_rec = _band_record(world, licensed_frame)
        if plane.telemetry_active:
            gains = metrics.air_gain_db(
                world.ue_pos[lsa_rec.ue_ids], plane.position, cfg
            )
            interference = metrics.interference_at_airplane_dbm(lsa_rec.tx_power_dbm, gains)
        else:
            interference = None
        records.append(
            metrics.FrameRecord(
                t_s=t,
                epoch=epoch,
                airplane_position=plane.position,
                airplane_speed_mps=plane.speed_mps,
                telemetry_active=plane.telemetry_active,
                interference_dbm=interference,
                lsa_mw=metrics.radiated_power_mw(lsa_rec.tx_power_dbm),
                licensed_mw=metrics.radiated_power_mw(lic_rec.tx_power_dbm),
                lsa=lsa_rec,
                licensed=lic_rec,
            )
        )

    return RunResult(
        cfg=cfg,
        policy=policy,
        seed=seed,
        deployment=deployment,
        frames=records,
        commands=list(schedule.dispatched),
        epoch_positions=dict(schedule.epoch_positions),
    )
