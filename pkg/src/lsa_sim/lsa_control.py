"""Incumbent -> repository -> controller -> OA&M command pipeline.

Every position_update_s the incumbent reports the airplane position; the
controller turns that into one directive per cell (no_restriction, a
power cap, or shutdown) according to the active policy, and the commands
take effect control_latency_s later.  Between updates the previous
epoch's commands stay in force (piecewise-constant control).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

from . import channel
from .scenario import AirplaneState, Deployment, ScenarioConfig, closest_point_in_cell

IGNORE = "ignore"
SHUTDOWN = "shutdown"
LIMIT_POWER = "limit-power"
POLICIES = (IGNORE, SHUTDOWN, LIMIT_POWER)


class Directive(str, Enum):
    NO_RESTRICTION = "no_restriction"
    POWER_CAP = "power_cap"
    SHUTDOWN = "shutdown"


@dataclass(frozen=True)
class PositionUpdate:
    issued_at_s: float
    airplane_position: tuple[float, float, float]
    telemetry_active: bool


@dataclass(frozen=True)
class PolicyCommand:
    cell_id: int
    directive: Directive
    cap_dbm: float | None = None  # set iff directive is POWER_CAP
    issued_at_s: float = 0.0
    effective_at_s: float | None = None  # set by dispatch
    epoch: int = 0


@dataclass(frozen=True)
class EvacuationEvent:
    """Incumbent-side revocation: all LSA cells behave as shut down."""

    t_start_s: float
    t_end_s: float

    def __post_init__(self):
        if not self.t_start_s < self.t_end_s:
            raise ValueError("t_start_s must be < t_end_s")


def is_update_epoch(t_s: float, period_s: float) -> bool:
    k = round(t_s / period_s)
    return abs(t_s - k * period_s) <= 1e-9 * max(1.0, abs(t_s))


def incumbent_report(t_s: float, state: AirplaneState, cfg: ScenarioConfig) -> PositionUpdate | None:
    """Emit a position update iff t_s falls on an update epoch."""
    if not is_update_epoch(t_s, cfg.position_update_s):
        return None
    return PositionUpdate(
        issued_at_s=t_s,
        airplane_position=state.position,
        telemetry_active=state.telemetry_active,
    )


def worst_case_air_gain_db(cell, airplane_position, cfg: ScenarioConfig) -> float:
    """Free-space gain from the closest possible UE position in the cell."""
    nearest = closest_point_in_cell(cell, airplane_position, cfg)
    d = math.dist(nearest, tuple(airplane_position))
    return -channel.fspl_db(d, cfg.carrier_hz)


def compute_commands(
    policy: str,
    update: PositionUpdate,
    deployment: Deployment,
    cfg: ScenarioConfig,
) -> list[PolicyCommand]:
    """One directive per cell for this update epoch.

    limit-power caps are chosen so cap + G_worst + K = I0 exactly; the
    shutdown criterion is max_ue_power + G_worst + K > I0 + shutdown_margin.
    Inactive telemetry lifts every restriction.
    """
    if policy not in POLICIES:
        raise ValueError(f"unknown policy {policy!r}; choose one of {POLICIES}")
    t = update.issued_at_s
    i0 = cfg.interference_threshold_dbm
    k_margin = cfg.protective_margin_db
    commands = []
    for cell in deployment.cells:
        if not update.telemetry_active or policy == IGNORE:
            cmd = PolicyCommand(cell.id, Directive.NO_RESTRICTION, issued_at_s=t)
        else:
            g_worst = worst_case_air_gain_db(cell, update.airplane_position, cfg)
            if policy == LIMIT_POWER:
                cap = i0 - k_margin - g_worst
                if cap >= cfg.max_ue_power_dbm:
                    cmd = PolicyCommand(cell.id, Directive.NO_RESTRICTION, issued_at_s=t)
                else:
                    cmd = PolicyCommand(cell.id, Directive.POWER_CAP, cap_dbm=cap, issued_at_s=t)
            else:  # SHUTDOWN
                if cfg.max_ue_power_dbm + g_worst + k_margin > i0 + cfg.shutdown_margin_db:
                    cmd = PolicyCommand(cell.id, Directive.SHUTDOWN, issued_at_s=t)
                else:
                    cmd = PolicyCommand(cell.id, Directive.NO_RESTRICTION, issued_at_s=t)
        commands.append(cmd)
    return commands


def apply_evacuation(
    event: EvacuationEvent | None, t_s: float, commands: list[PolicyCommand]
) -> list[PolicyCommand]:
    """Override every directive to shutdown while the event is active."""
    if event is None or not (event.t_start_s <= t_s < event.t_end_s):
        return commands
    return [
        replace(cmd, directive=Directive.SHUTDOWN, cap_dbm=None) for cmd in commands
    ]


@dataclass(frozen=True)
class CellControl:
    """Effective control for one cell at some instant."""

    directive: Directive
    cap_dbm: float  # +inf when unrestricted, -inf when shut down
    epoch: int


class CommandSchedule:
    """Latency-delayed command timeline with last-writer-wins semantics.

    Commands become effective at issued_at + latency; until then the
    previous epoch's commands remain in force.  The initial state is
    no_restriction everywhere.
    """

    def __init__(self, n_cells: int):
        self.n_cells = n_cells
        self._pending: list[list[PolicyCommand]] = [[] for _ in range(n_cells)]
        self._cursor = [0] * n_cells
        self._active: list[PolicyCommand | None] = [None] * n_cells
        self.dispatched: list[PolicyCommand] = []
        self.epoch_positions: dict[int, tuple[float, float, float]] = {}

    def dispatch(
        self,
        commands: list[PolicyCommand],
        t_s: float,
        latency_s: float,
        epoch: int = 0,
        reference_position: tuple[float, float, float] | None = None,
    ) -> list[PolicyCommand]:
        """Schedule commands issued at t_s to take effect at t_s + latency_s."""
        out = []
        for cmd in commands:
            scheduled = replace(
                cmd, issued_at_s=t_s, effective_at_s=t_s + latency_s, epoch=epoch
            )
            self._pending[cmd.cell_id].append(scheduled)
            self.dispatched.append(scheduled)
            out.append(scheduled)
        if reference_position is not None:
            self.epoch_positions[epoch] = tuple(reference_position)
        return out

    def active_at(self, t_s: float) -> list[CellControl]:
        """Effective per-cell control at time t_s (newest issued wins)."""
        controls = []
        for cell_id in range(self.n_cells):
            pending = self._pending[cell_id]
            i = self._cursor[cell_id]
            active = self._active[cell_id]
            while i < len(pending) and pending[i].effective_at_s <= t_s:
                cand = pending[i]
                if active is None or cand.issued_at_s >= active.issued_at_s:
                    active = cand
                i += 1
            self._cursor[cell_id] = i
            self._active[cell_id] = active
            if active is None or active.directive is Directive.NO_RESTRICTION:
                controls.append(
                    CellControl(
                        Directive.NO_RESTRICTION,
                        math.inf,
                        active.epoch if active else -1,
                    )
                )
            elif active.directive is Directive.SHUTDOWN:
                controls.append(CellControl(Directive.SHUTDOWN, -math.inf, active.epoch))
            else:
                controls.append(CellControl(Directive.POWER_CAP, active.cap_dbm, active.epoch))
        return controls

    def active_epoch(self, t_s: float) -> int:
        """Newest epoch with any effective command at t_s (-1 before the first)."""
        controls = self.active_at(t_s)
        return max((c.epoch for c in controls), default=-1)


def dispatch(
    commands: list[PolicyCommand],
    t_s: float,
    latency_s: float,
    schedule: CommandSchedule | None = None,
    epoch: int = 0,
) -> CommandSchedule:
    """Functional wrapper over CommandSchedule.dispatch for one epoch."""
    if schedule is None:
        n_cells = max((c.cell_id for c in commands), default=-1) + 1
        schedule = CommandSchedule(n_cells)
    schedule.dispatch(commands, t_s, latency_s, epoch=epoch)
    return schedule
