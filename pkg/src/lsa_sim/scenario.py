"""Static scenario: configuration, cell/UE deployment, airplane trajectory.

Everything here is a pure function of (config, seed).  The deployment is
immutable once built; the airplane trajectory is closed-form kinematics
evaluated at arbitrary t.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from importlib import resources

import numpy as np

# Overflight clearance (m AGL) used when auto-placing the runway: the climb
# reaches this altitude before crossing the first cell column, which keeps
# worst-case free-space caps at LTE-practical levels (>= about -10 dBm).
MIN_OVERFLIGHT_ALTITUDE_M = 360.0

GROUND_ROLL = "ground_roll"
CLIMB = "climb"
DEPARTED = "departed"


class ConfigError(ValueError):
    """Raised on unparseable or out-of-range configuration input."""


@dataclass(frozen=True)
class ScenarioConfig:
    """Full scenario parameterisation; defaults reproduce the airport case."""

    cell_radius_m: float = 288.0
    grid_cols: int = 5
    grid_rows: int = 5
    ues_per_cell: float = 10.0
    ue_placement: str = "poisson"  # "poisson" (mean density) or "fixed"
    carrier_hz: float = 2.1e9
    lsa_bandwidth_hz: float = 10e6
    licensed_bandwidth_hz: float = 10e6
    n_rb_lsa: int = 50
    n_rb_licensed: int = 16  # per cell, within its reuse-3 subband
    interference_threshold_dbm: float = -90.0  # I0, over lsa_bandwidth
    protective_margin_db: float = 10.0
    takeoff_speed_mps: float = 65.0
    acceleration_mps2: float = 5.0
    climb_slope_deg: float = 7.0
    max_speed_mps: float = 150.0
    telemetry_altitude_cutoff_m: float = math.inf
    observation_s: float = 60.0
    frame_s: float = 0.01
    position_update_s: float = 1.0
    control_latency_s: float = 0.0
    max_ue_power_dbm: float = 23.0
    min_ue_power_dbm: float = -40.0
    pc_alpha: float = 1.0
    sinr_target_lsa_db: float = 5.0
    sinr_target_licensed_db: float = 20.0
    bs_height_m: float = 15.0
    ue_height_m: float = 1.5
    shadow_sigma_db: float = 3.0
    bs_sidelobe_isolation_db: float = 20.0
    bs_antenna_leakage_db: float = -35.0
    shutdown_margin_db: float = 0.0
    per_ue_caps: bool = False
    runway_origin_xy: tuple[float, float] | None = None  # None -> auto placement
    runway_heading_deg: float = 0.0
    seed: int = 1

    def __post_init__(self):
        if self.runway_origin_xy is None:
            object.__setattr__(self, "runway_origin_xy", _auto_runway_origin(self))
        else:
            object.__setattr__(
                self, "runway_origin_xy", tuple(float(v) for v in self.runway_origin_xy)
            )


@dataclass(frozen=True)
class CellSite:
    id: int
    position: tuple[float, float, float]  # BS antenna position
    licensed_subband_index: int  # reuse-3 colour, in {0, 1, 2}
    lsa_enabled: bool = True  # reuse-1: all cells share the LSA carrier


@dataclass
class UE:
    id: int
    position: tuple[float, float, float]
    home_cell: int
    serving_cell_lsa: int | None = None
    serving_cell_licensed: int | None = None
    pf_avg_rate_lsa: float = 1.0
    pf_avg_rate_licensed: float = 1.0
    current_tx_power_lsa_dbm: float | None = None
    current_tx_power_licensed_dbm: float | None = None


@dataclass(frozen=True)
class Deployment:
    cells: list[CellSite]
    ues: list[UE]

    @property
    def cell_positions(self) -> np.ndarray:
        return np.array([c.position for c in self.cells], dtype=float)

    @property
    def ue_positions(self) -> np.ndarray:
        return np.array([u.position for u in self.ues], dtype=float).reshape(len(self.ues), 3)


@dataclass(frozen=True)
class AirplaneState:
    t_s: float
    position: tuple[float, float, float]
    speed_mps: float
    phase: str
    telemetry_active: bool


# ---------------------------------------------------------------------------
# configuration parsing

_INT_KEYS = {"grid_cols", "grid_rows", "n_rb_lsa", "n_rb_licensed", "seed"}
_BOOL_KEYS = {"per_ue_caps"}
_STR_KEYS = {"ue_placement"}
_TUPLE_KEYS = {"runway_origin_xy"}


def _parse_value(key: str, raw: str, line_no: int):
    raw = raw.strip()
    try:
        if key in _TUPLE_KEYS:
            if raw.lower() == "auto":
                return None
            parts = [p for p in raw.split(",") if p.strip()]
            if len(parts) != 2:
                raise ValueError("expected 'auto' or 'x,y'")
            return (float(parts[0]), float(parts[1]))
        if key in _STR_KEYS:
            return raw.lower()
        if key in _BOOL_KEYS:
            low = raw.lower()
            if low in ("true", "yes", "1", "on"):
                return True
            if low in ("false", "no", "0", "off"):
                return False
            raise ValueError("expected a boolean")
        if key in _INT_KEYS:
            return int(raw, 0)
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"line {line_no}: bad value for {key!r}: {raw!r} ({exc})") from None


def load_config(text: str) -> ScenarioConfig:
    """Parse a flat key=value document into a validated ScenarioConfig.

    '#' starts a comment, blank lines are ignored, unknown and duplicate
    keys are rejected with a line diagnostic.  An empty document yields
    the all-defaults configuration (identical to the bundled default.cfg).
    """
    known = {f.name for f in fields(ScenarioConfig)}
    values: dict = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {line_no}: expected 'key = value', got {stripped!r}")
        key, raw = (part.strip() for part in stripped.split("=", 1))
        if key not in known:
            raise ConfigError(f"line {line_no}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {line_no}: duplicate key {key!r}")
        values[key] = _parse_value(key, raw, line_no)
    cfg = ScenarioConfig(**values)
    validate_config(cfg)
    return cfg


def load_config_file(path) -> ScenarioConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return load_config(fh.read())


def default_config() -> ScenarioConfig:
    return load_config(resources.files("lsa_sim").joinpath("default.cfg").read_text("utf-8"))


def config_to_text(cfg: ScenarioConfig) -> str:
    """Serialise a config back to the key=value format load_config accepts."""
    lines = []
    for f in fields(ScenarioConfig):
        v = getattr(cfg, f.name)
        if f.name in _TUPLE_KEYS:
            lines.append(f"{f.name} = {v[0]!r},{v[1]!r}")
        elif f.name in _BOOL_KEYS:
            lines.append(f"{f.name} = {'true' if v else 'false'}")
        else:
            lines.append(f"{f.name} = {v}")
    return "\n".join(lines) + "\n"


def _require(cond: bool, message: str):
    if not cond:
        raise ConfigError(message)


def validate_config(cfg: ScenarioConfig):
    c = cfg
    _require(c.cell_radius_m > 0, f"cell_radius_m must be > 0 (got {c.cell_radius_m})")
    _require(c.grid_cols >= 1, f"grid_cols must be >= 1 (got {c.grid_cols})")
    _require(c.grid_rows >= 1, f"grid_rows must be >= 1 (got {c.grid_rows})")
    _require(c.ues_per_cell >= 0, f"ues_per_cell must be >= 0 (got {c.ues_per_cell})")
    _require(
        c.ue_placement in ("poisson", "fixed"),
        f"ue_placement must be 'poisson' or 'fixed' (got {c.ue_placement!r})",
    )
    _require(c.carrier_hz > 0, f"carrier_hz must be > 0 (got {c.carrier_hz})")
    _require(c.lsa_bandwidth_hz > 0, f"lsa_bandwidth_hz must be > 0 (got {c.lsa_bandwidth_hz})")
    _require(
        c.licensed_bandwidth_hz > 0,
        f"licensed_bandwidth_hz must be > 0 (got {c.licensed_bandwidth_hz})",
    )
    _require(c.n_rb_lsa >= 0, f"n_rb_lsa must be >= 0 (got {c.n_rb_lsa})")
    _require(
        c.n_rb_lsa * 180e3 <= c.lsa_bandwidth_hz,
        f"n_rb_lsa ({c.n_rb_lsa}) requires more than lsa_bandwidth_hz",
    )
    _require(c.n_rb_licensed >= 0, f"n_rb_licensed must be >= 0 (got {c.n_rb_licensed})")
    _require(
        3 * c.n_rb_licensed * 180e3 <= c.licensed_bandwidth_hz,
        f"n_rb_licensed ({c.n_rb_licensed}) does not fit a reuse-3 split of licensed_bandwidth_hz",
    )
    _require(c.frame_s > 0, f"frame_s must be > 0 (got {c.frame_s})")
    _require(
        c.frame_s <= c.position_update_s,
        f"frame_s ({c.frame_s}) must be <= position_update_s ({c.position_update_s})",
    )
    ratio = c.position_update_s / c.frame_s
    _require(
        abs(ratio - round(ratio)) < 1e-9,
        f"position_update_s ({c.position_update_s}) must be an integer multiple of frame_s",
    )
    # observation_s == 0 is allowed as a degenerate empty run
    _require(c.observation_s >= 0, f"observation_s must be >= 0 (got {c.observation_s})")
    _require(
        c.observation_s == 0 or c.position_update_s <= c.observation_s,
        f"position_update_s ({c.position_update_s}) must be <= observation_s ({c.observation_s})",
    )
    _require(c.control_latency_s >= 0, f"control_latency_s must be >= 0 (got {c.control_latency_s})")
    _require(
        c.min_ue_power_dbm < c.max_ue_power_dbm,
        f"min_ue_power_dbm ({c.min_ue_power_dbm}) must be < max_ue_power_dbm ({c.max_ue_power_dbm})",
    )
    _require(c.takeoff_speed_mps > 0, f"takeoff_speed_mps must be > 0 (got {c.takeoff_speed_mps})")
    _require(c.acceleration_mps2 > 0, f"acceleration_mps2 must be > 0 (got {c.acceleration_mps2})")
    _require(
        c.max_speed_mps >= c.takeoff_speed_mps,
        f"max_speed_mps ({c.max_speed_mps}) must be >= takeoff_speed_mps ({c.takeoff_speed_mps})",
    )
    _require(
        0 < c.climb_slope_deg < 90,
        f"climb_slope_deg must be in (0, 90) (got {c.climb_slope_deg})",
    )
    _require(
        c.telemetry_altitude_cutoff_m >= 0,
        f"telemetry_altitude_cutoff_m must be >= 0 (got {c.telemetry_altitude_cutoff_m})",
    )
    _require(c.shadow_sigma_db >= 0, f"shadow_sigma_db must be >= 0 (got {c.shadow_sigma_db})")
    _require(c.bs_height_m > 0, f"bs_height_m must be > 0 (got {c.bs_height_m})")
    _require(c.ue_height_m > 0, f"ue_height_m must be > 0 (got {c.ue_height_m})")
    _require(c.seed >= 0, f"seed must be >= 0 (got {c.seed})")


# ---------------------------------------------------------------------------
# grid geometry

def grid_pitch_m(cfg: ScenarioConfig) -> float:
    """Spacing between adjacent cell centres (tangent-circle packing)."""
    return math.sqrt(3.0) * cfg.cell_radius_m


def cell_center(cfg: ScenarioConfig, col: int, row: int) -> tuple[float, float]:
    pitch = grid_pitch_m(cfg)
    x = (col - (cfg.grid_cols - 1) / 2.0) * pitch
    y = (row - (cfg.grid_rows - 1) / 2.0) * pitch
    return (x, y)


def _auto_runway_origin(cfg: ScenarioConfig) -> tuple[float, float]:
    """Default runway placement: heading through the grid centre, rotation
    point far enough out that the climb clears MIN_OVERFLIGHT_ALTITUDE_M
    before reaching the nearest cell edge."""
    theta = math.radians(cfg.runway_heading_deg)
    ux, uy = math.cos(theta), math.sin(theta)
    # coverage extent against the heading direction, measured from the centre
    extent = 0.0
    for row in range(cfg.grid_rows):
        for col in range(cfg.grid_cols):
            cx, cy = cell_center(cfg, col, row)
            extent = max(extent, -(cx * ux + cy * uy))
    extent += cfg.cell_radius_m
    climb_run = MIN_OVERFLIGHT_ALTITUDE_M / math.tan(math.radians(cfg.climb_slope_deg))
    s_rot = cfg.takeoff_speed_mps**2 / (2.0 * cfg.acceleration_mps2)
    d_back = extent + climb_run + s_rot
    return (-ux * d_back + 0.0, -uy * d_back + 0.0)


def build_deployment(cfg: ScenarioConfig, seed: int) -> Deployment:
    """Lay out the cell grid and draw UE positions; pure in (cfg, seed).

    Cells sit on a regular grid with sqrt(3)*R pitch, centred on the
    origin, row-major ids.  UE count per cell is Poisson(ues_per_cell)
    (or exactly round(ues_per_cell) in fixed mode) with positions uniform
    over each cell's disc.
    """
    validate_config(cfg)
    cells = []
    for row in range(cfg.grid_rows):
        for col in range(cfg.grid_cols):
            cid = row * cfg.grid_cols + col
            x, y = cell_center(cfg, col, row)
            cells.append(
                CellSite(
                    id=cid,
                    position=(x, y, cfg.bs_height_m),
                    licensed_subband_index=(col + 2 * row) % 3,
                )
            )
    ues = []
    ue_id = 0
    for cell in cells:
        gen = np.random.Generator(
            np.random.Philox(np.random.SeedSequence(entropy=seed, spawn_key=(cell.id,)))
        )
        if cfg.ue_placement == "fixed":
            count = int(round(cfg.ues_per_cell))
        else:
            count = int(gen.poisson(cfg.ues_per_cell))
        for _ in range(count):
            r = cfg.cell_radius_m * math.sqrt(gen.uniform())
            phi = gen.uniform(0.0, 2.0 * math.pi)
            pos = (
                cell.position[0] + r * math.cos(phi),
                cell.position[1] + r * math.sin(phi),
                cfg.ue_height_m,
            )
            ues.append(UE(id=ue_id, position=pos, home_cell=cell.id))
            ue_id += 1
    return Deployment(cells=cells, ues=ues)


# ---------------------------------------------------------------------------
# airplane kinematics

def rotation_time_s(cfg: ScenarioConfig) -> float:
    return cfg.takeoff_speed_mps / cfg.acceleration_mps2


def rotation_distance_m(cfg: ScenarioConfig) -> float:
    return cfg.takeoff_speed_mps**2 / (2.0 * cfg.acceleration_mps2)


def airplane_state(cfg: ScenarioConfig, t_s: float) -> AirplaneState:
    """Closed-form takeoff profile at time t.

    Constant acceleration along the runway until takeoff speed, then a
    straight climb at the configured slope, still accelerating along-path
    until max_speed_mps (phase 'departed' once at max speed).
    """
    if t_s < 0:
        raise ValueError("t_s must be >= 0")
    a = cfg.acceleration_mps2
    v_rot = cfg.takeoff_speed_mps
    t_rot = rotation_time_s(cfg)
    s_rot = rotation_distance_m(cfg)
    theta = math.radians(cfg.runway_heading_deg)
    ux, uy = math.cos(theta), math.sin(theta)
    ox, oy = cfg.runway_origin_xy

    if t_s <= t_rot:
        v = a * t_s
        s = 0.5 * a * t_s * t_s
        ground = s
        z = 0.0
        phase = GROUND_ROLL
    else:
        tau = t_s - t_rot
        tau_max = (cfg.max_speed_mps - v_rot) / a
        if tau < tau_max:
            v = v_rot + a * tau
            s_climb = v_rot * tau + 0.5 * a * tau * tau
            phase = CLIMB
        else:
            v = cfg.max_speed_mps
            s_at_max = v_rot * tau_max + 0.5 * a * tau_max * tau_max
            s_climb = s_at_max + cfg.max_speed_mps * (tau - tau_max)
            phase = DEPARTED
        slope = math.radians(cfg.climb_slope_deg)
        ground = s_rot + s_climb * math.cos(slope)
        z = s_climb * math.sin(slope)

    pos = (ox + ground * ux, oy + ground * uy, z)
    return AirplaneState(
        t_s=t_s,
        position=pos,
        speed_mps=v,
        phase=phase,
        telemetry_active=z <= cfg.telemetry_altitude_cutoff_m,
    )


def closest_point_in_cell(cell: CellSite, p, cfg: ScenarioConfig) -> tuple[float, float, float]:
    """Point of the cell's ground disc (radius R at UE height) nearest to p."""
    px, py = float(p[0]), float(p[1])
    cx, cy = cell.position[0], cell.position[1]
    dx, dy = px - cx, py - cy
    h = math.hypot(dx, dy)
    if h <= cfg.cell_radius_m:
        return (px, py, cfg.ue_height_m)
    scale = cfg.cell_radius_m / h
    return (cx + dx * scale, cy + dy * scale, cfg.ue_height_m)
