import { existsSync } from "fs";
import { join } from "path";

import { column, num, readCsv, SchemaError, Table } from "./csv.js";
import {
  drawAxes,
  drawColorbar,
  drawLegend,
  drawLine,
  drawThreshold,
  escapeXml,
  extent,
  openFrame,
  closeFrame,
  powerColor,
  Series,
} from "./svg.js";

export const POLICIES = ["ignore", "shutdown", "limit-power"] as const;

const POLICY_COLORS: Record<string, string> = {
  ignore: "#d62728",
  shutdown: "#1f77b4",
  "limit-power": "#2ca02c",
};

// colour scale bounds for UE transmit power, from the scenario power limits
export const POWER_SCALE_DBM: [number, number] = [-40, 23];

const INTERFERENCE_COLUMNS = ["t_s", "policy", "interference_dbm"];
const UE_POWER_COLUMNS = ["t_s", "ue_id", "x_m", "y_m", "band", "tx_power_dbm", "serving_cell", "n_rb"];
const AIRPLANE_COLUMNS = ["t_s", "x_m", "y_m", "z_m", "speed_mps", "telemetry_active"];
const COMPARISON_COLUMNS = ["t_s", ...POLICIES];

function requireFile(path: string): string {
  if (!existsSync(path)) throw new SchemaError(`missing input file: ${path}`);
  return path;
}

/** Fig. "interference": one time series per policy plus the I0 line. */
export function plotInterference(sweepDir: string, i0Dbm: number): string {
  const series: Series[] = [];
  let tMax = 0;
  for (const policy of POLICIES) {
    const table = readCsv(
      requireFile(join(sweepDir, policy, "interference.csv")),
      INTERFERENCE_COLUMNS,
    );
    const points = [];
    for (const row of table.rows) {
      const t = num(row[0]);
      const v = num(row[2]);
      if (t === null) continue;
      tMax = Math.max(tMax, t);
      if (v !== null) points.push({ x: t, y: v });
    }
    series.push({ label: policy, color: POLICY_COLORS[policy], points });
  }
  const ys = series.flatMap((s) => s.points.map((p) => p.y)).concat([i0Dbm]);
  const [lo, hi] = extent(ys);
  const f = openFrame(760, 430, [0, tMax], [lo - 2, hi + 2]);
  drawAxes(f, "Interference at the airplane", "time [s]", "interference [dBm]");
  for (const s of series) drawLine(f, s);
  drawThreshold(f, i0Dbm, `I0 = ${i0Dbm} dBm`);
  drawLegend(f, series.map((s) => ({ label: s.label, color: s.color })));
  return closeFrame(f);
}

function snapshotTimes(table: Table): number[] {
  const seen = new Set<number>();
  for (const t of column(table, "t_s")) {
    const v = num(t);
    if (v !== null) seen.add(v);
  }
  return [...seen].sort((a, b) => a - b);
}

/** Fig. "heatmap": UE positions coloured by LSA transmit power at one snapshot. */
export function plotHeatmap(runDir: string, snapshotS: number): string {
  const table = readCsv(requireFile(join(runDir, "ue_power.csv")), UE_POWER_COLUMNS);
  const available = snapshotTimes(table);
  const match = available.find((t) => Math.abs(t - snapshotS) < 1e-9);
  if (match === undefined) {
    throw new SchemaError(
      `snapshot ${snapshotS} s not present in ${table.path}; available: ${available.join(", ")}`,
    );
  }
  const pts: { x: number; y: number; p: number | null }[] = [];
  for (const row of table.rows) {
    if (num(row[0]) !== match || row[4] !== "lsa") continue;
    pts.push({ x: num(row[2])!, y: num(row[3])!, p: num(row[5]) });
  }
  const airplane = readCsv(requireFile(join(runDir, "airplane.csv")), AIRPLANE_COLUMNS);
  let plane: { x: number; y: number } | null = null;
  for (const row of airplane.rows) {
    const t = num(row[0]);
    if (t !== null && Math.abs(t - match) < 1e-9) {
      plane = { x: num(row[1])!, y: num(row[2])! };
      break;
    }
  }

  const xs = pts.map((p) => p.x).concat(plane ? [plane.x] : []);
  const ys = pts.map((p) => p.y).concat(plane ? [plane.y] : []);
  const [xLo, xHi] = extent(xs);
  const [yLo, yHi] = extent(ys);
  const pad = 0.06 * Math.max(xHi - xLo, yHi - yLo, 1);
  const f = openFrame(700, 620, [xLo - pad, xHi + pad], [yLo - pad, yHi + pad], {
    top: 40,
    right: 72,
    bottom: 52,
    left: 72,
  });
  const [vmin, vmax] = POWER_SCALE_DBM;
  drawAxes(f, `LSA uplink power at t = ${match} s`, "x [m]", "y [m]");
  for (const p of pts) {
    const fill = p.p === null ? "#bbb" : powerColor(p.p, vmin, vmax);
    f.body.push(
      `<circle cx="${f.x(p.x).toFixed(2)}" cy="${f.y(p.y).toFixed(2)}" r="4" fill="${fill}" stroke="#555" stroke-width="0.4"/>`,
    );
  }
  if (plane) {
    const px = f.x(plane.x);
    const py = f.y(plane.y);
    f.body.push(
      `<path d="M ${(px - 9).toFixed(2)} ${(py - 6).toFixed(2)} L ${(px + 9).toFixed(2)} ${py.toFixed(2)} L ${(px - 9).toFixed(2)} ${(py + 6).toFixed(2)} Z" fill="#000" data-marker="airplane"/>`,
    );
    f.body.push(`<text x="${(px + 12).toFixed(2)}" y="${(py + 4).toFixed(2)}" class="tick">airplane</text>`);
  }
  drawColorbar(f, vmin, vmax, "tx power [dBm] (grey = idle)");
  return closeFrame(f);
}

/** Fig. "energy": the three policies' radiated LSA power over time. */
export function plotEnergy(comparisonCsv: string): string {
  const table = readCsv(requireFile(comparisonCsv), COMPARISON_COLUMNS);
  const series: Series[] = [];
  let tMax = 0;
  for (const policy of POLICIES) {
    const idx = table.columns.indexOf(policy);
    const points = [];
    for (const row of table.rows) {
      const t = num(row[0]);
      const v = num(row[idx]);
      if (t === null || v === null) continue;
      tMax = Math.max(tMax, t);
      points.push({ x: t, y: v });
    }
    series.push({ label: policy, color: POLICY_COLORS[policy], points });
  }
  const ys = series.flatMap((s) => s.points.map((p) => p.y));
  const [, hi] = extent(ys.length ? ys : [0, 1]);
  const f = openFrame(760, 430, [0, tMax || 1], [0, hi * 1.05 || 1]);
  drawAxes(f, "Radiated LSA power by policy", "time [s]", "radiated power [mW]");
  for (const s of series) drawLine(f, s);
  drawLegend(f, series.map((s) => ({ label: s.label, color: s.color })));
  return closeFrame(f);
}

export { escapeXml };
