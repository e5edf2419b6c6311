import { cpSync, mkdtempSync, readFileSync, writeFileSync, existsSync } from "fs";
import { tmpdir } from "os";
import { join } from "path";
import { describe, expect, it } from "vitest";

import { SchemaError, readCsv } from "../src/csv.js";
import { plotEnergy, plotHeatmap, plotInterference, POWER_SCALE_DBM } from "../src/figures.js";
import { parseArgs, renderSvg, runCli, UsageError } from "../src/cli.js";

const SWEEP = join(__dirname, "fixtures", "sweep");
const RUN = join(SWEEP, "limit-power");

function tmpCopyOfSweep(): string {
  const dir = mkdtempSync(join(tmpdir(), "figs-"));
  cpSync(SWEEP, dir, { recursive: true });
  return dir;
}

describe("csv reader", () => {
  it("reads a simulator file", () => {
    const table = readCsv(join(RUN, "interference.csv"), ["t_s", "policy", "interference_dbm"]);
    expect(table.rows.length).toBe(300); // 3 s at 10 ms frames
  });

  it("names the missing column", () => {
    const dir = tmpCopyOfSweep();
    const path = join(dir, "limit-power", "interference.csv");
    const text = readFileSync(path, "utf8").replace("interference_dbm", "intf");
    writeFileSync(path, text);
    expect(() =>
      readCsv(path, ["t_s", "policy", "interference_dbm"]),
    ).toThrowError(/missing column 'interference_dbm'/);
  });

  it("rejects extra columns by name", () => {
    const dir = tmpCopyOfSweep();
    const path = join(dir, "comparison.csv");
    writeFileSync(path, readFileSync(path, "utf8").replace("t_s,", "t_s,bogus,"));
    expect(() => plotEnergy(path)).toThrowError(/unexpected column 'bogus'/);
  });
});

describe("interference figure", () => {
  it("renders three policies and the threshold line", () => {
    const svg = plotInterference(SWEEP, -90);
    expect(svg.startsWith("<svg")).toBe(true);
    expect(svg).toContain('data-series="ignore"');
    expect(svg).toContain('data-series="shutdown"');
    expect(svg).toContain('data-series="limit-power"');
    expect(svg).toContain('data-threshold="-90"');
    expect(svg).toContain("I0 = -90 dBm");
  });

  it("threshold follows the --i0 argument", () => {
    expect(plotInterference(SWEEP, -85)).toContain('data-threshold="-85"');
  });

  it("fails naming the missing policy file", () => {
    const dir = mkdtempSync(join(tmpdir(), "empty-"));
    expect(() => plotInterference(dir, -90)).toThrowError(/missing input file: .*ignore.*interference\.csv/);
  });
});

describe("heatmap figure", () => {
  it("renders UE scatter with airplane marker", () => {
    const svg = plotHeatmap(RUN, 1.0);
    expect(svg.startsWith("<svg")).toBe(true);
    expect(svg).toContain('data-marker="airplane"');
    expect((svg.match(/<circle /g) ?? []).length).toBeGreaterThan(10);
  });

  it("colour scale spans the configured power bounds", () => {
    const svg = plotHeatmap(RUN, 2.0);
    expect(POWER_SCALE_DBM).toEqual([-40, 23]);
    expect(svg).toContain(">-40<");
    expect(svg).toContain(">23<");
  });

  it("absent snapshot lists the available times", () => {
    expect(() => plotHeatmap(RUN, 7.5)).toThrowError(/available: 1, 2/);
  });
});

describe("energy figure", () => {
  it("labels curves from the policy columns", () => {
    const svg = plotEnergy(join(SWEEP, "comparison.csv"));
    expect(svg.startsWith("<svg")).toBe(true);
    for (const policy of ["ignore", "shutdown", "limit-power"]) {
      expect(svg).toContain(`data-series="${policy}"`);
    }
  });

  it("header-only input yields empty axes", () => {
    const dir = mkdtempSync(join(tmpdir(), "figs-"));
    writeFileSync(join(dir, "comparison.csv"), "t_s,ignore,shutdown,limit-power\n");
    const svg = plotEnergy(join(dir, "comparison.csv"));
    expect(svg.startsWith("<svg")).toBe(true);
  });
});

describe("cli", () => {
  it("writes an svg and leaves inputs untouched", async () => {
    const before = readFileSync(join(SWEEP, "comparison.csv"));
    const out = join(mkdtempSync(join(tmpdir(), "figs-")), "energy.svg");
    const code = await runCli(["plot", "--kind", "energy_comparison", "--in", SWEEP, "--out", out]);
    expect(code).toBe(0);
    expect(readFileSync(out, "utf8")).toContain("<svg");
    expect(readFileSync(join(SWEEP, "comparison.csv"))).toEqual(before);
  });

  it("renders every kind", async () => {
    const dir = mkdtempSync(join(tmpdir(), "figs-"));
    const jobs: [string, string[]][] = [
      ["interference.svg", ["--kind", "interference_timeseries", "--in", SWEEP]],
      ["heatmap.svg", ["--kind", "power_heatmap", "--in", RUN, "--snapshot", "1"]],
      ["energy.svg", ["--kind", "energy_comparison", "--in", SWEEP]],
    ];
    for (const [name, args] of jobs) {
      const out = join(dir, name);
      expect(await runCli(["plot", ...args, "--out", out])).toBe(0);
      expect(existsSync(out)).toBe(true);
      expect(readFileSync(out, "utf8").length).toBeGreaterThan(500);
    }
  });

  it("renders png when asked", async () => {
    const out = join(mkdtempSync(join(tmpdir(), "figs-")), "energy.png");
    const code = await runCli(["plot", "--kind", "energy_comparison", "--in", SWEEP, "--out", out, "--format", "png"]);
    expect(code).toBe(0);
    const magic = readFileSync(out).subarray(0, 4);
    expect([...magic]).toEqual([0x89, 0x50, 0x4e, 0x47]);
  });

  it("schema violations exit nonzero naming the column", async () => {
    const dir = tmpCopyOfSweep();
    const path = join(dir, "comparison.csv");
    writeFileSync(path, readFileSync(path, "utf8").replace("shutdown", "off"));
    const code = await runCli(["plot", "--kind", "energy_comparison", "--in", dir, "--out", join(dir, "x.svg")]);
    expect(code).toBe(1);
  });

  it("usage errors exit 2", async () => {
    expect(await runCli(["plot", "--kind", "nope", "--in", ".", "--out", "x.svg"])).toBe(2);
    expect(await runCli(["plot", "--kind", "power_heatmap", "--in", RUN, "--out", "x.svg"])).toBe(2);
    expect(() => parseArgs(["plot", "--kind", "energy_comparison"])).toThrowError(UsageError);
  });

  it("missing snapshot propagates the available-times diagnostic", async () => {
    const out = join(mkdtempSync(join(tmpdir(), "figs-")), "h.svg");
    const code = await runCli(["plot", "--kind", "power_heatmap", "--in", RUN, "--snapshot", "9", "--out", out]);
    expect(code).toBe(1);
  });

  it("parseArgs defaults", () => {
    const opts = parseArgs(["plot", "--kind", "energy_comparison", "--in", "d", "--out", "f.svg"]);
    expect(opts.i0).toBe(-90);
    expect(opts.format).toBe("svg");
    expect(renderSvg).toBeTypeOf("function");
  });
});

describe("schema error type", () => {
  it("is distinguishable", () => {
    expect(new SchemaError("x")).toBeInstanceOf(Error);
  });
});
