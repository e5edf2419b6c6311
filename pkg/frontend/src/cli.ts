#!/usr/bin/env node
import { writeFileSync } from "fs";
import { join } from "path";

import { SchemaError } from "./csv.js";
import { plotEnergy, plotHeatmap, plotInterference } from "./figures.js";

const KINDS = ["interference_timeseries", "power_heatmap", "energy_comparison"] as const;
type Kind = (typeof KINDS)[number];

const USAGE = `usage: plot --kind K --in DIR --out FILE [--snapshot T] [--i0 DBM] [--format svg|png]

kinds:
  interference_timeseries  DIR is a sweep directory (ignore/, shutdown/, limit-power/)
  power_heatmap            DIR is a single run directory; --snapshot selects the time
  energy_comparison        DIR is a sweep directory containing comparison.csv
`;

export class UsageError extends Error {}

interface Options {
  kind: Kind;
  inDir: string;
  outFile: string;
  snapshot?: number;
  i0: number;
  format: "svg" | "png";
}

export function parseArgs(argv: string[]): Options {
  if (argv[0] !== "plot") throw new UsageError(`unknown command '${argv[0] ?? ""}'`);
  const opts: Partial<Options> = { i0: -90, format: "svg" };
  for (let i = 1; i < argv.length; i += 2) {
    const flag = argv[i];
    const value = argv[i + 1];
    if (value === undefined) throw new UsageError(`flag ${flag} needs a value`);
    switch (flag) {
      case "--kind":
        if (!KINDS.includes(value as Kind)) {
          throw new UsageError(`unknown kind '${value}'; choose one of ${KINDS.join(", ")}`);
        }
        opts.kind = value as Kind;
        break;
      case "--in":
        opts.inDir = value;
        break;
      case "--out":
        opts.outFile = value;
        break;
      case "--snapshot":
        opts.snapshot = Number(value);
        if (Number.isNaN(opts.snapshot)) throw new UsageError(`bad --snapshot value '${value}'`);
        break;
      case "--i0":
        opts.i0 = Number(value);
        if (Number.isNaN(opts.i0)) throw new UsageError(`bad --i0 value '${value}'`);
        break;
      case "--format":
        if (value !== "svg" && value !== "png") throw new UsageError(`bad --format '${value}'`);
        opts.format = value;
        break;
      default:
        throw new UsageError(`unknown flag '${flag}'`);
    }
  }
  if (!opts.kind || !opts.inDir || !opts.outFile) {
    throw new UsageError("--kind, --in and --out are required");
  }
  if (opts.kind === "power_heatmap" && opts.snapshot === undefined) {
    throw new UsageError("power_heatmap requires --snapshot T");
  }
  return opts as Options;
}

export function renderSvg(opts: Options): string {
  switch (opts.kind) {
    case "interference_timeseries":
      return plotInterference(opts.inDir, opts.i0);
    case "power_heatmap":
      return plotHeatmap(opts.inDir, opts.snapshot!);
    case "energy_comparison":
      return plotEnergy(join(opts.inDir, "comparison.csv"));
  }
}

async function toPng(svg: string): Promise<Buffer> {
  const { Resvg } = await import("@resvg/resvg-js");
  return new Resvg(svg).render().asPng();
}

export async function runCli(argv: string[]): Promise<number> {
  let opts: Options;
  try {
    opts = parseArgs(argv);
  } catch (err) {
    if (err instanceof UsageError) {
      process.stderr.write(`plot: error: ${err.message}\n${USAGE}`);
      return 2;
    }
    throw err;
  }
  try {
    const svg = renderSvg(opts);
    if (opts.format === "png") {
      writeFileSync(opts.outFile, await toPng(svg));
    } else {
      writeFileSync(opts.outFile, svg);
    }
    return 0;
  } catch (err) {
    const message = err instanceof Error ? err.message : String(err);
    process.stderr.write(`plot: error: ${message}\n`);
    return 1;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined && import.meta.url.endsWith(process.argv[1].split("/").pop()!);
if (invokedDirectly) {
  runCli(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
