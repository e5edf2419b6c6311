/** Small deterministic SVG chart builder (no DOM, no runtime deps). */

export interface Point {
  x: number;
  y: number;
}

export interface Series {
  label: string;
  color: string;
  points: Point[];
}

export interface Margin {
  top: number;
  right: number;
  bottom: number;
  left: number;
}

const DEFAULT_MARGIN: Margin = { top: 40, right: 28, bottom: 52, left: 72 };

export function escapeXml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export interface Scale {
  (v: number): number;
  domain: [number, number];
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  const fn = ((v: number) => r0 + ((v - d0) / span) * (r1 - r0)) as Scale;
  fn.domain = [d0, d1];
  return fn;
}

/** Round tick positions covering the domain, ~n of them. */
export function ticks(domain: [number, number], n = 6): number[] {
  const [lo, hi] = domain;
  if (lo === hi) return [lo];
  const rawStep = (hi - lo) / n;
  const mag = Math.pow(10, Math.floor(Math.log10(Math.abs(rawStep))));
  let step = mag;
  for (const mult of [1, 2, 5, 10]) {
    if (mag * mult >= rawStep) {
      step = mag * mult;
      break;
    }
  }
  const out: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + step * 1e-9; v += step) {
    out.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return out;
}

export function fmtTick(v: number): string {
  const rounded = Math.round(v * 1e6) / 1e6;
  return String(rounded);
}

export function extent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (!Number.isFinite(lo)) return [0, 1];
  if (lo === hi) return [lo - 1, hi + 1];
  return [lo, hi];
}

export interface Frame {
  width: number;
  height: number;
  margin: Margin;
  x: Scale;
  y: Scale;
  body: string[];
}

export function openFrame(
  width: number,
  height: number,
  xDomain: [number, number],
  yDomain: [number, number],
  margin: Margin = DEFAULT_MARGIN,
): Frame {
  const x = linearScale(xDomain, [margin.left, width - margin.right]);
  const y = linearScale(yDomain, [height - margin.bottom, margin.top]);
  return { width, height, margin, x, y, body: [] };
}

export function drawAxes(f: Frame, title: string, xLabel: string, yLabel: string): void {
  const { margin, width, height, x, y } = f;
  const x0 = margin.left;
  const x1 = width - margin.right;
  const y0 = height - margin.bottom;
  const y1 = margin.top;
  f.body.push(`<text x="${width / 2}" y="20" class="title" text-anchor="middle">${escapeXml(title)}</text>`);
  for (const t of ticks(x.domain)) {
    const px = x(t);
    f.body.push(`<line x1="${px.toFixed(2)}" y1="${y0}" x2="${px.toFixed(2)}" y2="${y1}" class="grid"/>`);
    f.body.push(
      `<text x="${px.toFixed(2)}" y="${y0 + 18}" class="tick" text-anchor="middle">${fmtTick(t)}</text>`,
    );
  }
  for (const t of ticks(y.domain)) {
    const py = y(t);
    f.body.push(`<line x1="${x0}" y1="${py.toFixed(2)}" x2="${x1}" y2="${py.toFixed(2)}" class="grid"/>`);
    f.body.push(
      `<text x="${x0 - 8}" y="${(py + 4).toFixed(2)}" class="tick" text-anchor="end">${fmtTick(t)}</text>`,
    );
  }
  f.body.push(`<rect x="${x0}" y="${y1}" width="${x1 - x0}" height="${y0 - y1}" class="border"/>`);
  f.body.push(
    `<text x="${(x0 + x1) / 2}" y="${height - 12}" class="label" text-anchor="middle">${escapeXml(xLabel)}</text>`,
  );
  f.body.push(
    `<text transform="translate(18,${(y0 + y1) / 2}) rotate(-90)" class="label" text-anchor="middle">${escapeXml(yLabel)}</text>`,
  );
}

export function drawLine(f: Frame, series: Series): void {
  const pts = series.points
    .map((p) => `${f.x(p.x).toFixed(2)},${f.y(p.y).toFixed(2)}`)
    .join(" ");
  f.body.push(
    `<polyline points="${pts}" fill="none" stroke="${series.color}" stroke-width="1.6" data-series="${escapeXml(series.label)}"/>`,
  );
}

export function drawThreshold(f: Frame, value: number, label: string): void {
  const py = f.y(value);
  const x0 = f.margin.left;
  const x1 = f.width - f.margin.right;
  f.body.push(
    `<line x1="${x0}" y1="${py.toFixed(2)}" x2="${x1}" y2="${py.toFixed(2)}" class="threshold" data-threshold="${value}"/>`,
  );
  f.body.push(
    `<text x="${x1 - 4}" y="${(py - 6).toFixed(2)}" class="tick" text-anchor="end">${escapeXml(label)}</text>`,
  );
}

export function drawLegend(f: Frame, entries: { label: string; color: string }[]): void {
  const x0 = f.margin.left + 10;
  let yy = f.margin.top + 14;
  for (const e of entries) {
    f.body.push(`<rect x="${x0}" y="${yy - 9}" width="18" height="4" fill="${e.color}"/>`);
    f.body.push(`<text x="${x0 + 24}" y="${yy - 3}" class="tick">${escapeXml(e.label)}</text>`);
    yy += 16;
  }
}

/** Three-stop colormap for dBm values (cold blue -> yellow -> hot red). */
export function powerColor(v: number, vmin: number, vmax: number): string {
  const t = Math.max(0, Math.min(1, (v - vmin) / (vmax - vmin)));
  const stops: [number, number, number][] = [
    [33, 102, 172],
    [247, 216, 66],
    [214, 47, 39],
  ];
  const s = t < 0.5 ? 0 : 1;
  const u = t < 0.5 ? t * 2 : (t - 0.5) * 2;
  const rgb = stops[s].map((c, i) => Math.round(c + (stops[s + 1][i] - c) * u));
  return `rgb(${rgb[0]},${rgb[1]},${rgb[2]})`;
}

export function drawColorbar(f: Frame, vmin: number, vmax: number, label: string): void {
  const x0 = f.width - f.margin.right + 6;
  const y1 = f.margin.top;
  const y0 = f.height - f.margin.bottom;
  const steps = 32;
  const h = (y0 - y1) / steps;
  for (let i = 0; i < steps; i++) {
    const v = vmin + ((i + 0.5) / steps) * (vmax - vmin);
    const yy = y0 - (i + 1) * h;
    f.body.push(
      `<rect x="${x0}" y="${yy.toFixed(2)}" width="10" height="${(h + 0.5).toFixed(2)}" fill="${powerColor(v, vmin, vmax)}"/>`,
    );
  }
  f.body.push(`<text x="${x0}" y="${y0 + 14}" class="tick">${fmtTick(vmin)}</text>`);
  f.body.push(`<text x="${x0}" y="${y1 - 4}" class="tick">${fmtTick(vmax)}</text>`);
  f.body.push(
    `<text transform="translate(${x0 + 24},${(y0 + y1) / 2}) rotate(-90)" class="tick" text-anchor="middle">${escapeXml(label)}</text>`,
  );
}

export function closeFrame(f: Frame): string {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${f.width}" height="${f.height}" viewBox="0 0 ${f.width} ${f.height}">`,
    "<style>",
    "text { font-family: sans-serif; fill: #222; }",
    ".title { font-size: 14px; font-weight: bold; }",
    ".label { font-size: 12px; }",
    ".tick { font-size: 10px; }",
    ".grid { stroke: #ddd; stroke-width: 0.5; }",
    ".border { fill: none; stroke: #444; stroke-width: 1; }",
    ".threshold { stroke: #000; stroke-width: 1.2; stroke-dasharray: 6 4; }",
    "</style>",
    `<rect width="${f.width}" height="${f.height}" fill="white"/>`,
    ...f.body,
    "</svg>",
    "",
  ].join("\n");
}
