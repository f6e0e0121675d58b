/**
 * Minimal deterministic SVG chart rendering: linear/log axes with tick
 * labels, multi-series polylines, a legend, and an optional power-law
 * reference guide line. No DOM, no dependencies — output is a plain
 * string, so identical inputs give byte-identical images.
 */

export interface Series {
  label: string;
  x: number[];
  y: number[];
  color?: string;
}

export interface PanelSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
  logX?: boolean;
  logY?: boolean;
  /** power-law guide with this slope, anchored at the last point of series 0 */
  refSlope?: number;
}

export const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
  "#8c564b", "#17becf", "#7f7f7f"];

const PANEL_W = 480;
const PANEL_H = 360;
const MARGIN = { left: 64, right: 16, top: 32, bottom: 46 };

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function fmtTick(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(0).replace("e", "e");
  return String(Number(v.toPrecision(4)));
}

export function linearTicks(lo: number, hi: number, target = 6): number[] {
  if (!(hi > lo)) return [lo];
  const raw = (hi - lo) / target;
  const mag = 10 ** Math.floor(Math.log10(raw));
  const step = [1, 2, 5, 10].map((s) => s * mag).find((s) => (hi - lo) / s <= target)
    ?? 10 * mag;
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + 1e-12 * step; v += step) {
    ticks.push(Math.abs(v) < 1e-12 * step ? 0 : v);
  }
  return ticks;
}

export function decadeTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  for (let e = Math.ceil(Math.log10(lo) - 1e-9); 10 ** e <= hi * (1 + 1e-9); e++) {
    ticks.push(10 ** e);
  }
  if (ticks.length === 0) ticks.push(lo, hi);
  return ticks;
}

class Scale {
  constructor(private lo: number, private hi: number,
              private r0: number, private r1: number,
              readonly log: boolean) {
    if (log && !(lo > 0)) {
      throw new Error("log scale needs positive data");
    }
  }

  map(v: number): number {
    const [a, b] = this.log
      ? [Math.log(this.lo), Math.log(this.hi)]
      : [this.lo, this.hi];
    const x = this.log ? Math.log(v) : v;
    const frac = b === a ? 0.5 : (x - a) / (b - a);
    return this.r0 + frac * (this.r1 - this.r0);
  }

  ticks(): number[] {
    return this.log ? decadeTicks(this.lo, this.hi) : linearTicks(this.lo, this.hi);
  }
}

function extent(values: number[], log: boolean): [number, number] {
  const pool = log ? values.filter((v) => v > 0) : values;
  if (pool.length === 0) {
    throw new Error("no plottable values" + (log ? " (log scale, all <= 0)" : ""));
  }
  let lo = Math.min(...pool);
  let hi = Math.max(...pool);
  if (lo === hi) {
    lo = log ? lo / 2 : lo - 1;
    hi = log ? hi * 2 : hi + 1;
  } else if (!log) {
    const pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
  } else {
    lo /= 1.3;
    hi *= 1.3;
  }
  return [lo, hi];
}

function renderPanel(parts: string[], spec: PanelSpec, x0: number): void {
  const left = x0 + MARGIN.left;
  const right = x0 + PANEL_W - MARGIN.right;
  const top = MARGIN.top;
  const bottom = PANEL_H - MARGIN.bottom;

  const xs = spec.series.flatMap((s) => s.x);
  const ys = spec.series.flatMap((s) => s.y);
  const [xlo, xhi] = extent(xs, !!spec.logX);
  const [ylo, yhi] = extent(ys, !!spec.logY);
  const sx = new Scale(xlo, xhi, left, right, !!spec.logX);
  const sy = new Scale(ylo, yhi, bottom, top, !!spec.logY);

  parts.push(`<rect x="${left}" y="${top}" width="${right - left}" `
    + `height="${bottom - top}" fill="none" stroke="#333" stroke-width="1"/>`);
  parts.push(`<text x="${x0 + PANEL_W / 2}" y="${top - 12}" text-anchor="middle" `
    + `font-size="14" font-weight="bold">${esc(spec.title)}</text>`);

  for (const v of sx.ticks()) {
    if (v < xlo || v > xhi) continue;
    const px = sx.map(v);
    parts.push(`<line x1="${px.toFixed(2)}" y1="${bottom}" x2="${px.toFixed(2)}" `
      + `y2="${top}" stroke="#ddd" stroke-width="0.5"/>`);
    parts.push(`<text x="${px.toFixed(2)}" y="${bottom + 16}" text-anchor="middle" `
      + `font-size="10">${esc(fmtTick(v))}</text>`);
  }
  for (const v of sy.ticks()) {
    if (v < ylo || v > yhi) continue;
    const py = sy.map(v);
    parts.push(`<line x1="${left}" y1="${py.toFixed(2)}" x2="${right}" `
      + `y2="${py.toFixed(2)}" stroke="#ddd" stroke-width="0.5"/>`);
    parts.push(`<text x="${left - 6}" y="${(py + 3).toFixed(2)}" text-anchor="end" `
      + `font-size="10">${esc(fmtTick(v))}</text>`);
  }
  parts.push(`<text x="${x0 + PANEL_W / 2}" y="${PANEL_H - 10}" text-anchor="middle" `
    + `font-size="12">${esc(spec.xLabel)}</text>`);
  parts.push(`<text x="${x0 + 16}" y="${(top + bottom) / 2}" text-anchor="middle" `
    + `font-size="12" transform="rotate(-90 ${x0 + 16} ${(top + bottom) / 2})">`
    + `${esc(spec.yLabel)}</text>`);

  if (spec.refSlope !== undefined && spec.series.length > 0) {
    const s0 = spec.series[0];
    const ax = s0.x[s0.x.length - 1];
    const ay = s0.y[s0.y.length - 1];
    const bx = s0.x[0];
    const by = ay * (bx / ax) ** spec.refSlope;
    parts.push(`<line x1="${sx.map(ax).toFixed(2)}" y1="${sy.map(ay).toFixed(2)}" `
      + `x2="${sx.map(bx).toFixed(2)}" y2="${sy.map(by).toFixed(2)}" `
      + `stroke="#888" stroke-width="1" stroke-dasharray="6,4"/>`);
    parts.push(`<text x="${(sx.map(bx) + 8).toFixed(2)}" `
      + `y="${(sy.map(by) - 6).toFixed(2)}" font-size="10" fill="#666">`
      + `slope ${spec.refSlope}</text>`);
  }

  spec.series.forEach((series, k) => {
    const color = series.color ?? PALETTE[k % PALETTE.length];
    const pts: string[] = [];
    for (let i = 0; i < series.x.length; i++) {
      const yv = series.y[i];
      if (spec.logY && !(yv > 0)) continue;
      pts.push(`${sx.map(series.x[i]).toFixed(2)},${sy.map(yv).toFixed(2)}`);
    }
    parts.push(`<polyline points="${pts.join(" ")}" fill="none" stroke="${color}" `
      + `stroke-width="1.6"/>`);
    const lx = left + 10;
    const ly = top + 16 + 14 * k;
    parts.push(`<line x1="${lx}" y1="${ly - 4}" x2="${lx + 22}" y2="${ly - 4}" `
      + `stroke="${color}" stroke-width="2"/>`);
    parts.push(`<text x="${lx + 28}" y="${ly}" font-size="11">${esc(series.label)}</text>`);
  });
}

export function renderFigure(panels: PanelSpec[]): string {
  const width = PANEL_W * panels.length;
  const parts: string[] = [];
  parts.push(`<svg xmlns="http://www.w3.org/2000/svg" width="${width}" `
    + `height="${PANEL_H}" viewBox="0 0 ${width} ${PANEL_H}" `
    + `font-family="Helvetica, Arial, sans-serif">`);
  parts.push(`<rect width="${width}" height="${PANEL_H}" fill="white"/>`);
  panels.forEach((panel, i) => renderPanel(parts, panel, i * PANEL_W));
  parts.push("</svg>");
  return parts.join("\n");
}
