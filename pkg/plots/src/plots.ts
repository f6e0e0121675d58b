/**
 * The five figure renderers. Each one is a pure file-to-file transform
 * from the solver's documented CSV/snapshot outputs to an SVG image.
 */

import { writeFileSync } from "node:fs";
import { basename } from "node:path";

import { readDiagnosticsCsv, readErrorSeriesCsv, readErrorTableCsv } from "./csv.js";
import { PALETTE, PanelSpec, renderFigure } from "./figure.js";
import { readSnapshot } from "./snapshot.js";

/** Mean dyadic-style rate: average slope of log(err) against log(h). */
export function averageRate(h: number[], err: number[]): number {
  if (h.length < 2) {
    throw new Error("rate needs at least two resolutions");
  }
  let acc = 0;
  for (let i = 1; i < h.length; i++) {
    acc += Math.log(err[i - 1] / err[i]) / Math.log(h[i - 1] / h[i]);
  }
  return acc / (h.length - 1);
}

export interface ConvergenceSlopes {
  d: number;
  w: number;
  energy: number;
}

/** Log-log error-vs-h chart with a slope-2 guide; returns the fitted rates. */
export function plotConvergence(tableCsv: string, outSvg: string): ConvergenceSlopes {
  const rows = readErrorTableCsv(tableCsv);
  if (rows.length === 0) {
    throw new Error(`${tableCsv}: no data rows`);
  }
  const h = rows.map((r) => r.h);
  const slopes: ConvergenceSlopes = rows.length >= 2 ? {
    d: averageRate(h, rows.map((r) => r.errD)),
    w: averageRate(h, rows.map((r) => r.errW)),
    energy: averageRate(h, rows.map((r) => r.errEnergy)),
  } : { d: NaN, w: NaN, energy: NaN };
  const label = (name: string, rate: number) =>
    Number.isFinite(rate) ? `${name} (rate ${rate.toFixed(2)})` : name;
  const panel: PanelSpec = {
    title: "errors vs mesh size",
    xLabel: "h",
    yLabel: "sup-in-time L2 error",
    logX: true,
    logY: true,
    refSlope: 2,
    series: [
      { label: label("director", slopes.d), x: h, y: rows.map((r) => r.errD) },
      { label: label("angular momentum", slopes.w), x: h, y: rows.map((r) => r.errW) },
      { label: label("energy norm", slopes.energy), x: h, y: rows.map((r) => r.errEnergy) },
    ],
  };
  writeFileSync(outSvg, renderFigure([panel]));
  return slopes;
}

/** Error evolution over time, linear and log panels side by side. */
export function plotErrorEvolution(seriesCsv: string, outSvg: string): void {
  const rows = readErrorSeriesCsv(seriesCsv);
  if (rows.length === 0) {
    throw new Error(`${seriesCsv}: no data rows`);
  }
  const t = rows.map((r) => r.t);
  const series = [
    { label: "director", x: t, y: rows.map((r) => r.errD) },
    { label: "angular momentum", x: t, y: rows.map((r) => r.errW) },
    { label: "energy norm", x: t, y: rows.map((r) => r.errEnergy) },
  ];
  const base: Omit<PanelSpec, "title" | "logY"> = {
    xLabel: "t", yLabel: "L2 error", series,
  };
  writeFileSync(outSvg, renderFigure([
    { title: "error evolution", ...base },
    { title: "error evolution (log scale)", ...base, logY: true },
  ]));
}

/** Overlay of max|grad d| traces from several diagnostics files. */
export function plotGradMax(diagnosticsCsvs: string[], outSvg: string): void {
  if (diagnosticsCsvs.length === 0) {
    throw new Error("need at least one diagnostics file");
  }
  const series = diagnosticsCsvs.map((path, k) => {
    const rows = readDiagnosticsCsv(path);
    return {
      label: basename(path).replace(/_diagnostics\.csv$/, ""),
      x: rows.map((r) => r.t),
      y: rows.map((r) => r.gradMax),
      color: PALETTE[k % PALETTE.length],
    };
  });
  writeFileSync(outSvg, renderFigure([{
    title: "gradient blow-up indicator",
    xLabel: "t",
    yLabel: "max |grad d|",
    series,
  }]));
}

/** Conserved energy and the kinetic surrogate versus time. */
export function plotEnergies(diagnosticsCsv: string, outSvg: string): void {
  const rows = readDiagnosticsCsv(diagnosticsCsv);
  if (rows.length === 0) {
    throw new Error(`${diagnosticsCsv}: no data rows`);
  }
  const t = rows.map((r) => r.t);
  writeFileSync(outSvg, renderFigure([
    {
      title: "conserved energy",
      xLabel: "t", yLabel: "E",
      series: [{ label: "E", x: t, y: rows.map((r) => r.energy) }],
    },
    {
      title: "kinetic surrogate",
      xLabel: "t", yLabel: "H",
      series: [{ label: "H", x: t, y: rows.map((r) => r.kineticEnergy), color: PALETTE[1] }],
    },
  ]));
}

function divergingColor(v: number): string {
  // blue (-1) .. white (0) .. red (+1)
  const x = Math.max(-1, Math.min(1, v));
  const lerp = (a: number, b: number, f: number) => Math.round(a + (b - a) * f);
  const [r, g, b] = x < 0
    ? [lerp(255, 33, -x), lerp(255, 102, -x), lerp(255, 172, -x)]
    : [lerp(255, 178, x), lerp(255, 24, x), lerp(255, 43, x)];
  return `rgb(${r},${g},${b})`;
}

/**
 * Field view near the origin: heatmap of the third director component
 * with a quiver of the in-plane components on top.
 */
export function plotSnapshot(snapshotPath: string, region: number, outSvg: string): void {
  const snap = readSnapshot(snapshotPath);
  if (snap.dim !== 2) {
    throw new Error(`${snapshotPath}: field view expects a 2-D snapshot`);
  }
  const n = snap.nodesPerAxis;
  const coord = (i: number, axis: number) => snap.origin[axis] + i * snap.h;
  const sel: number[] = [];
  for (let i = 0; i < n; i++) {
    if (Math.abs(coord(i, 0)) <= region + 1e-12) sel.push(i);
  }
  if (sel.length === 0) {
    throw new Error(`${snapshotPath}: region ${region} contains no nodes`);
  }
  const width = 560;
  const margin = 48;
  const cell = (width - 2 * margin) / sel.length;
  const height = width + 20;
  const parts: string[] = [];
  parts.push(`<svg xmlns="http://www.w3.org/2000/svg" width="${width}" `
    + `height="${height}" viewBox="0 0 ${width} ${height}" `
    + `font-family="Helvetica, Arial, sans-serif">`);
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
  parts.push(`<text x="${width / 2}" y="22" text-anchor="middle" font-size="14" `
    + `font-weight="bold">director field, t = ${snap.t.toPrecision(4)} `
    + `(step ${snap.stepIndex})</text>`);
  parts.push(`<text x="${width / 2}" y="${height - 8}" text-anchor="middle" `
    + `font-size="11">color: out-of-plane component; arrows: in-plane components</text>`);

  const at = (i: number, j: number, c: number) => snap.d[(i * n + j) * 3 + c];
  const px = (k: number) => margin + k * cell;
  const py = (k: number) => margin + (sel.length - 1 - k) * cell;
  sel.forEach((i, ki) => {
    sel.forEach((j, kj) => {
      const color = divergingColor(at(i, j, 2));
      parts.push(`<rect x="${px(ki).toFixed(2)}" y="${py(kj).toFixed(2)}" `
        + `width="${(cell + 0.5).toFixed(2)}" height="${(cell + 0.5).toFixed(2)}" `
        + `fill="${color}"/>`);
    });
  });

  const stride = Math.max(1, Math.ceil(sel.length / 24));
  const arrow = 0.8 * cell * stride;
  sel.forEach((i, ki) => {
    sel.forEach((j, kj) => {
      if (ki % stride !== 0 || kj % stride !== 0) return;
      const ux = at(i, j, 0);
      const uy = at(i, j, 1);
      const mag = Math.hypot(ux, uy);
      if (mag < 1e-6) return;
      const cx = px(ki) + cell / 2;
      const cy = py(kj) + cell / 2;
      const dx = (ux / Math.max(mag, 1e-12)) * (arrow / 2) * Math.min(1, mag);
      const dy = -(uy / Math.max(mag, 1e-12)) * (arrow / 2) * Math.min(1, mag);
      parts.push(`<line x1="${(cx - dx).toFixed(2)}" y1="${(cy - dy).toFixed(2)}" `
        + `x2="${(cx + dx).toFixed(2)}" y2="${(cy + dy).toFixed(2)}" `
        + `stroke="black" stroke-width="1"/>`);
      parts.push(`<circle cx="${(cx + dx).toFixed(2)}" cy="${(cy + dy).toFixed(2)}" `
        + `r="1.4" fill="black"/>`);
    });
  });
  parts.push("</svg>");
  writeFileSync(outSvg, parts.join("\n"));
}
