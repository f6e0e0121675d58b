/**
 * Readers for the solver's CSV contracts.
 *
 * The files are plain numeric CSVs written by the solver (no quoting, no
 * embedded separators), so parsing is a split per line; what matters here
 * is strict schema validation with explicit column-name errors.
 */

import { readFileSync } from "node:fs";

export interface DiagnosticsRow {
  step: number;
  t: number;
  energy: number;
  kineticEnergy: number;
  gradMax: number;
  iterations: number;
  residual: number;
}

export interface ErrorTableRow {
  h: number;
  errD: number;
  errW: number;
  errEnergy: number;
  rateD: number | null;
  rateW: number | null;
  rateEnergy: number | null;
}

export interface ErrorSeriesRow {
  step: number;
  t: number;
  errD: number;
  errW: number;
  errEnergy: number;
}

export const DIAGNOSTICS_COLUMNS = [
  "step", "t", "energy", "kinetic_energy", "grad_max", "iterations", "residual",
] as const;

export const ERROR_TABLE_COLUMNS = [
  "h", "err_d", "err_w", "err_energy", "rate_d", "rate_w", "rate_energy",
] as const;

export const ERROR_SERIES_COLUMNS = [
  "step", "t", "err_d", "err_w", "err_energy",
] as const;

function rows(path: string, expected: readonly string[]): string[][] {
  const lines = readFileSync(path, "utf8").split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new Error(`${path}: empty file`);
  }
  const header = lines[0].split(",");
  const matches = header.length === expected.length
    && expected.every((name, i) => header[i] === name);
  if (!matches) {
    const missing = expected.filter((name) => !header.includes(name));
    let msg = `${path}: expected columns [${expected.join(", ")}], `
      + `got [${header.join(", ")}]`;
    if (missing.length > 0) {
      msg += `; missing: ${missing.join(", ")}`;
    }
    throw new Error(msg);
  }
  return lines.slice(1).map((line) => line.split(","));
}

function num(field: string, path: string): number {
  const value = Number(field);
  if (field === "" || Number.isNaN(value)) {
    throw new Error(`${path}: malformed numeric field ${JSON.stringify(field)}`);
  }
  return value;
}

function numOrNull(field: string, path: string): number | null {
  return field === "" ? null : num(field, path);
}

export function readDiagnosticsCsv(path: string): DiagnosticsRow[] {
  return rows(path, DIAGNOSTICS_COLUMNS).map((f) => ({
    step: num(f[0], path),
    t: num(f[1], path),
    energy: num(f[2], path),
    kineticEnergy: num(f[3], path),
    gradMax: num(f[4], path),
    iterations: num(f[5], path),
    residual: num(f[6], path),
  }));
}

export function readErrorTableCsv(path: string): ErrorTableRow[] {
  return rows(path, ERROR_TABLE_COLUMNS).map((f) => ({
    h: num(f[0], path),
    errD: num(f[1], path),
    errW: num(f[2], path),
    errEnergy: num(f[3], path),
    rateD: numOrNull(f[4], path),
    rateW: numOrNull(f[5], path),
    rateEnergy: numOrNull(f[6], path),
  }));
}

export function readErrorSeriesCsv(path: string): ErrorSeriesRow[] {
  return rows(path, ERROR_SERIES_COLUMNS).map((f) => ({
    step: num(f[0], path),
    t: num(f[1], path),
    errD: num(f[2], path),
    errW: num(f[3], path),
    errEnergy: num(f[4], path),
  }));
}
