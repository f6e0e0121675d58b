import { existsSync, mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { readErrorTableCsv } from "../src/csv.js";
import { averageRate, plotConvergence } from "../src/plots.js";

const FIX = join(__dirname, "fixtures");
const out = mkdtempSync(join(tmpdir(), "plots-slope-"));

describe("rate fitting", () => {
  it("recovers an exact power law", () => {
    const h = [1 / 64, 1 / 128, 1 / 256];
    const err = h.map((v) => 5.0 * v ** 2);
    expect(averageRate(h, err)).toBeCloseTo(2.0, 12);
    const err15 = h.map((v) => 0.3 * v ** 1.5);
    expect(averageRate(h, err15)).toBeCloseTo(1.5, 12);
  });

  it("needs two resolutions", () => {
    expect(() => averageRate([0.1], [1.0])).toThrow(/at least two/);
  });
});

describe("acceptance: fitted slope vs table-derived rate", () => {
  // torus-waves_acceptance_table.csv is the error table produced by the
  // solver's acceptance sweep (M = 32..256 over the full horizon)
  const table = join(FIX, "torus-waves_acceptance_table.csv");

  it("agrees with the table's own rate columns to 0.05", () => {
    expect(existsSync(table)).toBe(true);
    const rows = readErrorTableCsv(table);
    const slopes = plotConvergence(table, join(out, "acceptance.svg"));
    const mean = (vals: Array<number | null>) => {
      const xs = vals.filter((v): v is number => v !== null);
      return xs.reduce((a, b) => a + b, 0) / xs.length;
    };
    expect(Math.abs(slopes.d - mean(rows.map((r) => r.rateD)))).toBeLessThan(0.05);
    expect(Math.abs(slopes.w - mean(rows.map((r) => r.rateW)))).toBeLessThan(0.05);
    expect(Math.abs(slopes.energy - mean(rows.map((r) => r.rateEnergy)))).toBeLessThan(0.05);
  });
});
