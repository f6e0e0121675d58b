/**
 * Reader for the solver's binary field snapshots.
 *
 * Layout (little endian): 72-byte header — magic "WAVEMAPS" (8 bytes),
 * format version u32, dim u32, spacings-per-axis M u32, boundary code u32
 * (0 periodic, 1 neumann), step index u64, time f64, origin 3xf64,
 * extent f64 — followed by the director and angular-momentum arrays as
 * row-major f64 triples.
 */

import { readFileSync } from "node:fs";

export interface Snapshot {
  dim: number;
  m: number;
  bc: "periodic" | "neumann";
  stepIndex: number;
  t: number;
  origin: [number, number, number];
  extent: number;
  nodesPerAxis: number;
  h: number;
  /** director values, length nodesPerAxis^dim * 3 */
  d: Float64Array;
  /** angular-momentum values, same layout */
  w: Float64Array;
}

const MAGIC = "WAVEMAPS";
const HEADER_BYTES = 72;

export function readSnapshot(path: string): Snapshot {
  const buf = readFileSync(path);
  if (buf.byteLength < HEADER_BYTES) {
    throw new Error(`${path}: truncated header, ${buf.byteLength} bytes `
      + `< ${HEADER_BYTES} (byte offset 0)`);
  }
  const view = new DataView(buf.buffer, buf.byteOffset, buf.byteLength);
  const magic = buf.toString("latin1", 0, 8);
  if (magic !== MAGIC) {
    throw new Error(`${path}: bad magic ${JSON.stringify(magic)} (byte offset 0)`);
  }
  const version = view.getUint32(8, true);
  if (version !== 1) {
    throw new Error(`${path}: unsupported version ${version} (byte offset 8)`);
  }
  const dim = view.getUint32(12, true);
  const m = view.getUint32(16, true);
  const bcCode = view.getUint32(20, true);
  if (bcCode !== 0 && bcCode !== 1) {
    throw new Error(`${path}: bad boundary code ${bcCode} (byte offset 20)`);
  }
  const stepIndex = Number(view.getBigUint64(24, true));
  const t = view.getFloat64(32, true);
  const origin: [number, number, number] = [
    view.getFloat64(40, true),
    view.getFloat64(48, true),
    view.getFloat64(56, true),
  ];
  const extent = view.getFloat64(64, true);

  const nodesPerAxis = bcCode === 0 ? m : m + 1;
  const count = nodesPerAxis ** dim * 3;
  const expected = HEADER_BYTES + 2 * count * 8;
  if (buf.byteLength !== expected) {
    throw new Error(`${path}: payload ends at byte ${buf.byteLength}, expected ${expected}`);
  }
  const d = new Float64Array(count);
  const w = new Float64Array(count);
  for (let i = 0; i < count; i++) {
    d[i] = view.getFloat64(HEADER_BYTES + 8 * i, true);
    w[i] = view.getFloat64(HEADER_BYTES + 8 * (count + i), true);
  }
  return {
    dim, m,
    bc: bcCode === 0 ? "periodic" : "neumann",
    stepIndex, t, origin, extent,
    nodesPerAxis,
    h: extent / m,
    d, w,
  };
}
