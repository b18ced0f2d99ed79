/**
 * Pure view computations: everything here maps the last server response plus
 * widget state (stage slider, hover cell) to plain display data. No physics
 * is recomputed client-side.
 */

import type {
  ComplexJson,
  DensityJson,
  SimulateResponse,
  TraceEntry,
  VqeIteration,
} from "./types.js";

export interface Bar {
  bitstring: string;
  probability: number;
  /** 0..1 height fraction relative to the tallest bar. */
  height: number;
}

export function probabilityBars(
  probabilities: Record<string, number>,
  minProbability = 1e-6,
): Bar[] {
  const entries = Object.entries(probabilities)
    .filter(([, p]) => p >= minProbability)
    .sort(([a], [b]) => (a < b ? -1 : 1));
  const top = Math.max(...entries.map(([, p]) => p), 0);
  return entries.map(([bitstring, probability]) => ({
    bitstring,
    probability,
    height: top > 0 ? probability / top : 0,
  }));
}

export interface HeatmapCell {
  row: number;
  col: number;
  magnitude: number;
  /** CSS color, dark-to-light with magnitude. */
  color: string;
  /** Exact value surfaced on hover. */
  tooltip: string;
}

export function heatmapCells(matrix: number[][]): HeatmapCell[] {
  const top = Math.max(...matrix.map((row) => Math.max(...row)), 1e-300);
  const cells: HeatmapCell[] = [];
  matrix.forEach((row, r) =>
    row.forEach((magnitude, c) => {
      const t = magnitude / top;
      const shade = Math.round(255 * t);
      cells.push({
        row: r,
        col: c,
        magnitude,
        color: `rgb(${shade}, ${Math.round(shade * 0.45)}, ${255 - shade})`,
        tooltip: `|U[${r}][${c}]| = ${magnitude.toFixed(12)}`,
      });
    }),
  );
  return cells;
}

export interface BlochPoint {
  qubit: number;
  x: number;
  y: number;
  z: number;
  /** Orthographic screen projection in [-1, 1]^2, y-down. */
  screenX: number;
  screenY: number;
  /** Vector length; < 1 for mixed reduced states. */
  radius: number;
}

export function blochPoints(entry: TraceEntry): BlochPoint[] {
  // fixed isometric-ish camera: x out toward lower-left, y to the right, z up
  return entry.bloch.map(([x, y, z], qubit) => ({
    qubit,
    x,
    y,
    z,
    screenX: y + x * -0.5 * Math.SQRT1_2,
    screenY: -z + x * 0.5 * Math.SQRT1_2,
    radius: Math.hypot(x, y, z),
  }));
}

export function stageAtSlider(
  response: SimulateResponse,
  slider: number,
): TraceEntry | null {
  const trace = response.trace;
  if (!trace || trace.length === 0) return null;
  const index = Math.min(Math.max(Math.round(slider), 0), trace.length - 1);
  return trace[index] ?? null;
}

export interface DensityCell {
  row: number;
  col: number;
  value: ComplexJson;
  magnitude: number;
  tooltip: string;
}

export function densityCells(density: DensityJson): DensityCell[] {
  const cells: DensityCell[] = [];
  density.entries.forEach((row, r) =>
    row.forEach((value, c) => {
      cells.push({
        row: r,
        col: c,
        value,
        magnitude: Math.hypot(value.re, value.im),
        tooltip: `rho[${r}][${c}] = ${value.re.toFixed(6)} ${value.im < 0 ? "-" : "+"} ${Math.abs(value.im).toFixed(6)}i`,
      });
    }),
  );
  return cells;
}

export interface VqeChartState {
  iterations: number[];
  costs: number[];
  amplitudes: number[];
  crossedThresholdAt: number | null;
}

export function emptyVqeChart(): VqeChartState {
  return { iterations: [], costs: [], amplitudes: [], crossedThresholdAt: null };
}

export function appendVqePoint(
  chart: VqeChartState,
  point: VqeIteration,
  threshold = 0.9,
): VqeChartState {
  const crossed =
    chart.crossedThresholdAt ??
    (point.solution_prob >= threshold ? point.iter : null);
  return {
    iterations: [...chart.iterations, point.iter],
    costs: [...chart.costs, point.cost],
    amplitudes: [...chart.amplitudes, point.solution_prob],
    crossedThresholdAt: crossed,
  };
}

/**
 * Least-squares slope of the cost curve; a downward trend is negative.
 * Used for the trend badge next to the live chart.
 */
export function costTrendSlope(chart: VqeChartState): number {
  const n = chart.costs.length;
  if (n < 2) return 0;
  const meanX = chart.iterations.reduce((a, b) => a + b, 0) / n;
  const meanY = chart.costs.reduce((a, b) => a + b, 0) / n;
  let num = 0;
  let den = 0;
  for (let i = 0; i < n; i++) {
    const dx = chart.iterations[i]! - meanX;
    num += dx * (chart.costs[i]! - meanY);
    den += dx * dx;
  }
  return den > 0 ? num / den : 0;
}
