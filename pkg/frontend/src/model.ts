/**
 * Editor-side circuit model. Mutating actions validate against the same rules
 * the server enforces, so any state reachable through them serializes to a
 * circuit document the service accepts.
 */

import type { CircuitJson, GateDescriptor, NoiseJson } from "./types.js";

export const IDENTITY = "I";
export const CONTROL = "C";
export const SWAP = "SW";

/** Gates writable into a single cell (markers handled separately). */
const SIMPLE_GATES = new Set([
  "I", "X", "Y", "Z", "H", "S", "T", "SD", "TD", "SX", "SXD",
]);
const PARAM_GATES: Record<string, number> = {
  U1: 1, U2: 2, U3: 3, RX: 1, RY: 1, RZ: 1,
};

export type ActionResult = { ok: true } | { ok: false; error: string };

const ok: ActionResult = { ok: true };
const fail = (error: string): ActionResult => ({ ok: false, error });

export function formatGateToken(name: string, params: number[]): string {
  const upper = name.toUpperCase();
  if (params.length === 0) return upper;
  return `${upper}(${params.map((p) => String(p)).join(",")})`;
}

/** Column-level rule shared with the server: controls need one X target, swaps pair up. */
export function validateColumn(cells: string[]): string | null {
  const controls = cells.filter((c) => c === CONTROL).length;
  const swaps = cells.filter((c) => c === SWAP).length;
  const targets = cells.filter((c) => c === "X").length;
  if (controls > 0) {
    if (controls > 2) return "at most two controls per column";
    if (targets !== 1) return "control markers need exactly one X target in the column";
    if (swaps > 0) return "controls and swaps cannot share a column";
  }
  if (swaps > 0 && swaps !== 2) return "swap needs exactly two SW markers in the column";
  return null;
}

export class DesignerState {
  grid: string[][] = []; // [qubit][stage] cell tokens
  init: number[] = []; // per-qubit 0/1 toggles, index = qubit number
  labels: string[] = [];
  measured = new Set<number>();
  noise: NoiseJson | null = null;
  catalog = new Map<string, GateDescriptor>();

  constructor(numQubits = 2, numStages = 4) {
    for (let q = 0; q < numQubits; q++) this.pushQubitRow(numStages);
  }

  get numQubits(): number {
    return this.grid.length;
  }

  get numStages(): number {
    return this.grid[0]?.length ?? 0;
  }

  loadCatalog(gates: GateDescriptor[]): void {
    this.catalog = new Map(gates.map((g) => [g.name, g]));
  }

  private pushQubitRow(stages: number): void {
    this.grid.push(new Array<string>(stages).fill(IDENTITY));
    this.init.push(0); // new rows default to |0>
    this.labels.push(`q${this.grid.length - 1}`);
  }

  addQubit(): ActionResult {
    if (this.numQubits >= 24) return fail("qubit cap is 24");
    this.pushQubitRow(this.numStages);
    return ok;
  }

  removeQubit(): ActionResult {
    if (this.numQubits <= 1) return fail("need at least one qubit");
    const q = this.numQubits - 1;
    const row = this.grid[q]!;
    for (let s = 0; s < row.length; s++) {
      if (row[s] !== IDENTITY) {
        const column = this.columnWithout(s, q);
        const problem = validateColumn(column);
        if (problem) return fail(`removing q${q} breaks stage ${s + 1}: ${problem}`);
      }
    }
    this.grid.pop();
    this.init.pop();
    this.labels.pop();
    this.measured.delete(q);
    return ok;
  }

  addStage(): ActionResult {
    for (const row of this.grid) row.push(IDENTITY);
    return ok;
  }

  removeStage(): ActionResult {
    if (this.numStages <= 1) return fail("need at least one stage");
    for (const row of this.grid) row.pop();
    return ok;
  }

  private column(s: number): string[] {
    return this.grid.map((row) => row[s]!);
  }

  private columnWithout(s: number, withoutQubit: number): string[] {
    return this.grid
      .filter((_, q) => q !== withoutQubit)
      .map((row) => row[s]!);
  }

  private tryCell(q: number, s: number, token: string): ActionResult {
    if (q < 0 || q >= this.numQubits) return fail(`no qubit ${q}`);
    if (s < 0 || s >= this.numStages) return fail(`no stage ${s + 1}`);
    const previous = this.grid[q]![s]!;
    this.grid[q]![s] = token;
    const problem = validateColumn(this.column(s));
    if (problem) {
      this.grid[q]![s] = previous;
      return fail(problem);
    }
    return ok;
  }

  /** Drop a gate from the palette onto a cell. */
  placeGate(q: number, s: number, name: string, params: number[] = []): ActionResult {
    const upper = name.toUpperCase();
    const arity = PARAM_GATES[upper];
    if (arity !== undefined) {
      if (params.length !== arity) {
        return fail(`${upper} takes ${arity} angle parameter(s)`);
      }
      if (params.some((p) => !Number.isFinite(p))) {
        return fail("angles must be finite numbers");
      }
      return this.tryCell(q, s, formatGateToken(upper, params));
    }
    if (!SIMPLE_GATES.has(upper)) return fail(`unknown gate ${name}`);
    return this.tryCell(q, s, upper);
  }

  placeControl(q: number, s: number): ActionResult {
    return this.tryCell(q, s, CONTROL);
  }

  /** Place both halves of a swap at once so the column stays valid. */
  placeSwap(q1: number, q2: number, s: number): ActionResult {
    if (q1 === q2) return fail("swap needs two distinct qubits");
    const first = this.tryCell(q1, s, SWAP);
    if (!first.ok) {
      // a lone SW is invalid per column rules; force-place then pair up
      const previous = this.grid[q1]![s]!;
      this.grid[q1]![s] = SWAP;
      const second = this.tryCell(q2, s, SWAP);
      if (!second.ok) {
        this.grid[q1]![s] = previous;
        return second;
      }
      return ok;
    }
    return this.tryCell(q2, s, SWAP);
  }

  clearCell(q: number, s: number): ActionResult {
    return this.tryCell(q, s, IDENTITY);
  }

  toggleInit(q: number): ActionResult {
    if (q < 0 || q >= this.numQubits) return fail(`no qubit ${q}`);
    this.init[q] = this.init[q] ? 0 : 1;
    return ok;
  }

  toggleMeasure(q: number): ActionResult {
    if (q < 0 || q >= this.numQubits) return fail(`no qubit ${q}`);
    if (this.measured.has(q)) this.measured.delete(q);
    else this.measured.add(q);
    return ok;
  }

  setLabel(q: number, label: string): ActionResult {
    if (q < 0 || q >= this.numQubits) return fail(`no qubit ${q}`);
    const trimmed = label.trim();
    if (!/^[A-Za-z][A-Za-z0-9_]*$/.test(trimmed)) {
      return fail("labels are alphanumeric identifier-like names");
    }
    this.labels[q] = trimmed;
    return ok;
  }

  setNoise(noise: NoiseJson | null): ActionResult {
    if (noise) {
      const cap = Math.pow(4, this.numQubits) / (Math.pow(4, this.numQubits) - 1);
      if (!(noise.p >= 0 && noise.p <= cap)) {
        return fail(`error rate must lie in [0, ${cap.toFixed(6)}]`);
      }
      if (noise.mode !== "overshoot" && noise.mode !== "stochastic") {
        return fail("noise mode is overshoot or stochastic");
      }
    }
    this.noise = noise;
    return ok;
  }

  /** Serialize the grid for the service; highest qubit leftmost in init. */
  toCircuitJson(): CircuitJson {
    const bits = [...this.init].reverse().join("");
    return {
      format_version: 1,
      num_qubits: this.numQubits,
      num_stages: this.numStages,
      init: bits,
      labels: [...this.labels],
      grid: this.grid.map((row) => [...row]),
      measure: [...this.measured].sort((a, b) => a - b),
      noise: this.noise,
    };
  }

  loadCircuitJson(doc: CircuitJson): ActionResult {
    if (doc.format_version !== 1) return fail("unsupported format version");
    for (let s = 0; s < doc.num_stages; s++) {
      const column = doc.grid.map((row) => row[s] ?? IDENTITY);
      const problem = validateColumn(column.map(baseToken));
      if (problem) return fail(`stage ${s + 1}: ${problem}`);
    }
    this.grid = doc.grid.map((row) => [...row]);
    this.init = [...doc.init].reverse().map((c) => (c === "1" ? 1 : 0));
    this.labels = [...doc.labels];
    this.measured = new Set(doc.measure);
    this.noise = doc.noise ?? null;
    return ok;
  }
}

/** Strip any parameter list so validation sees the bare gate name. */
function baseToken(token: string): string {
  const paren = token.indexOf("(");
  return paren < 0 ? token : token.slice(0, paren);
}
