/** Wire types shared with the simulation service (/api/v1). */

export interface GateDescriptor {
  name: string;
  num_qubits: number;
  param_names: string[];
  matrix_dim: number;
}

export interface ComplexJson {
  re: number;
  im: number;
}

export interface NoiseJson {
  p: number;
  mode: "overshoot" | "stochastic";
  seed: number;
}

/** Circuit document as POSTed to /api/v1/simulate and dumped by the CLI. */
export interface CircuitJson {
  format_version: 1;
  num_qubits: number;
  num_stages: number;
  init: string;
  labels: string[];
  grid: string[][];
  measure: number[];
  noise?: NoiseJson | null;
}

export interface DensityJson {
  num_qubits: number;
  trace: number;
  entries: ComplexJson[][];
}

export interface TraceEntry {
  stage: number;
  state: ComplexJson[];
  bloch: [number, number, number][];
}

export interface SimulateRequest {
  circuit: CircuitJson;
  mode?: "matrix" | "vector";
  include_trace?: boolean;
  include_density?: boolean;
  noise?: NoiseJson | null;
}

export interface SimulateResponse {
  mode: "matrix" | "vector";
  num_qubits: number;
  num_stages: number;
  measured_qubits: number[];
  probabilities: Record<string, number>;
  heatmap?: number[][];
  trace?: TraceEntry[];
  density_noiseless?: DensityJson;
  density_noisy?: DensityJson;
}

export interface VqeRequest {
  target: number;
  bits_p?: number;
  bits_q?: number;
  layers?: number;
  learning_rate?: number;
  max_iters?: number;
  convergence_amplitude?: number;
  seed?: number;
  init_scale?: number;
}

export interface VqeIteration {
  iter: number;
  cost: number;
  solution_prob: number;
  top_states: [string, number][];
}

export interface VqeResult {
  cost_curve: number[];
  solution_prob_curve: number[];
  converged_at: number | null;
  best_bitstring: string;
  recovered_factors: [number, number] | null;
}

export type VqeEvent =
  | { kind: "iteration"; data: VqeIteration }
  | { kind: "result"; data: VqeResult }
  | { kind: "error"; message: string };
