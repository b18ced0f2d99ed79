/** DOM wiring for the circuit designer. All state lives in DesignerState +
 * the last server response; rendering is delegated to the pure view layer. */

import { ApiClient } from "./api.js";
import { DesignerState, CONTROL, SWAP } from "./model.js";
import type { GateDescriptor, SimulateResponse, VqeEvent } from "./types.js";
import {
  appendVqePoint,
  blochPoints,
  densityCells,
  emptyVqeChart,
  heatmapCells,
  probabilityBars,
  stageAtSlider,
  type VqeChartState,
} from "./views.js";

const api = new ApiClient(window.location.origin.replace(/:\d+$/, ":8760"));
const state = new DesignerState(3, 6);
let lastResponse: SimulateResponse | null = null;
let selectedGate: string | null = null;
let vqeChart: VqeChartState = emptyVqeChart();
let vqeAbort: AbortController | null = null;
let simulateInFlight = false;

const $ = <T extends HTMLElement>(id: string): T =>
  document.getElementById(id) as T;

function flash(message: string): void {
  const box = $("status");
  box.textContent = message;
  box.classList.add("error");
  setTimeout(() => box.classList.remove("error"), 2500);
}

function renderPalette(gates: GateDescriptor[]): void {
  const palette = $("palette");
  palette.replaceChildren();
  const markerNames = [CONTROL, SWAP];
  for (const gate of gates.filter((g) => g.num_qubits === 1)) {
    const button = document.createElement("button");
    button.textContent = gate.name;
    button.title =
      gate.param_names.length > 0
        ? `${gate.name}(${gate.param_names.join(", ")})`
        : gate.name;
    button.onclick = () => {
      selectedGate = gate.name;
      [...palette.children].forEach((b) => b.classList.remove("selected"));
      button.classList.add("selected");
    };
    palette.append(button);
  }
  for (const marker of markerNames) {
    const button = document.createElement("button");
    button.textContent = marker === CONTROL ? "● ctrl" : "× swap";
    button.onclick = () => {
      selectedGate = marker;
      [...palette.children].forEach((b) => b.classList.remove("selected"));
      button.classList.add("selected");
    };
    palette.append(button);
  }
}

function handleDrop(q: number, s: number): void {
  if (!selectedGate) return;
  let result;
  if (selectedGate === CONTROL) {
    result = state.placeControl(q, s);
  } else if (selectedGate === SWAP) {
    const otherRaw = prompt(`swap q${q} with which qubit?`, String((q + 1) % state.numQubits));
    if (otherRaw === null) return;
    result = state.placeSwap(q, Number(otherRaw), s);
  } else {
    const descriptor = [...state.catalog.values()].find((g) => g.name === selectedGate);
    const params: number[] = [];
    for (const name of descriptor?.param_names ?? []) {
      const raw = prompt(`${selectedGate}: angle ${name} (radians)`, "0");
      if (raw === null) return;
      params.push(Number(raw));
    }
    result = state.placeGate(q, s, selectedGate, params);
  }
  if (!result.ok) flash(result.error);
  renderGrid();
}

function renderGrid(): void {
  const table = $("grid");
  table.replaceChildren();
  for (let q = 0; q < state.numQubits; q++) {
    const row = document.createElement("tr");
    const head = document.createElement("th");
    const initButton = document.createElement("button");
    initButton.textContent = `|${state.init[q]}⟩`;
    initButton.title = "toggle initial state";
    initButton.onclick = () => {
      state.toggleInit(q);
      renderGrid();
    };
    const measureBox = document.createElement("input");
    measureBox.type = "checkbox";
    measureBox.checked = state.measured.has(q);
    measureBox.title = "measure this qubit";
    measureBox.onchange = () => state.toggleMeasure(q);
    head.append(`${state.labels[q]} `, initButton, measureBox);
    row.append(head);
    for (let s = 0; s < state.numStages; s++) {
      const cell = document.createElement("td");
      cell.textContent = state.grid[q]![s]!;
      cell.onclick = () => handleDrop(q, s);
      cell.oncontextmenu = (e) => {
        e.preventDefault();
        const result = state.clearCell(q, s);
        if (!result.ok) flash(result.error);
        renderGrid();
      };
      row.append(cell);
    }
    table.append(row);
  }
}

function renderResults(): void {
  const response = lastResponse;
  if (!response) return;
  const bars = $("bars");
  bars.replaceChildren();
  for (const bar of probabilityBars(response.probabilities)) {
    const column = document.createElement("div");
    column.className = "bar";
    column.style.height = `${Math.round(bar.height * 160)}px`;
    column.title = `${bar.bitstring}: ${bar.probability.toFixed(12)}`;
    const label = document.createElement("span");
    label.textContent = bar.bitstring;
    column.append(label);
    bars.append(column);
  }

  const heatmap = $("heatmap");
  heatmap.replaceChildren();
  if (response.heatmap) {
    const dim = response.heatmap.length;
    heatmap.style.gridTemplateColumns = `repeat(${dim}, 1fr)`;
    for (const cell of heatmapCells(response.heatmap)) {
      const div = document.createElement("div");
      div.style.background = cell.color;
      div.title = cell.tooltip;
      heatmap.append(div);
    }
  }

  const densities = $("densities");
  densities.replaceChildren();
  for (const [title, density] of [
    ["noiseless", response.density_noiseless],
    ["noisy", response.density_noisy],
  ] as const) {
    if (!density) continue;
    const panel = document.createElement("div");
    panel.append(Object.assign(document.createElement("h3"), { textContent: title }));
    const grid = document.createElement("div");
    grid.className = "density";
    grid.style.gridTemplateColumns = `repeat(${density.entries.length}, 1fr)`;
    for (const cell of densityCells(density)) {
      const div = document.createElement("div");
      const shade = Math.round(255 * Math.min(cell.magnitude, 1));
      div.style.background = `rgb(${shade}, ${shade}, ${255 - shade})`;
      div.title = cell.tooltip;
      grid.append(div);
    }
    panel.append(grid);
    densities.append(panel);
  }

  renderBloch();
}

function renderBloch(): void {
  const response = lastResponse;
  const svg = $("bloch") as unknown as SVGSVGElement;
  svg.replaceChildren();
  if (!response) return;
  const slider = $("stage-slider") as HTMLInputElement;
  slider.max = String((response.trace?.length ?? 1) - 1);
  const entry = stageAtSlider(response, Number(slider.value));
  if (!entry) return;
  const size = 90;
  blochPoints(entry).forEach((point, i) => {
    const cx = 50 + i * 110;
    const circle = document.createElementNS("http://www.w3.org/2000/svg", "circle");
    circle.setAttribute("cx", String(cx));
    circle.setAttribute("cy", "60");
    circle.setAttribute("r", String(size / 2));
    circle.setAttribute("class", "sphere");
    const dot = document.createElementNS("http://www.w3.org/2000/svg", "circle");
    dot.setAttribute("cx", String(cx + (point.screenX * size) / 2));
    dot.setAttribute("cy", String(60 + (point.screenY * size) / 2));
    dot.setAttribute("r", "4");
    dot.setAttribute("class", "tip");
    const title = document.createElementNS("http://www.w3.org/2000/svg", "title");
    title.textContent = `q${point.qubit}: (${point.x.toFixed(4)}, ${point.y.toFixed(4)}, ${point.z.toFixed(4)})`;
    dot.append(title);
    svg.append(circle, dot);
  });
}

async function runSimulation(): Promise<void> {
  if (simulateInFlight) return; // one request in flight at a time
  simulateInFlight = true;
  try {
    const noiseP = Number(($("noise-p") as HTMLInputElement).value);
    const useNoise = ($("noise-on") as HTMLInputElement).checked;
    if (useNoise) {
      const set = state.setNoise({ p: noiseP, mode: "overshoot", seed: 0 });
      if (!set.ok) {
        flash(set.error);
        return;
      }
    } else {
      state.setNoise(null);
    }
    lastResponse = await api.simulate({
      circuit: state.toCircuitJson(),
      mode: state.numQubits <= 12 ? "matrix" : "vector",
      include_trace: true,
      include_density: useNoise && state.numQubits <= 8,
    });
    renderResults();
  } catch (error) {
    flash(String(error));
  } finally {
    simulateInFlight = false;
  }
}

function renderVqeChart(): void {
  const costCanvas = $("vqe-cost") as HTMLCanvasElement;
  const ampCanvas = $("vqe-amp") as HTMLCanvasElement;
  drawSeries(costCanvas, vqeChart.costs, null);
  drawSeries(ampCanvas, vqeChart.amplitudes, 0.9);
  $("vqe-status").textContent =
    vqeChart.crossedThresholdAt !== null
      ? `amplitude crossed 0.90 at iteration ${vqeChart.crossedThresholdAt}`
      : `${vqeChart.costs.length} iterations`;
}

function drawSeries(canvas: HTMLCanvasElement, values: number[], line: number | null): void {
  const ctx = canvas.getContext("2d");
  if (!ctx || values.length === 0) return;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const top = Math.max(...values, line ?? 0, 1e-12);
  ctx.beginPath();
  values.forEach((v, i) => {
    const x = (i / Math.max(values.length - 1, 1)) * canvas.width;
    const y = canvas.height - (v / top) * canvas.height;
    i === 0 ? ctx.moveTo(x, y) : ctx.lineTo(x, y);
  });
  ctx.strokeStyle = "#0a6";
  ctx.stroke();
  if (line !== null) {
    const y = canvas.height - (line / top) * canvas.height;
    ctx.strokeStyle = "#c33";
    ctx.setLineDash([4, 4]);
    ctx.beginPath();
    ctx.moveTo(0, y);
    ctx.lineTo(canvas.width, y);
    ctx.stroke();
    ctx.setLineDash([]);
  }
}

async function startVqe(): Promise<void> {
  if (vqeAbort) return; // one stream at a time
  const target = Number(($("vqe-target") as HTMLInputElement).value);
  if (!Number.isInteger(target) || target < 3 || target % 2 === 0) {
    flash("target must be an odd integer ≥ 3");
    return;
  }
  vqeChart = emptyVqeChart();
  vqeAbort = new AbortController();
  try {
    const stream = api.vqeStream(
      { target, seed: Number(($("vqe-seed") as HTMLInputElement).value) },
      vqeAbort.signal,
    );
    for await (const event of stream) {
      handleVqeEvent(event);
    }
  } catch (error) {
    if (!vqeAbort.signal.aborted) flash(`stream interrupted: ${error}`);
  } finally {
    vqeAbort = null;
  }
}

function handleVqeEvent(event: VqeEvent): void {
  if (event.kind === "iteration") {
    vqeChart = appendVqePoint(vqeChart, event.data);
    renderVqeChart();
  } else if (event.kind === "result") {
    const factors = event.data.recovered_factors;
    $("vqe-status").textContent = factors
      ? `done: ${factors[0]} × ${factors[1]}`
      : "did not converge";
  } else {
    flash(event.message);
  }
}

async function boot(): Promise<void> {
  const gates = await api.gates();
  state.loadCatalog(gates);
  renderPalette(gates);
  renderGrid();

  const fixtures = await api.fixtures();
  const menu = $("fixtures") as HTMLSelectElement;
  for (const name of Object.keys(fixtures)) {
    menu.append(Object.assign(document.createElement("option"), { value: name, textContent: name }));
  }
  menu.onchange = () => {
    const doc = fixtures[menu.value];
    if (doc) {
      const loaded = state.loadCircuitJson(doc);
      if (!loaded.ok) flash(loaded.error);
      renderGrid();
    }
  };

  $("add-qubit").onclick = () => { state.addQubit(); renderGrid(); };
  $("remove-qubit").onclick = () => {
    const r = state.removeQubit();
    if (!r.ok) flash(r.error);
    renderGrid();
  };
  $("add-stage").onclick = () => { state.addStage(); renderGrid(); };
  $("remove-stage").onclick = () => {
    const r = state.removeStage();
    if (!r.ok) flash(r.error);
    renderGrid();
  };
  $("run").onclick = () => void runSimulation();
  ($("stage-slider") as HTMLInputElement).oninput = renderBloch;
  $("vqe-start").onclick = () => void startVqe();
  $("vqe-stop").onclick = () => vqeAbort?.abort();

  $("export-json").onclick = () => {
    const blob = new Blob([JSON.stringify(state.toCircuitJson(), null, 2)], {
      type: "application/json",
    });
    const link = Object.assign(document.createElement("a"), {
      href: URL.createObjectURL(blob),
      download: "circuit.json",
    });
    link.click();
  };
  ($("import-json") as HTMLInputElement).onchange = async (e) => {
    const file = (e.target as HTMLInputElement).files?.[0];
    if (!file) return;
    const loaded = state.loadCircuitJson(JSON.parse(await file.text()));
    if (!loaded.ok) flash(loaded.error);
    renderGrid();
  };
}

void boot();
