"""Circuit execution: algorithm-matrix mode and the faster state-vector mode.

Matrix mode materializes the full 2^N x 2^N product of stage operators
(stage 1 applied first, hence the rightmost factor). Vector mode applies each
column's gates directly to the state and never builds a full operator, so it
scales to more qubits. Mode equivalence for N <= 12 is the engine's central
correctness oracle.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Optional

import numpy as np

from .circuit import Circuit, KIND_CONTROL, KIND_GATE, KIND_SWAP, stage_operator
from .core import (
    ATOL,
    DENSITY_MAX_QUBITS,
    MATRIX_MODE_MAX_QUBITS,
    VECTOR_MODE_MAX_QUBITS,
    BlochVector,
    DensityMatrix,
    ResourceLimitError,
    StateVector,
    ValidationError,
    density_from_state,
)
from .gates import GateSpec, gate_matrix


@dataclass(frozen=True)
class TraceRecord:
    """Snapshot after ``stage_index`` columns (0 = initial state)."""

    stage_index: int
    state: StateVector
    density: Optional[DensityMatrix]
    bloch: tuple[BlochVector, ...]


@dataclass(frozen=True)
class MeasurementDistribution:
    """Marginal outcome probabilities over the measured qubits.

    Bitstring keys read with the highest-index measured qubit leftmost.
    """

    measured_qubits: tuple[int, ...]
    probabilities: dict[str, float]

    def __post_init__(self):
        total = sum(self.probabilities.values())
        if abs(total - 1.0) > ATOL:
            raise ValidationError(f"probabilities sum to {total}, not 1")


def initial_state(c: Circuit) -> StateVector:
    return StateVector.basis(c.num_qubits, c.initial_index())


def build_algorithm_matrix(c: Circuit) -> np.ndarray:
    """Ordered product U_M ... U_2 U_1 of all stage operators."""
    if c.num_qubits > MATRIX_MODE_MAX_QUBITS:
        raise ResourceLimitError(
            f"matrix mode caps at {MATRIX_MODE_MAX_QUBITS} qubits, got {c.num_qubits}"
        )
    ops = [stage_operator(c, s) for s in range(c.num_stages)]
    return reduce(lambda acc, u: u @ acc, ops, np.eye(1 << c.num_qubits, dtype=np.complex128))


# ---------------------------------------------------------------------------
# vector-mode gate kernels (state as ndarray, modified in place)


def _apply_1q(psi: np.ndarray, q: int, u: np.ndarray) -> None:
    step = 1 << q
    idx = np.arange(len(psi))
    i0 = idx[(idx >> q) & 1 == 0]
    i1 = i0 + step
    a, b = psi[i0], psi[i1]
    psi[i0] = u[0, 0] * a + u[0, 1] * b
    psi[i1] = u[1, 0] * a + u[1, 1] * b


def _apply_controlled_x(psi: np.ndarray, controls: list[int], target: int) -> None:
    idx = np.arange(len(psi))
    mask = np.ones(len(psi), dtype=bool)
    for cq in controls:
        mask &= (idx >> cq) & 1 == 1
    sel = idx[mask & ((idx >> target) & 1 == 0)]
    flipped = sel + (1 << target)
    psi[sel], psi[flipped] = psi[flipped].copy(), psi[sel].copy()


def _apply_swap(psi: np.ndarray, qa: int, qb: int) -> None:
    idx = np.arange(len(psi))
    a = (idx >> qa) & 1
    b = (idx >> qb) & 1
    sel = idx[(a == 1) & (b == 0)]
    other = sel - (1 << qa) + (1 << qb)
    psi[sel], psi[other] = psi[other].copy(), psi[sel].copy()


def apply_stage_to_array(c: Circuit, stage: int, psi: np.ndarray) -> None:
    """Apply one circuit column to a raw amplitude array in place."""
    cells = c.column(stage)
    controls = [q for q, cell in enumerate(cells) if cell.kind == KIND_CONTROL]
    swaps = [q for q, cell in enumerate(cells) if cell.kind == KIND_SWAP]
    for q, cell in enumerate(cells):
        if cell.kind != KIND_GATE or cell.is_identity:
            continue
        if controls and cell.gate.name == "X":
            continue  # handled below as the controlled target
        _apply_1q(psi, q, gate_matrix(cell.gate))
    if controls:
        target = next(
            q for q, cell in enumerate(cells) if cell.kind == KIND_GATE and cell.gate.name == "X"
        )
        _apply_controlled_x(psi, controls, target)
    elif swaps:
        _apply_swap(psi, swaps[0], swaps[1])


def _reduced_1q(psi: np.ndarray, n: int, q: int) -> DensityMatrix:
    t = np.moveaxis(psi.reshape([2] * n), n - 1 - q, 0).reshape(2, -1)
    return DensityMatrix(1, t @ t.conj().T)


def bloch_of_state(psi: np.ndarray, n: int) -> tuple[BlochVector, ...]:
    from .core import bloch_vector

    return tuple(bloch_vector(_reduced_1q(psi, n, q)) for q in range(n))


def _trace_record(c: Circuit, stage: int, psi: np.ndarray) -> TraceRecord:
    n = c.num_qubits
    state = StateVector(n, psi.copy())
    density = density_from_state(state) if n <= DENSITY_MAX_QUBITS else None
    return TraceRecord(stage, state, density, bloch_of_state(psi, n))


def run_vector_mode(c: Circuit, trace: bool = False):
    """Evolve the initial state column by column.

    Returns ``(final_state, records)``; ``records`` is empty unless ``trace``.
    """
    n = c.num_qubits
    if n > VECTOR_MODE_MAX_QUBITS:
        raise ResourceLimitError(
            f"vector mode caps at {VECTOR_MODE_MAX_QUBITS} qubits, got {n}"
        )
    psi = initial_state(c).amplitudes.copy()
    records = []
    if trace:
        records.append(_trace_record(c, 0, psi))
    for s in range(c.num_stages):
        apply_stage_to_array(c, s, psi)
        if trace:
            records.append(_trace_record(c, s + 1, psi))
    psi /= np.sqrt(np.sum(np.abs(psi) ** 2))
    return StateVector(n, psi), records


def run_matrix_mode(c: Circuit):
    """Final state via the full algorithm matrix (paper-faithful path)."""
    from .core import apply_unitary

    u = build_algorithm_matrix(c)
    return apply_unitary(u, initial_state(c)), u


def measure_distribution(state: StateVector, measured) -> MeasurementDistribution:
    measured = tuple(sorted(set(int(q) for q in measured)))
    if not measured:
        raise ValidationError("measured qubit set must be nonempty")
    if any(q < 0 or q >= state.num_qubits for q in measured):
        raise ValidationError(f"measured qubits {measured} out of range")
    probs = state.probabilities()
    idx = np.arange(len(probs))
    key = np.zeros(len(probs), dtype=np.int64)
    for j, q in enumerate(measured):
        key |= ((idx >> q) & 1) << j
    out: dict[str, float] = {}
    k = len(measured)
    for m in range(1 << k):
        p = float(probs[key == m].sum())
        bits = "".join(str((m >> j) & 1) for j in reversed(range(k)))
        out[bits] = p
    return MeasurementDistribution(measured, out)


def trace_bloch(c: Circuit) -> list[tuple[BlochVector, ...]]:
    """Per-stage Bloch vectors for every qubit (stage 0 = initial state)."""
    _, records = run_vector_mode(c, trace=True)
    return [r.bloch for r in records]
