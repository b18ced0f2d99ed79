"""Built-in validation circuits: full adder, Deutsch-Jozsa, Grover, VQE ansatz.

Layouts are reconstructions; what is pinned down is their measured output
(full-adder truth table, DJ |1111>, Grover P(110) = 121/128), which the test
suite checks against independent oracles.
"""
from __future__ import annotations

from .circuit import (
    CONTROL_CELL,
    IDENTITY_CELL,
    Circuit,
    CircuitCell,
    KIND_GATE,
)
from .gates import GateSpec


class _Builder:
    """Column-at-a-time circuit assembly; unspecified cells are identity."""

    def __init__(self, num_qubits: int):
        self.n = num_qubits
        self.columns: list[list[CircuitCell]] = []

    def column(self, cells: dict[int, CircuitCell]) -> "_Builder":
        col = [IDENTITY_CELL] * self.n
        for q, cell in cells.items():
            col[q] = cell
        self.columns.append(col)
        return self

    def gates(self, placements: dict[int, str]) -> "_Builder":
        return self.column(
            {q: CircuitCell(KIND_GATE, GateSpec(name)) for q, name in placements.items()}
        )

    def gate_all(self, name: str) -> "_Builder":
        return self.gates({q: name for q in range(self.n)})

    def cnot(self, control: int, target: int) -> "_Builder":
        return self.column(
            {control: CONTROL_CELL, target: CircuitCell(KIND_GATE, GateSpec("X"))}
        )

    def toffoli(self, c1: int, c2: int, target: int) -> "_Builder":
        return self.column(
            {
                c1: CONTROL_CELL,
                c2: CONTROL_CELL,
                target: CircuitCell(KIND_GATE, GateSpec("X")),
            }
        )

    def ry(self, q: int, theta: float) -> "_Builder":
        return self.column({q: CircuitCell(KIND_GATE, GateSpec("RY", (theta,)))})

    def ry_layer(self, thetas) -> "_Builder":
        return self.column(
            {
                q: CircuitCell(KIND_GATE, GateSpec("RY", (float(t),)))
                for q, t in enumerate(thetas)
            }
        )

    def build(self, initial_bits, measured, labels=()) -> Circuit:
        grid = [
            [self.columns[s][q] for s in range(len(self.columns))] for q in range(self.n)
        ]
        return Circuit(
            self.n, len(self.columns), grid, tuple(initial_bits), tuple(measured), labels
        )


def full_adder(a: int = 0, b: int = 0, cin: int = 0) -> Circuit:
    """5-qubit reversible adder: inputs on q0..q2, sum on q3, carry on q4.

    Carry = AB xor ACin xor BCin (three Toffolis), sum = A xor B xor Cin
    (three CNOTs); ancillas q3, q4 start at 0.
    """
    bld = _Builder(5)
    bld.toffoli(0, 1, 4).toffoli(0, 2, 4).toffoli(1, 2, 4)
    bld.cnot(0, 3).cnot(1, 3).cnot(2, 3)
    return bld.build(
        (a, b, cin, 0, 0), (3, 4), labels=("A", "B", "Cin", "S", "Cout")
    )


def dj_balanced() -> Circuit:
    """Deutsch-Jozsa on 4 input qubits with the parity oracle (balanced).

    Ancilla q4 is flipped to |1>, Hadamards everywhere, oracle
    f(x) = x0 xor x1 xor x2 xor x3 as four CNOTs into q4, Hadamards on the
    inputs. Measuring q0..q3 yields |1111> with certainty.
    """
    bld = _Builder(5)
    bld.gates({4: "X"})
    bld.gate_all("H")
    for q in range(4):
        bld.cnot(q, 4)
    bld.gates({q: "H" for q in range(4)})
    return bld.build((0,) * 5, (0, 1, 2, 3))


def _grover_cc_z(bld: _Builder) -> None:
    # CCZ on (q2, q1; q0) via H-conjugated Toffoli
    bld.gates({0: "H"})
    bld.toffoli(1, 2, 0)
    bld.gates({0: "H"})


def grover3_110() -> Circuit:
    """Two Grover iterations over 3 qubits searching for |110>.

    Qubits start at |110> encoding the search target; the first column maps
    that register back to |000> before the standard superposition, oracle and
    mean-inversion stages. Final P(110) = 121/128.
    """
    bld = _Builder(3)
    bld.gates({1: "X", 2: "X"})  # |110> -> |000>
    bld.gate_all("H")
    for _ in range(2):
        # oracle: flip the phase of |110>  (q0 = 0, q1 = q2 = 1)
        bld.gates({0: "X"})
        _grover_cc_z(bld)
        bld.gates({0: "X"})
        # diffusion: inversion about the mean
        bld.gate_all("H")
        bld.gate_all("X")
        _grover_cc_z(bld)
        bld.gate_all("X")
        bld.gate_all("H")
    return bld.build((0, 1, 1), (0, 1, 2))


def vqe_ansatz(params, num_qubits: int, layers: int) -> Circuit:
    """Hardware-efficient ansatz: RY layers interleaved with CNOT chains.

    ``params`` has (layers + 1) * num_qubits angles, bound positionally,
    one RY per qubit per layer plus a final rotation layer.
    """
    params = [float(p) for p in params]
    expected = (layers + 1) * num_qubits
    if len(params) != expected:
        raise ValueError(f"expected {expected} parameters, got {len(params)}")
    bld = _Builder(num_qubits)
    it = iter(params)
    for _ in range(layers):
        bld.ry_layer([next(it) for _ in range(num_qubits)])
        for q in range(num_qubits - 1):
            bld.cnot(q, q + 1)
    bld.ry_layer([next(it) for _ in range(num_qubits)])
    return bld.build((0,) * num_qubits, tuple(range(num_qubits)))


def vqe_91_ansatz() -> Circuit:
    """The 5-qubit, 3-layer variational circuit used for factoring 91 (zero angles)."""
    return vqe_ansatz([0.0] * 20, 5, 3)


def builtin_circuits() -> dict[str, Circuit]:
    return {
        "full_adder": full_adder(),
        "dj_balanced": dj_balanced(),
        "grover3_110": grover3_110(),
        "vqe_91_ansatz": vqe_91_ansatz(),
    }
