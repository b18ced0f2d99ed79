import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from psitrum.circuit import (
    Circuit,
    CircuitParseError,
    IDENTITY_CELL,
    circuit_from_dict,
    circuit_to_dict,
    parse_circuit,
    parse_text_circuit,
    parse_token,
    serialize_circuit,
    stage_operator,
)
from psitrum.core import ValidationError, is_unitary, tensor_product
from psitrum.fixtures import builtin_circuits, full_adder
from psitrum.gates import GateSpec, gate_matrix

GOLDEN = Path(__file__).parent / "golden"

CNOT_EXAMPLE = """\
qubits 2 stages 2
init 00
q0: H , C
q1: I , X
measure 0 1
"""


class TestParse:
    def test_canonical_cnot_example(self):
        c = parse_text_circuit(CNOT_EXAMPLE)
        assert (c.num_qubits, c.num_stages) == (2, 2)
        assert c.grid[0][0].gate.name == "H"
        assert c.grid[0][1].kind == "control"
        assert c.grid[1][1].gate.name == "X"

    def test_single_row(self):
        c = parse_text_circuit("qubits 1 stages 1\ninit 0\nq0: X\nmeasure 0\n")
        assert c.num_qubits == 1 and c.grid[0][0].gate.name == "X"

    def test_parameterized_gate(self):
        cell = parse_token("RX(1.5708)")
        assert cell.gate == GateSpec("RX", (1.5708,))

    def test_ragged_row_rejected(self):
        src = "qubits 2 stages 2\ninit 00\nq0: H , H\nq1: I\nmeasure 0\n"
        with pytest.raises(CircuitParseError):
            parse_text_circuit(src)

    def test_unknown_token_rejected(self):
        with pytest.raises(CircuitParseError):
            parse_token("QQ")

    def test_dangling_control_rejected(self):
        src = "qubits 2 stages 1\ninit 00\nq0: C\nq1: I\nmeasure 0\n"
        with pytest.raises((CircuitParseError, ValidationError)):
            parse_text_circuit(src)

    def test_bad_param_syntax_rejected(self):
        with pytest.raises(CircuitParseError):
            parse_token("RX(abc)")
        with pytest.raises(CircuitParseError):
            parse_token("RX(1.0,2.0)")

    def test_init_bit_order(self):
        # init 10: qubit 0 (rightmost) clear, qubit 1 set
        src = "qubits 2 stages 1\ninit 10\nq0: I\nq1: I\nmeasure 0 1\n"
        c = parse_text_circuit(src)
        assert c.initial_bits == (0, 1)
        assert c.initial_index() == 2

    def test_format_version_checked(self):
        with pytest.raises(CircuitParseError):
            parse_text_circuit("format_version 9\n" + CNOT_EXAMPLE)


class TestRoundTrip:
    @pytest.mark.parametrize("name", sorted(builtin_circuits()))
    @pytest.mark.parametrize("fmt", ["text", "json"])
    def test_fixtures_round_trip(self, name, fmt):
        c = builtin_circuits()[name]
        assert parse_circuit(serialize_circuit(c, fmt)) == c

    def test_json_preserves_noise(self):
        c = builtin_circuits()["grover3_110"]
        d = circuit_to_dict(c)
        d["noise"] = {"p": 0.05, "mode": "overshoot", "seed": 3}
        c2 = circuit_from_dict(d)
        assert c2.noise == {"p": 0.05, "mode": "overshoot", "seed": 3}
        assert circuit_to_dict(c2)["noise"] == d["noise"]

    def test_empty_measurement_serializes(self):
        c = Circuit(1, 1, [[IDENTITY_CELL]], (0,), ())
        text = serialize_circuit(c, "text")
        assert "measure\n" in text or text.rstrip().endswith("measure")
        assert parse_text_circuit(text) == c

    def test_full_adder_golden_file(self):
        golden = (GOLDEN / "full_adder.pqc").read_text()
        assert serialize_circuit(full_adder(), "text") == golden

    @given(st.integers(min_value=0, max_value=2**31 - 1))
    @settings(max_examples=40, deadline=None)
    def test_random_circuits_round_trip(self, seed):
        c = _random_circuit(np.random.default_rng(seed))
        assert parse_circuit(serialize_circuit(c, "text")) == c
        assert parse_circuit(serialize_circuit(c, "json")) == c


def _random_circuit(rng, max_qubits=4, max_stages=6) -> Circuit:
    from psitrum.circuit import CONTROL_CELL, SWAP_CELL, CircuitCell, KIND_GATE
    from psitrum.gates import CATALOG

    n = int(rng.integers(1, max_qubits + 1))
    m = int(rng.integers(1, max_stages + 1))
    single = [name for name, info in CATALOG.items() if info.num_qubits == 1]
    cols = []
    for _ in range(m):
        col = [None] * n
        kind = rng.choice(["singles", "cnot", "toffoli", "swap"])
        if kind == "cnot" and n >= 2:
            qs = rng.choice(n, size=2, replace=False)
            col[qs[0]] = CONTROL_CELL
            col[qs[1]] = CircuitCell(KIND_GATE, GateSpec("X"))
        elif kind == "toffoli" and n >= 3:
            qs = rng.choice(n, size=3, replace=False)
            col[qs[0]] = CONTROL_CELL
            col[qs[1]] = CONTROL_CELL
            col[qs[2]] = CircuitCell(KIND_GATE, GateSpec("X"))
        elif kind == "swap" and n >= 2:
            qs = rng.choice(n, size=2, replace=False)
            col[qs[0]] = SWAP_CELL
            col[qs[1]] = SWAP_CELL
        has_controls = any(cell is CONTROL_CELL for cell in col)
        for q in range(n):
            if col[q] is None:
                # a second X in a control column would be ambiguous
                pool = [g for g in single if g != "X"] if has_controls else single
                name = str(rng.choice(pool))
                params = tuple(
                    float(x) for x in rng.uniform(0, 2 * np.pi, CATALOG[name].num_params)
                )
                col[q] = CircuitCell(KIND_GATE, GateSpec(name, params))
        cols.append(col)
    grid = [[cols[s][q] for s in range(m)] for q in range(n)]
    init = tuple(int(b) for b in rng.integers(0, 2, n))
    measured = tuple(q for q in range(n) if rng.random() < 0.7) or (0,)
    return Circuit(n, m, grid, init, measured)


class TestStageOperator:
    def test_all_identity_column(self):
        c = Circuit(3, 1, [[IDENTITY_CELL]] * 3, (0, 0, 0), (0,))
        assert np.array_equal(stage_operator(c, 0), np.eye(8))

    def test_h_on_qubit0(self):
        src = "qubits 2 stages 1\ninit 00\nq0: H\nq1: I\nmeasure 0\n"
        c = parse_text_circuit(src)
        expected = tensor_product(np.eye(2, dtype=complex), gate_matrix(GateSpec("H")))
        assert np.allclose(stage_operator(c, 0), expected, atol=1e-12)

    def test_cnot_arbitrary_placement_truth_table(self):
        # control q0, target q2 on 3 qubits: flip bit 2 iff bit 0 set
        src = "qubits 3 stages 1\ninit 000\nq0: C\nq1: I\nq2: X\nmeasure 0\n"
        c = parse_text_circuit(src)
        u = stage_operator(c, 0)
        for basis in range(8):
            expected = basis ^ (0b100 if basis & 1 else 0)
            col = u[:, basis]
            assert abs(col[expected] - 1.0) < 1e-12
            assert np.sum(np.abs(col)) == pytest.approx(1.0, abs=1e-12)

    def test_toffoli_arbitrary_placement(self):
        src = "qubits 3 stages 1\ninit 000\nq0: X\nq1: C\nq2: C\nmeasure 0\n"
        c = parse_text_circuit(src)
        u = stage_operator(c, 0)
        for basis in range(8):
            expected = basis ^ (1 if (basis & 0b110) == 0b110 else 0)
            assert abs(u[expected, basis] - 1.0) < 1e-12

    def test_swap_placement(self):
        src = "qubits 3 stages 1\ninit 000\nq0: SW\nq1: I\nq2: SW\nmeasure 0\n"
        c = parse_text_circuit(src)
        u = stage_operator(c, 0)
        for basis in range(8):
            b0, b2 = basis & 1, (basis >> 2) & 1
            expected = (basis & 0b010) | (b0 << 2) | b2
            assert abs(u[expected, basis] - 1.0) < 1e-12

    def test_independent_of_init_and_measurement(self):
        c1 = full_adder(0, 0, 0)
        c2 = full_adder(1, 1, 1)
        for s in range(c1.num_stages):
            assert np.array_equal(stage_operator(c1, s), stage_operator(c2, s))

    @given(st.integers(min_value=0, max_value=2**31 - 1))
    @settings(max_examples=30, deadline=None)
    def test_stage_operators_unitary(self, seed):
        c = _random_circuit(np.random.default_rng(seed))
        for s in range(c.num_stages):
            assert is_unitary(stage_operator(c, s), atol=1e-10)

    @given(st.integers(min_value=0, max_value=2**31 - 1))
    @settings(max_examples=30, deadline=None)
    def test_single_gate_columns_match_kron_fold(self, seed):
        from functools import reduce

        rng = np.random.default_rng(seed)
        c = _random_circuit(rng)
        for s in range(c.num_stages):
            cells = c.column(s)
            if any(cell.kind != "gate" for cell in cells):
                continue
            mats = [gate_matrix(cells[q].gate) for q in reversed(range(c.num_qubits))]
            assert np.allclose(stage_operator(c, s), reduce(tensor_product, mats), atol=1e-12)


class TestFixtures:
    def test_full_adder_shape(self):
        c = builtin_circuits()["full_adder"]
        assert c.num_qubits == 5 and c.measured == (3, 4)
        assert c.labels == ("A", "B", "Cin", "S", "Cout")

    def test_grover_shape(self):
        c = builtin_circuits()["grover3_110"]
        assert c.num_qubits == 3
        assert c.init_bitstring() == "110"

    def test_dj_shape(self):
        c = builtin_circuits()["dj_balanced"]
        assert c.num_qubits == 5 and c.measured == (0, 1, 2, 3)

    def test_json_schema_versioned(self):
        d = circuit_to_dict(builtin_circuits()["full_adder"])
        assert d["format_version"] == 1
        assert json.loads(json.dumps(d)) == d
