import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from psitrum.circuit import Circuit, IDENTITY_CELL, parse_text_circuit, stage_operator
from psitrum.core import (
    ResourceLimitError,
    StateVector,
    ValidationError,
    apply_unitary,
    is_unitary,
)
from psitrum.engine import (
    build_algorithm_matrix,
    initial_state,
    measure_distribution,
    run_matrix_mode,
    run_vector_mode,
    trace_bloch,
)
from psitrum.fixtures import builtin_circuits, dj_balanced, full_adder, grover3_110

from test_circuit import _random_circuit


def _h_all(n: int) -> Circuit:
    src = f"qubits {n} stages 1\ninit {'0' * n}\n"
    src += "".join(f"q{q}: H\n" for q in range(n))
    src += "measure " + " ".join(map(str, range(n))) + "\n"
    return parse_text_circuit(src)


class TestAlgorithmMatrix:
    def test_single_stage_equals_stage_operator(self):
        c = _h_all(2)
        assert np.allclose(build_algorithm_matrix(c), stage_operator(c, 0), atol=1e-12)

    def test_double_x_is_identity(self):
        src = "qubits 1 stages 2\ninit 0\nq0: X , X\nmeasure 0\n"
        c = parse_text_circuit(src)
        assert np.allclose(build_algorithm_matrix(c), np.eye(2), atol=1e-12)

    def test_stage_order_first_column_applied_first(self):
        # X then H on |0>: H X |0> = (|0> - |1>)/sqrt(2)
        src = "qubits 1 stages 2\ninit 0\nq0: X , H\nmeasure 0\n"
        c = parse_text_circuit(src)
        state, _ = run_matrix_mode(c)
        expected = np.array([1, -1]) / np.sqrt(2)
        assert np.allclose(state.amplitudes, expected, atol=1e-12)

    def test_full_adder_matrix_implements_truth_table(self):
        # audit: the algorithm matrix acts on all 8 input rows per the adder's
        # classical truth table (ancillas clear)
        u = build_algorithm_matrix(full_adder())
        for a in (0, 1):
            for b in (0, 1):
                for cin in (0, 1):
                    src = a | (b << 1) | (cin << 2)
                    s = a ^ b ^ cin
                    cout = (a & b) ^ (a & cin) ^ (b & cin)
                    dst_col = u[:, src]
                    top = int(np.argmax(np.abs(dst_col)))
                    assert (top >> 3) & 1 == s
                    assert (top >> 4) & 1 == cout
                    assert abs(abs(dst_col[top]) - 1.0) < 1e-10

    def test_full_adder_heatmap_golden(self):
        from pathlib import Path

        golden = Path(__file__).parent / "golden" / "full_adder_heatmap.csv"
        u = build_algorithm_matrix(full_adder())
        rows = [line.split(",") for line in golden.read_text().strip().splitlines()]
        expected = np.array([[float(v) for v in row] for row in rows])
        assert np.allclose(np.abs(u), expected, atol=1e-9)

    def test_cap(self):
        c = Circuit(13, 1, [[IDENTITY_CELL]] * 13, (0,) * 13, (0,))
        with pytest.raises(ResourceLimitError):
            build_algorithm_matrix(c)

    @given(st.integers(min_value=0, max_value=2**31 - 1))
    @settings(max_examples=25, deadline=None)
    def test_unitarity(self, seed):
        c = _random_circuit(np.random.default_rng(seed))
        assert is_unitary(build_algorithm_matrix(c), atol=1e-10)


class TestVectorMode:
    @pytest.mark.parametrize("name", sorted(builtin_circuits()))
    def test_mode_equivalence_fixtures(self, name):
        c = builtin_circuits()[name]
        sv, _ = run_vector_mode(c)
        sm = apply_unitary(build_algorithm_matrix(c), initial_state(c))
        assert np.allclose(sv.amplitudes, sm.amplitudes, atol=1e-9)

    def test_grover_probability(self):
        # independent oracle: brute-force 8-dim Grover recursion
        n = 8
        psi = np.full(n, 1 / np.sqrt(n))
        target = 0b110
        for _ in range(2):
            psi[target] *= -1
            psi = 2 * psi.mean() - psi
        expected = psi[target] ** 2
        assert expected == pytest.approx(121 / 128, abs=1e-12)

        state, _ = run_vector_mode(grover3_110())
        dist = measure_distribution(state, (0, 1, 2))
        assert dist.probabilities["110"] == pytest.approx(121 / 128, abs=1e-9)

    def test_h_all_uniform(self):
        state, _ = run_vector_mode(_h_all(3))
        assert np.allclose(state.probabilities(), 1 / 8, atol=1e-12)

    def test_trace_normalization_every_stage(self):
        _, records = run_vector_mode(grover3_110(), trace=True)
        assert len(records) == grover3_110().num_stages + 1
        for r in records:
            assert np.sum(np.abs(r.state.amplitudes) ** 2) == pytest.approx(1.0, abs=1e-10)
            if r.density is not None:
                assert np.allclose(
                    r.density.entries,
                    np.outer(r.state.amplitudes, r.state.amplitudes.conj()),
                    atol=1e-10,
                )

    def test_cap(self):
        c = Circuit(25, 1, [[IDENTITY_CELL]] * 25, (0,) * 25, (0,))
        with pytest.raises(ResourceLimitError):
            run_vector_mode(c)

    @given(st.integers(min_value=0, max_value=2**31 - 1))
    @settings(max_examples=25, deadline=None)
    def test_reversibility(self, seed):
        # run a circuit then its stage-reversed adjoint: back to the start
        c = _random_circuit(np.random.default_rng(seed))
        psi = initial_state(c)
        state = psi
        ops = [stage_operator(c, s) for s in range(c.num_stages)]
        for u in ops:
            state = apply_unitary(u, state)
        for u in reversed(ops):
            state = apply_unitary(u.conj().T, state)
        assert np.allclose(state.amplitudes, psi.amplitudes, atol=1e-9)


class TestMeasureDistribution:
    def test_full_adder_111(self):
        c = full_adder(1, 1, 1)
        state, _ = run_vector_mode(c)
        dist = measure_distribution(state, c.measured)
        # S=1 (q3), Cout=1 (q4): key reads q4 then q3
        assert dist.probabilities["11"] == pytest.approx(1.0, abs=1e-9)

    def test_dj_balanced(self):
        state, _ = run_vector_mode(dj_balanced())
        dist = measure_distribution(state, (0, 1, 2, 3))
        assert dist.probabilities["1111"] == pytest.approx(1.0, abs=1e-9)

    def test_bell_state(self):
        src = "qubits 2 stages 2\ninit 00\nq0: H , C\nq1: I , X\nmeasure 0 1\n"
        state, _ = run_vector_mode(parse_text_circuit(src))
        dist = measure_distribution(state, (0, 1))
        assert dist.probabilities["00"] == pytest.approx(0.5, abs=1e-12)
        assert dist.probabilities["11"] == pytest.approx(0.5, abs=1e-12)

    def test_marginal_over_subset(self):
        state, _ = run_vector_mode(_h_all(3))
        dist = measure_distribution(state, (1,))
        assert dist.probabilities == pytest.approx({"0": 0.5, "1": 0.5}, abs=1e-12)

    def test_empty_subset_rejected(self):
        state, _ = run_vector_mode(_h_all(2))
        with pytest.raises(ValidationError):
            measure_distribution(state, ())

    def test_point_mass_on_basis_state(self):
        state = StateVector.basis(3, 0b101)
        dist = measure_distribution(state, (0, 1, 2))
        assert dist.probabilities["101"] == 1.0

    def test_sums_to_one(self, rng):
        from conftest import random_state

        state = StateVector(4, random_state(rng, 4))
        dist = measure_distribution(state, (0, 2))
        assert sum(dist.probabilities.values()) == pytest.approx(1.0, abs=1e-10)


class TestTraceBloch:
    def test_initial_all_north(self):
        blochs = trace_bloch(full_adder())
        for v in blochs[0]:
            assert (v.x, v.y, v.z) == pytest.approx((0, 0, 1), abs=1e-12)

    def test_h_moves_one_qubit_to_x(self):
        src = "qubits 2 stages 1\ninit 00\nq0: H\nq1: I\nmeasure 0\n"
        blochs = trace_bloch(parse_text_circuit(src))
        assert (blochs[1][0].x, blochs[1][0].y, blochs[1][0].z) == pytest.approx(
            (1, 0, 0), abs=1e-12
        )
        assert (blochs[1][1].x, blochs[1][1].y, blochs[1][1].z) == pytest.approx(
            (0, 0, 1), abs=1e-12
        )

    def test_bell_pair_fully_mixed(self):
        src = "qubits 2 stages 2\ninit 00\nq0: H , C\nq1: I , X\nmeasure 0 1\n"
        blochs = trace_bloch(parse_text_circuit(src))
        for v in blochs[2]:
            assert (v.x, v.y, v.z) == pytest.approx((0, 0, 0), abs=1e-12)


@given(st.integers(min_value=0, max_value=2**31 - 1))
@settings(max_examples=40, deadline=None)
def test_mode_equivalence_random(seed):
    c = _random_circuit(np.random.default_rng(seed), max_qubits=5, max_stages=8)
    sv, _ = run_vector_mode(c)
    sm = apply_unitary(build_algorithm_matrix(c), initial_state(c))
    assert np.allclose(sv.amplitudes, sm.amplitudes, atol=1e-9)
