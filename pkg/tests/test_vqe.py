import math

import numpy as np
import pytest

from psitrum.core import ValidationError
from psitrum.engine import run_vector_mode
from psitrum.vqe import (
    COMMITTED_SEEDS,
    AnsatzConfig,
    FactorizationProblem,
    VqeRunResult,
    ansatz_state,
    build_ansatz,
    build_cost_diagonal,
    expectation,
    gradient,
    optimize,
    optimize_iter,
)


class TestProblemEncoding:
    def test_91_zero_at_13_times_7(self):
        prob = FactorizationProblem(91, 4, 3)
        diag = build_cost_diagonal(prob)
        zero = np.flatnonzero(diag == 0)
        assert len(zero) == 1
        p, q = prob.decode(int(zero[0]))
        assert (p, q) == (13, 7)

    def test_9_exhaustive(self):
        prob = FactorizationProblem(9, 2, 2)
        diag = build_cost_diagonal(prob)
        # 4 states: (p,q) in {1,3}x{1,3}; hand enumeration of (9 - pq)^2
        expected = [(9 - p * q) ** 2 for q in (1, 3) for p in (1, 3)]
        assert diag.tolist() == expected
        assert prob.decode(int(np.argmin(diag))) == (3, 3)

    def test_77_zero_at_11_times_7(self):
        prob = FactorizationProblem(77, 4, 3)
        diag = build_cost_diagonal(prob)
        zero = np.flatnonzero(diag == 0)
        assert [prob.decode(int(z)) for z in zero] == [(11, 7)]

    def test_cost_nonnegative_and_zero_only_on_factorizations(self):
        prob = FactorizationProblem(15, 3, 3)
        diag = build_cost_diagonal(prob)
        assert np.all(diag >= 0)
        for x in range(len(diag)):
            p, q = prob.decode(x)
            assert (diag[x] == 0) == (p * q == 15)

    def test_encode_decode_round_trip(self):
        prob = FactorizationProblem(91, 4, 3)
        for p in (1, 3, 5, 7, 9, 11, 13, 15):
            for q in (1, 3, 5, 7):
                assert prob.decode(prob.encode(p, q)) == (p, q)

    def test_rejects_even_or_tiny(self):
        with pytest.raises(ValidationError):
            FactorizationProblem(10, 4, 3)
        with pytest.raises(ValidationError):
            FactorizationProblem(91, 1, 3)

    def test_rejects_unrepresentable(self):
        with pytest.raises(ValidationError):
            FactorizationProblem(1001, 3, 2)

    def test_free_qubits(self):
        assert FactorizationProblem(91, 4, 3).free_qubits == 5


class TestAnsatz:
    def test_zero_layers_single_ry_layer(self):
        cfg = AnsatzConfig(layers=0)
        c = build_ansatz(cfg, 3, [0.1, 0.2, 0.3])
        assert c.num_stages == 1
        assert all(cell.gate.name == "RY" for cell in c.column(0))

    def test_one_layer_two_qubits_structure(self):
        cfg = AnsatzConfig(layers=1)
        c = build_ansatz(cfg, 2, [0.1, 0.2, 0.3, 0.4])
        # RY,RY | CNOT(0 -> 1) | RY,RY
        assert c.num_stages == 3
        assert c.grid[0][1].kind == "control"
        assert c.grid[1][1].gate.name == "X"

    def test_all_zero_params_give_ground_state(self):
        cfg = AnsatzConfig(layers=2)
        c = build_ansatz(cfg, 3, [0.0] * 9)
        state, _ = run_vector_mode(c)
        assert abs(state.amplitudes[0] - 1.0) < 1e-12

    def test_fast_kernel_matches_engine(self, rng):
        # dual route: the optimized amplitude evolution vs the full circuit engine
        for layers in (0, 1, 3):
            n = 4
            params = rng.uniform(0, 2 * math.pi, (layers + 1) * n)
            c = build_ansatz(AnsatzConfig(layers=layers), n, params)
            state, _ = run_vector_mode(c)
            fast = ansatz_state(params, n, layers)
            assert np.allclose(state.amplitudes, fast, atol=1e-10)

    def test_normalized(self, rng):
        params = rng.uniform(0, 2 * math.pi, 10)
        psi = ansatz_state(params, 5, 1)
        assert np.sum(psi**2) == pytest.approx(1.0, abs=1e-10)


class TestExpectation:
    def test_point_mass_zero_cost(self):
        diag = np.array([4.0, 0.0, 9.0, 1.0])
        state = np.array([0.0, 1.0, 0.0, 0.0])
        assert expectation(state, diag) == 0.0

    def test_uniform_is_mean(self):
        diag = np.array([1.0, 2.0, 3.0, 4.0])
        state = np.full(4, 0.5)
        assert expectation(state, diag) == pytest.approx(diag.mean(), abs=1e-12)

    def test_matches_dense_quadratic_form(self, rng):
        from conftest import random_state

        diag = rng.uniform(0, 10, 8)
        psi = random_state(rng, 3)
        dense = np.diag(diag).astype(complex)
        oracle = np.real(psi.conj() @ dense @ psi)
        assert expectation(psi, diag) == pytest.approx(oracle, abs=1e-12)

    def test_shape_mismatch(self):
        with pytest.raises(ValidationError):
            expectation(np.ones(4) / 2, np.ones(8))


class TestGradient:
    def test_zero_diag_zero_gradient(self, rng):
        prob = FactorizationProblem(9, 2, 2)
        cfg = AnsatzConfig(layers=1)
        # build a problem whose diagonal is identically zero is impossible;
        # instead check the parameter-shift identity at a cost minimum state
        params = np.zeros(cfg.num_params(2))
        g = gradient(params, prob, cfg)
        assert np.all(np.isfinite(g))

    def test_single_qubit_closed_form(self):
        # one qubit, diag (0, 1): C(theta) = sin^2(theta/2), dC = sin(theta)/... wait:
        # C = sin^2(theta/2) so dC/dtheta = sin(theta)/2 * ... verify numerically below
        prob = FactorizationProblem(3, 2, 2)  # diag (4,0,...) not used here
        cfg = AnsatzConfig(layers=0)
        from psitrum.vqe import _ansatz_states_batch

        for theta in (0.3, 1.1, 2.0):
            st = ansatz_state(np.array([theta]), 1, 0)
            c = float(st[1] ** 2)
            assert c == pytest.approx(math.sin(theta / 2) ** 2, abs=1e-12)
            # parameter shift on this cost directly
            plus = ansatz_state(np.array([theta + math.pi / 2]), 1, 0)[1] ** 2
            minus = ansatz_state(np.array([theta - math.pi / 2]), 1, 0)[1] ** 2
            shift = (plus - minus) / 2
            assert shift == pytest.approx(math.sin(theta) / 2, abs=1e-12)

    def test_matches_finite_differences_100_draws(self):
        rng = np.random.default_rng(7)
        h = 1e-5
        for _ in range(100):
            target = int(rng.choice([9, 15, 21, 35]))
            prob = FactorizationProblem(target, 3, 3)
            cfg = AnsatzConfig(layers=int(rng.integers(0, 3)))
            n = prob.free_qubits
            params = rng.uniform(0, 2 * math.pi, cfg.num_params(n))
            diag = build_cost_diagonal(prob)
            g = gradient(params, prob, cfg)
            for j in rng.choice(len(params), size=min(3, len(params)), replace=False):
                p1, p2 = params.copy(), params.copy()
                p1[j] += h
                p2[j] -= h
                fd = (
                    expectation(ansatz_state(p1, n, cfg.layers), diag)
                    - expectation(ansatz_state(p2, n, cfg.layers), diag)
                ) / (2 * h)
                assert g[j] == pytest.approx(fd, abs=1e-6)


class TestOptimize:
    def test_already_optimal_converges_at_zero(self):
        # params at 0 put all amplitude on |0...0>; cost diag is zero there
        # when the target factors as 1 * target within the bit budget
        prob = FactorizationProblem(3, 2, 2)  # (p,q)=(1,3): x = encode(1,3) != 0
        cfg = AnsatzConfig(
            layers=0, initial_params=(0.0, 0.0), convergence_amplitude=0.9
        )
        diag = build_cost_diagonal(prob)
        if diag[0] == 0:
            result = optimize(prob, cfg)
            assert result.converged_at == 0
        else:
            # steer the start onto the known zero-cost state instead
            x = int(np.flatnonzero(diag == 0)[0])
            thetas = tuple(math.pi if (x >> q) & 1 else 0.0 for q in range(2))
            result = optimize(prob, AnsatzConfig(layers=0, initial_params=thetas))
            assert result.converged_at == 0

    def test_91_committed_seeds(self):
        prob = FactorizationProblem(91, 4, 3)
        converged = []
        for seed in COMMITTED_SEEDS:
            r = optimize(prob, AnsatzConfig(seed=seed))
            assert r.cost_curve[-1] <= r.cost_curve[0]
            assert all(np.isfinite(v) for v in r.cost_curve)
            if r.converged_at is not None:
                converged.append(seed)
                assert r.recovered_factors == (13, 7)
                assert r.solution_prob_curve[r.converged_at] >= 0.90
        assert converged, "no committed seed converged for 91"

    def test_77_committed_seeds(self):
        prob = FactorizationProblem(77, 4, 3)
        converged = [
            seed
            for seed in COMMITTED_SEEDS
            if optimize(prob, AnsatzConfig(seed=seed)).converged_at is not None
        ]
        assert converged, "no committed seed converged for 77"

    def test_determinism_bitwise(self):
        prob = FactorizationProblem(91, 4, 3)
        cfg = AnsatzConfig(seed=35)
        a = optimize(prob, cfg)
        b = optimize(prob, cfg)
        assert a.cost_curve == b.cost_curve
        assert a.solution_prob_curve == b.solution_prob_curve

    def test_tiny_problem_stream(self):
        prob = FactorizationProblem(9, 2, 2)
        events = list(optimize_iter(prob, AnsatzConfig(seed=1, max_iters=100)))
        result = events[-1]
        assert isinstance(result, VqeRunResult)
        assert result.recovered_factors == (3, 3)
        assert len(events) == len(result.cost_curve) + 1

    def test_nonconvergence_is_reported_not_raised(self):
        prob = FactorizationProblem(91, 4, 3)
        r = optimize(prob, AnsatzConfig(seed=0, max_iters=5))
        assert r.converged_at is None
        assert len(r.cost_curve) == 6

    def test_run_log_serializes(self):
        import json

        r = optimize(FactorizationProblem(9, 2, 2), AnsatzConfig(seed=1, max_iters=20))
        d = json.loads(json.dumps(r.to_dict()))
        assert d["recovered_factors"] == [3, 3]
