"""Command-line front door.

Subcommands: ``run``, ``fixtures``, ``vqe-factor``, ``serve``,
``validate-gates``. Exit codes: 0 success, 2 usage error, 1 runtime error.
``PSITRUM_THREADS`` caps kernel (BLAS) parallelism when set.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2


class UsageError(Exception):
    pass


def _apply_thread_cap() -> None:
    threads = os.environ.get("PSITRUM_THREADS")
    if not threads:
        return
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(var, threads)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="psitrum", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate a circuit file (.pqc text or JSON)")
    run.add_argument("circuit_file")
    run.add_argument("--mode", choices=["matrix", "vector"], default="matrix")
    run.add_argument("--noise-p", type=float, default=None)
    run.add_argument("--noise-mode", choices=["overshoot", "stochastic"], default="overshoot")
    run.add_argument("--noise-seed", type=int, default=0)
    run.add_argument("--trace", action="store_true", help="export per-stage state vectors")
    run.add_argument("--export-dir", default=None)

    fixtures = sub.add_parser("fixtures", help="list or dump built-in circuits")
    fixtures.add_argument("action", choices=["list", "dump"])
    fixtures.add_argument("name", nargs="?")
    fixtures.add_argument("--format", choices=["text", "json"], default="text")

    vqe = sub.add_parser("vqe-factor", help="factor an odd number variationally")
    vqe.add_argument("target", type=int)
    vqe.add_argument("--bits-p", type=int, default=4)
    vqe.add_argument("--bits-q", type=int, default=3)
    vqe.add_argument("--layers", type=int, default=0)
    vqe.add_argument("--lr", type=float, default=0.1)
    vqe.add_argument("--iters", type=int, default=100)
    vqe.add_argument("--threshold", type=float, default=0.90)
    vqe.add_argument("--seed", type=int, default=35)
    vqe.add_argument("--init-scale", type=float, default=0.5)
    vqe.add_argument("--export-dir", default=None)

    serve = sub.add_parser("serve", help="start the local HTTP service")
    serve.add_argument("--port", type=int, default=8760)
    serve.add_argument("--bind", default="127.0.0.1")

    sub.add_parser("validate-gates", help="check unitarity of the whole gate catalog")
    return parser


def _cmd_run(args) -> int:
    from . import engine, export
    from .circuit import parse_circuit
    from .core import DENSITY_MAX_QUBITS
    from .noise import NoiseConfig, run_noisy

    try:
        source = open(args.circuit_file, encoding="utf-8").read()
    except OSError as e:
        raise UsageError(f"cannot read {args.circuit_file}: {e}") from e
    circuit = parse_circuit(source)

    noise_cfg = None
    noise_dict = circuit.noise
    if args.noise_p is not None:
        noise_dict = {"p": args.noise_p, "mode": args.noise_mode, "seed": args.noise_seed}
    if noise_dict is not None:
        noise_cfg = NoiseConfig.from_dict(noise_dict)
        try:
            noise_cfg.validate_for(circuit.num_qubits)
        except Exception as e:
            raise UsageError(str(e)) from e

    algorithm_matrix = None
    if args.mode == "matrix":
        state, algorithm_matrix = engine.run_matrix_mode(circuit)
        _, records = engine.run_vector_mode(circuit, trace=True)
    else:
        state, records = engine.run_vector_mode(circuit, trace=True)

    dist = engine.measure_distribution(state, circuit.measured or range(circuit.num_qubits))
    density = None
    density_noisy = None
    if circuit.num_qubits <= DENSITY_MAX_QUBITS:
        from .core import density_from_state

        density = density_from_state(state)
        if noise_cfg is not None:
            density_noisy, _ = run_noisy(circuit, noise_cfg)

    config = {
        "command": "run",
        "circuit_file": args.circuit_file,
        "circuit_hash": export.circuit_hash(circuit),
        "mode": args.mode,
        "noise": noise_cfg.to_dict() if noise_cfg else None,
        "measured_qubits": list(circuit.measured),
        "trace": bool(args.trace),
    }
    bundle = export.ExportBundle(
        metadata=export.run_metadata(config),
        probabilities=dist,
        algorithm_matrix=algorithm_matrix,
        density=density,
        density_noisy=density_noisy,
        bloch_trace=tuple(r.bloch for r in records),
        qubit_labels=circuit.labels,
    )
    if args.export_dir:
        written = export.export_bundle(bundle, args.export_dir)
        if args.trace:
            states = [
                {
                    "stage": r.stage_index,
                    "state": [export.complex_to_json(z) for z in r.state.amplitudes],
                }
                for r in records
            ]
            path = os.path.join(args.export_dir, "trace_states.json")
            with open(path, "w", encoding="utf-8") as f:
                json.dump(states, f)
            written.append(path)
        for p in written:
            print(p)
    else:
        for bits in sorted(dist.probabilities):
            print(f"{bits} {dist.probabilities[bits]:.12f}")
    return EXIT_OK


def _cmd_fixtures(args) -> int:
    from .circuit import serialize_circuit
    from .fixtures import builtin_circuits

    circuits = builtin_circuits()
    if args.action == "list":
        for name in circuits:
            print(name)
        return EXIT_OK
    if not args.name or args.name not in circuits:
        raise UsageError(
            f"unknown fixture {args.name!r}; available: {', '.join(circuits)}"
        )
    sys.stdout.write(serialize_circuit(circuits[args.name], args.format))
    return EXIT_OK


def _cmd_vqe(args) -> int:
    from . import export
    from .core import ValidationError
    from .vqe import AnsatzConfig, FactorizationProblem, optimize

    try:
        prob = FactorizationProblem(args.target, args.bits_p, args.bits_q)
        cfg = AnsatzConfig(
            layers=args.layers,
            learning_rate=args.lr,
            max_iters=args.iters,
            convergence_amplitude=args.threshold,
            seed=args.seed,
            init_scale=args.init_scale,
        )
    except ValidationError as e:
        raise UsageError(str(e)) from e

    result = optimize(prob, cfg)
    log = {
        "config": {
            "target": prob.target,
            "bits_p": prob.bits_p,
            "bits_q": prob.bits_q,
            "layers": cfg.layers,
            "learning_rate": cfg.learning_rate,
            "max_iters": cfg.max_iters,
            "convergence_amplitude": cfg.convergence_amplitude,
            "seed": cfg.seed,
            "init_scale": cfg.init_scale,
        },
        "result": result.to_dict(),
    }
    if args.export_dir:
        os.makedirs(args.export_dir, exist_ok=True)
        path = os.path.join(args.export_dir, "vqe_run.json")
        meta = export.run_metadata({"command": "vqe-factor", **log["config"]})
        with open(path, "w", encoding="utf-8") as f:
            json.dump({"metadata": meta, **log}, f, indent=2)
        print(path)
    else:
        print(json.dumps(log, indent=2))
    if result.converged_at is not None:
        print(
            f"converged at iteration {result.converged_at}: "
            f"{prob.target} = {result.recovered_factors[0]} x {result.recovered_factors[1]}",
            file=sys.stderr,
        )
    else:
        print("did not reach the convergence threshold", file=sys.stderr)
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.bind, port=args.port, log_level="info")
    return EXIT_OK


def _cmd_validate_gates(args) -> int:
    from .gates import CATALOG, validate_catalog

    violations = validate_catalog()
    print(f"checked {len(CATALOG)} gates")
    for v in violations:
        print(f"VIOLATION: {v}")
    print("ok" if not violations else f"{len(violations)} violation(s)")
    return EXIT_OK if not violations else EXIT_RUNTIME


def main(argv=None) -> int:
    _apply_thread_cap()
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    handlers = {
        "run": _cmd_run,
        "fixtures": _cmd_fixtures,
        "vqe-factor": _cmd_vqe,
        "serve": _cmd_serve,
        "validate-gates": _cmd_validate_gates,
    }
    try:
        return handlers[args.command](args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
