"""Local HTTP service backing the browser circuit designer.

JSON API under /api/v1: gate catalog, simulation, and a server-sent-event
stream for live VQE runs. Stateless; identical requests give identical
responses (modulo timestamps). OpenAPI description at /api/v1/spec.
"""
from __future__ import annotations

import hashlib
import json

import numpy as np
from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, StreamingResponse

from . import engine, export
from .circuit import CircuitParseError, circuit_from_dict
from .core import (
    DENSITY_MAX_QUBITS,
    MATRIX_MODE_MAX_QUBITS,
    VECTOR_MODE_MAX_QUBITS,
    ResourceLimitError,
    ValidationError,
    density_from_state,
)
from .gates import catalog_descriptors
from .noise import NoiseConfig, run_noisy
from .vqe import AnsatzConfig, FactorizationProblem, VqeRunResult, optimize_iter


def _error(status: int, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": message})


def _simulate(body: dict) -> dict:
    if not isinstance(body, dict) or "circuit" not in body:
        raise CircuitParseError("request body must be an object with a 'circuit' field")
    circuit = circuit_from_dict(body["circuit"])
    mode = body.get("mode", "matrix")
    if mode not in ("matrix", "vector"):
        raise CircuitParseError(f"mode must be 'matrix' or 'vector', got {mode!r}")
    include_trace = bool(body.get("include_trace", False))
    include_density = bool(body.get("include_density", False))

    n = circuit.num_qubits
    cap = MATRIX_MODE_MAX_QUBITS if mode == "matrix" else VECTOR_MODE_MAX_QUBITS
    if n > cap:
        raise ResourceLimitError(f"{n} qubits exceeds the {cap}-qubit cap for {mode} mode")
    if include_density and n > DENSITY_MAX_QUBITS:
        raise ResourceLimitError(
            f"density output caps at {DENSITY_MAX_QUBITS} qubits, got {n}"
        )

    noise_cfg = None
    noise_dict = body.get("noise", circuit.noise)
    if noise_dict is not None:
        noise_cfg = NoiseConfig.from_dict(noise_dict)
        noise_cfg.validate_for(n)
        if n > DENSITY_MAX_QUBITS:
            raise ResourceLimitError(
                f"noisy density evolution caps at {DENSITY_MAX_QUBITS} qubits"
            )

    result: dict = {"mode": mode, "num_qubits": n, "num_stages": circuit.num_stages}
    if mode == "matrix":
        state, u = engine.run_matrix_mode(circuit)
        result["heatmap"] = np.abs(u).tolist()
        _, records = engine.run_vector_mode(circuit, trace=include_trace)
    else:
        state, records = engine.run_vector_mode(circuit, trace=include_trace)

    measured = circuit.measured or tuple(range(n))
    dist = engine.measure_distribution(state, measured)
    result["measured_qubits"] = list(dist.measured_qubits)
    result["probabilities"] = dist.probabilities

    if include_trace:
        result["trace"] = [
            {
                "stage": r.stage_index,
                "state": [export.complex_to_json(z) for z in r.state.amplitudes],
                "bloch": [[v.x, v.y, v.z] for v in r.bloch],
            }
            for r in records
        ]
    if include_density:
        result["density_noiseless"] = export.density_to_json(density_from_state(state))
        if noise_cfg is not None:
            rho, _ = run_noisy(circuit, noise_cfg)
            result["density_noisy"] = export.density_to_json(rho)
    return result


def _vqe_stream(body: dict):
    prob = FactorizationProblem(
        int(body["target"]), int(body.get("bits_p", 4)), int(body.get("bits_q", 3))
    )
    cfg = AnsatzConfig(
        layers=int(body.get("layers", 0)),
        learning_rate=float(body.get("learning_rate", 0.1)),
        max_iters=int(body.get("max_iters", 100)),
        convergence_amplitude=float(body.get("convergence_amplitude", 0.90)),
        seed=int(body.get("seed", 35)),
        init_scale=float(body.get("init_scale", 0.5)),
    )

    def stream():
        try:
            for event in optimize_iter(prob, cfg):
                if isinstance(event, VqeRunResult):
                    yield f"event: result\ndata: {json.dumps(event.to_dict())}\n\n"
                else:
                    yield f"data: {json.dumps(event.to_dict())}\n\n"
        except Exception as e:  # surface internal failures on the stream
            yield f"event: error\ndata: {json.dumps({'error': str(e)})}\n\n"

    return StreamingResponse(stream(), media_type="text/event-stream")


def create_app() -> FastAPI:
    app = FastAPI(
        title="psitrum",
        version="1",
        openapi_url="/api/v1/spec",
        docs_url="/api/v1/docs",
    )
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    gates_payload = {"gates": catalog_descriptors()}
    gates_etag = '"' + hashlib.sha256(json.dumps(gates_payload, sort_keys=True).encode()).hexdigest()[:16] + '"'

    @app.get("/api/v1/gates")
    def get_gates(request: Request) -> Response:
        if request.headers.get("if-none-match") == gates_etag:
            return Response(status_code=304, headers={"ETag": gates_etag})
        return JSONResponse(content=gates_payload, headers={"ETag": gates_etag})

    @app.post("/api/v1/simulate")
    async def simulate(request: Request) -> Response:
        try:
            body = await request.json()
        except Exception:
            return _error(400, "request body is not valid JSON")
        try:
            return JSONResponse(content=_simulate(body))
        except ResourceLimitError as e:
            return _error(413, str(e))
        except CircuitParseError as e:
            return _error(400, str(e))
        except ValidationError as e:
            return _error(422, str(e))

    @app.post("/api/v1/vqe/factor")
    async def vqe_factor(request: Request) -> Response:
        try:
            body = await request.json()
            if not isinstance(body, dict) or "target" not in body:
                return _error(400, "body must be an object with a 'target' field")
        except Exception:
            return _error(400, "request body is not valid JSON")
        try:
            return _vqe_stream(body)
        except (ValidationError, TypeError, ValueError) as e:
            return _error(400, f"invalid factorization config: {e}")

    @app.get("/api/v1/fixtures")
    def fixtures() -> JSONResponse:
        from .circuit import circuit_to_dict
        from .fixtures import builtin_circuits

        return JSONResponse(
            content={name: circuit_to_dict(c) for name, c in builtin_circuits().items()}
        )

    return app
