"""File emitters for simulation results: CSV tables and JSON dumps.

All reals in CSV files are printed with 12 decimal digits; complex numbers in
JSON are ``{"re": ..., "im": ...}`` pairs, stored as exact repr floats so a
parse round-trips within 1e-12.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

import numpy as np

from .circuit import Circuit, serialize_text_circuit
from .core import DensityMatrix, ValidationError
from .engine import MeasurementDistribution


def fmt_real(x: float) -> str:
    return f"{x:.12f}"


def complex_to_json(z: complex) -> dict:
    return {"re": float(np.real(z)), "im": float(np.imag(z))}


def matrix_to_json(m: np.ndarray) -> list[list[dict]]:
    return [[complex_to_json(z) for z in row] for row in np.asarray(m)]


def matrix_from_json(rows: list[list[dict]]) -> np.ndarray:
    return np.array([[complex(c["re"], c["im"]) for c in row] for row in rows])


def density_to_json(rho: DensityMatrix) -> dict:
    return {
        "num_qubits": rho.num_qubits,
        "trace": float(np.real(np.trace(rho.entries))),
        "entries": matrix_to_json(rho.entries),
    }


def density_from_json(d: dict) -> DensityMatrix:
    return DensityMatrix(int(d["num_qubits"]), matrix_from_json(d["entries"]))


def circuit_hash(c: Circuit) -> str:
    return hashlib.sha256(serialize_text_circuit(c).encode()).hexdigest()


@dataclass(frozen=True)
class ExportBundle:
    """Everything one run can emit; metadata is mandatory, the rest optional."""

    metadata: dict
    probabilities: Optional[MeasurementDistribution] = None
    algorithm_matrix: Optional[np.ndarray] = field(default=None, repr=False)
    density: Optional[DensityMatrix] = None
    density_noisy: Optional[DensityMatrix] = None
    bloch_trace: Optional[tuple] = None  # per-stage tuples of BlochVector
    qubit_labels: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.metadata:
            raise ValidationError("export bundle requires metadata")


def _write(path: Path, text: str) -> Path:
    path.write_text(text, encoding="utf-8")
    return path


def _probabilities_csv(dist: MeasurementDistribution, labels: tuple[str, ...]) -> str:
    names = [labels[q] if q < len(labels) else f"q{q}" for q in dist.measured_qubits]
    lines = [",".join(names) + ",probability"]
    for bits in sorted(dist.probabilities):
        # bitstring reads highest measured qubit first; columns go low to high
        assigns = [
            f"{names[j]}={bits[len(bits) - 1 - j]}" for j in range(len(names))
        ]
        lines.append(",".join(assigns) + "," + fmt_real(dist.probabilities[bits]))
    return "\n".join(lines) + "\n"


def _heatmap_csv(matrix: np.ndarray) -> str:
    mag = np.abs(matrix)
    return "\n".join(",".join(fmt_real(v) for v in row) for row in mag) + "\n"


def _bloch_json(trace) -> list:
    out = []
    for stage, vectors in enumerate(trace):
        out.append(
            {
                "stage": stage,
                "bloch": [[v.x, v.y, v.z] for v in vectors],
            }
        )
    return out


def export_bundle(bundle: ExportBundle, out_dir) -> list[Path]:
    """Write the bundle's files into ``out_dir``; returns the written paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    if bundle.probabilities is not None:
        written.append(
            _write(
                out / "probabilities.csv",
                _probabilities_csv(bundle.probabilities, bundle.qubit_labels),
            )
        )
    if bundle.algorithm_matrix is not None:
        written.append(_write(out / "heatmap.csv", _heatmap_csv(bundle.algorithm_matrix)))
        written.append(
            _write(
                out / "algorithm_matrix.json",
                json.dumps({"matrix": matrix_to_json(bundle.algorithm_matrix)}) + "\n",
            )
        )
    if bundle.density is not None:
        written.append(
            _write(out / "density.json", json.dumps(density_to_json(bundle.density)) + "\n")
        )
    if bundle.density_noisy is not None:
        written.append(
            _write(
                out / "density_noisy.json",
                json.dumps(density_to_json(bundle.density_noisy)) + "\n",
            )
        )
    if bundle.bloch_trace is not None:
        written.append(
            _write(
                out / "bloch_trace.json",
                json.dumps(_bloch_json(bundle.bloch_trace)) + "\n",
            )
        )
    written.append(
        _write(out / "metadata.json", json.dumps(bundle.metadata, indent=2, sort_keys=True) + "\n")
    )
    return written


def run_metadata(config: dict) -> dict:
    """Stamp a resolved run configuration with versions and a timestamp."""
    import psitrum

    return {
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "versions": {
            "psitrum": psitrum.__version__,
            "numpy": np.__version__,
        },
        **config,
    }
