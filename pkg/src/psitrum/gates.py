"""The built-in gate catalog: 20 single- and multi-qubit gates as unitary factories.

Printed-form fixups baked in: H and U2 carry a 1/sqrt(2) prefactor, SX/SXDG
carry 1/2, and U3's bottom-right phase is exp(i(lambda+phi)) so the matrix is
unitary for all angles.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import ValidationError, is_unitary

INV_SQRT2 = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class GateSpec:
    """A gate name plus its angle parameters (radians)."""

    name: str
    params: tuple[float, ...] = ()

    def __post_init__(self):
        name = canonical_name(self.name)
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        info = CATALOG[name]
        if len(self.params) != info.num_params:
            raise ValidationError(
                f"gate {name} takes {info.num_params} parameter(s), "
                f"got {len(self.params)}"
            )
        if not all(math.isfinite(p) for p in self.params):
            raise ValidationError(f"gate {name} has non-finite parameters")


@dataclass(frozen=True)
class GateInfo:
    name: str
    num_qubits: int
    num_params: int
    param_names: tuple[str, ...]
    factory: Callable[..., np.ndarray]


def _mat(rows) -> np.ndarray:
    return np.array(rows, dtype=np.complex128)


def _i():
    return _mat([[1, 0], [0, 1]])


def _x():
    return _mat([[0, 1], [1, 0]])


def _y():
    return _mat([[0, -1j], [1j, 0]])


def _z():
    return _mat([[1, 0], [0, -1]])


def _h():
    return INV_SQRT2 * _mat([[1, 1], [1, -1]])


def _s():
    return _mat([[1, 0], [0, 1j]])


def _t():
    return _mat([[1, 0], [0, np.exp(1j * math.pi / 4)]])


def _sdg():
    return _mat([[1, 0], [0, -1j]])


def _tdg():
    return _mat([[1, 0], [0, np.exp(-1j * math.pi / 4)]])


def _u1(theta):
    return _mat([[1, 0], [0, np.exp(1j * theta)]])


def _u2(theta, phi):
    return INV_SQRT2 * _mat(
        [[1, -np.exp(1j * theta)], [np.exp(1j * phi), np.exp(1j * (theta + phi))]]
    )


def _u3(theta, phi, lam):
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return _mat(
        [
            [c, -np.exp(1j * lam) * s],
            [np.exp(1j * phi) * s, np.exp(1j * (lam + phi)) * c],
        ]
    )


def _rx(theta):
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return _mat([[c, -1j * s], [-1j * s, c]])


def _ry(theta):
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return _mat([[c, -s], [s, c]])


def _rz(phi):
    return _mat([[np.exp(-1j * phi / 2), 0], [0, np.exp(1j * phi / 2)]])


def _sx():
    return 0.5 * _mat([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]])


def _sxdg():
    return 0.5 * _mat([[1 - 1j, 1 + 1j], [1 + 1j, 1 - 1j]])


def _swap():
    return _mat([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]])


def _cnot():
    # control is the higher-order index bit, target the lower
    return _mat([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])


def _toffoli():
    m = np.eye(8, dtype=np.complex128)
    m[[6, 7]] = m[[7, 6]]
    return m


def _entry(name, nq, pnames, factory):
    return GateInfo(name, nq, len(pnames), tuple(pnames), factory)


CATALOG: dict[str, GateInfo] = {
    g.name: g
    for g in [
        _entry("I", 1, (), _i),
        _entry("X", 1, (), _x),
        _entry("Y", 1, (), _y),
        _entry("Z", 1, (), _z),
        _entry("H", 1, (), _h),
        _entry("S", 1, (), _s),
        _entry("T", 1, (), _t),
        _entry("SDG", 1, (), _sdg),
        _entry("TDG", 1, (), _tdg),
        _entry("U1", 1, ("theta",), _u1),
        _entry("U2", 1, ("theta", "phi"), _u2),
        _entry("U3", 1, ("theta", "phi", "lambda"), _u3),
        _entry("RX", 1, ("theta",), _rx),
        _entry("RY", 1, ("theta",), _ry),
        _entry("RZ", 1, ("phi",), _rz),
        _entry("SX", 1, (), _sx),
        _entry("SXDG", 1, (), _sxdg),
        _entry("SWAP", 2, (), _swap),
        _entry("CNOT", 2, (), _cnot),
        _entry("TOFFOLI", 3, (), _toffoli),
    ]
}

# circuit-file tokens / common spellings -> canonical catalog names
_ALIASES = {
    "SD": "SDG",
    "TD": "TDG",
    "SXD": "SXDG",
    "CX": "CNOT",
    "CCX": "TOFFOLI",
}


def canonical_name(name: str) -> str:
    up = name.upper()
    up = _ALIASES.get(up, up)
    if up not in CATALOG:
        raise ValidationError(f"unknown gate {name!r}")
    return up


def gate_matrix(spec: GateSpec) -> np.ndarray:
    """Concrete unitary for a gate spec (2x2, 4x4 or 8x8)."""
    info = CATALOG[spec.name]
    return info.factory(*spec.params)


_PARAM_GRID = (0.0, math.pi / 3, math.pi / 2, math.pi)


def validate_catalog(atol: float = 1e-12) -> list[str]:
    """Check unitarity of every gate over a grid of angles; return violations."""
    violations = []
    for info in CATALOG.values():
        grids = [_PARAM_GRID] * info.num_params if info.num_params else [()]
        if info.num_params:
            import itertools

            combos = itertools.product(*grids)
        else:
            combos = [()]
        for params in combos:
            m = info.factory(*params)
            if not is_unitary(m, atol=atol):
                violations.append(f"{info.name}{params}: not unitary within {atol}")
    return violations


def catalog_descriptors() -> list[dict]:
    """JSON-friendly gate descriptors for the UI palette."""
    out = []
    for info in CATALOG.values():
        out.append(
            {
                "name": info.name,
                "num_qubits": info.num_qubits,
                "param_names": list(info.param_names),
                "matrix_dim": 2**info.num_qubits,
            }
        )
    return out
