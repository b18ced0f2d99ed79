"""Dense complex linear-algebra kernels and the fundamental quantum state types.

Conventions used everywhere in this package:

* Qubits are labeled 0..N-1 with qubit 0 the least significant bit of a
  computational-basis index (rightmost bit of a basis label like "110").
* The tensor factor for qubit N-1 is the leftmost Kronecker factor, so a
  column of single-qubit gates is ``kron(U_{N-1}, ..., U_1, U_0)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Shared absolute tolerance for "exact" quantum identities (normalization,
# unitarity, hermiticity). Double precision kernels keep errors far below it.
ATOL = 1e-10

# Dense-representation resource caps. 2^N x 2^N complex doubles explode past
# 12 qubits; density evolution is 4^N and capped harder.
MATRIX_MODE_MAX_QUBITS = 12
VECTOR_MODE_MAX_QUBITS = 24
DENSITY_MAX_QUBITS = 8


class SimulationError(Exception):
    """Base class for all simulator errors."""


class DimensionError(SimulationError):
    """Operands have incompatible or non-power-of-two dimensions."""


class ResourceLimitError(SimulationError):
    """A requested computation exceeds the configured qubit caps."""


class ValidationError(SimulationError):
    """An input object violates a structural invariant."""


def _require_finite(arr: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(arr.view(np.float64))):
        raise ValidationError(f"{what} contains NaN or Inf entries")


def num_qubits_of_dim(dim: int) -> int:
    """Return n such that dim == 2**n, or raise DimensionError."""
    n = int(dim).bit_length() - 1
    if dim <= 0 or (1 << n) != dim:
        raise DimensionError(f"dimension {dim} is not a power of two")
    return n


@dataclass(frozen=True)
class StateVector:
    """Normalized pure state of ``num_qubits`` qubits (2^N complex amplitudes)."""

    num_qubits: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        object.__setattr__(self, "amplitudes", amps)
        if self.num_qubits < 1:
            raise ValidationError("num_qubits must be >= 1")
        if amps.shape != (1 << self.num_qubits,):
            raise DimensionError(
                f"expected {1 << self.num_qubits} amplitudes, got {amps.shape}"
            )
        _require_finite(amps, "state vector")
        norm = float(np.sum(np.abs(amps) ** 2))
        if abs(norm - 1.0) > ATOL:
            raise ValidationError(f"state not normalized: sum |a_n|^2 = {norm!r}")
        amps.setflags(write=False)

    @classmethod
    def basis(cls, num_qubits: int, index: int) -> "StateVector":
        amps = np.zeros(1 << num_qubits, dtype=np.complex128)
        amps[index] = 1.0
        return cls(num_qubits, amps)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, trace-one, PSD matrix over ``num_qubits`` qubits."""

    num_qubits: int
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=np.complex128)
        object.__setattr__(self, "entries", m)
        dim = 1 << self.num_qubits
        if self.num_qubits < 1 or m.shape != (dim, dim):
            raise DimensionError(f"expected {dim}x{dim} matrix, got {m.shape}")
        _require_finite(m, "density matrix")
        if not np.allclose(m, m.conj().T, atol=ATOL):
            raise ValidationError("density matrix not Hermitian")
        tr = complex(np.trace(m))
        if abs(tr - 1.0) > ATOL:
            raise ValidationError(f"density matrix trace {tr!r} != 1")
        m.setflags(write=False)

    def check_psd(self, atol: float = 1e-9) -> None:
        """Eigenvalue check; O(8^n), validation paths only."""
        evals = np.linalg.eigvalsh(self.entries)
        if evals.min() < -atol:
            raise ValidationError(f"density matrix not PSD: min eigenvalue {evals.min()}")


@dataclass(frozen=True)
class BlochVector:
    """Bloch-sphere coordinates of a single-qubit state; mixed states lie inside."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        r2 = self.x**2 + self.y**2 + self.z**2
        if not np.isfinite(r2) or r2 > 1.0 + 1e-9:
            raise ValidationError(f"Bloch vector has norm^2 {r2} > 1")


def is_unitary(m: np.ndarray, atol: float = ATOL) -> bool:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return np.allclose(m.conj().T @ m, np.eye(m.shape[0]), atol=atol)


def check_unitary(m: np.ndarray, atol: float = ATOL) -> None:
    if not is_unitary(m, atol=atol):
        raise ValidationError("matrix is not unitary within tolerance")


def tensor_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product; the higher-qubit operator goes on the left."""
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    dim = a.shape[0] * b.shape[0]
    if dim > (1 << MATRIX_MODE_MAX_QUBITS):
        raise ResourceLimitError(
            f"tensor product dimension {dim} exceeds the "
            f"{MATRIX_MODE_MAX_QUBITS}-qubit dense-matrix cap"
        )
    return np.kron(a, b)


def mat_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.shape != b.shape or a.ndim != 2:
        raise DimensionError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def apply_unitary(u: np.ndarray, psi: StateVector) -> StateVector:
    u = np.asarray(u, dtype=np.complex128)
    dim = 1 << psi.num_qubits
    if u.shape != (dim, dim):
        raise DimensionError(f"unitary shape {u.shape} does not match {dim}-dim state")
    out = u @ psi.amplitudes
    # repair the O(eps) drift so long products never trip the invariant
    out = out / np.sqrt(np.sum(np.abs(out) ** 2))
    return StateVector(psi.num_qubits, out)


def density_from_state(psi: StateVector) -> DensityMatrix:
    a = psi.amplitudes
    return DensityMatrix(psi.num_qubits, np.outer(a, a.conj()))


def partial_trace(rho: DensityMatrix, keep_qubits) -> DensityMatrix:
    """Reduced density matrix over ``keep_qubits``, tracing out the rest."""
    n = rho.num_qubits
    keep = sorted(set(int(q) for q in keep_qubits))
    if not keep:
        raise ValidationError("keep_qubits must be nonempty")
    if keep[0] < 0 or keep[-1] >= n:
        raise ValidationError(f"keep_qubits {keep} out of range for {n} qubits")
    if len(keep) == n:
        return rho

    # Tensor axes: axis i of the row (col) index corresponds to qubit n-1-i.
    t = rho.entries.reshape([2] * (2 * n))
    letters = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUV"
    row = []
    col = []
    out_row = []
    out_col = []
    next_letter = 0
    for i in range(n):
        q = n - 1 - i
        r = letters[next_letter]
        next_letter += 1
        row.append(r)
        if q in keep:
            c = letters[next_letter]
            next_letter += 1
            col.append(c)
            out_row.append(r)
            out_col.append(c)
        else:
            col.append(r)  # repeated letter => traced
    sub = "".join(row) + "".join(col) + "->" + "".join(out_row) + "".join(out_col)
    k = len(keep)
    reduced = np.einsum(sub, t).reshape(1 << k, 1 << k)
    return DensityMatrix(k, reduced)


_PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
_PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
_PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)


def bloch_vector(rho1: DensityMatrix) -> BlochVector:
    if rho1.num_qubits != 1:
        raise DimensionError("Bloch vector requires a single-qubit density matrix")
    m = rho1.entries
    return BlochVector(
        x=float(np.real(np.trace(m @ _PAULI_X))),
        y=float(np.real(np.trace(m @ _PAULI_Y))),
        z=float(np.real(np.trace(m @ _PAULI_Z))),
    )


def purity(rho: DensityMatrix) -> float:
    return float(np.real(np.trace(rho.entries @ rho.entries)))
