"""N x M circuit grid model, text/JSON serialization, and stage operators.

Text format (line oriented, UTF-8), one token per grid cell:

    format_version 1
    qubits 2 stages 2
    init 00
    q0: H , C
    q1: I , X
    measure 0 1

Tokens: gate names (I, X, Y, Z, H, S, T, SD, TD, SX, SXD, U1(a), U2(a,b),
U3(a,b,c), RX(a), RY(a), RZ(a)), C for a control, SW for a swap endpoint.
Controls attach to the single X cell in their column (CNOT/Toffoli). An
optional ``labels`` line names qubits for export headers.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from functools import reduce
from typing import Optional

import numpy as np

from .core import (
    MATRIX_MODE_MAX_QUBITS,
    ResourceLimitError,
    ValidationError,
    tensor_product,
)
from .gates import CATALOG, GateSpec, canonical_name, gate_matrix

FORMAT_VERSION = 1

KIND_GATE = "gate"
KIND_CONTROL = "control"
KIND_SWAP = "swap"


class CircuitParseError(ValidationError):
    """Raised on malformed circuit text or JSON."""


@dataclass(frozen=True)
class CircuitCell:
    kind: str
    gate: Optional[GateSpec] = None

    def __post_init__(self):
        if self.kind not in (KIND_GATE, KIND_CONTROL, KIND_SWAP):
            raise ValidationError(f"unknown cell kind {self.kind!r}")
        if (self.kind == KIND_GATE) != (self.gate is not None):
            raise ValidationError("gate cells carry a GateSpec; markers do not")

    @property
    def is_identity(self) -> bool:
        return self.kind == KIND_GATE and self.gate.name == "I"


IDENTITY_CELL = CircuitCell(KIND_GATE, GateSpec("I"))
CONTROL_CELL = CircuitCell(KIND_CONTROL)
SWAP_CELL = CircuitCell(KIND_SWAP)


def _check_column(cells: list[CircuitCell], col: int) -> None:
    controls = [q for q, c in enumerate(cells) if c.kind == KIND_CONTROL]
    swaps = [q for q, c in enumerate(cells) if c.kind == KIND_SWAP]
    if controls and swaps:
        raise ValidationError(f"column {col}: controls and swap endpoints mixed")
    if swaps and len(swaps) != 2:
        raise ValidationError(f"column {col}: swap needs exactly 2 endpoints, got {len(swaps)}")
    if controls:
        targets = [
            q
            for q, c in enumerate(cells)
            if c.kind == KIND_GATE and c.gate.name == "X"
        ]
        if len(targets) != 1:
            raise ValidationError(
                f"column {col}: {len(controls)} control(s) need exactly one X target, "
                f"found {len(targets)}"
            )
        if len(controls) > 2:
            raise ValidationError(f"column {col}: at most 2 controls supported")


@dataclass(frozen=True)
class Circuit:
    """Immutable N-qubit, M-stage circuit grid; ``grid[q][s]`` is one cell."""

    num_qubits: int
    num_stages: int
    grid: tuple
    initial_bits: tuple[int, ...]
    measured: tuple[int, ...]
    labels: tuple[str, ...] = ()
    noise: Optional[dict] = None

    def __post_init__(self):
        n, m = self.num_qubits, self.num_stages
        if n < 1 or m < 1:
            raise ValidationError("circuit needs at least one qubit and one stage")
        grid = tuple(tuple(row) for row in self.grid)
        object.__setattr__(self, "grid", grid)
        if len(grid) != n or any(len(row) != m for row in grid):
            raise ValidationError(f"grid must be exactly {n}x{m}")
        bits = tuple(int(b) for b in self.initial_bits)
        if len(bits) != n or any(b not in (0, 1) for b in bits):
            raise ValidationError("initial_bits must be one 0/1 per qubit")
        object.__setattr__(self, "initial_bits", bits)
        meas = tuple(sorted(set(int(q) for q in self.measured)))
        if any(q < 0 or q >= n for q in meas):
            raise ValidationError(f"measured qubits {meas} out of range")
        object.__setattr__(self, "measured", meas)
        labels = tuple(self.labels) or tuple(f"q{k}" for k in range(n))
        if len(labels) != n:
            raise ValidationError("labels must name every qubit")
        object.__setattr__(self, "labels", labels)
        for s in range(m):
            _check_column([grid[q][s] for q in range(n)], s)

    def column(self, s: int) -> list[CircuitCell]:
        return [self.grid[q][s] for q in range(self.num_qubits)]

    def initial_index(self) -> int:
        return sum(b << q for q, b in enumerate(self.initial_bits))

    def init_bitstring(self) -> str:
        return "".join(str(self.initial_bits[q]) for q in reversed(range(self.num_qubits)))


# ---------------------------------------------------------------------------
# stage operators


def _embed_operator(g: np.ndarray, qubits: list[int], n: int) -> np.ndarray:
    """Expand gate ``g`` (bit t of its index = circuit qubit qubits[t]) to n qubits."""
    k = len(qubits)
    rest = [q for q in range(n) if q not in qubits]
    full = tensor_product(np.eye(1 << (n - k), dtype=np.complex128), g)
    # composite index x = (r << k) | s maps to circuit basis index y
    s_idx = np.arange(1 << k)
    r_idx = np.arange(1 << (n - k))
    y_s = np.zeros(1 << k, dtype=np.int64)
    for t, q in enumerate(qubits):
        y_s |= ((s_idx >> t) & 1) << q
    y_r = np.zeros(1 << (n - k), dtype=np.int64)
    for j, q in enumerate(rest):
        y_r |= ((r_idx >> j) & 1) << q
    y = (y_r[:, None] | y_s[None, :]).reshape(-1)
    out = np.empty_like(full)
    out[np.ix_(y, y)] = full
    return out


def stage_operator(c: Circuit, stage: int) -> np.ndarray:
    """The 2^N x 2^N unitary implemented by one column of the grid."""
    n = c.num_qubits
    if n > MATRIX_MODE_MAX_QUBITS:
        raise ResourceLimitError(
            f"stage operator for {n} qubits exceeds the {MATRIX_MODE_MAX_QUBITS}-qubit cap"
        )
    if not 0 <= stage < c.num_stages:
        raise ValidationError(f"stage {stage} out of range")
    cells = c.column(stage)
    controls = [q for q, cell in enumerate(cells) if cell.kind == KIND_CONTROL]
    swaps = [q for q, cell in enumerate(cells) if cell.kind == KIND_SWAP]

    # single-qubit layer: kron fold, qubit N-1 leftmost
    singles = []
    for q in reversed(range(n)):
        cell = cells[q]
        if cell.kind == KIND_GATE and not (controls and cell.gate.name == "X"):
            singles.append(gate_matrix(cell.gate))
        else:
            singles.append(np.eye(2, dtype=np.complex128))
    op = reduce(tensor_product, singles)

    if controls:
        target = next(
            q for q, cell in enumerate(cells) if cell.kind == KIND_GATE and cell.gate.name == "X"
        )
        name = "CNOT" if len(controls) == 1 else "TOFFOLI"
        g = gate_matrix(GateSpec(name))
        op = _embed_operator(g, [target] + controls, n) @ op
    elif swaps:
        g = gate_matrix(GateSpec("SWAP"))
        op = _embed_operator(g, swaps, n) @ op
    return op


# ---------------------------------------------------------------------------
# token <-> cell

_TOKEN_RE = re.compile(r"^([A-Za-z][A-Za-z0-9]*)(?:\(([^()]*)\))?$")
_EMIT_ALIASES = {"SDG": "SD", "TDG": "TD", "SXDG": "SXD"}


def parse_token(tok: str) -> CircuitCell:
    tok = tok.strip()
    m = _TOKEN_RE.match(tok)
    if not m:
        raise CircuitParseError(f"malformed token {tok!r}")
    name, args = m.group(1), m.group(2)
    up = name.upper()
    if up == "C":
        if args is not None:
            raise CircuitParseError("control marker takes no parameters")
        return CONTROL_CELL
    if up == "SW":
        if args is not None:
            raise CircuitParseError("swap marker takes no parameters")
        return SWAP_CELL
    try:
        cname = canonical_name(up)
    except ValidationError as e:
        raise CircuitParseError(str(e)) from e
    if CATALOG[cname].num_qubits != 1:
        raise CircuitParseError(
            f"{cname} is multi-qubit; express it with C/SW markers plus an X target"
        )
    params: tuple[float, ...] = ()
    if args is not None:
        try:
            params = tuple(float(a) for a in args.split(","))
        except ValueError as e:
            raise CircuitParseError(f"bad parameter list in {tok!r}") from e
    try:
        return CircuitCell(KIND_GATE, GateSpec(cname, params))
    except ValidationError as e:
        raise CircuitParseError(str(e)) from e


def format_token(cell: CircuitCell) -> str:
    if cell.kind == KIND_CONTROL:
        return "C"
    if cell.kind == KIND_SWAP:
        return "SW"
    name = _EMIT_ALIASES.get(cell.gate.name, cell.gate.name)
    if cell.gate.params:
        return f"{name}({','.join(repr(p) for p in cell.gate.params)})"
    return name


# ---------------------------------------------------------------------------
# text format


def _split_cells(body: str) -> list[str]:
    """Split a grid row on commas outside parentheses (angle lists keep theirs)."""
    cells = []
    depth = 0
    current = []
    for ch in body:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            cells.append("".join(current))
            current = []
        else:
            current.append(ch)
    cells.append("".join(current))
    return cells


def parse_text_circuit(source: str) -> Circuit:
    lines = [ln.strip() for ln in source.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    pos = 0

    def expect(prefix: str) -> str:
        nonlocal pos
        if pos >= len(lines) or not lines[pos].startswith(prefix):
            raise CircuitParseError(f"expected {prefix!r} line at line {pos + 1}")
        ln = lines[pos]
        pos += 1
        return ln

    if pos < len(lines) and lines[pos].startswith("format_version"):
        ver = lines[pos].split()[1:]
        if ver != [str(FORMAT_VERSION)]:
            raise CircuitParseError(f"unsupported format_version {ver}")
        pos += 1

    header = expect("qubits")
    m = re.match(r"^qubits\s+(\d+)\s+stages\s+(\d+)$", header)
    if not m:
        raise CircuitParseError(f"bad header line {header!r}")
    n, stages = int(m.group(1)), int(m.group(2))

    init_line = expect("init").split()
    if len(init_line) != 2 or not re.fullmatch(r"[01]+", init_line[1]):
        raise CircuitParseError("init line must be 'init <bits>'")
    bits_str = init_line[1]
    if len(bits_str) != n:
        raise CircuitParseError(f"init needs {n} bits, got {len(bits_str)}")
    initial = tuple(int(b) for b in reversed(bits_str))  # qubit 0 rightmost

    labels: tuple[str, ...] = ()
    if pos < len(lines) and lines[pos].startswith("labels"):
        labels = tuple(lines[pos].split()[1:])
        pos += 1

    grid: list[list[CircuitCell]] = []
    for q in range(n):
        ln = expect(f"q{q}:")
        body = ln.split(":", 1)[1]
        row = [parse_token(tok) for tok in _split_cells(body)]
        if len(row) != stages:
            raise CircuitParseError(f"row q{q} has {len(row)} cells, expected {stages}")
        grid.append(row)

    measure = expect("measure").split()[1:]
    try:
        measured = tuple(int(q) for q in measure)
    except ValueError as e:
        raise CircuitParseError("measure line must list qubit indices") from e

    if pos != len(lines):
        raise CircuitParseError(f"unexpected trailing line {lines[pos]!r}")
    try:
        return Circuit(n, stages, grid, initial, measured, labels)
    except ValidationError as e:
        raise CircuitParseError(str(e)) from e


def serialize_text_circuit(c: Circuit) -> str:
    out = [f"format_version {FORMAT_VERSION}"]
    out.append(f"qubits {c.num_qubits} stages {c.num_stages}")
    out.append(f"init {c.init_bitstring()}")
    if c.labels != tuple(f"q{k}" for k in range(c.num_qubits)):
        out.append("labels " + " ".join(c.labels))
    for q in range(c.num_qubits):
        out.append(f"q{q}: " + " , ".join(format_token(cell) for cell in c.grid[q]))
    out.append("measure " + " ".join(str(q) for q in c.measured))
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# JSON format


def circuit_to_dict(c: Circuit) -> dict:
    d = {
        "format_version": FORMAT_VERSION,
        "num_qubits": c.num_qubits,
        "num_stages": c.num_stages,
        "init": c.init_bitstring(),
        "labels": list(c.labels),
        "grid": [[format_token(cell) for cell in row] for row in c.grid],
        "measure": list(c.measured),
    }
    if c.noise is not None:
        d["noise"] = dict(c.noise)
    return d


def circuit_from_dict(d: dict) -> Circuit:
    if not isinstance(d, dict):
        raise CircuitParseError("circuit JSON must be an object")
    ver = d.get("format_version")
    if ver != FORMAT_VERSION:
        raise CircuitParseError(f"unsupported format_version {ver!r}")
    try:
        n = int(d["num_qubits"])
        stages = int(d["num_stages"])
        init = str(d["init"])
        grid_tokens = d["grid"]
        measure = d.get("measure", [])
    except (KeyError, TypeError, ValueError) as e:
        raise CircuitParseError(f"bad circuit JSON: {e}") from e
    if not re.fullmatch(r"[01]+", init) or len(init) != n:
        raise CircuitParseError("init must be an N-character bitstring")
    if len(grid_tokens) != n:
        raise CircuitParseError(f"grid must have {n} rows")
    grid = []
    for row in grid_tokens:
        if len(row) != stages:
            raise CircuitParseError("ragged grid row")
        grid.append([parse_token(tok) for tok in row])
    initial = tuple(int(b) for b in reversed(init))
    labels = tuple(d.get("labels") or ())
    noise = d.get("noise")
    # semantic (column-consistency) errors propagate as plain ValidationError
    # so callers can distinguish them from malformed input
    return Circuit(n, stages, grid, initial, tuple(measure), labels, noise)


def serialize_circuit(c: Circuit, fmt: str = "text") -> str:
    if fmt == "text":
        return serialize_text_circuit(c)
    if fmt == "json":
        return json.dumps(circuit_to_dict(c), indent=2) + "\n"
    raise ValidationError(f"unknown serialization format {fmt!r}")


def parse_circuit(source: str) -> Circuit:
    """Parse either format; JSON if the first non-space char is '{'."""
    stripped = source.lstrip()
    if stripped.startswith("{"):
        return circuit_from_dict(json.loads(source))
    return parse_text_circuit(source)
