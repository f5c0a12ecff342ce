"""Binary networks: TPMs, connectivity, states, feasibility and TPM sampling.

A TPM is stored state-by-node: row ``r`` holds, for each node ``j``, the
probability that ``j`` is ON at ``t+1`` given the system was in the state with
index ``r`` at ``t``.  State indices are little-endian (node 0 is the least
significant bit).
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import RangeError, ShapeError

SystemState = tuple  # tuple of 0/1 ints, one per node

# Seed used whenever the caller does not pass one, so naive runs are reproducible.
DEFAULT_SEED = 20240101


def state_index(state: Sequence[int]) -> int:
    """Row index of ``state``; node 0 is the least significant bit."""
    return sum(int(bit) << i for i, bit in enumerate(state))


def index_to_state(index: int, n: int) -> SystemState:
    return tuple((index >> i) & 1 for i in range(n))


def validate_state(state: Sequence[int], n: int) -> SystemState:
    state = tuple(int(s) for s in state)
    if len(state) != n:
        raise ShapeError(f"state has {len(state)} entries, network has {n} nodes")
    if any(s not in (0, 1) for s in state):
        raise RangeError(f"state entries must be 0 or 1, got {state}")
    return state


@dataclass(frozen=True, eq=False)
class Tpm:
    """State-by-node transition matrix of shape ``(2**n, n)``."""

    rows: np.ndarray
    node_count: int

    def __post_init__(self):
        self.rows.setflags(write=False)

    @property
    def is_binary(self) -> bool:
        return bool(np.all((self.rows == 0) | (self.rows == 1)))

    def __eq__(self, other):
        if not isinstance(other, Tpm):
            return NotImplemented
        return self.node_count == other.node_count and np.array_equal(self.rows, other.rows)

    def __hash__(self):
        return hash((self.node_count, self.rows.tobytes()))

    def to_json(self) -> dict:
        data = self.rows.astype(int) if self.is_binary else self.rows
        return {"nodes": self.node_count, "tpm": data.tolist()}


def validate_tpm(matrix) -> Tpm:
    """Check shape ``2**D x D`` and entries in [0, 1]; return an immutable Tpm."""
    try:
        arr = np.array(matrix, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ShapeError(f"TPM is not a numeric matrix: {exc}") from None
    if arr.ndim != 2:
        raise ShapeError(f"TPM must be 2-dimensional, got {arr.ndim} dimensions")
    n_rows, n = arr.shape
    if n < 1:
        raise ShapeError("TPM must have at least one column (D >= 1)")
    if n_rows != 2 ** n:
        raise ShapeError(
            f"TPM with {n} columns needs {2 ** n} rows, got {n_rows}")
    if not np.all(np.isfinite(arr)) or arr.min() < 0 or arr.max() > 1:
        raise RangeError("TPM entries must lie in [0, 1]")
    return Tpm(arr, n)


def derive_cm(tpm: Tpm) -> np.ndarray:
    """Connectivity matrix: ``cm[i, j] = 1`` iff flipping node i can change column j."""
    n = tpm.node_count
    rows = np.arange(2 ** n)
    cm = np.zeros((n, n), dtype=np.int8)
    for i in range(n):
        cm[i] = np.any(tpm.rows[rows] != tpm.rows[rows ^ (1 << i)], axis=0)
    cm.setflags(write=False)
    return cm


@dataclass(frozen=True, eq=False)
class Network:
    tpm: Tpm
    cm: np.ndarray = field(repr=False)

    @property
    def node_count(self) -> int:
        return self.tpm.node_count

    @classmethod
    def from_tpm(cls, tpm) -> "Network":
        if not isinstance(tpm, Tpm):
            tpm = validate_tpm(tpm)
        return cls(tpm, derive_cm(tpm))


def as_network(obj) -> Network:
    return obj if isinstance(obj, Network) else Network.from_tpm(obj)


def state_probabilities(tpm: Tpm) -> np.ndarray:
    """State-by-state matrix: entry (r, s) = P(next state s | current state r)."""
    n = tpm.node_count
    bits = (np.arange(2 ** n)[:, None] >> np.arange(n)) & 1  # (states, nodes)
    on = tpm.rows[:, None, :]
    probs = np.where(bits[None, :, :] == 1, on, 1.0 - on)
    return probs.prod(axis=2)


def reachable_states(network) -> set:
    """States with positive probability from at least one source state."""
    network = as_network(network)
    n = network.node_count
    reach = state_probabilities(network.tpm).max(axis=0) > 0
    return {index_to_state(int(i), n) for i in np.flatnonzero(reach)}


@dataclass(frozen=True)
class FeasibilityReport:
    feasible: bool
    first_feasible_state: Optional[SystemState]
    states_tried: int


def first_feasible_state(network) -> FeasibilityReport:
    """Scan states in ascending index order and return the first reachable one."""
    network = as_network(network)
    n = network.node_count
    reach = state_probabilities(network.tpm).max(axis=0) > 0
    hits = np.flatnonzero(reach)
    if hits.size == 0:
        return FeasibilityReport(False, None, 2 ** n)
    first = int(hits[0])
    return FeasibilityReport(True, index_to_state(first, n), first + 1)


def sample_tpm(n: int, rng: np.random.Generator, mode: str = "binary") -> Tpm:
    """Draw a TPM uniformly: fair 0/1 entries, or uniform [0, 1] in probabilistic mode."""
    if n < 1:
        raise ShapeError("node count must be at least 1")
    shape = (2 ** n, n)
    if mode == "binary":
        rows = rng.integers(0, 2, size=shape).astype(float)
    elif mode == "probabilistic":
        rows = rng.random(shape)
    else:
        raise ValueError(f"unknown sampling mode {mode!r}")
    return Tpm(rows, n)


def grid_integer(n: int, k: int, total: int) -> int:
    """The k-th of ``total`` evenly spaced integers in [0, 2**(2**n * n))."""
    if not 0 <= k < total:
        raise ValueError(f"grid position {k} outside [0, {total})")
    top = 2 ** (2 ** n * n) - 1
    if total == 1:
        return 0
    # exact round-half-up of k * top / (total - 1)
    num, den = k * top, total - 1
    return (2 * num + den) // (2 * den)


def grid_tpm(n: int, k: int, total: int) -> Tpm:
    """Unpack the k-th grid integer row-major (bit 0 is row 0, column 0)."""
    value = grid_integer(n, k, total)
    n_bits = 2 ** n * n
    bits = [(value >> b) & 1 for b in range(n_bits)]
    rows = np.array(bits, dtype=float).reshape(2 ** n, n)
    return Tpm(rows, n)


def load_tpm(path) -> Tpm:
    """Read a TPM from JSON ({"nodes": D, "tpm": [...]}) or headerless CSV."""
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".json" or text.lstrip().startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ShapeError(f"cannot parse TPM JSON: {exc}") from None
        if not isinstance(data, dict) or "tpm" not in data:
            raise ShapeError('TPM JSON must be an object with a "tpm" field')
        tpm = validate_tpm(data["tpm"])
        if "nodes" in data and data["nodes"] != tpm.node_count:
            raise ShapeError(
                f'"nodes" is {data["nodes"]} but the matrix has {tpm.node_count} columns')
        return tpm
    rows = [row for row in csv.reader(text.splitlines()) if row]
    try:
        matrix = [[float(x) for x in row] for row in rows]
    except ValueError as exc:
        raise ShapeError(f"cannot parse TPM CSV: {exc}") from None
    if len({len(r) for r in matrix}) > 1:
        raise ShapeError("TPM CSV rows have differing lengths")
    return validate_tpm(matrix)


def load_state(path) -> SystemState:
    data = json.loads(Path(path).read_text())
    if not isinstance(data, list):
        raise ShapeError("state file must hold a JSON array")
    return tuple(int(x) for x in data)
