"""Pauli strings and real-weighted Pauli-sum Hamiltonians."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import eigsh

from .errors import CapExceededError, DimensionError, ParameterError

AXES = ("X", "Y", "Z")
DENSE_CAP = 14

_SINGLE = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def qubit_mask(q: int, n: int) -> int:
    """Basis-index bit of qubit ``q``; qubit 0 is the most significant bit."""
    return 1 << (n - 1 - q)


@dataclass(frozen=True)
class PauliString:
    """Tensor product of single-qubit Paulis; identity on qubits not listed."""

    factors: tuple[tuple[int, str], ...]
    num_qubits: int

    def __init__(self, factors: Mapping[int, str] | Iterable[tuple[int, str]], num_qubits: int):
        items = factors.items() if isinstance(factors, Mapping) else factors
        canon: dict[int, str] = {}
        for q, ax in items:
            q = int(q)
            ax = str(ax).upper()
            if ax not in AXES:
                raise ParameterError(f"unknown Pauli axis {ax!r}")
            if not 0 <= q < num_qubits:
                raise ParameterError(f"qubit {q} out of range for {num_qubits} qubits")
            if q in canon:
                raise ParameterError(f"qubit {q} listed twice")
            canon[q] = ax
        object.__setattr__(self, "factors", tuple(sorted(canon.items())))
        object.__setattr__(self, "num_qubits", int(num_qubits))

    @property
    def is_identity(self) -> bool:
        return not self.factors

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(q for q, _ in self.factors)

    @property
    def is_diagonal(self) -> bool:
        return all(ax == "Z" for _, ax in self.factors)

    def sort_key(self):
        return (self.support, tuple(ax for _, ax in self.factors))

    def label(self) -> str:
        ops = dict(self.factors)
        return "".join(ops.get(q, "I") for q in range(self.num_qubits))

    def masks(self) -> tuple[int, int, int]:
        """(x_mask, z_mask, number of Y factors) of the string."""
        x = z = ny = 0
        for q, ax in self.factors:
            m = qubit_mask(q, self.num_qubits)
            if ax in "XY":
                x |= m
            if ax in "YZ":
                z |= m
            ny += ax == "Y"
        return x, z, ny

    def to_dense(self) -> np.ndarray:
        ops = dict(self.factors)
        out = np.ones((1, 1), dtype=complex)
        for q in range(self.num_qubits):
            out = np.kron(out, _SINGLE[ops.get(q, "I")])
        return out


def _signs(z: int, d: int) -> np.ndarray:
    idx = np.arange(d, dtype=np.int64)
    return 1.0 - 2.0 * (np.bitwise_count(idx & z) & 1)


@dataclass(frozen=True)
class CompiledTerm:
    coeff: float
    x: int
    phase: np.ndarray  # length 2**n: P[j ^ x, j]


@dataclass
class Hamiltonian:
    """Sum of real coefficients times Pauli strings on ``num_qubits`` qubits.

    Terms are merged by Pauli string and kept in canonical order: the identity
    (constant offset) first, then by support and axes.
    """

    terms: list[tuple[float, PauliString]]
    num_qubits: int
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        merged: dict[PauliString, float] = {}
        for c, ps in self.terms:
            c = float(c)
            if not math.isfinite(c):
                raise ParameterError(f"non-finite coefficient {c}")
            if ps.num_qubits != self.num_qubits:
                raise DimensionError("Pauli string qubit count differs from Hamiltonian")
            merged[ps] = merged.get(ps, 0.0) + c
        self.terms = sorted(((c, ps) for ps, c in merged.items() if c != 0.0), key=lambda t: t[1].sort_key())

    @property
    def offset(self) -> float:
        return sum(c for c, ps in self.terms if ps.is_identity)

    @property
    def is_diagonal(self) -> bool:
        return all(ps.is_diagonal for _, ps in self.terms)

    def compiled(self) -> list[CompiledTerm]:
        if "compiled" not in self._cache:
            d = 1 << self.num_qubits
            out = []
            for c, ps in self.terms:
                x, z, ny = ps.masks()
                out.append(CompiledTerm(c, x, (1j ** ny) * _signs(z, d)))
            self._cache["compiled"] = out
        return self._cache["compiled"]

    def diagonal(self) -> np.ndarray:
        """Diagonal of a Z-only Hamiltonian."""
        if not self.is_diagonal:
            raise ParameterError("Hamiltonian has off-diagonal terms")
        if "diag" not in self._cache:
            d = 1 << self.num_qubits
            diag = np.zeros(d)
            for t in self.compiled():
                diag += t.coeff * t.phase.real
            self._cache["diag"] = diag
        return self._cache["diag"]

    def to_dense(self, cap: int = DENSE_CAP) -> np.ndarray:
        if self.num_qubits > cap:
            raise CapExceededError(f"dense Hamiltonian capped at {cap} qubits, got {self.num_qubits}")
        d = 1 << self.num_qubits
        out = np.zeros((d, d), dtype=complex)
        j = np.arange(d)
        for t in self.compiled():
            out[j ^ t.x, j] += t.coeff * t.phase
        return out

    def to_sparse(self) -> sparse.csr_matrix:
        d = 1 << self.num_qubits
        j = np.arange(d)
        out = sparse.csr_matrix((d, d), dtype=complex)
        for t in self.compiled():
            out = out + sparse.csr_matrix((t.coeff * t.phase, (j ^ t.x, j)), shape=(d, d))
        return out

    def to_json(self) -> dict:
        return {
            "num_qubits": self.num_qubits,
            "terms": [
                {"coeff": c, "paulis": {str(q): ax for q, ax in ps.factors}} for c, ps in self.terms
            ],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Hamiltonian":
        n = int(obj["num_qubits"])
        terms = [(float(t["coeff"]), PauliString({int(q): ax for q, ax in t["paulis"].items()}, n)) for t in obj["terms"]]
        return cls(terms, n)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def max_eigenvalue(h: Hamiltonian, cap: int = DENSE_CAP) -> float:
    """Largest eigenvalue of ``h``; Z-only Hamiltonians are read off the diagonal."""
    if h.num_qubits > cap:
        raise CapExceededError(f"eigensolve capped at {cap} qubits, got {h.num_qubits}")
    if not h.terms:
        return 0.0
    if h.is_diagonal:
        return float(np.max(h.diagonal()))
    if h.num_qubits <= 10:
        return float(np.linalg.eigvalsh(h.to_dense(cap))[-1])
    return float(eigsh(h.to_sparse(), k=1, which="LA", return_eigenvectors=False)[0])
