"""Ising and (3,1)-QRAC encodings of MaxCut."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import DimensionError, ParameterError
from .graph import Graph
from .pauli import AXES, Hamiltonian, PauliString
from .simulator import DensityMatrix


def build_ising_hamiltonian(g: Graph) -> Hamiltonian:
    """H = sum over edges of (I - Z_i Z_j) / 2 on one qubit per node."""
    n = g.num_nodes
    terms = [(0.5 * g.num_edges, PauliString({}, n))]
    terms += [(-0.5, PauliString({i: "Z", j: "Z"}, n)) for i, j in g.edges]
    return Hamiltonian(terms, n)


@dataclass(frozen=True)
class QracAssignment:
    """Node -> (qubit, axis) slots with at most three nodes per qubit."""

    slots: tuple[tuple[int, str], ...]  # indexed by node
    num_qubits: int

    @property
    def num_nodes(self) -> int:
        return len(self.slots)

    def pauli(self, node: int) -> PauliString:
        q, ax = self.slots[node]
        return PauliString({q: ax}, self.num_qubits)

    def nodes_on(self, qubit: int) -> list[int]:
        return [v for v, (q, _) in enumerate(self.slots) if q == qubit]

    def validate(self, g: Graph) -> None:
        if self.num_nodes != g.num_nodes:
            raise DimensionError(f"assignment covers {self.num_nodes} nodes, graph has {g.num_nodes}")
        used = set()
        for v, (q, ax) in enumerate(self.slots):
            if ax not in AXES or not 0 <= q < self.num_qubits:
                raise ParameterError(f"node {v} has invalid slot {(q, ax)}")
            if (q, ax) in used:
                raise ParameterError(f"slot {(q, ax)} used twice")
            used.add((q, ax))
        for i, j in g.edges:
            if self.slots[i][0] == self.slots[j][0]:
                raise ParameterError(f"adjacent nodes {i} and {j} share qubit {self.slots[i][0]}")

    def to_json(self) -> dict:
        return {"num_qubits": self.num_qubits, "nodes": {str(v): [q, ax] for v, (q, ax) in enumerate(self.slots)}}

    @classmethod
    def from_json(cls, obj: Mapping) -> "QracAssignment":
        nodes = obj["nodes"]
        slots = tuple((int(nodes[str(v)][0]), str(nodes[str(v)][1])) for v in range(len(nodes)))
        return cls(slots, int(obj["num_qubits"]))

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def assign_qrac(g: Graph) -> QracAssignment:
    """Greedy packing of nodes onto qubits, highest degree first.

    Each node goes to the lowest-indexed qubit that still has a free axis and
    holds none of its neighbours; axes fill in the order X, Y, Z.
    """
    adj = g.neighbors()
    deg = g.degrees()
    order = sorted(range(g.num_nodes), key=lambda v: (-deg[v], v))
    qubits: list[list[int]] = []
    slots: dict[int, tuple[int, str]] = {}
    for v in order:
        for q, members in enumerate(qubits):
            if len(members) < 3 and not adj[v].intersection(members):
                break
        else:
            q = len(qubits)
            qubits.append([])
        slots[v] = (q, AXES[len(qubits[q])])
        qubits[q].append(v)
    return QracAssignment(tuple(slots[v] for v in range(g.num_nodes)), len(qubits))


def build_qrac_hamiltonian(g: Graph, a: QracAssignment) -> Hamiltonian:
    """H = sum over edges of (I - 3 P_i P_j) / 2 with P_v the node's slot Pauli."""
    a.validate(g)
    n = a.num_qubits
    terms = [(0.5 * g.num_edges, PauliString({}, n))]
    for i, j in g.edges:
        (qi, ai), (qj, aj) = a.slots[i], a.slots[j]
        terms.append((-1.5, PauliString({qi: ai, qj: aj}, n)))
    return Hamiltonian(terms, n)


_PAULI = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def qrac_bloch_vectors(bits: Sequence[int], a: QracAssignment) -> np.ndarray:
    """Per-qubit Bloch vectors of F(m); unused axes take bit 0."""
    if len(bits) != a.num_nodes:
        raise DimensionError(f"got {len(bits)} bits for {a.num_nodes} assigned nodes")
    signs = np.ones((a.num_qubits, 3))
    for v, (q, ax) in enumerate(a.slots):
        if bits[v] not in (0, 1):
            raise ParameterError(f"bits must be 0 or 1, got {bits[v]!r}")
        signs[q, AXES.index(ax)] = -1.0 if bits[v] else 1.0
    return signs / math.sqrt(3)


def qubit_state(bloch: Sequence[float]) -> np.ndarray:
    x, y, z = bloch
    return 0.5 * (np.eye(2) + x * _PAULI["X"] + y * _PAULI["Y"] + z * _PAULI["Z"])


def qrac_product_state(bits: Sequence[int], a: QracAssignment) -> DensityMatrix:
    """F(m): tensor product of the single-qubit QRAC states of each qubit."""
    out = np.ones((1, 1), dtype=complex)
    for r in qrac_bloch_vectors(bits, a):
        out = np.kron(out, qubit_state(r))
    return DensityMatrix(out, a.num_qubits)
