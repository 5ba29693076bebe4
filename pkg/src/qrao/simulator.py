"""Statevector and density-matrix simulation of the hardware-efficient ansatz.

Qubit 0 is the leftmost tensor factor (most significant bit of a basis index).
Noise is depolarizing only: an optional two-qubit channel after every CNOT and
an optional global channel applied ``N`` times at the end of the circuit.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence, Union

import numpy as np

from . import _kernels
from .errors import CapExceededError, DimensionError, ParameterError
from .pauli import Hamiltonian, PauliString, qubit_mask

PURE_CAP = 24
DENSITY_CAP = 14

SeedLike = Union[int, np.random.Generator, np.random.SeedSequence, None]


def as_generator(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


# -- states ------------------------------------------------------------------

@dataclass
class StateVector:
    amplitudes: np.ndarray
    num_qubits: int

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (1 << self.num_qubits,):
            raise DimensionError(f"expected {1 << self.num_qubits} amplitudes, got {self.amplitudes.shape}")

    @classmethod
    def zero(cls, n: int) -> "StateVector":
        amps = np.zeros(1 << n, dtype=complex)
        amps[0] = 1.0
        return cls(amps, n)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def to_density(self) -> "DensityMatrix":
        a = self.amplitudes
        return DensityMatrix(np.outer(a, a.conj()), self.num_qubits)

    def copy(self) -> "StateVector":
        return StateVector(self.amplitudes.copy(), self.num_qubits)


@dataclass
class DensityMatrix:
    matrix: np.ndarray
    num_qubits: int

    def __post_init__(self):
        self.matrix = np.ascontiguousarray(self.matrix, dtype=complex)
        d = 1 << self.num_qubits
        if self.matrix.shape != (d, d):
            raise DimensionError(f"expected {d}x{d} matrix, got {self.matrix.shape}")

    @classmethod
    def zero(cls, n: int) -> "DensityMatrix":
        m = np.zeros((1 << n, 1 << n), dtype=complex)
        m[0, 0] = 1.0
        return cls(m, n)

    @classmethod
    def maximally_mixed(cls, n: int) -> "DensityMatrix":
        d = 1 << n
        return cls(np.eye(d, dtype=complex) / d, n)

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def probabilities(self) -> np.ndarray:
        return np.clip(np.diagonal(self.matrix).real, 0.0, None)

    def check(self, atol: float = 1e-9, psd: bool = False) -> None:
        """Raise ParameterError unless Hermitian with unit trace (and PSD if asked)."""
        m = self.matrix
        if not np.allclose(m, m.conj().T, atol=atol, rtol=0):
            raise ParameterError("density matrix is not Hermitian")
        if abs(np.trace(m) - 1) > atol:
            raise ParameterError(f"density matrix trace {np.trace(m)} != 1")
        if psd and np.linalg.eigvalsh(m)[0] < -1e-8:
            raise ParameterError("density matrix is not positive semidefinite")

    def copy(self) -> "DensityMatrix":
        return DensityMatrix(self.matrix.copy(), self.num_qubits)


State = Union[StateVector, DensityMatrix]


# -- circuits ----------------------------------------------------------------

def ry(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rz(theta: float) -> np.ndarray:
    return np.array([[np.exp(-0.5j * theta), 0], [0, np.exp(0.5j * theta)]], dtype=complex)


FIXED_GATES = {
    "H": np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2),
    "S": np.array([[1, 0], [0, 1j]], dtype=complex),
    "SDG": np.array([[1, 0], [0, -1j]], dtype=complex),
}
ROTATIONS = {"RY": ry, "RZ": rz}


class Gate(NamedTuple):
    name: str
    qubits: tuple[int, ...]
    param: int | None = None


@dataclass
class Circuit:
    num_qubits: int
    gates: list[Gate] = field(default_factory=list)

    @property
    def num_parameters(self) -> int:
        return sum(g.param is not None for g in self.gates)

    @property
    def cnot_count(self) -> int:
        return sum(g.name == "CNOT" for g in self.gates)

    def _check_qubits(self, *qs: int) -> None:
        for q in qs:
            if not 0 <= q < self.num_qubits:
                raise ParameterError(f"qubit {q} out of range for {self.num_qubits} qubits")

    def rotation(self, name: str, q: int) -> int:
        """Append a parameterized rotation and return its parameter slot."""
        if name not in ROTATIONS:
            raise ParameterError(f"unknown rotation {name}")
        self._check_qubits(q)
        slot = self.num_parameters
        self.gates.append(Gate(name, (q,), slot))
        return slot

    def fixed(self, name: str, q: int) -> None:
        if name not in FIXED_GATES:
            raise ParameterError(f"unknown gate {name}")
        self._check_qubits(q)
        self.gates.append(Gate(name, (q,)))

    def cnot(self, control: int, target: int) -> None:
        self._check_qubits(control, target)
        if control == target:
            raise ParameterError("CNOT control and target coincide")
        self.gates.append(Gate("CNOT", (control, target)))

    def to_json(self) -> str:
        return json.dumps(
            {
                "num_qubits": self.num_qubits,
                "gates": [{"name": g.name, "qubits": list(g.qubits), "param": g.param} for g in self.gates],
            }
        )


def build_hea(n: int, layers: int, entanglement: str = "linear") -> Circuit:
    """Hardware-efficient ansatz: ``layers`` x (RY, RZ on every qubit + CNOT chain),
    then a closing RY, RZ rotation layer. ``2n(layers+1)`` parameters."""
    if n < 1 or layers < 1:
        raise ParameterError(f"need n >= 1 and layers >= 1, got n={n}, layers={layers}")
    if entanglement != "linear":
        raise ParameterError(f"only linear entanglement is supported, got {entanglement!r}")
    c = Circuit(n)
    for _ in range(layers):
        for q in range(n):
            c.rotation("RY", q)
            c.rotation("RZ", q)
        for q in range(n - 1):
            c.cnot(q, q + 1)
    for q in range(n):
        c.rotation("RY", q)
        c.rotation("RZ", q)
    return c


def gate_matrix(g: Gate, params: Sequence[float] | None = None) -> np.ndarray:
    if g.param is not None:
        return ROTATIONS[g.name](float(params[g.param]))
    return FIXED_GATES[g.name]


@dataclass(frozen=True)
class NoiseParams:
    """Depolarizing noise: global survival ``p`` applied ``N`` times, per-CNOT error."""

    global_p: float = 1.0
    global_N: int = 0
    cnot_error: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.global_p <= 1.0:
            raise ParameterError(f"global_p must lie in [0, 1], got {self.global_p}")
        if int(self.global_N) != self.global_N or self.global_N < 0:
            raise ParameterError(f"global_N must be a non-negative integer, got {self.global_N}")
        if not 0.0 <= self.cnot_error <= 1.0:
            raise ParameterError(f"cnot_error must lie in [0, 1], got {self.cnot_error}")

    @property
    def global_survival(self) -> float:
        return self.global_p ** self.global_N

    @property
    def noiseless(self) -> bool:
        return self.cnot_error == 0.0 and self.global_survival == 1.0


# -- state evolution ---------------------------------------------------------

def _apply_1q_pure(psi: np.ndarray, u: np.ndarray, q: int, n: int) -> np.ndarray:
    view = psi.reshape(1 << q, 2, 1 << (n - q - 1))
    return np.einsum("ab,xby->xay", u, view).reshape(-1)


def _cnot_perm(c: int, t: int, n: int) -> np.ndarray:
    j = np.arange(1 << n)
    cm, tm = qubit_mask(c, n), qubit_mask(t, n)
    return np.where(j & cm, j ^ tm, j)


def _check_params(c: Circuit, params: Sequence[float]) -> np.ndarray:
    params = np.asarray(params, dtype=float)
    if params.shape != (c.num_parameters,):
        raise DimensionError(f"circuit has {c.num_parameters} parameters, got {params.shape}")
    return params


def apply_gates(state: State, gates: Sequence[Gate], params: Sequence[float] | None = None,
                cnot_error: float = 0.0) -> State:
    """Return a new state with ``gates`` applied (depolarizing after CNOTs on densities)."""
    n = state.num_qubits
    if isinstance(state, StateVector):
        if cnot_error:
            raise ParameterError("CNOT noise requires a density matrix")
        psi = state.amplitudes.copy()
        for g in gates:
            if g.name == "CNOT":
                psi = psi[_cnot_perm(g.qubits[0], g.qubits[1], n)]
            else:
                psi = _apply_1q_pure(psi, gate_matrix(g, params), g.qubits[0], n)
        return StateVector(psi, n)
    rho = state.matrix.copy()
    for g in gates:
        if g.name == "CNOT":
            _kernels.cnot_depolarize(rho, qubit_mask(g.qubits[0], n), qubit_mask(g.qubits[1], n), float(cnot_error))
        else:
            _kernels.conj_1q(rho, gate_matrix(g, params), qubit_mask(g.qubits[0], n))
    return DensityMatrix(rho, n)


def run_pure(c: Circuit, params: Sequence[float]) -> StateVector:
    params = _check_params(c, params)
    if c.num_qubits > PURE_CAP:
        raise CapExceededError(f"statevector backend capped at {PURE_CAP} qubits, got {c.num_qubits}")
    return apply_gates(StateVector.zero(c.num_qubits), c.gates, params)


def run_density(c: Circuit, params: Sequence[float], noise: NoiseParams = NoiseParams()) -> DensityMatrix:
    params = _check_params(c, params)
    if c.num_qubits > DENSITY_CAP:
        raise CapExceededError(f"density backend capped at {DENSITY_CAP} qubits, got {c.num_qubits}")
    rho = apply_gates(DensityMatrix.zero(c.num_qubits), c.gates, params, noise.cnot_error)
    if noise.global_survival != 1.0:
        rho = global_depolarize(rho, noise.global_p, noise.global_N)
    return rho


def prepare_state(c: Circuit, params: Sequence[float], noise: NoiseParams = NoiseParams()) -> State:
    """Statevector when noiseless, density matrix otherwise."""
    if noise.noiseless:
        return run_pure(c, params)
    return run_density(c, params, noise)


def global_depolarize(rho: DensityMatrix, p: float, N: int) -> DensityMatrix:
    """``N`` applications of rho -> p rho + (1 - p) I/2^n, i.e. p^N rho + (1 - p^N) I/2^n."""
    if not 0.0 <= p <= 1.0:
        raise ParameterError(f"p must lie in [0, 1], got {p}")
    if int(N) != N or N < 0:
        raise ParameterError(f"N must be a non-negative integer, got {N}")
    keep = p ** int(N)
    d = 1 << rho.num_qubits
    m = keep * rho.matrix
    m[np.diag_indices(d)] += (1.0 - keep) / d
    return DensityMatrix(m, rho.num_qubits)


def pair_depolarize(rho: DensityMatrix, a: int, b: int, eps: float) -> DensityMatrix:
    """Two-qubit depolarizing channel on qubits ``a``, ``b``."""
    n = rho.num_qubits
    m = rho.matrix.copy()
    ma, mb = qubit_mask(a, n), qubit_mask(b, n)
    red = _kernels.pair_trace(m, ma, mb)
    both = ma | mb
    j = np.arange(1 << n)
    keep = j & both
    rest = np.array([_compress_index(x, ma, mb) for x in j])
    m *= 1.0 - eps
    same = keep[:, None] == keep[None, :]
    m += np.where(same, eps / 4.0 * red[rest[:, None], rest[None, :]], 0.0)
    return DensityMatrix(m, n)


def _compress_index(x: int, ma: int, mb: int) -> int:
    return int(_kernels._compress(x, max(ma, mb), min(ma, mb)))


# -- expectations and sampling -----------------------------------------------

def _check_dims(state: State, n: int) -> None:
    if state.num_qubits != n:
        raise DimensionError(f"state has {state.num_qubits} qubits, operator has {n}")


def _term_value(state: State, x: int, phase: np.ndarray) -> complex:
    j = np.arange(len(phase))
    if isinstance(state, StateVector):
        psi = state.amplitudes
        return complex(np.vdot(psi[j ^ x], phase * psi))
    return complex(np.sum(phase * state.matrix[j, j ^ x]))


def pauli_expectation(state: State, ps: PauliString) -> float:
    """Tr(P rho) (or <psi|P|psi>)."""
    _check_dims(state, ps.num_qubits)
    if ps.is_identity:
        return 1.0
    h = Hamiltonian([(1.0, ps)], ps.num_qubits)
    t = h.compiled()[0]
    return _term_value(state, t.x, t.phase).real


def expectation_exact(state: State, h: Hamiltonian) -> float:
    _check_dims(state, h.num_qubits)
    if not h.terms:
        return 0.0
    if h.is_diagonal:
        return float(np.dot(h.diagonal(), state.probabilities()))
    return float(sum(t.coeff * _term_value(state, t.x, t.phase).real for t in h.compiled()))


def basis_change(ps: PauliString) -> list[Gate]:
    """Gates mapping the eigenbasis of ``ps`` onto the computational basis."""
    gates = []
    for q, ax in ps.factors:
        if ax == "X":
            gates.append(Gate("H", (q,)))
        elif ax == "Y":
            gates += [Gate("SDG", (q,)), Gate("H", (q,))]
    return gates


def parity_one_probability(state: State, ps: PauliString) -> float:
    """Probability that the measured bits on the support of ``ps`` have odd parity."""
    _check_dims(state, ps.num_qubits)
    rotated = apply_gates(state, basis_change(ps))
    probs = rotated.probabilities()
    probs = probs / probs.sum()
    support = 0
    for q in ps.support:
        support |= qubit_mask(q, ps.num_qubits)
    odd = (np.bitwise_count(np.arange(len(probs)) & support) & 1).astype(bool)
    return float(probs[odd].sum())


def sample_pauli(state: State, ps: PauliString, shots: int, seed: SeedLike) -> tuple[float, int]:
    """Shot estimate ``1 - 2h/S`` of Tr(P rho) with ``h`` the number of odd-parity outcomes.

    Returns ``(estimate, h)``. The identity string is returned as exactly 1.0
    without sampling.
    """
    if shots < 1:
        raise ParameterError(f"shots must be >= 1, got {shots}")
    _check_dims(state, ps.num_qubits)
    if ps.is_identity:
        return 1.0, 0
    rng = as_generator(seed)
    rotated = apply_gates(state, basis_change(ps))
    probs = rotated.probabilities()
    probs = probs / probs.sum()
    outcomes = rng.choice(len(probs), size=shots, p=probs)
    support = 0
    for q in ps.support:
        support |= qubit_mask(q, ps.num_qubits)
    h = int(np.sum(np.bitwise_count(outcomes & support) & 1))
    return 1.0 - 2.0 * h / shots, h


@dataclass
class ShotTable:
    """Per-shot parity bits ``outcomes[i, j]`` for shot ``i`` of observable ``j``."""

    outcomes: np.ndarray

    @property
    def shots(self) -> int:
        return self.outcomes.shape[0]

    @property
    def counts(self) -> np.ndarray:
        return self.outcomes.sum(axis=0)

    def estimates(self) -> np.ndarray:
        return 1.0 - 2.0 * self.counts / self.shots


def sample_shot_table(state: State, paulis: Sequence[PauliString], shots: int, seed: SeedLike) -> ShotTable:
    """Independent ``shots``-shot measurement of each Pauli string, one column each."""
    if shots < 1:
        raise ParameterError(f"shots must be >= 1, got {shots}")
    rng = as_generator(seed)
    cols = []
    for ps in paulis:
        _check_dims(state, ps.num_qubits)
        if ps.is_identity:
            cols.append(np.zeros(shots, dtype=np.uint8))
            continue
        rotated = apply_gates(state, basis_change(ps))
        probs = rotated.probabilities()
        probs = probs / probs.sum()
        outcomes = rng.choice(len(probs), size=shots, p=probs)
        support = 0
        for q in ps.support:
            support |= qubit_mask(q, ps.num_qubits)
        cols.append((np.bitwise_count(outcomes & support) & 1).astype(np.uint8))
    return ShotTable(np.stack(cols, axis=1) if cols else np.zeros((shots, 0), dtype=np.uint8))


def bloch_vector(state: State, q: int) -> np.ndarray:
    n = state.num_qubits
    return np.array([pauli_expectation(state, PauliString({q: ax}, n)) for ax in "XYZ"])
