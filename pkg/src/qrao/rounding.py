"""Quantum state rounding: Pauli rounding, magic-state rounding, computational readout."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels
from .encoding import QracAssignment, build_qrac_hamiltonian
from .errors import CapExceededError, DimensionError, ParameterError
from .graph import Graph, approximation_ratio, cut_value, max_cut_bruteforce
from .pauli import AXES, Hamiltonian, qubit_mask
from .simulator import (
    DENSITY_CAP,
    DensityMatrix,
    SeedLike,
    State,
    StateVector,
    as_generator,
    pauli_expectation,
    sample_pauli,
)

ZERO_TOL = 1e-12

_S3 = 1.0 / math.sqrt(3.0)
# Bloch direction of mu_b^+ and the bit triple (x1, x2, x3) it decodes to
MAGIC_BASES = (
    (np.array([1.0, 1.0, 1.0]) * _S3, (0, 0, 0)),
    (np.array([1.0, -1.0, -1.0]) * _S3, (0, 1, 1)),
    (np.array([-1.0, 1.0, -1.0]) * _S3, (1, 0, 1)),
    (np.array([-1.0, -1.0, 1.0]) * _S3, (1, 1, 0)),
)

_PAULI = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def magic_projector(basis: int, sign: int) -> np.ndarray:
    """mu_basis^sign as a 2x2 matrix; ``basis`` in 1..4, ``sign`` in {+1, -1}."""
    v, _ = MAGIC_BASES[basis - 1]
    return 0.5 * (np.eye(2) + sign * sum(c * _PAULI[a] for c, a in zip(v, AXES)))


@dataclass
class RoundingOutcome:
    bits: list[int]
    method: str
    cut: int | None = None
    ratio: float | None = None
    rounds_used: int = 0
    shots_used: int = 0

    def to_json(self) -> dict:
        return {
            "method": self.method,
            "bits": "".join(str(b) for b in self.bits),
            "cut": self.cut,
            "ratio": self.ratio,
            "rounds_used": self.rounds_used,
            "shots_used": self.shots_used,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json())


def _score(out: RoundingOutcome, g: Graph | None, opt_cut: int | None) -> RoundingOutcome:
    if g is not None:
        out.cut = cut_value(g, out.bits)
        if opt_cut is None and g.num_edges:
            opt_cut = max_cut_bruteforce(g)[1]
        if opt_cut:
            out.ratio = approximation_ratio(out.cut, opt_cut)
    return out


def _check_assignment(state: State, a: QracAssignment, g: Graph | None) -> None:
    if state.num_qubits != a.num_qubits:
        raise DimensionError(f"state has {state.num_qubits} qubits, assignment uses {a.num_qubits}")
    if g is not None and g.num_nodes != a.num_nodes:
        raise DimensionError(f"assignment covers {a.num_nodes} nodes, graph has {g.num_nodes}")


def pauli_rounding(state: State, a: QracAssignment, g: Graph | None = None, *, shots: int | None = None,
                   seed: SeedLike = None, opt_cut: int | None = None) -> RoundingOutcome:
    """Decode each node from the sign of Tr(P(v) rho): positive -> 0, negative -> 1.

    ``shots=None`` uses exact traces; otherwise each node's trace is estimated
    from ``shots`` samples. A zero trace (or estimate) gets a uniformly random bit.
    """
    _check_assignment(state, a, g)
    rng = as_generator(seed)
    bits = []
    for v in range(a.num_nodes):
        ps = a.pauli(v)
        if shots is None:
            t = pauli_expectation(state, ps)
            zero = abs(t) <= ZERO_TOL
        else:
            t, _ = sample_pauli(state, ps, shots, rng)
            zero = t == 0.0
        bits.append(int(rng.integers(2)) if zero else int(t < 0))
    used = 0 if shots is None else shots * a.num_nodes
    return _score(RoundingOutcome(bits, "pauli", shots_used=used), g, opt_cut)


def _reduced_qubit(state: State, q: int) -> np.ndarray:
    n = state.num_qubits
    a, b = 1 << q, 1 << (n - q - 1)
    if isinstance(state, StateVector):
        psi = state.amplitudes.reshape(a, 2, b)
        return np.einsum("xiy,xjy->ij", psi, psi.conj())
    return np.einsum("xiyxjy->ij", state.matrix.reshape(a, 2, b, a, 2, b))


def _collapse(state: State, q: int, proj: np.ndarray) -> tuple[State, float]:
    n = state.num_qubits
    mask = qubit_mask(q, n)
    if isinstance(state, StateVector):
        view = state.amplitudes.reshape(1 << q, 2, 1 << (n - q - 1))
        amps = np.einsum("ab,xby->xay", proj, view).reshape(-1)
        prob = float(np.vdot(amps, amps).real)
        return StateVector(amps / math.sqrt(prob) if prob > 0 else amps, n), prob
    m = state.matrix.copy()
    _kernels.conj_1q(m, proj, mask)
    prob = float(np.trace(m).real)
    return DensityMatrix(m / prob if prob > 0 else m, n), prob


def magic_round_once(state: State, a: QracAssignment, seed: SeedLike, g: Graph | None = None, *,
                     bases: Sequence[int] | None = None, opt_cut: int | None = None) -> RoundingOutcome:
    """One round of magic-state rounding.

    Each qubit gets a basis drawn uniformly from 1..4 (or taken from ``bases``)
    and is measured in ascending qubit order with collapse; outcome + decodes
    to the basis's bit triple, outcome - to its complement.
    """
    _check_assignment(state, a, g)
    rng = as_generator(seed)
    n = a.num_qubits
    if bases is None:
        bases = [int(b) + 1 for b in rng.integers(0, 4, size=n)]
    elif len(bases) != n or any(b not in (1, 2, 3, 4) for b in bases):
        raise ParameterError(f"bases must be {n} values in 1..4")
    triples = []
    current = state
    for q in range(n):
        _, triple = MAGIC_BASES[bases[q] - 1]
        proj = magic_projector(bases[q], 1)
        p_plus = min(max(float(np.trace(proj @ _reduced_qubit(current, q)).real), 0.0), 1.0)
        plus = rng.random() < p_plus
        if q + 1 < n:
            current, _ = _collapse(current, q, proj if plus else np.eye(2) - proj)
        triples.append(triple if plus else tuple(1 - x for x in triple))
    bits = [triples[q][AXES.index(ax)] for q, ax in a.slots]
    return _score(RoundingOutcome(bits, "magic", rounds_used=1), g, opt_cut)


def magic_rounding(state: State, a: QracAssignment, rounds: int, g: Graph, seed: SeedLike,
                   *, opt_cut: int | None = None) -> RoundingOutcome:
    """Best cut over ``rounds`` magic-state rounds; ties keep the earliest round."""
    if rounds < 1:
        raise ParameterError(f"rounds must be >= 1, got {rounds}")
    _check_assignment(state, a, g)
    if opt_cut is None and g.num_edges:
        opt_cut = max_cut_bruteforce(g)[1]
    rng = as_generator(seed)
    best = None
    for _ in range(rounds):
        out = magic_round_once(state, a, rng, g, opt_cut=opt_cut)
        if best is None or out.cut > best.cut:
            best = out
    best.rounds_used = rounds
    return best


def computational_rounding(state: State, g: Graph, shots: int, seed: SeedLike,
                           *, opt_cut: int | None = None) -> RoundingOutcome:
    """Sample the computational basis ``shots`` times and keep the best-cut bitstring."""
    n = g.num_nodes
    if state.num_qubits != n:
        raise DimensionError(f"state has {state.num_qubits} qubits, graph has {n} nodes")
    if shots < 1:
        raise ParameterError(f"shots must be >= 1, got {shots}")
    rng = as_generator(seed)
    probs = state.probabilities()
    probs = probs / probs.sum()
    samples = rng.choice(len(probs), size=shots, p=probs)
    shifts = np.array([n - 1 - i for i in range(n)])
    best_bits, best_cut = None, -1
    for x in samples:
        bits = [int(b) for b in (int(x) >> shifts) & 1]
        c = cut_value(g, bits)
        if c > best_cut:
            best_bits, best_cut = bits, c
    return _score(RoundingOutcome(best_bits, "computational", shots_used=shots), g, opt_cut)


def magic_channel_factor() -> float:
    """Average shrink of a single-qubit Bloch vector under one magic measurement + decode."""
    return float(sum(np.outer(v, v) for v, _ in MAGIC_BASES)[0, 0] / 4.0)


def expected_magic_value(state: State, h: Hamiltonian) -> float:
    """E[Tr(M(rho) H)] for one magic round: each Pauli factor is scaled by 1/3."""
    if state.num_qubits != h.num_qubits:
        raise DimensionError("state and Hamiltonian qubit counts differ")
    if isinstance(state, DensityMatrix) and state.num_qubits > DENSITY_CAP:
        raise CapExceededError(f"density states are capped at {DENSITY_CAP} qubits")
    shrink = magic_channel_factor()
    total = 0.0
    for c, ps in h.terms:
        total += c * shrink ** len(ps.factors) * (1.0 if ps.is_identity else pauli_expectation(state, ps))
    return total


def expected_magic_ratio_exact(state: State, a: QracAssignment, g: Graph, *, opt_cut: int | None = None) -> float:
    """Expected single-round approximation ratio of magic-state rounding."""
    _check_assignment(state, a, g)
    if opt_cut is None:
        opt_cut = max_cut_bruteforce(g)[1]
    if opt_cut <= 0:
        raise ParameterError("expected ratio undefined for optimal cut 0")
    return expected_magic_value(state, build_qrac_hamiltonian(g, a)) / opt_cut
