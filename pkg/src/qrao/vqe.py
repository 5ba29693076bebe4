"""VQE with the NFT sequential sinusoidal-fit optimizer (maximization).

Energies are evaluated either exactly or from ``shots_per_term`` samples of each
Pauli term. Exact noisy runs use a layer-wise sweep that keeps the forward
density matrix and Heisenberg-evolved observable checkpoints, so each angle
update costs a few passes over the matrix instead of a full circuit
re-simulation.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import _kernels
from .errors import CapExceededError, ParameterError
from .pauli import Hamiltonian, max_eigenvalue, qubit_mask
from .simulator import (
    DENSITY_CAP,
    PURE_CAP,
    DensityMatrix,
    NoiseParams,
    State,
    build_hea,
    expectation_exact,
    global_depolarize,
    prepare_state,
    ry,
    rz,
    sample_pauli,
)

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class VqeConfig:
    layers: int = 3
    sweeps: int = 2
    shots_per_term: int | None = 1024  # None selects exact evaluation
    seed: int = 0

    def __post_init__(self):
        if self.layers < 1 or self.sweeps < 1:
            raise ParameterError("layers and sweeps must be >= 1")
        if self.shots_per_term is not None and self.shots_per_term < 1:
            raise ParameterError("shots_per_term must be >= 1 (or None for exact evaluation)")

    @property
    def exact(self) -> bool:
        return self.shots_per_term is None


@dataclass
class VqeResult:
    final_params: np.ndarray
    candidate_state: State
    energy: float
    energy_trace: list[float]
    energy_ratio: float | None
    initial_energy: float
    layers: int
    noise: NoiseParams
    evaluations: int = 0
    shots_used: int = 0
    config: VqeConfig = field(default_factory=VqeConfig)

    @property
    def num_qubits(self) -> int:
        return self.candidate_state.num_qubits

    def to_json(self) -> dict:
        return {
            "num_qubits": self.num_qubits,
            "layers": self.layers,
            "sweeps": self.config.sweeps,
            "shots_per_term": self.config.shots_per_term,
            "seed": self.config.seed,
            "noise": {
                "global_p": self.noise.global_p,
                "global_N": self.noise.global_N,
                "cnot_error": self.noise.cnot_error,
            },
            "params": [float(x) for x in self.final_params],
            "energy": self.energy,
            "initial_energy": self.initial_energy,
            "energy_ratio": self.energy_ratio,
            "trace": [float(e) for e in self.energy_trace],
            "evaluations": self.evaluations,
            "shots_used": self.shots_used,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json())


def write_trace_csv(result: VqeResult, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["update", "energy"])
        for k, e in enumerate(result.energy_trace):
            w.writerow([k, repr(float(e))])


def nft_update(evaluate: Callable[[float], float], theta0: float, e0: float) -> tuple[float, float]:
    """One NFT step on an angle whose energy is ``a cos(theta - b) + c``.

    Samples the energy at ``theta0 +- pi/2``, fits the sinusoid together with the
    known ``e0 = E(theta0)`` and returns its argmax (wrapped to [0, 2pi)) and the
    fitted maximum ``c + a``. A flat direction leaves ``theta0`` and ``e0`` as they are.
    """
    ep = evaluate(theta0 + 0.5 * math.pi)
    em = evaluate(theta0 - 0.5 * math.pi)
    c = 0.5 * (ep + em)
    along = e0 - c  # a cos(theta0 - b)
    across = 0.5 * (em - ep)  # a sin(theta0 - b)
    amp = math.hypot(along, across)
    if amp <= 1e-12 * max(1.0, abs(c)):
        return theta0, e0
    theta = (theta0 - math.atan2(across, along)) % TWO_PI
    return theta, c + amp


class _Counter:
    def __init__(self):
        self.evaluations = 0
        self.shots = 0


def _shot_energy(state: State, h: Hamiltonian, shots: int, rng: np.random.Generator, counter: _Counter) -> float:
    total = 0.0
    for c, ps in h.terms:
        if ps.is_identity:
            total += c
            continue
        est, _ = sample_pauli(state, ps, shots, rng)
        total += c * est
        counter.shots += shots
    return total


def _sweep_naive(h, circuit, params, cfg, noise, rng, counter, trace):
    """NFT sweeps that re-simulate the whole circuit per evaluation; returns the starting energy."""

    def energy_at(p):
        counter.evaluations += 1
        state = prepare_state(circuit, p, noise)
        if cfg.exact:
            return expectation_exact(state, h)
        return _shot_energy(state, h, cfg.shots_per_term, rng, counter)

    energy = energy_at(params)
    initial = energy
    for _ in range(cfg.sweeps):
        for k in range(len(params)):
            def evaluate(theta, k=k):
                trial = params.copy()
                trial[k] = theta
                return energy_at(trial)

            params[k], energy = nft_update(evaluate, params[k], energy)
            trace.append(energy)
    return initial


def _rotation(params, base, q):
    return rz(params[base + 2 * q + 1]) @ ry(params[base + 2 * q])


def _sweep_layered(h, n, layers, params, cfg, noise, counter, trace):
    """Exact density-matrix NFT sweeps for the hardware-efficient ansatz layout."""
    d = 1 << n
    masks = [qubit_mask(q, n) for q in range(n)]
    chain = [(masks[q], masks[q + 1]) for q in range(n - 1)]
    eps = float(noise.cnot_error)
    keep = noise.global_survival
    h_dense = h.to_dense(DENSITY_CAP)
    if keep != 1.0:
        h_dense = keep * h_dense + (1.0 - keep) * np.trace(h_dense).real / d * np.eye(d)

    energy = None
    initial = None
    rho = None
    for _ in range(cfg.sweeps):
        # backward: checkpoint[l] = observable after layer l's rotations, with
        # every qubit but 0 of that layer absorbed
        obs = h_dense.copy()
        checkpoints: list[np.ndarray | None] = [None] * (layers + 1)
        for l in range(layers, -1, -1):
            base = 2 * n * l
            for q in range(n - 1, 0, -1):
                _kernels.conj_1q(obs, _rotation(params, base, q).conj().T, masks[q])
            if l == 0:
                checkpoints[0] = obs
                break
            checkpoints[l] = obs.copy()
            _kernels.conj_1q(obs, _rotation(params, base, 0).conj().T, masks[0])
            for cm, tm in reversed(chain):
                _kernels.cnot_depolarize(obs, cm, tm, eps)
        del obs

        rho = np.zeros((d, d), dtype=complex)
        rho[0, 0] = 1.0
        for l in range(layers + 1):
            base = 2 * n * l
            obs = checkpoints[l]
            checkpoints[l] = None
            for q in range(n):
                env = _kernels.environment_1q(obs, rho, masks[q])
                counter.evaluations += 1
                k_ry, k_rz = base + 2 * q, base + 2 * q + 1

                def local(t_ry, t_rz):
                    u = rz(t_rz) @ ry(t_ry)
                    return float(np.einsum("ijkl,ik,jl->", env, u, u.conj()).real)

                if energy is None:
                    energy = initial = local(params[k_ry], params[k_rz])
                params[k_ry], energy = nft_update(lambda t: local(t, params[k_rz]), params[k_ry], energy)
                trace.append(energy)
                params[k_rz], energy = nft_update(lambda t: local(params[k_ry], t), params[k_rz], energy)
                trace.append(energy)
                _kernels.conj_1q(rho, _rotation(params, base, q), masks[q])
                if q + 1 < n:
                    _kernels.conj_1q(obs, _rotation(params, base, q + 1), masks[q + 1])
            del obs
            if l < layers:
                for cm, tm in chain:
                    _kernels.cnot_depolarize(rho, cm, tm, eps)
    state = DensityMatrix(rho, n)
    if keep != 1.0:
        state = global_depolarize(state, noise.global_p, noise.global_N)
    return initial, state


def run_vqe(h: Hamiltonian, cfg: VqeConfig = VqeConfig(), noise: NoiseParams = NoiseParams(),
            *, engine: str = "auto") -> VqeResult:
    """Maximize <H> over the hardware-efficient ansatz with NFT sweeps.

    ``engine`` selects the evaluation strategy for exact noisy runs: ``"auto"``
    uses the layer-wise density sweep, ``"naive"`` re-simulates the circuit for
    every evaluation (used as a cross-check).
    """
    n = h.num_qubits
    cap = PURE_CAP if noise.noiseless else DENSITY_CAP
    if n > cap:
        backend = "statevector" if noise.noiseless else "density-matrix"
        raise CapExceededError(f"{backend} backend capped at {cap} qubits, got {n}")
    if engine not in ("auto", "naive"):
        raise ParameterError(f"unknown engine {engine!r}")
    circuit = build_hea(n, cfg.layers)
    rng = np.random.default_rng(cfg.seed)
    params = rng.uniform(0.0, TWO_PI, circuit.num_parameters)
    counter = _Counter()
    trace: list[float] = []

    if cfg.exact and not noise.noiseless and engine == "auto":
        initial, state = _sweep_layered(h, n, cfg.layers, params, cfg, noise, counter, trace)
    else:
        initial = _sweep_naive(h, circuit, params, cfg, noise, rng, counter, trace)
        state = prepare_state(circuit, params, noise)
    if cfg.exact:
        energy = expectation_exact(state, h)
    else:
        energy = _shot_energy(state, h, cfg.shots_per_term, rng, counter)
    try:
        top = max_eigenvalue(h)
    except CapExceededError:
        top = 0.0
    ratio = energy / top if top != 0.0 else None
    return VqeResult(
        final_params=params,
        candidate_state=state,
        energy=float(energy),
        energy_trace=trace,
        energy_ratio=ratio,
        initial_energy=float(initial),
        layers=cfg.layers,
        noise=noise,
        evaluations=counter.evaluations,
        shots_used=counter.shots,
        config=cfg,
    )


def energy_ratio(result: VqeResult, h: Hamiltonian) -> float:
    """Achieved energy over the largest eigenvalue of ``h``."""
    top = max_eigenvalue(h)
    if top == 0.0:
        raise ParameterError("energy ratio undefined: Hamiltonian has maximum eigenvalue 0")
    return result.energy / top


def candidate_from_params(num_qubits: int, layers: int, params: Sequence[float],
                          noise: NoiseParams = NoiseParams()) -> State:
    """Re-prepare a candidate state from stored VQE parameters."""
    return prepare_state(build_hea(num_qubits, layers), params, noise)
