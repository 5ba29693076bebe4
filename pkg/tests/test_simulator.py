import itertools

import numpy as np
import pytest

from conftest import PAULI, X, cnot_dense, embed, kron_all, random_density, random_pure
from qrao import _kernels
from qrao.errors import CapExceededError, DimensionError, ParameterError
from qrao.pauli import Hamiltonian, PauliString
from qrao.simulator import (
    DensityMatrix,
    NoiseParams,
    StateVector,
    apply_gates,
    basis_change,
    build_hea,
    expectation_exact,
    global_depolarize,
    pair_depolarize,
    parity_one_probability,
    pauli_expectation,
    prepare_state,
    run_density,
    run_pure,
    ry,
    rz,
    sample_pauli,
    sample_shot_table,
)


def kraus_pair_depolarize(rho, a, b, n, eps):
    # Kraus form: (1 - 15 eps/16) rho + eps/16 sum over non-identity pair Paulis
    out = np.zeros_like(rho)
    for pa, pb in itertools.product("IXYZ", repeat=2):
        k = kron_all([PAULI[pa] if q == a else PAULI[pb] if q == b else PAULI["I"] for q in range(n)])
        w = 1 - 15 * eps / 16 if pa == pb == "I" else eps / 16
        out += w * k @ rho @ k.conj().T
    return out


def dense_hea_unitary(n, layers, params):
    u = np.eye(1 << n, dtype=complex)
    k = 0
    for _ in range(layers):
        for q in range(n):
            u = embed(rz(params[k + 1]) @ ry(params[k]), q, n) @ u
            k += 2
        for q in range(n - 1):
            u = cnot_dense(q, q + 1, n) @ u
    for q in range(n):
        u = embed(rz(params[k + 1]) @ ry(params[k]), q, n) @ u
        k += 2
    return u


def test_rotation_matrices():
    np.testing.assert_allclose(ry(np.pi), [[0, -1], [1, 0]], atol=1e-12)
    np.testing.assert_allclose(rz(np.pi), np.diag([-1j, 1j]), atol=1e-12)


@pytest.mark.parametrize("n,layers", [(1, 1), (2, 1), (4, 3), (5, 2)])
def test_hea_layout(n, layers):
    c = build_hea(n, layers)
    assert c.num_parameters == 2 * n * (layers + 1)
    assert c.cnot_count == layers * (n - 1)
    cnots = [g.qubits for g in c.gates if g.name == "CNOT"]
    assert cnots == [(q, q + 1) for q in range(n - 1)] * layers


def test_hea_rejects():
    with pytest.raises(ParameterError):
        build_hea(3, 0)
    with pytest.raises(ParameterError):
        build_hea(3, 1, entanglement="full")


@pytest.mark.parametrize("n", [1, 3, 4])
def test_pure_matches_dense_unitary(n, rng):
    layers = 2
    params = rng.uniform(0, 2 * np.pi, 2 * n * (layers + 1))
    psi = run_pure(build_hea(n, layers), params)
    ref = dense_hea_unitary(n, layers, params)[:, 0]
    np.testing.assert_allclose(psi.amplitudes, ref, atol=1e-10)


def test_density_noiseless_matches_pure(rng):
    n, layers = 4, 2
    params = rng.uniform(0, 2 * np.pi, 2 * n * (layers + 1))
    c = build_hea(n, layers)
    rho = run_density(c, params)
    np.testing.assert_allclose(rho.matrix, run_pure(c, params).to_density().matrix, atol=1e-10)


def test_param_count_checked():
    with pytest.raises(DimensionError):
        run_pure(build_hea(2, 1), [0.0])


def test_caps():
    with pytest.raises(CapExceededError):
        run_density(build_hea(15, 1), np.zeros(60))


@pytest.mark.parametrize("a,b", [(0, 1), (1, 0), (0, 3), (2, 1)])
def test_pair_depolarize_matches_kraus(a, b, rng):
    n, eps = 4, 0.3
    rho = random_density(n, rng)
    got = pair_depolarize(rho, a, b, eps).matrix
    np.testing.assert_allclose(got, kraus_pair_depolarize(rho.matrix, a, b, n, eps), atol=1e-12)


@pytest.mark.parametrize("c,t", [(0, 1), (1, 2), (2, 0), (3, 1)])
def test_cnot_kernel_matches_dense_then_kraus(c, t, rng):
    n, eps = 4, 0.05
    rho = random_density(n, rng).matrix
    u = cnot_dense(c, t, n)
    ref = kraus_pair_depolarize(u @ rho @ u.conj().T, c, t, n, eps)
    m = rho.copy()
    _kernels.cnot_depolarize(m, 1 << (n - 1 - c), 1 << (n - 1 - t), eps)
    np.testing.assert_allclose(m, ref, atol=1e-12)


def test_cnot_kernel_is_self_adjoint(rng):
    # Tr(O C(rho)) == Tr(C(O) rho): the kernel may evolve observables backwards
    n, eps = 3, 0.2
    rho = random_density(n, rng).matrix
    o = random_density(n, rng).matrix
    a, b = rho.copy(), o.copy()
    _kernels.cnot_depolarize(a, 4, 2, eps)
    _kernels.cnot_depolarize(b, 4, 2, eps)
    assert np.trace(o @ a) == pytest.approx(np.trace(b @ rho), abs=1e-12)


def test_conj_kernel(rng):
    n = 3
    rho = random_density(n, rng).matrix
    m = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    full = embed(m, 1, n)
    out = rho.copy()
    _kernels.conj_1q(out, m, 2)
    np.testing.assert_allclose(out, full @ rho @ full.conj().T, atol=1e-12)


def test_noisy_circuit_trace_and_psd(rng):
    n, layers = 4, 3
    c = build_hea(n, layers)
    rho = run_density(c, rng.uniform(0, 2 * np.pi, c.num_parameters), NoiseParams(0.9, 2, 0.05))
    rho.check(psd=True)


def test_full_cnot_noise_mixes_pair():
    # eps = 1 leaves the pair maximally mixed
    rho = apply_gates(DensityMatrix.zero(2), build_hea(2, 1).gates[4:5], cnot_error=1.0)
    np.testing.assert_allclose(rho.matrix, np.eye(4) / 4, atol=1e-12)


def test_global_depolarize_compounds(rng):
    rho = random_density(3, rng)
    once = rho
    for _ in range(5):
        once = global_depolarize(once, 0.9, 1)
    np.testing.assert_allclose(global_depolarize(rho, 0.9, 5).matrix, once.matrix, atol=1e-12)
    np.testing.assert_allclose(global_depolarize(rho, 0.0, 1).matrix, np.eye(8) / 8, atol=1e-12)
    with pytest.raises(ParameterError):
        global_depolarize(rho, 1.2, 1)


def test_noise_params_validation():
    assert NoiseParams().noiseless
    assert not NoiseParams(0.99, 3).noiseless
    assert NoiseParams(0.5, 2).global_survival == 0.25
    for bad in ({"global_p": -0.1}, {"global_N": 1.5}, {"cnot_error": 2.0}):
        with pytest.raises(ParameterError):
            NoiseParams(**bad)


def test_prepare_state_backend():
    c = build_hea(2, 1)
    assert isinstance(prepare_state(c, np.zeros(8)), StateVector)
    assert isinstance(prepare_state(c, np.zeros(8), NoiseParams(cnot_error=0.01)), DensityMatrix)


@pytest.mark.parametrize("label", ["X", "YZ", "ZIX", "YYY", "IZI"])
def test_pauli_expectation_matches_trace(label, rng):
    n = len(label)
    ps = PauliString({q: ax for q, ax in enumerate(label) if ax != "I"}, n)
    dense = kron_all([PAULI[a] for a in label])
    psi = random_pure(n, rng)
    rho = random_density(n, rng)
    assert pauli_expectation(psi, ps) == pytest.approx(np.vdot(psi.amplitudes, dense @ psi.amplitudes).real, abs=1e-12)
    assert pauli_expectation(rho, ps) == pytest.approx(np.trace(dense @ rho.matrix).real, abs=1e-12)


def test_expectation_exact_matches_dense(rng):
    n = 3
    h = Hamiltonian([(1.0, PauliString({}, n)), (-0.7, PauliString({0: "X", 1: "Y"}, n)), (0.3, PauliString({2: "Z"}, n))], n)
    rho = random_density(n, rng)
    assert expectation_exact(rho, h) == pytest.approx(np.trace(h.to_dense() @ rho.matrix).real, abs=1e-12)
    diag = Hamiltonian([(0.5, PauliString({0: "Z", 2: "Z"}, n))], n)
    assert expectation_exact(rho, diag) == pytest.approx(np.trace(diag.to_dense() @ rho.matrix).real, abs=1e-12)


@pytest.mark.parametrize("ax", ["X", "Y", "Z"])
def test_basis_change_diagonalizes(ax):
    # U P U^dagger = Z after the measurement rotation
    ps = PauliString({0: ax}, 1)
    u = np.eye(2, dtype=complex)
    for g in basis_change(ps):
        u = {"H": np.array([[1, 1], [1, -1]]) / np.sqrt(2), "SDG": np.diag([1, -1j])}[g.name] @ u
    np.testing.assert_allclose(u @ PAULI[ax] @ u.conj().T, PAULI["Z"], atol=1e-12)


def test_parity_probability_relation(rng):
    rho = random_density(3, rng)
    ps = PauliString({0: "X", 2: "Y"}, 3)
    assert 1 - 2 * parity_one_probability(rho, ps) == pytest.approx(pauli_expectation(rho, ps), abs=1e-12)


def test_sample_pauli_unbiased(rng):
    rho = random_density(2, rng)
    ps = PauliString({0: "Y", 1: "X"}, 2)
    exact = pauli_expectation(rho, ps)
    est, h = sample_pauli(rho, ps, 20000, seed=1)
    assert est == pytest.approx(exact, abs=4 / np.sqrt(20000))
    assert est == 1 - 2 * h / 20000
    assert sample_pauli(rho, ps, 100, seed=3) == sample_pauli(rho, ps, 100, seed=3)
    assert sample_pauli(rho, PauliString({}, 2), 10, seed=0) == (1.0, 0)
    with pytest.raises(ParameterError):
        sample_pauli(rho, ps, 0, seed=0)


def test_eigenstate_sampling_is_deterministic():
    plus = StateVector(np.array([1, 1]) / np.sqrt(2), 1)
    assert sample_pauli(plus, PauliString({0: "X"}, 1), 50, seed=0) == (1.0, 0)
    minus_i = StateVector(np.array([1, -1j]) / np.sqrt(2), 1)
    assert sample_pauli(minus_i, PauliString({0: "Y"}, 1), 50, seed=0) == (-1.0, 50)


def test_shot_table(rng):
    rho = random_density(2, rng)
    paulis = [PauliString({0: "Z"}, 2), PauliString({1: "X"}, 2)]
    tab = sample_shot_table(rho, paulis, 4000, seed=2)
    assert tab.outcomes.shape == (4000, 2)
    for est, ps in zip(tab.estimates(), paulis):
        assert est == pytest.approx(pauli_expectation(rho, ps), abs=0.07)


def test_x_flip_through_circuit():
    psi = apply_gates(StateVector.zero(2), build_hea(2, 1).gates[4:5])
    assert psi.amplitudes[0] == 1
    flipped = StateVector(embed(X, 0, 2)[:, 0], 2)
    out = apply_gates(flipped, build_hea(2, 1).gates[4:5])
    np.testing.assert_allclose(out.probabilities(), [0, 0, 0, 1], atol=1e-12)


def test_z_on_plus_estimate():
    plus = StateVector(np.array([1, 1]) / np.sqrt(2), 1)
    est, _ = sample_pauli(plus, PauliString({0: "Z"}, 1), 10_000, seed=0)
    assert abs(est) <= 0.05
