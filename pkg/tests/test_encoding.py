import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qrao.encoding import (
    QracAssignment,
    assign_qrac,
    build_ising_hamiltonian,
    build_qrac_hamiltonian,
    qrac_bloch_vectors,
    qrac_product_state,
)
from qrao.errors import DimensionError, ParameterError
from qrao.graph import Graph, cut_value, generate_random_regular, max_cut_bruteforce
from qrao.pauli import max_eigenvalue
from qrao.simulator import expectation_exact

K33 = Graph(6, [(i, j) for i in range(3) for j in range(3, 6)])


def test_ising_diagonal_is_cut_table():
    g = generate_random_regular(8, 3, seed=1)
    diag = build_ising_hamiltonian(g).diagonal()
    for x in range(0, 256, 17):
        bits = [(x >> (7 - i)) & 1 for i in range(8)]
        assert diag[x] == pytest.approx(cut_value(g, bits))


def test_assignment_packs_k33():
    a = assign_qrac(K33)
    assert a.num_qubits == 2
    a.validate(K33)
    assert sorted(a.nodes_on(0)) == [0, 1, 2]


@pytest.mark.parametrize("n", [6, 8, 10, 12, 16, 20])
def test_assignment_valid_and_compact(n):
    g = generate_random_regular(n, 3, seed=n)
    a = assign_qrac(g)
    a.validate(g)
    # three per qubit at best; greedy colouring of a cubic graph never needs more than |V|/2
    assert -(-n // 3) <= a.num_qubits <= n // 2 + 1


def test_assignment_validation_catches_conflicts():
    g = Graph(3, [(0, 1)])
    with pytest.raises(ParameterError):
        QracAssignment(((0, "X"), (0, "Y"), (1, "X")), 2).validate(g)
    with pytest.raises(ParameterError):
        QracAssignment(((0, "X"), (1, "X"), (1, "X")), 2).validate(g)
    with pytest.raises(DimensionError):
        QracAssignment(((0, "X"),), 1).validate(g)


def test_assignment_json_round_trip():
    a = assign_qrac(generate_random_regular(10, 3, seed=4))
    b = QracAssignment.from_json(json.loads(a.dumps()))
    assert a == b


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([4, 6, 8, 10, 12]), st.integers(0, 10**6))
def test_relaxation_identity(n, seed):
    g = generate_random_regular(n, 3, seed)
    a = assign_qrac(g)
    h = build_qrac_hamiltonian(g, a)
    bits = list(np.random.default_rng(seed).integers(0, 2, n))
    val = expectation_exact(qrac_product_state(bits, a), h)
    assert val == pytest.approx(cut_value(g, bits), abs=1e-9)


def test_bloch_vectors():
    a = assign_qrac(K33)
    r = qrac_bloch_vectors([0, 1, 0, 1, 1, 1], a)
    np.testing.assert_allclose(np.abs(r), 1 / np.sqrt(3))
    assert r.shape == (2, 3)
    with pytest.raises(DimensionError):
        qrac_bloch_vectors([0, 1], a)
    with pytest.raises(ParameterError):
        qrac_bloch_vectors([0, 2, 0, 0, 0, 0], a)


def test_product_state_is_valid():
    a = assign_qrac(generate_random_regular(8, 3, seed=2))
    qrac_product_state([1, 0, 1, 1, 0, 0, 1, 0], a).check(psd=True)


def test_relaxed_max_at_least_max_cut():
    for seed in range(5):
        g = generate_random_regular(8, 3, seed)
        top = max_eigenvalue(build_qrac_hamiltonian(g, assign_qrac(g)))
        assert top >= max_cut_bruteforce(g)[1] - 1e-9
