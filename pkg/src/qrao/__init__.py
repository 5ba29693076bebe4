"""MaxCut through Ising and (3,1)-QRAC encodings on a noisy state simulator."""

from .encoding import (
    QracAssignment,
    assign_qrac,
    build_ising_hamiltonian,
    build_qrac_hamiltonian,
    qrac_product_state,
)
from .errors import CapExceededError, DimensionError, EdgeListError, ParameterError, QraoError
from .graph import Graph, cut_value, generate_random_regular, max_cut_bruteforce
from .pauli import Hamiltonian, PauliString, max_eigenvalue
from .rounding import computational_rounding, magic_rounding, pauli_rounding
from .simulator import DensityMatrix, NoiseParams, StateVector, build_hea
from .vqe import VqeConfig, VqeResult, run_vqe

__version__ = "0.1.0"

__all__ = [
    "CapExceededError", "DensityMatrix", "DimensionError", "EdgeListError", "Graph", "Hamiltonian",
    "NoiseParams", "ParameterError", "PauliString", "QracAssignment", "QraoError", "StateVector",
    "VqeConfig", "VqeResult", "assign_qrac", "build_hea", "build_ising_hamiltonian",
    "build_qrac_hamiltonian", "computational_rounding", "cut_value", "generate_random_regular",
    "magic_rounding", "max_cut_bruteforce", "max_eigenvalue", "pauli_rounding", "qrac_product_state",
    "run_vqe",
]
