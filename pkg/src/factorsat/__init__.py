"""Planted-solution SAT and Ising instances from integer factorization."""

__version__ = "0.1.0"

from .circuit import build_circuit, column_profile, planted_assignment
from .cnf import CnfFormula, WitnessMap, decode_witness, parse_dimacs, to_cnf, write_dimacs
from .ising import IsingModel, assemble, energy, export_ising, planted_spin_config
from .numeric import is_prime, sample_prime, sample_prime_pair, to_bits
from .reduce import bypass_reduction, reduce_to_fixpoint
from .scaling import SizeReport, predict, profile_csv, validate

__all__ = [
    "__version__",
    "build_circuit", "column_profile", "planted_assignment",
    "CnfFormula", "WitnessMap", "decode_witness", "parse_dimacs", "to_cnf", "write_dimacs",
    "IsingModel", "assemble", "energy", "export_ising", "planted_spin_config",
    "is_prime", "sample_prime", "sample_prime_pair", "to_bits",
    "bypass_reduction", "reduce_to_fixpoint",
    "SizeReport", "predict", "profile_csv", "validate",
]
