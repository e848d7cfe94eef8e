"""Steane [[7,1,3]] code simulator and syndrome-measurement experiment harness."""

__version__ = "0.1.0"

from .statevec import PauliString, QuantumState, apply_gate, apply_pauli, overlap_fidelity
from .code import STEANE, Syndrome, decode_lookup, encode_ideal, ideal_syndrome, perfect_final_sm
from .noise import ErrorEnvironment, FaultConfiguration, NoiseContext

__all__ = [
    "PauliString", "QuantumState", "apply_gate", "apply_pauli", "overlap_fidelity",
    "STEANE", "Syndrome", "decode_lookup", "encode_ideal", "ideal_syndrome",
    "perfect_final_sm", "ErrorEnvironment", "FaultConfiguration", "NoiseContext",
]
