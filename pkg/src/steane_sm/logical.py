"""Fault-tolerant logical gates and the composite-gate compiler.

Logical Cliffords are transversal: logical H is bitwise H, logical P is
bitwise P-dagger (the standard convention for this code; the property
tests, not the convention, are normative).  The logical T is a
teleportation gadget consuming one |Theta> ancilla block per application.

Composite gates A = HPT and B = HT are operator products: within each
composite the T gate executes first.
"""

from __future__ import annotations

import numpy as np

from . import code as sc
from . import noise
from . import statevec as sv
from .statevec import GATE_1Q, QuantumState

EQ1_SEQUENCE = "ABBBAAAABBABABABBBAA"

COMPOSITES = {"A": ("T", "P", "H"), "B": ("T", "H")}  # application order

# bitwise physical gate realizing each logical gate
TRANSVERSAL = {"H": "H", "P": "PDag"}


def compile_sequence(spec: str):
    """Expand a composite string over {A,B} into logical gates (in order)."""
    if not spec:
        raise ValueError("empty sequence")
    gates = []
    for c in spec:
        if c not in COMPOSITES:
            raise ValueError(f"invalid composite {c!r} (alphabet is A, B)")
        gates.extend(COMPOSITES[c])
    return gates


def ideal_unitary(gates) -> np.ndarray:
    """2x2 product of the ideal logical gates, in application order."""
    u = np.eye(2, dtype=complex)
    for g in gates:
        u = GATE_1Q[g] @ u
    return u


def apply_logical_clifford(state, ctx, gate: str):
    """Transversal logical H or P on the 7 data qubits, under noise."""
    if gate not in TRANSVERSAL:
        raise ValueError(f"not a transversal logical gate: {gate!r}")
    return noise.noisy_transversal(state, ctx, TRANSVERSAL[gate], range(7))


THETA_MODES = ("noisy", "ideal")


def prepare_theta(ctx, mode: str = "noisy"):
    """|Theta> ancilla block for the T gadget.

    "noisy": gate-by-gate encoding in the error environment (default).
    "ideal": an exact |Theta> from an offline factory.  In-line encoding
    is not fault tolerant -- a single fault on the encoder's input qubit
    is already a logical error -- so ancilla quality sets a noise floor
    linear in p; the ideal mode removes that floor for scaling studies.
    """
    if mode == "ideal":
        ideal = sc.theta_ideal()
        return sv.QuantumState(ideal.amps, tuple(f"theta-{i}" for i in range(7)))
    if mode != "noisy":
        raise ValueError(f"unknown theta mode {mode!r}; choose from {THETA_MODES}")
    return sc.prepare_logical_noisy("Theta", ctx)


def apply_logical_t(state, ctx, theta: str = "noisy"):
    """Teleported logical T gate.

    The |Theta> block controls a bitwise CNOT onto the data block; the old
    data block is measured out transversally.  The 7 readout bits are
    Hamming-corrected, their parity is the logical outcome; on outcome 1
    the surviving block gets the logical X (frame) + logical P correction,
    applied noiselessly.  The |Theta> block then becomes the data block.
    """
    if state.n != 7:
        raise sv.RegisterError("T gadget expects a bare 7-qubit data register")
    theta_block = prepare_theta(ctx, theta)
    state = sv.attach_state(state, theta_block)
    state = noise.noisy_transversal_cnot(state, ctx, range(7, 14), range(7))
    bits = []
    for _ in range(7):
        bit, state = noise.noisy_measure_detach(state, ctx, 0)
        bits.append(bit)
    outcome = sum(sc.hamming_correct(bits)) % 2
    state = QuantumState(state.amps, sc.DATA_LABELS)
    if outcome == 1:
        state = sv.apply_pauli(state, sc.STEANE.logical_x)
        for q in range(7):  # noiseless logical P correction round
            state = sv.apply_1q(state, "PDag", q)
    return state


def apply_logical_gate(state, ctx, gate: str, theta: str = "noisy"):
    if gate == "T":
        return apply_logical_t(state, ctx, theta)
    return apply_logical_clifford(state, ctx, gate)


def schedule_sm(sequence: str, q: int):
    """Gate indices (1-based) after which a syndrome measurement runs.

    q equal to the expanded gate count means SM after every physical-level
    logical gate; otherwise q must evenly divide the composite count and
    SM runs after every len(sequence)/q composites.  q = 0 disables SM.
    """
    lengths = [len(COMPOSITES[c]) for c in sequence if c in COMPOSITES]
    if len(lengths) != len(sequence):
        raise ValueError("invalid sequence")
    total = sum(lengths)
    if q == 0:
        return []
    if q == total:
        return list(range(1, total + 1))
    n_comp = len(sequence)
    if q < 0 or q > n_comp or n_comp % q != 0:
        raise ValueError(f"q={q} incompatible with {n_comp} composites / {total} gates")
    group = n_comp // q
    positions = []
    acc = 0
    for i, ln in enumerate(lengths, start=1):
        acc += ln
        if i % group == 0:
            positions.append(acc)
    return positions
