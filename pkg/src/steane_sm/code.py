"""The [[7,1,3]] code: generators, encoders, lookup decoder, perfect EC.

Generator convention (fixed once, everything else is derived from it):

    Z1 = IIIZZZZ   X1 = IIIXXXX
    Z2 = ZZIIIZZ   X2 = XXIIIXX
    Z3 = ZIZIZIZ   X3 = XIXIXIX

These are the rows of a [7,4] Hamming parity-check matrix (columns are a
permutation of the binary numbers 1..7 chosen so that the encoding circuit
takes its input qubit at register position 0).  Logical X = X on all seven
qubits, logical Z = Z on all seven.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import noise
from . import statevec as sv
from .statevec import PauliString, QuantumState

# Stabilizer supports (rows of the parity-check matrix)
STAB_SUPPORTS = ((3, 4, 5, 6), (0, 1, 5, 6), (0, 2, 4, 6))

# Encoding circuit: input qubit at position 0, positions 1-6 start in |0>.
# First the logical-X coset injection (rep X_{0,4,5}), then Hadamards on the
# pivot qubits and CNOT fan-outs generating the X-stabilizer group.
ENCODER_GATES = (
    ("CNOT", (0, 4)), ("CNOT", (0, 5)),
    ("H", (1,)), ("H", (2,)), ("H", (3,)),
    ("CNOT", (3, 4)), ("CNOT", (3, 5)), ("CNOT", (3, 6)),
    ("CNOT", (1, 0)), ("CNOT", (1, 5)), ("CNOT", (1, 6)),
    ("CNOT", (2, 0)), ("CNOT", (2, 4)), ("CNOT", (2, 6)),
)

DATA_LABELS = tuple(f"data-{i}" for i in range(7))


def _support_pauli(kind: str, support) -> PauliString:
    ops = "".join(kind if i in support else "I" for i in range(7))
    return PauliString.from_label(ops)


@dataclass(frozen=True)
class CodeDefinition:
    x_stabilizers: tuple
    z_stabilizers: tuple
    logical_x: PauliString
    logical_z: PauliString

    @property
    def generators(self):
        return self.z_stabilizers + self.x_stabilizers

    def as_table(self) -> str:
        """Text export of the generators, one per line (e.g. "Z1: IIIZZZZ")."""
        lines = [f"Z{i + 1}: {g.ops}" for i, g in enumerate(self.z_stabilizers)]
        lines += [f"X{i + 1}: {g.ops}" for i, g in enumerate(self.x_stabilizers)]
        lines += [f"XL: {self.logical_x.ops}", f"ZL: {self.logical_z.ops}"]
        return "\n".join(lines)


STEANE = CodeDefinition(
    x_stabilizers=tuple(_support_pauli("X", s) for s in STAB_SUPPORTS),
    z_stabilizers=tuple(_support_pauli("Z", s) for s in STAB_SUPPORTS),
    logical_x=PauliString.from_label("XXXXXXX"),
    logical_z=PauliString.from_label("ZZZZZZZ"),
)


@dataclass(frozen=True)
class Syndrome:
    z_bits: tuple  # from Z-type generators; flag bit-flip (X/Y) errors
    x_bits: tuple  # from X-type generators; flag phase-flip (Z/Y) errors

    def __bool__(self):
        return any(self.z_bits) or any(self.x_bits)

    def __xor__(self, other):
        return Syndrome(tuple(a ^ b for a, b in zip(self.z_bits, other.z_bits)),
                        tuple(a ^ b for a, b in zip(self.x_bits, other.x_bits)))


ZERO_SYNDROME = Syndrome((0, 0, 0), (0, 0, 0))


def ideal_syndrome(error: PauliString) -> Syndrome:
    """Commutation pattern of an error with the six generators."""
    z_bits = tuple(int(np.sum(error.x[list(s)])) % 2 for s in STAB_SUPPORTS)
    x_bits = tuple(int(np.sum(error.z[list(s)])) % 2 for s in STAB_SUPPORTS)
    return Syndrome(z_bits, x_bits)


def classical_syndrome(bits) -> tuple:
    """Hamming parity checks of 7 measured bits (one per Z generator)."""
    return tuple(int(sum(bits[i] for i in s)) % 2 for s in STAB_SUPPORTS)


@lru_cache(maxsize=1)
def _hamming_column_map() -> dict:
    """3-bit parity pattern -> the unique qubit producing it."""
    out = {}
    for j in range(7):
        col = tuple(1 if j in s else 0 for s in STAB_SUPPORTS)
        out[col] = j
    return out


def hamming_correct(bits) -> tuple:
    """Flip at most one of 7 classical bits so all parity checks pass."""
    s = classical_syndrome(bits)
    if not any(s):
        return tuple(bits)
    j = _hamming_column_map()[s]
    fixed = list(bits)
    fixed[j] ^= 1
    return tuple(fixed)


@lru_cache(maxsize=1)
def _lookup_table() -> dict:
    """All 64 syndromes -> minimum-weight recovery (derived, not hand-coded)."""
    cols = _hamming_column_map()
    table = {}
    for zb in np.ndindex(2, 2, 2):
        for xb in np.ndindex(2, 2, 2):
            x = np.zeros(7, np.uint8)
            z = np.zeros(7, np.uint8)
            if any(zb):
                x[cols[zb]] = 1  # bit-flip detected: recover with X
            if any(xb):
                z[cols[xb]] = 1  # phase-flip detected: recover with Z
            table[(zb, xb)] = PauliString(x, z, int(np.sum(x & z)))
    return table


def decode_lookup(s: Syndrome) -> PauliString:
    return _lookup_table()[(s.z_bits, s.x_bits)]


# ---------------------------------------------------------------------------
# Encoding / decoding
# ---------------------------------------------------------------------------

def encode_state(target_1q: np.ndarray) -> QuantumState:
    """Noiseless encoding of an arbitrary single-qubit state into 7 qubits."""
    amps = np.zeros(128, dtype=complex)
    amps[0] = target_1q[0]
    amps[1 << 6] = target_1q[1]  # qubit 0 = MSB
    state = QuantumState(amps, DATA_LABELS)
    for kind, targets in ENCODER_GATES:
        state = sv.apply_gate(state, kind, targets)
    return state


def encode_ideal(alpha: float, beta: float = 0.0) -> QuantumState:
    """Noiseless encoding of cos(a)|0> + e^{ib} sin(a)|1> into 7 qubits."""
    return encode_state(np.array([np.cos(alpha),
                                  np.exp(1j * beta) * np.sin(alpha)]))


@lru_cache(maxsize=4)
def logical_basis(which: str) -> QuantumState:
    if which == "0":
        return encode_ideal(0.0)
    if which == "1":
        return encode_ideal(np.pi / 2, 0.0)
    if which == "+":
        return encode_ideal(np.pi / 4, 0.0)
    if which == "i":
        return encode_ideal(np.pi / 4, np.pi / 2)
    raise ValueError(which)


def theta_ideal() -> QuantumState:
    """|Theta> = (|0_L> + e^{i pi/4}|1_L>)/sqrt(2), the T-gate ancilla."""
    return encode_ideal(np.pi / 4, np.pi / 4)


def decode_circuit(state: QuantumState) -> QuantumState:
    """Exact inverse of the noiseless encoder (all gates self-inverse)."""
    for kind, targets in reversed(ENCODER_GATES):
        state = sv.apply_gate(state, kind, targets)
    return state


def perfect_decode(ensemble) -> np.ndarray:
    """Decode an ensemble of 7-qubit trajectories to a 2x2 density matrix.

    `ensemble` is a QuantumState or an iterable of (weight, QuantumState).
    The logical qubit sits at register position 0 after the inverse
    encoder; all other qubits are traced out.
    """
    if isinstance(ensemble, QuantumState):
        ensemble = [(1.0, ensemble)]
    rho = np.zeros((2, 2), dtype=complex)
    total = 0.0
    for w, psi in ensemble:
        if psi.n != 7:
            raise sv.RegisterError("perfect_decode expects 7-qubit states")
        m = decode_circuit(psi).amps.reshape(2, 64)
        rho += w * (m @ m.conj().T)
        total += w
    return rho / total


def logical_fidelity(state: QuantumState, target_1q: np.ndarray) -> float:
    """<target| rho_decoded |target> for a single trajectory (fast path)."""
    m = decode_circuit(state).amps.reshape(2, 64)
    v = target_1q.conj() @ m
    return float(np.real(np.vdot(v, v)))


# ---------------------------------------------------------------------------
# Noiseless projective error correction
# ---------------------------------------------------------------------------

def measure_pauli(state: QuantumState, p: PauliString, draw: float = 0.5):
    """Noiseless projective measurement of a Pauli operator.

    Returns (bit, state): bit 0 for the +1 outcome, 1 for -1.
    """
    sp = sv.apply_pauli(state, p)
    p_plus = 0.5 * (1.0 + float(np.vdot(state.amps, sp.amps).real))
    p_plus = min(max(p_plus, 0.0), 1.0)
    bit = 0 if draw < p_plus else 1
    prob = p_plus if bit == 0 else 1.0 - p_plus
    if prob < 1e-14:
        raise sv.MeasurementError("zero-norm stabilizer branch")
    sign = 1.0 if bit == 0 else -1.0
    amps = (state.amps + sign * sp.amps) / (2.0 * np.sqrt(prob))
    return bit, QuantumState(amps, state.labels)


def perfect_final_sm(state: QuantumState, draw_fn=None) -> QuantumState:
    """Noiseless syndrome extraction + lookup recovery on 7 data qubits.

    `draw_fn` supplies uniform draws for genuinely probabilistic syndrome
    branches (noisy input states); by default the +1 branch is preferred
    deterministically, which is exact whenever outcomes are deterministic.
    """
    if state.n != 7:
        raise sv.RegisterError("perfect_final_sm expects a 7-qubit register")
    if draw_fn is None:
        draw_fn = lambda: 0.5
    z_bits = []
    for g in STEANE.z_stabilizers:
        b, state = measure_pauli(state, g, draw_fn())
        z_bits.append(b)
    x_bits = []
    for g in STEANE.x_stabilizers:
        b, state = measure_pauli(state, g, draw_fn())
        x_bits.append(b)
    rec = decode_lookup(Syndrome(tuple(z_bits), tuple(x_bits)))
    if rec.weight():
        state = sv.apply_pauli(state, rec)
    return state


# ---------------------------------------------------------------------------
# Noisy logical-state preparation
# ---------------------------------------------------------------------------

PREP_INPUT_GATES = {"ZeroL": (), "PlusL": (("H", (0,)),),
                    "Theta": (("H", (0,)), ("T", (0,)))}


def prepare_logical_noisy(kind: str, ctx: noise.NoiseContext,
                          labels=DATA_LABELS) -> QuantumState:
    """Gate-by-gate (non fault tolerant) encoder under the noise model.

    kind: "ZeroL", "PlusL" or "Theta".  Every initialization and gate is a
    fault opportunity.
    """
    state = QuantumState(np.array([1.0 + 0j]), ())
    for lbl in labels:
        state = noise.noisy_init(state, ctx, "0", lbl)
    for kind_g, targets in PREP_INPUT_GATES[kind]:
        state = noise.faulty_apply(state, ctx, kind_g, targets)
    for kind_g, targets in ENCODER_GATES:
        state = noise.faulty_apply(state, ctx, kind_g, targets)
    return state
