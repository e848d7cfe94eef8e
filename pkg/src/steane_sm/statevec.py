"""Amplitude-vector quantum state engine.

Convention (used everywhere in the package): register position 0 is the
leftmost tensor factor, i.e. the most significant bit of the basis-state
index.  `|10>` therefore means qubit 0 in `|1>` and qubit 1 in `|0>`.

States are values: every operation returns a fresh QuantumState and never
mutates its input, so trajectories can run concurrently without locks.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

MAX_QUBITS = 21
NORM_TOL = 1e-10

SQ2 = 1.0 / np.sqrt(2.0)

# 2x2 single-qubit gate matrices
GATE_1Q = {
    "I": np.eye(2, dtype=complex),
    "H": np.array([[SQ2, SQ2], [SQ2, -SQ2]], dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    "P": np.array([[1, 0], [0, 1j]], dtype=complex),
    "PDag": np.array([[1, 0], [0, -1j]], dtype=complex),
    "T": np.array([[1, 0], [0, np.exp(1j * np.pi / 4)]], dtype=complex),
    "TDag": np.array([[1, 0], [0, np.exp(-1j * np.pi / 4)]], dtype=complex),
}

_PHASE_GATES = {"Z": -1.0, "P": 1j, "PDag": -1j,
                "T": np.exp(1j * np.pi / 4), "TDag": np.exp(-1j * np.pi / 4)}


class RegisterError(ValueError):
    """Bad qubit addressing or register-capacity violation."""


class MeasurementError(RuntimeError):
    """Degenerate (zero-norm) measurement branch: internal corruption."""


@dataclass(frozen=True)
class QuantumState:
    amps: np.ndarray
    labels: tuple = ()

    @property
    def n(self) -> int:
        return int(self.amps.size).bit_length() - 1

    def norm(self) -> float:
        return float(np.sqrt(np.vdot(self.amps, self.amps).real))


def from_bits(bits: str, labels=None) -> QuantumState:
    """Computational basis state, e.g. from_bits("010")."""
    n = len(bits)
    amps = np.zeros(2 ** n, dtype=complex)
    amps[int(bits, 2)] = 1.0
    return QuantumState(amps, _mk_labels(labels, n))


def _mk_labels(labels, n):
    if labels is None:
        return tuple(f"q{i}" for i in range(n))
    labels = tuple(labels)
    if len(labels) != n:
        raise RegisterError(f"{len(labels)} labels for {n} qubits")
    return labels


def _check_targets(n, targets):
    if len(set(targets)) != len(targets):
        raise RegisterError(f"duplicate targets {targets}")
    for q in targets:
        if not 0 <= q < n:
            raise RegisterError(f"target {q} out of range for {n} qubits")


def apply_1q(state: QuantumState, name: str, q: int) -> QuantumState:
    n = state.n
    _check_targets(n, (q,))
    l, r = 1 << q, 1 << (n - 1 - q)
    v = state.amps.reshape(l, 2, r)
    out = np.empty_like(state.amps).reshape(l, 2, r)
    if name == "X":
        out[:, 0, :] = v[:, 1, :]
        out[:, 1, :] = v[:, 0, :]
    elif name == "Y":
        out[:, 0, :] = -1j * v[:, 1, :]
        out[:, 1, :] = 1j * v[:, 0, :]
    elif name in _PHASE_GATES:
        out[:, 0, :] = v[:, 0, :]
        np.multiply(v[:, 1, :], _PHASE_GATES[name], out=out[:, 1, :])
    else:
        m = GATE_1Q[name]
        v0, v1 = v[:, 0, :], v[:, 1, :]
        out[:, 0, :] = m[0, 0] * v0 + m[0, 1] * v1
        out[:, 1, :] = m[1, 0] * v0 + m[1, 1] * v1
    return QuantumState(out.reshape(-1), state.labels)


def apply_cnot(state: QuantumState, control: int, target: int) -> QuantumState:
    n = state.n
    _check_targets(n, (control, target))
    a, b = (control, target) if control < target else (target, control)
    sh = (1 << a, 2, 1 << (b - a - 1), 2, 1 << (n - 1 - b))
    v = state.amps.reshape(sh)
    out = v.copy()
    if control < target:
        out[:, 1, :, 0, :] = v[:, 1, :, 1, :]
        out[:, 1, :, 1, :] = v[:, 1, :, 0, :]
    else:
        out[:, 0, :, 1, :] = v[:, 1, :, 1, :]
        out[:, 1, :, 1, :] = v[:, 0, :, 1, :]
    return QuantumState(out.reshape(-1), state.labels)


def apply_gate(state: QuantumState, kind: str, targets) -> QuantumState:
    """Apply a named gate.  `kind` is one of the GATE_1Q names or "CNOT"."""
    if kind == "CNOT":
        if len(targets) != 2:
            raise RegisterError("CNOT takes exactly two targets")
        return apply_cnot(state, targets[0], targets[1])
    if kind not in GATE_1Q:
        raise RegisterError(f"unknown gate {kind!r}")
    if len(targets) != 1:
        raise RegisterError(f"{kind} takes exactly one target")
    return apply_1q(state, kind, targets[0])


def measure_z(state: QuantumState, q: int, draw: float):
    """Z-basis measurement of qubit q using the supplied uniform draw.

    Returns (outcome_bit, collapsed_state).  The qubit stays in the
    register (in the measured basis state); use detach_measured to drop it.
    """
    n = state.n
    _check_targets(n, (q,))
    l, r = 1 << q, 1 << (n - 1 - q)
    v = state.amps.reshape(l, 2, r)
    s0 = v[:, 0, :]
    p0 = float(np.einsum("ij,ij->", s0.real, s0.real) + np.einsum("ij,ij->", s0.imag, s0.imag))
    outcome = 0 if draw < p0 else 1
    p = p0 if outcome == 0 else 1.0 - p0
    if p < 1e-14:
        raise MeasurementError(f"zero-norm branch (p={p}) for qubit {q}")
    out = np.zeros_like(state.amps).reshape(l, 2, r)
    np.multiply(v[:, outcome, :], 1.0 / np.sqrt(p), out=out[:, outcome, :])
    return outcome, QuantumState(out.reshape(-1), state.labels)


def attach_qubits(state: QuantumState, basis: str, labels=None) -> QuantumState:
    """Tensor extra qubits onto the right end of the register.

    `basis` is a string over {0,1,+,-}, one character per new qubit.
    """
    k = len(basis)
    if state.n + k > MAX_QUBITS:
        raise RegisterError(f"register cap {MAX_QUBITS} exceeded ({state.n}+{k})")
    single = {"0": np.array([1, 0], dtype=complex),
              "1": np.array([0, 1], dtype=complex),
              "+": np.array([SQ2, SQ2], dtype=complex),
              "-": np.array([SQ2, -SQ2], dtype=complex)}
    anc = np.array([1.0 + 0j])
    for c in basis:
        anc = np.kron(anc, single[c])
    new_labels = state.labels + _mk_labels(labels, k) if labels else \
        state.labels + tuple(f"anc{state.n + i}" for i in range(k))
    return QuantumState(np.kron(state.amps, anc), new_labels)


def attach_state(state: QuantumState, block: QuantumState) -> QuantumState:
    """Tensor a separately prepared register onto the right end."""
    if state.n + block.n > MAX_QUBITS:
        raise RegisterError(f"register cap {MAX_QUBITS} exceeded ({state.n}+{block.n})")
    return QuantumState(np.kron(state.amps, block.amps), state.labels + block.labels)


def detach_measured(state: QuantumState, q: int) -> QuantumState:
    """Remove a qubit that is separable in a Z-basis state (post-measurement)."""
    n = state.n
    _check_targets(n, (q,))
    l, r = 1 << q, 1 << (n - 1 - q)
    v = state.amps.reshape(l, 2, r)
    w0 = float(np.sum(np.abs(v[:, 0, :]) ** 2))
    keep = 0 if w0 > 0.5 else 1
    other = float(np.sum(np.abs(v[:, 1 - keep, :]) ** 2))
    if other > 1e-9:
        raise RegisterError(f"qubit {q} is not in a basis state (residual weight {other:.2e})")
    labels = state.labels[:q] + state.labels[q + 1:]
    return QuantumState(np.ascontiguousarray(v[:, keep, :]).reshape(-1), labels)


def measure_and_detach(state: QuantumState, q: int, draw: float):
    """measure_z followed by removal of the measured qubit (one pass)."""
    n = state.n
    _check_targets(n, (q,))
    l, r = 1 << q, 1 << (n - 1 - q)
    v = state.amps.reshape(l, 2, r)
    s0 = v[:, 0, :]
    p0 = float(np.einsum("ij,ij->", s0.real, s0.real) + np.einsum("ij,ij->", s0.imag, s0.imag))
    outcome = 0 if draw < p0 else 1
    p = p0 if outcome == 0 else 1.0 - p0
    if p < 1e-14:
        raise MeasurementError(f"zero-norm branch (p={p}) for qubit {q}")
    kept = np.ascontiguousarray(v[:, outcome, :]).reshape(-1) * (1.0 / np.sqrt(p))
    labels = state.labels[:q] + state.labels[q + 1:]
    return outcome, QuantumState(kept, labels)


# ---------------------------------------------------------------------------
# Pauli strings
# ---------------------------------------------------------------------------

_LABEL_XZ = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_XZ_LABEL = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}
_PHASES = (1, 1j, -1, -1j)


@dataclass(frozen=True)
class PauliString:
    """n-qubit Pauli operator: i^phase_pow * X^x Z^z (bitwise)."""

    x: np.ndarray
    z: np.ndarray
    phase_pow: int = 0  # exponent of i, mod 4; includes the i per Y factor

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=np.uint8))
        object.__setattr__(self, "z", np.asarray(self.z, dtype=np.uint8))
        object.__setattr__(self, "phase_pow", int(self.phase_pow) % 4)

    @classmethod
    def from_label(cls, ops: str, phase=1) -> "PauliString":
        x = np.array([_LABEL_XZ[c][0] for c in ops], dtype=np.uint8)
        z = np.array([_LABEL_XZ[c][1] for c in ops], dtype=np.uint8)
        n_y = int(np.sum(x & z))
        return cls(x, z, _PHASES.index(phase) + n_y)

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(np.zeros(n, np.uint8), np.zeros(n, np.uint8), 0)

    @classmethod
    def single(cls, n: int, q: int, op: str) -> "PauliString":
        x = np.zeros(n, np.uint8)
        z = np.zeros(n, np.uint8)
        x[q], z[q] = _LABEL_XZ[op]
        return cls(x, z, int(x[q] & z[q]))

    @property
    def n(self) -> int:
        return self.x.size

    @property
    def ops(self) -> str:
        return "".join(_XZ_LABEL[(int(a), int(b))] for a, b in zip(self.x, self.z))

    @property
    def phase(self) -> complex:
        n_y = int(np.sum(self.x & self.z))
        return _PHASES[(self.phase_pow - n_y) % 4]

    def weight(self) -> int:
        return int(np.sum(self.x | self.z))

    def __mul__(self, other: "PauliString") -> "PauliString":
        if self.n != other.n:
            raise RegisterError("Pauli length mismatch")
        # X^x1 Z^z1 X^x2 Z^z2 = (-1)^(z1.x2) X^(x1^x2) Z^(z1^z2)
        sign = int(np.sum(self.z & other.x)) % 2
        return PauliString(self.x ^ other.x, self.z ^ other.z,
                           self.phase_pow + other.phase_pow + 2 * sign)

    def commutes_with(self, other: "PauliString") -> bool:
        s = int(np.sum(self.x & other.z)) + int(np.sum(self.z & other.x))
        return s % 2 == 0


def apply_pauli(state: QuantumState, p: PauliString) -> QuantumState:
    """Multiply the state by the Pauli operator (vectorized)."""
    n = state.n
    if p.n != n:
        raise RegisterError(f"Pauli length {p.n} != register size {n}")
    # qubit q <-> bit (n-1-q)
    xmask = 0
    zmask = 0
    for q in range(n):
        bit = 1 << (n - 1 - q)
        if p.x[q]:
            xmask |= bit
        if p.z[q]:
            zmask |= bit
    idx = np.arange(state.amps.size, dtype=np.uint32)
    t = state.amps * _PHASES[p.phase_pow % 4]
    if zmask:
        signs = 1.0 - 2.0 * (np.bitwise_count(idx & np.uint32(zmask)) & 1)
        t = t * signs
    if xmask:
        t = t[idx ^ np.uint32(xmask)]
    return QuantumState(t, state.labels)


def overlap_fidelity(a, b: QuantumState) -> float:
    """|<a|b>|^2 for pure a, or sum_k w_k |<psi_k|b>|^2 for ensemble a.

    An ensemble is an iterable of (weight, QuantumState) pairs.
    """
    if isinstance(a, QuantumState):
        if a.n != b.n:
            raise RegisterError("size mismatch")
        return float(abs(np.vdot(a.amps, b.amps)) ** 2)
    total = 0.0
    for w, psi in a:
        if psi.n != b.n:
            raise RegisterError("size mismatch")
        total += w * float(abs(np.vdot(psi.amps, b.amps)) ** 2)
    return total
