"""The three syndrome-measurement protocols and Pauli-frame recovery.

All gadgets expect the seven data qubits at register positions 0-6 and
leave the register in that layout (ancilla blocks are attached, measured
and detached internally).  Recovery operations are noiseless Pauli-frame
updates: Paulis propagate deterministically through the rest of the
circuit, so tracking them classically is exact and adds no fault
opportunities.

Generator order within a syndrome set: the three Z-type generators first
(bit-flip detection), then the three X-type generators (phase-flip
detection).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import code as sc
from . import noise
from . import statevec as sv
from .code import STAB_SUPPORTS, Syndrome
from .statevec import PauliString

SHOR_SET_CAP = 3       # repeat-until-agree cap (sets), then accept the last
VERIFY_RETRY_CAP = 5   # ancilla verification retries, then accept and flag

PROTOCOL_NAMES = ("single", "single-repeated", "shor", "steane", "steane-repeated")


@dataclass(frozen=True)
class SmProtocol:
    method: str   # "SingleQubit" | "ShorState" | "SteaneState"
    repeated: bool

    def __post_init__(self):
        if self.method == "ShorState" and not self.repeated:
            raise ValueError("unrepeated Shor-state SM is not fault tolerant; "
                             "repetition is mandatory")

    @classmethod
    def from_name(cls, name: str) -> "SmProtocol":
        table = {"single": ("SingleQubit", False),
                 "single-repeated": ("SingleQubit", True),
                 "shor": ("ShorState", True),
                 "steane": ("SteaneState", False),
                 "steane-repeated": ("SteaneState", True)}
        if name not in table:
            raise ValueError(f"unknown protocol {name!r}; choose from {PROTOCOL_NAMES}")
        return cls(*table[name])

    @property
    def name(self) -> str:
        base = {"SingleQubit": "single", "ShorState": "shor",
                "SteaneState": "steane"}[self.method]
        if self.repeated and self.method != "ShorState":
            return base + "-repeated"
        return base


@dataclass
class SmOutcome:
    syndrome: Syndrome
    rounds_used: int = 1
    ancilla_qubits_consumed: int = 0
    verification_retries: int = 0
    cap_hit: bool = False
    recovery: PauliString = field(default_factory=lambda: PauliString.identity(7))


@dataclass
class PauliFrame:
    """Classically tracked recovery, folded into the state on demand."""

    pauli: PauliString = field(default_factory=lambda: PauliString.identity(7))

    def update(self, recovery: PauliString):
        self.pauli = recovery * self.pauli

    def fold(self, state: sv.QuantumState) -> sv.QuantumState:
        if self.pauli.weight():
            state = sv.apply_pauli(state, self.pauli)
        self.pauli = PauliString.identity(7)
        return state


def interpret_and_recover(frame: PauliFrame, state: sv.QuantumState) -> sv.QuantumState:
    """Fold the accumulated frame into the state (noiseless, idempotent)."""
    return frame.fold(state)


def _apply_recovery(state, syndrome):
    rec = sc.decode_lookup(syndrome)
    if rec.weight():
        state = sv.apply_pauli(state, rec)
    return state, rec


def _repeat_until_agree(run_set, state, ctx, enabled, cap=SHOR_SET_CAP):
    """Run syndrome sets until two consecutive agree (cap, then take last)."""
    syndrome, state = run_set(state, ctx)
    sets = 1
    cap_hit = False
    if enabled:
        prev = syndrome
        while True:
            syndrome, state = run_set(state, ctx)
            sets += 1
            if syndrome == prev:
                break
            if sets >= cap:
                cap_hit = True
                break
            prev = syndrome
    return syndrome, state, sets, cap_hit


# ---------------------------------------------------------------------------
# Single-qubit ancilla (non fault tolerant)
# ---------------------------------------------------------------------------

def _single_qubit_set(state, ctx):
    z_bits = []
    for s in STAB_SUPPORTS:  # Z generators: |0> ancilla, data -> ancilla CNOTs
        state = noise.noisy_init(state, ctx, "0", "anc-z")
        a = state.n - 1
        for d in s:
            state = noise.faulty_apply(state, ctx, "CNOT", (d, a))
        bit, state = noise.noisy_measure_detach(state, ctx, a)
        z_bits.append(bit)
    x_bits = []
    for s in STAB_SUPPORTS:  # X generators: |+> ancilla, ancilla -> data CNOTs
        state = noise.noisy_init(state, ctx, "+", "anc-x")
        a = state.n - 1
        for d in s:
            state = noise.faulty_apply(state, ctx, "CNOT", (a, d))
        state = noise.faulty_apply(state, ctx, "H", (a,))
        bit, state = noise.noisy_measure_detach(state, ctx, a)
        x_bits.append(bit)
    return Syndrome(tuple(z_bits), tuple(x_bits)), state


def sm_single_qubit(state, ctx, repeated: bool):
    syndrome, state, sets, cap_hit = _repeat_until_agree(
        _single_qubit_set, state, ctx, repeated)
    state, rec = _apply_recovery(state, syndrome)
    return SmOutcome(syndrome, rounds_used=sets, ancilla_qubits_consumed=6 * sets,
                     cap_hit=cap_hit, recovery=rec), state


# ---------------------------------------------------------------------------
# Shor-state ancilla
# ---------------------------------------------------------------------------

def build_ghz_verified(state, ctx):
    """Attach a verified 4-qubit GHZ chain; returns (state, ghz_pos, retries).

    The verification qubit checks the parity of the two chain ends; on an
    odd parity the block is discarded (measured out) and rebuilt.
    """
    retries = 0
    while True:
        base = state.n
        for i in range(4):
            state = noise.noisy_init(state, ctx, "0", f"ghz-{i}")
        state = noise.faulty_apply(state, ctx, "H", (base,))
        for i in range(3):
            state = noise.faulty_apply(state, ctx, "CNOT", (base + i, base + i + 1))
        state = noise.noisy_init(state, ctx, "0", "ghz-verify")
        v = state.n - 1
        state = noise.faulty_apply(state, ctx, "CNOT", (base, v))
        state = noise.faulty_apply(state, ctx, "CNOT", (base + 3, v))
        bit, state = noise.noisy_measure_detach(state, ctx, v)
        if bit == 0:
            return state, base, retries, False
        # discard the flagged block
        for _ in range(4):
            _, state = noise.noisy_measure_detach(state, ctx, base)
        retries += 1
        if retries > VERIFY_RETRY_CAP:
            # rebuild unverified (cap exhausted): keep the last build
            base = state.n
            for i in range(4):
                state = noise.noisy_init(state, ctx, "0", f"ghz-{i}")
            state = noise.faulty_apply(state, ctx, "H", (base,))
            for i in range(3):
                state = noise.faulty_apply(state, ctx, "CNOT", (base + i, base + i + 1))
            return state, base, retries, True


def _shor_set(state, ctx, counters):
    bits = {"z": [], "x": []}
    for half, supports in (("z", STAB_SUPPORTS), ("x", STAB_SUPPORTS)):
        for s in supports:
            state, base, retries, cap_hit = build_ghz_verified(state, ctx)
            counters["anc"] += 5 * (retries + 1)
            counters["retries"] += retries
            counters["cap_hit"] |= cap_hit
            anc = [base + i for i in range(4)]
            if half == "z":
                # Shor state (H on each), then data -> ancilla CNOTs
                state = noise.noisy_transversal(state, ctx, "H", anc)
                for d, a in zip(s, anc):
                    state = noise.faulty_apply(state, ctx, "CNOT", (d, a))
            else:
                # bare GHZ as control block, H before readout
                for d, a in zip(s, anc):
                    state = noise.faulty_apply(state, ctx, "CNOT", (a, d))
                state = noise.noisy_transversal(state, ctx, "H", anc)
            parity = 0
            for _ in range(4):
                bit, state = noise.noisy_measure_detach(state, ctx, base)
                parity ^= bit
            bits[half].append(parity)
    return Syndrome(tuple(bits["z"]), tuple(bits["x"])), state


def sm_shor(state, ctx):
    counters = {"anc": 0, "retries": 0, "cap_hit": False}

    def run_set(st, c):
        return _shor_set(st, c, counters)

    syndrome, state, sets, cap_hit = _repeat_until_agree(run_set, state, ctx, True)
    state, rec = _apply_recovery(state, syndrome)
    return SmOutcome(syndrome, rounds_used=sets,
                     ancilla_qubits_consumed=counters["anc"],
                     verification_retries=counters["retries"],
                     cap_hit=cap_hit or counters["cap_hit"], recovery=rec), state


# ---------------------------------------------------------------------------
# Steane-state ancilla
# ---------------------------------------------------------------------------

def build_steane_ancilla(ctx, kind: str):
    """Verified logical ancilla block (standalone 7-qubit state).

    Two noisy copies; a transversal CNOT copies the keeper's dangerous
    errors onto the check copy, which is then measured transversally.
    The |+_L> keeper serves as a CNOT *target* during syndrome extraction,
    so its dangerous errors are Z-type: the check copy controls the
    verification CNOT and is read out in the X basis.  The |0_L> keeper
    serves as a CNOT *control*, so its dangerous errors are X-type: the
    keeper controls and the check copy is read out in the Z basis.
    Accept when the readout is a valid Hamming codeword with the correct
    logical parity (zero classical syndrome, even overall parity).

    Returns (block, copies_used, retries, cap_hit).
    """
    retries = 0
    while True:
        c1 = sc.prepare_logical_noisy(kind, ctx, labels=tuple(f"anc-{i}" for i in range(7)))
        c2 = sc.prepare_logical_noisy(kind, ctx, labels=tuple(f"chk-{i}" for i in range(7)))
        pair = sv.attach_state(c1, c2)
        if kind == "PlusL":
            pair = noise.noisy_transversal_cnot(pair, ctx, range(7, 14), range(7))
            pair = noise.noisy_transversal(pair, ctx, "H", range(7, 14))
        else:
            pair = noise.noisy_transversal_cnot(pair, ctx, range(7), range(7, 14))
        outcome = []
        for _ in range(7):
            bit, pair = noise.noisy_measure_detach(pair, ctx, 7)
            outcome.append(bit)
        ok = not any(sc.classical_syndrome(outcome)) and sum(outcome) % 2 == 0
        if ok:
            return pair, 2 * (retries + 1), retries, False
        retries += 1
        if retries > VERIFY_RETRY_CAP:
            return pair, 2 * (retries + 1), retries, True


def _steane_extraction(state, ctx, counters):
    # bit-flip syndrome: |+_L> ancilla as transversal CNOT target (a |+_L>
    # target leaves the logical state untouched while X errors copy over)
    anc, copies, retries, cap_hit = build_steane_ancilla(ctx, "PlusL")
    counters["anc"] += 7 * copies
    counters["retries"] += retries
    counters["cap_hit"] |= cap_hit
    state = sv.attach_state(state, anc)
    state = noise.noisy_transversal_cnot(state, ctx, range(7), range(7, 14))
    bits = []
    for _ in range(7):
        bit, state = noise.noisy_measure_detach(state, ctx, 7)
        bits.append(bit)
    z_bits = sc.classical_syndrome(bits)

    # phase-flip syndrome: |0_L> ancilla as transversal CNOT control (a
    # |0_L> control acts as logical identity while data Z errors kick back),
    # ancilla read out in the X basis
    anc, copies, retries, cap_hit = build_steane_ancilla(ctx, "ZeroL")
    counters["anc"] += 7 * copies
    counters["retries"] += retries
    counters["cap_hit"] |= cap_hit
    state = sv.attach_state(state, anc)
    state = noise.noisy_transversal_cnot(state, ctx, range(7, 14), range(7))
    state = noise.noisy_transversal(state, ctx, "H", range(7, 14))
    bits = []
    for _ in range(7):
        bit, state = noise.noisy_measure_detach(state, ctx, 7)
        bits.append(bit)
    x_bits = sc.classical_syndrome(bits)
    return Syndrome(z_bits, x_bits), state


def sm_steane(state, ctx, repeated: bool):
    counters = {"anc": 0, "retries": 0, "cap_hit": False}
    syndrome, state = _steane_extraction(state, ctx, counters)
    rounds = 1
    if repeated:
        # take the second extraction when the two disagree: it reflects the
        # more recent error state
        syndrome2, state = _steane_extraction(state, ctx, counters)
        syndrome = syndrome2
        rounds = 2
    state, rec = _apply_recovery(state, syndrome)
    return SmOutcome(syndrome, rounds_used=rounds,
                     ancilla_qubits_consumed=counters["anc"],
                     verification_retries=counters["retries"],
                     cap_hit=counters["cap_hit"], recovery=rec), state


def run_sm(state, ctx, protocol: SmProtocol):
    """Dispatch one full syndrome-measurement gadget + recovery."""
    if protocol.method == "SingleQubit":
        return sm_single_qubit(state, ctx, protocol.repeated)
    if protocol.method == "ShorState":
        return sm_shor(state, ctx)
    return sm_steane(state, ctx, protocol.repeated)
