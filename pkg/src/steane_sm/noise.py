"""Nonequiprobable Pauli error model and fault bookkeeping.

Faults hit only qubits that participate in an operation: gates, qubit
initializations, and measurements.  Idle qubits are never touched.  The
fault sits AFTER gates and initializations and BEFORE measurements.

Two execution modes share the same circuit code via NoiseContext:

* Monte Carlo: each fault opportunity draws X/Y/Z/I from the environment.
* Enumeration: a FaultConfiguration pins specific Pauli faults onto
  specific fault opportunities (indexed in execution order); all other
  opportunities are fault-free.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import statevec as sv
from .rng import UniformBuffer

_AXES = ("X", "Y", "Z")


class NoiseConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ErrorEnvironment:
    """Per-operation Pauli fault probabilities (p_x, p_y, p_z)."""

    px: float
    py: float
    pz: float

    def __post_init__(self):
        for p in (self.px, self.py, self.pz):
            if p < 0:
                raise NoiseConfigError("negative probability")
        if self.total > 1:
            raise NoiseConfigError("p_x + p_y + p_z > 1")

    @property
    def total(self) -> float:
        return self.px + self.py + self.pz

    @classmethod
    def zero(cls) -> "ErrorEnvironment":
        return cls(0.0, 0.0, 0.0)

    @classmethod
    def depolarizing(cls, p: float) -> "ErrorEnvironment":
        return cls(p, p, p)

    @classmethod
    def dominant(cls, axis: str, p: float, floor: float = 1e-10) -> "ErrorEnvironment":
        vals = {a: floor for a in "xyz"}
        vals[axis.lower()] = p
        return cls(vals["x"], vals["y"], vals["z"])

    @classmethod
    def from_name(cls, name: str, p: float) -> "ErrorEnvironment":
        name = name.lower()
        if name == "depolarizing":
            return cls.depolarizing(p)
        if name in ("x-dominant", "y-dominant", "z-dominant"):
            return cls.dominant(name[0], p)
        if name in ("zero", "none"):
            return cls.zero()
        raise NoiseConfigError(f"unknown environment {name!r}")

    def prob(self, op: str) -> float:
        return {"X": self.px, "Y": self.py, "Z": self.pz}[op]


def sample_fault(env: ErrorEnvironment, u: float) -> str:
    """Map a uniform draw to one of I/X/Y/Z with the environment's weights."""
    if u < env.px:
        return "X"
    if u < env.px + env.py:
        return "Y"
    if u < env.total:
        return "Z"
    return "I"


@dataclass(frozen=True)
class FaultLocation:
    step: int
    qubit: str
    kind: str  # gate | initialization | measurement


@dataclass(frozen=True)
class FaultConfiguration:
    """Faults assigned to fault opportunities (by execution-order index)."""

    assignments: dict  # index -> "X" | "Y" | "Z"
    probability: float

    @property
    def weight(self) -> int:
        return len(self.assignments)


class NoiseContext:
    """Per-trajectory carrier of noise mode, randomness and accounting.

    Fault opportunities are numbered in the order the circuit encounters
    them; that order is deterministic for a given (faults, draws) pair.
    """

    __slots__ = ("env", "mode", "faults", "_ubuf", "counter", "locations",
                 "record", "time_steps")

    def __init__(self, env, rng, faults=None, record=False):
        self.env = env
        self.mode = "mc" if faults is None else "enum"
        self.faults = faults
        self._ubuf = UniformBuffer(rng) if rng is not None else None
        self.counter = 0
        self.record = record
        self.locations = [] if record else None
        self.time_steps = 0

    def fault(self, qubit: str, kind: str) -> str:
        i = self.counter
        self.counter += 1
        if self.record:
            self.locations.append(FaultLocation(self.time_steps, qubit, kind))
        if self.mode == "mc":
            if self.env.total == 0.0:
                return "I"
            return sample_fault(self.env, self._ubuf.next())
        return self.faults.get(i, "I")

    def draw(self) -> float:
        return self._ubuf.next()

    def tick(self, k: int = 1):
        self.time_steps += k


# ---------------------------------------------------------------------------
# Noisy circuit primitives (ideal op + fault insertion)
# ---------------------------------------------------------------------------

def _insert(state, op, q):
    if op != "I":
        state = sv.apply_1q(state, op, q)
    return state


def faulty_apply(state, ctx: NoiseContext, kind: str, targets) -> "sv.QuantumState":
    """Ideal gate followed by an independent fault on each participant."""
    state = sv.apply_gate(state, kind, targets)
    for q in targets:
        state = _insert(state, ctx.fault(state.labels[q], "gate"), q)
    ctx.tick()
    return state


def noisy_transversal(state, ctx, kind, positions):
    """Same single-qubit gate on several qubits, counted as one time step."""
    for q in positions:
        state = sv.apply_1q(state, kind, q)
        state = _insert(state, ctx.fault(state.labels[q], "gate"), q)
    ctx.tick()
    return state


def noisy_transversal_cnot(state, ctx, controls, targets):
    """Bitwise CNOTs (parallel), one time step, faults on every participant."""
    for c, t in zip(controls, targets):
        state = sv.apply_cnot(state, c, t)
        state = _insert(state, ctx.fault(state.labels[c], "gate"), c)
        state = _insert(state, ctx.fault(state.labels[t], "gate"), t)
    ctx.tick()
    return state


def noisy_init(state, ctx, basis: str, label: str):
    """Attach one fresh qubit, then fault it (fault after initialization)."""
    state = sv.attach_qubits(state, basis, [label])
    q = state.n - 1
    state = _insert(state, ctx.fault(label, "initialization"), q)
    ctx.tick()
    return state


def noisy_measure_detach(state, ctx, q):
    """Fault, then Z-measure and drop the qubit.  Returns (bit, state)."""
    state = _insert(state, ctx.fault(state.labels[q], "measurement"), q)
    ctx.tick()
    return sv.measure_and_detach(state, q, ctx.draw())


# ---------------------------------------------------------------------------
# Exhaustive enumeration of fault configurations
# ---------------------------------------------------------------------------

def enumerate_configurations(n_locations: int, env: ErrorEnvironment,
                             max_weight: int, cap: int = 2_000_000):
    """All fault configurations of weight <= max_weight with exact weights.

    Returns (configs, remainder) where remainder = 1 - sum of enumerated
    probabilities, i.e. the exact probability mass of the truncated tail.
    """
    if max_weight < 0:
        raise NoiseConfigError("max_weight must be >= 0")
    count = sum(math.comb(n_locations, k) * 3 ** k for k in range(max_weight + 1))
    if count > cap:
        raise NoiseConfigError(f"{count} configurations exceeds cap {cap}")
    survive = 1.0 - env.total
    configs = []
    total = 0.0
    for k in range(max_weight + 1):
        base = survive ** (n_locations - k)
        for locs in itertools.combinations(range(n_locations), k):
            for ops in itertools.product(_AXES, repeat=k):
                prob = base
                for op in ops:
                    prob *= env.prob(op)
                if prob == 0.0:
                    continue
                configs.append(FaultConfiguration(dict(zip(locs, ops)), prob))
                total += prob
    return configs, max(0.0, 1.0 - total)


def weight_class_probability(n_locations: int, k: int, env: ErrorEnvironment) -> float:
    """Exact probability that exactly k fault opportunities misfire."""
    s = env.total
    return math.comb(n_locations, k) * s ** k * (1.0 - s) ** (n_locations - k)


def tail_probability(n_locations: int, max_weight: int, env: ErrorEnvironment) -> float:
    """Exact probability of more than max_weight faults."""
    return max(0.0, 1.0 - sum(weight_class_probability(n_locations, k, env)
                              for k in range(max_weight + 1)))


def sample_weight_k_config(rng: np.random.Generator, n_locations: int, k: int,
                           env: ErrorEnvironment) -> dict:
    """Uniform location choice + per-axis op choice, conditioned on weight k."""
    locs = rng.choice(n_locations, size=k, replace=False)
    s = env.total
    probs = np.array([env.px, env.py, env.pz]) / s
    ops = rng.choice(3, size=k, p=probs)
    return {int(l): _AXES[int(o)] for l, o in zip(locs, ops)}


def sample_tail_weight(rng: np.random.Generator, n_locations: int,
                       max_weight: int, env: ErrorEnvironment) -> int:
    """Draw a fault count from Binomial(N, s) conditioned on > max_weight."""
    s = env.total
    probs = np.array([weight_class_probability(n_locations, k, env)
                      for k in range(max_weight + 1, n_locations + 1)])
    tail = probs.sum()
    if tail <= 0:
        raise NoiseConfigError("tail has zero probability")
    u = rng.random() * tail
    acc = 0.0
    for k, p in enumerate(probs):
        acc += p
        if u < acc:
            return max_weight + 1 + k
    return n_locations
