"""Exhaustive single-fault certification of the SM gadgets.

A gadget is fault tolerant when any single internal fault leaves the data
block with a residual error of weight <= 1 modulo the stabilizer group,
i.e. some weight-<=1 Pauli returns the state exactly to the encoded input.
Every fault opportunity is located by a fault-free census run, then each
(location, Pauli) pair is injected into an otherwise noiseless execution.

Measurement branches are chosen by seeded draws; each injection is run
with several draw streams to also cover branchy readout patterns.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import code as sc
from . import extraction as ex
from . import noise
from . import statevec as sv
from .rng import stream
from .statevec import PauliString

_WEIGHT1 = [PauliString.identity(7)] + [
    PauliString.single(7, q, op) for q in range(7) for op in "XYZ"]


def residual_weight_leq1(state, reference) -> bool:
    """True when some weight-<=1 Pauli maps `state` back onto `reference`."""
    for w in _WEIGHT1:
        cand = sv.apply_pauli(state, w) if w.weight() else state
        if abs(np.vdot(reference.amps, cand.amps)) ** 2 > 1.0 - 1e-9:
            return True
    return False


@dataclass
class CertificationReport:
    protocol: str
    n_locations: int
    n_injections: int
    failures: list = field(default_factory=list)  # (loc index, op, input, seed)

    @property
    def fault_tolerant(self) -> bool:
        return not self.failures


def count_fault_locations(protocol_name: str, seed: int = 0) -> int:
    """Fault opportunities in one fault-free gadget execution."""
    protocol = ex.SmProtocol.from_name(protocol_name)
    ctx = noise.NoiseContext(noise.ErrorEnvironment.zero(), stream(seed, 0),
                             faults={}, record=True)
    ex.run_sm(sc.logical_basis("0"), ctx, protocol)
    return ctx.counter


def certify_gadget(protocol_name: str, seed: int = 0, draw_seeds: int = 2,
                   inputs: str = "0+") -> CertificationReport:
    """Inject every single fault into the gadget and analyze the residual."""
    protocol = ex.SmProtocol.from_name(protocol_name)
    n_locs = count_fault_locations(protocol_name, seed)
    report = CertificationReport(protocol_name, n_locs, 0)
    for which in inputs:
        ref = sc.logical_basis(which)
        for loc in range(n_locs):
            for op in "XYZ":
                for ds in range(draw_seeds):
                    ctx = noise.NoiseContext(noise.ErrorEnvironment.zero(),
                                             stream(seed, 1, loc, ds),
                                             faults={loc: op})
                    _, final = ex.run_sm(ref, ctx, protocol)
                    report.n_injections += 1
                    if not residual_weight_leq1(final, ref):
                        report.failures.append((loc, op, which, ds))
    return report


def find_nonft_witness(protocol_name: str = "single", seed: int = 0):
    """A single fault whose residual has weight >= 2 and survives perfect EC.

    Returns (loc, op, input_label, logical_infidelity_after_perfect_sm)
    or None when no such location exists.
    """
    protocol = ex.SmProtocol.from_name(protocol_name)
    n_locs = count_fault_locations(protocol_name, seed)
    for which in "0+":
        ref = sc.logical_basis(which)
        tgt = np.array([1.0, 0.0]) if which == "0" else \
            np.array([1.0, 1.0]) / np.sqrt(2.0)
        for loc in range(n_locs):
            for op in "XYZ":
                ctx = noise.NoiseContext(noise.ErrorEnvironment.zero(),
                                         stream(seed, 2, loc), faults={loc: op})
                _, final = ex.run_sm(ref, ctx, protocol)
                if residual_weight_leq1(final, ref):
                    continue
                corrected = sc.perfect_final_sm(final)
                f_log = sc.logical_fidelity(corrected, tgt)
                if f_log < 1.0 - 1e-9:
                    return loc, op, which, 1.0 - f_log
    return None
