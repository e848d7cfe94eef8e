"""Unit tests for the syndrome-measurement protocols and recovery."""

import numpy as np
import pytest

from steane_sm import code as sc
from steane_sm import extraction as ex
from steane_sm import noise
from steane_sm import statevec as sv
from steane_sm.rng import stream
from steane_sm.statevec import PauliString


def clean_ctx(seed=0, faults=None):
    return noise.NoiseContext(noise.ErrorEnvironment.zero(), stream(seed),
                              faults=faults)


def test_protocol_names_roundtrip():
    for name in ex.PROTOCOL_NAMES:
        assert ex.SmProtocol.from_name(name).name == name
    with pytest.raises(ValueError):
        ex.SmProtocol.from_name("bogus")
    with pytest.raises(ValueError):
        ex.SmProtocol("ShorState", repeated=False)


@pytest.mark.parametrize("name", ex.PROTOCOL_NAMES)
@pytest.mark.parametrize("which", ["0", "+"])
def test_noiseless_sm_reads_zero_syndrome_and_preserves_state(name, which):
    protocol = ex.SmProtocol.from_name(name)
    ref = sc.logical_basis(which)
    out, state = ex.run_sm(ref, clean_ctx(1), protocol)
    assert not out.syndrome
    assert not out.cap_hit
    assert sv.overlap_fidelity(ref, state) == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("name", ex.PROTOCOL_NAMES)
def test_sm_identifies_and_corrects_weight_one_errors(name):
    protocol = ex.SmProtocol.from_name(name)
    ref = sc.logical_basis("+")
    for q in range(7):
        for op in "XYZ":
            err = PauliString.single(7, q, op)
            corrupted = sv.apply_pauli(ref, err)
            out, state = ex.run_sm(corrupted, clean_ctx(2), protocol)
            assert out.syndrome == sc.ideal_syndrome(err)
            assert sv.overlap_fidelity(ref, state) == pytest.approx(1.0, abs=1e-10)


def test_minimum_resource_counts():
    ref = sc.logical_basis("0")
    expected = {"single": (6, 1), "single-repeated": (12, 2), "shor": (60, 2),
                "steane": (28, 1), "steane-repeated": (56, 2)}
    for name, (qubits, rounds) in expected.items():
        out, _ = ex.run_sm(ref, clean_ctx(3), ex.SmProtocol.from_name(name))
        assert out.ancilla_qubits_consumed == qubits, name
        assert out.rounds_used == rounds, name
        assert out.verification_retries == 0


def test_repeat_until_agree_runs_third_set_on_disagreement():
    calls = []

    def run_set(state, ctx):
        calls.append(1)
        s = (sc.ZERO_SYNDROME if len(calls) != 1
             else sc.Syndrome((1, 0, 0), (0, 0, 0)))
        return s, state

    syndrome, _, sets, cap_hit = ex._repeat_until_agree(run_set, None, None, True)
    assert sets == 3
    assert syndrome == sc.ZERO_SYNDROME
    assert not cap_hit


def test_repeat_until_agree_cap():
    toggle = [0]

    def run_set(state, ctx):
        toggle[0] ^= 1
        return sc.Syndrome((toggle[0], 0, 0), (0, 0, 0)), state

    _, _, sets, cap_hit = ex._repeat_until_agree(run_set, None, None, True)
    assert sets == ex.SHOR_SET_CAP
    assert cap_hit


def test_ghz_verification_discards_faulty_block():
    # an X fault on the chain head after the first chain CNOT flips the
    # end-pair verification parity, forcing one rebuild
    ref = sc.logical_basis("0")
    ctx = clean_ctx(4, faults={5: "X"})
    state, base, retries, cap_hit = ex.build_ghz_verified(ref, ctx)
    assert retries == 1
    assert not cap_hit
    assert state.n == ref.n + 4


def test_steane_ancilla_verification_catches_injected_error():
    ctx = clean_ctx(5)
    _, copies, retries, cap_hit = ex.build_steane_ancilla(ctx, "ZeroL")
    assert (copies, retries, cap_hit) == (2, 0, False)
    # X fault on the keeper's first init: copied onto the check block and
    # caught by the Z-basis readout
    ctx = clean_ctx(6, faults={0: "X"})
    block, copies, retries, _ = ex.build_steane_ancilla(ctx, "ZeroL")
    assert retries >= 1
    assert copies == 2 * (retries + 1)


def test_pauli_frame_folds_and_resets():
    frame = ex.PauliFrame()
    frame.update(PauliString.single(7, 2, "X"))
    frame.update(PauliString.single(7, 2, "X"))
    ref = sc.logical_basis("0")
    assert frame.pauli.weight() == 0  # X twice cancels
    frame.update(PauliString.single(7, 3, "Z"))
    state = frame.fold(sv.apply_pauli(ref, PauliString.single(7, 3, "Z")))
    assert sv.overlap_fidelity(ref, state) == pytest.approx(1.0, abs=1e-12)
    assert frame.pauli.weight() == 0


def test_sm_round_counts_ancillas_per_outcome_with_fault():
    # a fault forcing syndrome disagreement makes Shor use a third set
    ref = sc.logical_basis("0")
    protocol = ex.SmProtocol.from_name("shor")
    # fault on a data qubit mid-way through the first set: the first and
    # second sets read different syndromes
    out, state = ex.run_sm(ref, clean_ctx(7, faults={40: "X"}), protocol)
    assert out.rounds_used >= 2
    assert out.ancilla_qubits_consumed >= 30 * out.rounds_used
