"""Unit tests for the [[7,1,3]] code definition, decoder and perfect EC."""

import itertools

import numpy as np
import pytest

from steane_sm import code as sc
from steane_sm import noise
from steane_sm import statevec as sv
from steane_sm.rng import stream
from steane_sm.statevec import PauliString


BASIS = ["0", "1", "+", "i"]


@pytest.mark.parametrize("which", BASIS)
def test_generators_stabilize_codewords(which):
    state = sc.logical_basis(which)
    for g in sc.STEANE.generators:
        flipped = sv.apply_pauli(state, g)
        assert np.vdot(state.amps, flipped.amps).real == pytest.approx(1.0, abs=1e-10)


def test_logical_operators_act_correctly():
    zero, one = sc.logical_basis("0"), sc.logical_basis("1")
    x_l = sv.apply_pauli(zero, sc.STEANE.logical_x)
    assert abs(np.vdot(one.amps, x_l.amps)) == pytest.approx(1.0, abs=1e-10)
    z_on_one = sv.apply_pauli(one, sc.STEANE.logical_z)
    assert np.vdot(one.amps, z_on_one.amps).real == pytest.approx(-1.0, abs=1e-10)


def test_encode_decode_roundtrip_arbitrary_state():
    state = sc.encode_ideal(0.7, 1.1)
    decoded = sc.decode_circuit(state).amps.reshape(2, 64)
    # all non-logical qubits should be in |0...0>
    assert abs(decoded[0, 0]) == pytest.approx(np.cos(0.7), abs=1e-10)
    assert decoded[1, 0] == pytest.approx(np.exp(1.1j) * np.sin(0.7), abs=1e-10)
    assert np.sum(np.abs(decoded[:, 1:]) ** 2) == pytest.approx(0.0, abs=1e-12)


def test_distance_three_no_low_weight_logicals():
    """No Pauli of weight 1 or 2 is zero-syndrome unless it acts trivially."""
    for qs in itertools.chain(itertools.combinations(range(7), 1),
                              itertools.combinations(range(7), 2)):
        for ops in itertools.product("XYZ", repeat=len(qs)):
            p = PauliString.identity(7)
            for q, op in zip(qs, ops):
                p = p * PauliString.single(7, q, op)
            assert bool(sc.ideal_syndrome(p)), f"undetected error {p.ops}"


def test_syndrome_linearity():
    a = PauliString.from_label("XIIIIII")
    b = PauliString.from_label("IIZIIII")
    assert sc.ideal_syndrome(a * b) == sc.ideal_syndrome(a) ^ sc.ideal_syndrome(b)


def test_lookup_decoder_corrects_all_weight_one_errors():
    for q in range(7):
        for op in "XYZ":
            err = PauliString.single(7, q, op)
            rec = sc.decode_lookup(sc.ideal_syndrome(err))
            # recovery * error must act trivially on the code space
            assert not sc.ideal_syndrome(rec * err)
            state = sv.apply_pauli(sc.logical_basis("+"), err)
            fixed = sv.apply_pauli(state, rec)
            f = sv.overlap_fidelity(sc.logical_basis("+"), fixed)
            assert f == pytest.approx(1.0, abs=1e-10)


def test_hamming_correct_fixes_single_bit():
    word = [0, 1, 1, 0, 1, 0, 0]
    word = sc.hamming_correct(word)  # make it a codeword first
    assert not any(sc.classical_syndrome(word))
    for j in range(7):
        corrupted = list(word)
        corrupted[j] ^= 1
        assert sc.hamming_correct(corrupted) == tuple(word)


@pytest.mark.parametrize("which", ["0", "+"])
def test_perfect_final_sm_corrects_weight_one(which):
    target = sc.logical_basis(which)
    for q in range(7):
        for op in "XYZ":
            err = sv.apply_pauli(target, PauliString.single(7, q, op))
            fixed = sc.perfect_final_sm(err)
            assert sv.overlap_fidelity(target, fixed) == pytest.approx(1.0, abs=1e-10)


def test_perfect_decode_density_matrix():
    rho = sc.perfect_decode(sc.encode_ideal(np.pi / 4, 0.0))
    expected = 0.5 * np.ones((2, 2))
    np.testing.assert_allclose(rho, expected, atol=1e-10)


def test_logical_fidelity_fast_path_matches_decode():
    state = sc.encode_ideal(0.3, 0.4)
    target = np.array([np.cos(0.3), np.exp(0.4j) * np.sin(0.3)])
    rho = sc.perfect_decode(state)
    assert sc.logical_fidelity(state, target) == pytest.approx(
        float((target.conj() @ rho @ target).real), abs=1e-12)


def test_theta_ideal_definition():
    theta = sc.theta_ideal()
    ref = (sc.logical_basis("0").amps
           + np.exp(1j * np.pi / 4) * sc.logical_basis("1").amps) / np.sqrt(2)
    np.testing.assert_allclose(theta.amps, ref, atol=1e-10)


@pytest.mark.parametrize("kind,which", [("ZeroL", "0"), ("PlusL", "+")])
def test_noiseless_noisy_prep_is_exact(kind, which):
    ctx = noise.NoiseContext(noise.ErrorEnvironment.zero(), stream(0))
    block = sc.prepare_logical_noisy(kind, ctx)
    assert sv.overlap_fidelity(sc.logical_basis(which), block) == pytest.approx(
        1.0, abs=1e-10)


def test_as_table_lists_all_generators():
    table = sc.STEANE.as_table()
    assert table.count("\n") == 7
    assert "XL: XXXXXXX" in table and "ZL: ZZZZZZZ" in table
