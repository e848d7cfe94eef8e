"""Unit tests for the single-fault certification machinery.

The exhaustive gadget certifications themselves are acceptance criterion 3
(see test_acceptance.py); these tests cover the analysis primitives.
"""

import numpy as np

from steane_sm import certify
from steane_sm import code as sc
from steane_sm import statevec as sv
from steane_sm.statevec import PauliString


def test_residual_weight_leq1_accepts_weight_one():
    ref = sc.logical_basis("0")
    for q in range(7):
        for op in "XYZ":
            state = sv.apply_pauli(ref, PauliString.single(7, q, op))
            assert certify.residual_weight_leq1(state, ref)


def test_residual_weight_leq1_accepts_stabilizer_dressing():
    ref = sc.logical_basis("+")
    dressed = sv.apply_pauli(ref, sc.STEANE.x_stabilizers[0])
    dressed = sv.apply_pauli(dressed, PauliString.single(7, 1, "Z"))
    assert certify.residual_weight_leq1(dressed, ref)


def test_residual_weight_leq1_rejects_weight_two():
    ref = sc.logical_basis("0")
    err = PauliString.single(7, 0, "X") * PauliString.single(7, 3, "X")
    state = sv.apply_pauli(ref, err)
    assert not certify.residual_weight_leq1(state, ref)


def test_residual_weight_leq1_rejects_logical_error():
    zero, plus = sc.logical_basis("0"), sc.logical_basis("+")
    flipped = sv.apply_pauli(plus, sc.STEANE.logical_z)  # |+> -> |->
    assert not certify.residual_weight_leq1(flipped, plus)
    # logical Z is invisible on |0_L>: detectable only via the |+_L> probe
    assert certify.residual_weight_leq1(sv.apply_pauli(zero, sc.STEANE.logical_z),
                                        zero)


def test_count_fault_locations_positive_and_stable():
    n1 = certify.count_fault_locations("single", seed=0)
    n2 = certify.count_fault_locations("single", seed=3)
    assert n1 == n2 > 0


def test_single_qubit_witness_exists():
    witness = certify.find_nonft_witness("single", seed=0)
    assert witness is not None
    loc, op, which, infid = witness
    assert infid > 1e-6
    assert op in "XYZ"
