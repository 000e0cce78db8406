from __future__ import annotations

import pytest
from conftest import bm, gl_elements
from oracles import key_of, min_cnot_counts, sp4_elements

from cliffsynth.baseline import gaussian_synth, volanto_synth
from cliffsynth.circuit import replay
from cliffsynth.gf2 import BitMatrix, NotInvertible, permutation_matrix, random_gl
from cliffsynth.symplectic import (NotSymplectic, PauliVec, SpMatrix, is_terminal_sp, random_sp,
                                   rank_mask, sp_identity, transvection_matrix)


def test_gaussian_examples():
    p = permutation_matrix([2, 0, 1])
    res = gaussian_synth(p)
    assert res.gate_count() == 0 and res.terminal == p
    res = gaussian_synth(bm([[1, 1], [0, 1]]))
    assert res.gate_count() == 1
    assert replay(res.circuit, res.terminal) == bm([[1, 1], [0, 1]])
    with pytest.raises(NotInvertible):
        gaussian_synth(bm([[1, 1], [1, 1]]))


@pytest.mark.parametrize("n", [2, 5, 16, 40])
def test_gaussian_roundtrip_and_bound(n):
    for s in range(10):
        a = random_gl(n, [n, s])
        res = gaussian_synth(a)
        assert res.terminal.is_permutation()
        assert replay(res.circuit, res.terminal) == a
        assert res.gate_count() <= n * n
        assert all(g.kind == "CNOT" for g in res.circuit.ops)


def test_gaussian_deterministic():
    a = random_gl(12, 4)
    assert gaussian_synth(a).circuit.ops == gaussian_synth(a).circuit.ops


def test_gaussian_never_beats_oracle_gl3():
    dist = min_cnot_counts(3)
    for a in gl_elements(3):
        assert gaussian_synth(a).gate_count() >= dist[key_of(a)]


def test_volanto_examples():
    res = volanto_synth(sp_identity(3))
    assert res.gate_count() == 0
    t = transvection_matrix(PauliVec.from_labels(3, {0: "Z", 2: "Y"}))
    res = volanto_synth(t)
    assert res.gate_count() == 1 and res.circuit.ops[0].kind == "TV"
    assert replay(res.circuit, res.terminal) == t


@pytest.mark.parametrize("seed", range(100))
def test_volanto_roundtrip_n3(seed):
    a = random_sp(3, seed)
    res = volanto_synth(a)
    assert is_terminal_sp(res.terminal)
    rm = rank_mask(res.terminal)
    assert not rm.r1.any() and rm.r2.sum() == 3
    assert replay(res.circuit, res.terminal) == a


def test_volanto_all_sp4_verbatim_rule():
    # the literal T1 extraction rule succeeds on every element without the fallback search
    for m in sp4_elements():
        a = SpMatrix.wrap(bm(m))
        res = volanto_synth(a, fallback=False)
        assert is_terminal_sp(res.terminal)
        assert replay(res.circuit, res.terminal) == a


@pytest.mark.parametrize("n", [5, 8, 16])
def test_volanto_roundtrip_larger(n):
    for s in range(5):
        a = random_sp(n, [n, s])
        res = volanto_synth(a)
        assert replay(res.circuit, res.terminal) == a
        assert is_terminal_sp(res.terminal)


def test_volanto_rejects_non_symplectic():
    with pytest.raises(NotSymplectic):
        volanto_synth(BitMatrix.identity(3))
    with pytest.raises(NotSymplectic):
        volanto_synth(bm([[1, 1, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]))


def test_full_circuit_from_identity():
    for s in range(10):
        a = random_sp(4, s)
        res = volanto_synth(a)
        assert replay(res.full_circuit(), sp_identity(4), sp=True) == a
        g = random_gl(6, s)
        assert replay(gaussian_synth(g).full_circuit(), BitMatrix.identity(6)) == g
