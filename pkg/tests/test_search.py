from __future__ import annotations

import random

import pytest
from conftest import bm, gl_elements
from oracles import key_of, min_cnot_counts, min_tv_counts, sp4_elements

from cliffsynth.baseline import gaussian_synth
from cliffsynth.circuit import depth, replay
from cliffsynth.gf2 import BitMatrix, permutation_matrix, random_gl
from cliffsynth.search import (Abandoned, AstarConfig, GreedyConfig, astar_synth, gate_options,
                               greedy_synth)
from cliffsynth.symplectic import SpMatrix, is_terminal_sp, random_sp, sp_identity

E = bm([[1, 1], [0, 1]])


def test_gate_options_gl():
    assert gate_options(BitMatrix.identity(2)) == []
    assert sorted(str(g) for g in gate_options(E)) == ["CNOT 0 1", "CNOT 1 0"]


def test_gate_options_gl_overlap_rule():
    for s in range(10):
        a = random_gl(6, s)
        arr = a.to_array()
        want = {(i, j) for i in range(6) for j in range(6)
                if i != j and (arr[:, i] & arr[:, j]).any()}
        assert {g.qubits for g in gate_options(a)} == want


def test_gate_options_sp():
    assert gate_options(sp_identity(2), "sp") == []
    for s in range(20):
        opts = gate_options(random_sp(2, s), "sp")
        assert len(opts) <= 9 and all(g.kind == "TV" for g in opts)


def test_config_validation():
    with pytest.raises(ValueError):
        GreedyConfig(max_wait=0)
    with pytest.raises(ValueError):
        AstarConfig(r=0)
    with pytest.raises(ValueError):
        AstarConfig(max_q=-1)
    assert AstarConfig().queue_limit(8) == 100 and AstarConfig().queue_limit(16) == 10


def test_greedy_examples():
    p = permutation_matrix([3, 1, 0, 2])
    assert greedy_synth(p).gate_count() == 0
    res = greedy_synth(E, GreedyConfig("vector"))
    assert res.gate_count() == 1 and replay(res.circuit, res.terminal) == E


@pytest.mark.parametrize("h", ["vector", "hsum", "hprod"])
def test_greedy_all_gl3(h):
    for a in gl_elements(3):
        res = greedy_synth(a, GreedyConfig(h))
        assert res.terminal.is_permutation()
        assert replay(res.circuit, res.terminal) == a


def test_greedy_all_sp4():
    for m in sp4_elements():
        a = SpMatrix.wrap(bm(m))
        res = greedy_synth(a, GreedyConfig("vector"), "sp")
        assert is_terminal_sp(res.terminal)
        assert replay(res.circuit, res.terminal) == a


def test_greedy_abandons_with_hsum_at_scale():
    with pytest.raises(Abandoned):
        greedy_synth(random_gl(48, [7, 48, 0]), GreedyConfig("hsum", max_wait=10))


def test_greedy_deterministic():
    a = random_gl(10, 3)
    assert greedy_synth(a).circuit.ops == greedy_synth(a).circuit.ops


def test_greedy_beats_gauss_mostly_n16():
    wins = 0
    for s in range(200):
        a = random_gl(16, [16, s])
        g = greedy_synth(a, GreedyConfig("vector"))
        assert replay(g.circuit, g.terminal) == a
        wins += g.gate_count() <= gaussian_synth(a).gate_count()
    assert wins >= 180


@pytest.mark.parametrize("kind", ["gl", "sp"])
@pytest.mark.parametrize("n", [3, 5, 8])
def test_depth_mode_reports_recomputed_depth(kind, n):
    for s in range(10):
        a = random_sp(n, s) if kind == "sp" else random_gl(n, s)
        for res in (greedy_synth(a, GreedyConfig("vector", min_depth=True), kind),
                    astar_synth(a, AstarConfig("hsum", min_depth=True), kind)):
            assert res.depth() == depth(res.circuit)
            assert replay(res.circuit, res.terminal) == a


def test_astar_examples():
    assert astar_synth(BitMatrix.identity(4)).gate_count() == 0
    dist = min_cnot_counts(3)
    worst = max(gl_elements(3), key=lambda a: dist[key_of(a)])
    res = astar_synth(worst, AstarConfig("hsum", r=1.0, max_q=0))
    assert res.gate_count() == 3  # Table 1 maximum CNOT count for n=3


@pytest.mark.parametrize("h", ["hsum", "hprod"])
def test_astar_optimal_gl3_exhaustive(h):
    dist = min_cnot_counts(3)
    r = 1.0 if h == "hsum" else 0.5
    for a in gl_elements(3):
        res = astar_synth(a, AstarConfig(h, r=r, max_q=0))
        assert replay(res.circuit, res.terminal) == a
        assert res.gate_count() == dist[key_of(a)]


def test_astar_optimal_gl4_sample():
    dist = min_cnot_counts(4)
    els = gl_elements(4)
    rng = random.Random(0)
    for a in rng.sample(els, 300):
        res = astar_synth(a, AstarConfig("hsum", r=1.0, max_q=0))
        assert res.gate_count() == dist[key_of(a)]


def test_astar_optimal_sp4_exhaustive():
    dist = min_tv_counts(2)
    for m in sp4_elements():
        a = SpMatrix.wrap(bm(m))
        res = astar_synth(a, AstarConfig("hsum", r=1.0, max_q=0), "sp")
        assert is_terminal_sp(res.terminal)
        assert replay(res.circuit, res.terminal) == a
        assert res.gate_count() == dist[key_of(a)]


@pytest.mark.parametrize("kind", ["gl", "sp"])
def test_astar_bounded_roundtrip(kind):
    for n in (5, 8):
        for s in range(5):
            a = random_sp(n, s) if kind == "sp" else random_gl(n, s)
            res = astar_synth(a, AstarConfig("hprod" if kind == "sp" else "hsum", r=3.0), kind)
            assert replay(res.circuit, res.terminal) == a
