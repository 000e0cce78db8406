"""CNOT and Clifford circuit synthesis over GF(2) parity and symplectic matrices."""

from __future__ import annotations

from .baseline import SynthResult, gaussian_synth, volanto_synth
from .circuit import CNOT, QPERM, SQC, SWAP, TV, Circuit, Gate, replay
from .gf2 import BitMatrix, NotInvertible, inverse, random_gl
from .search import Abandoned, AstarConfig, GreedyConfig, astar_synth, greedy_synth
from .symplectic import NotSymplectic, SpMatrix, random_sp

__version__ = "0.1.0"

__all__ = [
    "BitMatrix", "SpMatrix", "NotInvertible", "NotSymplectic", "inverse", "random_gl",
    "random_sp", "Gate", "Circuit", "CNOT", "TV", "SQC", "SWAP", "QPERM", "replay",
    "SynthResult", "gaussian_synth", "volanto_synth", "GreedyConfig", "AstarConfig",
    "Abandoned", "greedy_synth", "astar_synth",
]
