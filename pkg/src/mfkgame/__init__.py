"""Most Frequent Keyword problem in the request-answer game with a buffer.

A quantum online player (boosted Grover-based string comparison inside an
AVL tree) against a classical exact-reading baseline, with simulated query
backends and an experiment harness.
"""

from .engine import GameConfig, ProtocolError, run_game
from .mfk import BitString, HardInstanceSpec, Instance, gen_hard, gen_random, offline_optimum
from .players import ClassicalPlayer, ConstantPlayer, OraclePlayer, PlayerConfig, QuantumPlayer
from .qsim import BackendConfig

__all__ = [
    "BackendConfig",
    "BitString",
    "ClassicalPlayer",
    "ConstantPlayer",
    "GameConfig",
    "HardInstanceSpec",
    "Instance",
    "OraclePlayer",
    "PlayerConfig",
    "ProtocolError",
    "QuantumPlayer",
    "gen_hard",
    "gen_random",
    "offline_optimum",
    "run_game",
]
