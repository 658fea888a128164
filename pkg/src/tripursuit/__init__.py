"""Three pursuers, one evader: Voronoi-cell pursuit in the plane.

Decentralized and cooperative pursuit policies, the optimal reply of the
evader to decentralized pursuit, closed-form game lengths and bounds, and a
sampled simulator to check them against.
"""

from .bounds import (
    BoundsReport,
    bounds_report,
    decentralized_game_length,
    delta_ratio,
    game_length_rate,
    pshenichnyi_bound,
    survival_lower_bound,
)
from .engine import GameState, GameTrace, SimParams, capture_check, run_game
from .geometry import (
    AnchorPoints,
    PlayerSet,
    VoronoiCell,
    anchor_points,
    is_admissible,
    pursuers_from_cell,
    voronoi_cell,
)
from .strategies import (
    CHatStrategy,
    DStrategy,
    EStrategyEvader,
    FixedHeadingEvader,
    FlatIsoscelesFamily,
    GreedyVertexEvader,
    PerturbedEStrategyEvader,
    d_strategy_move,
    e_strategy_direction,
    e_strategy_plan,
)

__version__ = "0.1.0"

__all__ = [
    "AnchorPoints",
    "BoundsReport",
    "CHatStrategy",
    "DStrategy",
    "EStrategyEvader",
    "FixedHeadingEvader",
    "FlatIsoscelesFamily",
    "GameState",
    "GameTrace",
    "GreedyVertexEvader",
    "PerturbedEStrategyEvader",
    "PlayerSet",
    "SimParams",
    "VoronoiCell",
    "anchor_points",
    "bounds_report",
    "capture_check",
    "d_strategy_move",
    "decentralized_game_length",
    "delta_ratio",
    "e_strategy_direction",
    "e_strategy_plan",
    "game_length_rate",
    "is_admissible",
    "pshenichnyi_bound",
    "pursuers_from_cell",
    "run_game",
    "survival_lower_bound",
    "voronoi_cell",
]
