"""Round-adaptive query algorithms: simulators, reductions and experiments."""
from .core import (ACCEPT, REJECT, ROUND_ADAPTIVE, TAIL_ADAPTIVE, Estimate, GraphOracle,
                   LinearOracle, PointOracle, RoundBudget, Strategy, Transcript, amplify,
                   derive_rng, estimate_acceptance, hoeffding_half_width, run)

__version__ = "0.1.0"

__all__ = [
    "ACCEPT", "REJECT", "ROUND_ADAPTIVE", "TAIL_ADAPTIVE", "Estimate", "GraphOracle",
    "LinearOracle", "PointOracle", "RoundBudget", "Strategy", "Transcript", "amplify",
    "derive_rng", "estimate_acceptance", "hoeffding_half_width", "run",
]
