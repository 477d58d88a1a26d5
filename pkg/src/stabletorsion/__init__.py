"""Spectral bounds for the torsion function of symmetric stable processes,
realized as subordinate Brownian motion and checked by Monte Carlo."""

__version__ = "0.1.0"

from .analytic import (BoundSet, RenewalFunction, StableParams, SubordinatorSpec,  # noqa: E402
                       ball_torsion_sup, chen_song_window, lambda_ball_brownian,
                       renewal_stable, theorem1_bounds, theorem2_bounds, vogt_bound)
from .geometry import Ball, Box, ConvexDomain, Halfspace, Interval, Polytope, Slab, localize  # noqa: E402
from .stochastic import RngStream, resurrection_run  # noqa: E402

__all__ = [
    "BoundSet", "RenewalFunction", "StableParams", "SubordinatorSpec", "ball_torsion_sup",
    "chen_song_window", "lambda_ball_brownian", "renewal_stable", "theorem1_bounds",
    "theorem2_bounds", "vogt_bound", "Ball", "Box", "ConvexDomain", "Halfspace", "Interval",
    "Polytope", "Slab", "localize", "RngStream", "resurrection_run",
]
