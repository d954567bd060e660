"""Minimax-converse bounds for channel codes at fixed rate.

Computes the saddle point of the convex-concave surrogate

    gamma(Q_X, z) = sum_{x,y} Q_X(x) min(W(y|x), z_y) - e^{-R} sum_y z_y

whose value is a lower bound on the error probability of any code with
e^R codewords, together with optimal-test machinery for binary hypothesis
testing and a polynomial-time type-class reduction for memoryless channels.
"""

from .channel import (
    Channel,
    DimensionMismatch,
    NegativeEntry,
    NonStochasticRow,
    ProbVector,
    RatePoint,
    TolerancePolicy,
    TooLarge,
    ZVector,
    make_channel,
    make_prob,
    make_z,
    product_channel,
    uniform_prob,
)

__all__ = [
    "Channel",
    "DimensionMismatch",
    "NegativeEntry",
    "NonStochasticRow",
    "ProbVector",
    "RatePoint",
    "TolerancePolicy",
    "TooLarge",
    "ZVector",
    "make_channel",
    "make_prob",
    "make_z",
    "product_channel",
    "uniform_prob",
]

__version__ = "0.1.0"
