"""Heegner points on y^2 = x^3 + D from CM values of a modular parametrization
of X(6), with exact arithmetic in Z[w] and in pure cubic fields."""

from .config import RunConfig
from .heegner import HeegnerJob, RationalPointCertificate, finalize

__all__ = ["RunConfig", "HeegnerJob", "RationalPointCertificate", "finalize"]
__version__ = "0.1.0"
