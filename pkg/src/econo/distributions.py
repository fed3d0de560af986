"""Upper-tail probabilities through regularized incomplete beta / gamma functions."""
from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.special import betaincc, gammaincc, ndtr


@dataclass(frozen=True)
class StudentT:
    df: float

    def sf(self, x: float) -> float:
        # P(T > x) = (1 - I_{x^2/(df+x^2)}(1/2, df/2)) / 2 for x >= 0; the complement
        # keeps precision when x is small
        tail = 0.5 * betaincc(0.5, self.df / 2.0, x * x / (self.df + x * x))
        return float(tail if x >= 0 else 1.0 - tail)


@dataclass(frozen=True)
class FDist:
    df1: float
    df2: float

    def sf(self, x: float) -> float:
        if x <= 0:
            return 1.0
        z = self.df1 * x
        return float(betaincc(self.df1 / 2.0, self.df2 / 2.0, z / (self.df2 + z)))


@dataclass(frozen=True)
class ChiSquare:
    df: float

    def sf(self, x: float) -> float:
        if x <= 0:
            return 1.0
        return float(gammaincc(self.df / 2.0, x / 2.0))


@dataclass(frozen=True)
class Normal:
    def sf(self, x: float) -> float:
        return float(ndtr(-x))


def tail_prob(dist, stat: float, two_sided: bool = False) -> float:
    """Upper-tail probability of ``stat``; ``two_sided`` doubles the tail of |stat|.

    ``two_sided`` only makes sense for the symmetric t and normal laws.
    """
    for attr in ("df", "df1", "df2"):
        v = getattr(dist, attr, None)
        if v is not None and not v > 0:
            raise ValueError(f"degrees of freedom must be positive, got {attr}={v}")
    if not math.isfinite(stat):
        raise ValueError("statistic must be finite")
    if two_sided:
        if not isinstance(dist, (StudentT, Normal)):
            raise ValueError("two-sided probabilities need a symmetric distribution")
        return min(1.0, 2.0 * dist.sf(abs(stat)))
    return dist.sf(stat)
