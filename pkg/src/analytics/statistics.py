"""Rank statistics with exact small-sample p-values.

spearman: exact permutation p for n < 10, t-approximation otherwise.
wilcoxon_signed_rank: zero differences dropped; exact sign-pattern
enumeration for n <= 12, normal approximation with tie and continuity
correction otherwise.
"""
import logging
import math
from dataclasses import dataclass
from itertools import permutations
from typing import Optional, Sequence

import numpy as np
from scipy.stats import norm, rankdata, t

from ir.errors import InsufficientDataError, StatisticsError

logger = logging.getLogger(__name__)

SPEARMAN_EXACT_BELOW = 10
WILCOXON_EXACT_UP_TO = 12
_EPS = 1e-12


@dataclass(frozen=True)
class StatResult:
    statistic: str
    value: Optional[float]
    p_value: float
    n: int
    method: str
    degenerate: bool = False


def _paired(x: Sequence[float], y: Sequence[float]):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise StatisticsError(f"paired samples of different shapes {x.shape} and {y.shape}")
    return x, y


def spearman(x: Sequence[float], y: Sequence[float]) -> StatResult:
    x, y = _paired(x, y)
    n = len(x)
    if n < 3:
        raise InsufficientDataError(f"Spearman needs at least 3 pairs, got {n}")

    rx = rankdata(x) - (n + 1) / 2
    ry = rankdata(y) - (n + 1) / 2
    sxx, syy = float(rx @ rx), float(ry @ ry)
    if sxx == 0 or syy == 0:
        logger.debug("Spearman undefined: a sample has zero variance")
        return StatResult("rho", None, 1.0, n, "undefined", degenerate=True)

    rho = max(-1.0, min(1.0, float(rx @ ry) / math.sqrt(sxx * syy)))
    if n < SPEARMAN_EXACT_BELOW:
        perms = np.array(list(permutations(ry)))
        null = perms @ rx / math.sqrt(sxx * syy)
        p_value = float(np.mean(np.abs(null) >= abs(rho) - _EPS))
        return StatResult("rho", rho, min(1.0, p_value), n, "exact-permutation")

    if abs(rho) >= 1.0:
        return StatResult("rho", rho, 0.0, n, "t-approximation")
    t_stat = rho * math.sqrt((n - 2) / (1 - rho * rho))
    p_value = float(2 * t.sf(abs(t_stat), n - 2))
    return StatResult("rho", rho, min(1.0, p_value), n, "t-approximation")


def wilcoxon_signed_rank(x: Sequence[float], y: Sequence[float], method: str = "auto") -> StatResult:
    """Two-sided signed-rank test; W is the smaller of the positive and negative rank sums"""
    if method not in ("auto", "exact", "normal"):
        raise StatisticsError(f"unknown method {method!r}")
    x, y = _paired(x, y)
    d = x - y
    d = d[d != 0]
    n = len(d)
    if n == 0:
        return StatResult("W", 0.0, 1.0, 0, "degenerate", degenerate=True)

    ranks = rankdata(np.abs(d))
    w_plus = float(ranks[d > 0].sum())
    w_minus = float(ranks[d < 0].sum())
    w = min(w_plus, w_minus)

    if method == "exact" or (method == "auto" and n <= WILCOXON_EXACT_UP_TO):
        return StatResult("W", w, _exact_p(ranks, w_plus), n, "exact")
    return StatResult("W", w, _normal_p(ranks, w_plus), n, "normal-approximation")


def _exact_p(ranks: np.ndarray, w_plus: float) -> float:
    """Share of the 2^n sign patterns at least as far from the null mean as w_plus"""
    n = len(ranks)
    if n > 20:
        raise StatisticsError(f"exact enumeration over 2^{n} sign patterns is not supported")
    patterns = (np.arange(2 ** n)[:, None] >> np.arange(n)) & 1
    sums = patterns @ ranks
    center = ranks.sum() / 2
    return float(min(1.0, np.mean(np.abs(sums - center) >= abs(w_plus - center) - _EPS)))


def _normal_p(ranks: np.ndarray, w_plus: float) -> float:
    n = len(ranks)
    mean = n * (n + 1) / 4
    _, tie_counts = np.unique(ranks, return_counts=True)
    variance = n * (n + 1) * (2 * n + 1) / 24 - float(np.sum(tie_counts ** 3 - tie_counts)) / 48
    if variance <= 0:
        return 1.0
    z = max(0.0, abs(w_plus - mean) - 0.5) / math.sqrt(variance)
    return float(min(1.0, 2 * norm.sf(z)))
