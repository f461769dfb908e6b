"""Statistical kernels: tie-aware ranking, Pearson/Spearman, two-sample KS.

These are the only statistics the rest of the package uses, kept
self-contained so every consumer shares one tie-handling and p-value
convention. Missing values (None or NaN) are dropped pairwise before
correlating; real-world indicator tables are sparse, so listwise
deletion would throw away most countries.
"""

from __future__ import annotations

import itertools
import math
from typing import Iterable, NamedTuple

import numpy as np
from scipy.special import kolmogorov, stdtr

from .errors import InsufficientDataError, UndefinedStatisticError

# exhaustive permutation p-values are exact below this sample size,
# the t approximation takes over from here up
_PERMUTATION_MAX_N = 10


class CorrelationResult(NamedTuple):
    rho: float
    p_value: float
    n: int


class KsResult(NamedTuple):
    statistic: float
    p_value: float
    n1: int
    n2: int


def _as_float_array(values: Iterable) -> np.ndarray:
    arr = np.array(
        [math.nan if v is None else float(v) for v in values], dtype=float
    )
    return arr


def _paired_clean(x: Iterable, y: Iterable) -> tuple[np.ndarray, np.ndarray]:
    xa = _as_float_array(x)
    ya = _as_float_array(y)
    if xa.size != ya.size:
        raise InsufficientDataError(
            f"paired vectors differ in length ({xa.size} vs {ya.size})"
        )
    keep = np.isfinite(xa) & np.isfinite(ya)
    return xa[keep], ya[keep]


def rank_with_ties(values: Iterable) -> np.ndarray:
    """Fractional 1-based ranks; tied values share the mean of their positions."""
    arr = _as_float_array(values)
    n = arr.size
    if n == 0:
        raise InsufficientDataError("cannot rank an empty vector")
    order = np.argsort(arr, kind="mergesort")
    sorted_vals = arr[order]
    boundary = np.empty(n, dtype=bool)
    boundary[0] = True
    boundary[1:] = sorted_vals[1:] != sorted_vals[:-1]
    run_id = np.cumsum(boundary) - 1
    first = np.flatnonzero(boundary)
    counts = np.diff(np.append(first, n))
    mean_rank = first + (counts + 1) / 2.0
    ranks = np.empty(n, dtype=float)
    ranks[order] = mean_rank[run_id]
    return ranks


def _pearson_rho(x: np.ndarray, y: np.ndarray) -> float:
    xc = x - x.mean()
    yc = y - y.mean()
    sx = float(np.sqrt(np.dot(xc, xc)))
    sy = float(np.sqrt(np.dot(yc, yc)))
    if sx == 0.0 or sy == 0.0:
        raise UndefinedStatisticError("correlation undefined: zero variance input")
    rho = float(np.dot(xc, yc) / (sx * sy))
    return max(-1.0, min(1.0, rho))


def _t_p_value(rho: float, n: int) -> float:
    if abs(rho) >= 1.0:
        return 0.0
    t = rho * math.sqrt((n - 2) / (1.0 - rho * rho))
    p = 2.0 * float(stdtr(n - 2, -abs(t)))
    return max(0.0, min(1.0, p))


def _permutation_p(rx: np.ndarray, ry: np.ndarray, rho: float) -> float:
    n = rx.size
    rxc = rx - rx.mean()
    ryc = ry - ry.mean()
    denom = float(np.sqrt(np.dot(rxc, rxc)) * np.sqrt(np.dot(ryc, ryc)))
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.intp)
    rhos = ryc[perms] @ rxc / denom
    hits = int(np.count_nonzero(np.abs(rhos) >= abs(rho) - 1e-12))
    return hits / len(perms)


def pearson(x: Iterable, y: Iterable) -> CorrelationResult:
    """Product-moment correlation with a two-sided t p-value."""
    xa, ya = _paired_clean(x, y)
    n = int(xa.size)
    if n < 3:
        raise InsufficientDataError(
            f"need at least 3 complete pairs for correlation, have {n}"
        )
    rho = _pearson_rho(xa, ya)
    return CorrelationResult(rho, _t_p_value(rho, n), n)


def spearman(x: Iterable, y: Iterable) -> CorrelationResult:
    """Rank correlation: Pearson over tie-averaged ranks.

    The p-value is exact (full permutation enumeration) for n < 10 and
    a two-sided t approximation t = rho*sqrt((n-2)/(1-rho^2)) above.
    """
    xa, ya = _paired_clean(x, y)
    n = int(xa.size)
    if n < 3:
        raise InsufficientDataError(
            f"need at least 3 complete pairs for correlation, have {n}"
        )
    rx = rank_with_ties(xa)
    ry = rank_with_ties(ya)
    rho = _pearson_rho(rx, ry)
    if n < _PERMUTATION_MAX_N:
        p = _permutation_p(rx, ry, rho)
    else:
        p = _t_p_value(rho, n)
    return CorrelationResult(rho, p, n)


def ks_two_sample(a: Iterable, b: Iterable) -> KsResult:
    """Two-sample Kolmogorov-Smirnov test.

    D is the exact sup of |ECDF_a - ECDF_b| over the merged sample
    points; the p-value uses the asymptotic Kolmogorov distribution at
    effective size n1*n2/(n1+n2).
    """
    aa = _as_float_array(a)
    bb = _as_float_array(b)
    aa = aa[np.isfinite(aa)]
    bb = bb[np.isfinite(bb)]
    n1, n2 = int(aa.size), int(bb.size)
    if n1 == 0 or n2 == 0:
        raise InsufficientDataError("KS test needs two non-empty samples")
    aa.sort()
    bb.sort()
    merged = np.concatenate([aa, bb])
    count_a = np.searchsorted(aa, merged, side="right").astype(np.int64)
    count_b = np.searchsorted(bb, merged, side="right").astype(np.int64)
    # integer numerator keeps D exact (e.g. the 1/3 case is one division)
    numerator = int(np.max(np.abs(count_a * n2 - count_b * n1)))
    d = numerator / (n1 * n2)
    effective = math.sqrt(n1 * n2 / (n1 + n2))
    p = float(kolmogorov(effective * d))
    return KsResult(d, max(0.0, min(1.0, p)), n1, n2)
