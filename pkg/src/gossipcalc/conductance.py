"""Conductance of a doubly stochastic contact matrix, plus spectral tools.

Conductance is the minimum, over node subsets S with 0 < |S| <= n/2, of the
probability mass crossing the cut divided by |S|. For doubly stochastic
matrices it never exceeds 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError, NumericalError, SizeLimitError
from .graphs import TransitionMatrix

# 2**20 subsets per vectorized chunk keeps the bitmask matrix around 200 MB
# at the n=20 enumeration cap.
_CHUNK = 1 << 20

MAX_EXACT_N = 20

_POWER_TOL = 1e-9
_POWER_MAX_ITER = 1_000_000


@dataclass(frozen=True)
class ConductanceResult:
    value: float
    argmin_set: tuple[int, ...]
    method: str


def cut_ratio(matrix: TransitionMatrix, subset: tuple[int, ...]) -> float:
    """Cross-cut probability mass of `subset` divided by its size."""
    n = matrix.n
    members = sorted(set(subset))
    if len(members) != len(subset):
        raise InvalidParameterError("subset has repeated nodes")
    if not members:
        raise InvalidParameterError("subset must be nonempty")
    if members[0] < 0 or members[-1] >= n:
        raise InvalidParameterError("subset node out of range")
    if len(members) > n // 2:
        raise InvalidParameterError("subset larger than n/2")
    inside = np.zeros(n, dtype=bool)
    inside[members] = True
    cut = float(matrix.entries[np.ix_(inside, ~inside)].sum())
    return cut / len(members)


def conductance_exact(matrix: TransitionMatrix, max_n: int = MAX_EXACT_N) -> ConductanceResult:
    """Exact conductance by enumerating every subset up to size n/2.

    Ties break toward the subset whose bitmask is numerically smallest.
    Cost is Theta(2^n * n), hence the size cap.
    """
    n = matrix.n
    if n < 2:
        raise InvalidParameterError("conductance needs n >= 2")
    if n > max_n:
        raise SizeLimitError(f"exact enumeration capped at n={max_n}, got {n}")
    p = matrix.entries
    row_sums = p.sum(axis=1)
    half = n // 2
    best_ratio = math.inf
    best_mask = 0
    bit_weights = 1 << np.arange(n, dtype=np.int64)
    for start in range(1, 1 << n, _CHUNK):
        stop = min(start + _CHUNK, 1 << n)
        masks = np.arange(start, stop, dtype=np.int64)
        bits = (masks[:, None] & bit_weights[None, :]) != 0
        sizes = bits.sum(axis=1)
        keep = sizes <= half
        if not np.any(keep):
            continue
        masks, bits, sizes = masks[keep], bits[keep], sizes[keep]
        bits_f = bits.astype(np.float64)
        # Mass staying inside S, then mass leaving S across the cut.
        internal = np.einsum("ij,ij->i", bits_f @ p, bits_f)
        cut = bits_f @ row_sums - internal
        ratios = cut / sizes
        idx = int(np.argmin(ratios))
        if ratios[idx] < best_ratio - 1e-15 or (
            abs(ratios[idx] - best_ratio) <= 1e-15 and masks[idx] < best_mask
        ):
            best_ratio = float(ratios[idx])
            best_mask = int(masks[idx])
    argmin = tuple(i for i in range(n) if best_mask >> i & 1)
    # Recompute through the scalar path so the reported value and set agree
    # exactly, untouched by vectorized summation order.
    return ConductanceResult(cut_ratio(matrix, argmin), argmin, "exact")


def conductance_complete_closed_form(n: int) -> float:
    """Conductance of the uniform off-diagonal matrix on the complete graph."""
    if n < 2:
        raise InvalidParameterError("complete graph needs n >= 2")
    return math.ceil(n / 2) / (n - 1)


def conductance_ring_closed_form(n: int) -> float:
    """Conductance of the max-degree matrix on a ring: 1/floor(n/2).

    Any contiguous arc S is cut by exactly two edges of weight 1/2 each,
    giving ratio 1/|S|; non-arcs only add cut edges, so the largest
    admissible arc wins.
    """
    if n < 3:
        raise InvalidParameterError("ring needs n >= 3")
    return 1.0 / (n // 2)


def grid_conductance_lower_bound(d: int, c: int) -> float:
    """Floor 1/(2*d*c) for the max-degree matrix on the {1..c}^d grid."""
    if d < 1 or c < 2:
        raise InvalidParameterError("grid bound needs d >= 1 and c >= 2")
    return 1.0 / (2.0 * d * c)


def spectral_gap(matrix: TransitionMatrix, tol: float = _POWER_TOL, max_iter: int = _POWER_MAX_ITER) -> float:
    """1 minus the second-largest eigenvalue of a symmetric stochastic matrix.

    Power iteration on the operator x -> (x + Px)/2 - mean(x): the half-shift
    maps the spectrum through (1+lam)/2, which is nonnegative and order
    preserving, so the dominant eigenvalue of the deflated operator always
    recovers lam_2 rather than a large-magnitude negative eigenvalue.
    """
    p = matrix.entries
    n = matrix.n
    if not np.allclose(p, p.T, atol=1e-12):
        raise InvalidParameterError("spectral gap requires a symmetric matrix")
    if n == 1:
        return 1.0
    rng = np.random.default_rng(0)
    x = rng.standard_normal(n)
    x -= x.mean()
    norm = np.linalg.norm(x)
    if norm == 0.0:
        raise NumericalError("degenerate start vector")
    x /= norm
    mu_prev = math.inf
    for _ in range(max_iter):
        y = 0.5 * (x + p @ x)
        y -= y.mean()
        norm = np.linalg.norm(y)
        if norm < 1e-300:
            # Deflated operator annihilated the vector: all non-principal
            # eigenvalues of the half-shifted matrix are ~0, i.e. lam_2 = -1.
            return 1.0
        y /= norm
        mu = float(y @ (0.5 * (y + p @ y)))
        if abs(mu - mu_prev) <= tol:
            lam2 = 2.0 * mu - 1.0
            return 1.0 - max(lam2, 0.0)
        mu_prev = mu
        x = y
    raise NumericalError(f"power iteration did not converge in {max_iter} steps")


def cheeger_bracket(gap: float) -> tuple[float, float]:
    """Interval [gap/2, sqrt(2*gap)] that must contain the conductance."""
    if gap < 0:
        raise InvalidParameterError("gap must be nonnegative")
    return gap / 2.0, math.sqrt(2.0 * gap)
