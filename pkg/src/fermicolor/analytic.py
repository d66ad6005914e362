"""
Closed-form layer counts for the all-to-all model on star, complete and
bottleneck system graphs. Used as oracles for the greedy pipeline.
"""

from __future__ import annotations

import logging

from .system_graph import BadSizeError

logger = logging.getLogger(__name__)


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise BadSizeError(message)


def chi_weak_star(n: int) -> int:
    """Every hopping term passes through the hub: N(N-1) layers."""
    _require(n >= 3, f"Star formulas need N >= 3, got {n}")
    return n * (n - 1)


def chi_strong_star(n: int) -> int:
    """Strong layers on the star S_N under the hub enumeration that pairs edges per qubit."""
    _require(n >= 3, f"Star formulas need N >= 3, got {n}")
    if n % 2 == 1:
        return (n * n + 4 * n - 9) // 2
    if (n // 2) % 2 == 0:
        return n * n // 2 + 2 * n - 6
    return n * n // 2 + 2 * n - 4


def chi_weak_complete(n: int) -> int:
    """2N-1 for even N, 2N for odd N."""
    _require(n >= 3, f"Complete-graph formulas need N >= 3, got {n}")
    return 2 * n - 1 if n % 2 == 0 else 2 * n


def chi_strong_complete_bounds(n: int) -> tuple[int, int]:
    """(lower, upper) bounds on strong layers for the complete graph K_N.

    The lower bound is the clique N+2. The upper bound comes from splitting
    K_N into Hamiltonian cycles: 3N/2 for even N, (3N-1)/2 for odd N. At N=3
    the cycle construction gives less than the clique, so it is clipped.
    """
    _require(n >= 3, f"Complete-graph formulas need N >= 3, got {n}")
    lower = n + 2
    upper = 3 * n // 2 if n % 2 == 0 else (3 * n - 1) // 2
    if upper < lower:
        logger.warning(f"Strong complete-graph upper bound {upper} below clique bound {lower} at N={n}; clipping")
        upper = lower
    return lower, upper


def chi_bottleneck(n: int) -> tuple[int, int]:
    """(weak layers, strong upper bound) for the bottleneck graph with N = 4m modes."""
    _require(n >= 4 and n % 4 == 0, f"Bottleneck formulas need N = 4m, got {n}")
    half = n // 2
    return 2 * half * half + n - 1, 2 * n - 1
