"""Vectorised exhaustive enumeration over the hypercube of policies.

Policies are processed in contiguous index ranges (chunks) of
``[0, 2**t)``.  Callers reduce per-chunk results in an order-independent way,
so splitting the range over a thread pool never changes an answer.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterator, TypeVar

import numpy as np

from anscombe.core import Profile
from anscombe.errors import ResourceError

DEFAULT_T_CAP = 24
CHUNK = 1 << 16

T = TypeVar("T")


def check_cap(t: int, cap: int) -> None:
    if t > cap:
        raise ResourceError(f"exhaustive enumeration over 2^{t} policies exceeds cap t <= {cap}")


def chunks(t: int, size: int = CHUNK) -> Iterator[tuple[int, int]]:
    total = 1 << t
    for lo in range(0, total, size):
        yield lo, min(total, lo + size)


def policy_block(lo: int, hi: int) -> np.ndarray:
    return np.arange(lo, hi, dtype=np.uint32)


def popcount(a: np.ndarray) -> np.ndarray:
    return np.bitwise_count(a).astype(np.int64)


def voter_balances(row: int, t: int, policies: np.ndarray) -> np.ndarray:
    """``t - 2 * hamming(row, p)`` for every policy in the block."""
    return t - 2 * popcount(policies ^ np.uint32(row))


def tally_block(profile: Profile, policies: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Approval and disapproval counts for each policy in ``policies``."""
    t = profile.t
    approvals = np.zeros(policies.shape, dtype=np.int64)
    disapprovals = np.zeros(policies.shape, dtype=np.int64)
    for row, mult in profile.row_counts():
        b = voter_balances(row, t, policies)
        approvals += mult * (b > 0)
        disapprovals += mult * (b < 0)
    return approvals, disapprovals


def balance_block(profile: Profile, policies: np.ndarray) -> np.ndarray:
    t = profile.t
    total = np.zeros(policies.shape, dtype=np.int64)
    for row, mult in profile.row_counts():
        total += mult * np.sign(voter_balances(row, t, policies))
    return total


def unanimous_block(profile: Profile, policies: np.ndarray) -> np.ndarray:
    """Subset of ``policies`` approved by every voter.

    Filters one distinct ballot at a time, so the working set shrinks fast on
    constrained instances.
    """
    t = profile.t
    alive = policies
    for row, _ in profile.row_counts():
        if alive.size == 0:
            break
        alive = alive[voter_balances(row, t, alive) > 0]
    return alive


def map_chunks(fn: Callable[[int, int], T], t: int, threads: int = 1, size: int = CHUNK) -> list[T]:
    """Apply ``fn(lo, hi)`` to every chunk; results come back in range order."""
    spans = list(chunks(t, size))
    if threads <= 1 or len(spans) == 1:
        return [fn(lo, hi) for lo, hi in spans]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda span: fn(*span), spans))


def weight_k_policies(t: int, k: int) -> np.ndarray:
    """All policies with exactly ``k`` ones, ascending."""
    allp = policy_block(0, 1 << t)
    return allp[popcount(allp) == k]
