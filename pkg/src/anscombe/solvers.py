"""Proposal finders: exhaustive oracle, randomized rounds, conditional expectations.

All solver decisions use exact integer arithmetic.  Expectations over
completions of a partial policy are carried as an integer numerator over the
binomial count of completions, never as floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from anscombe import enumeration as enum
from anscombe.core import Policy, Profile, Tally, delta, tally
from anscombe.errors import ContractError, DimensionError, DomainError

__all__ = [
    "PartialPolicy",
    "CompletionCounts",
    "ScaledExpectation",
    "SolveReport",
    "BruteForceResult",
    "Rng",
    "brute_force",
    "brute_solve",
    "count_refinements",
    "scaled_expectation",
    "choose_k",
    "derandomized_solve",
    "randomized_solve",
    "sample_k_subset",
    "default_max_rounds",
]

REQUIREMENTS = ("nonlosing", "winning", "unanimous")


@dataclass(frozen=True)
class PartialPolicy:
    """A policy with some issues undecided.

    ``decided`` is the bitmask of decided issues; ``values`` holds their bits
    and is always a subset of ``decided``.
    """

    t: int
    decided: int = 0
    values: int = 0

    def __post_init__(self):
        if self.values & ~self.decided:
            raise DomainError("values set outside the decided issues")
        if self.decided >> self.t:
            raise DomainError("decided issues outside [0, t)")

    @classmethod
    def empty(cls, t: int) -> PartialPolicy:
        return cls(t)

    @classmethod
    def from_string(cls, text: str) -> PartialPolicy:
        """Parse ``"1?0"`` style strings; ``?`` marks an undecided issue."""
        decided = values = 0
        for j, ch in enumerate(text):
            if ch == "?":
                continue
            if ch not in "01":
                raise DomainError(f"unexpected character {ch!r}")
            decided |= 1 << j
            if ch == "1":
                values |= 1 << j
        return cls(len(text), decided, values)

    @classmethod
    def from_policy(cls, p: Policy) -> PartialPolicy:
        return cls(p.t, (1 << p.t) - 1, p.bits)

    @property
    def ones(self) -> int:
        return self.values.bit_count()

    @property
    def domain_size(self) -> int:
        return self.decided.bit_count()

    @property
    def free(self) -> int:
        return self.t - self.domain_size

    def is_complete(self) -> bool:
        return self.domain_size == self.t

    def refine(self, i: int, bit: int) -> PartialPolicy:
        if self.decided >> i & 1:
            raise DomainError(f"issue {i} is already decided")
        return PartialPolicy(self.t, self.decided | 1 << i, self.values | (bit & 1) << i)

    def feasible(self, k: int) -> bool:
        return self.ones <= k <= self.ones + self.free

    def to_policy(self) -> Policy:
        if not self.is_complete():
            raise DomainError("partial policy still has undecided issues")
        return Policy(self.values, self.t)

    def __str__(self):
        return "".join(
            ("1" if self.values >> j & 1 else "0") if self.decided >> j & 1 else "?" for j in range(self.t)
        )


@dataclass(frozen=True)
class CompletionCounts:
    approving: int
    disapproving: int


@dataclass(frozen=True)
class ScaledExpectation:
    """``numerator / denominator`` is the expected balance over completions."""

    numerator: int
    denominator: int

    def as_fraction(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    def sign(self) -> int:
        return (self.numerator > 0) - (self.numerator < 0)


@dataclass(frozen=True)
class SolveReport:
    """Outcome of a solver run.

    ``agreements`` counts issues where the policy matches issue-wise
    majority; it equals the number of ones only for normalized profiles.
    """

    policy: Policy
    tally: Tally
    method: str
    agreements: int
    k_star: Optional[int] = None
    rounds_used: Optional[int] = None
    seed: Optional[int] = None

    def to_dict(self) -> dict:
        return {
            "policy": str(self.policy),
            "agreements": self.agreements,
            "balance": self.tally.balance,
            "approvals": self.tally.approvals,
            "disapprovals": self.tally.disapprovals,
            "abstentions": self.tally.abstentions,
            "method": self.method,
            "seed": self.seed,
            "rounds_used": self.rounds_used,
            "k_star": self.k_star,
        }

    def check(self, profile: Profile) -> None:
        if tally(profile, self.policy) != self.tally:
            raise ContractError("stored tally does not match a fresh tally")


# ---------------------------------------------------------------- brute force


@dataclass(frozen=True)
class BruteForceResult:
    policy: Optional[Policy]
    max_agreements: Optional[int]

    @property
    def found(self) -> bool:
        return self.policy is not None


def _qualifying(profile: Profile, requirement: str, block: np.ndarray) -> np.ndarray:
    if requirement == "unanimous":
        return enum.unanimous_block(profile, block)
    b = enum.balance_block(profile, block)
    return block[b > 0] if requirement == "winning" else block[b >= 0]


def brute_force(
    profile: Profile,
    requirement: str = "nonlosing",
    min_agreements: int = 0,
    t_cap: int = enum.DEFAULT_T_CAP,
    threads: int = 1,
    exact: bool = False,
) -> BruteForceResult:
    """Enumerate all 2^t policies.

    Returns the smallest-encoding policy with at least ``min_agreements`` ones
    (exactly that many if ``exact``) that meets ``requirement``, or ``None``;
    and the largest number of ones over every policy meeting ``requirement``.
    """
    if requirement not in REQUIREMENTS:
        raise DomainError(f"requirement must be one of {REQUIREMENTS}")
    enum.check_cap(profile.t, t_cap)

    def scan(lo, hi):
        good = _qualifying(profile, requirement, enum.policy_block(lo, hi))
        if good.size == 0:
            return None, None
        weights = enum.popcount(good)
        hits = good[weights == min_agreements] if exact else good[weights >= min_agreements]
        witness = int(hits[0]) if hits.size else None
        return witness, int(weights.max())

    witness = best = None
    for w, m in enum.map_chunks(scan, profile.t, threads):
        if w is not None and (witness is None or w < witness):
            witness = w
        if m is not None and (best is None or m > best):
            best = m
    return BruteForceResult(None if witness is None else Policy(witness, profile.t), best)


def brute_solve(profile: Profile, t_cap: int = enum.DEFAULT_T_CAP, threads: int = 1) -> Optional[SolveReport]:
    """Non-losing policy with the most ones (smallest encoding among ties)."""
    res = brute_force(profile, "nonlosing", 0, t_cap, threads)
    if res.max_agreements is None:
        return None
    best = brute_force(profile, "nonlosing", res.max_agreements, t_cap, threads).policy
    return SolveReport(best, tally(profile, best), "brute", best.agreements)


# ------------------------------------------------------------ counting kernel


def _row_counts(v: int, t: int, p_star: PartialPolicy, k: int, printed: bool = False) -> tuple[int, int]:
    # m: matches on decided issues; alpha/beta: undecided issues where the
    # ballot has a 1/0.  Placing x ones on the alpha issues and y = r - x on
    # the beta issues gives m + x + (beta - y) matches in total.
    free_mask = ~p_star.decided & ((1 << t) - 1)
    m = p_star.domain_size - ((v ^ p_star.values) & p_star.decided).bit_count()
    alpha = (v & free_mask).bit_count()
    beta = p_star.free - alpha
    r = k - p_star.ones
    plus = minus = 0
    for x in range(max(0, r - beta), min(alpha, r) + 1):
        y = r - x
        matches = m + x + alpha + beta - y if printed else m + x + beta - y
        ways = math.comb(alpha, x) * math.comb(beta, y)
        if 2 * matches > t:
            plus += ways
        elif 2 * matches < t:
            minus += ways
    return plus, minus


def count_refinements(v: Policy, p_star: PartialPolicy, k: int, printed: bool = False) -> CompletionCounts:
    """Completions p of ``p_star`` with |p| = k that ballot ``v`` approves / opposes.

    ``printed=True`` evaluates the alternative approval condition
    ``m + x + alpha + beta - y > t/2``; it exists only so tests can show it
    disagrees with direct enumeration.
    """
    if v.t != p_star.t:
        raise DimensionError(f"ballot has {v.t} issues, partial policy has {p_star.t}")
    if not p_star.feasible(k):
        raise DomainError(f"no completion of {p_star} has exactly {k} ones")
    plus, minus = _row_counts(v.bits, v.t, p_star, k, printed)
    return CompletionCounts(plus, minus)


def scaled_expectation(profile: Profile, p_star: PartialPolicy, k: int) -> ScaledExpectation:
    """Expected balance over uniform completions of ``p_star`` with k ones, exactly."""
    if profile.t != p_star.t:
        raise DimensionError(f"profile has {profile.t} issues, partial policy has {p_star.t}")
    if not p_star.feasible(k):
        raise DomainError(f"no completion of {p_star} has exactly {k} ones")
    t = profile.t
    num = 0
    for row, mult in profile.row_counts():
        plus, minus = _row_counts(row, t, p_star, k)
        num += mult * (plus - minus)
    return ScaledExpectation(num, math.comb(p_star.free, k - p_star.ones))


def choose_k(profile: Profile) -> int:
    """The k > t/2 maximising the expected balance of a uniform |p| = k policy.

    Ties go to the larger k.
    """
    t = profile.t
    empty = PartialPolicy.empty(t)
    best_k, best = None, None
    for k in range(t // 2 + 1, t + 1):
        e = scaled_expectation(profile, empty, k).as_fraction()
        if best is None or e >= best:
            best_k, best = k, e
    return best_k


def derandomized_solve(profile: Profile) -> SolveReport:
    """Fix issues one at a time keeping the conditional expected balance >= 0.

    When the profile has more ones than zeros overall the invariant is kept
    strictly positive, so the result wins outright.
    """
    d = delta(profile)
    if d < 0:
        raise ContractError(f"profile has more zeros than ones (delta = {d}); normalize it first")
    strict = d > 0
    t = profile.t
    k = choose_k(profile)
    p = PartialPolicy.empty(t)

    def ok(s: ScaledExpectation) -> bool:
        return s.numerator > 0 if strict else s.numerator >= 0

    if not ok(scaled_expectation(profile, p, k)):
        raise ContractError(f"expected balance at k*={k} violates the invariant")
    for i in range(t):
        remaining = t - i - 1
        if p.ones + 1 > k:
            p = p.refine(i, 0)
        elif k - p.ones > remaining:
            p = p.refine(i, 1)
        else:
            one, zero = p.refine(i, 1), p.refine(i, 0)
            if ok(scaled_expectation(profile, one, k)):
                p = one
            elif ok(scaled_expectation(profile, zero, k)):
                p = zero
            else:
                raise ContractError(f"neither refinement of {p} keeps the invariant")
    policy = p.to_policy()
    result = tally(profile, policy)
    if not (result.balance > 0 if strict else result.balance >= 0):
        raise ContractError(f"derandomized output {policy} has balance {result.balance}")
    return SolveReport(policy, result, "derandomized", policy.agreements, k_star=k)


# ------------------------------------------------------------------ sampling


class Rng:
    """64-bit seeded stream: PCG64 (seeded through numpy's SeedSequence).

    Only raw 64-bit outputs are used; bounded integers come from rejection
    sampling, so the stream of decisions is fixed by the PCG64 algorithm
    alone and replays identically for equal seeds.
    """

    def __init__(self, seed: int):
        if not 0 <= seed < 1 << 64:
            raise DomainError("seed must be a 64-bit unsigned integer")
        self.seed = seed
        self._bg = np.random.PCG64(seed)

    def next_u64(self) -> int:
        return int(self._bg.random_raw())

    def below(self, bound: int) -> int:
        """Uniform integer in [0, bound)."""
        if bound <= 0:
            raise DomainError("bound must be positive")
        limit = (1 << 64) - (1 << 64) % bound
        while True:
            u = self.next_u64()
            if u < limit:
                return u % bound


def sample_k_subset(t: int, k: int, rng: Rng) -> Policy:
    """Uniform policy among the C(t, k) with exactly k ones (partial Fisher-Yates)."""
    if not 0 <= k <= t:
        raise DomainError(f"k must lie in [0, {t}], got {k}")
    idx = list(range(t))
    bits = 0
    for i in range(k):
        j = i + rng.below(t - i)
        idx[i], idx[j] = idx[j], idx[i]
        bits |= 1 << idx[i]
    return Policy(bits, t)


def default_max_rounds(profile: Profile) -> int:
    """64 * ceil(n * t^(3/2) / max(delta, 1)), computed over the integers."""
    n, t = profile.n, profile.t
    d = max(delta(profile), 1)
    q = n * n * t**3
    s = math.isqrt(q)
    if s * s < q:
        s += 1
    return 64 * -(-s // d)


def randomized_solve(profile: Profile, seed: int, max_rounds: Optional[int] = None) -> Optional[SolveReport]:
    """Rounds of one uniform sample per k in (t/2, t]; first winning sample returns.

    Expected rounds are polynomial when t is odd and the profile has more
    ones than zeros; otherwise the call may exhaust ``max_rounds`` and return
    ``None``.
    """
    if max_rounds is None:
        max_rounds = default_max_rounds(profile)
    if max_rounds < 1:
        raise DomainError("max_rounds must be at least 1")
    rng = Rng(seed)
    t = profile.t
    for rnd in range(1, max_rounds + 1):
        for k in range(t // 2 + 1, t + 1):
            p = sample_k_subset(t, k, rng)
            result = tally(profile, p)
            if result.balance > 0:
                return SolveReport(p, result, "randomized", k, rounds_used=rnd, seed=seed)
    return None

