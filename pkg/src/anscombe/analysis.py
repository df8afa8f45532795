"""Exact checks of the probabilistic identities and solution-space geometry.

Every probability and expectation here is an exact :class:`fractions.Fraction`.
"""

from __future__ import annotations

import enum as _enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from anscombe import enumeration as enum
from anscombe.core import Policy, Profile, bits_to_string, delta, voter_balance
from anscombe.errors import DomainError

__all__ = [
    "ProposalClass",
    "ComponentReport",
    "ParityReport",
    "UnionFind",
    "classify",
    "apply_f0",
    "apply_f1",
    "apply_fv",
    "b_m_size",
    "expectation_X_closed",
    "expectation_XY_bruteforce",
    "exact_success_probability",
    "best_success_probability",
    "markov_bound_holds",
    "nonlosing_components",
    "cohesion_check",
    "parity_classification",
    "rational_json",
]

DEFAULT_XY_CAP = 20

# 80 decimals of pi; enough to order pi against any rational with a
# denominator below 10**39.
_PI_DIGITS = "31415926535897932384626433832795028841971693993751058209749445923078164062862089"
_PI_LOW = Fraction(int(_PI_DIGITS), 10 ** (len(_PI_DIGITS) - 1))
_PI_HIGH = _PI_LOW + Fraction(1, 10 ** (len(_PI_DIGITS) - 1))


def rational_json(value: Fraction) -> dict:
    value = Fraction(value)
    return {"num": str(value.numerator), "den": str(value.denominator)}


class ProposalClass(str, _enum.Enum):
    T00 = "T00"
    T01 = "T01"
    T10 = "T10"
    T11 = "T11"
    DEGENERATE = "degenerate"


def classify(v: Policy, p: Policy) -> ProposalClass:
    """Tag from the signs of (b_p, b_{v,p}); degenerate when either is zero."""
    own, against = p.self_balance, voter_balance(v, p)
    if own == 0 or against == 0:
        return ProposalClass.DEGENERATE
    return ProposalClass(f"T{int(own > 0)}{int(against > 0)}")


def _require_proper(v: Policy, p: Policy) -> None:
    if classify(v, p) is ProposalClass.DEGENERATE:
        raise DomainError(f"{p} is degenerate for ballot {v} (a balance is zero)")


def apply_f0(v: Policy, p: Policy) -> Policy:
    """Complement p on the issues where v is 0; swaps b_p and b_{v,p}."""
    _require_proper(v, p)
    return Policy(p.bits ^ (~v.bits & ((1 << v.t) - 1)), p.t)


def apply_f1(v: Policy, p: Policy) -> Policy:
    """Complement p on the issues where v is 1; swaps and negates b_p and b_{v,p}."""
    _require_proper(v, p)
    return Policy(p.bits ^ v.bits, p.t)


def apply_fv(v: Policy, p: Policy) -> Policy:
    """Class-preserving involution: f0 on T00/T11, f1 on T01/T10."""
    cls = classify(v, p)
    if cls in (ProposalClass.T00, ProposalClass.T11):
        return apply_f0(v, p)
    return apply_f1(v, p)


def b_m_size(t: int) -> int:
    """Number of policies with strictly more than t/2 ones."""
    if t % 2:
        return 1 << (t - 1)
    return (1 << (t - 1)) - math.comb(t, t // 2) // 2


def expectation_X_closed(profile: Profile) -> Fraction:
    t = profile.t
    return Fraction(delta(profile) * math.comb(t - 1, t // 2), b_m_size(t))


def expectation_XY_bruteforce(profile: Profile, t_cap: int = DEFAULT_XY_CAP) -> tuple[Fraction, Fraction]:
    """Average over uniform p with |p| > t/2 of sum_i b_{v_i,p}, and of b_p * b_{p,P}."""
    enum.check_cap(profile.t, t_cap)
    t = profile.t
    x_total = y_total = 0
    for lo, hi in enum.chunks(t):
        block = enum.policy_block(lo, hi)
        own = 2 * enum.popcount(block) - t
        block, own = block[own > 0], own[own > 0]
        if block.size == 0:
            continue
        balance = np.zeros(block.shape, dtype=np.int64)
        for row, mult in profile.row_counts():
            b = enum.voter_balances(row, t, block)
            x_total += mult * int(b.sum())
            balance += mult * np.sign(b)
        y_total += int((own * balance).sum())
    size = b_m_size(t)
    return Fraction(x_total, size), Fraction(y_total, size)


def exact_success_probability(profile: Profile, k: int, t_cap: int = enum.DEFAULT_T_CAP) -> Fraction:
    """Fraction of the C(t, k) policies with k ones that win outright."""
    t = profile.t
    if not t // 2 < k <= t:
        raise DomainError(f"k must satisfy t/2 < k <= t, got k={k}, t={t}")
    enum.check_cap(t, t_cap)
    wins = 0
    for lo, hi in enum.chunks(t):
        block = enum.policy_block(lo, hi)
        block = block[enum.popcount(block) == k]
        if block.size:
            wins += int((enum.balance_block(profile, block) > 0).sum())
    return Fraction(wins, math.comb(t, k))


def best_success_probability(profile: Profile, t_cap: int = enum.DEFAULT_T_CAP) -> tuple[int, Fraction]:
    """(k, probability) maximising the per-k success probability; ties to larger k."""
    best = None
    for k in range(profile.t // 2 + 1, profile.t + 1):
        pr = exact_success_probability(profile, k, t_cap)
        if best is None or pr >= best[1]:
            best = (k, pr)
    return best


def markov_bound_holds(probability: Fraction, delta_value: int, n: int, t: int) -> bool:
    """Exact test of probability >= sqrt(2/pi) * delta / (n * t^(3/2)).

    Both sides are non-negative, so squaring gives
    probability^2 * n^2 * t^3 * pi >= 2 * delta^2, decided with rational
    bounds on pi.
    """
    probability = Fraction(probability)
    if delta_value <= 0:
        return probability >= 0
    if probability <= 0:
        return False
    needed = Fraction(2 * delta_value**2) / (probability**2 * n * n * t**3)
    # the inequality is pi >= needed; pi is irrational so equality cannot occur
    if needed <= _PI_LOW:
        return True
    if needed >= _PI_HIGH:
        return False
    raise ArithmeticError("pi digits too coarse to decide the bound")


def markov_bound_float(delta_value: int, n: int, t: int) -> float:
    """The bound as a float, for display only."""
    return math.sqrt(2 / math.pi) * delta_value / (n * t**1.5)


class UnionFind:
    def __init__(self):
        self.parent: dict[int, int] = {}
        self.size: dict[int, int] = {}

    def add(self, x: int) -> None:
        if x not in self.parent:
            self.parent[x] = x
            self.size[x] = 1

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]

    def groups(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for x in self.parent:
            out.setdefault(self.find(x), []).append(x)
        return out


@dataclass(frozen=True)
class ComponentReport:
    nonlosing_count: int
    component_count: int
    largest_component: int
    all_isolated: bool
    representatives: tuple[int, ...] = ()

    def to_dict(self, t: int) -> dict:
        return {
            "nonlosing_count": self.nonlosing_count,
            "component_count": self.component_count,
            "largest_component": self.largest_component,
            "all_isolated": self.all_isolated,
            "representatives": [bits_to_string(r, t) for r in self.representatives],
        }


def nonlosing_components(profile: Profile, t_cap: int = enum.DEFAULT_T_CAP) -> ComponentReport:
    """Connected components of the non-losing policies inside the hypercube.

    Each component is represented by its smallest-encoding policy.
    """
    t = profile.t
    enum.check_cap(t, t_cap)
    alive = []
    for lo, hi in enum.chunks(t):
        block = enum.policy_block(lo, hi)
        alive.append(block[enum.balance_block(profile, block) >= 0])
    nodes = np.concatenate(alive)
    member = np.zeros(1 << t, dtype=bool)
    member[nodes] = True

    uf = UnionFind()
    for p in nodes.tolist():
        uf.add(p)
    for j in range(t):
        bit = np.uint32(1 << j)
        lower = nodes[(nodes & bit) == 0]
        partners = lower | bit
        linked = member[partners]
        for a, b in zip(lower[linked].tolist(), partners[linked].tolist()):
            uf.union(a, b)

    groups = uf.groups()
    sizes = [len(g) for g in groups.values()]
    reps = tuple(sorted(min(g) for g in groups.values()))
    return ComponentReport(
        nonlosing_count=int(nodes.size),
        component_count=len(groups),
        largest_component=max(sizes, default=0),
        all_isolated=all(s == 1 for s in sizes),
        representatives=reps,
    )


class Cohesion(NamedTuple):
    h: int
    iwm_safe: bool


def cohesion_check(profile: Profile) -> Cohesion:
    """Largest pairwise ballot distance h, and whether h < (sqrt(2) - 1) t.

    The flag is advisory: the underlying guarantee only holds for large t.
    """
    t = profile.t
    distinct = [r for r, _ in profile.row_counts()]
    h = 0
    for i, a in enumerate(distinct):
        for b in distinct[i + 1 :]:
            h = max(h, (a ^ b).bit_count())
    return Cohesion(h, (h + t) ** 2 < 2 * t * t)


@dataclass(frozen=True)
class ParityReport:
    # counts[(parity, verdict)] with parity in {"odd", "even"} and verdict in
    # {"winning", "tying", "losing"}
    counts: dict
    wins_iff_odd: bool

    def to_dict(self) -> dict:
        return {
            "counts": {par: {v: self.counts[(par, v)] for v in ("winning", "tying", "losing")} for par in ("odd", "even")},
            "wins_iff_odd": self.wins_iff_odd,
        }


def parity_classification(profile: Profile, t_cap: int = enum.DEFAULT_T_CAP) -> ParityReport:
    """Verdict counts split by the parity of |p|."""
    t = profile.t
    enum.check_cap(t, t_cap)
    counts = {(par, v): 0 for par in ("odd", "even") for v in ("winning", "tying", "losing")}
    for lo, hi in enum.chunks(t):
        block = enum.policy_block(lo, hi)
        odd = (enum.popcount(block) % 2).astype(bool)
        b = enum.balance_block(profile, block)
        for par, sel in (("odd", odd), ("even", ~odd)):
            counts[(par, "winning")] += int((b[sel] > 0).sum())
            counts[(par, "tying")] += int((b[sel] == 0).sum())
            counts[(par, "losing")] += int((b[sel] < 0).sum())
    wins_iff_odd = (
        counts[("odd", "tying")] == counts[("odd", "losing")] == 0
        and counts[("even", "winning")] == 0
    )
    return ParityReport(counts, wins_iff_odd)
