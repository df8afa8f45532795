"""Named profile families and the two hardness reductions."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Optional

from anscombe.core import Profile, is_normalized
from anscombe.errors import ContractError, DomainError

__all__ = [
    "Graph",
    "ReductionOutput",
    "anscombe_gadget",
    "cyclic_profile",
    "lift_una_to_wot",
    "reduce_independent_set",
]


@dataclass(frozen=True)
class Graph:
    vertex_count: int
    edges: tuple[tuple[int, int], ...]

    def __init__(self, vertex_count: int, edges: Iterable[tuple[int, int]] = ()):
        if vertex_count < 0:
            raise DomainError("vertex_count must be non-negative")
        seen = set()
        norm = []
        for u, v in edges:
            if u == v:
                raise DomainError(f"self-loop at vertex {u}")
            if not (0 <= u < vertex_count and 0 <= v < vertex_count):
                raise DomainError(f"edge ({u}, {v}) has an endpoint outside [0, {vertex_count})")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise DomainError(f"duplicate edge ({u}, {v})")
            seen.add(key)
            norm.append((u, v))
        object.__setattr__(self, "vertex_count", vertex_count)
        object.__setattr__(self, "edges", tuple(norm))


def anscombe_gadget(t: int) -> Profile:
    """The (2t-1) x t profile: t singleton ballots, then t-1 all-ones ballots.

    Every policy with at least t//2 + 2 ones has balance exactly -1.
    """
    if t < 2:
        raise DomainError("the gadget needs t >= 2")
    full = (1 << t) - 1
    return Profile([1 << i for i in range(t)] + [full] * (t - 1), t)


def cyclic_profile(t: int) -> Profile:
    """t x t profile where voter i approves the cyclic interval i .. i + t//2."""
    if t < 3 or t % 2 == 0:
        raise DomainError("the cyclic construction needs an odd t >= 3")
    width = t // 2 + 1
    rows = []
    for i in range(t):
        r = 0
        for j in range(i, i + width):
            r |= 1 << (j % t)
        rows.append(r)
    return Profile(rows, t)


def lift_una_to_wot(profile: Profile, copies: Optional[int] = None) -> Profile:
    """Append ``copies`` (default n) copies of the t-issue gadget below ``profile``.

    For |p| >= t//2 + 2 each copy contributes exactly -1 to the balance, so
    with n copies p is unanimous in the input iff it does not lose in the
    output.  ``copies = n - 1`` gives the odd-voter variant.
    """
    if not is_normalized(profile):
        raise DomainError("lifting expects a normalized profile (all-ones issue-wise majority)")
    if copies is None:
        copies = profile.n
    if copies < 0:
        raise DomainError("copies must be non-negative")
    g = anscombe_gadget(profile.t)
    return profile.stack(*([g] * copies))


@dataclass(frozen=True)
class ReductionOutput:
    profile: Profile
    agreement_threshold: int
    column_roles: tuple[str, ...]
    ell: int
    k: int
    vertex_count: int
    set4_copies: int = 0
    set1_copies: int = 0

    def sidecar(self) -> dict:
        return {
            "columns": {str(j): role for j, role in enumerate(self.column_roles)},
            "ell": self.ell,
            "agreement_threshold": self.agreement_threshold,
            "k": self.k,
            "vertex_count": self.vertex_count,
            "voters": self.profile.n,
            "issues": self.profile.t,
        }

    def sidecar_json(self) -> str:
        return json.dumps(self.sidecar(), indent=2, sort_keys=True) + "\n"


class _Layout:
    """Column indices of the reduction's issues.

    x_i -> 2i, x_i' -> 2i + 1, a_0 -> 2n, a_j -> 2n + 2j - 1, a_j' -> 2n + 2j.
    """

    def __init__(self, n: int, ell: int):
        self.n, self.ell = n, ell
        self.t = 2 * n + 2 * ell + 1

    def x(self, i):
        return 2 * i

    def xp(self, i):
        return 2 * i + 1

    @property
    def a0(self):
        return 2 * self.n

    def a(self, j):
        return 2 * self.n + 2 * j - 1

    def ap(self, j):
        return 2 * self.n + 2 * j

    def roles(self) -> tuple[str, ...]:
        out = []
        for i in range(self.n):
            out += [f"x_{i}", f"x_{i}'"]
        out.append("a_0")
        for j in range(1, self.ell + 1):
            out += [f"a_{j}", f"a_{j}'"]
        return tuple(out)

    def a_columns(self) -> list[int]:
        return list(range(2 * self.n, self.t))


def _row(plus: Iterable[int]) -> int:
    # A ballot encodes sum_i c_i p_i > 0 by approving exactly the +1 columns.
    r = 0
    for c in plus:
        r |= 1 << c
    return r


def _set1_pair(lay: _Layout, alpha: int) -> list[int]:
    rest = [c for c in lay.a_columns() if c != alpha]
    a0s, a1s = rest[: lay.ell], rest[lay.ell :]
    xs = [lay.x(i) for i in range(lay.n)]
    xps = [lay.xp(i) for i in range(lay.n)]
    return [_row([alpha, *a0s, *xs]), _row([alpha, *a1s, *xps])]


def _set2_rows(lay: _Layout, i: int) -> list[int]:
    others = [j for j in range(lay.n) if j != i]
    ox = [lay.x(j) for j in others]
    oxp = [lay.xp(j) for j in others]
    aa = [lay.a(j) for j in range(1, lay.ell + 1)]
    aap = [lay.ap(j) for j in range(1, lay.ell + 1)]
    return [
        _row([lay.x(i), *ox, lay.a0, *aa]),
        _row([lay.x(i), *oxp, lay.a0, *aap]),
        _row([lay.xp(i), *ox, lay.a0, *aa]),
        _row([lay.xp(i), *oxp, lay.a0, *aap]),
    ]


def _set3_row(lay: _Layout, u: int, v: int) -> int:
    ox = [lay.x(j) for j in range(lay.n) if j not in (u, v)]
    aa = [lay.a(j) for j in range(1, lay.ell + 1)]
    return _row([lay.a0, *ox, *aa])


def _set4_row(lay: _Layout, k: int) -> int:
    surplus = lay.n - 2 * k
    plus = [lay.x(i) for i in range(lay.n)] + [lay.xp(i) for i in range(lay.n)] + [lay.a0]
    # 2(n - 2k) as a +-1 combination over the a-pairs: |n - 2k| pairs with
    # equal signs (each worth +-2), the rest as canceling +1/-1 pairs.
    for j in range(1, lay.ell + 1):
        if j <= abs(surplus):
            if surplus > 0:
                plus += [lay.a(j), lay.ap(j)]
        else:
            plus.append(lay.a(j))
    return _row(plus)


def _column_balances(rows: list[int], t: int) -> list[int]:
    n = len(rows)
    return [2 * sum(r >> j & 1 for r in rows) - n for j in range(t)]


def reduce_independent_set(g: Graph, k: int, voter_parity: Optional[str] = None) -> ReductionOutput:
    """Independent Set instance (g, k) -> profile with all-ones majority.

    ``g`` has an independent set of size >= k iff the output admits a
    unanimously winning policy with at least t//2 + 2 ones.
    """
    n = g.vertex_count
    if k < 1 or k > n:
        raise DomainError(f"k must lie in [1, {n}], got {k}")
    if voter_parity not in (None, "even", "odd"):
        raise DomainError(f"voter_parity must be 'even', 'odd' or None, got {voter_parity!r}")
    lay = _Layout(n, ell=n)
    t = lay.t

    rows: list[int] = []
    for alpha in lay.a_columns():
        rows += _set1_pair(lay, alpha)
    for i in range(n):
        rows += _set2_rows(lay, i)
    for u, v in g.edges:
        rows.append(_set3_row(lay, u, v))
    set4 = _set4_row(lay, k)
    rows.append(set4)

    budget = len(rows) * t
    x_cols = [c for i in range(n) for c in (lay.x(i), lay.xp(i))]
    set4_copies = set1_copies = 0

    bal = _column_balances(rows, t)
    while any(bal[c] <= 0 for c in x_cols):
        rows.append(set4)
        set4_copies += 1
        for j in range(t):
            bal[j] += 1 if set4 >> j & 1 else -1
        if set4_copies + set1_copies > budget:
            raise ContractError("post-processing did not terminate within n*t copies")

    # Set-1 copies come in pairs, so fix the voter parity before them.
    if voter_parity is not None and len(rows) % 2 != (voter_parity == "odd"):
        rows.append(set4)
        set4_copies += 1
        for j in range(t):
            bal[j] += 1 if set4 >> j & 1 else -1

    while True:
        bad = [c for c in lay.a_columns() if bal[c] <= 0]
        if not bad:
            break
        pair = _set1_pair(lay, bad[0])
        rows += pair
        set1_copies += 1
        for r in pair:
            for j in range(t):
                bal[j] += 1 if r >> j & 1 else -1
        if set4_copies + set1_copies > budget:
            raise ContractError("post-processing did not terminate within n*t copies")

    profile = Profile(rows, t)
    return ReductionOutput(
        profile=profile,
        agreement_threshold=t // 2 + 2,
        column_roles=lay.roles(),
        ell=lay.ell,
        k=k,
        vertex_count=n,
        set4_copies=set4_copies,
        set1_copies=set1_copies,
    )
