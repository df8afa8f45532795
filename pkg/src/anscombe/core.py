"""Profiles, policies, tallies and issue-wise majority.

Every t-bit vector (a voter's ballot or a policy) is packed into a Python
``int``: issue ``j`` (0-based) is bit ``j``.  In text form the first
character is issue 0, so ``"110"`` is the integer ``0b011``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from anscombe.errors import DimensionError, DomainError

__all__ = [
    "Policy",
    "Profile",
    "Tally",
    "NormalizationRecord",
    "hamming",
    "voter_balance",
    "tally",
    "iwm",
    "normalize",
    "denormalize_policy",
    "bits_from_string",
    "bits_to_string",
]


def bits_from_string(text: str) -> int:
    value = 0
    for j, ch in enumerate(text):
        if ch == "1":
            value |= 1 << j
        elif ch != "0":
            raise DomainError(f"expected '0' or '1', got {ch!r} at position {j}")
    return value


def bits_to_string(bits: int, t: int) -> str:
    return "".join("1" if bits >> j & 1 else "0" for j in range(t))


def _full(t: int) -> int:
    return (1 << t) - 1


@dataclass(frozen=True)
class Policy:
    """A t-bit outcome vector.

    ``agreements`` is the number of ones, i.e. the number of issues on which
    the policy agrees with an all-ones issue-wise majority.
    """

    bits: int
    t: int

    def __post_init__(self):
        if self.t < 1:
            raise DomainError("a policy needs at least one issue")
        if self.bits < 0 or self.bits >> self.t:
            raise DomainError(f"bits {self.bits:#x} do not fit in {self.t} issues")

    @classmethod
    def from_string(cls, text: str) -> Policy:
        return cls(bits_from_string(text), len(text))

    @classmethod
    def ones(cls, t: int) -> Policy:
        return cls(_full(t), t)

    @classmethod
    def zeros(cls, t: int) -> Policy:
        return cls(0, t)

    @property
    def agreements(self) -> int:
        return self.bits.bit_count()

    @property
    def self_balance(self) -> int:
        return 2 * self.agreements - self.t

    def opposite(self) -> Policy:
        return Policy(self.bits ^ _full(self.t), self.t)

    def __getitem__(self, j: int) -> int:
        if not 0 <= j < self.t:
            raise IndexError(j)
        return self.bits >> j & 1

    def __len__(self) -> int:
        return self.t

    def __str__(self) -> str:
        return bits_to_string(self.bits, self.t)


class Profile:
    """An immutable n x t approval matrix.

    ``rows[i]`` is voter ``i``'s ballot packed as an integer.  Construct
    from packed rows with ``Profile(rows, t)`` or from 0/1 strings with
    :meth:`from_strings`.
    """

    __slots__ = ("_rows", "_t", "_counts")

    def __init__(self, rows: Iterable[int], t: int):
        rows = tuple(int(r) for r in rows)
        if t < 1:
            raise DomainError("a profile needs at least one issue")
        if not rows:
            raise DomainError("a profile needs at least one voter")
        limit = 1 << t
        for i, r in enumerate(rows):
            if r < 0 or r >= limit:
                raise DomainError(f"row {i} does not fit in {t} issues")
        self._rows = rows
        self._t = t
        self._counts = None

    @classmethod
    def from_strings(cls, rows: Sequence[str]) -> Profile:
        if not rows:
            raise DomainError("a profile needs at least one voter")
        t = len(rows[0])
        for i, r in enumerate(rows):
            if len(r) != t:
                raise DimensionError(f"row {i} has {len(r)} entries, expected {t}")
        return cls((bits_from_string(r) for r in rows), t)

    @classmethod
    def from_matrix(cls, matrix: Sequence[Sequence[int]]) -> Profile:
        return cls.from_strings(["".join(str(int(x)) for x in row) for row in matrix])

    @property
    def n(self) -> int:
        return len(self._rows)

    @property
    def t(self) -> int:
        return self._t

    @property
    def rows(self) -> tuple[int, ...]:
        return self._rows

    def row_counts(self) -> list[tuple[int, int]]:
        """Distinct ballots with their multiplicities, in first-seen order."""
        if self._counts is None:
            self._counts = list(Counter(self._rows).items())
        return self._counts

    def column_ones(self, j: int) -> int:
        return sum(r >> j & 1 for r in self._rows)

    def to_strings(self) -> list[str]:
        return [bits_to_string(r, self._t) for r in self._rows]

    def stack(self, *others: Profile) -> Profile:
        """Vertical concatenation (voters of ``others`` appended below)."""
        rows = list(self._rows)
        for o in others:
            if o.t != self._t:
                raise DimensionError(f"cannot stack t={o.t} below t={self._t}")
            rows.extend(o.rows)
        return Profile(rows, self._t)

    def __eq__(self, other):
        if not isinstance(other, Profile):
            return NotImplemented
        return self._t == other._t and self._rows == other._rows

    def __hash__(self):
        return hash((self._t, self._rows))

    def __repr__(self):
        return f"Profile(n={self.n}, t={self._t}, rows={self.to_strings()!r})"


@dataclass(frozen=True)
class Tally:
    approvals: int
    disapprovals: int
    abstentions: int

    @property
    def balance(self) -> int:
        return self.approvals - self.disapprovals

    @property
    def verdict(self) -> str:
        b = self.balance
        return "winning" if b > 0 else "tying" if b == 0 else "losing"


@dataclass(frozen=True)
class NormalizationRecord:
    flipped: Policy
    normalized: Profile
    delta: int


def _check_len(x: Policy, y: Policy) -> None:
    if x.t != y.t:
        raise DimensionError(f"length mismatch: {x.t} vs {y.t}")


def hamming(x: Policy, y: Policy) -> int:
    _check_len(x, y)
    return (x.bits ^ y.bits).bit_count()


def voter_balance(v: Policy, p: Policy) -> int:
    """Matches minus mismatches between ballot ``v`` and policy ``p``."""
    return v.t - 2 * hamming(v, p)


def tally(profile: Profile, p: Policy) -> Tally:
    if p.t != profile.t:
        raise DimensionError(f"policy has {p.t} issues, profile has {profile.t}")
    t, bits = profile.t, p.bits
    a = d = 0
    for row, mult in profile.row_counts():
        b = t - 2 * (row ^ bits).bit_count()
        if b > 0:
            a += mult
        elif b < 0:
            d += mult
    return Tally(a, d, profile.n - a - d)


def column_margins(profile: Profile) -> list[int]:
    """Per issue, approving voters minus disapproving voters."""
    return [2 * profile.column_ones(j) - profile.n for j in range(profile.t)]


def iwm(profile: Profile) -> Policy:
    """Issue-wise majority; exact ties go to 1."""
    bits = 0
    for j, margin in enumerate(column_margins(profile)):
        if margin >= 0:
            bits |= 1 << j
    return Policy(bits, profile.t)


def delta(profile: Profile) -> int:
    """Total number of ones minus total number of zeros."""
    ones = sum(r.bit_count() for r in profile.rows)
    return 2 * ones - profile.n * profile.t


def normalize(profile: Profile) -> NormalizationRecord:
    """Negate every column whose majority is 0 so that IWM becomes all-ones."""
    t = profile.t
    mask = iwm(profile).bits ^ _full(t)
    normalized = Profile((r ^ mask for r in profile.rows), t) if mask else profile
    return NormalizationRecord(Policy(mask, t), normalized, delta(normalized))


def denormalize_policy(p: Policy, record: NormalizationRecord) -> Policy:
    _check_len(p, record.flipped)
    return Policy(p.bits ^ record.flipped.bits, p.t)


def is_normalized(profile: Profile) -> bool:
    return iwm(profile).bits == _full(profile.t)
