"""Integer programs over column types, LP-file export and a small exact checker.

Identical columns of a profile are interchangeable, so a policy is described
by how many columns of each distinct type ``c`` it sets to one
(``0 <= x_c <= t_c``).  Two models are built:

* ``una``: is there a unanimously winning policy with at least k ones?
* ``wot``: is there a non-losing policy with at least k ones?  Adds binary
  indicators a_i / d_i / f_i (voter i approves / opposes / abstains) with
  big-M activation constraints and an explicit ``sum a_i - sum d_i >= 0``.

Both builders take ``exact=True`` to ask for exactly k ones instead.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterator, Optional

from anscombe.core import Policy, Profile, is_normalized
from anscombe.errors import DomainError, ResourceError

__all__ = [
    "Variable",
    "Constraint",
    "ILPModel",
    "column_types",
    "build_una_ilp",
    "build_wot_ilp",
    "export_lp",
    "enumerate_feasible",
    "iter_feasible",
    "policy_from_assignment",
]

DEFAULT_CELL_CAP = 10**7
_TERMS_PER_LINE = 8


@dataclass(frozen=True)
class Variable:
    name: str
    lower: int
    upper: int
    binary: bool = False


@dataclass(frozen=True)
class Constraint:
    name: str
    coefficients: tuple[tuple[str, int], ...]
    sense: str  # one of "<=", ">=", "="
    rhs: int

    def satisfied(self, assignment: dict[str, int]) -> bool:
        lhs = sum(c * assignment[v] for v, c in self.coefficients)
        if self.sense == ">=":
            return lhs >= self.rhs
        if self.sense == "<=":
            return lhs <= self.rhs
        return lhs == self.rhs


@dataclass
class ILPModel:
    variables: list[Variable] = field(default_factory=list)
    constraints: list[Constraint] = field(default_factory=list)
    # distinct column (bit i = voter i's entry) -> multiplicity
    column_types: dict[int, int] = field(default_factory=dict)
    n: int = 0
    t: int = 0
    variant: str = ""
    k: int = 0
    exact: bool = False

    def add_variable(self, name, lower, upper, binary=False) -> None:
        self.variables.append(Variable(name, lower, upper, binary))

    def add_constraint(self, name, coefficients, sense, rhs) -> None:
        if sense not in ("<=", ">=", "="):
            raise DomainError(f"unknown relation {sense!r}")
        declared = {v.name for v in self.variables}
        coefficients = tuple((v, int(c)) for v, c in coefficients if c)
        for v, _ in coefficients:
            if v not in declared:
                raise DomainError(f"constraint {name} uses undeclared variable {v}")
        self.constraints.append(Constraint(name, coefficients, sense, int(rhs)))

    def is_feasible_assignment(self, assignment: dict[str, int]) -> bool:
        for var in self.variables:
            if not var.lower <= assignment[var.name] <= var.upper:
                return False
        return all(c.satisfied(assignment) for c in self.constraints)

    def to_dict(self) -> dict:
        width = _hex_width(self.n)
        return {
            "variant": self.variant,
            "k": self.k,
            "exact": self.exact,
            "n": self.n,
            "t": self.t,
            "variables": [
                {"name": v.name, "lower": v.lower, "upper": v.upper, "binary": v.binary} for v in self.variables
            ],
            "constraints": [
                {"name": c.name, "coefficients": dict(c.coefficients), "relation": c.sense, "rhs": c.rhs}
                for c in self.constraints
            ],
            "column_types": [
                {"column": format(col, f"0{width}x"), "multiplicity": mult} for col, mult in self.column_types.items()
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def _hex_width(n: int) -> int:
    return max(1, -(-n // 4))


def _column_of(profile: Profile, j: int) -> int:
    col = 0
    for i, row in enumerate(profile.rows):
        if row >> j & 1:
            col |= 1 << i
    return col


def column_types(profile: Profile) -> dict[int, int]:
    """Distinct columns (bit i = voter i) with multiplicities, in first-seen order."""
    out: dict[int, int] = {}
    for j in range(profile.t):
        c = _column_of(profile, j)
        out[c] = out.get(c, 0) + 1
    return out


def _x_name(col: int, n: int) -> str:
    return f"x_{col:0{_hex_width(n)}x}"


def _voter_terms(model: ILPModel, i: int) -> list[tuple[str, int]]:
    # sum_{c_i = 1} x_c - sum_{c_i = 0} x_c
    return [(_x_name(c, model.n), 1 if c >> i & 1 else -1) for c in model.column_types]


def _base_model(profile: Profile, k: int, variant: str, exact: bool) -> ILPModel:
    if not is_normalized(profile):
        raise DomainError("ILP builders expect a normalized profile (all-ones issue-wise majority)")
    model = ILPModel(column_types=column_types(profile), n=profile.n, t=profile.t, variant=variant, k=k, exact=exact)
    for col, mult in model.column_types.items():
        model.add_variable(_x_name(col, profile.n), 0, mult)
    model.add_constraint("cs2", [(v.name, 1) for v in model.variables], "=" if exact else ">=", k)
    return model


def build_una_ilp(profile: Profile, k: int, exact: bool = False) -> ILPModel:
    """Feasible iff some policy with >= k ones (exactly k if ``exact``) is approved by every voter."""
    model = _base_model(profile, k, "una", exact)
    t = profile.t
    for i, row in enumerate(profile.rows):
        model.add_constraint(f"cs3_{i}", _voter_terms(model, i), ">=", row.bit_count() - (t - 1) // 2)
    return model


def build_wot_ilp(profile: Profile, k: int, printed: bool = False, exact: bool = False) -> ILPModel:
    """Feasible iff some policy with >= k ones (exactly k if ``exact``) does not lose.

    With L_i = sum_{c_i=1} x_c - sum_{c_i=0} x_c, voter i approves iff
    L_i >= |v_i| - (t-1)//2, opposes iff L_i <= |v_i| - t//2 - 1 and abstains
    otherwise (only possible for even t).  ``printed=True`` instead uses
    the thresholds |v_i| - (t-1)//2 - 2 for opposition and |v_i| - (t-1)//2 - 1
    for both abstention bounds; those coincide with the above for even t but
    mislabel balance -1 voters as abstaining for odd t.
    """
    model = _base_model(profile, k, "wot", exact)
    t, n = profile.t, profile.n
    big = 10 * t + 10
    for i in range(n):
        model.add_variable(f"a_{i}", 0, 1, binary=True)
        model.add_variable(f"d_{i}", 0, 1, binary=True)
        model.add_variable(f"f_{i}", 0, 1, binary=True)
    for i, row in enumerate(profile.rows):
        terms = _voter_terms(model, i)
        approve = row.bit_count() - (t - 1) // 2
        if printed:
            oppose, abstain_hi, abstain_lo = approve - 2, approve - 1, approve - 1
        else:
            oppose = row.bit_count() - t // 2 - 1
            abstain_hi, abstain_lo = approve - 1, oppose + 1
        model.add_constraint(f"cs5_{i}", [(f"a_{i}", 1), (f"d_{i}", 1), (f"f_{i}", 1)], "=", 1)
        model.add_constraint(f"cs6_{i}", terms + [(f"a_{i}", -big)], ">=", approve - big)
        model.add_constraint(f"cs7_{i}", terms + [(f"d_{i}", big)], "<=", oppose + big)
        model.add_constraint(f"cs8_{i}", terms + [(f"f_{i}", big)], "<=", abstain_hi + big)
        model.add_constraint(f"cs9_{i}", terms + [(f"f_{i}", -big)], ">=", abstain_lo - big)
    model.add_constraint(
        "balance", [(f"a_{i}", 1) for i in range(n)] + [(f"d_{i}", -1) for i in range(n)], ">=", 0
    )
    return model


# ---------------------------------------------------------------- LP export


def _expr(terms) -> list[str]:
    return [f"{'+' if c >= 0 else '-'} {abs(c)} {v}" for v, c in terms]


def _wrapped(prefix: str, items: list[str], suffix: str = "") -> list[str]:
    lines = []
    for start in range(0, max(len(items), 1), _TERMS_PER_LINE):
        chunk = " ".join(items[start : start + _TERMS_PER_LINE])
        lines.append(("   " if start else prefix) + chunk)
    lines[-1] += suffix
    return lines


def export_lp(model: ILPModel) -> str:
    """CPLEX-LP text with a constant zero objective; byte-deterministic."""
    kind = "exact" if model.exact else "at-least"
    out = [f"\\ anscombe {model.variant or 'model'} k={model.k} ({kind}) n={model.n} t={model.t}", "Minimize"]
    if model.variables:
        out.append(f" obj: 0 {model.variables[0].name}")
    else:
        out.append(" obj:")
    out.append("Subject To")
    for c in model.constraints:
        rel = {">=": ">=", "<=": "<=", "=": "="}[c.sense]
        out += _wrapped(f" {c.name}: ", _expr(c.coefficients), f" {rel} {c.rhs}")
    out.append("Bounds")
    for v in model.variables:
        if not v.binary:
            out.append(f" {v.lower} <= {v.name} <= {v.upper}")
    general = [v.name for v in model.variables if not v.binary]
    binary = [v.name for v in model.variables if v.binary]
    if general:
        out.append("General")
        out += _wrapped(" ", general)
    if binary:
        out.append("Binary")
        out += _wrapped(" ", binary)
    out.append("End")
    return "\n".join(out) + "\n"


# --------------------------------------------------------- exact enumeration


def iter_feasible(model: ILPModel, cell_cap: int = DEFAULT_CELL_CAP) -> Iterator[dict[str, int]]:
    """Yield every feasible assignment, in lexicographic order of declared variables.

    Depth-first over the integer box with interval pruning: a branch is cut
    as soon as some constraint cannot be met by any completion.  ``cell_cap``
    bounds the number of search nodes visited.
    """
    names = [v.name for v in model.variables]
    index = {nm: i for i, nm in enumerate(names)}
    lo = [v.lower for v in model.variables]
    hi = [v.upper for v in model.variables]
    nv, nc = len(names), len(model.constraints)

    by_var: list[list[tuple[int, int]]] = [[] for _ in range(nv)]
    partial = [0] * nc
    rest_min = [0] * nc
    rest_max = [0] * nc
    senses = [c.sense for c in model.constraints]
    rhs = [c.rhs for c in model.constraints]
    for ci, c in enumerate(model.constraints):
        for v, coef in c.coefficients:
            vi = index[v]
            by_var[vi].append((ci, coef))
            a, b = coef * lo[vi], coef * hi[vi]
            rest_min[ci] += min(a, b)
            rest_max[ci] += max(a, b)

    def viable(ci: int) -> bool:
        s = senses[ci]
        if s != "<=" and partial[ci] + rest_max[ci] < rhs[ci]:
            return False
        if s != ">=" and partial[ci] + rest_min[ci] > rhs[ci]:
            return False
        return True

    if not all(viable(ci) for ci in range(nc)):
        return
    values = [0] * nv
    visited = 0

    def dfs(i: int):
        nonlocal visited
        if i == nv:
            yield dict(zip(names, values))
            return
        cons = by_var[i]
        for ci, coef in cons:
            a, b = coef * lo[i], coef * hi[i]
            rest_min[ci] -= min(a, b)
            rest_max[ci] -= max(a, b)
        for val in range(lo[i], hi[i] + 1):
            visited += 1
            if visited > cell_cap:
                raise ResourceError(f"search exceeded the cap of {cell_cap} nodes")
            for ci, coef in cons:
                partial[ci] += coef * val
            if all(viable(ci) for ci, _ in cons):
                values[i] = val
                yield from dfs(i + 1)
            for ci, coef in cons:
                partial[ci] -= coef * val
        for ci, coef in cons:
            a, b = coef * lo[i], coef * hi[i]
            rest_min[ci] += min(a, b)
            rest_max[ci] += max(a, b)

    yield from dfs(0)


def enumerate_feasible(model: ILPModel, cell_cap: int = DEFAULT_CELL_CAP) -> Optional[dict[str, int]]:
    """First feasible assignment in lexicographic order, or ``None``."""
    return next(iter_feasible(model, cell_cap), None)


def policy_from_assignment(profile: Profile, model: ILPModel, assignment: dict[str, int]) -> Policy:
    """Ones go to the lowest-index columns of each type."""
    want = {col: assignment[_x_name(col, model.n)] for col in model.column_types}
    bits = 0
    for j in range(profile.t):
        col = _column_of(profile, j)
        if want[col] > 0:
            bits |= 1 << j
            want[col] -= 1
    return Policy(bits, profile.t)
