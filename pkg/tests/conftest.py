import hashlib
import itertools
from pathlib import Path

import pytest
from hypothesis import strategies as st

from anscombe.core import Profile

FIXTURES = Path(__file__).parent / "fixtures"
PARADOX_ROWS = ["100", "010", "001", "111", "111"]
CYCLIC5_ROWS = ["11100", "01110", "00111", "10011", "11001"]
FIXTURE_SHA256 = {
    "anscombe3.txt": "a56881788354667f0cb8d1b2e3c416e9e7a218160be8b00e157b6e387797ebfa",
    "cyclic5.txt": "c12a5844ada9c9bfb774ae2def658254bc9feeb0e4a6036906faa1419d9d1dbe",
}


# ---------------------------------------------------------------- oracles
# Deliberately naive: strings, per-character loops, no shared code with the
# package beyond Profile construction.


def oracle_balance(rows: list[str], policy: str) -> tuple[int, int, int]:
    t = len(policy)
    a = d = f = 0
    for r in rows:
        dist = sum(1 for x, y in zip(r, policy) if x != y)
        if 2 * dist < t:
            a += 1
        elif 2 * dist > t:
            d += 1
        else:
            f += 1
    return a, d, f


def all_policy_strings(t: int):
    for bits in itertools.product("01", repeat=t):
        yield "".join(bits)


def oracle_iwm(rows: list[str]) -> str:
    n = len(rows)
    return "".join("1" if 2 * sum(r[j] == "1" for r in rows) >= n else "0" for j in range(len(rows[0])))


def oracle_normalize(rows: list[str]) -> list[str]:
    ref = oracle_iwm(rows)
    return ["".join(c if m == "1" else ("1" if c == "0" else "0") for c, m in zip(r, ref)) for r in rows]


def oracle_delta(rows: list[str]) -> int:
    ones = sum(r.count("1") for r in rows)
    return ones - (len(rows) * len(rows[0]) - ones)


# ------------------------------------------------------------- strategies


@st.composite
def profile_rows(draw, max_n=6, max_t=8, min_t=1):
    t = draw(st.integers(min_t, max_t))
    n = draw(st.integers(1, max_n))
    return [draw(st.text("01", min_size=t, max_size=t)) for _ in range(n)]


@st.composite
def normalized_rows(draw, max_n=6, max_t=8, min_t=1):
    return oracle_normalize(draw(profile_rows(max_n, max_t, min_t)))


def random_rows(rng, n, t, density=0.5):
    return ["".join("1" if rng.random() < density else "0" for _ in range(t)) for _ in range(n)]


@pytest.fixture
def paradox():
    return Profile.from_strings(PARADOX_ROWS)


@pytest.fixture
def fixture_path():
    def get(name):
        path = FIXTURES / name
        assert hashlib.sha256(path.read_bytes()).hexdigest() == FIXTURE_SHA256[name], f"{name} was modified"
        return path

    return get
