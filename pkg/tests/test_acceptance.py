"""Acceptance gate: eleven end-to-end criteria, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py`` (lines are printed even when
output capture is on) or directly with ``python tests/test_acceptance.py``.
"""

import io
import itertools
import json
import random
import sys
import time
from contextlib import redirect_stderr, redirect_stdout
from pathlib import Path

import pytest

from anscombe import analysis, ilp, solvers
from anscombe.cli import main as cli_main
from anscombe.core import Policy, Profile, delta, normalize, voter_balance
from anscombe.gadgets import Graph, anscombe_gadget, cyclic_profile, lift_una_to_wot, reduce_independent_set

PARADOX = Path(__file__).parent / "fixtures" / "anscombe3.txt"
SEED_PANEL = [1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144, 233, 377, 610, 987, 1597, 2584, 4181, 6765, 10946]


def random_normalized(rng, n, t):
    return normalize(Profile([rng.getrandbits(t) for _ in range(n)], t)).normalized


def balance_int(rows, t, p):
    b = 0
    for r in rows:
        d = (r ^ p).bit_count()
        b += (2 * d < t) - (2 * d > t)
    return b


# ------------------------------------------------------------------ criteria


def criterion_1():
    rng = random.Random(1)
    checked = 0
    for n in range(1, 9):
        for t in range(2, 13):
            for _ in range(500):
                prof = random_normalized(rng, n, t)
                rep = solvers.derandomized_solve(prof)
                b = balance_int(prof.rows, t, rep.policy.bits)
                if rep.policy.agreements < t // 2 + 1 or b < 0 or b != rep.tally.balance:
                    return False, f"n={n} t={t} rows={prof.to_strings()} got {rep.policy} b={b}"
                if delta(prof) > 0 and b <= 0:
                    return False, f"delta>0 but b={b} for rows={prof.to_strings()}"
                checked += 1
    return True, f"{checked} profiles"


def criterion_2():
    policies = 0
    for t in range(2, 12):
        rows = anscombe_gadget(t).rows
        for p in range(1 << t):
            if p.bit_count() >= t // 2 + 2:
                policies += 1
                if balance_int(rows, t, p) != -1:
                    return False, f"t={t} p={Policy(p, t)}"
    return True, f"{policies} policies over t=2..11"


def criterion_3():
    rng = random.Random(3)
    parities = set()
    for i in range(200):
        t = 1 + i % 12
        prof = random_normalized(rng, rng.randint(1, 8), t)
        x, y = analysis.expectation_XY_bruteforce(prof)
        closed = analysis.expectation_X_closed(prof)
        if not x == y == closed:
            return False, f"rows={prof.to_strings()} X={x} Y={y} closed={closed}"
        parities.add(t % 2)
    return parities == {0, 1}, "200 profiles, t=1..12, both parities"


def _bijection_failure(v: Policy):
    t = v.t
    T = analysis.ProposalClass
    b_star = [Policy(b, t) for b in range(1 << t) if analysis.classify(v, Policy(b, t)) is not T.DEGENERATE]
    images = [set(), set(), set()]
    for p in b_star:
        cls = analysis.classify(v, p)
        i, j = int(cls.value[1]), int(cls.value[2])
        f0, f1, fv = analysis.apply_f0(v, p), analysis.apply_f1(v, p), analysis.apply_fv(v, p)
        ok = (
            voter_balance(v, f0) == p.self_balance
            and analysis.classify(v, f0).value == f"T{j}{i}"
            and voter_balance(v, f1) == -p.self_balance
            and analysis.classify(v, f1).value == f"T{1 - j}{1 - i}"
            and analysis.classify(v, fv) is cls
            and voter_balance(v, fv) == (p.self_balance if i == j else -p.self_balance)
            and analysis.apply_f0(v, f0) == p
            and analysis.apply_f1(v, f1) == p
            and analysis.apply_fv(v, fv) == p
        )
        if not ok:
            return f"v={v} p={p}"
        for img, q in zip(images, (f0, f1, fv)):
            img.add(q)
    if any(img != set(b_star) for img in images):
        return f"v={v}: image is not B*"
    return None


def criterion_4():
    rng = random.Random(4)
    for _ in range(100):
        t = rng.randint(1, 10)
        v = Policy(rng.getrandbits(t), t)
        bad = _bijection_failure(v)
        if bad:
            return False, bad
    return True, "100 ballots, exhaustive over B*"


def criterion_5():
    rng = random.Random(5)
    done = 0
    while done < 100:
        t = rng.choice([1, 3, 5, 7, 9, 11, 13])
        prof = random_normalized(rng, rng.randint(1, 8), t)
        d = delta(prof)
        if d == 0:
            continue
        k, prob = analysis.best_success_probability(prof)
        if not analysis.markov_bound_holds(prob, d, prof.n, t):
            return False, f"rows={prof.to_strings()} k={k} P={prob}"
        done += 1
    return True, "100 odd-t profiles with delta > 0"


def criterion_6():
    rng = random.Random(6)
    instances = worst = 0
    while instances < 100:
        t = rng.choice([3, 5, 7, 9, 11, 13])
        prof = random_normalized(rng, rng.randint(1, 8), t)
        d = delta(prof)
        if d == 0:
            continue
        rounds = []
        limit = solvers.default_max_rounds(prof)
        for seed in SEED_PANEL:
            rep = solvers.randomized_solve(prof, seed)
            if rep is None or rep.tally.balance <= 0 or rep.rounds_used > limit:
                return False, f"seed {seed} failed on rows={prof.to_strings()}"
            rounds.append(rep.rounds_used)
        mean = sum(rounds) / len(rounds)
        bound = 8 * prof.n * t**1.5 / d
        if mean > bound:
            return False, f"mean rounds {mean} > {bound:.2f} on rows={prof.to_strings()}"
        worst = max(worst, mean / bound)
        instances += 1
    return True, f"100 instances x 20 seeds, worst mean/bound = {worst:.3f}"


def criterion_7():
    for t in (3, 5, 7, 9, 11, 13):
        prof = cyclic_profile(t)
        if not analysis.parity_classification(prof).wins_iff_odd:
            return False, f"parity fails at t={t}"
        rep = analysis.nonlosing_components(prof)
        if not rep.all_isolated or rep.nonlosing_count != 2 ** (t - 1):
            return False, f"components at t={t}: {rep}"
    return True, "t = 3..13 odd"


def _max_independent_set(g: Graph) -> int:
    best = 0
    for r in range(g.vertex_count + 1):
        for s in itertools.combinations(range(g.vertex_count), r):
            if not any(u in s and v in s for u, v in g.edges):
                best = r
    return best


def criterion_8():
    cases = 0
    for n in range(1, 5):
        pairs = list(itertools.combinations(range(n), 2))
        for mask in range(1 << len(pairs)):
            g = Graph(n, [e for i, e in enumerate(pairs) if mask >> i & 1])
            alpha = _max_independent_set(g)
            for k in range(1, n + 1):
                for parity in (None, "even", "odd"):
                    out = reduce_independent_set(g, k, parity)
                    if parity is not None and out.profile.n % 2 != (parity == "odd"):
                        return False, f"parity {parity} ignored for {g} k={k}"
                    found = solvers.brute_force(out.profile, "unanimous", out.agreement_threshold).found
                    if found != (alpha >= k):
                        return False, f"{g} k={k}: reduction says {found}, graph says {alpha >= k}"
                    cases += 1
    return True, f"{cases} (graph, k, parity) cases"


def criterion_9():
    rng = random.Random(9)
    for _ in range(100):
        t = rng.randint(2, 7)
        prof = random_normalized(rng, rng.randint(1, 4), t)
        lifted = lift_una_to_wot(prof)
        for p in range(1 << t):
            if p.bit_count() < t // 2 + 2:
                continue
            unanimous = all(2 * (r ^ p).bit_count() < t for r in prof.rows)
            if unanimous != (balance_int(lifted.rows, t, p) >= 0):
                return False, f"rows={prof.to_strings()} p={Policy(p, t)}"
    return True, "100 profiles, n <= 4, t <= 7"


def _normalized_profiles(n, t):
    good = [c for c in range(1 << n) if 2 * c.bit_count() >= n]
    for cols in itertools.product(good, repeat=t):
        yield Profile([sum((c >> i & 1) << j for j, c in enumerate(cols)) for i in range(n)], t)


def criterion_10():
    cache = {}

    def feasible(model):
        key = ilp.export_lp(model)
        if key not in cache:
            cache[key] = ilp.enumerate_feasible(model) is not None
        return cache[key]

    profiles = checks = 0
    for n in (1, 2, 3):
        for t in range(1, 7):
            for prof in _normalized_profiles(n, t):
                profiles += 1
                for variant, req in (("una", "unanimous"), ("wot", "nonlosing")):
                    build = ilp.build_una_ilp if variant == "una" else ilp.build_wot_ilp
                    weights = set()
                    for k in range(t + 1):
                        if solvers.brute_force(prof, req, k, exact=True).found:
                            weights.add(k)
                    for k in range(t + 1):
                        at_least = any(w >= k for w in weights)
                        if feasible(build(prof, k)) != at_least:
                            return False, f"{variant} k={k} rows={prof.to_strings()} (at least)"
                        if feasible(build(prof, k, exact=True)) != (k in weights):
                            return False, f"{variant} k={k} rows={prof.to_strings()} (exact)"
                        checks += 2
    cyc = cyclic_profile(7)
    exact4 = ilp.enumerate_feasible(ilp.build_wot_ilp(cyc, 4, exact=True)) is not None
    exact5 = ilp.enumerate_feasible(ilp.build_wot_ilp(cyc, 5, exact=True)) is not None
    least4 = ilp.enumerate_feasible(ilp.build_wot_ilp(cyc, 4)) is not None
    oracle4 = solvers.brute_force(cyc, "nonlosing", 4).found
    if exact4 or not exact5:
        return False, f"cyclic t=7: exactly 4 -> {exact4}, exactly 5 -> {exact5}"
    if least4 != oracle4:
        return False, "cyclic t=7: at-least-4 disagrees with brute force"
    return True, (
        f"{profiles} profiles, {checks} checks; cyclic t=7 |p|=4 infeasible, |p|=5 feasible"
        f" (at-least-4 feasible via |p|=5, matching brute force)"
    )


def _cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = cli_main(list(argv))
    return code, out.getvalue()


def criterion_11():
    code, out = _cli("iwm", "--format", "json", str(PARADOX))
    rep = json.loads(out)
    if code != 0 or rep["iwm"] != "111" or rep["delta"] != 3:
        return False, f"iwm: {rep}"
    code, out = _cli("verify", "--format", "json", str(PARADOX), "111")
    rep = json.loads(out)
    if code != 1 or rep["verdict"] != "losing" or rep["balance"] != -1:
        return False, f"verify: exit {code} {rep}"
    for extra in ((), ("--seed", "42"), ("--method", "derandomized")):
        code, out = _cli("solve", "--format", "json", *extra, str(PARADOX))
        rep = json.loads(out)["report"]
        if code != 0 or rep["agreements"] != 2 or rep["balance"] != 3:
            return False, f"solve {extra}: {rep}"
    return True, "iwm 111 / delta 3; verify 111 losing b=-1; solve |p|=2 b=3"


CRITERIA = [
    (1, "existence of a non-losing majority-agreeing proposal", criterion_1, 120),
    (2, "gadget tightness (balance -1)", criterion_2, 10),
    (3, "expectation identity E[X] = E[Y] = closed form", criterion_3, 60),
    (4, "f0 / f1 / fv bijection suite", criterion_4, 30),
    (5, "success-probability lower bound", criterion_5, 60),
    (6, "randomized solver round count", criterion_6, 120),
    (7, "cyclic construction wins iff |p| odd", criterion_7, 60),
    (8, "Independent Set reduction correctness", criterion_8, 300),
    (9, "lifting correctness", criterion_9, 30),
    (10, "ILP oracle equivalence", criterion_10, 180),
    (11, "three-issue paradox end to end via the CLI", criterion_11, 1),
]


def evaluate(number):
    _, title, fn, budget = CRITERIA[number - 1]
    start = time.perf_counter()
    ok, detail = fn()
    elapsed = time.perf_counter() - start
    in_time = elapsed <= budget
    status = "PASS" if ok and in_time else "FAIL"
    timing = f"{elapsed:.2f}s of {budget}s" + ("" if in_time else " OVER BUDGET")
    line = f"criterion {number:2d} {status}: {title} -- {detail} [{timing}]"
    return ok and in_time, line


@pytest.mark.parametrize("number", [c[0] for c in CRITERIA])
def test_criterion(number, capsys):
    ok, line = evaluate(number)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = [evaluate(c[0]) for c in CRITERIA]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
