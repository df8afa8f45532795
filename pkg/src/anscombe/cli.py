"""Command line front end.

Exit codes: 0 success / non-losing verdict, 1 losing verdict, 2 input error,
3 resource cap hit, 4 internal contract violation.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import secrets
import sys
from pathlib import Path

from anscombe import analysis, gadgets, ilp, solvers
from anscombe.core import Policy, column_margins, denormalize_policy, iwm, normalize, tally
from anscombe.enumeration import DEFAULT_T_CAP
from anscombe.errors import ContractError, DimensionError, DomainError, FormatError, ResourceError
from anscombe.formats import format_profile, parse_graph, parse_profile, read_graph, read_profile

EXIT_OK, EXIT_LOSING, EXIT_INPUT, EXIT_RESOURCE, EXIT_CONTRACT = 0, 1, 2, 3, 4


def _emit(args, payload: dict, text: str) -> None:
    if args.format == "json":
        print(json.dumps(payload, indent=2))
    else:
        print(text)


def _write(out, content: str) -> None:
    if out is None or out == "-":
        sys.stdout.write(content)
    else:
        with open(out, "w", encoding="ascii", newline="\n") as fh:
            fh.write(content)


def _load_profile(path):
    if path == "-":
        return parse_profile(sys.stdin.read())
    return read_profile(path)


def _load_graph(path):
    if path == "-":
        return parse_graph(sys.stdin.read())
    return read_graph(path)


def _tally_dict(tl) -> dict:
    return {
        "approvals": tl.approvals,
        "disapprovals": tl.disapprovals,
        "abstentions": tl.abstentions,
        "balance": tl.balance,
    }


# ------------------------------------------------------------------ commands


def cmd_iwm(args) -> int:
    profile = _load_profile(args.profile)
    rec = normalize(profile)
    majority = iwm(profile)
    margins = column_margins(profile)
    payload = {
        "iwm": str(majority),
        "margins": margins,
        "ties": [j for j, m in enumerate(margins) if m == 0],
        "delta": rec.delta,
        "normalization_mask": str(rec.flipped),
    }
    text = "\n".join(
        [
            f"IWM: {majority}",
            "margins: " + " ".join(str(m) for m in margins),
            f"delta: {rec.delta}",
            f"mask: {rec.flipped}",
        ]
    )
    _emit(args, payload, text)
    return EXIT_OK


def cmd_solve(args) -> int:
    profile = _load_profile(args.profile)
    rec = normalize(profile)
    norm = rec.normalized
    seed = args.seed if args.seed is not None else secrets.randbits(64)
    method = args.method
    if method == "auto":
        method = "randomized" if norm.t % 2 == 1 and rec.delta > 0 else "derandomized"

    report = None
    if method == "randomized":
        report = solvers.randomized_solve(norm, seed, args.max_rounds)
        if report is None:
            if args.method != "auto":
                print(f"randomized solver exhausted its round budget (seed {seed})", file=sys.stderr)
                return EXIT_RESOURCE
            method = "derandomized"
    if method == "derandomized":
        report = solvers.derandomized_solve(norm)
    elif method == "brute":
        report = solvers.brute_solve(norm, args.t_cap, args.threads)
        if report is None:
            raise ContractError("no non-losing policy exists on a normalized profile")

    report.check(norm)
    original = denormalize_policy(report.policy, rec)
    out = dataclasses.replace(report, policy=original)
    out.check(profile)
    payload = {"report": out.to_dict(), "normalization_mask": str(rec.flipped), "seed": seed}
    text = "\n".join(
        [
            f"policy: {original}",
            f"agreements with IWM: {out.agreements} of {profile.t}",
            f"balance: {out.tally.balance} (for {out.tally.approvals}, against {out.tally.disapprovals},"
            f" abstaining {out.tally.abstentions})",
            f"method: {out.method}",
            f"seed: {seed}",
            f"mask: {rec.flipped}",
        ]
    )
    _emit(args, payload, text)
    return EXIT_OK


def cmd_verify(args) -> int:
    profile = _load_profile(args.profile)
    try:
        p = Policy.from_string(args.policy)
    except DomainError as exc:
        raise FormatError(f"bad policy string: {exc}") from exc
    if p.t != profile.t:
        raise DimensionError(f"policy has {p.t} issues, profile has {profile.t}")
    tl = tally(profile, p)
    payload = {"policy": str(p), **_tally_dict(tl), "verdict": tl.verdict}
    text = f"{p}: {tl.verdict} (balance {tl.balance}; for {tl.approvals}, against {tl.disapprovals}, abstaining {tl.abstentions})"
    _emit(args, payload, text)
    return EXIT_LOSING if tl.balance < 0 else EXIT_OK


def cmd_gadget(args) -> int:
    if args.family == "anscombe":
        profile = gadgets.anscombe_gadget(args.t)
    else:
        profile = gadgets.cyclic_profile(args.t)
    _write(args.output, format_profile(profile))
    return EXIT_OK


def cmd_reduce(args) -> int:
    graph = _load_graph(args.graph)
    out = gadgets.reduce_independent_set(graph, args.k, args.parity)
    _write(args.output, format_profile(out.profile))
    sidecar = args.sidecar
    if sidecar is None and args.output not in (None, "-"):
        sidecar = str(args.output) + ".roles.json"
    if sidecar is not None:
        Path(sidecar).write_text(out.sidecar_json(), encoding="ascii")
    return EXIT_OK


def cmd_lift(args) -> int:
    profile = _load_profile(args.profile)
    _write(args.output, format_profile(gadgets.lift_una_to_wot(profile, args.copies)))
    return EXIT_OK


def cmd_analyze(args) -> int:
    profile = _load_profile(args.profile)
    rec = normalize(profile)
    norm = rec.normalized
    payload = {"what": args.what, "normalization_mask": str(rec.flipped), "delta": rec.delta}
    if args.what == "expectations":
        x, y = analysis.expectation_XY_bruteforce(norm, args.t_cap)
        closed = analysis.expectation_X_closed(norm)
        payload.update(
            X=analysis.rational_json(x),
            Y=analysis.rational_json(y),
            closed_form=analysis.rational_json(closed),
            consistent=x == y == closed,
        )
        text = f"E[X] = {x}, E[Y] = {y}, closed form = {closed}"
    elif args.what == "components":
        rep = analysis.nonlosing_components(norm, args.t_cap)
        payload.update(rep.to_dict(norm.t))
        text = (
            f"{rep.nonlosing_count} non-losing policies in {rep.component_count} components"
            f" (largest {rep.largest_component}{', all isolated' if rep.all_isolated else ''})"
        )
    elif args.what == "cohesion":
        h, safe = analysis.cohesion_check(norm)
        ones = tally(norm, Policy.ones(norm.t))
        payload.update(h=h, iwm_safe=safe, iwm_tally=_tally_dict(ones))
        text = f"h = {h}, below (sqrt(2)-1)t: {safe}; IWM balance {ones.balance}"
    elif args.what == "parity":
        rep = analysis.parity_classification(norm, args.t_cap)
        payload.update(rep.to_dict())
        text = f"wins iff |p| odd: {rep.wins_iff_odd}"
    else:
        ks = [args.k] if args.k is not None else list(range(norm.t // 2 + 1, norm.t + 1))
        probs = {k: analysis.exact_success_probability(norm, k, args.t_cap) for k in ks}
        best_k = max(ks, key=lambda k: (probs[k], k))
        payload.update(
            probabilities={str(k): analysis.rational_json(v) for k, v in probs.items()},
            best_k=best_k,
        )
        if norm.t % 2 == 1 and rec.delta > 0 and args.k is None:
            payload["markov_bound_holds"] = analysis.markov_bound_holds(probs[best_k], rec.delta, norm.n, norm.t)
        text = "\n".join(f"P(win | k={k}) = {v}" for k, v in probs.items())
    _emit(args, payload, text)
    return EXIT_OK


def cmd_ilp(args) -> int:
    profile = _load_profile(args.profile)
    rec = normalize(profile)
    norm = rec.normalized
    if args.variant == "una":
        model = ilp.build_una_ilp(norm, args.k, exact=args.exact)
    else:
        model = ilp.build_wot_ilp(norm, args.k, exact=args.exact)
    _write(args.output, ilp.export_lp(model) if args.model_format == "lp" else model.to_json())
    if not args.check:
        return EXIT_OK

    assignment = ilp.enumerate_feasible(model, args.cell_cap)
    requirement = "unanimous" if args.variant == "una" else "nonlosing"
    oracle = solvers.brute_force(norm, requirement, args.k, args.t_cap, args.threads, exact=args.exact)
    check = {
        "feasible": assignment is not None,
        "oracle_feasible": oracle.found,
        "agree": (assignment is not None) == oracle.found,
        "normalization_mask": str(rec.flipped),
    }
    if assignment is not None:
        witness = ilp.policy_from_assignment(norm, model, assignment)
        check["witness_policy"] = str(denormalize_policy(witness, rec))
    print(json.dumps(check, indent=2), file=sys.stderr if args.output in (None, "-") else sys.stdout)
    if not check["agree"]:
        raise ContractError("ILP feasibility disagrees with the brute-force oracle")
    return EXIT_OK


# -------------------------------------------------------------------- parser


def _threads_default() -> int:
    raw = os.environ.get("MAJ_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _u64(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 1 << 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="anscombe",
        allow_abbrev=False,
        description="Find policies that survive a final majority vote while staying close to issue-wise majority.",
    )
    parser.add_argument("--threads", type=int, default=_threads_default(), help="enumeration threads (default $MAJ_THREADS or 1)")
    parser.add_argument("--t-cap", type=int, default=DEFAULT_T_CAP, help="largest t for exhaustive enumeration")
    sub = parser.add_subparsers(dest="command", required=True)

    def with_format(p):
        p.add_argument("--format", choices=("text", "json"), default="text")
        return p

    p = with_format(sub.add_parser("iwm", help="issue-wise majority, margins, delta and normalization mask"))
    p.add_argument("profile", help="profile file, or - for stdin")
    p.set_defaults(func=cmd_iwm)

    p = with_format(sub.add_parser("solve", help="find a non-losing policy agreeing with IWM on > t/2 issues"))
    p.add_argument("profile", help="profile file, or - for stdin")
    p.add_argument("--method", choices=("auto", "randomized", "derandomized", "brute"), default="auto")
    p.add_argument("--seed", type=_u64, default=None)
    p.add_argument("--max-rounds", type=int, default=None)
    p.set_defaults(func=cmd_solve)

    p = with_format(sub.add_parser("verify", help="tally a policy; exit 1 if it loses"))
    p.add_argument("profile", help="profile file, or - for stdin")
    p.add_argument("policy")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gadget", help="emit a named profile family")
    p.add_argument("--family", choices=("anscombe", "cyclic"), required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_gadget)

    p = sub.add_parser("reduce", help="Independent Set instance to profile")
    p.add_argument("graph", help="graph file, or - for stdin")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--parity", choices=("even", "odd"), default=None)
    p.add_argument("-o", "--output", default=None)
    p.add_argument("--sidecar", default=None, help="column-role JSON path (default <output>.roles.json)")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("lift", help="append gadget copies (unanimity to non-losing)")
    p.add_argument("profile", help="profile file, or - for stdin")
    p.add_argument("--copies", type=int, default=None)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_lift)

    p = with_format(sub.add_parser("analyze", help="exact diagnostics (JSON by default)"))
    p.set_defaults(format="json")
    p.add_argument("profile", help="profile file, or - for stdin")
    p.add_argument(
        "--what", choices=("expectations", "components", "cohesion", "parity", "success-prob"), required=True
    )
    p.add_argument("--k", type=int, default=None)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("ilp", help="export the column-type integer program")
    p.add_argument("profile", help="profile file, or - for stdin")
    p.add_argument("--variant", choices=("una", "wot"), required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--exact", action="store_true", help="require exactly k ones instead of at least k")
    p.add_argument("--format", dest="model_format", choices=("lp", "json"), default="lp")
    p.add_argument("--check", action="store_true", help="also decide feasibility exactly and compare with brute force")
    p.add_argument("--cell-cap", type=int, default=ilp.DEFAULT_CELL_CAP)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_ilp)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (FormatError, DomainError, DimensionError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ResourceError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except ContractError as exc:
        print(f"contract violation: {exc}", file=sys.stderr)
        return EXIT_CONTRACT


if __name__ == "__main__":
    sys.exit(main())
