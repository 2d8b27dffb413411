"""Command-line surface: dimension queries, expert tables, tree tooling,
game playback, and the branch-length concentration check.

Every numeric result is printed as an exact rational alongside a decimal
rendering.  Exit codes: 0 success, 2 precondition or parse failure, 3
compute-budget exhaustion.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from fractions import Fraction

from .classes import (
    ClassFileError,
    UnknownInstanceError,
    expert_class,
    load_class_file,
    universal_class,
)
from .dimension import EMPTY, ComputeBudgetError, Solver, result_document
from .experts import (
    capacity_D,
    d_star,
    harmonic_number,
    mstar2_closed_form,
    up_min_over_grid,
    vovk_up,
)
from .games import (
    AdversaryPreconditionError,
    GameProtocolError,
    online_optimal_adversary,
    play,
    proper_adversary,
    random_branch_adversary,
    threshold_adversary,
)
from .learners import (
    EmptyVersionSpaceError,
    HorizonExhaustedError,
    UnrealizableSequenceError,
    make_learner,
)
from .trees import (
    NotQuasiBalancedError,
    depth,
    expected_branch_length,
    is_monotone,
    min_branch_length,
    quasi_balance_weights,
    sample_branch,
    shatter_check,
    tree_from_json,
    tree_to_json,
)


def fmt(value) -> str:
    """Exact value plus decimal rendering, e.g. '47/16 (2.9375)'."""
    if value == EMPTY:
        return "EMPTY (-1)"
    return f"{value} ({float(value):.17g})"


def _out_stream(path: str | None):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8"), True


def cmd_dim(args) -> int:
    w = load_class_file(args.class_file)
    solver = Solver(state_budget=args.budget_states)
    start = time.perf_counter()
    if args.mode == "det":
        value = (
            solver.bounded_littlestone(w, args.horizon)
            if args.horizon is not None
            else solver.littlestone(w)
        )
        name = "L"
    else:
        value = (
            solver.bounded_randomized_littlestone(w, args.horizon)
            if args.horizon is not None
            else solver.randomized_littlestone(w)
        )
        name = "RL"
    elapsed = time.perf_counter() - start
    if args.json:
        print(json.dumps(result_document(value, solver.states_visited)))
        return 0
    suffix = f"(horizon {args.horizon})" if args.horizon is not None else ""
    print(f"{name}{suffix} = {fmt(value)}")
    if w.duplicates_collapsed:
        print(f"note: collapsed {w.duplicates_collapsed} duplicate member(s) on load")
    print(f"states visited: {solver.states_visited}")
    print(f"wall time: {elapsed:.3f}s")
    return 0


def cmd_experts(args) -> int:
    solver = Solver(state_budget=args.budget_states)
    if args.what == "dim":
        value = (
            solver.bounded_randomized_littlestone(expert_class(args.n, args.k), args.horizon)
            if args.horizon is not None
            else solver.randomized_littlestone(expert_class(args.n, args.k))
        )
        print(fmt(value))
    elif args.what == "D":
        print(capacity_D(args.n, args.k))
    elif args.what == "dstar":
        if args.k < 1:
            raise AdversaryPreconditionError("dstar requires k >= 1")
        if args.n < 2:
            raise AdversaryPreconditionError("dstar requires n >= 2")
        v = d_star(args.n, args.k)
        print(f"{v.value:.12g} (residual {v.residual:.3g})")
    elif args.what == "up":
        beta = float(Fraction(args.beta)) if args.beta is not None else None
        if beta is None:
            print(f"{up_min_over_grid(args.n, args.k):.12g} (min over beta grid)")
        else:
            print(f"{vovk_up(args.n, args.k, beta).value:.12g}")
    return 0


def cmd_tables(args) -> int:
    stream, close = _out_stream(args.out)
    writer = csv.writer(stream)
    try:
        if args.kind == "proper":
            writer.writerow(["n", "exact", "decimal"])
            for n in range(2, args.max_n + 1):
                v = harmonic_number(n) - 1
                writer.writerow([n, str(v), f"{float(v):.17g}"])
        elif args.kind == "mstar2":
            writer.writerow(["k", "exact", "decimal"])
            for k in range(args.max_k + 1):
                v = mstar2_closed_form(k)
                writer.writerow([k, str(v), f"{float(v):.17g}"])
        else:  # dnk
            solver = Solver(state_budget=args.budget_states)
            writer.writerow(
                ["n", "k", "D", "L_k", "RL_k_num", "RL_k_den", "mstar2", "d_star", "up_min"]
            )
            ns = [int(v) for v in args.n_list.split(",")]
            for n in ns:
                for k in range(args.max_k + 1):
                    cls = expert_class(n, k)
                    rl = solver.randomized_littlestone(cls)
                    row = [
                        n,
                        k,
                        capacity_D(n, k),
                        solver.littlestone(cls),
                        rl.numerator,
                        rl.denominator,
                        str(mstar2_closed_form(k)) if n == 2 else "",
                        f"{d_star(n, k).value:.12g}" if k >= 1 and n >= 2 else "",
                        f"{up_min_over_grid(n, k):.12g}",
                    ]
                    writer.writerow(row)
    finally:
        if close:
            stream.close()
    return 0


def _load_game_class(args):
    if args.class_file is not None:
        return load_class_file(args.class_file)
    if args.n is None:
        raise ClassFileError("need either a class file or --n/--k")
    return universal_class(args.n, args.k)


def cmd_play(args) -> int:
    w = _load_game_class(args)
    n_experts = args.n if args.n is not None else None
    solver = Solver(state_budget=args.budget_states)

    def build_adversary():
        if args.adversary == "proper":
            if n_experts is None:
                raise AdversaryPreconditionError("the proper adversary needs --n")
            return proper_adversary(n_experts)
        if args.adversary == "optimal":
            return online_optimal_adversary(w, Fraction(args.slack), solver)
        horizon = (
            args.horizon
            if args.horizon is not None
            else solver.horizon_for_slack(w, Fraction(args.slack))
        )
        tree, weights = solver.extract_optimal_tree(w, horizon)
        if args.adversary == "threshold":
            return threshold_adversary(tree, weights, declared_class=w, check=False)
        if args.adversary == "branch":
            return random_branch_adversary(tree, declared_class=w, check=False)
        raise AdversaryPreconditionError(f"unknown adversary {args.adversary!r}")

    totals = []
    out_lines = []
    for trial in range(args.trials):
        learner = make_learner(
            args.learner, w, solver, horizon=args.horizon or args.max_rounds, n_experts=n_experts
        )
        transcript = play(
            learner, build_adversary(), max_rounds=args.max_rounds, seed=args.seed + trial
        )
        totals.append(transcript.total)
        out_lines.append(transcript.to_jsonl())
        cert = transcript.certificate
        cert_str = ""
        if cert is not None:
            cert_str = (
                f"  [certificate: best={cert.best_member} mistakes={cert.mistakes} "
                f"realizable={cert.realizable}]"
            )
        print(f"trial {trial}: total = {fmt(transcript.total)}{cert_str}")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write("\n".join(out_lines) + "\n")
    if len(totals) > 1:
        mean = sum(totals, Fraction(0)) / len(totals)
        print(f"mean  = {fmt(mean)}")
        print(f"min   = {fmt(min(totals))}")
        print(f"max   = {fmt(max(totals))}")
    return 0


def cmd_tree_extract(args) -> int:
    w = load_class_file(args.class_file)
    solver = Solver(state_budget=args.budget_states)
    horizon = (
        args.horizon
        if args.horizon is not None
        else solver.horizon_for_slack(w, Fraction(args.slack))
    )
    tree, weights = solver.extract_optimal_tree(w, horizon)
    text = tree_to_json(tree, weights)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    print(
        f"# horizon {horizon}, E_T = {fmt(expected_branch_length(tree))}, "
        f"branch weight = {fmt(expected_branch_length(tree) / 2)}",
        file=sys.stderr,
    )
    return 0


def cmd_tree_analyze(args) -> int:
    with open(args.tree_file, "r", encoding="utf-8") as fh:
        tree, weights = tree_from_json(fh.read())
    e = expected_branch_length(tree)
    print(f"depth              = {depth(tree)}")
    print(f"expected length    = {fmt(e)}")
    print(f"min branch length  = {min_branch_length(tree)}")
    print(f"monotone           = {is_monotone(tree)}")
    try:
        quasi_balance_weights(tree)
        print(f"quasi-balanced     = True (branch weight {fmt(e / 2)})")
    except NotQuasiBalancedError as err:
        print(f"quasi-balanced     = False (violation at node {err.position!r})")
    if args.class_file:
        w = load_class_file(args.class_file)
        report = shatter_check(tree, w)
        print(f"shattered by class = {report.ok}")
        if not report.ok:
            print(f"  failing branches: {len(report.failing_branches)}")
    return 0


def cmd_check_concentration(args) -> int:
    solver = Solver(state_budget=args.budget_states)
    w = expert_class(args.n, args.k)
    horizon = solver.horizon_for_slack(w, Fraction(args.slack))
    tree, _ = solver.extract_optimal_tree(w, horizon)
    e_t = float(expected_branch_length(tree))
    lengths = [len(sample_branch(tree, args.seed + i)) for i in range(args.samples)]
    n = len(lengths)
    ok = True
    print(f"tree horizon {horizon}, E_T = {e_t:.6f}, samples = {n}")
    for eps_text in args.eps.split(","):
        eps = float(eps_text)
        lower = sum(1 for v in lengths if v < (1 - eps) * e_t) / n
        upper = sum(1 for v in lengths if v > (1 + eps) * e_t) / n
        bound_lower = math.exp(-eps * eps * e_t / 4)
        bound_upper = math.exp(-eps * eps * e_t / (4 * (1 + eps)))
        slack_lower = 3 * math.sqrt(max(lower * (1 - lower), 1e-12) / n)
        slack_upper = 3 * math.sqrt(max(upper * (1 - upper), 1e-12) / n)
        ok_lower = lower <= bound_lower + slack_lower
        ok_upper = upper <= bound_upper + slack_upper
        ok = ok and ok_lower and ok_upper
        print(
            f"eps={eps:g}: P[X<(1-eps)E]={lower:.5f} <= {bound_lower:.5f} : "
            f"{'PASS' if ok_lower else 'FAIL'};  "
            f"P[X>(1+eps)E]={upper:.5f} <= {bound_upper:.5f} : "
            f"{'PASS' if ok_upper else 'FAIL'}"
        )
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="littlestone",
        description="Exact optimal online prediction: dimensions, learners, adversaries.",
    )
    parser.add_argument("--seed", type=int, default=0, help="base RNG seed (default 0)")
    parser.add_argument(
        "--budget-states",
        type=int,
        default=None,
        help="cap on dynamic-programming states before aborting with exit code 3",
    )
    parser.add_argument("--out", default=None, help="write primary output to this file")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dim", help="Littlestone dimensions of a class file")
    p.add_argument("class_file")
    p.add_argument("--mode", choices=["det", "rand"], default="rand")
    p.add_argument("--horizon", type=int, default=None)
    p.add_argument("--json", action="store_true", help="emit the result as a JSON record")
    p.set_defaults(func=cmd_dim)

    p = sub.add_parser("experts", help="expert-advice quantities for (n, k)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--what", choices=["dim", "D", "dstar", "up"], default="dim")
    p.add_argument("--beta", default=None)
    p.add_argument("--horizon", type=int, default=None)
    p.set_defaults(func=cmd_experts)

    p = sub.add_parser("tables", help="emit CSV tables")
    p.add_argument("--kind", choices=["mstar2", "dnk", "proper"], required=True)
    p.add_argument("--max-k", type=int, default=8)
    p.add_argument("--max-n", type=int, default=10)
    p.add_argument("--n-list", default="2,4")
    p.set_defaults(func=cmd_tables)

    p = sub.add_parser("play", help="run learner-vs-adversary games")
    p.add_argument("--class-file", default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--learner", required=True)
    p.add_argument(
        "--adversary", choices=["branch", "threshold", "optimal", "proper"], required=True
    )
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--max-rounds", type=int, default=None)
    p.add_argument("--horizon", type=int, default=None)
    p.add_argument("--slack", default="1/16")
    p.set_defaults(func=cmd_play)

    p = sub.add_parser("tree", help="extract or analyze adversary trees")
    tree_sub = p.add_subparsers(dest="tree_command", required=True)
    pe = tree_sub.add_parser("extract")
    pe.add_argument("class_file")
    pe.add_argument("--horizon", type=int, default=None)
    pe.add_argument("--slack", default="1/16")
    pe.set_defaults(func=cmd_tree_extract)
    pa = tree_sub.add_parser("analyze")
    pa.add_argument("tree_file")
    pa.add_argument("--class-file", default=None)
    pa.set_defaults(func=cmd_tree_analyze)

    p = sub.add_parser("check", help="statistical checks")
    check_sub = p.add_subparsers(dest="check_command", required=True)
    pc = check_sub.add_parser("concentration")
    pc.add_argument("--n", type=int, default=2)
    pc.add_argument("--k", type=int, default=5)
    pc.add_argument("--slack", default="1/64")
    pc.add_argument("--samples", type=int, default=100_000)
    pc.add_argument("--eps", default="0.1,0.2,0.3")
    pc.set_defaults(func=cmd_check_concentration)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ComputeBudgetError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except (
        ClassFileError,
        UnknownInstanceError,
        AdversaryPreconditionError,
        NotQuasiBalancedError,
        GameProtocolError,
        EmptyVersionSpaceError,
        HorizonExhaustedError,
        UnrealizableSequenceError,
        FileNotFoundError,
        ValueError,
    ) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
