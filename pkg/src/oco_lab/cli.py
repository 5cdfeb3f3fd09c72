"""Command-line harness: single runs, sweeps, bandit trials, verification."""

import argparse
import sys

from .adversaries import BANDIT_KINDS, FULL_INFO_KINDS, make_adversary
from .geometry import BallSpec
from .harness import LEARNER_IDS, load_sweep_config, make_learner, run_bandit, run_full_info, sweep, write_trace_csv


def _add_problem_flags(parser, bandit=False):
    parser.add_argument("--p", type=float, required=True, help="ball exponent")
    parser.add_argument("--d", type=int, required=True, help="ambient dimension")
    parser.add_argument("--horizon", type=int, required=True, help="number of rounds T")
    parser.add_argument("--lipschitz", type=float, default=1.0, help="subgradient budget L")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default=None, help="CSV output path")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="oco-lab", description="online convex optimization on lp-balls")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="one full-information game")
    p_run.add_argument("--learner", required=True, choices=LEARNER_IDS)
    p_run.add_argument("--adversary", required=True, choices=FULL_INFO_KINDS)
    _add_problem_flags(p_run)

    p_sweep = sub.add_parser("sweep", help="grid of games from a config file")
    p_sweep.add_argument("--config", required=True)

    p_bandit = sub.add_parser("bandit", help="Monte-Carlo bandit trials")
    p_bandit.add_argument("--env", required=True, choices=BANDIT_KINDS)
    p_bandit.add_argument("--learner", required=True, choices=("uniform-random", "oracle"))
    p_bandit.add_argument("--trials", type=int, required=True)
    p_bandit.add_argument("--delta", type=float, default=0.01)
    _add_problem_flags(p_bandit, bandit=True)

    p_verify = sub.add_parser("verify", help="run the full acceptance suite")
    p_verify.add_argument("--only", type=int, nargs="*", default=None, help="criterion indices to run")

    args = parser.parse_args(argv)

    if args.command == "run":
        spec = BallSpec(d=args.d, p=args.p, L=args.lipschitz)
        learner = make_learner(args.learner, spec)
        adversary = make_adversary(args.adversary, spec, args.horizon, seed=args.seed, schedule_view=learner.schedule_view())
        trace = run_full_info(learner, adversary, spec, args.horizon, seed=args.seed)
        if args.out:
            write_trace_csv(trace, args.out)
        for warning in trace.warnings:
            print(f"note: {warning}")
        bound = trace.rows[-1].bound if trace.rows else float("nan")
        print(f"{trace.run_id}: regret={trace.regret!r} bound={bound!r}")
        return 0

    if args.command == "sweep":
        config = load_sweep_config(args.config)
        out = sweep(config)
        print(f"wrote {out}")
        return 0

    if args.command == "bandit":
        spec = BallSpec(d=args.d, p=args.p, L=args.lipschitz)
        env = make_adversary(args.env, spec, args.horizon, seed=args.seed, delta=args.delta)
        result = run_bandit(env, args.learner, trials=args.trials, seed=args.seed)
        for warning in result.warnings:
            print(f"note: {warning}")
        print(f"pseudo-regret mean={result.mean!r} stderr={result.stderr!r} trials={result.trials} budget-violations={result.budget_violations}")
        if args.out:
            with open(args.out, "w") as fh:
                fh.write("trial,pseudo_regret\n")
                for i, v in enumerate(result.per_trial):
                    fh.write(f"{i},{v!r}\n")
        return 0

    if args.command == "verify":
        from .acceptance import run_all

        results = run_all(indices=set(args.only) if args.only else None)
        failed = 0
        for res in results:
            status = "PASS" if res.passed else "FAIL"
            print(f"[{status}] {res.index:2d} {res.name}: {res.detail}")
            failed += 0 if res.passed else 1
        print(f"{len(results) - failed}/{len(results)} criteria passed")
        return 0 if failed == 0 else 1

    return 2


if __name__ == "__main__":
    sys.exit(main())
