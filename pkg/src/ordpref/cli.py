"""Command line front end.

Subcommands:

* ``run``           learning curves for the three models on synthetic tier data
* ``compare-theta`` cautious-model curves under the true family vs the learned union
* ``theta-min``     simplest compatible families for a preference file
* ``dominate``      cautious verdict for one pair under a given family

Preference files hold one pair per line as ``A>B`` in the bit-string
encoding (leftmost character = attribute 1).  Exit codes: 0 success,
2 validation error, 3 search budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from ordpref.core import (
    Alternative,
    DimensionError,
    ModelError,
    PreferenceError,
    PreferenceSet,
    SubsetFamily,
)
from ordpref.experiments import (
    Mode,
    TrialConfig,
    compare_theta_sources,
    emit_curves,
    run_trial,
)
from ordpref.lp_engine import dominance, is_representable
from ordpref.synth import GeneratorConfig
from ordpref.theta_search import SearchBudgetError, SearchLimits, build_theta_min

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_BUDGET = 3


class _CliError(Exception):
    """Validation failure with a user-facing message."""


def _read_preferences(path: str) -> PreferenceSet:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise _CliError(f"cannot read preference file: {exc}") from exc
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise _CliError(f"no preference pairs in {path}")
    try:
        return PreferenceSet.from_strings(lines)
    except (ValueError, DimensionError) as exc:
        raise _CliError(str(exc)) from exc


def _parse_theta(text: str, n: int) -> SubsetFamily:
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if not parts:
        raise _CliError("empty family: pass subsets like 1,3,1+2")
    try:
        return SubsetFamily.from_strings(parts, n)
    except (ValueError, DimensionError, ModelError) as exc:
        raise _CliError(str(exc)) from exc


def _trial_config(args: argparse.Namespace) -> TrialConfig:
    mode = Mode.KNOWN_THETA if args.mode == "known" else Mode.LEARNED_THETA
    try:
        gen = GeneratorConfig(
            n=args.n,
            alpha=args.alpha,
            p=args.p,
            sigma=args.sigma,
            tiers=args.tiers,
            seed=args.seed,
        )
        return TrialConfig(
            generator=gen,
            budget=args.budget,
            tier_functions=args.reps,
            mode=mode,
            search_limits=SearchLimits(max_nodes=args.max_nodes),
        )
    except ValueError as exc:
        raise _CliError(str(exc)) from exc


def _emit(result, out: str | None) -> None:
    if out is None:
        final = result.points[-1]
        for name in sorted(final.models):
            s = final.models[name]
            acr = "n/a" if s.acr_mean is None else f"{s.acr_mean:.4f}"
            print(
                f"step {final.step} {name}: T={s.t_mean:.2f} "
                f"C={s.c_mean:.2f} W={s.w_mean:.2f} ACR={acr}"
            )
        if result.excluded_repetitions:
            print(f"excluded repetitions: {result.excluded_repetitions}")
        return
    fmt = "json" if out.endswith(".json") else "csv"
    emit_curves(result, out, fmt)
    print(f"wrote {out}")


def _cmd_run(args: argparse.Namespace) -> int:
    result = run_trial(_trial_config(args))
    _emit(result, args.out)
    return EXIT_OK


def _cmd_compare_theta(args: argparse.Namespace) -> int:
    result = compare_theta_sources(_trial_config(args))
    _emit(result, args.out)
    return EXIT_OK


def _cmd_theta_min(args: argparse.Namespace) -> int:
    prefs = _read_preferences(args.prefs)
    limits = SearchLimits(max_nodes=args.max_nodes)
    try:
        result = build_theta_min(prefs, limits=limits)
    except PreferenceError as exc:
        raise _CliError(str(exc)) from exc
    except SearchBudgetError as exc:
        print(f"search budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    if args.json:
        print(json.dumps(result.to_json_dict(), indent=2, sort_keys=True))
        return EXIT_OK
    for i, family in enumerate(result.families, start=1):
        print(f"family {i}: {{{', '.join(family.to_strings())}}}")
    print(f"union: {{{', '.join(result.unifying.to_strings())}}}")
    print(f"nodes: {result.stats.nodes}  lp solves: {result.stats.lp_solves}")
    return EXIT_OK


def _cmd_dominate(args: argparse.Namespace) -> int:
    prefs = _read_preferences(args.prefs)
    n = prefs.n
    try:
        first = Alternative.from_string(args.first)
        second = Alternative.from_string(args.second)
    except (ValueError, DimensionError) as exc:
        raise _CliError(str(exc)) from exc
    if n is not None and (first.n != n or second.n != n):
        raise _CliError(
            f"pair width {first.n}/{second.n} does not match preferences ({n})"
        )
    theta = _parse_theta(args.theta, first.n)
    if not is_representable(theta, prefs):
        raise _CliError("family cannot represent the observed preferences")
    verdict = dominance(theta, prefs, first, second)
    print(verdict.direction.value)
    return EXIT_OK


def _add_trial_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--n", type=int, default=5, help="attribute count")
    sub.add_argument("--alpha", type=float, default=0.3, help="interaction share")
    sub.add_argument("--p", type=float, default=0.7, help="subset growth stop probability")
    sub.add_argument("--sigma", type=float, default=100.0, help="utility spread")
    sub.add_argument("--tiers", type=int, default=10, help="tier count")
    sub.add_argument("--budget", type=int, default=25, help="assignments per repetition")
    sub.add_argument(
        "--mode", choices=("known", "learned"), default="known",
        help="family handed to the models: generator's own, or learned union",
    )
    sub.add_argument("--reps", type=int, default=10, help="tier functions to average over")
    sub.add_argument("--seed", type=int, default=0, help="root seed")
    sub.add_argument("--out", default=None, help="output file (.csv or .json)")
    sub.add_argument(
        "--max-nodes", type=int, default=100_000,
        help="search node budget for learned mode",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ordpref",
        description="Cautious preference learning over binary-attribute alternatives.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    run = subs.add_parser("run", help="learning curves for ord/lpm/svm")
    _add_trial_flags(run)
    run.set_defaults(func=_cmd_run)

    cmp_ = subs.add_parser(
        "compare-theta", help="cautious curves: true family vs learned union"
    )
    _add_trial_flags(cmp_)
    cmp_.set_defaults(func=_cmd_compare_theta)

    tmin = subs.add_parser("theta-min", help="simplest compatible families")
    tmin.add_argument("--prefs", required=True, help="preference file, one A>B per line")
    tmin.add_argument("--max-nodes", type=int, default=100_000, help="search node budget")
    tmin.add_argument("--json", action="store_true", help="emit JSON instead of text")
    tmin.set_defaults(func=_cmd_theta_min)

    dom = subs.add_parser("dominate", help="cautious verdict for one pair")
    dom.add_argument("--prefs", required=True, help="preference file, one A>B per line")
    dom.add_argument(
        "--theta", required=True,
        help="comma-separated subsets, e.g. 1,2,3 or 1,2,1+2+3",
    )
    dom.add_argument("--first", required=True, help="first alternative, bit string")
    dom.add_argument("--second", required=True, help="second alternative, bit string")
    dom.set_defaults(func=_cmd_dominate)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except SearchBudgetError as exc:
        print(f"search budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
