"""Learning-curve experiments: tier reveals in, prediction quality out.

One repetition samples a ground-truth model and tier function, reveals
alternatives one at a time, and after each reveal scores every model on
sampled test pairs.  A pair scores toward the inferred count T only when
it is not already observed and the model commits to a direction; the
commitment is correct or wrong by the true tier order, and tier ties
count in T alone.  Curves aggregate repetition means with normal 95%
confidence half-widths.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from ordpref.core import (
    Alternative,
    AttributeUniverse,
    PreferenceSet,
    SubsetFamily,
    preferences_from_tiers,
)
from ordpref.baselines import (
    SvmConfig,
    lpm_fit,
    lpm_predict,
    svm_fit,
    svm_predict,
    svm_rows,
)
from ordpref.lp_engine import Direction, predict_pairs
from ordpref.synth import (
    GeneratorConfig,
    build_tier_function,
    sample_theta,
    sample_utilities,
)
from ordpref.theta_search import SearchBudgetError, SearchLimits, build_theta_min

MODEL_ORD = "ord"
MODEL_LPM = "lpm"
MODEL_SVM = "svm"


class Mode(str, Enum):
    KNOWN_THETA = "known"
    LEARNED_THETA = "learned"


@dataclass(frozen=True)
class TrialConfig:
    generator: GeneratorConfig
    budget: int = 25
    test_size: int = 10
    tier_functions: int = 10
    test_resamples: int = 5
    mode: Mode = Mode.KNOWN_THETA
    models: tuple[str, ...] = (MODEL_ORD, MODEL_LPM, MODEL_SVM)
    svm: SvmConfig = field(default_factory=SvmConfig)
    search_limits: SearchLimits = field(default_factory=SearchLimits)
    solver: str = "dense"

    def __post_init__(self) -> None:
        if self.budget < 1:
            raise ValueError("budget must be at least 1")
        if self.test_size < 2:
            raise ValueError("need at least two test alternatives to form a pair")
        if self.test_size > 1 << self.generator.n:
            raise ValueError("test sample larger than the universe")
        if self.budget > 1 << self.generator.n:
            raise ValueError("budget larger than the universe")
        unknown = set(self.models) - {MODEL_ORD, MODEL_LPM, MODEL_SVM}
        if unknown:
            raise ValueError(f"unknown models: {sorted(unknown)}")


@dataclass(frozen=True)
class ModelStats:
    """Mean counts for one model at one step, across repetition units."""

    t_mean: float
    c_mean: float
    w_mean: float
    acr_mean: float | None
    t_ci: float
    acr_ci: float | None
    units: int
    acr_units: int


@dataclass(frozen=True)
class CurvePoint:
    step: int
    models: dict[str, ModelStats]


@dataclass(frozen=True)
class TrialResult:
    points: tuple[CurvePoint, ...]
    excluded_repetitions: int = 0


def _half_width(values: Sequence[float]) -> float:
    if len(values) < 2:
        return 0.0
    return 1.96 * float(np.std(values, ddof=1)) / math.sqrt(len(values))


def _aggregate(
    steps: int, model_names: Sequence[str], raw: dict
) -> tuple[CurvePoint, ...]:
    # raw[(step, model)] = list of (T, C, W) per repetition unit
    points = []
    for step in range(1, steps + 1):
        stats = {}
        for name in model_names:
            units = raw[(step, name)]
            ts = [float(t) for t, _, _ in units]
            cs = [float(c) for _, c, _ in units]
            ws = [float(w) for _, _, w in units]
            acrs = [c / t for t, c, _ in units if t > 0]
            stats[name] = ModelStats(
                t_mean=float(np.mean(ts)) if ts else 0.0,
                c_mean=float(np.mean(cs)) if cs else 0.0,
                w_mean=float(np.mean(ws)) if ws else 0.0,
                acr_mean=float(np.mean(acrs)) if acrs else None,
                t_ci=_half_width(ts),
                acr_ci=_half_width(acrs) if acrs else None,
                units=len(units),
                acr_units=len(acrs),
            )
        points.append(CurvePoint(step, stats))
    return tuple(points)


@dataclass
class _Repetition:
    """One sampled decision maker plus its reveal order and test samples."""

    tier_of: dict[int, int]
    theta_true: SubsetFamily
    reveal: list[Alternative]
    samples: list[list[Alternative]]
    assignments: list[tuple[Alternative, int]]


def _sample_repetition(config: TrialConfig, seed: np.random.SeedSequence) -> _Repetition:
    gen = config.generator
    model_rng, reveal_rng, test_rng = (
        np.random.default_rng(s) for s in seed.spawn(3)
    )
    theta = sample_theta(gen, model_rng)
    utilities = sample_utilities(theta, gen.sigma, model_rng)
    tier_fn = build_tier_function(theta, utilities, gen.tiers)
    universe = AttributeUniverse(gen.n).alternatives()
    reveal_idx = reveal_rng.permutation(len(universe))[: config.budget]
    reveal = [universe[i] for i in reveal_idx]
    samples = []
    for _ in range(config.test_resamples):
        picked = test_rng.choice(len(universe), size=config.test_size, replace=False)
        samples.append([universe[i] for i in picked])
    tier_of = {alt.bits: tier_fn.assign(alt) for alt in universe}
    assignments = [(alt, tier_of[alt.bits]) for alt in reveal]
    return _Repetition(tier_of, theta, reveal, samples, assignments)


def _pair_pool(
    samples: Iterable[Sequence[Alternative]],
) -> dict[tuple[int, int], tuple[Alternative, Alternative]]:
    pool: dict[tuple[int, int], tuple[Alternative, Alternative]] = {}
    for sample in samples:
        for i in range(len(sample)):
            for j in range(i + 1, len(sample)):
                a, b = sample[i], sample[j]
                key = (min(a.bits, b.bits), max(a.bits, b.bits))
                pool.setdefault(key, (a, b))
    return pool


def _flip(direction: Direction) -> Direction:
    if direction is Direction.PREFER_FIRST:
        return Direction.PREFER_SECOND
    if direction is Direction.PREFER_SECOND:
        return Direction.PREFER_FIRST
    return direction


def _ord_directions(
    theta: SubsetFamily,
    prefs: PreferenceSet,
    pool: dict[tuple[int, int], tuple[Alternative, Alternative]],
    committed: dict[tuple[int, int], Direction] | None,
    solver: str = "dense",
) -> dict[tuple[int, int], Direction]:
    """Cautious verdicts per pooled pair; observed pairs are left out.

    ``committed`` carries directions settled at earlier steps; under a
    fixed family those can only persist as observations accumulate, so
    they are reused rather than re-solved.
    """
    observed = {(a.bits, b.bits) for a, b in prefs} | {
        (b.bits, a.bits) for a, b in prefs
    }
    out: dict[tuple[int, int], Direction] = {}
    todo = []
    for key, (a, b) in pool.items():
        if key in observed:
            continue
        if committed is not None and key in committed:
            out[key] = committed[key]
            continue
        todo.append((a, b))
    verdicts = predict_pairs(theta, prefs, todo, solver=solver)
    for (a, b), verdict in verdicts.items():
        key = (min(a.bits, b.bits), max(a.bits, b.bits))
        direction = verdict.direction if a.bits <= b.bits else _flip(verdict.direction)
        if direction is not Direction.NO_PREDICTION:
            out[key] = direction
            if committed is not None:
                committed[key] = direction
    return out


def _score(
    sample: Sequence[Alternative],
    directions: dict[tuple[int, int], Direction],
    observed: set[tuple[int, int]],
    tier_of: dict[int, int],
) -> tuple[int, int, int]:
    t = c = w = 0
    for i in range(len(sample)):
        for j in range(i + 1, len(sample)):
            a, b = sample[i], sample[j]
            if (a.bits, b.bits) in observed:
                continue
            key = (min(a.bits, b.bits), max(a.bits, b.bits))
            direction = directions.get(key)
            if direction is None or direction is Direction.NO_PREDICTION:
                continue
            lo, hi = sorted((a.bits, b.bits))
            winner = lo if direction is Direction.PREFER_FIRST else hi
            loser = hi if winner == lo else lo
            t += 1
            if tier_of[winner] > tier_of[loser]:
                c += 1
            elif tier_of[winner] < tier_of[loser]:
                w += 1
    return t, c, w


def _point_directions(
    predict, pool: dict[tuple[int, int], tuple[Alternative, Alternative]]
) -> dict[tuple[int, int], Direction]:
    out = {}
    for key, (a, b) in pool.items():
        direction = predict(a, b)
        if a.bits > b.bits:
            direction = _flip(direction)
        if direction is not Direction.NO_PREDICTION:
            out[key] = direction
    return out


def _learned_family(
    prefs: PreferenceSet, limits: SearchLimits, solver: str = "dense"
) -> SubsetFamily:
    if not len(prefs):
        return SubsetFamily.of(())
    return build_theta_min(prefs, limits, solver=solver).unifying


def run_trial(config: TrialConfig) -> TrialResult:
    """Learning curves for the configured models.

    In known-family mode every model sees the generator's family; in
    learned mode all of them see the union of the simplest compatible
    families, recomputed after every reveal.  Repetitions whose search
    exhausts its budget are dropped and counted.
    """
    root = np.random.SeedSequence(config.generator.seed)
    raw: dict = {
        (step, name): []
        for step in range(1, config.budget + 1)
        for name in config.models
    }
    excluded = 0
    for rep_seed in root.spawn(config.tier_functions):
        rep = _sample_repetition(config, rep_seed)
        pool = _pair_pool(rep.samples)
        committed: dict[tuple[int, int], Direction] | None = (
            {} if config.mode is Mode.KNOWN_THETA else None
        )
        try:
            rep_rows = _run_steps(config, rep, pool, committed)
        except SearchBudgetError:
            excluded += 1
            continue
        for key, units in rep_rows.items():
            raw[key].extend(units)
    points = _aggregate(config.budget, config.models, raw)
    return TrialResult(points, excluded)


def _run_steps(config, rep, pool, committed):
    rows: dict = {
        (step, name): []
        for step in range(1, config.budget + 1)
        for name in config.models
    }
    for step in range(1, config.budget + 1):
        prefs = preferences_from_tiers(rep.assignments[:step])
        if config.mode is Mode.KNOWN_THETA:
            theta = rep.theta_true
        else:
            theta = _learned_family(prefs, config.search_limits, config.solver)
        observed = {(a.bits, b.bits) for a, b in prefs} | {
            (b.bits, a.bits) for a, b in prefs
        }
        directions: dict[str, dict] = {}
        if MODEL_ORD in config.models:
            directions[MODEL_ORD] = _ord_directions(
                theta, prefs, pool, committed, config.solver
            )
        if MODEL_LPM in config.models:
            model = lpm_fit(theta, prefs)
            directions[MODEL_LPM] = _point_directions(
                lambda a, b: lpm_predict(model, a, b).direction, pool
            )
        if MODEL_SVM in config.models:
            clf = svm_fit(svm_rows(theta, prefs), config.svm)
            directions[MODEL_SVM] = _point_directions(
                lambda a, b: svm_predict(clf, theta, a, b).direction, pool
            )
        for name in config.models:
            for sample in rep.samples:
                rows[(step, name)].append(
                    _score(sample, directions[name], observed, rep.tier_of)
                )
    return rows


def compare_theta_sources(config: TrialConfig) -> TrialResult:
    """Cautious-model curves under the true family versus the learned union.

    Output models are keyed "ord_true" and "ord_learned"; sampling is
    shared so the curves differ only in the family handed to the solver.
    """
    root = np.random.SeedSequence(config.generator.seed)
    names = ("ord_true", "ord_learned")
    raw: dict = {
        (step, name): []
        for step in range(1, config.budget + 1)
        for name in names
    }
    excluded = 0
    for rep_seed in root.spawn(config.tier_functions):
        rep = _sample_repetition(config, rep_seed)
        pool = _pair_pool(rep.samples)
        committed: dict[tuple[int, int], Direction] = {}
        rep_rows: dict = {key: [] for key in raw}
        try:
            for step in range(1, config.budget + 1):
                prefs = preferences_from_tiers(rep.assignments[:step])
                learned = _learned_family(prefs, config.search_limits, config.solver)
                observed = {(a.bits, b.bits) for a, b in prefs} | {
                    (b.bits, a.bits) for a, b in prefs
                }
                for name, theta, cache in (
                    ("ord_true", rep.theta_true, committed),
                    ("ord_learned", learned, None),
                ):
                    dirs = _ord_directions(theta, prefs, pool, cache, config.solver)
                    for sample in rep.samples:
                        rep_rows[(step, name)].append(
                            _score(sample, dirs, observed, rep.tier_of)
                        )
        except SearchBudgetError:
            excluded += 1
            continue
        for key, units in rep_rows.items():
            raw[key].extend(units)
    points = _aggregate(config.budget, names, raw)
    return TrialResult(points, excluded)


def emit_curves(result: TrialResult, path: str | Path, fmt: str = "csv") -> Path:
    """Write curve data deterministically; columns step, model, T, C, W, ACR, ci."""
    path = Path(path)
    if fmt == "csv":
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["step", "model", "T", "C", "W", "ACR", "ci"])
            for point in result.points:
                for name in sorted(point.models):
                    s = point.models[name]
                    writer.writerow(
                        [
                            point.step,
                            name,
                            repr(s.t_mean),
                            repr(s.c_mean),
                            repr(s.w_mean),
                            "" if s.acr_mean is None else repr(s.acr_mean),
                            "" if s.acr_ci is None else repr(s.acr_ci),
                        ]
                    )
    elif fmt == "json":
        payload = {
            "excluded_repetitions": result.excluded_repetitions,
            "points": [
                {
                    "step": point.step,
                    "models": {
                        name: {
                            "T": s.t_mean,
                            "C": s.c_mean,
                            "W": s.w_mean,
                            "ACR": s.acr_mean,
                            "ci": s.acr_ci,
                            "T_ci": s.t_ci,
                            "units": s.units,
                            "acr_units": s.acr_units,
                        }
                        for name, s in sorted(point.models.items())
                    },
                }
                for point in result.points
            ],
        }
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return path


def read_curves(path: str | Path):
    """Parse emit_curves output back into rows (CSV) or a dict (JSON)."""
    path = Path(path)
    if path.suffix == ".json":
        return json.loads(path.read_text())
    with path.open() as fh:
        rows = []
        for record in csv.DictReader(fh):
            rows.append(
                {
                    "step": int(record["step"]),
                    "model": record["model"],
                    "T": float(record["T"]),
                    "C": float(record["C"]),
                    "W": float(record["W"]),
                    "ACR": None if record["ACR"] == "" else float(record["ACR"]),
                    "ci": None if record["ci"] == "" else float(record["ci"]),
                }
            )
        return rows
