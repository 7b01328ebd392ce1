"""Linear programs behind compatibility, certificates, and cautious dominance.

Given a subset family theta and strict preferences R, the compatible
utilities are those whose additive score separates every observed pair by
at least a fixed positive margin.  Everything downstream is a linear
program over that polyhedron:

* feasibility: minimize total violation slack; zero means some utility
  explains all of R under theta,
* certificate: when nothing does, a dual weighting of the pairs whose
  indicator differences cancel on every member subset,
* dominance: a pair is predicted only when every compatible utility
  agrees on its order.

Solving goes through one facade so the floating-point backend (HiGHS via
scipy) can be swapped for an exact-rational simplex on small instances.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.optimize import linprog

from ordpref import _dense
from ordpref.core import (
    Alternative,
    AttributeSubset,
    PreferenceSet,
    SubsetFamily,
    UtilityMap,
    _reachability,
    indicator,
    transitive_reduction,
)

EPS_FEAS = 1e-7
EPS_DOM = 1e-7


class SolverError(RuntimeError):
    """The LP backend returned an unexpected status."""


class EmptyPolyhedronError(ValueError):
    """No utility is compatible with the given family and preferences."""


class LpStatus(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class Variable:
    name: str
    lower: float | None = None
    upper: float | None = None


@dataclass(frozen=True)
class Constraint:
    coeffs: tuple[float, ...]
    relation: str  # "<=", ">=", or "=="
    rhs: float

    def __post_init__(self) -> None:
        if self.relation not in ("<=", ">=", "=="):
            raise ValueError(f"unknown relation {self.relation!r}")


@dataclass(frozen=True)
class LpProblem:
    variables: tuple[Variable, ...]
    constraints: tuple[Constraint, ...]
    objective: tuple[float, ...]
    sense: str  # "min" or "max"

    def __post_init__(self) -> None:
        if self.sense not in ("min", "max"):
            raise ValueError(f"unknown sense {self.sense!r}")
        if len(self.objective) != len(self.variables):
            raise ValueError("objective length must match variable count")
        for con in self.constraints:
            if len(con.coeffs) != len(self.variables):
                raise ValueError("constraint width must match variable count")

    def to_lp_text(self) -> str:
        """Debug dump in LP text format (names sanitized for the format)."""

        def clean(name: str) -> str:
            return name.replace("+", "_")

        def side(coeffs: Sequence[float]) -> str:
            terms = []
            for c, v in zip(coeffs, self.variables):
                if c == 0:
                    continue
                sign = "-" if c < 0 else "+"
                terms.append(f"{sign} {abs(c):g} {clean(v.name)}")
            if not terms:
                return "0"
            first = terms[0].removeprefix("+ ")
            return " ".join([first] + terms[1:])

        lines = ["Minimize" if self.sense == "min" else "Maximize"]
        lines.append(f" obj: {side(self.objective)}")
        lines.append("Subject To")
        rel_text = {"<=": "<=", ">=": ">=", "==": "="}
        for i, con in enumerate(self.constraints):
            lines.append(f" c{i}: {side(con.coeffs)} {rel_text[con.relation]} {con.rhs:g}")
        lines.append("Bounds")
        for v in self.variables:
            if v.lower is None and v.upper is None:
                lines.append(f" {clean(v.name)} free")
            elif v.upper is None:
                lines.append(f" {v.lower:g} <= {clean(v.name)}")
            else:
                lines.append(f" {0 if v.lower is None else v.lower:g} <= {clean(v.name)} <= {v.upper:g}")
        lines.append("End")
        return "\n".join(lines)


@dataclass(frozen=True)
class LpOutcome:
    status: LpStatus
    objective: float | None
    x: tuple[float, ...] | None


def solve_lp(problem: LpProblem, solver: str = "highs") -> LpOutcome:
    """Solve through the chosen backend: "highs" (float) or "exact" (rational)."""
    if solver == "exact":
        from ordpref import _exact

        return _exact.solve_exact(problem)
    if solver != "highs":
        raise ValueError(f"unknown solver {solver!r}")

    sense = 1.0 if problem.sense == "min" else -1.0
    c = sense * np.array(problem.objective, dtype=float)
    a_ub, b_ub, a_eq, b_eq = [], [], [], []
    for con in problem.constraints:
        row = np.array(con.coeffs, dtype=float)
        if con.relation == "<=":
            a_ub.append(row)
            b_ub.append(con.rhs)
        elif con.relation == ">=":
            a_ub.append(-row)
            b_ub.append(-con.rhs)
        else:
            a_eq.append(row)
            b_eq.append(con.rhs)
    bounds = [(v.lower, v.upper) for v in problem.variables]

    def _run(**options):
        return linprog(
            c,
            A_ub=np.array(a_ub) if a_ub else None,
            b_ub=np.array(b_ub) if b_ub else None,
            A_eq=np.array(a_eq) if a_eq else None,
            b_eq=np.array(b_eq) if b_eq else None,
            bounds=bounds,
            method="highs",
            options=options or None,
        )

    res = _run()
    if res.status == 2:
        # presolve cannot always tell infeasible from unbounded; the slow
        # path settles it
        res = _run(presolve=False)
    if res.status == 0:
        return LpOutcome(LpStatus.OPTIMAL, sense * float(res.fun), tuple(res.x))
    if res.status == 2:
        return LpOutcome(LpStatus.INFEASIBLE, None, None)
    if res.status == 3:
        return LpOutcome(LpStatus.UNBOUNDED, None, None)
    raise SolverError(f"backend failure: {res.message}")


def _score_row(theta: SubsetFamily, alt: Alternative) -> list[float]:
    return [float(indicator(alt, s)) for s in theta]


def _diff_row(theta: SubsetFamily, first: Alternative, second: Alternative) -> list[float]:
    return [
        float(indicator(first, s) - indicator(second, s)) for s in theta
    ]


def _utility_vars(theta: SubsetFamily) -> tuple[Variable, ...]:
    return tuple(Variable(f"u_{s.to_string()}") for s in theta)


def build_p1(
    theta: SubsetFamily, prefs: PreferenceSet | Sequence, rhs: float = 1.0
) -> LpProblem:
    """Constraint system for the compatible-utility polyhedron.

    One row per observed pair: the weighted indicator difference must be at
    least ``rhs``.  Any positive ``rhs`` carves out the same utilities up to
    scaling, which is what makes dominance insensitive to the choice.
    """
    if rhs <= 0:
        raise ValueError("margin must be strictly positive")
    variables = _utility_vars(theta)
    constraints = tuple(
        Constraint(tuple(_diff_row(theta, a, b)), ">=", rhs) for a, b in prefs
    )
    return LpProblem(variables, constraints, (0.0,) * len(variables), "min")


@dataclass(frozen=True)
class FeasibilityFit:
    """Result of minimizing total violation slack over theta and R."""

    optimum: float
    utilities: UtilityMap
    slacks: tuple[float, ...]


def solve_feasibility(
    theta: SubsetFamily,
    prefs: PreferenceSet | Sequence,
    rhs: float = 1.0,
    solver: str = "highs",
) -> FeasibilityFit:
    """Minimize the total margin shortfall across all observed pairs.

    A zero optimum means some utility over theta reproduces every pair.
    The attained utilities are returned either way (baselines use them as
    a point estimate even when inconsistent).
    """
    pairs = list(prefs)
    m = len(theta)
    if not pairs:
        return FeasibilityFit(0.0, UtilityMap(theta, (0.0,) * m), ())
    variables = _utility_vars(theta) + tuple(
        Variable(f"e_{k}", lower=0.0) for k in range(len(pairs))
    )
    constraints = []
    for k, (a, b) in enumerate(pairs):
        coeffs = _diff_row(theta, a, b) + [0.0] * len(pairs)
        coeffs[m + k] = 1.0
        constraints.append(Constraint(tuple(coeffs), ">=", rhs))
    objective = (0.0,) * m + (1.0,) * len(pairs)
    outcome = solve_lp(
        LpProblem(variables, tuple(constraints), objective, "min"), solver
    )
    if outcome.status is not LpStatus.OPTIMAL:
        raise SolverError(f"slack minimization cannot be {outcome.status.value}")
    x = outcome.x or ()
    return FeasibilityFit(
        float(outcome.objective or 0.0),
        UtilityMap(theta, x[:m]),
        tuple(x[m:]),
    )


def is_representable(
    theta: SubsetFamily,
    prefs: PreferenceSet | Sequence,
    eps: float = EPS_FEAS,
    solver: str = "highs",
) -> bool:
    """Whether some utility over theta reproduces every observed pair."""
    pairs = list(prefs)
    if not pairs:
        return True
    return solve_feasibility(theta, pairs, solver=solver).optimum <= eps


@dataclass(frozen=True)
class Certificate:
    """Dual weighting of observed pairs witnessing incompatibility.

    Weights lie in [0, 1] and cancel the indicator differences of every
    member subset.  A strictly positive total marks theta as unable to
    represent the pairs; the implicated pairs carry positive weight.
    """

    pairs: tuple[tuple[Alternative, Alternative], ...]
    weights: tuple[float, ...]
    objective: float
    support_eps: float = EPS_FEAS

    @property
    def implicated(self) -> tuple[tuple[Alternative, Alternative], ...]:
        return tuple(
            p for p, w in zip(self.pairs, self.weights) if w > self.support_eps
        )

    def weighted_imbalance(self, subset: AttributeSubset) -> float:
        return sum(
            w * (indicator(a, subset) - indicator(b, subset))
            for (a, b), w in zip(self.pairs, self.weights)
        )


def dual_certificate(
    theta: SubsetFamily,
    prefs: PreferenceSet | Sequence,
    eps: float = EPS_FEAS,
    solver: str = "highs",
) -> Certificate:
    """Maximize total pair weight subject to zero imbalance on every member.

    The optimum exceeds zero exactly when theta cannot represent the pairs,
    so this one solve doubles as a representability test plus witness.
    """
    pairs = list(prefs)
    if not pairs:
        return Certificate((), (), 0.0, eps)
    variables = tuple(
        Variable(f"lam_{k}", lower=0.0, upper=1.0) for k in range(len(pairs))
    )
    constraints = tuple(
        Constraint(
            tuple(float(indicator(a, s) - indicator(b, s)) for a, b in pairs),
            "==",
            0.0,
        )
        for s in theta
    )
    outcome = solve_lp(
        LpProblem(variables, constraints, (1.0,) * len(pairs), "max"), solver
    )
    if outcome.status is not LpStatus.OPTIMAL:
        raise SolverError(f"certificate program cannot be {outcome.status.value}")
    weights = tuple(min(1.0, max(0.0, w)) for w in (outcome.x or ()))
    return Certificate(tuple(pairs), weights, float(outcome.objective or 0.0), eps)


def breaks_certificate(
    subset: AttributeSubset, certificate: Certificate, eps: float = EPS_FEAS
) -> bool:
    """Whether adding this subset would invalidate the incompatibility witness."""
    return abs(certificate.weighted_imbalance(subset)) > eps


class Direction(str, Enum):
    PREFER_FIRST = "prefer_first"
    PREFER_SECOND = "prefer_second"
    NO_PREDICTION = "no_prediction"


@dataclass(frozen=True)
class DominanceVerdict:
    """Outcome of the cautious comparison of one unordered pair.

    Optima record the attained LP values for audit: ``forward_optimum`` is
    the largest score advantage of the second alternative over the first
    among compatible utilities (``inf`` when unbounded, None when the solve
    was skipped), and symmetrically for ``reverse_optimum``.  ``observed``
    marks pairs taken directly from R rather than inferred.
    """

    direction: Direction
    forward_optimum: float | None = None
    reverse_optimum: float | None = None
    observed: bool = False


def _best_advantage(
    theta: SubsetFamily,
    pairs: Sequence,
    favored: Alternative,
    other: Alternative,
    rhs: float,
    solver: str,
) -> float:
    """Max score of ``favored`` minus ``other`` over compatible utilities."""
    if len(theta) == 0:
        if pairs:
            raise EmptyPolyhedronError(
                "the empty family is compatible with no strict preference"
            )
        return 0.0
    if solver == "dense":
        try:
            return _dense_advantage(theta, pairs, favored, other, rhs)
        except _dense.DenseTrouble:
            solver = "highs"
    problem = LpProblem(
        _utility_vars(theta),
        tuple(Constraint(tuple(_diff_row(theta, a, b)), ">=", rhs) for a, b in pairs),
        tuple(_diff_row(theta, favored, other)),
        "max",
    )
    outcome = solve_lp(problem, solver)
    if outcome.status is LpStatus.INFEASIBLE:
        raise EmptyPolyhedronError("no utility over this family reproduces the pairs")
    if outcome.status is LpStatus.UNBOUNDED:
        return float("inf")
    return float(outcome.objective or 0.0)


def _dense_advantage(
    theta: SubsetFamily,
    pairs: Sequence,
    favored: Alternative,
    other: Alternative,
    rhs: float,
) -> float:
    """Fast route via the dual: weight the margin rows against the target.

    A nonnegative weighting of the margin rows that adds up to the
    *negated* target difference caps the advantage at -(total weight) *
    rhs, and the least total attains it; if no weighting exists the
    advantage is unbounded above.  Assumes the polyhedron is nonempty,
    which callers ensure by using families a representability check or
    the search has vetted.
    """
    pair_list = list(pairs)
    m = len(pair_list)
    a_arr = np.fromiter((a.bits for a, _ in pair_list), dtype=np.int64, count=m)
    b_arr = np.fromiter((b.bits for _, b in pair_list), dtype=np.int64, count=m)
    s_arr = np.fromiter((s.bits for s in theta), dtype=np.int64, count=len(theta))
    cols = s_arr[:, None]
    matrix = ((~a_arr[None, :] & cols) == 0).astype(np.float64) - (
        (~b_arr[None, :] & cols) == 0
    )
    target = ((~np.int64(favored.bits) & s_arr) == 0).astype(np.float64) - (
        (~np.int64(other.bits) & s_arr) == 0
    )
    feasible, total, _ = _dense.min_total_nonneg(matrix, -target)
    if not feasible:
        return float("inf")
    return -total * rhs


def dominance(
    theta: SubsetFamily,
    prefs: PreferenceSet | Sequence,
    first: Alternative,
    second: Alternative,
    eps: float = EPS_DOM,
    rhs: float = 1.0,
    solver: str = "highs",
) -> DominanceVerdict:
    """Commit to an order only if every compatible utility agrees on it.

    The first alternative wins when even the most favorable compatible
    utility leaves the second strictly behind, and symmetrically; anything
    else is no prediction.  Raises EmptyPolyhedronError when no utility is
    compatible at all.
    """
    pairs = list(prefs)
    forward = _best_advantage(theta, pairs, second, first, rhs, solver)
    if forward < -eps:
        return DominanceVerdict(Direction.PREFER_FIRST, forward, None)
    reverse = _best_advantage(theta, pairs, first, second, rhs, solver)
    if reverse < -eps:
        return DominanceVerdict(Direction.PREFER_SECOND, forward, reverse)
    return DominanceVerdict(Direction.NO_PREDICTION, forward, reverse)


def predict_pairs(
    theta: SubsetFamily,
    prefs: PreferenceSet,
    pairs: Iterable[tuple[Alternative, Alternative]],
    eps: float = EPS_DOM,
    solver: str = "highs",
) -> dict[tuple[Alternative, Alternative], DominanceVerdict]:
    """Verdicts for the given unordered pairs, oriented as handed in.

    Pairs present in R come back flagged observed without solving.  Pairs
    implied by chaining R are committed directly: their margin constraints
    add up, so every compatible utility already separates them.  The
    remaining solves run against the transitive skeleton of R, which
    carves out the same polyhedron with fewer rows.
    """
    observed = {(a.bits, b.bits) for a, b in prefs}
    reach = _reachability(prefs) if len(prefs) else {}
    skeleton = transitive_reduction(prefs) if len(prefs) else prefs
    out: dict[tuple[Alternative, Alternative], DominanceVerdict] = {}
    for a, b in pairs:
        if (a.bits, b.bits) in observed:
            out[(a, b)] = DominanceVerdict(Direction.PREFER_FIRST, observed=True)
        elif (b.bits, a.bits) in observed:
            out[(a, b)] = DominanceVerdict(Direction.PREFER_SECOND, observed=True)
        elif b.bits in reach.get(a.bits, ()):
            out[(a, b)] = DominanceVerdict(Direction.PREFER_FIRST)
        elif a.bits in reach.get(b.bits, ()):
            out[(a, b)] = DominanceVerdict(Direction.PREFER_SECOND)
        else:
            out[(a, b)] = dominance(theta, skeleton, a, b, eps=eps, solver=solver)
    return out


def predict_matrix(
    theta: SubsetFamily,
    prefs: PreferenceSet,
    alternatives: Sequence[Alternative],
    eps: float = EPS_DOM,
    solver: str = "highs",
) -> dict[tuple[Alternative, Alternative], DominanceVerdict]:
    """Verdicts for every unordered pair of the given alternatives."""
    wanted = [
        (alternatives[i], alternatives[j])
        for i in range(len(alternatives))
        for j in range(i + 1, len(alternatives))
    ]
    return predict_pairs(theta, prefs, wanted, eps=eps, solver=solver)
