"""Search for the simplest subset families able to represent observed pairs.

Families are ranked by (degree, member count) lexicographically.  The
search grows candidate families depth-first from the empty family: at an
incompatible node it asks a dual certificate which pairs are implicated
and branches on the subsets of the implicated alternatives that would
break the certificate.  Every breaking subset lies inside an implicated
alternative, so this pool loses nothing; compatible nodes are leaves, and
the collection keeps every family tied at the best key seen.

Preferences are pre-reduced to their transitive skeleton before solving:
chained margin constraints imply the dropped ones, so the polyhedra (and
hence compatibility) are unchanged while the programs shrink.  Any valid
certificate supports the branching argument, so the default per-node test
looks for a normalized cancellation with the dense solver and only falls
back to the general backend on numerical doubt.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy.optimize import linprog

from ordpref._dense import DenseTrouble, kernel_certificate
from ordpref.core import (
    AttributeSubset,
    PreferenceError,
    PreferenceSet,
    SubsetFamily,
    lex_key,
    transitive_reduction,
)
from ordpref.lp_engine import (
    EPS_FEAS,
    SolverError,
    dual_certificate,
)


class SearchBudgetError(RuntimeError):
    """Node or time budget exhausted; carries the best collection so far."""

    def __init__(self, message: str, partial: ThetaMinResult):
        super().__init__(message)
        self.partial = partial


class OracleExhaustedError(RuntimeError):
    """Brute-force enumeration bounds reached without a compatible family."""


@dataclass(frozen=True)
class SearchLimits:
    max_nodes: int = 100_000
    max_seconds: float | None = None


@dataclass(frozen=True)
class SearchStats:
    nodes: int = 0
    lp_solves: int = 0
    elapsed: float = 0.0


@dataclass(frozen=True)
class ThetaMinResult:
    """All simplest compatible families plus their union.

    Every family shares the same (degree, member count) key; the union is
    the cautious working model: it predicts an order only when every
    simplest family does.
    """

    families: tuple[SubsetFamily, ...]
    unifying: SubsetFamily
    stats: SearchStats = field(default=SearchStats())

    @property
    def representative(self) -> SubsetFamily:
        return self.families[0]

    def to_json_dict(self) -> dict:
        return {
            "families": [f.to_strings() for f in self.families],
            "unifying": self.unifying.to_strings(),
            "stats": {
                "nodes": self.stats.nodes,
                "lp_solves": self.stats.lp_solves,
                "elapsed": round(self.stats.elapsed, 6),
            },
        }


def unifying_model(families: tuple[SubsetFamily, ...]) -> SubsetFamily:
    """Union of all simplest families."""
    if not families:
        raise ValueError("need at least one family")
    merged = families[0]
    for fam in families[1:]:
        merged = merged.union(fam)
    return merged


def _nonempty_submasks(mask: int) -> list[int]:
    out = []
    sub = mask
    while sub:
        out.append(sub)
        sub = (sub - 1) & mask
    return out


def _fallback_subsets(prefs: PreferenceSet, n: int) -> list[AttributeSubset]:
    # Completeness valve: the full attribute sets of the observed alternatives
    # can always explain an acyclic R, so some member of this pool breaks any
    # valid certificate.
    masks = {alt.bits for alt in prefs.alternatives() if alt.bits}
    subsets = [AttributeSubset(m, n) for m in masks]
    subsets.sort(key=lambda s: (s.size, s.bits))
    return subsets


def _scipy_kernel(matrix: np.ndarray, eps: float) -> tuple[bool, np.ndarray]:
    """General-backend stand-in for the dense normalized cancellation test."""
    rows, m = matrix.shape
    res = linprog(
        -np.ones(m),
        A_eq=matrix if rows else None,
        b_eq=np.zeros(rows) if rows else None,
        bounds=[(0.0, 1.0)] * m,
        method="highs",
    )
    if res.status != 0:
        raise SolverError(f"certificate backend failure: {res.message}")
    lam = np.clip(np.asarray(res.x), 0.0, 1.0)
    total = float(lam.sum())
    if total <= eps:
        return False, np.zeros(m)
    return True, lam / total


def build_theta_min(
    prefs: PreferenceSet,
    limits: SearchLimits | None = None,
    eps: float = EPS_FEAS,
    solver: str = "dense",
) -> ThetaMinResult:
    """All (degree, size)-minimal families compatible with the preferences.

    Raises PreferenceError for empty or cyclic input and SearchBudgetError
    (carrying the partial result) when limits bite.  Solver "dense" runs
    the fast per-node test; "highs" and "exact" route every node through
    the general certificate program instead.
    """
    if solver not in ("dense", "highs", "exact"):
        raise ValueError(f"unknown solver {solver!r}")
    if not len(prefs):
        raise PreferenceError("no pairs to explain; the empty family is the only answer")
    limits = limits or SearchLimits()
    n = prefs.n
    assert n is not None
    reduced = transitive_reduction(prefs)  # raises PreferenceError on a cycle
    pairs = list(reduced)
    m = len(pairs)
    a_bits = np.fromiter((a.bits for a, _ in pairs), dtype=np.int64, count=m)
    b_bits = np.fromiter((b.bits for _, b in pairs), dtype=np.int64, count=m)

    # Subsets are interned to row indices of a growing matrix of indicator
    # differences, so per-node programs assemble with one fancy index.
    ids: dict[int, int] = {}
    bits_of: list[int] = []
    size_of: list[int] = []
    col_fp: list[int] = []  # row -> fingerprint id; equal columns share one
    fp_intern: dict[bytes, int] = {}
    cols = np.empty((16, m))

    def intern(bits: int) -> int:
        idx = ids.get(bits)
        if idx is not None:
            return idx
        nonlocal cols
        idx = len(bits_of)
        ids[bits] = idx
        bits_of.append(bits)
        size_of.append(bits.bit_count())
        if idx >= cols.shape[0]:
            cols = np.vstack([cols, np.empty_like(cols)])
        s = np.int64(bits)
        cols[idx] = (((~a_bits) & s) == 0).astype(np.float64) - (
            ((~b_bits) & s) == 0
        )
        col_fp.append(fp_intern.setdefault(cols[idx].tobytes(), len(fp_intern)))
        return idx

    def order(idx: int) -> tuple[int, int]:
        return (size_of[idx], bits_of[idx])

    pair_cands: list[tuple[int, ...] | None] = [None] * m

    def cands_for(p: int) -> tuple[int, ...]:
        # Any subset with a nonzero weighted imbalance sits inside one of the
        # implicated alternatives, so enumerating their submasks (not just the
        # submasks of the differences) is what makes the collection complete:
        # tied minimal families may use subsets straddling a pair's overlap.
        got = pair_cands[p]
        if got is None:
            a, b = pairs[p]
            masks = set(_nonempty_submasks(a.bits))
            masks.update(_nonempty_submasks(b.bits))
            got = tuple(intern(x) for x in masks)
            pair_cands[p] = got
        return got

    fallback_ids = tuple(
        sorted((intern(s.bits) for s in _fallback_subsets(reduced, n)), key=order)
    )

    nodes = 0
    solves = 0
    started = time.monotonic()
    # Families whose members carry identical difference columns define the
    # same program, so the test result is shared across them.
    feas_cache: dict[frozenset[int], tuple[bool, np.ndarray]] = {}

    def node_test(member_ids: tuple[int, ...]) -> tuple[bool, np.ndarray]:
        nonlocal solves
        cache_key = frozenset(col_fp[i] for i in member_ids)
        got = feas_cache.get(cache_key)
        if got is not None:
            return got
        solves += 1
        matrix = cols[list(member_ids)] if member_ids else np.zeros((0, m))
        if solver == "dense":
            try:
                result = kernel_certificate(matrix)
            except DenseTrouble:
                result = _scipy_kernel(matrix, eps)
        else:
            family = family_of(member_ids)
            cert = dual_certificate(family, reduced, eps=eps, solver=solver)
            weights = np.asarray(cert.weights)
            result = (cert.objective > eps, weights)
        feas_cache[cache_key] = result
        return result

    def family_of(member_ids: tuple[int, ...]) -> SubsetFamily:
        return SubsetFamily.of(AttributeSubset(bits_of[i], n) for i in member_ids)

    sentinel = (n, (1 << n) - 1)
    best_key = sentinel
    found: dict[tuple[int, ...], None] = {}
    visited: set[tuple[int, ...]] = set()

    def make_result() -> ThetaMinResult:
        families = tuple(
            sorted(
                (family_of(t) for t in found),
                key=lambda f: tuple(s.bits for s in f.members),
            )
        )
        stats = SearchStats(nodes, solves, time.monotonic() - started)
        return ThetaMinResult(families, unifying_model(families), stats)

    def overdrawn() -> str | None:
        if nodes > limits.max_nodes:
            return f"node budget {limits.max_nodes} exhausted"
        if limits.max_seconds is not None and time.monotonic() - started > limits.max_seconds:
            return f"time budget {limits.max_seconds}s exhausted"
        return None

    stack: list[tuple[tuple[int, ...], int]] = [((), 0)]
    while stack:
        member_ids, degree = stack.pop()
        if (degree, len(member_ids)) > best_key:
            continue  # best may have tightened since this node was queued
        nodes += 1
        message = overdrawn()
        if message is not None:
            raise SearchBudgetError(
                message,
                make_result() if found else ThetaMinResult((), SubsetFamily.of(())),
            )
        incompatible, lam = node_test(member_ids)
        if not incompatible:
            key = (degree, len(member_ids))
            if key < best_key:
                best_key = key
                found = {member_ids: None}
            else:  # keys below best are pruned before testing, so key == best
                found.setdefault(member_ids)
            continue
        cand_ids: set[int] = set()
        for p in np.flatnonzero(lam > eps):
            cand_ids.update(cands_for(int(p)))
        breaking = _breaking(sorted(cand_ids, key=order), cols, lam, eps)
        if not breaking:
            breaking = _breaking(fallback_ids, cols, lam, eps)
        for cid in reversed(breaking):
            if cid in member_ids:
                continue
            child_degree = max(degree, size_of[cid])
            if (child_degree, len(member_ids) + 1) > best_key:
                continue
            child = tuple(sorted(member_ids + (cid,), key=order))
            if child in visited:
                continue
            visited.add(child)
            stack.append((child, child_degree))
    if not found:
        raise PreferenceError("search exhausted without a compatible family")
    return make_result()


def _breaking(
    cand_ids, cols: np.ndarray, lam: np.ndarray, eps: float
) -> list[int]:
    if not cand_ids:
        return []
    imbalance = cols[list(cand_ids)] @ lam
    return [cid for cid, v in zip(cand_ids, imbalance) if abs(v) > eps]


def brute_force_theta_min(
    prefs: PreferenceSet,
    max_degree: int | None = None,
    max_size: int | None = None,
    eps: float = EPS_FEAS,
    solver: str = "highs",
) -> tuple[SubsetFamily, ...]:
    """Layer-by-layer enumeration oracle, independent of the guided search.

    Walks (degree, size) keys in ascending order, testing every family in a
    layer, and returns all compatible families from the first nonempty
    layer.  Exponential; intended for small cross-checks only.
    """
    if not len(prefs):
        raise PreferenceError("no pairs to explain; the empty family is the only answer")
    n = prefs.n
    assert n is not None
    max_degree = n if max_degree is None else max_degree
    max_size = (1 << n) - 1 if max_size is None else max_size

    all_subsets = [
        AttributeSubset(bits, n) for bits in sorted(
            range(1, 1 << n), key=lambda b: (b.bit_count(), b)
        )
    ]
    for degree in range(1, max_degree + 1):
        pool = [s for s in all_subsets if s.size <= degree]
        for size in range(1, min(max_size, len(pool)) + 1):
            hits = []
            for members in combinations(pool, size):
                if max(s.size for s in members) != degree:
                    continue
                family = SubsetFamily.of(members)
                cert = dual_certificate(family, prefs, eps=eps, solver=solver)
                if cert.objective <= eps:
                    hits.append(family)
            if hits:
                return tuple(
                    sorted(hits, key=lambda f: tuple(s.bits for s in f.members))
                )
    raise OracleExhaustedError(
        f"no compatible family within degree {max_degree}, size {max_size}"
    )
