"""HTTP session service for interactive tier-list elicitation.

A session tracks a log of tier assignments (larger tier index = more
preferred).  Every mutation recomputes the induced strict preferences,
the simplest compatible families, their union, and bumps a version
counter; readers always see one consistent version.  Sessions live in
process memory only.

Endpoints (all JSON, version echoed in every response):

* ``POST /sessions``                       create (n, optional names, tier count)
* ``GET  /sessions/{id}``                  full snapshot
* ``POST /sessions/{id}/assignments``      assign one alternative to a tier
* ``GET  /sessions/{id}/predictions``      verdict matrix for ``?alts=0110,1100,...``
* ``GET  /sessions/{id}/theta``            families and their union

Errors are ``{"code": ..., "message": ...}``.  Assigning an alternative
twice is a conflict; a search budget overrun leaves the session exactly
as it was and comes back as a warning, not an error.
"""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone

from fastapi import FastAPI, HTTPException, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from ordpref.core import (
    Alternative,
    AttributeUniverse,
    DimensionError,
    PreferenceError,
    PreferenceSet,
    SubsetFamily,
    preferences_from_tiers,
)
from ordpref.lp_engine import Direction, predict_matrix
from ordpref.theta_search import (
    SearchBudgetError,
    SearchLimits,
    ThetaMinResult,
    build_theta_min,
)

MAX_INTERACTIVE_N = 12


class CreateSessionBody(BaseModel):
    n: int = Field(ge=1)
    tiers: int = Field(ge=1)
    names: list[str] | None = None


class AssignmentBody(BaseModel):
    alternative: str
    tier: int


@dataclass
class _LogEntry:
    alternative: Alternative
    tier: int
    at: str


@dataclass
class _Derived:
    """One consistent view of everything computed from the log."""

    version: int
    prefs: PreferenceSet
    result: ThetaMinResult | None
    matrix: dict


@dataclass
class _Session:
    id: str
    universe: AttributeUniverse
    tiers: int
    limits: SearchLimits
    log: list[_LogEntry] = field(default_factory=list)
    derived: _Derived | None = None
    lock: threading.Lock = field(default_factory=threading.Lock)
    pred_cache: dict = field(default_factory=dict)


def _empty_result(n: int) -> ThetaMinResult:
    empty = SubsetFamily.of([])
    return ThetaMinResult(families=(empty,), unifying=empty)


def _families_json(result: ThetaMinResult) -> dict:
    return {
        "families": [f.to_strings() for f in result.families],
        "unifying": result.unifying.to_strings(),
        "stats": {
            "nodes": result.stats.nodes,
            "lp_solves": result.stats.lp_solves,
        },
    }


def _matrix_of(session: _Session, prefs: PreferenceSet, result: ThetaMinResult) -> dict:
    """Verdict per unordered pair of assigned alternatives, canonical order."""
    seen: dict[int, Alternative] = {}
    for entry in session.log:
        seen.setdefault(entry.alternative.bits, entry.alternative)
    alts = [seen[b] for b in sorted(seen)]
    out = {}
    if len(alts) >= 2:
        verdicts = predict_matrix(result.unifying, prefs, alts, solver="dense")
        for (a, b), verdict in verdicts.items():
            out[(a.bits, b.bits)] = verdict
    return out


def create_app() -> FastAPI:
    app = FastAPI(title="ordpref elicitation service")
    sessions: dict[str, _Session] = {}
    registry_lock = threading.Lock()

    def _fail(status: int, code: str, message: str) -> HTTPException:
        return HTTPException(status_code=status, detail={"code": code, "message": message})

    @app.exception_handler(HTTPException)
    async def _http_error(request: Request, exc: HTTPException):
        detail = exc.detail
        if not isinstance(detail, dict) or "code" not in detail:
            detail = {"code": "error", "message": str(detail)}
        return JSONResponse(status_code=exc.status_code, content=detail)

    @app.exception_handler(RequestValidationError)
    async def _body_error(request: Request, exc: RequestValidationError):
        first = exc.errors()[0]
        where = ".".join(str(p) for p in first.get("loc", ()))
        return JSONResponse(
            status_code=422,
            content={"code": "validation", "message": f"{where}: {first.get('msg')}"},
        )

    def _get_session(session_id: str) -> _Session:
        session = sessions.get(session_id)
        if session is None:
            raise _fail(404, "not_found", f"no session {session_id}")
        return session

    def _snapshot_json(session: _Session) -> dict:
        derived = session.derived
        result = derived.result or _empty_result(session.universe.n)
        return {
            "id": session.id,
            "version": derived.version,
            "n": session.universe.n,
            "names": list(session.universe.names) if session.universe.names else None,
            "tiers": session.tiers,
            "log": [
                {"alternative": e.alternative.to_string(), "tier": e.tier, "at": e.at}
                for e in session.log
            ],
            "preferences": sorted(f"{a}>{b}" for a, b in derived.prefs),
            **_families_json(result),
        }

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateSessionBody):
        if not 1 <= body.n <= MAX_INTERACTIVE_N:
            raise _fail(
                422, "validation",
                f"attribute count must be 1..{MAX_INTERACTIVE_N}, got {body.n}",
            )
        try:
            universe = AttributeUniverse(
                body.n, tuple(body.names) if body.names is not None else None
            )
        except ValueError as exc:
            raise _fail(422, "validation", str(exc))
        session = _Session(
            id=uuid.uuid4().hex,
            universe=universe,
            tiers=body.tiers,
            limits=SearchLimits(),
        )
        session.derived = _Derived(
            version=0,
            prefs=PreferenceSet.of([]),
            result=None,
            matrix={},
        )
        with registry_lock:
            sessions[session.id] = session
        return _snapshot_json(session)

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        session = _get_session(session_id)
        with session.lock:
            return _snapshot_json(session)

    @app.post("/sessions/{session_id}/assignments")
    def assign(session_id: str, body: AssignmentBody):
        session = _get_session(session_id)
        n = session.universe.n
        try:
            alternative = Alternative.from_string(body.alternative)
        except (ValueError, DimensionError) as exc:
            raise _fail(422, "validation", str(exc))
        if alternative.n != n:
            raise _fail(
                422, "validation",
                f"alternative width {alternative.n} does not match session ({n})",
            )
        if not 1 <= body.tier <= session.tiers:
            raise _fail(
                422, "validation",
                f"tier must be 1..{session.tiers}, got {body.tier}",
            )
        with session.lock:
            if any(e.alternative.bits == alternative.bits for e in session.log):
                raise _fail(
                    409, "conflict",
                    f"{alternative} is already assigned; reassignment is not supported",
                )
            entry = _LogEntry(
                alternative=alternative,
                tier=body.tier,
                at=datetime.now(timezone.utc).isoformat(),
            )
            trial_log = session.log + [entry]
            prefs = preferences_from_tiers(
                [(e.alternative, e.tier) for e in trial_log]
            )
            if len(prefs) == 0:
                result = None
            else:
                try:
                    result = build_theta_min(prefs, limits=session.limits, solver="dense")
                except SearchBudgetError as exc:
                    return {
                        "version": session.derived.version,
                        "applied": False,
                        "warning": {"code": "search_budget", "message": str(exc)},
                        **_families_json(
                            session.derived.result or _empty_result(n)
                        ),
                        "preference_count": len(session.derived.prefs),
                        "revised": [],
                    }
            session.log.append(entry)
            effective = result or _empty_result(n)
            matrix = _matrix_of(session, prefs, effective)
            before = session.derived.matrix
            revised = []
            for key in sorted(before.keys() & matrix.keys()):
                old, new = before[key].direction, matrix[key].direction
                # growth into or retreat from no-prediction is ordinary;
                # only committed reversals need surfacing
                if old != new and Direction.NO_PREDICTION not in (old, new):
                    revised.append(
                        {
                            "first": Alternative(key[0], n).to_string(),
                            "second": Alternative(key[1], n).to_string(),
                            "before": old.value,
                            "after": new.value,
                        }
                    )
            session.derived = _Derived(
                version=session.derived.version + 1,
                prefs=prefs,
                result=result,
                matrix=matrix,
            )
            session.pred_cache.clear()
            return {
                "version": session.derived.version,
                "applied": True,
                "warning": None,
                "preference_count": len(prefs),
                "revised": revised,
                **_families_json(effective),
            }

    @app.get("/sessions/{session_id}/predictions")
    def predictions(session_id: str, alts: str = ""):
        session = _get_session(session_id)
        n = session.universe.n
        texts = [t for t in alts.split(",") if t]
        try:
            wanted = [Alternative.from_string(t) for t in texts]
        except (ValueError, DimensionError) as exc:
            raise _fail(422, "validation", str(exc))
        if any(a.n != n for a in wanted):
            raise _fail(422, "validation", f"alternatives must have width {n}")
        dedup: list[Alternative] = []
        seen: set[int] = set()
        for a in wanted:
            if a.bits not in seen:
                seen.add(a.bits)
                dedup.append(a)
        with session.lock:
            derived = session.derived
            key = (derived.version, tuple(a.bits for a in dedup))
            cached = session.pred_cache.get(key)
            if cached is None:
                result = derived.result or _empty_result(n)
                verdicts = predict_matrix(
                    result.unifying, derived.prefs, dedup, solver="dense"
                )
                cached = {
                    "version": derived.version,
                    "alternatives": [a.to_string() for a in dedup],
                    "cells": [
                        {
                            "first": a.to_string(),
                            "second": b.to_string(),
                            "direction": v.direction.value,
                            "observed": v.observed,
                        }
                        for (a, b), v in verdicts.items()
                    ],
                }
                session.pred_cache[key] = cached
            return cached

    @app.get("/sessions/{session_id}/theta")
    def theta(session_id: str):
        session = _get_session(session_id)
        with session.lock:
            derived = session.derived
            result = derived.result or _empty_result(session.universe.n)
            return {"version": derived.version, **_families_json(result)}

    return app


app = create_app()
