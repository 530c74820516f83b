"""HTTP what-if session service.

A session wraps an immutable loaded project plus a mutable overlay of
edits (bed deltas, theatre delta, schedule parameters, session
assignments, mix values, targets).  Tasks always run against the
overlay-adjusted state, and every response reports the effective
parameters that were used.
"""

from __future__ import annotations

import os
import threading
import time
import uuid
from dataclasses import dataclass, field, replace

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from .assess import basic_assess_by_beds, basic_assess_by_theatre, utilization_of
from .domain import (
    DomainError,
    HospitalConfig,
    Mix,
    MssTemplate,
    ProjectBundle,
    SessionAssignment,
    TargetSet,
    Ward,
    normalize_mix,
)
from .fileio import bundle_from_json, load_project
from .models import (
    AssessmentSpec,
    Norm,
    SolveFailure,
    TargetFitSpec,
    TargetingOption,
    Viewpoint,
    WardOptionPolicy,
    assess_capacity,
    best_fit_case_mix,
    check_feasibility,
)

DEFAULT_PORT = 8080


def configured_port() -> int:
    return int(os.environ.get("HOPLITE_PORT", DEFAULT_PORT))


# ---------------------------------------------------------------------------
# overlay


@dataclass
class Overlay:
    bedDeltas: dict[str, int] = field(default_factory=dict)
    theatreDelta: int = 0
    mss: dict[str, float] = field(default_factory=dict)
    sessionAssignments: dict[int, float] = field(default_factory=dict)
    caseMix: dict[int, float] = field(default_factory=dict)
    subMix: dict[tuple[int, int], float] = field(default_factory=dict)
    typeTargets: dict[int, float] = field(default_factory=dict)
    subTypeTargets: dict[tuple[int, int], float] = field(default_factory=dict)

    _MSS_KEYS = ("weeks", "daysPerWeek", "sessionsPerDay", "sessionHours")


@dataclass
class WhatIfSession:
    sessionId: str
    bundle: ProjectBundle
    overlay: Overlay = field(default_factory=Overlay)
    lastResults: dict[str, dict] = field(default_factory=dict)
    lock: threading.Lock = field(default_factory=threading.Lock)

    # -- effective state ---------------------------------------------------

    def effective_config(self) -> HospitalConfig:
        cfg = self.bundle.config
        wards = []
        for w in cfg.wards:
            beds = w.beds + self.overlay.bedDeltas.get(w.name, 0)
            if beds < 0:
                raise DomainError(f"ward {w.name!r} would have {beds} beds")
            wards.append(Ward(w.wardId, w.name, beds))
        theatres = cfg.theatres + self.overlay.theatreDelta
        if theatres < 0:
            raise DomainError(f"theatre count would be {theatres}")
        return HospitalConfig(icuBeds=cfg.icuBeds, theatres=theatres, wards=tuple(wards))

    def effective_mss(self) -> MssTemplate:
        o = self.overlay.mss
        return MssTemplate(
            weeks=int(o.get("weeks", 1)),
            daysPerWeek=int(o.get("daysPerWeek", 5)),
            sessionsPerDay=int(o.get("sessionsPerDay", 2)),
            sessionHours=float(o.get("sessionHours", 4.0)),
            theatres=self.effective_config().theatres,
        )

    def effective_mix(self) -> Mix | None:
        base = self.bundle.mix
        case = dict(base.caseMix) if base else {}
        sub = dict(base.subMix) if base else {}
        case.update(self.overlay.caseMix)
        sub.update(self.overlay.subMix)
        if not case and not sub:
            return None
        return Mix(caseMix=case, subMix=sub)

    def effective_sessions(self) -> SessionAssignment | None:
        base = self.bundle.sessions
        merged = dict(base.sessions) if base else {}
        merged.update(self.overlay.sessionAssignments)
        return SessionAssignment(merged) if merged else None

    def effective_targets(self) -> TargetSet | None:
        base = self.bundle.targets
        tt = dict(base.typeTargets) if base else {}
        st = dict(base.subTypeTargets) if base else {}
        tt.update(self.overlay.typeTargets)
        st.update(self.overlay.subTypeTargets)
        if not tt and not st:
            return None
        return TargetSet(typeTargets=tt, subTypeTargets=st,
                         weights=dict(base.weights) if base else {})

    def effective_bundle(self) -> ProjectBundle:
        return replace(
            self.bundle,
            config=self.effective_config(),
            mix=self.effective_mix(),
            sessions=self.effective_sessions(),
            targets=self.effective_targets(),
        )

    def mix_errors(self) -> dict:
        mix = self.effective_mix()
        if mix is None:
            return {"caseMixError": None, "subMixErrors": {}}
        return {
            "caseMixError": mix.case_mix_error(),
            "subMixErrors": {
                str(g): mix.sub_mix_error(g) for g in self.bundle.catalog.type_ids()
            },
        }

    def state_json(self) -> dict:
        bundle = self.effective_bundle()
        mss = self.effective_mss()
        sessions = self.effective_sessions()
        return {
            "sessionId": self.sessionId,
            "projectName": bundle.projectName,
            "config": {
                "icuBeds": bundle.config.icuBeds,
                "theatres": bundle.config.theatres,
                "wards": [
                    {"wardId": w.wardId, "name": w.name, "beds": w.beds}
                    for w in bundle.config.wards
                ],
            },
            "mss": {
                "weeks": mss.weeks, "daysPerWeek": mss.daysPerWeek,
                "sessionsPerDay": mss.sessionsPerDay,
                "sessionHours": mss.sessionHours,
                "totalSessions": mss.totalSessions,
                "theatreHours": mss.theatreHours,
            },
            "caseMix": {str(g): v for g, v in (bundle.mix.caseMix if bundle.mix else {}).items()},
            "subMix": [
                {"g": g, "p": p, "percent": v}
                for (g, p), v in (bundle.mix.subMix if bundle.mix else {}).items()
            ],
            "sessionAssignments": {
                str(g): v for g, v in (sessions.sessions if sessions else {}).items()
            },
            "unassignedSessions": sessions.unassigned(mss) if sessions else mss.totalSessions,
            "targets": {
                "type": {str(g): v for g, v in (bundle.targets.typeTargets if bundle.targets else {}).items()},
                "sub": [
                    {"g": g, "p": p, "target": v}
                    for (g, p), v in (bundle.targets.subTypeTargets if bundle.targets else {}).items()
                ],
            },
            "hasAllocation": bundle.allocation is not None,
            "types": [
                {"typeId": t.typeId, "name": t.name} for t in bundle.catalog.types
            ],
            "subTypes": [
                {"g": s.g, "p": s.p, "name": s.name} for s in bundle.catalog.subTypes
            ],
            **self.mix_errors(),
        }


# ---------------------------------------------------------------------------
# request bodies


class CreateSession(BaseModel):
    projectPath: str | None = None
    project: dict | None = None


class SubMixEdit(BaseModel):
    g: int
    p: int
    percent: float


class SubTargetEdit(BaseModel):
    g: int
    p: int
    target: float


class OverlayPatch(BaseModel):
    bedDeltas: dict[str, int] | None = None
    theatreDelta: int | None = None
    mss: dict[str, float] | None = None
    sessionAssignments: dict[int, float] | None = None
    caseMix: dict[int, float] | None = None
    subMix: list[SubMixEdit] | None = None
    typeTargets: dict[int, float] | None = None
    subTypeTargets: list[SubTargetEdit] | None = None
    reset: bool = False


class FixMix(BaseModel):
    typeId: int | None = None  # None fixes the case mix


class TaskRequest(BaseModel):
    kind: str
    by: str = "theatre"          # basic tasks
    viewpoint: str = "whole"     # advanced
    wardOptions: str = "all"     # advanced
    option: str = "to1"          # best fit
    norm: str = "1"
    segments: int = Field(default=16, ge=1)
    maximizeThroughput: bool = False


TASK_KINDS = (
    "basicTheatre", "basicBeds", "advanced",
    "evaluateAllocation", "feasibility", "bestFit",
)


# ---------------------------------------------------------------------------
# app


def create_app() -> FastAPI:
    app = FastAPI(title="hoplite what-if service")
    sessions: dict[str, WhatIfSession] = {}

    def get(session_id: str) -> WhatIfSession:
        try:
            return sessions[session_id]
        except KeyError:
            raise HTTPException(404, f"unknown session {session_id!r}")

    def invalid(field_name: str, message: str):
        raise HTTPException(422, detail=[{"field": field_name, "message": message}])

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateSession):
        if (body.projectPath is None) == (body.project is None):
            invalid("projectPath", "give exactly one of projectPath or project")
        try:
            if body.projectPath is not None:
                bundle = load_project(body.projectPath)
            else:
                bundle = bundle_from_json(body.project)
        except (OSError, ValueError) as exc:
            invalid("project", str(exc))
        session = WhatIfSession(sessionId=uuid.uuid4().hex, bundle=bundle)
        sessions[session.sessionId] = session
        return session.state_json()

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        return get(session_id).state_json()

    @app.delete("/sessions/{session_id}", status_code=204)
    def delete_session(session_id: str):
        get(session_id)
        del sessions[session_id]

    @app.patch("/sessions/{session_id}/overlay")
    def patch_overlay(session_id: str, body: OverlayPatch):
        session = get(session_id)
        with session.lock:
            o = session.overlay
            if body.reset:
                session.overlay = Overlay()
                return session.state_json()
            if body.bedDeltas:
                names = {w.name for w in session.bundle.config.wards}
                for name, delta in body.bedDeltas.items():
                    if name not in names:
                        invalid("bedDeltas", f"unknown ward {name!r}")
                    o.bedDeltas[name] = o.bedDeltas.get(name, 0) + delta
            if body.theatreDelta:
                o.theatreDelta += body.theatreDelta
            if body.mss:
                for key, value in body.mss.items():
                    if key not in Overlay._MSS_KEYS:
                        invalid("mss", f"unknown schedule parameter {key!r}")
                    if value <= 0:
                        invalid("mss", f"{key} must be > 0")
                    o.mss[key] = value
            if body.sessionAssignments:
                for g, m in body.sessionAssignments.items():
                    if m < 0:
                        invalid("sessionAssignments", f"type {g}: sessions must be >= 0")
                    o.sessionAssignments[g] = m
            if body.caseMix:
                for g, v in body.caseMix.items():
                    if v < 0:
                        invalid("caseMix", f"type {g}: percentage must be >= 0")
                    o.caseMix[g] = v
            if body.subMix:
                for edit in body.subMix:
                    if edit.percent < 0:
                        invalid("subMix", f"({edit.g},{edit.p}): percentage must be >= 0")
                    o.subMix[(edit.g, edit.p)] = edit.percent
            if body.typeTargets:
                for g, v in body.typeTargets.items():
                    if v < 0:
                        invalid("typeTargets", f"type {g}: target must be >= 0")
                    o.typeTargets[g] = v
            if body.subTypeTargets:
                for edit in body.subTypeTargets:
                    if edit.target < 0:
                        invalid("subTypeTargets", f"({edit.g},{edit.p}): target must be >= 0")
                    o.subTypeTargets[(edit.g, edit.p)] = edit.target
            try:
                session.effective_bundle()
                session.effective_mss()
            except DomainError as exc:
                invalid("overlay", str(exc))
            return session.state_json()

    @app.post("/sessions/{session_id}/overlay/fix-mix")
    def fix_mix(session_id: str, body: FixMix):
        session = get(session_id)
        with session.lock:
            mix = session.effective_mix()
            if mix is None:
                invalid("typeId", "session has no mix to fix")
            if body.typeId is None:
                keys = sorted(mix.caseMix)
                values = [mix.caseMix[g] for g in keys]
            else:
                keys = sorted(p for (g, p) in mix.subMix if g == body.typeId)
                if not keys:
                    invalid("typeId", f"type {body.typeId} has no sub mix entries")
                values = [mix.subMix[(body.typeId, p)] for p in keys]
            try:
                _, fixed = normalize_mix(values)
            except DomainError as exc:
                invalid("typeId", str(exc))
            if body.typeId is None:
                session.overlay.caseMix.update(dict(zip(keys, fixed)))
            else:
                session.overlay.subMix.update(
                    {(body.typeId, p): v for p, v in zip(keys, fixed)}
                )
            return session.state_json()

    @app.post("/sessions/{session_id}/overlay/even-sessions")
    def even_sessions(session_id: str):
        """Spread the full session count evenly over the patient types."""
        session = get(session_id)
        with session.lock:
            mss = session.effective_mss()
            type_ids = session.bundle.catalog.type_ids()
            share = mss.totalSessions / len(type_ids)
            session.overlay.sessionAssignments = {g: share for g in type_ids}
            return session.state_json()

    @app.post("/sessions/{session_id}/overlay/even-mix")
    def even_mix(session_id: str):
        """Give every patient type an equal case-mix share."""
        session = get(session_id)
        with session.lock:
            type_ids = session.bundle.catalog.type_ids()
            _, fixed = normalize_mix([1.0] * len(type_ids))
            session.overlay.caseMix = dict(zip(type_ids, fixed))
            return session.state_json()

    @app.post("/sessions/{session_id}/overlay/full-mix")
    def full_mix(session_id: str, body: FixMix):
        """Set one type to 100% of the case mix, zeroing all others."""
        session = get(session_id)
        with session.lock:
            type_ids = session.bundle.catalog.type_ids()
            if body.typeId not in type_ids:
                invalid("typeId", f"unknown type {body.typeId}")
            session.overlay.caseMix = {
                g: (100.0 if g == body.typeId else 0.0) for g in type_ids
            }
            return session.state_json()

    @app.post("/sessions/{session_id}/tasks")
    def run_task(session_id: str, body: TaskRequest):
        session = get(session_id)
        if body.kind not in TASK_KINDS:
            invalid("kind", f"unknown task kind {body.kind!r}")
        with session.lock:
            bundle = session.effective_bundle()
            mss = session.effective_mss()
            started = time.perf_counter()
            try:
                payload, effective = _run_task(body, session, bundle, mss)
            except DomainError as exc:
                invalid("task", str(exc))
            except SolveFailure as exc:
                invalid("task", f"{exc}")
            result = {
                "kind": body.kind,
                "effectiveParameters": effective,
                "elapsedMs": (time.perf_counter() - started) * 1000.0,
                "result": payload,
            }
            session.lastResults[body.kind] = result
            return result

    return app


def _require_valid_mix(session: WhatIfSession, bundle: ProjectBundle) -> Mix:
    mix = bundle.mix
    if mix is None:
        raise DomainError("session has no case mix")
    err = mix.case_mix_error()
    if err > 1e-9:
        raise DomainError(
            f"case mix sums to {sum(mix.caseMix.values()):g}%, must be 100%"
        )
    for g in session.bundle.catalog.type_ids():
        serr = mix.sub_mix_error(g)
        if serr > 1e-9:
            total = sum(v for (gg, _), v in mix.subMix.items() if gg == g)
            raise DomainError(
                f"sub mix of type {g} sums to {total:g}%, must be 100% (error {serr:g}%)"
            )
    return mix


def _mss_json(mss: MssTemplate) -> dict:
    return {
        "weeks": mss.weeks, "daysPerWeek": mss.daysPerWeek,
        "sessionsPerDay": mss.sessionsPerDay, "sessionHours": mss.sessionHours,
        "theatres": mss.theatres,
    }


def _run_task(body: TaskRequest, session: WhatIfSession,
              bundle: ProjectBundle, mss: MssTemplate) -> tuple[dict, dict]:
    effective: dict = {"mss": _mss_json(mss)}
    if body.kind == "basicTheatre":
        mix = _require_valid_mix(session, bundle)
        if bundle.sessions is None:
            raise DomainError("theatre-based assessment needs a session assignment")
        effective["sessions"] = {str(g): v for g, v in bundle.sessions.sessions.items()}
        return basic_assess_by_theatre(bundle, bundle.sessions, mix, mss).to_json(), effective
    if body.kind == "basicBeds":
        mix = _require_valid_mix(session, bundle)
        return basic_assess_by_beds(bundle, mix, mss).to_json(), effective
    if body.kind == "advanced":
        _require_valid_mix(session, bundle)
        spec = AssessmentSpec(
            viewpoint=Viewpoint.WHOLE_COHORT if body.viewpoint == "whole"
            else Viewpoint.SESSION_PARTITION,
            wardOptionPolicy=WardOptionPolicy.FIRST_ONLY if body.wardOptions == "first"
            else WardOptionPolicy.ALL,
        )
        effective["viewpoint"] = spec.viewpoint.value
        effective["wardOptions"] = spec.wardOptionPolicy.value
        return assess_capacity(bundle, spec, mss).to_json(), effective
    if body.kind == "evaluateAllocation":
        if bundle.allocation is None:
            raise DomainError("project has no allocation to evaluate")
        report = utilization_of(bundle, bundle.allocation, mss)
        return {"report": report.to_json(), "flagged": report.flagged()}, effective
    if body.kind == "feasibility":
        if bundle.targets is None and bundle.allocation is None:
            raise DomainError("feasibility needs targets or an allocation")
        verdict = check_feasibility(
            bundle, mss, targets=bundle.targets, allocation=bundle.allocation
        )
        return verdict.to_json(), effective
    # bestFit
    if bundle.targets is None:
        raise DomainError("best-fit needs targets")
    fit = TargetFitSpec(
        option=TargetingOption(body.option),
        norm=Norm.ONE if body.norm == "1" else Norm.TWO,
        pwlSegments=body.segments,
        postOptimizeThroughput=body.maximizeThroughput,
    )
    effective["option"] = fit.option.value
    effective["norm"] = body.norm
    effective["segments"] = fit.pwlSegments
    return best_fit_case_mix(bundle, mss, bundle.targets, fit).to_json(), effective


app = create_app()


def main() -> None:
    import uvicorn

    uvicorn.run(app, host="127.0.0.1", port=configured_port())
