"""Static capacity calculations, utilization reporting and revenue.

These are the non-optimizing assessments: throughput restricted by
theatre sessions only, throughput restricted by ward beds only, direct
evaluation of a user-supplied allocation, sessions-required arithmetic
and linear revenue.  Ward time always charges surgery plus postop hours
(the bed is held during surgery); theatre hours are charged to theatres
as well, so surgery time appears under both resources by design.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .domain import (
    Allocation,
    Mix,
    MssTemplate,
    PatientCatalog,
    ProjectBundle,
    SessionAssignment,
    TargetSet,
)

BOTTLENECK_TOL = 1e-6

OT_RESOURCE = "OT"
ICU_RESOURCE = "ICU"
ALL_WARDS = "ALL WARDS"


class AssessmentError(ValueError):
    pass


@dataclass(frozen=True)
class ResourceRow:
    name: str
    spaces: int
    usedHours: float
    availableHours: float
    patientsTreated: float

    @property
    def percentUsed(self) -> float:
        if self.availableHours > 0:
            return 100.0 * self.usedHours / self.availableHours
        return 0.0 if self.usedHours <= BOTTLENECK_TOL else math.inf

    @property
    def bottleneck(self) -> bool:
        return self.percentUsed >= 100.0 - BOTTLENECK_TOL


@dataclass(frozen=True)
class UtilizationReport:
    rows: tuple[ResourceRow, ...]

    def row(self, name: str) -> ResourceRow:
        for r in self.rows:
            if r.name == name:
                return r
        raise KeyError(name)

    def flagged(self) -> list[str]:
        return [r.name for r in self.rows if r.bottleneck and r.name != ALL_WARDS]

    def to_json(self) -> list[dict]:
        return [
            {
                "name": r.name,
                "spaces": r.spaces,
                "usedHours": r.usedHours,
                "availableHours": r.availableHours,
                "percentUsed": r.percentUsed,
                "patientsTreated": r.patientsTreated,
                "bottleneck": r.bottleneck,
            }
            for r in self.rows
        ]

    def to_text(self) -> str:
        header = ["RESOURCE", "#BEDS", "USED HRS", "AVAIL HRS", "%USED", "#TREATED"]
        body = []
        for r in self.rows:
            flag = " [!]" if r.bottleneck else ""
            body.append([
                r.name,
                str(r.spaces),
                f"{r.usedHours:.4f}",
                f"{r.availableHours:.4f}",
                f"{r.percentUsed:.4f}{flag}",
                f"{r.patientsTreated:.4f}",
            ])
        widths = [max(len(header[i]), *(len(row[i]) for row in body)) if body else len(header[i])
                  for i in range(len(header))]
        lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths))]
        for row in body:
            lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)))
        return "\n".join(lines)


@dataclass(frozen=True)
class CohortResult:
    total: float
    perType: dict[int, float]
    perSubType: dict[tuple[int, int], float]
    report: UtilizationReport
    totalRevenue: float
    warnings: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            "total": self.total,
            "perType": [{"g": g, "count": v} for g, v in sorted(self.perType.items())],
            "perSubType": [
                {"g": g, "p": p, "count": v}
                for (g, p), v in sorted(self.perSubType.items())
            ],
            "report": self.report.to_json(),
            "totalRevenue": self.totalRevenue,
            "warnings": list(self.warnings),
        }


def _sub_fractions(bundle: ProjectBundle, mix: Mix) -> dict[tuple[int, int], float]:
    fracs = {}
    for g in bundle.catalog.type_ids():
        subs = bundle.catalog.sub_types_of(g)
        total = sum(mix.subMix.get((g, s.p), 0.0) for s in subs)
        err = abs(total - 100.0)
        if err > 1e-6:
            raise AssessmentError(
                f"sub mix of type {g} sums to {total:g}%, must be 100% (error {err:g}%)"
            )
        for s in subs:
            fracs[(g, s.p)] = mix.sub_fraction(g, s.p)
    return fracs


def build_report(
    bundle: ProjectBundle,
    mss: MssTemplate,
    sub_counts: dict[tuple[int, int], float],
    ward_of: dict[tuple[int, int], str | None],
) -> UtilizationReport:
    """Utilization rows for a cohort whose postop ward per sub-type is known."""
    cfg, cat = bundle.config, bundle.catalog
    ot_used = icu_used = 0.0
    icu_treated = 0.0
    ward_used = {w.name: 0.0 for w in cfg.wards}
    ward_treated = {w.name: 0.0 for w in cfg.wards}
    total = sum(sub_counts.values())
    for (g, p), count in sub_counts.items():
        prof = cat.profile(g, p)
        ot_used += count * prof.tSurgery
        icu_used += count * prof.tIcu
        if prof.tIcu > 0:
            icu_treated += count
        w = ward_of.get((g, p))
        if w is not None:
            ward_used[w] += count * prof.tWardTotal
            ward_treated[w] += count
    rows = [
        ResourceRow(OT_RESOURCE, cfg.theatres, ot_used, mss.theatreHours, total),
        ResourceRow(ICU_RESOURCE, cfg.icuBeds, icu_used, mss.bedHours(cfg.icuBeds), icu_treated),
    ]
    for w in cfg.wards:
        rows.append(ResourceRow(w.name, w.beds, ward_used[w.name],
                                mss.bedHours(w.beds), ward_treated[w.name]))
    rows.append(ResourceRow(
        ALL_WARDS, cfg.totalWardBeds, sum(ward_used.values()),
        mss.bedHours(cfg.totalWardBeds), total,
    ))
    return UtilizationReport(rows=tuple(rows))


def _report_from_entries(
    bundle: ProjectBundle,
    mss: MssTemplate,
    entries: list[tuple[int, int, str | None, float]],
) -> UtilizationReport:
    """Like build_report but per (sub-type, ward) pairs, for split allocations."""
    cfg, cat = bundle.config, bundle.catalog
    ot_used = icu_used = icu_treated = 0.0
    ward_used = {w.name: 0.0 for w in cfg.wards}
    ward_treated = {w.name: 0.0 for w in cfg.wards}
    totals: dict[tuple[int, int], float] = {}
    for g, p, ward, count in entries:
        prof = cat.profile(g, p)
        totals[(g, p)] = totals.get((g, p), 0.0) + count
        ot_used += count * prof.tSurgery
        icu_used += count * prof.tIcu
        if prof.tIcu > 0:
            icu_treated += count
        if ward is not None:
            ward_used[ward] += count * prof.tWardTotal
            ward_treated[ward] += count
    total = sum(totals.values())
    rows = [
        ResourceRow(OT_RESOURCE, cfg.theatres, ot_used, mss.theatreHours, total),
        ResourceRow(ICU_RESOURCE, cfg.icuBeds, icu_used, mss.bedHours(cfg.icuBeds), icu_treated),
    ]
    for w in cfg.wards:
        rows.append(ResourceRow(w.name, w.beds, ward_used[w.name],
                                mss.bedHours(w.beds), ward_treated[w.name]))
    rows.append(ResourceRow(
        ALL_WARDS, cfg.totalWardBeds, sum(ward_used.values()),
        mss.bedHours(cfg.totalWardBeds), total,
    ))
    return UtilizationReport(rows=tuple(rows))


def _result(bundle, mss, per_type, sub_counts, ward_of, warnings) -> CohortResult:
    report = build_report(bundle, mss, sub_counts, ward_of)
    _, revenue = revenue_of(sub_counts, bundle.catalog)
    return CohortResult(
        total=sum(per_type.values()),
        perType=per_type,
        perSubType=sub_counts,
        report=report,
        totalRevenue=revenue,
        warnings=tuple(warnings),
    )


def basic_assess_by_theatre(
    bundle: ProjectBundle,
    sessions: SessionAssignment,
    mix: Mix,
    mss: MssTemplate,
) -> CohortResult:
    """Throughput when only theatre time restricts output.

    Each type's patient count is its session time divided by the
    sub-mix-weighted average surgery duration.
    """
    fracs = _sub_fractions(bundle, mix)
    per_type: dict[int, float] = {}
    sub_counts: dict[tuple[int, int], float] = {}
    ward_of: dict[tuple[int, int], str | None] = {}
    warnings = []
    for g in bundle.catalog.type_ids():
        m_g = sessions.sessions.get(g, 0.0)
        subs = bundle.catalog.sub_types_of(g)
        avg_surgery = sum(
            fracs[(g, s.p)] * bundle.catalog.profile(g, s.p).tSurgery for s in subs
        )
        if avg_surgery <= 0:
            if m_g > 0:
                warnings.append(
                    f"type {g} has zero weighted surgery time; unbounded by theatre, excluded"
                )
            n_g = 0.0
        else:
            n_g = m_g * mss.sessionHours / avg_surgery
        per_type[g] = n_g
        for s in subs:
            sub_counts[(g, s.p)] = fracs[(g, s.p)] * n_g
            prof = bundle.catalog.profile(g, s.p)
            ward_of[(g, s.p)] = prof.wardOptions[0] if prof.wardOptions else None
    return _result(bundle, mss, per_type, sub_counts, ward_of, warnings)


def basic_assess_by_beds(
    bundle: ProjectBundle,
    mix: Mix,
    mss: MssTemplate,
) -> CohortResult:
    """Throughput when only ward beds restrict output.

    Sub-types are grouped by their first-listed ward; each ward used by
    a type yields a capacity bound and the type's count is the minimum
    of those bounds.  Theatre utilization may exceed 100% here.
    """
    fracs = _sub_fractions(bundle, mix)
    per_type: dict[int, float] = {}
    sub_counts: dict[tuple[int, int], float] = {}
    ward_of: dict[tuple[int, int], str | None] = {}
    warnings = []
    for g in bundle.catalog.type_ids():
        subs = bundle.catalog.sub_types_of(g)
        loads: dict[str, float] = {}
        total_load = 0.0
        for s in subs:
            prof = bundle.catalog.profile(g, s.p)
            w = prof.wardOptions[0] if prof.wardOptions else None
            ward_of[(g, s.p)] = w
            load = fracs[(g, s.p)] * prof.tWardTotal
            total_load += load
            if w is not None and load > 0:
                loads[w] = loads.get(w, 0.0) + load
        if total_load <= 0:
            warnings.append(f"type {g} consumes no ward time; unbounded by beds, excluded")
            per_type[g] = 0.0
        else:
            bounds = []
            for w_name, load in loads.items():
                beds = bundle.config.ward_named(w_name).beds
                if beds == 0:
                    warnings.append(
                        f"type {g} routes patients to {w_name!r} which has no beds"
                    )
                    bounds.append(0.0)
                else:
                    bounds.append(mss.bedHours(beds) / load)
            per_type[g] = min(bounds) if bounds else 0.0
        for s in subs:
            sub_counts[(g, s.p)] = fracs[(g, s.p)] * per_type[g]
    return _result(bundle, mss, per_type, sub_counts, ward_of, warnings)


def utilization_of(
    bundle: ProjectBundle,
    allocation: Allocation,
    mss: MssTemplate,
) -> UtilizationReport:
    """Resource usage implied by an explicit allocation; overuse is reported, not rejected."""
    allocation.validate_against(bundle.catalog)
    entries = [(e.g, e.p, e.ward, e.count) for e in allocation.entries]
    return _report_from_entries(bundle, mss, entries)


def sessions_required(
    targets: TargetSet,
    mix: Mix | None,
    catalog: PatientCatalog,
    session_hours: float,
) -> dict[int, float]:
    """Theatre sessions needed per type to meet the given targets."""
    if session_hours <= 0:
        raise AssessmentError("session duration must be > 0")
    out: dict[int, float] = {}
    for g in catalog.type_ids():
        subs = catalog.sub_types_of(g)
        has_sub = any((g, s.p) in targets.subTypeTargets for s in subs)
        if has_sub:
            hours = sum(
                targets.subTypeTargets.get((g, s.p), 0.0) * catalog.profile(g, s.p).tSurgery
                for s in subs
            )
            out[g] = hours / session_hours
        elif g in targets.typeTargets:
            if mix is None:
                raise AssessmentError(
                    f"type-level target for type {g} needs a sub mix to spread surgery time"
                )
            avg = sum(
                mix.sub_fraction(g, s.p) * catalog.profile(g, s.p).tSurgery for s in subs
            )
            out[g] = targets.typeTargets[g] * avg / session_hours
        else:
            out[g] = 0.0
    return out


def revenue_of(
    sub_counts: dict[tuple[int, int], float],
    catalog: PatientCatalog,
) -> tuple[dict[int, float], float]:
    """Per-type and total revenue; a missing revenue entry counts as zero."""
    per_type: dict[int, float] = {}
    for (g, p), count in sub_counts.items():
        per_type[g] = per_type.get(g, 0.0) + count * catalog.revenue(g, p)
    return per_type, sum(per_type.values())
