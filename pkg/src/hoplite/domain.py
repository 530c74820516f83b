"""Core data types for hospital case-mix planning.

Hospitals are modelled as a pooled operating theatre unit, a pooled
intensive care unit and a list of named recovery wards.  Patients are
grouped into types and sub-types; each sub-type carries a resource
consumption profile (surgery, postoperative ward and intensive care
hours).  All types here are immutable values and safe to share between
concurrent tasks.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

HOURS_PER_WEEK = 168.0

MIX_TOLERANCE = 1e-6


class DomainError(ValueError):
    """Raised when a domain value violates its invariants."""


@dataclass(frozen=True)
class Ward:
    wardId: int
    name: str
    beds: int


@dataclass(frozen=True)
class HospitalConfig:
    icuBeds: int
    theatres: int
    wards: tuple[Ward, ...]

    def __post_init__(self):
        if self.icuBeds < 0 or self.theatres < 0:
            raise DomainError("bed and theatre counts must be >= 0")
        names = [w.name for w in self.wards]
        if len(set(names)) != len(names):
            raise DomainError("ward names must be unique")
        for w in self.wards:
            if w.beds < 0:
                raise DomainError(f"ward {w.name!r} has negative bed count")

    def ward_named(self, name: str) -> Ward:
        for w in self.wards:
            if w.name == name:
                return w
        raise DomainError(f"unknown ward {name!r}")

    @property
    def totalWardBeds(self) -> int:
        return sum(w.beds for w in self.wards)


@dataclass(frozen=True)
class PatientType:
    typeId: int
    name: str
    subTypeCount: int


@dataclass(frozen=True)
class SubType:
    g: int
    p: int
    name: str


@dataclass(frozen=True)
class Profile:
    """Resource consumption of one sub-type, in hours."""

    g: int
    p: int
    tSurgery: float
    tPostop: float
    tIcu: float
    wardOptions: tuple[str, ...]

    def __post_init__(self):
        if min(self.tSurgery, self.tPostop, self.tIcu) < 0:
            raise DomainError(f"profile ({self.g},{self.p}) has a negative duration")
        if self.tPostop > 0 and not self.wardOptions:
            raise DomainError(
                f"sub-type ({self.g},{self.p}) needs postop care but lists no ward option"
            )

    @property
    def tWardTotal(self) -> float:
        # a ward bed is held for the surgery as well as the postop stay
        return self.tSurgery + self.tPostop


@dataclass(frozen=True)
class PatientCatalog:
    types: tuple[PatientType, ...]
    subTypes: tuple[SubType, ...]
    profiles: tuple[Profile, ...]
    revenues: dict[tuple[int, int], float] = field(default_factory=dict)

    def __post_init__(self):
        declared = {(s.g, s.p) for s in self.subTypes}
        if len(declared) != len(self.subTypes):
            raise DomainError("duplicate (type, sub-type) declaration")
        for prof in self.profiles:
            if (prof.g, prof.p) not in declared:
                raise DomainError(f"profile references unknown sub-type ({prof.g},{prof.p})")

    def type_ids(self) -> list[int]:
        return [t.typeId for t in self.types]

    def sub_types_of(self, g: int) -> list[SubType]:
        return [s for s in self.subTypes if s.g == g]

    def profile(self, g: int, p: int) -> Profile:
        for prof in self.profiles:
            if prof.g == g and prof.p == p:
                return prof
        raise DomainError(f"no profile for sub-type ({g},{p})")

    def type_named(self, g: int) -> PatientType:
        for t in self.types:
            if t.typeId == g:
                return t
        raise DomainError(f"unknown patient type {g}")

    def revenue(self, g: int, p: int) -> float:
        return self.revenues.get((g, p), 0.0)


@dataclass(frozen=True)
class MssTemplate:
    """Master surgical schedule template."""

    weeks: int = 1
    daysPerWeek: int = 5
    sessionsPerDay: int = 2
    sessionHours: float = 4.0
    theatres: int = 1

    def __post_init__(self):
        if min(self.weeks, self.daysPerWeek, self.sessionsPerDay, self.theatres) < 0:
            raise DomainError("MSS counts must be >= 0")
        if self.sessionHours < 0:
            raise DomainError("session duration must be >= 0")

    @property
    def totalSessions(self) -> int:
        return self.weeks * self.daysPerWeek * self.sessionsPerDay * self.theatres

    @property
    def theatreHours(self) -> float:
        """Total theatre time availability (all theatres pooled)."""
        return self.totalSessions * self.sessionHours

    def bedHours(self, beds: int) -> float:
        """Availability of a pool of beds over the assessment window."""
        return HOURS_PER_WEEK * self.weeks * beds


def compute_sessions(mss: MssTemplate) -> int:
    """Session count of the MSS: weeks x days x sessions/day x theatres."""
    return mss.totalSessions


@dataclass(frozen=True)
class Mix:
    """Case mix and sub mix, stored as percentages (0-100)."""

    caseMix: dict[int, float]
    subMix: dict[tuple[int, int], float]

    def case_mix_error(self) -> float:
        return abs(sum(self.caseMix.values()) - 100.0)

    def sub_mix_error(self, g: int) -> float:
        return abs(sum(v for (gg, _), v in self.subMix.items() if gg == g) - 100.0)

    def case_fraction(self, g: int) -> float:
        total = sum(self.caseMix.values())
        if total <= 0:
            raise DomainError("degenerate case mix")
        return self.caseMix.get(g, 0.0) / total

    def sub_fraction(self, g: int, p: int) -> float:
        total = sum(v for (gg, _), v in self.subMix.items() if gg == g)
        if total <= 0:
            raise DomainError(f"degenerate sub mix for type {g}")
        return self.subMix.get((g, p), 0.0) / total


def normalize_mix(percentages: list[float]) -> tuple[float, list[float]]:
    """Rescale percentages so they sum to exactly 100.

    Returns ``(errorPercent, rescaled)`` where errorPercent is the
    absolute deviation of the input sum from 100.  Rescaled entries are
    rounded to 2 decimals and the rounding residual is absorbed by the
    largest entry, so the displayed sum is exactly 100.
    """
    if any(x < 0 for x in percentages):
        raise DomainError("percentages must be >= 0")
    total = sum(percentages)
    if total <= 0:
        raise DomainError("degenerate mix: all entries are zero")
    error = abs(total - 100.0)
    rescaled = [round(100.0 * x / total, 2) for x in percentages]
    residual = round(100.0 - sum(rescaled), 10)
    if residual:
        i = max(range(len(rescaled)), key=lambda k: rescaled[k])
        rescaled[i] = round(rescaled[i] + residual, 10)
    return error, rescaled


@dataclass(frozen=True)
class SessionAssignment:
    """Theatre sessions allotted to each patient type (fractional allowed)."""

    sessions: dict[int, float]

    def __post_init__(self):
        for g, m in self.sessions.items():
            if m < 0:
                raise DomainError(f"session count for type {g} must be >= 0")

    def total(self) -> float:
        return sum(self.sessions.values())

    def unassigned(self, mss: MssTemplate) -> float:
        return max(0.0, mss.totalSessions - self.total())


@dataclass(frozen=True)
class TargetSet:
    typeTargets: dict[int, float] = field(default_factory=dict)
    subTypeTargets: dict[tuple[int, int], float] = field(default_factory=dict)
    weights: dict[int, float] = field(default_factory=dict)

    def __post_init__(self):
        if any(v < 0 for v in self.typeTargets.values()) or any(
            v < 0 for v in self.subTypeTargets.values()
        ):
            raise DomainError("targets must be >= 0")

    def weight(self, g: int) -> float:
        return self.weights.get(g, 1.0)

    def make_consistent(self) -> "TargetSet":
        """Raise each type target to at least the sum of its sub-type targets."""
        if not self.subTypeTargets:
            return self
        updated = dict(self.typeTargets)
        sums: dict[int, float] = {}
        for (g, _), v in self.subTypeTargets.items():
            sums[g] = sums.get(g, 0.0) + v
        for g, s in sums.items():
            if g in updated:
                updated[g] = max(updated[g], s)
        return replace(self, typeTargets=updated)


@dataclass(frozen=True)
class AllocationEntry:
    g: int
    p: int
    optionIndex: int
    ward: str | None
    count: float

    def __post_init__(self):
        if self.count < 0:
            raise DomainError("allocation counts must be >= 0")


@dataclass(frozen=True)
class Allocation:
    entries: tuple[AllocationEntry, ...]

    def validate_against(self, catalog: PatientCatalog) -> None:
        for e in self.entries:
            prof = catalog.profile(e.g, e.p)
            if e.ward is not None and e.ward not in prof.wardOptions:
                raise DomainError(
                    f"allocation assigns ({e.g},{e.p}) to {e.ward!r}, "
                    f"not one of its ward options"
                )

    def count_for(self, g: int, p: int) -> float:
        return sum(e.count for e in self.entries if e.g == g and e.p == p)


def pathway_to_profile(pathway: list[tuple[str, str, float]]) -> list[tuple[str, float]]:
    """Aggregate a patient pathway into per-area total durations.

    Output areas appear in first-visit order; total time is conserved.
    """
    totals: dict[str, float] = {}
    for _, area, duration in pathway:
        if duration < 0:
            raise DomainError(f"negative duration for area {area!r}")
        totals[area] = totals.get(area, 0.0) + duration
    return list(totals.items())


@dataclass(frozen=True)
class ProjectBundle:
    projectName: str
    config: HospitalConfig
    catalog: PatientCatalog
    mix: Mix | None = None
    sessions: SessionAssignment | None = None
    targets: TargetSet | None = None
    allocation: Allocation | None = None

    def __post_init__(self):
        ward_names = {w.name for w in self.config.wards}
        for prof in self.catalog.profiles:
            for name in prof.wardOptions:
                if name not in ward_names:
                    raise DomainError(
                        f"profile ({prof.g},{prof.p}) references unknown ward {name!r}"
                    )
        known = {(s.g, s.p) for s in self.catalog.subTypes}
        type_ids = set(self.catalog.type_ids())
        if self.mix is not None:
            for g in self.mix.caseMix:
                if g not in type_ids:
                    raise DomainError(f"case mix references unknown type {g}")
            for key in self.mix.subMix:
                if key not in known:
                    raise DomainError(f"sub mix references unknown sub-type {key}")
        if self.sessions is not None:
            for g in self.sessions.sessions:
                if g not in type_ids:
                    raise DomainError(f"session assignment references unknown type {g}")
        if self.targets is not None:
            for g in self.targets.typeTargets:
                if g not in type_ids:
                    raise DomainError(f"target references unknown type {g}")
            for key in self.targets.subTypeTargets:
                if key not in known:
                    raise DomainError(f"target references unknown sub-type {key}")
        if self.allocation is not None:
            self.allocation.validate_against(self.catalog)
