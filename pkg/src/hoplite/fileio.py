"""Parsing and serialization of the project file formats.

A project is a small set of comma-separated text files: ``*.project``
(the index), ``*.config`` (hospital layout), ``*.patient`` (types,
sub-types, profiles, revenues) and the optional ``*.mix``,
``*.session``, ``*.target`` and ``*.alloc`` components.  Parsing is
total: every input yields either a value or a :class:`ParseError`
carrying a source location.  ``parse(save(x)) == x`` for every
component type.

Profile lines store the three durations as (ICU, surgery, ward-postop);
headers are matched case-insensitively and both LF and CRLF line
endings are accepted.  Emitted files use LF.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path

from .domain import (
    Allocation,
    AllocationEntry,
    DomainError,
    HospitalConfig,
    Mix,
    PatientCatalog,
    PatientType,
    Profile,
    ProjectBundle,
    SessionAssignment,
    SubType,
    TargetSet,
    Ward,
)


@dataclass(frozen=True)
class SourceLocation:
    fileName: str
    lineNumber: int
    columnHint: int = 1


class ParseError(ValueError):
    def __init__(self, message: str, location: SourceLocation):
        super().__init__(f"{location.fileName}:{location.lineNumber}: {message}")
        self.location = location


_INDEX_RE = re.compile(r"^\[(\d+)\]$")
_INDEX2_RE = re.compile(r"^\[(\d+)\]\[(\d+)\]$")
_INDEX3_RE = re.compile(r"^\[(\d+)\]\[(\d+)\]\[(\d+)\]$")


def _fmt(value: float) -> str:
    """Shortest decimal text that round-trips the value."""
    if value == int(value) and abs(value) < 1e15:
        return str(int(value))
    return repr(float(value))


class _Reader:
    """Line cursor over one file with located errors."""

    def __init__(self, text: str, file_name: str):
        self.lines = text.replace("\r\n", "\n").split("\n")
        self.file_name = file_name
        self.pos = 0

    def error(self, message: str, line_no: int | None = None) -> ParseError:
        return ParseError(
            message, SourceLocation(self.file_name, line_no or max(1, self.pos))
        )

    def peek(self) -> str | None:
        while self.pos < len(self.lines):
            if self.lines[self.pos].strip():
                return self.lines[self.pos]
            self.pos += 1
        return None

    def next_fields(self) -> list[str] | None:
        line = self.peek()
        if line is None:
            return None
        self.pos += 1
        return [f.strip() for f in line.split(",")]

    def expect_header(self, *keywords: str) -> str:
        fields = self.next_fields()
        if fields is None:
            raise self.error(f"expected header {keywords[0]!r}, found end of file")
        key = fields[0].lower()
        for kw in keywords:
            if key == kw.lower():
                return fields[1] if len(fields) > 1 else ""
        raise self.error(
            f"expected header {keywords[0]!r}, found {fields[0]!r}", self.pos
        )

    def header_matches(self, *keywords: str) -> bool:
        line = self.peek()
        if line is None:
            return False
        key = line.split(",")[0].strip().lower()
        return any(key == kw.lower() for kw in keywords)


def _parse_index(token: str, reader: _Reader) -> int:
    m = _INDEX_RE.match(token)
    if not m:
        raise reader.error(f"malformed index {token!r}, expected [g]")
    return int(m.group(1))


def _parse_index2(token: str, reader: _Reader) -> tuple[int, int]:
    m = _INDEX2_RE.match(token)
    if not m:
        raise reader.error(f"malformed index {token!r}, expected [g][p]")
    return int(m.group(1)), int(m.group(2))


def _parse_number(token: str, reader: _Reader) -> float:
    try:
        return float(token)
    except ValueError:
        raise reader.error(f"expected a number, found {token!r}") from None


def _check_no_extra(fields: list[str], expected: int, reader: _Reader, lenient: bool):
    extras = [f for f in fields[expected:] if f]
    if extras and not lenient:
        raise reader.error(f"unexpected trailing fields {extras!r}")


# ---------------------------------------------------------------------------
# component parsers


def parse_config(text: str, file_name: str = "<config>", lenient: bool = False) -> HospitalConfig:
    r = _Reader(text, file_name)
    icu = int(_parse_number(r.expect_header("Intensive Care Beds"), r))
    theatres = int(_parse_number(r.expect_header("Theatres"), r))
    ward_count = int(_parse_number(r.expect_header("Wards"), r))
    r.expect_header("Ward Info", "Ward Information")
    wards = []
    while (fields := r.next_fields()) is not None:
        if len(fields) < 3:
            raise r.error("ward line needs [index],name,beds")
        idx = _parse_index(fields[0], r)
        _check_no_extra(fields, 3, r, lenient)
        wards.append(Ward(idx, fields[1], int(_parse_number(fields[2], r))))
    if len(wards) != ward_count:
        raise r.error(f"declared {ward_count} wards but listed {len(wards)}")
    try:
        return HospitalConfig(icuBeds=icu, theatres=theatres, wards=tuple(wards))
    except DomainError as exc:
        raise r.error(str(exc)) from exc


def save_config(config: HospitalConfig) -> str:
    lines = [
        f"Intensive Care Beds,{config.icuBeds}",
        f"Theatres,{config.theatres}",
        f"Wards,{len(config.wards)}",
        "Ward Info,",
    ]
    lines += [f"[{w.wardId}],{w.name},{w.beds}" for w in config.wards]
    return "\n".join(lines) + "\n"


def parse_patient(text: str, file_name: str = "<patient>", lenient: bool = False) -> PatientCatalog:
    r = _Reader(text, file_name)
    type_count = int(_parse_number(r.expect_header("Patient Types"), r))
    r.expect_header("Patient Type")
    types = []
    while not r.header_matches("Patient Sub Type", "Patient Sub-Type"):
        fields = r.next_fields()
        if fields is None:
            raise r.error("expected 'Patient Sub Type' section")
        if len(fields) < 3:
            raise r.error("patient type line needs [g],name,subTypeCount")
        _check_no_extra(fields, 3, r, lenient)
        types.append(
            PatientType(_parse_index(fields[0], r), fields[1], int(_parse_number(fields[2], r)))
        )
    if len(types) != type_count:
        raise r.error(f"declared {type_count} patient types but listed {len(types)}")
    r.expect_header("Patient Sub Type", "Patient Sub-Type")
    sub_types = []
    seen: set[tuple[int, int]] = set()
    while not r.header_matches("Profile"):
        fields = r.next_fields()
        if fields is None:
            raise r.error("expected 'Profile' section")
        if len(fields) < 2:
            raise r.error("sub type line needs [g][p],name")
        g, p = _parse_index2(fields[0], r)
        if (g, p) in seen:
            raise r.error(f"duplicate sub-type [{g}][{p}]")
        seen.add((g, p))
        _check_no_extra(fields, 2, r, lenient)
        sub_types.append(SubType(g, p, fields[1]))
    r.expect_header("Profile")
    profiles = []
    while not r.header_matches("Revenue"):
        fields = r.next_fields()
        if fields is None:
            raise r.error("expected 'Revenue' section")
        if len(fields) < 4:
            raise r.error("profile line needs [g][p],tICU,tSurgery,tWard,wards...")
        g, p = _parse_index2(fields[0], r)
        t_icu = _parse_number(fields[1], r)
        t_surgery = _parse_number(fields[2], r)
        t_ward = _parse_number(fields[3], r)
        options = tuple(f for f in fields[4:] if f)
        try:
            profiles.append(
                Profile(g, p, tSurgery=t_surgery, tPostop=t_ward, tIcu=t_icu, wardOptions=options)
            )
        except DomainError as exc:
            raise r.error(str(exc)) from exc
    r.expect_header("Revenue")
    revenues: dict[tuple[int, int], float] = {}
    while (fields := r.next_fields()) is not None:
        if len(fields) < 2:
            raise r.error("revenue line needs [g][p],amount")
        g, p = _parse_index2(fields[0], r)
        _check_no_extra(fields, 2, r, lenient)
        revenues[(g, p)] = _parse_number(fields[1], r)
    try:
        return PatientCatalog(
            types=tuple(types), subTypes=tuple(sub_types),
            profiles=tuple(profiles), revenues=revenues,
        )
    except DomainError as exc:
        raise r.error(str(exc)) from exc


def save_patient(catalog: PatientCatalog) -> str:
    lines = [f"Patient Types,{len(catalog.types)}", "Patient Type,"]
    lines += [f"[{t.typeId}],{t.name},{t.subTypeCount}" for t in catalog.types]
    lines.append("Patient Sub Type,")
    lines += [f"[{s.g}][{s.p}],{s.name}" for s in catalog.subTypes]
    lines.append("Profile,")
    for prof in catalog.profiles:
        parts = [f"[{prof.g}][{prof.p}]", _fmt(prof.tIcu), _fmt(prof.tSurgery), _fmt(prof.tPostop)]
        parts += list(prof.wardOptions)
        lines.append(",".join(parts))
    lines.append("Revenue,")
    lines += [f"[{g}][{p}],{_fmt(v)}" for (g, p), v in catalog.revenues.items()]
    return "\n".join(lines) + "\n"


def parse_mix(text: str, file_name: str = "<mix>", lenient: bool = False) -> Mix:
    r = _Reader(text, file_name)
    r.expect_header("Case Mix")
    case_mix: dict[int, float] = {}
    while not r.header_matches("Sub Mix"):
        fields = r.next_fields()
        if fields is None:
            raise r.error("expected 'Sub Mix' section")
        g = _parse_index(fields[0], r)
        # optional name field between index and value
        value = fields[2] if len(fields) > 2 and fields[2] else fields[1]
        case_mix[g] = _parse_number(value, r)
    r.expect_header("Sub Mix")
    sub_mix: dict[tuple[int, int], float] = {}
    while (fields := r.next_fields()) is not None:
        g, p = _parse_index2(fields[0], r)
        value = fields[2] if len(fields) > 2 and fields[2] else fields[1]
        sub_mix[(g, p)] = _parse_number(value, r)
    return Mix(caseMix=case_mix, subMix=sub_mix)


def save_mix(mix: Mix) -> str:
    lines = ["Case Mix,"]
    lines += [f"[{g}],{_fmt(v)}" for g, v in mix.caseMix.items()]
    lines.append("Sub Mix,")
    lines += [f"[{g}][{p}],{_fmt(v)}" for (g, p), v in mix.subMix.items()]
    return "\n".join(lines) + "\n"


def parse_session(
    text: str,
    file_name: str = "<session>",
    lenient: bool = False,
) -> SessionAssignment:
    r = _Reader(text, file_name)
    r.expect_header("Patient Type")
    sessions: dict[int, float] = {}
    while (fields := r.next_fields()) is not None:
        if len(fields) < 3:
            raise r.error("session line needs [g],name,sessions")
        g = _parse_index(fields[0], r)
        _check_no_extra(fields, 3, r, lenient)
        sessions[g] = _parse_number(fields[2], r)
    try:
        return SessionAssignment(sessions=sessions)
    except DomainError as exc:
        raise r.error(str(exc)) from exc


def save_session(assignment: SessionAssignment, catalog: PatientCatalog | None = None) -> str:
    lines = ["Patient Type,"]
    for g, m in assignment.sessions.items():
        name = catalog.type_named(g).name if catalog else f"Type {g}"
        lines.append(f"[{g}],{name},{_fmt(m)}")
    return "\n".join(lines) + "\n"


def parse_target(text: str, file_name: str = "<target>", lenient: bool = False) -> TargetSet:
    r = _Reader(text, file_name)
    type_targets: dict[int, float] = {}
    sub_targets: dict[tuple[int, int], float] = {}
    if r.header_matches("Patient Type"):
        r.expect_header("Patient Type")
        while r.peek() is not None and not r.header_matches("Patient Sub-Type", "Patient Sub Type"):
            fields = r.next_fields()
            g = _parse_index(fields[0], r)
            value = fields[2] if len(fields) > 2 and fields[2] else fields[1]
            type_targets[g] = _parse_number(value, r)
    if r.header_matches("Patient Sub-Type", "Patient Sub Type"):
        r.expect_header("Patient Sub-Type", "Patient Sub Type")
        while (fields := r.next_fields()) is not None:
            g, p = _parse_index2(fields[0], r)
            value = fields[2] if len(fields) > 2 and fields[2] else fields[1]
            sub_targets[(g, p)] = _parse_number(value, r)
    if r.peek() is not None:
        raise r.error(
            f"expected header 'Patient Type' or 'Patient Sub-Type', found {r.peek()!r}"
        )
    try:
        return TargetSet(typeTargets=type_targets, subTypeTargets=sub_targets)
    except DomainError as exc:
        raise r.error(str(exc)) from exc


def save_target(targets: TargetSet, catalog: PatientCatalog | None = None) -> str:
    lines = []
    if targets.typeTargets:
        lines.append("Patient Type,")
        for g, v in targets.typeTargets.items():
            name = catalog.type_named(g).name if catalog else f"Type {g}"
            lines.append(f"[{g}],{name},{_fmt(v)}")
    if targets.subTypeTargets:
        lines.append("Patient Sub-Type,")
        for (g, p), v in targets.subTypeTargets.items():
            name = ""
            if catalog:
                for s in catalog.subTypes:
                    if (s.g, s.p) == (g, p):
                        name = s.name
            lines.append(f"[{g}][{p}],{name or f'Type {g}-{p}'},{_fmt(v)}")
    return "\n".join(lines) + "\n"


def parse_alloc(
    text: str,
    catalog: PatientCatalog | None = None,
    file_name: str = "<alloc>",
    lenient: bool = False,
) -> Allocation:
    r = _Reader(text, file_name)
    r.expect_header("Allocation")
    entries = []
    while (fields := r.next_fields()) is not None:
        if len(fields) < 3:
            raise r.error("allocation line needs [g][p][k],descr,count")
        m = _INDEX3_RE.match(fields[0])
        if not m:
            raise r.error(f"malformed index {fields[0]!r}, expected [g][p][k]")
        g, p, k = int(m.group(1)), int(m.group(2)), int(m.group(3))
        count = _parse_number(fields[2], r)
        ward = None
        if catalog is not None:
            prof = catalog.profile(g, p)
            if prof.wardOptions:
                if not 1 <= k <= len(prof.wardOptions):
                    raise r.error(
                        f"option index {k} out of range for sub-type ({g},{p})"
                    )
                ward = prof.wardOptions[k - 1]
        _check_no_extra(fields, 3, r, lenient)
        try:
            entries.append(AllocationEntry(g=g, p=p, optionIndex=k, ward=ward, count=count))
        except DomainError as exc:
            raise r.error(str(exc)) from exc
    return Allocation(entries=tuple(entries))


def save_alloc(allocation: Allocation, catalog: PatientCatalog | None = None) -> str:
    lines = ["Allocation,"]
    for e in allocation.entries:
        name = f"Type {e.g}-{e.p}"
        if catalog:
            for s in catalog.subTypes:
                if (s.g, s.p) == (e.g, e.p):
                    name = s.name
        descr = f"{name}@{e.ward}" if e.ward else name
        lines.append(f"[{e.g}][{e.p}][{e.optionIndex}],{descr},{_fmt(e.count)}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# project files

_PROJECT_KEYS = [
    "Project Name",
    "Hospital Configuration",
    "Patient Information",
    "Case Mix",
    "Session",
    "Targets",
    "Allocation",
]


def load_project(path: str | Path, lenient: bool = False) -> ProjectBundle:
    path = Path(path)
    r = _Reader(path.read_text(), str(path))
    values: dict[str, str] = {}
    for key in _PROJECT_KEYS:
        values[key] = r.expect_header(key)

    def read_component(key: str) -> str | None:
        name = values[key]
        if not name:
            return None
        comp = path.parent / name
        if not comp.exists():
            raise ParseError(f"referenced file {name!r} not found", SourceLocation(str(path), 1))
        return comp.read_text()

    config = parse_config(read_component("Hospital Configuration") or "",
                          values["Hospital Configuration"], lenient)
    catalog = parse_patient(read_component("Patient Information") or "",
                            values["Patient Information"], lenient)
    mix = sessions = targets = alloc = None
    text = read_component("Case Mix")
    if text is not None:
        mix = parse_mix(text, values["Case Mix"], lenient)
    text = read_component("Session")
    if text is not None:
        sessions = parse_session(text, values["Session"], lenient)
    text = read_component("Targets")
    if text is not None:
        targets = parse_target(text, values["Targets"], lenient)
    text = read_component("Allocation")
    if text is not None:
        alloc = parse_alloc(text, catalog, values["Allocation"], lenient)
    try:
        return ProjectBundle(
            projectName=values["Project Name"], config=config, catalog=catalog,
            mix=mix, sessions=sessions, targets=targets, allocation=alloc,
        )
    except DomainError as exc:
        raise ParseError(str(exc), SourceLocation(str(path), 1)) from exc


def save_project(bundle: ProjectBundle, directory: str | Path) -> Path:
    """Write a bundle and its component files; returns the project path."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    name = bundle.projectName
    components = {
        "Hospital Configuration": (f"{name}.config", save_config(bundle.config)),
        "Patient Information": (f"{name}.patient", save_patient(bundle.catalog)),
    }
    if bundle.mix is not None:
        components["Case Mix"] = (f"{name}.mix", save_mix(bundle.mix))
    if bundle.sessions is not None:
        components["Session"] = (f"{name}.session", save_session(bundle.sessions, bundle.catalog))
    if bundle.targets is not None:
        components["Targets"] = (f"{name}.target", save_target(bundle.targets, bundle.catalog))
    if bundle.allocation is not None:
        components["Allocation"] = (f"{name}.alloc", save_alloc(bundle.allocation, bundle.catalog))
    lines = [f"Project Name,{name}"]
    for key in _PROJECT_KEYS[1:]:
        if key in components:
            file_name, text = components[key]
            (directory / file_name).write_text(text)
            lines.append(f"{key},{file_name}")
        else:
            lines.append(f"{key},")
    project_path = directory / f"{name}.project"
    project_path.write_text("\n".join(lines) + "\n")
    return project_path


# ---------------------------------------------------------------------------
# JSON mirror (used by the HTTP API)


def bundle_to_json(bundle: ProjectBundle) -> dict:
    out: dict = {
        "projectName": bundle.projectName,
        "config": {
            "icuBeds": bundle.config.icuBeds,
            "theatres": bundle.config.theatres,
            "wards": [
                {"wardId": w.wardId, "name": w.name, "beds": w.beds}
                for w in bundle.config.wards
            ],
        },
        "catalog": {
            "types": [
                {"typeId": t.typeId, "name": t.name, "subTypeCount": t.subTypeCount}
                for t in bundle.catalog.types
            ],
            "subTypes": [
                {"g": s.g, "p": s.p, "name": s.name} for s in bundle.catalog.subTypes
            ],
            "profiles": [
                {
                    "g": pr.g, "p": pr.p,
                    "tSurgery": pr.tSurgery, "tPostop": pr.tPostop, "tIcu": pr.tIcu,
                    "wardOptions": list(pr.wardOptions),
                }
                for pr in bundle.catalog.profiles
            ],
            "revenues": [
                {"g": g, "p": p, "revenue": v}
                for (g, p), v in bundle.catalog.revenues.items()
            ],
        },
    }
    if bundle.mix is not None:
        out["mix"] = {
            "caseMix": [{"g": g, "percent": v} for g, v in bundle.mix.caseMix.items()],
            "subMix": [
                {"g": g, "p": p, "percent": v} for (g, p), v in bundle.mix.subMix.items()
            ],
        }
    if bundle.sessions is not None:
        out["sessions"] = [
            {"g": g, "sessions": m} for g, m in bundle.sessions.sessions.items()
        ]
    if bundle.targets is not None:
        out["targets"] = {
            "typeTargets": [
                {"g": g, "target": v} for g, v in bundle.targets.typeTargets.items()
            ],
            "subTypeTargets": [
                {"g": g, "p": p, "target": v}
                for (g, p), v in bundle.targets.subTypeTargets.items()
            ],
            "weights": [{"g": g, "weight": v} for g, v in bundle.targets.weights.items()],
        }
    if bundle.allocation is not None:
        out["allocation"] = [
            {"g": e.g, "p": e.p, "optionIndex": e.optionIndex, "ward": e.ward, "count": e.count}
            for e in bundle.allocation.entries
        ]
    return out


def bundle_from_json(data: dict) -> ProjectBundle:
    config = HospitalConfig(
        icuBeds=data["config"]["icuBeds"],
        theatres=data["config"]["theatres"],
        wards=tuple(
            Ward(w["wardId"], w["name"], w["beds"]) for w in data["config"]["wards"]
        ),
    )
    cat = data["catalog"]
    catalog = PatientCatalog(
        types=tuple(PatientType(t["typeId"], t["name"], t["subTypeCount"]) for t in cat["types"]),
        subTypes=tuple(SubType(s["g"], s["p"], s["name"]) for s in cat["subTypes"]),
        profiles=tuple(
            Profile(
                pr["g"], pr["p"],
                tSurgery=pr["tSurgery"], tPostop=pr["tPostop"], tIcu=pr["tIcu"],
                wardOptions=tuple(pr["wardOptions"]),
            )
            for pr in cat["profiles"]
        ),
        revenues={(rv["g"], rv["p"]): rv["revenue"] for rv in cat.get("revenues", [])},
    )
    mix = None
    if "mix" in data and data["mix"] is not None:
        mix = Mix(
            caseMix={e["g"]: e["percent"] for e in data["mix"]["caseMix"]},
            subMix={(e["g"], e["p"]): e["percent"] for e in data["mix"]["subMix"]},
        )
    sessions = None
    if data.get("sessions") is not None:
        sessions = SessionAssignment(
            sessions={e["g"]: e["sessions"] for e in data["sessions"]}
        )
    targets = None
    if data.get("targets") is not None:
        t = data["targets"]
        targets = TargetSet(
            typeTargets={e["g"]: e["target"] for e in t.get("typeTargets", [])},
            subTypeTargets={(e["g"], e["p"]): e["target"] for e in t.get("subTypeTargets", [])},
            weights={e["g"]: e["weight"] for e in t.get("weights", [])},
        )
    alloc = None
    if data.get("allocation") is not None:
        alloc = Allocation(
            entries=tuple(
                AllocationEntry(
                    g=e["g"], p=e["p"], optionIndex=e["optionIndex"],
                    ward=e.get("ward"), count=e["count"],
                )
                for e in data["allocation"]
            )
        )
    return ProjectBundle(
        projectName=data["projectName"], config=config, catalog=catalog,
        mix=mix, sessions=sessions, targets=targets, allocation=alloc,
    )


def bundle_to_json_text(bundle: ProjectBundle) -> str:
    return json.dumps(bundle_to_json(bundle), indent=2)
