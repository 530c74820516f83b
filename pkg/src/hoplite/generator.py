"""Deterministic synthetic project generator.

Produces hospital instances whose duration and revenue magnitudes match
the small demonstration project: surgery up to ~12 h, intensive care a
few hours when present, ward stays of roughly 5-23 h.  Useful for
property tests and for exercising full-scale (hundreds of sub-types)
assessments without real records.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .domain import (
    HospitalConfig,
    Mix,
    MssTemplate,
    PatientCatalog,
    PatientType,
    Profile,
    ProjectBundle,
    SessionAssignment,
    SubType,
    TargetSet,
    Ward,
    normalize_mix,
)


@dataclass(frozen=True)
class InstanceScale:
    types: int = 5
    subTypesPerType: tuple[int, int] = (1, 3)
    wards: int = 5
    bedsPerWard: tuple[int, int] = (2, 15)
    icuBeds: int = 5
    theatres: int = 10


def generate_instance(seed: int, scale: InstanceScale = InstanceScale()) -> ProjectBundle:
    if scale.types < 1:
        raise ValueError("instance needs at least one patient type")
    rng = random.Random(seed)
    wards = tuple(
        Ward(i + 1, f"Ward {i + 1}", rng.randint(*scale.bedsPerWard))
        for i in range(scale.wards)
    )
    config = HospitalConfig(icuBeds=scale.icuBeds, theatres=scale.theatres, wards=wards)

    types = []
    sub_types = []
    profiles = []
    revenues = {}
    for g in range(1, scale.types + 1):
        count = rng.randint(*scale.subTypesPerType)
        types.append(PatientType(g, f"Specialty {g}", count))
        for p in range(1, count + 1):
            sub_types.append(SubType(g, p, f"Specialty {g}-{p}"))
            n_options = min(len(wards), 1 + (rng.random() < 0.25) + (rng.random() < 0.1))
            options = tuple(w.name for w in rng.sample(list(wards), n_options))
            profiles.append(Profile(
                g, p,
                tSurgery=round(rng.uniform(0.5, 12.0), 2),
                tPostop=round(rng.uniform(5.0, 23.0), 2),
                tIcu=round(rng.uniform(1.0, 8.0), 2) if rng.random() < 0.25 else 0.0,
                wardOptions=options,
            ))
            revenues[(g, p)] = float(rng.randrange(500, 12000, 100))
    catalog = PatientCatalog(
        types=tuple(types), subTypes=tuple(sub_types),
        profiles=tuple(profiles), revenues=revenues,
    )

    _, case = normalize_mix([rng.uniform(1.0, 20.0) for _ in types])
    case_mix = {t.typeId: case[i] for i, t in enumerate(types)}
    sub_mix = {}
    for t in types:
        subs = [s for s in sub_types if s.g == t.typeId]
        _, vals = normalize_mix([rng.uniform(1.0, 10.0) for _ in subs])
        for s, v in zip(subs, vals):
            sub_mix[(s.g, s.p)] = v
    mix = Mix(caseMix=case_mix, subMix=sub_mix)

    mss = MssTemplate(weeks=1, daysPerWeek=5, sessionsPerDay=2,
                      sessionHours=4.0, theatres=scale.theatres)
    per_type = mss.totalSessions / scale.types
    sessions = SessionAssignment(sessions={t.typeId: per_type for t in types})
    targets = TargetSet(typeTargets={
        t.typeId: float(rng.randrange(5, 120)) for t in types
    })
    return ProjectBundle(
        projectName=f"synthetic_{seed}", config=config, catalog=catalog,
        mix=mix, sessions=sessions, targets=targets,
    )
