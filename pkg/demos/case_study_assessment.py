"""Walk through the bundled case study: load it, then compare the
single-resource estimates with the LP capacity assessments."""

from pathlib import Path

from hoplite import (
    AssessmentSpec,
    MssTemplate,
    Viewpoint,
    assess_capacity,
    basic_assess_by_beds,
    basic_assess_by_theatre,
)
from hoplite.fileio import load_project

HERE = Path(__file__).resolve().parent
bundle = load_project(HERE.parent / "tests/data/scenario_1/scenario_1.project")
mss = MssTemplate(weeks=1, daysPerWeek=5, sessionsPerDay=2, sessionHours=4.0,
                  theatres=bundle.config.theatres)

print(f"Loaded {bundle.projectName}: {len(bundle.catalog.types)} patient types, "
      f"{len(bundle.config.wards)} wards, {mss.totalSessions} theatre sessions/week\n")

theatre = basic_assess_by_theatre(bundle, bundle.sessions, bundle.mix, mss)
print(f"Theatre time alone supports {theatre.total:.1f} patients/week")

beds = basic_assess_by_beds(bundle, bundle.mix, mss)
print(f"Ward beds alone support {beds.total:.1f} patients/week "
      "(ignores theatre limits entirely)\n")

whole = assess_capacity(bundle, AssessmentSpec(), mss)
print(f"All resources + case mix enforced: {whole.total:.4f} patients/week")
print(whole.report.to_text())

partition = assess_capacity(
    bundle, AssessmentSpec(viewpoint=Viewpoint.SESSION_PARTITION), mss
)
print(f"\nLetting each type fill its own theatre share instead: "
      f"{partition.total:.4f} patients/week")
for g, count in sorted(partition.perType.items()):
    name = bundle.catalog.type_named(g).name
    print(f"  {name}: {count:.4f}")
