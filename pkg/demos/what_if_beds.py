"""What-if sweep: when several resources saturate at once, which one is
worth expanding?  Beds on a saturated ward buy nothing while theatre time
also binds; extra theatres raise throughput directly."""

from dataclasses import replace
from pathlib import Path

from hoplite import AssessmentSpec, HospitalConfig, MssTemplate, Ward, assess_capacity
from hoplite.fileio import load_project

HERE = Path(__file__).resolve().parent
bundle = load_project(HERE.parent / "tests/data/scenario_1/scenario_1.project")


def mss_for(config):
    return MssTemplate(weeks=1, daysPerWeek=5, sessionsPerDay=2, sessionHours=4.0,
                       theatres=config.theatres)


base = assess_capacity(bundle, AssessmentSpec(), mss_for(bundle.config))
print(f"Baseline capacity {base.total:.4f}; saturated resources: "
      f"{', '.join(base.report.flagged())}\n")

ward = next(name for name in base.report.flagged() if name.startswith("Ward"))
config = HospitalConfig(
    icuBeds=bundle.config.icuBeds,
    theatres=bundle.config.theatres,
    wards=tuple(
        Ward(w.wardId, w.name, w.beds + 3 if w.name == ward else w.beds)
        for w in bundle.config.wards
    ),
)
with_beds = assess_capacity(replace(bundle, config=config), AssessmentSpec(), mss_for(config))
print(f"+3 beds on {ward}: capacity {with_beds.total:.4f} "
      f"(gain {with_beds.total - base.total:+.4f})  — theatre time still binds\n")

print("Adding theatres instead:")
previous = base.total
for extra in range(1, 6):
    config = HospitalConfig(
        icuBeds=bundle.config.icuBeds,
        theatres=bundle.config.theatres + extra,
        wards=bundle.config.wards,
    )
    result = assess_capacity(replace(bundle, config=config), AssessmentSpec(), mss_for(config))
    print(f"  +{extra} theatre(s): capacity {result.total:8.4f} "
          f"(gain {result.total - previous:+.4f}), "
          f"saturated: {', '.join(result.report.flagged())}")
    previous = result.total

print("\nEach theatre keeps adding the same gain while the flexible ward "
      "options still have spare beds to absorb the extra patients.")
