import random

import pytest

from hoplite import (
    Allocation,
    AllocationEntry,
    AssessmentError,
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
    basic_assess_by_beds,
    basic_assess_by_theatre,
    revenue_of,
    sessions_required,
    utilization_of,
)

CASE_STUDY_SESSIONS = {1: 12, 2: 25, 3: 34, 4: 10, 5: 19}


class TestByTheatre:
    def test_case_study_sessions(self, scenario, scenario_mss):
        result = basic_assess_by_theatre(
            scenario, SessionAssignment(CASE_STUDY_SESSIONS), scenario.mix, scenario_mss
        )
        expected = {1: 39.5062, 2: 41.6667, 3: 22.2622, 4: 11.7647, 5: 18.5366}
        for g, value in expected.items():
            assert result.perType[g] == pytest.approx(value, abs=1e-4)
        assert result.total == pytest.approx(133.736, abs=1e-3)

    def test_theatre_hours_match_allotted_sessions(self, scenario, scenario_mss):
        result = basic_assess_by_theatre(
            scenario, SessionAssignment(CASE_STUDY_SESSIONS), scenario.mix, scenario_mss
        )
        ot = result.report.row("OT")
        # each type consumes exactly its allotted session time by construction
        assert ot.usedHours == pytest.approx(
            sum(CASE_STUDY_SESSIONS.values()) * scenario_mss.sessionHours
        )
        assert ot.availableHours == pytest.approx(scenario_mss.theatreHours)

    def test_zero_surgery_type_warned(self, scenario_mss):
        bundle = ProjectBundle(
            projectName="t",
            config=HospitalConfig(icuBeds=0, theatres=1, wards=(Ward(1, "Ward 1", 5),)),
            catalog=PatientCatalog(
                types=(PatientType(1, "No surgery", 1),),
                subTypes=(SubType(1, 1, "No surgery"),),
                profiles=(Profile(1, 1, tSurgery=0.0, tPostop=10.0, tIcu=0.0,
                                  wardOptions=("Ward 1",)),),
            ),
        )
        mix = Mix(caseMix={1: 100.0}, subMix={(1, 1): 100.0})
        result = basic_assess_by_theatre(bundle, SessionAssignment({1: 5}), mix, scenario_mss)
        assert result.perType[1] == 0.0
        assert result.warnings

    def test_counts_scale_with_sessions(self, scenario, scenario_mss):
        base = basic_assess_by_theatre(
            scenario, SessionAssignment({1: 10}), scenario.mix, scenario_mss
        )
        double = basic_assess_by_theatre(
            scenario, SessionAssignment({1: 20}), scenario.mix, scenario_mss
        )
        assert double.perType[1] == pytest.approx(2 * base.perType[1])


class TestByBeds:
    def test_case_study_first_ward(self, scenario, scenario_mss):
        result = basic_assess_by_beds(scenario, scenario.mix, scenario_mss)
        # type 1's first-choice ward has 2 beds: 336 bed-hours against a
        # sub-mix-weighted 16.222 hour per-patient ward stay
        load = sum(
            scenario.mix.sub_fraction(1, s.p) * scenario.catalog.profile(1, s.p).tWardTotal
            for s in scenario.catalog.sub_types_of(1)
        )
        assert load == pytest.approx(16.222, abs=1e-4)
        assert result.perType[1] == pytest.approx(336.0 / load)

    def test_doubling_beds_doubles_counts(self, scenario, scenario_mss):
        doubled = ProjectBundle(
            projectName=scenario.projectName,
            config=HospitalConfig(
                icuBeds=scenario.config.icuBeds * 2,
                theatres=scenario.config.theatres,
                wards=tuple(Ward(w.wardId, w.name, w.beds * 2) for w in scenario.config.wards),
            ),
            catalog=scenario.catalog,
        )
        base = basic_assess_by_beds(scenario, scenario.mix, scenario_mss)
        big = basic_assess_by_beds(doubled, scenario.mix, scenario_mss)
        for g in base.perType:
            assert big.perType[g] == pytest.approx(2 * base.perType[g])

    def test_zero_bed_ward_gives_zero_and_warning(self, scenario, scenario_mss):
        stripped = ProjectBundle(
            projectName=scenario.projectName,
            config=HospitalConfig(
                icuBeds=scenario.config.icuBeds,
                theatres=scenario.config.theatres,
                wards=tuple(
                    Ward(w.wardId, w.name, 0 if w.name == "Ward 1" else w.beds)
                    for w in scenario.config.wards
                ),
            ),
            catalog=scenario.catalog,
        )
        result = basic_assess_by_beds(stripped, scenario.mix, scenario_mss)
        # both of type 1's sub-types route to Ward 1 first
        assert result.perType[1] == 0.0
        assert any("Ward 1" in w for w in result.warnings)


class TestUtilization:
    def test_case_study_allocation(self, scenario, scenario_mss):
        report = utilization_of(scenario, scenario.allocation, scenario_mss)
        ot = report.row("OT")
        assert ot.usedHours == pytest.approx(433.38, abs=0.01)
        assert ot.availableHours == pytest.approx(400.0)
        assert ot.percentUsed == pytest.approx(108.35, abs=0.01)
        ward5 = report.row("Ward 5")
        assert ward5.usedHours == pytest.approx(522.76, abs=0.01)
        assert ward5.availableHours == pytest.approx(504.0)
        assert ward5.percentUsed == pytest.approx(103.72, abs=0.01)
        assert report.flagged() == ["OT", "Ward 5"]

    def test_empty_allocation(self, scenario, scenario_mss):
        report = utilization_of(scenario, Allocation(entries=()), scenario_mss)
        for row in report.rows:
            assert row.usedHours == 0.0
            assert not row.bottleneck

    def test_text_table_lists_all_resources(self, scenario, scenario_mss):
        report = utilization_of(scenario, scenario.allocation, scenario_mss)
        text = report.to_text()
        for name in ("OT", "ICU", "Ward 1", "Ward 5", "ALL WARDS"):
            assert name in text
        assert "[!]" in text

    def test_used_hours_linear_in_counts(self, scenario, scenario_mss):
        doubled = Allocation(
            entries=tuple(
                AllocationEntry(e.g, e.p, e.optionIndex, e.ward, e.count * 2)
                for e in scenario.allocation.entries
            )
        )
        r1 = utilization_of(scenario, scenario.allocation, scenario_mss)
        r2 = utilization_of(scenario, doubled, scenario_mss)
        for row1, row2 in zip(r1.rows, r2.rows):
            assert row2.usedHours == pytest.approx(2 * row1.usedHours)

    def test_rejects_ward_outside_options(self, scenario, scenario_mss):
        bad = Allocation(entries=(AllocationEntry(1, 1, 1, "Ward 3", 5.0),))
        assert "Ward 3" not in scenario.catalog.profile(1, 1).wardOptions
        with pytest.raises(Exception):
            utilization_of(scenario, bad, scenario_mss)


class TestSessionsRequired:
    def test_type_targets_use_mix(self, scenario):
        # type 1: sub fractions 0.7 / 0.3 over surgery times 1.2 / 1.25 hours
        targets = TargetSet(typeTargets={1: 9.0})
        needed = sessions_required(targets, scenario.mix, scenario.catalog, 4.0)
        assert needed[1] == pytest.approx(9.0 * 1.215 / 4.0)
        assert needed[2] == 0.0

    def test_sub_targets_bypass_mix(self, scenario):
        targets = TargetSet(
            typeTargets={1: 9.0},
            subTypeTargets={(1, 1): 6.3, (1, 2): 2.7},
        )
        needed = sessions_required(targets, None, scenario.catalog, 4.0)
        assert needed[1] == pytest.approx((6.3 * 1.2 + 2.7 * 1.25) / 4.0)

    def test_type_target_without_mix_rejected(self, scenario):
        with pytest.raises(AssessmentError):
            sessions_required(TargetSet(typeTargets={1: 9.0}), None, scenario.catalog, 4.0)

    def test_round_trips_with_theatre_assessment(self, scenario, scenario_mss):
        result = basic_assess_by_theatre(
            scenario, SessionAssignment(CASE_STUDY_SESSIONS), scenario.mix, scenario_mss
        )
        targets = TargetSet(typeTargets=dict(result.perType))
        needed = sessions_required(targets, scenario.mix, scenario.catalog, 4.0)
        for g, m in CASE_STUDY_SESSIONS.items():
            assert needed[g] == pytest.approx(m)


class TestRevenue:
    def test_per_type_and_total(self, scenario):
        counts = {(1, 1): 2.0, (1, 2): 1.0, (2, 1): 3.0}
        per_type, total = revenue_of(counts, scenario.catalog)
        cat = scenario.catalog
        assert per_type[1] == pytest.approx(2 * cat.revenue(1, 1) + cat.revenue(1, 2))
        assert per_type[2] == pytest.approx(3 * cat.revenue(2, 1))
        assert total == pytest.approx(per_type[1] + per_type[2])

    def test_revenue_linear(self, scenario):
        rng = random.Random(5)
        counts = {(s.g, s.p): rng.uniform(0, 40) for s in scenario.catalog.subTypes}
        _, t1 = revenue_of(counts, scenario.catalog)
        _, t2 = revenue_of({k: 3 * v for k, v in counts.items()}, scenario.catalog)
        assert t2 == pytest.approx(3 * t1)
