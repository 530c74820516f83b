import random

import pytest

from hoplite import ParseError, bundle_from_json, bundle_to_json, load_project, save_project
from hoplite.fileio import (
    parse_alloc,
    parse_config,
    parse_mix,
    parse_patient,
    parse_session,
    parse_target,
    save_alloc,
    save_config,
    save_mix,
    save_patient,
    save_session,
    save_target,
)
from hoplite.generator import InstanceScale, generate_instance


class TestScenarioFiles:
    def test_config(self, scenario):
        cfg = scenario.config
        assert cfg.icuBeds == 5
        assert cfg.theatres == 10
        assert [w.beds for w in cfg.wards] == [2, 5, 10, 14, 3]
        assert [w.name for w in cfg.wards] == [f"Ward {i}" for i in range(1, 6)]

    def test_catalog(self, scenario):
        cat = scenario.catalog
        assert len(cat.types) == 5
        assert len(cat.subTypes) == 8
        p21 = cat.profile(2, 1)
        assert p21.tIcu == 0
        assert p21.tSurgery == 2.4
        assert p21.tPostop == 16.31
        assert p21.wardOptions == ("Ward 2", "Ward 1", "Ward 5")
        p51 = cat.profile(5, 1)
        assert (p51.tIcu, p51.tSurgery, p51.tPostop) == (12, 4.1, 22.81)
        assert cat.revenue(4, 1) == 10000.0

    def test_mix(self, scenario):
        assert scenario.mix.caseMix == {1: 5, 2: 43, 3: 18, 4: 9, 5: 25}
        assert scenario.mix.subMix[(3, 2)] == 40

    def test_sessions(self, scenario):
        assert scenario.sessions.sessions == {1: 12, 2: 25, 3: 34, 4: 10, 5: 19}

    def test_targets(self, scenario):
        assert scenario.targets.typeTargets == {1: 10, 2: 55, 3: 65, 4: 35, 5: 53}
        assert scenario.targets.subTypeTargets[(3, 3)] == 29

    def test_allocation(self, scenario):
        alloc = scenario.allocation
        assert len(alloc.entries) == 11
        e = next(x for x in alloc.entries if (x.g, x.p, x.optionIndex) == (2, 1, 3))
        assert e.ward == "Ward 5"
        assert e.count == 27.94

    def test_optional_component_absent(self, tmp_path):
        (tmp_path / "p.project").write_text(
            "Project Name,p\n"
            "Hospital Configuration,p.config\n"
            "Patient Information,p.patient\n"
            "Case Mix,\nSession,\nTargets,\nAllocation,\n"
        )
        (tmp_path / "p.config").write_text(
            "Intensive Care Beds,1\nTheatres,1\nWards,1\nWard Info,\n[1],Ward 1,2\n"
        )
        (tmp_path / "p.patient").write_text(
            "Patient Types,1\nPatient Type,\n[1],S1,1\n"
            "Patient Sub Type,\n[1][1],S1-1\n"
            "Profile,\n[1][1],0,1,2,Ward 1\nRevenue,\n[1][1],100\n"
        )
        bundle = load_project(tmp_path / "p.project")
        assert bundle.targets is None
        assert bundle.mix is None


class TestRoundTrip:
    def test_config(self, scenario):
        assert parse_config(save_config(scenario.config)) == scenario.config

    def test_patient(self, scenario):
        assert parse_patient(save_patient(scenario.catalog)) == scenario.catalog

    def test_mix(self, scenario):
        assert parse_mix(save_mix(scenario.mix)) == scenario.mix

    def test_session_matches_expected_text(self, scenario):
        text = save_session(scenario.sessions, scenario.catalog)
        assert text.splitlines()[1] == "[1],Specialty 1,12"
        assert parse_session(text) == scenario.sessions

    def test_target(self, scenario):
        text = save_target(scenario.targets, scenario.catalog)
        assert parse_target(text) == scenario.targets

    def test_alloc(self, scenario):
        text = save_alloc(scenario.allocation, scenario.catalog)
        assert parse_alloc(text, scenario.catalog) == scenario.allocation

    def test_whole_project(self, scenario, tmp_path):
        path = save_project(scenario, tmp_path)
        again = load_project(path)
        assert again == scenario

    def test_fuzzed_bundles(self, tmp_path):
        rng = random.Random(99)
        for i in range(40):
            scale = InstanceScale(
                types=rng.randint(1, 6),
                subTypesPerType=(1, rng.randint(1, 4)),
                wards=rng.randint(1, 6),
                bedsPerWard=(1, 20),
                icuBeds=rng.randint(0, 8),
                theatres=rng.randint(1, 20),
            )
            bundle = generate_instance(seed=1000 + i, scale=scale)
            path = save_project(bundle, tmp_path / f"b{i}")
            assert load_project(path) == bundle

    def test_json_mirror(self, scenario):
        assert bundle_from_json(bundle_to_json(scenario)) == scenario


class TestParseErrors:
    def test_missing_header(self):
        with pytest.raises(ParseError, match="Intensive Care Beds"):
            parse_config("Theatres,10\n", "bad.config")

    def test_malformed_index(self):
        with pytest.raises(ParseError, match="malformed index"):
            parse_mix("Case Mix,\n(1),5\nSub Mix,\n", "bad.mix")

    def test_duplicate_sub_type(self):
        text = (
            "Patient Types,1\nPatient Type,\n[1],S1,2\n"
            "Patient Sub Type,\n[1][1],A\n[1][1],B\n"
            "Profile,\nRevenue,\n"
        )
        with pytest.raises(ParseError, match="duplicate"):
            parse_patient(text, "dup.patient")

    def test_dangling_ward_reference(self, tmp_path):
        (tmp_path / "p.project").write_text(
            "Project Name,p\nHospital Configuration,p.config\n"
            "Patient Information,p.patient\nCase Mix,\nSession,\nTargets,\nAllocation,\n"
        )
        (tmp_path / "p.config").write_text(
            "Intensive Care Beds,1\nTheatres,1\nWards,1\nWard Info,\n[1],Ward 1,2\n"
        )
        (tmp_path / "p.patient").write_text(
            "Patient Types,1\nPatient Type,\n[1],S1,1\n"
            "Patient Sub Type,\n[1][1],S1-1\n"
            "Profile,\n[1][1],0,1,2,Ward 9\nRevenue,\n"
        )
        with pytest.raises(ParseError, match="Ward 9"):
            load_project(tmp_path / "p.project")

    def test_trailing_fields_strict_vs_lenient(self):
        text = (
            "Intensive Care Beds,1\nTheatres,1\nWards,1\n"
            "Ward Info,\n[1],Ward 1,2,EXTRA\n"
        )
        with pytest.raises(ParseError, match="trailing"):
            parse_config(text)
        cfg = parse_config(text, lenient=True)
        assert cfg.wards[0].beds == 2

    def test_error_carries_location(self):
        try:
            parse_config("Intensive Care Beds,x\n", "f.config")
        except ParseError as exc:
            assert exc.location.fileName == "f.config"
            assert exc.location.lineNumber >= 1
        else:
            pytest.fail("expected ParseError")

    def test_fuzz_never_crashes(self):
        rng = random.Random(5)
        alphabet = "ab[]1,0.\n Ward Mix Type"
        for _ in range(300):
            chunk = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 120)))
            for parser in (parse_config, parse_mix, parse_session, parse_target):
                try:
                    parser(chunk)
                except (ParseError, ValueError):
                    pass
