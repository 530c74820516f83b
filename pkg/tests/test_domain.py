import random

import pytest
from hypothesis import given, strategies as st

from hoplite import (
    DomainError,
    HospitalConfig,
    MssTemplate,
    TargetSet,
    Ward,
    compute_sessions,
    normalize_mix,
    pathway_to_profile,
)


class TestComputeSessions:
    def test_case_study_scale(self):
        mss = MssTemplate(weeks=4, daysPerWeek=5, sessionsPerDay=2,
                          sessionHours=4.0, theatres=21)
        assert compute_sessions(mss) == 840

    def test_small_instance_and_availabilities(self):
        mss = MssTemplate(weeks=1, daysPerWeek=5, sessionsPerDay=2,
                          sessionHours=4.0, theatres=10)
        assert compute_sessions(mss) == 100
        assert mss.theatreHours == pytest.approx(400.0)
        assert mss.bedHours(2) == pytest.approx(336.0)

    def test_zero_weeks(self):
        assert compute_sessions(MssTemplate(weeks=0, theatres=10)) == 0

    @given(
        st.integers(0, 10), st.integers(0, 7), st.integers(0, 4), st.integers(0, 30),
        st.sampled_from(["weeks", "daysPerWeek", "sessionsPerDay", "theatres"]),
    )
    def test_multilinear(self, weeks, days, sess, theatres, doubled):
        base = dict(weeks=weeks, daysPerWeek=days, sessionsPerDay=sess, theatres=theatres)
        m1 = compute_sessions(MssTemplate(**base))
        base[doubled] *= 2
        assert compute_sessions(MssTemplate(**base)) == 2 * m1


class TestNormalizeMix:
    def test_already_normalized(self):
        err, out = normalize_mix([5, 43, 18, 9, 25])
        assert err == 0
        assert out == [5, 43, 18, 9, 25]

    def test_proportional_rescale(self):
        err, out = normalize_mix([50, 30])
        assert err == pytest.approx(20.0)
        assert out == [62.5, 37.5]

    def test_sub_mix_of_type_3(self):
        err, out = normalize_mix([25, 40, 35])
        assert err == 0
        assert out == [25, 40, 35]

    def test_two_thirds_rounding(self):
        _, out = normalize_mix([60, 30])
        assert out == [66.67, 33.33]

    def test_all_zero_rejected(self):
        with pytest.raises(DomainError, match="degenerate"):
            normalize_mix([0, 0, 0])

    @given(st.lists(st.floats(0, 1000), min_size=1, max_size=12).filter(lambda xs: sum(xs) > 1))
    def test_idempotent_and_sums_to_100(self, xs):
        _, once = normalize_mix(xs)
        assert sum(once) == pytest.approx(100.0, abs=1e-9)
        _, twice = normalize_mix(once)
        assert all(abs(a - b) < 1e-9 for a, b in zip(once, twice))


class TestPathwayToProfile:
    def test_two_surgery_pathway(self):
        t = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]
        pathway = [
            ("preop", "sca", t[0]), ("sur", "ot", t[1]), ("ic", "icu", t[2]),
            ("postop", "ward", t[3]), ("preop", "ward", t[4]), ("sur", "ot", t[5]),
            ("pac", "sca", t[6]), ("postop", "ward", t[7]),
        ]
        assert pathway_to_profile(pathway) == [
            ("sca", t[0] + t[6]), ("ot", t[1] + t[5]),
            ("icu", t[2]), ("ward", t[3] + t[4] + t[7]),
        ]

    def test_single_entry(self):
        assert pathway_to_profile([("sur", "ot", 2.0)]) == [("ot", 2.0)]

    def test_repeat_wards(self):
        got = pathway_to_profile([("postop", "w1", 1), ("postop", "w1", 2), ("postop", "w2", 3)])
        assert got == [("w1", 3), ("w2", 3)]

    def test_negative_duration_rejected(self):
        with pytest.raises(DomainError):
            pathway_to_profile([("sur", "ot", -1.0)])

    def test_conserves_total_time(self):
        rng = random.Random(7)
        for _ in range(100):
            pathway = [
                ("act", f"area{rng.randint(1, 4)}", rng.uniform(0, 10))
                for _ in range(rng.randint(1, 12))
            ]
            profile = pathway_to_profile(pathway)
            assert sum(t for _, t in profile) == pytest.approx(
                sum(t for _, _, t in pathway)
            )


class TestTargetSet:
    def test_consistency_update_raises_type_targets(self):
        t = TargetSet(typeTargets={1: 5.0}, subTypeTargets={(1, 1): 4.0, (1, 2): 4.0})
        updated = t.make_consistent()
        assert updated.typeTargets[1] == 8.0

    def test_consistency_update_never_decreases(self):
        rng = random.Random(13)
        for _ in range(50):
            type_targets = {g: rng.uniform(0, 50) for g in range(1, 4)}
            sub_targets = {
                (g, p): rng.uniform(0, 30) for g in range(1, 4) for p in range(1, 3)
            }
            t = TargetSet(typeTargets=type_targets, subTypeTargets=sub_targets)
            updated = t.make_consistent()
            for g, v in type_targets.items():
                assert updated.typeTargets[g] >= v

    def test_negative_target_rejected(self):
        with pytest.raises(DomainError):
            TargetSet(typeTargets={1: -1.0})


class TestHospitalConfig:
    def test_duplicate_ward_names_rejected(self):
        with pytest.raises(DomainError, match="unique"):
            HospitalConfig(icuBeds=1, theatres=1,
                           wards=(Ward(1, "A", 2), Ward(2, "A", 3)))

    def test_negative_counts_rejected(self):
        with pytest.raises(DomainError):
            HospitalConfig(icuBeds=-1, theatres=1, wards=())
