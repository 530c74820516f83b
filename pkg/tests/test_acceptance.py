"""Acceptance gate: one test per shipped guarantee.

Each test prints a single PASS line on success (visible with -s or -v);
a failure shows up as the usual pytest FAILED line for that criterion.
"""

import math
import random
import time

import pytest

from hoplite import (
    AssessmentSpec,
    MssTemplate,
    Norm,
    SessionAssignment,
    TargetFitSpec,
    TargetSet,
    Viewpoint,
    assess_capacity,
    basic_assess_by_theatre,
    best_fit_case_mix,
    expand_quadratic,
    generate_instance,
    norm_distance,
    piecewise_linearize,
    utilization_of,
)
from hoplite.fileio import bundle_from_json, bundle_to_json, load_project, save_project
from hoplite.generator import InstanceScale
from hoplite.solver import LpConstraint, LpModel, LpVariable, SimplexSolver

from test_solver import enumerate_vertices_max


def _ok(label: str) -> None:
    print(f"PASS: {label}")


def _mss(bundle, weeks=1):
    return MssTemplate(weeks=weeks, daysPerWeek=5, sessionsPerDay=2,
                       sessionHours=4.0, theatres=bundle.config.theatres)


def test_criterion_01_whole_cohort_capacity(scenario, scenario_mss):
    started = time.perf_counter()
    result = assess_capacity(scenario, AssessmentSpec(), scenario_mss)
    elapsed = time.perf_counter() - started
    assert result.total == pytest.approx(113.5277, abs=1e-3)
    expected = {1: 5.676, 2: 48.817, 3: 20.435, 4: 10.217, 5: 28.382}
    for g, value in expected.items():
        assert result.perType[g] == pytest.approx(value, abs=1e-2)
    assert result.report.row("Ward 2").percentUsed == pytest.approx(100.0, abs=1e-4)
    assert elapsed < 1.0
    _ok(f"whole-cohort capacity 113.5277 reproduced in {elapsed * 1000:.0f} ms")


def test_criterion_02_session_partition_capacity(scenario, scenario_mss):
    started = time.perf_counter()
    result = assess_capacity(
        scenario, AssessmentSpec(viewpoint=Viewpoint.SESSION_PARTITION), scenario_mss
    )
    elapsed = time.perf_counter() - started
    assert result.total == pytest.approx(134.8919, abs=1e-3)
    expected_hours = {1: 20.0, 2: 172.0, 3: 72.0, 4: 36.0, 5: 100.0}
    for g, hours in expected_hours.items():
        used = sum(
            result.perSubType[(g, s.p)] * scenario.catalog.profile(g, s.p).tSurgery
            for s in scenario.catalog.sub_types_of(g)
        )
        assert used / hours == pytest.approx(1.0, abs=1e-4)
    assert elapsed < 1.0
    _ok(f"session-partition capacity 134.8919 reproduced in {elapsed * 1000:.0f} ms")


def test_criterion_03_allocation_evaluation(scenario, scenario_mss):
    report = utilization_of(scenario, scenario.allocation, scenario_mss)
    ot = report.row("OT")
    assert ot.usedHours == pytest.approx(433.38, abs=0.01)
    assert ot.percentUsed == pytest.approx(108.3, abs=0.05)
    ward5 = report.row("Ward 5")
    assert ward5.usedHours == pytest.approx(522.76, abs=0.01)
    assert ward5.percentUsed == pytest.approx(103.7, abs=0.05)
    assert report.flagged() == ["OT", "Ward 5"]
    _ok("allocation evaluation flags theatre 433.38 h and Ward 5 522.76 h")


def test_criterion_04_theatre_only_assessment(scenario, scenario_mss):
    result = basic_assess_by_theatre(
        scenario, SessionAssignment({1: 12, 2: 25, 3: 34, 4: 10, 5: 19}),
        scenario.mix, scenario_mss,
    )
    expected = {1: 39.5062, 2: 41.6667, 3: 22.2622, 4: 11.7647, 5: 18.5366}
    for g, value in expected.items():
        assert result.perType[g] == pytest.approx(value, abs=1e-4)
    assert result.total == pytest.approx(133.736, abs=1e-3)
    ot = result.report.row("OT")
    assert ot.usedHours / ot.availableHours == pytest.approx(1.0, abs=1e-9)
    _ok("theatre-only assessment yields 133.736 patients at 100% theatre use")


def test_criterion_05_solver_vertex_oracle():
    rng = random.Random(42)
    checked = 0
    for _ in range(500):
        n = rng.randint(1, 6)
        m = rng.randint(1, 6)
        c = [rng.uniform(-5, 5) for _ in range(n)]
        A = [[rng.uniform(-3, 5) for _ in range(n)] for _ in range(m)]
        b = [rng.uniform(0.5, 20) for _ in range(m)]
        hi = [rng.choice([None, rng.uniform(1, 15)]) for _ in range(n)]
        expected = enumerate_vertices_max(c, A, b, [(0.0, h) for h in hi])
        model = LpModel(
            variables=tuple(
                LpVariable(f"x{i}", 0.0, math.inf if hi[i] is None else hi[i])
                for i in range(n)
            ),
            constraints=tuple(
                LpConstraint(f"r{j}", {f"x{i}": A[j][i] for i in range(n)}, "<=", b[j])
                for j in range(m)
            ),
            sense="max", objective={f"x{i}": c[i] for i in range(n)},
        )
        sol = SimplexSolver().solve(model)
        if expected is None:
            assert sol.status == "unbounded"
        elif sol.status != "unbounded":
            assert sol.isOptimal, sol.diagnostic
            assert sol.objectiveValue == pytest.approx(expected, abs=1e-6)
            checked += 1
    assert checked > 300
    _ok(f"simplex matched vertex enumeration on {checked} bounded random LPs")


def test_criterion_06_quadratic_expansion_and_pwl():
    q = expand_quadratic([10, 40, 20])
    assert q.linear == (20, 80, 40)
    assert q.constant == 2100
    assert expand_quadratic([10, 5]).constant == 125
    assert expand_quadratic([7]).constant == 49
    rng = random.Random(77)
    for _ in range(100):
        target = rng.uniform(0, 25)
        weight = rng.uniform(0.2, 4)
        ub = rng.uniform(1, 40)
        segs = rng.choice([4, 8, 16, 32])
        pwl = piecewise_linearize("x", target, weight, ub, segs)
        quad = expand_quadratic([target], [weight])
        grid = [ub * i / 800 for i in range(801)]
        min_pwl = min(pwl.evaluate(x) for x in grid)
        min_true = min(quad.evaluate([x]) for x in grid)
        bound = weight * (ub / segs) ** 2 / 4
        assert min_true - bound - 1e-9 <= min_pwl <= min_true + 1e-9
        for x in grid:
            assert pwl.evaluate(x) <= quad.evaluate([x]) + 1e-9
    _ok("quadratic expansion matches worked examples; piecewise gap within bound")


def test_criterion_07_norm_level_identities():
    rng = random.Random(123)
    for _ in range(1000):
        n_types = rng.randint(1, 6)
        ta, tb, sa, sb = {}, {}, {}, {}
        for g in range(1, n_types + 1):
            k = rng.randint(1, 5)
            raw = [rng.uniform(0.05, 1.0) for _ in range(k)]
            fracs = [x / sum(raw) for x in raw]
            ta[g] = rng.uniform(0, 80)
            tb[g] = rng.uniform(0, 80)
            for p, f in enumerate(fracs, start=1):
                sa[(g, p)] = f * ta[g]
                sb[(g, p)] = f * tb[g]
        one_type = norm_distance(ta, tb, Norm.ONE)
        one_sub = norm_distance(sa, sb, Norm.ONE)
        assert abs(one_type - one_sub) < 1e-9 * max(1.0, one_type)
        two_type = norm_distance(ta, tb, Norm.TWO)
        two_sub = norm_distance(sa, sb, Norm.TWO)
        assert two_sub <= two_type + 1e-9 * max(1.0, two_type)
    _ok("1-norm level equality and 2-norm level inequality held on 1000 cohorts")


def test_criterion_08_best_fit_soundness(scenario, scenario_mss):
    optimum = assess_capacity(scenario, AssessmentSpec(), scenario_mss)
    reachable = TargetSet(typeTargets=dict(optimum.perType))
    fit = best_fit_case_mix(scenario, scenario_mss, reachable, TargetFitSpec())
    assert fit.totalUnmet() == pytest.approx(0.0, abs=1e-6)

    ambitious = best_fit_case_mix(scenario, scenario_mss, scenario.targets, TargetFitSpec())
    assert ambitious.totalUnmet() > 0
    from test_models import _scipy_one_norm_oracle

    expected = _scipy_one_norm_oracle(scenario, scenario_mss, scenario.targets)
    assert ambitious.objectiveValue == pytest.approx(expected, abs=1e-5)

    scale = InstanceScale(types=21, subTypesPerType=(2, 27), wards=30, theatres=20)
    big = generate_instance(4242, scale)
    assert len(big.catalog.subTypes) > 200
    unmet = []
    for weeks in (1, 2, 3, 4):
        started = time.perf_counter()
        result = best_fit_case_mix(big, _mss(big, weeks), big.targets, TargetFitSpec())
        elapsed = time.perf_counter() - started
        assert elapsed < 60.0
        unmet.append(result.totalUnmet())
    assert all(a >= b - 1e-6 for a, b in zip(unmet, unmet[1:]))
    _ok(
        "best fit: zero deviation on reachable targets, matches an independent LP, "
        f"and unmet totals fall with extra weeks {[round(u, 1) for u in unmet]}"
    )


def test_criterion_09_file_round_trip(scenario, scenario_path, tmp_path):
    written = save_project(scenario, tmp_path / "copy")
    reloaded = load_project(written)
    assert reloaded == scenario
    assert bundle_from_json(bundle_to_json(scenario)) == scenario

    from hoplite.fileio import (
        parse_config, parse_mix, parse_patient, parse_session, parse_target,
        save_config, save_mix, save_patient, save_session, save_target,
    )

    count = 0
    scale = InstanceScale(types=4, subTypesPerType=(1, 3), wards=4)
    for seed in range(1000):
        bundle = generate_instance(seed, scale)
        assert parse_config(save_config(bundle.config)) == bundle.config
        assert parse_patient(save_patient(bundle.catalog)) == bundle.catalog
        assert parse_mix(save_mix(bundle.mix)) == bundle.mix
        assert parse_session(save_session(bundle.sessions, bundle.catalog)) == bundle.sessions
        assert parse_target(save_target(bundle.targets, bundle.catalog)) == bundle.targets
        assert bundle_from_json(bundle_to_json(bundle)) == bundle
        count += 1
    _ok(f"file and JSON round-trips exact on the case study and {count} fuzzed bundles")


def test_criterion_10_weeks_scaling():
    scale = InstanceScale(types=3, subTypesPerType=(1, 2), wards=3)
    for seed in range(50):
        bundle = generate_instance(seed, scale)
        r1 = assess_capacity(bundle, AssessmentSpec(), _mss(bundle, 1))
        r2 = assess_capacity(bundle, AssessmentSpec(), _mss(bundle, 2))
        assert r2.total == pytest.approx(2 * r1.total, rel=1e-6, abs=1e-6)
    _ok("doubling schedule weeks doubled capacity on 50 random instances")
