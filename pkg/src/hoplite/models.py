"""Optimization models: advanced capacity assessment, feasibility
checking and best-fit targeting.

All models share one variable family: a nonnegative allocation variable
per (type, sub-type, ward option), counting patients of that sub-type
recovered in that ward.  Theatre and intensive-care activity levels are
implied because both areas are pooled.  Patient counts at sub-type,
type and cohort level are linear sums of the allocation variables, so
the balance equation holds by construction.

Allocations at optimality are not unique (splitting a type across its
candidate wards can be arbitrary); results are compared on counts and
resource usage totals, never on raw allocations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from .assess import (
    AssessmentError,
    CohortResult,
    _report_from_entries,
    revenue_of,
    utilization_of,
)
from .domain import (
    Allocation,
    Mix,
    MssTemplate,
    ProjectBundle,
    TargetSet,
)
from .solver import (
    EQ,
    GE,
    LE,
    LpConstraint,
    LpModel,
    LpVariable,
    SimplexSolver,
    dump_model,
    piecewise_linearize,
)


class Viewpoint(str, Enum):
    WHOLE_COHORT = "whole"
    SESSION_PARTITION = "partition"


class WardOptionPolicy(str, Enum):
    FIRST_ONLY = "first"
    ALL = "all"


class TargetingOption(str, Enum):
    TO1 = "to1"  # type-level targets
    TO2 = "to2"  # sub-type-level targets
    TO3 = "to3"  # both levels


class Norm(str, Enum):
    ONE = "one"
    TWO = "two"


class ModelBuildError(ValueError):
    pass


class SolveFailure(RuntimeError):
    def __init__(self, status: str, diagnostic: str = ""):
        super().__init__(f"solver returned {status}: {diagnostic}")
        self.status = status


@dataclass(frozen=True)
class AssessmentSpec:
    viewpoint: Viewpoint = Viewpoint.WHOLE_COHORT
    wardOptionPolicy: WardOptionPolicy = WardOptionPolicy.ALL
    minimumCounts: dict[int, float] = field(default_factory=dict)


@dataclass(frozen=True)
class TargetFitSpec:
    option: TargetingOption = TargetingOption.TO1
    norm: Norm = Norm.ONE
    pwlSegments: int = 16
    postOptimizeThroughput: bool = False
    relative: bool = False  # divide 1-norm terms by the target size


@dataclass(frozen=True)
class FeasibilityVerdict:
    feasible: bool
    violations: dict[str, float]
    impliedCohort: CohortResult | None = None

    def to_json(self) -> dict:
        return {
            "feasible": self.feasible,
            "violations": [
                {"resource": k, "excessHours": v} for k, v in self.violations.items()
            ],
            "impliedCohort": self.impliedCohort.to_json() if self.impliedCohort else None,
        }


@dataclass(frozen=True)
class BestFitResult:
    cohort: CohortResult
    deviations: dict[str, float]  # "g" or "g.p" -> target shortfall
    objectiveValue: float
    throughputMaximized: bool = False

    def totalUnmet(self) -> float:
        return sum(self.deviations.values())

    def to_json(self) -> dict:
        return {
            "cohort": self.cohort.to_json(),
            "deviations": [
                {"target": k, "unmet": v} for k, v in self.deviations.items()
            ],
            "objectiveValue": self.objectiveValue,
            "throughputMaximized": self.throughputMaximized,
        }


@dataclass(frozen=True)
class _BetaVar:
    name: str
    g: int
    p: int
    optionIndex: int
    ward: str | None


def _beta_variables(bundle: ProjectBundle, policy: WardOptionPolicy) -> list[_BetaVar]:
    out = []
    for sub in bundle.catalog.subTypes:
        prof = bundle.catalog.profile(sub.g, sub.p)
        options = prof.wardOptions
        if prof.tPostop > 0 and not options:
            raise ModelBuildError(
                f"sub-type ({sub.g},{sub.p}) needs postop care but has no ward option"
            )
        if options:
            chosen = options[:1] if policy == WardOptionPolicy.FIRST_ONLY else options
            for k, w in enumerate(chosen, start=1):
                out.append(_BetaVar(f"beta[{sub.g}][{sub.p}][{k}]", sub.g, sub.p, k, w))
        else:
            out.append(_BetaVar(f"beta[{sub.g}][{sub.p}][1]", sub.g, sub.p, 1, None))
    return out


def _resource_constraints(bundle: ProjectBundle, mss: MssTemplate,
                          betas: list[_BetaVar]) -> list[LpConstraint]:
    cat = bundle.catalog
    ot = {}
    icu = {}
    per_ward: dict[str, dict[str, float]] = {w.name: {} for w in bundle.config.wards}
    for bv in betas:
        prof = cat.profile(bv.g, bv.p)
        if prof.tSurgery > 0:
            ot[bv.name] = prof.tSurgery
        if prof.tIcu > 0:
            icu[bv.name] = prof.tIcu
        if bv.ward is not None and prof.tWardTotal > 0:
            per_ward[bv.ward][bv.name] = prof.tWardTotal
    cons = [LpConstraint("cap[OT]", ot, LE, mss.theatreHours)]
    for w in bundle.config.wards:
        cons.append(LpConstraint(f"cap[{w.name}]", per_ward[w.name], LE, mss.bedHours(w.beds)))
    cons.append(LpConstraint("cap[ICU]", icu, LE, mss.bedHours(bundle.config.icuBeds)))
    return cons


def _sub_mix_constraints(bundle: ProjectBundle, mix: Mix,
                         betas: list[_BetaVar]) -> list[LpConstraint]:
    """n[g,p] >= sub-mix fraction * n[g] for every sub-type."""
    cons = []
    for g in bundle.catalog.type_ids():
        group = [bv for bv in betas if bv.g == g]
        for sub in bundle.catalog.sub_types_of(g):
            frac = mix.sub_fraction(g, sub.p)
            coeffs: dict[str, float] = {}
            for bv in group:
                coeffs[bv.name] = (1.0 if bv.p == sub.p else 0.0) - frac
            cons.append(LpConstraint(f"submix[{g}][{sub.p}]", coeffs, GE, 0.0))
    return cons


def build_advanced_model(
    bundle: ProjectBundle,
    spec: AssessmentSpec,
    mss: MssTemplate,
    mix: Mix | None = None,
) -> tuple[LpModel, list[_BetaVar]]:
    """Maximize throughput under resource and case-mix constraints."""
    mix = mix or bundle.mix
    if mix is None:
        raise ModelBuildError("an advanced assessment needs a case mix and sub mix")
    if mix.case_mix_error() > 1e-6:
        raise ModelBuildError(
            f"case mix sums to {sum(mix.caseMix.values()):g}%, must be 100%"
        )
    betas = _beta_variables(bundle, spec.wardOptionPolicy)
    variables = [LpVariable(bv.name) for bv in betas]
    cons = _resource_constraints(bundle, mss, betas)
    cons += _sub_mix_constraints(bundle, mix, betas)

    if spec.viewpoint == Viewpoint.WHOLE_COHORT:
        # n[g] >= case-mix fraction * N for every type
        for g in bundle.catalog.type_ids():
            frac = mix.case_fraction(g)
            coeffs = {bv.name: (1.0 if bv.g == g else 0.0) - frac for bv in betas}
            cons.append(LpConstraint(f"casemix[{g}]", coeffs, GE, 0.0))
    else:
        # case mix partitions theatre time between the types
        for g in bundle.catalog.type_ids():
            m_g = mix.case_fraction(g) * mss.totalSessions
            coeffs = {
                bv.name: bundle.catalog.profile(bv.g, bv.p).tSurgery
                for bv in betas
                if bv.g == g and bundle.catalog.profile(bv.g, bv.p).tSurgery > 0
            }
            cons.append(LpConstraint(
                f"sessions[{g}]", coeffs, LE, m_g * mss.sessionHours
            ))
        for g, minimum in spec.minimumCounts.items():
            coeffs = {bv.name: 1.0 for bv in betas if bv.g == g}
            cons.append(LpConstraint(f"minimum[{g}]", coeffs, GE, minimum))

    objective = {bv.name: 1.0 for bv in betas}
    model = LpModel(
        variables=tuple(variables), constraints=tuple(cons),
        sense="max", objective=objective,
    )
    return model, betas


def _cohort_from_solution(bundle, mss, betas, values) -> CohortResult:
    sub_counts: dict[tuple[int, int], float] = {}
    entries = []
    for bv in betas:
        v = max(0.0, values.get(bv.name, 0.0))
        sub_counts[(bv.g, bv.p)] = sub_counts.get((bv.g, bv.p), 0.0) + v
        entries.append((bv.g, bv.p, bv.ward, v))
    per_type: dict[int, float] = {g: 0.0 for g in bundle.catalog.type_ids()}
    for (g, _), v in sub_counts.items():
        per_type[g] += v
    report = _report_from_entries(bundle, mss, entries)
    _, revenue = revenue_of(sub_counts, bundle.catalog)
    return CohortResult(
        total=sum(per_type.values()), perType=per_type, perSubType=sub_counts,
        report=report, totalRevenue=revenue,
    )


def solution_allocation(betas: list[_BetaVar], values: dict[str, float]) -> Allocation:
    from .domain import AllocationEntry

    return Allocation(entries=tuple(
        AllocationEntry(g=bv.g, p=bv.p, optionIndex=bv.optionIndex,
                        ward=bv.ward, count=max(0.0, values.get(bv.name, 0.0)))
        for bv in betas
    ))


def assess_capacity(
    bundle: ProjectBundle,
    spec: AssessmentSpec,
    mss: MssTemplate,
    mix: Mix | None = None,
) -> CohortResult:
    model, betas = build_advanced_model(bundle, spec, mss, mix)
    solution = SimplexSolver().solve(model)
    if solution.status == "unbounded":
        raise SolveFailure(solution.status, _unbounded_diagnostic(bundle))
    if not solution.isOptimal:
        raise SolveFailure(solution.status, solution.diagnostic)
    return _cohort_from_solution(bundle, mss, betas, solution.values)


def _unbounded_diagnostic(bundle: ProjectBundle) -> str:
    free = [
        f"({p.g},{p.p})"
        for p in bundle.catalog.profiles
        if p.tSurgery == 0 and p.tWardTotal == 0 and p.tIcu == 0
    ]
    if free:
        return "sub-types with zero resource use are unconstrained: " + ", ".join(free)
    return "model is unbounded"


# ---------------------------------------------------------------------------
# feasibility


def check_feasibility(
    bundle: ProjectBundle,
    mss: MssTemplate,
    targets: TargetSet | None = None,
    allocation: Allocation | None = None,
) -> FeasibilityVerdict:
    if targets is None and allocation is None:
        raise AssessmentError("feasibility check needs targets, an allocation, or both")

    if targets is not None:
        for g, t in targets.typeTargets.items():
            sub_sum = sum(
                v for (gg, _), v in targets.subTypeTargets.items() if gg == g
            )
            if sub_sum > t + 1e-9:
                raise AssessmentError(
                    f"sub-type targets of type {g} sum to {sub_sum:g}, "
                    f"exceeding the type target {t:g}"
                )

    if allocation is not None:
        report = utilization_of(bundle, allocation, mss)
        violations = {
            r.name: r.usedHours - r.availableHours
            for r in report.rows
            if r.name != "ALL WARDS" and r.usedHours > r.availableHours + 1e-7
        }
        sub_counts = {}
        entries = []
        for e in allocation.entries:
            sub_counts[(e.g, e.p)] = sub_counts.get((e.g, e.p), 0.0) + e.count
            entries.append((e.g, e.p, e.ward, e.count))
        per_type: dict[int, float] = {}
        for (g, _), v in sub_counts.items():
            per_type[g] = per_type.get(g, 0.0) + v
        _, revenue = revenue_of(sub_counts, bundle.catalog)
        cohort = CohortResult(
            total=sum(per_type.values()), perType=per_type, perSubType=sub_counts,
            report=report, totalRevenue=revenue,
        )
        feasible = not violations
        if targets is not None:
            for (g, p), t in targets.subTypeTargets.items():
                got = sub_counts.get((g, p), 0.0)
                if abs(got - t) > 1e-6:
                    feasible = False
                    violations[f"target[{g}][{p}]"] = got - t
        return FeasibilityVerdict(feasible=feasible, violations=violations,
                                  impliedCohort=cohort)

    # targets only: pin the counts and minimize total resource over-use
    betas = _beta_variables(bundle, WardOptionPolicy.ALL)
    variables = [LpVariable(bv.name) for bv in betas]
    cons = []
    for g, t in targets.typeTargets.items():
        coeffs = {bv.name: 1.0 for bv in betas if bv.g == g}
        cons.append(LpConstraint(f"pin[{g}]", coeffs, EQ, t))
    for (g, p), t in targets.subTypeTargets.items():
        coeffs = {bv.name: 1.0 for bv in betas if bv.g == g and bv.p == p}
        cons.append(LpConstraint(f"pin[{g}][{p}]", coeffs, EQ, t))

    excess_vars = []
    objective: dict[str, float] = {}
    for rc in _resource_constraints(bundle, mss, betas):
        ename = f"excess[{rc.name}]"
        excess_vars.append(LpVariable(ename))
        coeffs = dict(rc.coeffs)
        coeffs[ename] = -1.0
        cons.append(LpConstraint(rc.name, coeffs, LE, rc.rhs))
        objective[ename] = 1.0

    model = LpModel(
        variables=tuple(variables + excess_vars), constraints=tuple(cons),
        sense="min", objective=objective,
    )
    solution = SimplexSolver().solve(model)
    if not solution.isOptimal:
        raise SolveFailure(solution.status, solution.diagnostic)
    violations = {
        name[len("excess[cap["):-2]: v
        for name, v in solution.values.items()
        if name.startswith("excess[") and v > 1e-7
    }
    cohort = _cohort_from_solution(bundle, mss, betas, solution.values)
    return FeasibilityVerdict(
        feasible=not violations, violations=violations, impliedCohort=cohort,
    )


# ---------------------------------------------------------------------------
# best-fit targeting


def _beta_upper_bound(bundle: ProjectBundle, mss: MssTemplate, bv: _BetaVar) -> float:
    """Capacity-implied upper bound for one allocation variable."""
    prof = bundle.catalog.profile(bv.g, bv.p)
    bound = math.inf
    if prof.tSurgery > 0:
        bound = min(bound, mss.theatreHours / prof.tSurgery)
    if prof.tIcu > 0:
        bound = min(bound, mss.bedHours(bundle.config.icuBeds) / prof.tIcu)
    if bv.ward is not None and prof.tWardTotal > 0:
        beds = bundle.config.ward_named(bv.ward).beds
        bound = min(bound, mss.bedHours(beds) / prof.tWardTotal)
    return bound


def best_fit_case_mix(
    bundle: ProjectBundle,
    mss: MssTemplate,
    targets: TargetSet,
    fit: TargetFitSpec,
) -> BestFitResult:
    if fit.option == TargetingOption.TO3:
        targets = targets.make_consistent()
    use_type = fit.option in (TargetingOption.TO1, TargetingOption.TO3)
    use_sub = fit.option in (TargetingOption.TO2, TargetingOption.TO3)
    if use_type and not targets.typeTargets:
        raise AssessmentError(f"{fit.option.value} needs type-level targets")
    if use_sub and not targets.subTypeTargets:
        raise AssessmentError(f"{fit.option.value} needs sub-type-level targets")

    betas = _beta_variables(bundle, WardOptionPolicy.ALL)
    variables = []
    for bv in betas:
        ub = _beta_upper_bound(bundle, mss, bv)
        if not math.isfinite(ub):
            # zero-duration sub-type: cap by the total targeted cohort
            ub = sum(targets.typeTargets.values()) + sum(targets.subTypeTargets.values())
        variables.append(LpVariable(bv.name, 0.0, ub))
    cons = _resource_constraints(bundle, mss, betas)

    # never exceed a target: shortfalls cannot be traded against overshoot
    terms: list[tuple[str, dict[str, float], float, float]] = []
    if use_type:
        for g, t in sorted(targets.typeTargets.items()):
            coeffs = {bv.name: 1.0 for bv in betas if bv.g == g}
            cons.append(LpConstraint(f"cap_target[{g}]", coeffs, LE, t))
            terms.append((f"{g}", coeffs, t, targets.weight(g)))
    if use_sub:
        for (g, p), t in sorted(targets.subTypeTargets.items()):
            coeffs = {bv.name: 1.0 for bv in betas if bv.g == g and bv.p == p}
            cons.append(LpConstraint(f"cap_target[{g}][{p}]", coeffs, LE, t))
            terms.append((f"{g}.{p}", coeffs, t, targets.weight(g)))

    objective: dict[str, float] = {}
    constant = 0.0
    if fit.norm == Norm.ONE:
        # minimize sum w*(target - n) == constant - sum w*n
        for _, coeffs, t, w in terms:
            scale = w / t if (fit.relative and t > 0) else w
            constant += scale * t
            for name, coef in coeffs.items():
                objective[name] = objective.get(name, 0.0) - scale * coef
    else:
        for key, coeffs, t, w in terms:
            dev = f"dev[{key}]"
            variables.append(LpVariable(dev, 0.0, t))
            balance = dict(coeffs)
            balance[dev] = 1.0
            cons.append(LpConstraint(f"devlink[{key}]", balance, EQ, t))
            pwl = piecewise_linearize(dev, 0.0, w, t, fit.pwlSegments)
            if not pwl.cuts:
                constant += pwl.objectiveConstant
                continue
            z = pwl.epigraphVariable
            # the tightest supporting line can dip slightly below zero
            variables.append(LpVariable(z, -pwl.maxError - 1.0))
            for i, (a, bconst) in enumerate(pwl.cuts):
                cons.append(LpConstraint(
                    f"pwl[{key}][{i}]", {z: 1.0, dev: -a}, GE, bconst
                ))
            objective[z] = 1.0
            constant += pwl.objectiveConstant

    model = LpModel(
        variables=tuple(variables), constraints=tuple(cons),
        sense="min", objective=objective, objectiveConstant=constant,
    )
    solution = SimplexSolver().solve(model)
    if not solution.isOptimal:
        raise SolveFailure(solution.status, solution.diagnostic)

    deviations = {
        key: max(0.0, t - sum(coef * solution.values[name] for name, coef in coeffs.items()))
        for key, coeffs, t, _ in terms
    }
    cohort = _cohort_from_solution(bundle, mss, betas, solution.values)
    objective_value = solution.objectiveValue
    throughput_maximized = False

    def _met(key_t_dev) -> bool:
        key, t, dev = key_t_dev
        if fit.norm == Norm.TWO:
            # the piecewise objective is flat within half a segment of the
            # target, so deviations that small carry zero modelled cost
            return dev <= t / (2 * fit.pwlSegments) + 1e-6
        return dev <= 1e-6

    if fit.postOptimizeThroughput and all(
        _met((key, t, deviations[key])) for key, _, t, _ in terms
    ):
        # targets look attainable: try a larger cohort that meets them exactly
        floor_cons = _resource_constraints(bundle, mss, betas)
        for key, coeffs, t, _ in terms:
            floor_cons.append(LpConstraint(f"floor_target[{key}]", coeffs, GE, t))
        grow = LpModel(
            variables=tuple(LpVariable(bv.name) for bv in betas),
            constraints=tuple(floor_cons),
            sense="max", objective={bv.name: 1.0 for bv in betas},
        )
        grown = SimplexSolver().solve(grow)
        if grown.isOptimal:
            values = grown.values
            cohort = _cohort_from_solution(bundle, mss, betas, values)
            deviations = {
                key: max(0.0, t - sum(coef * values[name] for name, coef in coeffs.items()))
                for key, coeffs, t, _ in terms
            }
            throughput_maximized = True

    return BestFitResult(
        cohort=cohort, deviations=deviations,
        objectiveValue=objective_value, throughputMaximized=throughput_maximized,
    )


# ---------------------------------------------------------------------------
# norms


def norm_distance(
    counts_a: dict,
    counts_b: dict,
    norm: Norm = Norm.ONE,
    weights: dict[int, float] | None = None,
) -> float:
    """Weighted 1- or 2-norm distance between two cohorts.

    Keys are either type ids or (type, sub-type) pairs; the weight of a
    pair is its type's weight.
    """
    if set(counts_a) != set(counts_b):
        raise AssessmentError("cohorts have different shapes")
    weights = weights or {}

    def w(key) -> float:
        g = key[0] if isinstance(key, tuple) else key
        return weights.get(g, 1.0)

    if norm == Norm.ONE:
        return sum(w(k) * abs(counts_a[k] - counts_b[k]) for k in counts_a)
    return math.sqrt(sum(w(k) * (counts_a[k] - counts_b[k]) ** 2 for k in counts_a))


def dump_advanced_model(bundle: ProjectBundle, spec: AssessmentSpec,
                        mss: MssTemplate, mix: Mix | None = None) -> str:
    model, _ = build_advanced_model(bundle, spec, mss, mix)
    return dump_model(model)
