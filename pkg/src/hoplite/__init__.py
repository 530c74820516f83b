"""Hospital case-mix planning and capacity assessment engine."""

from .domain import (
    Allocation,
    AllocationEntry,
    DomainError,
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
    compute_sessions,
    normalize_mix,
    pathway_to_profile,
)
from .fileio import ParseError, bundle_from_json, bundle_to_json, load_project, save_project
from .assess import (
    AssessmentError,
    CohortResult,
    UtilizationReport,
    basic_assess_by_beds,
    basic_assess_by_theatre,
    revenue_of,
    sessions_required,
    utilization_of,
)
from .models import (
    AssessmentSpec,
    BestFitResult,
    FeasibilityVerdict,
    Norm,
    TargetFitSpec,
    TargetingOption,
    Viewpoint,
    WardOptionPolicy,
    assess_capacity,
    best_fit_case_mix,
    build_advanced_model,
    check_feasibility,
    norm_distance,
)
from .solver import (
    LpConstraint,
    LpModel,
    LpSolution,
    LpVariable,
    SimplexSolver,
    expand_quadratic,
    piecewise_linearize,
    solve_lp,
)
from .generator import InstanceScale, generate_instance

__version__ = "0.1.0"
