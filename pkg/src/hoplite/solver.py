"""Self-contained linear-program solver and quadratic-objective machinery.

The solver is a two-phase bounded-variable revised simplex over a dense
numpy representation.  Dantzig pricing is used by default; when no
objective progress is made for 2*(m+n) iterations the solver switches
to Bland's rule to break cycles.  Desk-scale instances (a few thousand
variables) are the design point, so no sparse factorization is kept.

Quadratic targeting objectives sum(w*(x - target)^2) are expanded into
their diagonal quadratic form and convexified into linear programs via
piecewise-linear under-approximation: supporting tangent lines at
uniform breakpoints on [0, upperBound].  The approximation is exact at
every breakpoint and under-estimates elsewhere by at most
w*(upperBound/segments)^2/4 per term.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

FEASIBILITY_TOL = 1e-7
OPTIMALITY_TOL = 1e-9

LE, EQ, GE = "<=", "=", ">="

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
UNSTABLE = "numerically unstable"


class LpError(ValueError):
    pass


@dataclass(frozen=True)
class LpVariable:
    name: str
    lower: float = 0.0
    upper: float = math.inf

    def __post_init__(self):
        if self.lower > self.upper:
            raise LpError(f"variable {self.name!r}: lower bound exceeds upper bound")


@dataclass(frozen=True)
class LpConstraint:
    name: str
    coeffs: dict[str, float]
    relation: str
    rhs: float

    def __post_init__(self):
        if self.relation not in (LE, EQ, GE):
            raise LpError(f"constraint {self.name!r}: unknown relation {self.relation!r}")


@dataclass(frozen=True)
class LpModel:
    variables: tuple[LpVariable, ...]
    constraints: tuple[LpConstraint, ...]
    sense: str = "max"
    objective: dict[str, float] = field(default_factory=dict)
    objectiveConstant: float = 0.0

    def __post_init__(self):
        names = {v.name for v in self.variables}
        if len(names) != len(self.variables):
            raise LpError("duplicate variable names")
        for con in self.constraints:
            for var in con.coeffs:
                if var not in names:
                    raise LpError(f"constraint {con.name!r} references unknown variable {var!r}")
        for var in self.objective:
            if var not in names:
                raise LpError(f"objective references unknown variable {var!r}")
        if self.sense not in ("max", "min"):
            raise LpError(f"unknown objective sense {self.sense!r}")


@dataclass
class LpSolution:
    status: str
    objectiveValue: float = math.nan
    values: dict[str, float] = field(default_factory=dict)
    activities: dict[str, float] = field(default_factory=dict)
    iterations: int = 0
    diagnostic: str = ""

    @property
    def isOptimal(self) -> bool:
        return self.status == OPTIMAL


def dump_model(model: LpModel) -> str:
    """Human-readable text layout of a model, for manual cross-checking."""
    lines = [f"{model.sense} " + " + ".join(
        f"{c:g}*{v}" for v, c in model.objective.items()
    ) + (f" + {model.objectiveConstant:g}" if model.objectiveConstant else "")]
    lines.append("variables:")
    for v in model.variables:
        hi = "inf" if math.isinf(v.upper) else f"{v.upper:g}"
        lines.append(f"  {v.lower:g} <= {v.name} <= {hi}")
    lines.append("constraints:")
    for con in model.constraints:
        body = " + ".join(f"{c:g}*{v}" for v, c in con.coeffs.items())
        lines.append(f"  {con.name}: {body} {con.relation} {con.rhs:g}")
    return "\n".join(lines)


class SimplexSolver:
    """Bounded-variable revised simplex.

    One model solve at a time per instance; distinct instances are
    independent and may run concurrently.
    """

    def __init__(self, feasibility_tol: float = FEASIBILITY_TOL,
                 optimality_tol: float = OPTIMALITY_TOL,
                 max_iterations: int | None = None):
        self.feasibility_tol = feasibility_tol
        self.optimality_tol = optimality_tol
        self.max_iterations = max_iterations

    def solve(self, model: LpModel) -> LpSolution:
        n_struct = len(model.variables)
        m = len(model.constraints)
        var_index = {v.name: i for i, v in enumerate(model.variables)}

        # columns: structural vars, then one slack per inequality row
        n_slack = sum(1 for c in model.constraints if c.relation != EQ)
        n = n_struct + n_slack
        A = np.zeros((m, n))
        b = np.zeros(m)
        lo = np.zeros(n)
        hi = np.full(n, math.inf)
        for i, v in enumerate(model.variables):
            lo[i], hi[i] = v.lower, v.upper
        slack_of_row = [-1] * m
        col = n_struct
        for i, con in enumerate(model.constraints):
            for var, coef in con.coeffs.items():
                A[i, var_index[var]] = coef
            b[i] = con.rhs
            if con.relation != EQ:
                A[i, col] = 1.0 if con.relation == LE else -1.0
                slack_of_row[i] = col
                col += 1

        c = np.zeros(n)
        sign = -1.0 if model.sense == "max" else 1.0
        for var, coef in model.objective.items():
            c[var_index[var]] = sign * coef

        try:
            status, x, iters, diag = self._solve_arrays(A, b, c, lo, hi, slack_of_row)
        except np.linalg.LinAlgError:
            return LpSolution(status=UNSTABLE, diagnostic="singular basis matrix")

        if status != OPTIMAL:
            return LpSolution(status=status, iterations=iters, diagnostic=diag)

        xs = x[:n_struct]
        values = {v.name: float(xs[i]) for i, v in enumerate(model.variables)}
        activities = {}
        scale = max(1.0, float(np.max(np.abs(b))) if m else 1.0)
        for con in model.constraints:
            act = sum(coef * values[var] for var, coef in con.coeffs.items())
            activities[con.name] = act
            resid = act - con.rhs
            ok = (
                (con.relation == LE and resid <= self.feasibility_tol * scale)
                or (con.relation == GE and resid >= -self.feasibility_tol * scale)
                or (con.relation == EQ and abs(resid) <= self.feasibility_tol * scale)
            )
            if not ok:
                return LpSolution(
                    status=UNSTABLE, values=values, activities=activities, iterations=iters,
                    diagnostic=f"constraint {con.name!r} violated by {resid:g} after solve",
                )
        obj = model.objectiveConstant + sum(
            coef * values[var] for var, coef in model.objective.items()
        )
        return LpSolution(
            status=OPTIMAL, objectiveValue=obj, values=values,
            activities=activities, iterations=iters,
        )

    # -- core simplex over arrays ------------------------------------------

    def _solve_arrays(self, A, b, c, lo, hi, slack_of_row):
        m, n = A.shape
        if m == 0:
            # bound-only problem: each variable at its cheapest bound
            x = np.where(c >= 0, lo, hi)
            if np.any(np.isinf(x)):
                return UNBOUNDED, x, 0, "objective improves without limit"
            return OPTIMAL, x, 0, ""

        # start all columns at the finite bound nearest zero
        x = np.where(np.isfinite(lo), lo, np.where(np.isfinite(hi), hi, 0.0))
        at_upper = np.isinf(lo) & np.isfinite(hi)

        residual = b - A @ x
        basis = np.full(m, -1, dtype=int)
        art_cols = []
        A_work = A
        for i in range(m):
            s = slack_of_row[i]
            if s >= 0:
                coef = A[i, s]
                val = residual[i] / coef
                if lo[s] - self.feasibility_tol <= val <= hi[s] + self.feasibility_tol:
                    basis[i] = s
                    x[s] = min(max(val, lo[s]), hi[s])
                    continue
            art_cols.append(i)
        if art_cols:
            residual = b - A @ x
            extra = np.zeros((m, len(art_cols)))
            for j, i in enumerate(art_cols):
                extra[i, j] = 1.0 if residual[i] >= 0 else -1.0
                basis[i] = n + j
            A_work = np.hstack([A, extra])
            lo = np.concatenate([lo, np.zeros(len(art_cols))])
            hi = np.concatenate([hi, np.full(len(art_cols), math.inf)])
            x = np.concatenate([x, np.abs(residual[art_cols])])
            at_upper = np.concatenate([at_upper, np.zeros(len(art_cols), dtype=bool)])

            phase1_c = np.zeros(A_work.shape[1])
            phase1_c[n:] = 1.0
            status, x, it1 = self._simplex(A_work, b, phase1_c, lo, hi, basis, at_upper,
                                           blocked=set())
            if status != OPTIMAL:
                return UNSTABLE, x[:n], it1, "phase-1 simplex failed"
            if float(phase1_c @ x) > self.feasibility_tol * max(1.0, float(np.max(np.abs(b)))):
                return INFEASIBLE, x[:n], it1, "no feasible point"
            # freeze artificials at zero for phase 2
            lo[n:] = 0.0
            hi[n:] = 0.0
            x[n:] = 0.0
            blocked = set(range(n, A_work.shape[1]))
        else:
            it1 = 0
            blocked = set()

        c_work = np.zeros(A_work.shape[1])
        c_work[:len(c)] = c
        status, x, it2 = self._simplex(A_work, b, c_work, lo, hi, basis, at_upper, blocked)
        return status, x[:n], it1 + it2, "" if status == OPTIMAL else "objective improves without limit"

    def _simplex(self, A, b, c, lo, hi, basis, at_upper, blocked):
        m, n = A.shape
        max_iter = self.max_iterations or (2000 + 60 * (m + n))
        bland_after = 2 * (m + n)
        no_progress = 0
        last_obj = math.inf
        is_basic = np.zeros(n, dtype=bool)
        is_basic[basis] = True
        x = np.array([v for v in self._snap(A, b, lo, hi, basis, at_upper)], dtype=float)

        for it in range(max_iter):
            B = A[:, basis]
            y = np.linalg.solve(B.T, c[basis])
            d = c - A.T @ y

            use_bland = no_progress >= bland_after
            entering = -1
            best = self.optimality_tol
            for j in range(n):
                if is_basic[j] or j in blocked or lo[j] == hi[j]:
                    continue
                dj = d[j]
                viol = -dj if not at_upper[j] else dj
                if viol > self.optimality_tol:
                    if use_bland:
                        entering = j
                        break
                    if viol > best:
                        best = viol
                        entering = j
            if entering < 0:
                return OPTIMAL, x, it

            sigma = 1.0 if not at_upper[entering] else -1.0
            w = np.linalg.solve(B, A[:, entering])

            # max step for the entering variable and each basic variable
            t_max = hi[entering] - lo[entering]
            leave = -1
            leave_to_upper = False
            for i in range(m):
                rate = -sigma * w[i]
                bi = basis[i]
                if rate < -self.feasibility_tol:
                    limit = max(0.0, (x[bi] - lo[bi]) / (-rate))
                    hits_upper = False
                elif rate > self.feasibility_tol and math.isfinite(hi[bi]):
                    limit = max(0.0, (hi[bi] - x[bi]) / rate)
                    hits_upper = True
                else:
                    continue
                tighter = limit < t_max - 1e-12
                tie = abs(limit - t_max) <= 1e-12 and leave >= 0
                prefer = tie and (bi < basis[leave] if use_bland else abs(w[i]) > abs(w[leave]))
                if tighter or (tie and prefer) or (limit <= t_max and leave < 0):
                    t_max, leave, leave_to_upper = limit, i, hits_upper

            if math.isinf(t_max):
                return UNBOUNDED, x, it
            t_max = max(t_max, 0.0)

            obj_before = float(c @ x)
            # apply the step
            x[basis] += -sigma * w * t_max
            x[entering] += sigma * t_max
            if leave < 0:
                # bound flip: entering stays nonbasic at its other bound
                at_upper[entering] = not at_upper[entering]
            else:
                out = basis[leave]
                is_basic[out] = False
                x[out] = hi[out] if leave_to_upper else lo[out]
                at_upper[out] = leave_to_upper
                basis[leave] = entering
                is_basic[entering] = True

            obj_after = float(c @ x)
            if obj_after < obj_before - self.optimality_tol * max(1.0, abs(obj_before)):
                no_progress = 0
            else:
                no_progress += 1

        return UNSTABLE, x, max_iter

    def _snap(self, A, b, lo, hi, basis, at_upper):
        """Recompute basic values so A x = b holds for the starting basis."""
        m, n = A.shape
        x = np.where(at_upper, np.where(np.isfinite(hi), hi, 0.0),
                     np.where(np.isfinite(lo), lo, 0.0))
        nonbasic = np.ones(n, dtype=bool)
        nonbasic[basis] = False
        rhs = b - A[:, nonbasic] @ x[nonbasic]
        xb = np.linalg.solve(A[:, basis], rhs)
        x[basis] = xb
        return x


def solve_lp(model: LpModel) -> LpSolution:
    return SimplexSolver().solve(model)


# ---------------------------------------------------------------------------
# quadratic targeting machinery


@dataclass(frozen=True)
class QuadraticForm:
    """Diagonal quadratic 0.5*x'Hx - phi'x + c equal to sum(w*(x-target)^2)."""

    hessianDiag: tuple[float, ...]
    linear: tuple[float, ...]
    constant: float

    def evaluate(self, x) -> float:
        total = self.constant
        for xi, h, f in zip(x, self.hessianDiag, self.linear):
            total += 0.5 * h * xi * xi - f * xi
        return total


def expand_quadratic(targets, weights=None) -> QuadraticForm:
    targets = list(targets)
    if weights is None:
        weights = [1.0] * len(targets)
    weights = list(weights)
    if any(w <= 0 for w in weights):
        raise LpError("weights must be > 0")
    return QuadraticForm(
        hessianDiag=tuple(2.0 * w for w in weights),
        linear=tuple(2.0 * w * t for w, t in zip(weights, targets)),
        constant=sum(w * t * t for w, t in zip(weights, targets)),
    )


@dataclass(frozen=True)
class PwlTerm:
    """Linearization of w*(x - target)^2 on [0, upperBound].

    ``epigraphVariable`` must be added to the model with the constraints
    in ``constraints`` (each says z >= a*x + b) and the term
    ``z + objectiveConstant`` added to a minimization objective.  When
    the interval is degenerate the term is the fixed value w*target^2.
    """

    variableName: str
    epigraphVariable: str
    cuts: tuple[tuple[float, float], ...]  # (slope a, intercept b): z >= a*x + b
    objectiveConstant: float
    maxError: float
    breakpoints: tuple[float, ...]

    def evaluate(self, x: float) -> float:
        """Value the LP would assign at x: the tightest supporting line."""
        if not self.cuts:
            return self.objectiveConstant
        return max(a * x + b for a, b in self.cuts) + self.objectiveConstant


def piecewise_linearize(
    variable: str,
    target: float,
    weight: float,
    upper_bound: float,
    segments: int = 16,
) -> PwlTerm:
    """Convex under-approximation of weight*(x-target)^2 on [0, upper_bound].

    Supporting tangent lines are taken at segments+1 uniform breakpoints,
    so the approximation is exact at every breakpoint and below the true
    quadratic in between, with gap at most weight*(upper_bound/segments)^2/4.
    """
    if segments < 2:
        raise LpError("piecewise linearization needs at least 2 segments")
    if not math.isfinite(upper_bound):
        raise LpError(
            f"variable {variable!r} has no finite upper bound; compute one from "
            "the resource-capacity bounds before linearizing"
        )
    if upper_bound <= 0:
        return PwlTerm(
            variableName=variable, epigraphVariable=f"{variable}.sq",
            cuts=(), objectiveConstant=weight * target * target,
            maxError=0.0, breakpoints=(0.0,),
        )
    breakpoints = tuple(upper_bound * i / segments for i in range(segments + 1))
    cuts = []
    for xk in breakpoints:
        # tangent of w*(x-t)^2 at xk: slope 2w(xk-t), intercept w(xk^2 - t^2) ... derived:
        a = 2.0 * weight * (xk - target)
        bconst = weight * (xk - target) ** 2 - a * xk
        cuts.append((a, bconst))
    h = upper_bound / segments
    return PwlTerm(
        variableName=variable, epigraphVariable=f"{variable}.sq",
        cuts=tuple(cuts), objectiveConstant=0.0,
        maxError=weight * h * h / 4.0, breakpoints=breakpoints,
    )
