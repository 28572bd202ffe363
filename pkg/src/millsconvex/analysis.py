"""Grid-based certification of reciprocal convexity of Mills ratios.

Two sufficient criteria are mechanized, both phrased through the score
omega = f'/f of the density:

* part (a): f/omega -> 0, omega'/omega^2 monotone, and the quotient
  x^3 omega' / (x omega^2 - x omega' - 2 omega) monotone the opposite way;
* part (b): additionally (x f)/(1 - x omega) -> 0 and f/(1 - x omega) -> 0,
  with the quotient (x^2 omega' - x omega + 2) / (x omega^2 - x omega' - 2 omega).

Pairing: omega'/omega^2 decreasing with the quotient increasing gives a
reciprocally convex Mills ratio; the mirrored pattern gives reciprocally
concave.  When neither fires, the certifier probes m and x^2 m'(x) directly.

Everything here is numerical evidence on a finite grid, never a proof.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from math import comb

import numpy as np

from .distributions import DistributionModel, find_sign_changes
from .errors import DomainError, GridEvaluationError, SingularityError

DEFAULT_GRID_MIN = 1e-3
DEFAULT_GRID_MAX = 1e3
DEFAULT_GRID_POINTS = 2000
DEFAULT_SLACK = 1e-9
DENOMINATOR_TOL = 1e-14
LIMIT_POINTS = (1e1, 1e2, 1e3, 1e4)
LIMIT_THRESHOLD = 1e-8
MAX_CM_ORDER = 6

_EPS = np.finfo(float).eps


class Direction(str, Enum):
    STRICTLY_INCREASING = "strictly_increasing"
    STRICTLY_DECREASING = "strictly_decreasing"
    NON_DECREASING = "non_decreasing"
    NON_INCREASING = "non_increasing"
    CONSTANT = "constant"
    NOT_MONOTONE = "not_monotone"

    @property
    def increasing(self):
        return self in (Direction.STRICTLY_INCREASING, Direction.NON_DECREASING, Direction.CONSTANT)

    @property
    def decreasing(self):
        return self in (Direction.STRICTLY_DECREASING, Direction.NON_INCREASING, Direction.CONSTANT)

    @property
    def strict(self):
        return self in (Direction.STRICTLY_INCREASING, Direction.STRICTLY_DECREASING)


class Verdict(str, Enum):
    RECIPROCALLY_CONVEX = "reciprocally_convex"
    STRICTLY_RECIPROCALLY_CONVEX = "strictly_reciprocally_convex"
    RECIPROCALLY_CONCAVE = "reciprocally_concave"
    STRICTLY_RECIPROCALLY_CONCAVE = "strictly_reciprocally_concave"
    NEITHER = "neither"
    INCONCLUSIVE = "inconclusive"

    @property
    def convex_family(self):
        return self in (Verdict.RECIPROCALLY_CONVEX, Verdict.STRICTLY_RECIPROCALLY_CONVEX)

    @property
    def concave_family(self):
        return self in (Verdict.RECIPROCALLY_CONCAVE, Verdict.STRICTLY_RECIPROCALLY_CONCAVE)


class Route(str, Enum):
    PART_A = "part_a"
    PART_B = "part_b"
    DIRECT_PROBE = "direct_probe"


class LimitExpression(str, Enum):
    F_OVER_OMEGA = "f_over_omega"
    F_OVER_ONE_MINUS_XOMEGA = "f_over_one_minus_xomega"
    XF_OVER_ONE_MINUS_XOMEGA = "xf_over_one_minus_xomega"


@dataclass
class MonotonicityReport:
    grid: list
    direction: Direction
    violations: list
    slack: float
    segments: int = 1

    def to_dict(self):
        return {
            "direction": self.direction.value,
            "slack": self.slack,
            "segments": self.segments,
            "grid": self.grid,
            "violations": [list(v) for v in self.violations],
        }


@dataclass
class LimitDiagnostic:
    which: LimitExpression
    points: list
    values: list
    passed: bool
    message: str = ""

    def to_dict(self):
        return {"which": self.which.value, "points": self.points, "values": self.values,
                "passed": self.passed, "message": self.message}


@dataclass
class Condition:
    name: str
    expected: str
    passed: bool
    report: MonotonicityReport | LimitDiagnostic | None = None
    message: str = ""

    def to_dict(self):
        return {"name": self.name, "expected": self.expected, "passed": self.passed,
                "message": self.message,
                "report": self.report.to_dict() if self.report is not None else None}


@dataclass(frozen=True)
class ExcludedInterval:
    center: float
    lo: float
    hi: float
    reason: str


@dataclass
class Certificate:
    verdict: Verdict
    route: Route | None
    conditions: list
    excluded_intervals: list
    routes_passed: list = field(default_factory=list)
    attempts: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    grid: tuple = ()

    @property
    def strict(self):
        return self.verdict in (Verdict.STRICTLY_RECIPROCALLY_CONVEX,
                                Verdict.STRICTLY_RECIPROCALLY_CONCAVE)

    def condition(self, name):
        for cond in self.conditions:
            if cond.name == name:
                return cond
        for conds in self.attempts.values():
            for cond in conds:
                if cond.name == name:
                    return cond
        raise KeyError(name)

    def to_dict(self):
        return {
            "verdict": self.verdict.value,
            "route": self.route.value if self.route is not None else None,
            "routes_passed": [r.value for r in self.routes_passed],
            "grid": {"min": self.grid[0], "max": self.grid[1], "points": self.grid[2]}
            if self.grid else None,
            "excluded_intervals": [
                {"center": e.center, "lo": e.lo, "hi": e.hi, "reason": e.reason}
                for e in self.excluded_intervals],
            "conditions": [c.to_dict() for c in self.conditions],
            "attempts": {route.value: [c.to_dict() for c in conds]
                         for route, conds in self.attempts.items()},
            "notes": list(self.notes),
        }


@dataclass(frozen=True)
class ProbeConfig:
    grid_min: float = DEFAULT_GRID_MIN
    grid_max: float = DEFAULT_GRID_MAX
    grid_points: int = DEFAULT_GRID_POINTS
    slack: float = DEFAULT_SLACK

    def __post_init__(self):
        if not (0.0 < self.grid_min < self.grid_max and math.isfinite(self.grid_max)):
            raise DomainError("grid must satisfy 0 < grid_min < grid_max < inf")
        if self.grid_points < 3:
            raise DomainError("grid_points must be at least 3")
        if not self.slack >= 0.0:
            raise DomainError("slack must be nonnegative")

    def grid(self):
        return np.geomspace(self.grid_min, self.grid_max, self.grid_points)


# ---------------------------------------------------------------------------
# test functions
# ---------------------------------------------------------------------------

def _denominator(model, x):
    om = model.omega(x)
    omp = model.omega_prime(x)
    return om, omp, x * om * om - x * omp - 2.0 * om


def test_fn_a(model: DistributionModel, x: float) -> float:
    """x^3 omega' / (x omega^2 - x omega' - 2 omega)."""
    om, omp, den = _denominator(model, x)
    if abs(den) <= DENOMINATOR_TOL:
        raise SingularityError(f"test function denominator vanishes at x={x!r}", x)
    return x ** 3 * omp / den


def test_fn_b(model: DistributionModel, x: float) -> float:
    """(x^2 omega' - x omega + 2) / (x omega^2 - x omega' - 2 omega)."""
    om, omp, den = _denominator(model, x)
    if abs(den) <= DENOMINATOR_TOL:
        raise SingularityError(f"test function denominator vanishes at x={x!r}", x)
    return (x * x * omp - x * om + 2.0) / den


# the names above start with "test_"; keep pytest from collecting them
test_fn_a.__test__ = False
test_fn_b.__test__ = False


def omega_zero_exclusions(model: DistributionModel):
    return [ExcludedInterval(z, z - r, z + r, "omega zero")
            for z in model.omega_zeros for r in (max(1e-6, 1e-3 * z),)]


def omega_ratio(model: DistributionModel, x: float, excluded=None) -> float:
    """omega'(x) / omega(x)^2."""
    if excluded is None:
        excluded = omega_zero_exclusions(model)
    for ex in excluded:
        if ex.lo < x < ex.hi:
            raise SingularityError(f"x={x!r} lies in the excluded interval around {ex.center!r}", x)
    om = model.omega(x)
    if om == 0.0:
        raise SingularityError(f"omega vanishes at x={x!r}", x)
    return model.omega_prime(x) / (om * om)


# ---------------------------------------------------------------------------
# limits
# ---------------------------------------------------------------------------

def _limit_expression(model, which, x):
    f = model.density(x)
    if which is LimitExpression.F_OVER_OMEGA:
        den = model.omega(x)
        num = f
    else:
        den = 1.0 - x * model.omega(x)
        num = f if which is LimitExpression.F_OVER_ONE_MINUS_XOMEGA else x * f
    if den == 0.0:
        raise SingularityError(f"{which.value} is undefined at x={x!r}", x)
    return num / den


def limit_probe(model: DistributionModel, which, points=LIMIT_POINTS,
                threshold: float = LIMIT_THRESHOLD) -> LimitDiagnostic:
    """Heuristic check that an expression tends to 0 as x -> inf.

    Passes iff the magnitudes at ``points`` are non-increasing and the last
    one is below ``threshold``.
    """
    which = LimitExpression(which)
    points = [float(p) for p in points]
    values = []
    for x in points:
        try:
            v = _limit_expression(model, which, x)
        except (ArithmeticError, ValueError) as exc:
            return LimitDiagnostic(which, points, values, False, f"undefined at x={x!r}: {exc}")
        if not math.isfinite(v):
            return LimitDiagnostic(which, points, values + [v], False, f"non-finite at x={x!r}")
        values.append(v)
    mags = [abs(v) for v in values]
    if any(b > a for a, b in zip(mags, mags[1:])):
        return LimitDiagnostic(which, points, values, False, "magnitude does not decrease")
    if mags[-1] >= threshold:
        return LimitDiagnostic(which, points, values, False,
                               f"final magnitude {mags[-1]:.3g} not below {threshold:g}")
    return LimitDiagnostic(which, points, values, True)


# ---------------------------------------------------------------------------
# monotonicity
# ---------------------------------------------------------------------------

def _evaluate(fn, grid):
    values = []
    for x in grid:
        try:
            v = float(fn(float(x)))
        except (ArithmeticError, ValueError) as exc:
            raise GridEvaluationError(f"evaluation failed at x={float(x)!r}: {exc}", float(x)) from exc
        if not math.isfinite(v):
            raise GridEvaluationError(f"non-finite value at x={float(x)!r}", float(x))
        values.append(v)
    return np.array(values)


def classify_values(grid, values, slack: float = DEFAULT_SLACK) -> MonotonicityReport:
    """Monotonicity direction of sampled values, with slack relative to the local scale."""
    grid = [float(x) for x in grid]
    values = np.asarray(values, dtype=float)
    diffs = np.diff(values)
    tol = slack * np.maximum(np.abs(values[:-1]), np.abs(values[1:]))
    rising = diffs > tol
    falling = diffs < -tol
    if not rising.any() and not falling.any():
        direction = Direction.CONSTANT
        violations = []
    elif not falling.any():
        direction = Direction.STRICTLY_INCREASING if rising.all() else Direction.NON_DECREASING
        violations = []
    elif not rising.any():
        direction = Direction.STRICTLY_DECREASING if falling.all() else Direction.NON_INCREASING
        violations = []
    else:
        direction = Direction.NOT_MONOTONE
        # report breaks of whichever orientation fits better
        against = falling if falling.sum() <= rising.sum() else rising
        violations = [(grid[i], grid[i + 1], float(diffs[i])) for i in np.flatnonzero(against)]
    return MonotonicityReport(grid, direction, violations, slack)


def monotonicity_probe(fn, grid, slack: float = DEFAULT_SLACK) -> MonotonicityReport:
    """Classify ``fn`` on an increasing grid from consecutive differences.

    A difference counts as a rise (fall) only when it exceeds ``slack`` times
    the larger magnitude of its two endpoint values.  Strict directions need
    every difference to be a rise (fall).
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or len(grid) < 3:
        raise DomainError("grid needs at least 3 points")
    if np.any(np.diff(grid) <= 0.0):
        raise DomainError("grid must be strictly increasing")
    return classify_values(grid, _evaluate(fn, grid), slack)


def combine_reports(reports, slack) -> MonotonicityReport:
    """Join per-segment reports; monotone overall iff all segments agree."""
    grid = [x for r in reports for x in r.grid]
    violations = [v for r in reports for v in r.violations]
    dirs = [r.direction for r in reports]
    if all(d is Direction.CONSTANT for d in dirs):
        direction = Direction.CONSTANT
    elif all(d.increasing for d in dirs):
        direction = (Direction.STRICTLY_INCREASING if all(d.strict for d in dirs)
                     else Direction.NON_DECREASING)
    elif all(d.decreasing for d in dirs):
        direction = (Direction.STRICTLY_DECREASING if all(d.strict for d in dirs)
                     else Direction.NON_INCREASING)
    else:
        direction = Direction.NOT_MONOTONE
    return MonotonicityReport(grid, direction, violations, slack, segments=len(reports))


def split_grid(grid, excluded):
    """Segments of ``grid`` that avoid every excluded interval."""
    segments = [[]]
    cuts = sorted(excluded, key=lambda e: e.lo)
    for x in grid:
        x = float(x)
        inside = any(e.lo <= x <= e.hi for e in cuts)
        if inside:
            if segments[-1]:
                segments.append([])
            continue
        if segments[-1] and any(segments[-1][-1] < e.lo and x > e.hi for e in cuts):
            segments.append([])
        segments[-1].append(x)
    return [s for s in segments if len(s) >= 2]


def piecewise_monotonicity(fn, grid, excluded, slack: float = DEFAULT_SLACK) -> MonotonicityReport:
    reports = [classify_values(seg, _evaluate(fn, seg), slack) for seg in split_grid(grid, excluded)]
    if not reports:
        raise DomainError("no grid points survive the exclusions")
    if len(reports) == 1:
        return reports[0]
    return combine_reports(reports, slack)


def x2mprime(model: DistributionModel, x: float) -> float:
    """x^2 m'(x) with m' taken from m' = -omega m - 1."""
    return x * x * model.mills_prime(x)


def x2mprime_probe(model: DistributionModel, grid, slack: float = DEFAULT_SLACK) -> MonotonicityReport:
    """Direction of x^2 m'(x): increasing iff x -> m(1/x) is convex."""
    return monotonicity_probe(lambda x: x2mprime(model, x), grid, slack)


def slope_probe(fn, grid, slack: float = DEFAULT_SLACK) -> MonotonicityReport:
    """Direction of the secant slopes of ``fn`` (reported on interval midpoints).

    Increasing slopes mean ``fn`` is convex on the grid, decreasing slopes
    concave.
    """
    grid = np.asarray(grid, dtype=float)
    values = _evaluate(fn, grid)
    slopes = np.diff(values) / np.diff(grid)
    mids = 0.5 * (grid[:-1] + grid[1:])
    return classify_values(mids, slopes, slack)


def central_derivative(fn, x: float, h: float, levels: int = 10) -> float:
    """Central difference of ``fn`` at x refined by Richardson extrapolation.

    Steps shrink by 1.4 per level; the tableau entry with the smallest change
    between neighbours wins (Ridders' scheme).  Stops once the diagonal starts
    growing again, which is where rounding takes over.
    """
    shrink = 1.4
    shrink2 = shrink * shrink
    table = [[(fn(x + h) - fn(x - h)) / (2.0 * h)]]
    best, best_err = table[0][0], math.inf
    for i in range(1, levels):
        h /= shrink
        row = [(fn(x + h) - fn(x - h)) / (2.0 * h)]
        fac = shrink2
        for j in range(1, i + 1):
            row.append((row[j - 1] * fac - table[i - 1][j - 1]) / (fac - 1.0))
            fac *= shrink2
            err = max(abs(row[j] - row[j - 1]), abs(row[j] - table[i - 1][j - 1]))
            if err <= best_err:
                best, best_err = row[j], err
        table.append(row)
        if abs(row[i] - table[i - 1][i - 1]) >= 2.0 * best_err:
            break
    return best


def ode_residual(model: DistributionModel, x: float) -> float:
    """m'(x) + omega(x) m(x) + 1, with m' from extrapolated central differences.

    Zero up to differencing and rounding error for a self-consistent model;
    the rounding floor is about eps * |omega(x) m(x)|.
    """
    x = float(x)
    deriv = central_derivative(model.mills, x, 0.05 * x)
    return deriv + model.omega(x) * model.mills(x) + 1.0


# ---------------------------------------------------------------------------
# certifier
# ---------------------------------------------------------------------------

def _exclusions(model, grid):
    excluded = omega_zero_exclusions(model)

    def den(x):
        return _denominator(model, x)[2]

    try:
        poles = find_sign_changes(den, grid)
    except (ArithmeticError, ValueError):
        poles = []
    for p in poles:
        r = max(1e-6, 1e-3 * p)
        excluded.append(ExcludedInterval(p, p - r, p + r, "test-function pole"))
    return sorted(excluded, key=lambda e: e.center)


def _monotone_condition(name, expected, fn, grid, excluded, slack):
    try:
        report = piecewise_monotonicity(fn, grid, excluded, slack)
    except (ArithmeticError, ValueError) as exc:
        return Condition(name, expected, False, None, str(exc))
    want_increasing = expected == "increasing"
    ok = report.direction.increasing if want_increasing else report.direction.decreasing
    return Condition(name, expected, ok, report)


def _limit_condition(model, which):
    diag = limit_probe(model, which)
    return Condition(f"limit_{diag.which.value}", "tends to 0", diag.passed, diag, diag.message)


def _criterion_part(model, grid, excluded, slack, quotient, limits, orientation):
    """Conditions for one part of the criterion in one orientation.

    ``orientation`` is "convex" (ratio decreasing, quotient increasing) or
    "concave" (the mirror image).
    """
    ratio_dir, quot_dir = ("decreasing", "increasing") if orientation == "convex" \
        else ("increasing", "decreasing")
    conds = [_limit_condition(model, w) for w in limits]
    conds.append(_monotone_condition("omega_ratio", ratio_dir,
                                     lambda x: omega_ratio(model, x, excluded),
                                     grid, excluded, slack))
    qname = "test_fn_a" if quotient is test_fn_a else "test_fn_b"
    conds.append(_monotone_condition(qname, quot_dir, lambda x: quotient(model, x),
                                     grid, excluded, slack))
    return conds


def _strict(conds):
    return all(c.report.direction.strict for c in conds if isinstance(c.report, MonotonicityReport))


def _try_part(model, grid, excluded, slack, quotient, limits):
    """Return (verdict or None, conditions, note) for one part of the criterion."""
    convex = _criterion_part(model, grid, excluded, slack, quotient, limits, "convex")
    if all(c.passed for c in convex):
        concave_too = all(c.report.direction is Direction.CONSTANT for c in convex
                          if isinstance(c.report, MonotonicityReport))
        note = ("omega'/omega^2 and the quotient are both constant, so the concave-direction "
                "hypotheses hold as well: the Mills ratio is also reciprocally concave") \
            if concave_too else ""
        verdict = Verdict.STRICTLY_RECIPROCALLY_CONVEX if _strict(convex) \
            else Verdict.RECIPROCALLY_CONVEX
        return verdict, convex, note
    concave = _criterion_part(model, grid, excluded, slack, quotient, limits, "concave")
    if all(c.passed for c in concave):
        verdict = Verdict.STRICTLY_RECIPROCALLY_CONCAVE if _strict(concave) \
            else Verdict.RECIPROCALLY_CONCAVE
        return verdict, concave, ""
    # keep whichever orientation came closer for diagnostics
    keep = convex if sum(c.passed for c in convex) >= sum(c.passed for c in concave) else concave
    return None, keep, ""


def _shape(direction):
    """Convexity read off the direction of slopes (or of x^2 m')."""
    if direction is Direction.CONSTANT:
        return "affine"
    if direction.increasing:
        return "convex"
    if direction.decreasing:
        return "concave"
    return "neither"


def direct_probe(model: DistributionModel, grid, slack: float = DEFAULT_SLACK):
    """Classify m and x -> m(1/x) directly; returns (verdict, conditions).

    Convexity of m comes from its secant slopes, convexity of m(1/x) from the
    direction of x^2 m'(x).
    """
    probes = (
        ("mills_convexity", lambda: slope_probe(model.mills, grid, slack)),
        ("reciprocal_argument_convexity", lambda: x2mprime_probe(model, grid, slack)),
    )
    conds = []
    for name, run in probes:
        try:
            report = run()
        except (ArithmeticError, ValueError) as exc:
            conds.append(Condition(name, "unknown", False, None, str(exc)))
            return Verdict.INCONCLUSIVE, conds
        conds.append(Condition(name, _shape(report.direction),
                               report.direction is not Direction.NOT_MONOTONE, report))
    m_dir, r_dir = (c.report.direction for c in conds)

    if m_dir is Direction.NOT_MONOTONE or r_dir is Direction.NOT_MONOTONE:
        return Verdict.INCONCLUSIVE, conds
    strict = m_dir.strict and r_dir.strict
    # m concave and m(1/x) convex
    if m_dir.decreasing and r_dir.increasing:
        return (Verdict.STRICTLY_RECIPROCALLY_CONVEX if strict else Verdict.RECIPROCALLY_CONVEX), conds
    if m_dir.increasing and r_dir.decreasing:
        return (Verdict.STRICTLY_RECIPROCALLY_CONCAVE if strict else Verdict.RECIPROCALLY_CONCAVE), conds
    return Verdict.NEITHER, conds


def certify_reciprocal(model: DistributionModel, config: ProbeConfig | None = None) -> Certificate:
    """Certify reciprocal convexity or concavity of the model's Mills ratio on a grid.

    Part (a) is tried first, then part (b); the first that fires sets the
    verdict and both are listed in ``routes_passed`` when both hold.  Zeros of
    omega and poles of the quotients are cut out of the grid and the
    monotonicity hypotheses are checked segment by segment.  If neither part
    fires, m and x^2 m' are probed directly.
    """
    config = config or ProbeConfig()
    grid = config.grid()
    bounds = (config.grid_min, config.grid_max, config.grid_points)
    notes = [f"numerical certificate on {config.grid_points} log-spaced points in "
             f"[{config.grid_min:g}, {config.grid_max:g}]; not a proof on (0, inf)"]
    try:
        excluded = _exclusions(model, grid)
    except (ArithmeticError, ValueError) as exc:
        return Certificate(Verdict.INCONCLUSIVE, None, [], [], notes=notes + [str(exc)], grid=bounds)
    if excluded:
        notes.append("grid punctured around zeros of omega or poles of the quotients; "
                     "monotonicity hypotheses are read segment by segment")

    parts = (
        (Route.PART_A, test_fn_a, (LimitExpression.F_OVER_OMEGA,)),
        (Route.PART_B, test_fn_b, (LimitExpression.F_OVER_OMEGA,
                                   LimitExpression.F_OVER_ONE_MINUS_XOMEGA,
                                   LimitExpression.XF_OVER_ONE_MINUS_XOMEGA)),
    )
    attempts = {}
    fired = []
    for route, quotient, limits in parts:
        verdict, conds, note = _try_part(model, grid, excluded, config.slack, quotient, limits)
        attempts[route] = conds
        if verdict is not None:
            fired.append((route, verdict, conds, note))

    if fired:
        route, verdict, conds, note = fired[0]
        if note:
            notes.append(note)
        return Certificate(verdict, route, conds, excluded, [r for r, *_ in fired],
                           attempts, notes, bounds)

    verdict, conds = direct_probe(model, grid, config.slack)
    attempts[Route.DIRECT_PROBE] = conds
    if verdict is Verdict.INCONCLUSIVE:
        return Certificate(verdict, None, [], excluded, [], attempts, notes, bounds)
    return Certificate(verdict, Route.DIRECT_PROBE, conds, excluded, [Route.DIRECT_PROBE],
                       attempts, notes, bounds)


# ---------------------------------------------------------------------------
# complete monotonicity
# ---------------------------------------------------------------------------

@dataclass
class OrderResult:
    order: int
    passed: bool
    strict: bool
    min_signed: float
    first_failure: float | None = None

    def to_dict(self):
        return {"order": self.order, "passed": self.passed, "strict": self.strict,
                "min_signed": self.min_signed, "first_failure": self.first_failure}


@dataclass
class CompleteMonotonicityReport:
    grid: list
    max_order: int
    orders: list

    @property
    def passed(self):
        return all(o.passed for o in self.orders)

    @property
    def first_failure(self):
        for o in self.orders:
            if not o.passed:
                return o.order, o.first_failure
        return None

    def to_dict(self):
        return {"grid": self.grid, "max_order": self.max_order, "passed": self.passed,
                "first_failure": list(self.first_failure) if self.first_failure else None,
                "orders": [o.to_dict() for o in self.orders]}


def default_cm_step(x: float) -> float:
    return max(1e-2, 1e-2 * x)


def complete_monotonicity_probe(fn, grid, max_order: int, step=None) -> CompleteMonotonicityReport:
    """Sign test (-1)^n D^n fn(x) >= 0 with forward differences, n = 0..max_order.

    ``step`` is a fixed difference step or, when None, max(0.01, 0.01 x) at
    each base point.  A value counts as nonnegative down to a rounding band of
    2^n * 8 eps times the largest sample magnitude.
    """
    if not 0 <= max_order <= MAX_CM_ORDER:
        raise DomainError(f"max_order must lie in [0, {MAX_CM_ORDER}], got {max_order!r}")
    grid = [float(x) for x in grid]
    signed = {n: [] for n in range(max_order + 1)}
    bands = {n: [] for n in range(max_order + 1)}
    for x in grid:
        h = default_cm_step(x) if step is None else float(step)
        samples = _evaluate(fn, [x + k * h for k in range(max_order + 1)])
        scale = float(np.max(np.abs(samples)))
        for n in range(max_order + 1):
            delta = sum((-1) ** (n - k) * comb(n, k) * samples[k] for k in range(n + 1))
            signed[n].append((-1) ** n * delta)
            bands[n].append(2 ** n * 8 * _EPS * scale)
    orders = []
    for n in range(max_order + 1):
        vals, band = signed[n], bands[n]
        failure = next((x for x, v, b in zip(grid, vals, band) if v < -b), None)
        strict = all(v > b for v, b in zip(vals, band))
        orders.append(OrderResult(n, failure is None, strict, float(min(vals)), failure))
    return CompleteMonotonicityReport(grid, max_order, orders)
