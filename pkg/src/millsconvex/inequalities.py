"""Harmonic/arithmetic mean chains for reciprocally convex functions.

For a reciprocally convex f and x, y > 0,

    f(2xy/(x+y)) <= (f(x)+f(y))/2 <= f((x+y)/2) <= (x f(x) + y f(y))/(x+y),

and a reciprocally concave function satisfies the reversed chain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DomainError, GridEvaluationError
from .specfun import normal_mills

CHAIN_REL_TOL = 1e-10


class ChainDirection(str, Enum):
    CONVEX = "convex_chain"
    CONCAVE = "concave_chain"


class ChainVerdict(str, Enum):
    HOLDS = "holds"
    HOLDS_WITH_EQUALITY = "holds_with_equality"
    VIOLATED = "violated"


@dataclass
class ChainReport:
    x: float
    y: float
    term_harmonic: float
    term_average: float
    term_arithmetic: float
    term_weighted: float
    direction: ChainDirection
    verdict: ChainVerdict
    max_violation: float
    tolerance: float

    @property
    def terms(self):
        return (self.term_harmonic, self.term_average, self.term_arithmetic, self.term_weighted)

    @property
    def gaps(self):
        """The three consecutive gaps, signed so that the claimed order makes them >= 0."""
        t = self.terms
        sign = 1.0 if self.direction is ChainDirection.CONVEX else -1.0
        return tuple(sign * (b - a) for a, b in zip(t, t[1:]))

    @property
    def holds(self):
        return self.verdict is not ChainVerdict.VIOLATED

    def to_dict(self):
        return {"x": self.x, "y": self.y, "term_harmonic": self.term_harmonic,
                "term_average": self.term_average, "term_arithmetic": self.term_arithmetic,
                "term_weighted": self.term_weighted, "direction": self.direction.value,
                "verdict": self.verdict.value, "max_violation": self.max_violation,
                "gaps": list(self.gaps)}


def _positive(name, v) -> float:
    v = float(v)
    if not (math.isfinite(v) and v > 0.0):
        raise DomainError(f"{name} must be positive and finite, got {v!r}")
    return v


def _call(fn, t):
    try:
        v = float(fn(t))
    except (ArithmeticError, ValueError) as exc:
        raise GridEvaluationError(f"evaluation failed at x={t!r}: {exc}", t) from exc
    if not math.isfinite(v):
        raise GridEvaluationError(f"non-finite value at x={t!r}", t)
    return v


def chain_terms(fn, x: float, y: float, direction=ChainDirection.CONVEX,
                rel_tol: float = CHAIN_REL_TOL) -> ChainReport:
    """Evaluate the four chain terms of ``fn`` at (x, y) and judge the ordering.

    Each inequality may fail by at most ``rel_tol * (1 + max |term|)``; when all
    four terms agree within that band the verdict is ``holds_with_equality``.
    """
    x = _positive("x", x)
    y = _positive("y", y)
    direction = ChainDirection(direction)
    fx = _call(fn, x)
    fy = _call(fn, y)
    harmonic = _call(fn, 2.0 * x * y / (x + y))
    average = 0.5 * (fx + fy)
    arithmetic = _call(fn, 0.5 * (x + y))
    weighted = (x * fx + y * fy) / (x + y)

    terms = (harmonic, average, arithmetic, weighted)
    tol = rel_tol * (1.0 + max(abs(t) for t in terms))
    sign = 1.0 if direction is ChainDirection.CONVEX else -1.0
    gaps = [sign * (b - a) for a, b in zip(terms, terms[1:])]
    worst = max(0.0, -min(gaps))
    if max(terms) - min(terms) <= tol:
        verdict = ChainVerdict.HOLDS_WITH_EQUALITY
    elif worst <= tol:
        verdict = ChainVerdict.HOLDS
    else:
        verdict = ChainVerdict.VIOLATED
    return ChainReport(x, y, harmonic, average, arithmetic, weighted, direction, verdict, worst, tol)


def sqrt_mills_ratio(x: float) -> float:
    """m(sqrt x) / sqrt x for the standard normal Mills ratio m."""
    r = math.sqrt(_positive("x", x))
    return normal_mills(r).value / r


def theorem1_chain(x: float, y: float, rel_tol: float = CHAIN_REL_TOL) -> ChainReport:
    """Reversed chain for x -> m(sqrt x)/sqrt x, the normal Mills ratio under a square root."""
    return chain_terms(sqrt_mills_ratio, x, y, ChainDirection.CONCAVE, rel_tol)


@dataclass
class ChainSuiteSummary:
    n_samples: int
    passes: int
    failures: int
    equalities: int
    worst_pair: tuple
    worst_violation: float
    direction: ChainDirection
    seed: int
    range: tuple
    reports: list = field(default_factory=list, repr=False)

    def to_dict(self):
        return {"n_samples": self.n_samples, "passes": self.passes, "failures": self.failures,
                "equalities": self.equalities, "worst_pair": list(self.worst_pair),
                "worst_violation": self.worst_violation, "direction": self.direction.value,
                "seed": self.seed, "range": list(self.range)}


def sample_pairs(n_samples: int, seed: int, range=(1e-2, 50.0)):
    """``n_samples`` (x, y) pairs drawn log-uniformly from ``range``."""
    lo, hi = (_positive("range bound", v) for v in range)
    if lo > hi:
        raise DomainError("range must satisfy lo <= hi")
    rng = np.random.default_rng(seed)
    u = rng.uniform(math.log(lo), math.log(hi), size=(n_samples, 2))
    pairs = np.exp(u)
    if lo == hi:
        pairs[:] = lo
    return [(float(a), float(b)) for a, b in pairs]


def random_chain_suite(fn, direction=ChainDirection.CONVEX, n_samples: int = 1000, seed: int = 42,
                       range=(1e-2, 50.0), rel_tol: float = CHAIN_REL_TOL,
                       keep_reports: bool = False) -> ChainSuiteSummary:
    """Check the chain at seeded log-uniform pairs; violations are counted, not raised.

    ``worst_pair`` is the pair with the largest violation, or with the
    smallest gap when nothing is violated; ties go to the smaller x, then the
    smaller y.
    """
    if n_samples < 1:
        raise DomainError(f"n_samples must be at least 1, got {n_samples!r}")
    direction = ChainDirection(direction)
    reports = [chain_terms(fn, x, y, direction, rel_tol)
               for x, y in sample_pairs(n_samples, seed, range)]
    failures = sum(r.verdict is ChainVerdict.VIOLATED for r in reports)
    equalities = sum(r.verdict is ChainVerdict.HOLDS_WITH_EQUALITY for r in reports)
    # smallest min-gap == largest violation; sort key gives the tie-break
    worst = min(reports, key=lambda r: (min(r.gaps), r.x, r.y))
    return ChainSuiteSummary(
        n_samples=n_samples,
        passes=n_samples - failures,
        failures=failures,
        equalities=equalities,
        worst_pair=(worst.x, worst.y),
        worst_violation=worst.max_violation,
        direction=direction,
        seed=seed,
        range=tuple(float(v) for v in range),
        reports=reports if keep_reports else [],
    )
