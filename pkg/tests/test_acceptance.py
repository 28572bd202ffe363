"""Acceptance criteria, one test each.

Every test prints a single ``[PASS]`` or ``[FAIL]`` line naming its criterion,
then asserts.  Tolerances are the contractual ones; do not loosen them here.
Run standalone with ``python3 tests/test_acceptance.py`` to see just the lines.
"""

import math
import subprocess
import sys

import numpy as np
import pytest

from millsconvex import analysis, inequalities
from millsconvex.analysis import Direction, Verdict, certify_reciprocal
from millsconvex.distributions import make_gamma, make_normal_halfline
from millsconvex.quadrature import Representation, mills_reference
from millsconvex.specfun import gamma_mills, normal_mills

NORMAL_ANCHOR_ABS = 1e-12
MESH_REL = 1e-8
ODE_ABS = 1e-6
CHAIN_REL = 1e-10
STRICT_GAP = 1e-6
STIELTJES_REL = 1e-7

MESH_GRID = np.geomspace(1e-2, 50, 50)
GAMMA_ALPHAS = (0.5, 1.0, 1.5, 2.0, 3.0)


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}")
        return ok
    return emit


def rel(a, b):
    return abs(a - b) / abs(b)


def test_01_normal_anchor(report):
    err = abs(normal_mills(0.0).value - math.sqrt(math.pi / 2))
    assert report(1, err <= NORMAL_ANCHOR_ABS,
                  f"normal Mills ratio at 0 is sqrt(pi/2), abs error {err:.2e} <= {NORMAL_ANCHOR_ABS:g}")


def test_02_oracle_mesh(report):
    worst_normal = 0.0
    for x in MESH_GRID:
        lap = mills_reference(Representation.LAPLACE_NORMAL, x=x).value
        cau = mills_reference(Representation.CAUCHY_NORMAL, x=x).value
        ker = normal_mills(x).value
        worst_normal = max(worst_normal, rel(lap, cau), rel(lap, ker), rel(cau, ker))
    worst_gamma = 0.0
    for alpha in GAMMA_ALPHAS:
        for x in MESH_GRID:
            ker = gamma_mills(alpha, x).value
            for rep in (Representation.GAMMA_SHIFT, Representation.GAMMA_SCALED):
                worst_gamma = max(worst_gamma, rel(mills_reference(rep, alpha, x).value, ker))
    ok = worst_normal <= MESH_REL and worst_gamma <= MESH_REL
    assert report(2, ok, f"oracle mesh worst relative disagreement: normal {worst_normal:.2e}, "
                         f"gamma {worst_gamma:.2e} (limit {MESH_REL:g})")


def test_03_ode_residual(report):
    grid = analysis.ProbeConfig().grid()
    models = [make_normal_halfline()] + [make_gamma(a) for a in GAMMA_ALPHAS]
    worst = {}
    for model in models:
        worst[model.id] = max(abs(analysis.ode_residual(model, float(x))) for x in grid)
    bad = {k: v for k, v in worst.items() if v > ODE_ABS}
    summary = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    assert report(3, not bad, f"max |m' + omega m + 1| on the default grid: {summary} "
                              f"(limit {ODE_ABS:g})")


def test_04_regime_classification(report):
    verdicts = {a: certify_reciprocal(make_gamma(a)) for a in
                (0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 2.0, 2.5, 3.0)}
    convex_ok = all(verdicts[a].verdict.convex_family for a in (0.25, 0.5, 0.75, 1.0))
    one = verdicts[1.0]
    one_both = one.verdict.concave_family or any("also reciprocally concave" in n for n in one.notes)
    concave_ok = one_both and all(verdicts[a].verdict.concave_family for a in (1.25, 1.5, 2.0))
    neither_ok = all(verdicts[a].verdict is Verdict.NEITHER for a in (2.5, 3.0))
    detail = ", ".join(f"{a:g}:{c.verdict.value}" for a, c in verdicts.items())
    assert report(4, convex_ok and concave_ok and neither_ok, f"gamma regimes {detail}")


def test_05_x2mprime_directions(report):
    grid = analysis.ProbeConfig().grid()
    want = {0.5: "increasing", 3.0: "increasing", 1.5: "decreasing", 1.0: "constant",
            2.0: "constant"}
    got = {a: analysis.x2mprime_probe(make_gamma(a), grid).direction for a in want}

    def matches(direction, expected):
        if expected == "constant":
            return direction is Direction.CONSTANT
        if expected == "increasing":
            return direction in (Direction.STRICTLY_INCREASING, Direction.NON_DECREASING)
        return direction in (Direction.STRICTLY_DECREASING, Direction.NON_INCREASING)

    ok = all(matches(got[a], want[a]) for a in want)
    assert report(5, ok, "x^2 m' directions " + ", ".join(f"{a:g}:{d.value}" for a, d in got.items()))


def test_06_normal_sqrt_chain(report):
    fn = inequalities.sqrt_mills_ratio
    suite = inequalities.random_chain_suite(fn, inequalities.ChainDirection.CONCAVE, 1000, 42,
                                            (1e-2, 50.0), CHAIN_REL, keep_reports=True)
    diag = [inequalities.theorem1_chain(x, x, CHAIN_REL).verdict for x, _ in
            inequalities.sample_pairs(20, 42)]
    spread = [r for r in suite.reports if abs(r.x - r.y) > 1][:20]
    min_gap = min(min(r.gaps) for r in spread)
    ok = (suite.passes == 1000 and len(spread) == 20 and min_gap > STRICT_GAP
          and all(v is inequalities.ChainVerdict.HOLDS_WITH_EQUALITY for v in diag))
    assert report(6, ok, f"reversed chain for m(sqrt x)/sqrt x: {suite.passes}/1000 pass, "
                         f"diagonal equality on {len(diag)} points, smallest gap over 20 "
                         f"spread pairs {min_gap:.2e} > {STRICT_GAP:g}")


def test_07_complete_monotonicity(report):
    rep = analysis.complete_monotonicity_probe(inequalities.sqrt_mills_ratio,
                                               np.geomspace(0.1, 20, 30), 5)
    assert report(7, rep.passed, "finite-difference sign test on m(sqrt x)/sqrt x, orders 0..5: "
                                 + ", ".join(f"n={o.order}:{'ok' if o.passed else 'fail'}"
                                             for o in rep.orders))


def test_08_stieltjes_representation(report):
    worst = 0.0
    for x in np.geomspace(1e-2, 50, 30):
        quad = mills_reference(Representation.STIELTJES_H, x=x).value
        worst = max(worst, rel(quad, inequalities.sqrt_mills_ratio(x)))
    assert report(8, worst <= STIELTJES_REL,
                  f"Stieltjes integral vs m(sqrt x)/sqrt x worst relative error {worst:.2e}")


def test_09_negative_control(report):
    model = make_gamma(3.0)
    suite = inequalities.random_chain_suite(model.mills, inequalities.ChainDirection.CONVEX, 200, 42)
    verdict, conds = analysis.direct_probe(model, analysis.ProbeConfig().grid())
    shapes = {c.name: c.expected for c in conds}
    ok = (suite.failures >= 1 and shapes.get("mills_convexity") == "convex"
          and shapes.get("reciprocal_argument_convexity") == "convex" and verdict is Verdict.NEITHER)
    assert report(9, ok, f"gamma 3: {suite.failures}/200 convex chains violated, direct probe "
                         f"m {shapes.get('mills_convexity')}, m(1/x) "
                         f"{shapes.get('reciprocal_argument_convexity')}")


def _cli(*argv):
    return subprocess.run([sys.executable, "-m", "millsconvex", *argv], capture_output=True)


def test_10_cli_determinism_and_exit_codes(report, tmp_path):
    sweep = ("sweep", "--alpha-min", "0.25", "--alpha-max", "3.0", "--alpha-step", "0.25")
    first, second = _cli(*sweep), _cli(*sweep)
    identical = first.returncode == 0 and first.stdout == second.stdout and len(
        first.stdout.splitlines()) == 13
    matrix = [
        (("certify", "--dist", "gamma", "--alpha", "3"), 0),
        (("eval", "--dist", "gamma", "--alpha", "1", "--x", "2.5", "--format", "json"), 0),
        (("chain", "--samples", "10"), 0),
        (("cm", "--max-order", "2"), 0),
        (("certify", "--dist", "gamma", "--alpha", "-1"), 1),
        (("eval", "--dist", "normal-h", "--x", "0"), 1),
        (("chain", "--samples", "0"), 1),
        (("cm", "--max-order", "9"), 1),
        (("bogus",), 1),
        (("eval", "--x", "1", "--out", str(tmp_path / "no" / "such" / "file")), 2),
    ]
    codes = [(argv[0], _cli(*argv).returncode, want) for argv, want in matrix]
    contract = all(got == want for _, got, want in codes)
    assert report(10, identical and contract,
                  f"sweep byte-identical across runs: {identical}; exit codes "
                  + " ".join(f"{name}={got}" for name, got, _ in codes))


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "--no-header", "-p", "no:cacheprovider"]))
