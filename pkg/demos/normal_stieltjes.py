"""The standard normal Mills ratio under a square root.

h(x) = m(sqrt x)/sqrt x is a Stieltjes transform,

    h(x) = (2 pi)^(-1/2) int_0^inf e^(-s/2) s^(-1/2) / (x + s) ds,

so it is completely monotonic and reciprocally concave.  This script checks
the integral against the erfcx-based kernel, runs the finite-difference sign
test and samples the reversed mean chain.
"""

import numpy as np

from millsconvex import Representation, mills_reference
from millsconvex.analysis import complete_monotonicity_probe
from millsconvex.inequalities import ChainDirection, random_chain_suite, sqrt_mills_ratio, theorem1_chain

xs = np.geomspace(1e-2, 50, 7)
print("x            integral             kernel               rel. diff")
for x in xs:
    q = mills_reference(Representation.STIELTJES_H, x=x).value
    k = sqrt_mills_ratio(x)
    print(f"{x:<12.5g} {q:<20.17g} {k:<20.17g} {abs(q - k) / k:.1e}")

cm = complete_monotonicity_probe(sqrt_mills_ratio, np.geomspace(0.1, 20, 30), 5)
print("\n(-1)^n D^n h >= 0:", ", ".join(f"n={o.order} {'ok' if o.passed else 'FAIL'}" for o in cm.orders))

rep = theorem1_chain(1.0, 4.0)
print("\nchain at (1, 4):", "  >=  ".join(f"{t:.10f}" for t in rep.terms), "->", rep.verdict.value)

summary = random_chain_suite(sqrt_mills_ratio, ChainDirection.CONCAVE, 1000, seed=42)
print(f"1000 random pairs: {summary.passes} hold, tightest pair {summary.worst_pair}")
