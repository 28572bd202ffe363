"""Certify a distribution that is not built in.

A Weibull law with shape 2 has f(x) = 2x e^(-x^2), so omega = 1/x - 2x.  The
custom path needs only omega, its derivative and (log) density; survival
function and Mills ratio come from quadrature.  The same model can be given
to the command-line tool as a spec file containing ``omega = 1/x - 2*x``.
"""

import math

from millsconvex import PolynomialScore, ProbeConfig, certify_reciprocal, make_custom, make_from_score

weibull = make_custom(
    omega_fn=lambda x: 1 / x - 2 * x,
    omega_prime_fn=lambda x: -1 / x ** 2 - 2,
    density_fn=lambda x: 2 * x * math.exp(-x * x),
    log_density_fn=lambda x: math.log(2 * x) - x * x,
    support_hint=(1e-3, 10.0),
    id="weibull(2)",
)
print("m(1) =", weibull.mills(1.0), "(exactly 1/2)")
print("zeros of omega:", weibull.omega_zeros, "vs 1/sqrt 2 =", 1 / math.sqrt(2))

# Here m(x) = 1/(2x) exactly: convex, with x^2 m' = -1/2 constant, so m is
# reciprocally concave in the non-strict sense.  x^2 m' = -x^2 (omega m + 1)
# suffers cancellation once omega m is close to -1, and quadrature values of m
# are only good to about 1e-11.  On the default grid reaching x = 1000 that
# noise swamps the 1e-9 slack and the certifier declines to decide.
for config in (ProbeConfig(), ProbeConfig(1e-3, 10.0, 1000)):
    cert = certify_reciprocal(weibull, config)
    print(f"grid [{config.grid_min:g}, {config.grid_max:g}]: {cert.verdict.value}",
          "via", cert.route.value if cert.route else "-")

# the same law from a polynomial score, as the CLI builds it
same = make_from_score(PolynomialScore(1.0, (0.0, -2.0)), (1e-3, 10.0), id="weibull(2), score form")
print("score form agrees:", math.isclose(same.mills(2.5), weibull.mills(2.5), rel_tol=1e-11))
