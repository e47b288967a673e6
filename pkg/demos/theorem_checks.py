"""The verification layer: sandwich, implied intervals, analytic grids.

Run with:  python3 demos/theorem_checks.py

Checks never conflate 'hypothesis unmet' with 'conclusion verified': a
check whose hypothesis fails reports Vacuous, and any leg that leans on a
heuristic divergence diagnostic downgrades Pass to Heuristic-Pass.
"""

from gapdens import (
    check_analytic_inequalities,
    check_rho_implies_tau_zero,
    check_sandwich,
    check_stolz,
    density_profile,
    gen_geometric,
    gen_polynomial,
    gen_sqrt_exp,
    implied_density_interval,
)

print("1. reciprocal sandwich on the quadratic family")
prof = density_profile(gen_polynomial(10**4, coeffs=(1, 2, 3)))
rep = check_sandwich(prof)
d = rep.details
print(f"   {d['lower_bound']:.4f} <= {d['eps_lower']:.4f} <= "
      f"{d['eps_upper']:.4f} <= {d['upper_bound']:.4f}   [{rep.status.value}]")

res = implied_density_interval(prof)
print(f"   implied density interval [{res.lo:.4f}, {res.hi:.4f}] via "
      f"{[r.rule for r in res.rules]}")

print("\n2. almost-thin sets have zero exponent; the converse fails")
rep = check_rho_implies_tau_zero(gen_geometric(1, 2, 60))
print(f"   2^m at N=60: {rep.status.value} "
      f"(rho_upper={rep.details['rho_upper']}, eps={rep.details['eps_upper_refined']:.4f})")
rep = check_rho_implies_tau_zero(gen_sqrt_exp(10**4))
print(f"   (1+1/sqrt(m))^m: {rep.status.value} -- limit ratio reaches 1 even "
      "though the density is 0,")
print("   so the hypothesis is unmet and the only honest verdict is vacuity.")

print("\n3. difference-quotient ordering (x = log n, y = log a_n on 2^m)")
import math
x = [math.log(n) for n in range(2, 2000)]
y = [n * math.log(2) for n in range(2, 2000)]
rep = check_stolz(x, y)
print(f"   {rep.status.value}: quotients and ratios both head to 0 "
      f"({rep.details['quotient_limsup']:.5f}, {rep.details['ratio_limsup']:.5f})")

print("\n4. analytic inequality grids at 128-bit precision")
rep = check_analytic_inequalities()
print(f"   {rep.status.value}: {rep.details['log_bound_points']} points on [0, 1/2], "
      f"{rep.details['growth_points']} on [1, {rep.details['growth_x_max']:.0f}]")
print(f"   closed-form vs finite-difference derivative gap: "
      f"{rep.details['max_derivative_gap']:.2e}")
