"""Probing sum a_n^-sigma and bracketing its critical exponent.

Run with:  python3 demos/series_probe_demo.py

Partial sums accumulate in the log domain (log-sum-exp), so nothing
underflows even for terms like 2^(2^M).  Verdicts are explicit heuristics:
the last dyadic block's share of the total plus the block-to-block decay
trend, with an Inconclusive band around the critical exponent by design.
"""

import math

from gapdens import bracket_tau, gen_arithmetic, gen_geometric, gen_power, partial_sums

print("p-series checkpoints on the integers (sigma = 2):")
trace = partial_sums(gen_arithmetic(0, 1, 10**4), 2)
n, ln_s = trace.partial_sums_log[-1]
print(f"  partial sum at n={n}: {math.exp(float(ln_s)):.6f} "
      f"(pi^2/6 = {math.pi**2 / 6:.6f})  verdict: {trace.verdict.value}")

print("\nharmonic series (sigma = 1): blocks stop decaying")
trace = partial_sums(gen_arithmetic(0, 1, 512), 1)
print(f"  last-block share {trace.tail_increment_ratio:.3f}, "
      f"block trend {trace.block_trend:+.5f}  verdict: {trace.verdict.value}")

print("\ngeometric terms converge for every positive sigma")
trace = partial_sums(gen_geometric(1, 2, 1000), 0.1)
print(f"  sigma=0.1 verdict: {trace.verdict.value}")

print("\nbracketing the critical exponent of floor(m^2) (true value 1/2):")
br = bracket_tau(gen_power("1/2", 10**5), 0.1, 1.0)
print(f"  bracket [{br.lo:.5f}, {br.hi:.5f}]  width {br.width:.4f}")
print(f"  probes: " + ", ".join(f"{s:.4g}:{v.value[:4]}" for s, v in br.probes))
print(f"  bisection stopped at sigma={br.stopped_at:.5f} (Inconclusive), refusing")
print("  to manufacture precision where the series changes character slowly.")
print(f"  independent density estimate {br.eps_upper_estimate:.4f} sits "
      f"{br.consistency_gap:.4f} from the midpoint.")

print("\ntau = 0 families bracket against the a-priori divergent sigma = 0:")
br = bracket_tau(gen_geometric(1, 2, 1000), 0.01, 0.5)
print(f"  bracket [{br.lo}, {br.hi:.5f}]  (lo is the sigma=0 axiom: {br.lo_is_axiom})")
