"""How a density profile is assembled, and why it carries two estimates.

Run with:  python3 demos/density_profile_walkthrough.py

The six headline statistics are tail-window surrogates: a limsup becomes
the max over the last half of the samples, with extrema over dyadic index
blocks classifying the stream (converging / oscillating / diverging /
inconclusive).

The direct estimator log n / log a_n converges only logarithmically when
a_n carries a multiplicative constant (think 3 + 5m), so the profile also
computes the difference-quotient stream log((n+1)/n) / log(a_{n+1}/a_n).
When those quotients stabilize, they give the refined epsilon estimate;
when they oscillate (non-square squares!) the raw estimate is kept.
"""

from gapdens import density_profile, gen_arithmetic, gen_nonsquare_squares
from gapdens.report import profile_to_dict, render_pretty

for prefix in (gen_arithmetic(3, 5, 10**4), gen_nonsquare_squares(10**4)):
    prof = density_profile(prefix)
    print(render_pretty(profile_to_dict(prof)))
    raw = float(prof.eps_upper.tail_estimate)
    refined = float(prof.eps_upper_refined)
    if prof.refined_from_quotients:
        print(f"--> quotients stabilized: raw upper estimate {raw:.4f} "
              f"is refined to {refined:.4f}\n")
    else:
        print(f"--> quotients spread out; the raw estimate {raw:.4f} stands\n")

print("For 3 + 5m the true density is 1: the raw estimate sits near 0.85 at")
print("N = 10^4 and crawls upward like 1 - log(5)/log(n); the refinement is")
print("what makes desk-scale reproduction possible.")
