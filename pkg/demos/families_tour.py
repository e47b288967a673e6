"""A tour of the sequence families in the catalog.

Run with:  python3 demos/families_tour.py

Every generator returns a validated strictly increasing prefix.  Families
whose terms outgrow exact integers (the bit budget) switch to a log-domain
representation that stores ln(a_n) at high precision, which is all the
downstream statistics ever need.
"""

from gapdens import (
    FiniteSetReport,
    gen_arithmetic,
    gen_double_exp_union,
    gen_geometric,
    gen_nonsquare_squares,
    gen_polynomial,
    gen_power,
    gen_product,
    gen_sqrt_exp,
)


def show(prefix, count=8):
    if prefix.is_exact:
        head = ", ".join(str(t) for t in prefix.values[:count])
        print(f"  {prefix.family_tag}: {head}, ...")
    else:
        head = ", ".join(f"{float(v):.4f}" for v in prefix.values[:count])
        print(f"  {prefix.family_tag} (log-domain, {prefix.precision_bits}-bit): "
              f"ln terms {head}, ...")


print("Exact families")
show(gen_power("1/2", 20))          # floor(m^2)
show(gen_power("1/3", 20))          # floor(m^3)
show(gen_arithmetic(3, 5, 20))      # 3 + 5m
show(gen_polynomial(20, coeffs=(1, 2, 3)))   # 1 + 2m + 3m^2
show(gen_polynomial(20, t="1", d="2.5"))     # floor(m^2.5), certified floors
show(gen_nonsquare_squares(20))
show(gen_double_exp_union(12))      # {2^m} merged with {2^(2^M)+1}

print("\nLog-domain families (terms overflow any machine word)")
show(gen_geometric(1, 2, 300))      # 2^m for m up to 300
show(gen_sqrt_exp(20))              # (1 + 1/sqrt(m))^m, starts where floors separate

print("\nConvergent product: the floor set is finite")
report = gen_product(10, 2, 10**5)
assert isinstance(report, FiniteSetReport)
print(f"  {report.family_tag}: values {list(report.values)}")
print(f"  (no new value for {report.stall_window} indices after m={report.last_new_at})")

print("\nDivergent product: super-polynomial growth, so log-domain")
p = gen_product(1, "1/2", 2000 * 8)
show(p)
print(f"  ln of last term: {float(p.values[-1]):.2f} "
      f"(roughly 2*sqrt(n) = {2 * (len(p) + p.index_offset) ** 0.5:.2f})")
