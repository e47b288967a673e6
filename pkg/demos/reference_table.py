"""Reproduce the reference table of gap statistics at desk scale.

Run with:  python3 demos/reference_table.py

alpha = liminf n g_n / a_{n+1} and beta = limsup n g_n / a_n sandwich the
exponential densities via 1/beta <= lower eps <= upper eps <= 1/alpha.
The expected columns are compiled-in constants; diverging statistics
render as +inf(div).  The union family runs at N=60 in exact mode (its
terms reach 2^(2^M)).
"""

from gapdens.report import render_table
from gapdens.table import run_table

doc = run_table(n=10**4, union_n=60)
print(render_table(doc))
for row in doc["rows"]:
    if row["abs_delta"] is not None:
        print(f"  {row['family']:22s} |delta| = {row['abs_delta']:.2e}   ({row['rule']})")
    else:
        print(f"  {row['family']:22s} diverging as expected   ({row['rule']})")
