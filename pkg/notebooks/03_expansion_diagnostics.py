# %% [markdown]
# # When a truncated series stops being a density
#
# Gram-Charlier and Edgeworth truncations integrate to one and match the
# requested cumulants, but nothing forces them to stay non-negative.  The
# `negativity` diagnostic reports where they dip below zero.

# %%
import numpy as np

from sampvar import CumulantSet, ExpansionSpec, negativity
from sampvar.expansion import density

# %%
cases = {
    "mild skew": CumulantSet(10, 0.0, 1.0, 0.3, 0.2),
    "strong skew": CumulantSet(10, 0.0, 1.0, 0.8, 0.0),
    "platykurtic": CumulantSet(10, 0.0, 1.0, 0.0, -1.2),
}
for label, cs in cases.items():
    spec = ExpansionSpec("gram-charlier", 4, cs)
    report = negativity(spec)
    where = ", ".join(f"[{a:.2f}, {b:.2f}]" for a, b in report.intervals) or "nowhere"
    print(f"{label:12s} negative on {where}; mass {report.negative_mass:.2e}")

# %% [markdown]
# A quick look at the values themselves for the strongly skewed case.

# %%
spec = ExpansionSpec("gram-charlier", 4, cases["strong skew"])
xs = np.linspace(-4, 4, 9)
for x, f in zip(xs, density(spec, xs)):
    print(f"{x:+.1f}  {f:+.5f}")
