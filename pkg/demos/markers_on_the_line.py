# %% [markdown]
# # Vanishing markers on the integer line and the odometer
#
# Each level keeps the points where a run of the previous level ends, so the
# sets thin out and every level is disjoint from its first n-1 shifts.

# %%
import numpy as np

from borelmarkers.markers import vanishing_markers_1d, verify_disjointness
from borelmarkers.points import LinePoint
from borelmarkers.systems import ST, DyadicOdometer, IntegerLine

line = IntegerLine()
levels = vanishing_markers_1d(line, 4)
for n, A in enumerate(levels, start=1):
    row = "".join("#" if A(LinePoint(0, k)).is_in else "." for k in range(-32, 33))
    print(f"A_{n}  {row}")

# %% [markdown]
# On the line the levels come out as 2Z, 2Z, 4Z, 8Z.  The odometer is the
# less regular case: membership depends on the 2-adic digits.

# %%
odo = DyadicOdometer()
pts = odo.sample(np.random.default_rng(0), 500)
for n, A in enumerate(vanishing_markers_1d(odo, 4), start=1):
    rep = verify_disjointness(A, [ST((i,)) for i in range(n)], pts, odo)
    print(n, "disjoint" if rep.passed else "OVERLAP", rep.density_per_label,
          "unknown:", rep.unknown_count)
