# %% [markdown]
# # Weak Rokhlin bases on a labelled lattice
#
# For bounds (n, m) the sweep removes points from a seed until the n*m
# translates S^i T^j A are pairwise disjoint.  We draw the (2,3) base on one
# label copy and then watch it after the stage that finishes target (1, 0).

# %%
from borelmarkers.markers import verify_disjointness, weak_rokhlin_2d
from borelmarkers.points import LatticePoint
from borelmarkers.systems import ST, LabeledLattice

lat = LabeledLattice(3)
A = weak_rokhlin_2d(lat, 2, 3)
print(len(A.plan.stages), "stages:", [str(g) for g in A.plan.gammas()])


def picture(S, label=0, r=8):
    for b in range(r, -r - 1, -1):
        print("".join("#" if S(LatticePoint(label, (a, b))).is_in else "."
                      for a in range(-r, r + 1)))


picture(A.after_target((1, 0)))
print()
picture(A)

# %%
region = list(lat.window(20))
mid = [ST((0, 0)), ST((1, -2)), ST((1, -1)), ST((1, 0))]
print("after (1,0):", verify_disjointness(A.after_target((1, 0)), mid, region, lat).passed)
rep = verify_disjointness(A, A.products, region, lat)
print("all six products:", rep.passed, rep.density_per_label)
