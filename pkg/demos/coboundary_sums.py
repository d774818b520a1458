# %% [markdown]
# # A function with bounded S-sums and growing T-sums
#
# f is a sum of tower functions f_r that alternate +alpha_r, -alpha_r along
# rows.  Along S the rows cancel, along T a column of A_r keeps its sign.

# %%
from borelmarkers import coboundary as cob
from borelmarkers.points import LatticePoint
from borelmarkers.systems import LabeledLattice

plan = cob.synthesize_sequences(3)
print("alpha", [str(a) for a in plan.alpha], "m", plan.m, "n", plan.n)
print("valid:", cob.validate_sequences(plan).passed)

lat = LabeledLattice(3)
towers = cob.build_towers(plan, lat, window=3000)

# %%
x = LatticePoint(0, (5, -7))
s = cob.partial_sums(x, "S", 5000, towers)
print("S-sums stay within", s.running_min, s.running_max, "bound", sum(plan.alpha))

# %%
for r in (1, 2):
    base = towers.towers[r - 1]
    w = next(p for p in lat.window(10) if base.base(p).is_in)
    t = cob.partial_sums(w, "T", plan.m[r - 1], towers)
    print(f"r={r}: T-sum over m_r from {w} is {t.final_sum}")
    b = cob.bound_decomposition(w, r, towers)
    print("   level term", b.stats["level_term"], "guaranteed", b.stats["guaranteed"])

# %%
pair = cob.transfer_pair(x, towers, 4000)
print("f(x) =", pair["f"], " g(x) - g(Sx) =", pair["g"] - pair["g_S"], pair["stabilized"])
