"""Could the observable universe sit inside a Newtonian dark body?"""
# %%
from newton_horizon import cosmology_K, cosmology_report

print(f"K = 3 c^2 / (4 pi G) = {cosmology_K():.4e} kg/m")

# %%
for r in (1e26, 4e26, 1e27):
    rep = cosmology_report(r, 1e-23)
    print(f"r = {r:.0e} m: threshold {rep.threshold:.3e} kg/m^3, "
          f"a density of 1e-23 is {rep.ratio:,.0f} times that")

# %%
# density that would put a 4e26 m ball exactly on the threshold
print(cosmology_report(4e26, 0.0).threshold)
