# %% [markdown]
# Collar charts around holes and around infinity, and the additive splitting
# L+ + L- that the filling construction rests on.

# %%
import numpy as np

from bundlex import DomainSpec, collar_chart, cousin_solve, validate_domain
from bundlex.geometry import OUTER, collar_part

domain = validate_domain(DomainSpec(10.0, ((-4.0, 1.0), (4.0, 1.0))))
right = collar_chart(domain, 2)
outer = collar_chart(domain, OUTER)

# %%
for zeta in (5.5, 4 + 1.5j, 4 - 1.5j, 2.5):
    w = right.to_chart(zeta)
    print(f"zeta={zeta!s:8s} w={w!s:10s} part={right.classify(w)}")
print("infinity sits at w =", outer.to_chart(1e300))

# %%
# L+ lives on V+ (cut downwards), L- on V- (cut upwards).
c = cousin_solve(right)
rng = np.random.default_rng(0)
w = np.sqrt(rng.uniform(1, 4, 5000)) * np.exp(2j * np.pi * rng.random(5000))
for part, target in (("omega", 0), ("omega_prime", -1)):
    ws = w[collar_part(w, part, 1e-6)]
    print(part, "max |L+ + L- - target| =", np.abs(c.Lplus(ws) + c.Lminus(ws) - target).max())

# %%
# A jump of exactly one on the left arc is what lets S^{L} absorb the gluing S^1.
print("L+(-1.5) =", c.Lplus(-1.5), " L-(-1.5) =", c.Lminus(-1.5))
