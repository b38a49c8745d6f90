# %% [markdown]
# One hole glued by a Hénon-type map.  Its monodromy is a linear map followed
# by a shear, so the hole is split into two sub-holes, one per factor.

# %%
import numpy as np

from bundlex import builtin_example, extend_bundle, verify_cocycle
from bundlex.autgroup import OverShear
from bundlex.verify import perturb, perturbation_sites

ext = extend_bundle(builtin_example("demailly", 2))
hole = ext.holes[0]
lay = hole.refined.layout
print("sub-hole centers", lay.centers, "radius", lay.radius)
for q, w in enumerate(hole.refined.band_words):
    print(f"  arc {q}: {w}")

# %%
report = verify_cocycle(ext)
print("passed:", report.passed)
for r in report.by_kind("telescoping"):
    print(f"  {r.name}: {r.max_residual:.1e}")

# %%
# Every map in the extension is polynomial of degree at most 2.
elems = ext.elementaries()
print(len(elems), "elementaries, max degree", max(e.degree for e in elems),
      "over-shears", sum(isinstance(e, OverShear) for e in elems))

# %%
# Break one coefficient and the verifier notices.
sites = perturbation_sites(ext)
site = sites[len(sites) // 2]
bad = verify_cocycle(perturb(ext, site), samples=300)
print("perturbed", ext.links[site[0]].provenance, "->", bad.passed, f"{bad.max_residual:.1e}")
print("first failing:", [r.name for r in bad.failing()][:4])

# %%
for k in (3, 4):
    e = extend_bundle(builtin_example("demailly", k))
    r = verify_cocycle(e, samples=300)
    print(f"k={k}: passed={r.passed} max degree={max(x.degree for x in e.elementaries())}")
