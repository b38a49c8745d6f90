# %% [markdown]
# Two holes, one over-shear gluing and one swap gluing.  Each hole has a
# single-factor monodromy, so each is filled in one step.

# %%
import time

from bundlex import builtin_example, extend_bundle, verify_cocycle

spec = builtin_example("skoda")
for p, g in enumerate(spec.gap_words):
    print(f"G_{p} =", g)

# %%
t = time.perf_counter()
ext = extend_bundle(spec)
report = verify_cocycle(ext)
print(f"{len(ext.charts)} charts, {len(ext.links)} transitions, {time.perf_counter() - t:.2f} s")
for h in ext.holes:
    print(f"  {h.name:9s} {h.path:8s} factors={h.gluing.k} sub-holes={h.sub_holes}")

# %%
print("passed:", report.passed, " max residual:", f"{report.max_residual:.2e}")
for kind in ("gluing-identity", "exponent", "telescoping", "cocycle"):
    recs = report.by_kind(kind)
    print(f"  {kind:16s} {len(recs):3d} records, worst {max(r.max_residual for r in recs):.1e}")

# %%
for note in report.notes:
    print("note:", note)
