# %% [markdown]
# Words of elementary automorphisms of C^2 and the flows behind them.

# %%
import numpy as np

from bundlex import Affine, OverShear, Polynomial, Shear, henon_word, recognize_flow
from bundlex.autgroup import AutomorphismWord, expand_polynomial, invert_word

z1 = Polynomial.variable(2, 0)
z2 = Polynomial.variable(2, 1)

# %%
# Words list factors in the order they act.
h = henon_word(2)
print(h)
print("h(1, 2) =", h([1, 2]))
print("h^-1(h(1, 2)) =", invert_word(h)(h([1, 2])))

# %%
# Polynomial words can be expanded symbolically.
comps, deg = expand_polynomial(h.then(h))
print("h o h =", comps, "degree", deg)

# %%
# Every elementary is the time-1 map of a flow.
for e in (Shear(1, z1**2), OverShear(1, z1), Affine([[0, 1j], [1, 0]]), Affine([[1, 0], [0, 2]], [1, 1])):
    f = recognize_flow(e)
    z = np.array([[0.3 + 0.1j, -0.7j]])
    print(f"{type(f).__name__:14s} S^1 - e = {np.abs(f.apply(1.0, z) - e(z)).max():.1e}")

# %%
# Complex times are allowed; the group law still holds.
f = recognize_flow(Affine([[0, 1j], [1, 0]]))
s, t = 0.4 - 0.2j, -1.1 + 0.5j
z = np.array([[1.0, 2.0]])
print("S^(s+t) - S^s S^t:", np.abs(f.apply(s + t, z) - f.apply(s, f.apply(t, z))).max())

# %%
# Swap-type linear maps: the generator is a matrix log.
print(np.round(f.generator, 6))
