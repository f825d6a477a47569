"""Spherical transform, inversion and the Plancherel identity on a rank-1 face.

Run with ``python3 demos/plancherel_rank_one.py``.
"""

# %%
import numpy as np

from cone_harmonics import (
    RadialFunction,
    adaptive_grid,
    invert,
    plancherel_check,
    plancherel_density,
    tilde_transform,
)

r, d = 2, 1
f = RadialFunction(1, lambda t: np.exp(-np.log(t[..., 0]) ** 2), "log-gauss")

# %% [markdown]
# The Plancherel density on the rank-1 face of the 2x2 symmetric cone is
# proportional to lambda tanh(pi lambda).

# %%
lam = np.linspace(0.25, 3.0, 6)[:, None]
ratio = plancherel_density(lam, r, 1, d) / (lam[:, 0] * np.tanh(np.pi * lam[:, 0]))
print("density / (lam tanh(pi lam)):", np.round(ratio, 12))

# %% [markdown]
# Forward transform on an adaptive lambda grid, then invert at a few points.

# %%
grid, _, _ = adaptive_grid(f, r, d)
tv = tilde_transform(f, grid.nodes, r, d)
for x in (0.5, 1.0, 2.5):
    back = invert(tv, grid, np.array([x]), r, d).value
    print(f"x={x:4}: f={f.eigen(np.array([[x]]))[0]:.8f}  inverted={back.real:.8f}")

# %% [markdown]
# Both sides of the Plancherel identity.

# %%
rep = plancherel_check(f, r, d)
print("boundary side", rep.lhs, " spectral side", rep.rhs, " rel diff", rep.rel_diff)
