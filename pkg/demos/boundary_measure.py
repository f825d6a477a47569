"""The invariant measure on a boundary orbit and its transformation law.

Run with ``python3 demos/boundary_measure.py``.
"""

# %%
import numpy as np

from cone_harmonics import (
    QuadratureSpec,
    RadialFunction,
    algebra,
    boundary_integral,
    gindikin_gamma,
    random_group_element,
    relative_invariance_check,
)

alg = algebra("sym", 3)
rng = np.random.default_rng(5)

# %% [markdown]
# Integrating exp(-tr y) against the face measure of rank-2 points gives the
# Gindikin Gamma function at (rd/2, rd/2).

# %%
f = RadialFunction(2, lambda t: np.exp(-np.sum(t, axis=-1)), "exp(-tr)")
res = boundary_integral(f, alg, 2)
print("integral", res.value, " Gamma", gindikin_gamma(np.full(2, 1.5), 1))

# %% [markdown]
# Moving the integrand by g rescales the integral by a power of the character.

# %%
spec = QuadratureSpec(n_k=1 << 12, seed=0)
for _ in range(3):
    g = random_group_element(rng, alg, 0.3)
    rep = relative_invariance_check(g, f, 2, spec, k_invariant=True)
    print(f"Delta(g)={rep.character:.4f}  rel diff={rep.rel_diff:.2e}  passed={rep.passed}")
