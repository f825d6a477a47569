"""Spherical functions on a rank-3 cone and their restriction to a boundary face.

Run with ``python3 demos/restriction_identity.py``.
"""

# %%
import numpy as np

from cone_harmonics import AlgebraElement, algebra, gamma_quotient, spherical_mc, verify_restriction_identity

rng = np.random.default_rng(1)
alg = algebra("sym", 3)

# %% [markdown]
# A spherical function is the Haar average of the generalized power function.
# At the identity every summand equals one, so the estimate is exact.

# %%
nu = np.array([1.2 + 0.5j, 0.6, 0.1 - 0.3j])
print("Phi_nu(e) =", spherical_mc(alg.identity, nu, 2000, seed=0))

# %% [markdown]
# On the face of rank-2 points the spherical function of the full cone factors
# into a constant times the spherical function of the smaller cone.

# %%
data = np.zeros((3, 3))
data[:2, :2] = [[2.0, 0.4], [0.4, 0.7]]
x = AlgebraElement(alg, data)
nu2 = np.array([1.0 + 0.8j, 0.3])
rep = verify_restriction_identity(x, 2, nu2, n=200_000, seed=3)
print("lhs      ", rep.lhs, "+/-", rep.lhs_stderr)
print("rhs      ", rep.rhs)
print("gamma    ", rep.gamma, "=", gamma_quotient(nu2, 3, 2, 1))
print("passed   ", rep.passed)
