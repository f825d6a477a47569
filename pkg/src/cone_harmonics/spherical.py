"""Spherical functions ``Phi_nu(x) = int_K Delta_nu(k x) dk``.

Two evaluators are provided. :func:`spherical_mc` averages the power function
over Haar samples of ``K`` and works for every rank and complex weight.
For rank 2 the ``K``-average reduces to a one-dimensional integral: with
eigenvalues ``a = e^(sigma + delta/2)``, ``b = e^(sigma - delta/2)``,

    Phi_nu(diag(a, b)) = e^(sigma (nu_1 + nu_2)) * psi_{nu_1 - nu_2}(delta),

where ``psi_z(delta) = E[(e^(delta/2) s + e^(-delta/2) (1 - s))^z]`` and
``s ~ Beta(d/2, d/2)`` is the law of ``|k_11|^2``. Substituting
``e^w = e^(delta/2) s + e^(-delta/2)(1 - s)`` and ``w = (delta/2) sin(phi)``
gives an integrand that is analytic on ``[-pi/2, pi/2]``; for ``d = 1`` the
result is the Legendre function ``P_z(cosh(delta/2))`` and for ``d = 2`` it is
``sinh((z+1) delta/2) / ((z+1) sinh(delta/2))``.
"""

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy import special as sp

from .cone import as_weight, haar_batch, log_power_function, pad_weight
from .errors import ConvergenceError, DomainError, PreconditionError, StructuralError
from .jordan import AlgebraElement, RANK_TOL, element_rank, in_cone
from .montecarlo import MCResult, mc_mean
from .special import RhoVectors, gamma_quotient

__all__ = [
    "MIN_SAMPLES",
    "re_nonnegative",
    "spherical_mc",
    "psi_rank2",
    "spherical_rank2",
    "spherical_quadrature_rank2",
    "spherical_exact",
    "RestrictionReport",
    "verify_restriction_identity",
    "pi_spherical_parameter",
    "WeylReport",
    "weyl_equivalence_check",
]

MIN_SAMPLES = 1000


def re_nonnegative(nu, tol=0.0):
    """``Re nu_1 >= ... >= Re nu_k >= 0``."""
    re = np.real(as_weight(nu))
    return bool(np.all(re >= -tol) and np.all(np.diff(re) <= tol))


def _reversal(algebra):
    r = algebra.rank
    rev = np.eye(r)[::-1].astype(algebra.dtype)
    if algebra.model == "real-symmetric" and np.linalg.det(rev) < 0:
        rev[0] = -rev[0]
    return rev


def _check_domain(x, nu):
    if in_cone(x):
        return
    w = np.linalg.eigvalsh(x.data)
    top = np.max(np.abs(w))
    if top == 0 or np.any(w < -RANK_TOL * top):
        raise DomainError("x is not in the closed cone")
    rank = element_rank(x)
    if not re_nonnegative(nu):
        raise DomainError("boundary evaluation needs Re nu_1 >= ... >= Re nu_r >= 0")
    if np.any(nu[rank:] != 0):
        raise DomainError(f"boundary point of rank {rank} needs nu_j = 0 for j > {rank}")


def spherical_mc(x, nu, n, rng=None, seed=None, shards=1, threads=1, antithetic=True):
    """Monte Carlo estimate of ``Phi_nu(x)`` with its standard error.

    Parameters
    ----------
    x : AlgebraElement
        Point of the cone, or of its closure when ``Re nu >= 0`` and the
        trailing coordinates of ``nu`` beyond ``rank(x)`` vanish.
    nu : array_like
        Complex weight; shorter weights are zero-padded to the rank.
    n : int
        Number of Haar draws (at least 1000). With ``antithetic`` each draw
        ``k`` is paired with ``k R`` (``R`` the reversal permutation), and the
        pair average counts as one sample.
    rng, seed, shards, threads
        Random stream control, see :func:`cone_harmonics.montecarlo.mc_mean`.

    Returns
    -------
    MCResult
    """
    if not isinstance(x, AlgebraElement):
        raise StructuralError("x must be an AlgebraElement")
    if n < MIN_SAMPLES:
        raise PreconditionError(f"need at least {MIN_SAMPLES} samples, got {n}")
    a = x.algebra
    nu = pad_weight(nu, a.rank)
    _check_domain(x, nu)
    diag = np.real(np.diagonal(x.data))
    if np.allclose(x.data, np.diag(diag), rtol=0, atol=0) and np.all(diag == diag[0]):
        # K fixes multiples of e: every summand is Delta_nu(s e) = s^(sum nu)
        return MCResult(complex(np.exp(np.sum(nu) * np.log(diag[0]))), 0.0, n)
    if a.rank == 1:
        return MCResult(complex(np.exp(nu[0] * np.log(diag[0]))), 0.0, n)
    xd = x.data
    rev = _reversal(a)

    def sampler(g, m):
        k = haar_batch(g, a, m)
        y = k @ xd @ np.conj(np.swapaxes(k, -1, -2))
        vals = np.exp(log_power_function(y, nu))
        if antithetic:
            kr = k @ rev
            y2 = kr @ xd @ np.conj(np.swapaxes(kr, -1, -2))
            vals = 0.5 * (vals + np.exp(log_power_function(y2, nu)))
        return vals

    return mc_mean(sampler, n, seed=seed, rng=rng, shards=shards, threads=threads)


# --- rank two -----------------------------------------------------------------

_GL_CACHE = {}


def _gauss_legendre(order):
    if order not in _GL_CACHE:
        _GL_CACHE[order] = np.polynomial.legendre.leggauss(order)
    return _GL_CACHE[order]


def _panel_rule(lo, hi, panels, order):
    t, w = _gauss_legendre(order)
    edges = np.linspace(lo, hi, panels + 1)
    half = np.diff(edges) / 2
    mid = (edges[:-1] + edges[1:]) / 2
    nodes = (mid[:, None] + half[:, None] * t).ravel()
    weights = (half[:, None] * w).ravel()
    return nodes, weights


def _log_beta(a, b):
    return sp.gammaln(a) + sp.gammaln(b) - sp.gammaln(a + b)


def _psi_log_weight(rho, phi, d):
    # log of everything except e^{(z+1) rho sin(phi)}; rho > 0
    x = np.sin(phi)
    one_p = 2 * np.cos(np.pi / 4 - phi / 2) ** 2
    one_m = 2 * np.sin(np.pi / 4 - phi / 2) ** 2
    log_h = (
        np.log(np.expm1(rho * one_p))
        - np.log(one_p)
        + np.log(-np.expm1(-rho * one_m))
        - np.log(one_m)
    )
    out = (d / 2.0 - 1.0) * log_h + np.log(rho) - _log_beta(d / 2.0, d / 2.0)
    if d != 1:
        out = out + (d - 1.0) * np.log(np.cos(phi)) + (1.0 - d) * np.log(2 * np.sinh(rho))
    return out, x


def psi_rank2(z, delta, d, panels=8, order=16):
    """``psi_z(delta)`` on broadcast arrays with a fixed composite Gauss rule."""
    z = np.asarray(z, dtype=complex)
    delta = np.abs(np.asarray(delta, dtype=float))
    z, delta = np.broadcast_arrays(z, delta)
    shape = z.shape
    z, delta = z.ravel(), delta.ravel()
    out = np.ones(z.shape, dtype=complex)
    live = delta > 1e-12
    if not np.any(live):
        return out.reshape(shape)
    phi, w = _panel_rule(-np.pi / 2, np.pi / 2, panels, order)
    rho = delta[live][:, None] / 2
    logw, sx = _psi_log_weight(rho, phi[None, :], d)
    expo = (z[live][:, None] + 1.0) * rho * sx + logw
    out[live] = np.sum(w * np.exp(expo), axis=-1)
    return out.reshape(shape)


def _psi_adaptive(z, delta, d, panels, tol, max_panels, order=16):
    prev = psi_rank2(z, delta, d, panels, order)
    p = panels
    while p < max_panels:
        p *= 2
        cur = psi_rank2(z, delta, d, p, order)
        if abs(cur - prev) <= tol * max(abs(cur), 1e-300):
            return complex(cur)
        prev = cur
    raise ConvergenceError(f"rank-2 angular quadrature did not converge within {max_panels} panels")


def _boundary_rank2(a, nu1, d, panels, tol, max_panels, order=16):
    # E[s^nu1], s = cos^2(theta), theta in [0, pi/2] with weight (cos sin)^{d-1}; panels graded toward pi/2
    def rule(p):
        edges = np.pi / 2 * (1 - 2.0 ** -np.arange(0, p + 1))
        edges = np.append(edges, np.pi / 2)
        t, w = _gauss_legendre(order)
        half = np.diff(edges) / 2
        mid = (edges[:-1] + edges[1:]) / 2
        th = (mid[:, None] + half[:, None] * t).ravel()
        wt = (half[:, None] * w).ravel()
        c, s = np.cos(th), np.sin(th)
        logv = nu1 * 2 * np.log(c) + (d - 1) * (np.log(c) + np.log(s))
        return 2 * np.exp(-_log_beta(d / 2.0, d / 2.0)) * np.sum(wt * np.exp(logv))

    prev = rule(panels)
    p = panels
    while p < max_panels:
        p *= 2
        cur = rule(p)
        if abs(cur - prev) <= tol * max(abs(cur), 1e-300):
            return complex(np.exp(nu1 * np.log(a)) * cur)
        prev = cur
    raise ConvergenceError("boundary angular quadrature did not converge")


def spherical_rank2(eigenvalues, nu, d, panels=8, order=16):
    """Vectorised ``Phi_nu(diag(a, b))`` for ``a, b > 0`` with a fixed rule.

    ``eigenvalues`` has shape ``(..., 2)`` and ``nu`` shape ``(..., 2)``;
    both broadcast.
    """
    t = np.asarray(eigenvalues, dtype=float)
    nu = np.asarray(nu, dtype=complex)
    s = np.log(t)
    sigma = (s[..., 0] + s[..., 1]) / 2
    delta = s[..., 0] - s[..., 1]
    zsum = nu[..., 0] + nu[..., 1]
    zdiff = nu[..., 0] - nu[..., 1]
    return np.exp(sigma * zsum) * psi_rank2(zdiff, delta, d, panels, order)


def spherical_quadrature_rank2(eigenvalues, nu, d, panels=8, tol=1e-10, max_panels=4096):
    """Deterministic ``Phi_nu(diag(a, b))`` for a rank-2 cone of degree ``d``.

    Panel counts double from ``panels`` until two successive estimates agree
    to ``tol`` (relative). Handles the boundary ``b = 0`` for weights
    ``(nu_1, 0)`` with ``Re nu_1 >= 0``.
    """
    a, b = sorted((float(v) for v in eigenvalues), reverse=True)
    nu = as_weight(nu, 2)
    if b < 0 or a <= 0:
        raise DomainError("eigenvalues must satisfy a >= b >= 0 with a > 0")
    if b == 0:
        if nu[1] != 0 or nu[0].real < 0:
            raise DomainError("boundary evaluation needs nu = (nu_1, 0) with Re nu_1 >= 0")
        return _boundary_rank2(a, nu[0], d, panels, tol, max_panels)
    sigma = (np.log(a) + np.log(b)) / 2
    delta = np.log(a) - np.log(b)
    psi = _psi_adaptive(nu[0] - nu[1], delta, d, panels, tol, max_panels)
    return complex(np.exp(sigma * (nu[0] + nu[1])) * psi)


def spherical_exact(y, nu, d=None):
    """Deterministic ``Phi_nu`` on a cone of rank 1 or 2 (point given as matrix or element)."""
    data = y.data if isinstance(y, AlgebraElement) else np.asarray(y)
    nu = as_weight(nu)
    if isinstance(y, AlgebraElement):
        d = y.algebra.degree
    lam = np.linalg.eigvalsh(data)[::-1]
    if lam.shape[0] == 1:
        if lam[0] <= 0:
            raise DomainError("rank-one point must be positive")
        return complex(np.exp(nu[0] * np.log(lam[0])))
    if lam.shape[0] == 2:
        lam = np.clip(lam, 0.0, None)
        if lam[1] <= RANK_TOL * lam[0]:
            lam[1] = 0.0
        return spherical_quadrature_rank2(lam, nu, d)
    raise StructuralError("deterministic evaluation is available for rank <= 2 only")


# --- restriction identity -------------------------------------------------------


@dataclass
class RestrictionReport:
    r: int
    d: int
    l: int
    nu: list
    lhs: complex
    lhs_stderr: float
    rhs: complex
    rhs_stderr: float
    gamma: complex
    abs_diff: float
    rel_diff: float
    tolerance: float
    passed: bool
    params: dict = field(default_factory=dict)


def verify_restriction_identity(x, l, nu, n=10**6, seed=0, rtol=0.01, shards=1, threads=1):
    """Check ``Phi_nu(x) = gamma^(l)_nu Phi^(l)_nu(x)`` for ``x`` in the face ``Omega^(l)``.

    The left side is a Monte Carlo average over ``K``; the right side is the
    spherical function of the rank-``l`` face, exact for ``l <= 2`` and
    Monte Carlo otherwise. PASS iff the discrepancy is at most
    ``max(3 * combined stderr, rtol * |lhs|)``.
    """
    a = x.algebra
    r, d = a.rank, a.degree
    if not 1 <= l < r:
        raise PreconditionError(f"need 1 <= l < r, got l={l}, r={r}")
    nu = as_weight(nu, l)
    if not re_nonnegative(nu):
        raise PreconditionError("the identity requires Re nu_1 >= ... >= Re nu_l >= 0")
    data = x.data
    block = data[:l, :l]
    if np.max(np.abs(data - np.pad(block, ((0, r - l), (0, r - l)))), initial=0.0) > 1e-12 * max(
        1.0, np.max(np.abs(data))
    ):
        raise PreconditionError("x must lie in V^(l) (zero outside the top-left block)")
    if np.any(np.linalg.eigvalsh(block) <= 0):
        raise PreconditionError("x must lie in the open face Omega^(l)")
    lhs = spherical_mc(x, nu, n, seed=seed, shards=shards, threads=threads)
    sub = a.subalgebra(l)
    y = AlgebraElement(sub, block)
    if l <= 2:
        rhs_val, rhs_se = spherical_exact(y, nu), 0.0
    else:
        res = spherical_mc(y, nu, n, seed=seed + 1, shards=shards, threads=threads)
        rhs_val, rhs_se = res.value, res.stderr
    g = gamma_quotient(nu, r, l, d)
    pred = g * rhs_val
    diff = abs(lhs.value - pred)
    comb = np.hypot(lhs.stderr, abs(g) * rhs_se)
    tol = max(3 * comb, rtol * abs(lhs.value))
    return RestrictionReport(
        r=r,
        d=d,
        l=l,
        nu=[complex(v) for v in nu],
        lhs=lhs.value,
        lhs_stderr=lhs.stderr,
        rhs=pred,
        rhs_stderr=abs(g) * rhs_se,
        gamma=g,
        abs_diff=diff,
        rel_diff=diff / abs(lhs.value) if lhs.value != 0 else np.inf,
        tolerance=tol,
        passed=bool(diff <= tol),
    )


def pi_spherical_parameter(nu, r, d, l):
    """Parameter ``i nu + eta_l + rho`` of the spherical function of ``pi_nu``."""
    nu = as_weight(nu, l)
    rho = RhoVectors(r, d, l)
    return 1j * pad_weight(nu, r) + rho.eta_l + rho.rho


@dataclass
class WeylReport:
    lam: list
    values: list
    stderrs: list
    max_diff: float
    tolerance: float
    passed: bool


def weyl_equivalence_check(x, lam, l, n=10**5, seed=0):
    """Compare ``Phi`` at the parameters of ``pi_lam`` and ``pi_{w lam}`` for all ``w`` in ``S_l``.

    All permutations share the random stream. PASS iff every value is within
    three combined standard errors of the identity permutation's value.
    """
    a = x.algebra
    r, d = a.rank, a.degree
    lam = np.asarray(lam, dtype=float)
    vals, ses = [], []
    for perm in itertools.permutations(range(l)):
        res = spherical_mc(x, pi_spherical_parameter(lam[list(perm)], r, d, l), n, seed=seed)
        vals.append(res.value)
        ses.append(res.stderr)
    diffs = [abs(v - vals[0]) for v in vals]
    tols = [3 * np.hypot(s, ses[0]) for s in ses]
    ok = all(df <= max(t, 1e-12) for df, t in zip(diffs, tols))
    return WeylReport(
        lam=lam.tolist(),
        values=vals,
        stderrs=ses,
        max_diff=float(max(diffs)),
        tolerance=float(max(tols)),
        passed=bool(ok),
    )
