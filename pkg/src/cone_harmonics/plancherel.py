"""Spherical Fourier analysis on the face ``Omega^(l)`` and the Plancherel identity.

For a ``K^(l)``-invariant ``f`` on ``Omega^(l)``:

* ``f^(nu) = int f(y) Phi^(l)_(-nu + rho^(l))(y) d*y`` (spherical transform);
* ``f~(lam) = gamma^(l)_(-(i lam + rho'_l)) f^(i lam - rd/4)``;
* inversion ``f(x) = c0 int f~(lam) Phi^(l)_(i lam + rho^(l) - rd/4)(x)
  gamma^(-1) |c(lam)|^-2 dlam``;
* Plancherel ``int |f|^2 dmu_l = int |f~(lam)|^2 dp(lam)`` with
  ``dp = c0 |gamma c|^-2 dlam``.

Deterministic evaluation is available for faces of rank ``l <= 2``. The
inversion constant ``c0`` depends only on ``(l, d)``; it is calibrated once on
a Gaussian in log-eigenvalues.
"""

from dataclasses import dataclass, field, replace
from functools import lru_cache
import math

import numpy as np

from .boundary import INVARIANT_RULE, QuadratureSpec, RadialFunction, boundary_integral, radial_rule
from .cone import as_weight, log_power_function, pad_weight
from .errors import ConvergenceError, PreconditionError, StructuralError
from .jordan import AlgebraElement
from .special import (
    RhoVectors,
    gamma_quotient,
    inverse_c_squared,
    log_gamma_quotient,
    plancherel_density,
)
from .spherical import psi_rank2

__all__ = [
    "LambdaGrid",
    "lambda_grid",
    "spherical_ft",
    "tilde_transform",
    "intertwine_direct",
    "intertwine_closed_form",
    "InversionResult",
    "invert",
    "calibrate_c0",
    "plancherel_constant",
    "analytic_c0",
    "PlancherelReport",
    "plancherel_check",
    "weyl_order",
    "adaptive_grid",
]

FT_MAX_RANK = 2
LAMBDA_TAIL = 1e-4
# Gauss panels per unit of omega * log-width, by orbit rank
OSCILLATION_SAFETY = {1: 3.0, 2: 1.5}
# largest radial tensor rule the transform will build (about 50 MB of nodes)
MAX_RULE_NODES = 3_000_000


# --- lambda grids ---------------------------------------------------------------


@dataclass
class LambdaGrid:
    """Nodes ``(M, l)`` and weights of a quadrature on ``R^l``.

    ``weyl_order`` is the factor by which the weights were multiplied when
    only a fundamental chamber of ``W_l = S_l`` is sampled.
    """

    nodes: np.ndarray
    weights: np.ndarray
    cutoff: float
    weyl_order: int = 1

    @property
    def l(self):
        return self.nodes.shape[-1]


def _panels(lo, hi, panels, order):
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(lo, hi, panels + 1)
    half = np.diff(edges) / 2
    mid = (edges[:-1] + edges[1:]) / 2
    return (mid[:, None] + half[:, None] * x).ravel(), (half[:, None] * w).ravel()


def weyl_order(l):
    return math.factorial(l)


def lambda_grid(l, cutoff=12.0, panels=24, order=16, chamber=True):
    """Gauss panels on ``[-cutoff, cutoff]^l`` (``l <= 2``).

    For ``l = 2`` the rule is laid out in rotated coordinates
    ``Lambda = lam_1 + lam_2`` and ``kappa = lam_1 - lam_2`` (Jacobian 1/2),
    and with ``chamber`` only ``kappa > 0`` is kept with weights doubled.
    Panel edges sit at zero and the two axes use different Gauss orders, so
    no node hits the walls ``lam_j = 0`` or ``lam_1 = lam_2``.
    """
    if panels % 2:
        panels += 1
    if l == 1:
        x, w = _panels(-cutoff, cutoff, panels, order)
        return LambdaGrid(x[:, None], w, cutoff, 1)
    if l == 2:
        big, wb = _panels(-2 * cutoff, 2 * cutoff, panels, order)
        # a different order on the kappa axis keeps nodes off lam_1 = 0 and lam_2 = 0
        if chamber:
            kap, wk = _panels(0.0, 2 * cutoff, panels // 2, order - 1)
            wk = wk * 2
        else:
            kap, wk = _panels(-2 * cutoff, 2 * cutoff, panels, order - 1)
        B, Kp = np.meshgrid(big, kap, indexing="ij")
        W = np.outer(wb, wk) / 2.0
        nodes = np.stack([(B + Kp) / 2, (B - Kp) / 2], axis=-1).reshape(-1, 2)
        return LambdaGrid(nodes, W.ravel(), cutoff, 2 if chamber else 1)
    raise PreconditionError(f"lambda grids are implemented for l <= {FT_MAX_RANK}")


# --- spherical transform ------------------------------------------------------


def _as_batch(nu, l):
    nu = np.asarray(nu, dtype=complex)
    if nu.ndim == 0:
        nu = nu[None]
    single = nu.ndim == 1
    nu = np.atleast_2d(nu)
    if nu.shape[-1] != l:
        raise StructuralError(f"parameter has length {nu.shape[-1]}, expected {l}")
    return nu, single


def _profile(f, mu_re):
    # |f(t)| times a bound max_w t^(w Re mu) for |Phi_mu(t)|, over the batch
    rows = np.unique(np.round(mu_re, 12), axis=0)
    ext = [rows.min(axis=0), rows.max(axis=0)] if rows.shape[0] > 2 else list(rows)

    def prof(t):
        logt = np.log(t)
        best = np.full(t.shape[0], -np.inf)
        for row in ext:
            for perm in _perms(len(row)):
                best = np.maximum(best, logt @ row[list(perm)])
        return np.abs(f.eigen(t)) * np.exp(best)

    return prof


def _perms(l):
    import itertools

    return list(itertools.permutations(range(l)))


def _psi_panels(z, gmax):
    # enough angular panels for the oscillation e^{(z+1) rho sin(phi)}, rho <= gmax/2
    phase = float(np.max(np.abs(z) + 1.0)) * gmax / 2.0
    return int(np.clip(np.ceil(phase / 4.0), 8, 1024))


def spherical_ft(f, nu, d, spec=None):
    """Spherical transform ``f^(nu) = int f Phi^(l)_(-nu + rho^(l)) d*y``.

    Parameters
    ----------
    f : RadialFunction
        Function on ``Omega^(l)``, ``l <= 2``.
    nu : array_like
        One parameter of length ``l`` or a batch ``(M, l)``.
    d : int
        Degree of the algebra.
    spec : QuadratureSpec, optional
        Radial rule; ``n_k`` is irrelevant here.

    Returns
    -------
    complex or ndarray
        At ``l = 1`` this is the Mellin transform ``int f(t) t^(-nu) dt/t``.
    """
    if not isinstance(f, RadialFunction):
        raise StructuralError("spherical_ft expects a RadialFunction")
    l = f.l
    if l > FT_MAX_RANK:
        raise PreconditionError(f"spherical transform is implemented for l <= {FT_MAX_RANK}")
    spec = spec or QuadratureSpec()
    panels, order = INVARIANT_RULE[l]
    spec = replace(spec, panels=spec.panels or panels, order=spec.order or order)
    nu, single = _as_batch(nu, l)
    rho_sup = RhoVectors(max(l, 1), d, l).rho_sup_l.real
    mu = -nu + rho_sup
    prof = _profile(f, mu.real)
    rule = radial_rule(l, d, 0.0, spec, prof)
    # resolve the oscillation e^{i omega s} of Phi in log-coordinates
    panels, order = spec.rule_for(l)
    omega = float(np.max(np.sum(np.abs(mu.imag), axis=-1)))
    width = max(rule.log_range[1] - rule.log_range[0], rule.gap_max or 0.0)
    need = int(np.ceil(OSCILLATION_SAFETY[l] * omega * width / order))
    if need > panels:
        if (need * order) ** l > MAX_RULE_NODES:
            raise ConvergenceError(
                f"resolving oscillation {omega:.3g} over log-width {width:.3g} needs more than "
                f"{MAX_RULE_NODES} radial nodes; the integrand decays too slowly"
            )
        rule = radial_rule(
            l,
            d,
            0.0,
            replace(spec, panels=need, log_range=rule.log_range, gap_max=rule.gap_max),
            prof,
        )
    if rule.tail > 1e-3:
        raise ConvergenceError(f"radial tail {rule.tail:.2e} too large for the transform")
    fw = f.eigen(rule.t) * rule.weights
    if l == 1:
        logt = np.log(rule.t[:, 0])
        out = np.exp(np.outer(mu[:, 0], logt)) @ fw
    else:
        top, _ = rule.top
        gap, _ = rule.gaps
        F = fw.reshape(top.size, gap.size)
        zsum = mu[:, 0] + mu[:, 1]
        zdiff = mu[:, 0] - mu[:, 1]
        usum, isum = np.unique(np.round(zsum, 12), return_inverse=True)
        udiff, idiff = np.unique(np.round(zdiff, 12), return_inverse=True)
        # S[a, j] = sum_i F_ij e^{u_i zsum_a}
        S = np.exp(np.outer(usum, top)) @ F
        panels = _psi_panels(udiff, float(gap.max()))
        psi = psi_rank2(udiff[:, None], gap[None, :], d, panels=panels)
        # Phi = e^{sigma zsum} psi(gap), sigma = u - gap/2
        SS = S * np.exp(-np.outer(usum, gap) / 2.0)
        out = np.empty(mu.shape[0], dtype=complex)
        step = max(1, (1 << 22) // max(gap.size, 1))
        for start in range(0, mu.shape[0], step):
            sl = slice(start, start + step)
            out[sl] = np.sum(psi[idiff[sl]] * SS[isum[sl]], axis=-1)
    return complex(out[0]) if single else out


def tilde_transform(f, lam, r, d, spec=None, route="shift"):
    """``f~(lam) = gamma^(l)_(-(i lam + rho'_l)) f^(i lam - rd/4)``.

    ``route="weighted"`` evaluates the transform of ``f Delta^(rd/4)`` at
    ``i lam`` instead of shifting the argument; both agree identically.
    """
    l = f.l
    lam = np.asarray(lam, dtype=float)
    single = lam.ndim <= 1
    lam2 = np.atleast_2d(lam.reshape(-1, l) if lam.ndim <= 1 else lam)
    rho = RhoVectors(r, d, l)
    nup = -(1j * lam2 + rho.rho_l_prime.real)
    gam = np.exp(log_gamma_quotient(nup, r, l, d))
    if route == "shift":
        hat = spherical_ft(f, 1j * lam2 - r * d / 4.0, d, spec)
    elif route == "weighted":
        g = RadialFunction(l, lambda t: f.eigen(t) * np.prod(t, axis=-1) ** (r * d / 4.0))
        hat = spherical_ft(g, 1j * lam2, d, spec)
    else:
        raise PreconditionError(f"unknown route {route!r}")
    out = gam * np.atleast_1d(hat)
    return complex(out[0]) if single else out


# --- intertwiners ---------------------------------------------------------------


def _nu_prime(nu, r, d, l):
    return -(1j * as_weight(nu, l) + RhoVectors(r, d, l).rho_l_prime.real)


def intertwine_closed_form(f, g, nu, spec=None):
    """``T_nu f(g) = gamma^(l)_nu' f^(i nu - rd/4) Delta_nu'(g* e)``, ``nu' = -(i nu + rho'_l)``.

    Valid for ``K``-invariant ``f`` at every ``nu`` off the Gamma poles; this
    is the analytic continuation of :func:`intertwine_direct`.
    """
    a = g.algebra
    r, d, l = a.rank, a.degree, f.l
    nu = as_weight(nu, l)
    nup = _nu_prime(nu, r, d, l)
    gam = gamma_quotient(nup, r, l, d)
    hat = spherical_ft(f, 1j * nu - r * d / 4.0, d, spec)
    m = g.matrix
    char = np.exp(log_power_function(m.conj().T @ m, pad_weight(nup, r)))
    return complex(gam * hat * char)


def intertwine_direct(f, g, nu, l, spec=None):
    """``T_nu f(g) = int f(x) Delta_nu'(g* x) dmu_l(x)`` by boundary integration.

    Requires ``Re nu'_1 >= ... >= Re nu'_l >= 0`` for ``nu' = -(i nu + rho'_l)``;
    outside that region the integral diverges and :func:`intertwine_closed_form`
    must be used.

    Returns
    -------
    BoundaryResult
    """
    a = g.algebra
    r, d = a.rank, a.degree
    nup = _nu_prime(nu, r, d, l)
    re = nup.real
    if np.any(re < 0) or np.any(np.diff(re) > 0):
        raise PreconditionError(
            "direct intertwining integral diverges: need Re nu'_1 >= ... >= Re nu'_l >= 0; "
            "use intertwine_closed_form"
        )
    full = pad_weight(nup, r)
    m = g.matrix
    mh = m.conj().T

    def integrand(y):
        return np.asarray(f(y)) * np.exp(log_power_function(mh @ y @ m, full, floor=1e-300))

    return boundary_integral(integrand, a, l, spec)


# --- inversion ------------------------------------------------------------------


@dataclass
class InversionResult:
    value: complex
    tail: float
    cutoff: float


def _phi_face(x_eig, param, d):
    """``Phi^(l)_param`` at eigenvalues ``x_eig`` (length ``l``) for a batch of params."""
    l = x_eig.shape[0]
    if l == 1:
        return np.exp(param[:, 0] * np.log(x_eig[0]))
    a, b = x_eig
    sigma = (np.log(a) + np.log(b)) / 2
    delta = np.log(a) - np.log(b)
    zsum = param[:, 0] + param[:, 1]
    zdiff = param[:, 0] - param[:, 1]
    udiff, idiff = np.unique(np.round(zdiff, 12), return_inverse=True)
    psi = psi_rank2(udiff, delta, d, panels=_psi_panels(udiff, abs(delta)))
    return np.exp(sigma * zsum) * psi[idiff]


def _face_eigenvalues(x, l):
    if isinstance(x, AlgebraElement):
        w = np.linalg.eigvalsh(x.data)[::-1][:l]
    else:
        w = np.sort(np.atleast_1d(np.asarray(x, dtype=float)))[::-1]
    if w.shape[0] != l or np.any(w <= 0):
        raise PreconditionError("x must be a point of the open face Omega^(l)")
    return w


def invert(tilde_values, grid, x, r, d, c0=None):
    """Inverse transform ``f(x)`` from values of ``f~`` on ``grid``.

    ``x`` is an element of ``Omega^(l)`` (or its ``l`` eigenvalues). When the
    grid covers a single Weyl chamber its weights already carry ``|W_l|``;
    the integrand is ``W_l``-invariant, so this is the symmetrised rule.
    """
    l = grid.l
    if c0 is None:
        c0 = plancherel_constant(l, d)
    lam = grid.nodes
    tv = np.asarray(tilde_values, dtype=complex)
    if tv.shape != (lam.shape[0],):
        raise StructuralError("tilde_values must match the grid nodes")
    if not np.any(tv):
        return InversionResult(0j, 0.0, grid.cutoff)
    xe = _face_eigenvalues(x, l)
    rho = RhoVectors(r, d, l)
    nup = -(1j * lam + rho.rho_l_prime.real)
    inv_gamma = np.exp(-log_gamma_quotient(nup, r, l, d))
    phi = _phi_face(xe, 1j * lam + rho.rho_sup_l.real - r * d / 4.0, d)
    dens = inverse_c_squared(lam, l, d)
    terms = grid.weights * tv * phi * inv_gamma * dens
    value = c0 * np.sum(terms)
    edge = np.max(np.abs(lam), axis=-1) > 0.9 * (grid.cutoff * (2 if l == 2 else 1))
    tail = float(np.sum(np.abs(terms[edge])) / max(np.sum(np.abs(terms)), 1e-300))
    return InversionResult(complex(value), tail, grid.cutoff)


def _hat_on_grid(f, grid, r, d, spec):
    """``f^(i lam - rd/4)`` on the grid nodes."""
    return spherical_ft(f, 1j * grid.nodes - r * d / 4.0, d, spec)


def adaptive_grid(f, r, d, spec=None, cutoff=8.0, panels=16, order=16, max_cutoff=64.0):
    """Enlarge the lambda cutoff until the ``|c|^-2``-weighted tail is below ``LAMBDA_TAIL``."""
    l = f.l
    while True:
        grid = lambda_grid(l, cutoff, panels, order)
        hat = _hat_on_grid(f, grid, r, d, spec)
        mag = np.abs(hat) * inverse_c_squared(grid.nodes, l, d) * grid.weights
        outer = np.max(np.abs(grid.nodes), axis=-1) > 0.75 * cutoff * (2 if l == 2 else 1)
        tail = float(np.sum(mag[outer]) / max(np.sum(mag), 1e-300))
        if tail <= LAMBDA_TAIL:
            return grid, hat, tail
        if cutoff >= max_cutoff:
            raise ConvergenceError(f"lambda integrand has not decayed by cutoff {cutoff}")
        cutoff *= 2
        panels *= 2


def _gaussian(l, width=1.0):
    return RadialFunction(l, lambda t: np.exp(-np.sum(np.log(t) ** 2, axis=-1) / (2 * width**2)), "gauss")


def calibrate_c0(l, d, spec=None):
    """Fix ``c0`` so that inversion reproduces a log-Gaussian at ``e_l``.

    The constant does not depend on the ambient rank; ``r = l + 1`` is used.
    """
    f = _gaussian(l)
    r = l + 1
    grid, hat, _ = adaptive_grid(f, r, d, spec)
    # with f~ / gamma = f^(i lam - rd/4), inversion at e reads c0 * int f^ |c|^-2
    integral = np.sum(grid.weights * hat * inverse_c_squared(grid.nodes, l, d))
    return float(1.0 / integral.real)


@lru_cache(maxsize=None)
def plancherel_constant(l, d):
    """Calibrated inversion constant ``c0`` for the rank-``l`` face of degree ``d``."""
    return calibrate_c0(l, d)


def analytic_c0(l, d):
    """Closed forms of ``c0`` where known: ``1/(2 pi)`` at ``l = 1`` and ``sqrt(2)/(16 pi^3)`` at ``(2, 1)``."""
    if l == 1:
        return 1.0 / (2 * math.pi)
    if (l, d) == (2, 1):
        return math.sqrt(2.0) / (16 * math.pi**3)
    return None


# --- Plancherel identity --------------------------------------------------------


@dataclass
class PlancherelReport:
    r: int
    d: int
    l: int
    name: str
    lhs: float
    rhs: float
    rel_diff: float
    tolerance: float
    passed: bool
    lambda_tail: float = 0.0
    params: dict = field(default_factory=dict)


def plancherel_check(f, r, d, spec=None, rtol=None):
    """``int |f|^2 dmu_l`` against ``int |f~(lam)|^2 dp(lam)`` for ``K``-invariant ``f``.

    The default tolerance is 1% at ``l = 1`` and 5% at ``l = 2``.
    """
    l = f.l
    if not 1 <= l < r:
        raise PreconditionError(f"need 1 <= l < r, got l={l}, r={r}")
    if rtol is None:
        rtol = 0.01 if l == 1 else 0.05
    from .jordan import algebra as make_algebra

    alg = make_algebra("sym" if d == 1 else "herm", r)
    sq = RadialFunction(l, lambda t: np.abs(f.eigen(t)) ** 2, f"|{f.name}|^2")
    lhs = boundary_integral(sq, alg, l, spec).value.real
    grid, hat, tail = adaptive_grid(f, r, d, spec)
    rho = RhoVectors(r, d, l)
    nup = -(1j * grid.nodes + rho.rho_l_prime.real)
    tilde = np.exp(log_gamma_quotient(nup, r, l, d)) * hat
    dens = plancherel_density(grid.nodes, r, l, d)
    rhs = float(np.sum(grid.weights * np.abs(tilde) ** 2 * dens))
    rel = abs(lhs - rhs) / abs(lhs) if lhs else abs(rhs)
    return PlancherelReport(r, d, l, f.name, lhs, rhs, rel, rtol, bool(rel <= rtol), tail)
