"""Gamma-type special functions of symmetric cones.

Conventions: a weight ``nu`` of a rank-``l`` cone is a complex vector of
length ``l``; adding a scalar ``alpha`` to it shifts every coordinate. The
Gindikin Gamma function of the rank-``l`` cone of degree ``d`` is

    Gamma_l(nu) = (2 pi)^(l (l - 1) d / 4) * prod_j Gamma(nu_j - (j - 1) d / 2),

normalised against Lebesgue measure built from the trace form.
"""

from dataclasses import dataclass

import numpy as np
from scipy import special as sp

from .errors import PoleError, PreconditionError, StructuralError

__all__ = [
    "POLE_TOL",
    "log_gamma",
    "log_gindikin_gamma",
    "gindikin_gamma",
    "log_gamma_quotient",
    "gamma_quotient",
    "harish_chandra_c",
    "inverse_c_squared",
    "plancherel_density",
    "RhoVectors",
]

POLE_TOL = 1e-6


def _nearest_pole(z):
    z = np.asarray(z, dtype=complex)
    n = np.round(z.real)
    hit = (n <= 0) & (np.abs(z - n) <= POLE_TOL)
    return hit, n


def log_gamma(z):
    """Principal branch of ``log Gamma(z)`` for complex ``z``.

    Raises :class:`PoleError` within ``POLE_TOL`` of a nonpositive integer.
    """
    z_arr = np.asarray(z, dtype=complex)
    hit, n = _nearest_pole(z_arr)
    if np.any(hit):
        loc = int(np.atleast_1d(n)[np.atleast_1d(hit)][0])
        raise PoleError(f"Gamma has a pole at {loc}", location=loc)
    out = sp.loggamma(z_arr)
    return complex(out) if out.ndim == 0 else out


def _check_weight(nu, l):
    nu = np.asarray(nu, dtype=complex)
    if nu.ndim == 0:
        nu = nu[None]
    if l is None:
        l = nu.shape[-1]
    if nu.shape[-1] != l:
        raise StructuralError(f"weight has length {nu.shape[-1]}, expected {l}")
    return nu, l


def log_gindikin_gamma(nu, d, l=None):
    """``log Gamma_{Omega^(l)}(nu)``; ``nu`` may carry leading batch axes."""
    nu, l = _check_weight(nu, l)
    shifts = np.arange(l) * d / 2.0
    args = nu - shifts
    hit, n = _nearest_pole(args)
    if np.any(hit):
        idx = np.argwhere(hit)[0]
        j = int(idx[-1]) + 1
        raise PoleError(
            f"Gindikin Gamma factor j={j} hits the pole {int(n[tuple(idx)])}",
            location=int(n[tuple(idx)]),
            factor=j,
        )
    return l * (l - 1) * d / 4.0 * np.log(2 * np.pi) + np.sum(sp.loggamma(args), axis=-1)


def gindikin_gamma(nu, d, l=None):
    """Gindikin Gamma function of the rank-``l`` cone of degree ``d``."""
    out = np.exp(log_gindikin_gamma(nu, d, l))
    return complex(out) if np.ndim(out) == 0 else out


def log_gamma_quotient(nu, r, l, d):
    """Logarithm of the restriction constant ``gamma^(l)_nu``."""
    nu, l = _check_weight(nu, l)
    ones = np.ones(l)
    return (
        log_gindikin_gamma(ones * (r * d / 2.0), d, l)
        + log_gindikin_gamma(nu + l * d / 2.0, d, l)
        - log_gindikin_gamma(ones * (l * d / 2.0), d, l)
        - log_gindikin_gamma(nu + r * d / 2.0, d, l)
    )


def gamma_quotient(nu, r, l, d):
    """``gamma^(l)_nu = G(rd/2) G(nu + ld/2) / (G(ld/2) G(nu + rd/2))``, ``G = Gamma_{Omega^(l)}``.

    This is the constant relating the spherical function of the rank-``r``
    cone restricted to the rank-``l`` face with the face's own spherical
    function.
    """
    if not 1 <= l <= r:
        raise PreconditionError(f"need 1 <= l <= r, got l={l}, r={r}")
    out = np.exp(log_gamma_quotient(nu, r, l, d))
    return complex(out) if np.ndim(out) == 0 else out


def _hc_pairs(l, d):
    # positive roots (delta_k - delta_j)/2, j < k, with <rho, alpha_0> = (k - j) d / 2
    return [(j, k, (k - j) * d / 2.0) for j in range(l) for k in range(j + 1, l)]


def harish_chandra_c(lam, l, d):
    """Gindikin-Karpelevich c-function of the rank-``l`` cone.

    ``c(lam) = prod_{j<k} Gamma(i mu) / Gamma(i mu + d/2) * Gamma(m + d/2) / Gamma(m)``
    with ``mu = lam_k - lam_j`` and ``m = (k - j) d / 2``, normalised so that
    ``c(-i rho) = 1``. For ``l = 1`` the product is empty and ``c = 1``.
    """
    lam, l = _check_weight(lam, l)
    out = np.ones(lam.shape[:-1], dtype=complex)
    for j, k, m in _hc_pairs(l, d):
        z = 1j * (lam[..., k] - lam[..., j])
        hit, _ = _nearest_pole(z)
        if np.any(hit):
            raise PoleError(
                f"c-function pole: lambda_{j + 1} and lambda_{k + 1} coincide",
                location=0,
                factor=j + 1,
            )
        out = out * np.exp(
            sp.loggamma(z) - sp.loggamma(z + d / 2.0) + sp.loggamma(m + d / 2.0) - sp.loggamma(m)
        )
    return complex(out) if out.ndim == 0 else out


def _abs2_gamma(z):
    return np.exp(2 * np.real(sp.loggamma(z)))


def _abs2_rgamma(z):
    # |1/Gamma(z)|^2, entire; rgamma near poles, logs elsewhere to avoid underflow
    z = np.asarray(z, dtype=complex)
    near = np.abs(z - np.round(z.real)) < 1e-2
    out = np.empty(z.shape)
    out[near] = np.abs(sp.rgamma(z[near])) ** 2
    out[~near] = np.exp(-2 * np.real(sp.loggamma(z[~near])))
    return out


def inverse_c_squared(lam, l, d):
    """``1 / |c(lam)|^2`` for real ``lam``, evaluated without passing through poles."""
    lam = np.asarray(lam, dtype=float)
    if lam.ndim == 0:
        lam = lam[None]
    out = np.ones(lam.shape[:-1])
    for j, k, m in _hc_pairs(l, d):
        z = 1j * (lam[..., k] - lam[..., j])
        norm = np.exp(2 * (sp.gammaln(m) - sp.gammaln(m + d / 2.0)))
        out = out * _abs2_gamma(z + d / 2.0) * _abs2_rgamma(z) * norm
    return out


def plancherel_density(lam, r, l, d, c0=None):
    """Density ``c0 / |gamma^(l)_{-(i lam + rho'_l)} c(lam)|^2`` of the Plancherel measure.

    ``lam`` is real with shape ``(..., l)``. ``c0`` defaults to the calibrated
    inversion constant of the rank-``l`` cone (see
    :func:`cone_harmonics.plancherel.plancherel_constant`).
    """
    lam = np.asarray(lam, dtype=float)
    if lam.ndim == 0:
        lam = lam[None]
    if lam.shape[-1] != l:
        raise StructuralError(f"lambda has length {lam.shape[-1]}, expected {l}")
    if c0 is None:
        from .plancherel import plancherel_constant

        c0 = plancherel_constant(l, d)
    rho = RhoVectors(r, d, l)
    nu_p = -(1j * lam + rho.rho_l_prime.real)
    shifts = np.arange(l) * d / 2.0
    ones = np.ones(l)
    const = np.exp(
        2
        * np.real(
            log_gindikin_gamma(ones * (l * d / 2.0), d, l)
            - log_gindikin_gamma(ones * (r * d / 2.0), d, l)
        )
    )
    # the (2 pi) prefactors of the two nu-dependent factors cancel
    inv_gamma2 = np.prod(
        _abs2_gamma(nu_p + r * d / 2.0 - shifts) * _abs2_rgamma(nu_p + l * d / 2.0 - shifts),
        axis=-1,
    )
    return c0 * const * inv_gamma2 * inverse_c_squared(lam, l, d)


@dataclass(frozen=True)
class RhoVectors:
    """Half-sums of roots attached to the orbit ``d_l Omega`` of a rank-``r`` cone.

    All members use the ``d/4`` normalisation:

    * ``rho[j]         = d/4 (2j - r - 1)``       (length ``r``)
    * ``rho_l[j]       = d/4 (r + 1 - 2j)``       (length ``l``)
    * ``rho_l_prime[j] = d/4 (r + l + 1 - 2j)``   (``rho_l + l d / 4``)
    * ``rho_sup_l[j]   = d/4 (2j - l - 1)``       (``rho`` of the rank-``l`` cone)
    * ``eta_l[j]       = d/4 (2j - l - r - 1)`` for ``j > l``, zero otherwise
    """

    r: int
    d: int
    l: int

    def __post_init__(self):
        if not 1 <= self.l <= self.r:
            raise PreconditionError(f"need 1 <= l <= r, got l={self.l}, r={self.r}")

    def _j(self, n):
        return np.arange(1, n + 1, dtype=float)

    @property
    def rho(self):
        j = self._j(self.r)
        return (self.d / 4.0 * (2 * j - self.r - 1)).astype(complex)

    @property
    def rho_l(self):
        j = self._j(self.l)
        return (self.d / 4.0 * (self.r + 1 - 2 * j)).astype(complex)

    @property
    def rho_l_prime(self):
        return self.rho_l + self.l * self.d / 4.0

    @property
    def rho_sup_l(self):
        j = self._j(self.l)
        return (self.d / 4.0 * (2 * j - self.l - 1)).astype(complex)

    @property
    def eta_l(self):
        j = self._j(self.r)
        out = self.d / 4.0 * (2 * j - self.l - self.r - 1)
        out[: self.l] = 0.0
        return out.astype(complex)

    def shift_identity_residual(self):
        """``rho'_l + rho^(l) - rd/2 + rd/4``, identically zero."""
        rd = self.r * self.d
        return self.rho_l_prime + self.rho_sup_l - rd / 2.0 + rd / 4.0
