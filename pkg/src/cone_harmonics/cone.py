"""Geometry of the symmetric cone: minors, power functions, the group G and K.

An element ``g`` of ``G = GL_0(Omega)`` is represented by an invertible matrix
``a`` acting on the algebra by ``x -> a x a*``. Its trace-form adjoint is the
action of ``a*`` and ``Theta(g) = g^{-*}`` is the action of ``(a*)^{-1}``.
The group ``NA`` of the Iwasawa decomposition is realised by lower triangular
matrices with positive diagonal, which multiply leading principal minors.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .errors import DomainError, StructuralError
from .jordan import COMPLEX, REAL, AlgebraDescriptor, AlgebraElement

__all__ = [
    "GroupElement",
    "as_weight",
    "pad_weight",
    "identity_element",
    "act",
    "adjoint",
    "inverse_adjoint",
    "group_character",
    "principal_minor",
    "principal_minors",
    "power_function",
    "log_power_function",
    "iwasawa_character",
    "haar_sample",
    "haar_batch",
    "haar_dimension",
    "haar_from_uniform",
    "random_triangular",
    "random_group_element",
]

SINGULAR_TOL = 1e-12


def as_weight(nu, length=None):
    """Coerce a weight ``(nu_1, ..., nu_k)`` to a 1-d complex array."""
    w = np.atleast_1d(np.asarray(nu, dtype=complex))
    if w.ndim != 1:
        raise StructuralError(f"weight must be one-dimensional, got shape {w.shape}")
    if length is not None and w.shape[0] != length:
        raise StructuralError(f"weight has length {w.shape[0]}, expected {length}")
    return w


def pad_weight(nu, r):
    """Zero-pad a weight of length ``l <= r`` to length ``r``."""
    w = as_weight(nu)
    if w.shape[0] > r:
        raise StructuralError(f"weight of length {w.shape[0]} exceeds rank {r}")
    return np.concatenate([w, np.zeros(r - w.shape[0], dtype=complex)])


@dataclass(frozen=True, eq=False)
class GroupElement:
    """``g in G`` acting on the algebra by ``x -> a x a*``."""

    algebra: AlgebraDescriptor
    matrix: np.ndarray

    def __post_init__(self):
        a = np.array(self.matrix, dtype=self.algebra.dtype)
        r = self.algebra.rank
        if a.shape != (r, r):
            raise StructuralError(f"expected a {r}x{r} matrix, got {a.shape}")
        if abs(np.linalg.det(a)) <= SINGULAR_TOL:
            raise DomainError("singular matrix does not define a group element")
        a.setflags(write=False)
        object.__setattr__(self, "matrix", a)

    def __call__(self, x):
        return act(self, x)

    def __matmul__(self, other):
        if not isinstance(other, GroupElement) or other.algebra != self.algebra:
            raise StructuralError("can only compose group elements of the same algebra")
        return GroupElement(self.algebra, self.matrix @ other.matrix)

    @property
    def adjoint(self):
        return GroupElement(self.algebra, self.matrix.conj().T)

    @property
    def inverse(self):
        return GroupElement(self.algebra, np.linalg.inv(self.matrix))


def identity_element(algebra):
    return GroupElement(algebra, np.eye(algebra.rank))


def act(g, x):
    """``g . x = a x a*``."""
    if not isinstance(x, AlgebraElement) or x.algebra != g.algebra:
        raise StructuralError("group element and algebra element do not match")
    a = g.matrix
    return AlgebraElement(g.algebra, a @ x.data @ a.conj().T)


def adjoint(g):
    """Trace-form adjoint ``g*``."""
    return g.adjoint


def inverse_adjoint(g):
    """``Theta(g) = g^{-*}``."""
    return GroupElement(g.algebra, np.linalg.inv(g.matrix.conj().T))


def group_character(g):
    """``Delta(g) := Delta(g e) = |det a|^2``, computed as the determinant of ``g e``."""
    a = g.matrix
    return float(np.real(np.linalg.det(a @ a.conj().T)))


def principal_minors(x, upto=None):
    """Leading principal minors ``Delta_(1..upto)`` of a (batch of) matrices.

    Accepts an :class:`AlgebraElement` or an array of shape ``(..., r, r)`` and
    returns a real array of shape ``(..., upto)``.
    """
    data = x.data if isinstance(x, AlgebraElement) else np.asarray(x)
    r = data.shape[-1]
    upto = r if upto is None else upto
    out = np.empty(data.shape[:-2] + (upto,))
    out[..., 0] = np.real(data[..., 0, 0])
    for j in range(2, upto + 1):
        out[..., j - 1] = np.real(np.linalg.det(data[..., :j, :j]))
    return out


def principal_minor(x, j):
    """``Delta_(j)(x)``: determinant of the leading ``j x j`` block."""
    r = x.algebra.rank
    if not 1 <= j <= r:
        raise DomainError(f"minor index must lie in [1, {r}], got {j}", index=j)
    return float(principal_minors(x, j)[-1])


def _exponents(nu):
    # nu_j - nu_{j+1} with nu_{r+1} = 0
    return nu - np.concatenate([nu[1:], [0.0]])


def log_power_function(x, nu, floor=None):
    """Principal logarithm of ``Delta_nu`` on a (batch of) matrices.

    Only minors carrying a nonzero exponent are evaluated, which realises the
    continuous extension to boundary strata for weights with trailing zeros.
    With ``floor`` set, minors below it (round-off on a boundary stratum) are
    raised to ``floor`` instead of rejected.
    """
    data = x.data if isinstance(x, AlgebraElement) else np.asarray(x)
    r = data.shape[-1]
    nu = as_weight(nu)
    if nu.shape[0] != r:
        raise StructuralError(f"weight has length {nu.shape[0]}, rank is {r}")
    expo = _exponents(nu)
    needed = np.nonzero(expo != 0)[0]
    out = np.zeros(data.shape[:-2], dtype=complex)
    if needed.size == 0:
        return out
    minors = principal_minors(data, int(needed[-1]) + 1)
    for j in needed:
        m = minors[..., j]
        if floor is not None:
            m = np.maximum(m, floor)
        if np.any(~(m > 0)):
            raise DomainError(
                f"principal minor Delta_({j + 1}) is not positive", index=int(j + 1)
            )
        out = out + expo[j] * np.log(m)
    return out


def power_function(x, nu):
    """Generalised power ``Delta_nu(x) = prod_j Delta_(j)(x)^(nu_j - nu_{j+1})``."""
    val = np.exp(log_power_function(x, nu))
    return complex(val) if np.ndim(val) == 0 else val


def iwasawa_character(g, nu):
    """``e^{nu log a(g)}``, evaluated as ``Delta_nu(g e)``."""
    return power_function(act(g, g.algebra.identity), nu)


def haar_batch(rng, algebra, n):
    """``n`` Haar-distributed matrices of ``SO(r)`` (real model) or ``U(r)``."""
    r = algebra.rank
    z = rng.standard_normal((n, r, r))
    if algebra.model == COMPLEX:
        z = (z + 1j * rng.standard_normal((n, r, r))) / np.sqrt(2.0)
    return _qr_haar(z, algebra)


def _qr_haar(z, algebra):
    q, rr = np.linalg.qr(z)
    diag = np.diagonal(rr, axis1=-2, axis2=-1)
    q = q * (diag / np.abs(diag))[..., None, :]
    if algebra.model == REAL and algebra.rank > 1:
        neg = np.linalg.det(q) < 0
        q[neg, :, 0] = -q[neg, :, 0]
    return q


def haar_dimension(algebra):
    """Number of uniforms consumed per draw by :func:`haar_from_uniform`."""
    r = algebra.rank
    return r * r * (2 if algebra.model == COMPLEX else 1)


def haar_from_uniform(u, algebra):
    """Map points of ``[0, 1)^haar_dimension`` to ``K`` (Haar when ``u`` is uniform).

    Uses the Gaussian quantile transform followed by the same corrected QR as
    :func:`haar_batch`; smooth almost everywhere, which is what quasi-Monte
    Carlo needs.
    """
    r = algebra.rank
    z = ndtri(np.asarray(u, dtype=float))
    if algebra.model == COMPLEX:
        z = (z[:, : r * r] + 1j * z[:, r * r :]) / np.sqrt(2.0)
    return _qr_haar(z.reshape(-1, r, r), algebra)


def haar_sample(rng, algebra):
    """A single Haar-distributed element of ``K``."""
    return GroupElement(algebra, haar_batch(rng, algebra, 1)[0])


def random_triangular(rng, algebra, scale=1.0):
    """Element of ``NA``: unit lower triangular times a positive diagonal."""
    if scale <= 0:
        raise DomainError("scale must be positive")
    r = algebra.rank
    low = rng.standard_normal((r, r))
    if algebra.model == COMPLEX:
        low = low + 1j * rng.standard_normal((r, r))
    n = np.eye(r, dtype=algebra.dtype) + scale * np.tril(low, -1)
    a = np.exp(scale * rng.standard_normal(r))
    return GroupElement(algebra, n * a)


def random_group_element(rng, algebra, spread=0.5):
    """``k1 a k2`` with Haar ``k_i`` and log-singular values ``N(0, spread^2)``."""
    k1 = haar_batch(rng, algebra, 1)[0]
    k2 = haar_batch(rng, algebra, 1)[0]
    a = np.exp(spread * rng.standard_normal(algebra.rank))
    return GroupElement(algebra, (k1 * a) @ k2)
