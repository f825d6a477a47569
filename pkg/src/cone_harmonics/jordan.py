"""Simple Euclidean Jordan algebras in their matrix models.

Two models are supported: real symmetric matrices ``Sym(r, R)`` (degree 1)
and complex Hermitian matrices ``Herm(r, C)`` (degree 2). The Jordan product
is ``x o y = (xy + yx) / 2``, the trace form is ``<x, y> = Re tr(xy)`` and the
fixed Jordan frame consists of the diagonal matrix units ``c_j = E_jj``.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DomainError, StructuralError

__all__ = [
    "REAL",
    "COMPLEX",
    "AlgebraDescriptor",
    "AlgebraElement",
    "SpectralData",
    "algebra",
    "jordan_product",
    "quadratic_rep",
    "spectral_decomposition",
    "trace_det",
    "peirce_project",
    "peirce_components",
    "in_cone",
    "element_rank",
    "inner",
    "multiplication_operator",
]

REAL = "real-symmetric"
COMPLEX = "complex-hermitian"

_ALIASES = {
    "sym": REAL,
    "real": REAL,
    "real-symmetric": REAL,
    "herm": COMPLEX,
    "complex": COMPLEX,
    "hermitian": COMPLEX,
    "complex-hermitian": COMPLEX,
}

HERMITIAN_TOL = 1e-12
RANK_TOL = 1e-10


@dataclass(frozen=True)
class AlgebraDescriptor:
    """Structure constants of ``Sym(r, R)`` or ``Herm(r, C)``."""

    model: str
    rank: int

    def __post_init__(self):
        if self.model not in (REAL, COMPLEX):
            raise StructuralError(f"unknown model {self.model!r}")
        if not isinstance(self.rank, (int, np.integer)) or self.rank < 1:
            raise StructuralError(f"rank must be a positive integer, got {self.rank!r}")

    @property
    def degree(self):
        return 1 if self.model == REAL else 2

    @property
    def dim(self):
        r, d = self.rank, self.degree
        return r + r * (r - 1) * d // 2

    @property
    def dtype(self):
        return np.float64 if self.model == REAL else np.complex128

    @property
    def identity(self):
        return AlgebraElement(self, np.eye(self.rank, dtype=self.dtype))

    @cached_property
    def frame(self):
        """The Jordan frame ``(c_1, ..., c_r)`` of diagonal matrix units."""
        out = []
        for j in range(self.rank):
            c = np.zeros((self.rank, self.rank), dtype=self.dtype)
            c[j, j] = 1.0
            out.append(AlgebraElement(self, c))
        return tuple(out)

    def idempotent(self, l):
        """``e_l = c_1 + ... + c_l``; ``e_0 = 0``."""
        if not 0 <= l <= self.rank:
            raise StructuralError(f"l must lie in [0, {self.rank}], got {l}")
        data = np.zeros((self.rank, self.rank), dtype=self.dtype)
        data[range(l), range(l)] = 1.0
        return AlgebraElement(self, data)

    def subalgebra(self, l):
        """Descriptor of ``V^(l) = V(e_l, 1)``, the top-left ``l x l`` block."""
        if not 1 <= l <= self.rank:
            raise StructuralError(f"l must lie in [1, {self.rank}], got {l}")
        return AlgebraDescriptor(self.model, l)

    def element(self, data):
        return AlgebraElement(self, data)

    def diag(self, values):
        values = np.asarray(values, dtype=float)
        if values.shape != (self.rank,):
            raise StructuralError(f"expected {self.rank} diagonal entries")
        return AlgebraElement(self, np.diag(values).astype(self.dtype))

    @cached_property
    def basis(self):
        """Orthonormal basis of V for the trace form, as an ``(n, r, r)`` array."""
        r = self.rank
        mats = []
        for i in range(r):
            m = np.zeros((r, r), dtype=self.dtype)
            m[i, i] = 1.0
            mats.append(m)
        s = 1.0 / np.sqrt(2.0)
        for i in range(r):
            for j in range(i + 1, r):
                m = np.zeros((r, r), dtype=self.dtype)
                m[i, j] = m[j, i] = s
                mats.append(m)
                if self.model == COMPLEX:
                    m = np.zeros((r, r), dtype=self.dtype)
                    m[i, j] = -1j * s
                    m[j, i] = 1j * s
                    mats.append(m)
        out = np.array(mats)
        out.setflags(write=False)
        return out

    def coordinates(self, x):
        """Coordinates of ``x`` in :attr:`basis`."""
        x = _data(x, self)
        return np.real(np.einsum("nij,...ji->...n", self.basis, x))

    def from_coordinates(self, coords):
        coords = np.asarray(coords, dtype=float)
        return AlgebraElement(self, np.einsum("n,nij->ij", coords, self.basis))

    def gram(self):
        """Gram matrix of :attr:`basis` under the trace form."""
        b = self.basis
        return np.real(np.einsum("aij,bji->ab", b, b))

    def random_element(self, rng, scale=1.0):
        """Gaussian element (GOE/GUE-like) of the algebra."""
        r = self.rank
        z = rng.standard_normal((r, r))
        if self.model == COMPLEX:
            z = z + 1j * rng.standard_normal((r, r))
        return AlgebraElement(self, scale * (z + z.conj().T) / 2)

    def random_cone_point(self, rng, spread=1.0):
        """Point of the open cone with log-eigenvalues uniform in ``[-spread, spread]``."""
        from .cone import haar_sample

        k = haar_sample(rng, self).matrix
        lam = np.exp(rng.uniform(-spread, spread, self.rank))
        return AlgebraElement(self, (k * lam) @ k.conj().T)


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    """An element of a Jordan algebra, stored as a symmetric/Hermitian matrix."""

    algebra: AlgebraDescriptor
    data: np.ndarray

    def __post_init__(self):
        a = self.algebra
        data = np.asarray(self.data)
        if data.shape != (a.rank, a.rank):
            raise StructuralError(
                f"expected a {a.rank}x{a.rank} matrix, got shape {data.shape}"
            )
        if a.model == REAL and np.iscomplexobj(data):
            if np.max(np.abs(data.imag), initial=0.0) > HERMITIAN_TOL:
                raise StructuralError("complex entries in a real-symmetric element")
            data = data.real
        data = data.astype(a.dtype)
        scale = max(1.0, float(np.max(np.abs(data), initial=0.0)))
        if np.max(np.abs(data - data.conj().T), initial=0.0) > HERMITIAN_TOL * scale:
            kind = "symmetric" if a.model == REAL else "Hermitian"
            raise StructuralError(f"matrix is not {kind}")
        data = (data + data.conj().T) / 2
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    def __add__(self, other):
        _same(self, other)
        return AlgebraElement(self.algebra, self.data + other.data)

    def __sub__(self, other):
        _same(self, other)
        return AlgebraElement(self.algebra, self.data - other.data)

    def __neg__(self):
        return AlgebraElement(self.algebra, -self.data)

    def __mul__(self, scalar):
        if not np.isscalar(scalar) or np.iscomplexobj(scalar):
            return NotImplemented
        return AlgebraElement(self.algebra, float(scalar) * self.data)

    __rmul__ = __mul__

    def allclose(self, other, atol=1e-10):
        _same(self, other)
        return bool(np.max(np.abs(self.data - other.data), initial=0.0) <= atol)

    def __repr__(self):
        return f"AlgebraElement({self.algebra.model}, rank={self.algebra.rank}, data={self.data.tolist()})"


@dataclass(frozen=True)
class SpectralData:
    """``x = k (sum_j lambda_j c_j) k*`` with eigenvalues sorted descending."""

    eigenvalues: np.ndarray
    rotation: np.ndarray

    def reconstruct(self, algebra):
        k = self.rotation
        return AlgebraElement(algebra, (k * self.eigenvalues) @ k.conj().T)


def algebra(model, rank):
    """Build a descriptor from a model name (``"sym"``, ``"herm"`` or the long forms)."""
    try:
        canonical = _ALIASES[str(model).lower()]
    except KeyError:
        raise StructuralError(f"unknown model {model!r}") from None
    return AlgebraDescriptor(canonical, int(rank))


def _same(x, y):
    if not isinstance(x, AlgebraElement) or not isinstance(y, AlgebraElement):
        raise StructuralError("expected AlgebraElement operands")
    if x.algebra != y.algebra:
        raise StructuralError(f"descriptor mismatch: {x.algebra} vs {y.algebra}")


def _data(x, algebra=None):
    if isinstance(x, AlgebraElement):
        if algebra is not None and x.algebra != algebra:
            raise StructuralError(f"descriptor mismatch: {x.algebra} vs {algebra}")
        return x.data
    return np.asarray(x)


def jordan_product(x, y):
    """``x o y = (xy + yx) / 2``."""
    _same(x, y)
    # float addition commutes, so this is exactly symmetric in x and y
    return AlgebraElement(x.algebra, (x.data @ y.data + y.data @ x.data) / 2)


def quadratic_rep(x, y):
    """``P(x) y = 2 x o (x o y) - x^2 o y``, which is ``x y x`` in the matrix model."""
    _same(x, y)
    return AlgebraElement(x.algebra, x.data @ y.data @ x.data)


def inner(x, y):
    """Trace form ``<x, y> = tr(x o y)``."""
    _same(x, y)
    return float(np.real(np.vdot(x.data.conj().T, y.data)))


def multiplication_operator(x):
    """Matrix of ``L(x)`` in the orthonormal basis of the algebra."""
    a = x.algebra
    b = a.basis
    images = (np.einsum("ij,njk->nik", x.data, b) + np.einsum("nij,jk->nik", b, x.data)) / 2
    # column n holds the coordinates of L(x) b_n
    return a.coordinates(images).T


def spectral_decomposition(x):
    """Eigenvalues (descending) and rotation ``k`` in ``SO(r)`` or ``U(r)``."""
    if not isinstance(x, AlgebraElement):
        raise StructuralError("spectral_decomposition expects an AlgebraElement")
    w, v = np.linalg.eigh(x.data)
    order = np.argsort(-w, kind="stable")
    w, v = w[order], v[:, order]
    if x.algebra.model == REAL and np.linalg.det(v) < 0:
        v[:, -1] = -v[:, -1]
    return SpectralData(w, v)


def trace_det(x):
    """``(tr x, det x)`` as real numbers."""
    if not isinstance(x, AlgebraElement):
        raise StructuralError("trace_det expects an AlgebraElement")
    return float(np.real(np.trace(x.data))), float(np.real(np.linalg.det(x.data)))


def peirce_project(x, l):
    """``P(e_l) x``: keep the top-left ``l x l`` block, zero elsewhere."""
    r = x.algebra.rank
    if not 1 <= l <= r:
        raise DomainError(f"l must lie in [1, {r}], got {l}")
    out = np.zeros_like(x.data)
    out[:l, :l] = x.data[:l, :l]
    return AlgebraElement(x.algebra, out)


def peirce_components(x, l):
    """Projections of ``x`` on the eigenspaces of ``L(e_l)`` for 1, 1/2 and 0."""
    r = x.algebra.rank
    if not 0 <= l <= r:
        raise DomainError(f"l must lie in [0, {r}], got {l}")
    one = np.zeros_like(x.data)
    zero = np.zeros_like(x.data)
    one[:l, :l] = x.data[:l, :l]
    zero[l:, l:] = x.data[l:, l:]
    half = x.data - one - zero
    a = x.algebra
    return AlgebraElement(a, one), AlgebraElement(a, half), AlgebraElement(a, zero)


def element_rank(x, tol=RANK_TOL):
    """Number of eigenvalues above ``tol * max|lambda|``."""
    w = np.linalg.eigvalsh(x.data)
    top = np.max(np.abs(w))
    if top == 0:
        return 0
    return int(np.sum(np.abs(w) > tol * top))


def in_cone(x, tol=RANK_TOL):
    """True iff every eigenvalue exceeds ``tol * max|lambda|``."""
    w = np.linalg.eigvalsh(x.data)
    top = np.max(np.abs(w))
    return bool(top > 0 and np.all(w > tol * top))
