"""Integration over the boundary orbit ``d_l Omega`` of rank-``l`` elements.

The orbit carries the relatively invariant measure ``mu_l``; in polar form

    int f dmu_l = int_K dk int_{Omega^(l)} Delta_(l)(y)^(rd/2) f(k y) d*y,

where ``Omega^(l)`` is the cone of the top-left ``l x l`` block and ``d*y`` its
invariant measure. In eigenvalue coordinates ``y = u diag(t) u*``,

    d*y = c_l prod_{i<j} |t_i - t_j|^d prod_j t_j^(-(1 + (l-1) d / 2)) dt du,

``u`` Haar on ``K^(l)`` and ``t`` ranging over the whole orthant. The constant
``c_l`` is fixed by Lebesgue measure of the trace form, so that
``int e^(-tr y) Delta(y)^s d*y`` is the Gindikin Gamma function.

The radial integral uses ordered log coordinates: the top log-eigenvalue
``s_1`` and the nonnegative gaps ``s_j - s_(j+1)``. The ``|t_i - t_j|^d``
factor then only vanishes on panel endpoints, and composite Gauss-Legendre
panels converge spectrally.
"""

import itertools
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np
from scipy import special as sp
from scipy.interpolate import RegularGridInterpolator

from .cone import (
    as_weight,
    group_character,
    haar_batch,
    haar_dimension,
    haar_from_uniform,
    log_power_function,
    pad_weight,
)
from .errors import ConvergenceError, PreconditionError, StructuralError
from .jordan import AlgebraDescriptor
from .montecarlo import MCResult, default_seed, mc_mean, rqmc_mean
from .special import log_gindikin_gamma

__all__ = [
    "RadialFunction",
    "MovedRadial",
    "QuadratureSpec",
    "RadialRule",
    "BoundaryResult",
    "measure_constant",
    "radial_rule",
    "boundary_integral",
    "InvarianceReport",
    "relative_invariance_check",
    "riesz_functional",
    "pi_l_act",
    "ProjectedFunction",
    "k_invariant_project",
]

MAX_RADIAL_RANK = 3
TAIL_TOL = 1e-3
MINOR_FLOOR = 1e-300
QUAD_PROBE = 64
ENVELOPE_TOL = 1e-9
# default (panels, order) of the radial rule per face rank
DEFAULT_RULE = {1: (16, 8), 2: (8, 5), 3: (8, 3)}
# K-invariant integrands need no K-average, so a finer radial rule is affordable
INVARIANT_RULE = {1: (32, 8), 2: (16, 6), 3: (16, 6)}
_SCAN = (-30.0, 30.0)
SCAN_WIDENINGS = 3


def measure_constant(l, d):
    """``c_l = (2 pi)^(l(l-1)d/4) / prod_{j<=l} Gamma(1 + j d/2) / Gamma(1 + d/2)``.

    Derived from the Selberg integral; ``c_1 = 1``.
    """
    j = np.arange(1, l + 1)
    log_c = l * (l - 1) * d / 4.0 * math.log(2 * math.pi) - np.sum(
        sp.gammaln(1 + j * d / 2.0) - sp.gammaln(1 + d / 2.0)
    )
    return float(np.exp(log_c))


@dataclass
class RadialFunction:
    """A ``K^(l)``-invariant function, given through its eigenvalues.

    ``func`` maps an array of eigenvalues of shape ``(..., l)`` to values of
    shape ``(...)``; it must be symmetric in the ``l`` coordinates. Calling the
    object on matrices of shape ``(..., r, r)`` evaluates ``func`` at the top
    ``l`` eigenvalues, which extends it ``K``-invariantly to ``d_l Omega``.
    """

    l: int
    func: Callable
    name: str = "f"

    def __post_init__(self):
        if self.l < 1:
            raise StructuralError("orbit index must be positive")

    def eigen(self, t):
        t = np.asarray(t, dtype=float)
        if t.shape[-1] != self.l:
            raise StructuralError(f"expected eigenvalues of length {self.l}")
        return np.asarray(self.func(-np.sort(-t, axis=-1)))

    def __call__(self, x):
        data = np.asarray(getattr(x, "data", x))
        w = np.linalg.eigvalsh(data)[..., ::-1][..., : self.l]
        return self.eigen(np.clip(w, 0.0, None))

    @classmethod
    def from_grid(cls, axes, values, name="f"):
        """Interpolate tabulated values on a tensor grid (linear in ``log t``).

        Outside the grid the function is taken to be zero.
        """
        axes = [np.asarray(a, dtype=float) for a in axes]
        for a in axes:
            if np.any(a <= 0) or np.any(np.diff(a) <= 0):
                raise StructuralError("grid axes must be strictly positive and increasing")
        interp = RegularGridInterpolator(
            [np.log(a) for a in axes], np.asarray(values), bounds_error=False, fill_value=0.0
        )
        l = len(axes)

        def func(t):
            t = np.asarray(t, dtype=float)
            out = interp(np.log(np.maximum(t, 1e-300)).reshape(-1, l))
            return out.reshape(t.shape[:-1])

        return cls(l, func, name)

    def check_symmetric(self, rng, samples=32, rtol=1e-10):
        """Spot-check invariance under coordinate permutations."""
        t = np.exp(rng.uniform(-2, 2, (samples, self.l)))
        base = np.asarray(self.func(t))
        for perm in itertools.permutations(range(self.l)):
            other = np.asarray(self.func(t[:, list(perm)]))
            if np.max(np.abs(other - base)) > rtol * max(1.0, np.max(np.abs(base))):
                return False
        return True


@dataclass
class MovedRadial:
    """``y -> f(a y a*)`` for a :class:`RadialFunction` ``f`` and an invertible ``a``.

    On the face ``y = C diag(t) C*`` with ``C`` of width ``l``, so the nonzero
    eigenvalues of ``a y a*`` are those of the ``l x l`` matrix
    ``diag(t)^(1/2) (aC)* (aC) diag(t)^(1/2)``; the ``K``-average uses this.
    """

    f: RadialFunction
    matrix: np.ndarray

    def __call__(self, y):
        y = np.asarray(getattr(y, "data", y))
        return self.f(self.matrix @ y @ self.matrix.conj().T)

    def on_frames(self, cols, t):
        """Values at ``y = C diag(t) C*`` for frames ``cols`` (m, r, l) and nodes ``t`` (n, l)."""
        ac = self.matrix @ cols
        gram = np.conj(np.swapaxes(ac, -1, -2)) @ ac
        if t.shape[-1] == 2:
            # closed-form 2x2 eigenvalues, already descending
            a = gram[:, None, 0, 0].real * t[None, :, 0]
            c = gram[:, None, 1, 1].real * t[None, :, 1]
            b2 = (np.abs(gram[:, None, 0, 1]) ** 2) * (t[None, :, 0] * t[None, :, 1])
            mid = 0.5 * (a + c)
            root = np.sqrt((0.5 * (a - c)) ** 2 + b2)
            lam = np.stack([mid + root, np.maximum(mid - root, 0.0)], axis=-1)
            return np.asarray(self.f.func(lam))
        if t.shape[-1] == 1:
            return self.f.eigen(gram[:, None, 0, 0].real[..., None] * t[None, :, :])
        s = np.sqrt(t)
        m = s[None, :, :, None] * gram[:, None] * s[None, :, None, :]
        return self.f.eigen(np.clip(np.linalg.eigvalsh(m), 0.0, None))


@dataclass(frozen=True)
class QuadratureSpec:
    """Sample sizes for boundary integrals.

    ``n_k`` Haar samples for the ``K``-average, ``panels`` Gauss panels of
    ``order`` nodes per log-coordinate, and an optional ``log_range``
    ``(lo, hi)`` for the top log-eigenvalue (auto-detected when ``None``).
    ``method`` selects randomised quasi-Monte Carlo (``"rqmc"``, scrambled
    Sobol points with ``replicates`` independent scrambles) or plain
    Monte Carlo (``"mc"``) for the ``K``-average.
    """

    n_k: int = 4096
    panels: Optional[int] = None
    order: Optional[int] = None
    log_range: Optional[tuple] = None
    gap_max: Optional[float] = None
    seed: Optional[int] = None
    shards: int = 1
    threads: int = 1
    method: str = "rqmc"
    replicates: int = 16

    def __post_init__(self):
        if self.method not in ("rqmc", "mc"):
            raise PreconditionError(f"unknown K-sampling method {self.method!r}")
        if self.n_k < 1000:
            raise PreconditionError(f"n_k must be at least 1000, got {self.n_k}")
        if self.panels is not None and self.panels < 8:
            raise PreconditionError(f"panels must be at least 8, got {self.panels}")
        if self.order is not None and self.order < 2:
            raise PreconditionError("order must be at least 2")

    def rule_for(self, l):
        """``(panels, order)`` with per-rank defaults filled in."""
        panels, order = DEFAULT_RULE.get(l, (8, 3))
        return (self.panels or panels, self.order or order)


@dataclass
class RadialRule:
    """Nodes ``t`` (shape ``(N, l)``, descending) and weights on ``Omega^(l)``.

    Tensor structure: ``top`` and ``gaps`` hold the 1-d log-coordinate rules.
    """

    t: np.ndarray
    weights: np.ndarray
    top: tuple
    gaps: tuple
    tail: float
    log_range: tuple = (0.0, 0.0)
    gap_max: Optional[float] = None


def _gauss_panels(lo, hi, panels, order):
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(lo, hi, panels + 1)
    half = np.diff(edges) / 2
    mid = (edges[:-1] + edges[1:]) / 2
    return (mid[:, None] + half[:, None] * x).ravel(), (half[:, None] * w).ravel()


def _log_density(s, d, alpha):
    """Log of ``c_l l! prod|t_i - t_j|^d prod t^(alpha - 1 - (l-1)d/2)`` at ordered log-eigenvalues."""
    l = s.shape[-1]
    out = np.full(s.shape[:-1], math.log(measure_constant(l, d)) + math.log(math.factorial(l)))
    out = out + (alpha - 1.0 - (l - 1) * d / 2.0) * np.sum(s, axis=-1)
    for i in range(l):
        for j in range(i + 1, l):
            # log(t_i - t_j) = s_i + log(1 - e^{-(s_i - s_j)})
            gap = s[..., i] - s[..., j]
            with np.errstate(divide="ignore"):
                out = out + d * (s[..., i] + np.log(-np.expm1(-gap)))
    return out


def _ordered_points(top, gaps):
    # top: (N,), gaps: (N, l-1) -> log-eigenvalues (N, l), descending
    cols = [top]
    for j in range(gaps.shape[-1]):
        cols.append(cols[-1] - gaps[..., j])
    return np.stack(cols, axis=-1)


def _tensor(top_nodes, top_w, gap_nodes, gap_w, l):
    grids = [top_nodes] + [gap_nodes] * (l - 1)
    wgrids = [top_w] + [gap_w] * (l - 1)
    pts = np.stack(np.meshgrid(*grids, indexing="ij"), axis=-1).reshape(-1, l)
    w = np.prod(np.stack(np.meshgrid(*wgrids, indexing="ij"), axis=-1).reshape(-1, l), axis=-1)
    return pts, w


def _envelope(profile, d, alpha, l, log_range, gap_max, spec):
    """Choose the top-coordinate range and gap cap from a coarse scan of ``profile``.

    The scan window widens (at fixed resolution per axis) while the retained
    region touches its edge, so slowly decaying integrands are not clipped.
    """
    if log_range is not None and (l == 1 or gap_max is not None):
        return tuple(log_range), gap_max
    lo_s, hi_s, gap_hi = float(_SCAN[0]), float(_SCAN[1]), 40.0
    for _ in range(SCAN_WIDENINGS + 1):
        top = np.linspace(lo_s, hi_s, 241)
        h = top[1] - top[0]
        gaps = np.linspace(0.0, gap_hi, 81) if l > 1 else np.zeros(1)
        if log_range is not None:
            top = top[(top >= log_range[0]) & (top <= log_range[1])]
        grid = [top] + [gaps] * (l - 1)
        pts = np.stack(np.meshgrid(*grid, indexing="ij"), axis=-1).reshape(-1, l)
        s = _ordered_points(pts[:, 0], pts[:, 1:])
        with np.errstate(over="ignore", under="ignore", invalid="ignore"):
            mag = np.abs(profile(np.exp(s))) * np.exp(_log_density(s, d, alpha) + np.sum(s, axis=-1))
        mag = np.where(np.isfinite(mag), mag, 0.0)
        if not np.any(mag > 0):
            # identically zero integrand: any rule integrates it exactly
            return (tuple(log_range) if log_range is not None else (-1.0, 1.0)), (1.0 if l > 1 else None)
        sel = pts[mag > ENVELOPE_TOL * mag.max()]
        grow_lo = log_range is None and sel[:, 0].min() <= lo_s + h
        grow_hi = log_range is None and sel[:, 0].max() >= hi_s - h
        grow_gap = l > 1 and gap_max is None and sel[:, 1:].max() >= gap_hi - 2 * h
        if not (grow_lo or grow_hi or grow_gap):
            break
        lo_s, hi_s = lo_s * (2 if grow_lo else 1), hi_s * (2 if grow_hi else 1)
        gap_hi *= 2 if grow_gap else 1
    pad = max(1.0, h)
    lo, hi = sel[:, 0].min() - pad, sel[:, 0].max() + pad
    if log_range is not None:
        lo, hi = log_range
    gmax = gap_max
    if l > 1 and gmax is None:
        gmax = float(sel[:, 1:].max()) + pad
    return (float(lo), float(hi)), gmax


def radial_rule(l, d, alpha, spec, profile=None):
    """Quadrature for ``int_{Omega^(l)} F(y) Delta(y)^alpha d*y`` with ``F`` ``K^(l)``-invariant.

    Parameters
    ----------
    l, d : int
        Rank of the face and degree.
    alpha : float
        Extra power of the determinant; ``rd/2`` realises ``mu_l``.
    spec : QuadratureSpec
    profile : callable, optional
        ``t -> |F(t)|`` on descending eigenvalues, used to locate the bulk of
        the integrand when ``spec.log_range`` is not given.
    """
    if not 1 <= l <= MAX_RADIAL_RANK:
        raise PreconditionError(f"radial quadrature supports 1 <= l <= {MAX_RADIAL_RANK}")
    if profile is None and spec.log_range is None:
        raise PreconditionError("need an integrand profile or an explicit log_range")
    (lo, hi), gmax = _envelope(profile, d, alpha, l, spec.log_range, spec.gap_max, spec)
    panels, order = spec.rule_for(l)
    top_nodes, top_w = _gauss_panels(lo, hi, panels, order)
    if l > 1:
        gap_nodes, gap_w = _gauss_panels(0.0, gmax, panels, order)
    else:
        gap_nodes, gap_w = np.zeros(0), np.zeros(0)
    pts, w = _tensor(top_nodes, top_w, gap_nodes, gap_w, l)
    s = _ordered_points(pts[:, 0], pts[:, 1:])
    # dt = t ds; ordered region times l! covers the orthant
    w = w * np.exp(_log_density(s, d, alpha) + np.sum(s, axis=-1))
    tail = np.nan
    if profile is not None:
        with np.errstate(over="ignore", under="ignore", invalid="ignore"):
            vals = np.abs(profile(np.exp(s))) * w
        vals = np.where(np.isfinite(vals), vals, 0.0)
        edge = np.isclose(pts[:, 0], top_nodes[0]) | np.isclose(pts[:, 0], top_nodes[-1])
        if l > 1:
            edge |= np.any(np.isclose(pts[:, 1:], gap_nodes[-1]), axis=-1)
        total = vals.sum()
        tail = float(vals[edge].sum() / total) if total > 0 else 0.0
    return RadialRule(np.exp(s), w, (top_nodes, top_w), (gap_nodes, gap_w), tail, (lo, hi), gmax)


@dataclass
class BoundaryResult:
    value: complex
    stderr: float
    quad_error: float
    tail: float
    n_k: int
    nodes: int

    @property
    def error(self):
        return float(np.hypot(self.stderr, self.quad_error))


def _embed(t, r, dtype):
    # (N, l) eigenvalues -> (N, r, r) diagonal matrices
    out = np.zeros(t.shape[:-1] + (r, r), dtype=dtype)
    idx = np.arange(t.shape[-1])
    out[..., idx, idx] = t
    return out


def _k_integrand(f, algebra, rule, chunk=1 << 21):
    """``k -> sum_nodes w f(k diag(t) k*)`` on a batch of rotations ``k``."""
    l = rule.t.shape[-1]
    r = algebra.rank
    n_nodes = rule.t.shape[0]

    def integrand(k):
        m = k.shape[0]
        cols = k[..., :l]
        if isinstance(f, MovedRadial):
            out = np.zeros(m, dtype=complex)
            step = max(1, chunk // (m * l * l))
            for start in range(0, n_nodes, step):
                vals = np.asarray(f.on_frames(cols, rule.t[start : start + step]), dtype=complex)
                out += vals @ rule.weights[start : start + step]
            return out
        # y = sum_i t_i k_i k_i^*
        outer = cols[:, :, None, :] * np.conj(cols)[:, None, :, :]
        out = np.zeros(m, dtype=complex)
        step = max(1, chunk // (m * r * r))
        for start in range(0, n_nodes, step):
            y = np.einsum("mabi,ni->mnab", outer, rule.t[start : start + step])
            vals = np.asarray(f(y), dtype=complex).reshape(m, -1)
            out += vals @ rule.weights[start : start + step]
        return out

    return integrand


def _k_average(f, algebra, rule, spec, n, seed):
    integrand = _k_integrand(f, algebra, rule)
    block = max(1, min(1 << 12, (1 << 22) // max(rule.t.shape[0], 1)))
    if spec.method == "rqmc":
        return rqmc_mean(
            lambda u: integrand(haar_from_uniform(u, algebra)),
            haar_dimension(algebra),
            n,
            seed=seed,
            replicates=spec.replicates,
            threads=spec.threads,
            chunk=block,
        )
    return mc_mean(
        lambda rng, m: integrand(haar_batch(rng, algebra, m)),
        n,
        seed=seed,
        shards=spec.shards,
        threads=spec.threads,
        chunk=block,
    )


def _radial_profile(f, algebra, l, n=16, seed=12345):
    """``t -> mean_k |f(k diag(t) k*)|`` on a few fixed rotations."""
    if isinstance(f, RadialFunction):
        return lambda t: np.abs(f.eigen(t))
    rng = np.random.default_rng(seed)
    k = haar_batch(rng, algebra, n)
    kh = np.conj(np.swapaxes(k, -1, -2))

    def prof(t):
        out = np.zeros(t.shape[0])
        for start in range(0, t.shape[0], 4096):
            blk = _embed(t[start : start + 4096], algebra.rank, algebra.dtype)
            y = k[:, None] @ blk[None] @ kh[:, None]
            out[start : start + 4096] = np.mean(np.abs(np.asarray(f(y))), axis=0)
        return out

    return prof


def boundary_integral(f, algebra, l, spec=None, k_invariant=None):
    """``int_{d_l Omega} f dmu_l`` for ``f`` acting on batches of ``r x r`` matrices.

    The ``K``-average is Monte Carlo over ``spec.n_k`` Haar samples (skipped
    when ``f`` is a :class:`RadialFunction` or ``k_invariant`` is set); the
    radial integral uses :func:`radial_rule`. The quadrature error is the
    change when the Gauss order drops by two, on a few fixed rotations.

    Returns
    -------
    BoundaryResult
    """
    if not isinstance(algebra, AlgebraDescriptor):
        raise StructuralError("algebra must be an AlgebraDescriptor")
    r, d = algebra.rank, algebra.degree
    if not 1 <= l <= r - 1:
        raise PreconditionError(f"orbit index must satisfy 1 <= l <= r - 1, got {l}")
    spec = spec or QuadratureSpec()
    invariant = isinstance(f, RadialFunction) or bool(k_invariant)
    if invariant:
        panels, order = INVARIANT_RULE.get(l, spec.rule_for(l))
        spec = replace(spec, panels=spec.panels or panels, order=spec.order or order)
    alpha = r * d / 2.0
    profile = _radial_profile(f, algebra, l)
    rule = radial_rule(l, d, alpha, spec, profile)
    if rule.tail > TAIL_TOL:
        raise ConvergenceError(f"radial tail {rule.tail:.2e} exceeds {TAIL_TOL}")
    panels, order = spec.rule_for(l)
    coarse = radial_rule(
        l,
        d,
        alpha,
        QuadratureSpec(
            n_k=spec.n_k,
            panels=panels,
            order=max(order - 2, 2),
            log_range=rule.log_range,
            gap_max=rule.gap_max,
        ),
        profile,
    )
    if invariant:
        if isinstance(f, RadialFunction):
            vals = lambda rr: np.asarray(f.eigen(rr.t), dtype=complex)
        else:
            vals = lambda rr: np.asarray(f(_embed(rr.t, r, algebra.dtype)), dtype=complex)
        fine = complex(vals(rule) @ rule.weights)
        crude = complex(vals(coarse) @ coarse.weights)
        return BoundaryResult(fine, 0.0, abs(fine - crude), rule.tail, 1, rule.t.shape[0])
    seed = default_seed() if spec.seed is None else spec.seed
    res = _k_average(f, algebra, rule, spec, spec.n_k, seed)
    # quadrature error: coarse vs fine rule on the same few rotations
    probe = haar_batch(np.random.default_rng(seed), algebra, QUAD_PROBE)
    crude = np.mean(_k_integrand(f, algebra, coarse)(probe))
    fine = np.mean(_k_integrand(f, algebra, rule)(probe))
    return BoundaryResult(
        res.value, res.stderr, abs(fine - crude), rule.tail, res.n, rule.t.shape[0]
    )


@dataclass
class InvarianceReport:
    lhs: complex
    rhs: complex
    character: float
    rel_diff: float
    error: float
    tolerance: float
    passed: bool
    mc_error: float = 0.0


def relative_invariance_check(g, f, l, spec=None, rtol=0.01, k_invariant=False):
    """Compare ``int f(g x) dmu_l`` with ``Delta(g^-1)^(ld/2) int f dmu_l``.

    PASS iff the relative discrepancy is at most ``rtol``. Set
    ``k_invariant`` when ``f`` itself is ``K``-invariant so the reference
    integral skips the ``K``-average.
    """
    a = g.algebra
    d = a.degree
    mat = g.matrix
    mat_h = mat.conj().T

    if isinstance(f, RadialFunction):
        moved = MovedRadial(f, mat)
    else:

        def moved(y):
            return f(mat @ y @ mat_h)

    lhs = boundary_integral(moved, a, l, spec)
    base = boundary_integral(f, a, l, spec, k_invariant=k_invariant)
    char = group_character(g)
    rhs = char ** (-l * d / 2.0) * base.value
    rel = abs(lhs.value - rhs) / abs(rhs)
    err = float(np.hypot(lhs.error, char ** (-l * d / 2.0) * base.error) / abs(rhs))
    mc = float(np.hypot(lhs.stderr, char ** (-l * d / 2.0) * base.stderr) / abs(rhs))
    return InvarianceReport(lhs.value, rhs, char, rel, err, rtol, bool(rel <= rtol), mc)


def riesz_functional(F, nu, algebra, l, spec=None):
    """``R_(nu + ld/2)(F) = Gamma_l(nu + ld/2)^(-1) int F Delta_nu dmu_l`` for ``Re nu >= 0``.

    Only the measure regime ``Re nu_1 >= ... >= Re nu_l >= 0`` is supported;
    other parameters raise :class:`PreconditionError` rather than being
    continued analytically.
    """
    r, d = algebra.rank, algebra.degree
    nu = as_weight(nu, l)
    re = nu.real
    if np.any(re < 0) or np.any(np.diff(re) > 0):
        raise PreconditionError("Riesz functional is implemented only for Re nu_1 >= ... >= Re nu_l >= 0")
    full = pad_weight(nu, r)

    def weighted(y):
        return np.asarray(F(y)) * np.exp(log_power_function(y, full, floor=MINOR_FLOOR))

    res = boundary_integral(weighted, algebra, l, spec)
    norm = np.exp(-log_gindikin_gamma(nu + l * d / 2.0, d, l))
    return MCResult(complex(norm * res.value), float(abs(norm) * res.error), res.n_k)


def pi_l_act(g, f, l):
    """``pi^l(g) f = Delta(g)^(ld/4) f(g* .)`` as a new callable on matrices."""
    d = g.algebra.degree
    scale = group_character(g) ** (l * d / 4.0)
    a_h = g.matrix.conj().T
    a = g.matrix

    def moved(y):
        y = np.asarray(getattr(y, "data", y))
        return scale * np.asarray(f(a_h @ y @ a))

    return moved


@dataclass
class ProjectedFunction(RadialFunction):
    """``K``-average ``P f(t) = int_K f(k^-1 diag(t)) dk`` over stored samples."""

    samples: np.ndarray = field(default=None, repr=False)
    rank: int = 0

    def stderr(self, t):
        vals = self._draws(t)
        return np.std(vals, axis=0, ddof=1) / np.sqrt(vals.shape[0])

    def _draws(self, t):
        return self._source_draws(np.asarray(t, dtype=float))


def k_invariant_project(f, algebra, l, spec=None):
    """Orthogonal projection onto ``K``-invariant functions, ``P f = int_K f(k^-1 .) dk``.

    The average uses ``spec.n_k`` stored Haar samples, so the result is a
    deterministic :class:`RadialFunction` that also reports a standard error.
    """
    spec = spec or QuadratureSpec()
    seed = default_seed() if spec.seed is None else spec.seed
    rng = np.random.default_rng(seed)
    k = haar_batch(rng, algebra, spec.n_k)
    kinv = np.conj(np.swapaxes(k, -1, -2))
    r = algebra.rank

    def draws(t):
        t = np.asarray(t, dtype=float)
        flat = t.reshape(-1, l)
        diag = _embed(flat, r, algebra.dtype)
        out = np.empty((k.shape[0], flat.shape[0]), dtype=complex)
        step = max(1, (1 << 20) // max(flat.shape[0], 1))
        for s0 in range(0, k.shape[0], step):
            kk = kinv[s0 : s0 + step]
            y = kk[:, None] @ diag[None] @ np.conj(np.swapaxes(kk, -1, -2))[:, None]
            out[s0 : s0 + step] = np.asarray(f(y), dtype=complex)
        return out.reshape((k.shape[0],) + t.shape[:-1])

    def func(t):
        return np.mean(draws(t), axis=0)

    proj = ProjectedFunction(l, func, name="Pf", samples=k, rank=r)
    proj._source_draws = draws
    return proj
