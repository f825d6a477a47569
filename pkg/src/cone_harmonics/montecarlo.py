"""Seeded, sharded Monte Carlo means with a deterministic reduction.

Each shard owns a random stream spawned from ``SeedSequence(seed)``; shard
statistics ``(count, mean, M2)`` are merged in shard order, so a result is
bitwise reproducible for a fixed ``(seed, shards)`` pair regardless of how
many threads executed the shards.

:func:`rqmc_mean` is the randomised quasi-Monte Carlo counterpart: independent
scrambles of a Sobol sequence play the role of shards and the standard error
comes from the spread of the replicate means.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.stats import qmc

from .errors import PreconditionError

__all__ = ["MCResult", "default_seed", "spawn_streams", "mc_mean", "rqmc_mean", "DEFAULT_CHUNK"]

DEFAULT_CHUNK = 1 << 16
SEED_ENV = "CONE_HARMONICS_SEED"


@dataclass(frozen=True)
class MCResult:
    value: complex
    stderr: float
    n: int

    @property
    def real(self):
        return self.value.real


def default_seed(fallback=0):
    """Seed from ``$CONE_HARMONICS_SEED`` if set, else ``fallback``."""
    raw = os.environ.get(SEED_ENV)
    return int(raw) if raw not in (None, "") else fallback


def spawn_streams(seed, shards):
    seqs = np.random.SeedSequence(seed).spawn(shards)
    return [np.random.default_rng(s) for s in seqs]


class _Accumulator:
    # Chan et al. pairwise update of (count, mean, M2) for complex samples
    __slots__ = ("n", "mean", "m2")

    def __init__(self):
        self.n = 0
        self.mean = 0j
        self.m2 = 0.0

    def add_batch(self, values):
        m = values.shape[0]
        if m == 0:
            return
        bmean = complex(np.mean(values))
        bm2 = float(np.sum(np.abs(values - bmean) ** 2))
        self.merge(m, bmean, bm2)

    def merge(self, m, bmean, bm2):
        n = self.n + m
        delta = bmean - self.mean
        self.mean = self.mean + delta * m / n
        self.m2 = self.m2 + bm2 + abs(delta) ** 2 * self.n * m / n
        self.n = n


def _run_shard(sampler, rng, count, chunk):
    acc = _Accumulator()
    done = 0
    while done < count:
        m = min(chunk, count - done)
        acc.add_batch(np.asarray(sampler(rng, m), dtype=complex))
        done += m
    return acc


def mc_mean(sampler, n, seed=None, rng=None, shards=1, threads=1, chunk=DEFAULT_CHUNK):
    """Monte Carlo mean of ``sampler(rng, m) -> m iid complex draws``.

    Pass either an explicit ``rng`` (single stream) or a ``seed`` from which
    ``shards`` independent streams are spawned.
    """
    if n < 2:
        raise PreconditionError("need at least two samples")
    if rng is not None:
        accs = [_run_shard(sampler, rng, n, chunk)]
    else:
        seed = default_seed() if seed is None else seed
        streams = spawn_streams(seed, shards)
        counts = [n // shards + (1 if i < n % shards else 0) for i in range(shards)]
        jobs = list(zip(streams, counts))
        if threads > 1 and shards > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                accs = list(pool.map(lambda job: _run_shard(sampler, job[0], job[1], chunk), jobs))
        else:
            accs = [_run_shard(sampler, g, c, chunk) for g, c in jobs]
    total = _Accumulator()
    for a in accs:
        if a.n:
            total.merge(a.n, a.mean, a.m2)
    var = total.m2 / (total.n - 1)
    return MCResult(total.mean, float(np.sqrt(max(var, 0.0) / total.n)), total.n)


def rqmc_mean(integrand, dim, n, seed=None, replicates=16, threads=1, chunk=DEFAULT_CHUNK):
    """Randomised QMC mean of ``integrand(u)`` over the unit cube ``[0, 1)^dim``.

    ``n`` points are split over ``replicates`` independent Owen scrambles of a
    Sobol sequence (each replicate rounded up to a power of two). The value is
    the mean of the replicate means and the standard error their standard
    deviation over ``sqrt(replicates)``.
    """
    if replicates < 2:
        raise PreconditionError("need at least two replicates")
    per = 1 << max(1, int(np.ceil(np.log2(max(n, 2) / replicates))))
    seed = default_seed() if seed is None else seed
    children = np.random.SeedSequence(seed).spawn(replicates)

    def one(child):
        pts = qmc.Sobol(dim, scramble=True, seed=np.random.default_rng(child)).random(per)
        pts = np.clip(pts, 1e-15, 1 - 1e-15)
        total = 0j
        for start in range(0, per, chunk):
            total += complex(np.sum(np.asarray(integrand(pts[start : start + chunk]), dtype=complex)))
        return total / per

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            means = list(pool.map(one, children))
    else:
        means = [one(c) for c in children]
    means = np.array(means)
    value = complex(np.mean(means))
    stderr = float(np.std(means, ddof=1) / np.sqrt(replicates))
    return MCResult(value, stderr, per * replicates)
