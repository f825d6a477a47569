import numpy as np
import pytest

from cone_harmonics import default_seed, mc_mean, rqmc_mean
from cone_harmonics.errors import PreconditionError


def normal_sampler(rng, m):
    return rng.standard_normal(m) + 2.0


def test_mc_mean_is_reproducible():
    a = mc_mean(normal_sampler, 10**5, seed=3, shards=4)
    b = mc_mean(normal_sampler, 10**5, seed=3, shards=4)
    assert a == b


def test_threads_do_not_change_the_result():
    a = mc_mean(normal_sampler, 10**5, seed=3, shards=4, threads=1)
    b = mc_mean(normal_sampler, 10**5, seed=3, shards=4, threads=4)
    assert a.value == b.value and a.stderr == b.stderr


def test_chunking_merges_exactly():
    a = mc_mean(normal_sampler, 10**4, seed=1, chunk=10**4)
    b = mc_mean(normal_sampler, 10**4, seed=1, chunk=333)
    assert a.value == pytest.approx(b.value, rel=1e-12)
    assert a.stderr == pytest.approx(b.stderr, rel=1e-9)


def test_stderr_matches_known_variance():
    res = mc_mean(normal_sampler, 10**6, seed=0)
    assert res.stderr == pytest.approx(1e-3, rel=0.01)
    assert abs(res.value - 2.0) < 4 * res.stderr


def test_too_few_samples():
    with pytest.raises(PreconditionError):
        mc_mean(normal_sampler, 1, seed=0)


def test_env_seed(monkeypatch):
    monkeypatch.setenv("CONE_HARMONICS_SEED", "17")
    assert default_seed() == 17
    monkeypatch.delenv("CONE_HARMONICS_SEED")
    assert default_seed(5) == 5


def test_rqmc_mean_accuracy_and_determinism():
    def f(u):
        return np.prod(1 + 0.5 * (u - 0.5), axis=1)

    res = rqmc_mean(f, 4, 2**14, seed=2)
    assert res.n == 2**14
    assert abs(res.value - 1.0) < 1e-4
    assert res.stderr < 1e-4
    assert rqmc_mean(f, 4, 2**14, seed=2) == res
    with pytest.raises(PreconditionError):
        rqmc_mean(f, 4, 100, replicates=1)
