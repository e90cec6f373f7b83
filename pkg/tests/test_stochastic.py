import numpy as np
import pytest

from noisediscrim.channels import EnvironmentParams, channel_outputs
from noisediscrim.gaussian_core import vacuum
from noisediscrim.states import STSParams, sts_covariance
from noisediscrim.stochastic import InsufficientSamplesWarning, empirical_channel, ou_sample

E1 = np.exp(-1.0)
STS = sts_covariance(STSParams(1.0, 0.7))


def test_zero_coupling_gives_zero_field():
    tr = ou_sample(EnvironmentParams(0.0, 1.0), dt=1e-3, seed=1)
    assert np.all(tr.field == 0)
    assert len(tr.times) == 1001


def test_ou_sample_deterministic():
    env = EnvironmentParams(1.0, 2.0)
    a, b = ou_sample(env, seed=9), ou_sample(env, seed=9)
    assert np.array_equal(a.field, b.field)
    assert not np.array_equal(a.field, ou_sample(env, seed=10).field)
    with pytest.raises(ValueError):
        ou_sample(env, dt=0.05)


def test_ou_autocorrelation_lag_one():
    # 1e5 steps of dt = 0.01: lag 1 is 100 steps
    dt, lag = 0.01, 100
    tr = ou_sample(EnvironmentParams(1.0, 1e5 * dt), dt=dt, seed=4)
    comps = np.concatenate([tr.field.real, tr.field.imag])
    n = tr.field.size
    prods = np.concatenate([tr.field.real[:-lag] * tr.field.real[lag:], tr.field.imag[:-lag] * tr.field.imag[lag:]])
    batches = np.array_split(prods, 40)
    means = np.array([b.mean() for b in batches])
    se = means.std(ddof=1) / np.sqrt(len(means))
    assert abs(prods.mean() - 0.5 * E1) <= 3 * se
    assert comps.var() == pytest.approx(0.5, rel=0.1)
    assert n == 100_001


def test_common_vacuum_cross_covariance():
    env = EnvironmentParams(1.0, 1.0)
    emp = empirical_channel(vacuum(), "common", env, n_traj=10_000, seed=2)
    assert abs(emp.covariance[0, 2] - 2 * E1) <= 3 * emp.stderr[0, 2]
    assert abs(emp.covariance[1, 3] - 2 * E1) <= 3 * emp.stderr[1, 3]


def test_local_cross_block_vanishes():
    emp = empirical_channel(STS, "local", EnvironmentParams(1.0, 1.0), n_traj=10_000, seed=3)
    assert np.all(np.abs(emp.added_noise[:2, 2:]) <= 3 * emp.stderr[:2, 2:])


def test_zero_time_is_identity():
    emp = empirical_channel(STS, "common", EnvironmentParams(1.0, 0.0), n_traj=1000, seed=0)
    assert np.array_equal(emp.covariance, STS)


@pytest.mark.parametrize("t", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("kind", ["local", "common"])
def test_matches_analytic_channels(kind, t):
    env = EnvironmentParams(1.0, t)
    expected = dict(zip(("local", "common"), channel_outputs(STS, env)))[kind]
    emp = empirical_channel(STS, kind, env, n_traj=10_000, seed=1)
    assert np.all(emp.within(expected))


def test_common_difference_quadratures_untouched():
    emp = empirical_channel(STS, "common", EnvironmentParams(1.0, 1.0), n_traj=2000, seed=5)
    n = emp.added_noise
    # difference-mode noise is identically zero trajectory by trajectory
    assert n[0, 0] + n[2, 2] - 2 * n[0, 2] == pytest.approx(0.0, abs=1e-12)
    assert n[1, 1] + n[3, 3] - 2 * n[1, 3] == pytest.approx(0.0, abs=1e-12)


def test_parallel_equals_serial():
    env = EnvironmentParams(1.0, 0.5)
    a = empirical_channel(STS, "local", env, n_traj=3500, seed=8, workers=1)
    b = empirical_channel(STS, "local", env, n_traj=3500, seed=8, workers=3)
    assert np.array_equal(a.covariance, b.covariance) and np.array_equal(a.stderr, b.stderr)


def test_input_validation_and_warning():
    env = EnvironmentParams(1.0, 0.5)
    with pytest.raises(ValueError):
        empirical_channel(STS, "local", env, n_traj=999)
    with pytest.raises(ValueError):
        empirical_channel(STS, "local", EnvironmentParams(1.0, 0.5, 0.2, 0.2), n_traj=1000)
    with pytest.raises(ValueError):
        empirical_channel(STS, "global", env, n_traj=1000)
    with pytest.warns(InsufficientSamplesWarning):
        empirical_channel(STS, "local", env, n_traj=1000, tol=1e-6)
