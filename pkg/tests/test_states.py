import numpy as np
import pytest
from hypothesis import given, strategies as st

from noisediscrim.gaussian_core import energy, entanglement, is_physical, purity, symplectic_eigenvalues, vacuum
from noisediscrim.states import (
    STSParams,
    SVParams,
    SamplingExhaustedError,
    random_standard_form,
    random_standard_forms,
    ssv_covariance,
    sts_covariance,
    sv_covariance,
)


def test_sts_vacuum_and_thermal():
    assert np.allclose(sts_covariance(STSParams(0.0, 0.5)), vacuum())
    th = sts_covariance(STSParams(1.0, 0.0))
    assert np.allclose(th, 1.5 * np.eye(4))


def test_sts_parametrisation_example():
    p = STSParams(1.0, 0.7)
    assert p.n_squeeze == pytest.approx(0.7)
    assert p.nbar == pytest.approx(0.125)
    assert np.sinh(p.r) ** 2 == pytest.approx(0.7)
    s = sts_covariance(p)
    assert 2 * s[0, 0] == pytest.approx(3.0, abs=1e-12)
    assert 2 * s[0, 2] == pytest.approx(2.5 * np.sqrt(0.7 * 1.7), abs=1e-12)
    assert 2 * s[0, 2] == pytest.approx(2.7272, abs=1e-4)
    assert s[1, 3] == -s[0, 2]


@pytest.mark.parametrize("eps,gamma", [(-0.1, 0.5), (1.0, -0.1), (1.0, 1.2)])
def test_sts_rejects_bad_params(eps, gamma):
    with pytest.raises(ValueError):
        STSParams(eps, gamma)


@given(st.floats(0, 20), st.floats(0, 1))
def test_sts_energy_and_physical(eps, gamma):
    s = sts_covariance(STSParams(eps, gamma))
    assert is_physical(s)
    assert energy(s) == pytest.approx(2 * eps, abs=1e-10 * max(1, eps))


def test_sv_examples():
    assert np.allclose(sv_covariance(SVParams(0.0, 0.0)), vacuum())
    s = sv_covariance(SVParams(1.0, 0.0))
    assert np.allclose(np.diag(s), 1.0) and s[0, 2] == pytest.approx(0.5) and s[1, 3] == pytest.approx(0.5)
    assert is_physical(s) and purity(s) == pytest.approx(1 / 3)
    s = sv_covariance(SVParams(1.0, 0.7))
    assert 4 * s[0, 0] == pytest.approx(3 * np.exp(1.4) + 1) and 4 * s[0, 0] == pytest.approx(13.166, abs=1e-3)
    assert 4 * s[0, 2] == pytest.approx(11.166, abs=1e-3)
    assert 4 * s[1, 1] == pytest.approx(3 * np.exp(-1.4) + 1, abs=1e-12)
    assert 4 * s[1, 1] == pytest.approx(1.73979, abs=1e-5)


@given(st.floats(0, 5), st.floats(-2, 2))
def test_sv_ssv_agree_on_invariants(nbar, r):
    sv = sv_covariance(SVParams(nbar, r))
    ssv = ssv_covariance(SVParams(nbar, r))
    assert is_physical(sv) and is_physical(ssv)
    assert purity(ssv) == pytest.approx(purity(sv), abs=1e-9)
    assert entanglement(ssv)[0] == pytest.approx(entanglement(sv)[0], abs=1e-9)


def test_ssv_examples():
    assert np.allclose(ssv_covariance(SVParams(0.0, 0.0)), vacuum(), atol=1e-12)
    s = ssv_covariance(SVParams(1.0, 0.7))
    assert purity(s) == pytest.approx(1 / 3, abs=1e-12)
    s = ssv_covariance(SVParams(0.3333, 1.470))
    assert s[0, 0] == s[1, 1] and s[0, 1] == 0 and s[0, 3] == 0
    # one mode of an SV is vacuum before the beam splitter, so nu1 = 1/2
    assert symplectic_eigenvalues(s)[0] == pytest.approx(0.5, abs=1e-9)


def test_random_standard_form_deterministic_and_exact():
    a = random_standard_form(0.6, seed=11)
    b = random_standard_form(0.6, seed=11)
    assert np.array_equal(a, b)
    assert is_physical(a)
    assert abs(purity(a) - 0.6) <= 1e-9


@given(st.integers(0, 10_000), st.floats(0.05, 0.8))
def test_random_standard_form_properties(seed, mu):
    s = random_standard_form(mu, seed=seed)
    assert is_physical(s)
    assert abs(purity(s) - mu) <= 1e-9
    off = s.copy()
    for i, j in [(0, 0), (1, 1), (2, 2), (3, 3), (0, 2), (2, 0), (1, 3), (3, 1)]:
        off[i, j] = 0
    assert np.all(off == 0.0)
    c, d = s[0, 2], s[1, 3]
    assert c >= abs(d)


def test_random_standard_form_pure():
    s = random_standard_form(1.0, seed=3)
    assert np.allclose(symplectic_eigenvalues(s), 0.5, atol=1e-12)
    assert s[0, 0] == s[2, 2] and s[0, 2] == -s[1, 3]


def test_random_standard_form_errors():
    with pytest.raises(ValueError):
        random_standard_form(1.5, seed=0)
    with pytest.raises(ValueError):
        random_standard_form(0.0, seed=0)
    # a = b = 0.5 cannot reach det = 1/(16 * 0.36)
    with pytest.raises(SamplingExhaustedError):
        random_standard_form(0.6, a_range=(0.5, 0.5), seed=0, max_draws=100)
    # near-pure targets leave a vanishing acceptance region
    with pytest.raises(SamplingExhaustedError):
        random_standard_form(0.98, seed=1, max_draws=2000)


def test_random_standard_forms_streams():
    batch = random_standard_forms(4, 0.6, seed=5)
    assert np.array_equal(batch[2], random_standard_form(0.6, seed=7))
    purities = [purity(s) for s in random_standard_forms(50, 0.6, seed=0)]
    assert np.ptp(purities) < 1e-9
