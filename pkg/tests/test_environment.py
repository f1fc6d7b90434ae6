import math

import numpy as np
import pytest
from scipy import stats as sps

from kpzlab import rng
from kpzlab.environment import (
    Environment,
    EnvironmentSpec,
    null_spec,
    omega_stats,
    omega_values,
    sample_environment,
)


def test_spec_validation():
    with pytest.raises(ValueError):
        EnvironmentSpec("rademacher", 1.5, 0)  # sqrt(eps) > 1
    with pytest.raises(ValueError):
        EnvironmentSpec("uniform_bounded", 0.5, 0, a=2.0)  # a*sqrt(eps) > 1
    with pytest.raises(ValueError):
        EnvironmentSpec("beta_symmetric", 1.2, 0)
    with pytest.raises(ValueError):
        EnvironmentSpec("gaussian", 0.1, 0)
    EnvironmentSpec("uniform_bounded", 0.5, 0, a=1.0)


def test_json_fragment_round_trip():
    for spec in (EnvironmentSpec("rademacher", 0.1, 42),
                 EnvironmentSpec("uniform_bounded", 0.2, 7, a=0.5),
                 EnvironmentSpec("beta_symmetric", 0.05, 9)):
        assert EnvironmentSpec.from_json_fragment(spec.to_json_fragment()) == spec


def test_rademacher_support_and_exact_sigma():
    spec = EnvironmentSpec("rademacher", 0.1, 3)
    env = sample_environment(spec, 50)
    vals = {float(env.omega(i, j)) for i in range(20) for j in range(-20, 21)}
    assert vals == {-1.0, 1.0}
    st = omega_stats(spec, 10**5)
    assert st.two_m2 == 2.0
    assert st.sigma == pytest.approx(math.sqrt(2.0), rel=1e-15)


def test_beta_support_keeps_probabilities_inside_unit_interval():
    spec = EnvironmentSpec("beta_symmetric", 0.1, 5)
    env = sample_environment(spec, 1000)
    w = env.omega(np.zeros(2000, dtype=int), np.arange(2000) - 1000)
    s = math.sqrt(0.1) * np.asarray(w)
    assert np.all(np.abs(s) < 1.0)
    B = env.beta_weight(np.zeros(2000, dtype=int), np.arange(2000) - 1000)
    assert np.all((np.asarray(B) > 0) & (np.asarray(B) < 1))


def test_determinism_and_order_independence():
    spec = EnvironmentSpec("beta_symmetric", 0.1, 11)
    ordered = omega_values(spec, np.arange(50), np.arange(50) - 25)
    shuffled_idx = np.random.RandomState(0).permutation(50)
    shuffled = omega_values(spec, np.arange(50)[shuffled_idx],
                            (np.arange(50) - 25)[shuffled_idx])
    assert np.array_equal(np.asarray(ordered)[shuffled_idx], shuffled)
    # same site twice, scalar vs vector path
    a = sample_environment(spec, 10).omega(3, -1)
    b = float(np.asarray(omega_values(spec, np.array([3]), np.array([-1])))[0])
    assert a == b


def test_zero_mean_all_kinds():
    for spec in (EnvironmentSpec("rademacher", 0.1, 1),
                 EnvironmentSpec("uniform_bounded", 0.1, 2),
                 EnvironmentSpec("beta_symmetric", 0.1, 3)):
        st = omega_stats(spec, 10**5)
        assert abs(st.mean) <= 4.0 * st.mean_se


def test_beta_two_m2_values():
    st = omega_stats(EnvironmentSpec("beta_symmetric", 0.1, 17), 10**5)
    assert st.two_m2 == pytest.approx(2.0 / 2.1, abs=4 * st.two_m2_se)
    # E omega^2 -> 1/2 along shrinking eps
    for eps in (0.1, 0.05, 0.02):
        st = omega_stats(EnvironmentSpec("beta_symmetric", eps, 23), 5 * 10**4)
        assert st.two_m2 / 2 == pytest.approx(1.0 / (2.0 + eps), abs=2 * st.two_m2_se)


def test_beta_sampler_distribution():
    # independent oracle: Kolmogorov-Smirnov against the scipy Beta CDF
    for alpha in (1.0, 4.0, 20.0):
        draws = rng.beta_symmetric(alpha, 99, np.arange(8000))
        ks = sps.kstest(draws, sps.beta(alpha, alpha).cdf)
        assert ks.pvalue > 1e-4, (alpha, ks)


def test_gamma_sampler_moments_and_shape_guard():
    g = rng.gamma_shape_ge1(10.0, 3, np.arange(50000))
    assert np.mean(g) == pytest.approx(10.0, abs=4 * np.std(g) / math.sqrt(50000))
    with pytest.raises(ValueError):
        rng.gamma_shape_ge1(0.5, 0, 0)


def test_out_of_bounds_access_rejected():
    env = sample_environment(EnvironmentSpec("rademacher", 0.1, 0), 10)
    with pytest.raises(IndexError):
        env.omega(10, 0)
    with pytest.raises(IndexError):
        env.omega(0, 11)
    with pytest.raises(ValueError):
        Environment(EnvironmentSpec("rademacher", 0.1, 0), 0)


def test_null_spec_gives_zero_field():
    env = sample_environment(null_spec(0.3), 10)
    assert float(env.omega(2, 0)) == 0.0
    assert float(env.beta_weight(2, 0)) == 0.5
