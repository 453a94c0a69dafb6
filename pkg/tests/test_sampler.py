from decimal import Decimal, getcontext

import numpy as np
import pytest
from scipy.stats import ttest_ind

from chebgibbs.cheb import make_grid
from chebgibbs.sampler import (
    PositivityError,
    SampleRun,
    SamplerConfig,
    _phase_mod_2pi,
    branch_probabilities,
    run_chain,
    run_chain_conformal,
)
from chebgibbs.spectral import SpectralData, leading_eigentriple
from chebgibbs.system import preset_cantor, preset_gauss_restricted
from chebgibbs.transfer import assemble


def _solve(system, n):
    grid = make_grid(n)
    return leading_eigentriple(assemble(system, grid)), grid


@pytest.fixture(scope="module")
def gauss():
    system = preset_gauss_restricted([2, 3, 4, 5, 6], "neg_geometric")
    data, grid = _solve(system, 64)
    return system, data, grid


@pytest.fixture(scope="module")
def cantor():
    system = preset_cantor(1.0 / 3.0)
    data, grid = _solve(system, 32)
    return system, data, grid


class TestBranchProbabilities:
    def test_cantor_equal_weights(self, cantor):
        system, data, grid = cantor
        for x in np.linspace(-1, 1, 7):
            p = branch_probabilities(system, data, grid, float(x))
            np.testing.assert_allclose(p, [0.5, 0.5], atol=1e-13, rtol=0)

    def test_cantor_unequal_weights(self):
        system = preset_cantor(0.4, (0.3, 0.7))
        data, grid = _solve(system, 24)
        p = branch_probabilities(system, data, grid, 0.2)
        np.testing.assert_allclose(p, [0.3, 0.7], atol=1e-13, rtol=0)

    def test_gauss_simplex(self, gauss):
        system, data, grid = gauss
        xs = np.random.default_rng(0).uniform(-1, 1, 1000)
        p = branch_probabilities(system, data, grid, xs)
        np.testing.assert_allclose(p.sum(axis=1), 1.0, atol=5e-16, rtol=0)
        assert np.all(p > 0) and np.all(p < 1)

    def test_footnote_mode(self, gauss):
        system, data, grid = gauss
        xs = np.random.default_rng(1).uniform(-1, 1, 200)
        p_op = branch_probabilities(system, data, grid, xs)
        p_fn = branch_probabilities(system, data, grid, xs, mode="footnote")
        np.testing.assert_allclose(p_fn.sum(axis=1), 1.0, atol=1e-15, rtol=0)
        np.testing.assert_allclose(p_fn, p_op, atol=1e-10, rtol=0)

    def test_positivity_error(self, gauss):
        system, _, grid = gauss
        dip = (np.arange(64) >= 25) & (np.arange(64) <= 40)
        broken = SpectralData(
            pressure=0.0,
            h=np.where(dip, -0.5, 1.0),
            nu=np.full(64, 1.0 / 64),
            mu_weights=np.full(64, 1.0 / 64),
            residuals=(0.0, 0.0),
            N=64,
        )
        with pytest.raises(PositivityError):
            branch_probabilities(system, broken, grid, np.linspace(-1, 1, 100))

    def test_mode_validated(self, gauss):
        system, data, grid = gauss
        with pytest.raises(ValueError):
            branch_probabilities(system, data, grid, 0.0, mode="cheap")


class TestRunChain:
    def test_bitwise_determinism(self, gauss):
        system, data, grid = gauss
        config = SamplerConfig(T=20_000, T0=500, seed=42, replicas=4)
        a = run_chain(system, data, grid, config, lambda x: x)
        b = run_chain(system, data, grid, config, lambda x: x)
        np.testing.assert_array_equal(a.replica_values, b.replica_values)
        assert a.estimate == b.estimate and a.std_error == b.std_error

    def test_constant_observable_exact(self, cantor):
        system, data, grid = cantor
        run = run_chain(system, data, grid,
                        SamplerConfig(T=5_000, T0=100, seed=3, replicas=4),
                        lambda x: np.ones_like(x))
        np.testing.assert_array_equal(run.replica_values, np.ones(4))
        assert run.estimate == 1.0
        assert run.std_error == 0.0
        assert run.ci == (1.0, 1.0)

    def test_symmetric_cantor_mean_zero(self, cantor):
        system, data, grid = cantor
        run = run_chain(system, data, grid,
                        SamplerConfig(T=100_000, T0=2_000, seed=8, replicas=8),
                        lambda x: x)
        assert abs(run.estimate) <= 5.0 * run.std_error

    def test_clt_scaling(self, cantor):
        system, data, grid = cantor
        se = {}
        for t in (1_000, 100_000):
            run = run_chain(system, data, grid,
                            SamplerConfig(T=t, T0=1_000, seed=1, replicas=16),
                            lambda x: x)
            se[t] = run.std_error
        ratio = se[100_000] / se[1_000]
        assert 0.05 <= ratio <= 0.2  # T^{-1/2} within a factor of two

    def test_burn_in_sufficiency(self, gauss):
        system, data, grid = gauss
        base = run_chain(system, data, grid,
                         SamplerConfig(T=100_000, T0=10_000, seed=1, replicas=8),
                         lambda x: x)
        doubled = run_chain(system, data, grid,
                            SamplerConfig(T=100_000, T0=20_000, seed=1, replicas=8),
                            lambda x: x)
        assert abs(base.estimate - doubled.estimate) < base.std_error

    def test_footnote_statistically_indistinguishable(self, gauss):
        system, data, grid = gauss
        a = run_chain(system, data, grid,
                      SamplerConfig(T=50_000, T0=5_000, seed=1, replicas=8), lambda x: x)
        b = run_chain(system, data, grid,
                      SamplerConfig(T=50_000, T0=5_000, seed=101, replicas=8),
                      lambda x: x, mode="footnote")
        _, p = ttest_ind(a.replica_values, b.replica_values, equal_var=False)
        assert p > 0.01

    def test_exact_eval_matches_tabulated(self, gauss):
        system, data, grid = gauss
        config = SamplerConfig(T=20_000, T0=2_000, seed=5, replicas=8)
        tab = run_chain(system, data, grid, config, lambda x: x)
        exact = run_chain(system, data, grid, config, lambda x: x, exact_eval=True)
        spread = max(tab.std_error, exact.std_error)
        assert abs(tab.estimate - exact.estimate) <= 4.0 * spread

    def test_complex_observable(self, cantor):
        system, data, grid = cantor
        run = run_chain(system, data, grid,
                        SamplerConfig(T=5_000, T0=100, seed=2, replicas=4),
                        lambda x: np.exp(-1j * 2.0 * x))
        assert isinstance(run.estimate, complex)
        assert run.ci is None
        assert run.std_error > 0

    def test_single_replica(self, cantor):
        system, data, grid = cantor
        run = run_chain(system, data, grid,
                        SamplerConfig(T=2_000, T0=100, seed=2, replicas=1), lambda x: x)
        assert np.isnan(run.std_error)
        assert run.ci is None

    def test_spectral_cross_check(self, gauss):
        system, data, grid = gauss
        from chebgibbs.measure import integrate

        target = integrate(data, grid, lambda x: x).value
        run = run_chain(system, data, grid,
                        SamplerConfig(T=200_000, T0=5_000, seed=2, replicas=8), lambda x: x)
        lo, hi = run.ci
        assert lo <= target <= hi

    def test_orbit_capture(self, cantor):
        system, data, grid = cantor
        run = run_chain(system, data, grid,
                        SamplerConfig(T=3_000, T0=50, seed=9, replicas=2),
                        lambda x: x, keep_orbit=2_000)
        assert run.orbit.shape == (2_000,)
        assert np.all(np.abs(run.orbit) <= 1.0)
        # after one application of either branch, the middle-thirds gap is empty
        assert not np.any(np.abs(run.orbit) < 1.0 / 3.0 - 1e-9)

    def test_orbit_capped_by_T(self, cantor):
        system, data, grid = cantor
        run = run_chain(system, data, grid,
                        SamplerConfig(T=500, T0=10, seed=9, replicas=1),
                        lambda x: x, keep_orbit=10_000)
        assert run.orbit.shape == (500,)


class TestRunChainConformal:
    def test_constant_h_collapses_to_plain(self, cantor):
        # cantor h is constant to ~1e-15, so the reweighting cancels
        system, data, grid = cantor
        config = SamplerConfig(T=20_000, T0=500, seed=6, replicas=4)
        plain = run_chain(system, data, grid, config, lambda x: x)
        conf = run_chain_conformal(system, data, grid, config, lambda x: x)
        np.testing.assert_allclose(
            conf.replica_values, plain.replica_values, rtol=1e-12, atol=1e-14
        )

    def test_constant_observable_exactly_one(self, gauss):
        system, data, grid = gauss
        run = run_chain_conformal(system, data, grid,
                                  SamplerConfig(T=5_000, T0=200, seed=4, replicas=4),
                                  lambda x: np.ones_like(x))
        np.testing.assert_array_equal(run.replica_values, np.ones(4))

    def test_spectral_cross_check(self, gauss):
        system, data, grid = gauss
        from chebgibbs.measure import integrate_conformal

        target = integrate_conformal(data, grid, lambda x: x).value
        run = run_chain_conformal(system, data, grid,
                                  SamplerConfig(T=200_000, T0=5_000, seed=3, replicas=8),
                                  lambda x: x)
        lo, hi = run.ci
        assert lo <= target <= hi

    def test_unnormalized_variant(self, gauss):
        system, data, grid = gauss
        config = SamplerConfig(T=10_000, T0=500, seed=7, replicas=4)
        ratio = run_chain_conformal(system, data, grid, config, lambda x: x)
        plain = run_chain_conformal(system, data, grid, config, lambda x: x, normalized=False)
        assert ratio.estimate != plain.estimate  # same orbit, different estimator


class TestPythonFallback:
    def test_matches_kernel_statistically(self, gauss, monkeypatch):
        # force the vectorized-numpy block path (used when numba is absent)
        import chebgibbs.sampler as sampler_mod

        system, data, grid = gauss
        config = SamplerConfig(T=20_000, T0=1_000, seed=31, replicas=8)
        fast = run_chain(system, data, grid, config, lambda x: x)
        monkeypatch.setattr(sampler_mod, "_KERNEL", None)
        monkeypatch.setattr(sampler_mod, "_KERNEL_MISSING", True)
        slow = run_chain(system, data, grid, config, lambda x: x)
        rerun = run_chain(system, data, grid, config, lambda x: x)
        np.testing.assert_array_equal(slow.replica_values, rerun.replica_values)
        spread = max(fast.std_error, slow.std_error)
        assert abs(fast.estimate - slow.estimate) <= 4.0 * spread

    def test_constant_observable_exact(self, cantor, monkeypatch):
        import chebgibbs.sampler as sampler_mod

        monkeypatch.setattr(sampler_mod, "_KERNEL", None)
        monkeypatch.setattr(sampler_mod, "_KERNEL_MISSING", True)
        system, data, grid = cantor
        run = run_chain(system, data, grid,
                        SamplerConfig(T=3_000, T0=100, seed=3, replicas=4),
                        lambda x: np.ones_like(x))
        assert run.estimate == 1.0 and run.std_error == 0.0


class TestConfigValidation:
    def test_bad_parameters(self):
        with pytest.raises(ValueError):
            SamplerConfig(T=0)
        with pytest.raises(ValueError):
            SamplerConfig(T=10, T0=-1)
        with pytest.raises(ValueError):
            SamplerConfig(T=10, replicas=0)

    def test_sample_run_fields(self, cantor):
        system, data, grid = cantor
        run = run_chain(system, data, grid,
                        SamplerConfig(T=1_000, T0=10, seed=1, replicas=4), lambda x: x)
        assert isinstance(run, SampleRun)
        assert run.level == 0.95
        assert run.ci[0] <= run.estimate <= run.ci[1]


class TestPhaseReduction:
    def test_small_frequencies_untouched(self):
        x = np.array([[0.25, -0.75]])
        xis = np.array([3.0, 1e6])
        np.testing.assert_array_equal(_phase_mod_2pi(x, xis), x[..., None] * xis)

    def test_high_frequency_matches_decimal_reference(self):
        getcontext().prec = 60
        two_pi = Decimal("6.283185307179586476925286766559005768394338798750211641949889")
        xs = np.array([0.7853981633974483, -0.912837465, 0.3333333333333333])
        xis = np.array([1.23456789012e10, 9.87654321098e11])
        got = _phase_mod_2pi(xs, xis)
        for i, x in enumerate(xs):
            for j, xi in enumerate(xis):
                exact = Decimal(float(x)) * Decimal(float(xi))
                rem = exact - (exact / two_pi).to_integral_value() * two_pi
                want = complex(np.exp(-1j * float(rem)))
                have = complex(np.exp(-1j * got[i, j]))
                assert abs(want - have) < 1e-9
