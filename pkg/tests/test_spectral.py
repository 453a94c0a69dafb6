import math

import numpy as np
import pytest

from chebgibbs.cheb import make_grid
from chebgibbs.expr import BinOp, Const
from chebgibbs.spectral import (
    ConvergenceError,
    InvalidEigenvectorError,
    eigenfunction,
    from_json,
    leading_eigentriple,
    to_json,
)
from chebgibbs.system import Branch, IFSSystem, preset_cantor, preset_gauss_restricted
from chebgibbs.transfer import TransferMatrix, assemble


def _solve(system, n, **kwargs):
    grid = make_grid(n)
    return leading_eigentriple(assemble(system, grid), **kwargs), grid


@pytest.fixture(scope="module")
def gauss_system():
    return preset_gauss_restricted([2, 3, 4, 5, 6], "neg_geometric")


class TestLeadingEigentriple:
    def test_cantor_equal_weights_trivial_pressure(self):
        system = preset_cantor(1.0 / 3.0)
        for n in (4, 32, 100):
            data, _ = _solve(system, n)
            assert abs(data.pressure) <= 1e-13
            assert np.ptp(data.h) <= 1e-12  # constant eigenfunction
            assert max(data.residuals) <= 1e-12

    def test_cantor_unequal_weights(self):
        data, _ = _solve(preset_cantor(0.4, (0.3, 0.7)), 32)
        assert abs(data.pressure) <= 1e-13
        assert np.ptp(data.h) <= 1e-12
        # with h constant the equilibrium weights are proportional to nu
        ratio = data.mu_weights / data.nu
        assert np.ptp(ratio / ratio[0]) <= 1e-10

    def test_mu_normalized(self, gauss_system):
        data, _ = _solve(gauss_system, 64)
        assert abs(data.mu_weights.sum() - 1.0) <= 1e-13

    def test_normalization_conventions(self, gauss_system):
        data, _ = _solve(gauss_system, 48)
        assert np.max(np.abs(data.h)) == pytest.approx(1.0, abs=1e-15)
        assert np.all(data.h > 0)
        assert float(data.nu @ data.h) == pytest.approx(1.0, abs=1e-14)

    def test_pressure_self_convergence(self, gauss_system):
        # oracle: the same computation at twice the resolution
        d100, _ = _solve(gauss_system, 100)
        d200, _ = _solve(gauss_system, 200)
        assert abs(d100.pressure - d200.pressure) <= 1e-12

    def test_left_right_consistency(self, gauss_system):
        data, grid = _solve(gauss_system, 64)
        matrix = assemble(gauss_system, grid)
        lhs = float(data.nu @ (matrix.entries @ data.h))
        rhs = math.exp(data.pressure) * float(data.nu @ data.h)
        assert abs(lhs - rhs) <= 1e-12 * abs(rhs)

    def test_scale_invariance(self, gauss_system):
        # adding a constant c to every potential shifts the pressure by c
        # and leaves the equilibrium weights untouched
        c = 0.7
        shifted = IFSSystem(
            tuple(
                Branch(map=b.map, weight=BinOp("+", b.weight, Const(c)), label=b.label)
                for b in gauss_system.branches
            ),
            name="shifted",
        )
        base, _ = _solve(gauss_system, 48)
        bumped, _ = _solve(shifted, 48)
        assert bumped.pressure - base.pressure == pytest.approx(c, abs=1e-12)
        np.testing.assert_allclose(bumped.mu_weights, base.mu_weights, atol=1e-12, rtol=0)

    def test_dense_method_agrees(self, gauss_system):
        power, _ = _solve(gauss_system, 40)
        dense, _ = _solve(gauss_system, 40, method="dense")
        assert abs(power.pressure - dense.pressure) <= 1e-12
        np.testing.assert_allclose(power.mu_weights, dense.mu_weights, atol=1e-10, rtol=0)

    def test_unknown_method(self, gauss_system):
        grid = make_grid(8)
        with pytest.raises(ValueError):
            leading_eigentriple(assemble(gauss_system, grid), method="qr")

    def test_nonconvergent_matrix(self):
        # eigenvalues +-1: the power iterate oscillates forever
        system = preset_cantor(0.5)
        spinner = TransferMatrix(
            grid=make_grid(2), entries=np.array([[0.0, 2.0], [0.5, 0.0]]), system=system
        )
        with pytest.raises(ConvergenceError):
            leading_eigentriple(spinner, max_iter=200)

    def test_negative_eigenfunction_rejected(self):
        system = preset_cantor(0.5)
        mixed = TransferMatrix(
            grid=make_grid(2), entries=np.array([[1.0, -2.0], [-2.0, 1.0]]), system=system
        )
        with pytest.raises(InvalidEigenvectorError):
            leading_eigentriple(mixed)


class TestEigenfunction:
    def test_constant_vector(self):
        data, grid = _solve(preset_cantor(0.5), 16)
        c = data.h[0]
        for x in np.linspace(-1, 1, 9):
            assert eigenfunction(data, grid, x) == pytest.approx(c, abs=1e-13)

    def test_node_values_exact(self, gauss_system):
        data, grid = _solve(gauss_system, 20)
        for j, node in enumerate(grid.nodes):
            assert eigenfunction(data, grid, node) == data.h[j]

    def test_resolution_self_agreement(self, gauss_system):
        # sup-at-nodes normalization pins h at different boundary nodes for
        # different N, so match normalization at a common point first
        d80, g80 = _solve(gauss_system, 80)
        d160, g160 = _solve(gauss_system, 160)
        rng = np.random.default_rng(17)
        xs = rng.uniform(-1, 1, 50)
        v80 = np.array([eigenfunction(d80, g80, x) for x in xs]) / eigenfunction(d80, g80, 0.0)
        v160 = np.array([eigenfunction(d160, g160, x) for x in xs]) / eigenfunction(d160, g160, 0.0)
        np.testing.assert_allclose(v80, v160, atol=1e-10, rtol=0)


class TestSerialization:
    def test_json_round_trip(self, gauss_system):
        data, _ = _solve(gauss_system, 24)
        again, grid = from_json(to_json(data))
        assert again.pressure == data.pressure
        np.testing.assert_array_equal(again.h, data.h)
        np.testing.assert_array_equal(again.nu, data.nu)
        np.testing.assert_array_equal(again.mu_weights, data.mu_weights)
        assert again.residuals == data.residuals
        assert again.N == data.N == grid.N
        assert again.system_name == data.system_name
