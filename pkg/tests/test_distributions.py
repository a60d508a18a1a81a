# -*- coding: utf-8 -*-
"""原子 + 密度分布：配对、卷积、互相关、微分与符号重构"""
import numpy as np
import pytest
from numpy.testing import assert_allclose

from core.distributions import (Distribution, convolve, cross_correlate, delta_at, distr_derivative,
                                from_density, pair, reconstruct_symbol)
from core.exceptions import (BoundaryTermError, CapabilityError, GridMismatchError, OperatorError,
                             ParameterError, SupportError)
from core.halfline import DecayTag, build_grid, sample, shift_fn


@pytest.fixture(scope="module")
def exp_density(exp_fn):
    return from_density(exp_fn)


class TestConstruction:

    def test_delta_at(self):
        d = delta_at(1.0, 2)
        assert d.atoms == ((1.0, 2, 1 + 0j),)
        assert d.is_atomic
        assert d.max_order == 2

    def test_negative_location_rejected(self):
        with pytest.raises(SupportError):
            delta_at(-0.5)
        with pytest.raises(SupportError):
            Distribution([(-1.0, 0, 1.0)])

    def test_negative_density_offset_rejected(self, exp_fn):
        with pytest.raises(SupportError):
            from_density(exp_fn, -1.0)

    def test_bad_order_rejected(self):
        with pytest.raises(ParameterError):
            Distribution([(0.0, 1.5, 1.0)])

    def test_atoms_merged_and_zero_weights_dropped(self):
        d = Distribution([(1.0, 0, 1.0), (1.0, 0, 2.0), (2.0, 1, 1.0), (2.0, 1, -1.0)])
        assert d.atoms == ((1.0, 0, 3 + 0j),)

    def test_densities_on_different_grids_rejected(self, exp_fn, coarse_grid):
        other = sample(lambda t: np.exp(-t), coarse_grid)
        with pytest.raises(GridMismatchError):
            Distribution(densities=[(exp_fn, 0.0), (other, 1.0)])

    def test_arithmetic(self, exp_density):
        d = delta_at(1.0) + exp_density
        assert d.sup_distance(exp_density + delta_at(1.0)) == 0.0
        assert (d - d).sup_distance(Distribution()) == 0.0
        assert (2 * d).atoms == ((1.0, 0, 2 + 0j),)


class TestPairing:

    def test_unit_evaluates_at_zero(self, exp_fn):
        assert pair(delta_at(0.0), exp_fn) == pytest.approx(1.0)

    def test_derivative_atom(self, exp_fn):
        assert abs(pair(delta_at(1.0, 1), exp_fn) - np.exp(-1.0)) < 1e-6

    def test_density(self, t_exp_fn, exp_fn):
        assert abs(pair(from_density(t_exp_fn), exp_fn) - 0.25) < 1e-8

    def test_shifted_density(self, exp_fn, grid):
        # ∫e^{-t}·e^{-(t+1)}dt = e^{-1}/2
        f = from_density(exp_fn, 1.0)
        assert abs(pair(f, exp_fn) - np.exp(-1.0) / 2) < 1e-7

    def test_order_above_capability(self, exp_fn):
        with pytest.raises(CapabilityError):
            pair(delta_at(0.0, 4), exp_fn)

    def test_grid_mismatch(self, exp_density, coarse_grid):
        phi = sample(lambda t: np.exp(-t), coarse_grid)
        with pytest.raises(GridMismatchError):
            pair(exp_density, phi)


class TestConvolution:

    def test_atoms_add_locations(self):
        assert convolve(delta_at(0.5), delta_at(1.5)).atoms == ((2.0, 0, 1 + 0j),)

    def test_atom_orders_add(self):
        assert convolve(delta_at(0.0, 1), delta_at(1.0, 2)).atoms == ((1.0, 3, 1 + 0j),)

    def test_unit_law(self, exp_density):
        f = exp_density + delta_at(2.0, 1)
        assert convolve(delta_at(0.0), f).sup_distance(f) == 0.0

    def test_densities(self, grid):
        a = from_density(sample(lambda t: np.exp(-t), grid, DecayTag.EXPONENTIAL))
        b = from_density(sample(lambda t: np.exp(-2 * t), grid, DecayTag.EXPONENTIAL))
        out = convolve(a, b)
        expected = np.exp(-grid.nodes) - np.exp(-2 * grid.nodes)
        assert np.max(np.abs(out.density.values - expected)) < 1e-6
        assert out.density.metadata["truncated_mass"] < 1e-6

    def test_densities_on_laguerre_grid(self):
        grid = build_grid(64, 20.0, "gauss_laguerre_mapped")
        a = from_density(sample(lambda t: np.exp(-t), grid, DecayTag.EXPONENTIAL))
        b = from_density(sample(lambda t: np.exp(-2 * t), grid, DecayTag.EXPONENTIAL))
        out = convolve(a, b)
        expected = np.exp(-grid.nodes) - np.exp(-2 * grid.nodes)
        assert out.density.values[0] == 0
        assert np.max(np.abs(out.density.values - expected)) < 1e-4
        assert "truncated_mass" in out.density.metadata

    def test_commutative(self, exp_density, gauss_fn):
        f = exp_density + delta_at(1.0)
        g = from_density(gauss_fn) + delta_at(0.5, 1)
        assert convolve(f, g).sup_distance(convolve(g, f)) < 1e-12

    def test_atom_times_density_emits_jump_atoms(self, exp_fn):
        # D(e^{-t}H(t)) = -e^{-t}H(t) + δ
        out = convolve(delta_at(1.0, 1), from_density(exp_fn))
        assert len(out.atoms) == 1
        a, m, w = out.atoms[0]
        assert (a, m) == (1.0, 0)
        assert w == pytest.approx(1.0)
        assert out.densities[0].offset == 1.0
        assert np.max(np.abs(out.densities[0].fn.values + exp_fn.values)) < 1e-4

    def test_order_above_capability(self):
        with pytest.raises(CapabilityError):
            convolve(delta_at(0.0, 2), delta_at(0.0, 2))


class TestCrossCorrelation:

    def test_unit(self, gauss_fn):
        assert_allclose(cross_correlate(delta_at(0.0), gauss_fn).values, gauss_fn.values, rtol=0, atol=0)

    def test_atom_shifts(self, gauss_fn, grid):
        a = 8 * grid.spacing
        out = cross_correlate(delta_at(a), gauss_fn)
        assert_allclose(out.values, shift_fn(gauss_fn, a).values, rtol=0, atol=0)

    def test_associativity(self, exp_density, gauss_fn):
        f = delta_at(1.0)
        lhs = cross_correlate(convolve(f, exp_density), gauss_fn)
        rhs = cross_correlate(f, cross_correlate(exp_density, gauss_fn))
        assert lhs.sup_distance(rhs) < 1e-6

    @pytest.mark.parametrize("s", [0.0, 0.3, 1.0])
    def test_shift_intertwining(self, exp_density, gauss_fn, s):
        f = exp_density + delta_at(1.0)
        lhs = cross_correlate(f, shift_fn(gauss_fn, s))
        rhs = shift_fn(cross_correlate(f, gauss_fn), s)
        assert lhs.sup_distance(rhs) < 1e-6

    def test_density_value_at_zero_is_pairing(self, exp_density, gauss_fn):
        out = cross_correlate(exp_density, gauss_fn)
        assert abs(out.values[0] - pair(exp_density, gauss_fn)) < 1e-12


class TestDerivative:

    def test_atom_order_increments(self):
        assert distr_derivative(delta_at(2.0)).atoms == ((2.0, 1, 1 + 0j),)

    def test_density(self, t_exp_fn, grid):
        d = distr_derivative(from_density(t_exp_fn))
        assert np.max(np.abs(d.density.values - (1 - grid.nodes) * np.exp(-grid.nodes))) < 1e-4

    def test_duality_atoms(self, gauss_fn):
        for f in (delta_at(0.5), delta_at(1.0, 1), delta_at(0.0, 2)):
            lhs = pair(distr_derivative(f), gauss_fn)
            rhs = pair(f, gauss_fn.derivative(1))
            assert abs(lhs + rhs) < 1e-8

    def test_duality_density(self, t_exp_fn, exp_fn):
        f = from_density(t_exp_fn)
        assert abs(pair(distr_derivative(f), exp_fn) + pair(f, exp_fn.derivative(1))) < 1e-6

    def test_boundary_term_refused(self, exp_density):
        with pytest.raises(BoundaryTermError):
            distr_derivative(exp_density)

    def test_boundary_term_as_atom(self, exp_density, gauss_fn):
        d = distr_derivative(exp_density, boundary="atom")
        assert d.atoms[0][:2] == (0.0, 0)
        assert d.atoms[0][2] == pytest.approx(1.0)
        assert abs(pair(d, gauss_fn) + pair(exp_density, gauss_fn.derivative(1))) < 1e-6

    def test_unknown_policy(self, exp_density):
        with pytest.raises(ParameterError):
            distr_derivative(exp_density, boundary="drop")

    def test_order_above_capability(self):
        with pytest.raises(CapabilityError):
            distr_derivative(delta_at(0.0, 3))


class TestReconstructSymbol:

    def test_identity_gives_unit(self, exp_fn, gauss_fn):
        report = reconstruct_symbol(lambda phi: phi, [exp_fn, gauss_fn], ["exp", "gauss"])
        assert report.probes == ["exp", "gauss"]
        assert_allclose(report.values, [1.0, 1.0])

    def test_shift_gives_atom(self, exp_fn, gauss_fn):
        a = 0.7
        report = reconstruct_symbol(lambda phi: cross_correlate(delta_at(a), phi), [exp_fn, gauss_fn])
        assert report.max_deviation(delta_at(a), [exp_fn, gauss_fn]) < 1e-8

    def test_density_round_trip(self, exp_density, corpus):
        probes = [corpus.phis[name] for name in sorted(corpus.phis)]
        report = reconstruct_symbol(lambda phi: cross_correlate(exp_density, phi), probes)
        assert report.max_deviation(exp_density, probes) < 1e-6
        assert len(report.to_records()) == len(probes)

    def test_operator_failure_wrapped(self, exp_fn):
        def broken(phi):
            raise RuntimeError("boom")

        with pytest.raises(OperatorError):
            reconstruct_symbol(broken, [exp_fn], ["exp"])

    def test_name_count_must_match(self, exp_fn, gauss_fn):
        with pytest.raises(ParameterError):
            reconstruct_symbol(lambda phi: phi, [exp_fn, gauss_fn], ["exp"])
        with pytest.raises(ParameterError):
            reconstruct_symbol(lambda phi: phi, [exp_fn], ["exp", "gauss"])
