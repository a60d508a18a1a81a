# -*- coding: utf-8 -*-
"""分次代数：⊛、K⊗、T⊗、𝔻 与分次配对"""
import numpy as np
import pytest
from numpy.testing import assert_allclose

from core.distributions import (convolve, cross_correlate, delta_at, from_density, pair,
                                reconstruct_symbol)
from core.exceptions import CapabilityError, DegreeMismatchError, GridMismatchError, ParameterError
from core.fock import (PolyDist, PolyTest, boxtimes, cross_corr_poly, poly_D_dist, poly_D_test, poly_pair,
                       poly_shift, poly_sup_distance, power_dist, power_test, probe_indices, unit_dist)
from core.halfline import sample, shift_fn


@pytest.fixture(scope="module")
def exp_density(exp_fn):
    return from_density(exp_fn)


@pytest.fixture(scope="module")
def t2_exp_fn(grid):
    return sample(lambda t: t ** 2 * np.exp(-t), grid)


class TestPolyTest:

    def test_power_test_degree_zero(self, exp_fn):
        p = power_test(exp_fn, 0)
        assert p.max_degree == 0
        assert p.scalar == 1

    def test_power_test_terms(self, exp_fn):
        p = power_test(exp_fn, 2)
        assert p.scalar == 1
        assert p.degree_terms(1) == [(1 + 0j, (exp_fn,))]
        assert p.degree_terms(2) == [(1 + 0j, (exp_fn, exp_fn))]

    def test_sample_is_product(self, exp_fn, grid):
        idx = probe_indices(grid)
        values = power_test(exp_fn, 2).sample(2, idx)
        t = grid.nodes[idx]
        assert_allclose(values, np.outer(np.exp(-t), np.exp(-t)), rtol=1e-12)

    def test_sample_symmetrizes(self, exp_fn, gauss_fn, grid):
        p = PolyTest(2, {2: [(1.0, (exp_fn, gauss_fn))]})
        values = p.sample(2)
        assert_allclose(values, values.T, rtol=0, atol=1e-15)

    def test_canonical_order_merges_terms(self, exp_fn, gauss_fn):
        p = PolyTest(2, {2: [(1.0, (exp_fn, gauss_fn)), (2.0, (gauss_fn, exp_fn))]})
        assert len(p.degree_terms(2)) == 1
        assert p.degree_terms(2)[0][0] == 3
        q = PolyTest(2, {2: [(3.0, (gauss_fn, exp_fn))]})
        assert p.content_hash == q.content_hash

    def test_factor_count_checked(self, exp_fn):
        with pytest.raises(DegreeMismatchError):
            PolyTest(2, {2: [(1.0, (exp_fn,))]})

    def test_degree_above_max_rejected(self, exp_fn):
        with pytest.raises(DegreeMismatchError):
            PolyTest(1, {2: [(1.0, (exp_fn, exp_fn))]})

    def test_negative_degree_rejected(self, exp_fn):
        with pytest.raises(ParameterError):
            power_test(exp_fn, -1)

    def test_mixed_grids_rejected(self, exp_fn, coarse_grid):
        other = sample(lambda t: np.exp(-t), coarse_grid)
        with pytest.raises(GridMismatchError):
            PolyTest(2, {2: [(1.0, (exp_fn, other))]})

    def test_arithmetic(self, exp_fn):
        p = power_test(exp_fn, 2)
        assert poly_sup_distance(p + p, 2 * p) == 0.0
        assert poly_sup_distance(p - p, PolyTest(2)) == 0.0


class TestBoxtimes:

    def test_unit(self, exp_density):
        F = power_dist(exp_density + delta_at(1.0), 3)
        out = boxtimes(F, unit_dist(3))
        for n in range(1, 4):
            assert out.diagonal[n][0][1].sup_distance(F.diagonal[n][0][1]) == 0.0
        assert out.scalar == 1

    def test_atoms(self):
        out = boxtimes(power_dist(delta_at(0.5), 2), power_dist(delta_at(1.0), 2))
        expected = power_dist(delta_at(1.5), 2)
        for n in (1, 2):
            assert out.diagonal[n][0][1].atoms == expected.diagonal[n][0][1].atoms

    def test_commutative(self, exp_density, gauss_fn):
        F = power_dist(exp_density, 2)
        G = power_dist(from_density(gauss_fn) + delta_at(1.0), 2)
        lhs, rhs = boxtimes(F, G), boxtimes(G, F)
        for n in (1, 2):
            assert lhs.diagonal[n][0][1].sup_distance(rhs.diagonal[n][0][1]) < 1e-12

    def test_degree1_slice_is_convolution(self, exp_density):
        f, g = delta_at(1.0), exp_density
        out = boxtimes(power_dist(f, 1), power_dist(g, 1))
        assert out.diagonal[1][0][1].sup_distance(convolve(f, g)) == 0.0

    def test_scalars_multiply(self):
        F = power_dist(delta_at(1.0), 1).scaled(2.0)
        G = power_dist(delta_at(0.0), 1).scaled(3.0)
        out = boxtimes(F, G)
        assert out.scalar == 6
        assert out.diagonal[1][0][0] == 6

    def test_pads_smaller_degree(self):
        out = boxtimes(power_dist(delta_at(1.0), 1), power_dist(delta_at(1.0), 2))
        assert out.max_degree == 2
        assert out.diagonal[2] == []

    def test_general_terms_refused(self):
        D = poly_D_dist(power_dist(delta_at(1.0), 2))
        with pytest.raises(CapabilityError):
            boxtimes(D, unit_dist(2))


class TestCrossCorrelation:

    def test_unit(self, exp_fn):
        p = power_test(exp_fn, 3)
        assert cross_corr_poly(unit_dist(3), p).content_hash == p.content_hash

    def test_power_maps_to_power(self, exp_density, gauss_fn):
        out = cross_corr_poly(power_dist(exp_density, 2), power_test(gauss_fn, 2))
        expected = power_test(cross_correlate(exp_density, gauss_fn), 2)
        assert out.content_hash == expected.content_hash

    def test_degree_mismatch(self, exp_fn):
        with pytest.raises(DegreeMismatchError):
            cross_corr_poly(unit_dist(1), power_test(exp_fn, 2))

    def test_homomorphism(self, exp_density, gauss_fn):
        F = power_dist(delta_at(1.0), 2)
        G = power_dist(exp_density, 2)
        p = power_test(gauss_fn, 2)
        lhs = cross_corr_poly(boxtimes(F, G), p)
        rhs = cross_corr_poly(F, cross_corr_poly(G, p))
        assert poly_sup_distance(lhs, rhs) < 1e-6

    @pytest.mark.parametrize("s", [0.3, 1.0])
    def test_commutant(self, exp_density, gauss_fn, s):
        F = power_dist(exp_density + delta_at(1.0), 2)
        p = power_test(gauss_fn, 2)
        lhs = cross_corr_poly(F, poly_shift(p, s))
        rhs = poly_shift(cross_corr_poly(F, p), s)
        assert poly_sup_distance(lhs, rhs) < 1e-6

    def test_degree1_round_trip(self, exp_density, corpus):
        F = power_dist(exp_density, 2)
        probes = [corpus.phis[name] for name in sorted(corpus.phis)]

        def K(phi):
            out = cross_corr_poly(F, PolyTest(2, {1: [(1.0, (phi,))]}))
            return out.degree_terms(1)[0][1][0]

        report = reconstruct_symbol(K, probes)
        assert report.max_deviation(exp_density, probes) < 1e-6


class TestShift:

    def test_zero_shift(self, exp_fn):
        p = power_test(exp_fn, 2)
        assert poly_shift(p, 0.0) is p

    def test_power_shift(self, gauss_fn):
        out = poly_shift(power_test(gauss_fn, 2), 0.5)
        assert out.content_hash == power_test(shift_fn(gauss_fn, 0.5), 2).content_hash

    def test_negative_shift(self, exp_fn):
        with pytest.raises(ParameterError):
            poly_shift(power_test(exp_fn, 1), -1.0)


class TestDerivation:

    def test_degree_one_and_two(self, t2_exp_fn):
        d = poly_D_test(power_test(t2_exp_fn, 2))
        dphi = t2_exp_fn.derivative(1)
        assert d.scalar == 0
        assert d.degree_terms(1) == [(1 + 0j, (dphi,))]
        (coef, factors), = d.degree_terms(2)
        assert coef == 2
        assert {fn.content_hash for fn in factors} == {t2_exp_fn.content_hash, dphi.content_hash}

    def test_dist_side_is_general(self):
        D = poly_D_dist(power_dist(delta_at(1.0), 2))
        assert not D.is_diagonal
        assert D.scalar == 0
        (coef, factors), = D.general[2]
        assert coef == 2
        assert sorted(f.atoms[0].m for f in factors) == [0, 1]

    def test_differential_property(self, t2_exp_fn):
        F = power_dist(delta_at(1.0), 2)
        p = power_test(t2_exp_fn, 2)
        lhs = cross_corr_poly(poly_D_dist(F), p)
        rhs = cross_corr_poly(F, poly_D_test(p))
        assert poly_sup_distance(lhs, -rhs) < 1e-4

    def test_differential_property_with_density(self, t_exp_fn, gauss_fn):
        F = power_dist(from_density(t_exp_fn), 2)
        p = power_test(gauss_fn, 2)
        lhs = cross_corr_poly(poly_D_dist(F), p)
        rhs = cross_corr_poly(F, poly_D_test(p))
        assert poly_sup_distance(lhs, -rhs) < 1e-4


class TestPairing:

    def test_unit_evaluates_at_origin(self, exp_fn, gauss_fn):
        p = power_test(exp_fn, 2) + PolyTest(2, {2: [(2.0, (exp_fn, gauss_fn))]})
        # 1 + 1 + 1 + 2·1·1
        assert poly_pair(unit_dist(2), p) == pytest.approx(5.0)

    def test_degree1_slice(self, exp_density, gauss_fn):
        F = PolyDist(1, {1: [(1.0, exp_density)]})
        p = PolyTest(1, {1: [(1.0, (gauss_fn,))]})
        assert poly_pair(F, p) == pytest.approx(pair(exp_density, gauss_fn), abs=1e-14)

    def test_bruteforce_tensor_quadrature(self, coarse_grid):
        rho = sample(lambda t: t * np.exp(-t), coarse_grid)
        phi = sample(lambda t: np.exp(-t), coarse_grid)
        psi = sample(lambda t: np.exp(-t ** 2), coarse_grid)
        F = PolyDist(2, {2: [(1.0, from_density(rho))]})
        p = PolyTest(2, {2: [(1.0, (phi, psi))]})
        idx = np.arange(coarse_grid.n_points)
        wr = coarse_grid.weights * rho.values
        brute = np.sum(np.outer(wr, wr) * p.sample(2, idx))
        assert abs(poly_pair(F, p) - brute) < 1e-10

    def test_general_terms_pair(self, t_exp_fn, exp_fn):
        F = power_dist(from_density(t_exp_fn), 1)
        p = power_test(exp_fn, 1)
        # ⟨𝔻F, p⟩ = -⟨F, 𝔻p⟩
        lhs = poly_pair(poly_D_dist(F), p)
        rhs = poly_pair(F, poly_D_test(p))
        assert abs(lhs + rhs) < 1e-6

    def test_weak_distance(self, exp_density, exp_fn):
        F = power_dist(exp_density, 1)
        probes = [power_test(exp_fn, 1)]
        assert F.weak_distance(F, probes) == 0.0
        assert F.weak_distance(F.scaled(2.0), probes) > 0.1
