# -*- coding: utf-8 -*-
"""生成元系统、演算映射 𝓛 / Φ 与Gauss半群"""
import numpy as np
import pytest

from core.distributions import delta_at, from_density
from core.exceptions import DegreeMismatchError, DomainError, ParameterError, ResolutionError
from core.fock import (PolyTest, boxtimes, cross_corr_poly, poly_D_dist, poly_D_test, poly_shift,
                       power_dist, power_test, unit_dist)
from core.halfline import build_grid, sample
from core.opcalc import (FockState, GeneratorSystem, ScalarGenerator, SecondDerivativeGenerator,
                         block_indices, calculus_apply, closed_form_gaussian, contraction_report,
                         gaussian_apply, marginal_apply, opshift_apply, phi_apply)
from core.transforms import laplace_eval, laplace_fn

RATES = [0.5, 1.0, 2.0]


@pytest.fixture
def random_state(spatial):
    return FockState.random_symmetric(7, (1, 2), spatial["L"], spatial["nodes_per_axis"])


@pytest.fixture
def gaussian_state(spatial):
    return FockState.gaussian((1, 2), spatial["L"], spatial["nodes_per_axis"], y0=1.0)


@pytest.fixture(scope="module")
def scalar_system():
    return GeneratorSystem.scalar(RATES, 3)


def _close(a: FockState, b: FockState, tol: float, scale: FockState) -> bool:
    return a.distance(b) <= tol * (1 + scale.norm())


class TestBlocks:

    @pytest.mark.parametrize("n, expected", [(0, (1, 0)), (1, (1, 1)), (2, (2, 3)), (3, (4, 6))])
    def test_block_indices(self, n, expected):
        assert block_indices(n) == expected

    def test_negative_block(self):
        with pytest.raises(ParameterError):
            block_indices(-1)

    def test_from_flat(self):
        gens = [ScalarGenerator.decaying(r) for r in range(1, 7)]
        system = GeneratorSystem.from_flat(gens)
        assert system.block(1) == (gens[0],)
        assert system.block(3) == tuple(gens[3:6])
        assert system.flat(3) == gens
        assert system.block(0) == ()

    def test_from_flat_incomplete_block(self):
        gens = [ScalarGenerator.decaying(1.0)] * 4
        with pytest.raises(DegreeMismatchError):
            GeneratorSystem.from_flat(gens)

    def test_block_size_checked(self):
        with pytest.raises(DegreeMismatchError):
            GeneratorSystem({2: [ScalarGenerator.decaying(1.0)]})

    def test_missing_block(self, exp_fn, random_state):
        system = GeneratorSystem.scalar(RATES, 1)
        with pytest.raises(DegreeMismatchError):
            calculus_apply(power_test(exp_fn, 2), system, random_state)

    def test_gaussian_block_commutes(self, random_state):
        system = GeneratorSystem.gaussian()
        assert len(system.block(2)) == 2
        assert system.commutation_error(2, random_state, [0.1, 0.4]) < 1e-10

    def test_bad_axis(self):
        with pytest.raises(ParameterError):
            SecondDerivativeGenerator(1, 1)


class TestFockState:

    def test_random_state_is_symmetric(self, random_state):
        assert random_state.is_symmetric()
        assert random_state.degrees == [1, 2]

    def test_gaussian_norm(self, spatial):
        y = FockState.gaussian((1,), spatial["L"], spatial["nodes_per_axis"])
        assert y.norm() == pytest.approx(np.pi ** 0.25, rel=1e-10)

    def test_invalid_component(self):
        with pytest.raises(ParameterError):
            FockState(0.0, {2: np.zeros((4, 5))})
        with pytest.raises(ParameterError):
            FockState(0.0, {1: np.zeros(4)}, L=0.0)

    def test_arithmetic(self, random_state):
        assert (random_state - random_state).norm() == 0.0
        assert (2 * random_state).norm() == pytest.approx(2 * random_state.norm())
        assert random_state.zeros_like().norm() == 0.0

    def test_symmetrized(self, spatial):
        rng = np.random.default_rng(3)
        M = spatial["nodes_per_axis"][2]
        y = FockState(0.0, {2: rng.normal(size=(M, M))}, spatial["L"], check_symmetry=False)
        assert not y.is_symmetric()
        assert y.symmetrized().is_symmetric(1e-15)

    def test_asymmetric_component_rejected(self, spatial):
        rng = np.random.default_rng(5)
        M = spatial["nodes_per_axis"][2]
        with pytest.raises(ParameterError, match="不对称"):
            FockState(0.0, {2: rng.normal(size=(M, M))}, spatial["L"])
        arr = FockState.gaussian((3,), spatial["L"], spatial["nodes_per_axis"]).components[3].copy()
        arr[0, 1, 2] += 1e-3
        with pytest.raises(ParameterError):
            FockState(0.0, {3: arr}, spatial["L"])
        assert FockState(0.0, {1: rng.normal(size=M)}, spatial["L"]).degrees == [1]

    def test_single_axis_evolution_is_not_validated(self, spatial):
        y = FockState.gaussian((2,), spatial["L"], spatial["nodes_per_axis"])
        moved = SecondDerivativeGenerator(2, 0).apply_semigroup(0.3, y)
        assert not moved.is_symmetric()
        assert (moved + moved).norm() == pytest.approx(2 * moved.norm())


class TestMarginal:

    def test_scalar_is_laplace(self, exp_fn, gauss_fn, random_state):
        for phi in (exp_fn, gauss_fn):
            for rate in (0.5, 1.0 + 1.0j):
                out = marginal_apply(phi, ScalarGenerator.decaying(rate), random_state)
                expected = random_state.scaled(laplace_fn(phi, rate))
                assert out.distance(expected) < 1e-12 * (1 + random_state.norm())

    def test_zero_state(self, exp_fn, random_state):
        out = marginal_apply(exp_fn, ScalarGenerator.decaying(1.0), random_state.zeros_like())
        assert out.norm() == 0.0

    def test_linear_in_symbol(self, gauss_fn, random_state):
        A = SecondDerivativeGenerator(1, 0)
        lhs = marginal_apply(3.0 * gauss_fn, A, random_state)
        rhs = marginal_apply(gauss_fn, A, random_state).scaled(3.0)
        assert lhs.distance(rhs) < 1e-12

    def test_bochner_matches_orbit_sum(self, spatial, random_state):
        grid = build_grid(16, 0.6, "trapezoid")
        phi = sample(lambda t: np.exp(-t), grid, decay_tol=1.0)
        A = SecondDerivativeGenerator(2, 1)
        orbit = random_state.zeros_like()
        for t, w, v in zip(grid.nodes, grid.weights, phi.values):
            orbit = orbit + A.apply_semigroup(t, random_state).scaled(w * v)
        assert marginal_apply(phi, A, random_state).distance(orbit) < 1e-12

    def test_unresolved_oscillation(self, exp_fn, random_state):
        with pytest.raises(ResolutionError):
            marginal_apply(exp_fn, ScalarGenerator(200.0), random_state)

    def test_near_resolution_limit_warns(self, exp_fn, random_state, caplog):
        marginal_apply(exp_fn, ScalarGenerator(50.0), random_state)
        assert "接近时间网格分辨率上限" in caplog.text


class TestCalculus:

    def test_scalar_symbol(self, exp_fn, scalar_system, random_state):
        p = PolyTest(2, {0: [(2.5, ())]})
        out = calculus_apply(p, scalar_system, random_state)
        assert out.distance(random_state.scaled(2.5)) == 0.0

    def test_scalar_system_closed_form(self, exp_fn, gauss_fn, scalar_system, random_state):
        p = power_test(exp_fn, 2) + PolyTest(2, {2: [(0.5, (exp_fn, gauss_fn))]})
        c = p.scalar + laplace_eval(p, 1, RATES[:1]) + laplace_eval(p, 2, RATES[:2])
        out = calculus_apply(p, scalar_system, random_state)
        assert _close(out, random_state.scaled(c), 1e-8, random_state)

    def test_exponential_against_analytic(self, exp_fn, scalar_system, random_state):
        c = 1 + 1 / 1.5 + 1 / (1.5 * 2.0)
        out = calculus_apply(power_test(exp_fn, 2), scalar_system, random_state)
        assert _close(out, random_state.scaled(c), 1e-8, random_state)

    def test_rank_one_factorization_bruteforce(self, random_state):
        grid = build_grid(16, 0.6, "trapezoid")
        phi = sample(lambda t: np.exp(-t), grid, decay_tol=1.0)
        psi = sample(lambda t: t * np.exp(-t), grid, decay_tol=1.0)
        p = PolyTest(2, {2: [(1.0, (phi, psi))]})
        system = GeneratorSystem.gaussian()
        A1, A2 = system.block(2)
        table = p.sample(2, np.arange(grid.n_points))
        brute = random_state.zeros_like()
        for i, (ti, wi) in enumerate(zip(grid.nodes, grid.weights)):
            moved = A1.apply_semigroup(ti, random_state)
            for j, (tj, wj) in enumerate(zip(grid.nodes, grid.weights)):
                brute = brute + A2.apply_semigroup(tj, moved).scaled(wi * wj * table[i, j])
        out = calculus_apply(p, system, random_state)
        assert _close(out, brute, 1e-6, random_state)

    def test_linear_in_state(self, exp_fn, random_state, gaussian_state):
        system = GeneratorSystem.gaussian()
        p = power_test(exp_fn, 2)
        lhs = calculus_apply(p, system, random_state + gaussian_state.scaled(2.0))
        rhs = calculus_apply(p, system, random_state) + calculus_apply(p, system, gaussian_state).scaled(2.0)
        assert lhs.distance(rhs) < 1e-10


class TestShiftAndPhi:

    def test_opshift_zero(self, exp_fn, scalar_system, random_state):
        p = power_test(exp_fn, 2)
        out = opshift_apply(p, 0.0, scalar_system, random_state)
        assert out.distance(calculus_apply(p, scalar_system, random_state)) == 0.0

    def test_opshift_scalar_exponential(self, exp_fn, scalar_system, random_state):
        s = 0.4
        c = 1 + np.exp(-s) / 1.5 + np.exp(-2 * s) / (1.5 * 2.0)
        out = opshift_apply(power_test(exp_fn, 2), s, scalar_system, random_state)
        assert _close(out, random_state.scaled(c), 1e-8, random_state)

    def test_phi_unit(self, gauss_fn, scalar_system, random_state):
        p = power_test(gauss_fn, 2)
        lhs = phi_apply(unit_dist(2), p, scalar_system, random_state)
        assert lhs.distance(calculus_apply(p, scalar_system, random_state)) < 1e-12

    def test_phi_homomorphism(self, exp_fn, gauss_fn, scalar_system, random_state):
        F = power_dist(delta_at(1.0), 2)
        G = power_dist(from_density(exp_fn), 2)
        p = power_test(gauss_fn, 2)
        lhs = phi_apply(boxtimes(F, G), p, scalar_system, random_state)
        rhs = phi_apply(F, cross_corr_poly(G, p), scalar_system, random_state)
        assert _close(lhs, rhs, 1e-6, random_state)

    def test_phi_commutant(self, exp_fn, gauss_fn, scalar_system, random_state):
        F = power_dist(from_density(exp_fn) + delta_at(1.0), 2)
        p = power_test(gauss_fn, 2)
        s = 0.3
        lhs = phi_apply(F, poly_shift(p, s), scalar_system, random_state)
        rhs = opshift_apply(cross_corr_poly(F, p), s, scalar_system, random_state)
        assert _close(lhs, rhs, 1e-6, random_state)

    def test_phi_differential(self, grid, scalar_system, random_state):
        F = power_dist(delta_at(1.0), 2)
        p = power_test(sample(lambda t: t ** 2 * np.exp(-t), grid), 2)
        lhs = phi_apply(poly_D_dist(F), p, scalar_system, random_state)
        rhs = phi_apply(F, poly_D_test(p), scalar_system, random_state)
        assert _close(lhs, -rhs, 1e-4, random_state)


class TestGaussian:

    def test_zero_time_is_identity(self, gaussian_state):
        assert gaussian_apply([0.0], gaussian_state) is gaussian_state

    @pytest.mark.parametrize("t", [0.1, 0.5])
    def test_closed_form(self, spatial, t):
        y = FockState.gaussian((1,), spatial["L"], spatial["nodes_per_axis"])
        out = gaussian_apply([t], y)
        expected = y.with_component(1, closed_form_gaussian(t, y.axis(1)))
        assert out.distance(expected) < 1e-6

    def test_other_components_untouched(self, gaussian_state):
        out = gaussian_apply([0.2], gaussian_state)
        assert out.y0 == gaussian_state.y0
        assert np.array_equal(out.component(2), gaussian_state.component(2))

    def test_norm_preserved(self, random_state):
        for t in ([0.3], [0.3, 0.7]):
            out = gaussian_apply(t, random_state)
            assert abs(out.norm() - random_state.norm()) < 1e-10

    def test_semigroup_law(self, random_state):
        lhs = gaussian_apply([0.2, 0.1], gaussian_apply([0.3, 0.4], random_state))
        rhs = gaussian_apply([0.5, 0.5], random_state)
        assert lhs.distance(rhs) < 1e-10

    def test_coordinate_order(self, random_state):
        a, b = SecondDerivativeGenerator(2, 0), SecondDerivativeGenerator(2, 1)
        lhs = a.apply_semigroup(0.3, b.apply_semigroup(0.6, random_state))
        rhs = b.apply_semigroup(0.6, a.apply_semigroup(0.3, random_state))
        assert lhs.distance(rhs) < 1e-10
        assert lhs.distance(gaussian_apply([0.3, 0.6], random_state)) < 1e-10

    def test_negative_time(self, gaussian_state):
        with pytest.raises(DomainError):
            gaussian_apply([-0.1], gaussian_state)

    def test_missing_component(self, gaussian_state):
        with pytest.raises(ParameterError):
            gaussian_apply([0.1, 0.1, 0.1], gaussian_state)

    def test_aliasing_detected(self, spatial):
        rng = np.random.default_rng(11)
        M = spatial["nodes_per_axis"][1]
        noisy = FockState(0.0, {1: rng.normal(size=M)}, spatial["L"])
        with pytest.raises(ResolutionError):
            gaussian_apply([1.0], noisy)


class TestContraction:

    def test_decaying_scalar(self):
        report = contraction_report(ScalarGenerator.decaying(0.5), [0.0, 0.5, 1.0, 2.0])
        assert report.ok
        for t, ratio in report.ratios:
            assert ratio == pytest.approx(np.exp(-0.5 * t))

    def test_second_derivative_is_unitary(self, spatial):
        probes = [FockState.random_symmetric(i, (2,), spatial["L"], spatial["nodes_per_axis"]) for i in range(3)]
        report = contraction_report(SecondDerivativeGenerator(2, 0), [0.1, 0.5, 1.0], probes)
        assert report.ok
        assert all(abs(r - 1) < 1e-10 for _, r in report.ratios)

    def test_growing_semigroup_flagged(self):
        report = contraction_report(ScalarGenerator.decaying(-0.5), [0.5, 1.0])
        assert not report.ok
        assert len(report.violations) == 2
        assert report.to_dict()["max_ratio"] == pytest.approx(np.exp(0.5))

    def test_scalar_contraction_flag(self):
        assert ScalarGenerator.decaying(0.5).is_contraction
        assert not ScalarGenerator.decaying(-0.5).is_contraction
