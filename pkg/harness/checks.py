# -*- coding: utf-8 -*-
"""
不变量检查
每个检查对应一个模块的一条性质，观测值为最大误差（或下界型指标）
"""
import logging
from itertools import combinations, combinations_with_replacement, product
from math import factorial
from typing import Dict, List

import numpy as np
from numpy.polynomial.legendre import leggauss

from core.distributions import (Distribution, convolve, cross_correlate, delta_at, distr_derivative,
                                pair, reconstruct_symbol)
from core.fock import (PolyDist, PolyTest, boxtimes, cross_corr_poly, poly_D_dist, poly_D_test, poly_pair,
                       poly_shift, poly_sup_distance, power_dist, power_test, probe_indices, unit_dist)
from core.halfline import TestFn, build_grid, diff_fn, integrate, refine_grid, sample, shift_fn
from core.opcalc import (FockState, GeneratorSystem, ScalarGenerator, SecondDerivativeGenerator,
                         block_indices, calculus_apply, closed_form_gaussian, contraction_report,
                         gaussian_apply, opshift_apply, phi_apply)
from core.transforms import (distribution_symbol, fourier_pair_check, fourier_poly, fourier_values,
                             laplace_eval, laplace_fn)
from .base_check import BaseCheck
from .corpus import DENSITY_PROFILES, PHI_EXPRESSIONS, fourier_exact, laplace_exact, sample_phi

logger = logging.getLogger(__name__)

DERIVATIVES = {
    "exp": lambda t: -np.exp(-t),
    "t_exp": lambda t: (1 - t) * np.exp(-t),
    "t2_exp": lambda t: (2 * t - t ** 2) * np.exp(-t),
    "gauss": lambda t: -2 * t * np.exp(-t ** 2),
}
INTEGRALS = {"exp": 1.0, "t_exp": 1.0, "t2_exp": 2.0, "gauss": np.sqrt(np.pi) / 2}
SCALAR_RATES = (0.5, 1.0, 2.0)
PROBE_TIMES = (0.1, 0.3, 0.7)
# 二次配对检查的符号：(函数, 函数, 系数)
PAIR_SYMBOL = (("exp", "gauss", 1.0), ("gauss", "t_exp", -0.5j))


def _sup(a, b) -> float:
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


def _has_derivative_atoms(f: Distribution) -> bool:
    return f.max_order > 0


class CorpusCheck(BaseCheck):
    """遍历语料的检查；derivative_atoms 选择是否只取含导数原子的组合"""

    derivative_atoms = False

    @property
    def corpus(self):
        return self.context.corpus

    def pairs(self):
        """分布对 (f, g)：按 derivative_atoms 划分为规则部分与受差分模板限制的部分"""
        items = list(self.corpus.dists.items())
        for (nf, f), (ng, g) in product(items, items):
            limited = _has_derivative_atoms(f) or _has_derivative_atoms(g)
            if limited == self.derivative_atoms:
                yield nf, f, ng, g

    def singles(self):
        for name, f in self.corpus.dists.items():
            if _has_derivative_atoms(f) == self.derivative_atoms:
                yield name, f


# ---------------------------------------------------------------- halfline

class QuadratureCheck(CorpusCheck):
    name = "halfline.quadrature"
    anchor = "integrate: ∫ t^k e^{-t}, ∫ e^{-t²}"
    tolerance_class = "single"

    def measure(self) -> float:
        return max(abs(integrate(phi) - INTEGRALS[name]) for name, phi in self.corpus.phis.items())


class LaguerreExactnessCheck(BaseCheck):
    name = "halfline.laguerre_exactness"
    anchor = "gauss_laguerre_mapped: ∫ t^k e^{-t/c} = k! c^{k+1}"
    default_tolerance = 1e-10

    def measure(self) -> float:
        grid = build_grid(64, 20.0, "gauss_laguerre_mapped")
        c = grid.scale
        errors = []
        for k in range(4):
            fn = sample(lambda t, k=k: t ** k * np.exp(-t / c), grid, decay_tol=1.0)
            exact = factorial(k) * c ** (k + 1)
            errors.append(abs(integrate(fn) - exact) / exact)
        return max(errors)


class IntegrateLinearityCheck(CorpusCheck):
    name = "halfline.integrate_linearity"
    anchor = "integrate(αφ + βψ) = α∫φ + β∫ψ"
    tolerance_class = "machine"

    def measure(self) -> float:
        phis = self.corpus.phis
        alpha, beta = 0.7 - 0.2j, -1.3 + 0.5j
        worst = 0.0
        for a, b in combinations(phis.values(), 2):
            lhs = integrate(alpha * a + beta * b)
            rhs = alpha * integrate(a) + beta * integrate(b)
            worst = max(worst, abs(lhs - rhs))
        return worst


class ShiftSemigroupCheck(CorpusCheck):
    name = "halfline.shift_semigroup"
    anchor = "T_b T_a φ = T_{a+b} φ"

    def measure(self) -> float:
        worst = 0.0
        for phi in self.corpus.phis.values():
            for a, b in product(self.corpus.shifts, self.corpus.shifts):
                lhs = shift_fn(shift_fn(phi, a), b)
                worst = max(worst, lhs.sup_distance(shift_fn(phi, a + b)))
        return worst


class DerivativeAccuracyCheck(CorpusCheck):
    name = "halfline.derivative_accuracy"
    anchor = "diff_fn: 四阶差分模板"
    tolerance_class = "stencil"

    def measure(self) -> float:
        grid = self.corpus.grid
        return max(_sup(diff_fn(phi).values, DERIVATIVES[name](grid.nodes))
                   for name, phi in self.corpus.phis.items())


class DerivativeOrderCheck(CorpusCheck):
    name = "halfline.derivative_order"
    anchor = "diff_fn: 步长减半误差约缩小16倍"
    default_tolerance = 10.0
    lower_bound = True

    def measure(self) -> float:
        coarse = self.corpus.grid
        fine = refine_grid(coarse)
        errors = []
        for grid in (coarse, fine):
            phi = sample_phi("t_exp", grid)
            errors.append(_sup(diff_fn(phi).values, DERIVATIVES["t_exp"](grid.nodes)))
        return errors[0] / max(errors[1], 1e-300)


# ---------------------------------------------------------------- distributions

class PairingOracleCheck(CorpusCheck):
    name = "distributions.pairing_oracles"
    anchor = "⟨δ₀,e^{-t}⟩ = 1, ⟨δ₁',e^{-t}⟩ = e^{-1}, ⟨t e^{-t}, e^{-t}⟩ = 1/4"

    def measure(self) -> float:
        phi = self.corpus.phis["exp"]
        errors = [abs(pair(delta_at(0.0), phi) - 1.0), abs(pair(delta_at(1.0, 1), phi) - np.exp(-1.0))]
        if "density_t_exp" in self.corpus.dists:
            errors.append(abs(pair(self.corpus.dists["density_t_exp"], phi) - 0.25))
        return max(errors)


class UnitLawCheck(CorpusCheck):
    name = "distributions.unit_law"
    anchor = "δ ⋆ φ = φ, δ * f = f"
    tolerance_class = "machine"

    def measure(self) -> float:
        unit = delta_at(0.0)
        worst = max(cross_correlate(unit, phi).sup_distance(phi) for phi in self.corpus.phis.values())
        for f in self.corpus.dists.values():
            worst = max(worst, convolve(unit, f).sup_distance(f), convolve(f, unit).sup_distance(f))
        return worst


class CommutativityCheck(CorpusCheck):
    name = "distributions.commutativity"
    anchor = "f * g = g * f"
    tolerance_class = "machine"

    def measure(self) -> float:
        dists = list(self.corpus.dists.values())
        return max(convolve(f, g).sup_distance(convolve(g, f)) for f, g in product(dists, dists))


class AssociativityCheck(CorpusCheck):
    name = "distributions.associativity"
    anchor = "(f*g)⋆φ = f⋆(g⋆φ)"

    def measure(self) -> float:
        worst = 0.0
        for _, f, _, g in self.pairs():
            fg = convolve(f, g)
            for phi in self.corpus.phis.values():
                lhs = cross_correlate(fg, phi)
                rhs = cross_correlate(f, cross_correlate(g, phi))
                worst = max(worst, lhs.sup_distance(rhs))
        return worst


class AssociativityDerivativeAtomsCheck(AssociativityCheck):
    name = "distributions.associativity_derivative_atoms"
    tolerance_class = "stencil"
    derivative_atoms = True


class ShiftIntertwiningCheck(CorpusCheck):
    name = "distributions.shift_intertwining"
    anchor = "f ⋆ T_sφ = T_s(f ⋆ φ)"

    def measure(self) -> float:
        worst = 0.0
        for _, f in self.singles():
            for phi in self.corpus.phis.values():
                base = cross_correlate(f, phi)
                for s in self.corpus.shifts:
                    lhs = cross_correlate(f, shift_fn(phi, s))
                    worst = max(worst, lhs.sup_distance(shift_fn(base, s)))
        return worst


class ShiftIntertwiningDerivativeAtomsCheck(ShiftIntertwiningCheck):
    name = "distributions.shift_intertwining_derivative_atoms"
    tolerance_class = "stencil"
    derivative_atoms = True


class DerivativeDualityAtomsCheck(CorpusCheck):
    name = "distributions.derivative_duality_atoms"
    anchor = "⟨Df,φ⟩ + ⟨f,Dφ⟩ = 0（原子）"
    tolerance_class = "single"

    def measure(self) -> float:
        worst = 0.0
        for f in self.corpus.dists.values():
            if not f.is_atomic:
                continue
            df = distr_derivative(f)
            for phi in self.corpus.phis.values():
                worst = max(worst, abs(pair(df, phi) + pair(f, phi.derivative(1))))
        return worst


class DerivativeDualityDensityCheck(CorpusCheck):
    name = "distributions.derivative_duality_density"
    anchor = "⟨Df,φ⟩ + ⟨f,Dφ⟩ = 0（在0点为零的密度）"
    requires_density = True

    def measure(self) -> float:
        f = self.corpus.dists["density_t_exp"]
        df = distr_derivative(f)
        return max(abs(pair(df, phi) + pair(f, phi.derivative(1))) for phi in self.corpus.phis.values())


class SymbolReconstructionCheck(CorpusCheck):
    name = "distributions.symbol_reconstruction"
    anchor = "⟨h, φ⟩ := (Kφ)(0)"

    def measure(self) -> float:
        probes = list(self.corpus.phis.values())
        worst = 0.0
        for f in self.corpus.dists.values():
            report = reconstruct_symbol(lambda phi, f=f: cross_correlate(f, phi), probes,
                                        names=list(self.corpus.phis))
            worst = max(worst, report.max_deviation(f, probes))
        return worst


# ---------------------------------------------------------------- fock

class FockCheck(CorpusCheck):

    @property
    def N(self) -> int:
        return self.context.config.max_degree

    def probe_polys(self) -> List[PolyTest]:
        return [power_test(phi, self.N) for phi in self.corpus.phis.values()]


class BoxtimesUnitCheck(FockCheck):
    name = "fock.boxtimes_unit"
    anchor = "F ⊛ (δ^{⊗n}) = F"
    tolerance_class = "single"

    def measure(self) -> float:
        unit = unit_dist(self.N)
        probes = self.probe_polys()
        worst = 0.0
        for f in self.corpus.dists.values():
            F = power_dist(f, self.N)
            worst = max(worst, boxtimes(F, unit).weak_distance(F, probes),
                        boxtimes(unit, F).weak_distance(F, probes))
        return worst


class BoxtimesCommutativeCheck(FockCheck):
    name = "fock.boxtimes_commutative"
    anchor = "F ⊛ G = G ⊛ F"
    tolerance_class = "single"

    def measure(self) -> float:
        probes = self.probe_polys()
        dists = list(self.corpus.dists.values())
        worst = 0.0
        for f, g in combinations(dists, 2):
            F, G = power_dist(f, self.N), power_dist(g, self.N)
            worst = max(worst, boxtimes(F, G).weak_distance(boxtimes(G, F), probes))
        return worst


class BoxtimesDegreeOneCheck(FockCheck):
    name = "fock.boxtimes_degree1"
    anchor = "(F ⊛ G)₁ = f * g"
    tolerance_class = "machine"

    def measure(self) -> float:
        worst = 0.0
        for f, g in combinations(list(self.corpus.dists.values()), 2):
            FG = boxtimes(power_dist(f, max(self.N, 1)), power_dist(g, max(self.N, 1)))
            (coef, base), = FG.diagonal[1]
            worst = max(worst, abs(coef - 1.0), base.sup_distance(convolve(f, g)))
        return worst


class HomomorphismCheck(FockCheck):
    name = "fock.homomorphism"
    anchor = "K_{F⊛G} = K_F ∘ K_G"

    def measure(self) -> float:
        worst = 0.0
        for _, f, _, g in self.pairs():
            F, G = power_dist(f, self.N), power_dist(g, self.N)
            FG = boxtimes(F, G)
            for p in self.probe_polys():
                lhs = cross_corr_poly(FG, p)
                rhs = cross_corr_poly(F, cross_corr_poly(G, p))
                worst = max(worst, poly_sup_distance(lhs, rhs))
        return worst


class HomomorphismDerivativeAtomsCheck(HomomorphismCheck):
    name = "fock.homomorphism_derivative_atoms"
    tolerance_class = "stencil"
    derivative_atoms = True


class CommutantCheck(FockCheck):
    name = "fock.commutant"
    anchor = "K⊗ ∘ T_s⊗ = T_s⊗ ∘ K⊗"

    def measure(self) -> float:
        worst = 0.0
        for _, f in self.singles():
            F = power_dist(f, self.N)
            for p in self.probe_polys():
                base = cross_corr_poly(F, p)
                for s in self.corpus.shifts:
                    lhs = cross_corr_poly(F, poly_shift(p, s))
                    worst = max(worst, poly_sup_distance(lhs, poly_shift(base, s)))
        return worst


class CommutantDerivativeAtomsCheck(CommutantCheck):
    name = "fock.commutant_derivative_atoms"
    tolerance_class = "stencil"
    derivative_atoms = True


def _differential_error(f: Distribution, p: PolyTest) -> float:
    F = power_dist(f, p.max_degree)
    lhs = cross_corr_poly(poly_D_dist(F), p)
    rhs = cross_corr_poly(F, poly_D_test(p))
    return poly_sup_distance(lhs, -rhs)


class DifferentialPropertyCheck(FockCheck):
    name = "fock.differential_property"
    anchor = "(𝔻F)⋆p + F⋆(𝔻p) = 0"
    tolerance_class = "stencil"

    def measure(self) -> float:
        worst = 0.0
        for f in self.corpus.boundary_safe().values():
            for p in self.probe_polys():
                worst = max(worst, _differential_error(f, p))
        return worst


class DifferentialConvergenceCheck(FockCheck):
    name = "fock.differential_convergence"
    anchor = "(𝔻F)⋆p + F⋆(𝔻p) 在步长减半后缩小"
    default_tolerance = 10.0
    lower_bound = True
    requires_density = True

    def measure(self) -> float:
        errors = []
        for grid in (self.corpus.grid, refine_grid(self.corpus.grid)):
            rho = sample_phi("t_exp", grid)
            phi = sample_phi("t2_exp", grid)
            f = Distribution(densities=[(rho, 0.0)])
            errors.append(_differential_error(f, power_test(phi, 1)))
        return errors[0] / max(errors[1], 1e-300)


def _gl_panels(t_max: float, panel: float = 1.0, order: int = 16):
    """[0, t_max] 上的复合Gauss-Legendre节点与权重"""
    x, w = leggauss(order)
    edges = np.linspace(0.0, t_max, int(np.ceil(t_max / panel)) + 1)
    half = 0.5 * np.diff(edges)
    nodes = ((edges[:-1] + half)[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def _pair_symbol(phis: Dict[str, TestFn]) -> PolyTest:
    """二次分量为两个对称秩一项之和的符号"""
    return PolyTest(2, {2: [(c, (phis[a], phis[b])) for a, b, c in PAIR_SYMBOL]})


def _pair_symbol_exact(s, t) -> np.ndarray:
    """_pair_symbol 二次分量的解析值 p₂(s, t)"""
    out = 0j
    for a, b, c in PAIR_SYMBOL:
        fa, fb = PHI_EXPRESSIONS[a][0], PHI_EXPRESSIONS[b][0]
        out = out + 0.5 * c * (fa(s) * fb(t) + fb(s) * fa(t))
    return out


def _density_profile(name: str, t) -> np.ndarray:
    return PHI_EXPRESSIONS[DENSITY_PROFILES[name]][0](t)


class PairBruteForceCheck(FockCheck):
    name = "fock.pair_bruteforce"
    anchor = "⟨F₂, p₂⟩ 与 ∬ρ(s)σ(t)p₂(s,t) 的二维张量求积"
    tolerance_class = "single"
    requires_density = True

    def measure(self) -> float:
        p = _pair_symbol(self.corpus.phis)
        u, wu = _gl_panels(self.corpus.grid.t_max)
        table = _pair_symbol_exact(u[:, None], u[None, :])
        dists = self.corpus.densities
        worst = 0.0
        for x, y in combinations_with_replacement(sorted(dists), 2):
            if x == y:
                F = power_dist(dists[x], 2)
            else:
                F = PolyDist(2, general={2: [(1.0, (dists[x], dists[y]))]})
            brute = (wu * _density_profile(x, u)) @ table @ (wu * _density_profile(y, u))
            worst = max(worst, abs(poly_pair(F, p) - brute))
        return worst


class PairBruteForceAtomCheck(FockCheck):
    name = "fock.pair_bruteforce_atoms"
    anchor = "⟨δ₁⊗δ₁, p₂⟩ = p₂(1,1)，⟨δ₁⊗ρ, p₂⟩ = ∫ρ(t)p₂(1,t)dt"

    def measure(self) -> float:
        p = _pair_symbol(self.corpus.phis)
        delta_1 = self.corpus.dists["delta_1"]
        a = delta_1.atoms[0].a
        errors = [abs(poly_pair(power_dist(delta_1, 2), p) - _pair_symbol_exact(a, a))]
        u, wu = _gl_panels(self.corpus.grid.t_max)
        for name, f in self.corpus.densities.items():
            F = PolyDist(2, general={2: [(1.0, (delta_1, f))]})
            brute = np.sum(wu * _density_profile(name, u) * _pair_symbol_exact(a, u))
            errors.append(abs(poly_pair(F, p) - brute))
        return max(errors)


class DegreeOneRoundTripCheck(FockCheck):
    name = "fock.degree1_roundtrip"
    anchor = "K⊗ 一次分量的符号重构"

    def measure(self) -> float:
        probes = list(self.corpus.phis.values())
        worst = 0.0
        for f in self.corpus.dists.values():
            F = power_dist(f, 1)

            def K(phi, F=F):
                (coef, factors), = cross_corr_poly(F, power_test(phi, 1)).degree_terms(1)
                return coef * factors[0]

            worst = max(worst, reconstruct_symbol(K, probes).max_deviation(f, probes))
        return worst


# ---------------------------------------------------------------- transforms

class FourierExpCheck(CorpusCheck):
    name = "transforms.fourier_exp"
    anchor = "F₊ e^{-t} = 1/(1+iξ)"

    def measure(self) -> float:
        xis = self.context.xis[np.abs(self.context.xis) <= 8.0]
        return max(_sup(fourier_values(self.corpus.phis[name], xis), fourier_exact(name, xis))
                   for name in ("exp", "t_exp", "t2_exp"))


class ConjugateSymmetryCheck(CorpusCheck):
    name = "transforms.conjugate_symmetry"
    anchor = "φ 实值 ⇒ φ̂(-ξ) = conj φ̂(ξ)"
    default_tolerance = 1e-10

    def measure(self) -> float:
        xis = self.context.xis
        worst = 0.0
        for phi in self.corpus.phis.values():
            values = fourier_values(phi, xis)
            worst = max(worst, _sup(values[::-1], np.conj(values)))
        return worst


class ConvolutionTheoremCheck(CorpusCheck):
    name = "transforms.convolution_theorem"
    anchor = "F₊(ρ₁*ρ₂) = F₊ρ₁ · F₊ρ₂"
    tolerance_class = "stencil"
    requires_density = True

    def measure(self) -> float:
        xis = self.context.xis
        worst = 0.0
        dens = list(self.corpus.densities.values())
        for f, g in product(dens, dens):
            fg = convolve(f, g).density
            expected = fourier_values(f.density, xis) * fourier_values(g.density, xis)
            worst = max(worst, _sup(fourier_values(fg, xis), expected))
        return worst


class FourierDualityCheck(CorpusCheck):
    name = "transforms.duality"
    anchor = "⟨F′₊f, F₊φ⟩ = 2π⟨f, φ⟩（相对误差）"
    tolerance_class = "stencil"

    def measure(self) -> float:
        worst = 0.0
        for f in self.corpus.dists.values():
            for phi in self.corpus.phis.values():
                lhs, rhs = fourier_pair_check(f, phi, self.context.xis)
                worst = max(worst, abs(lhs - rhs) / (1 + abs(rhs)))
        return worst


class FourierPolyCheck(FockCheck):
    name = "transforms.fourier_poly"
    anchor = "F₊⊗ φ^{⊗2} = φ̂(ξ₁)φ̂(ξ₂)"

    def measure(self) -> float:
        xis = self.context.xis
        idx = np.flatnonzero(np.abs(xis) <= 8.0)
        fp = fourier_poly(power_test(self.corpus.phis["exp"], 2), xis)
        oracle = fourier_exact("exp", xis[idx])
        return max(_sup(fp.evaluate(2, idx), np.multiply.outer(oracle, oracle)),
                   abs(fp.evaluate(0) - 1.0))


class SymbolMultiplicativityCheck(CorpusCheck):
    name = "transforms.symbol_multiplicativity"
    anchor = "(f*g)^ = f̂ · ĝ"
    tolerance_class = "stencil"

    def measure(self) -> float:
        xis = self.context.xis[np.abs(self.context.xis) <= 8.0]
        dists = list(self.corpus.dists.values())
        worst = 0.0
        for f, g in product(dists, dists):
            lhs = distribution_symbol(convolve(f, g), xis)
            worst = max(worst, _sup(lhs, distribution_symbol(f, xis) * distribution_symbol(g, xis)))
        return worst


class LaplaceExponentialCheck(CorpusCheck):
    name = "transforms.laplace_exponential"
    anchor = "∫ e^{-λt} t^k e^{-t} dt = k!/(λ+1)^{k+1}"
    tolerance_class = "single"

    def measure(self) -> float:
        lams = self.corpus.lambdas
        worst = 0.0
        for name in self.corpus.exponential_family():
            p = power_test(self.corpus.phis[name], 2)
            for lam in lams:
                worst = max(worst, abs(laplace_eval(p, 1, [lam]) - laplace_exact(name, lam)))
            for l1, l2 in zip(lams, lams[1:]):
                exact = laplace_exact(name, l1) * laplace_exact(name, l2)
                worst = max(worst, abs(laplace_eval(p, 2, [l1, l2]) - exact))
        return worst


class LaplaceBruteForceCheck(CorpusCheck):
    name = "transforms.laplace_bruteforce"
    anchor = "秩一分解与二维张量求积"
    default_tolerance = 1e-7

    def measure(self) -> float:
        grid = self.corpus.grid
        a, b = self.corpus.phis["exp"], self.corpus.phis["t_exp"]
        p = PolyTest(2, {2: [(1.0, (a, b))]})
        sym = 0.5 * (np.multiply.outer(a.values, b.values) + np.multiply.outer(b.values, a.values))
        worst = 0.0
        lams = self.corpus.lambdas
        for l1, l2 in zip(lams, lams[1:]):
            k1 = grid.weights * np.exp(-l1 * grid.nodes)
            k2 = grid.weights * np.exp(-l2 * grid.nodes)
            brute = k1 @ sym @ k2
            worst = max(worst, abs(laplace_eval(p, 2, [l1, l2]) - brute))
        return worst


class LaplaceInjectivityCheck(CorpusCheck):
    name = "transforms.laplace_injectivity"
    anchor = "Ker 𝓛 = {0}：不同函数在某个探针上可区分"
    default_tolerance = 1e-6
    lower_bound = True

    def measure(self) -> float:
        values = {name: np.array([laplace_fn(phi, lam) for lam in self.corpus.lambdas])
                  for name, phi in self.corpus.phis.items()}
        return min(float(np.max(np.abs(values[x] - values[y]))) for x, y in combinations(values, 2))


# ---------------------------------------------------------------- opcalc

class OperatorCheck(FockCheck):

    def state(self, offset: int = 0) -> FockState:
        cfg = self.context.config
        degrees = [n for n in range(1, self.N + 1)]
        return FockState.random_symmetric(cfg.seed + offset, degrees, cfg.L, cfg.nodes_per_axis)

    def systems(self) -> Dict[str, GeneratorSystem]:
        return {"scalar": GeneratorSystem.scalar(SCALAR_RATES, self.N), "gaussian": GeneratorSystem.gaussian()}


class BlockIndicesCheck(BaseCheck):
    name = "opcalc.block_indices"
    anchor = "𝔟ₙ = n(n-1)/2+1, 𝔢ₙ = n(n+1)/2"
    tolerance_class = "machine"

    def measure(self) -> float:
        expected = {0: (1, 0), 1: (1, 1), 2: (2, 3), 3: (4, 6), 4: (7, 10)}
        return float(sum(block_indices(n) != pair_ for n, pair_ in expected.items()))


class ScalarCalculusCheck(OperatorCheck):
    name = "opcalc.scalar_calculus"
    anchor = "标量生成元：p̃(A)y = Σₙ ∏ Laplace值 · y"
    tolerance_class = "single"

    def measure(self) -> float:
        y = self.state()
        system = GeneratorSystem.scalar(SCALAR_RATES, self.N)
        worst = 0.0
        for name in self.corpus.exponential_family():
            p = power_test(self.corpus.phis[name], self.N)
            factor = 1.0 + sum(np.prod([laplace_exact(name, SCALAR_RATES[j]) for j in range(n)])
                               for n in range(1, self.N + 1))
            got = calculus_apply(p, system, y)
            worst = max(worst, got.distance(y.scaled(factor)) / (1 + y.norm()))
        return worst


class PhiUnitCheck(OperatorCheck):
    name = "opcalc.phi_unit"
    anchor = "Φ_unit 是恒等算子"
    tolerance_class = "single"

    def measure(self) -> float:
        y = self.state()
        unit = unit_dist(self.N)
        worst = 0.0
        for system in self.systems().values():
            for p in self.probe_polys():
                diff = phi_apply(unit, p, system, y).distance(calculus_apply(p, system, y))
                worst = max(worst, diff / (1 + y.norm()))
        return worst


def _graded_dist(f: Distribution, N: int) -> PolyDist:
    """各次数系数不同且缺少二次分量的对角多项式分布"""
    return PolyDist(N, {n: [((-0.5) ** n, f)] for n in range(N + 1) if n != 2})


class PhiHomomorphismCheck(OperatorCheck):
    name = "opcalc.phi_homomorphism"
    anchor = "Φ_{F⊛G} = Φ_F ∘ Φ_G"

    def measure(self) -> float:
        y = self.state()
        systems = self.systems()
        symbols = self.probe_polys()
        worst = 0.0
        for _, f, _, g in self.pairs():
            F = power_dist(f, self.N)
            for G in (power_dist(g, self.N), _graded_dist(g, self.N)):
                FG = boxtimes(F, G)
                for p in symbols:
                    inner = cross_corr_poly(G, p)
                    for system in systems.values():
                        lhs = phi_apply(FG, p, system, y)
                        rhs = phi_apply(F, inner, system, y)
                        worst = max(worst, lhs.distance(rhs) / (1 + y.norm()))
        return worst


class PhiCommutantCheck(OperatorCheck):
    name = "opcalc.phi_commutant"
    anchor = "Φ_F ∘ T̃_s = T̃_s ∘ Φ_F"

    def measure(self) -> float:
        y = self.state()
        systems = self.systems()
        symbols = self.probe_polys()
        shifts = [s for s in self.corpus.shifts if s > 0]
        worst = 0.0
        for _, f in self.singles():
            for F in (power_dist(f, self.N), _graded_dist(f, self.N)):
                for p in symbols:
                    base = cross_corr_poly(F, p)
                    for s, system in product(shifts, systems.values()):
                        lhs = phi_apply(F, poly_shift(p, s), system, y)
                        rhs = opshift_apply(base, s, system, y)
                        worst = max(worst, lhs.distance(rhs) / (1 + y.norm()))
        return worst


class PhiDifferentialCheck(OperatorCheck):
    name = "opcalc.phi_differential"
    anchor = "Φ_{𝔻F} p̃ = -Φ_F (𝔻p)~"
    tolerance_class = "stencil"

    def measure(self) -> float:
        p = power_test(self.corpus.phis["gauss"], self.N)
        y = self.state()
        worst = 0.0
        for f in self.corpus.boundary_safe().values():
            F = power_dist(f, self.N)
            for system in self.systems().values():
                lhs = phi_apply(poly_D_dist(F), p, system, y)
                rhs = phi_apply(F, poly_D_test(p), system, y)
                worst = max(worst, (lhs + rhs).norm() / (1 + y.norm()))
        return worst


class MarginalFactorizationCheck(OperatorCheck):
    name = "opcalc.marginal_factorization"
    anchor = "n = 2 时边缘复合与张量求积一致"

    def measure(self) -> float:
        cfg = self.context.config
        grid = build_grid(16, 0.6, "trapezoid")
        a = sample(lambda t: np.exp(-t), grid, decay_tol=1.0)
        b = sample(lambda t: t * np.exp(-t), grid, decay_tol=1.0)
        p = PolyTest(2, {2: [(1.0, (a, b))]})
        y = FockState.gaussian((2,), cfg.L, cfg.nodes_per_axis, y0=1.0)
        system = GeneratorSystem.gaussian()
        first, second = system.block(2)
        brute = y.zeros_like()
        for i, j in product(range(grid.n_points), range(grid.n_points)):
            weight = grid.weights[i] * grid.weights[j] * 0.5 * (
                a.values[i] * b.values[j] + b.values[i] * a.values[j])
            moved = first.apply_semigroup(grid.nodes[i], second.apply_semigroup(grid.nodes[j], y))
            brute = brute + moved.scaled(weight)
        got = calculus_apply(p, system, y)
        return got.distance(brute) / (1 + y.norm())


class LinearityCheck(OperatorCheck):
    name = "opcalc.linearity"
    anchor = "p̃(A) 对状态线性"
    tolerance_class = "single"

    def measure(self) -> float:
        y1, y2 = self.state(), self.state(offset=1)
        alpha, beta = 0.6 + 0.3j, -1.1
        p = power_test(self.corpus.phis["t_exp"], self.N)
        worst = 0.0
        for system in self.systems().values():
            lhs = calculus_apply(p, system, alpha * y1 + beta * y2)
            rhs = alpha * calculus_apply(p, system, y1) + beta * calculus_apply(p, system, y2)
            worst = max(worst, lhs.distance(rhs) / (1 + y1.norm() + y2.norm()))
        return worst


class GaussianClosedFormCheck(OperatorCheck):
    name = "opcalc.gaussian_closed_form"
    anchor = "e^{-it∂²} e^{-ξ²/2} 的复方差Gauss解"

    def measure(self) -> float:
        cfg = self.context.config
        y = FockState.gaussian((1,), cfg.L, cfg.nodes_per_axis)
        xi = y.axis(1)
        worst = 0.0
        for t in (0.1, 0.25, 0.5):
            got = gaussian_apply([t], y).components[1]
            exact = closed_form_gaussian(t, xi)
            worst = max(worst, float(np.linalg.norm(got - exact) / np.linalg.norm(exact)))
        return worst


class GaussianSemigroupLawCheck(OperatorCheck):
    name = "opcalc.gaussian_semigroup_law"
    anchor = "e^{-itD²} e^{-isD²} = e^{-i(t+s)D²}"
    default_tolerance = 1e-10

    def measure(self) -> float:
        y = self.state()
        worst = 0.0
        for n in y.degrees:
            for t, s in product(PROBE_TIMES, PROBE_TIMES):
                lhs = gaussian_apply([t] * n, gaussian_apply([s] * n, y))
                worst = max(worst, lhs.distance(gaussian_apply([t + s] * n, y)) / y.norm())
        return worst


class GaussianNormCheck(OperatorCheck):
    name = "opcalc.gaussian_norm"
    anchor = "‖e^{-itD²}y‖ = ‖y‖"
    default_tolerance = 1e-10

    def measure(self) -> float:
        y = self.state()
        return max((abs(gaussian_apply([t] * n, y).norm() - y.norm()) / y.norm()
                    for n in y.degrees for t in PROBE_TIMES), default=0.0)


class GaussianCoordinateOrderCheck(OperatorCheck):
    name = "opcalc.gaussian_coordinate_order"
    anchor = "各坐标的边缘半群可交换"
    default_tolerance = 1e-10

    def measure(self) -> float:
        y = self.state()
        worst = 0.0
        for n in y.degrees:
            if n < 2:
                continue
            gens = [SecondDerivativeGenerator(n, j) for j in range(n)]
            times = PROBE_TIMES[:n]
            forward, backward = y, y
            for g, t in zip(gens, times):
                forward = g.apply_semigroup(t, forward)
            for g, t in reversed(list(zip(gens, times))):
                backward = g.apply_semigroup(t, backward)
            worst = max(worst, forward.distance(backward) / y.norm())
        return worst


class BlockCommutationCheck(OperatorCheck):
    name = "opcalc.block_commutation"
    anchor = "块内生成元两两可交换"
    default_tolerance = 1e-10

    def measure(self) -> float:
        y = self.state()
        worst = 0.0
        for system in self.systems().values():
            for n in range(2, self.N + 1):
                worst = max(worst, system.commutation_error(n, y, PROBE_TIMES) / y.norm())
        return worst


class ContractionCheck(OperatorCheck):
    name = "opcalc.contraction"
    anchor = "sup_t ‖e^{-itA}‖ ≤ 1"
    default_tolerance = 1e-10

    def measure(self) -> float:
        times = np.linspace(0.0, 2.0, 9)
        cfg = self.context.config
        gens = [ScalarGenerator.decaying(r) for r in SCALAR_RATES]
        gens += [SecondDerivativeGenerator(n, n - 1) for n in range(1, max(self.N, 1) + 1)]
        worst = 0.0
        for A in gens:
            degrees = (A.degree,) if isinstance(A, SecondDerivativeGenerator) else (1,)
            probes = [FockState.random_symmetric(cfg.seed + k, degrees, cfg.L, cfg.nodes_per_axis)
                      for k in range(2)]
            worst = max(worst, contraction_report(A, times, probes).max_ratio - 1.0)
        return max(worst, 0.0)


class ContractionNegativeControlCheck(OperatorCheck):
    name = "opcalc.contraction_negative_control"
    anchor = "Re λ' < 0 的标量半群被标记为非压缩"
    tolerance_class = "machine"

    def measure(self) -> float:
        cfg = self.context.config
        probes = [FockState.random_symmetric(cfg.seed, (1,), cfg.L, cfg.nodes_per_axis)]
        report = contraction_report(ScalarGenerator.decaying(-0.5), [0.0, 0.5, 1.0], probes)
        return 0.0 if not report.ok else 1.0


ALL_CHECKS = [
    QuadratureCheck, LaguerreExactnessCheck, IntegrateLinearityCheck, ShiftSemigroupCheck,
    DerivativeAccuracyCheck, DerivativeOrderCheck,
    PairingOracleCheck, UnitLawCheck, CommutativityCheck, AssociativityCheck,
    AssociativityDerivativeAtomsCheck, ShiftIntertwiningCheck, ShiftIntertwiningDerivativeAtomsCheck,
    DerivativeDualityAtomsCheck, DerivativeDualityDensityCheck, SymbolReconstructionCheck,
    BoxtimesUnitCheck, BoxtimesCommutativeCheck, BoxtimesDegreeOneCheck, HomomorphismCheck,
    HomomorphismDerivativeAtomsCheck, CommutantCheck, CommutantDerivativeAtomsCheck,
    DifferentialPropertyCheck, DifferentialConvergenceCheck, PairBruteForceCheck, PairBruteForceAtomCheck,
    DegreeOneRoundTripCheck,
    FourierExpCheck, ConjugateSymmetryCheck, ConvolutionTheoremCheck, FourierDualityCheck,
    FourierPolyCheck, SymbolMultiplicativityCheck, LaplaceExponentialCheck, LaplaceBruteForceCheck,
    LaplaceInjectivityCheck,
    BlockIndicesCheck, ScalarCalculusCheck, PhiUnitCheck, PhiHomomorphismCheck, PhiCommutantCheck,
    PhiDifferentialCheck, MarginalFactorizationCheck, LinearityCheck, GaussianClosedFormCheck,
    GaussianSemigroupLawCheck, GaussianNormCheck, GaussianCoordinateOrderCheck, BlockCommutationCheck,
    ContractionCheck, ContractionNegativeControlCheck,
]

CHECK_NAMES = [cls.name for cls in ALL_CHECKS]
