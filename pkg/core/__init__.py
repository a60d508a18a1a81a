"""
数值核心模块
"""
from .halfline import Grid, TestFn, build_grid, refine_grid, sample, shift_fn, diff_fn, integrate
from .distributions import (
    Distribution, PairingReport, delta_at, from_density, pair, convolve,
    cross_correlate, distr_derivative, reconstruct_symbol
)
from .fock import (
    PolyTest, PolyDist, power_test, power_dist, unit_dist, boxtimes, cross_corr_poly,
    poly_shift, poly_D_test, poly_D_dist, poly_pair, poly_sup_distance
)
from .transforms import (
    FreqFn, FreqPoly, xi_grid, fourier_fn, fourier_values, fourier_pair_check,
    fourier_poly, laplace_eval, inverse_fourier_at, distribution_symbol
)
from .opcalc import (
    FockState, Generator1D, ScalarGenerator, SecondDerivativeGenerator, GeneratorSystem,
    OperatorFn, block_indices, marginal_apply, calculus_apply, opshift_apply, phi_apply,
    gaussian_apply, contraction_report, closed_form_gaussian
)

__all__ = [
    'Grid', 'TestFn', 'build_grid', 'refine_grid', 'sample', 'shift_fn', 'diff_fn', 'integrate',
    'Distribution', 'PairingReport', 'delta_at', 'from_density', 'pair', 'convolve',
    'cross_correlate', 'distr_derivative', 'reconstruct_symbol',
    'PolyTest', 'PolyDist', 'power_test', 'power_dist', 'unit_dist', 'boxtimes', 'cross_corr_poly',
    'poly_shift', 'poly_D_test', 'poly_D_dist', 'poly_pair', 'poly_sup_distance',
    'FreqFn', 'FreqPoly', 'xi_grid', 'fourier_fn', 'fourier_values', 'fourier_pair_check',
    'fourier_poly', 'laplace_eval', 'inverse_fourier_at', 'distribution_symbol',
    'FockState', 'Generator1D', 'ScalarGenerator', 'SecondDerivativeGenerator', 'GeneratorSystem',
    'OperatorFn', 'block_indices', 'marginal_apply', 'calculus_apply', 'opshift_apply', 'phi_apply',
    'gaussian_apply', 'contraction_report', 'closed_form_gaussian',
]
