# -*- coding: utf-8 -*-
"""
标准语料：测试函数、分布、平移量、Laplace探针以及解析结果
"""
import logging
from math import factorial
from typing import Dict, List

import numpy as np

from config.settings import LAPLACE_PROBES
from core.distributions import Distribution, delta_at, from_density
from core.halfline import DecayTag, Grid, TestFn, sample

logger = logging.getLogger(__name__)

SHIFTS = (0.0, 0.3, 1.0)

# t^k e^{-t} 族的幂次
EXPONENTIAL_FAMILY = {"exp": 0, "t_exp": 1, "t2_exp": 2}

PHI_EXPRESSIONS = {
    "exp": (lambda t: np.exp(-t), DecayTag.EXPONENTIAL),
    "t_exp": (lambda t: t * np.exp(-t), DecayTag.EXPONENTIAL),
    "t2_exp": (lambda t: t ** 2 * np.exp(-t), DecayTag.EXPONENTIAL),
    "gauss": (lambda t: np.exp(-t ** 2), DecayTag.GAUSSIAN),
}

ATOM_NAMES = ("delta", "delta_1", "d_delta_0")
# 密度分布 → 其密度所用的测试函数
DENSITY_PROFILES = {"density_exp": "exp", "density_t_exp": "t_exp"}
DENSITY_NAMES = tuple(DENSITY_PROFILES)
# 在0点可忽略，能直接做广义微分的分布
BOUNDARY_SAFE = ("delta", "delta_1", "d_delta_0", "density_t_exp")


def sample_phi(name: str, grid: Grid) -> TestFn:
    expr, tag = PHI_EXPRESSIONS[name]
    return sample(expr, grid, tag)


def build_distribution(name: str, grid: Grid) -> Distribution:
    if name == "delta":
        return delta_at(0.0)
    if name == "delta_1":
        return delta_at(1.0)
    if name == "d_delta_0":
        return delta_at(0.0, 1)
    if name in DENSITY_PROFILES:
        return from_density(sample_phi(DENSITY_PROFILES[name], grid))
    raise KeyError(f"未知的语料分布: {name}")


def laplace_exact(name: str, lam: complex) -> complex:
    """∫ e^{-λt} t^k e^{-t} dt = k!/(λ+1)^{k+1}"""
    k = EXPONENTIAL_FAMILY[name]
    return factorial(k) / (lam + 1) ** (k + 1)


def fourier_exact(name: str, xis) -> np.ndarray:
    """t^k e^{-t} 的Fourier变换 k!/(1+iξ)^{k+1}"""
    return laplace_exact(name, 1j * np.asarray(xis))


class Corpus:
    """固定语料，按网格采样"""

    def __init__(self, grid: Grid, atoms_only: bool = False):
        """
        初始化语料

        Args:
            grid: 半直线网格
            atoms_only: 只保留原子型分布
        """
        self.grid = grid
        self.atoms_only = atoms_only
        self.phis: Dict[str, TestFn] = {name: sample_phi(name, grid) for name in PHI_EXPRESSIONS}
        names = ATOM_NAMES if atoms_only else ATOM_NAMES + DENSITY_NAMES
        self.dists: Dict[str, Distribution] = {name: build_distribution(name, grid) for name in names}
        self.shifts = SHIFTS
        self.lambdas = list(LAPLACE_PROBES)
        logger.debug(f"语料: {len(self.phis)} 个测试函数, {len(self.dists)} 个分布")

    @property
    def densities(self) -> Dict[str, Distribution]:
        return {k: v for k, v in self.dists.items() if k in DENSITY_NAMES}

    def boundary_safe(self) -> Dict[str, Distribution]:
        return {k: v for k, v in self.dists.items() if k in BOUNDARY_SAFE}

    def exponential_family(self) -> List[str]:
        return list(EXPONENTIAL_FAMILY)
