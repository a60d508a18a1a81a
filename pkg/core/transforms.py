# -*- coding: utf-8 -*-
"""
变换模块
测试函数的Fourier变换 F₊、分布的广义Fourier对偶、逐因子的多项式扩展 F₊⊗，
以及Laplace变换求值
"""
import logging
from itertools import permutations
from math import factorial
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import solve_triangular
from scipy.special import comb

from config.settings import DEFAULT_FREQ_CONFIG
from .distributions import Distribution, pair
from .exceptions import DomainError, ParameterError, ResolutionError
from .fock import PolyTest
from .halfline import TestFn, sample

logger = logging.getLogger(__name__)

# |ξh| 小于此值时用Taylor级数计算矩
_SERIES_CUTOFF = 0.5
_SERIES_TERMS = 24


def xi_grid(xi_max: float = DEFAULT_FREQ_CONFIG["xi_max"],
            n_xi: int = DEFAULT_FREQ_CONFIG["n_xi"]) -> np.ndarray:
    """[-ξ_max, ξ_max] 上关于0对称的均匀频率网格"""
    if xi_max <= 0:
        raise ParameterError(f"ξ_max 必须为正: {xi_max}")
    if int(n_xi) != n_xi or n_xi < 3 or n_xi % 2 == 0:
        raise ParameterError(f"频率节点数必须是不小于3的奇数: {n_xi}")
    xis = np.linspace(-xi_max, xi_max, int(n_xi))
    xis[n_xi // 2] = 0.0
    return xis


class FreqFn:
    """频率网格上的函数 φ̂"""

    def __init__(self, xis, values, metadata: Optional[Dict] = None):
        xis = np.asarray(xis, dtype=float)
        values = np.asarray(values, dtype=complex)
        if xis.shape != values.shape or xis.ndim != 1:
            raise ParameterError("频率网格与取值长度不一致")
        if not np.allclose(xis, -xis[::-1], atol=1e-12 * max(1.0, abs(xis[-1]))):
            raise ParameterError("频率网格必须关于0对称")
        steps = np.diff(xis)
        if np.any(steps <= 0) or not np.allclose(steps, steps[0]):
            raise ParameterError("频率网格必须严格递增且均匀")
        self.xis = xis
        self.values = values
        self.metadata = dict(metadata or {})

    @property
    def xi_max(self) -> float:
        return float(self.xis[-1])

    @property
    def step(self) -> float:
        return float(self.xis[1] - self.xis[0])

    def __repr__(self) -> str:
        return f"FreqFn(xi_max={self.xi_max}, n_xi={len(self.xis)})"


def _moments(h: np.ndarray, xi: np.ndarray) -> List[np.ndarray]:
    """M_j = ∫_0^h u^j e^{-iξu} du, j = 0..3，形状 (len(h), len(xi))"""
    z = -1j * xi[None, :]
    hh = h[:, None]
    zh = z * hh
    small = np.abs(zh) < _SERIES_CUTOFF
    safe_z = np.where(small, 1.0, z)
    ez = np.exp(zh)

    moments = []
    prev = None
    for j in range(4):
        # 递推: M_j = (h^j e^{zh} - j M_{j-1}) / z
        if j == 0:
            rec = (ez - 1.0) / safe_z
        else:
            rec = (hh ** j * ez - j * prev) / safe_z
        series = np.zeros_like(zh)
        term = np.ones_like(zh)
        for r in range(_SERIES_TERMS):
            series += term / (j + r + 1)
            term = term * zh / (r + 1)
        series *= hh ** (j + 1)
        current = np.where(small, series, rec)
        moments.append(current)
        prev = current
    return moments


def fourier_values(phi: TestFn, xis) -> np.ndarray:
    """
    任意频率点上的 φ̂(ξ) = ∫ e^{-itξ} φ(t) dt

    对三次样条插值乘以振荡核做精确积分（Filon型），精度不随 |ξ| 退化。

    Args:
        phi: 测试函数
        xis: 频率点

    Returns:
        ndarray: 复数值
    """
    xis = np.atleast_1d(np.asarray(xis, dtype=float))
    nodes = phi.grid.nodes
    coeffs = phi._spline.c
    # c[p, k] 是区间 k 上 (t - x_k)^{3-p} 的系数
    a = coeffs[..., 0] + 1j * coeffs[..., 1]
    moments = _moments(np.diff(nodes), xis)
    local = sum(a[3 - j][:, None] * moments[j] for j in range(4))
    phase = np.exp(-1j * np.outer(nodes[:-1], xis))
    return np.sum(phase * local, axis=0)


def check_resolution(phi: TestFn, xi_max: float) -> float:
    """
    检查时间网格能否解析频率 ξ_max 的振荡

    Returns:
        float: 相位步长 ξ_max·h
    """
    step = xi_max * phi.grid.spacing
    if step > DEFAULT_FREQ_CONFIG["max_phase_step"]:
        raise ResolutionError(f"相位步长 ξ_max·h = {step:.3f} 超过 π，振荡无法解析")
    if step > DEFAULT_FREQ_CONFIG["warn_phase_step"]:
        logger.warning(f"相位步长 ξ_max·h = {step:.3f} 偏大，Fourier变换可能欠解析")
    return step


def fourier_fn(phi: TestFn, xis=None) -> FreqFn:
    """
    Fourier变换 F₊φ

    Args:
        phi: 测试函数
        xis: 对称频率网格（默认 xi_grid()）

    Returns:
        FreqFn: φ̂ 在网格上的取值
    """
    xis = xi_grid() if xis is None else np.asarray(xis, dtype=float)
    step = check_resolution(phi, float(np.max(np.abs(xis))))
    return FreqFn(xis, fourier_values(phi, xis), {"phase_step": step})


def _reference_coefficients(jets: Sequence[complex]) -> np.ndarray:
    """
    求 α 使 Σ_k α_k t^k e^{-t} 在0点的前 K 阶导数与 jets 一致

    d^j[t^k e^{-t}](0) = C(j,k)·k!·(-1)^{j-k}
    """
    K = len(jets)
    system = np.zeros((K, K))
    for j in range(K):
        for k in range(j + 1):
            system[j, k] = comb(j, k, exact=True) * factorial(k) * (-1) ** (j - k)
    return solve_triangular(system, np.asarray(jets, dtype=complex), lower=True)


def _reference_hat(alpha: np.ndarray, xis: np.ndarray) -> np.ndarray:
    """Σ_k α_k·k!/(1+iξ)^{k+1}"""
    base = 1.0 / (1.0 + 1j * xis)
    return sum(alpha[k] * factorial(k) * base ** (k + 1) for k in range(len(alpha)))


def _reference_derivative(alpha: np.ndarray, a: float, m: int) -> complex:
    """(Σ_k α_k t^k e^{-t})^{(m)} 在 t = a 处的值（Leibniz公式）"""
    total = 0j
    for k, coef in enumerate(alpha):
        for j in range(min(m, k) + 1):
            poly = factorial(k) / factorial(k - j) * a ** (k - j)
            total += coef * comb(m, j, exact=True) * poly * (-1) ** (m - j)
    return complex(total * np.exp(-a))


def _trapezoid_weights(xis: np.ndarray) -> np.ndarray:
    w = np.full(len(xis), xis[1] - xis[0])
    w[0] = w[-1] = 0.5 * w[1]
    return w


def boundary_jets(phi: TestFn, order: int = DEFAULT_FREQ_CONFIG["reference_order"]) -> np.ndarray:
    """φ^{(j)}(0), j < order"""
    return np.array([phi.derivative(j).values[0] for j in range(order)])


def inverse_fourier_at(phi_hat: FreqFn, a: float, m: int = 0,
                       jets: Optional[Sequence[complex]] = None) -> complex:
    """
    由 φ̂ 反求 φ^{(m)}(a)

    给出 jets 时先扣除与边界展开一致的参考函数 Σ α_k t^k e^{-t}，其变换解析已知，
    剩余部分在0点足够光滑，截断频域积分不再产生Gibbs误差。

    Args:
        phi_hat: 频域函数
        a: 求值点
        m: 导数阶数
        jets: φ 在0点的各阶导数

    Returns:
        complex: (F⁻¹φ̂)^{(m)}(a)
    """
    xis = phi_hat.xis
    residual = np.array(phi_hat.values)
    value = 0j
    if jets is not None and len(jets):
        alpha = _reference_coefficients(jets)
        residual = residual - _reference_hat(alpha, xis)
        value += _reference_derivative(alpha, a, m)
    kernel = (1j * xis) ** m * np.exp(1j * xis * a)
    value += np.dot(_trapezoid_weights(xis), residual * kernel) / (2 * np.pi)
    return complex(value)


def fourier_pair_check(f: Distribution, phi: TestFn, xis=None) -> Tuple[complex, complex]:
    """
    广义Fourier对偶 ⟨F′₊f, F₊φ⟩ = 2π⟨f, φ⟩ 的两侧

    左侧只用 φ̂ 计算：原子项为 2π(-1)^m (F⁻¹φ̂)^{(m)}(a)；
    密度项为 ∫ψ̂(ξ)e^{ibξ}ρ̂(-ξ)dξ 加上参考函数部分。

    Args:
        f: 分布
        phi: 测试函数
        xis: 频率网格

    Returns:
        (lhs, rhs)
    """
    phi_hat = fourier_fn(phi, xis)
    xis = phi_hat.xis
    jets = boundary_jets(phi)
    alpha = _reference_coefficients(jets)
    residual = phi_hat.values - _reference_hat(alpha, xis)
    weights = _trapezoid_weights(xis)

    lhs = 0j
    for a, m, w in f.atoms:
        lhs += w * 2 * np.pi * (-1) ** m * inverse_fourier_at(phi_hat, a, m, jets)
    if f.densities:
        grid = phi.grid
        refs = [sample(lambda t, k=k: t ** k * np.exp(-t), grid) for k in range(len(alpha))]
        for fn, b in f.densities:
            rho_hat = fourier_values(fn, -xis)
            lhs += np.dot(weights, residual * np.exp(1j * b * xis) * rho_hat)
            piece = Distribution(densities=[(fn, b)])
            lhs += 2 * np.pi * sum(alpha[k] * pair(piece, refs[k]) for k in range(len(alpha)))
    rhs = 2 * np.pi * pair(f, phi)
    return complex(lhs), complex(rhs)


def distribution_symbol(f: Distribution, xis) -> np.ndarray:
    """
    广义Fourier变换作为函数：δ_a^{(m)} ↦ (iξ)^m e^{-iaξ}，ρ_b ↦ e^{-ibξ}ρ̂(ξ)

    卷积在此变为逐点乘积。
    """
    xis = np.atleast_1d(np.asarray(xis, dtype=float))
    out = np.zeros(len(xis), dtype=complex)
    for a, m, w in f.atoms:
        out += w * (1j * xis) ** m * np.exp(-1j * a * xis)
    for fn, b in f.densities:
        out += fourier_values(fn, xis) * np.exp(-1j * b * xis)
    return out


class FreqPoly:
    """F₊⊗p：每个秩一项逐因子变换后的多变量乘积函数"""

    def __init__(self, max_degree: int, scalar: complex, terms: Dict[int, List[Tuple[complex, Tuple[FreqFn, ...]]]]):
        self.max_degree = max_degree
        self.scalar = complex(scalar)
        self.terms = terms

    def evaluate(self, degree: int, idx: Optional[np.ndarray] = None) -> np.ndarray:
        """
        在频率节点张量网格上求第 degree 个分量（对称化）

        Args:
            degree: 次数
            idx: 每个坐标轴使用的频率节点下标（默认全部）

        Returns:
            ndarray: 形状 (len(idx),)*degree
        """
        if degree == 0:
            return np.asarray(self.scalar)
        terms = self.terms.get(degree, [])
        if not terms:
            size = 0 if idx is None else len(idx)
            return np.zeros((size,) * degree, dtype=complex)
        if idx is None:
            idx = np.arange(len(terms[0][1][0].xis))
        out = np.zeros((len(idx),) * degree, dtype=complex)
        for coef, factors in terms:
            rows = [fh.values[idx] for fh in factors]
            for perm in permutations(range(degree)):
                block = rows[perm[0]]
                for j in perm[1:]:
                    block = np.multiply.outer(block, rows[j])
                out += coef * block / factorial(degree)
        return out


def fourier_poly(p: PolyTest, xis=None) -> FreqPoly:
    """
    逐因子Fourier变换 F₊⊗ = (F₊^{⊗n})，次数0保持不变

    Args:
        p: 多项式测试函数
        xis: 对称频率网格

    Returns:
        FreqPoly: 变换结果
    """
    xis = xi_grid() if xis is None else np.asarray(xis, dtype=float)
    cache: Dict[str, FreqFn] = {}

    def transform(phi: TestFn) -> FreqFn:
        if phi.content_hash not in cache:
            cache[phi.content_hash] = fourier_fn(phi, xis)
        return cache[phi.content_hash]

    terms = {n: [(c, tuple(transform(x) for x in factors)) for c, factors in p.degree_terms(n)]
             for n in range(1, p.max_degree + 1)}
    return FreqPoly(p.max_degree, p.scalar, terms)


def laplace_fn(phi: TestFn, lam: complex) -> complex:
    """一维Laplace变换 ∫ e^{-λt} φ(t) dt"""
    lam = complex(lam)
    if lam.real <= 0:
        raise DomainError(f"Laplace变换要求 Re λ > 0: {lam}")
    grid = phi.grid
    return complex(np.dot(grid.weights, np.exp(-lam * grid.nodes) * phi.values))


def laplace_eval(p: PolyTest, degree: int, lam: Sequence[complex]) -> complex:
    """
    多变量Laplace变换 ∫ e^{-λ·t} pₙ(t) dt

    秩一项的积分分解为一维变换的乘积，对称化对 λ 的槽位分配取平均。

    Args:
        p: 多项式测试函数
        degree: 次数 n
        lam: 长度为 n 的复参数，Re λⱼ > 0

    Returns:
        complex: 变换值
    """
    lam = [complex(x) for x in np.atleast_1d(lam)] if degree > 0 else []
    if len(lam) != degree:
        raise ParameterError(f"λ 的个数 {len(lam)} 与次数 {degree} 不一致")
    for x in lam:
        if x.real <= 0:
            raise DomainError(f"Laplace变换要求 Re λ > 0: {x}")
    if degree == 0:
        return p.scalar
    cache: Dict[Tuple[str, int], complex] = {}
    total = 0j
    for coef, factors in p.degree_terms(degree):
        acc = 0j
        for perm in permutations(range(degree)):
            prod = 1 + 0j
            for j, i in enumerate(perm):
                key = (factors[i].content_hash, j)
                if key not in cache:
                    cache[key] = laplace_fn(factors[i], lam[j])
                prod *= cache[key]
            acc += prod
        total += coef * acc / factorial(degree)
    return complex(total)
