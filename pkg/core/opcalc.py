# -*- coding: utf-8 -*-
"""
算子演算模块
生成元系统、演算映射 𝓛 与 Φ、算子侧平移半群 T̃⊗，以及截断对称Fock空间上的Gauss半群
"""
import logging
from abc import ABC, abstractmethod
from itertools import permutations
from math import factorial
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import fft

from config.settings import DEFAULT_SPATIAL_CONFIG
from .exceptions import DegreeMismatchError, DomainError, ParameterError, ResolutionError
from .fock import PolyDist, PolyTest, cross_corr_poly, poly_shift
from .halfline import TestFn

logger = logging.getLogger(__name__)

# 频谱中被视为有效的模态（相对最大振幅）
SIGNIFICANT_AMPLITUDE = 1e-8
# 外侧四分之一模态的能量占比阈值
ALIAS_ENERGY_FRACTION = 1e-10
CONTRACTION_SLACK = 1e-10
# 构造时允许的相对对称误差
SYMMETRY_TOL = 1e-10


def _wavenumbers(M: int, L: float) -> np.ndarray:
    return 2 * np.pi * fft.fftfreq(M, d=2 * L / M)


def _along_axis(values: np.ndarray, axis: int, ndim: int) -> np.ndarray:
    shape = [1] * ndim
    shape[axis] = len(values)
    return values.reshape(shape)


def _permutation_error(arr: np.ndarray) -> float:
    n = arr.ndim
    if n < 2:
        return 0.0
    return max(float(np.max(np.abs(arr - np.transpose(arr, perm)))) for perm in permutations(range(n)))


class FockState:
    """
    截断对称Fock空间 ⊕ₙ L²_sym(ℝⁿ) 中的状态

    分量 yₙ 定义在 [-L, L)ⁿ 的周期均匀网格上，y₀ 是标量。
    """

    def __init__(self, y0: complex, components: Optional[Dict[int, np.ndarray]] = None,
                 L: float = DEFAULT_SPATIAL_CONFIG["L"], check_symmetry: bool = True):
        """
        初始化状态

        Args:
            y0: 零次分量
            components: 次数 n → 形状 (Mₙ,)*n 的复数组
            L: 空间截断半宽
            check_symmetry: 是否校验各分量在坐标置换下对称；
                单坐标生成元产生的中间状态不对称，内部运算传 False

        Raises:
            ParameterError: 形状不合法，或分量的相对对称误差超过 SYMMETRY_TOL
        """
        if L <= 0:
            raise ParameterError(f"空间半宽必须为正: {L}")
        self.y0 = complex(y0)
        self.L = float(L)
        self.components: Dict[int, np.ndarray] = {}
        for n, arr in sorted((components or {}).items()):
            arr = np.array(arr, dtype=complex)
            if n < 1 or arr.ndim != n or len(set(arr.shape)) != 1:
                raise ParameterError(f"第 {n} 个分量必须是各轴等长的 {n} 维数组，实际形状 {arr.shape}")
            if check_symmetry and n >= 2:
                err = _permutation_error(arr)
                if err > SYMMETRY_TOL * float(np.max(np.abs(arr))):
                    raise ParameterError(f"第 {n} 个分量不对称（置换误差 {err:.3e}），可先调用 symmetrized()")
            arr.setflags(write=False)
            self.components[int(n)] = arr

    @property
    def degrees(self) -> List[int]:
        return sorted(self.components)

    def nodes(self, n: int) -> int:
        return self.components[n].shape[0]

    def spacing(self, n: int) -> float:
        return 2 * self.L / self.nodes(n)

    def axis(self, n: int) -> np.ndarray:
        M = self.nodes(n)
        return -self.L + self.spacing(n) * np.arange(M)

    def wavenumbers(self, n: int) -> np.ndarray:
        return _wavenumbers(self.nodes(n), self.L)

    def component(self, n: int) -> Optional[np.ndarray]:
        return self.components.get(n)

    def norm(self) -> float:
        """‖y‖² = |y₀|² + Σₙ ‖yₙ‖² dxⁿ"""
        total = abs(self.y0) ** 2
        for n, arr in self.components.items():
            total += float(np.sum(np.abs(arr) ** 2)) * self.spacing(n) ** n
        return float(np.sqrt(total))

    def distance(self, other: "FockState") -> float:
        return (self - other).norm()

    def symmetry_error(self) -> float:
        return max((_permutation_error(arr) for arr in self.components.values()), default=0.0)

    def is_symmetric(self, tol: float = 1e-10) -> bool:
        return self.symmetry_error() <= tol

    def symmetrized(self) -> "FockState":
        comps = {}
        for n, arr in self.components.items():
            comps[n] = sum(np.transpose(arr, perm) for perm in permutations(range(n))) / factorial(n)
        return FockState(self.y0, comps, self.L)

    def with_component(self, n: int, values) -> "FockState":
        comps = dict(self.components)
        comps[n] = values
        return FockState(self.y0, comps, self.L, check_symmetry=False)

    def scaled(self, c: complex) -> "FockState":
        c = complex(c)
        return FockState(c * self.y0, {n: c * arr for n, arr in self.components.items()}, self.L,
                         check_symmetry=False)

    def zeros_like(self) -> "FockState":
        return self.scaled(0.0)

    def __add__(self, other: "FockState") -> "FockState":
        if other.L != self.L:
            raise ParameterError("两个状态的空间半宽不一致")
        comps = dict(self.components)
        for n, arr in other.components.items():
            if n in comps:
                if comps[n].shape != arr.shape:
                    raise ParameterError(f"第 {n} 个分量的网格不一致")
                comps[n] = comps[n] + arr
            else:
                comps[n] = arr
        return FockState(self.y0 + other.y0, comps, self.L, check_symmetry=False)

    def __neg__(self) -> "FockState":
        return self.scaled(-1)

    def __sub__(self, other: "FockState") -> "FockState":
        return self + (-other)

    def __mul__(self, c) -> "FockState":
        return self.scaled(c)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        shapes = {n: arr.shape for n, arr in self.components.items()}
        return f"FockState(y0={self.y0:.3g}, L={self.L}, components={shapes})"

    @classmethod
    def gaussian(cls, degrees: Sequence[int] = (1,), L: float = DEFAULT_SPATIAL_CONFIG["L"],
                 nodes_per_axis: Optional[Dict[int, int]] = None, y0: complex = 0.0,
                 width: float = 1.0) -> "FockState":
        """分量 yₙ(ξ) = ∏ⱼ exp(-ξⱼ²/(2·width²))"""
        nodes_per_axis = nodes_per_axis or DEFAULT_SPATIAL_CONFIG["nodes_per_axis"]
        comps = {}
        for n in degrees:
            M = int(nodes_per_axis[n])
            x = -L + 2 * L / M * np.arange(M)
            g = np.exp(-x ** 2 / (2 * width ** 2))
            arr = g
            for _ in range(n - 1):
                arr = np.multiply.outer(arr, g)
            comps[n] = arr
        return cls(y0, comps, L)

    @classmethod
    def random_symmetric(cls, seed: int, degrees: Sequence[int] = (1, 2),
                         L: float = DEFAULT_SPATIAL_CONFIG["L"],
                         nodes_per_axis: Optional[Dict[int, int]] = None,
                         bandwidth: float = 4.0) -> "FockState":
        """
        随机对称状态

        只激活 |k| ≤ bandwidth 的Fourier模态，保证频谱有界。

        Args:
            seed: 随机种子
            degrees: 包含的次数
            L: 空间半宽
            nodes_per_axis: 每个次数的每轴节点数
            bandwidth: 波数上限

        Returns:
            FockState: 对称状态
        """
        nodes_per_axis = nodes_per_axis or DEFAULT_SPATIAL_CONFIG["nodes_per_axis"]
        rng = np.random.default_rng(seed)
        y0 = complex(rng.normal(), rng.normal())
        comps = {}
        for n in degrees:
            M = int(nodes_per_axis[n])
            shape = (M,) * n
            spectrum = rng.normal(size=shape) + 1j * rng.normal(size=shape)
            k = _wavenumbers(M, L)
            mask = np.ones(shape, dtype=bool)
            for j in range(n):
                mask &= _along_axis(np.abs(k) <= bandwidth, j, n)
            arr = fft.ifftn(np.where(mask, spectrum, 0.0))
            arr = sum(np.transpose(arr, perm) for perm in permutations(range(n))) / factorial(n)
            comps[n] = arr / max(np.max(np.abs(arr)), 1e-300)
        return cls(y0, comps, L)


def closed_form_gaussian(t: float, xi) -> np.ndarray:
    """e^{-it∂²} 作用于 e^{-ξ²/2} 的解析解 (1-2it)^{-1/2} exp(-ξ²/(2(1-2it)))"""
    z = 1 - 2j * t
    return np.exp(-np.asarray(xi) ** 2 / (2 * z)) / np.sqrt(z)


def block_indices(n: int) -> Tuple[int, int]:
    """
    第 n 块在平铺生成元列表中的下标 (𝔟ₙ, 𝔢ₙ)，从1开始计数

    n = 0 时得到空块 (1, 0)。
    """
    if int(n) != n or n < 0:
        raise ParameterError(f"块序号必须是非负整数: {n}")
    return n * (n - 1) // 2 + 1, n * (n + 1) // 2


class Generator1D(ABC):
    """压缩 C₀ 半群 e^{-itA} 的生成元（能力接口）"""

    kind = "abstract"

    @abstractmethod
    def apply_semigroup(self, t: float, y: FockState) -> FockState:
        """计算 e^{-itA} y"""
        pass

    @abstractmethod
    def oscillation_frequency(self, y: FockState) -> float:
        """轨道 t ↦ e^{-itA}y 的最高有效振荡频率"""
        pass

    def bochner(self, phi: TestFn, y: FockState) -> FockState:
        """Bochner积分的求积近似 Σᵢ wᵢ φ(tᵢ) e^{-itᵢA} y"""
        grid = phi.grid
        out = y.zeros_like()
        for t, w, v in zip(grid.nodes, grid.weights, phi.values):
            if v != 0:
                out = out + (w * v) * self.apply_semigroup(t, y)
        return out

    def commutator_error(self, other: "Generator1D", y: FockState, times: Sequence[float]) -> float:
        worst = 0.0
        for t in times:
            for s in times:
                a = self.apply_semigroup(t, other.apply_semigroup(s, y))
                b = other.apply_semigroup(s, self.apply_semigroup(t, y))
                worst = max(worst, a.distance(b))
        return worst

    def to_dict(self) -> Dict:
        return {"kind": self.kind}


class ScalarGenerator(Generator1D):
    """标量生成元 A = λ·I，半群 e^{-itλ}，Im λ ≤ 0 时为压缩半群"""

    kind = "scalar"

    def __init__(self, lam: complex):
        self.lam = complex(lam)

    @classmethod
    def decaying(cls, rate: complex) -> "ScalarGenerator":
        """半群 e^{-rate·t} 对应的生成元 λ = -i·rate"""
        return cls(-1j * complex(rate))

    @property
    def is_contraction(self) -> bool:
        return self.lam.imag <= 0

    def apply_semigroup(self, t: float, y: FockState) -> FockState:
        if t < 0:
            raise DomainError(f"半群参数必须非负: {t}")
        return y.scaled(np.exp(-1j * t * self.lam))

    def oscillation_frequency(self, y: FockState) -> float:
        return abs(self.lam.real)

    def bochner(self, phi: TestFn, y: FockState) -> FockState:
        grid = phi.grid
        c = np.dot(grid.weights, phi.values * np.exp(-1j * grid.nodes * self.lam))
        return y.scaled(c)

    def to_dict(self) -> Dict:
        return {"kind": self.kind, "re": self.lam.real, "im": self.lam.imag}

    def __repr__(self) -> str:
        return f"ScalarGenerator({self.lam})"


class SecondDerivativeGenerator(Generator1D):
    """
    第 n 个分量上第 j 个坐标的二阶导数 D_j²

    e^{-itD_j²} 的Fourier符号是 e^{+itk²}，只作用于分量 n，其余分量不变。
    """

    kind = "second_derivative"

    def __init__(self, degree: int, axis: int):
        if degree < 1 or not 0 <= axis < degree:
            raise ParameterError(f"坐标 {axis} 不在次数 {degree} 的分量内")
        self.degree = int(degree)
        self.axis = int(axis)

    def _spectral(self, y: FockState, multiplier: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
        arr = y.components[self.degree]
        k = y.wavenumbers(self.degree)
        symbol = _along_axis(multiplier(k ** 2), self.axis, self.degree)
        return fft.ifft(symbol * fft.fft(arr, axis=self.axis), axis=self.axis)

    def apply_semigroup(self, t: float, y: FockState) -> FockState:
        if t < 0:
            raise DomainError(f"半群参数必须非负: {t}")
        if self.degree not in y.components or t == 0:
            return y
        return y.with_component(self.degree, self._spectral(y, lambda k2: np.exp(1j * t * k2)))

    def oscillation_frequency(self, y: FockState) -> float:
        arr = y.component(self.degree)
        if arr is None:
            return 0.0
        amplitude = np.abs(fft.fft(arr, axis=self.axis))
        other_axes = tuple(i for i in range(self.degree) if i != self.axis)
        profile = np.max(amplitude, axis=other_axes) if other_axes else amplitude
        peak = float(np.max(profile))
        if peak == 0:
            return 0.0
        k = y.wavenumbers(self.degree)
        return float(np.max(k[profile > SIGNIFICANT_AMPLITUDE * peak] ** 2))

    def bochner(self, phi: TestFn, y: FockState) -> FockState:
        grid = phi.grid
        weighted = grid.weights * phi.values
        total = complex(np.sum(weighted))
        rest = FockState(total * y.y0, {n: total * arr for n, arr in y.components.items()
                                        if n != self.degree}, y.L, check_symmetry=False)
        if self.degree not in y.components:
            return rest
        # 与轨道求和相同的离散积分，逐波数求出
        values = self._spectral(y, lambda k2: np.exp(1j * np.outer(k2, grid.nodes)) @ weighted)
        return rest.with_component(self.degree, values)

    def to_dict(self) -> Dict:
        return {"kind": self.kind, "degree": self.degree, "axis": self.axis}

    def __repr__(self) -> str:
        return f"SecondDerivativeGenerator(degree={self.degree}, axis={self.axis})"


class GeneratorSystem:
    """
    生成元系统 𝐀 = (A₀, A₁, A₂, …)，第 n 块含 n 个两两可交换的生成元

    块按需由工厂函数生成并缓存。
    """

    def __init__(self, blocks: Optional[Dict[int, Sequence[Generator1D]]] = None,
                 factory: Optional[Callable[[int], Sequence[Generator1D]]] = None):
        self._blocks: Dict[int, Tuple[Generator1D, ...]] = {0: ()}
        self._factory = factory
        for n, block in (blocks or {}).items():
            self._blocks[n] = self._validated(n, block)

    @staticmethod
    def _validated(n: int, block: Sequence[Generator1D]) -> Tuple[Generator1D, ...]:
        block = tuple(block)
        if len(block) != n:
            raise DegreeMismatchError(f"第 {n} 块必须恰有 {n} 个生成元，实际 {len(block)}")
        return block

    def block(self, n: int) -> Tuple[Generator1D, ...]:
        if n not in self._blocks:
            if self._factory is None:
                raise DegreeMismatchError(f"生成元系统没有第 {n} 块")
            self._blocks[n] = self._validated(n, self._factory(n))
        return self._blocks[n]

    def has_block(self, n: int) -> bool:
        return n in self._blocks or self._factory is not None

    @classmethod
    def from_flat(cls, generators: Sequence[Generator1D]) -> "GeneratorSystem":
        """按 (𝔟ₙ, 𝔢ₙ) 把平铺列表切成块，末尾不完整的块被拒绝"""
        blocks = {}
        n = 1
        while True:
            b, e = block_indices(n)
            if b > len(generators):
                break
            if e > len(generators):
                raise DegreeMismatchError(f"平铺列表长度 {len(generators)} 不能切成完整的块")
            blocks[n] = generators[b - 1:e]
            n += 1
        return cls(blocks)

    def flat(self, max_degree: int) -> List[Generator1D]:
        out = []
        for n in range(1, max_degree + 1):
            out.extend(self.block(n))
        return out

    def commutation_error(self, n: int, y: FockState, times: Sequence[float]) -> float:
        """第 n 块内所有生成元对在探针时刻上的最大交换子误差"""
        block = self.block(n)
        worst = 0.0
        for i in range(len(block)):
            for j in range(i + 1, len(block)):
                worst = max(worst, block[i].commutator_error(block[j], y, times))
        return worst

    @classmethod
    def scalar(cls, rates: Sequence[complex], max_degree: int) -> "GeneratorSystem":
        """第 n 块的第 j 个生成元为衰减率 rates[j] 的标量生成元"""
        if len(rates) < max_degree:
            raise ParameterError(f"至少需要 {max_degree} 个衰减率")
        return cls({n: [ScalarGenerator.decaying(rates[j]) for j in range(n)]
                    for n in range(1, max_degree + 1)})

    @classmethod
    def gaussian(cls) -> "GeneratorSystem":
        """Gauss半群系统：第 n 块是分量 n 上各坐标的二阶导数"""
        return cls(factory=lambda n: [SecondDerivativeGenerator(n, j) for j in range(n)])


def marginal_apply(phi: TestFn, A: Generator1D, y: FockState) -> FockState:
    """
    一维边缘算子 φ̃(A)y = ∫ φ(t) e^{-itA} y dt

    Args:
        phi: 符号
        A: 生成元
        y: 状态

    Returns:
        FockState: 结果
    """
    step = A.oscillation_frequency(y) * phi.grid.spacing
    if step > np.pi:
        raise ResolutionError(f"时间网格无法解析半群振荡：频率×步长 = {step:.3f} > π")
    if step > np.pi / 2:
        logger.warning(f"半群振荡接近时间网格分辨率上限：频率×步长 = {step:.3f}")
    return A.bochner(phi, y)


class OperatorFn:
    """符号 p 对应的分次算子 (p̃ₙ)"""

    def __init__(self, p: PolyTest):
        self.p = p

    def degree_map(self, n: int) -> Callable[[Sequence[Generator1D], FockState], FockState]:
        """第 n 次的作用 (Aₙ, y) ↦ p̃ₙ(Aₙ)y"""
        terms = self.p.degree_terms(n)

        def apply(block: Sequence[Generator1D], y: FockState) -> FockState:
            if n == 0:
                return y.scaled(self.p.scalar)
            out = y.zeros_like()
            for coef, factors in terms:
                acc = y.zeros_like()
                for perm in permutations(range(n)):
                    v = y
                    # 边缘半群可交换，依次作用即为 n 维Bochner积分
                    for j in reversed(range(n)):
                        v = marginal_apply(factors[perm[j]], block[j], v)
                    acc = acc + v
                out = out + acc.scaled(coef / factorial(n))
            return out

        return apply

    def __call__(self, system: GeneratorSystem, y: FockState) -> FockState:
        out = self.degree_map(0)((), y)
        for n in range(1, self.p.max_degree + 1):
            if not self.p.degree_terms(n):
                continue
            if not system.has_block(n):
                raise DegreeMismatchError(f"符号含 {n} 次项，但生成元系统没有第 {n} 块")
            out = out + self.degree_map(n)(system.block(n), y)
        return out


def calculus_apply(p: PolyTest, system: GeneratorSystem, y: FockState) -> FockState:
    """
    演算映射 𝓛：y ↦ p₀y + Σₙ p̃ₙ(Aₙ)y

    Args:
        p: 多项式符号
        system: 生成元系统
        y: 状态

    Returns:
        FockState: 结果
    """
    return OperatorFn(p)(system, y)


def opshift_apply(p: PolyTest, s: float, system: GeneratorSystem, y: FockState) -> FockState:
    """算子侧平移半群 T̃_s⊗ = 𝓛∘T_s⊗∘𝓛⁻¹，在符号上实现"""
    return calculus_apply(poly_shift(p, s), system, y)


def phi_apply(F: PolyDist, p: PolyTest, system: GeneratorSystem, y: FockState) -> FockState:
    """Φ_F p̃ = 𝓛[K_F⊗ p]"""
    return calculus_apply(cross_corr_poly(F, p), system, y)


def _outer_energy_fraction(arr: np.ndarray, axis: int) -> float:
    spectrum = np.abs(fft.fft(arr, axis=axis)) ** 2
    total = float(np.sum(spectrum))
    if total == 0:
        return 0.0
    M = arr.shape[axis]
    k_index = np.abs(fft.fftfreq(M) * M)
    outer = _along_axis(k_index > 3 * M / 8, axis, arr.ndim)
    return float(np.sum(np.where(outer, spectrum, 0.0))) / total


def gaussian_apply(t: Sequence[float], y: FockState) -> FockState:
    """
    Gauss半群 e^{-it·Dₙ²}：对分量 n = len(t) 的每个坐标 j 施加乘子 e^{+itⱼkⱼ²}

    Args:
        t: 每个坐标的时间参数（非负）
        y: 状态

    Returns:
        FockState: 结果，其余分量不变
    """
    t = [float(x) for x in np.atleast_1d(t)]
    n = len(t)
    if any(x < 0 for x in t):
        raise DomainError(f"Gauss半群的时间参数必须非负: {t}")
    if n not in y.components:
        raise ParameterError(f"状态没有第 {n} 个分量")
    k = y.wavenumbers(n)
    dk = np.pi / y.L
    k_max = float(np.max(np.abs(k)))
    out = y
    for j, tj in enumerate(t):
        if tj == 0:
            continue
        # Nyquist处相邻模态的相位差
        step = tj * 2 * k_max * dk
        if step > np.pi:
            fraction = _outer_energy_fraction(out.components[n], j)
            if fraction > ALIAS_ENERGY_FRACTION:
                raise ResolutionError(
                    f"乘子在Nyquist附近相位差 {step:.2f} > π，且高频能量占比 {fraction:.2e}，存在混叠")
        out = SecondDerivativeGenerator(n, j).apply_semigroup(tj, out)
    return out


class ContractionReport:
    """压缩性检查结果"""

    def __init__(self, ratios: List[Tuple[float, float]], slack: float = CONTRACTION_SLACK):
        self.ratios = ratios
        self.slack = slack
        self.max_ratio = max((r for _, r in ratios), default=0.0)
        self.violations = [(t, r) for t, r in ratios if r > 1 + slack]

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> Dict:
        return {"max_ratio": self.max_ratio, "ok": self.ok,
                "violations": [{"t": t, "ratio": r} for t, r in self.violations]}


def contraction_report(A: Generator1D, t_samples: Sequence[float],
                       probes: Optional[Sequence[FockState]] = None, seed: int = 0) -> ContractionReport:
    """
    sup_t ‖e^{-itA}‖ ≤ 1 的抽样检查

    Args:
        A: 生成元
        t_samples: 时间采样点
        probes: 探针状态（默认用随机对称状态）
        seed: 默认探针的随机种子

    Returns:
        ContractionReport: 各采样点的最大比值与违反项
    """
    if probes is None:
        degrees = (A.degree,) if isinstance(A, SecondDerivativeGenerator) else (1, 2)
        probes = [FockState.random_symmetric(seed + i, degrees) for i in range(3)]
    ratios = []
    for t in t_samples:
        worst = 0.0
        for v in probes:
            norm = v.norm()
            if norm > 0:
                worst = max(worst, A.apply_semigroup(t, v).norm() / norm)
        ratios.append((float(t), worst))
    report = ContractionReport(ratios)
    if not report.ok:
        logger.warning(f"{A!r} 不是压缩半群：最大范数比 {report.max_ratio:.6f}")
    return report
