# -*- coding: utf-8 -*-
"""
半直线模块
网格、求积规则，以及测试函数空间 S₊ 的采样表示（平移与求导）
"""
import hashlib
import logging
from enum import Enum
from functools import cached_property
from typing import Callable, Dict, Optional, Union

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.special import comb, roots_genlaguerre

from config.settings import DECAY_TOL, GRID_LIMITS
from .exceptions import GridMismatchError, ParameterError, SamplingError

logger = logging.getLogger(__name__)


class QuadratureRule(Enum):
    """求积规则"""
    TRAPEZOID = "trapezoid"
    GREGORY = "gregory"                             # 带端点修正的梯形公式
    GAUSS_LAGUERRE_MAPPED = "gauss_laguerre_mapped"  # 缩放后的Laguerre-Radau公式


class DecayTag(Enum):
    """衰减类型提示（仅用于截断误差报告）"""
    EXPONENTIAL = "exponential"
    GAUSSIAN = "gaussian"
    COMPACT = "compact"
    UNKNOWN = "unknown"


# Gregory系数 1/12, 1/24, 19/720, 3/160, 863/60480, 275/24192
GREGORY_COEFFS = (1 / 12, 1 / 24, 19 / 720, 3 / 160, 863 / 60480, 275 / 24192)


def gregory_weights(n_points: int, h: float, order: int = 5) -> np.ndarray:
    """
    计算Gregory求积权重

    梯形公式加上前向/后向差分的端点修正，修正到 order 阶差分为止。

    Args:
        n_points: 节点数
        h: 步长
        order: 修正的最高差分阶数

    Returns:
        ndarray: 权重
    """
    # 两端修正互不重叠，权重保持为正
    order = max(0, min(order, len(GREGORY_COEFFS), (n_points - 2) // 2))
    w = np.ones(n_points)
    w[0] = w[-1] = 0.5
    for j in range(1, order + 1):
        c = GREGORY_COEFFS[j - 1]
        for k in range(j + 1):
            # Δ^j f_0 中 f_k 的系数
            forward = (-1) ** (j - k) * comb(j, k, exact=True)
            # ∇^j f_N 中 f_{N-k} 的系数
            backward = (-1) ** k * comb(j, k, exact=True)
            w[k] -= c * (-1) ** j * forward
            w[n_points - 1 - k] -= c * backward
    return h * w


class Grid:
    """半直线 [0, t_max] 上的求积网格"""

    def __init__(self, nodes: np.ndarray, weights: np.ndarray, rule: QuadratureRule,
                 t_max: float, scale: Optional[float] = None):
        """
        初始化网格

        Args:
            nodes: 节点（严格递增，首节点为0）
            weights: 求积权重（正数）
            rule: 求积规则
            t_max: 截断点
            scale: Laguerre规则的缩放因子
        """
        nodes = np.asarray(nodes, dtype=float)
        weights = np.asarray(weights, dtype=float)
        if len(nodes) != len(weights):
            raise ParameterError("节点与权重长度不一致")
        if nodes[0] != 0.0 or np.any(np.diff(nodes) <= 0):
            raise ParameterError("节点必须从0开始且严格递增")
        if np.any(weights <= 0):
            raise ParameterError("求积权重必须为正")
        nodes.setflags(write=False)
        weights.setflags(write=False)
        self.nodes = nodes
        self.weights = weights
        self.rule = rule
        self.t_max = float(t_max)
        self.scale = scale

    @property
    def n_points(self) -> int:
        return len(self.nodes)

    @property
    def is_uniform(self) -> bool:
        return self.rule in (QuadratureRule.TRAPEZOID, QuadratureRule.GREGORY)

    @property
    def spacing(self) -> float:
        """步长（非均匀网格返回最大间距）"""
        if self.is_uniform:
            return self.t_max / (self.n_points - 1)
        return float(np.max(np.diff(self.nodes)))

    @property
    def key(self) -> tuple:
        return (self.rule.value, self.n_points, self.t_max)

    def __eq__(self, other) -> bool:
        return isinstance(other, Grid) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        return f"Grid(rule={self.rule.value}, n_points={self.n_points}, t_max={self.t_max})"

    def to_dict(self) -> Dict:
        return {"n_points": self.n_points, "t_max": self.t_max, "rule": self.rule.value}


def build_grid(n_points: int, t_max: float, rule: Union[str, QuadratureRule] = "trapezoid") -> Grid:
    """
    构建求积网格

    Args:
        n_points: 节点数（≥ 8）
        t_max: 截断点（> 0）
        rule: trapezoid / gregory / gauss_laguerre_mapped

    Returns:
        Grid: 网格
    """
    try:
        rule = QuadratureRule(rule)
    except ValueError:
        raise ParameterError(f"未知的求积规则: {rule}")
    if int(n_points) != n_points or n_points < GRID_LIMITS["n_points"][0]:
        raise ParameterError(f"节点数必须是不小于8的整数: {n_points}")
    if not np.isfinite(t_max) or t_max <= 0:
        raise ParameterError(f"截断点必须为正: {t_max}")
    n_points = int(n_points)

    if rule is QuadratureRule.GAUSS_LAGUERRE_MAPPED:
        if n_points > GRID_LIMITS["laguerre_max_points"]:
            raise ParameterError(f"Laguerre规则最多支持 {GRID_LIMITS['laguerre_max_points']} 个节点")
        # Radau型：节点0加上 L_{n-1}^{(1)} 的零点
        roots, w_alpha = roots_genlaguerre(n_points - 1, 1.0)
        inner = w_alpha / roots
        x = np.concatenate([[0.0], roots])
        w = np.concatenate([[1.0 - inner.sum()], inner])
        scale = t_max / x[-1]
        nodes = scale * x
        nodes[-1] = t_max
        weights = scale * np.exp(np.log(w) + x)
        return Grid(nodes, weights, rule, t_max, scale=scale)

    nodes = np.linspace(0.0, t_max, n_points)
    h = t_max / (n_points - 1)
    if rule is QuadratureRule.TRAPEZOID:
        weights = np.full(n_points, h)
        weights[0] = weights[-1] = 0.5 * h
    else:
        weights = gregory_weights(n_points, h)
    return Grid(nodes, weights, rule, t_max)


def refine_grid(grid: Grid) -> Grid:
    """步长减半后的网格（2n-1 个节点）"""
    if not grid.is_uniform:
        raise ParameterError("只有均匀网格可以加密")
    return build_grid(2 * grid.n_points - 1, grid.t_max, grid.rule)


class TestFn:
    """S₊ 的采样代理：网格节点上的复值函数"""

    __test__ = False

    def __init__(self, grid: Grid, values, decay_tag: DecayTag = DecayTag.UNKNOWN,
                 metadata: Optional[Dict] = None, decay_tol: float = DECAY_TOL):
        """
        初始化测试函数

        Args:
            grid: 网格
            values: 节点上的取值
            decay_tag: 衰减类型提示
            metadata: 附加信息（截断误差等）
            decay_tol: 尾部衰减容差
        """
        values = np.array(values, dtype=complex)
        if values.shape != (grid.n_points,):
            raise ParameterError(f"取值长度 {values.shape} 与网格节点数 {grid.n_points} 不一致")
        values.setflags(write=False)
        self.grid = grid
        self.values = values
        self.decay_tag = DecayTag(decay_tag)
        self.metadata = dict(metadata or {})

        peak = float(np.max(np.abs(values))) if len(values) else 0.0
        tail = float(abs(values[-1]))
        ratio = tail / peak if peak > 0 else 0.0
        self.metadata["tail_ratio"] = ratio
        self.metadata["decay_ok"] = ratio <= decay_tol
        if not self.metadata["decay_ok"]:
            logger.debug(f"尾部衰减检查未通过: |φ(t_max)|/max|φ| = {ratio:.3e}")

    @cached_property
    def content_hash(self) -> str:
        digest = hashlib.sha1(repr(self.grid.key).encode())
        digest.update(self.values.tobytes())
        return digest.hexdigest()

    @cached_property
    def _spline(self) -> CubicSpline:
        stacked = np.column_stack([self.values.real, self.values.imag])
        return CubicSpline(self.grid.nodes, stacked)

    @cached_property
    def _derivatives(self) -> Dict[int, "TestFn"]:
        return {0: self}

    def evaluate(self, t) -> np.ndarray:
        """
        三次样条插值求值，[0, t_max] 之外取0

        Args:
            t: 求值点

        Returns:
            ndarray: 复数值
        """
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.zeros(t.shape, dtype=complex)
        eps = 1e-12 * self.grid.t_max
        inside = (t >= -eps) & (t <= self.grid.t_max + eps)
        if np.any(inside):
            pts = np.clip(t[inside], 0.0, self.grid.t_max)
            res = self._spline(pts)
            out[inside] = res[..., 0] + 1j * res[..., 1]
        return out

    def derivative(self, m: int) -> "TestFn":
        """m 阶数值导数（重复调用 diff_fn 并缓存）"""
        if m < 0:
            raise ParameterError("导数阶数必须非负")
        cache = self._derivatives
        if m not in cache:
            cache[m] = diff_fn(self.derivative(m - 1))
        return cache[m]

    def values_at_offset(self, a: float) -> np.ndarray:
        """节点平移 a 后的取值 φ(t_i + a)"""
        if a == 0:
            return np.array(self.values)
        grid = self.grid
        if grid.is_uniform:
            q = a / grid.spacing
            qi = int(round(q))
            if abs(q - qi) < 1e-9:
                out = np.zeros(grid.n_points, dtype=complex)
                if qi < grid.n_points:
                    out[:grid.n_points - qi] = self.values[qi:]
                return out
        return self.evaluate(grid.nodes + a)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))

    def sup_distance(self, other: "TestFn") -> float:
        _check_same_grid(self, other)
        return float(np.max(np.abs(self.values - other.values)))

    def _combine_tag(self, other: "TestFn") -> DecayTag:
        return self.decay_tag if self.decay_tag == other.decay_tag else DecayTag.UNKNOWN

    def __add__(self, other: "TestFn") -> "TestFn":
        _check_same_grid(self, other)
        return TestFn(self.grid, self.values + other.values, self._combine_tag(other))

    def __sub__(self, other: "TestFn") -> "TestFn":
        _check_same_grid(self, other)
        return TestFn(self.grid, self.values - other.values, self._combine_tag(other))

    def __neg__(self) -> "TestFn":
        return TestFn(self.grid, -self.values, self.decay_tag)

    def __mul__(self, other) -> "TestFn":
        if isinstance(other, TestFn):
            _check_same_grid(self, other)
            return TestFn(self.grid, self.values * other.values, self._combine_tag(other))
        return TestFn(self.grid, complex(other) * self.values, self.decay_tag)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"TestFn({self.grid!r}, tag={self.decay_tag.value}, hash={self.content_hash[:8]})"


def _check_same_grid(a: TestFn, b: TestFn):
    if a.grid != b.grid:
        raise GridMismatchError(f"网格不一致: {a.grid} vs {b.grid}")


def sample(expr: Callable, grid: Grid, decay_tag: DecayTag = DecayTag.UNKNOWN,
           decay_tol: float = DECAY_TOL) -> TestFn:
    """
    在网格节点上采样函数

    Args:
        expr: t 的标量函数（接受ndarray）
        grid: 网格
        decay_tag: 衰减类型提示
        decay_tol: 尾部衰减容差

    Returns:
        TestFn: 采样结果
    """
    values = np.asarray(expr(grid.nodes), dtype=complex)
    if values.ndim == 0:
        values = np.full(grid.n_points, complex(values))
    if not np.all(np.isfinite(values)):
        bad = grid.nodes[~np.isfinite(values)][0]
        raise SamplingError(f"采样在 t = {bad} 处得到非有限值")
    fn = TestFn(grid, values, decay_tag, decay_tol=decay_tol)
    if not fn.metadata["decay_ok"]:
        logger.warning(f"采样函数在 t_max={grid.t_max} 处未充分衰减 (比值 {fn.metadata['tail_ratio']:.2e})")
    return fn


def shift_fn(phi: TestFn, s: float) -> TestFn:
    """
    平移半群 T_sφ(t) = φ(t+s)

    网格外部按0外推，并记录截断误差上界。

    Args:
        phi: 测试函数
        s: 平移量（≥ 0）

    Returns:
        TestFn: 平移后的函数
    """
    if s < 0:
        raise ParameterError(f"平移半群是单侧的，s 必须非负: {s}")
    if s == 0:
        return phi
    grid = phi.grid
    lost = grid.nodes >= grid.t_max - s
    bound = float(np.max(np.abs(phi.values[lost]))) if np.any(lost) else 0.0
    return TestFn(grid, phi.values_at_offset(s), phi.decay_tag, {"truncation_error": bound})


def diff_fn(phi: TestFn) -> TestFn:
    """
    数值求导

    均匀网格内部使用四阶中心差分，边界使用四阶单侧差分；
    非均匀网格退化为二阶 np.gradient；只有4个节点时对三次插值多项式求导。

    Args:
        phi: 测试函数

    Returns:
        TestFn: 导数
    """
    grid = phi.grid
    f = phi.values
    n = grid.n_points
    if n < 4:
        raise ParameterError("求导至少需要4个节点")
    if n == 4:
        # 过4个节点的三次插值多项式求导，对三次多项式精确
        x = grid.nodes / grid.t_max
        c = np.linalg.solve(np.vander(x, 4, increasing=True), f)
        d = (c[1] + 2 * c[2] * x + 3 * c[3] * x ** 2) / grid.t_max
        return TestFn(grid, d, phi.decay_tag)
    if not grid.is_uniform:
        d = np.gradient(f, grid.nodes, edge_order=2)
        return TestFn(grid, d, phi.decay_tag)

    h = grid.spacing
    d = np.empty(n, dtype=complex)
    d[2:-2] = (f[:-4] - 8 * f[1:-3] + 8 * f[3:-1] - f[4:]) / (12 * h)
    d[0] = (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]) / (12 * h)
    d[1] = (-3 * f[0] - 10 * f[1] + 18 * f[2] - 6 * f[3] + f[4]) / (12 * h)
    d[-1] = (25 * f[-1] - 48 * f[-2] + 36 * f[-3] - 16 * f[-4] + 3 * f[-5]) / (12 * h)
    d[-2] = (3 * f[-1] + 10 * f[-2] - 18 * f[-3] + 6 * f[-4] - f[-5]) / (12 * h)
    return TestFn(grid, d, phi.decay_tag)


def integrate(phi: TestFn) -> complex:
    """求积 Σ w_i φ(t_i)"""
    return complex(np.dot(phi.grid.weights, phi.values))
