# -*- coding: utf-8 -*-
"""
分布模块
S′₊ 的代理：有限个Dirac原子（带导数阶数）加上平移密度之和，
提供配对、卷积、互相关、广义微分以及交换子符号重构
"""
import hashlib
import logging
from functools import cached_property
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss

from config.settings import DECAY_TOL, MAX_ATOM_ORDER
from .exceptions import (BoundaryTermError, CapabilityError, GridMismatchError,
                         OperatorError, ParameterError, SupportError)
from .halfline import Grid, TestFn, gregory_weights, integrate

logger = logging.getLogger(__name__)

# 原子位置合并的分辨率
_LOCATION_DIGITS = 12

# 密度卷积中前若干行改用Gauss-Legendre求积
_SMALL_ROWS = 12
_GL_NODES, _GL_WEIGHTS = leggauss(16)
# 非均匀网格上分段求积的段长与段数上限
_GL_PANEL = 0.5
_GL_MAX_PANELS = 512


class Atom(NamedTuple):
    """原子 weight · δ_a^{(m)}"""
    a: float
    m: int
    weight: complex


class DensityPiece(NamedTuple):
    """平移密度 ρ_b(t) = ρ(t - b)·H(t - b)"""
    fn: TestFn
    offset: float


class Distribution:
    """原子 + 平移密度表示的分布"""

    def __init__(self, atoms: Sequence = (), densities: Sequence = ()):
        """
        初始化分布

        Args:
            atoms: (a, m, weight) 列表
            densities: (TestFn, offset) 列表
        """
        merged: Dict[Tuple[float, int], complex] = {}
        for a, m, weight in atoms:
            a = float(a)
            if a < 0:
                raise SupportError(f"原子位置必须非负: {a}")
            if int(m) != m or m < 0:
                raise ParameterError(f"导数阶数必须是非负整数: {m}")
            key = (round(a, _LOCATION_DIGITS), int(m))
            merged[key] = merged.get(key, 0j) + complex(weight)
        self.atoms: Tuple[Atom, ...] = tuple(
            Atom(a, m, w) for (a, m), w in sorted(merged.items()) if w != 0
        )

        pieces: Dict[float, TestFn] = {}
        grid: Optional[Grid] = None
        for fn, offset in densities:
            offset = float(offset)
            if offset < 0:
                raise SupportError(f"密度的支撑起点必须非负: {offset}")
            if grid is None:
                grid = fn.grid
            elif fn.grid != grid:
                raise GridMismatchError("同一分布中的密度必须定义在同一网格上")
            key = round(offset, _LOCATION_DIGITS)
            pieces[key] = pieces[key] + fn if key in pieces else fn
        self.densities: Tuple[DensityPiece, ...] = tuple(
            DensityPiece(fn, b) for b, fn in sorted(pieces.items()) if np.any(fn.values != 0)
        )

    @property
    def is_atomic(self) -> bool:
        return not self.densities

    @property
    def grid(self) -> Optional[Grid]:
        return self.densities[0].fn.grid if self.densities else None

    @property
    def density(self) -> Optional[TestFn]:
        """从0开始的正则部分（若存在）"""
        for piece in self.densities:
            if piece.offset == 0:
                return piece.fn
        return None

    @property
    def max_order(self) -> int:
        return max((atom.m for atom in self.atoms), default=0)

    @cached_property
    def content_hash(self) -> str:
        digest = hashlib.sha1(repr([(a, m, w) for a, m, w in self.atoms]).encode())
        for fn, offset in self.densities:
            digest.update(repr(offset).encode())
            digest.update(fn.content_hash.encode())
        return digest.hexdigest()

    def scaled(self, c: complex) -> "Distribution":
        c = complex(c)
        return Distribution([(a, m, c * w) for a, m, w in self.atoms],
                            [(c * fn, b) for fn, b in self.densities])

    def __add__(self, other: "Distribution") -> "Distribution":
        return Distribution(self.atoms + other.atoms, self.densities + other.densities)

    def __neg__(self) -> "Distribution":
        return self.scaled(-1)

    def __sub__(self, other: "Distribution") -> "Distribution":
        return self + (-other)

    def __mul__(self, c) -> "Distribution":
        return self.scaled(c)

    __rmul__ = __mul__

    def sup_distance(self, other: "Distribution") -> float:
        """表示层面的距离：原子权重差与密度取值差的最大值"""
        diff = self - other
        worst = max((abs(w) for _, _, w in diff.atoms), default=0.0)
        for fn, _ in diff.densities:
            worst = max(worst, fn.max_abs())
        return float(worst)

    def __repr__(self) -> str:
        atoms = ", ".join(f"{w:.3g}·δ_{a:g}^({m})" for a, m, w in self.atoms)
        return f"Distribution(atoms=[{atoms}], densities={len(self.densities)})"


def delta_at(a: float, m: int = 0) -> Distribution:
    """
    Dirac原子 δ_a^{(m)}

    Args:
        a: 位置（≥ 0）
        m: 导数阶数

    Returns:
        Distribution: 单原子分布
    """
    if a < 0:
        raise SupportError(f"δ 的位置必须在 [0, +∞) 上: {a}")
    return Distribution([(a, m, 1.0)])


def from_density(fn: TestFn, offset: float = 0.0) -> Distribution:
    """由密度构造正则分布"""
    return Distribution(densities=[(fn, offset)])


def _check_order(m: int):
    if m > MAX_ATOM_ORDER:
        raise CapabilityError(f"原子导数阶数 {m} 超过支持上限 {MAX_ATOM_ORDER}")


def _check_grid(piece_grid: Grid, phi: TestFn):
    if piece_grid != phi.grid:
        raise GridMismatchError(f"密度网格 {piece_grid} 与测试函数网格 {phi.grid} 不一致")


def pair(f: Distribution, phi: TestFn) -> complex:
    """
    配对 ⟨f, φ⟩

    原子贡献 weight·(-1)^m·φ^{(m)}(a)，密度贡献 ∫ρ(t)φ(t+b)dt

    Args:
        f: 分布
        phi: 测试函数

    Returns:
        complex: 配对值
    """
    total = 0j
    for a, m, w in f.atoms:
        _check_order(m)
        total += w * (-1) ** m * phi.derivative(m).evaluate(a)[0]
    for fn, b in f.densities:
        _check_grid(fn.grid, phi)
        total += np.dot(fn.grid.weights, fn.values * phi.values_at_offset(b))
    return complex(total)


def _density_correlation(fn: TestFn, b: float, phi: TestFn) -> np.ndarray:
    """s ↦ ∫ρ(t)φ(t+b+s)dt 在节点上的取值"""
    grid = phi.grid
    n = grid.n_points
    weighted = grid.weights * fn.values
    if grid.is_uniform:
        h = grid.spacing
        q = int(np.floor(b / h + 1e-9))
        r = b - q * h
        psi = phi.values_at_offset(r) if r > 1e-12 * h else np.array(phi.values)
        shifted = np.zeros(2 * n - 1, dtype=complex)
        if q < n:
            shifted[:n - q] = psi[q:]
        # np.correlate 对第二个参数取共轭
        return np.correlate(shifted, np.conj(weighted), mode="valid")
    points = grid.nodes[:, None] + grid.nodes[None, :] + b
    table = phi.evaluate(points.ravel()).reshape(points.shape)
    return table @ weighted


def cross_correlate(f: Distribution, phi: TestFn) -> TestFn:
    """
    互相关 (f⋆φ)(s) = ⟨f, T_sφ⟩

    Args:
        f: 分布
        phi: 测试函数

    Returns:
        TestFn: 节点 s 上的取值
    """
    out = np.zeros(phi.grid.n_points, dtype=complex)
    for a, m, w in f.atoms:
        _check_order(m)
        out += w * (-1) ** m * phi.derivative(m).values_at_offset(a)
    for fn, b in f.densities:
        _check_grid(fn.grid, phi)
        out += _density_correlation(fn, b, phi)
    return TestFn(phi.grid, out, phi.decay_tag)


def _atom_density(atom: Atom, piece: DensityPiece) -> Tuple[List, List]:
    """δ_a^{(m)} * ρ_b = (ρ^{(m)})_{a+b} + Σ_k ρ^{(k)}(0)·δ_{a+b}^{(m-1-k)}"""
    a, m, w = atom
    fn, b = piece
    start = a + b
    atoms = [(start, m - 1 - k, w * fn.derivative(k).values[0]) for k in range(m)]
    return atoms, [(w * fn.derivative(m), start)]


def _gl_row(rho: TestFn, sigma: TestFn, t: float, panels: int = 1) -> complex:
    """∫_0^t ρ(u)σ(t-u)du：样条上的分段Gauss-Legendre求积"""
    edges = np.linspace(0.0, t, panels + 1)
    half = 0.5 * np.diff(edges)
    u = (edges[:-1] + half)[:, None] + half[:, None] * _GL_NODES[None, :]
    values = rho.evaluate(u.ravel()) * sigma.evaluate(t - u.ravel())
    return complex(np.sum((half[:, None] * _GL_WEIGHTS[None, :]).ravel() * values))


def _panel_convolution(rho: TestFn, sigma: TestFn) -> np.ndarray:
    """非均匀网格：每个节点单独做分段Gauss-Legendre求积"""
    nodes = rho.grid.nodes
    out = np.zeros(len(nodes), dtype=complex)
    for i, t in enumerate(nodes[1:], start=1):
        panels = int(min(max(np.ceil(t / _GL_PANEL), 1), _GL_MAX_PANELS))
        out[i] = _gl_row(rho, sigma, t, panels)
    return out


def _density_convolution(rho: TestFn, sigma: TestFn) -> TestFn:
    """
    半直线上的密度卷积 (ρ*σ)(t) = ∫_0^t ρ(u)σ(t-u)du

    均匀网格：前若干行使用样条上的Gauss-Legendre求积，其余行使用带Gregory端点修正的离散卷积；
    非均匀网格：每行都用样条上的分段Gauss-Legendre求积。
    超出 t_max 的部分被截断，截断的质量记入 metadata。
    """
    if rho.grid != sigma.grid:
        raise GridMismatchError("密度卷积要求同一网格")
    grid = rho.grid
    if not grid.is_uniform:
        return _convolution_result(rho, sigma, _panel_convolution(rho, sigma))
    n = grid.n_points
    h = grid.spacing
    r, s = rho.values, sigma.values

    out = h * np.convolve(r, s)[:n]
    correction = 1.0 - gregory_weights(4 * _SMALL_ROWS, 1.0)[:6]
    rows = np.arange(_SMALL_ROWS, n)
    for k, c in enumerate(correction):
        out[rows] -= h * c * (r[k] * s[rows - k] + r[rows - k] * s[k])

    out[0] = 0.0
    for i in range(1, min(_SMALL_ROWS, n)):
        t = grid.nodes[i]
        out[i] = _gl_row(rho, sigma, t)
    return _convolution_result(rho, sigma, out)


def _convolution_result(rho: TestFn, sigma: TestFn, out: np.ndarray) -> TestFn:
    grid = rho.grid
    result = TestFn(grid, out, rho._combine_tag(sigma))
    mass = abs(integrate(rho) * integrate(sigma) - integrate(result))
    result.metadata["truncated_mass"] = float(mass)
    if mass > DECAY_TOL:
        logger.debug(f"密度卷积在 t_max 处截断，丢失质量约 {mass:.2e}")
    return result


def convolve(f: Distribution, g: Distribution) -> Distribution:
    """
    卷积 ⟨f*g, φ⟩ = ⟨f(s), ⟨g(t), φ(s+t)⟩⟩

    Args:
        f: 分布
        g: 分布

    Returns:
        Distribution: 卷积结果
    """
    atoms, pieces = [], []
    for a1, m1, w1 in f.atoms:
        for a2, m2, w2 in g.atoms:
            _check_order(m1 + m2)
            atoms.append((a1 + a2, m1 + m2, w1 * w2))
    for atom in f.atoms:
        _check_order(atom.m)
        for piece in g.densities:
            new_atoms, new_pieces = _atom_density(atom, piece)
            atoms += new_atoms
            pieces += new_pieces
    for piece in f.densities:
        for atom in g.atoms:
            _check_order(atom.m)
            new_atoms, new_pieces = _atom_density(atom, piece)
            atoms += new_atoms
            pieces += new_pieces
    for fn1, b1 in f.densities:
        for fn2, b2 in g.densities:
            pieces.append((_density_convolution(fn1, fn2), b1 + b2))
    return Distribution(atoms, pieces)


def distr_derivative(f: Distribution, boundary: str = "refuse",
                     decay_tol: float = DECAY_TOL) -> Distribution:
    """
    广义微分 ⟨Df, φ⟩ = -⟨f, Dφ⟩

    Args:
        f: 分布
        boundary: "refuse" 在密度于起点不可忽略时报错；"atom" 显式补上跳跃原子 ρ(0)δ_b
        decay_tol: 判断密度起点取值可忽略的相对容差

    Returns:
        Distribution: 导数
    """
    if boundary not in ("refuse", "atom"):
        raise ParameterError(f"未知的边界策略: {boundary}")
    atoms = []
    for a, m, w in f.atoms:
        _check_order(m + 1)
        atoms.append((a, m + 1, w))
    pieces = []
    for fn, b in f.densities:
        start = fn.values[0]
        if abs(start) > decay_tol * max(fn.max_abs(), 1e-300):
            if boundary == "refuse":
                raise BoundaryTermError(f"密度在支撑起点 {b} 处取值 {abs(start):.3e}，存在边界项")
            atoms.append((b, 0, start))
        pieces.append((fn.derivative(1), b))
    return Distribution(atoms, pieces)


class PairingReport:
    """以探针配对表示的泛函"""

    def __init__(self, probes: List[str], values):
        """
        初始化配对表

        Args:
            probes: 探针标识
            values: 每个探针上的配对值
        """
        values = np.asarray(values, dtype=complex)
        if len(values) != len(probes):
            raise ParameterError("探针数与配对值个数不一致")
        self.probes = list(probes)
        self.values = values

    def max_deviation(self, f: Distribution, probes: Sequence[TestFn]) -> float:
        """与直接配对 pair(f, probe) 的最大偏差"""
        direct = np.array([pair(f, p) for p in probes])
        return float(np.max(np.abs(direct - self.values))) if len(direct) else 0.0

    def to_records(self) -> List[Dict]:
        return [{"probe": name, "re": v.real, "im": v.imag} for name, v in zip(self.probes, self.values)]


def reconstruct_symbol(K: Callable[[TestFn], TestFn], probes: Sequence[TestFn],
                       names: Optional[Sequence[str]] = None) -> PairingReport:
    """
    由与平移交换的算子 K 重构符号 h：⟨h, φ⟩ := (Kφ)(0)

    Args:
        K: TestFn → TestFn 的算子
        probes: 探针函数
        names: 探针标识（默认使用内容哈希）

    Returns:
        PairingReport: h 在每个探针上的配对值
    """
    names = list(names) if names is not None else [p.content_hash[:12] for p in probes]
    if len(names) != len(probes):
        raise ParameterError(f"名称数 {len(names)} 与测试函数数 {len(probes)} 不一致")
    values = []
    for name, probe in zip(names, probes):
        try:
            values.append(K(probe).values[0])
        except Exception as e:
            raise OperatorError(f"算子在探针 {name} 上求值失败: {e}") from e
    return PairingReport(names, values)
