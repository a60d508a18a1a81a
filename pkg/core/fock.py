# -*- coding: utf-8 -*-
"""
分次代数模块
Γ(S₊) 与 Γ(S′₊)：逐次数的对称秩一张量项、⊛ 乘积、多项式互相关 K⊗、
多项式平移 T⊗、导子 𝔻 以及分次配对
"""
import hashlib
import logging
from functools import cached_property
from itertools import permutations
from math import factorial
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from config.settings import DEFAULT_MAX_DEGREE
from .distributions import Distribution, convolve, cross_correlate, delta_at, distr_derivative, pair
from .exceptions import CapabilityError, DegreeMismatchError, GridMismatchError, ParameterError
from .halfline import Grid, TestFn, diff_fn, shift_fn

logger = logging.getLogger(__name__)

# 探针网格默认规模
PROBE_COUNT = 16
PROBE_T_LIMIT = 8.0


def _check_degree(max_degree: int):
    if int(max_degree) != max_degree or max_degree < 0:
        raise ParameterError(f"最高次数必须是非负整数: {max_degree}")


def _merge(terms: Iterable[Tuple[complex, tuple]], key_of) -> List[Tuple[complex, tuple]]:
    """按规范顺序合并相同因子的项，去掉零系数项"""
    merged: Dict[tuple, List] = {}
    for coef, factors in terms:
        factors = tuple(sorted(factors, key=key_of))
        key = tuple(key_of(x) for x in factors)
        if key in merged:
            merged[key][0] += complex(coef)
        else:
            merged[key] = [complex(coef), factors]
    return [(c, f) for _, (c, f) in sorted(merged.items()) if c != 0]


def _fn_key(fn: TestFn) -> str:
    return fn.content_hash


def _dist_key(f: Distribution) -> str:
    return f.content_hash


class PolyTest:
    """多项式测试函数 p = (pₙ)，每个次数是对称化秩一项的有限和"""

    __test__ = False

    def __init__(self, max_degree: int, terms: Optional[Dict[int, Iterable]] = None):
        """
        初始化多项式测试函数

        Args:
            max_degree: 最高次数 N
            terms: 次数 → [(系数, 因子元组)]；次数0的因子元组为空
        """
        _check_degree(max_degree)
        self.max_degree = int(max_degree)
        self.terms: Dict[int, List[Tuple[complex, Tuple[TestFn, ...]]]] = {}
        grid: Optional[Grid] = None
        for n in range(self.max_degree + 1):
            raw = list((terms or {}).get(n, []))
            for _, factors in raw:
                if len(factors) != n:
                    raise DegreeMismatchError(f"次数 {n} 的项必须有 {n} 个因子，实际 {len(factors)}")
                for fn in factors:
                    if grid is None:
                        grid = fn.grid
                    elif fn.grid != grid:
                        raise GridMismatchError("同一多项式的因子必须定义在同一网格上")
            self.terms[n] = _merge(raw, _fn_key)
        extra = set((terms or {}).keys()) - set(range(self.max_degree + 1))
        if extra:
            raise DegreeMismatchError(f"存在超过最高次数 {self.max_degree} 的项: {sorted(extra)}")
        self.grid = grid

    @property
    def scalar(self) -> complex:
        """次数0的系数 p₀"""
        return sum((c for c, _ in self.terms[0]), 0j)

    def degree_terms(self, n: int) -> List[Tuple[complex, Tuple[TestFn, ...]]]:
        return self.terms.get(n, [])

    @cached_property
    def content_hash(self) -> str:
        digest = hashlib.sha1(str(self.max_degree).encode())
        for n in range(self.max_degree + 1):
            for c, factors in self.terms[n]:
                digest.update(repr((n, c, [_fn_key(x) for x in factors])).encode())
        return digest.hexdigest()

    def map_factors(self, fn) -> "PolyTest":
        """对每个因子施加同一个单变量映射"""
        return PolyTest(self.max_degree, {
            n: [(c, tuple(fn(x) for x in factors)) for c, factors in self.terms[n]]
            for n in range(self.max_degree + 1)
        })

    def scaled(self, c: complex) -> "PolyTest":
        c = complex(c)
        return PolyTest(self.max_degree, {n: [(c * d, f) for d, f in self.terms[n]]
                                          for n in range(self.max_degree + 1)})

    def __add__(self, other: "PolyTest") -> "PolyTest":
        top = max(self.max_degree, other.max_degree)
        return PolyTest(top, {n: self.degree_terms(n) + other.degree_terms(n) for n in range(top + 1)})

    def __neg__(self) -> "PolyTest":
        return self.scaled(-1)

    def __sub__(self, other: "PolyTest") -> "PolyTest":
        return self + (-other)

    def __mul__(self, c) -> "PolyTest":
        return self.scaled(c)

    __rmul__ = __mul__

    def sample(self, degree: int, idx: Optional[np.ndarray] = None) -> np.ndarray:
        """
        在张量探针网格上求第 degree 个分量的值

        对称化项 Sym(χ₁⊗…⊗χₙ) 取所有槽位排列的平均。

        Args:
            degree: 次数 n
            idx: 每个坐标轴使用的网格节点下标（默认 probe_indices）

        Returns:
            ndarray: 形状 (len(idx),)*n 的复数组；n = 0 时为标量数组
        """
        if degree == 0:
            return np.asarray(self.scalar)
        if self.grid is None:
            size = PROBE_COUNT if idx is None else len(idx)
            return np.zeros((size,) * degree, dtype=complex)
        if idx is None:
            idx = probe_indices(self.grid)
        out = np.zeros((len(idx),) * degree, dtype=complex)
        for coef, factors in self.degree_terms(degree):
            rows = [fn.values[idx] for fn in factors]
            acc = np.zeros_like(out)
            for perm in permutations(range(degree)):
                block = rows[perm[0]]
                for j in perm[1:]:
                    block = np.multiply.outer(block, rows[j])
                acc += block
            out += coef * acc / factorial(degree)
        return out

    def __repr__(self) -> str:
        counts = {n: len(t) for n, t in self.terms.items() if t}
        return f"PolyTest(N={self.max_degree}, terms={counts})"


class PolyDist:
    """
    多项式分布 F = (Fₙ)

    对角项 c·f^{⊗n} 是代数生成元；一般对称秩一项只作为 𝔻 的像出现，
    可以参与互相关与配对，不能参与 ⊛。
    """

    def __init__(self, max_degree: int, diagonal: Optional[Dict[int, Iterable]] = None,
                 general: Optional[Dict[int, Iterable]] = None):
        """
        初始化多项式分布

        Args:
            max_degree: 最高次数 N
            diagonal: 次数 → [(系数, 基分布)]，次数0的基分布约定为 δ
            general: 次数 → [(系数, 分布因子元组)]
        """
        _check_degree(max_degree)
        self.max_degree = int(max_degree)
        diagonal = diagonal or {}
        general = general or {}
        extra = (set(diagonal) | set(general)) - set(range(self.max_degree + 1))
        if extra:
            raise DegreeMismatchError(f"存在超过最高次数 {self.max_degree} 的项: {sorted(extra)}")

        self.diagonal: Dict[int, List[Tuple[complex, Distribution]]] = {}
        self.general: Dict[int, List[Tuple[complex, Tuple[Distribution, ...]]]] = {}
        unit = delta_at(0.0)
        for n in range(self.max_degree + 1):
            raw = list(diagonal.get(n, []))
            if n == 0:
                raw = [(c, unit) for c, _ in raw]
            merged = _merge(((c, (f,)) for c, f in raw), _dist_key)
            self.diagonal[n] = [(c, f[0]) for c, f in merged]

            raw = list(general.get(n, []))
            for _, factors in raw:
                if len(factors) != n:
                    raise DegreeMismatchError(f"次数 {n} 的一般项必须有 {n} 个因子")
            self.general[n] = _merge(raw, _dist_key) if n > 0 else []
        if general.get(0):
            scalar = sum((complex(c) for c, _ in general[0]), 0j)
            self.diagonal[0] = [(self.scalar + scalar, unit)] if self.scalar + scalar != 0 else []

    @property
    def scalar(self) -> complex:
        return sum((c for c, _ in self.diagonal[0]), 0j)

    @property
    def is_diagonal(self) -> bool:
        return not any(self.general.values())

    def scaled(self, c: complex) -> "PolyDist":
        c = complex(c)
        top = range(self.max_degree + 1)
        return PolyDist(self.max_degree,
                        {n: [(c * d, f) for d, f in self.diagonal[n]] for n in top},
                        {n: [(c * d, f) for d, f in self.general[n]] for n in top})

    def __add__(self, other: "PolyDist") -> "PolyDist":
        top = max(self.max_degree, other.max_degree)
        return PolyDist(top,
                        {n: self.diagonal.get(n, []) + other.diagonal.get(n, []) for n in range(top + 1)},
                        {n: self.general.get(n, []) + other.general.get(n, []) for n in range(top + 1)})

    def __neg__(self) -> "PolyDist":
        return self.scaled(-1)

    def __sub__(self, other: "PolyDist") -> "PolyDist":
        return self + (-other)

    def weak_distance(self, other: "PolyDist", probes: Sequence[PolyTest]) -> float:
        """通过与探针多项式的配对比较两个多项式分布"""
        diffs = [abs(poly_pair(self, p) - poly_pair(other, p)) for p in probes]
        return float(max(diffs, default=0.0))

    def __repr__(self) -> str:
        diag = {n: len(t) for n, t in self.diagonal.items() if t}
        gen = {n: len(t) for n, t in self.general.items() if t}
        return f"PolyDist(N={self.max_degree}, diagonal={diag}, general={gen})"


def probe_indices(grid: Grid, count: int = PROBE_COUNT, t_limit: float = PROBE_T_LIMIT) -> np.ndarray:
    """[0, t_limit] 内均匀选取的网格节点下标"""
    last = int(np.searchsorted(grid.nodes, min(t_limit, grid.t_max), side="right")) - 1
    return np.unique(np.linspace(0, max(last, 0), count).round().astype(int))


def poly_sup_distance(p: PolyTest, q: PolyTest, idx: Optional[np.ndarray] = None) -> float:
    """两个多项式测试函数在探针网格上的最大偏差"""
    top = max(p.max_degree, q.max_degree)
    grid = p.grid or q.grid
    if grid is not None and idx is None:
        idx = probe_indices(grid)
    worst = abs(p.scalar - q.scalar)
    for n in range(1, top + 1):
        worst = max(worst, float(np.max(np.abs(p.sample(n, idx) - q.sample(n, idx)))))
    return float(worst)


def power_test(phi: TestFn, N: int) -> PolyTest:
    """张量幂 (φ^{⊗n})_{n≤N}，φ^{⊗0} = 1"""
    _check_degree(N)
    return PolyTest(N, {n: [(1.0, (phi,) * n)] for n in range(N + 1)})


def power_dist(f: Distribution, N: int) -> PolyDist:
    """张量幂 (f^{⊗n})_{n≤N}"""
    _check_degree(N)
    return PolyDist(N, {n: [(1.0, f)] for n in range(N + 1)})


def unit_dist(N: int = DEFAULT_MAX_DEGREE) -> PolyDist:
    """⊛ 的单位元 (δ^{⊗n})"""
    return power_dist(delta_at(0.0), N)


def boxtimes(F: PolyDist, G: PolyDist) -> PolyDist:
    """
    逐次数乘积 (f^{⊗n}) ⊛ (g^{⊗n}) = ((f*g)^{⊗n})

    次数不同时较小者按零项补齐。

    Args:
        F: 对角多项式分布
        G: 对角多项式分布

    Returns:
        PolyDist: 乘积
    """
    if not (F.is_diagonal and G.is_diagonal):
        raise CapabilityError("⊛ 只对对角项 c·f^{⊗n} 定义")
    top = max(F.max_degree, G.max_degree)
    cache: Dict[Tuple[str, str], Distribution] = {}
    diagonal = {0: [(F.scalar * G.scalar, None)]}
    for n in range(1, top + 1):
        terms = []
        for c1, f in F.diagonal.get(n, []):
            for c2, g in G.diagonal.get(n, []):
                key = (f.content_hash, g.content_hash)
                if key not in cache:
                    cache[key] = convolve(f, g)
                terms.append((c1 * c2, cache[key]))
        diagonal[n] = terms
    return PolyDist(top, diagonal)


def _require_same_degree(F: PolyDist, p: PolyTest):
    if F.max_degree != p.max_degree:
        raise DegreeMismatchError(f"最高次数不一致: F 为 {F.max_degree}, p 为 {p.max_degree}")


def cross_corr_poly(F: PolyDist, p: PolyTest) -> PolyTest:
    """
    多项式互相关 F⋆p = (K_{Fₙ}^{⊗n} pₙ)

    对角项逐槽作用；一般项对槽位匹配取平均。

    Args:
        F: 多项式分布
        p: 多项式测试函数

    Returns:
        PolyTest: 结果
    """
    _require_same_degree(F, p)
    cache: Dict[Tuple[str, str], TestFn] = {}

    def corr(f: Distribution, phi: TestFn) -> TestFn:
        key = (f.content_hash, phi.content_hash)
        if key not in cache:
            cache[key] = cross_correlate(f, phi)
        return cache[key]

    terms = {0: [(F.scalar * p.scalar, ())]}
    for n in range(1, p.max_degree + 1):
        out = []
        for d, phis in p.degree_terms(n):
            for c, f in F.diagonal[n]:
                out.append((c * d, tuple(corr(f, phi) for phi in phis)))
            for c, fs in F.general[n]:
                weight = c * d / factorial(n)
                for perm in permutations(range(n)):
                    out.append((weight, tuple(corr(fs[i], phis[perm[i]]) for i in range(n))))
        terms[n] = out
    return PolyTest(p.max_degree, terms)


def poly_shift(p: PolyTest, s: float) -> PolyTest:
    """多项式平移半群 T_s^{⊗n}：所有槽位平移同一个 s"""
    if s < 0:
        raise ParameterError(f"平移量必须非负: {s}")
    if s == 0:
        return p
    return p.map_factors(lambda fn: shift_fn(fn, s))


def poly_D_test(p: PolyTest) -> PolyTest:
    """导子 𝔻：对每个秩一项依次把一个槽位替换为其导数并求和"""
    terms = {0: []}
    for n in range(1, p.max_degree + 1):
        out = []
        for d, phis in p.degree_terms(n):
            for j in range(n):
                out.append((d, phis[:j] + (phis[j].derivative(1),) + phis[j + 1:]))
        terms[n] = out
    return PolyTest(p.max_degree, terms)


def poly_D_dist(F: PolyDist, boundary: str = "refuse") -> PolyDist:
    """
    分布侧的导子 𝔻

    对角项的像不再是对角的，结果全部存放在一般项列表中。

    Args:
        F: 多项式分布
        boundary: 传给 distr_derivative 的边界策略

    Returns:
        PolyDist: 只含一般项的多项式分布
    """
    cache: Dict[str, Distribution] = {}

    def deriv(f: Distribution) -> Distribution:
        if f.content_hash not in cache:
            cache[f.content_hash] = distr_derivative(f, boundary=boundary)
        return cache[f.content_hash]

    general = {}
    for n in range(1, F.max_degree + 1):
        out = []
        for c, f in F.diagonal[n]:
            for j in range(n):
                out.append((c, (f,) * j + (deriv(f),) + (f,) * (n - 1 - j)))
        for c, fs in F.general[n]:
            for j in range(n):
                out.append((c, fs[:j] + (deriv(fs[j]),) + fs[j + 1:]))
        general[n] = out
    return PolyDist(F.max_degree, general=general)


def poly_pair(F: PolyDist, p: PolyTest) -> complex:
    """
    分次配对 ⟨F, p⟩ = Σₙ ⟨Fₙ, pₙ⟩

    Args:
        F: 多项式分布
        p: 多项式测试函数

    Returns:
        complex: 配对值
    """
    _require_same_degree(F, p)
    cache: Dict[Tuple[str, str], complex] = {}

    def pv(f: Distribution, phi: TestFn) -> complex:
        key = (f.content_hash, phi.content_hash)
        if key not in cache:
            cache[key] = pair(f, phi)
        return cache[key]

    total = F.scalar * p.scalar
    for n in range(1, p.max_degree + 1):
        for d, phis in p.degree_terms(n):
            for c, f in F.diagonal[n]:
                total += c * d * np.prod([pv(f, phi) for phi in phis])
            for c, fs in F.general[n]:
                acc = sum(np.prod([pv(fs[i], phis[perm[i]]) for i in range(n)])
                          for perm in permutations(range(n)))
                total += c * d * acc / factorial(n)
    return complex(total)
