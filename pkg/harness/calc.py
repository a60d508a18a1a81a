# -*- coding: utf-8 -*-
"""
单组 (F, p, 𝐀, y) 的求值：读取配置中的 calc 段，计算 Φ_F p̃ y 并写出结果状态
"""
import logging
from pathlib import Path
from typing import Any, Dict, Optional

from config.config_manager import SuiteConfig, _deep_merge
from core.distributions import Distribution
from core.exceptions import ConfigurationError
from core.fock import PolyDist, PolyTest, power_dist, power_test
from core.halfline import Grid, build_grid
from core.opcalc import FockState, GeneratorSystem, phi_apply
from utils.serialization import write_fock_state, write_json, write_poly_dist, write_poly_test
from .corpus import PHI_EXPRESSIONS, sample_phi

logger = logging.getLogger(__name__)

DEFAULT_CALC_CONFIG = {
    "F": {"atoms": [{"a": 1.0, "m": 0, "re": 1.0, "im": 0.0}], "density": None, "density_offset": 0.0},
    "p": {"function": "exp", "max_degree": 2},
    "system": {"kind": "gaussian"},
    "state": {"kind": "gaussian", "degrees": [1, 2], "y0": 1.0, "seed": 0},
}
SYSTEM_KINDS = ("scalar", "gaussian")
STATE_KINDS = ("gaussian", "random")


def _require(condition: bool, message: str):
    if not condition:
        raise ConfigurationError(f"calc 配置错误: {message}")


def build_calc_distribution(spec: Dict[str, Any], grid: Grid) -> Distribution:
    """原子列表加上可选的语料密度"""
    atoms = []
    for atom in spec.get("atoms", []):
        _require(isinstance(atom, dict) and "a" in atom, f"原子描述不合法: {atom}")
        atoms.append((atom["a"], atom.get("m", 0), complex(atom.get("re", 1.0), atom.get("im", 0.0))))
    densities = []
    name = spec.get("density")
    if name is not None:
        _require(name in PHI_EXPRESSIONS, f"未知的密度: {name}")
        densities.append((sample_phi(name, grid), spec.get("density_offset", 0.0)))
    return Distribution(atoms, densities)


def build_calc_system(spec: Dict[str, Any], max_degree: int) -> GeneratorSystem:
    kind = spec.get("kind")
    _require(kind in SYSTEM_KINDS, f"system.kind 必须是 {SYSTEM_KINDS} 之一")
    if kind == "scalar":
        rates = spec.get("rates", [])
        _require(isinstance(rates, list) and len(rates) >= max_degree, f"至少需要 {max_degree} 个衰减率")
        return GeneratorSystem.scalar(rates, max_degree)
    return GeneratorSystem.gaussian()


def build_calc_state(spec: Dict[str, Any], config: SuiteConfig) -> FockState:
    kind = spec.get("kind")
    _require(kind in STATE_KINDS, f"state.kind 必须是 {STATE_KINDS} 之一")
    degrees = spec.get("degrees", [1])
    _require(isinstance(degrees, list) and all(n in config.nodes_per_axis for n in degrees),
             f"state.degrees 必须是配置了空间网格的次数: {degrees}")
    if kind == "random":
        return FockState.random_symmetric(int(spec.get("seed", config.seed)), degrees,
                                           config.L, config.nodes_per_axis)
    return FockState.gaussian(degrees, config.L, config.nodes_per_axis, y0=spec.get("y0", 1.0))


class CalcJob:
    """按配置组装 (F, p, 𝐀, y)"""

    def __init__(self, config: SuiteConfig):
        self.config = config
        spec = _deep_merge(DEFAULT_CALC_CONFIG, config.calc or {})
        grid = build_grid(config.grid["n_points"], config.grid["t_max"], config.grid["rule"])
        N = spec["p"].get("max_degree", config.max_degree)
        _require(isinstance(N, int) and 0 <= N <= 3, f"p.max_degree 必须在 [0, 3] 内: {N}")
        function = spec["p"].get("function")
        _require(function in PHI_EXPRESSIONS, f"未知的符号函数: {function}")

        self.grid = grid
        self.f = build_calc_distribution(spec["F"], grid)
        self.F: PolyDist = power_dist(self.f, N)
        self.p: PolyTest = power_test(sample_phi(function, grid), N)
        self.system = build_calc_system(spec["system"], N)
        self.y = build_calc_state(spec["state"], config)
        self.spec = spec

    def run(self) -> FockState:
        logger.info(f"计算 Φ_F p̃ y: F={self.f!r}, N={self.p.max_degree}, y={self.y!r}")
        return phi_apply(self.F, self.p, self.system, self.y)


def run_calc(config: SuiteConfig, out_dir: Path, job: Optional[CalcJob] = None) -> Dict:
    """
    求值并写出输入、符号与结果

    Args:
        config: 校验后的配置
        out_dir: 输出目录
        job: 已组装的求值任务（缺省按配置组装）

    Returns:
        Dict: 摘要（同时写入 calc.json）
    """
    out_dir = Path(out_dir)
    job = job or CalcJob(config)
    result = job.run()
    write_fock_state(job.y, out_dir, "input")
    write_fock_state(result, out_dir, "result")
    write_poly_dist(job.F, out_dir, "F")
    write_poly_test(job.p, out_dir, "p")
    summary = {
        "config_hash": config.config_hash,
        "calc": job.spec,
        "input_norm": job.y.norm(),
        "output_norm": result.norm(),
    }
    write_json(out_dir / "calc.json", summary)
    logger.info(f"结果已保存至: {out_dir}")
    return summary
