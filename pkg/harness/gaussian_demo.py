# -*- coding: utf-8 -*-
"""
无穷维Gauss半群演示
输出各时刻 |yₙ| 的切片、演算结果、范数守恒轨迹，以及与轨道求和的交叉验证
"""
import logging
from itertools import permutations
from math import factorial
from pathlib import Path
from typing import Dict

import numpy as np
import pandas as pd

from config.config_manager import SuiteConfig
from core.fock import PolyTest, power_test
from core.halfline import DecayTag, build_grid, sample
from core.opcalc import FockState, Generator1D, GeneratorSystem, calculus_apply, gaussian_apply
from utils.serialization import FLOAT_FORMAT, write_json, write_magnitude_csv

logger = logging.getLogger(__name__)


def orbit_sum_apply(p: PolyTest, system: GeneratorSystem, y: FockState) -> FockState:
    """
    不走频谱快速路径，逐个求积节点累加半群轨道得到 𝓛(p)y

    Args:
        p: 多项式符号
        system: 生成元系统
        y: 状态

    Returns:
        FockState: 结果
    """
    out = y.scaled(p.scalar)
    for n in range(1, p.max_degree + 1):
        block = system.block(n) if p.degree_terms(n) else ()
        for coef, factors in p.degree_terms(n):
            acc = y.zeros_like()
            for perm in permutations(range(n)):
                v = y
                for j in reversed(range(n)):
                    v = Generator1D.bochner(block[j], factors[perm[j]], v)
                acc = acc + v
            out = out + acc.scaled(coef / factorial(n))
    return out


def run_gaussian_demo(config: SuiteConfig, out_dir: Path) -> Dict:
    """
    运行Gauss半群演示并写出结果

    Args:
        config: 校验后的配置（使用 grid、spatial 与 demo 段）
        out_dir: 输出目录

    Returns:
        Dict: 演示摘要（同时写入 summary.json）
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    demo = config.demo
    degrees = sorted(set(demo["degrees"]))
    rate = float(demo["decay_rate"])
    grid = build_grid(config.grid["n_points"], config.grid["t_max"], config.grid["rule"])
    logger.info(f"Gauss演示: 次数 {degrees}, 衰减率 {rate}, 时刻 {demo['times']}")

    y = FockState.gaussian(degrees, config.L, config.nodes_per_axis, y0=1.0)
    phi = sample(lambda t: np.exp(-rate * t), grid, DecayTag.EXPONENTIAL)
    p = power_test(phi, max(degrees))
    system = GeneratorSystem.gaussian()

    files = []
    trace = []
    for k, t in enumerate(demo["times"]):
        for n in degrees:
            moved = gaussian_apply([t] * n, y)
            name = f"slice_n{n}_t{k}.csv"
            write_magnitude_csv(moved, n, out_dir / name, extra={"t": float(t)})
            files.append(name)
            drift = abs(moved.norm() - y.norm()) / y.norm()
            trace.append({"t": float(t), "degree": n, "norm": moved.norm(), "drift": drift})
    pd.DataFrame(trace, columns=["t", "degree", "norm", "drift"]).to_csv(
        out_dir / "norm_trace.csv", index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    files.append("norm_trace.csv")

    result = calculus_apply(p, system, y)
    for n in degrees:
        name = f"calc_component_{n}.csv"
        write_magnitude_csv(result, n, out_dir / name)
        files.append(name)

    brute = orbit_sum_apply(p, system, y)
    scalar_only = PolyTest(p.max_degree, {0: [(2.5, ())]})
    summary = {
        "config_hash": config.config_hash,
        "degrees": degrees,
        "decay_rate": rate,
        "times": [float(t) for t in demo["times"]],
        "input_norm": y.norm(),
        "output_norm": result.norm(),
        "orbit_sum_deviation": result.distance(brute) / (1 + y.norm()),
        "scalar_only_deviation": calculus_apply(scalar_only, system, y).distance(y.scaled(2.5)),
        "max_norm_drift": max((row["drift"] for row in trace), default=0.0),
        "files": sorted(files),
    }
    write_json(out_dir / "summary.json", summary)
    logger.info(f"Gauss演示完成: 轨道求和偏差 {summary['orbit_sum_deviation']:.2e}, "
                f"范数漂移 {summary['max_norm_drift']:.2e}")
    return summary
