# -*- coding: utf-8 -*-
"""
序列化工具
TestFn / FreqFn / Distribution / PolyTest / FockState 与 CSV、JSON 之间的转换
"""
import json
import logging
from pathlib import Path
from typing import Dict, Optional

import numpy as np
import pandas as pd

from core.distributions import Distribution
from core.exceptions import ParameterError
from core.fock import PolyDist, PolyTest
from core.halfline import DecayTag, Grid, TestFn, build_grid
from core.opcalc import FockState
from core.transforms import FreqFn

logger = logging.getLogger(__name__)

# 保证浮点数可以无损读回
FLOAT_FORMAT = "%.17g"


def write_json(path: Path, data: Dict):
    """按键排序写JSON，保证相同内容产生相同字节"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, indent=2, ensure_ascii=False, sort_keys=True)
        f.write("\n")


def read_json(path: Path) -> Dict:
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def _write_frame(df: pd.DataFrame, path: Path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    df.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")


def _sidecar(path: Path) -> Path:
    return Path(path).with_suffix(".json")


def write_testfn_csv(fn: TestFn, path: Path) -> Path:
    """写出 t,re,im，并在同名JSON中记录 {n_points, t_max, rule, decay_tag}"""
    df = pd.DataFrame({"t": fn.grid.nodes, "re": fn.values.real, "im": fn.values.imag})
    _write_frame(df, path)
    write_json(_sidecar(path), dict(fn.grid.to_dict(), decay_tag=fn.decay_tag.value))
    return Path(path)


def read_testfn_csv(path: Path, grid: Optional[Grid] = None) -> TestFn:
    """
    读回测试函数

    Args:
        path: CSV路径
        grid: 对应的网格；为 None 时按JSON附注重建

    Returns:
        TestFn: 测试函数
    """
    sidecar = _sidecar(path)
    meta = read_json(sidecar) if sidecar.is_file() else {}
    if grid is None:
        if not meta:
            raise ParameterError(f"缺少网格描述文件: {sidecar}")
        grid = build_grid(meta["n_points"], meta["t_max"], meta["rule"])
    df = pd.read_csv(path)
    if len(df) != grid.n_points or not np.allclose(df["t"].to_numpy(), grid.nodes, rtol=0, atol=1e-12):
        raise ParameterError(f"{path} 的节点与网格 {grid} 不一致")
    tag = DecayTag(meta.get("decay_tag", DecayTag.UNKNOWN.value))
    return TestFn(grid, df["re"].to_numpy() + 1j * df["im"].to_numpy(), tag)


def write_freqfn_csv(fh: FreqFn, path: Path) -> Path:
    """写出 xi,re,im"""
    df = pd.DataFrame({"xi": fh.xis, "re": fh.values.real, "im": fh.values.imag})
    _write_frame(df, path)
    return Path(path)


def write_distribution(f: Distribution, directory: Path, stem: str) -> Dict:
    """
    写出分布：原子表写入JSON，每段密度写成单独的CSV

    Args:
        f: 分布
        directory: 输出目录
        stem: 文件名前缀

    Returns:
        Dict: {atoms, density, shifted_densities}
    """
    directory = Path(directory)
    record = {
        "atoms": [{"a": a, "m": m, "re": w.real, "im": w.imag} for a, m, w in f.atoms],
        "density": None,
        "shifted_densities": [],
    }
    for k, (fn, offset) in enumerate(f.densities):
        name = f"{stem}_density_{k}.csv"
        write_testfn_csv(fn, directory / name)
        if offset == 0 and record["density"] is None:
            record["density"] = name
        else:
            record["shifted_densities"].append({"csv": name, "offset": offset})
    write_json(directory / f"{stem}.json", record)
    return record


def write_poly_test(p: PolyTest, directory: Path, stem: str = "poly") -> Dict:
    """写出多项式测试函数，相同因子只写一次"""
    directory = Path(directory)
    files: Dict[str, str] = {}
    degrees = {}
    for n in range(p.max_degree + 1):
        terms = []
        for coef, factors in p.degree_terms(n):
            names = []
            for fn in factors:
                if fn.content_hash not in files:
                    files[fn.content_hash] = f"{stem}_factor_{len(files)}.csv"
                    write_testfn_csv(fn, directory / files[fn.content_hash])
                names.append(files[fn.content_hash])
            terms.append({"re": complex(coef).real, "im": complex(coef).imag, "factors": names})
        degrees[str(n)] = terms
    manifest = {"max_degree": p.max_degree, "terms": degrees}
    write_json(directory / f"{stem}.json", manifest)
    return manifest


def write_poly_dist(F: PolyDist, directory: Path, stem: str = "polydist") -> Dict:
    """写出多项式分布：每个不同的分布写一次JSON，清单按次数引用"""
    directory = Path(directory)
    files: Dict[str, str] = {}

    def ref(f: Distribution) -> str:
        if f.content_hash not in files:
            name = f"{stem}_dist_{len(files)}"
            write_distribution(f, directory, name)
            files[f.content_hash] = f"{name}.json"
        return files[f.content_hash]

    diagonal, general = {}, {}
    for n in range(1, F.max_degree + 1):
        diagonal[str(n)] = [{"re": complex(c).real, "im": complex(c).imag, "dist": ref(f)}
                            for c, f in F.diagonal[n]]
        general[str(n)] = [{"re": complex(c).real, "im": complex(c).imag, "factors": [ref(f) for f in fs]}
                           for c, fs in F.general[n]]
    manifest = {
        "max_degree": F.max_degree,
        "scalar": {"re": F.scalar.real, "im": F.scalar.imag},
        "diagonal": diagonal,
        "general": general,
    }
    write_json(directory / f"{stem}.json", manifest)
    return manifest


def fock_component_frame(y: FockState, n: int, magnitude: bool = False) -> pd.DataFrame:
    """分量 n 的长表：xi1[,xi2[,xi3]] 加上 re,im（或 abs）"""
    arr = y.components[n]
    axes = np.meshgrid(*([y.axis(n)] * n), indexing="ij")
    data = {f"xi{j + 1}": axes[j].ravel() for j in range(n)}
    if magnitude:
        data["abs"] = np.abs(arr).ravel()
    else:
        data["re"] = arr.real.ravel()
        data["im"] = arr.imag.ravel()
    return pd.DataFrame(data)


def write_fock_state(y: FockState, directory: Path, stem: str = "state") -> Dict:
    """
    写出Fock状态：每个分量一个CSV，加上JSON清单 {N, L, nodes_per_axis}

    Args:
        y: 状态
        directory: 输出目录
        stem: 文件名前缀

    Returns:
        Dict: 清单
    """
    directory = Path(directory)
    components = {}
    for n in y.degrees:
        name = f"{stem}_component_{n}.csv"
        _write_frame(fock_component_frame(y, n), directory / name)
        components[str(n)] = name
    manifest = {
        "N": max(y.degrees, default=0),
        "L": y.L,
        "nodes_per_axis": {str(n): y.nodes(n) for n in y.degrees},
        "y0": {"re": y.y0.real, "im": y.y0.imag},
        "components": components,
        "norm": y.norm(),
    }
    write_json(directory / f"{stem}.json", manifest)
    return manifest


def read_fock_state(directory: Path, stem: str = "state") -> FockState:
    """按清单读回Fock状态"""
    directory = Path(directory)
    manifest = read_json(directory / f"{stem}.json")
    comps = {}
    for key, name in manifest["components"].items():
        n = int(key)
        M = int(manifest["nodes_per_axis"][key])
        df = pd.read_csv(directory / name)
        comps[n] = (df["re"].to_numpy() + 1j * df["im"].to_numpy()).reshape((M,) * n)
    y0 = complex(manifest["y0"]["re"], manifest["y0"]["im"])
    return FockState(y0, comps, manifest["L"])


def write_magnitude_csv(y: FockState, n: int, path: Path, extra: Optional[Dict] = None) -> Path:
    """画图用的 |yₙ| 表"""
    df = fock_component_frame(y, n, magnitude=True)
    for key, value in (extra or {}).items():
        df.insert(0, key, value)
    _write_frame(df, path)
    return Path(path)
