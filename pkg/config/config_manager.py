"""
配置管理器 - 读取并校验套件配置文件
"""
import copy
import hashlib
import json
import logging
import os
from pathlib import Path
from typing import Any, Dict, List, Optional

from dotenv import load_dotenv

from config.settings import (DEFAULT_FREQ_CONFIG, DEFAULT_SUITE_CONFIG, GRID_LIMITS,
                             THREADS_ENV_VAR, TOLERANCES)
from core.exceptions import ConfigurationError

logger = logging.getLogger(__name__)

CORPUS_CHOICES = ("full", "atoms-only")
MAX_FOCK_DEGREE = 3

# 各配置段允许的键
SECTION_KEYS = {
    "grid": {"n_points", "t_max", "rule"},
    "spatial": {"L", "nodes_per_axis"},
    "frequency": {"xi_max", "n_xi"},
    "demo": {"times", "decay_rate", "degrees"},
    "calc": {"F", "p", "system", "state"},
}
TOP_LEVEL_KEYS = set(DEFAULT_SUITE_CONFIG) | {"demo", "calc"}
# 单组求值各子段允许的键
CALC_KEYS = {
    "F": {"atoms", "density", "density_offset"},
    "p": {"function", "max_degree"},
    "system": {"kind", "rates"},
    "state": {"kind", "degrees", "y0", "seed"},
}
ATOM_KEYS = {"a", "m", "re", "im"}

DEFAULT_DEMO_CONFIG = {"times": [0.0, 0.1, 0.25, 0.5], "decay_rate": 1.0, "degrees": [1, 2]}


def _deep_merge(base: Dict, override: Dict) -> Dict:
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def _is_number(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _validate_calc_keys(calc) -> List[str]:
    """calc 各子段及原子条目中的未知键"""
    if not isinstance(calc, dict):
        return []
    errors = []
    for section, allowed in CALC_KEYS.items():
        value = calc.get(section)
        if value is None:
            continue
        if not isinstance(value, dict):
            errors.append(f"calc.{section} 必须是对象")
            continue
        for key in sorted(set(value) - allowed):
            errors.append(f"未知的配置项: calc.{section}.{key}")
    f_spec = calc.get("F")
    atoms = f_spec.get("atoms", []) if isinstance(f_spec, dict) else []
    if not isinstance(atoms, list):
        errors.append("calc.F.atoms 必须是列表")
    else:
        for i, atom in enumerate(atoms):
            if not isinstance(atom, dict):
                errors.append(f"calc.F.atoms[{i}] 必须是对象")
            else:
                errors += [f"未知的配置项: calc.F.atoms[{i}].{key}" for key in sorted(set(atom) - ATOM_KEYS)]
    return errors


def validate_suite_config(data: Dict[str, Any]) -> List[str]:
    """
    校验配置内容

    Args:
        data: 已与默认值合并的配置字典

    Returns:
        List[str]: 错误信息（为空表示通过）
    """
    errors = []
    for key in sorted(set(data) - TOP_LEVEL_KEYS):
        errors.append(f"未知的配置项: {key}")
    for section, allowed in SECTION_KEYS.items():
        value = data.get(section)
        if value is None:
            continue
        if not isinstance(value, dict):
            errors.append(f"{section} 必须是对象")
            continue
        for key in sorted(set(value) - allowed):
            errors.append(f"未知的配置项: {section}.{key}")
    errors += _validate_calc_keys(data.get("calc"))

    grid = data.get("grid", {})
    lo, hi = GRID_LIMITS["n_points"]
    if not isinstance(grid.get("n_points"), int) or not lo <= grid["n_points"] <= hi:
        errors.append(f"grid.n_points 必须是 [{lo}, {hi}] 内的整数")
    lo, hi = GRID_LIMITS["t_max"]
    if not _is_number(grid.get("t_max")) or not lo <= grid["t_max"] <= hi:
        errors.append(f"grid.t_max 必须在 [{lo}, {hi}] 内")
    if grid.get("rule") not in GRID_LIMITS["rules"]:
        errors.append(f"grid.rule 必须是 {GRID_LIMITS['rules']} 之一")
    elif grid["rule"] == "gauss_laguerre_mapped" and isinstance(grid.get("n_points"), int) \
            and grid["n_points"] > GRID_LIMITS["laguerre_max_points"]:
        errors.append(f"gauss_laguerre_mapped 最多支持 {GRID_LIMITS['laguerre_max_points']} 个节点")

    degree = data.get("max_degree")
    if not isinstance(degree, int) or isinstance(degree, bool) or not 0 <= degree <= MAX_FOCK_DEGREE:
        errors.append(f"max_degree 必须是 [0, {MAX_FOCK_DEGREE}] 内的整数")

    spatial = data.get("spatial", {})
    if not _is_number(spatial.get("L")) or spatial["L"] <= 0:
        errors.append("spatial.L 必须为正")
    nodes = spatial.get("nodes_per_axis", {})
    if not isinstance(nodes, dict):
        errors.append("spatial.nodes_per_axis 必须是对象")
    else:
        for key, value in nodes.items():
            if str(key) not in {"1", "2", "3"}:
                errors.append(f"spatial.nodes_per_axis 的键必须是 1/2/3: {key}")
            elif not isinstance(value, int) or value < 8 or value % 2:
                errors.append(f"spatial.nodes_per_axis.{key} 必须是不小于8的偶数")

    freq = data.get("frequency", {})
    if not _is_number(freq.get("xi_max")) or freq["xi_max"] <= 0:
        errors.append("frequency.xi_max 必须为正")
    n_xi = freq.get("n_xi")
    if not isinstance(n_xi, int) or n_xi < 3 or n_xi % 2 == 0:
        errors.append("frequency.n_xi 必须是不小于3的奇数")
    elif _is_number(freq.get("xi_max")) and _is_number(grid.get("t_max")) and isinstance(grid.get("n_points"), int) \
            and grid.get("rule") != "gauss_laguerre_mapped":
        step = freq["xi_max"] * grid["t_max"] / (grid["n_points"] - 1)
        if step > DEFAULT_FREQ_CONFIG["max_phase_step"]:
            errors.append(f"frequency.xi_max 与网格步长之积 {step:.3f} 超过 π")

    tolerances = data.get("tolerances", {})
    if not isinstance(tolerances, dict):
        errors.append("tolerances 必须是对象")
    else:
        for key, value in tolerances.items():
            if not _is_number(value) or value <= 0:
                errors.append(f"tolerances.{key} 必须是正数")

    if data.get("corpus") not in CORPUS_CHOICES:
        errors.append(f"corpus 必须是 {CORPUS_CHOICES} 之一")
    if data.get("output_dir") is not None and not isinstance(data["output_dir"], str):
        errors.append("output_dir 必须是字符串或 null")
    if not isinstance(data.get("seed"), int):
        errors.append("seed 必须是整数")

    demo = data.get("demo")
    if isinstance(demo, dict):
        times = demo.get("times", [])
        if not isinstance(times, list) or not all(_is_number(t) and t >= 0 for t in times):
            errors.append("demo.times 必须是非负数列表")
        if "decay_rate" in demo and (not _is_number(demo["decay_rate"]) or demo["decay_rate"] <= 0):
            errors.append("demo.decay_rate 必须为正")
        if "degrees" in demo and not (isinstance(demo["degrees"], list)
                                      and set(demo["degrees"]) <= {1, 2}):
            errors.append("demo.degrees 只能取 1 和 2")
    return errors


class SuiteConfig:
    """校验后的套件配置"""

    def __init__(self, data: Dict[str, Any], source: Optional[Path] = None):
        self.data = data
        self.source = source
        self.grid = data["grid"]
        self.max_degree = data["max_degree"]
        self.spatial = data["spatial"]
        self.frequency = data["frequency"]
        self.tolerances = data["tolerances"]
        self.corpus = data["corpus"]
        self.output_dir = data["output_dir"]
        self.seed = data["seed"]
        self.demo = _deep_merge(DEFAULT_DEMO_CONFIG, data.get("demo") or {})
        self.calc = data.get("calc")

    @property
    def L(self) -> float:
        return float(self.spatial["L"])

    @property
    def nodes_per_axis(self) -> Dict[int, int]:
        return {int(k): int(v) for k, v in self.spatial["nodes_per_axis"].items()}

    @property
    def config_hash(self) -> str:
        """规范化JSON的sha256"""
        canonical = json.dumps(self.data, sort_keys=True, ensure_ascii=False, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    def tolerance(self, check_name: str, tolerance_class: str) -> float:
        """按检查名、再按容差层级查找覆盖值"""
        if check_name in self.tolerances:
            return float(self.tolerances[check_name])
        if tolerance_class in self.tolerances:
            return float(self.tolerances[tolerance_class])
        return TOLERANCES[tolerance_class]

    def is_overridden(self, check_name: str, tolerance_class: str) -> bool:
        return check_name in self.tolerances or tolerance_class in self.tolerances

    def to_dict(self) -> Dict[str, Any]:
        return copy.deepcopy(self.data)


class ConfigManager:
    """配置管理器"""

    def __init__(self, config_dir: Optional[Path] = None):
        """
        初始化配置管理器

        Args:
            config_dir: 相对路径的基准目录，默认为当前文件所在目录
        """
        if config_dir is None:
            config_dir = Path(__file__).parent
        self.config_dir = Path(config_dir)
        self._cache: Dict[str, Dict] = {}

    def _resolve(self, config_name) -> Path:
        path = Path(config_name)
        if not path.is_absolute() and not path.exists():
            path = self.config_dir / path
        return path

    def load_config(self, config_name) -> Dict[str, Any]:
        """
        加载JSON配置文件

        Args:
            config_name: 文件路径（相对路径先按当前目录、再按配置目录查找）

        Returns:
            Dict: 配置字典
        """
        config_path = self._resolve(config_name)
        key = str(config_path.resolve())
        if key in self._cache:
            return copy.deepcopy(self._cache[key])

        if not config_path.is_file():
            raise ConfigurationError(f"配置文件不存在: {config_path}")
        try:
            with open(config_path, 'r', encoding='utf-8') as f:
                config = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigurationError(f"配置文件不是合法的JSON {config_path}: {e}") from e
        if not isinstance(config, dict):
            raise ConfigurationError(f"配置文件顶层必须是对象: {config_path}")
        self._cache[key] = config
        logger.info(f"加载配置成功: {config_path}")
        return copy.deepcopy(config)

    def save_config(self, path, config: Dict[str, Any]):
        """
        保存配置文件

        Args:
            path: 目标路径
            config: 配置字典
        """
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(config, f, indent=2, ensure_ascii=False, sort_keys=True)
            f.write("\n")
        logger.info(f"保存配置成功: {path}")

    def load_suite_config(self, config_name=None) -> SuiteConfig:
        """
        读取、合并默认值并校验套件配置

        Args:
            config_name: 配置文件路径；为 None 时使用全部默认值

        Returns:
            SuiteConfig: 校验后的配置
        """
        user = self.load_config(config_name) if config_name is not None else {}
        data = _deep_merge(DEFAULT_SUITE_CONFIG, user)
        errors = validate_suite_config(data)
        if errors:
            raise ConfigurationError("配置校验失败: " + "; ".join(errors))
        source = self._resolve(config_name) if config_name is not None else None
        return SuiteConfig(data, source)


def get_thread_count(default: int = 1) -> int:
    """读取 POLYCALC_THREADS（可来自 .env），必须是不小于1的整数"""
    load_dotenv()
    raw = os.environ.get(THREADS_ENV_VAR)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ConfigurationError(f"{THREADS_ENV_VAR} 必须是整数: {raw!r}")
    if value < 1:
        raise ConfigurationError(f"{THREADS_ENV_VAR} 必须不小于1: {value}")
    return value


# 全局配置管理器实例
_config_manager = None


def get_config_manager() -> ConfigManager:
    """获取全局配置管理器实例"""
    global _config_manager
    if _config_manager is None:
        _config_manager = ConfigManager()
    return _config_manager
