"""
系统配置文件
"""
from pathlib import Path

# 项目根目录
PROJECT_ROOT = Path(__file__).parent.parent

# 输出目录
RESULTS_DIR = PROJECT_ROOT / "results"
LOGS_DIR = PROJECT_ROOT / "logs"


def ensure_dirs():
    """创建必要的目录"""
    for dir_path in [RESULTS_DIR, LOGS_DIR]:
        dir_path.mkdir(exist_ok=True)


# 半直线网格默认参数
DEFAULT_GRID_CONFIG = {
    "n_points": 1024,   # 节点数
    "t_max": 40.0,      # 截断点
    "rule": "gregory",  # 求积规则
}

# 半直线网格参数范围
GRID_LIMITS = {
    "n_points": (8, 1 << 16),
    "t_max": (1e-6, 1e4),
    "rules": ("trapezoid", "gregory", "gauss_laguerre_mapped"),
    "laguerre_max_points": 128,  # Laguerre权重超过此规模会溢出
}

# 测试函数尾部衰减容差
DECAY_TOL = 1e-8

# 分布原子允许的最高导数阶数
MAX_ATOM_ORDER = 3

# 频域网格默认参数
DEFAULT_FREQ_CONFIG = {
    "xi_max": 16.0,
    "n_xi": 257,
    "warn_phase_step": 1.0,       # ξ_max·h 超过此值给出警告
    "max_phase_step": 3.141592653589793,  # 超过此值直接报错
    "reference_order": 6,         # 反变换时扣除的边界展开阶数
}

# Fock空间空间网格默认参数
DEFAULT_SPATIAL_CONFIG = {
    "L": 12.0,
    "nodes_per_axis": {1: 512, 2: 64, 3: 32},
}

# Fock次数上限
DEFAULT_MAX_DEGREE = 3

# 容差层级
TOLERANCES = {
    "machine": 1e-12,   # 精确的代数重排
    "single": 1e-8,     # 单次求积结果
    "stacked": 1e-6,    # 多级管线结果
    "stencil": 1e-4,    # 受差分模板限制的结果
}

# Laplace探针: {0.5, 1, 2} × {1±i}
LAPLACE_PROBES = [s * complex(1.0, sign) for s in (0.5, 1.0, 2.0) for sign in (1.0, -1.0)]

# 套件默认配置
DEFAULT_SUITE_CONFIG = {
    "grid": dict(DEFAULT_GRID_CONFIG),
    "max_degree": DEFAULT_MAX_DEGREE,
    "spatial": {"L": DEFAULT_SPATIAL_CONFIG["L"],
                "nodes_per_axis": {str(k): v for k, v in DEFAULT_SPATIAL_CONFIG["nodes_per_axis"].items()}},
    "frequency": {"xi_max": DEFAULT_FREQ_CONFIG["xi_max"], "n_xi": DEFAULT_FREQ_CONFIG["n_xi"]},
    "tolerances": {},
    "corpus": "full",
    "output_dir": None,
    "seed": 20150421,
}

# 并发线程数的环境变量
THREADS_ENV_VAR = "POLYCALC_THREADS"

# 日志配置
LOG_CONFIG = {
    "level": "INFO",
    "format": "%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    "file": LOGS_DIR / "polycalc.log"
}
