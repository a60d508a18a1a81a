"""
检查基类
"""
import logging
import math
import time
from abc import ABC, abstractmethod
from typing import Dict, Optional

from config.settings import TOLERANCES

logger = logging.getLogger(__name__)


class CheckResult:
    """单项检查的结果"""

    def __init__(self, name: str, anchor: str, tolerance_class: str, tolerance: float,
                 max_error: Optional[float], status: str, message: str = "", wall_time: float = 0.0):
        self.name = name
        self.anchor = anchor
        self.tolerance_class = tolerance_class
        self.tolerance = tolerance
        self.max_error = max_error
        self.status = status
        self.message = message
        self.wall_time = wall_time

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_row(self) -> Dict:
        return {
            "name": self.name,
            "anchor": self.anchor,
            "tolerance_class": self.tolerance_class,
            "tolerance": self.tolerance,
            "max_error": self.max_error,
            "status": self.status,
            "message": self.message,
        }


class BaseCheck(ABC):
    """所有不变量检查的基类"""

    name = "base"
    anchor = ""
    tolerance_class = "stacked"
    # 不属于任何层级的专用默认容差
    default_tolerance: Optional[float] = None
    # True 表示观测值必须不小于容差（例如收敛比、区分度）
    lower_bound = False
    requires_density = False

    def __init__(self):
        self.context = None

    def initialize(self, context):
        """
        初始化检查（运行前调用一次）

        Args:
            context: SuiteContext，含配置、网格与语料
        """
        self.context = context

    @abstractmethod
    def measure(self) -> float:
        """
        计算观测量（通常是最大误差）

        Returns:
            float: 观测值
        """
        pass

    def class_default(self) -> float:
        if self.default_tolerance is not None:
            return self.default_tolerance
        return TOLERANCES[self.tolerance_class]

    def resolve_tolerance(self, config) -> float:
        if config.is_overridden(self.name, self.tolerance_class):
            return config.tolerance(self.name, self.tolerance_class)
        return self.class_default()

    def accepts(self, value: float, tolerance: float) -> bool:
        if math.isnan(value):
            return False
        return value >= tolerance if self.lower_bound else value <= tolerance

    def run(self) -> CheckResult:
        """执行检查并把异常转成失败行"""
        config = self.context.config
        tolerance = self.resolve_tolerance(config)
        if self.requires_density and self.context.corpus.atoms_only:
            return CheckResult(self.name, self.anchor, self.tolerance_class, tolerance, None,
                               "skip", "语料不含密度")
        start = time.perf_counter()
        try:
            value = float(self.measure())
            message = ""
        except Exception as e:
            logger.error(f"检查 {self.name} 出错: {e}", exc_info=True)
            value = float("nan")
            message = f"{type(e).__name__}: {e}"
        elapsed = time.perf_counter() - start

        if self.accepts(value, tolerance):
            status = "pass"
        else:
            tighter = tolerance > self.class_default() if self.lower_bound else tolerance < self.class_default()
            overridden = config.is_overridden(self.name, self.tolerance_class)
            status = "xfail" if overridden and tighter and not message else "fail"
        logger.debug(f"{self.name}: {value:.3e} / {tolerance:.1e} -> {status}")
        return CheckResult(self.name, self.anchor, self.tolerance_class, tolerance, value,
                           status, message, elapsed)
