"""
套件引擎 - 按固定顺序执行全部检查并汇总报告
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Sequence, Type

from tqdm import tqdm

from config.config_manager import SuiteConfig, get_thread_count
from config.settings import TOLERANCES
from core.exceptions import ConfigurationError
from core.halfline import Grid, build_grid
from core.transforms import xi_grid
from .base_check import BaseCheck, CheckResult
from .checks import ALL_CHECKS, CHECK_NAMES
from .corpus import Corpus

logger = logging.getLogger(__name__)


class SuiteContext:
    """检查共享的只读上下文"""

    def __init__(self, config: SuiteConfig):
        self.config = config
        grid_cfg = config.grid
        self.grid: Grid = build_grid(grid_cfg["n_points"], grid_cfg["t_max"], grid_cfg["rule"])
        self.corpus = Corpus(self.grid, atoms_only=config.corpus == "atoms-only")
        self.xis = xi_grid(config.frequency["xi_max"], config.frequency["n_xi"])


class SuiteReport:
    """一次套件运行的结果"""

    def __init__(self, results: List[CheckResult], config: SuiteConfig):
        self.results = results
        self.config_hash = config.config_hash
        self.config = config.to_dict()

    @property
    def all_passed(self) -> bool:
        return all(r.status in ("pass", "skip") for r in self.results)

    @property
    def exit_code(self) -> int:
        return 0 if self.all_passed else 1

    def by_name(self) -> Dict[str, CheckResult]:
        return {r.name: r for r in self.results}

    def __repr__(self) -> str:
        return f"SuiteReport(checks={len(self.results)}, all_passed={self.all_passed})"


def validate_tolerance_keys(config: SuiteConfig, check_names: Sequence[str] = CHECK_NAMES):
    """容差覆盖的键只能是检查名或容差层级"""
    unknown = sorted(set(config.tolerances) - set(check_names) - set(TOLERANCES))
    if unknown:
        raise ConfigurationError(f"未知的容差覆盖项: {unknown}")


class SuiteEngine:
    """套件引擎"""

    def __init__(self, config: SuiteConfig, checks: Optional[Sequence[Type[BaseCheck]]] = None,
                 threads: Optional[int] = None):
        """
        初始化套件引擎

        Args:
            config: 校验后的配置
            checks: 检查类列表（默认全部）
            threads: 线程数（默认读取 POLYCALC_THREADS）
        """
        self.check_classes = list(checks) if checks is not None else list(ALL_CHECKS)
        validate_tolerance_keys(config, [cls.name for cls in self.check_classes] + list(CHECK_NAMES))
        self.config = config
        self.threads = threads if threads is not None else get_thread_count()
        self.context: Optional[SuiteContext] = None

    def run(self, progress: bool = True) -> SuiteReport:
        """
        运行套件

        结果顺序与检查注册顺序一致，与线程数无关。

        Args:
            progress: 是否显示进度条

        Returns:
            SuiteReport: 套件报告
        """
        logger.info(f"开始运行套件: {len(self.check_classes)} 项检查, {self.threads} 个线程")
        self.context = SuiteContext(self.config)
        checks = []
        for cls in self.check_classes:
            check = cls()
            check.initialize(self.context)
            checks.append(check)

        bar = tqdm(total=len(checks), desc="检查", disable=not progress)
        if self.threads == 1:
            results = []
            for check in checks:
                results.append(check.run())
                bar.update(1)
        else:
            with ThreadPoolExecutor(max_workers=self.threads) as pool:
                futures = [pool.submit(check.run) for check in checks]
                results = []
                for future in futures:
                    results.append(future.result())
                    bar.update(1)
        bar.close()

        report = SuiteReport(results, self.config)
        failed = [r.name for r in results if r.status in ("fail", "xfail")]
        if failed:
            logger.warning(f"未通过的检查: {failed}")
        logger.info(f"套件完成: {len(results)} 项, 全部通过={report.all_passed}")
        return report


def run_suite(config: SuiteConfig, progress: bool = True) -> SuiteReport:
    """按配置运行完整套件"""
    return SuiteEngine(config).run(progress=progress)
