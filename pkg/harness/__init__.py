"""
验证套件模块
"""
from .base_check import BaseCheck, CheckResult
from .corpus import Corpus
from .checks import ALL_CHECKS, CHECK_NAMES
from .suite_engine import SuiteContext, SuiteEngine, SuiteReport, run_suite
from .gaussian_demo import orbit_sum_apply, run_gaussian_demo
from .calc import CalcJob, run_calc

__all__ = [
    'BaseCheck', 'CheckResult', 'Corpus', 'ALL_CHECKS', 'CHECK_NAMES',
    'SuiteContext', 'SuiteEngine', 'SuiteReport', 'run_suite',
    'orbit_sum_apply', 'run_gaussian_demo', 'CalcJob', 'run_calc'
]
