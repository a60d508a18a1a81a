# -*- coding: utf-8 -*-
"""
套件报告生成器
report.csv、summary.json 只含确定性内容；耗时单独写入 timings.csv
"""
import logging
from collections import Counter
from pathlib import Path
from typing import Dict

import pandas as pd

from .serialization import FLOAT_FORMAT, write_json

logger = logging.getLogger(__name__)

REPORT_COLUMNS = ["name", "anchor", "tolerance_class", "tolerance", "max_error", "status", "message"]
STATUSES = ("pass", "fail", "xfail", "skip")


def report_frame(report) -> pd.DataFrame:
    """报告行 → DataFrame（固定列顺序）"""
    rows = [result.to_row() for result in report.results]
    return pd.DataFrame(rows, columns=REPORT_COLUMNS)


def build_summary(report) -> Dict:
    """
    汇总统计

    Args:
        report: SuiteReport

    Returns:
        Dict: 汇总字典
    """
    counts = Counter(result.status for result in report.results)
    return {
        "config_hash": report.config_hash,
        "config": report.config,
        "checks": len(report.results),
        "counts": {status: counts.get(status, 0) for status in STATUSES},
        "all_passed": report.all_passed,
        "failed": [r.name for r in report.results if r.status in ("fail", "xfail")],
    }


def write_suite_report(report, out_dir: Path) -> Dict[str, Path]:
    """
    写出套件报告

    Args:
        report: SuiteReport
        out_dir: 输出目录

    Returns:
        Dict[str, Path]: 生成的文件
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {
        "report": out_dir / "report.csv",
        "summary": out_dir / "summary.json",
        "timings": out_dir / "timings.csv",
    }
    report_frame(report).to_csv(paths["report"], index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    write_json(paths["summary"], build_summary(report))
    timings = pd.DataFrame([{"name": r.name, "wall_time": r.wall_time} for r in report.results])
    timings.to_csv(paths["timings"], index=False, float_format="%.6f", lineterminator="\n")
    logger.info(f"报告已保存至: {out_dir}")
    return paths


def format_summary(report) -> str:
    """控制台摘要"""
    counts = Counter(result.status for result in report.results)
    lines = ["=" * 60, "套件结果", "=" * 60]
    for result in report.results:
        if result.status == "skip":
            lines.append(f"  [skip] {result.name}: {result.message}")
        elif result.status != "pass":
            lines.append(f"  [{result.status}] {result.name}: {result.max_error:.3e} "
                         f"(容差 {result.tolerance:.1e}) {result.message}".rstrip())
    lines.append(f"通过 {counts.get('pass', 0)} / 失败 {counts.get('fail', 0)} / "
                 f"预期失败 {counts.get('xfail', 0)} / 跳过 {counts.get('skip', 0)}")
    lines.append(f"配置哈希: {report.config_hash}")
    lines.append("=" * 60)
    return "\n".join(lines)
