# -*- coding: utf-8 -*-
"""
polycalc 主入口文件
"""
import argparse
import io
import logging
import sys
from pathlib import Path
from typing import List, Optional

# 设置标准输出为UTF-8编码（Windows）
if sys.platform == 'win32':
    sys.stdout = io.TextIOWrapper(sys.stdout.buffer, encoding='utf-8', errors='replace')
    sys.stderr = io.TextIOWrapper(sys.stderr.buffer, encoding='utf-8', errors='replace')

# 添加项目根目录到路径
sys.path.insert(0, str(Path(__file__).parent))

from config.config_manager import SuiteConfig, get_config_manager
from config.settings import LOG_CONFIG, RESULTS_DIR, ensure_dirs
from core.exceptions import ConfigurationError, PolycalcError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG_ERROR = 2
EXIT_OUTPUT_EXISTS = 3


def setup_logging():
    """文件 + 控制台日志"""
    ensure_dirs()
    logging.basicConfig(
        level=getattr(logging, LOG_CONFIG['level']),
        format=LOG_CONFIG['format'],
        handlers=[
            logging.FileHandler(LOG_CONFIG['file'], encoding='utf-8'),
            logging.StreamHandler()
        ]
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='polycalc', description='多项式分布与算子演算的数值验证工具')
    sub = parser.add_subparsers(dest='command', required=True)

    def common(p: argparse.ArgumentParser):
        p.add_argument('--config', '-c', type=str, default=None, help='JSON配置文件（缺省使用默认配置）')
        p.add_argument('--out', '-o', type=str, default=None, help='输出目录')
        p.add_argument('--force', action='store_true', help='允许写入已存在的非空输出目录')

    suite = sub.add_parser('suite', help='运行全部不变量检查')
    common(suite)
    suite.add_argument('--no-progress', action='store_true', help='不显示进度条')

    demo = sub.add_parser('demo', help='运行演示')
    demo.add_argument('name', choices=['gaussian'], help='演示名称')
    common(demo)

    calc = sub.add_parser('calc', help='对配置中的 (F, p, 𝐀, y) 求值')
    common(calc)
    return parser


def resolve_out_dir(args, config: SuiteConfig) -> Path:
    if args.out:
        return Path(args.out)
    if config.output_dir:
        return Path(config.output_dir)
    name = args.command if args.command != 'demo' else f"demo_{args.name}"
    return RESULTS_DIR / name


def check_out_dir(out_dir: Path, force: bool) -> bool:
    """输出目录已存在且非空时，只有 --force 才允许继续"""
    if out_dir.exists() and any(out_dir.iterdir()) and not force:
        print(f"输出目录已存在且非空: {out_dir}（使用 --force 覆盖）", file=sys.stderr)
        return False
    return True


def run_suite_command(args, config: SuiteConfig, out_dir: Path) -> int:
    from harness.suite_engine import SuiteEngine
    from utils.report_generator import format_summary, write_suite_report

    engine = SuiteEngine(config)
    if not check_out_dir(out_dir, args.force):
        return EXIT_OUTPUT_EXISTS
    report = engine.run(progress=not args.no_progress)
    write_suite_report(report, out_dir)
    print(format_summary(report))
    return report.exit_code


def run_demo_command(args, config: SuiteConfig, out_dir: Path) -> int:
    from harness.gaussian_demo import run_gaussian_demo

    if not check_out_dir(out_dir, args.force):
        return EXIT_OUTPUT_EXISTS
    summary = run_gaussian_demo(config, out_dir)
    print(f"演示完成: 轨道求和偏差 {summary['orbit_sum_deviation']:.3e}, "
          f"范数漂移 {summary['max_norm_drift']:.3e}, 输出 {out_dir}")
    return EXIT_OK


def run_calc_command(args, config: SuiteConfig, out_dir: Path) -> int:
    from harness.calc import CalcJob, run_calc

    # 在创建输出目录前校验 calc 段
    job = CalcJob(config)
    if not check_out_dir(out_dir, args.force):
        return EXIT_OUTPUT_EXISTS
    summary = run_calc(config, out_dir, job)
    print(f"结果范数 {summary['output_norm']:.6g}，已写入 {out_dir}")
    return EXIT_OK


COMMANDS = {
    'suite': run_suite_command,
    'demo': run_demo_command,
    'calc': run_calc_command,
}


def main(argv: Optional[List[str]] = None) -> int:
    """主函数"""
    args = build_parser().parse_args(argv)
    setup_logging()

    try:
        config = get_config_manager().load_suite_config(args.config)
        out_dir = resolve_out_dir(args, config)
        return COMMANDS[args.command](args, config, out_dir)
    except ConfigurationError as e:
        print(f"配置错误: {e}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except PolycalcError as e:
        logger.error(f"运行失败: {e}", exc_info=True)
        print(f"运行失败: {e}", file=sys.stderr)
        return EXIT_CHECK_FAILED


if __name__ == '__main__':
    sys.exit(main())
