"""
工具模块
"""
from .serialization import (
    write_json, read_json, write_testfn_csv, read_testfn_csv, write_freqfn_csv,
    write_distribution, write_poly_test, write_poly_dist, write_fock_state, read_fock_state,
    write_magnitude_csv
)
from .report_generator import write_suite_report, build_summary, format_summary

__all__ = [
    'write_json', 'read_json', 'write_testfn_csv', 'read_testfn_csv', 'write_freqfn_csv',
    'write_distribution', 'write_poly_test', 'write_poly_dist', 'write_fock_state', 'read_fock_state',
    'write_magnitude_csv', 'write_suite_report', 'build_summary', 'format_summary'
]
