"""Operator files, random operator families, verification suites and grid dumps."""
from .generators import (
    FAMILIES,
    Family,
    cross_operator,
    gen_linear_monotone,
    gen_maximal_1d,
    gen_point_cloud_monotone,
    gen_polygonal_monotone,
    gen_random_polygonal,
    gen_singleton,
    identity_line,
    validate,
)
from .grid import GRID_HEADER, grid_dump, grid_rows
from .io import (
    OperatorFileError,
    dump_operator,
    load_hull,
    load_operator,
    operator_to_json,
    parse_operator,
    read_grid_csv,
    write_grid_csv,
)
from .suites import DEFAULT_COUNTS, SUITE_NAMES, SuiteReport, UnknownSuiteError, run_all, run_suite
