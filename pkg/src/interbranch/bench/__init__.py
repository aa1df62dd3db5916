from .config import BACKEND_MODELS, BackendModel, CouplingSpec, ExperimentConfig, NoiseSpec, load_config
from .report import FIGURES, frontier_table, report, write_table
from .rows import COLUMNS, ResultRow, emit_csv, parse_csv, read_rows
from .runner import derive_seed, grid_points, rerun_row, run_and_write, run_experiment, run_point

__all__ = [
    "BACKEND_MODELS", "BackendModel", "COLUMNS", "CouplingSpec", "ExperimentConfig", "FIGURES", "NoiseSpec",
    "ResultRow", "derive_seed", "emit_csv", "frontier_table", "grid_points", "load_config", "parse_csv",
    "read_rows", "report", "rerun_row", "run_and_write", "run_experiment", "run_point", "write_table",
]
