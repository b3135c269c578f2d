from .config import InitialDataSpec, RunConfig, TheoremOverrides, config_from_dict, load_config
from .initial_data import make_initial_data
from .io import read_series_csv, read_snapshot, write_series_csv, write_snapshot
from .runner import EXIT_CODES, RunResult, convergence_study, integrate_until_T0, run, sweep

__all__ = [
    "EXIT_CODES",
    "InitialDataSpec",
    "RunConfig",
    "RunResult",
    "TheoremOverrides",
    "config_from_dict",
    "convergence_study",
    "integrate_until_T0",
    "load_config",
    "make_initial_data",
    "read_series_csv",
    "read_snapshot",
    "run",
    "sweep",
    "write_series_csv",
    "write_snapshot",
]
