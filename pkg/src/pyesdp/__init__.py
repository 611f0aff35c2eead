from ._version import __version__
from .analysis.duals import (
    complementarity_residuals,
    evaluate_dual_objective,
    extract_dual_blocks,
    extract_z_blocks,
)
from .analysis.metrics import (
    average_position_error,
    extract_positions,
    position_error,
)
from .analysis.rank import numerical_rank, rank_relation_report
from .analysis.report import (
    BlockData,
    LocalizationReport,
    block_perturbations,
    build_report,
    localize,
    report_to_dict,
    save_report,
)
from .analysis.sensitivity import SensitivityReport, sensitivity_check
from .analysis.trilateration import trilaterate
from .cli.config import ExperimentConfig, load_config
from .cli.summary import (
    assess_orderings,
    cmd_report,
    paired_table,
    plot_data,
    summarize,
)
from .cli.support_files import create_support_files
from .cli.sweep import cmd_sweep, run_sweep
from .formulation.builder import (
    FormulationMap,
    build_esdp,
    build_pesdp,
    build_program,
    implied_slack,
)
from .formulation.layout import ZLayout, assemble_z, true_solution_vector
from .formulation.sdpa import export_sdpa, read_sdpa, sdpa_to_program
from .network.network import (
    Network,
    anchor_edge_key,
    build_network,
    generate_network,
    network_summary,
    sensor_edge_key,
    symmetric_anchor_layout,
    validate_network,
)
from .network.noise import MeasuredNetwork, apply_noise
from .network.storage import load_network, save_network
from .solver.admm import solve
from .solver.cones import (
    ConeDims,
    in_dual_cone,
    project_cones,
    project_psd,
    smat,
    svec,
)
from .solver.program import ConicProgram
from .solver.settings import SolveResult, SolveSettings, SolveStatus
from .utils.decorators import df
from .utils.exceptions import (
    ConfigurationError,
    FormulationError,
    InvalidParameterError,
    NetworkValidationError,
    NotOptimalError,
    OptionNotAvailableError,
    PyEsdpError,
    PyEsdpFileNotFoundError,
    SchemaError,
    SchemaVersionError,
    SolverError,
)
from .utils.logging import (
    disable_logging,
    enable_debug_mode,
    get_logger,
    reset_logging,
    setup_logging,
)
from .utils.utils import read_json, write_json

__all__ = [
    "__version__",
    "BlockData",
    "ConeDims",
    "ConfigurationError",
    "ConicProgram",
    "ExperimentConfig",
    "FormulationError",
    "FormulationMap",
    "InvalidParameterError",
    "LocalizationReport",
    "MeasuredNetwork",
    "Network",
    "NetworkValidationError",
    "NotOptimalError",
    "OptionNotAvailableError",
    "PyEsdpError",
    "PyEsdpFileNotFoundError",
    "SchemaError",
    "SchemaVersionError",
    "SensitivityReport",
    "SolveResult",
    "SolveSettings",
    "SolveStatus",
    "SolverError",
    "ZLayout",
    "anchor_edge_key",
    "apply_noise",
    "assemble_z",
    "assess_orderings",
    "average_position_error",
    "block_perturbations",
    "build_esdp",
    "build_network",
    "build_pesdp",
    "build_program",
    "build_report",
    "cmd_report",
    "cmd_sweep",
    "complementarity_residuals",
    "create_support_files",
    "df",
    "disable_logging",
    "enable_debug_mode",
    "evaluate_dual_objective",
    "export_sdpa",
    "extract_dual_blocks",
    "extract_positions",
    "extract_z_blocks",
    "generate_network",
    "get_logger",
    "implied_slack",
    "in_dual_cone",
    "load_config",
    "load_network",
    "localize",
    "network_summary",
    "numerical_rank",
    "paired_table",
    "plot_data",
    "position_error",
    "project_cones",
    "project_psd",
    "rank_relation_report",
    "read_json",
    "read_sdpa",
    "report_to_dict",
    "reset_logging",
    "run_sweep",
    "save_network",
    "save_report",
    "sdpa_to_program",
    "sensitivity_check",
    "sensor_edge_key",
    "setup_logging",
    "smat",
    "solve",
    "summarize",
    "svec",
    "symmetric_anchor_layout",
    "true_solution_vector",
    "trilaterate",
    "validate_network",
    "write_json",
]
