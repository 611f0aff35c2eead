import json
import os

from ..utils.logging import get_logger
from .config import DESK_PRESET, FULL_SCALE_PRESET, ExperimentConfig

logger = get_logger(__name__)


def _config_text(**changes) -> str:
    data = ExperimentConfig().replace(**changes).to_dict()
    if data["size_grid"] is None:
        data.pop("size_grid")
    return json.dumps(data, indent=4) + "\n"


NOISE_SWEEP = {
    "path": "sweep.json",
    "content": _config_text(**DESK_PRESET),
}


SIZE_SWEEP = {
    "path": "sweep_size.json",
    "content": _config_text(
        size_grid=(20, 40, 60),
        results_path="results_size.csv",
        summary_path="summary_size.csv",
        plot_data_path="plot_size.csv",
    ),
}


FULL_SCALE_SWEEP = {
    "path": "sweep_full.json",
    "content": _config_text(
        **FULL_SCALE_PRESET,
        workers=4,
        results_path="results_full.csv",
        summary_path="summary_full.csv",
        plot_data_path="plot_full.csv",
    ),
}


ENV = {
    "path": ".env",
    "content": """PYESDP_LOG_LEVEL=INFO
PYESDP_TOLERANCE=1e-6
PYESDP_MAX_ITERATIONS=100000
PYESDP_WORKERS=1
PYESDP_RUN_SLOW=0
""",
}


GITIGNORE = {
    "path": ".gitignore",
    "content": """**/__pycache__/**
.venv
.env
networks/
reports/
results*.csv
summary*.csv
plot*.csv
*.log
""",
}


def create_support_files(directory: str = ".") -> list[str]:
    """
    Create starter configs and environment files for running sweeps.

    Writes a desk-scale noise sweep, a size sweep, a full-scale sweep, a
    ``.env`` template and a ``.gitignore``.

    Args:
        directory (str): Target folder, created if needed.

    Returns:
        list[str]: The paths written.
    """
    files = [NOISE_SWEEP, SIZE_SWEEP, FULL_SCALE_SWEEP, ENV, GITIGNORE]

    written = []
    for file_dict in files:
        path = os.path.join(directory, file_dict["path"])
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            f.write(file_dict["content"])
        logger.success(f"Created {path}")
        written.append(path)
    return written
