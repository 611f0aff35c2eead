import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

from ..solver.settings import SolveSettings
from ..utils.exceptions import ConfigurationError, InvalidParameterError
from ..utils.logging import get_logger
from ..utils.schemas import METHODS
from ..utils.utils import config_hash, load_and_sanitize

logger = get_logger(__name__)

# Solver fields a sweep config may set
SOLVER_FIELDS = (
    "tolerance",
    "max_iterations",
    "rho",
    "over_relaxation",
    "equilibrate",
    "time_limit",
)

# Fields that do not change the rows of a sweep
_UNHASHED_FIELDS = ("workers", "results_path", "summary_path", "plot_data_path")
_KEY_ALIASES = {"L": "repetitions"}

DESK_PRESET = {
    "n": 40,
    "m": 5,
    "r": 0.3,
    "max_neighbors": 5,
    "repetitions": 10,
    "sigma_grid": [0.0, 0.05, 0.1, 0.2],
    "p": 0.1,
}

FULL_SCALE_PRESET = {
    "n": 300,
    "m": 5,
    "r": 0.2,
    "max_neighbors": 5,
    "repetitions": 50,
    "p": 0.1,
}


@dataclass(frozen=True)
class ExperimentConfig:
    """
    Grid of solves run by a sweep.

    A noise sweep runs one cell per entry of ``sigma_grid`` at ``n``
    sensors. Setting ``size_grid`` turns it into a size sweep: one cell per
    sensor count, all at noise ``size_sigma``. Every cell runs
    ``repetitions`` seeded instances for every method.

    Attributes:
        methods (tuple[str, ...]): Subset of ``("esdp", "pesdp")``.
        n (int): Sensors per network in a noise sweep.
        m (int): Anchors per network.
        r (float): Radio range.
        max_neighbors (int): Cap on sensor edges per sensor.
        sigma_grid (tuple[float, ...]): Noise levels of a noise sweep.
        size_grid (tuple[int, ...] | None): Sensor counts of a size sweep.
        size_sigma (float): Noise level of a size sweep.
        repetitions (int): Seeds per cell.
        p (float): Perturbation used by ``pesdp``.
        base_seed (int): Root of every derived seed.
        anchor_layout (str): ``"random"`` or ``"symmetric"``.
        solver (dict): Overrides of :class:`SolveSettings`.
        workers (int): Worker processes, 1 runs inline.
        results_path (str): Default results CSV.
        summary_path (str): Default summary CSV.
        plot_data_path (str): Default plot-data CSV.
    """

    methods: tuple[str, ...] = METHODS
    n: int = DESK_PRESET["n"]
    m: int = DESK_PRESET["m"]
    r: float = DESK_PRESET["r"]
    max_neighbors: int = DESK_PRESET["max_neighbors"]
    sigma_grid: tuple[float, ...] = tuple(DESK_PRESET["sigma_grid"])
    size_grid: tuple[int, ...] | None = None
    size_sigma: float = 0.1
    repetitions: int = DESK_PRESET["repetitions"]
    p: float = DESK_PRESET["p"]
    base_seed: int = 0
    anchor_layout: str = "random"
    solver: dict = field(default_factory=dict)
    workers: int = 1
    results_path: str = "results.csv"
    summary_path: str = "summary.csv"
    plot_data_path: str = "plot.csv"

    def __post_init__(self):
        object.__setattr__(self, "methods", tuple(self.methods))
        object.__setattr__(
            self, "sigma_grid", tuple(float(s) for s in self.sigma_grid)
        )
        if self.size_grid is not None:
            object.__setattr__(
                self, "size_grid", tuple(int(n) for n in self.size_grid)
            )
        object.__setattr__(self, "solver", dict(self.solver))

        if not self.methods:
            raise InvalidParameterError("methods must not be empty.")
        unknown = [m for m in self.methods if m not in METHODS]
        if unknown:
            raise InvalidParameterError(
                f"Unknown methods {unknown}. Available: {', '.join(METHODS)}."
            )
        if len(set(self.methods)) != len(self.methods):
            raise InvalidParameterError(
                f"methods must not repeat, got {list(self.methods)}."
            )
        if self.n < 1 or self.m < 1:
            raise InvalidParameterError(
                f"n and m must be positive, got n={self.n}, m={self.m}."
            )
        if not self.r > 0:
            raise InvalidParameterError(f"r must be positive, got {self.r}.")
        if self.max_neighbors < 1:
            raise InvalidParameterError(
                f"max_neighbors must be positive, got {self.max_neighbors}."
            )
        if self.repetitions < 1:
            raise InvalidParameterError(
                f"repetitions must be positive, got {self.repetitions}."
            )
        if not self.sigma_grid:
            raise InvalidParameterError("sigma_grid must not be empty.")
        if any(s < 0 for s in self.sigma_grid) or self.size_sigma < 0:
            raise InvalidParameterError("Noise levels must be nonnegative.")
        if self.size_grid is not None and (
            not self.size_grid or min(self.size_grid) < 1
        ):
            raise InvalidParameterError(
                f"size_grid must hold positive sensor counts, got {list(self.size_grid)}."
            )
        if not self.p >= 0:
            raise InvalidParameterError(f"p must be nonnegative, got {self.p}.")
        if self.workers < 1:
            raise InvalidParameterError(
                f"workers must be positive, got {self.workers}."
            )
        unknown_solver = sorted(set(self.solver) - set(SOLVER_FIELDS))
        if unknown_solver:
            raise ConfigurationError(
                f"Unknown solver options {unknown_solver}. "
                f"Available: {', '.join(SOLVER_FIELDS)}."
            )
        # Fail early on bad solver values
        self.solve_settings()

    @property
    def is_size_sweep(self) -> bool:
        return self.size_grid is not None

    def cells(self) -> list[tuple[int, float]]:
        """``(n, sigma)`` of every cell, in grid order."""
        if self.is_size_sweep:
            return [(n, self.size_sigma) for n in self.size_grid]
        return [(self.n, sigma) for sigma in self.sigma_grid]

    def solve_settings(self) -> SolveSettings:
        return SolveSettings(**self.solver)

    def perturbation(self, method: str) -> float:
        return self.p if method == "pesdp" else 0.0

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)

    def full_scale(self) -> "ExperimentConfig":
        """The same grids with the full-scale network and repetition count."""
        return self.replace(**FULL_SCALE_PRESET)

    def to_dict(self) -> dict:
        data = dataclasses.asdict(self)
        data["methods"] = list(self.methods)
        data["sigma_grid"] = list(self.sigma_grid)
        if self.size_grid is not None:
            data["size_grid"] = list(self.size_grid)
        return data

    def hash(self) -> str:
        """sha256 of the canonical JSON of every field that shapes the rows."""
        data = self.to_dict()
        for name in _UNHASHED_FIELDS:
            data.pop(name)
        return config_hash(data)


def config_from_dict(data: dict) -> ExperimentConfig:
    """
    Builds a config from its JSON form.

    ``L`` is accepted as another name for ``repetitions``.

    Raises:
        ConfigurationError: For a non-object document or unknown keys.
        InvalidParameterError: For invalid values.
    """
    if not isinstance(data, dict):
        raise ConfigurationError(
            f"A sweep config must be a JSON object, got {type(data).__name__}."
        )
    data = dict(data)
    for alias, name in _KEY_ALIASES.items():
        if alias in data:
            if name in data:
                raise ConfigurationError(
                    f"Config keys '{alias}' and '{name}' name the same field; give one."
                )
            data[name] = data.pop(alias)
    names = {f.name for f in dataclasses.fields(ExperimentConfig)}
    unknown = sorted(set(data) - names)
    if unknown:
        raise ConfigurationError(
            f"Unknown config keys {unknown}. Available: {', '.join(sorted(names))}."
        )
    try:
        return ExperimentConfig(**data)
    except TypeError as e:
        raise ConfigurationError(f"Invalid config value: {e}") from e


def load_config(path: str | Path) -> ExperimentConfig:
    """
    Reads a sweep config; comments and trailing commas are accepted when
    ``json5`` is installed.

    Args:
        path (str | Path): The config file.

    Returns:
        ExperimentConfig: The validated config.

    Raises:
        PyEsdpFileNotFoundError: If the file does not exist.
        ConfigurationError: If it cannot be parsed (with line and column)
            or holds unknown keys.

    Examples:
        ```python
        config = load_config('sweep.json')
        config.cells()
        ```
    """
    config = config_from_dict(load_and_sanitize(path))
    logger.info(
        f"Loaded sweep config {path} ({len(config.cells())} cells x "
        f"{config.repetitions} seeds x {len(config.methods)} methods)"
    )
    return config
