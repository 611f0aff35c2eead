import os

from dotenv import load_dotenv

from .exceptions import ConfigurationError
from .logging import get_logger

logger = get_logger(__name__)

ENV_PREFIX = "PYESDP_"

_CASTS = {
    "LOG_LEVEL": str,
    "TOLERANCE": float,
    "MAX_ITERATIONS": int,
    "WORKERS": int,
    "RUN_SLOW": str,
}


def load_env_settings(dotenv_path: str | None = None) -> dict:
    """
    Read ``PYESDP_*`` overrides from the environment and an optional ``.env``.

    Only the variables that are set are returned, keyed by their lower-case
    name without the prefix, e.g. ``{"tolerance": 1e-8, "workers": 4}``.

    Args:
        dotenv_path (str | None): Explicit ``.env`` file. Defaults to the
            ``.env`` found from the working directory upwards.

    Returns:
        dict: The typed overrides.

    Raises:
        ConfigurationError: If a variable cannot be converted to its type.

    Examples:
        ```python
        load_env_settings()
        ```
    """
    load_dotenv(dotenv_path=dotenv_path)
    overrides = {}
    for name, cast in _CASTS.items():
        raw = os.getenv(ENV_PREFIX + name)
        if raw is None or raw == "":
            continue
        try:
            overrides[name.lower()] = cast(raw)
        except ValueError as e:
            raise ConfigurationError(
                f"Environment variable {ENV_PREFIX + name}={raw!r} is not a valid {cast.__name__}."
            ) from e
    if overrides:
        logger.debug(f"Environment overrides: {overrides}")
    return overrides
