import hashlib
import json
import os
from pathlib import Path
from typing import Any

try:
    import json5
except ImportError:
    json5 = None

from .exceptions import ConfigurationError, PyEsdpFileNotFoundError
from .logging import get_logger

logger = get_logger(__name__)


def read_json(path: str | Path) -> Any:
    """
    Reads a JSON file and returns its contents.

    Args:
        path (str | Path): The file path to the JSON file.

    Returns:
        Any: The decoded document.

    Raises:
        PyEsdpFileNotFoundError: If the file does not exist.
        json.JSONDecodeError: If the file is not valid JSON (carries line and column).

    Examples:
        ```python
        read_json('networks/net-0.json')
        ```
    """
    if not os.path.exists(path):
        raise PyEsdpFileNotFoundError(f"File not found: {path}")
    with open(path, encoding="utf-8") as file:
        return json.load(file)


def write_json(data: Any, path: str | Path, indent: int | None = 2) -> None:
    """
    Writes data to a JSON file, creating parent folders as needed.

    Floats are written with ``repr`` precision, so reading the file back
    gives bit-identical values.

    Args:
        data (Any): The JSON-serializable data.
        path (str | Path): The file path where the JSON should be saved.
        indent (int | None): Indentation, ``None`` for a single line.

    Examples:
        ```python
        write_json({'version': 1}, 'out/network.json')
        ```
    """
    parent = os.path.dirname(os.fspath(path))
    if parent and not os.path.exists(parent):
        os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8") as file:
        json.dump(data, file, ensure_ascii=False, indent=indent)
        file.write("\n")


def load_and_sanitize(path: str | Path) -> dict:
    """
    Loads a configuration file, accepting comments and trailing commas.

    Tries json5 first (optional extra ``pyesdp[json5]``), then falls back to
    standard json.

    Args:
        path (str | Path): The file path to the configuration file.

    Returns:
        dict: The decoded configuration.

    Raises:
        PyEsdpFileNotFoundError: If the file does not exist.
        ConfigurationError: If the file cannot be parsed. The message names
            the line and column of the error.

    Examples:
        ```python
        load_and_sanitize('sweep.json')
        ```
    """
    if not os.path.exists(path):
        raise PyEsdpFileNotFoundError(f"Config file not found: {path}")

    with open(path, encoding="utf-8-sig") as f:
        text = f.read()

    if json5 is not None:
        try:
            data = json5.loads(text)
            logger.debug(f"Loaded config with json5: {path}")
            return data
        except ValueError as e:
            raise ConfigurationError(
                f"Cannot parse config {path}: {e}"
            ) from e

    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigurationError(
            f"Cannot parse config {path} at line {e.lineno}, "
            f"column {e.colno}: {e.msg}"
        ) from e
    logger.debug(f"Loaded config with standard json: {path}")
    return data


def canonical_json(data: Any) -> str:
    """Single-line JSON with sorted keys, used for hashing."""
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


def config_hash(data: Any) -> str:
    """
    Returns the sha256 hex digest of the canonical JSON of ``data``.

    Examples:
        ```python
        config_hash({'n': 40, 'm': 5})[:8]
        ```
    """
    return hashlib.sha256(canonical_json(data).encode("utf-8")).hexdigest()
