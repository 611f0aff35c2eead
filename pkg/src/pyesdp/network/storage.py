import json
from pathlib import Path
from typing import Any

from ..utils.exceptions import SchemaError, SchemaVersionError
from ..utils.logging import get_logger
from ..utils.schemas import (
    MEASURED_KIND,
    NETWORK_KIND,
    NETWORK_SCHEMA_VERSION,
)
from ..utils.utils import read_json, write_json
from .network import DEFAULT_REGION, Network
from .noise import MeasuredNetwork

logger = get_logger(__name__)


def network_to_dict(instance: Network | MeasuredNetwork) -> dict:
    """
    Serializable form of a network or measured network.

    Args:
        instance (Network | MeasuredNetwork): The instance to convert.

    Returns:
        dict: The JSON document described in the README.
    """
    measured = isinstance(instance, MeasuredNetwork)
    net = instance.network if measured else instance

    data = {
        "version": NETWORK_SCHEMA_VERSION,
        "kind": MEASURED_KIND if measured else NETWORK_KIND,
        "region": list(net.region),
        "radio_range": net.radio_range,
        "max_neighbors": net.max_neighbors,
        "seed": net.seed,
        "sensors": net.sensors.tolist(),
        "anchors": net.anchors.tolist(),
        "sensor_edges": [list(edge) for edge in net.sensor_edges],
        "anchor_edges": [list(edge) for edge in net.anchor_edges],
        "true_distances": {k: net.true_distances[k] for k in net.edge_keys},
    }
    if measured:
        data.update(
            {
                "noise_std": instance.noise_std,
                "noise_seed": instance.noise_seed,
                "noise_model": instance.noise_model,
                "noise_samples": {
                    k: instance.noise_samples[k] for k in net.edge_keys
                },
                "measured_distances": {
                    k: instance.measured_distances[k] for k in net.edge_keys
                },
            }
        )
    return data


def save_network(instance: Network | MeasuredNetwork, path: str | Path) -> None:
    """
    Saves a network or measured network to a JSON file.

    Floats are written at full precision, so :func:`load_network` returns
    an equal instance.

    Args:
        instance (Network | MeasuredNetwork): The instance to save.
        path (str | Path): Destination file.

    Examples:
        ```python
        save_network(generate_network(40, 5, 0.3, seed=1), 'net.json')
        ```
    """
    write_json(network_to_dict(instance), path)
    logger.success(f"Network saved to {path}")


def _field(data: dict, name: str, kind: type | tuple[type, ...]) -> Any:
    if name not in data:
        raise SchemaError(f"Missing field '{name}'.")
    value = data[name]
    # bool is an int subclass and never a valid number here
    if isinstance(value, bool) or not isinstance(value, kind):
        raise SchemaError(
            f"Field '{name}' has type {type(value).__name__}, expected {_type_names(kind)}."
        )
    return value


def _optional_field(
    data: dict, name: str, kind: type | tuple[type, ...], default: Any
) -> Any:
    return _field(data, name, kind) if name in data else default


def _type_names(kind: type | tuple[type, ...]) -> str:
    if isinstance(kind, tuple):
        return " or ".join(k.__name__ for k in kind)
    return kind.__name__


def _points(data: dict, name: str) -> list[list[float]]:
    value = _field(data, name, list)
    for index, point in enumerate(value):
        if (
            not isinstance(point, list)
            or len(point) != 2
            or not all(_is_number(v) for v in point)
        ):
            raise SchemaError(
                f"Field '{name}[{index}]' must be a pair of numbers."
            )
    return value


def _pairs(data: dict, name: str) -> list[tuple[int, int]]:
    value = _field(data, name, list)
    for index, pair in enumerate(value):
        if (
            not isinstance(pair, list)
            or len(pair) != 2
            or not all(isinstance(v, int) and not isinstance(v, bool) for v in pair)
        ):
            raise SchemaError(
                f"Field '{name}[{index}]' must be a pair of integers."
            )
    return [tuple(pair) for pair in value]


def _edge_map(data: dict, name: str) -> dict[str, float]:
    value = _field(data, name, dict)
    for key, number in value.items():
        if not _is_number(number):
            raise SchemaError(f"Field '{name}[{key}]' must be a number.")
    return value


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def network_from_dict(data: dict) -> Network | MeasuredNetwork:
    """
    Rebuild an instance from its JSON document, validating every field.

    Args:
        data (dict): The decoded document.

    Returns:
        Network | MeasuredNetwork: The instance, depending on ``kind``.

    Raises:
        SchemaError: If a field is missing or has the wrong type.
        SchemaVersionError: If ``version`` is not supported.
        NetworkValidationError: If the geometry violates an invariant.
        InvalidParameterError: If ``noise_std`` is negative.
    """
    if not isinstance(data, dict):
        raise SchemaError("A network file must hold a JSON object.")
    version = _field(data, "version", int)
    if version != NETWORK_SCHEMA_VERSION:
        raise SchemaVersionError(
            f"Unsupported network file version {version}, expected {NETWORK_SCHEMA_VERSION}."
        )
    kind = data.get("kind", NETWORK_KIND)
    if kind not in (NETWORK_KIND, MEASURED_KIND):
        raise SchemaError(
            f"Field 'kind' must be '{NETWORK_KIND}' or '{MEASURED_KIND}', got {kind!r}."
        )

    region = data.get("region", list(DEFAULT_REGION))
    if (
        not isinstance(region, list)
        or len(region) != 2
        or not all(_is_number(v) for v in region)
    ):
        raise SchemaError("Field 'region' must be a pair of numbers.")

    net = Network(
        sensors=_points(data, "sensors"),
        anchors=_points(data, "anchors"),
        radio_range=float(_field(data, "radio_range", (int, float))),
        sensor_edges=_pairs(data, "sensor_edges"),
        anchor_edges=_pairs(data, "anchor_edges"),
        true_distances=_edge_map(data, "true_distances"),
        seed=_optional_field(data, "seed", int, 0),
        region=tuple(region),
        max_neighbors=_optional_field(data, "max_neighbors", int, 5),
    )
    if kind == NETWORK_KIND:
        return net

    model = data.get("noise_model", "gaussian")
    if not isinstance(model, str):
        raise SchemaError("Field 'noise_model' must be a string.")
    return MeasuredNetwork(
        network=net,
        noise_std=_field(data, "noise_std", (int, float)),
        noise_seed=_field(data, "noise_seed", int),
        noise_samples=_edge_map(data, "noise_samples"),
        measured_distances=_edge_map(data, "measured_distances"),
        noise_model=model,
    )


def load_network(path: str | Path) -> Network | MeasuredNetwork:
    """
    Loads a network or measured network from a JSON file.

    Args:
        path (str | Path): The file written by :func:`save_network`.

    Returns:
        Network | MeasuredNetwork: The validated instance.

    Raises:
        PyEsdpFileNotFoundError: If the file does not exist.
        SchemaError: If the file is not valid JSON or a field is malformed.
        SchemaVersionError: If the file has another schema version.
        NetworkValidationError: If an invariant is violated.
        InvalidParameterError: If ``noise_std`` is negative.

    Examples:
        ```python
        mn = load_network('measured.json')
        ```
    """
    try:
        data = read_json(path)
    except json.JSONDecodeError as e:
        raise SchemaError(
            f"Cannot parse {path} at line {e.lineno}, column {e.colno}: {e.msg}"
        ) from e
    instance = network_from_dict(data)
    logger.debug(f"Loaded {type(instance).__name__} from {path}")
    return instance
