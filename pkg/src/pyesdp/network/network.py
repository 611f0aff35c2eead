from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from typing import Literal

import numpy as np

from ..utils.exceptions import InvalidParameterError, NetworkValidationError
from ..utils.logging import get_logger
from ..utils.schemas import ANCHOR_EDGE_PREFIX, SENSOR_EDGE_PREFIX

logger = get_logger(__name__)

DEFAULT_REGION = (-0.5, 0.5)
DISTANCE_TOLERANCE = 1e-12


def sensor_edge_key(i: int, j: int) -> str:
    """Canonical key ``"s:i-j"`` of a sensor edge, with i < j."""
    if i > j:
        i, j = j, i
    return f"{SENSOR_EDGE_PREFIX}:{i}-{j}"


def anchor_edge_key(j: int, k: int) -> str:
    """Canonical key ``"a:j-k"`` of the edge between sensor j and anchor k."""
    return f"{ANCHOR_EDGE_PREFIX}:{j}-{k}"


def parse_edge_key(key: str) -> tuple[str, int, int]:
    """
    Split a canonical edge key into its kind and endpoints.

    Args:
        key (str): ``"s:i-j"`` or ``"a:j-k"``.

    Returns:
        tuple[str, int, int]: ``(kind, first, second)``.

    Raises:
        InvalidParameterError: If the key is not canonical.

    Examples:
        ```python
        parse_edge_key('s:0-3')   # ('s', 0, 3)
        ```
    """
    try:
        kind, pair = key.split(":")
        first, second = (int(v) for v in pair.split("-"))
    except (AttributeError, ValueError) as e:
        raise InvalidParameterError(f"Malformed edge key: {key!r}") from e
    if kind not in (SENSOR_EDGE_PREFIX, ANCHOR_EDGE_PREFIX):
        raise InvalidParameterError(f"Unknown edge kind in key: {key!r}")
    if first < 0 or second < 0:
        raise InvalidParameterError(f"Negative index in edge key: {key!r}")
    return kind, first, second


@dataclass(frozen=True, eq=False)
class Network:
    """
    Sensor and anchor geometry with the measured edge sets.

    Sensors are indexed ``0..n-1`` and anchors ``0..m-1``. ``sensor_edges``
    holds pairs ``(i, j)`` with ``i < j`` and ``anchor_edges`` holds pairs
    ``(j, k)`` linking sensor ``j`` to anchor ``k``; both are sorted.
    ``true_distances`` is keyed by canonical edge strings.
    """

    sensors: np.ndarray
    anchors: np.ndarray
    radio_range: float
    sensor_edges: tuple[tuple[int, int], ...]
    anchor_edges: tuple[tuple[int, int], ...]
    true_distances: Mapping[str, float]
    seed: int = 0
    region: tuple[float, float] = DEFAULT_REGION
    max_neighbors: int = 5

    def __post_init__(self):
        sensors = np.array(self.sensors, dtype=float).reshape(-1, 2)
        anchors = np.array(self.anchors, dtype=float).reshape(-1, 2)
        sensors.setflags(write=False)
        anchors.setflags(write=False)
        object.__setattr__(self, "sensors", sensors)
        object.__setattr__(self, "anchors", anchors)
        object.__setattr__(
            self,
            "sensor_edges",
            tuple((int(i), int(j)) for i, j in self.sensor_edges),
        )
        object.__setattr__(
            self,
            "anchor_edges",
            tuple((int(j), int(k)) for j, k in self.anchor_edges),
        )
        object.__setattr__(
            self,
            "true_distances",
            {k: float(v) for k, v in self.true_distances.items()},
        )
        object.__setattr__(
            self, "region", (float(self.region[0]), float(self.region[1]))
        )
        validate_network(self)

    @property
    def n(self) -> int:
        return self.sensors.shape[0]

    @property
    def m(self) -> int:
        return self.anchors.shape[0]

    @property
    def sensor_edge_keys(self) -> list[str]:
        return [sensor_edge_key(i, j) for i, j in self.sensor_edges]

    @property
    def anchor_edge_keys(self) -> list[str]:
        return [anchor_edge_key(j, k) for j, k in self.anchor_edges]

    @property
    def edge_keys(self) -> list[str]:
        """All edges, sensor edges first, in enumeration order."""
        return self.sensor_edge_keys + self.anchor_edge_keys

    def __eq__(self, other) -> bool:
        if not isinstance(other, Network):
            return NotImplemented
        return (
            np.array_equal(self.sensors, other.sensors)
            and np.array_equal(self.anchors, other.anchors)
            and self.radio_range == other.radio_range
            and self.sensor_edges == other.sensor_edges
            and self.anchor_edges == other.anchor_edges
            and dict(self.true_distances) == dict(other.true_distances)
            and self.seed == other.seed
            and self.region == other.region
            and self.max_neighbors == other.max_neighbors
        )

    __hash__ = None


def validate_network(net: Network) -> None:
    """
    Check every invariant of a network.

    Args:
        net (Network): The network to check.

    Raises:
        NetworkValidationError: Naming the first offending edge or field.
    """
    if net.radio_range <= 0:
        raise NetworkValidationError(
            f"radio_range must be positive, got {net.radio_range}."
        )
    if net.max_neighbors < 1:
        raise NetworkValidationError(
            f"max_neighbors must be at least 1, got {net.max_neighbors}."
        )
    if not net.region[1] > net.region[0]:
        raise NetworkValidationError(f"Degenerate region {net.region}.")
    if not (np.all(np.isfinite(net.sensors)) and np.all(np.isfinite(net.anchors))):
        raise NetworkValidationError("Node coordinates must be finite.")

    n, m = net.n, net.m
    expected_keys = set()
    degree = np.zeros(n, dtype=int)

    if list(net.sensor_edges) != sorted(set(net.sensor_edges)):
        raise NetworkValidationError(
            "sensor_edges must be sorted and free of duplicates."
        )
    for i, j in net.sensor_edges:
        key = sensor_edge_key(i, j)
        if not (0 <= i < j < n):
            raise NetworkValidationError(
                f"Sensor edge {key} needs 0 <= i < j < {n}."
            )
        _check_distance(
            net, key, _distance(net.sensors[i], net.sensors[j])
        )
        degree[i] += 1
        degree[j] += 1
        expected_keys.add(key)

    if list(net.anchor_edges) != sorted(set(net.anchor_edges)):
        raise NetworkValidationError(
            "anchor_edges must be sorted and free of duplicates."
        )
    for j, k in net.anchor_edges:
        key = anchor_edge_key(j, k)
        if not (0 <= j < n and 0 <= k < m):
            raise NetworkValidationError(
                f"Anchor edge {key} references a missing node."
            )
        _check_distance(
            net, key, _distance(net.sensors[j], net.anchors[k])
        )
        expected_keys.add(key)

    if set(net.true_distances) != expected_keys:
        extra = sorted(set(net.true_distances) - expected_keys)
        missing = sorted(expected_keys - set(net.true_distances))
        raise NetworkValidationError(
            f"true_distances keys do not match the edges (extra={extra[:3]}, missing={missing[:3]})."
        )

    if n and degree.max() > net.max_neighbors:
        worst = int(degree.argmax())
        raise NetworkValidationError(
            f"Sensor {worst} has {degree[worst]} sensor edges, more than max_neighbors={net.max_neighbors}."
        )


def _check_distance(net: Network, key: str, distance: float) -> None:
    if not distance < net.radio_range:
        raise NetworkValidationError(
            f"Edge {key} has length {distance!r}, not below radio range {net.radio_range}."
        )
    stored = net.true_distances.get(key)
    if stored is None:
        raise NetworkValidationError(f"Edge {key} has no true distance.")
    if abs(stored - distance) > DISTANCE_TOLERANCE:
        raise NetworkValidationError(
            f"Edge {key} stores distance {stored!r} but the geometry gives {distance!r}."
        )


def _distance(p: np.ndarray, q: np.ndarray) -> float:
    return float(np.hypot(p[0] - q[0], p[1] - q[1]))


def _pairwise_distances(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    diff = a[:, None, :] - b[None, :, :]
    return np.hypot(diff[..., 0], diff[..., 1])


def _capped_sensor_edges(
    distances: np.ndarray, radio_range: float, max_neighbors: int
) -> list[tuple[int, int]]:
    """
    Apply the neighbor cap to the in-range sensor pairs.

    Each sensor prefers its ``max_neighbors`` nearest in-range sensors
    (ties broken by the lower partner index). An edge survives only when
    both endpoints prefer each other.
    """
    n = distances.shape[0]
    preferred = []
    for i in range(n):
        in_range = distances[i] < radio_range
        in_range[i] = False
        partners = np.flatnonzero(in_range)
        # lexsort sorts by the last key first: distance, then index
        order = np.lexsort((partners, distances[i, partners]))
        preferred.append({int(j) for j in partners[order][:max_neighbors]})

    edges = []
    for i in range(n):
        for j in sorted(preferred[i]):
            if j > i and i in preferred[j]:
                edges.append((i, j))
    return edges


def build_network(
    sensors: Sequence | np.ndarray,
    anchors: Sequence | np.ndarray,
    radio_range: float,
    max_neighbors: int = 5,
    seed: int = 0,
    region: tuple[float, float] = DEFAULT_REGION,
) -> Network:
    """
    Builds a network from given sensor and anchor positions.

    All pairs strictly closer than ``radio_range`` become candidate edges;
    the sensor-sensor edges are then pruned by the neighbor cap. Anchor
    edges are never pruned.

    Args:
        sensors (array-like): Sensor coordinates, shape (n, 2).
        anchors (array-like): Anchor coordinates, shape (m, 2).
        radio_range (float): Radio range r > 0.
        max_neighbors (int): Maximum number of sensor edges per sensor.
        seed (int): Seed recorded with the instance.
        region (tuple[float, float]): Square bounds (low, high) of the region.

    Returns:
        Network: The validated network.

    Raises:
        InvalidParameterError: If the inputs are malformed.

    Examples:
        ```python
        build_network([[0.1, 0.0]], [[0.3, 0.0], [0.0, 0.3], [-0.3, 0.0]], 1.0)
        ```
    """
    sensors = np.asarray(sensors, dtype=float).reshape(-1, 2)
    anchors = np.asarray(anchors, dtype=float).reshape(-1, 2)
    if sensors.shape[0] < 1 or anchors.shape[0] < 1:
        raise InvalidParameterError(
            "A network needs at least one sensor and one anchor."
        )
    if not radio_range > 0:
        raise InvalidParameterError(
            f"radio_range must be positive, got {radio_range}."
        )
    if max_neighbors < 1:
        raise InvalidParameterError(
            f"max_neighbors must be at least 1, got {max_neighbors}."
        )

    sensor_distances = _pairwise_distances(sensors, sensors)
    anchor_distances = _pairwise_distances(sensors, anchors)

    sensor_edges = _capped_sensor_edges(
        sensor_distances, radio_range, max_neighbors
    )
    anchor_edges = [
        (j, k)
        for j in range(sensors.shape[0])
        for k in range(anchors.shape[0])
        if anchor_distances[j, k] < radio_range
    ]

    # Same formula as the validator, so stored values match bit for bit
    true_distances = {}
    for i, j in sensor_edges:
        true_distances[sensor_edge_key(i, j)] = _distance(
            sensors[i], sensors[j]
        )
    for j, k in anchor_edges:
        true_distances[anchor_edge_key(j, k)] = _distance(
            sensors[j], anchors[k]
        )

    return Network(
        sensors=sensors,
        anchors=anchors,
        radio_range=float(radio_range),
        sensor_edges=tuple(sensor_edges),
        anchor_edges=tuple(anchor_edges),
        true_distances=true_distances,
        seed=int(seed),
        region=region,
        max_neighbors=int(max_neighbors),
    )


def symmetric_anchor_layout(
    m: int, region: tuple[float, float] = DEFAULT_REGION
) -> np.ndarray:
    """
    Fixed anchor positions for reproducible figures.

    Corners first, then the center, then points evenly spaced on a circle
    of radius a quarter side around the center. ``m=5`` gives the four
    corners plus the center.

    Args:
        m (int): Number of anchors.
        region (tuple[float, float]): Square bounds (low, high).

    Returns:
        np.ndarray: Anchor coordinates, shape (m, 2).
    """
    low, high = region
    center = (low + high) / 2
    points = [
        (low, low),
        (high, low),
        (high, high),
        (low, high),
        (center, center),
    ]
    extra = m - len(points)
    if extra > 0:
        radius = (high - low) / 4
        angles = 2 * np.pi * np.arange(extra) / extra
        points.extend(
            (center + radius * np.cos(t), center + radius * np.sin(t))
            for t in angles
        )
    return np.array(points[:m], dtype=float)


def generate_network(
    n: int,
    m: int,
    radio_range: float,
    max_neighbors: int = 5,
    seed: int = 0,
    region: tuple[float, float] = DEFAULT_REGION,
    anchor_layout: Literal["random", "symmetric"] = "random",
) -> Network:
    """
    Generates a random network in a square region.

    Sensors and then anchors are drawn uniformly i.i.d. from a PCG64
    generator seeded with ``seed``; the result is deterministic for fixed
    inputs.

    Args:
        n (int): Number of sensors, at least 1.
        m (int): Number of anchors, at least 1.
        radio_range (float): Radio range r > 0.
        max_neighbors (int): Neighbor cap per sensor (default 5).
        seed (int): Generator seed.
        region (tuple[float, float]): Square bounds, default ``(-0.5, 0.5)``.
        anchor_layout (str): ``"random"`` or ``"symmetric"``.

    Returns:
        Network: The generated network.

    Raises:
        InvalidParameterError: For nonpositive n, m, r, max_neighbors, a
            degenerate region or an unknown anchor layout.

    Examples:
        ```python
        generate_network(300, 5, 0.2, max_neighbors=5, seed=7)
        generate_network(40, 5, 0.3, anchor_layout='symmetric')
        ```
    """
    if n < 1 or m < 1:
        raise InvalidParameterError(
            f"Need n >= 1 sensors and m >= 1 anchors, got n={n}, m={m}."
        )
    if not radio_range > 0:
        raise InvalidParameterError(
            f"radio_range must be positive, got {radio_range}."
        )
    if max_neighbors < 1:
        raise InvalidParameterError(
            f"max_neighbors must be at least 1, got {max_neighbors}."
        )
    low, high = (float(v) for v in region)
    if not high > low:
        raise InvalidParameterError(
            f"Region {region} has zero or negative side length."
        )
    if anchor_layout not in ("random", "symmetric"):
        raise InvalidParameterError(
            f"Unknown anchor layout {anchor_layout!r}. Available: random, symmetric."
        )

    rng = np.random.Generator(np.random.PCG64(seed))
    sensors = rng.uniform(low, high, size=(n, 2))
    if anchor_layout == "random":
        anchors = rng.uniform(low, high, size=(m, 2))
    else:
        anchors = symmetric_anchor_layout(m, (low, high))

    net = build_network(
        sensors,
        anchors,
        radio_range,
        max_neighbors=max_neighbors,
        seed=seed,
        region=(low, high),
    )
    logger.debug(
        f"Generated network seed={seed}: n={n}, m={m}, "
        f"{len(net.sensor_edges)} sensor edges, {len(net.anchor_edges)} anchor edges"
    )
    return net


def network_summary(net: Network) -> dict:
    """
    Counts describing a network, for logs and CLI output.

    Args:
        net (Network): The network.

    Returns:
        dict: ``n``, ``m``, edge counts, isolated sensors (no edge at all)
        and sensors with no path to an anchor.
    """
    touched = set()
    adjacency = {j: set() for j in range(net.n)}
    for i, j in net.sensor_edges:
        touched.update((i, j))
        adjacency[i].add(j)
        adjacency[j].add(i)
    anchored = {j for j, _ in net.anchor_edges}
    touched.update(anchored)

    reached = set(anchored)
    frontier = list(anchored)
    while frontier:
        node = frontier.pop()
        for other in adjacency[node] - reached:
            reached.add(other)
            frontier.append(other)

    return {
        "n": net.n,
        "m": net.m,
        "sensor_edges": len(net.sensor_edges),
        "anchor_edges": len(net.anchor_edges),
        "isolated_sensors": net.n - len(touched),
        "unanchored_sensors": net.n - len(reached),
    }
