"""
Index map between the lifted matrix ``Z = [[I2, X'], [X, Y]]`` and the
decision vector.

Rows and columns 0 and 1 of ``Z`` hold the identity block; sensor ``j``
lives at index ``2 + j``. The decision vector starts with the three fixed
entries ``(0, 0)``, ``(1, 1)``, ``(0, 1)``, then the active entries sorted
by ``(row, col)``, then the slack pairs of every edge.
"""

from dataclasses import dataclass, field

import numpy as np

from ..network.network import Network
from ..utils.exceptions import FormulationError

FIXED_ENTRIES = ((0, 0), (1, 1), (0, 1))
FIXED_VALUES = (1.0, 1.0, 0.0)


@dataclass(frozen=True, eq=False)
class ZLayout:
    """
    Which entries of ``Z`` are decision variables and where they live.

    Attributes:
        n (int): Number of sensors; ``Z`` has order ``2 + n``.
        sensor_edges (tuple): Sensor edges the layout was built from.
        anchor_edges (tuple): Anchor edges the layout was built from.
        active_entries (tuple): Free upper-triangle entries, sorted.
        entry_index (dict): ``(row, col)`` with ``row <= col`` to slot, for
            fixed and active entries.
        n_alpha (int): Number of slack variables (two per edge).
    """

    n: int
    sensor_edges: tuple[tuple[int, int], ...]
    anchor_edges: tuple[tuple[int, int], ...]
    active_entries: tuple[tuple[int, int], ...]
    entry_index: dict[tuple[int, int], int] = field(repr=False)
    n_alpha: int

    @property
    def dimension(self) -> int:
        return 2 + self.n

    @property
    def fixed_entries(self) -> tuple[tuple[int, int], ...]:
        return FIXED_ENTRIES

    @property
    def n_z_slots(self) -> int:
        return len(FIXED_ENTRIES) + len(self.active_entries)

    @property
    def n_variables(self) -> int:
        return self.n_z_slots + self.n_alpha

    @property
    def located_sensors(self) -> tuple[int, ...]:
        """Sensors that own position variables."""
        return tuple(
            col - 2 for row, col in self.active_entries if row == 0
        )

    def slot(self, row: int, col: int) -> int:
        """Slot of entry ``(row, col)``; the order of the indices is free."""
        if row > col:
            row, col = col, row
        try:
            return self.entry_index[(row, col)]
        except KeyError as e:
            raise FormulationError(
                f"Z entry ({row}, {col}) is not a decision variable."
            ) from e

    def x_slots(self, j: int) -> tuple[int, int]:
        """Slots of the two coordinates of sensor ``j``."""
        return self.slot(0, 2 + j), self.slot(1, 2 + j)

    def matches(self, net: Network) -> bool:
        return (
            self.n == net.n
            and self.sensor_edges == net.sensor_edges
            and self.anchor_edges == net.anchor_edges
        )


def build_z_layout(net: Network) -> ZLayout:
    """
    Layout for the edges of ``net``.

    Every sensor touched by an edge gets its two coordinates and ``Y_jj``;
    every sensor edge ``(i, j)`` adds ``Y_ij``. Sensors with no edge get
    nothing.

    Args:
        net (Network): The network.

    Returns:
        ZLayout: The layout.
    """
    touched = set()
    entries = set()
    for i, j in net.sensor_edges:
        touched.update((i, j))
        entries.add((2 + i, 2 + j))
    for j, _ in net.anchor_edges:
        touched.add(j)
    for j in touched:
        entries.update(((0, 2 + j), (1, 2 + j), (2 + j, 2 + j)))

    active = tuple(sorted(entries))
    entry_index = {entry: slot for slot, entry in enumerate(FIXED_ENTRIES)}
    for offset, entry in enumerate(active):
        entry_index[entry] = len(FIXED_ENTRIES) + offset

    return ZLayout(
        n=net.n,
        sensor_edges=net.sensor_edges,
        anchor_edges=net.anchor_edges,
        active_entries=active,
        entry_index=entry_index,
        n_alpha=2 * (len(net.sensor_edges) + len(net.anchor_edges)),
    )


def true_solution_vector(net: Network, layout: ZLayout) -> np.ndarray:
    """
    Decision vector of the true configuration.

    Coordinates come from the true sensor positions, ``Y`` entries from
    their inner products, the fixed entries are ``1, 1, 0`` and every slack
    is zero.

    Args:
        net (Network): The network the layout was built from.
        layout (ZLayout): The layout.

    Returns:
        np.ndarray: Vector of length ``layout.n_variables``.

    Raises:
        FormulationError: If the layout belongs to another network.

    Examples:
        ```python
        program, fmap = build_esdp(apply_noise(net, 0.0))
        y = true_solution_vector(net, fmap.z_layout)
        ```
    """
    if not layout.matches(net):
        raise FormulationError(
            "The layout was built from a different network "
            f"(layout n={layout.n}, network n={net.n})."
        )
    y = np.zeros(layout.n_variables)
    y[: len(FIXED_ENTRIES)] = FIXED_VALUES
    points = net.sensors
    for (row, col), slot in layout.entry_index.items():
        if row < 2 and col < 2:
            continue
        if row < 2:
            y[slot] = points[col - 2, row]
        else:
            y[slot] = points[row - 2] @ points[col - 2]
    return y


def assemble_z(y: np.ndarray, layout: ZLayout) -> np.ndarray:
    """
    Dense symmetric ``Z`` from a decision vector.

    Entries that are not decision variables are zero.

    Args:
        y (np.ndarray): Decision vector.
        layout (ZLayout): The layout.

    Returns:
        np.ndarray: Matrix of order ``2 + n``.

    Raises:
        FormulationError: If ``y`` is shorter than the Z slots.
    """
    y = np.asarray(y, dtype=float)
    if y.size < layout.n_z_slots:
        raise FormulationError(
            f"Decision vector has {y.size} entries, the layout needs {layout.n_z_slots}."
        )
    z = np.zeros((layout.dimension, layout.dimension))
    entries = np.array(list(layout.entry_index.keys()), dtype=int)
    slots = np.array(list(layout.entry_index.values()), dtype=int)
    z[entries[:, 0], entries[:, 1]] = y[slots]
    z[entries[:, 1], entries[:, 0]] = y[slots]
    return z
