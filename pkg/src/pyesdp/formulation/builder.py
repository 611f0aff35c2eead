from collections.abc import Mapping
from dataclasses import dataclass
from typing import Literal, NamedTuple

import numpy as np
import scipy.sparse as sp

from ..network.network import Network
from ..network.noise import MeasuredNetwork
from ..solver.cones import ConeDims, svec, svec_index, svec_size
from ..solver.program import ConicProgram
from ..utils.exceptions import (
    FormulationError,
    InvalidParameterError,
    OptionNotAvailableError,
)
from ..utils.logging import get_logger
from .layout import ZLayout, build_z_layout

logger = get_logger(__name__)

DEFAULT_PERTURBATION = 0.1


class PsdBlock(NamedTuple):
    """Rows ``start:stop`` of a PSD block and the Z indices it covers."""

    start: int
    stop: int
    z_indices: tuple[int, ...]

    @property
    def rows(self) -> slice:
        return slice(self.start, self.stop)

    @property
    def order(self) -> int:
        return len(self.z_indices)


@dataclass(frozen=True, eq=False)
class FormulationMap:
    """
    Everything needed to read a solution of a built program.

    Attributes:
        method (str): ``"esdp"`` or ``"pesdp"``.
        z_layout (ZLayout): Z entry to decision slot map.
        alpha_index (dict): Edge key to ``(alpha_plus, alpha_minus)`` slots.
        equality_rows (dict): ``"base"``, ``"sensor"`` and ``"anchor"`` to
            row ids.
        edge_rows (dict): Edge key to its equality row.
        nonneg_rows (slice): Rows of the nonnegative cone.
        psd_block_registry (dict): Sensor edge key to its :class:`PsdBlock`,
            in cone order.
        single_sensor_blocks (dict): Sensor to its 3x3 :class:`PsdBlock`.
        perturbation (dict): Sensor edge key to ``p_ij`` (0 for ESDP).
        gauge_free (bool): True when no anchor edge pins the translation.
        unconstrained_sensors (tuple): Sensors without any edge.
        fallback_position (np.ndarray): Position reported for those sensors.
        n_variables (int): Length of the decision vector.
    """

    method: str
    z_layout: ZLayout
    alpha_index: dict[str, tuple[int, int]]
    equality_rows: dict[str, tuple[int, ...]]
    edge_rows: dict[str, int]
    nonneg_rows: slice
    psd_block_registry: dict[str, PsdBlock]
    single_sensor_blocks: dict[int, PsdBlock]
    perturbation: dict[str, float]
    gauge_free: bool
    unconstrained_sensors: tuple[int, ...]
    fallback_position: np.ndarray
    n_variables: int

    @property
    def n_sensors(self) -> int:
        return self.z_layout.n


class _RowBuilder:
    """Collects COO triplets row by row."""

    def __init__(self):
        self.rows = []
        self.cols = []
        self.vals = []
        self.b = []

    @property
    def n_rows(self) -> int:
        return len(self.b)

    def add_row(self, coefficients: dict[int, float], rhs: float) -> int:
        row = self.n_rows
        for col, value in coefficients.items():
            if value != 0.0:
                self.rows.append(row)
                self.cols.append(col)
                self.vals.append(value)
        self.b.append(rhs)
        return row

    def matrix(self, n_cols: int) -> sp.csc_matrix:
        return sp.csc_matrix(
            (self.vals, (self.rows, self.cols)), shape=(self.n_rows, n_cols)
        )


def _add(coefficients: dict[int, float], slot: int, value: float) -> None:
    coefficients[slot] = coefficients.get(slot, 0.0) + value


def _psd_rows(
    builder: _RowBuilder,
    layout: ZLayout,
    z_indices: tuple[int, ...],
    offset: np.ndarray,
) -> PsdBlock:
    """Rows whose slack is ``svec(Z[z_indices, z_indices]) + offset``."""
    start = builder.n_rows
    k = len(z_indices)
    for col in range(k):
        for row in range(col + 1):
            scale = 1.0 if row == col else np.sqrt(2.0)
            slot = layout.slot(z_indices[row], z_indices[col])
            builder.add_row({slot: -scale}, offset[svec_index(row, col)])
    return PsdBlock(start, start + svec_size(k), z_indices)


def _resolve_perturbation(
    net: Network, p: float | Mapping[str, float]
) -> dict[str, float]:
    keys = net.sensor_edge_keys
    if isinstance(p, Mapping):
        unknown = sorted(set(p) - set(keys))
        if unknown:
            raise InvalidParameterError(
                f"Perturbation given for edges that are not sensor edges: {unknown[:3]}."
            )
        missing = [key for key in keys if key not in p]
        if missing:
            raise InvalidParameterError(
                f"Perturbation map misses sensor edges: {missing[:3]}."
            )
        values = {key: float(p[key]) for key in keys}
    else:
        values = {key: float(p) for key in keys}
    for key, value in values.items():
        if not (value >= 0 and np.isfinite(value)):
            raise InvalidParameterError(
                f"Perturbation for {key} must be nonnegative, got {value}."
            )
    return values


def _build(
    mn: MeasuredNetwork,
    perturbation: dict[str, float],
    method: Literal["esdp", "pesdp"],
    single_sensor_blocks: bool,
) -> tuple[ConicProgram, FormulationMap]:
    net = mn.network
    edge_keys = net.edge_keys
    if not edge_keys:
        raise FormulationError(
            "The network has no edges; there is nothing to formulate."
        )

    layout = build_z_layout(net)
    builder = _RowBuilder()

    alpha_index = {}
    first_alpha = layout.n_z_slots
    for position, key in enumerate(edge_keys):
        alpha_index[key] = (
            first_alpha + 2 * position,
            first_alpha + 2 * position + 1,
        )

    # Top-left block of Z is the identity
    base_rows = tuple(
        builder.add_row({slot: 1.0}, value)
        for slot, value in zip((0, 1, 2), (1.0, 1.0, 0.0))
    )

    edge_rows = {}
    sensor_rows = []
    for (i, j), key in zip(net.sensor_edges, net.sensor_edge_keys):
        plus, minus = alpha_index[key]
        coefficients = {}
        _add(coefficients, layout.slot(2 + i, 2 + i), 1.0)
        _add(coefficients, layout.slot(2 + j, 2 + j), 1.0)
        _add(coefficients, layout.slot(2 + i, 2 + j), -2.0)
        coefficients[plus] = -1.0
        coefficients[minus] = 1.0
        row = builder.add_row(coefficients, mn.squared_measurement(key))
        edge_rows[key] = row
        sensor_rows.append(row)

    anchor_rows = []
    for (j, k), key in zip(net.anchor_edges, net.anchor_edge_keys):
        a1, a2 = net.anchors[k]
        plus, minus = alpha_index[key]
        # (-a_k; e_j)' Z (-a_k; e_j)
        coefficients = {}
        _add(coefficients, 0, a1 * a1)
        _add(coefficients, 1, a2 * a2)
        _add(coefficients, 2, 2.0 * a1 * a2)
        x1, x2 = layout.x_slots(j)
        _add(coefficients, x1, -2.0 * a1)
        _add(coefficients, x2, -2.0 * a2)
        _add(coefficients, layout.slot(2 + j, 2 + j), 1.0)
        coefficients[plus] = -1.0
        coefficients[minus] = 1.0
        row = builder.add_row(coefficients, mn.squared_measurement(key))
        edge_rows[key] = row
        anchor_rows.append(row)

    n_zero = builder.n_rows
    for key in edge_keys:
        for slot in alpha_index[key]:
            builder.add_row({slot: -1.0}, 0.0)
    nonneg_rows = slice(n_zero, builder.n_rows)

    registry = {}
    for (i, j), key in zip(net.sensor_edges, net.sensor_edge_keys):
        offset = svec(perturbation[key] * np.eye(4))
        registry[key] = _psd_rows(builder, layout, (0, 1, 2 + i, 2 + j), offset)

    in_sensor_edge = {v for edge in net.sensor_edges for v in edge}
    anchored = sorted({j for j, _ in net.anchor_edges})
    single = {}
    if single_sensor_blocks:
        for j in anchored:
            if j not in in_sensor_edge:
                single[j] = _psd_rows(
                    builder, layout, (0, 1, 2 + j), np.zeros(svec_size(3))
                )

    n_variables = layout.n_variables
    c = np.zeros(n_variables)
    c[layout.n_z_slots :] = 1.0
    cones = ConeDims(
        zero=n_zero,
        nonneg=nonneg_rows.stop - nonneg_rows.start,
        psd=(4,) * len(registry) + (3,) * len(single),
    )
    program = ConicProgram(
        c=c, A=builder.matrix(n_variables), b=np.array(builder.b), cones=cones
    )

    touched = in_sensor_edge | set(anchored)
    unconstrained = tuple(j for j in range(net.n) if j not in touched)
    fallback = net.anchors.mean(axis=0)
    gauge_free = not net.anchor_edges
    if gauge_free:
        logger.warning(
            "No anchor edges: the program is invariant under translations "
            "and positions are determined up to a shift."
        )
    if unconstrained:
        logger.warning(
            f"{len(unconstrained)} sensors have no edge and will be reported "
            f"at the anchor centroid {fallback.tolist()}: {list(unconstrained[:10])}"
        )

    fmap = FormulationMap(
        method=method,
        z_layout=layout,
        alpha_index=alpha_index,
        equality_rows={
            "base": base_rows,
            "sensor": tuple(sensor_rows),
            "anchor": tuple(anchor_rows),
        },
        edge_rows=edge_rows,
        nonneg_rows=nonneg_rows,
        psd_block_registry=registry,
        single_sensor_blocks=single,
        perturbation=perturbation,
        gauge_free=gauge_free,
        unconstrained_sensors=unconstrained,
        fallback_position=fallback,
        n_variables=n_variables,
    )
    logger.debug(
        f"Built {method}: {n_variables} variables, {program.n_rows} rows, "
        f"{len(registry)} 4x4 blocks, {len(single)} 3x3 blocks"
    )
    return program, fmap


def build_esdp(
    mn: MeasuredNetwork, single_sensor_blocks: bool = False
) -> tuple[ConicProgram, FormulationMap]:
    """
    Builds the edge-based SDP relaxation of a measured network.

    Rows, in order:

    - three base rows fixing the top-left 2x2 block of ``Z`` to ``I2``;
    - one row per sensor edge:
      ``Y_ii - 2 Y_ij + Y_jj - a+ + a- = (d + noise)^2``;
    - one row per anchor edge:
      ``(-a_k; e_j)' Z (-a_k; e_j) - a+ + a- = (d + noise)^2``;
    - one nonnegative row per slack variable;
    - one 10-row PSD block per sensor edge holding
      ``svec(Z[{0, 1, 2+i, 2+j}])``;
    - with ``single_sensor_blocks``, one 6-row block on ``{0, 1, 2+j}`` for
      every anchored sensor without sensor edges.

    The objective is the sum of all slacks.

    Args:
        mn (MeasuredNetwork): The measured network.
        single_sensor_blocks (bool): Add the 3x3 blocks described above.

    Returns:
        tuple[ConicProgram, FormulationMap]: The program and its index map.

    Raises:
        FormulationError: If the network has no edge at all.

    Examples:
        ```python
        program, fmap = build_esdp(apply_noise(net, 0.1, noise_seed=3))
        ```
    """
    perturbation = {key: 0.0 for key in mn.network.sensor_edge_keys}
    return _build(mn, perturbation, "esdp", single_sensor_blocks)


def build_pesdp(
    mn: MeasuredNetwork,
    p: float | Mapping[str, float] = DEFAULT_PERTURBATION,
    single_sensor_blocks: bool = False,
) -> tuple[ConicProgram, FormulationMap]:
    """
    Builds the perturbed relaxation: every sensor-edge block is shifted by
    ``p_ij * I4`` before the PSD constraint.

    The program equals :func:`build_esdp` except for the PSD block offsets,
    which become ``svec(p_ij * I4)``, so the block slack is
    ``svec(Z_block + p_ij * I4)``.

    Args:
        mn (MeasuredNetwork): The measured network.
        p (float | Mapping[str, float]): One value for every sensor edge,
            or a map keyed by sensor edge (``"s:i-j"``) covering all of them.
        single_sensor_blocks (bool): Add unperturbed 3x3 blocks for anchored
            sensors without sensor edges.

    Returns:
        tuple[ConicProgram, FormulationMap]: The program and its index map.

    Raises:
        InvalidParameterError: If a perturbation is negative or the map
            does not match the sensor edges.
        FormulationError: If the network has no edge at all.

    Examples:
        ```python
        build_pesdp(mn, p=0.1)
        build_pesdp(mn, p={'s:0-1': 0.1, 's:1-4': 0.05})
        ```
    """
    perturbation = _resolve_perturbation(mn.network, p)
    return _build(mn, perturbation, "pesdp", single_sensor_blocks)


def build_program(
    mn: MeasuredNetwork,
    method: Literal["esdp", "pesdp"],
    p: float | Mapping[str, float] = DEFAULT_PERTURBATION,
    single_sensor_blocks: bool = False,
) -> tuple[ConicProgram, FormulationMap]:
    """Dispatch to :func:`build_esdp` or :func:`build_pesdp` by name."""
    if method == "esdp":
        return build_esdp(mn, single_sensor_blocks=single_sensor_blocks)
    if method == "pesdp":
        return build_pesdp(mn, p, single_sensor_blocks=single_sensor_blocks)
    raise OptionNotAvailableError(
        f"Unknown method {method!r}. Available: esdp, pesdp."
    )


def implied_slack(program: ConicProgram, y: np.ndarray) -> np.ndarray:
    """
    Slack ``b - A y`` of a decision vector, without any projection.

    Examples:
        ```python
        s = implied_slack(program, true_solution_vector(net, fmap.z_layout))
        ```
    """
    return program.implied_slack(y)
