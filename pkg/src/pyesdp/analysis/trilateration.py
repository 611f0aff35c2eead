import numpy as np

from ..utils.exceptions import InvalidParameterError


def trilaterate(anchors: np.ndarray, distances: np.ndarray) -> np.ndarray:
    """
    Closed-form position from distances to known anchors.

    Subtracting the first circle equation from the others gives the linear
    system ``2 (a_k - a_0)' x = |a_k|^2 - |a_0|^2 - d_k^2 + d_0^2``, solved
    in the least-squares sense.

    Args:
        anchors (np.ndarray): Anchor positions, shape (m, 2), m >= 3.
        distances (np.ndarray): Distance to each anchor, shape (m,).

    Returns:
        np.ndarray: The estimated position, shape (2,).

    Raises:
        InvalidParameterError: With fewer than three anchors, collinear
            anchors or mismatched lengths.

    Examples:
        ```python
        trilaterate([[0.3, 0], [0, 0.3], [-0.3, 0]], [0.2, 0.316, 0.4])
        ```
    """
    anchors = np.asarray(anchors, dtype=float).reshape(-1, 2)
    distances = np.asarray(distances, dtype=float).ravel()
    if anchors.shape[0] != distances.size:
        raise InvalidParameterError(
            f"{anchors.shape[0]} anchors but {distances.size} distances."
        )
    if anchors.shape[0] < 3:
        raise InvalidParameterError("Trilateration needs at least three anchors.")

    matrix = 2.0 * (anchors[1:] - anchors[0])
    if np.linalg.matrix_rank(matrix) < 2:
        raise InvalidParameterError("The anchors are collinear.")
    rhs = (
        np.sum(anchors[1:] ** 2, axis=1)
        - np.sum(anchors[0] ** 2)
        - distances[1:] ** 2
        + distances[0] ** 2
    )
    position, *_ = np.linalg.lstsq(matrix, rhs, rcond=None)
    return position
