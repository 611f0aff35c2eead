"""
SDPA sparse format (``.dat-s``) export and import.

SDPA solves ``min c'x  s.t.  X = sum_i F_i x_i - F_0,  X psd`` over a block
diagonal ``X``. A program ``A y + s = b, s in K`` maps onto it with
``F_i = -A[:, i]`` and ``F_0 = -b``:

- one diagonal (LP) block, written first when present, holds two entries
  per zero-cone row (``s >= 0`` and ``-s >= 0``) followed by one entry per
  nonnegative row;
- every PSD block of the program becomes one SDP block, off-diagonal svec
  entries divided by ``sqrt(2)``.

Entry lines ``matrix block i j value`` are 1-based, upper triangle only,
sorted by ``(matrix, block, i, j)`` and written with ``repr`` precision.
"""

from pathlib import Path
from typing import NamedTuple

import numpy as np
import scipy.sparse as sp

from ..solver.cones import ConeDims, svec_index, svec_size
from ..solver.program import ConicProgram
from ..utils.exceptions import (
    PyEsdpFileNotFoundError,
    SchemaError,
)
from ..utils.logging import get_logger

logger = get_logger(__name__)

SQRT2 = np.sqrt(2.0)


class SdpaProblem(NamedTuple):
    """
    Contents of an SDPA sparse file.

    Attributes:
        c (np.ndarray): Objective vector, one entry per variable.
        block_struct (tuple[int, ...]): Block sizes, negative for LP blocks.
        entries (list[tuple[int, int, int, int, float]]): ``(matrix,
            block, i, j, value)`` with 1-based block and indices; matrix 0
            is ``F_0``.
    """

    c: np.ndarray
    block_struct: tuple[int, ...]
    entries: list[tuple[int, int, int, int, float]]

    @property
    def m_dim(self) -> int:
        return self.c.size


def _lp_positions(cones: ConeDims) -> dict[int, list[tuple[int, float]]]:
    """Program row to its LP positions (1-based) and signs."""
    positions = {}
    position = 1
    for row in range(cones.zero):
        positions[row] = [(position, 1.0), (position + 1, -1.0)]
        position += 2
    for row in range(cones.zero, cones.zero + cones.nonneg):
        positions[row] = [(position, 1.0)]
        position += 1
    return positions


def program_to_sdpa(program: ConicProgram) -> SdpaProblem:
    """
    Converts a conic program to SDPA data.

    Args:
        program (ConicProgram): The program.

    Returns:
        SdpaProblem: The SDPA data with sorted entries.
    """
    cones = program.cones
    lp_size = 2 * cones.zero + cones.nonneg
    block_struct = ((-lp_size,) if lp_size else ()) + cones.psd
    first_sdp_block = 2 if lp_size else 1

    # program row -> list of (block, i, j, factor)
    targets = {}
    for row, places in _lp_positions(cones).items():
        targets[row] = [(1, pos, pos, sign) for pos, sign in places]
    for number, (offset, k) in enumerate(zip(cones.psd_offsets(), cones.psd)):
        block = first_sdp_block + number
        for col in range(k):
            for row in range(col + 1):
                scale = 1.0 if row == col else 1.0 / SQRT2
                targets[offset + svec_index(row, col)] = [
                    (block, row + 1, col + 1, scale)
                ]

    entries = []
    for row, value in enumerate(program.b):
        if value != 0.0:
            for block, i, j, factor in targets[row]:
                entries.append((0, block, i, j, float(-factor * value)))
    A = sp.csc_matrix(program.A)
    for variable in range(A.shape[1]):
        start, stop = A.indptr[variable], A.indptr[variable + 1]
        for row, value in zip(A.indices[start:stop], A.data[start:stop]):
            if value != 0.0:
                for block, i, j, factor in targets[int(row)]:
                    entries.append(
                        (variable + 1, block, i, j, float(-factor * value))
                    )
    entries.sort(key=lambda entry: entry[:4])
    return SdpaProblem(
        c=np.array(program.c, dtype=float),
        block_struct=block_struct,
        entries=entries,
    )


def export_sdpa(
    program: ConicProgram, path: str | Path, comment: str = "pyesdp export"
) -> None:
    """
    Writes a conic program in SDPA sparse format.

    The output depends only on the program data, so exporting the same
    program twice gives byte-identical files.

    Args:
        program (ConicProgram): The program.
        path (str | Path): Destination ``.dat-s`` file.
        comment (str): Text of the leading comment line.

    Examples:
        ```python
        program, _ = build_pesdp(mn, p=0.1)
        export_sdpa(program, 'pesdp.dat-s')
        ```
    """
    data = program_to_sdpa(program)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [
        f'"{comment}"',
        f"{data.m_dim} = mDIM",
        f"{len(data.block_struct)} = nBLOCK",
        " ".join(str(size) for size in data.block_struct) + " = bLOCKsTRUCT",
        " ".join(repr(float(value)) for value in data.c),
    ]
    lines.extend(
        f"{matrix} {block} {i} {j} {float(value)!r}"
        for matrix, block, i, j, value in data.entries
    )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    logger.success(
        f"SDPA file written to {path} ({data.m_dim} variables, {len(data.entries)} entries)"
    )


def _header_value(line: str) -> str:
    # Header lines may carry trailing text, e.g. "3 = mDIM"
    return line.replace(",", " ").replace("{", " ").replace("}", " ").split("=")[0]


def read_sdpa(path: str | Path) -> SdpaProblem:
    """
    Reads an SDPA sparse file.

    Leading lines starting with ``"`` or ``*`` are comments. Header lines
    may use commas, braces and trailing ``= name`` annotations.

    Args:
        path (str | Path): The ``.dat-s`` file.

    Returns:
        SdpaProblem: The parsed data.

    Raises:
        PyEsdpFileNotFoundError: If the file does not exist.
        SchemaError: If the file is malformed, with the line number.
    """
    path = Path(path)
    if not path.exists():
        raise PyEsdpFileNotFoundError(f"File not found: {path}")
    raw = path.read_text(encoding="utf-8").splitlines()
    numbered = [
        (number, line.strip())
        for number, line in enumerate(raw, start=1)
        if line.strip()
    ]
    while numbered and numbered[0][1][0] in "\"*":
        numbered.pop(0)
    if len(numbered) < 4:
        raise SchemaError(f"{path}: the SDPA header is incomplete.")

    try:
        number, line = numbered[0]
        m_dim = int(_header_value(line).split()[0])
        number, line = numbered[1]
        n_block = int(_header_value(line).split()[0])
        number, line = numbered[2]
        block_struct = tuple(
            int(v) for v in _header_value(line).split()[:n_block]
        )
        number, line = numbered[3]
        c = np.array(
            [float(v) for v in _header_value(line).split()[:m_dim]]
        )
    except (ValueError, IndexError) as e:
        raise SchemaError(f"{path}, line {number}: malformed header ({e}).") from e
    if len(block_struct) != n_block or c.size != m_dim:
        raise SchemaError(
            f"{path}: header declares {n_block} blocks and {m_dim} variables "
            f"but lists {len(block_struct)} and {c.size}."
        )

    entries = []
    for number, line in numbered[4:]:
        fields = line.split()
        try:
            matrix, block, i, j = (int(v) for v in fields[:4])
            value = float(fields[4])
        except (ValueError, IndexError) as e:
            raise SchemaError(
                f"{path}, line {number}: expected 'matrix block i j value'."
            ) from e
        if not (0 <= matrix <= m_dim and 1 <= block <= n_block):
            raise SchemaError(
                f"{path}, line {number}: matrix {matrix} or block {block} out of range."
            )
        size = abs(block_struct[block - 1])
        if not (1 <= i <= size and 1 <= j <= size):
            raise SchemaError(
                f"{path}, line {number}: index ({i}, {j}) outside block {block} of size {size}."
            )
        if i > j:
            i, j = j, i
        entries.append((matrix, block, i, j, value))
    return SdpaProblem(c=c, block_struct=block_struct, entries=entries)


def sdpa_to_program(data: SdpaProblem) -> ConicProgram:
    """
    Rebuilds a conic program from SDPA data.

    LP blocks become nonnegative rows (a zero-cone row exported as a pair
    comes back as two opposite inequalities, which describes the same
    feasible set) and SDP blocks become PSD blocks in svec form.

    Args:
        data (SdpaProblem): Parsed SDPA data.

    Returns:
        ConicProgram: An equivalent program.
    """
    lp_blocks = [b for b, size in enumerate(data.block_struct) if size < 0]
    sdp_blocks = [b for b, size in enumerate(data.block_struct) if size > 0]

    row_of = {}
    row = 0
    for b in lp_blocks:
        for i in range(1, -data.block_struct[b] + 1):
            row_of[(b + 1, i, i)] = (row, 1.0)
            row += 1
    n_nonneg = row
    for b in sdp_blocks:
        k = data.block_struct[b]
        for col in range(k):
            for r in range(col + 1):
                scale = 1.0 if r == col else SQRT2
                row_of[(b + 1, r + 1, col + 1)] = (row + svec_index(r, col), scale)
        row += svec_size(k)

    b_vec = np.zeros(row)
    rows, cols, vals = [], [], []
    for matrix, block, i, j, value in data.entries:
        target = row_of.get((block, i, j))
        if target is None:
            raise SchemaError(
                f"Entry ({matrix}, {block}, {i}, {j}) is off the diagonal of an LP block."
            )
        position, scale = target
        if matrix == 0:
            b_vec[position] += -scale * value
        else:
            rows.append(position)
            cols.append(matrix - 1)
            vals.append(-scale * value)
    A = sp.csc_matrix((vals, (rows, cols)), shape=(row, data.m_dim))
    cones = ConeDims(
        zero=0,
        nonneg=n_nonneg,
        psd=tuple(data.block_struct[b] for b in sdp_blocks),
    )
    return ConicProgram(c=data.c, A=A, b=b_vec, cones=cones)
