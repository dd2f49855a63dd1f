"""Tuple-file serialization.

Format: a header line "n m", then n blocks of m lines with m whitespace
separated decimal numbers each.  Lines starting with '#' are comments;
blank lines are ignored.  Numbers are written with 17 significant digits so
doubles round-trip exactly.
"""

from __future__ import annotations

import hashlib
from pathlib import Path

import numpy as np

from .errors import NotPositiveDefiniteError, NotSymmetricError, TupleFileError
from .linalg import DEFAULT_SYM_TOL, MatrixTuple, make_spd


def format_number(x: float) -> str:
    return f"{x:.17g}"


def write_matrices(path, arrays, comment: str | None = None) -> None:
    """Write matrices in tuple-file format (n may be 1 for a single matrix)."""
    arrays = [np.asarray(a, dtype=np.float64) for a in arrays]
    n = len(arrays)
    m = arrays[0].shape[0]
    lines = []
    if comment:
        for part in comment.splitlines():
            lines.append(f"# {part}")
    lines.append(f"{n} {m}")
    for a in arrays:
        if a.shape != (m, m):
            raise TupleFileError(f"all matrices must be {m}x{m}, got {a.shape}")
        for row in a:
            lines.append(" ".join(format_number(x) for x in row))
    Path(path).write_text("\n".join(lines) + "\n")


def _data_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        yield lineno, stripped


def _read_raw(path) -> tuple[list[np.ndarray], list[int]]:
    """Arrays plus the line number of each matrix block's first data row."""
    text = Path(path).read_text()
    lines = list(_data_lines(text))
    if not lines:
        raise TupleFileError("empty file: expected a header line 'n m'")
    header_line, header = lines[0]
    parts = header.split()
    if len(parts) != 2:
        raise TupleFileError("header must be two integers 'n m'", header_line)
    try:
        n, m = int(parts[0]), int(parts[1])
    except ValueError:
        raise TupleFileError("header must be two integers 'n m'", header_line)
    if n < 1 or m < 1:
        raise TupleFileError(f"header values must be positive, got n={n} m={m}", header_line)

    rows = lines[1:]
    if len(rows) != n * m:
        raise TupleFileError(
            f"expected {n * m} data rows for {n} matrices of size {m}, found {len(rows)}"
        )
    data = np.empty((n * m, m))
    for k, (lineno, row) in enumerate(rows):
        parts = row.split()
        if len(parts) != m:
            raise TupleFileError(f"expected {m} numbers, got {len(parts)}", lineno)
        try:
            data[k] = [float(p) for p in parts]
        except ValueError:
            raise TupleFileError(f"non-numeric value in row {row!r}", lineno)
    arrays = [data[i * m : (i + 1) * m].copy() for i in range(n)]
    block_lines = [rows[i * m][0] for i in range(n)]
    return arrays, block_lines


def read_matrices(path) -> list[np.ndarray]:
    """Parse a tuple file into raw arrays; line-numbered diagnostics on failure."""
    return _read_raw(path)[0]


def read_tuple(path, sym_tol: float = DEFAULT_SYM_TOL) -> MatrixTuple:
    """Parse and validate a tuple file as a MatrixTuple (n >= 2)."""
    arrays, block_lines = _read_raw(path)
    if len(arrays) < 2:
        raise TupleFileError(f"a matrix tuple needs n >= 2 matrices, file has {len(arrays)}")
    matrices = []
    for k, (a, lineno) in enumerate(zip(arrays, block_lines)):
        try:
            matrices.append(make_spd(a, sym_tol))
        except NotSymmetricError as exc:
            raise TupleFileError(f"matrix {k + 1} is not symmetric: {exc}", lineno)
        except NotPositiveDefiniteError as exc:
            raise TupleFileError(f"matrix {k + 1} is not positive definite: {exc}", lineno)
    return MatrixTuple(matrices)


def tuple_digest(tup: MatrixTuple) -> str:
    """sha256 over the canonical 17-digit text serialization."""
    chunks = [f"{tup.n} {tup.dim}"]
    for m in tup:
        for row in m.values:
            chunks.append(" ".join(format_number(x) for x in row))
    return hashlib.sha256("\n".join(chunks).encode()).hexdigest()
