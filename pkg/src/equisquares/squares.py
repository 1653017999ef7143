"""Equi-n-squares, transversals, and their on-disk text formats.

An equi-n-square is an n x n grid over symbols 0..n-1 in which every symbol
occurs exactly n times.  A transversal is a cell set whose rows, columns,
and symbols are pairwise distinct.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, NamedTuple

import numpy as np


class SquareError(ValueError):
    """Base class for square/transversal validation and parsing failures."""


class DimensionMismatch(SquareError):
    pass


class SymbolOutOfRange(SquareError):
    def __init__(self, value: int, cell: "Cell"):
        self.value = value
        self.cell = cell
        super().__init__(f"symbol {value} at cell {tuple(cell)} not in [0, n)")


class CountViolation(SquareError):
    def __init__(self, symbol: int, count: int):
        self.symbol = symbol
        self.count = count
        super().__init__(f"symbol {symbol} occurs {count} times, expected n")


class CellOutOfRange(SquareError):
    pass


class ClashError(SquareError):
    """Two transversal cells share a row, column, or symbol."""

    def __init__(self, first: "Cell", second: "Cell"):
        self.first = first
        self.second = second
        super().__init__(
            f"{type(self).__name__}: cells {tuple(first)} and {tuple(second)}"
        )


class RowClash(ClashError):
    pass


class ColClash(ClashError):
    pass


class SymbolClash(ClashError):
    pass


class ParseError(SquareError):
    def __init__(self, line: int, reason: str):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")


class Cell(NamedTuple):
    row: int
    col: int


@dataclass(frozen=True, eq=False)
class EquiNSquare:
    """A validated n x n grid where each symbol in [0, n) appears n times.

    The grid array is read-only; instances are safe to share across threads.
    Construct via :func:`validate_square`.
    """

    n: int
    grid: np.ndarray

    def __post_init__(self):
        self.grid.setflags(write=False)

    def symbol(self, cell: Cell) -> int:
        return int(self.grid[cell[0], cell[1]])

    def __eq__(self, other) -> bool:
        if not isinstance(other, EquiNSquare):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.grid, other.grid)

    def __hash__(self):
        return hash((self.n, self.grid.tobytes()))


@dataclass(frozen=True)
class Transversal:
    """Cells with pairwise distinct rows, columns, and symbols.

    Cells are stored sorted by row so equal transversals compare equal.
    Construct via :func:`validate_transversal`.
    """

    cells: tuple[Cell, ...]

    @property
    def size(self) -> int:
        return len(self.cells)

    def __len__(self) -> int:
        return len(self.cells)

    def __iter__(self):
        return iter(self.cells)


def validate_square(n: int, grid) -> EquiNSquare:
    """Check dimensions, symbol range, and per-symbol counts; return the square."""
    arr = np.asarray(grid, dtype=np.int64)
    if n < 1:
        raise DimensionMismatch(f"n must be positive, got {n}")
    if arr.shape != (n, n):
        raise DimensionMismatch(f"grid shape {arr.shape}, expected ({n}, {n})")
    bad = (arr < 0) | (arr >= n)
    if bad.any():
        r, c = np.argwhere(bad)[0]
        raise SymbolOutOfRange(int(arr[r, c]), Cell(int(r), int(c)))
    counts = np.bincount(arr.ravel(), minlength=n)
    off = np.nonzero(counts != n)[0]
    if off.size:
        s = int(off[0])
        raise CountViolation(s, int(counts[s]))
    return EquiNSquare(n=n, grid=arr)


def validate_transversal(square: EquiNSquare, cells: Iterable[tuple[int, int]]) -> Transversal:
    """Check that no two cells share a row, column, or symbol."""
    n = square.n
    normed = []
    for rc in cells:
        cell = Cell(int(rc[0]), int(rc[1]))
        if not (0 <= cell.row < n and 0 <= cell.col < n):
            raise CellOutOfRange(f"cell {tuple(cell)} outside [0, {n})^2")
        normed.append(cell)
    normed.sort()
    seen_row: dict[int, Cell] = {}
    seen_col: dict[int, Cell] = {}
    seen_sym: dict[int, Cell] = {}
    for cell in normed:
        if cell.row in seen_row:
            raise RowClash(seen_row[cell.row], cell)
        if cell.col in seen_col:
            raise ColClash(seen_col[cell.col], cell)
        s = square.symbol(cell)
        if s in seen_sym:
            raise SymbolClash(seen_sym[s], cell)
        seen_row[cell.row] = cell
        seen_col[cell.col] = cell
        seen_sym[s] = cell
    return Transversal(cells=tuple(normed))


def write_square(square: EquiNSquare, path) -> None:
    """Write the text format: first line n, then n lines of n symbol ids."""
    lines = [str(square.n)]
    for row in square.grid:
        lines.append(" ".join(str(int(x)) for x in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_square(path) -> EquiNSquare:
    """Parse and validate a square file written by :func:`write_square`."""
    text = Path(path).read_text(encoding="utf-8")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise ParseError(1, "empty file")
    try:
        n = int(lines[0])
    except ValueError:
        raise ParseError(1, f"expected integer order, got {lines[0]!r}") from None
    if n < 1:
        raise ParseError(1, f"order must be positive, got {n}")
    if len(lines) != n + 1:
        raise ParseError(len(lines) + 1, f"expected {n} grid rows, found {len(lines) - 1}")
    grid = []
    for i, line in enumerate(lines[1:], start=2):
        parts = line.split()
        if len(parts) != n:
            raise ParseError(i, f"expected {n} entries")
        try:
            grid.append([int(p) for p in parts])
        except ValueError:
            raise ParseError(i, "non-integer entry") from None
    try:
        return validate_square(n, grid)
    except SquareError as exc:
        raise ParseError(2, f"invalid square: {exc}") from exc


def write_transversal(transversal: Transversal, path) -> None:
    """Write one 'row col' line per cell, sorted by row."""
    lines = [f"{c.row} {c.col}" for c in transversal.cells]
    Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")


def read_transversal(path) -> list[Cell]:
    """Read 'row col' lines; validation against a square is the caller's job."""
    cells = []
    for i, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(i, "expected 2 entries")
        try:
            cells.append(Cell(int(parts[0]), int(parts[1])))
        except ValueError:
            raise ParseError(i, "non-integer entry") from None
    return cells
