"""Square generators: the paired-box adversarial family (whose transversals
must miss many symbols), random equi-n-squares, block-structured squares for
the random-matching pipeline, and cyclic Latin squares; plus the
missing-colour certificate that audits the adversarial bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .squares import EquiNSquare, Transversal, validate_square, validate_transversal


class TooSmall(ValueError):
    def __init__(self, n: int, reason: str = ""):
        self.n = n
        super().__init__(f"no paired-box construction for n={n}" + (f": {reason}" if reason else ""))


class NotDivisible(ValueError):
    def __init__(self, n: int, m: int):
        self.n = n
        self.m = m
        super().__init__(f"block size {m} does not divide n={n}")


class CertificateViolation(AssertionError):
    """A transversal used every colour of some paired band group.

    This contradicts a proven property of the construction, so it flags an
    implementation bug rather than bad input.
    """

    def __init__(self, k: int):
        self.k = k
        super().__init__(f"band group {k} has no missing colour")


class PairingMismatch(ValueError):
    pass


def box_parameters(n: int) -> tuple[int, int, int, int]:
    """Box side lengths (m, r, a, b) for order n.

    m = ceil(sqrt(n/2)), r = ceil(sqrt(m^2 - n/2)), a = m + r, b = m - r.
    Boxes are b rows tall and a columns wide; 2ab <= n always holds, but
    b >= 1 fails for n = 9, the one order where this family degenerates.
    """
    if n < 8:
        raise TooSmall(n)
    # Integer arithmetic: smallest m with 2m^2 >= n, then smallest r with
    # 2r^2 >= 2m^2 - n.
    m = math.isqrt((n + 1) // 2)
    if 2 * m * m < n:
        m += 1
    q = 2 * m * m - n
    r = math.isqrt((q + 1) // 2)
    while 2 * r * r < q:
        r += 1
    a, b = m + r, m - r
    if b < 1:
        raise TooSmall(n, f"box height b = m - r = {b}")
    return m, r, a, b


@dataclass(frozen=True)
class BoxPairing:
    """The box pairing and leftover fill behind an adversarial square.

    Box (i, j) spans rows [i*b, (i+1)*b) and columns [j*a, (j+1)*a) for
    i in [0, 2a), j in [0, 2b).  `pairs` lists ((box, box), colour) with
    distinct colours; leftover_fill colours the cells outside the boxed
    top-left 2ab x 2ab subsquare so every colour reaches n uses.
    """

    n: int
    m: int
    r: int
    a: int
    b: int
    pairs: tuple[tuple[tuple[int, int], tuple[int, int], int], ...]
    leftover_fill: tuple[tuple[int, int, int], ...]  # (row, col, colour)

    @property
    def boxed_extent(self) -> int:
        return 2 * self.a * self.b

    def box_colours(self) -> dict[tuple[int, int], int]:
        out = {}
        for box1, box2, colour in self.pairs:
            out[box1] = colour
            out[box2] = colour
        return out

    def transversal_bound(self) -> int:
        """Largest transversal size the missing-colour argument allows."""
        return self.n - math.ceil(self.b / 2) + 2 * (self.n - self.boxed_extent)

    def to_json(self) -> dict:
        return {
            "format": 1,
            "n": self.n,
            "m": self.m,
            "r": self.r,
            "a": self.a,
            "b": self.b,
            "pairs": [
                {"boxes": [list(b1), list(b2)], "colour": c} for b1, b2, c in self.pairs
            ],
            "leftover_fill": [list(t) for t in self.leftover_fill],
        }

    @classmethod
    def from_json(cls, data: dict) -> "BoxPairing":
        if data.get("format") != 1:
            raise PairingMismatch(f"unsupported pairing format {data.get('format')!r}")
        pairs = tuple(
            (tuple(p["boxes"][0]), tuple(p["boxes"][1]), int(p["colour"]))
            for p in data["pairs"]
        )
        fill = tuple(tuple(int(x) for x in t) for t in data["leftover_fill"])
        return cls(n=int(data["n"]), m=int(data["m"]), r=int(data["r"]),
                   a=int(data["a"]), b=int(data["b"]), pairs=pairs, leftover_fill=fill)


def _make_pairs(a: int, b: int) -> list[tuple[tuple[int, int], tuple[int, int]]]:
    pairs = []
    for k in range(b):  # diagonal pairs
        pairs.append(((2 * k, 2 * k), (2 * k + 1, 2 * k + 1)))
    for i in range(2 * b):  # symmetric off-diagonal pairs
        for j in range(i + 1, 2 * b):
            pairs.append(((i, j), (j, i)))
    for s in range(b, a):  # stacked pairs below the square part
        for t in range(2 * b):
            pairs.append(((2 * s, t), (2 * s + 1, t)))
    return pairs


def counterexample_square(n: int) -> tuple[EquiNSquare, BoxPairing]:
    """Equi-n-square whose transversals miss at least ceil(b/2) colours.

    The top-left 2ab x 2ab region is tiled by 4ab boxes, paired off so each
    of 2ab colours fills one pair; the remaining cells are filled row-major
    from a deficit queue so that every colour is used exactly n times.
    """
    m, r, a, b = box_parameters(n)
    two_ab = 2 * a * b
    pair_list = _make_pairs(a, b)
    assert len(pair_list) == two_ab

    grid = np.full((n, n), -1, dtype=np.int64)
    pairs = []
    for colour, (box1, box2) in enumerate(pair_list):
        for (i, j) in (box1, box2):
            grid[i * b:(i + 1) * b, j * a:(j + 1) * a] = colour
        pairs.append((box1, box2, colour))

    deficit = n - two_ab
    queue = []
    for colour in range(two_ab):
        queue.extend([colour] * deficit)
    for colour in range(two_ab, n):
        queue.extend([colour] * n)

    fill = []
    pos = 0
    for x in range(n):
        for y in range(n):
            if x < two_ab and y < two_ab:
                continue
            grid[x, y] = queue[pos]
            fill.append((x, y, queue[pos]))
            pos += 1
    assert pos == len(queue)

    square = validate_square(n, grid)
    pairing = BoxPairing(n=n, m=m, r=r, a=a, b=b,
                         pairs=tuple(pairs), leftover_fill=tuple(fill))
    return square, pairing


@dataclass(frozen=True)
class CertificateReport:
    """Missing-colour audit of a transversal on an adversarial square."""

    missing: tuple[frozenset, ...]  # per band group k, colours absent from T'
    bound: int
    transversal_size: int

    @property
    def passed(self) -> bool:
        return all(self.missing) and self.transversal_size <= self.bound


def missing_colour_certificate(
    square: EquiNSquare, pairing: BoxPairing, transversal: Transversal
) -> CertificateReport:
    """For each band group, report the group colours the transversal misses.

    Band group k consists of the boxes in row bands 2k, 2k+1 and column
    bands 2k, 2k+1.  Each group must miss at least one colour inside the
    boxed subsquare; an empty missing set raises CertificateViolation.
    """
    if pairing.n != square.n:
        raise PairingMismatch(f"pairing order {pairing.n} != square order {square.n}")
    validate_transversal(square, transversal.cells)

    a, b = pairing.a, pairing.b
    extent = pairing.boxed_extent
    box_colour = pairing.box_colours()

    used = {
        square.symbol(c) for c in transversal.cells
        if c.row < extent and c.col < extent
    }

    missing = []
    for k in range(b):
        group = set()
        for band in (2 * k, 2 * k + 1):
            for i in range(2 * a):
                group.add(box_colour[(i, band)])
            for j in range(2 * b):
                group.add(box_colour[(band, j)])
        absent = frozenset(group - used)
        if not absent:
            raise CertificateViolation(k)
        missing.append(absent)

    return CertificateReport(
        missing=tuple(missing),
        bound=pairing.transversal_bound(),
        transversal_size=transversal.size,
    )


def random_equi_square(n: int, seed) -> EquiNSquare:
    """Uniformly shuffled multiset of n copies of each symbol, row-major."""
    rng = np.random.default_rng(seed)
    symbols = np.repeat(np.arange(n, dtype=np.int64), n)
    rng.shuffle(symbols)
    return validate_square(n, symbols.reshape(n, n))


@dataclass(frozen=True)
class Block:
    """m cells of one column, all holding one symbol."""

    col: int
    symbol: int
    rows: tuple[int, ...]


@dataclass(frozen=True)
class BlockStructure:
    """Partition of a square's cells into single-column monochrome blocks."""

    m: int
    blocks: tuple[Block, ...]

    def to_json(self) -> dict:
        return {
            "format": 1,
            "m": self.m,
            "blocks": [
                {"col": blk.col, "symbol": blk.symbol, "rows": list(blk.rows)}
                for blk in self.blocks
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "BlockStructure":
        if data.get("format") != 1:
            raise ValueError(f"unsupported blocks format {data.get('format')!r}")
        blocks = tuple(
            Block(col=int(d["col"]), symbol=int(d["symbol"]),
                  rows=tuple(int(x) for x in d["rows"]))
            for d in data["blocks"]
        )
        return cls(m=int(data["m"]), blocks=blocks)


class BlockMismatch(ValueError):
    pass


def validate_block_structure(square: EquiNSquare, blocks: BlockStructure) -> None:
    """Check blocks are size m, monochrome, single-column, and tile the square."""
    n = square.n
    m = blocks.m
    if m < 1 or n * n != m * len(blocks.blocks):
        raise BlockMismatch(f"{len(blocks.blocks)} blocks of size {m} cannot tile n={n}")
    for blk in blocks.blocks:
        if len(blk.rows) != m:
            raise BlockMismatch(f"block {blk} has {len(blk.rows)} cells, expected {m}")
    rows = np.array([blk.rows for blk in blocks.blocks], dtype=np.int64)
    cols = np.array([blk.col for blk in blocks.blocks], dtype=np.int64)
    syms = np.array([blk.symbol for blk in blocks.blocks], dtype=np.int64)
    if rows.min() < 0 or rows.max() >= n or cols.min() < 0 or cols.max() >= n:
        raise BlockMismatch("block cell out of range")
    if not (square.grid[rows, cols[:, None]] == syms[:, None]).all():
        mism = (square.grid[rows, cols[:, None]] != syms[:, None]).any(axis=1)
        bad = int(np.nonzero(mism)[0][0])
        raise BlockMismatch(f"block {blocks.blocks[bad]} does not match the grid symbols")
    flat = (rows + n * cols[:, None]).ravel()
    if not (np.bincount(flat, minlength=n * n) == 1).all():
        raise BlockMismatch("blocks do not partition the cells")


def block_structured_square(n: int, m: int, seed) -> tuple[EquiNSquare, BlockStructure]:
    """Square built from k = n/m random column-symbol perfect matchings.

    Each matching round assigns every column one symbol; the round's block
    in that column takes m of the column's rows, chosen by a random
    partition of the rows into the k blocks.
    """
    if n % m != 0:
        raise NotDivisible(n, m)
    k = n // m
    rng = np.random.default_rng(seed)
    perms = rng.random((k, n)).argsort(axis=1)  # round t: column j -> symbol
    row_orders = rng.random((n, n)).argsort(axis=1)  # per column, row shuffle
    slot = np.repeat(np.arange(k), m)
    block_of_row = np.empty((n, n), dtype=np.int64)  # (row, col) -> round
    for j in range(n):
        block_of_row[row_orders[j], j] = slot
    grid = np.take_along_axis(perms, block_of_row, axis=0)
    blocks = []
    for j in range(n):
        order = row_orders[j]
        for t in range(k):
            rows = np.sort(order[t * m:(t + 1) * m])
            blocks.append(Block(col=j, symbol=int(perms[t, j]),
                                rows=tuple(rows.tolist())))
    square = validate_square(n, grid)
    structure = BlockStructure(m=m, blocks=tuple(blocks))
    validate_block_structure(square, structure)
    return square, structure


def cyclic_latin(n: int) -> EquiNSquare:
    """grid[i][j] = (i + j) mod n; every Latin square is an equi-n-square."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    idx = np.arange(n)
    grid = (idx[:, None] + idx[None, :]) % n
    return validate_square(n, grid)
