"""Structure-free transversal solvers: exhaustive oracle, branch-and-bound
exact search, randomized greedy, local-search improvement, and repeated
extraction of disjoint transversals.
"""

from __future__ import annotations

import numpy as np

from .squares import Cell, EquiNSquare, Transversal, validate_transversal


class TooLarge(ValueError):
    def __init__(self, n: int, limit: int):
        self.n = n
        super().__init__(f"n={n} exceeds the exhaustive-search limit {limit}")


_BRUTE_LIMIT = 7


def brute_force_max(square: EquiNSquare) -> tuple[int, Transversal]:
    """Exhaustive maximum over all partial transversals; n <= 7 enforced.

    Plain depth-first enumeration in row order with no pruning beyond
    feasibility, kept independent of exact_max so the two can cross-check.
    """
    n = square.n
    if n > _BRUTE_LIMIT:
        raise TooLarge(n, _BRUTE_LIMIT)
    grid = [[int(x) for x in row] for row in square.grid]
    best_cells: list[Cell] = []
    chosen: list[Cell] = []

    def rec(row: int, used_cols: int, used_syms: int):
        nonlocal best_cells
        if len(chosen) > len(best_cells):
            best_cells = list(chosen)
        if row == n:
            return
        rec(row + 1, used_cols, used_syms)  # skip this row
        for col in range(n):
            if used_cols >> col & 1:
                continue
            s = grid[row][col]
            if used_syms >> s & 1:
                continue
            chosen.append(Cell(row, col))
            rec(row + 1, used_cols | 1 << col, used_syms | 1 << s)
            chosen.pop()

    rec(0, 0, 0)
    t = validate_transversal(square, best_cells)
    return t.size, t


def _greedy_rowmajor(grid: list[list[int]], n: int) -> list[Cell]:
    cells = []
    used_cols = used_syms = 0
    for i in range(n):
        for j in range(n):
            if used_cols >> j & 1:
                continue
            s = grid[i][j]
            if used_syms >> s & 1:
                continue
            cells.append(Cell(i, j))
            used_cols |= 1 << j
            used_syms |= 1 << s
            break
    return cells


def _matching_upper_bound(avail: dict[int, int], n: int) -> int:
    """Maximum matching of rows to columns given per-row column masks (Kuhn)."""
    return _matching_size(list(avail.items()), None)


def _matching_exceeds(rows_masks: list[tuple[int, int]], limit: int) -> bool:
    """True iff the row-column matching has size > limit (early exit)."""
    return _matching_size(rows_masks, limit) > limit


def _matching_size(rows_masks: list[tuple[int, int]], stop_above: int | None) -> int:
    """Kuhn's matching size; returns early once the size exceeds stop_above."""
    match_col: dict[int, int] = {}  # col -> row
    pending = None
    size = 0
    taken = 0
    for r, mask in rows_masks:  # cheap greedy pass first
        free = mask & ~taken
        if free:
            j = (free & -free).bit_length() - 1
            match_col[j] = r
            taken |= 1 << j
            size += 1
            if stop_above is not None and size > stop_above:
                return size
        elif pending is None:
            pending = [r]
        else:
            pending.append(r)
    if not pending:
        return size
    row_mask = dict(rows_masks)

    def augment(r: int, visited: int) -> tuple[bool, int]:
        mask = row_mask[r] & ~visited
        while mask:
            j = (mask & -mask).bit_length() - 1
            mask &= mask - 1
            visited |= 1 << j
            if j not in match_col:
                match_col[j] = r
                return True, visited
            ok, visited = augment(match_col[j], visited)
            if ok:
                match_col[j] = r
                return True, visited
        return False, visited

    for r in pending:
        ok, _ = augment(r, 0)
        if ok:
            size += 1
            if stop_above is not None and size > stop_above:
                return size
    return size


def exact_max(
    square: EquiNSquare, node_budget: int | None = None
) -> tuple[Transversal, bool]:
    """Branch-and-bound maximum transversal.

    Depth-first over rows in most-constrained order, tracking free columns
    and symbols as bitmasks.  Prunes on rows-remaining, free-column, and
    free-symbol counts, and on a row-column matching relaxation (symbol
    feasibility per cell, injectivity ignored) when those bounds come
    close.  Identical rows and columns are interchangeable, so only the
    first free column of each duplicate group is branched, and skipping a
    row force-skips its identical later twins.  The budget counts search
    nodes, so runs are deterministic; if it is exhausted the incumbent is
    returned with optimal=False.
    """
    n = square.n
    grid = [[int(x) for x in row] for row in square.grid]
    # Columns of each row holding a given symbol, as masks.
    sym_cols = [dict() for _ in range(n)]
    for i in range(n):
        for j in range(n):
            s = grid[i][j]
            sym_cols[i][s] = sym_cols[i].get(s, 0) | 1 << j

    # Interchangeability: identical columns (resp. rows) can be swapped in
    # any transversal, so canonical solutions use the first free duplicate.
    col_vectors: dict[tuple, list[int]] = {}
    for j in range(n):
        col_vectors.setdefault(tuple(grid[i][j] for i in range(n)), []).append(j)
    ident_smaller_cols = [0] * n
    for group in col_vectors.values():
        seen = 0
        for j in group:
            ident_smaller_cols[j] = seen
            seen |= 1 << j
    row_vectors: dict[tuple, list[int]] = {}
    for i in range(n):
        row_vectors.setdefault(tuple(grid[i]), []).append(i)
    ident_larger_rows = [0] * n
    for group in row_vectors.values():
        for pos, r in enumerate(group):
            mask = 0
            for r2 in group[pos + 1:]:
                mask |= 1 << r2
            ident_larger_rows[r] = mask

    best_cells = _greedy_rowmajor(grid, n)
    best = len(best_cells)
    full = (1 << n) - 1

    nodes = 0
    out_of_budget = False

    def search(rows_left: list[int], avail: dict[int, int], sym_avail: dict[int, int],
               free_cols: int, free_syms: int, chosen: list[Cell]):
        nonlocal best, best_cells, nodes, out_of_budget
        if out_of_budget:
            return
        nodes += 1
        if node_budget is not None and nodes > node_budget:
            out_of_budget = True
            return
        size = len(chosen)
        if size > best:
            best = size
            best_cells = list(chosen)
        live = [r for r in rows_left if avail[r]]
        if not live:
            return
        gap = best - size
        if len(live) <= gap:
            return
        union_cols = 0
        union_syms = 0
        for r in live:
            union_cols |= avail[r]
            union_syms |= sym_avail[r]
        if min(union_cols.bit_count(), union_syms.bit_count()) <= gap:
            return
        if not _matching_exceeds([(r, avail[r]) for r in live], gap):
            return
        if not _matching_exceeds([(r, sym_avail[r]) for r in live], gap):
            return
        cnt, row = min((avail[r].bit_count(), r) for r in live)
        mask = avail[row]
        rest = [r for r in live if r != row]
        while mask:
            j = (mask & -mask).bit_length() - 1
            mask &= mask - 1
            if free_cols & ident_smaller_cols[j]:
                continue  # an interchangeable earlier column is still free
            s = grid[row][j]
            sbit = 1 << s
            avail2 = {}
            sym_avail2 = {}
            for r in rest:
                a = avail[r] & ~(1 << j | sym_cols[r].get(s, 0))
                avail2[r] = a
                sa = sym_avail[r] & ~sbit
                t = grid[r][j]
                if t != s and sa >> t & 1 and not a & sym_cols[r][t]:
                    sa &= ~(1 << t)
                sym_avail2[r] = sa
            chosen.append(Cell(row, j))
            search(rest, avail2, sym_avail2, free_cols & ~(1 << j),
                   free_syms & ~sbit, chosen)
            chosen.pop()
            if out_of_budget:
                return
        # Skip branch: identical later rows are interchangeable with this
        # one, so a canonical solution skips them too.
        twins = ident_larger_rows[row]
        rest2 = [r for r in rest if not twins >> r & 1] if twins else rest
        search(rest2, avail, sym_avail, free_cols, free_syms, chosen)

    init_sym = {r: 0 for r in range(n)}
    for r in range(n):
        for s in sym_cols[r]:
            init_sym[r] |= 1 << s
    search(list(range(n)), {r: full for r in range(n)}, init_sym, full, full, [])
    t = validate_transversal(square, best_cells)
    return t, not out_of_budget


def _masked_greedy(
    grid: np.ndarray, n: int, allowed: np.ndarray, rng: np.random.Generator
) -> list[Cell]:
    order = rng.permutation(n * n)
    used_row = np.zeros(n, dtype=bool)
    used_col = np.zeros(n, dtype=bool)
    used_sym = np.zeros(n, dtype=bool)
    cells = []
    for idx in order:
        i, j = divmod(int(idx), n)
        if not allowed[i, j] or used_row[i] or used_col[j]:
            continue
        s = grid[i, j]
        if used_sym[s]:
            continue
        cells.append(Cell(i, j))
        used_row[i] = used_col[j] = used_sym[s] = True
    return cells


def random_greedy(square: EquiNSquare, rng: np.random.Generator) -> Transversal:
    """Scan the cells in random order, keeping every cell that still fits.

    The result is maximal but usually not maximum; on random squares its
    expected size is about (1 - 1/e) n.
    """
    allowed = np.ones((square.n, square.n), dtype=bool)
    cells = _masked_greedy(square.grid, square.n, allowed, rng)
    return validate_transversal(square, cells)


def _masked_local_search(
    grid: np.ndarray,
    n: int,
    allowed: np.ndarray,
    start: list[Cell],
    rng: np.random.Generator,
    iterations: int,
) -> list[Cell]:
    by_symbol: dict[int, list[tuple[int, int]]] = {}
    for i in range(n):
        for j in range(n):
            if allowed[i, j]:
                by_symbol.setdefault(int(grid[i, j]), []).append((i, j))

    owner_row: list = [None] * n
    owner_col: list = [None] * n
    owner_sym: list = [None] * n

    def insert(cell: Cell):
        s = int(grid[cell.row, cell.col])
        owner_row[cell.row] = cell
        owner_col[cell.col] = cell
        owner_sym[s] = cell

    def remove(cell: Cell):
        s = int(grid[cell.row, cell.col])
        owner_row[cell.row] = None
        owner_col[cell.col] = None
        owner_sym[s] = None

    def admissible(i: int, j: int) -> bool:
        return (
            allowed[i, j]
            and owner_row[i] is None
            and owner_col[j] is None
            and owner_sym[int(grid[i, j])] is None
        )

    for cell in start:
        insert(cell)
    size = len(start)

    for _ in range(iterations):
        idx = int(rng.integers(0, n * n))
        i, j = divmod(idx, n)
        if not allowed[i, j]:
            continue
        s = int(grid[i, j])
        conflicts = {c for c in (owner_row[i], owner_col[j], owner_sym[s]) if c is not None}
        if not conflicts:
            insert(Cell(i, j))
            size += 1
            continue
        if len(conflicts) > 1:
            continue
        victim = conflicts.pop()
        if victim == Cell(i, j):
            continue
        remove(victim)
        insert(Cell(i, j))
        # Try to refill from the resources the swap freed.
        vs = int(grid[victim.row, victim.col])
        gained = False
        if victim.row != i and owner_row[victim.row] is None:
            for jj in range(n):
                if admissible(victim.row, jj):
                    insert(Cell(victim.row, jj))
                    gained = True
                    break
        if not gained and victim.col != j and owner_col[victim.col] is None:
            for ii in range(n):
                if admissible(ii, victim.col):
                    insert(Cell(ii, victim.col))
                    gained = True
                    break
        if not gained and vs != s and owner_sym[vs] is None:
            for (ii, jj) in by_symbol.get(vs, ()):
                if admissible(ii, jj):
                    insert(Cell(ii, jj))
                    gained = True
                    break
        if gained:
            size += 1

    return [c for c in owner_row if c is not None]


def local_search(
    square: EquiNSquare,
    transversal: Transversal,
    rng: np.random.Generator,
    iterations: int,
) -> Transversal:
    """Improve a transversal with one-out, up-to-two-in random swaps.

    The size never decreases: each accepted move removes at most one cell
    and inserts at least one.
    """
    validate_transversal(square, transversal.cells)
    allowed = np.ones((square.n, square.n), dtype=bool)
    cells = _masked_local_search(
        square.grid, square.n, allowed, list(transversal.cells), rng, iterations
    )
    out = validate_transversal(square, cells)
    assert out.size >= transversal.size
    return out


def peel_decomposition(
    square: EquiNSquare,
    rng: np.random.Generator,
    min_size: int,
    layer_attempts: int = 8,
    search_iterations: int | None = None,
) -> list[Transversal]:
    """Repeatedly extract disjoint transversals of size >= min_size.

    Each layer is found by randomized greedy plus local search restricted
    to cells unused by earlier layers; extraction stops once
    `layer_attempts` consecutive tries fail to reach min_size.
    """
    n = square.n
    if min_size > n:
        raise ValueError(f"min_size {min_size} exceeds n={n}")
    if search_iterations is None:
        search_iterations = 40 * n
    allowed = np.ones((n, n), dtype=bool)
    layers: list[Transversal] = []
    while True:
        found = None
        for _ in range(layer_attempts):
            start = _masked_greedy(square.grid, n, allowed, rng)
            cells = _masked_local_search(
                square.grid, n, allowed, start, rng, search_iterations
            )
            if len(cells) >= min_size:
                found = cells
                break
        if found is None:
            break
        layer = validate_transversal(square, found)
        layers.append(layer)
        for c in layer.cells:
            allowed[c.row, c.col] = False
    return layers
