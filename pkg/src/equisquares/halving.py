"""Randomized matching selection with bounded dependence.

Two matchings are merged by breaking their union into paths/cycles of at
most s edges (deleting a few edges) and flipping one fair coin per piece to
keep that piece's edges from one matching or the other.  Iterating over
2^levels matchings yields a single matching in which any surviving edge was
kept with probability exactly 2^-levels, while edges in different pieces
stay independent.  Applied to the column-symbol block multigraph of a
block-structured square, the surviving matching induces a bipartite
row-column graph whose maximum matching is a transversal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import bipartite
from .bipartite import BipartiteMultigraph, CapResult, cap_components, union_components
from .constructions import BlockMismatch, BlockStructure, validate_block_structure
from .squares import Cell, EquiNSquare, Transversal, validate_transversal


class NotPowerOfTwo(ValueError):
    pass


class BadLevel(ValueError):
    pass


class InvalidParam(ValueError):
    pass


def default_cap(n: int) -> int:
    """Component cap n^(1/3) / ln(n)^2 (natural log), floored and clamped to >= 4."""
    if n < 2:
        return 4
    return max(4, math.floor(n ** (1 / 3) / math.log(n) ** 2))


@dataclass(frozen=True)
class PairTrace:
    """One halving step: inputs, capping, coin flips, and the output."""

    matching_a: frozenset
    matching_b: frozenset
    cap: CapResult
    flips: tuple[int, ...]  # one per component of cap.decomposition
    output: frozenset

    def to_json(self) -> dict:
        return {
            "a": sorted(self.matching_a),
            "b": sorted(self.matching_b),
            "cap": self.cap.to_json(),
            "flips": list(self.flips),
            "output": sorted(self.output),
        }


@dataclass(frozen=True)
class HalvingTrace:
    """Full record of an iterated halving run; immutable once returned."""

    initial_matchings: tuple[frozenset, ...]
    levels: tuple[tuple[PairTrace, ...], ...]
    final: frozenset
    rng_seed: int | None = None

    def to_json(self) -> dict:
        return {
            "format": 1,
            "rng_seed": self.rng_seed,
            "initial_matchings": [sorted(m) for m in self.initial_matchings],
            "levels": [[p.to_json() for p in level] for level in self.levels],
            "final": sorted(self.final),
        }


@dataclass(frozen=True)
class RowLoads:
    """Per-row count of selected blocks containing a cell in that row."""

    loads: np.ndarray

    def __post_init__(self):
        self.loads.setflags(write=False)

    def to_csv(self, path) -> None:
        lines = ["row_index,load"]
        lines += [f"{i},{int(v)}" for i, v in enumerate(self.loads)]
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("".join(line + "\n" for line in lines))


def alternate_halve(
    graph: BipartiteMultigraph, m_a, m_b, s: int, rng: np.random.Generator
) -> tuple[frozenset, PairTrace]:
    """Select one alternating class per capped component of m_a union m_b.

    Flip 1 keeps the component's m_b edges, flip 0 its m_a edges, so every
    edge that survives the capping is kept with probability exactly 1/2.
    Components are processed in minimum-label order, so a seed fully
    determines the result.
    """
    if s < 1:
        raise InvalidParam(f"cap must be >= 1, got {s}")
    m_a = frozenset(m_a)
    m_b = frozenset(m_b)
    decomp = union_components(graph, m_a, m_b)
    cap = cap_components(decomp, s)
    flips = []
    kept: set = set()
    for comp in cap.decomposition.components:
        flip = int(rng.integers(0, 2))
        flips.append(flip)
        side = m_b if flip else m_a
        kept.update(lab for lab in comp.labels if lab in side)
    out = frozenset(kept)
    assert bipartite.is_matching(graph, out)
    trace = PairTrace(matching_a=m_a, matching_b=m_b, cap=cap,
                      flips=tuple(flips), output=out)
    return out, trace


def iterated_halving(
    graph: BipartiteMultigraph,
    matchings,
    s: int,
    rng: np.random.Generator,
    rng_seed: int | None = None,
) -> tuple[frozenset, HalvingTrace]:
    """Halve 2^levels matchings down to one, recording a full trace.

    Pairs are taken in order (0,1), (2,3), ...; an edge never deleted by
    capping survives to the final matching with probability 2^-levels.
    """
    matchings = [frozenset(m) for m in matchings]
    count = len(matchings)
    if count == 0 or count & (count - 1):
        raise NotPowerOfTwo(f"need a power of two matchings, got {count}")
    levels = []
    current = matchings
    while len(current) > 1:
        nxt = []
        traces = []
        for i in range(0, len(current), 2):
            out, trace = alternate_halve(graph, current[i], current[i + 1], s, rng)
            nxt.append(out)
            traces.append(trace)
        levels.append(tuple(traces))
        current = nxt
    trace = HalvingTrace(
        initial_matchings=tuple(matchings),
        levels=tuple(levels),
        final=current[0],
        rng_seed=rng_seed,
    )
    return current[0], trace


def build_block_multigraph(square: EquiNSquare, blocks: BlockStructure) -> BipartiteMultigraph:
    """Column-symbol multigraph with one edge per block, labelled by block index."""
    edges = tuple(
        (blk.col, blk.symbol, idx) for idx, blk in enumerate(blocks.blocks)
    )
    return BipartiteMultigraph(square.n, square.n, edges)


def block_transversal(
    square: EquiNSquare,
    blocks: BlockStructure,
    s: int,
    rng: np.random.Generator,
    rng_seed: int | None = None,
) -> tuple[Transversal, HalvingTrace, RowLoads]:
    """Transversal via a bounded-dependence random matching of blocks.

    Decomposes the k-regular block multigraph into k matchings (k = n/m, a
    power of two), halves them down to one matching M, then matches rows to
    the columns whose selected block covers them.  Distinct columns carry
    distinct symbols because M is a matching, so the result is a valid
    transversal.
    """
    n = square.n
    validate_block_structure(square, blocks)
    if n % blocks.m:
        raise BlockMismatch(f"block size {blocks.m} does not divide {n}")
    k = n // blocks.m
    if k & (k - 1):
        raise NotPowerOfTwo(f"k = n/m = {k} must be a power of two")

    graph = build_block_multigraph(square, blocks)
    matchings = bipartite.decompose_regular(graph, k)
    selected, trace = iterated_halving(graph, matchings, s, rng, rng_seed=rng_seed)

    # Bipartite row-column graph: edge (i, j) iff column j's selected block
    # covers row i.  A matching here is a transversal of the square.
    sel = sorted(selected)
    if sel:
        rows = np.concatenate([np.asarray(blocks.blocks[lab].rows) for lab in sel])
        cols = np.concatenate(
            [np.full(blocks.m, blocks.blocks[lab].col) for lab in sel]
        )
        pairs = bipartite.matching_pairs_from_arrays(rows, cols, n, n)
    else:
        pairs = []
    cells = [Cell(i, j) for i, j in pairs]
    transversal = validate_transversal(square, cells)
    loads = row_loads(trace, blocks, "final", n_rows=n)
    return transversal, trace, loads


def _loads_for_matching(blocks: BlockStructure, matching, n_rows: int) -> RowLoads:
    rows = [r for lab in matching for r in blocks.blocks[lab].rows]
    loads = np.bincount(np.asarray(rows, dtype=np.int64), minlength=n_rows) \
        if rows else np.zeros(n_rows, dtype=np.int64)
    return RowLoads(loads=loads)


def row_loads(
    trace: HalvingTrace, blocks: BlockStructure, selector, n_rows: int | None = None
) -> RowLoads:
    """Row loads of one matching in the trace.

    selector: "final", ("initial", j), or ("level", h, i) with h counted
    from 1 as in the trace levels.
    """
    if n_rows is None:
        n_rows = math.isqrt(blocks.m * len(blocks.blocks))
    if selector == "final":
        return _loads_for_matching(blocks, trace.final, n_rows)
    if isinstance(selector, tuple) and len(selector) == 2 and selector[0] == "initial":
        j = selector[1]
        if not 0 <= j < len(trace.initial_matchings):
            raise BadLevel(f"no initial matching {j}")
        return _loads_for_matching(blocks, trace.initial_matchings[j], n_rows)
    if isinstance(selector, tuple) and len(selector) == 3 and selector[0] == "level":
        h, i = selector[1], selector[2]
        if not 1 <= h <= len(trace.levels):
            raise BadLevel(f"no level {h}")
        level = trace.levels[h - 1]
        if not 0 <= i < len(level):
            raise BadLevel(f"no pair {i} at level {h}")
        return _loads_for_matching(blocks, level[i].output, n_rows)
    raise BadLevel(f"bad selector {selector!r}")


def mcdiarmid_bound(c, t: float) -> float:
    """Two-sided bounded-differences tail bound 2 exp(-t^2 / sum c_i^2).

    c lists the worst-case effect of each independent coordinate; the
    result is clamped to 1.
    """
    arr = np.asarray(c, dtype=np.float64)
    if arr.size == 0 or (arr < 0).any():
        raise InvalidParam("c must be nonnegative and nonempty")
    if not t > 0:
        raise InvalidParam(f"t must be positive, got {t}")
    denom = float((arr * arr).sum())
    if denom <= 0:
        raise InvalidParam("sum of squared effects must be positive")
    return min(1.0, 2.0 * math.exp(-(t * t) / denom))


def realized_effect_vector(
    trace: HalvingTrace, blocks: BlockStructure, row: int
) -> np.ndarray:
    """Per-coin worst-case effect on the given row's final load.

    For each kept component at each level, the effect of its coin on the
    row load is at most the number of its edges whose block covers the row.
    """
    effects = []
    for level in trace.levels:
        for pair in level:
            for comp in pair.cap.decomposition.components:
                cnt = 0
                for lab in comp.labels:
                    if row in blocks.blocks[lab].rows:
                        cnt += 1
                effects.append(cnt)
    return np.asarray(effects, dtype=np.float64)


def realized_effect_squares(trace: HalvingTrace, blocks: BlockStructure, n_rows: int) -> np.ndarray:
    """sum of squared per-coin effects, for every row at once."""
    sumsq = np.zeros(n_rows, dtype=np.float64)
    for level in trace.levels:
        for pair in level:
            for comp in pair.cap.decomposition.components:
                rows = np.concatenate(
                    [np.asarray(blocks.blocks[lab].rows) for lab in comp.labels]
                )
                cnt = np.bincount(rows, minlength=n_rows)
                sumsq += cnt.astype(np.float64) ** 2
    return sumsq
