"""Tripartite 3-uniform hypergraphs: the hypergraph view of a square,
codegrees, the low-matching obstruction family, vertex blow-ups, the
high-codegree splitting transform, greedy proper edge colouring, and exact
maximum matching for small instances.

Vertices are addressed as (class, index) with class in {0, 1, 2}; for a
square's hypergraph the classes are rows, columns, symbols.  Edge indices
are stable: blow-ups and splits preserve or systematically extend them, and
matchings/colourings refer to edge indices.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

from .squares import EquiNSquare, ParseError

Vertex = tuple[int, int]


class SameVertex(ValueError):
    pass


class InvalidParam(ValueError):
    pass


class NotAMatching(ValueError):
    def __init__(self, pairs):
        self.pairs = pairs
        super().__init__(f"high-codegree pair set is not a matching: {sorted(pairs)}")


@dataclass(frozen=True, eq=False)
class TripartiteHypergraph:
    """Edge list over three vertex classes; multi-edges allowed."""

    class_sizes: tuple[int, int, int]
    edges: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        for e in self.edges:
            for cls in range(3):
                if not 0 <= e[cls] < self.class_sizes[cls]:
                    raise ValueError(f"edge {e} out of range for classes {self.class_sizes}")

    @property
    def num_vertices(self) -> int:
        return sum(self.class_sizes)

    def vertices(self):
        for cls in range(3):
            for idx in range(self.class_sizes[cls]):
                yield (cls, idx)

    @cached_property
    def _incidence(self) -> dict[Vertex, tuple[int, ...]]:
        inc: dict[Vertex, list[int]] = {}
        for i, e in enumerate(self.edges):
            for cls in range(3):
                inc.setdefault((cls, e[cls]), []).append(i)
        return {v: tuple(ix) for v, ix in inc.items()}

    def incident(self, v: Vertex) -> tuple[int, ...]:
        return self._incidence.get(v, ())

    def degree(self, v: Vertex) -> int:
        return len(self.incident(v))

    def max_degree(self) -> int:
        if not self.edges:
            return 0
        return max(len(ix) for ix in self._incidence.values())


def from_square(square: EquiNSquare) -> TripartiteHypergraph:
    """One edge (row, col, symbol) per cell; the result is n-regular."""
    n = square.n
    edges = tuple(
        (i, j, int(square.grid[i, j])) for i in range(n) for j in range(n)
    )
    return TripartiteHypergraph((n, n, n), edges)


def codegree(h: TripartiteHypergraph, x: Vertex, y: Vertex) -> int:
    """Number of edges containing both x and y."""
    if x == y:
        raise SameVertex(f"codegree needs distinct vertices, got {x} twice")
    if x[0] == y[0]:
        return 0  # edges hold one vertex per class
    a, b = sorted((x, y))
    return sum(1 for i in h.incident(a) if h.edges[i][b[0]] == b[1])


def alon_kim(t: int) -> TripartiteHypergraph:
    """The 2t-regular obstruction family on 3t vertices per class.

    Vertices 0..2t-1 are the plain copies, 2t..3t-1 the primed ones.  Any
    matching has at most 2t edges, so roughly a third of each class is
    always uncovered.
    """
    if t < 1:
        raise InvalidParam(f"t must be >= 1, got {t}")
    edges = []
    for i in range(2 * t):
        for j in range(t):
            edges.append((i, i, 2 * t + j))
            edges.append((i, 2 * t + j, i))
            edges.append((2 * t + j, i, i))
    return TripartiteHypergraph((3 * t, 3 * t, 3 * t), tuple(edges))


def blow_up(h: TripartiteHypergraph, factor: int) -> TripartiteHypergraph:
    """Replace each vertex by `factor` copies and each edge by factor^3 edges.

    Vertex (c, v) becomes (c, v*factor + q); degrees multiply by factor^2.
    """
    if factor < 1:
        raise InvalidParam(f"factor must be >= 1, got {factor}")
    sizes = tuple(s * factor for s in h.class_sizes)
    edges = []
    for a, b, c in h.edges:
        for qa in range(factor):
            for qb in range(factor):
                for qc in range(factor):
                    edges.append((a * factor + qa, b * factor + qb, c * factor + qc))
    return TripartiteHypergraph(sizes, tuple(edges))


def split_high_codegree(h: TripartiteHypergraph, threshold: int):
    """Split every pair with codegree above `threshold` through fresh vertices.

    The pair set E = {(x, y): cod(x, y) > threshold} must be a matching.
    For each pair, the lexicographically smaller vertex x_f is replaced, in
    each edge covering the pair, by a fresh vertex private to that edge, so
    all codegrees in the result are <= threshold.

    Returns (h2, pullback) where h2 has the same edge indices and pullback
    maps an EdgeColouring of h2 to one of h with the same colour count.
    When every edge through a high pair contains both its vertices (the
    all-or-none situation the transform is meant for), a proper colouring
    pulls back to a proper colouring.
    """
    if threshold < 1:
        raise InvalidParam(f"threshold must be >= 1, got {threshold}")
    high: list[tuple[Vertex, Vertex]] = []
    seen_pairs = set()
    for i, e in enumerate(h.edges):
        for ca, cb in ((0, 1), (0, 2), (1, 2)):
            pair = ((ca, e[ca]), (cb, e[cb]))
            if pair in seen_pairs:
                continue
            seen_pairs.add(pair)
            if codegree(h, *pair) > threshold:
                high.append(pair)
    used: set[Vertex] = set()
    for x, y in high:
        if x in used or y in used:
            raise NotAMatching(high)
        used.update((x, y))

    sizes = list(h.class_sizes)
    new_edges = list(h.edges)
    for x_f, y_f in high:  # x_f is the lexicographically smaller vertex
        cls = x_f[0]
        for i, e in enumerate(new_edges):
            if e[cls] == x_f[1] and e[y_f[0]] == y_f[1]:
                fresh = sizes[cls]
                sizes[cls] += 1
                moved = list(e)
                moved[cls] = fresh
                new_edges[i] = tuple(moved)
    h2 = TripartiteHypergraph(tuple(sizes), tuple(new_edges))

    def pullback(colouring: "EdgeColouring") -> "EdgeColouring":
        # Edge indices are stable, so the colour assignment carries over.
        if len(colouring.colours) != len(h.edges):
            raise InvalidParam("colouring size does not match edge count")
        return EdgeColouring(colouring.colours)

    return h2, pullback


@dataclass(frozen=True)
class EdgeColouring:
    """Colour id per edge index; each colour class should be a matching."""

    colours: tuple[int, ...]

    @property
    def num_colours(self) -> int:
        return len(set(self.colours)) if self.colours else 0


def is_proper(h: TripartiteHypergraph, colouring: EdgeColouring) -> bool:
    """True iff edges sharing a vertex always have different colours."""
    for v, inc in h._incidence.items():
        seen = set()
        for i in inc:
            c = colouring.colours[i]
            if c in seen:
                return False
            seen.add(c)
    return True


def greedy_edge_colouring(h: TripartiteHypergraph) -> EdgeColouring:
    """First-fit colouring over edges in index order.

    Uses at most 3*(max_degree - 1) + 1 colours since an edge meets at most
    that many others.
    """
    taken: dict[Vertex, set[int]] = {}
    colours = []
    for e in h.edges:
        verts = [(0, e[0]), (1, e[1]), (2, e[2])]
        blocked = set()
        for v in verts:
            blocked |= taken.get(v, set())
        c = 0
        while c in blocked:
            c += 1
        colours.append(c)
        for v in verts:
            taken.setdefault(v, set()).add(c)
    return EdgeColouring(tuple(colours))


def max_matching_exact(h: TripartiteHypergraph, budget: int | None = None):
    """Exact maximum matching by branch and bound.

    Branches on the most-constrained uncovered vertex; prunes with the
    remaining-class-size bound.  `budget` caps the number of search nodes;
    the flag in the returned (edge_indices, optimal) pair reports whether
    the search completed.
    """
    m = len(h.edges)
    if m == 0:
        return (), True

    # Bitmask per class over vertex indices.
    masks = []
    for a, b, c in h.edges:
        masks.append(((1 << a), (1 << b), (1 << c)))

    best: list[int] = []
    greedy: list[int] = []
    cov = [0, 0, 0]
    for i, mk in enumerate(masks):
        if not (cov[0] & mk[0] or cov[1] & mk[1] or cov[2] & mk[2]):
            greedy.append(i)
            for cls in range(3):
                cov[cls] |= mk[cls]
    best = greedy

    nodes = 0
    out_of_budget = False

    def search(available: list[int], covered: tuple[int, int, int], chosen: list[int]):
        nonlocal best, nodes, out_of_budget
        if out_of_budget:
            return
        nodes += 1
        if budget is not None and nodes > budget:
            out_of_budget = True
            return
        if len(chosen) > len(best):
            best = list(chosen)
        if not available:
            return
        # Remaining-class-size bound: per class, distinct uncovered vertices.
        ub = m
        for cls in range(3):
            u = 0
            for i in available:
                u |= masks[i][cls]
            ub = min(ub, u.bit_count())
        if len(chosen) + ub <= len(best):
            return
        # Most-constrained uncovered vertex: fewest available incident edges.
        counts: dict[Vertex, list[int]] = {}
        for i in available:
            e = h.edges[i]
            for cls in range(3):
                counts.setdefault((cls, e[cls]), []).append(i)
        v, inc = min(counts.items(), key=lambda kv: (len(kv[1]), kv[0]))
        # Branch: each edge at v, then leaving v uncovered.
        for i in inc:
            mk = masks[i]
            cov2 = (covered[0] | mk[0], covered[1] | mk[1], covered[2] | mk[2])
            avail2 = [
                j for j in available
                if not (masks[j][0] & cov2[0] or masks[j][1] & cov2[1] or masks[j][2] & cov2[2])
            ]
            chosen.append(i)
            search(avail2, cov2, chosen)
            chosen.pop()
            if out_of_budget:
                return
        vcls, vidx = v
        bit = 1 << vidx
        rest = [j for j in available if not masks[j][vcls] & bit]
        search(rest, covered, chosen)

    search(list(range(m)), (0, 0, 0), [])
    return tuple(sorted(best)), not out_of_budget


def write_hypergraph(h: TripartiteHypergraph, path) -> None:
    """Text format: line 1 '|A| |B| |C|', then one 'a b c' line per edge."""
    lines = [" ".join(str(s) for s in h.class_sizes)]
    lines += [f"{a} {b} {c}" for a, b, c in h.edges]
    Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")


def read_hypergraph(path) -> TripartiteHypergraph:
    text = Path(path).read_text(encoding="utf-8")
    lines = [ln for ln in text.split("\n")]
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise ParseError(1, "empty file")
    head = lines[0].split()
    if len(head) != 3:
        raise ParseError(1, "expected 3 class sizes")
    try:
        sizes = tuple(int(x) for x in head)
    except ValueError:
        raise ParseError(1, "non-integer class size") from None
    edges = []
    for i, line in enumerate(lines[1:], start=2):
        parts = line.split()
        if len(parts) != 3:
            raise ParseError(i, "expected 3 entries")
        try:
            edges.append(tuple(int(p) for p in parts))
        except ValueError:
            raise ParseError(i, "non-integer entry") from None
    try:
        return TripartiteHypergraph(sizes, tuple(edges))
    except ValueError as exc:
        raise ParseError(1, str(exc)) from exc
