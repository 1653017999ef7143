"""Bipartite multigraph algorithms: perfect matchings in regular multigraphs,
decomposition into matchings, maximum matching, path/cycle components of
matching unions, and component capping.

Matchings are frozensets of edge labels; the graph resolves labels to
endpoints.  All operations are pure and deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import maximum_bipartite_matching


class NotRegular(ValueError):
    def __init__(self, vertex, degree):
        self.vertex = vertex
        self.degree = degree
        super().__init__(f"vertex {vertex} has degree {degree}")


class NotAMatching(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class BipartiteMultigraph:
    """Labelled multi-edges between a left and a right vertex class."""

    left_size: int
    right_size: int
    edges: tuple[tuple[int, int, object], ...]  # (left, right, label)

    def __post_init__(self):
        labels = set()
        for u, v, lab in self.edges:
            if not (0 <= u < self.left_size and 0 <= v < self.right_size):
                raise ValueError(f"edge ({u}, {v}) endpoint out of range")
            if lab in labels:
                raise ValueError(f"duplicate edge label {lab!r}")
            labels.add(lab)

    @cached_property
    def by_label(self) -> dict:
        return {lab: (u, v) for u, v, lab in self.edges}

    def endpoints(self, label) -> tuple[int, int]:
        return self.by_label[label]

    def degrees(self) -> tuple[np.ndarray, np.ndarray]:
        left = np.zeros(self.left_size, dtype=np.int64)
        right = np.zeros(self.right_size, dtype=np.int64)
        for u, v, _ in self.edges:
            left[u] += 1
            right[v] += 1
        return left, right


def make_graph(left_size: int, right_size: int, pairs) -> BipartiteMultigraph:
    """Build a multigraph from (left, right) pairs, labelling edges 0, 1, ..."""
    edges = tuple((int(u), int(v), i) for i, (u, v) in enumerate(pairs))
    return BipartiteMultigraph(left_size, right_size, edges)


def is_matching(graph: BipartiteMultigraph, labels) -> bool:
    seen_left: set[int] = set()
    seen_right: set[int] = set()
    for lab in labels:
        u, v = graph.endpoints(lab)
        if u in seen_left or v in seen_right:
            return False
        seen_left.add(u)
        seen_right.add(v)
    return True


def _require_matching(graph: BipartiteMultigraph, labels, name: str) -> None:
    if not is_matching(graph, labels):
        raise NotAMatching(f"{name} is not a matching")


def matching_pairs_from_arrays(
    rows: np.ndarray, cols: np.ndarray, n_rows: int, n_cols: int
) -> list[tuple[int, int]]:
    """Maximum matching of the bipartite graph given as parallel edge arrays.

    Returns matched (row, col) pairs.  Hopcroft-Karp via scipy.
    """
    if len(rows) == 0 or n_rows == 0 or n_cols == 0:
        return []
    data = np.ones(len(rows), dtype=np.int8)
    mat = sp.csr_matrix((data, (rows, cols)), shape=(n_rows, n_cols))
    match = maximum_bipartite_matching(mat, perm_type="column")
    return [(int(i), int(match[i])) for i in range(n_rows) if match[i] >= 0]


def max_matching(graph: BipartiteMultigraph) -> frozenset:
    """Maximum-cardinality matching, returned as a frozenset of edge labels.

    Parallel edges are collapsed; the smallest label of each matched
    (left, right) pair is reported, so output is deterministic.
    """
    if not graph.edges:
        return frozenset()
    rows = np.fromiter((u for u, _, _ in graph.edges), dtype=np.int64, count=len(graph.edges))
    cols = np.fromiter((v for _, v, _ in graph.edges), dtype=np.int64, count=len(graph.edges))
    pairs = matching_pairs_from_arrays(rows, cols, graph.left_size, graph.right_size)
    best_label: dict[tuple[int, int], object] = {}
    for u, v, lab in graph.edges:
        key = (u, v)
        if key not in best_label or _label_key(lab) < _label_key(best_label[key]):
            best_label[key] = lab
    return frozenset(best_label[p] for p in pairs)


def _label_key(lab):
    # Orders int labels numerically and everything else by repr: stable ties.
    return (0, lab) if isinstance(lab, int) else (1, repr(lab))


def regular_perfect_matching(graph: BipartiteMultigraph, k: int) -> frozenset:
    """Perfect matching of a k-regular bipartite multigraph (exists by Hall)."""
    left, right = graph.degrees()
    for i, d in enumerate(left):
        if d != k:
            raise NotRegular(("left", i), int(d))
    for j, d in enumerate(right):
        if d != k:
            raise NotRegular(("right", j), int(d))
    m = max_matching(graph)
    if len(m) != graph.left_size:
        raise AssertionError("regular multigraph lacked a perfect matching")
    return m


def _pad_to_regular(graph: BipartiteMultigraph, k: int) -> BipartiteMultigraph:
    """Embed a max-degree-k multigraph into a k-regular one with dummy edges."""
    n = max(graph.left_size, graph.right_size)
    left = np.zeros(n, dtype=np.int64)
    right = np.zeros(n, dtype=np.int64)
    for u, v, _ in graph.edges:
        left[u] += 1
        right[v] += 1
    edges = list(graph.edges)
    counter = 0
    i = j = 0
    while i < n:
        if left[i] >= k:
            i += 1
            continue
        while right[j] >= k:
            j += 1
        add = min(k - left[i], k - right[j])
        for _ in range(add):
            edges.append((i, j, ("_pad", counter)))
            counter += 1
        left[i] += add
        right[j] += add
    return BipartiteMultigraph(n, n, tuple(edges))


def decompose_regular(graph: BipartiteMultigraph, k: int, embed: bool = False) -> list[frozenset]:
    """Partition E(G) into k matchings; each perfect when G is k-regular.

    With ``embed`` the graph may have max degree <= k: it is padded to a
    k-regular supergraph, decomposed, and the dummy edges stripped.
    """
    left, right = graph.degrees()
    if embed:
        for i, d in enumerate(left):
            if d > k:
                raise NotRegular(("left", i), int(d))
        for j, d in enumerate(right):
            if d > k:
                raise NotRegular(("right", j), int(d))
        work = _pad_to_regular(graph, k)
    else:
        for i, d in enumerate(left):
            if d != k:
                raise NotRegular(("left", i), int(d))
        for j, d in enumerate(right):
            if d != k:
                raise NotRegular(("right", j), int(d))
        work = graph

    real = set(graph.by_label)
    remaining = list(work.edges)
    out = []
    for _ in range(k):
        sub = BipartiteMultigraph(work.left_size, work.right_size, tuple(remaining))
        m = max_matching(sub)
        if len(m) != work.left_size:
            raise AssertionError("extraction round lacked a perfect matching")
        out.append(frozenset(lab for lab in m if lab in real))
        remaining = [e for e in remaining if e[2] not in m]
    assert not remaining
    return out


@dataclass(frozen=True)
class Component:
    """A path or cycle, as edge labels in traversal order."""

    labels: tuple
    kind: str  # "path" | "cycle"

    def __len__(self):
        return len(self.labels)


@dataclass(frozen=True)
class PathCycleDecomposition:
    components: tuple[Component, ...]

    def all_labels(self) -> frozenset:
        out = set()
        for c in self.components:
            out.update(c.labels)
        return frozenset(out)

    def to_json(self) -> dict:
        return {
            "format": 1,
            "components": [
                {"kind": c.kind, "labels": list(c.labels)} for c in self.components
            ],
        }


def union_components(
    graph: BipartiteMultigraph, m_a, m_b
) -> PathCycleDecomposition:
    """Components of the multigraph union of two matchings.

    Every vertex has degree <= 2, so components are paths or even cycles
    whose edges alternate between the two matchings.  A label present in
    both matchings forms its own single-edge component.  Components are
    ordered by minimum edge label.
    """
    m_a = frozenset(m_a)
    m_b = frozenset(m_b)
    _require_matching(graph, m_a, "m_a")
    _require_matching(graph, m_b, "m_b")
    labels = sorted(m_a | m_b, key=_label_key)

    adj: dict[tuple[str, int], list] = {}
    for lab in labels:
        u, v = graph.endpoints(lab)
        adj.setdefault(("L", u), []).append(lab)
        adj.setdefault(("R", v), []).append(lab)
    for inc in adj.values():
        assert len(inc) <= 2  # two matchings: degree at most 2
        inc.sort(key=_label_key)

    def other_end(lab, vertex):
        u, v = graph.endpoints(lab)
        return ("R", v) if vertex == ("L", u) else ("L", u)

    visited: set = set()
    components: list[Component] = []

    def walk(start_vertex, first_lab, closed: bool):
        seq = []
        vertex, lab = start_vertex, first_lab
        while True:
            seq.append(lab)
            visited.add(lab)
            vertex = other_end(lab, vertex)
            nxt = [e for e in adj[vertex] if e not in visited]
            if not nxt:
                break
            lab = nxt[0]
        if closed and len(seq) > 1:
            assert vertex == start_vertex, "cycle traversal did not close"
            return Component(tuple(seq), "cycle")
        return Component(tuple(seq), "path")

    # Paths start from degree-1 endpoints, smaller vertex first.
    endpoints = sorted(v for v, inc in adj.items() if len(inc) == 1)
    for vtx in endpoints:
        lab = adj[vtx][0]
        if lab in visited:
            continue
        components.append(walk(vtx, lab, closed=False))
    # The rest are cycles; canonical start is the minimum remaining label.
    for lab in labels:
        if lab in visited:
            continue
        u, _ = graph.endpoints(lab)
        components.append(walk(("L", u), lab, closed=True))

    for comp in components:
        _assert_alternating(comp, m_a, m_b)
    components.sort(key=lambda c: min(_label_key(lab) for lab in c.labels))
    return PathCycleDecomposition(tuple(components))


def _assert_alternating(comp: Component, m_a, m_b) -> None:
    for e, f in zip(comp.labels, comp.labels[1:]):
        only_a = e in m_a and e not in m_b and f in m_a and f not in m_b
        only_b = e in m_b and e not in m_a and f in m_b and f not in m_a
        assert not (only_a or only_b), "component does not alternate"


@dataclass(frozen=True)
class CapResult:
    """Decomposition re-cut so every component has at most s edges."""

    deleted: frozenset
    decomposition: PathCycleDecomposition

    def to_json(self) -> dict:
        return {
            "format": 1,
            "deleted": sorted(self.deleted, key=_label_key),
            "decomposition": self.decomposition.to_json(),
        }


def cap_components(decomp: PathCycleDecomposition, s: int) -> CapResult:
    """Break long components into pieces of at most s edges.

    Deletions are evenly spaced along the canonical traversal: position
    p = s mod (s+1) for paths, p = 0 mod (s+1) for cycles.  Per component
    of L edges this deletes ceil(L/(s+1)) edges for cycles and
    floor(L/(s+1)) for paths, the minimum possible.
    """
    if s < 1:
        raise ValueError(f"cap must be >= 1, got {s}")
    deleted: set = set()
    pieces: list[Component] = []
    for comp in decomp.components:
        length = len(comp)
        if length <= s:
            pieces.append(comp)
            continue
        if comp.kind == "cycle":
            drop = {p for p in range(length) if p % (s + 1) == 0}
        else:
            drop = {p for p in range(length) if p % (s + 1) == s}
        run: list = []
        for p, lab in enumerate(comp.labels):
            if p in drop:
                deleted.add(lab)
                if run:
                    pieces.append(Component(tuple(run), "path"))
                    run = []
            else:
                run.append(lab)
        if run:
            pieces.append(Component(tuple(run), "path"))
    pieces.sort(key=lambda c: min(_label_key(l) for l in c.labels))
    return CapResult(deleted=frozenset(deleted),
                     decomposition=PathCycleDecomposition(tuple(pieces)))
