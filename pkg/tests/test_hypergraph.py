import itertools

import numpy as np
import pytest

from equisquares.constructions import cyclic_latin, random_equi_square
from equisquares.hypergraph import (
    InvalidParam,
    NotAMatching,
    SameVertex,
    TripartiteHypergraph,
    alon_kim,
    blow_up,
    codegree,
    from_square,
    greedy_edge_colouring,
    is_proper,
    max_matching_exact,
    read_hypergraph,
    split_high_codegree,
    write_hypergraph,
)
from equisquares.squares import validate_square


def brute_max_matching(h: TripartiteHypergraph) -> int:
    """Exhaustive maximum matching over all edge subsets (oracle)."""
    m = len(h.edges)
    best = 0
    for bits in range(1 << m):
        chosen = [h.edges[i] for i in range(m) if bits >> i & 1]
        used = [set(), set(), set()]
        ok = True
        for e in chosen:
            for cls in range(3):
                if e[cls] in used[cls]:
                    ok = False
                    break
                used[cls].add(e[cls])
            if not ok:
                break
        if ok:
            best = max(best, len(chosen))
    return best


def test_from_square_trivial():
    sq = validate_square(1, [[0]])
    h = from_square(sq)
    assert h.edges == ((0, 0, 0),)
    assert all(h.degree(v) == 1 for v in h.vertices())


def test_from_square_regular_with_unit_row_col_codegree():
    for n, seed in ((2, 0), (5, 1), (8, 2)):
        sq = random_equi_square(n, seed)
        h = from_square(sq)
        assert len(h.edges) == n * n
        assert all(h.degree(v) == n for v in h.vertices())
        for i in range(n):
            for j in range(n):
                assert codegree(h, (0, i), (1, j)) == 1


def test_codegree_counts_column_symbol_multiplicity():
    sq = validate_square(2, [[0, 0], [1, 1]])
    h = from_square(sq)
    # column 0 holds symbol 0 once and symbol 1 once
    assert codegree(h, (1, 0), (2, 0)) == 1
    sq2 = validate_square(3, [[0, 1, 2], [0, 1, 2], [0, 1, 2]])
    h2 = from_square(sq2)
    for j in range(3):
        assert codegree(h2, (1, j), (2, j)) == 3
        grid_count = int((np.asarray(sq2.grid)[:, j] == j).sum())
        assert grid_count == 3


def test_codegree_same_vertex_rejected():
    h = from_square(cyclic_latin(2))
    with pytest.raises(SameVertex):
        codegree(h, (0, 0), (0, 0))
    assert codegree(h, (0, 0), (0, 1)) == 0  # same class, no shared edge


def test_codegree_empty():
    h = TripartiteHypergraph((2, 2, 2), ())
    assert codegree(h, (0, 0), (1, 0)) == 0


def test_alon_kim_counts():
    h = alon_kim(1)
    assert h.class_sizes == (3, 3, 3)
    assert len(h.edges) == 6
    assert all(h.degree(v) == 2 for v in h.vertices())
    h2 = alon_kim(2)
    assert h2.class_sizes == (6, 6, 6)
    assert len(h2.edges) == 24
    assert all(h2.degree(v) == 4 for v in h2.vertices())
    with pytest.raises(InvalidParam):
        alon_kim(0)


def test_alon_kim_matching_limit_oracle():
    h = alon_kim(1)
    assert brute_max_matching(h) == 2
    matching, optimal = max_matching_exact(h)
    assert optimal and len(matching) == 2


def test_blow_up_identity_and_counts():
    h = alon_kim(1)
    same = blow_up(h, 1)
    assert same.class_sizes == h.class_sizes
    assert len(same.edges) == len(h.edges)

    big = blow_up(h, 3)
    assert big.class_sizes == (9, 9, 9)
    assert len(big.edges) == 27 * 6
    assert all(big.degree(v) == 18 for v in big.vertices())

    single = TripartiteHypergraph((1, 1, 1), ((0, 0, 0),))
    assert len(blow_up(single, 2).edges) == 8
    with pytest.raises(InvalidParam):
        blow_up(h, 0)


def test_blow_up_degree_scaling_random():
    rng = np.random.default_rng(4)
    for _ in range(5):
        edges = tuple(
            (int(rng.integers(0, 3)), int(rng.integers(0, 3)), int(rng.integers(0, 3)))
            for _ in range(8)
        )
        h = TripartiteHypergraph((3, 3, 3), edges)
        f = int(rng.integers(2, 4))
        big = blow_up(h, f)
        assert len(big.edges) == len(h.edges) * f**3
        for cls in range(3):
            for v in range(3):
                for q in range(f):
                    assert big.degree((cls, v * f + q)) == h.degree((cls, v)) * f * f


def planted_split_instance(rng, n_pairs=2, threshold=2):
    """Random 3-uniform instance with planted high-codegree pairs.

    Planted pair vertices appear only in edges covering the pair, matching
    the all-or-none situation the splitting transform targets.
    """
    size = 12
    sizes = [size, size, size]
    edges = []
    reserved = [set(), set(), set()]
    pair_classes = [(0, 1), (1, 2), (0, 2)]
    for p in range(n_pairs):
        ca, cb = pair_classes[p % 3]
        x = p  # vertex index reserved per pair within its class
        y = p
        reserved[ca].add(x)
        reserved[cb].add(y)
        cc = 3 - ca - cb
        count = threshold + 1 + int(rng.integers(0, 3))
        thirds = rng.choice(np.arange(6, size), size=count, replace=False)
        for z in thirds:
            e = [None, None, None]
            e[ca], e[cb], e[cc] = x, y, int(z)
            edges.append(tuple(e))
    # background edges avoid reserved vertices and keep codegrees <= threshold
    pair_count: dict = {}
    attempts = 0
    while len(edges) < n_pairs * 4 + 15 and attempts < 500:
        attempts += 1
        e = tuple(int(rng.integers(3, size)) for _ in range(3))
        keys = [((0, e[0]), (1, e[1])), ((0, e[0]), (2, e[2])), ((1, e[1]), (2, e[2]))]
        if any(pair_count.get(k, 0) + 1 > threshold for k in keys):
            continue
        for k in keys:
            pair_count[k] = pair_count.get(k, 0) + 1
        edges.append(e)
    return TripartiteHypergraph(tuple(sizes), tuple(edges))


def test_split_noop_when_codegrees_small():
    h = from_square(cyclic_latin(4))
    h2, pullback = split_high_codegree(h, 4)
    assert h2.edges == h.edges
    col = greedy_edge_colouring(h2)
    assert is_proper(h, pullback(col))


def test_split_three_parallel_edges():
    # three edges through the pair {(0,0), (1,0)}
    h = TripartiteHypergraph((1, 1, 3), ((0, 0, 0), (0, 0, 1), (0, 0, 2)))
    h2, pullback = split_high_codegree(h, 1)
    assert h2.class_sizes[0] == 1 + 3  # one fresh vertex per covering edge
    for x, y in itertools.combinations(h2.vertices(), 2):
        if x[0] != y[0]:
            assert codegree(h2, x, y) <= 1
    col = greedy_edge_colouring(h2)
    back = pullback(col)
    assert is_proper(h, back)
    assert back.num_colours == col.num_colours


def test_split_planted_instances():
    rng = np.random.default_rng(2024)
    for trial in range(50):
        h = planted_split_instance(rng, n_pairs=1 + trial % 3, threshold=2)
        h2, pullback = split_high_codegree(h, 2)
        for x, y in itertools.combinations(h2.vertices(), 2):
            if x[0] != y[0]:
                assert codegree(h2, x, y) <= 2
        assert h2.max_degree() <= h.max_degree()
        col = greedy_edge_colouring(h2)
        assert is_proper(h2, col)
        back = pullback(col)
        assert is_proper(h, back)
        assert back.num_colours == col.num_colours


def test_split_rejects_overlapping_high_pairs():
    # two high pairs sharing vertex (0,0)
    edges = tuple(
        [(0, 0, z) for z in range(3)] + [(0, z, 0) for z in range(3)]
    )
    h = TripartiteHypergraph((1, 3, 3), edges)
    with pytest.raises(NotAMatching):
        split_high_codegree(h, 1)


def test_greedy_colouring_trivial_and_bound():
    single = TripartiteHypergraph((1, 1, 1), ((0, 0, 0),))
    assert greedy_edge_colouring(single).num_colours == 1
    h1 = from_square(validate_square(1, [[0]]))
    assert greedy_edge_colouring(h1).num_colours == 1

    h5 = from_square(cyclic_latin(5))
    col = greedy_edge_colouring(h5)
    assert is_proper(h5, col)
    assert col.num_colours <= 3 * (5 - 1) + 1


def test_greedy_colouring_classes_are_matchings_random():
    rng = np.random.default_rng(8)
    for _ in range(10):
        sq = random_equi_square(6, int(rng.integers(0, 10**6)))
        h = from_square(sq)
        col = greedy_edge_colouring(h)
        assert is_proper(h, col)
        assert col.num_colours <= 3 * (h.max_degree() - 1) + 1


def test_max_matching_exact_examples():
    assert max_matching_exact(TripartiteHypergraph((1, 1, 1), ()))[0] == ()
    sq = validate_square(2, [[0, 0], [1, 1]])
    matching, optimal = max_matching_exact(from_square(sq))
    assert optimal and len(matching) == 2


def test_max_matching_exact_oracle_random():
    rng = np.random.default_rng(6)
    for _ in range(20):
        edges = tuple(
            (int(rng.integers(0, 4)), int(rng.integers(0, 4)), int(rng.integers(0, 4)))
            for _ in range(int(rng.integers(1, 11)))
        )
        h = TripartiteHypergraph((4, 4, 4), edges)
        matching, optimal = max_matching_exact(h)
        assert optimal
        assert len(matching) == brute_max_matching(h)
        used = [set(), set(), set()]
        for i in matching:
            for cls in range(3):
                assert h.edges[i][cls] not in used[cls]
                used[cls].add(h.edges[i][cls])


def test_max_matching_budget_flag():
    h = blow_up(alon_kim(2), 2)
    matching, optimal = max_matching_exact(h, budget=5)
    assert not optimal
    assert len(matching) >= 1  # greedy incumbent is still returned


def test_hypergraph_file_round_trip(tmp_path):
    h = alon_kim(2)
    path = tmp_path / "h.txt"
    write_hypergraph(h, path)
    again = read_hypergraph(path)
    assert again.class_sizes == h.class_sizes
    assert again.edges == h.edges
    first = path.read_text().splitlines()[0]
    assert first == "6 6 6"
