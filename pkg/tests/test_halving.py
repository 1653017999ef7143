import math

import numpy as np
import pytest

from equisquares.bipartite import decompose_regular, is_matching, make_graph
from equisquares.constructions import block_structured_square
from equisquares.halving import (
    BadLevel,
    InvalidParam,
    NotPowerOfTwo,
    alternate_halve,
    block_transversal,
    build_block_multigraph,
    default_cap,
    iterated_halving,
    mcdiarmid_bound,
    realized_effect_vector,
    row_loads,
)
from equisquares.squares import validate_transversal
from tests.test_bipartite import cycle_graph


def test_default_cap_values():
    assert default_cap(1024) == 4  # n^(1/3)/ln^2 n = 0.21, floored, clamped
    assert default_cap(8) == 4
    assert default_cap(10**9) >= 4


def test_single_edge_coin():
    g = make_graph(1, 1, [(0, 0)])
    kept = 0
    trials = 400
    for seed in range(trials):
        out, trace = alternate_halve(g, {0}, frozenset(), 1, np.random.default_rng(seed))
        assert out in (frozenset(), frozenset({0}))
        kept += len(out)
    assert abs(kept / trials - 0.5) < 3 * math.sqrt(0.25 / trials)


def test_eight_cycle_full_cap_takes_whole_side():
    g, m_a, m_b = cycle_graph(8)
    seen = set()
    for seed in range(40):
        out, trace = alternate_halve(g, m_a, m_b, 8, np.random.default_rng(seed))
        assert out in (m_a, m_b)
        seen.add(out)
        assert trace.cap.deleted == frozenset()
        assert len(trace.flips) == 1
    assert seen == {m_a, m_b}  # both outcomes occur


def test_eight_cycle_cap_three():
    g, m_a, m_b = cycle_graph(8)
    for seed in range(100):
        out, trace = alternate_halve(g, m_a, m_b, 3, np.random.default_rng(seed))
        assert len(trace.cap.deleted) == 2  # ceil(8/4)
        assert len(trace.cap.decomposition.components) == 2
        assert all(len(c) <= 3 for c in trace.cap.decomposition.components)
        assert is_matching(g, out)
        assert not out & trace.cap.deleted


def test_alternate_halve_kept_side_is_pure():
    g, m_a, m_b = cycle_graph(12)
    for seed in range(50):
        out, trace = alternate_halve(g, m_a, m_b, 4, np.random.default_rng(seed))
        for comp, flip in zip(trace.cap.decomposition.components, trace.flips):
            kept_here = [lab for lab in comp.labels if lab in out]
            side = m_b if flip else m_a
            assert kept_here == [lab for lab in comp.labels if lab in side]


def test_iterated_halving_identity_level_zero():
    g = make_graph(2, 2, [(0, 0), (1, 1)])
    m = frozenset({0, 1})
    out, trace = iterated_halving(g, [m], 4, np.random.default_rng(0))
    assert out == m
    assert trace.levels == ()
    assert trace.initial_matchings == (m,)


def test_iterated_halving_requires_power_of_two():
    g = make_graph(2, 2, [(0, 0), (1, 1), (0, 1)])
    with pytest.raises(NotPowerOfTwo):
        iterated_halving(g, [frozenset({0}), frozenset({1}), frozenset({2})], 2,
                         np.random.default_rng(0))


def test_iterated_halving_block_square():
    sq, blocks = block_structured_square(8, 2, seed=1)
    g = build_block_multigraph(sq, blocks)
    ms = decompose_regular(g, 4)
    out, trace = iterated_halving(g, ms, 8, np.random.default_rng(5))
    assert is_matching(g, out)
    assert len(trace.levels) == 2
    assert len(trace.levels[0]) == 2 and len(trace.levels[1]) == 1
    # output is drawn from the union of the last level inputs minus deletions
    last = trace.levels[1][0]
    assert out <= (last.matching_a | last.matching_b) - last.cap.deleted


def test_survival_probability_quarter():
    sq, blocks = block_structured_square(8, 2, seed=1)
    g = build_block_multigraph(sq, blocks)
    ms = decompose_regular(g, 4)
    trials = 2500
    kept = 0
    for seed in range(trials):
        out, _ = iterated_halving(g, ms, 16, np.random.default_rng(seed))
        kept += 0 in out
    se = math.sqrt(0.25 * 0.75 / trials)
    assert abs(kept / trials - 0.25) < 3 * se


def test_independent_components_have_independent_survival():
    # two disjoint 8-cycles: their edges are never in a common component
    g1_pairs = [(i, i) for i in range(4)] + [(i, (i + 1) % 4) for i in range(4)]
    pairs = g1_pairs + [(4 + i, 4 + i) for i in range(4)] + [
        (4 + i, 4 + (i + 1) % 4) for i in range(4)
    ]
    g = make_graph(8, 8, pairs)
    m_a = frozenset(range(4)) | frozenset(range(8, 12))
    m_b = frozenset(range(4, 8)) | frozenset(range(12, 16))
    trials = 3000
    x = np.zeros(trials)
    y = np.zeros(trials)
    for seed in range(trials):
        out, _ = alternate_halve(g, m_a, m_b, 8, np.random.default_rng(seed))
        x[seed] = 0 in out    # edge in first cycle
        y[seed] = 8 in out    # edge in second cycle
    cov = float(np.mean(x * y) - np.mean(x) * np.mean(y))
    se = 0.25 / math.sqrt(trials)  # var(xy) <= 1/4 crude bound
    assert abs(cov) < 3 * se


def test_block_transversal_validity_and_loads():
    for n, m in ((4, 1), (8, 2), (16, 4)):
        sq, blocks = block_structured_square(n, m, seed=n)
        t, trace, loads = block_transversal(sq, blocks, 2 * n, np.random.default_rng(n))
        validate_transversal(sq, t.cells)  # construction promises validity
        assert loads.loads.sum() == len(trace.final) * m


def test_row_loads_input_sum_is_n():
    # Every row meets one block per column, so summing per-row incidences of
    # the k input matchings over a decomposition counts each column once.
    sq, blocks = block_structured_square(8, 2, seed=3)
    t, trace, _ = block_transversal(sq, blocks, 16, np.random.default_rng(0))
    total = np.zeros(8, dtype=np.int64)
    for j in range(4):
        total += row_loads(trace, blocks, ("initial", j), n_rows=8).loads
    assert (total == 8).all()


def test_row_loads_selectors_and_errors():
    sq, blocks = block_structured_square(8, 2, seed=3)
    t, trace, loads = block_transversal(sq, blocks, 16, np.random.default_rng(1))
    final = row_loads(trace, blocks, "final", n_rows=8)
    assert (final.loads == loads.loads).all()
    lvl = row_loads(trace, blocks, ("level", 1, 0), n_rows=8)
    assert lvl.loads.sum() == len(trace.levels[0][0].output) * 2
    with pytest.raises(BadLevel):
        row_loads(trace, blocks, ("initial", 9), n_rows=8)
    with pytest.raises(BadLevel):
        row_loads(trace, blocks, ("level", 7, 0), n_rows=8)
    with pytest.raises(BadLevel):
        row_loads(trace, blocks, "finale", n_rows=8)


def test_row_loads_empty_final():
    sq, blocks = block_structured_square(4, 1, seed=2)
    g = build_block_multigraph(sq, blocks)
    ms = decompose_regular(g, 4)
    out, trace = iterated_halving(g, ms, 1, np.random.default_rng(3))
    # tiny cap forces deletions; loads of whatever remains match by hand
    lr = row_loads(trace, blocks, "final", n_rows=4)
    manual = np.zeros(4, dtype=np.int64)
    for lab in trace.final:
        for r in blocks.blocks[lab].rows:
            manual[r] += 1
    assert (lr.loads == manual).all()


def test_deleted_budget_per_level():
    # per halving level, deletions <= 2 * vertices / s
    for n, m, s in ((16, 4, 2), (16, 4, 3), (32, 8, 5)):
        sq, blocks = block_structured_square(n, m, seed=n + s)
        g = build_block_multigraph(sq, blocks)
        ms = decompose_regular(g, n // m)
        _, trace = iterated_halving(g, ms, s, np.random.default_rng(s))
        for level in trace.levels:
            for pair in level:
                assert len(pair.cap.deleted) <= 2 * (2 * n) / s


def test_block_transversal_rejects_bad_k():
    sq, blocks = block_structured_square(9, 3, seed=0)  # k = 3, not a power of two
    with pytest.raises(NotPowerOfTwo):
        block_transversal(sq, blocks, 4, np.random.default_rng(0))


def test_trace_serializes_to_json():
    import json

    sq, blocks = block_structured_square(8, 2, seed=1)
    t, trace, loads = block_transversal(
        sq, blocks, 8, np.random.default_rng(2), rng_seed=2
    )
    data = trace.to_json()
    assert data["format"] == 1
    assert data["rng_seed"] == 2
    json.dumps(data)  # round-trippable
    assert sorted(trace.final) == data["final"]


def test_row_loads_csv_export(tmp_path):
    sq, blocks = block_structured_square(8, 2, seed=1)
    _, _, loads = block_transversal(sq, blocks, 8, np.random.default_rng(2))
    path = tmp_path / "loads.csv"
    loads.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "row_index,load"
    assert len(lines) == 9


def test_mcdiarmid_values():
    assert math.isclose(mcdiarmid_bound([1], 1.0), 2 * math.exp(-1))
    assert math.isclose(mcdiarmid_bound([0] * 9 + [1], 1.0), 2 * math.exp(-1))
    assert math.isclose(mcdiarmid_bound([1] * 100, 30.0), 2 * math.exp(-9))
    assert mcdiarmid_bound([1], 0.1) == 1.0  # clamped
    with pytest.raises(InvalidParam):
        mcdiarmid_bound([], 1.0)
    with pytest.raises(InvalidParam):
        mcdiarmid_bound([-1.0], 1.0)
    with pytest.raises(InvalidParam):
        mcdiarmid_bound([1.0], 0.0)
    with pytest.raises(InvalidParam):
        mcdiarmid_bound([0.0], 1.0)


def test_realized_effect_vector_caps_at_s():
    sq, blocks = block_structured_square(16, 4, seed=7)
    _, trace, _ = block_transversal(sq, blocks, 3, np.random.default_rng(7))
    for row in range(16):
        effects = realized_effect_vector(trace, blocks, row)
        assert (effects <= 3).all()
