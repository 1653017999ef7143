#!/usr/bin/env python3
"""Walkthrough: the hypergraph view, the low-matching obstruction family,
vertex blow-ups, greedy edge colouring, and the high-codegree split.
"""

import itertools

import equisquares as eq
from equisquares.hypergraph import TripartiteHypergraph, is_proper

print("=" * 70)
print("1. Squares as tripartite hypergraphs")
print("=" * 70)
square = eq.cyclic_latin(5)
h = eq.from_square(square)
print(f"cyclic order-5 square -> {len(h.edges)} edges, all degrees "
      f"{h.degree((0, 0))}, cod(row 0, col 0) = {eq.codegree(h, (0, 0), (1, 0))}")

print()
print("=" * 70)
print("2. The obstruction family: matchings stuck at two thirds")
print("=" * 70)
for t in (1, 2, 3):
    h = eq.alon_kim(t)
    matching, optimal = eq.max_matching_exact(h, budget=200_000)
    status = "optimal" if optimal else "budget hit"
    print(f"t={t}: {len(h.edges)} edges, {h.degree((0, 0))}-regular, "
          f"max matching {len(matching)} = 2t ({status}); "
          f"covers {3 * len(matching)} of {h.num_vertices} vertices")

big = eq.blow_up(eq.alon_kim(1), 3)
print(f"blow-up by 3 of t=1: {len(big.edges)} edges, degree {big.degree((0, 0))} "
      f"(18t-regular with 9t per class)")

print()
print("=" * 70)
print("3. Greedy proper edge colouring")
print("=" * 70)
for name, h in (("cyclic-5 square", eq.from_square(eq.cyclic_latin(5))),
                ("obstruction t=2", eq.alon_kim(2))):
    col = eq.greedy_edge_colouring(h)
    bound = 3 * (h.max_degree() - 1) + 1
    print(f"{name}: {col.num_colours} colours (greedy bound {bound}), "
          f"proper={is_proper(h, col)}")

print()
print("=" * 70)
print("4. Splitting a high-codegree pair")
print("=" * 70)
# five edges through the pair {(0,0),(1,0)}, plus nothing else touching it
h = TripartiteHypergraph((1, 1, 5), tuple((0, 0, z) for z in range(5)))
print(f"before: cod((0,0),(1,0)) = {eq.codegree(h, (0, 0), (1, 0))}")
h2, pullback = eq.split_high_codegree(h, 1)
worst = max(
    eq.codegree(h2, x, y)
    for x, y in itertools.combinations(h2.vertices(), 2) if x[0] != y[0]
)
print(f"after:  class sizes {h2.class_sizes}, max codegree {worst}")
col2 = eq.greedy_edge_colouring(h2)
back = pullback(col2)
print(f"colours on split graph: {col2.num_colours}; pulled back: "
      f"{back.num_colours}, proper on the original: {is_proper(h, back)}")
