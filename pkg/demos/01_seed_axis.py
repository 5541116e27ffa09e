"""
Seed axes and projections
=========================

A seed axis is the mean positive seed vector minus the mean negative one.
Words are scored by their scalar projection onto it.
"""

import numpy as np

from propaxis import EmbeddingTable, SeedSpec, build_seed_axis, project_words, scalar_projection

# a toy 3-d table: the first coordinate carries "size"
words = ["huge", "big", "large", "small", "tiny", "mouse", "whale", "cat"]
vectors = np.array([
    [2.0, 0.1, 0.0],
    [1.5, -0.2, 0.3],
    [1.4, 0.0, -0.1],
    [-1.5, 0.2, 0.1],
    [-2.0, -0.1, 0.0],
    [-1.2, 1.0, 0.5],
    [1.8, 0.9, -0.4],
    [-0.3, 1.1, 0.2],
])
table = EmbeddingTable(tuple(words), vectors)

spec = SeedSpec("size", positive=["huge", "big"], negative=["tiny", "small"])
axis = build_seed_axis(table, spec)
print("direction", np.round(axis.direction, 3))

# only the direction matters, not its length
w = table.vector("whale")
print(scalar_projection(axis, w), scalar_projection(10 * axis.direction, w))

scores = project_words(table, axis, ["mouse", "cat", "whale", "unicorn"])
for word, s in sorted(scores.rows, key=lambda r: r[1]):
    print(f"{word:8s} {s:+.3f}")
print("missing:", scores.missing)

# swapping the poles flips the axis
flipped = build_seed_axis(table, spec.swapped())
print(np.array_equal(flipped.direction, -axis.direction))
