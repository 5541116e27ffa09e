"""
Greedy seed search
==================

The target signal is the projection onto an axis built from three positive
seeds. The search starts from two of them and a candidate list that holds
the third plus some distractors.
"""

import numpy as np

from propaxis import (
    EmbeddingTable, SeedSpec, TargetSignal, build_seed_axis, greedy_seed_search, project_matrix,
    replay,
)
from propaxis.seedsearch import format_history

rng = np.random.default_rng(0)
items = [f"v{i}" for i in range(40)]
extra = ["p1", "p2", "p3", "n1", "n2", "d0", "d1", "d2"]
table = EmbeddingTable(tuple(items + extra), rng.standard_normal((48, 10)))

full = SeedSpec("ag", ["p1", "p2", "p3"], ["n1", "n2"])
target_axis = build_seed_axis(table, full)
target = TargetSignal(list(zip(items, project_matrix(target_axis.direction, table.matrix(items)))))

start = SeedSpec("ag", ["p1", "p2"], ["n1", "n2"])
candidates = [
    ("ag", "positive", "d0"),
    ("ag", "negative", "d1"),
    ("ag", "positive", "p3"),
    ("ag", "negative", "n2"),  # already present: tried as a removal
    ("ag", "positive", "d2"),
]
state = greedy_seed_search([start], candidates, table, target)
print(f"r2 {state.initial_r2:.4f} -> {state.r2:.4f}")
print(state.spec("ag"))
print(format_history(state))

# accepted moves alone reproduce the final seeds and score
specs, r2 = replay(state, table, target)
print(specs == state.specs, r2 == state.r2)
