"""Interpretable property axes in word-embedding space.

Axes are built from seed words, or fitted to human ratings with a pointwise
or a margin-ranking loss. Words are scored by scalar projection, and axes are
evaluated by pairwise order consistency under crossvalidation.
"""

__version__ = "0.1.0"

from .errors import (
    AxisError, EmbeddingFormatError, FitError, MetricError, PropaxisError,
    RegressionError, SeedError,
)
from .embeddings import EmbeddingTable, WordVector, load_embeddings, lookup, save_embeddings
from .axes import (
    Axis, ScoreTable, SeedSpec, build_seed_axis, default_seed_spec, load_axis,
    load_seed_spec, project_matrix, project_words, save_axis, save_seed_spec, scalar_projection,
)
from .fitting import (
    FitConfig, PairSet, RatingDataset, fit_pointwise_axis, fit_ranking_axis,
    load_ratings, loss_gradient, ranking_loss, sample_training_pairs, save_ratings,
)
from .metrics import EvalReport, kfold_crossvalidate, pearson, poc, xpoc, zscore
from .seedsearch import (
    SearchState, TargetSignal, greedy_seed_search, ols_fit, replay, score_seed_spec,
    separate_seed_search,
)
