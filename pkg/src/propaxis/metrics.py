"""Rank-consistency metrics and k-fold crossvalidation of axes.

Tie policy for ``poc`` and ``xpoc``: pairs tied in gold are left out of the
denominator; pairs tied in prediction count as misordered.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .axes import Axis, SeedSpec, build_seed_axis, format_float, project_matrix
from .embeddings import EmbeddingTable
from .errors import MetricError, PropaxisError
from .fitting import FitConfig, RatingDataset, fit_pointwise_axis, fit_ranking_axis


def _as_mapping(values) -> dict:
    if isinstance(values, Mapping):
        return dict(values)
    out = {}
    for w, v in values:
        if w in out:
            raise MetricError(f"word {w!r} listed twice")
        out[w] = float(v)
    return out


def _aligned(gold, pred) -> Tuple[np.ndarray, np.ndarray]:
    g, p = _as_mapping(gold), _as_mapping(pred)
    if set(g) != set(p):
        diff = sorted(set(g) ^ set(p))
        raise MetricError(f"gold and prediction word sets differ: {diff[:10]}")
    words = list(g)
    return (np.array([g[w] for w in words], dtype=np.float64),
            np.array([p[w] for w in words], dtype=np.float64))


def _agreement(g_rows, g_cols, p_rows, p_cols, mask=None) -> Tuple[int, int]:
    """Count (correct, eligible) over the pairs (row item, column item)."""
    gs = np.sign(np.subtract.outer(g_rows, g_cols))
    ps = np.sign(np.subtract.outer(p_rows, p_cols))
    eligible = gs != 0
    if mask is not None:
        eligible &= mask
    correct = eligible & (gs == ps)
    return int(correct.sum()), int(eligible.sum())


def within_pair_counts(gold, pred) -> Tuple[int, int]:
    """``(correct, eligible)`` over unordered pairs of ``gold``'s words."""
    g, p = _aligned(gold, pred)
    upper = np.triu(np.ones((len(g), len(g)), dtype=bool), k=1)
    return _agreement(g, g, p, p, upper)


def poc(gold, pred) -> float:
    """Pairwise order consistency: fraction of gold-untied pairs ordered correctly.

    ``gold`` and ``pred`` are mappings or ``(word, value)`` sequences over the
    same words.
    """
    g, _ = _aligned(gold, pred)
    if len(g) < 2:
        raise MetricError("poc needs at least 2 words")
    correct, total = within_pair_counts(gold, pred)
    if total == 0:
        raise MetricError("poc undefined: all gold values tied")
    return correct / total


def cross_pair_counts(gold_train, pred_train, gold_test, pred_test) -> Tuple[int, int]:
    gtr, ptr = _aligned(gold_train, pred_train)
    gte, pte = _aligned(gold_test, pred_test)
    return _agreement(gte, gtr, pte, ptr)


def xpoc(gold_train, pred_train, gold_test, pred_test) -> float:
    """Order consistency pooled over test-test pairs and train-test pairs."""
    gtr, gte = _as_mapping(gold_train), _as_mapping(gold_test)
    if not gtr or not gte:
        raise MetricError("xpoc needs nonempty train and test sets")
    overlap = set(gtr) & set(gte)
    if overlap:
        raise MetricError(f"train and test words overlap: {sorted(overlap)[:10]}")
    c1, t1 = within_pair_counts(gold_test, pred_test)
    c2, t2 = cross_pair_counts(gold_train, pred_train, gold_test, pred_test)
    if t1 + t2 == 0:
        raise MetricError("xpoc undefined: no gold-untied pairs")
    return (c1 + c2) / (t1 + t2)


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise MetricError("pearson needs two 1-d inputs of equal length")
    if len(x) < 2:
        raise MetricError("pearson needs at least 2 values")
    dx, dy = x - x.mean(), y - y.mean()
    sxx, syy = float(dx @ dx), float(dy @ dy)
    if sxx == 0 or syy == 0:
        raise MetricError("pearson undefined: zero variance")
    r = float(dx @ dy) / math.sqrt(sxx * syy)
    return min(1.0, max(-1.0, r))


def zscore(values: Sequence[float]) -> np.ndarray:
    """Standardize to mean 0 and population standard deviation 1."""
    v = np.asarray(values, dtype=np.float64)
    if v.ndim != 1 or len(v) < 2:
        raise MetricError("zscore needs at least 2 values")
    sd = float(np.std(v))
    if sd == 0:
        raise MetricError("zscore undefined: zero variance")
    return (v - v.mean()) / sd


# ---------------------------------------------------------------------------
# crossvalidation


@dataclass
class FoldResult:
    fold: int
    poc: Optional[float]
    xpoc: Optional[float]
    pearson: Optional[float]
    n_test_pairs: int
    n_cross_pairs: int


@dataclass
class EvalReport:
    method: str
    per_fold: List[FoldResult]
    aggregate: dict
    config_digest: str
    folds: List[List[str]] = field(default_factory=list)

    def to_tsv(self) -> str:
        def fmt(x):
            return "NA" if x is None else format_float(x)

        lines = ["fold\tpoc\txpoc\tpearson\tn_test_pairs\tn_cross_pairs"]
        for r in self.per_fold:
            lines.append("\t".join([
                str(r.fold), fmt(r.poc), fmt(r.xpoc), fmt(r.pearson),
                str(r.n_test_pairs), str(r.n_cross_pairs),
            ]))
        a = self.aggregate
        lines.append("\t".join([
            "aggregate", fmt(a["poc"]), fmt(a["xpoc"]), fmt(a["pearson"]),
            str(a["n_test_pairs"]), str(a["n_cross_pairs"]),
        ]))
        return "\n".join(lines) + "\n"

    def write(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.to_tsv())


def fold_assignments(n: int, k: int, rng_seed: int) -> List[np.ndarray]:
    """Shuffle ``range(n)`` and cut it into ``k`` folds differing in size by at most one."""
    if k < 2:
        raise MetricError("k must be at least 2")
    if n < k:
        raise MetricError(f"cannot split {n} items into {k} folds")
    perm = np.random.default_rng(rng_seed).permutation(n)
    return [np.sort(part) for part in np.array_split(perm, k)]


def _mean(values) -> Optional[float]:
    vals = [v for v in values if v is not None]
    return float(np.mean(vals)) if vals else None


def _digest(obj) -> str:
    return hashlib.sha256(json.dumps(obj, sort_keys=True).encode()).hexdigest()


def evaluate_fold(axis: Axis, table: EmbeddingTable, train: RatingDataset, test: RatingDataset, fold: int) -> FoldResult:
    s_train = project_matrix(axis.direction, table.matrix(train.words))
    s_test = project_matrix(axis.direction, table.matrix(test.words))
    g_train = list(zip(train.words, train.ratings))
    g_test = list(zip(test.words, test.ratings))
    p_train = list(zip(train.words, s_train))
    p_test = list(zip(test.words, s_test))
    c1, t1 = within_pair_counts(g_test, p_test)
    c2, t2 = cross_pair_counts(g_train, p_train, g_test, p_test)
    try:
        r = pearson(test.ratings, s_test)
    except MetricError:
        r = None
    return FoldResult(
        fold,
        c1 / t1 if t1 else None,
        (c1 + c2) / (t1 + t2) if t1 + t2 else None,
        r, t1, t2,
    )


def kfold_crossvalidate(
    dataset: RatingDataset,
    table: EmbeddingTable,
    k: int,
    fit: Union[FitConfig, SeedSpec],
    rng_seed: int = 0,
    seed_spec: Optional[SeedSpec] = None,
) -> EvalReport:
    """Crossvalidate an axis construction method over ``k`` shuffled folds.

    ``fit`` is a :class:`SeedSpec` to evaluate a seed-based axis, or a
    :class:`FitConfig` to fit on each training split. The pointwise method
    also needs ``seed_spec``; the ranking method uses it for initialization
    when ``fit.init == "seed_axis"``. Folds whose test split has no untied
    pair report ``poc`` as ``None``.
    """
    data = dataset.restrict_to(table)
    parts = fold_assignments(len(data), k, rng_seed)

    seed_axis = None
    if isinstance(fit, SeedSpec):
        method = "seed"
        seed_axis = build_seed_axis(table, fit)
        config_blob = {"method": "seed", "seeds": fit.to_dict()}
    elif isinstance(fit, FitConfig):
        method = fit.method
        if seed_spec is not None:
            seed_axis = build_seed_axis(table, seed_spec)
        elif method == "pointwise":
            raise PropaxisError("pointwise crossvalidation requires a seed spec")
        config_blob = {
            "method": method, "config": fit.to_dict(),
            "seeds": None if seed_spec is None else seed_spec.to_dict(),
        }
    else:
        raise TypeError("fit must be a FitConfig or a SeedSpec")
    config_blob.update(k=k, rng_seed=rng_seed)

    results = []
    for i, test_idx in enumerate(parts):
        test_set = set(test_idx.tolist())
        train_idx = [j for j in range(len(data)) if j not in test_set]
        train, test = data.subset(train_idx), data.subset(test_idx)
        if method == "seed":
            axis = seed_axis
        elif method == "ranking":
            axis = fit_ranking_axis(train, table, fit, seed_axis)
        else:
            axis = fit_pointwise_axis(train, table, fit, seed_axis)
        results.append(evaluate_fold(axis, table, train, test, i))

    aggregate = {
        "poc": _mean(r.poc for r in results),
        "xpoc": _mean(r.xpoc for r in results),
        "pearson": _mean(r.pearson for r in results),
        "n_test_pairs": sum(r.n_test_pairs for r in results),
        "n_cross_pairs": sum(r.n_cross_pairs for r in results),
    }
    return EvalReport(
        method, results, aggregate, _digest(config_blob),
        folds=[[data.words[j] for j in p] for p in parts],
    )
