"""Fitting property axes to human ratings.

Two models are provided:

* a pointwise model: squared error between each word's projection and its
  gold rating, plus ``lam * (1 - cos(f, f_seed))`` pulling toward a seed axis;
* a ranking model: hinge loss ``max(0, d - s_b + s_a)`` summed over sampled
  pairs whose gold ratings differ by at least ``d``, ``b`` being the higher
  rated word.

Both are minimized by full-batch gradient descent. A step that increases the
loss is rejected and the learning rate halved, so the loss sequence is
non-increasing.
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .axes import Axis
from .embeddings import EmbeddingTable, normalize_word
from .errors import AxisError, FitError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RatingDataset:
    property_name: str
    records: tuple
    provenance: str = ""

    def __post_init__(self):
        recs = tuple((str(w), float(r)) for w, r in self.records)
        words = [w for w, _ in recs]
        if len(set(words)) != len(words):
            dup = sorted({w for w in words if words.count(w) > 1})
            raise FitError(f"{self.property_name}: duplicate rated words {dup}")
        if not np.all(np.isfinite([r for _, r in recs])):
            raise FitError(f"{self.property_name}: non-finite rating")
        object.__setattr__(self, "records", recs)

    @property
    def words(self) -> List[str]:
        return [w for w, _ in self.records]

    @property
    def ratings(self) -> np.ndarray:
        return np.array([r for _, r in self.records], dtype=np.float64)

    def __len__(self):
        return len(self.records)

    def subset(self, indices) -> "RatingDataset":
        return RatingDataset(
            self.property_name, [self.records[i] for i in indices], self.provenance
        )

    def restrict_to(self, table: EmbeddingTable) -> "RatingDataset":
        """Drop words absent from ``table``, logging how many were dropped."""
        kept = [(w, r) for w, r in self.records if w in table]
        dropped = len(self.records) - len(kept)
        if dropped:
            missing = [w for w, _ in self.records if w not in table]
            logger.warning(
                "%s: dropped %d rated word(s) missing from embeddings: %s",
                self.property_name, dropped, " ".join(missing),
            )
        return RatingDataset(self.property_name, kept, self.provenance)


def load_ratings(path, property_name: Optional[str] = None) -> RatingDataset:
    """Read ``word<TAB>rating`` lines; ``#`` lines and blank lines are skipped."""
    path = Path(path)
    records = []
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise FitError(f"cannot read {path}: {exc.strerror}") from exc
    with fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\r\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise FitError(f"{path}:{lineno}: expected word<TAB>rating")
            try:
                value = float(parts[1])
            except ValueError as exc:
                raise FitError(f"{path}:{lineno}: {exc}") from exc
            records.append((normalize_word(parts[0].strip()), value))
    if not records:
        raise FitError(f"{path}: no ratings")
    return RatingDataset(property_name or path.stem, records, str(path))


def save_ratings(dataset: RatingDataset, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for w, r in dataset.records:
            fh.write(f"{w}\t{r!r}\n")


@dataclass(frozen=True)
class FitConfig:
    method: str = "ranking"
    margin_fraction: float = 0.2
    pair_count: int = 300
    learning_rate: float = 0.05
    epochs: int = 500
    init: str = "random_unit"
    pointwise_seed_weight: float = 1.0
    rng_seed: int = 0

    def __post_init__(self):
        if self.method not in ("pointwise", "ranking"):
            raise FitError(f"unknown fit method {self.method!r}")
        if self.init not in ("seed_axis", "random_unit"):
            raise FitError(f"unknown init {self.init!r}")
        if not self.learning_rate > 0:
            raise FitError("learning_rate must be positive")
        if self.epochs < 1:
            raise FitError("epochs must be at least 1")
        if not self.margin_fraction > 0:
            raise FitError("margin_fraction must be positive")
        if self.pair_count < 1:
            raise FitError("pair_count must be at least 1")
        if self.pointwise_seed_weight < 0:
            raise FitError("pointwise_seed_weight must be non-negative")

    def to_dict(self) -> dict:
        return asdict(self)

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()


@dataclass(frozen=True)
class PairSet:
    """Sampled ``(low_word, high_word)`` pairs with ``gold(high) - gold(low) >= margin``."""

    pairs: tuple
    margin: float
    requested_size: int
    rng_seed: int
    n_eligible: int = 0

    def __len__(self):
        return len(self.pairs)

    @property
    def low(self) -> List[str]:
        return [a for a, _ in self.pairs]

    @property
    def high(self) -> List[str]:
        return [b for _, b in self.pairs]


def eligible_pairs(dataset: RatingDataset, margin: float) -> List[Tuple[str, str]]:
    """All ``(low, high)`` pairs with a gold gap of at least ``margin``, in dataset order."""
    words = dataset.words
    y = dataset.ratings
    out = []
    for i in range(len(words)):
        for j in range(i + 1, len(words)):
            gap = y[j] - y[i]
            if gap >= margin:
                out.append((words[i], words[j]))
            elif -gap >= margin:
                out.append((words[j], words[i]))
    return out


def sample_training_pairs(dataset: RatingDataset, config: FitConfig) -> PairSet:
    """Draw up to ``config.pair_count`` eligible pairs without replacement.

    The margin is ``margin_fraction`` times the population standard deviation
    of the ratings in ``dataset``, which should be the training split only.
    """
    if len(dataset) < 2:
        raise FitError(f"{dataset.property_name}: need at least 2 rated words")
    sdev = float(np.std(dataset.ratings))
    if sdev == 0:
        raise FitError(f"{dataset.property_name}: no eligible pairs (all ratings equal)")
    margin = config.margin_fraction * sdev
    pool = eligible_pairs(dataset, margin)
    if not pool:
        raise FitError(f"{dataset.property_name}: no eligible pairs with margin {margin!r}")
    if len(pool) > config.pair_count:
        rng = np.random.default_rng(config.rng_seed)
        chosen = np.sort(rng.choice(len(pool), size=config.pair_count, replace=False))
        pairs = [pool[i] for i in chosen]
    else:
        pairs = pool
    return PairSet(tuple(pairs), margin, config.pair_count, config.rng_seed, len(pool))


# ---------------------------------------------------------------------------
# losses and gradients


def _norm(f: np.ndarray) -> float:
    n = float(np.linalg.norm(f))
    if n == 0:
        raise AxisError("zero-norm direction")
    return n


def _projection_grad(f: np.ndarray, norm: float, v: np.ndarray) -> np.ndarray:
    """Gradient w.r.t. ``f`` of ``v . f / ||f||``."""
    return v / norm - (v @ f) * f / norm**3


@dataclass(frozen=True)
class RankingBatch:
    """Pair differences ``vec(low) - vec(high)`` stacked for vectorized evaluation."""

    diffs: np.ndarray
    margin: float

    @classmethod
    def from_pairs(cls, pairs: PairSet, table: EmbeddingTable) -> "RankingBatch":
        words = set(pairs.low) | set(pairs.high)
        missing = sorted(w for w in words if w not in table)
        if missing:
            raise FitError(f"pair words missing from embeddings: {' '.join(missing)}")
        if not pairs.pairs:
            return cls(np.zeros((0, table.dim)), pairs.margin)
        return cls(table.matrix(pairs.low) - table.matrix(pairs.high), pairs.margin)


@dataclass(frozen=True)
class PointwiseBatch:
    vectors: np.ndarray
    gold: np.ndarray
    seed_direction: np.ndarray
    seed_weight: float

    @classmethod
    def from_dataset(cls, dataset, table, seed_direction, seed_weight) -> "PointwiseBatch":
        missing = [w for w in dataset.words if w not in table]
        if missing:
            raise FitError(f"rated words missing from embeddings: {' '.join(missing)}")
        seed = np.asarray(seed_direction, dtype=np.float64)
        _norm(seed)
        return cls(table.matrix(dataset.words), dataset.ratings, seed, float(seed_weight))


def _ranking_hinges(f: np.ndarray, batch: RankingBatch) -> np.ndarray:
    # s_low - s_high = (low - high) . f / ||f||
    return batch.margin + batch.diffs @ f / _norm(f)


def ranking_loss(direction, pairs, table: Optional[EmbeddingTable] = None) -> float:
    """Sum over pairs of ``max(0, d - s_high + s_low)``.

    ``pairs`` is a :class:`PairSet` (resolved against ``table``) or a
    prebuilt :class:`RankingBatch`.
    """
    batch = pairs if isinstance(pairs, RankingBatch) else RankingBatch.from_pairs(pairs, table)
    f = np.asarray(direction, dtype=np.float64)
    return float(np.sum(np.maximum(0.0, _ranking_hinges(f, batch))))


def ranking_gradient(direction, batch: RankingBatch) -> np.ndarray:
    f = np.asarray(direction, dtype=np.float64)
    norm = _norm(f)
    active = _ranking_hinges(f, batch) > 0
    if not np.any(active):
        return np.zeros_like(f)
    v = batch.diffs[active].sum(axis=0)
    return _projection_grad(f, norm, v)


def pointwise_loss(direction, batch: PointwiseBatch) -> float:
    """Mean squared projection error plus ``seed_weight * (1 - cos(f, f_seed))``."""
    f = np.asarray(direction, dtype=np.float64)
    norm = _norm(f)
    resid = batch.vectors @ f / norm - batch.gold
    loss = float(np.mean(resid**2))
    if batch.seed_weight:
        seed = batch.seed_direction
        cos = float(f @ seed) / (norm * np.linalg.norm(seed))
        loss += batch.seed_weight * (1.0 - cos)
    return loss


def pointwise_gradient(direction, batch: PointwiseBatch) -> np.ndarray:
    f = np.asarray(direction, dtype=np.float64)
    norm = _norm(f)
    proj = batch.vectors @ f / norm
    resid = proj - batch.gold
    n = len(batch.gold)
    # sum_w 2 r_w * grad(proj_w) = 2/||f|| (V^T r - (r . proj) f / ||f||)
    grad = 2.0 / (n * norm) * (batch.vectors.T @ resid - (resid @ proj) * f / norm)
    if batch.seed_weight:
        seed = batch.seed_direction
        snorm = float(np.linalg.norm(seed))
        dcos = seed / (norm * snorm) - float(f @ seed) * f / (norm**3 * snorm)
        grad = grad - batch.seed_weight * dcos
    return grad


def loss_gradient(direction, batch) -> np.ndarray:
    """Analytic gradient of the loss that ``batch`` defines."""
    if isinstance(batch, RankingBatch):
        return ranking_gradient(direction, batch)
    if isinstance(batch, PointwiseBatch):
        return pointwise_gradient(direction, batch)
    raise TypeError(f"unsupported batch type {type(batch).__name__}")


def batch_loss(direction, batch) -> float:
    if isinstance(batch, RankingBatch):
        return ranking_loss(direction, batch)
    if isinstance(batch, PointwiseBatch):
        return pointwise_loss(direction, batch)
    raise TypeError(f"unsupported batch type {type(batch).__name__}")


# ---------------------------------------------------------------------------
# optimization


@dataclass
class Trace:
    losses: List[float] = field(default_factory=list)
    learning_rates: List[float] = field(default_factory=list)


def gradient_descent(f0, batch, learning_rate: float, epochs: int, trace: Optional[Trace] = None):
    """Full-batch descent with halve-on-increase backoff. Returns the final direction.

    An epoch whose tentative step would raise the loss keeps the current
    direction and halves the learning rate. Accepted iterates are rescaled to
    unit length: both losses depend on the direction only, and the gradient is
    orthogonal to it, so without rescaling the norm grows and the effective
    step shrinks. Stops early at zero loss or a zero gradient.
    """
    f = np.array(f0, dtype=np.float64)
    loss = batch_loss(f, batch)
    lr = learning_rate
    if trace is not None:
        trace.losses.append(loss)
        trace.learning_rates.append(lr)
    for _ in range(epochs):
        if loss == 0.0:
            break
        g = loss_gradient(f, batch)
        if not np.any(g):
            break
        cand = f - lr * g
        cand /= np.linalg.norm(cand)
        cand_loss = batch_loss(cand, batch)
        if cand_loss <= loss:
            f, loss = cand, cand_loss
        else:
            lr *= 0.5
        if trace is not None:
            trace.losses.append(loss)
            trace.learning_rates.append(lr)
    return f


def random_unit(dim: int, rng_seed: int) -> np.ndarray:
    rng = np.random.default_rng(rng_seed)
    v = rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def _require_resolvable(dataset: RatingDataset, table: EmbeddingTable) -> RatingDataset:
    usable = dataset.restrict_to(table)
    if len(usable) == 0:
        raise FitError(f"{dataset.property_name}: no rated word has an embedding")
    return usable


def _metadata(config: FitConfig, dataset: RatingDataset, seed_axis: Optional[Axis], **extra):
    meta = {
        "config": config.to_dict(),
        "config_digest": config.digest(),
        "rng_seed": config.rng_seed,
        "n_train_words": len(dataset),
        "ratings_provenance": dataset.provenance,
        "seed_axis": None if seed_axis is None else seed_axis.metadata.get("seeds"),
    }
    meta.update(extra)
    return meta


def fit_ranking_axis(
    dataset: RatingDataset,
    table: EmbeddingTable,
    config: FitConfig = FitConfig(),
    seed_axis: Optional[Axis] = None,
    trace: Optional[Trace] = None,
) -> Axis:
    """Fit an axis that orders sampled gold pairs with margin ``d``.

    Starts from ``seed_axis`` when it is given and ``config.init`` is
    ``"seed_axis"``, otherwise from a unit vector drawn with ``config.rng_seed``.
    """
    if config.method != "ranking":
        raise FitError(f"fit_ranking_axis needs method='ranking', got {config.method!r}")
    usable = _require_resolvable(dataset, table)
    pairs = sample_training_pairs(usable, config)
    batch = RankingBatch.from_pairs(pairs, table)
    if config.init == "seed_axis" and seed_axis is not None:
        if seed_axis.dim != table.dim:
            raise AxisError("seed axis dimension does not match embeddings")
        f0 = seed_axis.direction
        init = "seed_axis"
    else:
        if config.init == "seed_axis":
            logger.warning("init='seed_axis' without a seed axis; using random init")
        f0 = random_unit(table.dim, config.rng_seed)
        init = "random_unit"
    f = gradient_descent(f0, batch, config.learning_rate, config.epochs, trace)
    meta = _metadata(
        config, usable, seed_axis if init == "seed_axis" else None,
        init_used=init, margin=pairs.margin, n_pairs=len(pairs),
        n_eligible_pairs=pairs.n_eligible, final_loss=ranking_loss(f, batch),
    )
    return Axis(dataset.property_name, f, "ranking", meta)


def fit_pointwise_axis(
    dataset: RatingDataset,
    table: EmbeddingTable,
    config: FitConfig,
    seed_axis: Optional[Axis],
    init_direction=None,
    trace: Optional[Trace] = None,
) -> Axis:
    """Fit an axis to ratings pointwise, regularized toward ``seed_axis``.

    Descent starts from the seed axis unless ``init_direction`` is given.
    """
    if config.method != "pointwise":
        raise FitError(f"fit_pointwise_axis needs method='pointwise', got {config.method!r}")
    if seed_axis is None:
        raise FitError("the pointwise model requires a seed axis")
    if seed_axis.dim != table.dim:
        raise AxisError("seed axis dimension does not match embeddings")
    usable = _require_resolvable(dataset, table)
    batch = PointwiseBatch.from_dataset(
        usable, table, seed_axis.direction, config.pointwise_seed_weight
    )
    f0 = seed_axis.direction if init_direction is None else np.asarray(init_direction, float)
    f = gradient_descent(f0, batch, config.learning_rate, config.epochs, trace)
    meta = _metadata(config, usable, seed_axis, final_loss=pointwise_loss(f, batch))
    return Axis(dataset.property_name, f, "pointwise", meta)


def fit_axis(dataset, table, config: FitConfig, seed_axis: Optional[Axis] = None) -> Axis:
    if config.method == "ranking":
        return fit_ranking_axis(dataset, table, config, seed_axis)
    return fit_pointwise_axis(dataset, table, config, seed_axis)
