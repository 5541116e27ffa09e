"""Seed-based property axes and scalar projection.

An axis is built from two pole word lists as the mean of all pairwise
differences ``vec(p) - vec(n)``, so larger projections mean more of the
property named by the positive pole.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from .embeddings import EmbeddingTable, WordVector, normalize_word
from .errors import AxisError, SeedError

logger = logging.getLogger(__name__)

METHODS = ("seed", "pointwise", "ranking")
DEFAULT_SPECS = ("agentivity", "telicity")


@dataclass(frozen=True)
class SeedSpec:
    property_name: str
    positive: tuple
    negative: tuple

    def __post_init__(self):
        object.__setattr__(self, "positive", tuple(self.positive))
        object.__setattr__(self, "negative", tuple(self.negative))
        if not self.positive or not self.negative:
            raise SeedError(f"{self.property_name}: both pole lists must be nonempty")
        for pole in (self.positive, self.negative):
            if len(set(pole)) != len(pole):
                raise SeedError(f"{self.property_name}: repeated seed word in {list(pole)}")
        overlap = set(self.positive) & set(self.negative)
        if overlap:
            raise SeedError(
                f"{self.property_name}: words on both poles: {sorted(overlap)}"
            )

    def swapped(self) -> "SeedSpec":
        return SeedSpec(self.property_name, self.negative, self.positive)

    def pole(self, name: str) -> tuple:
        if name not in ("positive", "negative"):
            raise SeedError(f"unknown pole {name!r}")
        return getattr(self, name)

    def to_dict(self) -> dict:
        return {
            "property_name": self.property_name,
            "positive": list(self.positive),
            "negative": list(self.negative),
        }


@dataclass(frozen=True)
class Axis:
    property_name: str
    direction: np.ndarray
    method: str
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        d = np.array(self.direction, dtype=np.float64)
        if d.ndim != 1 or d.size == 0:
            raise AxisError("axis direction must be a nonempty vector")
        if not np.all(np.isfinite(d)):
            raise AxisError("axis direction has non-finite components")
        if not np.any(d):
            raise AxisError(f"{self.property_name}: axis direction is the zero vector")
        if self.method not in METHODS:
            raise AxisError(f"unknown axis method {self.method!r}")
        d.setflags(write=False)
        object.__setattr__(self, "direction", d)

    @property
    def dim(self) -> int:
        return self.direction.shape[0]

    def scaled(self, c: float) -> "Axis":
        return Axis(self.property_name, c * self.direction, self.method, dict(self.metadata))


@dataclass
class ScoreTable:
    axis_name: str
    rows: List[tuple] = field(default_factory=list)
    missing: List[str] = field(default_factory=list)

    @property
    def words(self) -> List[str]:
        return [w for w, _ in self.rows]

    @property
    def scores(self) -> np.ndarray:
        return np.array([s for _, s in self.rows], dtype=np.float64)

    def as_dict(self) -> dict:
        return dict(self.rows)

    def __len__(self):
        return len(self.rows)


def _resolve(table: EmbeddingTable, words: Sequence[str]):
    found, missing = [], []
    for w in words:
        (found if w in table else missing).append(w)
    return found, missing


def _unit_rows(m: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(m, axis=1, keepdims=True)
    if np.any(norms == 0):
        raise AxisError("cannot unit-normalize a zero vector")
    return m / norms


def build_seed_axis(table: EmbeddingTable, spec: SeedSpec, normalize: bool = False) -> Axis:
    """Mean of all difference vectors between resolvable positive and negative seeds.

    Seeds missing from ``table`` are skipped and listed under
    ``metadata["missing_seeds"]``; a warning names each one. With
    ``normalize=True`` seed vectors are scaled to unit length first.
    """
    pos, pos_missing = _resolve(table, spec.positive)
    neg, neg_missing = _resolve(table, spec.negative)
    missing = pos_missing + neg_missing
    for w in missing:
        logger.warning("%s: seed word %r not in embedding table", spec.property_name, w)
    if not pos:
        raise SeedError(f"{spec.property_name}: no positive seed resolves in the table")
    if not neg:
        raise SeedError(f"{spec.property_name}: no negative seed resolves in the table")
    P = table.matrix(pos)
    N = table.matrix(neg)
    if normalize:
        P, N = _unit_rows(P), _unit_rows(N)
    # mean over all (p, n) of p - n factorizes into mean(P) - mean(N)
    direction = P.mean(axis=0) - N.mean(axis=0)
    if not np.any(direction):
        raise SeedError(f"{spec.property_name}: seed differences average to the zero vector")
    metadata = {
        "seeds": spec.to_dict(),
        "resolved_positive": pos,
        "resolved_negative": neg,
        "missing_seeds": missing,
        "normalize": normalize,
    }
    return Axis(spec.property_name, direction, "seed", metadata)


def scalar_projection(axis, w) -> float:
    """Signed length ``(w . f) / ||f||`` of ``w`` along axis ``f``.

    ``axis`` may be an :class:`Axis` or a raw direction vector, ``w`` a
    :class:`WordVector` or a raw vector.
    """
    f = axis.direction if isinstance(axis, Axis) else np.asarray(axis, dtype=np.float64)
    v = w.values if isinstance(w, WordVector) else np.asarray(w, dtype=np.float64)
    if f.shape != v.shape:
        raise AxisError(f"dimension mismatch: axis {f.shape}, vector {v.shape}")
    norm = np.linalg.norm(f)
    if norm == 0:
        raise AxisError("zero-norm axis")
    return float(np.dot(v, f) / norm)


def project_matrix(direction: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    """Vectorized scalar projection of each row of ``vectors``."""
    norm = np.linalg.norm(direction)
    if norm == 0:
        raise AxisError("zero-norm axis")
    if vectors.shape[-1] != direction.shape[0]:
        raise AxisError(
            f"dimension mismatch: axis {direction.shape[0]}, vectors {vectors.shape[-1]}"
        )
    return vectors @ direction / norm


def project_words(
    table: EmbeddingTable, axis: Axis, words: Sequence[str], normalize: bool = False
) -> ScoreTable:
    """Score ``words`` on ``axis``; absent words go to ``ScoreTable.missing``."""
    found, missing = _resolve(table, words)
    out = ScoreTable(axis.property_name, missing=missing)
    if not found:
        return out
    m = table.matrix(found)
    if normalize:
        m = _unit_rows(m)
    scores = project_matrix(axis.direction, m)
    out.rows = [(w, float(s)) for w, s in zip(found, scores)]
    return out


# ---------------------------------------------------------------------------
# file formats


def _dump_json(obj, path) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False, allow_nan=False)
    Path(path).write_text(text + "\n", encoding="utf-8")


def save_seed_spec(spec: SeedSpec, path) -> None:
    _dump_json(spec.to_dict(), path)


def seed_spec_from_dict(data: dict) -> SeedSpec:
    try:
        name = data["property_name"]
        pos, neg = data["positive"], data["negative"]
    except (KeyError, TypeError) as exc:
        raise SeedError(f"seed spec is missing field {exc}") from exc
    if not all(isinstance(w, str) for w in list(pos) + list(neg)):
        raise SeedError("seed words must be strings")
    return SeedSpec(str(name), [normalize_word(w) for w in pos], [normalize_word(w) for w in neg])


def load_seed_spec(path) -> SeedSpec:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise SeedError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise SeedError(f"{path}: invalid seed file: {exc}") from exc
    return seed_spec_from_dict(data)


def default_seed_spec(name: str) -> SeedSpec:
    """One of the shipped seed sets, ``"agentivity"`` or ``"telicity"``."""
    if name not in DEFAULT_SPECS:
        raise SeedError(f"no shipped seed spec named {name!r}; have {DEFAULT_SPECS}")
    text = resources.files("propaxis.data").joinpath(f"{name}.seeds").read_text("utf-8")
    return seed_spec_from_dict(json.loads(text))


def default_seed_path(name: str) -> Path:
    if name not in DEFAULT_SPECS:
        raise SeedError(f"no shipped seed spec named {name!r}; have {DEFAULT_SPECS}")
    return Path(str(resources.files("propaxis.data").joinpath(f"{name}.seeds")))


def axis_to_dict(axis: Axis) -> dict:
    return {
        "property_name": axis.property_name,
        "method": axis.method,
        "dim": axis.dim,
        # json writes floats with repr, which round-trips exactly
        "direction": [float(x) for x in axis.direction],
        "metadata": axis.metadata,
    }


def save_axis(axis: Axis, path) -> None:
    _dump_json(axis_to_dict(axis), path)


def load_axis(path) -> Axis:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise AxisError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise AxisError(f"{path}: invalid axis file: {exc}") from exc
    try:
        direction = np.array(data["direction"], dtype=np.float64)
        if direction.shape != (int(data["dim"]),):
            raise AxisError(f"{path}: direction length does not match dim")
        return Axis(data["property_name"], direction, data["method"], data.get("metadata", {}))
    except (KeyError, TypeError) as exc:
        raise AxisError(f"{path}: axis file is missing field {exc}") from exc


def format_float(x: float) -> str:
    return "%.17g" % x


def write_scores(scores: ScoreTable, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for w, s in scores.rows:
            fh.write(f"{w}\t{format_float(s)}\n")


def read_scores(path) -> ScoreTable:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line:
                w, s = line.split("\t")
                rows.append((w, float(s)))
    return ScoreTable(Path(path).stem, rows)
