"""Loading and lookup of pretrained word embeddings in the plain text format.

The text format is one entry per line, a token followed by whitespace
separated floats::

    the 0.418 0.24968 -0.41242 ...

An optional ``<count> <dim>`` header line (two integers, nothing else) is
detected and skipped.
"""

from __future__ import annotations

import logging
import math
import unicodedata
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Optional

import numpy as np

from .errors import EmbeddingFormatError

logger = logging.getLogger(__name__)


def normalize_word(word: str) -> str:
    """NFC-normalize and lowercase ``word``; applied at load and lookup."""
    return unicodedata.normalize("NFC", word).lower()


@dataclass(frozen=True)
class WordVector:
    word: str
    values: np.ndarray


@dataclass(frozen=True)
class EmbeddingTable:
    """Immutable mapping from normalized words to float64 vectors.

    Rows of ``vectors`` follow the insertion order of ``words``, which is the
    order of first occurrence in the source file.
    """

    words: tuple
    vectors: np.ndarray
    source: str = ""
    n_duplicates: int = 0
    _index: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        vectors = np.array(self.vectors, dtype=np.float64)
        if vectors.ndim != 2 or vectors.shape[0] != len(self.words):
            raise EmbeddingFormatError(
                "vectors must be a (n_words, dim) array matching words"
            )
        if vectors.shape[0] == 0 or vectors.shape[1] == 0:
            raise EmbeddingFormatError("embedding table is empty")
        if not np.all(np.isfinite(vectors)):
            raise EmbeddingFormatError("embedding table contains non-finite values")
        vectors.setflags(write=False)
        index = {}
        for i, w in enumerate(self.words):
            if w in index:
                raise EmbeddingFormatError(f"duplicate word {w!r} in table")
            index[w] = i
        object.__setattr__(self, "words", tuple(self.words))
        object.__setattr__(self, "vectors", vectors)
        object.__setattr__(self, "_index", index)

    @classmethod
    def from_dict(cls, mapping, source: str = "") -> "EmbeddingTable":
        """Build a table from a ``{word: vector}`` mapping, normalizing words."""
        words, rows = [], []
        seen = set()
        dups = 0
        for w, v in mapping.items():
            key = normalize_word(w)
            if key in seen:
                dups += 1
                continue
            seen.add(key)
            words.append(key)
            rows.append(np.asarray(v, dtype=np.float64))
        return cls(tuple(words), np.vstack(rows), source=source, n_duplicates=dups)

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return normalize_word(word) in self._index

    def __iter__(self) -> Iterator[str]:
        return iter(self.words)

    def index_of(self, word: str) -> Optional[int]:
        return self._index.get(normalize_word(word))

    def vector(self, word: str) -> Optional[np.ndarray]:
        i = self.index_of(word)
        return None if i is None else self.vectors[i]

    def matrix(self, words) -> np.ndarray:
        """Stack vectors for ``words``; every word must be present."""
        idx = []
        for w in words:
            i = self.index_of(w)
            if i is None:
                raise KeyError(w)
            idx.append(i)
        return self.vectors[idx]

    def translated(self, offset) -> "EmbeddingTable":
        """Return a copy with ``offset`` added to every vector."""
        return EmbeddingTable(
            self.words, self.vectors + np.asarray(offset, dtype=np.float64),
            source=self.source,
        )


def lookup(table: EmbeddingTable, word: str) -> Optional[WordVector]:
    """Return the stored vector for ``word``, or ``None`` when absent."""
    i = table.index_of(word)
    if i is None:
        return None
    return WordVector(table.words[i], table.vectors[i])


def _is_header(tokens) -> bool:
    return len(tokens) == 2 and all(t.isdigit() for t in tokens)


def load_embeddings(path, expected_dim: Optional[int] = None) -> EmbeddingTable:
    """Read a text-format embedding file.

    Parameters
    ----------
    path : path-like
        UTF-8 file, one ``word float float ...`` entry per line.
    expected_dim : int, optional
        If given, the inferred dimensionality must equal it.

    Returns
    -------
    EmbeddingTable
        Duplicate words keep their first occurrence; the number of dropped
        duplicates is stored in ``n_duplicates`` and logged as a warning.
    """
    path = Path(path)
    if expected_dim is not None and expected_dim <= 0:
        raise EmbeddingFormatError("expected_dim must be a positive integer")
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise EmbeddingFormatError(f"cannot read {path}: {exc.strerror}") from exc

    words, rows = [], []
    seen = set()
    dups = 0
    dim = expected_dim
    with fh:
        for lineno, line in enumerate(fh, start=1):
            tokens = line.split()
            if not tokens:
                continue
            if lineno == 1 and _is_header(tokens):
                continue
            word, values = tokens[0], tokens[1:]
            if not values:
                raise EmbeddingFormatError(f"{path}:{lineno}: no vector components")
            if dim is None:
                dim = len(values)
            elif len(values) != dim:
                raise EmbeddingFormatError(
                    f"{path}:{lineno}: expected {dim} components, found {len(values)}"
                )
            try:
                vec = [float(v) for v in values]
            except ValueError as exc:
                raise EmbeddingFormatError(f"{path}:{lineno}: {exc}") from exc
            if not all(math.isfinite(v) for v in vec):
                raise EmbeddingFormatError(f"{path}:{lineno}: non-finite component")
            key = normalize_word(word)
            if key in seen:
                dups += 1
                continue
            seen.add(key)
            words.append(key)
            rows.append(vec)

    if not rows:
        raise EmbeddingFormatError(f"{path}: no usable lines")
    if dups:
        logger.warning("%s: skipped %d duplicate word(s)", path, dups)
    return EmbeddingTable(
        tuple(words), np.array(rows, dtype=np.float64),
        source=str(path), n_duplicates=dups,
    )


def save_embeddings(table: EmbeddingTable, path) -> None:
    """Write ``table`` in the text format; values use round-trip ``repr``."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for w, row in zip(table.words, table.vectors):
            fh.write(w + " " + " ".join(repr(float(x)) for x in row) + "\n")
