"""Synthetic embedding tables with a known property direction.

Used by the test suite and the demos. Word vectors are standard normal; the
gold rating of a word is its projection onto a hidden unit direction ``u``
plus optional Gaussian noise. Seed words are placed at ``+-seed_offset * u``
around random points with isotropic noise, so the seed axis is a noisy
estimate of ``u``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .axes import SeedSpec
from .embeddings import EmbeddingTable
from .fitting import RatingDataset


@dataclass
class SyntheticProperty:
    table: EmbeddingTable
    dataset: RatingDataset
    direction: np.ndarray
    seeds: SeedSpec


def make_property_data(
    dim: int = 10,
    n_words: int = 100,
    noise: float = 0.0,
    n_seeds: int = 2,
    seed_offset: float = 1.0,
    seed_noise: float = 1.0,
    rng_seed: int = 0,
    name: str = "prop",
) -> SyntheticProperty:
    rng = np.random.default_rng(rng_seed)
    u = rng.standard_normal(dim)
    u /= np.linalg.norm(u)
    X = rng.standard_normal((n_words, dim))
    gold = X @ u + noise * rng.standard_normal(n_words)
    words = [f"w{i:04d}" for i in range(n_words)]

    pos = [f"pos{i}" for i in range(n_seeds)]
    neg = [f"neg{i}" for i in range(n_seeds)]
    centers = rng.standard_normal((n_seeds, dim))
    P = centers + seed_offset * u + seed_noise * rng.standard_normal((n_seeds, dim))
    N = centers - seed_offset * u + seed_noise * rng.standard_normal((n_seeds, dim))

    table = EmbeddingTable(tuple(words + pos + neg), np.vstack([X, P, N]), source="synthetic")
    dataset = RatingDataset(name, list(zip(words, gold)), provenance="synthetic")
    return SyntheticProperty(table, dataset, u, SeedSpec(name, pos, neg))
