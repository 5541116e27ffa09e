"""Greedy search over seed words against an external target signal.

Each candidate ``(property, pole, word)`` is tried in list order: the word
is added to the pole if absent and removed if present. The move is kept only
if the in-sample R^2 of a least-squares regression of the target on the
z-scored axis projections rises by more than ``tol``. Passes over the
candidate list repeat until one accepts nothing.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .axes import SeedSpec, build_seed_axis, format_float, project_matrix, save_seed_spec
from .embeddings import EmbeddingTable, normalize_word
from .errors import MetricError, PropaxisError, RegressionError, SeedError
from .metrics import zscore

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-6


class OLSResult(NamedTuple):
    coefficients: np.ndarray
    intercept: float
    r2: float


def _dependent_columns(X: np.ndarray) -> List[int]:
    """Indices of columns lying in the span of the intercept and earlier columns."""
    n = X.shape[0]
    basis = np.ones((n, 1))
    bad = []
    for j in range(X.shape[1]):
        cand = np.column_stack([basis, X[:, j]])
        s = np.linalg.svd(cand, compute_uv=False)
        if s[-1] <= s[0] * max(cand.shape) * np.finfo(float).eps * 1e3:
            bad.append(j)
        else:
            basis = cand
    return bad


def ols_fit(predictors, target) -> OLSResult:
    """Least squares with intercept via the normal equations.

    Returns coefficients, intercept and the in-sample ``r2 = 1 - SS_res/SS_tot``.
    """
    X = np.asarray(predictors, dtype=np.float64)
    y = np.asarray(target, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    n, p = X.shape
    if y.shape != (n,):
        raise RegressionError(f"target has {y.shape[0]} rows, predictors {n}")
    if n < p + 2:
        raise RegressionError(f"need at least {p + 2} rows for {p} predictors, got {n}")
    const = [j for j in range(p) if np.all(X[:, j] == X[0, j])]
    if const:
        raise RegressionError(f"constant predictor column(s) {const}")
    if np.all(y == y[0]):
        raise RegressionError("constant target")
    bad = _dependent_columns(X)
    if bad:
        raise RegressionError(f"collinear predictor column(s) {bad}")
    A = np.column_stack([np.ones(n), X])
    beta = np.linalg.solve(A.T @ A, A.T @ y)
    resid = y - A @ beta
    ss_res = float(resid @ resid)
    dy = y - y.mean()
    ss_tot = float(dy @ dy)
    r2 = min(1.0, max(0.0, 1.0 - ss_res / ss_tot))
    return OLSResult(beta[1:], float(beta[0]), r2)


@dataclass(frozen=True)
class TargetSignal:
    records: tuple
    description: str = ""

    def __post_init__(self):
        recs = tuple((str(w), float(v)) for w, v in self.records)
        words = [w for w, _ in recs]
        if len(set(words)) != len(words):
            raise PropaxisError("target signal lists an item twice")
        if not np.all(np.isfinite([v for _, v in recs])):
            raise PropaxisError("target signal has a non-finite value")
        object.__setattr__(self, "records", recs)

    @property
    def words(self) -> List[str]:
        return [w for w, _ in self.records]

    @property
    def values(self) -> np.ndarray:
        return np.array([v for _, v in self.records], dtype=np.float64)


def load_target(path, description: str = "") -> TargetSignal:
    """Read ``item<TAB>value`` lines; ``#`` lines are comments."""
    records = []
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise PropaxisError(f"cannot read {path}: {exc.strerror}") from exc
    with fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\r\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise PropaxisError(f"{path}:{lineno}: expected item<TAB>value")
            try:
                records.append((normalize_word(parts[0].strip()), float(parts[1])))
            except ValueError as exc:
                raise PropaxisError(f"{path}:{lineno}: {exc}") from exc
    return TargetSignal(records, description or str(path))


def projection_columns(specs: Sequence[SeedSpec], table: EmbeddingTable, words) -> np.ndarray:
    m = table.matrix(words)
    cols = []
    for spec in specs:
        axis = build_seed_axis(table, spec)
        try:
            cols.append(zscore(project_matrix(axis.direction, m)))
        except MetricError as exc:
            raise RegressionError(f"{spec.property_name}: projections are constant") from exc
    return np.column_stack(cols)


def score_seed_spec(specs: Sequence[SeedSpec], table: EmbeddingTable, target: TargetSignal) -> float:
    """R^2 of the target regressed on the z-scored projections of one axis per spec."""
    missing = [w for w in target.words if w not in table]
    if missing:
        raise PropaxisError(f"target items missing from embeddings: {' '.join(missing)}")
    X = projection_columns(specs, table, target.words)
    return ols_fit(X, target.values).r2


# ---------------------------------------------------------------------------
# search


@dataclass(frozen=True)
class Move:
    pass_index: int
    move: str  # "add", "remove" or "skip"
    property_name: str
    pole: str
    word: str
    r2_before: float
    r2_after: Optional[float]
    accepted: bool
    note: str = ""


@dataclass
class SearchState:
    initial: Tuple[SeedSpec, ...]
    initial_r2: float
    specs: Tuple[SeedSpec, ...]
    r2: float
    history: List[Move] = field(default_factory=list)
    tolerance: float = DEFAULT_TOLERANCE

    @property
    def accepted(self) -> List[Move]:
        return [m for m in self.history if m.accepted]

    def spec(self, name: str) -> SeedSpec:
        for s in self.specs:
            if s.property_name == name:
                return s
        raise KeyError(name)


def load_candidates(path) -> List[Tuple[str, str, str]]:
    """Read ``property<TAB>pole<TAB>word`` lines; ``#`` lines are comments."""
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\r\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3 or parts[1] not in ("positive", "negative"):
                raise SeedError(f"{path}:{lineno}: expected property<TAB>positive|negative<TAB>word")
            out.append((parts[0], parts[1], normalize_word(parts[2])))
    if not out:
        raise SeedError(f"{path}: no candidates")
    return out


def default_candidates_path() -> Path:
    from importlib import resources
    return Path(str(resources.files("propaxis.data").joinpath("rejected_candidates.tsv")))


def apply_move(spec: SeedSpec, pole: str, word: str) -> Tuple[str, Optional[SeedSpec], str]:
    """Return ``(kind, new_spec, note)``; ``new_spec`` is None for a skipped move."""
    words = list(spec.pole(pole))
    other = "negative" if pole == "positive" else "positive"
    if word in words:
        if len(words) == 1:
            return "skip", None, f"removing {word!r} would empty the {pole} pole"
        words.remove(word)
        kind = "remove"
    elif word in spec.pole(other):
        return "skip", None, f"{word!r} is already a {other} seed"
    else:
        words.append(word)
        kind = "add"
    return kind, replace(spec, **{pole: tuple(words)}), ""


def greedy_seed_search(
    initial: Sequence[SeedSpec],
    candidates: Sequence[Tuple[str, str, str]],
    table: EmbeddingTable,
    target: TargetSignal,
    tol: float = DEFAULT_TOLERANCE,
    max_passes: Optional[int] = None,
) -> SearchState:
    """Search all ``initial`` specs jointly, one regression predictor per spec."""
    if not candidates:
        raise SeedError("candidate list is empty")
    specs = {s.property_name: s for s in initial}
    if len(specs) != len(initial):
        raise SeedError("initial specs repeat a property name")
    unknown = sorted({p for p, _, _ in candidates if p not in specs})
    if unknown:
        raise SeedError(f"candidates name unknown properties {unknown}")
    order = [s.property_name for s in initial]

    def current():
        return [specs[name] for name in order]

    r2 = score_seed_spec(current(), table, target)
    state = SearchState(tuple(initial), r2, tuple(initial), r2, tolerance=tol)
    pass_index = 0
    while max_passes is None or pass_index < max_passes:
        changed = False
        for prop, pole, word in candidates:
            word = normalize_word(word)
            kind, new_spec, note = apply_move(specs[prop], pole, word)
            if new_spec is None:
                logger.info("pass %d: skip %s %s %s: %s", pass_index, prop, pole, word, note)
                state.history.append(Move(pass_index, kind, prop, pole, word, r2, None, False, note))
                continue
            trial = dict(specs)
            trial[prop] = new_spec
            try:
                new_r2 = score_seed_spec([trial[n] for n in order], table, target)
            except PropaxisError as exc:
                state.history.append(
                    Move(pass_index, kind, prop, pole, word, r2, None, False, str(exc))
                )
                continue
            accept = new_r2 > r2 + tol
            state.history.append(Move(pass_index, kind, prop, pole, word, r2, new_r2, accept))
            if accept:
                specs, r2 = trial, new_r2
                changed = True
        pass_index += 1
        if not changed:
            break
    state.specs = tuple(current())
    state.r2 = r2
    return state


def separate_seed_search(initial, candidates, table, target, tol=DEFAULT_TOLERANCE) -> Dict[str, SearchState]:
    """Search each property on its own, regressing the target on that axis alone."""
    out = {}
    for spec in initial:
        mine = [c for c in candidates if c[0] == spec.property_name]
        if not mine:
            logger.warning("no candidates for %s; keeping its seeds", spec.property_name)
            r2 = score_seed_spec([spec], table, target)
            out[spec.property_name] = SearchState((spec,), r2, (spec,), r2, tolerance=tol)
            continue
        out[spec.property_name] = greedy_seed_search([spec], mine, table, target, tol)
    return out


def replay(state: SearchState, table: Optional[EmbeddingTable] = None, target: Optional[TargetSignal] = None):
    """Apply the accepted moves to the initial specs.

    Returns the replayed specs, plus the recomputed R^2 when ``table`` and
    ``target`` are given.
    """
    specs = {s.property_name: s for s in state.initial}
    for m in state.accepted:
        kind, new_spec, _ = apply_move(specs[m.property_name], m.pole, m.word)
        if kind != m.move:
            raise SeedError(f"history is inconsistent at {m}")
        specs[m.property_name] = new_spec
    out = tuple(specs[s.property_name] for s in state.initial)
    if table is None or target is None:
        return out
    return out, score_seed_spec(out, table, target)


HISTORY_COLUMNS = ("pass", "move", "property", "pole", "word", "r2_before", "r2_after", "accepted")


def format_history(state: SearchState) -> str:
    lines = ["\t".join(HISTORY_COLUMNS)]
    for m in state.history:
        lines.append("\t".join([
            str(m.pass_index), m.move, m.property_name, m.pole, m.word,
            format_float(m.r2_before),
            "NA" if m.r2_after is None else format_float(m.r2_after),
            "1" if m.accepted else "0",
        ]))
    return "\n".join(lines) + "\n"


def write_search(state: SearchState, out_dir) -> List[Path]:
    """Write the final seed files and ``history.tsv`` into ``out_dir``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for spec in state.specs:
        p = out_dir / f"{spec.property_name}.seeds"
        save_seed_spec(spec, p)
        written.append(p)
    p = out_dir / "history.tsv"
    with open(p, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_history(state))
    written.append(p)
    return written
