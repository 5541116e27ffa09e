import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from propaxis.axes import (
    Axis, SeedSpec, build_seed_axis, default_seed_spec, load_axis, load_seed_spec,
    project_words, read_scores, save_axis, save_seed_spec, scalar_projection, write_scores,
)
from propaxis.embeddings import EmbeddingTable, WordVector
from propaxis.errors import AxisError, SeedError


def table(**vecs):
    return EmbeddingTable(tuple(vecs), np.array(list(vecs.values()), dtype=float))


def test_single_difference():
    t = table(a=[1, 0], b=[0, 1])
    ax = build_seed_axis(t, SeedSpec("p", ["a"], ["b"]))
    np.testing.assert_array_equal(ax.direction, [1, -1])
    assert ax.method == "seed"


def test_mean_of_two_differences():
    t = table(a=[2, 0], b=[0, 2], c=[0, 0])
    ax = build_seed_axis(t, SeedSpec("p", ["a", "b"], ["c"]))
    np.testing.assert_array_equal(ax.direction, [1, 1])


def test_danger_style_matches_explicit_loop(rng):
    words = ["dangerous", "unsafe", "safe", "harmless"]
    t = EmbeddingTable(tuple(words), rng.standard_normal((4, 10)))
    ax = build_seed_axis(t, SeedSpec("danger", ["dangerous", "unsafe"], ["safe", "harmless"]))
    diffs = [t.vector(p) - t.vector(n) for p in ("dangerous", "unsafe") for n in ("safe", "harmless")]
    expected = sum(diffs) / 4
    np.testing.assert_allclose(ax.direction, expected, rtol=0, atol=1e-12)


def test_unresolved_seeds_degrade_and_are_recorded(caplog):
    t = table(a=[1, 0], b=[0, 1])
    ax = build_seed_axis(t, SeedSpec("p", ["a", "ghost"], ["b"]))
    np.testing.assert_array_equal(ax.direction, [1, -1])
    assert ax.metadata["missing_seeds"] == ["ghost"]
    assert "ghost" in caplog.text


@pytest.mark.parametrize("pos,neg,msg", [
    (["x"], ["b"], "no positive"),
    (["a"], ["y"], "no negative"),
])
def test_unresolvable_pole(pos, neg, msg):
    with pytest.raises(SeedError, match=msg):
        build_seed_axis(table(a=[1, 0], b=[0, 1]), SeedSpec("p", pos, neg))


def test_zero_direction():
    t = table(a=[1, 0], b=[0, 1], c=[0, 1], d=[1, 0])
    with pytest.raises(SeedError, match="zero vector"):
        build_seed_axis(t, SeedSpec("p", ["a", "b"], ["c", "d"]))


@pytest.mark.parametrize("pos,neg", [([], ["a"]), (["a"], []), (["a"], ["a"]), (["a", "a"], ["b"])])
def test_invalid_seed_specs(pos, neg):
    with pytest.raises(SeedError):
        SeedSpec("p", pos, neg)


def test_scalar_projection_examples():
    assert scalar_projection(np.array([3.0, 4.0]), np.array([1.0, 0.0])) == pytest.approx(0.6)
    assert scalar_projection(np.array([3.0, -7.0]), np.zeros(2)) == 0.0
    ax = build_seed_axis(table(a=[1, 0], b=[0, 1]), SeedSpec("p", ["a"], ["b"]))
    assert scalar_projection(ax, WordVector("a", np.array([1.0, 0.0]))) == pytest.approx(1 / math.sqrt(2), abs=1e-15)


def test_scalar_projection_errors():
    with pytest.raises(AxisError, match="dimension"):
        scalar_projection(np.ones(3), np.ones(2))
    with pytest.raises(AxisError, match="zero-norm"):
        scalar_projection(np.zeros(2), np.ones(2))
    with pytest.raises(AxisError):
        Axis("p", np.zeros(2), "seed")


def test_project_words():
    t = table(a=[1, 0], b=[0, 1])
    ax = build_seed_axis(t, SeedSpec("p", ["a"], ["b"]))
    scores = project_words(t, ax, ["a", "b"])
    assert scores.words == ["a", "b"]
    np.testing.assert_allclose(scores.scores, [0.7071067811865475, -0.7071067811865475])
    assert len(project_words(t, ax, [])) == 0
    s = project_words(t, ax, ["a", "missing"])
    assert s.words == ["a"] and s.missing == ["missing"]


def test_normalize_flag():
    t = table(a=[10, 0], b=[0, 1], c=[3, 4])
    ax = build_seed_axis(t, SeedSpec("p", ["a"], ["b"]), normalize=True)
    np.testing.assert_array_equal(ax.direction, [1, -1])
    s = project_words(t, ax, ["c"], normalize=True)
    assert s.scores[0] == pytest.approx((0.6 - 0.8) / math.sqrt(2))


def test_pole_swap_negates():
    t = table(a=[1, 2], b=[3, -1], c=[0.5, 0.25])
    spec = SeedSpec("p", ["a", "c"], ["b"])
    np.testing.assert_array_equal(
        build_seed_axis(t, spec.swapped()).direction, -build_seed_axis(t, spec).direction
    )


def test_axis_file_round_trip(tmp_path, rng):
    t = EmbeddingTable(("a", "b", "c"), rng.standard_normal((3, 5)))
    ax = build_seed_axis(t, SeedSpec("p", ["a"], ["b", "c"]))
    p = tmp_path / "p.axis"
    save_axis(ax, p)
    back = load_axis(p)
    assert back.direction.tobytes() == ax.direction.tobytes()
    assert back.metadata == ax.metadata and back.method == "seed"
    save_axis(back, tmp_path / "q.axis")
    assert (tmp_path / "q.axis").read_bytes() == p.read_bytes()


def test_axis_file_errors(tmp_path):
    p = tmp_path / "bad.axis"
    p.write_text(json.dumps({"property_name": "p", "method": "seed", "dim": 3, "direction": [1, 2]}))
    with pytest.raises(AxisError, match="dim"):
        load_axis(p)
    p.write_text("{")
    with pytest.raises(AxisError):
        load_axis(p)


def test_seed_file_round_trip(tmp_path):
    spec = SeedSpec("p", ["x", "y"], ["z"])
    save_seed_spec(spec, tmp_path / "p.seeds")
    assert load_seed_spec(tmp_path / "p.seeds") == spec


def test_seed_file_missing_field(tmp_path):
    (tmp_path / "s").write_text('{"property_name": "p", "positive": ["a"]}')
    with pytest.raises(SeedError, match="negative"):
        load_seed_spec(tmp_path / "s")


def test_score_tsv_format(tmp_path):
    t = table(a=[1, 0], b=[0, 1])
    ax = build_seed_axis(t, SeedSpec("p", ["a"], ["b"]))
    scores = project_words(t, ax, ["a", "b"])
    write_scores(scores, tmp_path / "s.tsv")
    text = (tmp_path / "s.tsv").read_text()
    assert text == "a\t0.70710678118654746\nb\t-0.70710678118654746\n"
    assert read_scores(tmp_path / "s.tsv").rows == scores.rows


def test_default_specs_load():
    assert default_seed_spec("telicity").negative == ("still", "ongoing", "being", "acting")
    with pytest.raises(SeedError):
        default_seed_spec("animacy")


small = st.integers(1, 4)


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_seed_axis_equals_double_loop(data):
    dim = data.draw(st.integers(1, 8))
    n_pos, n_neg = data.draw(small), data.draw(small)
    vals = data.draw(arrays(np.float64, (n_pos + n_neg, dim),
                            elements=st.floats(-100, 100, allow_nan=False)))
    words = [f"w{i}" for i in range(n_pos + n_neg)]
    t = EmbeddingTable(tuple(words), vals)
    spec = SeedSpec("p", words[:n_pos], words[n_pos:])
    brute = np.zeros(dim)
    for p, n in itertools.product(words[:n_pos], words[n_pos:]):
        brute += t.vector(p) - t.vector(n)
    brute /= n_pos * n_neg
    if not np.any(brute) or np.max(np.abs(brute)) < 1e-9:
        return
    ax = build_seed_axis(t, spec)
    np.testing.assert_allclose(ax.direction, brute, rtol=1e-9, atol=1e-9)
