"""Command-line entry point: ``propaxis build|fit|project|eval|seed-search``.

Data goes to files only; warnings and errors go to stderr. Every output is
written next to a JSON manifest recording the resolved configuration, input
digests and rng seed. Exit codes: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .axes import (
    DEFAULT_SPECS, build_seed_axis, default_seed_path, load_axis, load_seed_spec,
    project_words, save_axis, write_scores,
)
from .embeddings import load_embeddings
from .errors import PropaxisError
from .fitting import FitConfig, fit_pointwise_axis, fit_ranking_axis, load_ratings
from .metrics import kfold_crossvalidate
from .seedsearch import (
    greedy_seed_search, load_candidates, load_target, separate_seed_search, write_search,
)

logger = logging.getLogger("propaxis")


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(path, command: str, config: dict, inputs: dict, outputs, rng_seed) -> None:
    manifest = {
        "subcommand": command,
        "config": config,
        "inputs": {k: {"path": str(p), "sha256": sha256_file(p)} for k, p in inputs.items()},
        "outputs": {str(p): sha256_file(p) for p in outputs},
        "rng_seed": rng_seed,
        "tool": "propaxis",
        "version": __version__,
    }
    text = json.dumps(manifest, indent=2, sort_keys=True)
    Path(path).write_text(text + "\n", encoding="utf-8")


def resolve_seed_path(arg: str) -> Path:
    """A seed file path, or the name of a shipped spec."""
    p = Path(arg)
    if not p.exists() and arg in DEFAULT_SPECS:
        return default_seed_path(arg)
    return p


def _config(args, drop=("func",)) -> dict:
    out = {}
    for k, v in sorted(vars(args).items()):
        if k in drop:
            continue
        out[k] = [str(x) for x in v] if isinstance(v, list) else (str(v) if isinstance(v, Path) else v)
    return out


def _fit_config(args, method: str, init: str) -> FitConfig:
    return FitConfig(
        method=method,
        margin_fraction=args.margin_frac,
        pair_count=args.pairs,
        learning_rate=args.lr,
        epochs=args.epochs,
        init=init,
        pointwise_seed_weight=args.seed_weight,
        rng_seed=args.rng_seed,
    )


def cmd_build(args) -> None:
    table = load_embeddings(args.embeddings)
    seeds = resolve_seed_path(args.seeds)
    spec = load_seed_spec(seeds)
    axis = build_seed_axis(table, spec, normalize=args.normalize)
    axis.metadata["inputs"] = {"embeddings": str(args.embeddings), "seeds": str(seeds)}
    save_axis(axis, args.out)
    write_manifest(
        f"{args.out}.manifest.json", "build", _config(args),
        {"embeddings": args.embeddings, "seeds": seeds}, [args.out], args.rng_seed,
    )


def cmd_fit(args, parser) -> None:
    if args.method == "pointwise" and args.seed_axis is None:
        parser.error("--method pointwise requires --seed-axis")
    init = args.init or ("seed_axis" if args.seed_axis is not None else "random_unit")
    if init == "seed_axis" and args.seed_axis is None:
        parser.error("--init seed_axis requires --seed-axis")
    config = _fit_config(args, args.method, init)
    table = load_embeddings(args.embeddings)
    dataset = load_ratings(args.ratings, args.property)
    seed_axis = load_axis(args.seed_axis) if args.seed_axis is not None else None
    if args.method == "ranking":
        axis = fit_ranking_axis(dataset, table, config, seed_axis)
    else:
        axis = fit_pointwise_axis(dataset, table, config, seed_axis)
    axis.metadata["inputs"] = {
        "embeddings": str(args.embeddings), "ratings": str(args.ratings),
        "seed_axis": None if args.seed_axis is None else str(args.seed_axis),
    }
    save_axis(axis, args.out)
    inputs = {"embeddings": args.embeddings, "ratings": args.ratings}
    if args.seed_axis is not None:
        inputs["seed_axis"] = args.seed_axis
    cfg = _config(args)
    cfg["init"] = init
    write_manifest(f"{args.out}.manifest.json", "fit", cfg, inputs, [args.out], args.rng_seed)


def _read_words(path) -> list:
    with open(path, encoding="utf-8") as fh:
        return [line.strip() for line in fh if line.strip() and not line.startswith("#")]


def cmd_project(args, parser) -> None:
    if (args.axis is None) == (args.seeds is None):
        parser.error("give exactly one of --axis or --seeds")
    table = load_embeddings(args.embeddings)
    inputs = {"embeddings": args.embeddings, "words": args.words}
    if args.axis is not None:
        axis = load_axis(args.axis)
        inputs["axis"] = args.axis
    else:
        seeds = resolve_seed_path(args.seeds)
        axis = build_seed_axis(table, load_seed_spec(seeds), normalize=args.normalize)
        inputs["seeds"] = seeds
    scores = project_words(table, axis, _read_words(args.words), normalize=args.normalize)
    for w in scores.missing:
        logger.warning("word %r not in embedding table; no score", w)
    write_scores(scores, args.out)
    cfg = _config(args)
    cfg["missing_words"] = scores.missing
    write_manifest(f"{args.out}.manifest.json", "project", cfg, inputs, [args.out], args.rng_seed)


def cmd_eval(args, parser) -> None:
    if args.method in ("seed", "pointwise") and args.seeds is None:
        parser.error(f"--method {args.method} requires --seeds")
    table = load_embeddings(args.embeddings)
    dataset = load_ratings(args.ratings, args.property)
    inputs = {"embeddings": args.embeddings, "ratings": args.ratings}
    spec = None
    if args.seeds is not None:
        seeds = resolve_seed_path(args.seeds)
        spec = load_seed_spec(seeds)
        inputs["seeds"] = seeds
    if args.method == "seed":
        report = kfold_crossvalidate(dataset, table, args.folds, spec, args.rng_seed)
        init = None
    else:
        init = args.init or ("seed_axis" if args.method == "pointwise" else "random_unit")
        config = _fit_config(args, args.method, init)
        report = kfold_crossvalidate(dataset, table, args.folds, config, args.rng_seed, seed_spec=spec)
    report.write(args.out)
    cfg = _config(args)
    cfg["init"] = init
    cfg["report_digest"] = report.config_digest
    cfg["folds_words"] = report.folds
    write_manifest(f"{args.out}.manifest.json", "eval", cfg, inputs, [args.out], args.rng_seed)


def cmd_seed_search(args) -> None:
    table = load_embeddings(args.embeddings)
    seed_paths = [resolve_seed_path(s) for s in (args.seeds or list(DEFAULT_SPECS))]
    specs = [load_seed_spec(p) for p in seed_paths]
    candidates = load_candidates(args.candidates)
    target = load_target(args.target)
    out = Path(args.out)
    outputs = []
    summary = {}
    if args.mode == "joint":
        state = greedy_seed_search(specs, candidates, table, target, tol=args.tol)
        outputs += write_search(state, out)
        summary["joint"] = {"initial_r2": state.initial_r2, "final_r2": state.r2}
    else:
        for name, state in separate_seed_search(specs, candidates, table, target, args.tol).items():
            outputs += write_search(state, out / name)
            summary[name] = {"initial_r2": state.initial_r2, "final_r2": state.r2}
    inputs = {"embeddings": args.embeddings, "candidates": args.candidates, "target": args.target}
    inputs.update({f"seeds{i}": p for i, p in enumerate(seed_paths)})
    cfg = _config(args)
    cfg["summary"] = summary
    write_manifest(out / "manifest.json", "seed-search", cfg, inputs, outputs, args.rng_seed)


def _add_common(p, out_help: str) -> None:
    p.add_argument("--embeddings", type=Path, required=True, help="text-format embedding file")
    p.add_argument("--out", type=Path, required=True, help=out_help)
    p.add_argument("--rng-seed", type=int, default=0)


def _add_fit_flags(p) -> None:
    p.add_argument("--margin-frac", type=float, default=0.2,
                   help="ranking margin as a fraction of the rating sdev (default 0.2)")
    p.add_argument("--pairs", type=int, default=300, help="number of sampled pairs (default 300)")
    p.add_argument("--lr", type=float, default=0.05)
    p.add_argument("--epochs", type=int, default=500)
    p.add_argument("--seed-weight", type=float, default=1.0,
                   help="weight of the seed-axis closeness term in the pointwise model")
    p.add_argument("--init", choices=["seed_axis", "random_unit"], default=None)
    p.add_argument("--property", default=None, help="property name (default: ratings file stem)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="propaxis", description="Build, fit, evaluate and search property axes in word embeddings.")
    parser.add_argument("--version", action="version", version=f"propaxis {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build a seed-based axis")
    _add_common(p, "axis file to write")
    p.add_argument("--seeds", required=True, help="seed spec file or shipped name")
    p.add_argument("--normalize", action="store_true", help="unit-normalize word vectors")
    p.set_defaults(func=lambda a: cmd_build(a))

    p = sub.add_parser("fit", help="fit an axis to ratings")
    _add_common(p, "axis file to write")
    p.add_argument("--method", choices=["ranking", "pointwise"], required=True)
    p.add_argument("--ratings", type=Path, required=True, help="word<TAB>rating file")
    p.add_argument("--seed-axis", type=Path, default=None, help="axis file from `build`")
    _add_fit_flags(p)
    p.set_defaults(func=lambda a: cmd_fit(a, parser))

    p = sub.add_parser("project", help="score words on an axis")
    _add_common(p, "word<TAB>score file to write")
    p.add_argument("--axis", type=Path, default=None)
    p.add_argument("--seeds", default=None, help="build the axis from these seeds instead")
    p.add_argument("--words", type=Path, required=True, help="file with one word per line")
    p.add_argument("--normalize", action="store_true")
    p.set_defaults(func=lambda a: cmd_project(a, parser))

    p = sub.add_parser("eval", help="k-fold crossvalidation of an axis method")
    _add_common(p, "report file to write")
    p.add_argument("--ratings", type=Path, required=True)
    p.add_argument("--method", choices=["seed", "pointwise", "ranking"], required=True)
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--seeds", default=None)
    _add_fit_flags(p)
    p.set_defaults(func=lambda a: cmd_eval(a, parser))

    p = sub.add_parser("seed-search", help="greedy seed search against a target signal")
    _add_common(p, "output directory")
    p.add_argument("--seeds", action="append", default=None,
                   help="initial seed spec (repeatable; default: shipped agentivity and telicity)")
    p.add_argument("--candidates", type=Path, required=True, help="property<TAB>pole<TAB>word file")
    p.add_argument("--target", type=Path, required=True, help="item<TAB>value file")
    p.add_argument("--mode", choices=["joint", "separate"], default="joint")
    p.add_argument("--tol", type=float, default=1e-6)
    p.set_defaults(func=cmd_seed_search)
    return parser


def _setup_logging() -> logging.Handler:
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("propaxis: %(levelname)s: %(message)s"))
    root = logging.getLogger("propaxis")
    root.addHandler(handler)
    root.setLevel(logging.WARNING)
    return handler


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = _setup_logging()
    try:
        args.func(args)
    except (PropaxisError, OSError) as exc:
        msg = " ".join(str(exc).split())
        print(f"propaxis: error: {type(exc).__name__}: {msg}", file=sys.stderr)
        return 1
    finally:
        logging.getLogger("propaxis").removeHandler(handler)
    return 0


if __name__ == "__main__":
    sys.exit(main())
