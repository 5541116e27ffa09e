"""
Command-line workflow
=====================

Writes synthetic inputs to a temporary directory and drives the
``propaxis`` command through each subcommand.
"""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

from propaxis import save_embeddings, save_ratings, save_seed_spec
from propaxis.synthetic import make_property_data

data = make_property_data(dim=8, n_words=80, noise=0.1, rng_seed=5)
tmp = Path(tempfile.mkdtemp(prefix="propaxis-demo-"))
save_embeddings(data.table, tmp / "emb.vec")
save_ratings(data.dataset, tmp / "prop.tsv")
save_seed_spec(data.seeds, tmp / "prop.seeds")
(tmp / "words.txt").write_text("\n".join(data.dataset.words[:10] + ["nonexistent"]) + "\n")
(tmp / "target.tsv").write_text("".join(f"{w}\t{r!r}\n" for w, r in data.dataset.records))
(tmp / "cands.tsv").write_text("prop\tpositive\tw0003\nprop\tnegative\tw0004\n")


def run(*args):
    cmd = [sys.executable, "-m", "propaxis", *map(str, args)]
    print("$ propaxis", " ".join(map(str, args)))
    proc = subprocess.run(cmd, capture_output=True, text=True)
    if proc.stderr:
        print(proc.stderr, end="")
    print("exit", proc.returncode)


e = tmp / "emb.vec"
run("build", "--embeddings", e, "--seeds", tmp / "prop.seeds", "--out", tmp / "seed.axis")
run("fit", "--method", "ranking", "--embeddings", e, "--ratings", tmp / "prop.tsv", "--out", tmp / "rank.axis")
run("fit", "--method", "pointwise", "--embeddings", e, "--ratings", tmp / "prop.tsv",
    "--seed-axis", tmp / "seed.axis", "--out", tmp / "point.axis")
run("project", "--embeddings", e, "--axis", tmp / "rank.axis", "--words", tmp / "words.txt",
    "--out", tmp / "scores.tsv")
run("eval", "--method", "ranking", "--embeddings", e, "--ratings", tmp / "prop.tsv", "--folds", 5,
    "--out", tmp / "eval.tsv")
run("seed-search", "--embeddings", e, "--seeds", tmp / "prop.seeds", "--candidates", tmp / "cands.tsv",
    "--target", tmp / "target.tsv", "--out", tmp / "search")

# a domain error: exit 1 with one stderr line
run("build", "--embeddings", e, "--seeds", tmp / "missing.seeds", "--out", tmp / "x.axis")

print((tmp / "eval.tsv").read_text())
manifest = json.loads((tmp / "rank.axis.manifest.json").read_text())
print(sorted(manifest), manifest["inputs"]["ratings"]["sha256"][:16])
print("outputs in", tmp)
