"""Train a blackbox target and query it like an outsider would.

The rest of the toolkit never looks inside the target network; everything
downstream works through the oracle interface shown here (a probability
vector per query, plus a query counter). This script trains a small
classifier on the bundled diabetes-style dataset and pokes at it.
"""

import numpy as np

from dataview import datasets, evaluation, netcore
from dataview.netcore import TrainConfig
from dataview.oracle import InProcessOracle, top_class
from dataview.pipeline import Schema, load_csv, scale_minmax, train_test_split

# Load the bundled dataset and hold out a test split.
X, y, feature_names, label_names = load_csv(
    datasets.builtin_path("pima"), Schema("Outcome")
)
train_idx, test_idx = train_test_split(len(X), 0.8, seed=0)
print(f"{len(X)} records, {X.shape[1]} features, {len(label_names)} classes")

# Scale to [-1, 1] so the network sees comparable feature ranges.
X, scale = scale_minmax(X, fit_rows=train_idx)

target = netcore.make_classifier(X.shape[1], len(label_names), seed=0)
net, history = netcore.train(
    target, X[train_idx], y[train_idx], TrainConfig(epochs=300, rng_seed=0)
)
print(f"training loss went {history[0]:.3f} -> {history[-1]:.3f}")

# From here on the target is a blackbox behind an oracle handle.
oracle = InProcessOracle(target)
preds = np.argmax(oracle.classify_batch(X[test_idx]), axis=1)
print(f"test accuracy: {evaluation.accuracy(preds, y[test_idx]):.4f}")
print(f"oracle answered {oracle.query_count} queries so far")

# A single query returns the full probability vector; top_class picks the
# decision the way every consumer in this package does (lowest index wins ties).
probs = oracle.classify(X[test_idx][0])
cls, conf = top_class(probs)
print(f"sample record -> class {label_names[cls]} with confidence {conf:.3f}")

# The model blob is a plain text format; a saved target can be served over
# TCP with `dataview serve-oracle` and queried remotely with the same API.
blob = netcore.serialize(target)
print(f"serialized target: {len(blob)} bytes, header {blob.splitlines()[0]!r}")
