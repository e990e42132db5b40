"""Distill a blackbox into a decision tree and read its rules.

Two shadows of the same target: OShadow learns from the original training
data, SShadow from the synthesized data view. Fidelity (the fraction of
test records where shadow and target agree) measures how faithfully each
one mimics the blackbox. The tree itself is the explanation: every leaf is
an IF/THEN rule over feature thresholds.
"""

import numpy as np

from dataview import datasets, evaluation, hillsynth, netcore, shadow_tree
from dataview.netcore import TrainConfig
from dataview.oracle import InProcessOracle
from dataview.pipeline import Schema, load_csv, train_test_split

X, y, feature_names, label_names = load_csv(
    datasets.builtin_path("pima"), Schema("Outcome")
)
train_idx, test_idx = train_test_split(len(X), 0.8, seed=0)

target = netcore.make_classifier(X.shape[1], len(label_names), seed=0)
netcore.train(target, X[train_idx], y[train_idx], TrainConfig(epochs=300, rng_seed=0))
oracle = InProcessOracle(target)
target_preds = np.argmax(oracle.classify_batch(X[test_idx]), axis=1)

# Synthesize the view and fit both shadows.
view = hillsynth.synthesize_dataset(
    oracle, range(len(label_names)), 1000,
    hillsynth.HillConfig(rng_seed=0),
    hillsynth.domains_from_data(X[train_idx]),
)
params = shadow_tree.TreeParams(max_depth=12)
sshadow = shadow_tree.fit(view.records, view.labels, params, len(label_names))
oshadow = shadow_tree.fit(X[train_idx], y[train_idx], params, len(label_names))

for name, tree in (("OShadow", oshadow), ("SShadow", sshadow)):
    fid = evaluation.fidelity(tree.predict_batch(X[test_idx]), target_preds)
    acc = evaluation.accuracy(tree.predict_batch(X[test_idx]), y[test_idx])
    print(f"{name}: fidelity {fid:.4f}, accuracy {acc:.4f} "
          f"({tree.node_count} nodes, depth {tree.depth})")

# A shallow tree on the same view stays readable; print its rules.
readable = shadow_tree.fit(
    view.records, view.labels, shadow_tree.TreeParams(max_depth=3),
    len(label_names),
)
print("\ndepth-3 view of the target's logic:")
print(shadow_tree.render_tree(readable, feature_names))
print(shadow_tree.rules_to_text(shadow_tree.extract_rules(readable)))

# Which features does the shadow lean on? Two views of importance: the
# tree's own split-based measure, and model-agnostic permutation importance
# measured against the target's predictions.
split_imp = shadow_tree.tree_importance(sshadow)
perm_imp = shadow_tree.permutation_importance(
    sshadow, X[test_idx], target_preds, rng=np.random.default_rng(0)
)
print("feature importances (split-based / permutation):")
for j in np.argsort(-split_imp):
    print(f"  {feature_names[j]}: {split_imp[j]:.3f} / {perm_imp[j]:.3f}")
