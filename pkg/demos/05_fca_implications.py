"""Interpret a data view with Formal Concept Analysis.

Binning each feature turns records into sets of attributes ("Insulin1"
means insulin in the lowest bin). Per class, the concept lattice collects
every maximal group of records sharing a maximal attribute set; new
records are classified by how well their attributes overlap a class's
concepts. Implications ("everyone with these attributes also has those")
make the view's regularities explicit.
"""

import numpy as np

from dataview import datasets, evaluation, fca, hillsynth, netcore
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

view = hillsynth.synthesize_dataset(
    oracle, range(len(label_names)), 150,
    hillsynth.HillConfig(rng_seed=0),
    hillsynth.domains_from_data(X[train_idx]),
)

# Bin with the published diabetes boundaries (Insulin 16/166, Glucose
# 140/200, and so on); tertile_bins() would infer cuts for other data.
spec = fca.diabetes_bins()
ctx = fca.binarize(view.records, view.labels, spec)
lattices = fca.class_lattices(ctx, view.labels)
for c, (sub, cons) in sorted(lattices.items()):
    print(f"class {label_names[c]}: {sub.n_objects} records, "
          f"{len(cons)} concepts")

# Classify the held-out split through the lattices and compare to the target.
target_preds = np.argmax(oracle.classify_batch(X[test_idx]), axis=1)
fca_preds = np.array([
    fca.fca_predict(lattices, spec.record_mask(r))[0] for r in X[test_idx]
])
print(f"FCA shadow fidelity: "
      f"{evaluation.fidelity(fca_preds, target_preds):.4f}")

# Which features show up in concept intents? (the FCA notion of importance)
order, table = fca.fca_importance(lattices, spec)
print("\nfeature presence in concept intents (% of concepts, per class):")
for name in order[:5]:
    cells = "  ".join(f"{table[name][c]:5.1f}" for c in sorted(lattices))
    print(f"  {name:>15}: {cells}  avg {table[name]['avg']:5.1f}")

# Implications within one class, on the class-annotated context: premises
# that force other attributes, including the class itself.
c0 = np.nonzero(view.labels == 0)[0][:25]
ctx0 = fca.binarize(
    view.records[c0], view.labels[c0], spec,
    include_class_attrs=True, class_count=len(label_names),
)
basis = fca.implications(ctx0)
print(f"\nclass-{label_names[0]} context: {len(basis)} implications; "
      f"a few with short premises:")
short = sorted(basis, key=lambda i: (fca.popcount(i.premise), -i.support))[:5]
print(fca.implications_to_text(short, ctx0))

# The context exports to the standard Burmeister format for external tools.
print(f".cxt export starts with: {fca.to_cxt(ctx0).splitlines()[0]!r}")
