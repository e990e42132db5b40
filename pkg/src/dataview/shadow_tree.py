"""CART decision-tree shadow model: fitting, rules, importances.

Greedy Gini splitting with midpoint thresholds and deterministic
tie-breaking (lowest feature index, then lowest threshold), so the same
data always yields the same tree on any platform.  Records route left on
`value <= threshold`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class TreeParams:
    max_depth: int = 8
    min_samples_split: int = 5
    min_impurity_decrease: float = 1e-7
    criterion: str = "gini"

    def __post_init__(self):
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        if self.criterion != "gini":
            raise ValueError("only the gini criterion is supported")


@dataclass
class Leaf:
    counts: np.ndarray  # per-class sample counts

    @property
    def prediction(self):
        return int(np.argmax(self.counts))  # lowest index wins ties

    @property
    def n_samples(self):
        return int(self.counts.sum())

    @property
    def purity(self):
        n = self.counts.sum()
        return float(self.counts.max() / n) if n else 0.0


@dataclass
class Split:
    feature: int
    threshold: float
    left: "Split | Leaf"
    right: "Split | Leaf"
    n_samples: int
    impurity_decrease: float


@dataclass
class DecisionTree:
    root: Split | Leaf
    feature_count: int
    class_count: int
    params: TreeParams

    def predict(self, record):
        record = np.asarray(record, dtype=np.float64)
        if record.shape != (self.feature_count,):
            raise ValueError(f"expected {self.feature_count} features")
        node = self.root
        while isinstance(node, Split):
            node = node.left if record[node.feature] <= node.threshold else node.right
        return node.prediction

    def predict_batch(self, records):
        records = np.asarray(records, dtype=np.float64)
        return np.array([self.predict(r) for r in records], dtype=int)

    @property
    def node_count(self):
        def count(node):
            if isinstance(node, Leaf):
                return 1
            return 1 + count(node.left) + count(node.right)

        return count(self.root)

    @property
    def depth(self):
        def depth_of(node):
            if isinstance(node, Leaf):
                return 0
            return 1 + max(depth_of(node.left), depth_of(node.right))

        return depth_of(self.root)


@dataclass
class Rule:
    conditions: list  # (feature, "<=" or ">", threshold)
    prediction: int
    support: int
    purity: float

    def matches(self, record):
        for f, op, t in self.conditions:
            if op == "<=":
                if not record[f] <= t:
                    return False
            elif not record[f] > t:
                return False
        return True

    def __str__(self):
        if self.conditions:
            cond = " AND ".join(
                f"f{f} {op} {t:.2f}" for f, op, t in self.conditions
            )
        else:
            cond = "TRUE"
        return (
            f"IF {cond} THEN class={self.prediction} "
            f"[support={self.support} purity={self.purity:.2f}]"
        )


def gini(counts):
    n = counts.sum()
    if n == 0:
        return 0.0
    p = counts / n
    return float(1.0 - np.sum(p * p))


def best_split(X, y, class_count, min_impurity_decrease):
    """Best (feature, threshold, decrease) by exhaustive midpoint scan.

    Returns None when no split clears min_impurity_decrease.  The scan is
    per-feature incremental: sort once, slide class counts across the
    boundary, evaluate every midpoint between distinct adjacent values.
    """
    n = len(y)
    parent_counts = np.bincount(y, minlength=class_count).astype(float)
    parent_gini = gini(parent_counts)
    best = None  # (decrease, feature, threshold)
    onehot = np.zeros((n, class_count))
    for f in range(X.shape[1]):
        order = np.argsort(X[:, f], kind="stable")
        xs = X[order, f]
        boundary = np.nonzero(xs[:-1] != xs[1:])[0]  # split after index i
        if boundary.size == 0:
            continue
        onehot[:] = 0.0
        onehot[np.arange(n), y[order]] = 1.0
        left_counts = np.cumsum(onehot, axis=0)[boundary]
        right_counts = parent_counts - left_counts
        n_left = (boundary + 1).astype(float)
        n_right = n - n_left
        gini_left = 1.0 - np.sum((left_counts / n_left[:, None]) ** 2, axis=1)
        gini_right = 1.0 - np.sum((right_counts / n_right[:, None]) ** 2, axis=1)
        decrease = parent_gini - (n_left * gini_left + n_right * gini_right) / n
        ok = decrease >= min_impurity_decrease
        if not np.any(ok):
            continue
        thresholds = (xs[boundary] + xs[boundary + 1]) / 2.0
        # lexicographic best: max decrease, then lowest threshold
        dmax = decrease[ok].max()
        tie = ok & (decrease == dmax)
        threshold = thresholds[tie].min()
        key = (-dmax, f, threshold)
        if best is None or key < (-best[0], best[1], best[2]):
            best = (float(dmax), f, float(threshold))
    return best


def fit(data, labels, params=None, class_count=None):
    """Grow a CART tree; deterministic for fixed inputs."""
    X = np.asarray(data, dtype=np.float64)
    y = np.asarray(labels, dtype=int)
    if X.ndim != 2 or len(X) == 0:
        raise ValueError("empty or malformed training data")
    if len(y) != len(X):
        raise ValueError("label count does not match row count")
    if params is None:
        params = TreeParams()
    if class_count is None:
        class_count = int(y.max()) + 1

    def grow(idx, depth):
        counts = np.bincount(y[idx], minlength=class_count).astype(float)
        if (
            depth >= params.max_depth
            or len(idx) < params.min_samples_split
            or gini(counts) == 0.0
        ):
            return Leaf(counts)
        found = best_split(
            X[idx], y[idx], class_count, params.min_impurity_decrease
        )
        if found is None:
            return Leaf(counts)
        decrease, f, t = found
        mask = X[idx, f] <= t
        return Split(
            feature=f,
            threshold=t,
            left=grow(idx[mask], depth + 1),
            right=grow(idx[~mask], depth + 1),
            n_samples=len(idx),
            impurity_decrease=decrease,
        )

    root = grow(np.arange(len(X)), 0)
    return DecisionTree(root, X.shape[1], class_count, params)


def extract_rules(tree):
    """One rule per leaf; together the rules partition the feature space."""
    rules = []

    def walk(node, conditions):
        if isinstance(node, Leaf):
            rules.append(
                Rule(list(conditions), node.prediction, node.n_samples, node.purity)
            )
            return
        walk(node.left, conditions + [(node.feature, "<=", node.threshold)])
        walk(node.right, conditions + [(node.feature, ">", node.threshold)])

    walk(tree.root, [])
    return rules


def rules_to_text(rules):
    return "\n".join(str(r) for r in rules) + "\n"


def render_tree(tree, feature_names=None):
    """Indented text rendering of the tree."""

    def name(f):
        return feature_names[f] if feature_names else f"f{f}"

    lines = []

    def walk(node, indent):
        pad = "  " * indent
        if isinstance(node, Leaf):
            lines.append(
                f"{pad}class={node.prediction} "
                f"(n={node.n_samples}, purity={node.purity:.2f})"
            )
            return
        lines.append(f"{pad}{name(node.feature)} <= {node.threshold:.4f}")
        walk(node.left, indent + 1)
        lines.append(f"{pad}{name(node.feature)} > {node.threshold:.4f}")
        walk(node.right, indent + 1)

    walk(tree.root, 0)
    return "\n".join(lines) + "\n"


def tree_importance(tree):
    """Per-feature share of sample-weighted impurity decrease; sums to 1
    for any tree with at least one internal node."""
    scores = np.zeros(tree.feature_count)
    total_samples = (
        tree.root.n_samples if isinstance(tree.root, Split) else 0
    )

    def walk(node):
        if isinstance(node, Leaf):
            return
        scores[node.feature] += (
            node.n_samples / total_samples
        ) * node.impurity_decrease
        walk(node.left)
        walk(node.right)

    walk(tree.root)
    total = scores.sum()
    return scores / total if total > 0 else scores


def tree_to_json(tree):
    """JSON-serializable dict; exact float round trip via repr in json."""

    def encode(node):
        if isinstance(node, Leaf):
            return {"counts": node.counts.tolist()}
        return {
            "feature": node.feature,
            "threshold": node.threshold,
            "n_samples": node.n_samples,
            "impurity_decrease": node.impurity_decrease,
            "left": encode(node.left),
            "right": encode(node.right),
        }

    return {
        "format": "dataview-tree",
        "version": 1,
        "feature_count": tree.feature_count,
        "class_count": tree.class_count,
        "params": {
            "max_depth": tree.params.max_depth,
            "min_samples_split": tree.params.min_samples_split,
            "min_impurity_decrease": tree.params.min_impurity_decrease,
            "criterion": tree.params.criterion,
        },
        "root": encode(tree.root),
    }


def tree_from_json(doc):
    if doc.get("format") != "dataview-tree" or doc.get("version") != 1:
        raise ValueError("not a supported tree document")

    def decode(node):
        if "counts" in node:
            return Leaf(np.asarray(node["counts"], dtype=np.float64))
        return Split(
            feature=node["feature"],
            threshold=node["threshold"],
            left=decode(node["left"]),
            right=decode(node["right"]),
            n_samples=node["n_samples"],
            impurity_decrease=node["impurity_decrease"],
        )

    return DecisionTree(
        root=decode(doc["root"]),
        feature_count=doc["feature_count"],
        class_count=doc["class_count"],
        params=TreeParams(**doc["params"]),
    )


def _as_predictor(model):
    if callable(model):
        return model
    if hasattr(model, "predict_batch"):
        return model.predict_batch
    if hasattr(model, "classify_batch"):
        return lambda X: np.argmax(model.classify_batch(X), axis=1)
    raise TypeError("model must be callable or expose predict_batch/classify_batch")


def permutation_importance(model, data, labels, n_repeats=5, rng=None):
    """Mean accuracy drop per feature under within-column shuffles.

    Model-agnostic: works on trees, nets, oracle handles, or any callable
    mapping a record batch to predicted labels.
    """
    X = np.asarray(data, dtype=np.float64)
    y = np.asarray(labels, dtype=int)
    if len(X) == 0:
        raise ValueError("empty evaluation data")
    if rng is None:
        rng = np.random.default_rng(0)
    predict = _as_predictor(model)
    baseline = float(np.mean(predict(X) == y))
    drops = np.zeros(X.shape[1])
    for f in range(X.shape[1]):
        col = X[:, f]
        if np.all(col == col[0]):
            continue  # permutation is the identity on values
        accs = []
        for _ in range(n_repeats):
            Xp = X.copy()
            Xp[:, f] = rng.permutation(col)
            accs.append(float(np.mean(predict(Xp) == y)))
        drops[f] = baseline - float(np.mean(accs))
    return drops
