import itertools

import numpy as np
import pytest

from dataview import shadow_tree
from dataview.shadow_tree import (
    DecisionTree,
    Leaf,
    Split,
    TreeParams,
    extract_rules,
    fit,
    gini,
    permutation_importance,
    tree_importance,
)


def brute_force_best_split(X, y, class_count):
    """Exhaustive (feature, midpoint) Gini scan; independent of the
    incremental implementation."""
    n = len(y)
    parent = gini(np.bincount(y, minlength=class_count).astype(float))
    best = None
    for f in range(X.shape[1]):
        vals = sorted(set(X[:, f]))
        for a, b in zip(vals, vals[1:]):
            t = (a + b) / 2
            left = y[X[:, f] <= t]
            right = y[X[:, f] > t]
            dec = parent - (
                len(left) * gini(np.bincount(left, minlength=class_count).astype(float))
                + len(right) * gini(np.bincount(right, minlength=class_count).astype(float))
            ) / n
            key = (-dec, f, t)
            if best is None or key < best:
                best = key
    if best is None:
        return None
    return (-best[0], best[1], best[2])


class TestFit:
    def test_single_class_single_leaf(self):
        tree = fit([[0.0], [1.0], [2.0]], [1, 1, 1], TreeParams(min_samples_split=2))
        assert isinstance(tree.root, Leaf)
        assert tree.predict([5.0]) == 1

    def test_one_feature_midpoint_split(self):
        X = [[0.0], [1.0], [2.0], [3.0]]
        y = [0, 0, 1, 1]
        tree = fit(X, y, TreeParams(min_samples_split=2))
        # oracle: enumerate all midpoints by hand -> 1.5 is the unique best
        dec, f, t = brute_force_best_split(np.array(X), np.array(y), 2)
        assert (f, t) == (0, 1.5)
        assert isinstance(tree.root, Split)
        assert tree.root.feature == 0 and tree.root.threshold == 1.5
        assert isinstance(tree.root.left, Leaf) and tree.root.left.prediction == 0
        assert isinstance(tree.root.right, Leaf) and tree.root.right.prediction == 1

    def test_root_split_matches_brute_force(self):
        rng = np.random.default_rng(0)
        for trial in range(25):
            X = rng.normal(size=(30, 5))
            y = rng.integers(3, size=30)
            tree = fit(X, y, TreeParams(min_samples_split=2), class_count=3)
            expected = brute_force_best_split(X, y, 3)
            if expected is None or expected[0] < 1e-7:
                continue
            assert isinstance(tree.root, Split)
            assert tree.root.feature == expected[1]
            assert tree.root.threshold == pytest.approx(expected[2])
            assert tree.root.impurity_decrease == pytest.approx(expected[0])

    def test_empty_data_rejected(self):
        with pytest.raises(ValueError):
            fit(np.empty((0, 2)), [])

    def test_label_mismatch_rejected(self):
        with pytest.raises(ValueError):
            fit([[1.0], [2.0]], [0])

    def test_deterministic(self):
        rng = np.random.default_rng(5)
        X = rng.normal(size=(50, 4))
        y = rng.integers(2, size=50)
        a = shadow_tree.render_tree(fit(X, y))
        b = shadow_tree.render_tree(fit(X, y))
        assert a == b


class TestPredict:
    def test_single_leaf_everything(self):
        tree = fit([[0.0]], [2], TreeParams(), class_count=3)
        for v in (-100.0, 0.0, 100.0):
            assert tree.predict([v]) == 2

    def test_boundary_routes_left(self):
        tree = fit([[0.0], [1.0], [2.0], [3.0]], [0, 0, 1, 1], TreeParams(min_samples_split=2))
        assert tree.predict([tree.root.threshold]) == tree.root.left.prediction

    def test_pure_tree_reproduces_training_labels(self):
        rng = np.random.default_rng(1)
        X = np.vstack([rng.normal(-3, 0.5, (30, 3)), rng.normal(3, 0.5, (30, 3))])
        y = np.array([0] * 30 + [1] * 30)
        tree = fit(X, y, TreeParams(max_depth=20, min_samples_split=2))
        assert np.array_equal(tree.predict_batch(X), y)

    def test_dimension_mismatch(self):
        tree = fit([[0.0], [1.0]], [0, 1], TreeParams(min_samples_split=2))
        with pytest.raises(ValueError):
            tree.predict([1.0, 2.0])

    def test_node_count_and_depth(self):
        leaf_only = fit([[0.0]], [0], TreeParams())
        assert leaf_only.node_count == 1 and leaf_only.depth == 0
        stump = fit([[0.0], [1.0], [2.0], [3.0]], [0, 0, 1, 1],
                    TreeParams(min_samples_split=2))
        assert stump.node_count == 3 and stump.depth == 1


class TestRules:
    def test_single_leaf_unconditional_rule(self):
        tree = fit([[0.0]], [0], TreeParams())
        rules = extract_rules(tree)
        assert len(rules) == 1 and rules[0].conditions == []

    def test_depth_one_complementary_rules(self):
        tree = fit([[0.0], [1.0], [2.0], [3.0]], [0, 0, 1, 1], TreeParams(min_samples_split=2))
        rules = extract_rules(tree)
        assert len(rules) == 2
        (r1, r2) = rules
        assert r1.conditions == [(0, "<=", 1.5)]
        assert r2.conditions == [(0, ">", 1.5)]

    def test_rules_agree_with_predict(self):
        rng = np.random.default_rng(2)
        X = rng.normal(size=(200, 4))
        y = (X[:, 0] + X[:, 2] > 0).astype(int)
        tree = fit(X, y)
        rules = extract_rules(tree)
        probes = rng.normal(size=(1000, 4))
        for record in probes:
            matching = [r for r in rules if r.matches(record)]
            assert len(matching) == 1  # rules partition the space
            assert matching[0].prediction == tree.predict(record)

    def test_rule_text_format(self):
        rule = shadow_tree.Rule([(3, "<=", 1.5), (0, ">", 0.25)], 1, 120, 0.97)
        assert str(rule) == "IF f3 <= 1.50 AND f0 > 0.25 THEN class=1 [support=120 purity=0.97]"

    def test_render_golden(self, golden):
        X = [[0.0, 0.0], [1.0, 0.0], [2.0, 1.0], [3.0, 1.0], [4.0, 1.0], [5.0, 0.0]]
        y = [0, 0, 1, 1, 1, 0]
        tree = fit(X, y, TreeParams(min_samples_split=2))
        golden.check(
            "tree_render.txt",
            shadow_tree.render_tree(tree, ["width", "height"])
            + "\n"
            + shadow_tree.rules_to_text(extract_rules(tree)),
        )


class TestTreeImportance:
    def test_single_leaf_all_zero(self):
        tree = fit([[0.0]], [0], TreeParams())
        assert np.array_equal(tree_importance(tree), [0.0])

    def test_single_feature_one_hot(self):
        X = np.zeros((20, 4))
        X[:, 2] = np.arange(20)
        y = (np.arange(20) >= 10).astype(int)
        tree = fit(X, y)
        assert np.array_equal(tree_importance(tree), [0, 0, 1, 0])

    def test_hand_built_depth_two(self):
        # root on f0 (100 samples, decrease .1), child on f1 (40 samples, .2)
        leaf = lambda c: Leaf(np.array([10.0, 0.0]) if c == 0 else np.array([0.0, 10.0]))
        child = Split(1, 0.5, leaf(0), leaf(1), 40, 0.2)
        root = Split(0, 0.0, child, leaf(1), 100, 0.1)
        tree = DecisionTree(root, 2, 2, TreeParams())
        imp = tree_importance(tree)
        raw0 = (100 / 100) * 0.1
        raw1 = (40 / 100) * 0.2
        assert imp[0] == pytest.approx(raw0 / (raw0 + raw1))
        assert imp[1] == pytest.approx(raw1 / (raw0 + raw1))

    def test_sums_to_one(self):
        rng = np.random.default_rng(3)
        X = rng.normal(size=(100, 5))
        y = rng.integers(2, size=100)
        tree = fit(X, y)
        if isinstance(tree.root, Split):
            assert tree_importance(tree).sum() == pytest.approx(1.0)

    def test_chosen_split_beats_all_candidates(self):
        rng = np.random.default_rng(4)
        for _ in range(10):
            X = rng.normal(size=(20, 3))
            y = rng.integers(2, size=20)
            tree = fit(X, y, TreeParams(min_samples_split=2))
            if not isinstance(tree.root, Split):
                continue
            dec, _, _ = brute_force_best_split(X, y, 2)
            assert tree.root.impurity_decrease >= dec - 1e-12


class TestPermutationImportance:
    def test_constant_feature_exactly_zero(self):
        X = np.column_stack([np.ones(50), np.arange(50.0)])
        y = (np.arange(50) >= 25).astype(int)
        tree = fit(X, y)
        imp = permutation_importance(tree, X, y, rng=np.random.default_rng(0))
        assert imp[0] == 0.0

    def test_ignored_feature_exactly_zero(self):
        rng = np.random.default_rng(1)
        X = np.column_stack([np.arange(60.0), rng.normal(size=60)])
        y = (X[:, 0] >= 30).astype(int)
        tree = fit(X, y)
        used = {r.feature for r in _internal_nodes(tree)}
        assert 1 not in used
        imp = permutation_importance(tree, X, y, rng=np.random.default_rng(2))
        assert imp[1] == 0.0

    def test_informative_feature_dominates(self):
        rng = np.random.default_rng(5)
        X = np.column_stack([np.linspace(-1, 1, 80), rng.normal(size=80)])
        y = (X[:, 0] > 0).astype(int)
        tree = fit(X, y)
        imp = permutation_importance(tree, X, y, rng=np.random.default_rng(3))
        assert imp[0] > imp[1] == 0.0

    def test_works_on_callables(self):
        X = np.column_stack([np.linspace(-1, 1, 40), np.zeros(40)])
        y = (X[:, 0] > 0).astype(int)
        imp = permutation_importance(
            lambda data: (data[:, 0] > 0).astype(int), X, y,
            rng=np.random.default_rng(0),
        )
        assert imp[0] > 0 and imp[1] == 0.0


def _internal_nodes(tree):
    out = []

    def walk(node):
        if isinstance(node, Split):
            out.append(node)
            walk(node.left)
            walk(node.right)

    walk(tree.root)
    return out


class TestSerialization:
    def test_json_round_trip(self):
        rng = np.random.default_rng(8)
        X = rng.normal(size=(80, 3))
        y = rng.integers(3, size=80)
        tree = fit(X, y, class_count=3)
        back = shadow_tree.tree_from_json(shadow_tree.tree_to_json(tree))
        probes = rng.normal(size=(200, 3))
        assert np.array_equal(tree.predict_batch(probes), back.predict_batch(probes))
