"""End-to-end orchestration: ingest, scale, train the target, extract the
data view, fit both shadow models, evaluate, and export artifacts.

Every run is governed by one top-level seed; all stage seeds are derived
from it and echoed in the run manifest, so a manifest is enough to
reproduce a run byte for byte (timings are reported separately and are
excluded from the reproducibility hashes).
"""

from __future__ import annotations

import csv
import hashlib
import json
import pathlib
import time
from dataclasses import dataclass, field, asdict

import numpy as np

from . import datasets, evaluation, fca, gansynth, hillsynth, netcore, shadow_tree
from .hillsynth import HillConfig, SynthReport, domains_from_data
from .netcore import TrainConfig
from .oracle import InProcessOracle


class ConfigError(ValueError):
    """Invalid pipeline configuration."""


class StageError(RuntimeError):
    """Failure inside a named pipeline stage."""

    def __init__(self, stage, cause):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage


# ---------------------------------------------------------------------------
# Data ingestion
# ---------------------------------------------------------------------------


@dataclass
class Schema:
    label_column: str
    feature_columns: list | None = None  # None = every other column


def load_csv(path, schema):
    """Parse a labeled CSV.

    Returns (X, y, feature_names, label_names): features as float64, the
    label column mapped to contiguous class indices in first-seen order of
    the sorted distinct values.
    """
    path = pathlib.Path(path)
    if not path.exists():
        raise ConfigError(f"dataset file not found: {path}")
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ConfigError(f"{path}: empty file")
    header = rows[0]
    if schema.label_column not in header:
        raise ConfigError(f"{path}: missing label column {schema.label_column!r}")
    features = schema.feature_columns
    if features is None:
        features = [c for c in header if c != schema.label_column]
    for col in features:
        if col not in header:
            raise ConfigError(f"{path}: missing feature column {col!r}")
    fidx = [header.index(c) for c in features]
    lidx = header.index(schema.label_column)
    X = np.empty((len(rows) - 1, len(fidx)))
    raw_labels = []
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise ConfigError(f"{path}: row {r} has {len(row)} cells, expected {len(header)}")
        for j, c in enumerate(fidx):
            try:
                X[r - 2, j] = float(row[c])
            except ValueError:
                raise ConfigError(
                    f"{path}: non-numeric value {row[c]!r} at row {r}, "
                    f"column {header[c]!r}"
                ) from None
        raw_labels.append(row[lidx])
    label_names = sorted(set(raw_labels), key=_label_sort_key)
    mapping = {v: i for i, v in enumerate(label_names)}
    y = np.array([mapping[v] for v in raw_labels], dtype=int)
    return X, y, features, label_names


def _label_sort_key(v):
    try:
        return (0, float(v), v)
    except ValueError:
        return (1, 0.0, v)


def train_test_split(n, fraction, seed):
    rng = np.random.default_rng(seed)
    order = rng.permutation(n)
    cut = int(round(n * fraction))
    return order[:cut], order[cut:]


# ---------------------------------------------------------------------------
# Scaling
# ---------------------------------------------------------------------------


@dataclass
class MinMaxScale:
    mins: np.ndarray
    maxs: np.ndarray

    def apply(self, X):
        X = np.asarray(X, dtype=np.float64)
        span = self.maxs - self.mins
        out = np.zeros_like(X)
        nz = span != 0
        out[:, nz] = -1.0 + 2.0 * (X[:, nz] - self.mins[nz]) / span[nz]
        return out  # constant columns map to 0

    def invert(self, X):
        X = np.asarray(X, dtype=np.float64)
        span = self.maxs - self.mins
        out = np.tile(self.mins, (len(X), 1))
        nz = span != 0
        out[:, nz] = self.mins[nz] + (X[:, nz] + 1.0) * span[nz] / 2.0
        return out


def scale_minmax(X, fit_rows=None):
    """Fit [-1, 1] scaling on fit_rows (default: all rows); returns
    (scaled X, MinMaxScale)."""
    X = np.asarray(X, dtype=np.float64)
    ref = X if fit_rows is None else X[fit_rows]
    scale = MinMaxScale(ref.min(axis=0), ref.max(axis=0))
    return scale.apply(X), scale


# ---------------------------------------------------------------------------
# Purchase-style synthetic data
# ---------------------------------------------------------------------------


def kmeans_label(data, k, seed):
    """Deterministic Lloyd's algorithm with k-means++-style seeding."""
    X = np.asarray(data, dtype=np.float64)
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > len(np.unique(X, axis=0)):
        raise ValueError("k exceeds the number of distinct rows")
    rng = np.random.default_rng(seed)
    centers = [X[rng.integers(len(X))]]
    for _ in range(1, k):
        d2 = np.min(
            [((X - c) ** 2).sum(axis=1) for c in centers], axis=0
        )
        total = d2.sum()
        if total == 0:
            probs = np.full(len(X), 1.0 / len(X))
        else:
            probs = d2 / total
        centers.append(X[rng.choice(len(X), p=probs)])
    centers = np.array(centers)
    labels = np.zeros(len(X), dtype=int)
    for _ in range(300):
        dists = ((X[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        new_labels = np.argmin(dists, axis=1)
        for c in range(k):
            members = X[new_labels == c]
            if len(members):
                centers[c] = members.mean(axis=0)
            else:  # re-seed an empty cluster from the farthest point
                far = np.argmax(np.min(dists, axis=1))
                centers[c] = X[far]
                new_labels[far] = c
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
    return labels


def make_purchase_like(n_users, n_features, n_classes, seed):
    """Binary user-product matrix from per-cluster Bernoulli profiles,
    labeled by k-means (which defines the class labels)."""
    if min(n_users, n_features, n_classes) < 1:
        raise ValueError("parameters must be positive")
    rng = np.random.default_rng(seed)
    # near-binary prototypes per cluster: buys-or-not with flip noise,
    # which is what k-means on a user-product table actually separates
    profiles = np.where(rng.random((n_classes, n_features)) < 0.5, 0.1, 0.9)
    assignment = rng.integers(n_classes, size=n_users)
    X = (rng.random((n_users, n_features)) < profiles[assignment]).astype(float)
    y = kmeans_label(X, n_classes, seed)
    return X, y


PURCHASE_PRESETS = {
    "purchase-30f-2c": dict(n_users=960, n_features=30, n_classes=2),
    "purchase-20f-5c": dict(n_users=960, n_features=20, n_classes=5),
}


# ---------------------------------------------------------------------------
# Pipeline configuration
# ---------------------------------------------------------------------------


@dataclass
class PipelineConfig:
    dataset: str = "pima"  # bundled name, purchase preset, or CSV path
    label_column: str | None = None  # required for external CSVs
    feature_columns: list | None = None
    split_fraction: float = 0.8
    seed: int = 0
    scaling: str = "none"  # "none" or "minmax"; gan forces minmax
    target_hidden: list | None = None  # default: [2 * feature_count]
    target_epochs: int = 300
    target_learning_rate: float = 0.01
    synthesis: str = "hill"  # "hill" or "gan"
    n_per_class: int = 1000
    conf_min: float = 0.7
    filter_confidence: bool = True  # gan only
    gan_epochs: int = 1500
    gan_ensembles: int = 1
    shadow: str = "tree"  # "tree" or "fca"
    tree_max_depth: int = 12  # deeper than the readable-export default
    output_dir: str = "runs/out"

    def validate(self):
        if not 0.0 < self.split_fraction < 1.0:
            raise ConfigError("split_fraction must lie in (0, 1)")
        if self.synthesis not in ("hill", "gan"):
            raise ConfigError(f"unknown synthesis method {self.synthesis!r}")
        if self.shadow not in ("tree", "fca"):
            raise ConfigError(f"unknown shadow kind {self.shadow!r}")
        if self.scaling not in ("none", "minmax"):
            raise ConfigError(f"unknown scaling mode {self.scaling!r}")
        if not 0.0 < self.conf_min < 1.0:
            raise ConfigError("conf_min must lie in (0, 1)")
        if self.n_per_class < 0:
            raise ConfigError("n_per_class must be >= 0")


CONFIG_KEYS = set(PipelineConfig.__dataclass_fields__)


def load_config(path):
    """Read a JSON config file with line-level error reporting."""
    try:
        text = pathlib.Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top level must be an object")
    unknown = set(doc) - CONFIG_KEYS
    if unknown:
        raise ConfigError(f"{path}: unknown config keys {sorted(unknown)}")
    cfg = PipelineConfig(**doc)
    cfg.validate()
    return cfg


def derive_seed(top_seed, *path):
    """Stage seed derived from the top-level seed and a label path."""
    digest = hashlib.sha256(
        ("/".join([str(top_seed), *map(str, path)])).encode()
    ).digest()
    return int.from_bytes(digest[:8], "big") % (2**63)


def load_dataset(cfg):
    if cfg.dataset in datasets.BUILTIN:
        path = datasets.builtin_path(cfg.dataset)
        label = cfg.label_column or datasets.builtin_label_column(cfg.dataset)
        return load_csv(path, Schema(label, cfg.feature_columns))
    if cfg.dataset in PURCHASE_PRESETS:
        params = PURCHASE_PRESETS[cfg.dataset]
        X, y = make_purchase_like(seed=derive_seed(cfg.seed, "purchase"), **params)
        names = [f"p{j}" for j in range(params["n_features"])]
        return X, y, names, [str(c) for c in range(params["n_classes"])]
    if cfg.label_column is None:
        raise ConfigError("label_column is required for external CSV datasets")
    return load_csv(cfg.dataset, Schema(cfg.label_column, cfg.feature_columns))


# ---------------------------------------------------------------------------
# Run orchestration
# ---------------------------------------------------------------------------


@dataclass
class RunResult:
    target_accuracy: float
    oshadow_fidelity: float
    sshadow_fidelity: float
    sshadow_accuracy: float
    n_test: int
    synth_seconds_per_record: float
    oracle_queries: int
    artifacts: dict  # name -> path


def _fit_shadow(cfg, X, y, class_count, spec=None):
    if cfg.shadow == "tree":
        tree = shadow_tree.fit(
            X, y, shadow_tree.TreeParams(max_depth=cfg.tree_max_depth), class_count
        )
        return tree, lambda data: tree.predict_batch(data)
    if spec is None:
        spec = fca.tertile_bins(X, [f"f{j}" for j in range(X.shape[1])])
    ctx = fca.binarize(X, y, spec)
    lattices = fca.class_lattices(ctx, y)
    model = (spec, ctx, lattices)

    def predict(data):
        return np.array(
            [fca.fca_predict(lattices, spec.record_mask(r))[0] for r in data],
            dtype=int,
        )

    return model, predict


def _synthesize(cfg, oracle, train_X, class_count):
    """Returns (records, labels, confidences, seconds_per_record, queries)."""
    if cfg.synthesis == "hill":
        domains = domains_from_data(train_X)
        hill = HillConfig(
            conf_min=cfg.conf_min, rng_seed=derive_seed(cfg.seed, "hill")
        )
        before = oracle.query_count
        report = hillsynth.synthesize_dataset(
            oracle, range(class_count), cfg.n_per_class, hill, domains
        )
        return (
            report.records,
            report.labels,
            report.confidences,
            report.seconds_per_record,
            oracle.query_count - before,
        )
    gen_cfg = gansynth.GeneratorConfig(
        epochs=cfg.gan_epochs, rng_seed=derive_seed(cfg.seed, "gan")
    )
    before = oracle.query_count
    generators = gansynth.train_all_generators(oracle, gen_cfg, cfg.gan_ensembles)
    records, labels, confs, _filtered, spr = gansynth.sample_pooled(
        generators,
        oracle,
        cfg.n_per_class,
        derive_seed(cfg.seed, "gan-sample"),
        conf_min=cfg.conf_min if cfg.filter_confidence else None,
    )
    return records, labels, confs, spr, oracle.query_count - before


def run_pipeline(cfg, write_artifacts=True):
    """Full target -> data view -> shadows -> evaluation run."""
    cfg.validate()
    out = pathlib.Path(cfg.output_dir)
    timings = {}

    def stage(name):
        timings[name] = time.perf_counter()

    def stage_done(name):
        timings[name] = time.perf_counter() - timings[name]

    try:
        stage("load")
        X, y, feature_names, label_names = load_dataset(cfg)
        stage_done("load")
    except ConfigError:
        raise
    except Exception as exc:
        raise StageError("load", exc) from exc
    class_count = len(label_names)
    train_idx, test_idx = train_test_split(
        len(X), cfg.split_fraction, derive_seed(cfg.seed, "split")
    )

    scaling = "minmax" if cfg.synthesis == "gan" else cfg.scaling
    if scaling == "minmax":
        X, scale = scale_minmax(X, fit_rows=train_idx)
    else:
        scale = None

    try:
        stage("target")
        target = netcore.make_classifier(
            X.shape[1],
            class_count,
            hidden=cfg.target_hidden,
            seed=derive_seed(cfg.seed, "target-init"),
        )
        netcore.train(
            target,
            X[train_idx],
            y[train_idx],
            TrainConfig(
                learning_rate=cfg.target_learning_rate,
                epochs=cfg.target_epochs,
                rng_seed=derive_seed(cfg.seed, "target-train"),
            ),
        )
        stage_done("target")
    except Exception as exc:
        raise StageError("target", exc) from exc

    oracle = InProcessOracle(target)
    target_test_preds = np.argmax(oracle.classify_batch(X[test_idx]), axis=1)
    target_accuracy = evaluation.accuracy(target_test_preds, y[test_idx])

    # OShadow learns the original training data with its original labels;
    # its fidelity to the target is therefore bounded by how well the
    # target itself fits that data, which is the baseline the synthesized
    # view is meant to beat.
    try:
        stage("oshadow")
        _omodel, opredict = _fit_shadow(cfg, X[train_idx], y[train_idx], class_count)
        stage_done("oshadow")
    except Exception as exc:
        raise StageError("oshadow", exc) from exc

    try:
        stage("synthesis")
        records, labels, confs, spr, queries = _synthesize(
            cfg, oracle, X[train_idx], class_count
        )
        stage_done("synthesis")
    except Exception as exc:
        raise StageError("synthesis", exc) from exc
    if len(records) == 0:
        raise StageError("synthesis", "no records synthesized")

    try:
        stage("sshadow")
        smodel, spredict = _fit_shadow(cfg, records, labels, class_count)
        stage_done("sshadow")
    except Exception as exc:
        raise StageError("sshadow", exc) from exc

    oshadow_fid = evaluation.fidelity(opredict(X[test_idx]), target_test_preds)
    s_test_preds = spredict(X[test_idx])
    sshadow_fid = evaluation.fidelity(s_test_preds, target_test_preds)
    sshadow_acc = evaluation.accuracy(s_test_preds, y[test_idx])

    artifacts = {}
    if write_artifacts:
        out.mkdir(parents=True, exist_ok=True)
        artifacts["target_model"] = _write(out / "target.model", netcore.serialize(target))
        synth_report = SynthReport(
            records=records,
            labels=labels,
            confidences=confs,
            per_class_counts={
                int(c): int((labels == c).sum()) for c in range(class_count)
            },
            failures=[],
            queries=queries,
            record_seconds=[],
        )
        artifacts["synth_csv"] = _write(out / "synth.csv", synth_report.to_csv())
        if cfg.shadow == "tree":
            artifacts["tree_json"] = _write(
                out / "shadow_tree.json", json.dumps(shadow_tree.tree_to_json(smodel), indent=1)
            )
            artifacts["tree_text"] = _write(
                out / "shadow_tree.txt", shadow_tree.render_tree(smodel, feature_names)
            )
            artifacts["rules"] = _write(
                out / "rules.txt",
                shadow_tree.rules_to_text(shadow_tree.extract_rules(smodel)),
            )
        else:
            spec, ctx, lattices = smodel
            ctx_cls = fca.binarize(records, labels, spec, include_class_attrs=True,
                                   class_count=class_count)
            artifacts["context_cxt"] = _write(out / "context.cxt", fca.to_cxt(ctx_cls))
            artifacts["implications"] = _write(
                out / "implications.txt",
                _class_implications_text(records, labels, spec, class_count, label_names),
            )
            order, table = fca.fca_importance(lattices, spec)
            rows = [
                [name]
                + [f"{table[name][c]:.2f}" for c in sorted(lattices)]
                + [f"{table[name]['avg']:.2f}"]
                for name in order
            ]
            artifacts["fca_importance"] = _write(
                out / "fca_importance.csv",
                evaluation.report_csv(
                    rows,
                    ["feature"] + [f"class{c}" for c in sorted(lattices)] + ["avg"],
                ),
            )
        header = [
            "dataset", "target_accuracy", "oshadow_fidelity",
            "sshadow_fidelity", "sshadow_accuracy", "method", "shadow", "n_test",
        ]
        row = [
            cfg.dataset, f"{target_accuracy:.4f}", f"{oshadow_fid:.4f}",
            f"{sshadow_fid:.4f}", f"{sshadow_acc:.4f}", cfg.synthesis,
            cfg.shadow, len(test_idx),
        ]
        note = "fidelity measured on the held-out test split\n"
        artifacts["report_txt"] = _write(
            out / "report.txt", note + evaluation.report_text([row], header)
        )
        artifacts["report_csv"] = _write(
            out / "report.csv", evaluation.report_csv([row], header)
        )
        # the manifest sits inside the output directory, so the echoed
        # config records the location as "." to keep runs with identical
        # settings byte-identical wherever they are written
        manifest = {
            "config": {**asdict(cfg), "output_dir": "."},
            "derived_seeds": {
                name: derive_seed(cfg.seed, name)
                for name in ("split", "target-init", "target-train", "hill", "gan", "gan-sample")
            },
            "artifact_sha256": {
                name: _sha256(path) for name, path in artifacts.items()
            },
        }
        artifacts["manifest"] = _write(
            out / "manifest.json", json.dumps(manifest, indent=1, sort_keys=True)
        )
        # timing lives outside the hashed artifact set: it varies run to run
        _write(
            out / "timing.txt",
            "".join(f"{k} {v:.3f}s\n" for k, v in timings.items())
            + f"synthesis_seconds_per_record {spr:.6g}\n",
        )

    return RunResult(
        target_accuracy=target_accuracy,
        oshadow_fidelity=oshadow_fid,
        sshadow_fidelity=sshadow_fid,
        sshadow_accuracy=sshadow_acc,
        n_test=len(test_idx),
        synth_seconds_per_record=spr,
        oracle_queries=queries,
        artifacts=artifacts,
    )


def _class_implications_text(records, labels, spec, class_count, label_names,
                             cap=30):
    """Implication rules per class, each basis computed on that class's
    distinct synthesized records.

    Deduplication leaves the closure system (and therefore the basis)
    unchanged; the cap keeps rule extraction bounded on large views by
    retaining the most frequent distinct records, which the header notes.
    """
    labels = np.asarray(labels, dtype=int)
    chunks = []
    for c in range(class_count):
        masks = [spec.record_mask(r) for r in records[labels == c]]
        counts = {}
        for m in masks:
            counts[m] = counts.get(m, 0) + 1
        distinct = sorted(counts, key=lambda m: (-counts[m], m))
        note = ""
        if len(distinct) > cap:
            distinct = distinct[:cap]
            note = f", capped to the {cap} most frequent"
        n_bins = len(spec.attribute_names)
        ctx = fca.FormalContext(
            attributes=spec.attribute_names + [f"Class{c}"],
            rows=[m | (1 << n_bins) for m in distinct],
        )
        basis = fca.implications(ctx)
        chunks.append(
            f"# class {c} ({label_names[c]}): {len(distinct)} distinct records"
            f"{note}; support counts distinct records\n"
            + fca.implications_to_text(basis, ctx)
        )
    return "\n".join(chunks)


def _write(path, text):
    path = pathlib.Path(path)
    path.write_text(text)
    return str(path)


def _sha256(path):
    return hashlib.sha256(pathlib.Path(path).read_bytes()).hexdigest()


# ---------------------------------------------------------------------------
# Experiment harness
# ---------------------------------------------------------------------------


@dataclass
class ExperimentSpec:
    variable: str  # "num_classes", "num_features", or "num_records"
    values: list
    methods: tuple = ("hill",)
    n_per_class: int = 200
    n_features: int = 15  # class sweep
    n_classes: int = 2  # feature sweep
    conf_min: float = 0.7
    repetitions: int = 1
    seed: int = 0
    dataset: str = "purchase"  # record sweeps may name a bundled dataset

    def validate(self):
        if self.variable not in ("num_classes", "num_features", "num_records"):
            raise ConfigError(f"unknown sweep variable {self.variable!r}")
        if not self.values or any(v < 1 for v in self.values):
            raise ConfigError("sweep values must be positive")
        if list(self.values) != sorted(self.values):
            raise ConfigError("sweep values must be sorted ascending")
        for m in self.methods:
            if m not in ("hill", "gan"):
                raise ConfigError(f"unknown method {m!r}")


def run_experiment(spec, output_path=None):
    """One pipeline run per (value, method, repetition); returns rows and
    optionally writes the sweep CSV (mean +/- sd per cell)."""
    spec.validate()
    rows = []
    for value in spec.values:
        for method in spec.methods:
            fids, times = [], []
            for rep in range(spec.repetitions):
                # the seed deliberately excludes the swept value: the sweep
                # varies one knob against an otherwise identical run
                seed = derive_seed(spec.seed, spec.variable, method, rep)
                cfg = PipelineConfig(
                    dataset=spec.dataset if spec.variable == "num_records" else "purchase-sweep",
                    synthesis=method,
                    n_per_class=value if spec.variable == "num_records" else spec.n_per_class,
                    conf_min=spec.conf_min,
                    seed=seed,
                    target_epochs=200,
                    gan_epochs=800,
                )
                if spec.variable != "num_records":
                    n_features = value if spec.variable == "num_features" else spec.n_features
                    n_classes = value if spec.variable == "num_classes" else spec.n_classes
                    X, y = make_purchase_like(
                        960, n_features, n_classes, derive_seed(seed, "data")
                    )
                    result = _run_on_arrays(cfg, X, y)
                else:
                    result = run_pipeline(cfg, write_artifacts=False)
                fids.append(result.sshadow_fidelity)
                times.append(result.synth_seconds_per_record)
            rows.append(
                {
                    "variable": spec.variable,
                    "value": value,
                    "method": method,
                    "fidelity_mean": float(np.mean(fids)),
                    "fidelity_sd": float(np.std(fids)),
                    "seconds_per_record_mean": float(np.mean(times)),
                    "queries": None,
                }
            )
    if output_path:
        header = [
            "variable", "value", "method", "fidelity_mean", "fidelity_sd",
            "seconds_per_record_mean",
        ]
        body = [[r[k] for k in header] for r in rows]
        _write(output_path, evaluation.report_csv(body, header))
    return rows


def replicate(seed=0, output_dir="runs/replicate", n_per_class=500):
    """Run the bundled-dataset battery (zoo + pima, hill synthesis, tree
    shadow) under one top-level seed.

    Writes each run's artifacts plus hashes.json covering every
    deterministic artifact; two runs with the same seed produce identical
    hashes.
    """
    out = pathlib.Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    hashes = {}
    summary_rows = []
    for dataset in ("zoo", "pima"):
        cfg = PipelineConfig(
            dataset=dataset,
            synthesis="hill",
            shadow="tree",
            n_per_class=n_per_class,
            seed=derive_seed(seed, "replicate", dataset),
            output_dir=str(out / dataset),
        )
        result = run_pipeline(cfg)
        for name, path in result.artifacts.items():
            hashes[f"{dataset}/{name}"] = _sha256(path)
        summary_rows.append(
            [
                dataset,
                f"{result.target_accuracy:.4f}",
                f"{result.oshadow_fidelity:.4f}",
                f"{result.sshadow_fidelity:.4f}",
                f"{result.sshadow_accuracy:.4f}",
            ]
        )
    _write(
        out / "summary.txt",
        "fidelity measured on the held-out test split\n"
        + evaluation.report_text(
            summary_rows,
            ["dataset", "target_acc", "oshadow_fid", "sshadow_fid", "sshadow_acc"],
        ),
    )
    hashes["summary"] = _sha256(out / "summary.txt")
    _write(out / "hashes.json", json.dumps(hashes, indent=1, sort_keys=True))
    return hashes


def _run_on_arrays(cfg, X, y):
    """run_pipeline for in-memory data: same stages, no artifacts."""
    class_count = int(y.max()) + 1
    train_idx, test_idx = train_test_split(
        len(X), cfg.split_fraction, derive_seed(cfg.seed, "split")
    )
    if cfg.synthesis == "gan":
        X, _ = scale_minmax(X, fit_rows=train_idx)
    target = netcore.make_classifier(
        X.shape[1], class_count, seed=derive_seed(cfg.seed, "target-init")
    )
    netcore.train(
        target,
        X[train_idx],
        y[train_idx],
        TrainConfig(
            learning_rate=cfg.target_learning_rate,
            epochs=cfg.target_epochs,
            rng_seed=derive_seed(cfg.seed, "target-train"),
        ),
    )
    oracle = InProcessOracle(target)
    target_test_preds = np.argmax(oracle.classify_batch(X[test_idx]), axis=1)
    records, labels, confs, spr, queries = _synthesize(
        cfg, oracle, X[train_idx], class_count
    )
    if len(records) == 0:
        raise StageError("synthesis", "no records synthesized")
    _smodel, spredict = _fit_shadow(cfg, records, labels, class_count)
    _omodel, opredict = _fit_shadow(cfg, X[train_idx], y[train_idx], class_count)
    s_preds = spredict(X[test_idx])
    return RunResult(
        target_accuracy=evaluation.accuracy(target_test_preds, y[test_idx]),
        oshadow_fidelity=evaluation.fidelity(opredict(X[test_idx]), target_test_preds),
        sshadow_fidelity=evaluation.fidelity(s_preds, target_test_preds),
        sshadow_accuracy=evaluation.accuracy(s_preds, y[test_idx]),
        n_test=len(test_idx),
        synth_seconds_per_record=spr,
        oracle_queries=queries,
        artifacts={},
    )
