"""Hill-climbing query synthesis against a blackbox oracle.

Records start fully random, then climb: re-randomize k features, keep the
candidate only if the oracle's confidence for the wanted class improves,
and accept once the oracle is confident beyond conf_min.  k shrinks after
repeated rejections; exhausted attempts restart from scratch.
"""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass, field

import numpy as np

from .oracle import top_class


@dataclass
class Continuous:
    min: float
    max: float

    def __post_init__(self):
        if not self.min < self.max:
            raise ValueError(f"continuous domain needs min < max, got [{self.min}, {self.max}]")

    def sample(self, rng):
        return rng.uniform(self.min, self.max)

    @property
    def span(self):
        return self.max - self.min


@dataclass
class Categorical:
    values: tuple

    def __post_init__(self):
        self.values = tuple(self.values)
        if not self.values:
            raise ValueError("categorical domain needs at least one value")

    def sample(self, rng):
        return float(self.values[rng.integers(len(self.values))])


@dataclass
class Binary:
    def sample(self, rng):
        return float(rng.integers(2))


def domains_from_data(data, binary_threshold=True):
    """Infer per-feature domains from reference rows.

    Columns containing only {0, 1} become Binary; everything else becomes
    Continuous over the observed min/max (or [-1, 1] if constant).
    """
    X = np.asarray(data, dtype=np.float64)
    domains = []
    for j in range(X.shape[1]):
        col = X[:, j]
        uniq = np.unique(col)
        if binary_threshold and set(uniq.tolist()) <= {0.0, 1.0}:
            domains.append(Binary())
        elif uniq.size == 1:
            domains.append(Continuous(-1.0, 1.0))
        else:
            domains.append(Continuous(float(col.min()), float(col.max())))
    return domains


def default_domains(feature_count):
    return [Continuous(-1.0, 1.0) for _ in range(feature_count)]


@dataclass
class HillConfig:
    conf_min: float = 0.7
    k_max: int | None = None  # defaults to max(1, feature_count // 2)
    k_min: int = 1
    rej_max: int = 10
    query_budget: int = 10000
    restarts: int = 50
    rng_seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.conf_min < 1.0:
            raise ValueError("conf_min must lie in (0, 1)")
        if self.k_min < 1:
            raise ValueError("k_min must be >= 1")
        if self.rej_max < 1 or self.query_budget < 1 or self.restarts < 1:
            raise ValueError("rej_max, query_budget and restarts must be >= 1")

    def resolved_k_max(self, feature_count):
        k = self.k_max if self.k_max is not None else max(1, feature_count // 2)
        if not self.k_min <= k <= feature_count:
            raise ValueError(
                f"need k_min <= k_max <= feature_count, got {self.k_min}, {k}, {feature_count}"
            )
        return k


@dataclass
class Failure:
    class_index: int
    best_confidence: float
    queries: int


@dataclass
class SynthReport:
    records: np.ndarray  # (n, feature_count)
    labels: np.ndarray  # (n,)
    confidences: np.ndarray  # (n,)
    per_class_counts: dict
    failures: list
    queries: int
    record_seconds: list  # wall time per emitted record

    @property
    def seconds_per_record(self):
        return sum(self.record_seconds) / len(self.record_seconds) if self.record_seconds else 0.0

    def to_csv(self):
        """CSV with header f0..f{n-1},label,confidence; full precision."""
        buf = io.StringIO()
        n_feat = self.records.shape[1] if self.records.size else 0
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow([f"f{j}" for j in range(n_feat)] + ["label", "confidence"])
        for row, label, conf in zip(self.records, self.labels, self.confidences):
            writer.writerow(
                [f"{v:.17g}" for v in row] + [int(label), f"{conf:.17g}"]
            )
        return buf.getvalue()


def load_synth_csv(text):
    """Inverse of SynthReport.to_csv; returns (records, labels, confidences)."""
    rows = list(csv.reader(io.StringIO(text)))
    header, body = rows[0], rows[1:]
    n_feat = len(header) - 2
    records = np.array([[float(v) for v in r[:n_feat]] for r in body]).reshape(
        len(body), n_feat
    )
    labels = np.array([int(r[n_feat]) for r in body], dtype=int)
    confs = np.array([float(r[n_feat + 1]) for r in body])
    return records, labels, confs


def random_record(domains, rng):
    return np.array([d.sample(rng) for d in domains])


def randomize(record, k, domains, rng):
    """Resample exactly k distinct features uniformly from their domains."""
    n = len(domains)
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}], got {k}")
    out = np.array(record, dtype=np.float64, copy=True)
    idx = rng.choice(n, size=k, replace=False)
    for j in idx:
        out[j] = domains[j].sample(rng)
    return out


def synthesize_record(handle, class_index, cfg, domains, rng):
    """One hill-climbing attempt chain; Record on success, Failure otherwise."""
    if not 0 <= class_index < handle.class_count:
        raise ValueError(f"class index {class_index} out of range")
    k_max = cfg.resolved_k_max(len(domains))
    queries = 0
    best_ever = 0.0

    def confidence(r):
        nonlocal queries
        queries += 1
        return handle.classify(r)

    for _ in range(cfg.restarts):
        base = random_record(domains, rng)
        probs = confidence(base)
        cls, conf = top_class(probs)
        best = float(probs[class_index])
        best_ever = max(best_ever, best)
        if cls == class_index and conf >= cfg.conf_min:
            return base, best, queries
        k = k_max
        rejections = 0
        while queries < cfg.query_budget:
            cand = randomize(base, k, domains, rng)
            probs = confidence(cand)
            cls, conf = top_class(probs)
            p_c = float(probs[class_index])
            best_ever = max(best_ever, p_c)
            if cls == class_index and conf >= cfg.conf_min:
                return cand, p_c, queries
            if p_c > best:
                base, best = cand, p_c
                rejections = 0
            else:
                rejections += 1
                if rejections >= cfg.rej_max:
                    if k <= cfg.k_min:
                        break  # bottomed out: restart fresh
                    k = max(cfg.k_min, k // 2)
                    rejections = 0
        if queries >= cfg.query_budget:
            break
    return Failure(class_index, best_ever, queries)


def synthesize_dataset(handle, classes, n_per_class, cfg, domains):
    """Build the data view: n_per_class accepted records per class.

    Per-record rngs are derived from (seed, class, index) so serial and
    parallel schedules produce identical output.
    """
    records, labels, confs, seconds = [], [], [], []
    counts = {c: 0 for c in classes}
    failures = []
    total_queries = 0
    for c in classes:
        for i in range(n_per_class):
            rng = np.random.default_rng([cfg.rng_seed, c, i])
            t0 = time.perf_counter()
            result = synthesize_record(handle, c, cfg, domains, rng)
            dt = time.perf_counter() - t0
            if isinstance(result, Failure):
                failures.append(result)
                total_queries += result.queries
            else:
                rec, conf, q = result
                records.append(rec)
                labels.append(c)
                confs.append(conf)
                seconds.append(dt)
                counts[c] += 1
                total_queries += q
    n_feat = handle.feature_count
    return SynthReport(
        records=np.array(records).reshape(len(records), n_feat),
        labels=np.array(labels, dtype=int),
        confidences=np.array(confs),
        per_class_counts=counts,
        failures=failures,
        queries=total_queries,
        record_seconds=seconds,
    )
