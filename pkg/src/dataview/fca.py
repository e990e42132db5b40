"""Formal Concept Analysis over binarized data views.

Contexts store incidence as per-object attribute bitmasks (Python ints),
which keeps the derivation operators and NextClosure tight.  Concept
enumeration is capped at 64 attributes per lattice; binned tabular data
stays far below that.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

MAX_ATTRIBUTES = 64


class AttributeCapError(ValueError):
    """Too many attributes for exhaustive lattice construction."""


def _bits(mask):
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def popcount(mask):
    return mask.bit_count()


@dataclass
class FeatureBins:
    """Ordered cut points for one feature.

    cuts (c1 < c2 < ...) produce len(cuts)+1 attributes named
    <name>1..<name>{n}: value < c1 -> bin 1, c1 <= value < c2 -> bin 2,
    ..., value >= c_last -> last bin.  A value equal to a cut lands in
    the higher bin (closed lower edge).
    """

    name: str
    cuts: tuple

    def __post_init__(self):
        self.cuts = tuple(float(c) for c in self.cuts)
        if any(a >= b for a, b in zip(self.cuts, self.cuts[1:])):
            raise ValueError(f"cuts for {self.name} must be strictly increasing")

    @property
    def attribute_names(self):
        return [f"{self.name}{i + 1}" for i in range(len(self.cuts) + 1)]

    def bin_index(self, value):
        return int(np.searchsorted(self.cuts, value, side="right"))


@dataclass
class BinSpec:
    features: list  # FeatureBins, one per dataset feature, in column order

    @property
    def attribute_names(self):
        names = [a for fb in self.features for a in fb.attribute_names]
        if len(set(names)) != len(names):
            raise ValueError("attribute names must be unique")
        return names

    def record_mask(self, record):
        """Attribute bitmask with exactly one active bin per feature."""
        mask = 0
        offset = 0
        for fb, value in zip(self.features, record):
            mask |= 1 << (offset + fb.bin_index(value))
            offset += len(fb.cuts) + 1
        return mask

    def attribute_feature(self):
        """attribute index -> feature index, for importance aggregation."""
        out = []
        for fi, fb in enumerate(self.features):
            out.extend([fi] * (len(fb.cuts) + 1))
        return out


def tertile_bins(data, names):
    """Default spec for unnamed datasets: tertile cuts per feature."""
    X = np.asarray(data, dtype=np.float64)
    features = []
    for j, name in enumerate(names):
        col = X[:, j]
        c1, c2 = np.quantile(col, [1 / 3, 2 / 3])
        if c1 == c2:  # nearly-constant column: single cut at the median edge
            features.append(FeatureBins(name, (float(c1),) if c1 > col.min() else (float(col.max()),)))
        else:
            features.append(FeatureBins(name, (float(c1), float(c2))))
    return BinSpec(features)


def diabetes_bins():
    """Bins for the diabetes-style dataset with the published boundaries:
    Insulin 16/166, Glucose 140/200, Age 20/60, blood pressure 60/90;
    remaining features get fixed two-cut splits of their typical ranges."""
    return BinSpec(
        [
            FeatureBins("Pregnancies", (2, 6)),
            FeatureBins("Glucose", (140, 200)),
            FeatureBins("BloodPressure", (60, 90)),
            FeatureBins("SkinThickness", (15, 35)),
            FeatureBins("Insulin", (16, 166)),
            FeatureBins("BMI", (25, 35)),
            FeatureBins("DPF", (0.3, 0.8)),
            FeatureBins("Age", (20, 60)),
        ]
    )


@dataclass
class FormalContext:
    attributes: list  # names
    rows: list  # per-object attribute bitmask
    objects: list = None  # optional ids; defaults to 0..n-1

    def __post_init__(self):
        if self.objects is None:
            self.objects = list(range(len(self.rows)))
        if len(set(self.attributes)) != len(self.attributes):
            raise ValueError("attribute names must be unique")
        if len(self.objects) != len(self.rows):
            raise ValueError("object/row count mismatch")
        self._cols = None

    @property
    def n_objects(self):
        return len(self.rows)

    @property
    def n_attributes(self):
        return len(self.attributes)

    @property
    def full_intent(self):
        return (1 << self.n_attributes) - 1

    @property
    def full_extent(self):
        return (1 << self.n_objects) - 1

    def columns(self):
        if self._cols is None:
            cols = [0] * self.n_attributes
            for o, row in enumerate(self.rows):
                for a in _bits(row):
                    cols[a] |= 1 << o
            self._cols = cols
        return self._cols

    def restrict(self, object_indices):
        return FormalContext(
            attributes=list(self.attributes),
            rows=[self.rows[i] for i in object_indices],
            objects=[self.objects[i] for i in object_indices],
        )


def prime_objects(ctx, extent):
    """Attributes common to every object in the extent bitmask."""
    intent = ctx.full_intent
    for o in _bits(extent):
        intent &= ctx.rows[o]
    return intent


def prime_attrs(ctx, intent):
    """Objects possessing every attribute in the intent bitmask."""
    extent = ctx.full_extent
    cols = ctx.columns()
    for a in _bits(intent):
        extent &= cols[a]
    return extent


def closure(ctx, intent):
    return prime_objects(ctx, prime_attrs(ctx, intent))


@dataclass(frozen=True)
class Concept:
    extent: int
    intent: int


def _next_closure(A, op, m):
    """Smallest op-closed set lectically greater than A, or None."""
    for i in range(m - 1, -1, -1):
        if A >> i & 1:
            A &= ~(1 << i)
        else:
            B = op(A | (1 << i))
            if (B & ~A) & ((1 << i) - 1) == 0:
                return B
    return None


def _check_cap(ctx):
    if ctx.n_attributes > MAX_ATTRIBUTES:
        raise AttributeCapError(
            f"{ctx.n_attributes} attributes exceeds the {MAX_ATTRIBUTES}-attribute "
            "lattice cap; use coarser bins"
        )


def concepts(ctx):
    """All formal concepts, intents enumerated in lectic order."""
    _check_cap(ctx)
    out = []
    A = closure(ctx, 0)
    while A is not None:
        out.append(Concept(prime_attrs(ctx, A), A))
        A = _next_closure(A, lambda X: closure(ctx, X), ctx.n_attributes)
    return out


def class_lattices(ctx, labels):
    """Concept sets of the per-class object restrictions.

    Returns {class_index: (restricted context, concepts)}.
    """
    labels = np.asarray(labels, dtype=int)
    if len(labels) != ctx.n_objects:
        raise ValueError("label count does not match object count")
    out = {}
    for c in sorted(set(labels.tolist())):
        idx = np.nonzero(labels == c)[0].tolist()
        sub = ctx.restrict(idx)
        out[c] = (sub, concepts(sub))
    return out


def fca_predict(lattices, record_intent):
    """Support-weighted best intent overlap per class; argmax wins,
    lowest index on ties.  Returns (class index, {class: score})."""
    scores = {}
    for c, (sub, cons) in lattices.items():
        best = 0.0
        n = sub.n_objects
        for con in cons:
            size = popcount(con.intent)
            if size == 0 or n == 0:
                continue
            overlap = popcount(con.intent & record_intent) / size
            best = max(best, overlap * (popcount(con.extent) / n))
        scores[c] = best
    pred = min(scores, key=lambda c: (-scores[c], c))
    return pred, scores


@dataclass(frozen=True)
class Implication:
    premise: int
    conclusion: int  # full closure of the premise
    support: int

    def added(self):
        return self.conclusion & ~self.premise


def lin_closure(X, implications):
    """Closure of an attribute set under a list of implications."""
    changed = True
    while changed:
        changed = False
        for imp in implications:
            if imp.premise & ~X == 0 and imp.conclusion & ~X:
                X |= imp.conclusion
                changed = True
    return X


def implications(ctx):
    """Duquenne-Guigues canonical basis, premises in lectic order."""
    _check_cap(ctx)
    basis = []
    full = ctx.full_intent
    A = 0
    while A is not None:
        Ac = closure(ctx, A)
        if Ac != A:
            basis.append(
                Implication(A, Ac, popcount(prime_attrs(ctx, A)))
            )
        if A == full:
            break
        A = _next_closure(A, lambda X: lin_closure(X, basis), ctx.n_attributes)
    return basis


def entails(basis, premise, attribute_mask):
    return lin_closure(premise, basis) & attribute_mask == attribute_mask


def binarize(data, labels, spec, include_class_attrs=False, class_count=None):
    """One object per record; exactly one active bin attribute per feature,
    plus Class0..Class{k-1} attributes when requested."""
    X = np.asarray(data, dtype=np.float64)
    attrs = spec.attribute_names
    if X.ndim != 2 or (X.shape[0] and X.shape[1] != len(spec.features)):
        raise ValueError("spec does not cover the data's features")
    n_bins = len(attrs)
    rows = [spec.record_mask(row) for row in X]
    if include_class_attrs:
        y = np.asarray(labels, dtype=int)
        if class_count is None:
            class_count = int(y.max()) + 1 if len(y) else 0
        attrs = attrs + [f"Class{c}" for c in range(class_count)]
        rows = [m | (1 << (n_bins + c)) for m, c in zip(rows, y)]
    return FormalContext(attributes=attrs, rows=rows)


def fca_importance(lattices, spec):
    """Per-feature, per-class percentage of concepts whose intent touches
    the feature, plus the cross-class average; rows sorted by descending
    average.  Returns (ordered feature names, {name: {class: pct, 'avg': pct}})."""
    attr_feature = spec.attribute_feature()
    names = [fb.name for fb in spec.features]
    table = {name: {} for name in names}
    for c, (sub, cons) in sorted(lattices.items()):
        informative = [con for con in cons if con.intent != 0]
        for fi, name in enumerate(names):
            if not informative:
                table[name][c] = 0.0
                continue
            hits = sum(
                1
                for con in informative
                if any(
                    attr_feature[a] == fi
                    for a in _bits(con.intent)
                    if a < len(attr_feature)
                )
            )
            table[name][c] = 100.0 * hits / len(informative)
    for name in names:
        vals = [table[name][c] for c in sorted(lattices)]
        table[name]["avg"] = sum(vals) / len(vals) if vals else 0.0
    order = sorted(names, key=lambda n: (-table[n]["avg"], n))
    return order, table


# ---------------------------------------------------------------------------
# Interchange formats
# ---------------------------------------------------------------------------


def to_cxt(ctx):
    """Burmeister .cxt export."""
    lines = ["B", "", str(ctx.n_objects), str(ctx.n_attributes), ""]
    lines += [str(o) for o in ctx.objects]
    lines += list(ctx.attributes)
    for row in ctx.rows:
        lines.append(
            "".join("X" if row >> a & 1 else "." for a in range(ctx.n_attributes))
        )
    return "\n".join(lines) + "\n"


def from_cxt(text):
    lines = [l for l in text.split("\n")]
    body = [l for l in lines if l != ""]
    if not body or body[0] != "B":
        raise ValueError("not a Burmeister context")
    n_obj, n_attr = int(body[1]), int(body[2])
    objects = body[3 : 3 + n_obj]
    attributes = body[3 + n_obj : 3 + n_obj + n_attr]
    rows = []
    for line in body[3 + n_obj + n_attr : 3 + n_obj + n_attr + n_obj]:
        mask = 0
        for a, ch in enumerate(line):
            if ch == "X":
                mask |= 1 << a
        rows.append(mask)
    return FormalContext(attributes=attributes, rows=rows, objects=objects)


def implications_to_text(basis, ctx):
    """One implication per line:
    {Insulin3, Glucose2, Age3} -> {Class1} [support=37]"""
    lines = []
    for imp in basis:
        prem = ", ".join(ctx.attributes[a] for a in _bits(imp.premise))
        concl = ", ".join(ctx.attributes[a] for a in _bits(imp.added()))
        lines.append(f"{{{prem}}} -> {{{concl}}} [support={imp.support}]")
    return "\n".join(lines) + "\n"
