"""Regenerate the bundled desk-scale datasets.

The toolkit ships two small CSVs shaped like the classic Zoo (100 animals,
16 attributes, 7 classes) and Pima diabetes (768 records, 8 features,
2 classes) tables.  They are deterministic synthetic stand-ins sampled
from class-conditional profiles chosen to match the published summary
statistics, not the original files; the pipeline only needs their shapes
and separability, never their provenance.

Run from the repo root:  python tools/generate_bundled_data.py
"""

import csv
import pathlib

import numpy as np

OUT = pathlib.Path(__file__).resolve().parent.parent / "src" / "dataview" / "data"

ZOO_FEATURES = [
    "hair", "feathers", "eggs", "milk", "airborne", "aquatic", "predator",
    "toothed", "backbone", "breathes", "venomous", "fins", "legs", "tail",
    "domestic", "catsize",
]

# per-class Bernoulli profiles (probability the binary attribute is 1),
# legs distribution, and class sizes summing to 100
ZOO_CLASSES = [
    # mammal
    (41, dict(hair=0.95, feathers=0.0, eggs=0.05, milk=1.0, airborne=0.05,
              aquatic=0.15, predator=0.5, toothed=0.98, backbone=1.0,
              breathes=1.0, venomous=0.02, fins=0.05, tail=0.85,
              domestic=0.2, catsize=0.6), {4: 0.85, 2: 0.1, 0: 0.05}),
    # bird
    (20, dict(hair=0.0, feathers=1.0, eggs=1.0, milk=0.0, airborne=0.8,
              aquatic=0.3, predator=0.45, toothed=0.0, backbone=1.0,
              breathes=1.0, venomous=0.0, fins=0.0, tail=1.0,
              domestic=0.15, catsize=0.15), {2: 1.0}),
    # reptile
    (5, dict(hair=0.0, feathers=0.0, eggs=0.8, milk=0.0, airborne=0.0,
             aquatic=0.3, predator=0.7, toothed=0.8, backbone=1.0,
             breathes=1.0, venomous=0.4, fins=0.0, tail=1.0,
             domestic=0.0, catsize=0.2), {0: 0.4, 4: 0.6}),
    # fish
    (13, dict(hair=0.0, feathers=0.0, eggs=0.95, milk=0.0, airborne=0.0,
              aquatic=1.0, predator=0.6, toothed=0.9, backbone=1.0,
              breathes=0.0, venomous=0.08, fins=1.0, tail=1.0,
              domestic=0.05, catsize=0.25), {0: 1.0}),
    # amphibian
    (4, dict(hair=0.0, feathers=0.0, eggs=1.0, milk=0.0, airborne=0.0,
             aquatic=0.9, predator=0.75, toothed=0.9, backbone=1.0,
             breathes=1.0, venomous=0.25, fins=0.0, tail=0.25,
             domestic=0.0, catsize=0.0), {4: 1.0}),
    # insect
    (8, dict(hair=0.4, feathers=0.0, eggs=1.0, milk=0.0, airborne=0.75,
             aquatic=0.1, predator=0.25, toothed=0.0, backbone=0.0,
             breathes=1.0, venomous=0.25, fins=0.0, tail=0.0,
             domestic=0.1, catsize=0.0), {6: 1.0}),
    # invertebrate
    (9, dict(hair=0.05, feathers=0.0, eggs=0.9, milk=0.0, airborne=0.0,
             aquatic=0.7, predator=0.7, toothed=0.0, backbone=0.0,
             breathes=0.3, venomous=0.2, fins=0.0, tail=0.0,
             domestic=0.05, catsize=0.1), {0: 0.5, 5: 0.1, 6: 0.2, 8: 0.2}),
]


def make_zoo(rng):
    rows = []
    for class_index, (count, profile, legs_dist) in enumerate(ZOO_CLASSES):
        legs_vals = list(legs_dist)
        legs_p = np.array([legs_dist[v] for v in legs_vals])
        for _ in range(count):
            row = []
            for feat in ZOO_FEATURES:
                if feat == "legs":
                    row.append(int(rng.choice(legs_vals, p=legs_p)))
                else:
                    row.append(int(rng.random() < profile[feat]))
            rows.append(row + [class_index])
    return rows


# class-conditional (mean, sd, lo, hi, decimals) per feature; 0 = negative
PIMA_PROFILE = {
    "Pregnancies": ((3.3, 3.0, 0, 13, 0), (4.9, 3.7, 0, 15, 0)),
    "Glucose": ((110.0, 24.0, 56, 197, 0), (141.0, 30.0, 78, 199, 0)),
    "BloodPressure": ((70.0, 12.0, 40, 104, 0), (75.0, 12.5, 44, 110, 0)),
    "SkinThickness": ((22.0, 11.0, 0, 49, 0), (27.0, 11.5, 0, 56, 0)),
    "Insulin": ((84.0, 70.0, 0, 540, 0), (120.0, 100.0, 0, 680, 0)),
    "BMI": ((30.3, 6.6, 18.2, 48.0, 1), (35.1, 6.9, 22.9, 57.3, 1)),
    "DPF": ((0.43, 0.26, 0.08, 1.8, 3), (0.55, 0.33, 0.09, 2.3, 3)),
    "Age": ((31.0, 11.0, 21, 70, 0), (37.0, 10.5, 21, 72, 0)),
}
PIMA_COUNTS = (500, 268)


def make_pima(rng):
    rows = []
    for outcome in (0, 1):
        for _ in range(PIMA_COUNTS[outcome]):
            row = []
            for feat, profiles in PIMA_PROFILE.items():
                mean, sd, lo, hi, dec = profiles[outcome]
                v = float(np.clip(rng.normal(mean, sd), lo, hi))
                row.append(round(v, dec) if dec else int(round(v)))
            rows.append(row + [outcome])
    order = rng.permutation(len(rows))
    return [rows[i] for i in order]


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)
    print(f"wrote {path} ({len(rows)} rows)")


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    write_csv(
        OUT / "zoo.csv",
        ZOO_FEATURES + ["class"],
        make_zoo(np.random.default_rng(20240101)),
    )
    write_csv(
        OUT / "pima.csv",
        list(PIMA_PROFILE) + ["Outcome"],
        make_pima(np.random.default_rng(20240102)),
    )


if __name__ == "__main__":
    main()
