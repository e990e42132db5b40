"""Bundled desk-scale datasets.

zoo.csv (100 animals, 16 attributes, 7 classes) and pima.csv (768 records,
8 features, 2 classes) are deterministic synthetic stand-ins shaped like
the classic UCI Zoo and Pima diabetes tables; regenerate them with
tools/generate_bundled_data.py.
"""

from __future__ import annotations

import importlib.resources

_DATA = importlib.resources.files("dataview") / "data"

BUILTIN = {
    "zoo": ("zoo.csv", "class"),
    "pima": ("pima.csv", "Outcome"),
}


def builtin_path(name):
    if name not in BUILTIN:
        raise KeyError(f"unknown bundled dataset {name!r}; have {sorted(BUILTIN)}")
    return str(_DATA / BUILTIN[name][0])


def builtin_label_column(name):
    return BUILTIN[name][1]
