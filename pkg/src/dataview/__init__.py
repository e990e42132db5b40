"""Blackbox data-view extraction and interpretable shadow models.

Query a classifier you cannot open, synthesize the data it is confident
about (hill climbing or per-class generators trained through the frozen
model), fit an interpretable shadow on that view (decision tree or
formal concept analysis), and measure how faithfully the shadow mimics
the blackbox.
"""

from . import (
    datasets,
    evaluation,
    fca,
    gansynth,
    hillsynth,
    netcore,
    oracle,
    pipeline,
    shadow_tree,
)

__all__ = [
    "datasets",
    "evaluation",
    "fca",
    "gansynth",
    "hillsynth",
    "netcore",
    "oracle",
    "pipeline",
    "shadow_tree",
]

__version__ = "0.1.0"
