"""Structural comparison of two graphs over the same nodes."""

from __future__ import annotations

from itertools import combinations

from .errors import ConfigError
from .graphs import MixedGraph


def structural_metrics(estimate: MixedGraph, truth: MixedGraph) -> dict[str, float]:
    """Adjacency precision/recall/F1, endpoint agreement, and SHD.

    SHD counts one unit per pair whose adjacency differs, plus one per shared
    adjacency whose endpoint marks differ. Orientation accuracy is the
    fraction of shared adjacencies with identical marks. Empty-denominator
    ratios default to 1.0 (an empty estimate of an empty graph is perfect).
    """
    if set(truth.nodes) != set(estimate.nodes):
        raise ConfigError("graphs compare over different node sets")
    tp = fp = fn = 0
    shd = 0
    shared = agree = 0
    for a, b in combinations(truth.nodes, 2):
        in_ref = truth.has_edge(a, b)
        in_est = estimate.has_edge(a, b)
        if in_ref and in_est:
            tp += 1
            shared += 1
            if truth.marks(a, b) == estimate.marks(a, b):
                agree += 1
            else:
                shd += 1
        elif in_est:
            fp += 1
            shd += 1
        elif in_ref:
            fn += 1
            shd += 1
    precision = tp / (tp + fp) if tp + fp else 1.0
    recall = tp / (tp + fn) if tp + fn else 1.0
    f1 = (
        2 * precision * recall / (precision + recall)
        if precision + recall > 0
        else 0.0
    )
    return {
        "shd": float(shd),
        "adjacency_precision": precision,
        "adjacency_recall": recall,
        "adjacency_f1": f1,
        "orientation_accuracy": agree / shared if shared else 1.0,
    }
