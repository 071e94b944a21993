"""Kernel density estimation and the Jensen-Shannon gradient estimator."""

from .js import (
    LOG2,
    SampleBatch,
    canonical_sample_order,
    estimate_partition,
    js_weights,
    make_sample_batch,
    weighted_logscore,
)
from .kde import kde_eval, kde_logpdf, sample_proposal

__all__ = [
    "LOG2",
    "SampleBatch",
    "canonical_sample_order",
    "estimate_partition",
    "js_weights",
    "kde_eval",
    "kde_logpdf",
    "make_sample_batch",
    "sample_proposal",
    "weighted_logscore",
]
