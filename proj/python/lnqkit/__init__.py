"""Volumetric lymph node toolkit: morphology, measurement and evaluation on numpy arrays."""

from ._core import (
    apply_strategy,
    assd,
    connected_components,
    dice,
    dilate,
    postprocess_filter,
    read_volume,
    shortest_diameters,
    wilcoxon,
)

__all__ = [
    "apply_strategy",
    "assd",
    "connected_components",
    "dice",
    "dilate",
    "postprocess_filter",
    "read_volume",
    "shortest_diameters",
    "wilcoxon",
]
