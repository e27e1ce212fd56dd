"""Gaussian-mixture interpolation of scattered image points.

Thin python layer over the C++ engine: forward/backward interpolation,
classical resamplers, sampling utilities and the point-position optimizer.
"""

from gmi._core import (
    ForwardCache,
    GmiError,
    PointSet,
    backward,
    forward,
    gaussian_weight,
    grid_subsample,
    kernel_eval,
    l1_metric,
    load_image,
    load_point_set,
    make_blob_image,
    optimize_points,
    oracle_forward,
    oracle_gradients_fd,
    random_subsample,
    resample,
    save_image,
    save_point_set,
    __version__,
)

__all__ = [
    "ForwardCache",
    "GmiError",
    "PointSet",
    "backward",
    "forward",
    "gaussian_weight",
    "grid_subsample",
    "kernel_eval",
    "l1_metric",
    "load_image",
    "load_point_set",
    "make_blob_image",
    "optimize_points",
    "oracle_forward",
    "oracle_gradients_fd",
    "random_subsample",
    "resample",
    "save_image",
    "save_point_set",
    "__version__",
]
