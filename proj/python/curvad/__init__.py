"""Curvature-based point cloud anomaly detection."""

from ._curvad import (
    CurvadError,
    auroc,
    curvature_field,
    eig3_sym,
    farthest_point_sample,
    generate_pseudo_anomaly,
    knn,
    load_cloud,
    logit_score,
    make_shape,
    multi_scale_curvature,
    normalize_cloud,
    normals,
    object_score,
    run_cli,
    save_cloud,
)

__all__ = [
    "CurvadError",
    "auroc",
    "curvature_field",
    "eig3_sym",
    "farthest_point_sample",
    "generate_pseudo_anomaly",
    "knn",
    "load_cloud",
    "logit_score",
    "make_shape",
    "multi_scale_curvature",
    "normalize_cloud",
    "normals",
    "object_score",
    "run_cli",
    "save_cloud",
]
