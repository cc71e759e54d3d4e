"""Tracking toolkit for 360-degree equirectangular video."""

from ._core import (
    AdapterError,
    Bbox,
    Bfov,
    DomainError,
    Error,
    IoError,
    LonLat,
    ValidationError,
    angular_distance,
    attributes,
    evaluate,
    iou_bbox,
    mask_to_bbox,
    mask_to_bfov,
    pix_to_sph,
    precision_dual,
    select_region_mode,
    sph_to_pix,
    sphere_iou,
    success_dual,
    synthesize,
    unwarp,
)

__all__ = [
    "AdapterError",
    "Bbox",
    "Bfov",
    "DomainError",
    "Error",
    "IoError",
    "LonLat",
    "ValidationError",
    "angular_distance",
    "attributes",
    "evaluate",
    "iou_bbox",
    "mask_to_bbox",
    "mask_to_bfov",
    "pix_to_sph",
    "precision_dual",
    "select_region_mode",
    "sph_to_pix",
    "sphere_iou",
    "success_dual",
    "synthesize",
    "unwarp",
]
