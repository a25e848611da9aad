from .contact import (
    ContactState,
    FingertipContact,
    FingertipParams,
    GripperState,
    default_grid_geometry,
    resolve_contact,
    wrench_from_pressure,
)
from .datagen import DatasetConfig, OracleSample, generate_dataset, iter_samples, make_sample
from .render import camera_model, finger_region_mask, plane_frame_for, render, texture_rgb, tip_ellipse_axes
from .scene import (
    OBJECT_ARCHETYPES,
    OverlaySpec,
    Scene,
    Shape,
    TargetObject,
    TextureSpec,
    WorldConfig,
    make_world_config,
    sample_scene,
)
from .sim import GripperSim, sample_servo_scene

__all__ = [
    "ContactState",
    "DatasetConfig",
    "FingertipContact",
    "FingertipParams",
    "GripperSim",
    "GripperState",
    "OBJECT_ARCHETYPES",
    "OracleSample",
    "OverlaySpec",
    "Scene",
    "Shape",
    "TargetObject",
    "TextureSpec",
    "WorldConfig",
    "camera_model",
    "default_grid_geometry",
    "finger_region_mask",
    "generate_dataset",
    "iter_samples",
    "make_sample",
    "make_world_config",
    "plane_frame_for",
    "render",
    "resolve_contact",
    "sample_scene",
    "sample_servo_scene",
    "texture_rgb",
    "tip_ellipse_axes",
    "wrench_from_pressure",
]
