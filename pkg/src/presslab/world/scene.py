"""Scene sampling for the synthetic gripper world.

A Scene is everything static: background, optional sensor overlay with a
fiducial border (fully labeled domain only), lighting, distractor shapes,
and an optional graspable target. The gripper and its contact state live
elsewhere; a scene plus a gripper state fully determines a rendered frame.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from ..data import Domain

# Background pools. Fully labeled scenes draw solid colors only (the sensor's
# contact paper); weakly labeled scenes draw procedural textures. Train and
# test pools are disjoint so held-out appearance exists.
TRAIN_SOLID_COLORS = (
    (0.92, 0.92, 0.90),
    (0.75, 0.75, 0.78),
    (0.85, 0.78, 0.62),
    (0.65, 0.75, 0.88),
    (0.70, 0.80, 0.66),
    (0.93, 0.88, 0.72),
)
TEST_SOLID_COLORS = (
    (0.90, 0.72, 0.72),
    (0.76, 0.70, 0.88),
    (0.66, 0.88, 0.78),
    (0.95, 0.80, 0.62),
)
TRAIN_TEXTURES = ("stripes", "checker", "noise")
TEST_TEXTURES = ("dots", "rings", "gradient")


@dataclass(frozen=True)
class TextureSpec:
    """Fully self-contained background recipe; rendering uses no RNG."""

    kind: str  # "solid" or a procedural family name
    color_a: tuple[float, float, float]
    color_b: tuple[float, float, float] = (0.0, 0.0, 0.0)
    scale: float = 0.05  # meters per pattern period
    angle: float = 0.0
    seed: int = 0  # lattice seed for "noise"


@dataclass(frozen=True)
class OverlaySpec:
    """Flat-sensor rectangle with a fiducial checker border, world-fixed."""

    half_extent: float = 0.10
    band: float = 0.02
    square: float = 0.02
    bezel_color: tuple[float, float, float] = (0.15, 0.16, 0.18)


@dataclass(frozen=True)
class Shape:
    kind: str  # "circle" | "rect"
    position: tuple[float, float]
    size: float  # radius or half-side, m
    color: tuple[float, float, float]
    yaw: float = 0.0


@dataclass(frozen=True)
class TargetObject:
    """Graspable low-profile object lying on the table."""

    position: tuple[float, float]
    dims: tuple[float, float]  # footprint length x width, m
    yaw: float = 0.0
    color: tuple[float, float, float] = (0.20, 0.20, 0.24)
    name: str = "object"

    @property
    def footprint(self) -> float:
        return max(self.dims)


@dataclass(frozen=True)
class Lighting:
    gain: float = 1.0
    tint: tuple[float, float, float] = (1.0, 1.0, 1.0)


@dataclass(frozen=True)
class Scene:
    seed: int
    domain: Domain
    background: TextureSpec
    sensor_overlay: Optional[OverlaySpec]
    lighting: Lighting
    distractors: tuple[Shape, ...] = ()
    target: Optional[TargetObject] = None

    def __post_init__(self):
        if (self.sensor_overlay is not None) != (self.domain == Domain.FULLY_LABELED):
            raise ValueError("sensor overlay present iff the scene is fully labeled")


@dataclass(frozen=True)
class WorldConfig:
    """All tunables of the synthetic world. Defaults are desk-scale."""

    image_size: int = 128
    view_extent: float = 0.30  # table width visible at nominal camera height, m
    camera_height: float = 0.28  # camera above the fingertip plane, m
    camera_pitch: float = 0.0  # radians away from nadir

    grid_res: int = 128
    grid_extent: float = 0.40

    spring_k: float = 200.0  # N per m of fingertip penetration
    patch_r0: float = 0.005  # contact patch radius at zero force, m
    patch_scale: float = 0.006  # patch radius growth, m per sqrt(N)
    tip_offset_range: float = 0.002  # per-tip touch-height variation, m
    max_aperture: float = 0.12
    touch_height: float = 0.0
    workspace_limit: float = 0.16

    solid_colors: tuple = TRAIN_SOLID_COLORS
    textures: tuple = TRAIN_TEXTURES

    gain_range: tuple[float, float] = (0.4, 1.6)
    tint_range: tuple[float, float] = (0.7, 1.3)
    distractor_count: tuple[int, int] = (0, 4)
    object_prob_full: float = 0.2
    object_prob_weak: float = 0.6
    sensor_half_extent: float = 0.10

    def __post_init__(self):
        if self.image_size % 16 != 0:
            raise ValueError("image_size must be divisible by 16")
        if not self.solid_colors or not self.textures:
            raise ValueError("background pools must be nonempty")


def make_world_config(split: str = "train", **overrides) -> WorldConfig:
    """World config with the background pools for a train or test split."""
    if split == "train":
        pools = dict(solid_colors=TRAIN_SOLID_COLORS, textures=TRAIN_TEXTURES)
    elif split == "test":
        pools = dict(solid_colors=TEST_SOLID_COLORS, textures=TEST_TEXTURES)
    else:
        raise ValueError(f"unknown split {split!r}")
    pools.update(overrides)
    return WorldConfig(**pools)


# Grasping-task object archetypes, desk-scale footprints in meters.
OBJECT_ARCHETYPES = (
    TargetObject((0, 0), (0.050, 0.010), name="paperclip", color=(0.72, 0.72, 0.76)),
    TargetObject((0, 0), (0.019, 0.019), name="penny", color=(0.70, 0.48, 0.28)),
    TargetObject((0, 0), (0.008, 0.008), name="nut", color=(0.55, 0.55, 0.58)),
    TargetObject((0, 0), (0.010, 0.010), name="pill", color=(0.88, 0.45, 0.40)),
    TargetObject((0, 0), (0.045, 0.022), name="key", color=(0.75, 0.65, 0.35)),
)


def _sample_texture(rng: np.random.Generator, config: WorldConfig) -> TextureSpec:
    kind = config.textures[rng.integers(len(config.textures))]
    hue = rng.uniform(0, 1, size=3)
    base = 0.35 + 0.45 * rng.uniform(size=3)
    other = np.clip(base + rng.uniform(-0.35, 0.35, size=3), 0.05, 0.95)
    return TextureSpec(
        kind=kind,
        color_a=tuple(np.round(base * (0.6 + 0.4 * hue), 4)),
        color_b=tuple(np.round(other, 4)),
        scale=float(rng.uniform(0.02, 0.08)),
        angle=float(rng.uniform(0, math.pi)),
        seed=int(rng.integers(2**31 - 1)),
    )


def _sample_distractors(rng: np.random.Generator, config: WorldConfig, domain: Domain) -> tuple:
    lo, hi = config.distractor_count
    n = int(rng.integers(lo, hi + 1))
    shapes = []
    for _ in range(n):
        if domain == Domain.FULLY_LABELED:
            # keep clear of the sensor: the paper's distractors sit around it
            r = rng.uniform(config.sensor_half_extent + 0.025, config.sensor_half_extent + 0.06)
            ang = rng.uniform(0, 2 * math.pi)
            pos = (r * math.cos(ang), r * math.sin(ang))
        else:
            pos = tuple(rng.uniform(-0.12, 0.12, size=2))
        shapes.append(
            Shape(
                kind="circle" if rng.random() < 0.5 else "rect",
                position=(round(pos[0], 5), round(pos[1], 5)),
                size=float(rng.uniform(0.008, 0.028)),
                color=tuple(np.round(rng.uniform(0.1, 0.9, size=3), 4)),
                yaw=float(rng.uniform(0, math.pi)),
            )
        )
    return tuple(shapes)


def _sample_target(rng: np.random.Generator, config: WorldConfig, domain: Domain) -> Optional[TargetObject]:
    prob = config.object_prob_full if domain == Domain.FULLY_LABELED else config.object_prob_weak
    if rng.random() >= prob:
        return None
    proto = OBJECT_ARCHETYPES[rng.integers(len(OBJECT_ARCHETYPES))]
    if domain == Domain.FULLY_LABELED:
        r = rng.uniform(config.sensor_half_extent + 0.03, config.sensor_half_extent + 0.055)
        ang = rng.uniform(0, 2 * math.pi)
        pos = (r * math.cos(ang), r * math.sin(ang))
    else:
        pos = tuple(rng.uniform(-0.10, 0.10, size=2))
    return replace(proto, position=(round(pos[0], 5), round(pos[1], 5)), yaw=float(rng.uniform(0, math.pi)))


def sample_scene(seed: int, domain: Domain, config: WorldConfig) -> Scene:
    """Deterministically sample a scene for one domain.

    Fully labeled scenes get a solid-color background (drawn from the solid
    pool only) plus the sensor overlay; weakly labeled scenes get a textured
    background and no overlay.
    """
    domain = Domain(domain)
    domain_key = 0 if domain == Domain.FULLY_LABELED else 1
    rng = np.random.default_rng(np.random.SeedSequence([0x5CE9E, int(seed) & 0xFFFFFFFF, domain_key]))

    if domain == Domain.FULLY_LABELED:
        color = config.solid_colors[rng.integers(len(config.solid_colors))]
        background = TextureSpec(kind="solid", color_a=tuple(color))
        overlay = OverlaySpec(half_extent=config.sensor_half_extent)
    else:
        background = _sample_texture(rng, config)
        overlay = None

    lighting = Lighting(
        gain=float(rng.uniform(*config.gain_range)),
        tint=tuple(np.round(rng.uniform(*config.tint_range, size=3), 6)),
    )
    distractors = _sample_distractors(rng, config, domain)
    target = _sample_target(rng, config, domain)
    return Scene(
        seed=int(seed),
        domain=domain,
        background=background,
        sensor_overlay=overlay,
        lighting=lighting,
        distractors=distractors,
        target=target,
    )
