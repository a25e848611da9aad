"""Oracle sample generation and the on-disk dataset format.

Layout under the output root:
    manifest.json                     counts, seeds, sigma_F/sigma_T, bin
                                      edges, camera intrinsics
    <split>/<id>.png                  RGB frame
    <split>/<id>.pressure.f32         row-major float32 kPa (fully labeled only)
    <split>/<id>.oracle.f32           eval-only ground truth for weak test
                                      splits; never loaded as a label
    <split>/<id>.meta.json            wrench, domain tag, scene seed
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterator, Optional

import numpy as np
from PIL import Image

from ..data import Domain, default_binning
from ..geometry import splat_pressure_grid
from .contact import FingertipParams, GripperState, default_grid_geometry, resolve_contact, wrench_from_pressure
from .render import camera_model, plane_frame_for, render
from .scene import Scene, WorldConfig, make_world_config, sample_scene

SPLITS = ("train_full", "train_weak", "test_full", "test_weak")


@dataclass
class OracleSample:
    image: np.ndarray  # (H, W, 3) float32
    pressure_image: np.ndarray  # (H, W) float32 kPa
    wrench: np.ndarray  # (6,) float32
    domain: Domain
    scene_seed: int
    total_force: float


@dataclass(frozen=True)
class DatasetConfig:
    train_full: int = 100
    train_weak: int = 600
    test_full: int = 50
    test_weak: int = 50
    seed: int = 0
    image_size: int = 128
    contact_fraction: float = 0.65
    force_range: tuple[float, float] = (0.25, 4.0)
    hover_range: tuple[float, float] = (0.002, 0.020)
    world_overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("train_full", "train_weak", "test_full", "test_weak"):
            if getattr(self, name) < 0:
                raise ValueError(f"count {name} must be nonnegative")
        if self.train_full <= 0:
            raise ValueError("need at least one fully labeled training record")

    def world(self, split: str) -> WorldConfig:
        base = "test" if split.startswith("test") else "train"
        return make_world_config(base, image_size=self.image_size, **self.world_overrides)


def _sample_gripper(rng: np.random.Generator, domain: Domain, config: WorldConfig,
                    ds: DatasetConfig) -> GripperState:
    lim = 0.035 if domain == Domain.FULLY_LABELED else 0.06
    x, y = rng.uniform(-lim, lim, size=2)
    yaw = rng.uniform(-math.pi, math.pi)
    aperture = rng.uniform(0.06, 0.095)
    offs = tuple(rng.uniform(-config.tip_offset_range, config.tip_offset_range, size=2))
    if rng.random() < ds.contact_fraction:
        lo, hi = ds.force_range
        mean_tip_force = math.exp(rng.uniform(math.log(lo), math.log(hi)))
        z = config.touch_height - mean_tip_force / config.spring_k
    else:
        z = config.touch_height + rng.uniform(*ds.hover_range)
    tips = FingertipParams(stiffness=config.spring_k, patch_r0=config.patch_r0,
                           patch_scale=config.patch_scale, touch_offsets=offs)
    return GripperState(x=x, y=y, z=z, yaw=yaw, aperture=aperture, fingertips=tips)


def make_sample(scene_seed: int, domain: Domain, config: WorldConfig, ds: DatasetConfig,
                pose_rng: np.random.Generator) -> OracleSample:
    scene = sample_scene(scene_seed, domain, config)
    gripper = _sample_gripper(pose_rng, domain, config, ds)
    geom = default_grid_geometry(config)
    contact = resolve_contact(scene, gripper, geom, touch_height=config.touch_height)
    wrench = wrench_from_pressure(contact, np.array([gripper.x, gripper.y, gripper.z]))
    camera = camera_model(config)
    plane = plane_frame_for(gripper, config)
    image = render(scene, gripper, contact, config, camera, plane)
    pressure = splat_pressure_grid(contact.pressure_grid, geom, plane, camera)
    return OracleSample(image=image, pressure_image=pressure, wrench=wrench,
                        domain=domain, scene_seed=scene_seed, total_force=contact.total_force)


def iter_samples(ds: DatasetConfig, split: str, count: Optional[int] = None) -> Iterator[OracleSample]:
    """Deterministic stream of oracle samples for one split."""
    if split not in SPLITS:
        raise ValueError(f"unknown split {split!r}")
    domain = Domain.FULLY_LABELED if split.endswith("full") else Domain.WEAKLY_LABELED
    config = ds.world(split)
    n = getattr(ds, split) if count is None else count
    split_key = SPLITS.index(split)
    for i in range(n):
        ss = np.random.SeedSequence([0xDA7A, ds.seed & 0xFFFFFFFF, split_key, i])
        scene_seed, = ss.generate_state(1)
        pose_rng = np.random.default_rng(ss.spawn(1)[0])
        yield make_sample(int(scene_seed), domain, config, ds, pose_rng)


def _save_image_png(path: Path, image: np.ndarray):
    arr = np.clip(np.rint(image * 255.0), 0, 255).astype(np.uint8)
    Image.fromarray(arr).save(path, format="PNG")


def generate_dataset(ds: DatasetConfig, out_root: Path | str) -> dict:
    """Write the dataset and return its manifest (also saved as JSON)."""
    root = Path(out_root)
    root.mkdir(parents=True, exist_ok=True)
    binning = default_binning()
    counts = {}
    train_wrenches = []
    for split in SPLITS:
        n = getattr(ds, split)
        counts[split] = n
        if n == 0:
            continue
        split_dir = root / split
        split_dir.mkdir(parents=True, exist_ok=True)
        store_pressure = split.endswith("full")
        store_oracle = split == "test_weak"
        for i, sample in enumerate(iter_samples(ds, split)):
            rec = f"{i:06d}"
            _save_image_png(split_dir / f"{rec}.png", sample.image)
            if store_pressure:
                sample.pressure_image.astype(np.float32).tofile(split_dir / f"{rec}.pressure.f32")
            if store_oracle:
                sample.pressure_image.astype(np.float32).tofile(split_dir / f"{rec}.oracle.f32")
            meta = {
                "wrench": [float(v) for v in sample.wrench],
                "domain": sample.domain.value,
                "scene_seed": int(sample.scene_seed),
            }
            with open(split_dir / f"{rec}.meta.json", "w") as fh:
                json.dump(meta, fh, sort_keys=True)
            if split.startswith("train"):
                train_wrenches.append(sample.wrench)

    w = np.stack(train_wrenches).astype(np.float64)
    sigma_f = float(w[:, :3].std())
    sigma_t = float(w[:, 3:].std())
    cam = camera_model(ds.world("train_full"))
    manifest = {
        "counts": counts,
        "seed": ds.seed,
        "image_size": ds.image_size,
        "sigma_f": sigma_f,
        "sigma_t": sigma_t,
        "ft_scale_c": sigma_f / sigma_t if sigma_t > 0 else None,
        "bin_edges": [float(e) for e in binning.edges],
        "bin_representatives": [float(r) for r in binning.representatives],
        "camera": {"fx": cam.fx, "fy": cam.fy, "cx": cam.cx, "cy": cam.cy,
                   "width": cam.width, "height": cam.height},
        "config": {
            "contact_fraction": ds.contact_fraction,
            "force_range": list(ds.force_range),
            "hover_range": list(ds.hover_range),
            "world_overrides": dict(ds.world_overrides),
        },
    }
    with open(root / "manifest.json", "w") as fh:
        json.dump(manifest, fh, sort_keys=True, indent=2)
    return manifest
