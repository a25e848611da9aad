"""Datasets of fully/weakly labeled frames, pressure binning, photometric
augmentation, and mixed-batch assembly."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterator, Optional, Sequence

import numpy as np
import torch
import torchvision.transforms.functional as TF
from PIL import Image


class Domain(str, Enum):
    FULLY_LABELED = "fully_labeled"
    WEAKLY_LABELED = "weakly_labeled"


N_BINS = 9
CONTACT_THRESHOLD_KPA = 1.0  # a pixel above this counts as contact
WEAK_CONTACT_FORCE_N = 3.0  # force-norm contact rule for weakly labeled frames


@dataclass(frozen=True)
class PressureBinning:
    """Discretization of pressure (kPa) into N_BINS bins.

    ``edges`` has 10 ascending values; bin b covers [edges[b], edges[b+1])
    and values above edges[9] clamp into the last bin. Bin 0 is the
    no-contact bin: edges[0] = 0 and edges[1] is the 1 kPa contact
    threshold, so "bin >= 1" and "pressure >= 1 kPa" agree.
    """

    edges: np.ndarray
    representatives: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.edges, dtype=np.float64)
        r = np.asarray(self.representatives, dtype=np.float64)
        if e.shape != (N_BINS + 1,) or r.shape != (N_BINS,):
            raise ValueError("need 10 edges and 9 representative values")
        if e[0] != 0.0 or e[1] != CONTACT_THRESHOLD_KPA:
            raise ValueError("edges must start at 0 with the 1 kPa contact threshold next")
        if np.any(np.diff(e) <= 0):
            raise ValueError("edges must be strictly increasing")
        if r[0] != 0.0:
            raise ValueError("bin 0 represents no contact and must decode to 0")
        object.__setattr__(self, "edges", e)
        object.__setattr__(self, "representatives", r)


def default_binning(max_kpa: float = 40.0) -> PressureBinning:
    """Bin edges {0, 1, then log-spaced up to ``max_kpa``}; representative
    values are geometric means of each bin's edges (bin 0 decodes to 0)."""
    edges = np.concatenate([[0.0], np.geomspace(1.0, max_kpa, N_BINS)])
    reps = np.concatenate([[0.0], np.sqrt(edges[1:-1] * edges[2:])])
    return PressureBinning(edges=edges, representatives=reps)


def bin_pressure(pressure: np.ndarray, binning: PressureBinning) -> np.ndarray:
    """Map a pressure image (kPa) to per-pixel bin indices in {0..8}."""
    p = np.asarray(pressure)
    if np.any(p < 0):
        raise ValueError("negative pressure cannot be binned")
    idx = np.searchsorted(binning.edges, p, side="right") - 1
    return np.clip(idx, 0, N_BINS - 1).astype(np.uint8)


def unbin_pressure(bins_or_probs: np.ndarray, binning: PressureBinning) -> np.ndarray:
    """Decode bin indices, or per-pixel bin distributions (H, W, 9), back to
    a pressure image via argmax + representative value."""
    arr = np.asarray(bins_or_probs)
    if arr.ndim >= 1 and arr.shape[-1] == N_BINS and not np.issubdtype(arr.dtype, np.integer):
        sums = arr.sum(axis=-1)
        if np.any(np.abs(sums - 1.0) > 1e-4):
            raise ValueError("bin distributions are not normalized")
        arr = np.argmax(arr, axis=-1)
    if np.any(arr < 0) or np.any(arr >= N_BINS):
        raise ValueError("bin index out of range")
    return binning.representatives[arr].astype(np.float32)


@dataclass
class LabeledFrame:
    """One training/eval record: image plus labels.

    ``pressure`` (kPa) and ``bins`` are present iff the frame is fully
    labeled; every frame carries the 6-vector wrench weak label
    [Fx, Fy, Fz, Tx, Ty, Tz] (N, Nm).
    """

    image: np.ndarray  # (H, W, 3) float32 in [0, 1]
    wrench: np.ndarray  # (6,) float32
    domain: Domain
    pressure: Optional[np.ndarray] = None  # (H, W) float32 kPa
    bins: Optional[np.ndarray] = None  # (H, W) uint8
    oracle_pressure: Optional[np.ndarray] = None  # eval-only ground truth, never a label

    def __post_init__(self):
        full = self.domain == Domain.FULLY_LABELED
        if full != (self.pressure is not None):
            raise ValueError("pressure payload present iff frame is fully labeled")
        if self.pressure is not None and self.bins is None:
            self.bins = bin_pressure(self.pressure, default_binning())


@dataclass(frozen=True)
class AugmentConfig:
    """Photometric jitter ranges; labels are never touched."""

    brightness: float = 0.3
    contrast: float = 0.3
    saturation: float = 0.3
    hue: float = 0.05  # fraction of a hue cycle


def augment(frame: LabeledFrame, seed: int, config: AugmentConfig = AugmentConfig()) -> LabeledFrame:
    """Apply seeded brightness/contrast/saturation/hue jitter to the image.

    Factors are drawn once from ``seed``; all label fields are carried over
    untouched, so repeated calls with the same seed are identical.
    """
    rng = np.random.default_rng(np.random.SeedSequence([0x41FA, seed & 0xFFFFFFFF]))
    b = 1.0 + rng.uniform(-config.brightness, config.brightness)
    c = 1.0 + rng.uniform(-config.contrast, config.contrast)
    s = 1.0 + rng.uniform(-config.saturation, config.saturation)
    h = rng.uniform(-config.hue, config.hue)

    img = frame.image
    if (b, c, s, h) != (1.0, 1.0, 1.0, 0.0):
        t = torch.from_numpy(np.ascontiguousarray(img.transpose(2, 0, 1)))
        t = TF.adjust_brightness(t, b)
        t = TF.adjust_contrast(t, c)
        t = TF.adjust_saturation(t, s)
        t = TF.adjust_hue(t, h)
        img = t.numpy().transpose(1, 2, 0)

    return LabeledFrame(
        image=img,
        wrench=frame.wrench,
        domain=frame.domain,
        pressure=frame.pressure,
        bins=frame.bins,
        oracle_pressure=frame.oracle_pressure,
    )


def compute_ft_scale(wrenches: np.ndarray) -> float:
    """Ratio of force to torque standard deviations over a training set.

    ``wrenches`` is (N, 6); the std pools all force components and all
    torque components separately.
    """
    w = np.asarray(wrenches, dtype=np.float64)
    if w.ndim != 2 or w.shape[1] != 6 or w.shape[0] == 0:
        raise ValueError("need a nonempty (N, 6) wrench array")
    sigma_f = w[:, :3].std()
    sigma_t = w[:, 3:].std()
    if sigma_t <= 0:
        raise ValueError("torque variance is zero; cannot form the F/T scale")
    return float(sigma_f / sigma_t)


class FrameDataset:
    """In-memory list of frames from one domain."""

    def __init__(self, frames: Sequence[LabeledFrame]):
        self.frames = list(frames)

    def __len__(self):
        return len(self.frames)

    def __getitem__(self, i) -> LabeledFrame:
        return self.frames[i]

    def wrenches(self) -> np.ndarray:
        return np.stack([f.wrench for f in self.frames]) if self.frames else np.zeros((0, 6))


@dataclass
class Batch:
    """Stacked mixed batch; fully labeled frames come first."""

    images: np.ndarray  # (B, H, W, 3) float32
    bins: np.ndarray  # (B, H, W) uint8; zeros where unlabeled
    wrenches: np.ndarray  # (B, 6) float32
    full_mask: np.ndarray  # (B,) bool


def _epoch_indices(n: int, rng: np.random.Generator) -> Iterator[int]:
    while True:
        for i in rng.permutation(n):
            yield int(i)


def make_batches(
    full: FrameDataset,
    weak: FrameDataset,
    n_full: int,
    n_weak: int,
    seed: int,
    augment_config: Optional[AugmentConfig] = AugmentConfig(),
) -> Iterator[Batch]:
    """Infinite stream of batches with exactly ``n_full`` + ``n_weak`` frames.

    Each domain pool is sampled in replacement-free shuffled epochs; batch
    order and augmentation are pure functions of ``seed``.
    """
    if n_full < 0 or n_weak < 0 or n_full + n_weak == 0:
        raise ValueError("batch composition must request at least one frame")
    if n_full > 0 and len(full) == 0:
        raise ValueError("fully labeled frames requested but the pool is empty")
    if n_weak > 0 and len(weak) == 0:
        raise ValueError("weakly labeled frames requested but the pool is empty")

    ss = np.random.SeedSequence([0xBA7C, seed & 0xFFFFFFFF])
    rng_full, rng_weak = (np.random.default_rng(s) for s in ss.spawn(2))
    it_full = _epoch_indices(len(full), rng_full) if n_full else iter(())
    it_weak = _epoch_indices(len(weak), rng_weak) if n_weak else iter(())

    counter = 0
    while True:
        frames = [full[next(it_full)] for _ in range(n_full)]
        frames += [weak[next(it_weak)] for _ in range(n_weak)]
        if augment_config is not None:
            frames = [augment(f, seed=(seed << 20) ^ (counter * 37 + k), config=augment_config)
                      for k, f in enumerate(frames)]
        h, w, _ = frames[0].image.shape
        bins = np.zeros((len(frames), h, w), dtype=np.uint8)
        for k, f in enumerate(frames):
            if f.bins is not None:
                bins[k] = f.bins
        yield Batch(
            images=np.stack([f.image for f in frames]).astype(np.float32),
            bins=bins,
            wrenches=np.stack([f.wrench for f in frames]).astype(np.float32),
            full_mask=np.array([f.domain == Domain.FULLY_LABELED for f in frames]),
        )
        counter += 1


# ---------------------------------------------------------------------------
# Disk format (written by presslab.world.datagen)
# ---------------------------------------------------------------------------

def load_manifest(root: Path | str) -> dict:
    with open(Path(root) / "manifest.json") as fh:
        return json.load(fh)


def load_split(root: Path | str, split: str, binning: Optional[PressureBinning] = None) -> FrameDataset:
    """Load one split from the on-disk dataset layout.

    A record is ``<id>.png`` + ``<id>.meta.json`` plus, for fully labeled
    records, ``<id>.pressure.f32`` (row-major float32 kPa). Weak eval splits
    may carry an ``<id>.oracle.f32`` ground-truth map; it is attached as
    ``oracle_pressure`` and never treated as a label.
    """
    root = Path(root)
    manifest = load_manifest(root)
    if binning is None:
        binning = PressureBinning(
            edges=np.array(manifest["bin_edges"]),
            representatives=np.array(manifest["bin_representatives"]),
        )
    split_dir = root / split
    if not split_dir.is_dir():
        raise FileNotFoundError(f"split directory {split_dir} does not exist")
    h = w = int(manifest["image_size"])

    frames = []
    for meta_path in sorted(split_dir.glob("*.meta.json")):
        rec_id = meta_path.name[: -len(".meta.json")]
        with open(meta_path) as fh:
            meta = json.load(fh)
        img = np.asarray(Image.open(split_dir / f"{rec_id}.png"), dtype=np.float32) / 255.0
        domain = Domain(meta["domain"])
        pressure = None
        p_path = split_dir / f"{rec_id}.pressure.f32"
        if p_path.exists():
            pressure = np.fromfile(p_path, dtype=np.float32).reshape(h, w)
        if (domain == Domain.FULLY_LABELED) != (pressure is not None):
            raise ValueError(f"record {rec_id}: domain tag and pressure payload disagree")
        oracle = None
        o_path = split_dir / f"{rec_id}.oracle.f32"
        if o_path.exists():
            oracle = np.fromfile(o_path, dtype=np.float32).reshape(h, w)
        frame = LabeledFrame(
            image=img,
            wrench=np.asarray(meta["wrench"], dtype=np.float32),
            domain=domain,
            pressure=pressure,
            oracle_pressure=oracle,
        )
        if pressure is not None:
            frame.bins = bin_pressure(pressure, binning)
        frames.append(frame)
    return FrameDataset(frames)
