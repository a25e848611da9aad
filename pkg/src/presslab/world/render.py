"""Deterministic software renderer for the gripper world.

The eye-in-hand camera sits directly above the wrist and turns with it, so
the fingertips always appear at the same place in the image while the
world (background, overlay, objects) moves underneath. Load is encoded in
fingertip appearance: patch width grows with normal force, the flexure
leans, and the contact region darkens.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..geometry import CameraModel, PlaneFrame, backproject_pixels, project_points, tilted_plane_frame
from .contact import ContactState, GripperState
from .scene import Scene, TextureSpec, WorldConfig

RUBBER = np.array([0.16, 0.17, 0.19])
STEEL = np.array([0.56, 0.57, 0.60])
FIDUCIAL_DARK = np.array([0.05, 0.05, 0.06])
FIDUCIAL_LIGHT = np.array([0.97, 0.97, 0.95])

TIP_HALF_U = 0.007  # visual pad half-extent along the finger, m
TIP_HALF_V = 0.006  # across the finger, m
TIP_WIDTH_GAIN = 0.30  # fractional width growth per newton
TIP_LEAN_M = 0.0022  # flexure lean per newton, m
TIP_DRAW_HEIGHT = 0.010  # pad top above the fingertip underside, m
FLEX_BACK = 0.040  # flexure anchor behind the tip, m
FLEX_HEIGHT = 0.045


def camera_model(config: WorldConfig) -> CameraModel:
    s = config.image_size
    f = s * config.camera_height / config.view_extent
    c = (s - 1) / 2
    return CameraModel(fx=f, fy=f, cx=c, cy=c, width=s, height=s)


def plane_frame_for(gripper: GripperState, config: WorldConfig) -> PlaneFrame:
    cam_pos = np.array([gripper.x, gripper.y, gripper.z + config.camera_height])
    return tilted_plane_frame(cam_pos, pitch=config.camera_pitch, yaw=gripper.yaw)


def _lerp(a, b, t):
    return np.asarray(a)[None, None, :] * (1 - t[..., None]) + np.asarray(b)[None, None, :] * t[..., None]


def texture_rgb(spec: TextureSpec, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Evaluate a background recipe at plane coordinates; (H, W) -> (H, W, 3)."""
    if spec.kind == "solid":
        out = np.empty(x.shape + (3,))
        out[...] = spec.color_a
        return out
    ca, cb = spec.color_a, spec.color_b
    cth, sth = math.cos(spec.angle), math.sin(spec.angle)
    xr = x * cth + y * sth
    yr = -x * sth + y * cth
    if spec.kind == "stripes":
        t = 0.5 + 0.5 * np.sin(2 * math.pi * xr / spec.scale)
        return _lerp(ca, cb, t)
    if spec.kind == "checker":
        t = ((np.floor(xr / spec.scale) + np.floor(yr / spec.scale)) % 2.0)
        return _lerp(ca, cb, t)
    if spec.kind == "noise":
        n = 16
        lattice = np.random.default_rng(np.random.SeedSequence([0x7E47, spec.seed])).uniform(size=(n + 1, n + 1))
        period = spec.scale * 8
        u = (xr / period % 1.0) * n
        v = (yr / period % 1.0) * n
        i, j = np.floor(u).astype(int), np.floor(v).astype(int)
        fu, fv = u - i, v - j
        t = (lattice[i, j] * (1 - fu) * (1 - fv) + lattice[i + 1, j] * fu * (1 - fv)
             + lattice[i, j + 1] * (1 - fu) * fv + lattice[i + 1, j + 1] * fu * fv)
        return _lerp(ca, cb, t)
    if spec.kind == "dots":
        du = xr / spec.scale % 1.0 - 0.5
        dv = yr / spec.scale % 1.0 - 0.5
        t = (du * du + dv * dv < 0.09).astype(np.float64)
        return _lerp(ca, cb, t)
    if spec.kind == "rings":
        d = np.hypot(xr, yr)
        t = 0.5 + 0.5 * np.sin(2 * math.pi * d / spec.scale)
        return _lerp(ca, cb, t)
    if spec.kind == "gradient":
        t = np.clip(xr / 0.30 + 0.5, 0.0, 1.0)
        return _lerp(ca, cb, t)
    raise ValueError(f"unknown texture kind {spec.kind!r}")


def _draw_overlay(img, scene: Scene, x, y):
    ov = scene.sensor_overlay
    half, band = ov.half_extent, ov.band
    ax, ay = np.abs(x), np.abs(y)
    outer = half + band
    in_band = (np.maximum(ax, ay) >= half) & (np.maximum(ax, ay) < outer)
    parity = ((np.floor((x + 4.0) / ov.square) + np.floor((y + 4.0) / ov.square)) % 2.0) > 0.5
    img[in_band & parity] = FIDUCIAL_DARK
    img[in_band & ~parity] = FIDUCIAL_LIGHT
    bezel = (np.maximum(ax, ay) >= half - 0.003) & (np.maximum(ax, ay) < half)
    img[bezel] = ov.bezel_color


def _draw_shapes(img, scene: Scene, x, y):
    for sh in scene.distractors:
        dx, dy = x - sh.position[0], y - sh.position[1]
        if sh.kind == "circle":
            mask = dx * dx + dy * dy < sh.size * sh.size
        else:
            c, s = math.cos(sh.yaw), math.sin(sh.yaw)
            mask = (np.abs(dx * c + dy * s) < sh.size) & (np.abs(-dx * s + dy * c) < sh.size)
        img[mask] = sh.color
    if scene.target is not None:
        t = scene.target
        c, s = math.cos(t.yaw), math.sin(t.yaw)
        dx, dy = x - t.position[0], y - t.position[1]
        lu = np.abs(dx * c + dy * s) - t.dims[0] / 2
        lv = np.abs(-dx * s + dy * c) - t.dims[1] / 2
        rounding = min(t.dims) * 0.25
        d = np.hypot(np.maximum(lu + rounding, 0), np.maximum(lv + rounding, 0)) - rounding
        img[d < 0] = t.color


def tip_ellipse_axes(force: float, depth: float, camera: CameraModel) -> tuple[float, float]:
    """Projected fingertip semi-axes in pixels; strictly increasing in force."""
    g = 1.0 + TIP_WIDTH_GAIN * force
    return (camera.fx * TIP_HALF_U * g / depth, camera.fy * TIP_HALF_V * g / depth)


def _tip_pixels(gripper: GripperState, contact: ContactState, plane: PlaneFrame, camera: CameraModel):
    """Per-tip draw geometry: (center_px, axes_px, anchor_px) tuples."""
    out = []
    for pos, tip in zip(gripper.fingertip_positions(), contact.tips):
        z_vis = max(gripper.z, 0.0) + TIP_DRAW_HEIGHT
        world = np.array([pos[0], pos[1], z_vis])
        anchor_w = np.array([*(pos - FLEX_BACK * gripper.heading), gripper.z + FLEX_HEIGHT])
        p_cam = plane.rotation @ world + plane.translation
        a_cam = plane.rotation @ anchor_w + plane.translation
        uv, auv = project_points(camera, np.stack([p_cam, a_cam]))
        lean_px = camera.fx * TIP_LEAN_M * tip.force / p_cam[2]
        center = uv + np.array([lean_px, 0.0])
        axes = tip_ellipse_axes(tip.force, p_cam[2], camera)
        out.append((center, axes, auv + np.array([lean_px * 0.3, 0.0])))
    return out


def _paint_ellipse(img, center, axes, color, soft=1.0):
    h, w, _ = img.shape
    a, b = axes
    u0 = max(0, int(center[0] - a - 2))
    u1 = min(w, int(center[0] + a + 3))
    v0 = max(0, int(center[1] - b - 2))
    v1 = min(h, int(center[1] + b + 3))
    if u0 >= u1 or v0 >= v1:
        return
    us = np.arange(u0, u1)[None, :] - center[0]
    vs = np.arange(v0, v1)[:, None] - center[1]
    q = np.sqrt((us / a) ** 2 + (vs / b) ** 2)
    alpha = np.clip((1.0 - q) * max(1.5, 0.5 * (a + b)) * soft, 0.0, 1.0)
    patch = img[v0:v1, u0:u1]
    patch[...] = patch * (1 - alpha[..., None]) + np.asarray(color)[None, None, :] * alpha[..., None]


def _paint_capsule(img, p0, p1, radius, color):
    h, w, _ = img.shape
    u0 = max(0, int(min(p0[0], p1[0]) - radius - 2))
    u1 = min(w, int(max(p0[0], p1[0]) + radius + 3))
    v0 = max(0, int(min(p0[1], p1[1]) - radius - 2))
    v1 = min(h, int(max(p0[1], p1[1]) + radius + 3))
    if u0 >= u1 or v0 >= v1:
        return
    us, vs = np.meshgrid(np.arange(u0, u1), np.arange(v0, v1), indexing="xy")
    d = np.stack([us - p0[0], vs - p0[1]], axis=-1)
    seg = np.array([p1[0] - p0[0], p1[1] - p0[1]])
    t = np.clip((d @ seg) / max(seg @ seg, 1e-9), 0.0, 1.0)
    closest = d - t[..., None] * seg
    dist = np.hypot(closest[..., 0], closest[..., 1])
    alpha = np.clip(radius + 1.0 - dist, 0.0, 1.0)
    patch = img[v0:v1, u0:u1]
    patch[...] = patch * (1 - alpha[..., None]) + np.asarray(color)[None, None, :] * alpha[..., None]


def _draw_contact_shading(img, contact: ContactState, x, y):
    for tip in contact.tips:
        if not tip.in_contact:
            continue
        r = tip.radius * 1.3
        dx, dy = x - tip.center[0], y - tip.center[1]
        w = np.clip(1.0 - (dx * dx + dy * dy) / (r * r), 0.0, 1.0)
        img *= 1.0 - (0.30 * min(tip.force, 4.0) / 4.0) * w[..., None]


def render(
    scene: Scene,
    gripper: GripperState,
    contact: ContactState,
    config: WorldConfig,
    camera: CameraModel | None = None,
    plane: PlaneFrame | None = None,
) -> np.ndarray:
    """Render one RGB frame, float32 in [0, 1], shape (H, W, 3)."""
    camera = camera or camera_model(config)
    plane = plane or plane_frame_for(gripper, config)

    h, w = camera.height, camera.width
    us, vs = np.meshgrid(np.arange(w, dtype=np.float64), np.arange(h, dtype=np.float64), indexing="xy")
    pts = backproject_pixels(plane, camera, np.stack([us, vs], axis=-1))
    x, y = pts[..., 0], pts[..., 1]

    img = texture_rgb(scene.background, x, y)
    if scene.sensor_overlay is not None:
        _draw_overlay(img, scene, x, y)
    _draw_shapes(img, scene, x, y)
    _draw_contact_shading(img, contact, x, y)

    for center, axes, anchor in _tip_pixels(gripper, contact, plane, camera):
        _paint_capsule(img, anchor, center, 1.6, STEEL)
    for (center, axes, _), tip in zip(_tip_pixels(gripper, contact, plane, camera), contact.tips):
        shade = RUBBER * (1.0 + 0.35 * min(tip.force, 4.0) / 4.0)
        _paint_ellipse(img, center, axes, shade)

    out = np.clip(img, 0.0, 1.0).astype(np.float32)
    gain = np.float32(scene.lighting.gain)
    tint = np.asarray(scene.lighting.tint, dtype=np.float32)
    return np.clip(out * gain * tint[None, None, :], np.float32(0.0), np.float32(1.0))


def finger_region_mask(
    gripper: GripperState,
    contact: ContactState,
    config: WorldConfig,
    camera: CameraModel | None = None,
    plane: PlaneFrame | None = None,
    pad: float = 3.0,
) -> np.ndarray:
    """Bool mask of pixels the fingertip/flexure/contact-shading can touch."""
    camera = camera or camera_model(config)
    plane = plane or plane_frame_for(gripper, config)
    h, w = camera.height, camera.width
    mask = np.zeros((h, w), dtype=bool)
    us, vs = np.meshgrid(np.arange(w, dtype=np.float64), np.arange(h, dtype=np.float64), indexing="xy")
    pts = backproject_pixels(plane, camera, np.stack([us, vs], axis=-1))
    x, y = pts[..., 0], pts[..., 1]
    for (center, axes, anchor), tip in zip(_tip_pixels(gripper, contact, plane, camera), contact.tips):
        du = us - center[0]
        dv = vs - center[1]
        mask |= (np.abs(du) <= axes[0] + pad) & (np.abs(dv) <= axes[1] + pad)
        mask |= ((us >= min(anchor[0], center[0]) - pad) & (us <= max(anchor[0], center[0]) + pad)
                 & (vs >= min(anchor[1], center[1]) - pad) & (vs <= max(anchor[1], center[1]) + pad))
        if tip.in_contact:
            r = tip.radius * 1.3
            mask |= (x - tip.center[0]) ** 2 + (y - tip.center[1]) ** 2 <= (r * 1.2) ** 2
    return mask
