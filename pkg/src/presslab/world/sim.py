"""Stateful gripper simulator for servo episodes.

One instance owns a scene and a gripper state, exposes observations
(ground-truth pressure image, rendered frame, wrench) and accepts motion
commands. Everything is deterministic: no RNG is consumed after
construction.
"""

from __future__ import annotations

import math
from dataclasses import replace
from typing import Optional

import numpy as np

from ..data import Domain
from ..geometry import CameraModel, PlaneFrame, project_plane_point, splat_pressure_grid
from .contact import FingertipParams, GripperState, default_grid_geometry, resolve_contact, wrench_from_pressure
from .render import camera_model, plane_frame_for, render
from .scene import OBJECT_ARCHETYPES, Scene, TargetObject, WorldConfig, make_world_config, sample_scene

FINGER_PAD_HALF = 0.010  # capture corridor half-width along the finger axis, m


def sample_servo_scene(seed: int, config: WorldConfig, rng: Optional[np.random.Generator] = None,
                       archetype: Optional[int] = None) -> tuple[Scene, GripperState]:
    """Weak-style scene with a guaranteed target object plus a start pose.

    The gripper starts over an uncluttered spot with the object placed
    6-11 cm away, mirroring the start-away-then-slide trial protocol.
    """
    rng = rng or np.random.default_rng(np.random.SeedSequence([0x5EBB0, int(seed) & 0xFFFFFFFF]))
    scene = sample_scene(seed, Domain.WEAKLY_LABELED, config)

    proto = OBJECT_ARCHETYPES[int(rng.integers(len(OBJECT_ARCHETYPES))) if archetype is None else archetype]
    dist = rng.uniform(0.06, 0.11)
    ang = rng.uniform(0, 2 * math.pi)
    target = replace(proto, position=(round(dist * math.cos(ang), 5), round(dist * math.sin(ang), 5)),
                     yaw=float(rng.uniform(0, math.pi)))
    distractors = tuple(
        d for d in scene.distractors
        if math.hypot(d.position[0] - target.position[0], d.position[1] - target.position[1]) > d.size + 0.04
        and math.hypot(*d.position) > d.size + 0.05
    )
    scene = replace(scene, target=target, distractors=distractors)

    offs = tuple(rng.uniform(-config.tip_offset_range, config.tip_offset_range, size=2))
    tips = FingertipParams(stiffness=config.spring_k, patch_r0=config.patch_r0,
                           patch_scale=config.patch_scale, touch_offsets=offs)
    start = GripperState(x=0.0, y=0.0, z=config.touch_height + 0.008,
                         yaw=float(rng.uniform(-math.pi, math.pi)), aperture=0.085, fingertips=tips)
    return scene, start


class GripperSim:
    """Flat-table gripper world stepped by explicit motion commands."""

    def __init__(self, scene: Scene, config: WorldConfig, start: GripperState):
        self.scene = scene
        self.config = config
        self.gripper = start
        self.geom = default_grid_geometry(config)
        self.camera: CameraModel = camera_model(config)
        self.captured = False
        self.lifted = 0.0
        self._object_pos = np.array(scene.target.position) if scene.target else None
        self._cache_state = None
        self._contact = None

    # -- observations -----------------------------------------------------

    def plane(self) -> PlaneFrame:
        return plane_frame_for(self.gripper, self.config)

    def contact(self):
        key = (self.gripper.x, self.gripper.y, self.gripper.z, self.gripper.yaw, self.gripper.aperture)
        if self._cache_state != key:
            self._contact = resolve_contact(self.scene, self.gripper, self.geom,
                                            touch_height=self.config.touch_height)
            self._cache_state = key
        return self._contact

    def wrench(self) -> np.ndarray:
        g = self.gripper
        return wrench_from_pressure(self.contact(), np.array([g.x, g.y, g.z]))

    def oracle_pressure_image(self) -> np.ndarray:
        return splat_pressure_grid(self.contact().pressure_grid, self.geom, self.plane(), self.camera)

    def render_image(self) -> np.ndarray:
        return render(self.scene, self.gripper, self.contact(), self.config, self.camera, self.plane())

    def object_position(self) -> Optional[np.ndarray]:
        return None if self._object_pos is None else self._object_pos.copy()

    def object_pixel(self) -> Optional[tuple[float, float]]:
        """Ground-truth target pixel (the stand-in for the paper's tracker)."""
        if self._object_pos is None:
            return None
        return project_plane_point(self.plane(), self.camera, self._object_pos)

    # -- commands ----------------------------------------------------------

    def move(self, dx: float, dy: float, dz: float) -> bool:
        """Apply a wrist displacement; False if it leaves the workspace."""
        g = self.gripper
        nx, ny = g.x + dx, g.y + dy
        nz = g.z + dz
        lim = self.config.workspace_limit
        if abs(nx) > lim or abs(ny) > lim or nz < self.config.touch_height - 0.03 or nz > 0.15:
            return False
        g.x, g.y, g.z = nx, ny, nz
        if self.captured:
            self._object_pos = np.array([nx, ny])
            self.lifted = max(self.lifted, nz - self.config.touch_height)
        return True

    def close_gripper(self) -> bool:
        """Close around the target; True iff the object ends up captured.

        The object is captured when its footprint lies between the fingertip
        pads: along the closing axis it must fit inside the aperture with
        room for the pads, across it the pads must sweep over it.
        """
        target = self.scene.target
        if target is None or self._object_pos is None:
            self.gripper.aperture = 0.0
            return False
        g = self.gripper
        rel = self._object_pos - np.array([g.x, g.y])
        along = float(rel @ g.lateral)  # closing axis
        across = float(rel @ g.heading)
        c, s = math.cos(target.yaw), math.sin(target.yaw)
        obj_axes = np.array([[c, s], [-s, c]]) @ np.stack([g.lateral, g.heading], axis=1)
        half_along = 0.5 * (abs(obj_axes[0, 0]) * target.dims[0] + abs(obj_axes[1, 0]) * target.dims[1])
        half_across = 0.5 * (abs(obj_axes[0, 1]) * target.dims[0] + abs(obj_axes[1, 1]) * target.dims[1])
        fits = (abs(along) + half_along) < (g.aperture / 2) and (abs(across) - half_across) < FINGER_PAD_HALF
        g.aperture = max(0.0, 2 * half_along) if fits else 0.0
        self.captured = bool(fits)
        return self.captured

    @property
    def lift_succeeded(self) -> bool:
        return self.captured and self.lifted >= 0.05
