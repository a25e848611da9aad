"""Fingertip contact mechanics on the flat table plane.

Normal force is a linear spring in penetration depth; the contact patch is
a radially decreasing (parabolic) pressure profile whose discrete integral
is normalized to match the normal force exactly. Shear is not modeled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..geometry import GridGeometry
from .scene import Scene, WorldConfig


@dataclass(frozen=True)
class FingertipParams:
    stiffness: float = 200.0  # N/m
    patch_r0: float = 0.005  # m at zero force
    patch_scale: float = 0.006  # m per sqrt(N)
    touch_offsets: tuple[float, float] = (0.0, 0.0)  # per-tip touch-height variation, m


@dataclass
class GripperState:
    """Planar wrist pose over the table plus grip aperture.

    ``z`` is the height of the fingertip undersides above the table; tips
    touch at ``z == touch_height`` (modulo per-tip offsets) and penetrate
    below it.
    """

    x: float = 0.0
    y: float = 0.0
    z: float = 0.02
    yaw: float = 0.0
    aperture: float = 0.085
    fingertips: FingertipParams = field(default_factory=FingertipParams)

    def __post_init__(self):
        if self.aperture < 0:
            raise ValueError("aperture must be nonnegative")

    @property
    def heading(self) -> np.ndarray:
        return np.array([math.cos(self.yaw), math.sin(self.yaw)])

    @property
    def lateral(self) -> np.ndarray:
        return np.array([-math.sin(self.yaw), math.cos(self.yaw)])

    def fingertip_positions(self) -> np.ndarray:
        """(2, 2) world plane positions of the two fingertips."""
        center = np.array([self.x, self.y])
        offset = 0.5 * self.aperture * self.lateral
        return np.stack([center + offset, center - offset])


@dataclass(frozen=True)
class FingertipContact:
    in_contact: bool
    force: float  # N
    center: tuple[float, float]
    radius: float  # m


@dataclass
class ContactState:
    tips: tuple[FingertipContact, FingertipContact]
    pressure_grid: np.ndarray  # (nx, ny) kPa, indexed [i, j] along x, y
    geom: GridGeometry

    @property
    def total_force(self) -> float:
        return sum(t.force for t in self.tips)


def default_grid_geometry(config: WorldConfig) -> GridGeometry:
    e = config.grid_extent
    return GridGeometry(origin=(-e / 2, -e / 2), cell_size=e / config.grid_res,
                        shape=(config.grid_res, config.grid_res))


def _splat_patch(grid: np.ndarray, geom: GridGeometry, center, radius: float, force: float):
    """Deposit ``force`` newtons over a parabolic patch; exact discrete integral."""
    nx, ny = geom.shape
    cs = geom.cell_size
    i0 = max(0, int((center[0] - radius - geom.origin[0]) / cs) - 1)
    i1 = min(nx, int((center[0] + radius - geom.origin[0]) / cs) + 2)
    j0 = max(0, int((center[1] - radius - geom.origin[1]) / cs) - 1)
    j1 = min(ny, int((center[1] + radius - geom.origin[1]) / cs) + 2)
    if i0 >= i1 or j0 >= j1:
        return
    xs = geom.origin[0] + (np.arange(i0, i1) + 0.5) * cs
    ys = geom.origin[1] + (np.arange(j0, j1) + 0.5) * cs
    dx = xs[:, None] - center[0]
    dy = ys[None, :] - center[1]
    w = 1.0 - (dx * dx + dy * dy) / (radius * radius)
    np.clip(w, 0.0, None, out=w)
    total = w.sum() * geom.cell_area
    if total <= 0.0:
        # patch smaller than a cell: put everything on the nearest cell
        i = int(np.clip(round((center[0] - geom.origin[0]) / cs - 0.5), 0, nx - 1))
        j = int(np.clip(round((center[1] - geom.origin[1]) / cs - 0.5), 0, ny - 1))
        grid[i, j] += force / geom.cell_area / 1000.0
        return
    # pressure in kPa: N / m^2 / 1000
    grid[i0:i1, j0:j1] += force * w / total / 1000.0


def resolve_contact(scene: Scene, gripper: GripperState, geom: Optional[GridGeometry] = None,
                    touch_height: float = 0.0) -> ContactState:
    """Resolve fingertip contact against the flat table.

    The scene is accepted for interface symmetry; the table is flat in every
    scene, so only the gripper state matters mechanically.
    """
    if geom is None:
        geom = GridGeometry(origin=(-0.2, -0.2), cell_size=0.40 / 128, shape=(128, 128))
    params = gripper.fingertips
    grid = np.zeros(geom.shape)
    tips = []
    for pos, off in zip(gripper.fingertip_positions(), params.touch_offsets):
        depth = max(0.0, touch_height - gripper.z + off)
        force = params.stiffness * depth
        radius = params.patch_r0 + params.patch_scale * math.sqrt(force) if force > 0 else 0.0
        tips.append(FingertipContact(in_contact=force > 0, force=force,
                                     center=(float(pos[0]), float(pos[1])), radius=radius))
        if force > 0:
            _splat_patch(grid, geom, pos, radius, force)
    return ContactState(tips=(tips[0], tips[1]), pressure_grid=grid, geom=geom)


def wrench_from_pressure(contact: ContactState, wrist_pose: np.ndarray) -> np.ndarray:
    """Integrate the pressure grid into the 6-vector wrench at the wrist.

    Force is the plane-normal pressure integral (shear disregarded); torque
    sums r x f over cells with r measured from the wrist origin. Output is
    [Fx, Fy, Fz, Tx, Ty, Tz] in the zeroed level-pose frame, so an unloaded
    gripper reads exactly zero.
    """
    wx, wy, wz = (float(v) for v in np.asarray(wrist_pose, dtype=np.float64)[:3])
    grid = contact.pressure_grid
    geom = contact.geom
    ii, jj = np.nonzero(grid)
    if ii.size == 0:
        return np.zeros(6, dtype=np.float32)
    fz = grid[ii, jj] * 1000.0 * geom.cell_area  # kPa -> Pa times m^2
    cx = geom.origin[0] + (ii + 0.5) * geom.cell_size
    cy = geom.origin[1] + (jj + 0.5) * geom.cell_size
    f_total = fz.sum()
    tx = ((cy - wy) * fz).sum()
    ty = (-(cx - wx) * fz).sum()
    return np.array([0.0, 0.0, f_total, tx, ty, 0.0], dtype=np.float32)
