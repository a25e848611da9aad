"""Pinhole camera, table-plane projections, and pressure-grid splatting.

Everything here is pure: images are already rectified by construction, so
there is no distortion model. Pixel (u, v) has its center at integer
coordinates and spans [u - 0.5, u + 0.5] x [v - 0.5, v + 0.5]; u indexes
columns, v indexes rows.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class CameraModel:
    """Pinhole intrinsics plus image size."""

    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int

    def __post_init__(self):
        if self.fx <= 0 or self.fy <= 0:
            raise ValueError(f"focal lengths must be positive, got fx={self.fx} fy={self.fy}")
        if not (0 <= self.cx < self.width and 0 <= self.cy < self.height):
            raise ValueError("principal point outside the image")


@dataclass(frozen=True)
class PlaneFrame:
    """Rigid transform from table-plane coordinates (x, y in meters, z=0 up)
    to camera coordinates: p_cam = rotation @ (x, y, 0) + translation."""

    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.rotation, dtype=np.float64)
        t = np.asarray(self.translation, dtype=np.float64)
        if r.shape != (3, 3) or t.shape != (3,):
            raise ValueError("PlaneFrame needs a 3x3 rotation and 3-vector translation")
        if np.linalg.norm(r @ r.T - np.eye(3)) > 1e-9:
            raise ValueError("rotation is not orthonormal")
        object.__setattr__(self, "rotation", r)
        object.__setattr__(self, "translation", t)

    def to_camera(self, plane_xy: np.ndarray) -> np.ndarray:
        """Map plane points (..., 2) to camera coordinates (..., 3)."""
        xy = np.asarray(plane_xy, dtype=np.float64)
        p = np.zeros(xy.shape[:-1] + (3,))
        p[..., :2] = xy
        return p @ self.rotation.T + self.translation

    @property
    def normal_cam(self) -> np.ndarray:
        """Plane normal expressed in camera coordinates."""
        return self.rotation[:, 2]


@dataclass(frozen=True)
class GridGeometry:
    """Placement of a square pressure grid on the table plane.

    ``origin`` is the lower corner of cell (0, 0); cell (i, j) covers
    [origin + (i, j) * cell_size, origin + (i+1, j+1) * cell_size] with i
    along x and j along y.
    """

    origin: tuple[float, float]
    cell_size: float
    shape: tuple[int, int]

    @property
    def cell_area(self) -> float:
        return self.cell_size * self.cell_size

    def cell_centers(self) -> tuple[np.ndarray, np.ndarray]:
        """Meshgrid arrays (shape-sized) of cell-center x and y in meters."""
        nx, ny = self.shape
        xs = self.origin[0] + (np.arange(nx) + 0.5) * self.cell_size
        ys = self.origin[1] + (np.arange(ny) + 0.5) * self.cell_size
        return np.meshgrid(xs, ys, indexing="ij")


def project_point(camera: CameraModel, p_cam: np.ndarray) -> tuple[float, float]:
    """Project a camera-frame point to pixel coordinates (u, v)."""
    x, y, z = np.asarray(p_cam, dtype=np.float64)
    if z <= 0:
        raise ValueError(f"point at or behind the camera plane (z={z})")
    return (camera.fx * x / z + camera.cx, camera.fy * y / z + camera.cy)


def project_points(camera: CameraModel, p_cam: np.ndarray) -> np.ndarray:
    """Vectorized projection of (..., 3) camera-frame points to (..., 2) pixels."""
    p = np.asarray(p_cam, dtype=np.float64)
    z = p[..., 2]
    if np.any(z <= 0):
        raise ValueError("some points are at or behind the camera plane")
    u = camera.fx * p[..., 0] / z + camera.cx
    v = camera.fy * p[..., 1] / z + camera.cy
    return np.stack([u, v], axis=-1)


def pixel_rays(camera: CameraModel, uv: np.ndarray) -> np.ndarray:
    """Unnormalized ray directions through pixels (..., 2) -> (..., 3)."""
    uv = np.asarray(uv, dtype=np.float64)
    d = np.ones(uv.shape[:-1] + (3,))
    d[..., 0] = (uv[..., 0] - camera.cx) / camera.fx
    d[..., 1] = (uv[..., 1] - camera.cy) / camera.fy
    return d


def backproject_pixels(plane: PlaneFrame, camera: CameraModel, uv: np.ndarray) -> np.ndarray:
    """Intersect pixel rays with the table plane; returns plane coords (..., 2).

    Raises if a ray is (numerically) parallel to the plane or the
    intersection lies behind the camera.
    """
    d = pixel_rays(camera, uv)
    n = plane.normal_cam
    denom = d @ n
    num = plane.translation @ n
    if np.any(np.abs(denom) < 1e-12):
        raise ValueError("pixel ray parallel to the table plane")
    s = num / denom
    if np.any(s <= 0):
        raise ValueError("table plane behind the camera for some pixels")
    p_cam = d * s[..., None]
    local = (p_cam - plane.translation) @ plane.rotation
    return local[..., :2]


def project_plane_point(plane: PlaneFrame, camera: CameraModel, xy: np.ndarray) -> tuple[float, float]:
    """Project a point given in table-plane coordinates to a pixel."""
    return project_point(camera, plane.to_camera(np.asarray(xy, dtype=np.float64)))


def image_error_to_task_space(
    eps_i: np.ndarray, plane: PlaneFrame, camera: CameraModel, at: np.ndarray
) -> np.ndarray:
    """Map an image-space error vector (pixels) at pixel ``at`` to a
    table-plane displacement in meters."""
    at = np.asarray(at, dtype=np.float64)
    pts = backproject_pixels(plane, camera, np.stack([at + np.asarray(eps_i, dtype=np.float64), at]))
    return pts[0] - pts[1]


def pixel_plane_areas(plane: PlaneFrame, camera: CameraModel) -> np.ndarray:
    """Per-pixel footprint area on the table plane, in m^2, shape (H, W).

    Backprojects the pixel-corner lattice and takes the shoelace area of
    each pixel's plane quad.
    """
    h, w = camera.height, camera.width
    us, vs = np.meshgrid(np.arange(w + 1) - 0.5, np.arange(h + 1) - 0.5, indexing="xy")
    corners = backproject_pixels(plane, camera, np.stack([us, vs], axis=-1))
    x, y = corners[..., 0], corners[..., 1]
    # shoelace over each quad (v, u) -> corners at [v:v+2, u:u+2]
    x00, x10, x01, x11 = x[:-1, :-1], x[1:, :-1], x[:-1, 1:], x[1:, 1:]
    y00, y10, y01, y11 = y[:-1, :-1], y[1:, :-1], y[:-1, 1:], y[1:, 1:]
    area = 0.5 * np.abs(
        x00 * y01 - x01 * y00
        + x01 * y11 - x11 * y01
        + x11 * y10 - x10 * y11
        + x10 * y00 - x00 * y10
    )
    return area


def splat_pressure_grid(
    grid: np.ndarray,
    geom: GridGeometry,
    plane: PlaneFrame,
    camera: CameraModel,
    supersample: int = 5,
) -> np.ndarray:
    """Project a table-plane pressure grid (kPa) into the image.

    Each active cell is covered with a stratified lattice of sample points;
    every point deposits its share of the cell's pressure-area product into
    the pixel it lands in, and the deposit is divided by that pixel's plane
    footprint. The total pressure-area product is conserved exactly for
    cells that project inside the image.
    """
    grid = np.asarray(grid, dtype=np.float64)
    if grid.shape != geom.shape:
        raise ValueError(f"grid shape {grid.shape} != geometry shape {geom.shape}")
    out = np.zeros((camera.height, camera.width))
    ii, jj = np.nonzero(grid)
    if ii.size == 0:
        return out.astype(np.float32)

    k = supersample
    offs = (np.arange(k) + 0.5) / k
    ox, oy = np.meshgrid(offs, offs, indexing="ij")
    sub = np.stack([ox.ravel(), oy.ravel()], axis=-1)  # (k*k, 2) in cell units

    base = np.stack([ii, jj], axis=-1) * geom.cell_size + np.asarray(geom.origin)
    pts = base[:, None, :] + sub[None, :, :] * geom.cell_size  # (n, k*k, 2)
    uv = project_points(camera, plane.to_camera(pts))
    u = np.rint(uv[..., 0]).astype(np.int64)
    v = np.rint(uv[..., 1]).astype(np.int64)

    # kPa * m^2 per sample point
    dep = (grid[ii, jj] * geom.cell_area / (k * k))[:, None].repeat(k * k, axis=1)
    inside = (u >= 0) & (u < camera.width) & (v >= 0) & (v < camera.height)
    np.add.at(out, (v[inside], u[inside]), dep[inside])

    areas = pixel_plane_areas(plane, camera)
    out /= areas
    return out.astype(np.float32)


def nadir_plane_frame(cam_pos: np.ndarray) -> PlaneFrame:
    """Plane frame for a camera at ``cam_pos`` (world meters) looking straight
    down at the z=0 table, with image u along +x and v along -y."""
    r = np.array([[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -1.0]])
    return PlaneFrame(rotation=r, translation=-r @ np.asarray(cam_pos, dtype=np.float64))


def tilted_plane_frame(cam_pos: np.ndarray, pitch: float, yaw: float = 0.0) -> PlaneFrame:
    """Plane frame for a camera at ``cam_pos`` yawed about world z (the camera
    turns with the rig) and pitched away from nadir about its own x-axis."""
    cp, sp = np.cos(pitch), np.sin(pitch)
    cy, sy = np.cos(yaw), np.sin(yaw)
    nadir = np.array([[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -1.0]])
    rx = np.array([[1.0, 0.0, 0.0], [0.0, cp, -sp], [0.0, sp, cp]])
    rz_inv = np.array([[cy, sy, 0.0], [-sy, cy, 0.0], [0.0, 0.0, 1.0]])
    r = rx @ nadir @ rz_inv
    return PlaneFrame(rotation=r, translation=-r @ np.asarray(cam_pos, dtype=np.float64))
