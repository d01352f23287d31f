import math

import numpy as np
import pytest

from forceforge.camera import (
    CameraError,
    CameraModel,
    pixel_rays,
    project_force,
    project_point,
    unproject_to_ground,
)
from forceforge.core import VideoDims

DIMS = VideoDims()
CAM = CameraModel(position=(0.0, -4.0, 3.0), look_at=(0.0, 0.0, 0.0))


def test_look_at_projects_to_exact_center():
    x, y = project_point(CAM, (0.0, 0.0, 0.0), DIMS)
    assert x == pytest.approx(DIMS.width / 2.0, abs=1e-9)
    assert y == pytest.approx(DIMS.height / 2.0, abs=1e-9)


def test_camera_right_displacement_moves_column_only():
    right, up, forward = CAM.basis()
    target = np.array(CAM.look_at, dtype=float)
    x0, y0 = project_point(CAM, target, DIMS)
    x1, y1 = project_point(CAM, target + 0.5 * right, DIMS)
    assert x1 > x0
    assert y1 == pytest.approx(y0, abs=1e-9)


def test_project_unproject_ground_roundtrip():
    for point in [(0.3, 0.5, 0.0), (-0.8, 1.2, 0.0), (1.5, -0.4, 0.0)]:
        x, y = project_point(CAM, point, DIMS)
        back = unproject_to_ground(CAM, x, y, DIMS)
        assert np.allclose(back, point, atol=1e-6)


def test_point_behind_camera_rejected():
    with pytest.raises(CameraError, match="behind"):
        project_point(CAM, (0.0, -10.0, 3.0), DIMS)


def test_top_down_world_x_force_is_theta_zero():
    cam = CameraModel(position=(0.0, 0.0, 5.0), look_at=(0.0, 0.0, 0.0), up=(0.0, 1.0, 0.0))
    prompt = project_force(cam, (0.0, 0.0, 0.0), (1.0, 0.0, 0.0), 0.5, DIMS)
    assert prompt.angle == pytest.approx(0.0, abs=1e-6)
    assert prompt.magnitude == 0.5


def test_projection_is_pure():
    a = project_force(CAM, (0.2, 0.1, 0.0), (0.0, 1.0, 0.0), 0.7, DIMS)
    b = project_force(CAM, (0.2, 0.1, 0.0), (0.0, 1.0, 0.0), 0.7, DIMS)
    assert a == b


def test_oblique_force_angle_matches_analytic_tangent():
    cam = CameraModel(position=(2.5, -3.5, 2.0), look_at=(0.1, 0.2, 0.0), fov_degrees=50.0)
    point = np.array([0.4, 0.3, 0.0])
    direction = np.array([0.6, 0.8, 0.0])

    # analytic derivative of the projection along the direction
    right, up, forward = cam.basis()
    d = point - np.array(cam.position)
    X, Y, Z = d @ right, d @ up, d @ forward
    dX, dY, dZ = direction @ right, direction @ up, direction @ forward
    f = cam.focal_pixels(DIMS)
    ddx = f * (dX * Z - X * dZ) / Z**2
    ddy = -f * (dY * Z - Y * dZ) / Z**2
    expected = math.degrees(math.atan2(-ddy, ddx)) % 360.0

    prompt = project_force(cam, point, direction, 1.0, DIMS)
    gap = abs(prompt.angle - expected)
    assert min(gap, 360.0 - gap) < 0.1


def test_degenerate_force_along_view_ray():
    right, up, forward = CAM.basis()
    with pytest.raises(CameraError, match="degenerate|parallel"):
        project_force(CAM, (0.0, 0.0, 0.0), tuple(forward), 0.5, DIMS)


def test_offscreen_application_point_rejected():
    with pytest.raises(CameraError, match="outside"):
        project_force(CAM, (50.0, 0.0, 0.0), (0.0, 1.0, 0.0), 0.5, DIMS)


def test_foreshortening():
    # a segment twice as far projects shorter
    def seg_len(depth):
        a = project_point(CAM, (0.0, depth, 0.0), DIMS)
        b = project_point(CAM, (0.3, depth, 0.0), DIMS)
        return math.dist(a, b)

    assert seg_len(4.0) < seg_len(0.0)


def test_fov_bounds():
    with pytest.raises(CameraError):
        CameraModel(position=(0, -1, 1), look_at=(0, 0, 0), fov_degrees=140.0)


def test_parallel_up_rejected():
    with pytest.raises(CameraError):
        CameraModel(position=(0, 0, 5), look_at=(0, 0, 0), up=(0, 0, 1))


def test_pixel_rays_center_hits_look_at():
    origin, dirs = pixel_rays(CAM, DIMS)
    # the pixel whose center is nearest the principal axis sits half a pixel
    # off it; allow exactly that angular offset
    ray = dirs[DIMS.height // 2, DIMS.width // 2]
    to_target = np.array(CAM.look_at) - origin
    to_target /= np.linalg.norm(to_target)
    half_pixel = math.sqrt(0.5) / CAM.focal_pixels(DIMS)
    assert float(ray @ to_target) > math.cos(1.5 * half_pixel)


def test_pixel_rays_consistent_with_unproject():
    origin, dirs = pixel_rays(CAM, DIMS)
    r, c = 123, 456
    d = dirs[r, c]
    t = -origin[2] / d[2]
    hit = origin + t * d
    via_unproject = unproject_to_ground(CAM, c + 0.5, r + 0.5, DIMS)
    assert np.allclose(hit, via_unproject, atol=1e-9)
