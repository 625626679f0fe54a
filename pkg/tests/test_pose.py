import math

import pytest
from hypothesis import given, strategies as st

from posepaste import pose
from posepaste.ingest import PoseKeypoints
from posepaste.pose import (
    DegeneratePoseError,
    Orientation,
    height_diff,
    mid_hip,
    orientation,
    posture_slope,
    quantize,
    wrap_angle,
)

finite = st.floats(-1e4, 1e4, allow_nan=False)
points = st.tuples(finite, finite)


def test_mid_hip():
    assert mid_hip((10, 20), (30, 20)) == (20, 20)
    assert mid_hip((0, 0), (0, 0)) == (0, 0)
    assert mid_hip((12, 40), (18, 44)) == (15, 42)


@pytest.mark.parametrize(
    "ls,rs,expected",
    [
        ((0, 0), (10, 0), Orientation.RIGHT),
        ((0, 0), (0, 10), Orientation.DOWN),
        ((10, 0), (0, 0), Orientation.LEFT),
        ((0, 10), (0, 0), Orientation.UP),
        ((0, 0), (10, 10), Orientation.DOWN),  # 45 deg boundary goes down
    ],
)
def test_orientation_quadrants(ls, rs, expected):
    assert orientation(ls, rs) == expected


def test_orientation_degenerate():
    with pytest.raises(DegeneratePoseError):
        orientation((3, 4), (3, 4))


def test_posture_slope_examples():
    assert posture_slope((50, 100), (50, 40)) == pytest.approx(0.0)
    assert posture_slope((100, 100), (160, 40)) == pytest.approx(45.0)
    assert posture_slope((100, 100), (40, 40)) == pytest.approx(-45.0)


def test_height_diff_examples():
    assert height_diff((50, 100), (50, 40)) == pytest.approx(60.0)
    assert height_diff((0, 0), (3, -4)) == pytest.approx(5.0)
    assert height_diff((1, 1), (1, 2)) == pytest.approx(1.0)


def test_degenerate_torso():
    with pytest.raises(DegeneratePoseError):
        posture_slope((5, 5), (5, 5))
    with pytest.raises(DegeneratePoseError):
        height_diff((5, 5), (5, 5))


def test_quantize_examples():
    assert quantize(22, 15) == 15
    assert quantize(23, 15) == 30
    assert quantize(-22.5, 15) == -30
    assert quantize(7.5, 15) == 15  # tie away from zero
    assert quantize(0, 15) == 0


def test_quantize_bad_bin():
    with pytest.raises(ValueError):
        quantize(1.0, 0)
    with pytest.raises(ValueError):
        quantize(1.0, -3)


@given(st.floats(-1e6, 1e6), st.floats(0.01, 1000))
def test_quantize_properties(v, bin_size):
    q = quantize(v, bin_size)
    assert abs(q - v) <= bin_size / 2 + 1e-9
    assert abs(q / bin_size - round(q / bin_size)) < 1e-6


@given(points, points, st.tuples(st.floats(-500, 500), st.floats(-500, 500)))
def test_translation_invariance(hip, neck, t):
    if hip == neck:
        return
    shift = lambda p: (p[0] + t[0], p[1] + t[1])
    assert posture_slope(shift(hip), shift(neck)) == pytest.approx(
        posture_slope(hip, neck), abs=1e-6
    )


@given(points, points, st.floats(0.1, 10))
def test_scale_invariance(hip, neck, s):
    if hip == neck:
        return
    scale = lambda p: (p[0] * s, p[1] * s)
    assert posture_slope(scale(hip), scale(neck)) == pytest.approx(
        posture_slope(hip, neck), abs=1e-6
    )
    assert height_diff(scale(hip), scale(neck)) == pytest.approx(
        height_diff(hip, neck) * s, rel=1e-9
    )


@given(points, points, st.floats(-360, 360))
def test_rotation_covariance(hip, neck, phi):
    if hip == neck:
        return
    th = math.radians(phi)
    c, s = math.cos(th), math.sin(th)
    rot = lambda p: (c * p[0] - s * p[1], s * p[0] + c * p[1])  # screen-clockwise
    base = posture_slope(hip, neck)
    rotated = posture_slope(rot(hip), rot(neck))
    diff = abs(wrap_angle(rotated - base - phi))
    assert diff == pytest.approx(0.0, abs=1e-6) or diff == pytest.approx(360.0, abs=1e-6)


@given(points, points)
def test_mirror_antisymmetry(hip, neck):
    if hip == neck:
        return
    flip = lambda p: (-p[0], p[1])
    base = posture_slope(hip, neck)
    mirrored = posture_slope(flip(hip), flip(neck))
    # slope 180 maps to itself (both wrap to +180)
    assert abs(wrap_angle(mirrored + base)) == pytest.approx(0.0, abs=1e-6) or (
        abs(base) == pytest.approx(180.0, abs=1e-6)
    )


def test_describe_composes():
    kp = PoseKeypoints(
        left_shoulder=(40, 40),
        right_shoulder=(60, 40),
        left_hip=(42, 102),
        right_hip=(58, 102),
        neck=(50, 40),
    )
    d = pose.describe(kp, 15)
    assert d.orientation == Orientation.RIGHT
    assert d.mid_hip == (50, 102)
    assert d.slope_raw == pytest.approx(0.0)
    assert d.slope_q == 0
    assert d.height_raw == pytest.approx(62.0)
    assert d.height_q == 60  # quantized from 62 with bin 15


def test_wrap_angle_range():
    assert wrap_angle(180) == 180
    assert wrap_angle(-180) == 180
    assert wrap_angle(190) == pytest.approx(-170)
    assert wrap_angle(-190) == pytest.approx(170)
    assert wrap_angle(0) == 0
