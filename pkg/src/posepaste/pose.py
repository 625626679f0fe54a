"""Pose features used for matching: orientation, torso slope, torso height.

Conventions (used everywhere in this package):
  - image coordinates, y grows downward
  - angles in degrees; positive rotation is clockwise on screen
  - torso slope is measured from the upward vertical (-y axis), so an
    upright torso has slope 0 and a torso leaning toward +x has slope > 0
  - slope range is (-180, 180]
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

Point = tuple[float, float]


class DegeneratePoseError(ValueError):
    """Raised when coincident landmarks make a pose feature undefined."""


class Orientation(str, Enum):
    UP = "up"
    DOWN = "down"
    LEFT = "left"
    RIGHT = "right"


@dataclass(frozen=True)
class PoseDescriptor:
    orientation: Orientation
    slope_raw: float    # degrees in (-180, 180]
    slope_q: float      # multiple of bin
    height_raw: float   # px, > 0
    height_q: float     # multiple of bin
    mid_hip: Point
    neck: Point


def wrap_angle(deg: float) -> float:
    """Wrap an angle into (-180, 180]."""
    a = math.fmod(deg + 180.0, 360.0)
    if a <= 0.0:
        a += 360.0
    return a - 180.0


def mid_hip(left_hip: Point, right_hip: Point) -> Point:
    return ((left_hip[0] + right_hip[0]) / 2.0, (left_hip[1] + right_hip[1]) / 2.0)


def orientation(left_shoulder: Point, right_shoulder: Point) -> Orientation:
    """Four-way direction label from the left->right shoulder vector.

    Quadrants of atan2(vy, vx): [-45, 45) right, [45, 135) down,
    [135, 180] u [-180, -135) left, [-135, -45) up.
    """
    vx = right_shoulder[0] - left_shoulder[0]
    vy = right_shoulder[1] - left_shoulder[1]
    if vx == 0.0 and vy == 0.0:
        raise DegeneratePoseError("coincident shoulders")
    th = math.degrees(math.atan2(vy, vx))
    if -45.0 <= th < 45.0:
        return Orientation.RIGHT
    if 45.0 <= th < 135.0:
        return Orientation.DOWN
    if th >= 135.0 or th < -135.0:
        return Orientation.LEFT
    return Orientation.UP


def posture_slope(hip: Point, neck: Point) -> float:
    """Signed angle of the hip->neck vector from the upward vertical."""
    vx = neck[0] - hip[0]
    vy = neck[1] - hip[1]
    if vx == 0.0 and vy == 0.0:
        raise DegeneratePoseError("coincident hip and neck")
    return wrap_angle(math.degrees(math.atan2(vx, -vy)))


def height_diff(hip: Point, neck: Point) -> float:
    """Euclidean torso length between mid-hip and neck (camera-distance proxy)."""
    d = math.hypot(neck[0] - hip[0], neck[1] - hip[1])
    if d == 0.0:
        raise DegeneratePoseError("coincident hip and neck")
    return d


def quantize(value: float, bin_size: float) -> float:
    """Nearest integer multiple of bin_size; exact half-bin ties round away from zero."""
    if bin_size <= 0:
        raise ValueError(f"bin must be > 0, got {bin_size}")
    k = math.floor(abs(value) / bin_size + 0.5)
    q = k * bin_size
    return -q if value < 0 else q


def describe(keypoints, bin_size: float) -> PoseDescriptor:
    """Compute the full matching descriptor from a set of keypoints."""
    hip = mid_hip(keypoints.left_hip, keypoints.right_hip)
    t = orientation(keypoints.left_shoulder, keypoints.right_shoulder)
    k = posture_slope(hip, keypoints.neck)
    h = height_diff(hip, keypoints.neck)
    return PoseDescriptor(
        orientation=t,
        slope_raw=k,
        slope_q=quantize(k, bin_size),
        height_raw=h,
        height_q=quantize(h, bin_size),
        mid_hip=hip,
        neck=keypoints.neck,
    )
