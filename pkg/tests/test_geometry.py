import numpy as np
import pytest

from posepaste.geometry import (
    AffineTransform,
    affine_from_match,
    apply_to_point,
    warp_image,
    warp_mask,
)
from posepaste.matcher import circular_distance
from posepaste.pose import posture_slope

from conftest import random_descriptor


def translation(tx, ty):
    return AffineTransform(np.array([[1.0, 0, tx], [0, 1.0, ty]]))


def test_apply_to_point():
    assert apply_to_point(AffineTransform.identity(), (5, 7)) == (5, 7)
    assert apply_to_point(translation(3, -2), (0, 0)) == (3, -2)
    scale2 = AffineTransform(np.array([[2.0, 0, 0], [0, 2.0, 0]]))
    assert apply_to_point(scale2, (1, 1)) == (2, 2)


def test_rotation_convention():
    # positive angle is clockwise on screen (y down)
    t = AffineTransform.rotation_scale_about((0, 0), 90)
    assert apply_to_point(t, (1, 0)) == pytest.approx((0, 1))
    t = AffineTransform.rotation_scale_about((10, 10), 90)
    assert apply_to_point(t, (11, 10)) == pytest.approx((10, 11))


def test_pivot_is_fixed():
    t = AffineTransform.rotation_scale_about((12.5, -3.0), 37.0, 1.7)
    assert apply_to_point(t, (12.5, -3.0)) == pytest.approx((12.5, -3.0), abs=1e-9)


def test_inverse_roundtrip():
    t = AffineTransform.rotation_scale_about((5, 9), 33, 1.4)
    q = apply_to_point(t.inverse(), apply_to_point(t, (3, 4)))
    assert q == pytest.approx((3, 4), abs=1e-9)


def test_non_invertible():
    with pytest.raises(ValueError):
        AffineTransform(np.array([[0.0, 0, 0], [0, 0.0, 0]])).inverse()


def test_affine_from_match_identity():
    d = random_descriptor(np.random.default_rng(1))
    t = affine_from_match(d, d, scale_correct=False)
    assert np.allclose(t.m, AffineTransform.identity().m, atol=1e-9)


def test_affine_from_match_alignment():
    rng = np.random.default_rng(2)
    for _ in range(500):
        p = random_descriptor(rng)
        d = random_descriptor(rng)
        t = affine_from_match(p, d, scale_correct=True)
        hip = apply_to_point(t, d.mid_hip)
        neck = apply_to_point(t, d.neck)
        assert hip == pytest.approx(d.mid_hip, abs=1e-9)  # pivot fixed
        assert circular_distance(posture_slope(hip, neck), p.slope_raw) < 1e-6
        length = np.hypot(neck[0] - hip[0], neck[1] - hip[1])
        assert length == pytest.approx(p.height_raw, abs=1e-6)


def test_warp_image_identity():
    rng = np.random.default_rng(3)
    img = rng.integers(0, 256, (16, 12, 3), dtype=np.uint8)
    assert (warp_image(img, AffineTransform.identity(), 12, 16) == img).all()


def test_warp_image_translation():
    rng = np.random.default_rng(4)
    img = rng.integers(0, 256, (8, 10, 3), dtype=np.uint8)
    out = warp_image(img, translation(5, 0), 10, 8)
    assert (out[:, 5:] == img[:, :5]).all()
    assert (out[:, :5] == 0).all()


def test_warp_image_quarter_turn():
    # 2x2 four-color block rotated 90 deg clockwise about its center:
    # each output pixel center inverse-maps exactly onto a source center,
    # permuting the quadrants one step clockwise.
    img = np.zeros((2, 2, 3), dtype=np.uint8)
    img[0, 0] = (255, 0, 0)
    img[0, 1] = (0, 255, 0)
    img[1, 0] = (0, 0, 255)
    img[1, 1] = (255, 255, 0)
    t = AffineTransform.rotation_scale_about((1, 1), 90)
    out = warp_image(img, t, 2, 2)
    assert (out[0, 0] == img[1, 0]).all()
    assert (out[0, 1] == img[0, 0]).all()
    assert (out[1, 1] == img[0, 1]).all()
    assert (out[1, 0] == img[1, 1]).all()


def test_warp_roundtrip_on_gradient():
    xs = np.linspace(0, 255, 128)
    grad = np.zeros((128, 128, 3), dtype=np.uint8)
    grad[..., 0] = xs[None, :].astype(np.uint8)
    grad[..., 1] = xs[:, None].astype(np.uint8)
    grad[..., 2] = ((xs[None, :] + xs[:, None]) / 2).astype(np.uint8)
    t = AffineTransform.rotation_scale_about((64, 64), 17)
    back = warp_image(warp_image(grad, t, 128, 128), t.inverse(), 128, 128)
    interior = (slice(30, 98), slice(30, 98))
    err = np.abs(back[interior].astype(int) - grad[interior].astype(int)).max()
    assert err <= 8


def test_warp_mask_identity_and_empty():
    mask = np.zeros((6, 6), dtype=np.uint8)
    mask[2:4, 2:4] = 1
    assert (warp_mask(mask, AffineTransform.identity(), 6, 6) == mask).all()
    zero = np.zeros((6, 6), dtype=np.uint8)
    t = AffineTransform.rotation_scale_about((3, 3), 45, 1.3)
    assert (warp_mask(zero, t, 6, 6) == 0).all()


def test_warp_mask_translation_single_bit():
    mask = np.zeros((4, 8), dtype=np.uint8)
    mask[0, 0] = 1
    out = warp_mask(mask, translation(5, 0), 8, 4)
    assert out[0, 5] == 1
    assert out.sum() == 1


def test_warp_mask_stays_binary():
    rng = np.random.default_rng(5)
    mask = (rng.random((20, 20)) < 0.4).astype(np.uint8)
    t = AffineTransform.rotation_scale_about((10, 10), 30, 1.5)
    out = warp_mask(mask, t, 30, 30)
    assert set(np.unique(out)) <= {0, 1}


def test_warp_mask_area_scaling():
    # convex mask >= 100 px^2: area scales by ~s^2
    mask = np.zeros((64, 64), dtype=np.uint8)
    mask[20:44, 20:44] = 1  # 576 px
    for s in (0.7, 1.0, 1.3):
        t = AffineTransform.rotation_scale_about((32, 32), 25, s)
        out = warp_mask(mask, t, 96, 96)
        ratio = out.sum() / mask.sum()
        assert abs(ratio - s * s) <= 0.1 * s * s
