import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from forceforge.core import (
    GlobalForcePrompt,
    LocalForcePrompt,
    MultiForcePrompt,
    PromptError,
    VideoDims,
)
from forceforge.encoding import (
    BlobParams,
    blob_centers,
    blob_displacement,
    encode_global,
    encode_local,
    encode_multi,
    export_png_frames,
    read_fpct,
    write_fpct,
)


class TestGlobalEncoding:
    def test_midpoint_force_up(self, small_dims):
        t = encode_global(GlobalForcePrompt(0.5, 90.0), small_dims)
        assert np.allclose(t.values[:, 0], 0.0, atol=1e-15)
        assert np.allclose(t.values[:, 1], 0.0, atol=1e-15)
        assert np.allclose(t.values[:, 2], 1.0, atol=1e-15)

    def test_affine_endpoints(self, small_dims):
        t0 = encode_global(GlobalForcePrompt(0.0, 0.0), small_dims)
        assert t0.values[0, 0, 0, 0] == -1.0
        assert t0.values[0, 1, 0, 0] == 1.0
        assert t0.values[0, 2, 0, 0] == 0.0
        t1 = encode_global(GlobalForcePrompt(1.0, 180.0), small_dims)
        assert t1.values[0, 0, 0, 0] == 1.0
        assert t1.values[0, 1, 0, 0] == -1.0
        assert abs(t1.values[0, 2, 0, 0]) < 1e-15

    def test_constant_per_channel(self, small_dims):
        t = encode_global(GlobalForcePrompt(0.3, 123.4), small_dims)
        for c in range(3):
            channel = t.values[:, c]
            assert np.all(channel == channel.flat[0])

    def test_unit_circle_invariant(self, small_dims):
        for theta in (0.0, 17.3, 200.0, 359.9):
            t = encode_global(GlobalForcePrompt(0.7, theta), small_dims)
            c1 = float(t.values[0, 1, 0, 0])
            c2 = float(t.values[0, 2, 0, 0])
            assert c1 * c1 + c2 * c2 == pytest.approx(1.0, abs=1e-12)

    def test_wraparound_continuity(self, small_dims):
        # cos/sin are 1-Lipschitz in radians, so the gap is bounded by the
        # angular distance to 360
        eps = math.radians(360.0 - 359.9999) + 1e-12
        near = encode_global(GlobalForcePrompt(0.5, 359.9999), small_dims)
        zero = encode_global(GlobalForcePrompt(0.5, 0.0), small_dims)
        assert abs(near.values[0, 1, 0, 0] - zero.values[0, 1, 0, 0]) <= eps
        assert abs(near.values[0, 2, 0, 0] - zero.values[0, 2, 0, 0]) <= eps

    @given(
        F1=st.floats(min_value=0, max_value=1),
        F2=st.floats(min_value=0, max_value=1),
    )
    @settings(max_examples=30)
    def test_lipschitz_in_force(self, F1, F2):
        dims = VideoDims(frames=2, height=4, width=4)
        a = encode_global(GlobalForcePrompt(F1, 45.0), dims)
        b = encode_global(GlobalForcePrompt(F2, 45.0), dims)
        gap = np.max(np.abs(a.values - b.values))
        assert gap <= 2.0 * abs(F1 - F2) + 1e-12


class TestBlobDisplacement:
    # Travel at width 720 is fixed by the affine law (1/8 + 3/8 F) * w.
    @pytest.mark.parametrize(
        "F,expected",
        [(0.0, 90.0), (0.25, 157.5), (0.5, 225.0), (0.75, 292.5), (1.0, 360.0)],
    )
    def test_reference_values(self, F, expected):
        dims = VideoDims()
        assert blob_displacement(F, dims) == pytest.approx(expected, rel=1e-12)

    def test_strictly_increasing_and_nonzero_at_floor(self):
        dims = VideoDims()
        vals = [blob_displacement(f, dims) for f in np.linspace(0, 1, 33)]
        assert vals[0] == 90.0
        assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_gap_is_affine(self):
        dims = VideoDims()
        # displacement difference is exactly w * 3/8 * (F2 - F1)
        assert blob_displacement(0.9, dims) - blob_displacement(0.1, dims) == pytest.approx(
            720 * 0.375 * 0.8, rel=1e-12
        )


class TestLocalEncoding:
    def test_final_frame_center_full_force_right(self):
        dims = VideoDims()
        centers = blob_centers(LocalForcePrompt(100, 200, 1.0, 0.0), dims)
        assert centers[-1, 0] == pytest.approx(460.0, rel=1e-12)
        assert centers[-1, 1] == pytest.approx(200.0, abs=1e-9)

    def test_final_frame_center_gentle_up(self):
        dims = VideoDims()
        centers = blob_centers(LocalForcePrompt(100, 200, 0.0, 90.0), dims)
        # screen-up: row decreases by the 90 px floor displacement
        assert centers[-1, 0] == pytest.approx(100.0, abs=1e-9)
        assert centers[-1, 1] == pytest.approx(110.0, rel=1e-12)

    def test_frame0_argmax_at_request(self, small_dims):
        t = encode_local(LocalForcePrompt(31, 17, 0.5, 45.0), small_dims, BlobParams(4, 2, 6))
        f0 = np.asarray(t.values[0, 0])
        r, c = np.unravel_index(np.argmax(f0), f0.shape)
        assert (c, r) == (31, 17)

    def test_channels_identical(self, small_dims):
        t = encode_local(LocalForcePrompt(20, 20, 0.3, 10.0), small_dims)
        assert np.array_equal(t.values[:, 0], t.values[:, 1])
        assert np.array_equal(t.values[:, 0], t.values[:, 2])

    def test_values_in_unit_range(self, small_dims):
        t = encode_local(LocalForcePrompt(45, 30, 1.0, 225.0), small_dims)
        assert float(t.values.min()) >= 0.0
        assert float(t.values.max()) <= 1.0

    def test_blob_may_exit_frame(self):
        dims = VideoDims(frames=5, height=40, width=60)
        t = encode_local(LocalForcePrompt(55, 20, 1.0, 0.0), dims, BlobParams(3, 1.5, 4.5))
        # final center is far outside; frame must simply contain no blob
        assert float(np.asarray(t.values[-1, 0]).max()) == 0.0

    def test_mass_conserved_while_inside(self):
        # same footprint translated: per-frame intensity sum is constant up
        # to lattice points crossing the hard truncation boundary (the tail
        # value there is exp(-4.5) ~ 1.1e-2 per pixel)
        dims = VideoDims(frames=7, height=200, width=200)
        blob = BlobParams(8, 4, 12)
        t = encode_local(LocalForcePrompt(40, 100, 0.2, 0.0), dims, blob)
        sums = np.asarray(t.values[:, 0]).sum(axis=(1, 2))
        assert np.all(np.abs(sums - sums[0]) <= 2e-3 * sums[0])

    def test_truncation_beyond_radius(self):
        dims = VideoDims(frames=2, height=100, width=100)
        blob = BlobParams(radius=10, sigma=5, truncation=15)
        t = encode_local(LocalForcePrompt(50, 50, 0.0, 0.0), dims, blob)
        f0 = np.asarray(t.values[0, 0])
        assert f0[50, 50 + 14] > 0.0
        assert f0[50, 50 + 16] == 0.0

    def test_out_of_frame_prompt_rejected(self, small_dims):
        with pytest.raises(PromptError):
            encode_local(LocalForcePrompt(1000, 10, 0.5, 0.0), small_dims)

    @given(F=st.floats(min_value=0, max_value=0.99))
    @settings(max_examples=20, deadline=None)
    def test_monotone_final_displacement(self, F):
        dims = VideoDims(frames=3, height=10, width=64)
        lo = blob_centers(LocalForcePrompt(0, 5, F, 0.0), dims)
        hi = blob_centers(LocalForcePrompt(0, 5, min(1.0, F + 0.01), 0.0), dims)
        assert hi[-1, 0] > lo[-1, 0]


class TestMultiEncoding:
    def test_singleton_bit_identical(self, small_dims):
        f = LocalForcePrompt(12, 34, 0.6, 120.0)
        single = encode_local(f, small_dims)
        multi = encode_multi(MultiForcePrompt((f,)), small_dims)
        assert np.array_equal(np.asarray(single.values), np.asarray(multi.values))

    def test_far_separated_blobs_match_locals(self):
        dims = VideoDims(frames=3, height=80, width=300)
        blob = BlobParams(4, 2, 6)
        f1 = LocalForcePrompt(20, 40, 0.0, 90.0)
        f2 = LocalForcePrompt(280, 40, 0.0, 90.0)
        multi = encode_multi(MultiForcePrompt((f1, f2)), dims, blob)
        a = encode_local(f1, dims, blob)
        b = encode_local(f2, dims, blob)
        left = np.asarray(multi.values[:, :, :, :100])
        right = np.asarray(multi.values[:, :, :, 200:])
        assert np.array_equal(left, np.asarray(a.values[:, :, :, :100]))
        assert np.array_equal(right, np.asarray(b.values[:, :, :, 200:]))

    def test_coincident_forces_idempotent(self, small_dims):
        f = LocalForcePrompt(30, 30, 0.4, 200.0)
        one = encode_multi(MultiForcePrompt((f,)), small_dims)
        two = encode_multi(MultiForcePrompt((f, f)), small_dims)
        assert np.array_equal(np.asarray(one.values), np.asarray(two.values))


class TestExport:
    def test_fpct_roundtrip(self, tmp_path, small_dims):
        t = encode_local(LocalForcePrompt(10, 10, 0.7, 30.0), small_dims)
        p = tmp_path / "control.fpct"
        write_fpct(t, p)
        back = read_fpct(p)
        assert back.values.shape == t.values.shape
        assert np.array_equal(back.values, np.asarray(t.values, dtype=np.float32))

    def test_fpct_header(self, tmp_path, small_dims):
        t = encode_global(GlobalForcePrompt(1.0, 0.0), small_dims)
        p = tmp_path / "g.fpct"
        write_fpct(t, p)
        raw = p.read_bytes()
        assert raw[:4] == b"FPCT"
        f, c, h, w = np.frombuffer(raw[4:20], dtype="<u4")
        assert (f, c, h, w) == (small_dims.frames, 3, small_dims.height, small_dims.width)

    def test_fpct_rejects_bad_magic(self, tmp_path):
        p = tmp_path / "bad.fpct"
        p.write_bytes(b"NOPE" + b"\x00" * 16)
        with pytest.raises(ValueError):
            read_fpct(p)

    def test_png_export_counts_and_range(self, tmp_path, small_dims):
        t = encode_local(LocalForcePrompt(45, 30, 1.0, 0.0), small_dims)
        paths = export_png_frames(t, tmp_path / "local")
        assert len(paths) == small_dims.frames
        from PIL import Image

        img = np.asarray(Image.open(paths[0]))
        assert img.shape == (small_dims.height, small_dims.width, 3)
        r, c = np.unravel_index(np.argmax(img[:, :, 0]), img.shape[:2])
        assert (c, r) == (45, 30)

    def test_png_export_global_affine(self, tmp_path, small_dims):
        t = encode_global(GlobalForcePrompt(0.5, 90.0), small_dims)
        paths = export_png_frames(t, tmp_path / "global")
        from PIL import Image

        img = np.asarray(Image.open(paths[0]))
        # channels (0, 0, 1) map to (128, 128, 255)
        assert img[0, 0, 0] == 128
        assert img[0, 0, 1] == 128
        assert img[0, 0, 2] == 255


def test_blob_params_validation():
    with pytest.raises(PromptError):
        BlobParams(radius=0)
    with pytest.raises(PromptError):
        BlobParams(radius=20, sigma=10, truncation=10)
