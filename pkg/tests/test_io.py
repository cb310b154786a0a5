import struct

import numpy as np
import pytest

from fst.errors import BadMagic, BadVersion, CorruptFile, SizeMismatch, UnsupportedFormat
from fst.io import (
    quantize,
    read_any,
    read_fmap,
    read_image,
    write_any,
    write_fmap,
    write_image,
)


def test_white_ppm(tmp_path):
    p = tmp_path / "white.ppm"
    p.write_bytes(b"P6\n2 2\n255\n" + b"\xff" * 12)
    f = read_image(p)
    assert f.shape == (3, 2, 2) and f.dtype == np.float64
    assert np.all(f == 255.0)


def test_ppm_pixel_layout(tmp_path):
    p = tmp_path / "px.ppm"
    p.write_bytes(b"P6 2 1 255\n" + bytes([1, 2, 3, 4, 5, 6]))
    np.testing.assert_array_equal(read_image(p)[:, 0, :], [[1, 4], [2, 5], [3, 6]])


@pytest.mark.parametrize("name,c", [("rgb.png", 3), ("gray.png", 1), ("rgb.ppm", 3)])
def test_image_round_trip(tmp_path, rng, name, c):
    f = rng.integers(0, 256, (c, 5, 7)).astype(float)
    write_image(f, tmp_path / name)
    np.testing.assert_array_equal(read_image(tmp_path / name), f)


def test_clamp_and_round_half_even(tmp_path):
    f = np.array([[[260.7, -3.0, 2.5, 3.5, 0.5, 254.5]]])
    np.testing.assert_array_equal(quantize(f)[0, 0], [255, 0, 2, 4, 0, 254])
    write_image(f, tmp_path / "q.png")
    np.testing.assert_array_equal(read_image(tmp_path / "q.png")[0, 0], [255, 0, 2, 4, 0, 254])


def test_write_image_rejects(tmp_path):
    with pytest.raises(UnsupportedFormat):
        write_image(np.zeros((1, 2, 2)), tmp_path / "x.ppm")
    with pytest.raises(UnsupportedFormat):
        write_image(np.zeros((3, 2, 2)), tmp_path / "x.jpg")
    with pytest.raises(UnsupportedFormat):
        write_image(np.zeros((2, 2, 2)), tmp_path / "x.png")


def test_read_image_errors(tmp_path):
    txt = tmp_path / "a.png"
    txt.write_text("hello there")
    with pytest.raises(UnsupportedFormat):
        read_image(txt)
    good = tmp_path / "good.png"
    write_image(np.zeros((3, 8, 8)), good)
    broken = tmp_path / "broken.png"
    broken.write_bytes(good.read_bytes()[:30])
    with pytest.raises(CorruptFile):
        read_image(broken)
    short = tmp_path / "short.ppm"
    short.write_bytes(b"P6\n4 4\n255\n" + b"\x00" * 5)
    with pytest.raises(CorruptFile):
        read_image(short)


def test_fmap_bit_exact(tmp_path, rng):
    f = rng.standard_normal((3, 4, 5)) * 1e300
    f[0, 0, 0] = -0.0
    f[1, 1, 1] = 5e-324
    p = tmp_path / "x.fmap"
    write_fmap(f, p)
    assert p.stat().st_size == 20 + 8 * 60
    g = read_fmap(p)
    assert g.tobytes() == f.tobytes()
    raw = p.read_bytes()
    assert raw[:4] == b"FMAP" and struct.unpack("<IIII", raw[4:20]) == (1, 3, 4, 5)
    # channel-major, then row-major
    assert struct.unpack("<d", raw[20 + 8 * 21:20 + 8 * 22])[0] == f[1, 0, 1]


def test_fmap_errors(tmp_path, rng):
    p = tmp_path / "x.fmap"
    write_fmap(rng.standard_normal((2, 3, 3)), p)
    raw = p.read_bytes()
    bad = tmp_path / "bad.fmap"
    bad.write_bytes(b"FMAQ" + raw[4:])
    with pytest.raises(BadMagic):
        read_fmap(bad)
    bad.write_bytes(raw[:4] + struct.pack("<I", 2) + raw[8:])
    with pytest.raises(BadVersion):
        read_fmap(bad)
    bad.write_bytes(raw[:-8])
    with pytest.raises(SizeMismatch):
        read_fmap(bad)
    bad.write_bytes(raw[:12])
    with pytest.raises(SizeMismatch):
        read_fmap(bad)


def test_any_dispatch(tmp_path, rng):
    f = rng.standard_normal((2, 3, 3))
    write_any(f, tmp_path / "a.fmap")
    np.testing.assert_array_equal(read_any(tmp_path / "a.fmap"), f)
    # magic sniffing when the extension says nothing
    (tmp_path / "b.bin").write_bytes((tmp_path / "a.fmap").read_bytes())
    np.testing.assert_array_equal(read_any(tmp_path / "b.bin"), f)
    with pytest.raises(FileNotFoundError):
        read_any(tmp_path / "missing.png")
