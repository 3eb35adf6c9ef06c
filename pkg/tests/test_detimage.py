"""Graymap/CSV detector-image round trips and sidecar metadata."""

import numpy as np
import pytest

from edecoh.detimage import (
    DetectorImage,
    load_image,
    read_csv_image,
    read_pgm,
    write_csv_image,
    write_pgm,
)
from edecoh.errors import ConfigError


@pytest.fixture
def image():
    rng = np.random.default_rng(3)
    counts = rng.integers(0, 60000, size=(12, 20)).astype(float)
    return DetectorImage(
        counts=counts, pixel_size_x=2.4e-6, pixel_size_y=4.8e-6, x0=-2e-5, y0=0.0
    )


def test_pgm_binary_roundtrip(tmp_path, image):
    path = tmp_path / "img.pgm"
    write_pgm(path, image)
    back = read_pgm(path)
    scale = image.counts.max() / 65535.0
    assert np.allclose(back.counts * scale, image.counts, atol=0.51 * scale)
    assert back.pixel_size_x == image.pixel_size_x
    assert back.pixel_size_y == image.pixel_size_y
    assert back.x0 == image.x0
    assert path.read_bytes()[:2] == b"P5"


def test_pgm_ascii_roundtrip(tmp_path, image):
    path = tmp_path / "img_ascii.pgm"
    write_pgm(path, image, binary=False)
    back = read_pgm(path)
    scale = image.counts.max() / 65535.0
    assert np.allclose(back.counts * scale, image.counts, atol=0.51 * scale)
    assert path.read_bytes()[:2] == b"P2"


def test_pgm_8bit(tmp_path, image):
    path = tmp_path / "img8.pgm"
    write_pgm(path, image, maxval=255)
    back = read_pgm(path)
    assert back.counts.max() == 255


def test_csv_roundtrip_exact(tmp_path, image):
    path = tmp_path / "img.csv"
    write_csv_image(path, image)
    back = read_csv_image(path)
    assert np.allclose(back.counts, image.counts, rtol=1e-9)
    assert back.pixel_size_y == image.pixel_size_y


def test_load_dispatch(tmp_path, image):
    p1 = tmp_path / "a.pgm"
    p2 = tmp_path / "b.csv"
    write_pgm(p1, image)
    write_csv_image(p2, image)
    assert load_image(p1).counts.shape == image.counts.shape
    assert load_image(p2).counts.shape == image.counts.shape


def test_missing_sidecar_rejected(tmp_path, image):
    path = tmp_path / "img.pgm"
    write_pgm(path, image)
    (tmp_path / "img.json").unlink()
    with pytest.raises(ConfigError):
        read_pgm(path)


def test_pgm_comment_header(tmp_path, image):
    path = tmp_path / "img.pgm"
    write_pgm(path, image, binary=False)
    raw = path.read_bytes().split(b"\n", 1)
    path.write_bytes(raw[0] + b"\n# a comment line\n" + raw[1])
    back = read_pgm(path)
    assert back.counts.shape == image.counts.shape
