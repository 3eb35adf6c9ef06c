"""Detector image I/O: portable graymaps (P2/P5), CSV matrices, sidecar JSON.

Pixel-size metadata travels in a JSON sidecar next to the image file
(same stem, ``.json`` extension) with keys ``pixel_size_x_m``,
``pixel_size_y_m`` and optional ``x_origin_m`` / ``y_origin_m``.
Row 0 is the lowest detector Y.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError

__all__ = [
    "DetectorImage",
    "read_pgm",
    "write_pgm",
    "read_csv_image",
    "write_csv_image",
    "load_image",
    "save_image",
]


@dataclass
class DetectorImage:
    counts: np.ndarray          # (ny, nx) float
    pixel_size_x: float
    pixel_size_y: float
    x0: float = 0.0
    y0: float = 0.0

    @property
    def shape(self):
        return self.counts.shape


def _sidecar_path(path) -> Path:
    return Path(path).with_suffix(".json")


def _write_sidecar(path, img: DetectorImage) -> None:
    meta = {
        "pixel_size_x_m": img.pixel_size_x,
        "pixel_size_y_m": img.pixel_size_y,
        "x_origin_m": img.x0,
        "y_origin_m": img.y0,
    }
    with open(_sidecar_path(path), "w", newline="\n") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _read_sidecar(path) -> dict:
    sc = _sidecar_path(path)
    if not sc.exists():
        raise ConfigError(
            f"missing pixel-size sidecar {sc}; expected JSON with "
            f"pixel_size_x_m and pixel_size_y_m"
        )
    with open(sc) as fh:
        meta = json.load(fh)
    for key in ("pixel_size_x_m", "pixel_size_y_m"):
        if key not in meta:
            raise ConfigError(f"sidecar {sc} lacks {key}")
    return meta


def write_pgm(path, img: DetectorImage, binary: bool = True, maxval: int = 65535) -> None:
    """Write a graymap (binary P5 by default, ASCII P2 otherwise) plus sidecar.

    Counts are scaled to the full [0, maxval] range; 16-bit P5 samples are
    big-endian per the netpbm convention.
    """
    counts = np.asarray(img.counts, dtype=float)
    top = counts.max()
    scaled = np.zeros_like(counts, dtype=np.uint32)
    if top > 0:
        scaled = np.rint(counts / top * maxval).astype(np.uint32)
    ny, nx = counts.shape
    # netpbm row order is top-to-bottom; row 0 of counts is the lowest Y
    flipped = scaled[::-1]
    with open(path, "wb") as fh:
        if binary:
            fh.write(f"P5\n{nx} {ny}\n{maxval}\n".encode())
            if maxval < 256:
                fh.write(flipped.astype(">u1").tobytes())
            else:
                fh.write(flipped.astype(">u2").tobytes())
        else:
            fh.write(f"P2\n{nx} {ny}\n{maxval}\n".encode())
            lines = [" ".join(str(v) for v in row) for row in flipped]
            fh.write(("\n".join(lines) + "\n").encode())
    _write_sidecar(path, img)


def _tokenize_pgm_header(data: bytes):
    # magic, width, height, maxval; '#' comments allowed between tokens
    tokens = []
    i = 0
    while len(tokens) < 4:
        while i < len(data) and data[i : i + 1].isspace():
            i += 1
        if i < len(data) and data[i : i + 1] == b"#":
            while i < len(data) and data[i : i + 1] != b"\n":
                i += 1
            continue
        j = i
        while j < len(data) and not data[j : j + 1].isspace():
            j += 1
        tokens.append(data[i:j])
        i = j
    return tokens, i + 1  # skip single whitespace after maxval


def read_pgm(path, require_sidecar: bool = True) -> DetectorImage:
    """Read P2 or P5 graymap; pixel sizes come from the sidecar."""
    raw = Path(path).read_bytes()
    tokens, offset = _tokenize_pgm_header(raw)
    magic = tokens[0]
    if magic not in (b"P2", b"P5"):
        raise ConfigError(f"not a P2/P5 graymap: magic {magic!r}")
    nx, ny, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    if magic == b"P5":
        dt = ">u1" if maxval < 256 else ">u2"
        arr = np.frombuffer(raw, dtype=dt, count=nx * ny, offset=offset)
        counts = arr.reshape(ny, nx).astype(float)
    else:
        body = raw[offset:].split()
        counts = np.asarray([int(v) for v in body[: nx * ny]], dtype=float).reshape(
            ny, nx
        )
    counts = counts[::-1]  # back to row 0 = lowest Y
    if require_sidecar:
        meta = _read_sidecar(path)
        return DetectorImage(
            counts=counts,
            pixel_size_x=float(meta["pixel_size_x_m"]),
            pixel_size_y=float(meta["pixel_size_y_m"]),
            x0=float(meta.get("x_origin_m", 0.0)),
            y0=float(meta.get("y_origin_m", 0.0)),
        )
    return DetectorImage(counts=counts, pixel_size_x=1.0, pixel_size_y=1.0)


def write_csv_image(path, img: DetectorImage) -> None:
    """CSV matrix (rows = Y pixels from low to high) plus sidecar."""
    with open(path, "w", newline="\n") as fh:
        for row in img.counts:
            fh.write(",".join(f"{v:.9e}" for v in row) + "\n")
    _write_sidecar(path, img)


def read_csv_image(path) -> DetectorImage:
    counts = np.loadtxt(path, delimiter=",", ndmin=2, dtype=float)
    meta = _read_sidecar(path)
    return DetectorImage(
        counts=counts,
        pixel_size_x=float(meta["pixel_size_x_m"]),
        pixel_size_y=float(meta["pixel_size_y_m"]),
        x0=float(meta.get("x_origin_m", 0.0)),
        y0=float(meta.get("y_origin_m", 0.0)),
    )


def load_image(path) -> DetectorImage:
    """Dispatch on content: graymap magic or CSV."""
    p = Path(path)
    head = p.read_bytes()[:2]
    if head in (b"P2", b"P5"):
        return read_pgm(p)
    return read_csv_image(p)


def save_image(path, img: DetectorImage, fmt: str = "pgm") -> None:
    if fmt == "pgm":
        write_pgm(path, img)
    elif fmt == "pgm-ascii":
        write_pgm(path, img, binary=False)
    elif fmt == "csv":
        write_csv_image(path, img)
    else:
        raise ConfigError(f"unknown image format {fmt!r}")
