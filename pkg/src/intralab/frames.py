"""Frame loading and writing for raw video and PGM still images.

Two input formats are supported:

* ``yuv-planar`` -- raw planar YUV 4:2:0, 8-bit (one byte per sample) or
  10-bit (two bytes per sample, little-endian).  Only the luma plane is
  read; chroma planes are skipped when seeking between frames.
* ``pgm`` -- binary PGM (P5).  maxval > 255 means two bytes per sample,
  most significant byte first, as the format requires.

Loaded samples are always masked to the declared bit depth so malformed
high bytes cannot leak out-of-range values into the pipeline.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from .errors import FormatError, TruncatedInputError, ValidationError

FORMATS = ("yuv-planar", "pgm")


@dataclass
class Frame:
    """A single luma plane with its geometry.

    samples is a row-major (height, width) uint16 array, already masked
    to bit_depth.
    """

    width: int
    height: int
    bit_depth: int
    samples: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if self.samples.shape != (self.height, self.width):
            raise ValueError(
                f"samples shape {self.samples.shape} != ({self.height}, {self.width})"
            )

    @property
    def max_value(self) -> int:
        return (1 << self.bit_depth) - 1


def _validate_geometry(width: int, height: int, bit_depth: int) -> None:
    if width <= 0 or height <= 0:
        raise ValidationError(f"frame dimensions must be positive, got {width}x{height}")
    if bit_depth not in (8, 10):
        raise ValidationError(f"bit_depth must be 8 or 10, got {bit_depth}")


def load_frame(
    path: str,
    fmt: str,
    width: int,
    height: int,
    bit_depth: int = 8,
    frame_index: int = 0,
) -> Frame:
    """Load one luma frame from path.

    frame_index selects a frame within a yuv-planar sequence; for pgm it
    must be 0 (a PGM file holds a single image).
    """
    _validate_geometry(width, height, bit_depth)
    if frame_index < 0:
        raise ValidationError(f"frame_index must be >= 0, got {frame_index}")
    if fmt == "yuv-planar":
        return _load_yuv420(path, width, height, bit_depth, frame_index)
    if fmt == "pgm":
        if frame_index != 0:
            raise ValidationError("pgm holds a single image; frame_index must be 0")
        return _load_pgm(path, width, height, bit_depth)
    raise FormatError(f"unknown format {fmt!r}; expected one of {FORMATS}")


def _load_yuv420(
    path: str, width: int, height: int, bit_depth: int, frame_index: int
) -> Frame:
    if width % 2 or height % 2:
        raise ValidationError(
            f"yuv-planar 4:2:0 requires even dimensions, got {width}x{height}"
        )
    bytes_per_sample = 1 if bit_depth == 8 else 2
    luma_bytes = width * height * bytes_per_sample
    chroma_bytes = 2 * (width // 2) * (height // 2) * bytes_per_sample
    frame_bytes = luma_bytes + chroma_bytes
    offset = frame_index * frame_bytes
    try:
        with open(path, "rb") as fh:
            fh.seek(offset)
            raw = fh.read(luma_bytes)
    except OSError as exc:
        raise TruncatedInputError(f"cannot read {path}: {exc}") from exc
    if len(raw) < luma_bytes:
        raise TruncatedInputError(
            f"{path}: frame {frame_index} needs {luma_bytes} luma bytes at offset "
            f"{offset}, got {len(raw)}"
        )
    if bit_depth == 8:
        plane = np.frombuffer(raw, dtype=np.uint8).astype(np.uint16)
    else:
        plane = np.frombuffer(raw, dtype="<u2").astype(np.uint16)
    plane &= (1 << bit_depth) - 1
    return Frame(width, height, bit_depth, plane.reshape(height, width))


def _read_pgm_token(fh: io.BufferedReader) -> bytes:
    """Read one whitespace-delimited header token, skipping # comments."""
    token = b""
    while True:
        ch = fh.read(1)
        if ch == b"":
            raise TruncatedInputError("pgm header ends mid-token")
        if ch == b"#":
            while ch not in (b"\n", b""):
                ch = fh.read(1)
            continue
        if ch.isspace():
            if token:
                return token
            continue
        token += ch


def _load_pgm(path: str, width: int, height: int, bit_depth: int) -> Frame:
    try:
        fh = open(path, "rb")
    except OSError as exc:
        raise TruncatedInputError(f"cannot read {path}: {exc}") from exc
    with fh:
        magic = fh.read(2)
        if magic != b"P5":
            raise FormatError(f"{path}: not a binary PGM (magic {magic!r})")
        try:
            w = int(_read_pgm_token(fh))
            h = int(_read_pgm_token(fh))
            maxval = int(_read_pgm_token(fh))
        except ValueError as exc:
            raise FormatError(f"{path}: malformed pgm header") from exc
        if maxval <= 0 or maxval >= 65536:
            raise FormatError(f"{path}: pgm maxval {maxval} out of range")
        if (w, h) != (width, height):
            raise ValidationError(
                f"{path}: pgm is {w}x{h}, expected {width}x{height}"
            )
        bytes_per_sample = 1 if maxval < 256 else 2
        need = w * h * bytes_per_sample
        raw = fh.read(need)
        if len(raw) < need:
            raise TruncatedInputError(f"{path}: wanted {need} sample bytes, got {len(raw)}")
        if bytes_per_sample == 1:
            plane = np.frombuffer(raw, dtype=np.uint8).astype(np.uint16)
        else:
            # PGM stores the most significant byte first.
            plane = np.frombuffer(raw, dtype=">u2").astype(np.uint16)
        plane &= (1 << bit_depth) - 1
        return Frame(width, height, bit_depth, plane.reshape(height, width))


def write_pgm(frame: Frame, path: str) -> None:
    """Write a frame as binary PGM; load_frame round-trips it exactly."""
    maxval = frame.max_value
    header = f"P5\n{frame.width} {frame.height}\n{maxval}\n".encode("ascii")
    if maxval < 256:
        body = frame.samples.astype(np.uint8).tobytes()
    else:
        body = frame.samples.astype(">u2").tobytes()
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(body)


def write_yuv420(frames: list[np.ndarray], path: str, bit_depth: int = 8) -> None:
    """Write luma planes as raw 4:2:0 with mid-gray chroma (fixture helper)."""
    with open(path, "wb") as fh:
        for plane in frames:
            h, w = plane.shape
            mid = 1 << (bit_depth - 1)
            chroma = np.full((h // 2, w // 2), mid, dtype=np.uint16)
            if bit_depth == 8:
                fh.write(plane.astype(np.uint8).tobytes())
                fh.write(chroma.astype(np.uint8).tobytes())
                fh.write(chroma.astype(np.uint8).tobytes())
            else:
                fh.write(plane.astype("<u2").tobytes())
                fh.write(chroma.astype("<u2").tobytes())
                fh.write(chroma.astype("<u2").tobytes())
