"""Image file decoding: binary PGM (P5, maxval 255) plus optional PNG.

PNG support is an optional feature: it requires Pillow (install the
``png`` extra). PGM is the native lossless format and keeps tests
bit-exact.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidInput
from .image_pipeline import GrayImage, to_luminance

try:
    from PIL import Image as _PILImage

    PNG_SUPPORTED = True
except ImportError:  # pragma: no cover - depends on optional extra
    _PILImage = None
    PNG_SUPPORTED = False

_PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def _parse_pgm_header(data: bytes):
    """Return (width, height, maxval, offset) of a P5 header.

    Whitespace-separated tokens; '#' starts a comment running to end of
    line. Exactly one whitespace byte follows the maxval token.
    """
    if data[:2] != b"P5":
        raise InvalidInput("not a binary PGM (P5) file")
    pos = 2
    tokens = []
    while len(tokens) < 3:
        if pos >= len(data):
            raise InvalidInput("truncated PGM header")
        c = data[pos : pos + 1]
        if c == b"#":
            nl = data.find(b"\n", pos)
            if nl < 0:
                raise InvalidInput("truncated PGM comment")
            pos = nl + 1
        elif c.isspace():
            pos += 1
        else:
            end = pos
            while end < len(data) and not data[end : end + 1].isspace():
                end += 1
            tokens.append(data[pos:end])
            pos = end
    try:
        width, height, maxval = (int(t) for t in tokens)
    except ValueError:
        raise InvalidInput("malformed PGM header") from None
    if pos >= len(data) or not data[pos : pos + 1].isspace():
        raise InvalidInput("missing whitespace after PGM maxval")
    return width, height, maxval, pos + 1


def read_pgm(path) -> GrayImage:
    """Read a binary PGM (P5) file with maxval 255."""
    with open(path, "rb") as fh:
        data = fh.read()
    width, height, maxval, offset = _parse_pgm_header(data)
    if width < 1 or height < 1:
        raise InvalidInput("PGM dimensions must be >= 1")
    if maxval != 255:
        raise InvalidInput(f"only maxval 255 is supported, got {maxval}")
    n = width * height
    raster = data[offset : offset + n]
    if len(raster) < n:
        raise InvalidInput("PGM pixel data is truncated")
    pixels = np.frombuffer(raster, dtype=np.uint8).astype(np.float64)
    return GrayImage(pixels.reshape(height, width))


def write_pgm(path, img: GrayImage) -> None:
    """Write a GrayImage as binary PGM (P5), rounding to 8-bit."""
    data = np.clip(np.rint(img.pixels), 0, 255).astype(np.uint8)
    header = f"P5\n{img.width} {img.height}\n255\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(data.tobytes())


def read_png(path) -> GrayImage:
    """Read an 8-bit grayscale or RGB PNG (requires Pillow)."""
    if not PNG_SUPPORTED:
        raise InvalidInput(
            "PNG support is not enabled; install the 'png' extra (Pillow)"
        )
    with _PILImage.open(path) as im:
        if im.mode == "L":
            return GrayImage(np.asarray(im, dtype=np.float64))
        if im.mode == "RGB":
            return to_luminance(np.asarray(im))
    raise InvalidInput(f"unsupported PNG mode {im.mode!r}; expected L or RGB")


def read_image(path) -> GrayImage:
    """Read a PGM or PNG file, dispatching on the magic bytes."""
    with open(path, "rb") as fh:
        magic = fh.read(8)
    if magic[:2] == b"P5":
        return read_pgm(path)
    if magic == _PNG_MAGIC:
        return read_png(path)
    raise InvalidInput(f"unrecognized image format in {path}")
