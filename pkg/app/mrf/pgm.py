"""
Minimal reader for binary PGM (P5) images, 8 or 16 bit.
"""
import logging
from pathlib import Path
from typing import List, Tuple, Union

import numpy as np

from app.errors import ContractViolation

logger = logging.getLogger("mrf.pgm")


def _read_header(data: bytes) -> Tuple[List[int], int]:
    """Parse magic, width, height, maxval; returns the values and the pixel offset."""
    tokens: List[bytes] = []
    pos = 0
    while len(tokens) < 4:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ContractViolation("Truncated PGM header")
        tokens.append(data[start:pos])
    if tokens[0] != b"P5":
        raise ContractViolation(f"Not a binary PGM file (magic {tokens[0]!r})")
    try:
        values = [int(t) for t in tokens[1:]]
    except ValueError:
        raise ContractViolation("Malformed PGM header")
    # exactly one whitespace byte separates the header from the pixels
    return values, pos + 1


def load_pgm(path: Union[str, Path]) -> np.ndarray:
    """Load a P5 image as a float64 (height, width) array of raw intensities."""
    data = Path(path).read_bytes()
    (width, height, maxval), offset = _read_header(data)
    if width < 1 or height < 1 or not 0 < maxval < 65536:
        raise ContractViolation(f"Invalid PGM dimensions {width}x{height} maxval {maxval}")
    dtype = np.dtype(np.uint8) if maxval < 256 else np.dtype(">u2")
    expected = width * height * dtype.itemsize
    pixels = data[offset:offset + expected]
    if len(pixels) < expected:
        raise ContractViolation(f"PGM pixel data truncated ({len(pixels)} of {expected} bytes)")
    image = np.frombuffer(pixels, dtype=dtype).reshape(height, width).astype(np.float64)
    logger.debug(f"Loaded {path}: {width}x{height}, maxval {maxval}")
    return image
