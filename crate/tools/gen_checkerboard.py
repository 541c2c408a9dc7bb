#!/usr/bin/env python3
"""Writes the golden P5 graymap for an alternating bit stream.

The image is 15 pixels wide so consecutive rows start on opposite
phases, giving a checkerboard. Bit 1 maps to 255, bit 0 to 0, row-major.
"""

from pathlib import Path

WIDTH, HEIGHT = 15, 8

header = f"P5\n{WIDTH} {HEIGHT}\n255\n".encode()
pixels = bytes(255 if (r * WIDTH + c) % 2 else 0 for r in range(HEIGHT) for c in range(WIDTH))

out = (
    Path(__file__).resolve().parent.parent
    / "crates"
    / "prngformer"
    / "tests"
    / "data"
    / "checkerboard_15x8.pgm"
)
out.write_bytes(header + pixels)
print(f"wrote {out} ({len(header) + len(pixels)} bytes)")
