"""Point-splat rasterization of invariant-set approximations.

The writer emits minimal PNG files (8-bit RGB, fixed zlib level) directly, so
identical inputs produce byte-identical images on every platform. This is a
plotting-free renderer on purpose: one pixel per point, white background, one
fixed color per vertex component.
"""

import struct
import zlib

import numpy as np

__all__ = ["PALETTE", "render_bounds", "rasterize", "write_png", "render_attractor"]

# first color per declared vertex, cycling if a system has more components
PALETTE = (
    (31, 119, 180),
    (214, 39, 40),
    (44, 160, 44),
    (148, 103, 189),
    (255, 127, 14),
    (23, 190, 207),
)

_MARGIN = 0.05


def render_bounds(spec):
    """Union of the seed boxes with a 5% margin, as (lo, hi) arrays in 2-d.

    One-dimensional systems render on a horizontal band of fixed height.
    """
    los = np.array([spec.seed_boxes[v].lo for v in spec.graph.vertices])
    his = np.array([spec.seed_boxes[v].hi for v in spec.graph.vertices])
    lo, hi = los.min(axis=0), his.max(axis=0)
    if spec.dimension == 1:
        width = float(hi[0] - lo[0])
        lo = np.array([lo[0], -0.05 * width])
        hi = np.array([hi[0], 0.05 * width])
    pad = _MARGIN * (hi - lo)
    return lo - pad, hi + pad


def rasterize(spec, approx, px=512):
    """Render the clouds to an RGB uint8 array of width px."""
    if px < 16:
        raise ValueError("image width must be at least 16 pixels")
    lo, hi = render_bounds(spec)
    span = hi - lo
    height = max(16, int(round(px * span[1] / span[0])))
    image = np.full((height, px, 3), 255, dtype=np.uint8)
    for k, v in enumerate(spec.graph.vertices):
        color = PALETTE[k % len(PALETTE)]
        pts = approx.cloud(v).points
        if spec.dimension == 1:
            xy = np.column_stack([pts[:, 0], np.zeros(len(pts))])
        else:
            xy = pts
        cols = np.clip(((xy[:, 0] - lo[0]) / span[0] * (px - 1)).round(),
                       0, px - 1).astype(int)
        rows = np.clip(((hi[1] - xy[:, 1]) / span[1] * (height - 1)).round(),
                       0, height - 1).astype(int)
        image[rows, cols] = color
    return image


def _chunk(tag, payload):
    return (struct.pack(">I", len(payload)) + tag + payload
            + struct.pack(">I", zlib.crc32(tag + payload) & 0xFFFFFFFF))


def write_png(image, path):
    """Write an (H, W, 3) uint8 array as an RGB PNG with deterministic bytes."""
    arr = np.ascontiguousarray(image, dtype=np.uint8)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ValueError("expected an (H, W, 3) RGB array")
    height, width = arr.shape[:2]
    raw = b"".join(b"\x00" + arr[row].tobytes() for row in range(height))
    header = struct.pack(">IIBBBBB", width, height, 8, 2, 0, 0, 0)
    payload = (b"\x89PNG\r\n\x1a\n"
               + _chunk(b"IHDR", header)
               + _chunk(b"IDAT", zlib.compress(raw, 6))
               + _chunk(b"IEND", b""))
    with open(path, "wb") as fh:
        fh.write(payload)


def render_attractor(spec, approx, path, px=512):
    """Rasterize and write in one step; returns the image shape."""
    image = rasterize(spec, approx, px=px)
    write_png(image, path)
    return image.shape
