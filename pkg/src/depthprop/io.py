"""File formats: KITTI 16-bit depth PNGs, the binary plane container, and
KITTI calibration text.

Depth PNGs follow the depth-completion devkit convention: single-channel
16-bit, meters = raw / 256, raw 0 = no measurement. The plane container is
this package's little-endian format for affinity and confidence planes.
"""

import struct
import zlib
from dataclasses import dataclass

import numpy as np
from PIL import Image, UnidentifiedImageError

from .affinity import AffinityField
from .geometry import CameraIntrinsics
from .validation import as_depth_grid

PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"
PLANE_MAGIC = b"PRFPLN\x00\x01"
MAX_DEPTH_M = 65535 / 256.0  # largest encodable depth


class FormatError(ValueError):
    """A file does not conform to its expected format."""


def _read_png_header(raw, path):
    # Signature + IHDR: length(4) 'IHDR'(4) w(4) h(4) depth(1) color(1)
    # compression(1) filter(1) interlace(1) crc(4).
    if len(raw) < 33:
        raise FormatError(f"{path}: too short to be a PNG file")
    if raw[:8] != PNG_SIGNATURE:
        raise FormatError(f"{path}: not a PNG file (bad signature)")
    length, tag = struct.unpack(">I4s", raw[8:16])
    if tag != b"IHDR" or length != 13:
        raise FormatError(f"{path}: malformed PNG (first chunk is not a valid IHDR)")
    if zlib.crc32(raw[12:29]) != struct.unpack(">I", raw[29:33])[0]:
        raise FormatError(f"{path}: corrupt PNG header (IHDR checksum mismatch)")
    width, height, bit_depth, color_type = struct.unpack(">IIBB", raw[16:26])
    return width, height, bit_depth, color_type


def read_depth_png(path):
    """Read a KITTI-style depth map: 16-bit grayscale PNG, meters = raw / 256."""
    with open(path, "rb") as handle:
        raw = handle.read(33)
    _, _, bit_depth, color_type = _read_png_header(raw, path)
    if bit_depth != 16 or color_type != 0:
        raise FormatError(
            f"{path}: expected 16-bit single-channel PNG, got bit depth "
            f"{bit_depth}, color type {color_type}"
        )
    try:
        with Image.open(path) as img:
            values = np.asarray(img)
    except (UnidentifiedImageError, OSError, SyntaxError) as exc:
        raise FormatError(f"{path}: failed to decode PNG ({exc})") from exc
    if values.ndim != 2:
        raise FormatError(f"{path}: expected a single channel, got shape {values.shape}")
    return (values.astype(np.float32)) / np.float32(256.0)


def write_depth_png(depth, path):
    """Write a depth grid as a 16-bit PNG, raw = round(meters * 256).

    Depths at or beyond the 16-bit ceiling are an error, not a clamp.
    """
    depth = as_depth_grid(depth)
    raw = np.rint(depth.astype(np.float64) * 256.0)
    if np.any(raw > 65535):
        worst = float(depth.max())
        raise ValueError(
            f"depth {worst:.3f} m exceeds the maximum encodable value "
            f"{MAX_DEPTH_M:.3f} m"
        )
    Image.fromarray(raw.astype(np.uint16)).save(path, format="PNG")


def read_image_rgb(path):
    """Read a guidance image as H x W x 3 float32 in [0, 1]."""
    try:
        with Image.open(path) as img:
            rgb = np.asarray(img.convert("RGB"), dtype=np.float32)
    except (UnidentifiedImageError, OSError, SyntaxError) as exc:
        raise FormatError(f"{path}: failed to decode image ({exc})") from exc
    return rgb / np.float32(255.0)


@dataclass(frozen=True)
class PlaneContainer:
    """A stack of same-shaped float32 planes with a fixed binary layout:
    8-byte magic, then height/width/plane count as little-endian uint32,
    then the planes row-major as little-endian IEEE-754 float32."""

    planes: np.ndarray

    def __post_init__(self):
        planes = np.ascontiguousarray(self.planes, dtype=np.float32)
        if planes.ndim != 3 or min(planes.shape) < 1:
            raise ValueError(
                f"planes must be a non-empty (count, H, W) stack, got {planes.shape}"
            )
        if not np.all(np.isfinite(planes)):
            raise ValueError("planes contain non-finite values")
        object.__setattr__(self, "planes", planes)

    @property
    def height(self):
        return self.planes.shape[1]

    @property
    def width(self):
        return self.planes.shape[2]

    @property
    def plane_count(self):
        return self.planes.shape[0]


def write_planes(container, path):
    header = PLANE_MAGIC + struct.pack(
        "<III", container.height, container.width, container.plane_count
    )
    payload = container.planes.astype("<f4").tobytes(order="C")
    with open(path, "wb") as handle:
        handle.write(header)
        handle.write(payload)


def read_planes(path):
    with open(path, "rb") as handle:
        raw = handle.read()
    if len(raw) < 20:
        raise FormatError(f"{path}: truncated plane container (no complete header)")
    if raw[:8] != PLANE_MAGIC:
        raise FormatError(f"{path}: bad magic, not a plane container")
    height, width, count = struct.unpack("<III", raw[8:20])
    if height < 1 or width < 1 or count < 1:
        raise FormatError(f"{path}: invalid dimensions {count}x{height}x{width}")
    expected = 20 + count * height * width * 4
    if len(raw) != expected:
        kind = "truncated" if len(raw) < expected else "oversized"
        raise FormatError(
            f"{path}: {kind} plane container ({len(raw)} bytes, expected {expected})"
        )
    planes = np.frombuffer(raw, dtype="<f4", offset=20).reshape(count, height, width)
    if not np.all(np.isfinite(planes)):
        raise FormatError(f"{path}: plane container holds non-finite values")
    return PlaneContainer(planes=planes.astype(np.float32))


def write_affinity(field, path):
    """Store an affinity field; plane order is the field's neighbor order."""
    write_planes(PlaneContainer(planes=field.planes), path)


def read_affinity(path):
    container = read_planes(path)
    kernel_size = int(round((container.plane_count + 1) ** 0.5))
    if kernel_size * kernel_size - 1 != container.plane_count or kernel_size % 2 == 0:
        raise FormatError(
            f"{path}: {container.plane_count} planes do not form a k*k-1 stencil "
            "for any odd k"
        )
    return AffinityField(kernel_size=kernel_size, planes=container.planes)


def read_kitti_calib(path):
    """Extract pinhole intrinsics from a KITTI calibration file's P2 row.

    The row holds a 3x4 projection matrix in row-major order; fx, u0, fy, v0
    sit at positions 0, 2, 5, 6.
    """
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            tokens = line.split()
            if not tokens or tokens[0].rstrip(":") != "P2":
                continue
            values = tokens[1:]
            if len(values) != 12:
                raise FormatError(
                    f"{path}: P2 row has {len(values)} values, expected 12"
                )
            try:
                row = [float(v) for v in values]
            except ValueError as exc:
                raise FormatError(f"{path}: P2 row holds non-numeric values") from exc
            if row[0] <= 0 or row[5] <= 0:
                raise FormatError(
                    f"{path}: non-positive focal lengths fx={row[0]}, fy={row[5]}"
                )
            return CameraIntrinsics(fx=row[0], fy=row[5], u0=row[2], v0=row[6])
    raise FormatError(f"{path}: no P2 line found")
