"""Data ingestion and the raw tensor interchange format.

Raw format (little-endian throughout):

    bytes 0-3   magic b"VTT3"
    bytes 4-7   format version, uint32 (currently 1)
    bytes 8-31  dims m, n, p as three uint64
    then        m*n*p float64 values, slice-major: for each frontal
                slice k = 0..p-1, the m x n slice in row-major order

Images decode through Pillow (PNG/PPM/BMP class formats); a gray video
is a directory of frame images, a multispectral image a directory of
band images, both ordered by sorted filename.  All ingested data is
normalized to [0, 1].
"""

import struct
from pathlib import Path

import numpy as np

MAGIC = b"VTT3"
VERSION = 1

KINDS = ("color-image", "gray-video", "multispectral", "raw-tensor")


class IngestError(ValueError):
    """Input file unreadable or not in a supported format."""


def write_raw(path, C: np.ndarray) -> None:
    C = np.asarray(C, dtype=np.float64)
    if C.ndim != 3:
        raise ValueError("expected a 3-D tensor")
    m, n, p = C.shape
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", VERSION))
        fh.write(struct.pack("<QQQ", m, n, p))
        # slice-major: transpose to (p, m, n) so each slice is contiguous
        fh.write(np.ascontiguousarray(np.moveaxis(C, 2, 0)).tobytes())


def read_raw(path) -> np.ndarray:
    with open(path, "rb") as fh:
        header = fh.read(32)
        if len(header) < 32 or header[:4] != MAGIC:
            raise IngestError(f"{path}: not a raw tensor file")
        (version,) = struct.unpack("<I", header[4:8])
        if version != VERSION:
            raise IngestError(f"{path}: unsupported raw tensor version {version}")
        m, n, p = struct.unpack("<QQQ", header[8:32])
        data = np.frombuffer(fh.read(), dtype="<f8")
    if data.size != m * n * p:
        raise IngestError(f"{path}: expected {m * n * p} values, found {data.size}")
    return np.moveaxis(data.reshape(p, m, n), 0, 2).copy()


def _load_image(path) -> np.ndarray:
    from PIL import Image, UnidentifiedImageError

    try:
        with Image.open(path) as img:
            arr = np.asarray(img)
    except (UnidentifiedImageError, OSError) as exc:
        raise IngestError(f"{path}: {exc}") from exc
    if arr.dtype == np.uint8:
        return arr.astype(float) / 255.0
    if arr.dtype == np.uint16:
        return arr.astype(float) / 65535.0
    raise IngestError(f"{path}: unsupported bit depth {arr.dtype}")


def _frame_paths(directory: Path) -> list:
    paths = sorted(x for x in directory.iterdir() if x.is_file())
    if not paths:
        raise IngestError(f"{directory}: no frame files")
    return paths


def ingest(path, kind: str) -> np.ndarray:
    """Load data as an (m, n, p) tensor with entries in [0, 1].

    color-image: one RGB image, p = 3.  gray-video / multispectral: a
    directory of grayscale frames or bands, p = file count.
    raw-tensor: the interchange format above.
    """
    path = Path(path)
    if not path.exists():
        raise IngestError(f"{path}: no such file or directory")
    if kind == "raw-tensor":
        return read_raw(path)
    if kind == "color-image":
        arr = _load_image(path)
        if arr.ndim != 3 or arr.shape[2] < 3:
            raise IngestError(f"{path}: expected an RGB image")
        return np.ascontiguousarray(arr[:, :, :3])
    if kind in ("gray-video", "multispectral"):
        if not path.is_dir():
            raise IngestError(f"{path}: expected a directory of frames")
        frames = []
        for fp in _frame_paths(path):
            arr = _load_image(fp)
            if arr.ndim == 3:  # collapse RGB frames by channel mean
                arr = arr.mean(axis=2)
            frames.append(arr)
        shapes = {f.shape for f in frames}
        if len(shapes) != 1:
            raise IngestError(f"{path}: frames differ in size: {sorted(shapes)}")
        return np.stack(frames, axis=2)
    raise IngestError(f"unknown data kind {kind!r}")
