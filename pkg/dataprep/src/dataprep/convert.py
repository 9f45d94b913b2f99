"""Archive-to-CSV conversion with checksum gating and atomic writes.

Output dialect is `label,p0,p1,...` per row, one file per split, named
`{dataset}_{split}.csv` — exactly what the toolkit's CSV reader ingests.
Grayscale uint8 pixels are written as integers (lossless); color images are
collapsed to grayscale first by averaging the channels.
"""

from __future__ import annotations

import gzip
import hashlib
import os
import tempfile
import urllib.request
from pathlib import Path

import numpy as np

from .manifests import SourceManifest


class ConversionError(RuntimeError):
    pass


def sha256_of(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _obtain(manifest: SourceManifest, label: str, work_dir: Path, source_dir) -> Path:
    """Find the archive locally or download it; returns the local path."""
    url = manifest.urls[label]
    filename = url.rsplit("/", 1)[-1].split("?")[0]
    if source_dir is not None:
        local = Path(source_dir) / filename
        if not local.exists():
            raise ConversionError(f"archive {filename} not found under {source_dir}")
        return local
    target = work_dir / filename
    urllib.request.urlretrieve(url, target)
    return target


def _verify(manifest: SourceManifest, label: str, path: Path, allow_unverified: bool) -> None:
    expected = manifest.checksums.get(label)
    if expected is None:
        if allow_unverified:
            return
        raise ConversionError(
            f"no sha256 pinned for archive {label!r}; pass --sha256 or --allow-unverified"
        )
    actual = sha256_of(path)
    if actual != expected.lower():
        raise ConversionError(
            f"checksum mismatch for {path.name}: expected {expected}, got {actual}"
        )


def _to_grayscale(images: np.ndarray) -> np.ndarray:
    if images.ndim == 3:
        return images.astype(np.float64)
    if images.ndim == 4 and images.shape[-1] == 3:
        return images.astype(np.float64).mean(axis=-1)
    raise ConversionError(f"unsupported image array shape {images.shape}")


def _format_pixel(value: float) -> str:
    if float(value).is_integer():
        return str(int(value))
    return repr(float(value))


def _write_split_csv(out_dir: Path, dataset: str, split: str, images: np.ndarray, labels: np.ndarray) -> Path:
    """Write one split atomically: temp file in out_dir, then rename."""
    flat = _to_grayscale(images).reshape(images.shape[0], -1)
    labels = np.asarray(labels).reshape(len(labels), -1)[:, 0]
    final = out_dir / f"{dataset}_{split}.csv"
    descriptor, temp_name = tempfile.mkstemp(dir=out_dir, suffix=".tmp")
    try:
        with os.fdopen(descriptor, "w", newline="") as handle:
            handle.write("label," + ",".join(f"p{i}" for i in range(flat.shape[1])) + "\n")
            for label, row in zip(labels, flat):
                handle.write(str(int(label)) + "," + ",".join(_format_pixel(v) for v in row) + "\n")
        os.replace(temp_name, final)
    except BaseException:
        if os.path.exists(temp_name):
            os.unlink(temp_name)
        raise
    return final


def _read_idx_gz(path: Path) -> np.ndarray:
    with gzip.open(path, "rb") as handle:
        data = handle.read()
    magic = int.from_bytes(data[:4], "big")
    if magic == 0x803:
        count, rows, cols = (
            int.from_bytes(data[4:8], "big"),
            int.from_bytes(data[8:12], "big"),
            int.from_bytes(data[12:16], "big"),
        )
        if len(data) != 16 + count * rows * cols:
            raise ConversionError(f"{path.name}: truncated IDX3 payload")
        return np.frombuffer(data, np.uint8, offset=16).reshape(count, rows, cols)
    if magic == 0x801:
        count = int.from_bytes(data[4:8], "big")
        if len(data) != 8 + count:
            raise ConversionError(f"{path.name}: truncated IDX1 payload")
        return np.frombuffer(data, np.uint8, offset=8)
    raise ConversionError(f"{path.name}: bad IDX magic 0x{magic:08x}")


def _convert_mnist(manifest: SourceManifest, archives: dict[str, Path], out_dir: Path) -> list[Path]:
    written = []
    pairs = {"train": ("train-images", "train-labels"), "test": ("test-images", "test-labels")}
    for split in manifest.splits:
        if split not in pairs:
            raise ConversionError(f"mnist has no split {split!r}")
        images_label, labels_label = pairs[split]
        images = _read_idx_gz(archives[images_label])
        labels = _read_idx_gz(archives[labels_label])
        if images.shape[0] != labels.shape[0]:
            raise ConversionError(f"{split}: {images.shape[0]} images vs {labels.shape[0]} labels")
        written.append(_write_split_csv(out_dir, manifest.name, split, images, labels))
    return written


def _convert_medmnist(manifest: SourceManifest, archives: dict[str, Path], out_dir: Path) -> list[Path]:
    (archive_path,) = archives.values()
    with np.load(archive_path) as bundle:
        written = []
        for split in manifest.splits:
            images_key, labels_key = f"{split}_images", f"{split}_labels"
            if images_key not in bundle or labels_key not in bundle:
                raise ConversionError(f"{archive_path.name}: missing split {split!r}")
            written.append(
                _write_split_csv(out_dir, manifest.name, split, bundle[images_key], bundle[labels_key])
            )
    return written


def fetch_and_convert(
    manifest: SourceManifest,
    out_dir,
    source_dir=None,
    allow_unverified: bool = False,
) -> list[Path]:
    """Obtain, verify, and convert every archive of a manifest into split CSVs."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as scratch:
        archives = {}
        for label in manifest.archives():
            path = _obtain(manifest, label, Path(scratch), source_dir)
            _verify(manifest, label, path, allow_unverified)
            archives[label] = path
        if manifest.kind == "mnist-idx":
            return _convert_mnist(manifest, archives, out_dir)
        if manifest.kind == "medmnist-npz":
            return _convert_medmnist(manifest, archives, out_dir)
        raise ConversionError(f"unknown manifest kind {manifest.kind!r}")
