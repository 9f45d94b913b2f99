"""Image dataset ingestion: IDX and CSV readers, box-filter rescaling, binary subsets.

Pixel values are kept in their dataset-native range; the only value
transform ever applied is the multiplicative ``pixel_scale`` from the
dataset spec.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import ConfigError, DataError, DataFormatError

IDX_IMAGES_MAGIC = 0x00000803
IDX_LABELS_MAGIC = 0x00000801
VAL_FRACTION = 0.1  # carved from train when a dataset has no published val split


@dataclass(frozen=True)
class Dataset:
    """Flat feature matrix (one image per row) with integer class labels."""

    features: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        features = np.asarray(self.features, dtype=np.float64)
        labels = np.asarray(self.labels, dtype=np.int64).reshape(-1)
        if features.ndim != 2:
            raise ValueError("features must be a (samples, pixels) matrix")
        if features.shape[0] != labels.shape[0]:
            raise ValueError(
                f"{features.shape[0]} feature rows but {labels.shape[0]} labels"
            )
        if features.size and not np.all(np.isfinite(features)):
            raise ValueError("features must be finite")
        if features.size and features.min() < 0:
            raise ValueError("pixel features must be non-negative")
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def subset(self, rows) -> "Dataset":
        return Dataset(self.features[rows], self.labels[rows])

    def head(self, n: int) -> "Dataset":
        return self.subset(np.arange(min(n, len(self))))

    @classmethod
    def from_samples(cls, samples) -> "Dataset":
        features = np.stack([np.asarray(f, dtype=np.float64).reshape(-1) for f, _ in samples])
        labels = np.array([label for _, label in samples], dtype=np.int64)
        return cls(features, labels)


@dataclass
class DatasetSpec:
    """Where a dataset lives and how to turn it into a binary task."""

    name: str
    source: str
    resolution: int
    class_a: int = 0
    class_b: int = 1
    train_cap: Optional[int] = None
    pixel_scale: float = 1.0

    def __post_init__(self):
        if self.resolution < 2:
            raise ConfigError("resolution must be at least 2")
        if self.class_a == self.class_b:
            raise ConfigError("class_a and class_b must differ")
        if self.train_cap is not None and self.train_cap % 2 != 0:
            raise ConfigError("train_cap must be even (balanced capping)")


def read_idx(path) -> np.ndarray:
    """Parse one big-endian IDX file: images (N, rows, cols) or labels (N,)."""
    path = Path(path)
    data = path.read_bytes()
    if len(data) < 4:
        raise DataFormatError(f"{path}: truncated before magic at byte offset 0")
    magic = int.from_bytes(data[:4], "big")
    if magic == IDX_IMAGES_MAGIC:
        header = 16
        if len(data) < header:
            raise DataFormatError(f"{path}: truncated header at byte offset {len(data)}")
        count, rows, cols = (
            int.from_bytes(data[4:8], "big"),
            int.from_bytes(data[8:12], "big"),
            int.from_bytes(data[12:16], "big"),
        )
        expected = header + count * rows * cols
        if len(data) != expected:
            raise DataFormatError(
                f"{path}: expected {expected} bytes for {count} images of "
                f"{rows}x{cols}, got {len(data)}"
            )
        return np.frombuffer(data, dtype=np.uint8, offset=header).reshape(count, rows, cols)
    if magic == IDX_LABELS_MAGIC:
        header = 8
        if len(data) < header:
            raise DataFormatError(f"{path}: truncated header at byte offset {len(data)}")
        count = int.from_bytes(data[4:8], "big")
        expected = header + count
        if len(data) != expected:
            raise DataFormatError(
                f"{path}: expected {expected} bytes for {count} labels, got {len(data)}"
            )
        return np.frombuffer(data, dtype=np.uint8, offset=header)
    raise DataFormatError(f"{path}: bad IDX magic 0x{magic:08x} at byte offset 0")


def read_idx_pair(images_path, labels_path) -> tuple[np.ndarray, np.ndarray]:
    """Read an images/labels IDX file pair and check the counts agree."""
    images = read_idx(images_path)
    labels = read_idx(labels_path)
    if images.ndim != 3:
        raise DataFormatError(f"{images_path}: expected an IDX3 image file")
    if labels.ndim != 1:
        raise DataFormatError(f"{labels_path}: expected an IDX1 label file")
    if images.shape[0] != labels.shape[0]:
        raise DataFormatError(
            f"{images.shape[0]} images but {labels.shape[0]} labels"
        )
    return images, labels


def read_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Read a ``label,p0,p1,...`` CSV into (features, labels)."""
    path = Path(path)
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None:
            raise DataFormatError(f"{path}: empty file")
        if not header or header[0] != "label":
            raise DataFormatError(f"{path}: header must start with 'label', got {header[:3]}")
        width = len(header)
        if width < 2:
            raise DataFormatError(f"{path}: header has no pixel columns")
        labels = []
        rows = []
        for number, row in enumerate(reader, start=2):
            if len(row) != width:
                raise DataFormatError(
                    f"{path}: row {number} has {len(row)} columns, expected {width}"
                )
            try:
                values = [float(cell) for cell in row]
            except ValueError:
                bad = next(i for i, cell in enumerate(row) if not _is_number(cell))
                raise DataFormatError(
                    f"{path}: row {number}, column {bad}: non-numeric value {row[bad]!r}"
                ) from None
            if not values[0].is_integer():
                raise DataFormatError(
                    f"{path}: row {number}: label {row[0]!r} is not an integer"
                )
            labels.append(int(values[0]))
            rows.append(values[1:])
    if not rows:
        raise DataFormatError(f"{path}: no data rows")
    return np.asarray(rows, dtype=np.float64), np.asarray(labels, dtype=np.int64)


def _is_number(cell: str) -> bool:
    try:
        float(cell)
        return True
    except ValueError:
        return False


def write_csv(path, features, labels) -> None:
    """Write the ``label,p0,...`` dialect read back by :func:`read_csv`."""
    features = np.asarray(features)
    labels = np.asarray(labels)
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["label"] + [f"p{i}" for i in range(features.shape[1])])
        for row, label in zip(features, labels):
            writer.writerow([int(label)] + [repr(float(v)) for v in row])


def _box_weights(n_in: int, n_out: int) -> np.ndarray:
    """Row-stochastic overlap weights mapping n_in pixels onto n_out cells."""
    weights = np.zeros((n_out, n_in))
    scale = n_in / n_out
    for out in range(n_out):
        lo, hi = out * scale, (out + 1) * scale
        for i in range(int(math.floor(lo)), min(int(math.ceil(hi)), n_in)):
            weights[out, i] = (min(hi, i + 1) - max(lo, i)) / scale
    return weights


def resize(image, d: int) -> np.ndarray:
    """Box (area-averaging) resample of a 2-D image to d x d pixels."""
    if d < 1:
        raise ValueError("target resolution must be positive")
    image = np.asarray(image, dtype=np.float64)
    if image.ndim != 2:
        raise ValueError("resize expects a 2-D pixel grid")
    if image.shape == (d, d):
        return image.copy()
    return _box_weights(image.shape[0], d) @ image @ _box_weights(image.shape[1], d).T


def resize_batch(images, d: int) -> np.ndarray:
    images = np.asarray(images, dtype=np.float64)
    if images.shape[1:] == (d, d):
        return images.copy()
    w_rows = _box_weights(images.shape[1], d)
    w_cols = _box_weights(images.shape[2], d)
    return np.einsum("or,nrc,pc->nop", w_rows, images, w_cols)


def _filter_binary(split: Dataset, class_a: int, class_b: int, split_name: str) -> Dataset:
    mask_a = split.labels == class_a
    mask_b = split.labels == class_b
    if not mask_a.any():
        raise DataError(f"{split_name} split has no samples of class {class_a}")
    if not mask_b.any():
        raise DataError(f"{split_name} split has no samples of class {class_b}")
    keep = mask_a | mask_b
    features = split.features[keep]
    labels = np.where(split.labels[keep] == class_b, 1, 0)
    return Dataset(features, labels)


def binary_subset(
    splits: dict[str, Dataset], spec: DatasetSpec, seed: int = 0
) -> tuple[Dataset, Dataset, Dataset]:
    """Restrict to the two spec classes (relabeled 0/1), cap, and split.

    Published train/val/test partitions are preserved; when no val split
    exists a seeded 10% of train is carved out. ``train_cap`` takes a seeded
    balanced subsample of the training split after the val carve.
    """
    if "train" not in splits or "test" not in splits:
        raise DataError("need at least 'train' and 'test' splits")
    train = _filter_binary(splits["train"], spec.class_a, spec.class_b, "train")
    test = _filter_binary(splits["test"], spec.class_a, spec.class_b, "test")
    rng = np.random.default_rng(seed)
    if "val" in splits:
        val = _filter_binary(splits["val"], spec.class_a, spec.class_b, "val")
    else:
        order = rng.permutation(len(train))
        n_val = max(1, int(round(VAL_FRACTION * len(train))))
        val = train.subset(np.sort(order[:n_val]))
        train = train.subset(np.sort(order[n_val:]))
    if spec.train_cap is not None:
        per_class = spec.train_cap // 2
        picked = []
        for label in (0, 1):
            rows = np.flatnonzero(train.labels == label)
            if rows.size < per_class:
                raise DataError(
                    f"train_cap wants {per_class} samples of class {label}, "
                    f"only {rows.size} available"
                )
            picked.append(rng.choice(rows, size=per_class, replace=False))
        train = train.subset(np.sort(np.concatenate(picked)))
    return train, val, test


MNIST_FILES = {
    "train": ("train-images-idx3-ubyte", "train-labels-idx1-ubyte"),
    "test": ("t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte"),
}


def _load_splits(spec: DatasetSpec) -> dict[str, Dataset]:
    """Load raw splits from ``spec.source``: `{name}_{split}.csv` files or MNIST IDX."""
    source = Path(spec.source)
    splits: dict[str, Dataset] = {}
    csv_train = source / f"{spec.name}_train.csv"
    if csv_train.exists():
        for split in ("train", "val", "test"):
            path = source / f"{spec.name}_{split}.csv"
            if path.exists():
                features, labels = read_csv(path)
                side = math.isqrt(features.shape[1])
                if side * side != features.shape[1]:
                    raise DataFormatError(
                        f"{path}: {features.shape[1]} pixel columns is not a square image"
                    )
                images = features.reshape(-1, side, side)
                flat = resize_batch(images, spec.resolution).reshape(len(labels), -1)
                splits[split] = Dataset(flat * spec.pixel_scale, labels)
        if "test" not in splits:
            raise DataError(f"{source}: found {csv_train.name} but no test CSV")
        return splits
    if (source / MNIST_FILES["train"][0]).exists():
        for split, (images_name, labels_name) in MNIST_FILES.items():
            images, labels = read_idx_pair(source / images_name, source / labels_name)
            flat = resize_batch(images.astype(np.float64), spec.resolution)
            splits[split] = Dataset(
                flat.reshape(len(labels), -1) * spec.pixel_scale,
                labels.astype(np.int64),
            )
        return splits
    raise DataError(
        f"{source}: no '{spec.name}_train.csv' and no MNIST IDX files found"
    )


def load_dataset(spec: DatasetSpec, seed: int = 0) -> tuple[Dataset, Dataset, Dataset]:
    """Read, rescale, and binarize a dataset into (train, val, test)."""
    return binary_subset(_load_splits(spec), spec, seed=seed)
