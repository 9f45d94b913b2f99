"""Source manifests: where each dataset release lives and how to verify it.

The built-in table carries the canonical download URLs. A sha256 checksum is
required before anything is converted; pin one per archive with --sha256 or
a manifest JSON file (the upstream projects publish them), or pass
--allow-unverified to skip the gate deliberately.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field


@dataclass
class SourceManifest:
    name: str
    kind: str  # "mnist-idx" or "medmnist-npz"
    urls: dict[str, str]  # archive label -> download URL
    checksums: dict[str, str] = field(default_factory=dict)  # archive label -> sha256
    splits: tuple[str, ...] = ("train", "test")

    def archives(self) -> list[str]:
        return list(self.urls)


_MNIST_BASE = "https://ossci-datasets.s3.amazonaws.com/mnist"
_MEDMNIST_BASE = "https://zenodo.org/record/6496656/files"

_MEDMNIST_TASKS = {
    "chest": "chestmnist",
    "breast": "breastmnist",
    "oct": "octmnist",
    "tissue": "tissuemnist",
    "pneumonia": "pneumoniamnist",
    "organa": "organamnist",
    "organc": "organcmnist",
    "organs": "organsmnist",
}


def builtin_manifest(name: str) -> SourceManifest:
    if name == "mnist":
        return SourceManifest(
            name="mnist",
            kind="mnist-idx",
            urls={
                "train-images": f"{_MNIST_BASE}/train-images-idx3-ubyte.gz",
                "train-labels": f"{_MNIST_BASE}/train-labels-idx1-ubyte.gz",
                "test-images": f"{_MNIST_BASE}/t10k-images-idx3-ubyte.gz",
                "test-labels": f"{_MNIST_BASE}/t10k-labels-idx1-ubyte.gz",
            },
            splits=("train", "test"),
        )
    if name in _MEDMNIST_TASKS:
        archive = _MEDMNIST_TASKS[name]
        return SourceManifest(
            name=name,
            kind="medmnist-npz",
            urls={archive: f"{_MEDMNIST_BASE}/{archive}.npz?download=1"},
            splits=("train", "val", "test"),
        )
    known = ["mnist"] + sorted(_MEDMNIST_TASKS)
    raise KeyError(f"unknown dataset {name!r}; known: {', '.join(known)}")


def load_manifest(path) -> SourceManifest:
    with open(path) as handle:
        doc = json.load(handle)
    return SourceManifest(
        name=doc["name"],
        kind=doc["kind"],
        urls=dict(doc["urls"]),
        checksums=dict(doc.get("checksums", {})),
        splits=tuple(doc.get("splits", ("train", "test"))),
    )
