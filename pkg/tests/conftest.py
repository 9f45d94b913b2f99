"""Shared fixtures.

The 8x8 binary digit task used by the slower end-to-end tests comes from
real MNIST when TRIQET_MNIST_DIR points at the raw IDX files; otherwise it
falls back to the committed 8x8 handwritten-digits CSV fixture (classic
0-16 digits set), which exercises exactly the same pipeline.
"""

import os
from pathlib import Path

import pytest

from triqet.datasets import DatasetSpec, load_dataset

FIXTURES = Path(__file__).parent / "fixtures"


def eight_by_eight_spec() -> tuple[DatasetSpec, str]:
    mnist_dir = os.environ.get("TRIQET_MNIST_DIR", "")
    if mnist_dir and (Path(mnist_dir) / "train-images-idx3-ubyte").exists():
        return DatasetSpec("mnist01", mnist_dir, resolution=8, pixel_scale=1 / 255), "mnist01"
    return DatasetSpec("digits", str(FIXTURES), resolution=8, pixel_scale=1 / 16), "digits01"


@pytest.fixture(scope="session")
def task8():
    """(train, val, test) datasets plus a label naming the source."""
    spec, label = eight_by_eight_spec()
    train, val, test = load_dataset(spec, seed=0)
    return train, val, test, label


@pytest.fixture(scope="session")
def digits_fixture_dir() -> Path:
    return FIXTURES
