"""Dataset fetch-and-convert scripts feeding the triqet toolkit's loaders."""

from .convert import ConversionError, fetch_and_convert, sha256_of
from .manifests import SourceManifest, builtin_manifest, load_manifest

__all__ = [
    "ConversionError",
    "SourceManifest",
    "builtin_manifest",
    "fetch_and_convert",
    "load_manifest",
    "sha256_of",
]
