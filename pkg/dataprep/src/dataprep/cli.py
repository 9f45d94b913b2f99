"""dataprep <dataset> --out DIR: convert a dataset release into split CSVs."""

from __future__ import annotations

import argparse
import sys

from .convert import ConversionError, fetch_and_convert
from .manifests import builtin_manifest, load_manifest


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="dataprep", description=__doc__)
    parser.add_argument("dataset", help="mnist, chest, breast, oct, tissue, pneumonia, organa, organc, organs")
    parser.add_argument("--out", required=True, help="directory for the split CSVs")
    parser.add_argument("--source", default=None, help="directory holding already-downloaded archives")
    parser.add_argument("--manifest", default=None, help="manifest JSON overriding the built-in table")
    parser.add_argument(
        "--sha256",
        action="append",
        default=[],
        metavar="LABEL=HEX",
        help="pin an archive checksum (repeatable), e.g. train-images=abc123...",
    )
    parser.add_argument("--allow-unverified", action="store_true", help="convert without checksum pins")
    args = parser.parse_args(argv)

    try:
        manifest = load_manifest(args.manifest) if args.manifest else builtin_manifest(args.dataset)
        for pin in args.sha256:
            label, _, value = pin.partition("=")
            if not value:
                raise ConversionError(f"--sha256 needs LABEL=HEX, got {pin!r}")
            if label not in manifest.urls:
                raise ConversionError(f"unknown archive label {label!r}; have {sorted(manifest.urls)}")
            manifest.checksums[label] = value
        written = fetch_and_convert(
            manifest, args.out, source_dir=args.source, allow_unverified=args.allow_unverified
        )
    except (ConversionError, KeyError, OSError) as exc:
        print(f"dataprep: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
