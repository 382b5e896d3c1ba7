#!/usr/bin/env python3
"""Convert the digits bundled in the npm `mnist` package into IDX files.

The package ships 10000 MNIST digits as JSON arrays of pixel intensities in
[0, 1] (three decimals).  This writes gzip-compressed
train-images-idx3-ubyte.gz / train-labels-idx1-ubyte.gz into OUT_DIR, with
digits interleaved round-robin by class so the file is not label-sorted.

usage: mnist_from_npm.py PACKAGE_DIR_OR_TGZ OUT_DIR
"""
import gzip
import json
import struct
import sys
import tarfile
from pathlib import Path


def load_digits(src: Path):
    digits = []
    if src.is_file():
        with tarfile.open(src) as tar:
            for d in range(10):
                f = tar.extractfile(f"package/src/digits/{d}.json")
                digits.append(json.load(f)["data"])
    else:
        for d in range(10):
            digits.append(json.loads((src / "src" / "digits" / f"{d}.json").read_text())["data"])
    return digits


def main() -> int:
    if len(sys.argv) != 3:
        print(__doc__, file=sys.stderr)
        return 1
    digits = load_digits(Path(sys.argv[1]))
    out = Path(sys.argv[2])
    out.mkdir(parents=True, exist_ok=True)

    per_class = [[raw[i * 784:(i + 1) * 784] for i in range(len(raw) // 784)] for raw in digits]
    images, labels = [], []
    for i in range(max(len(c) for c in per_class)):
        for label, c in enumerate(per_class):
            if i < len(c):
                images.append(bytes(min(255, max(0, round(v * 255))) for v in c[i]))
                labels.append(label)

    with gzip.GzipFile(out / "train-images-idx3-ubyte.gz", "wb", mtime=0) as f:
        f.write(struct.pack(">IIII", 0x803, len(images), 28, 28))
        for img in images:
            f.write(img)
    with gzip.GzipFile(out / "train-labels-idx1-ubyte.gz", "wb", mtime=0) as f:
        f.write(struct.pack(">II", 0x801, len(labels)))
        f.write(bytes(labels))
    print(f"wrote {len(images)} images to {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
