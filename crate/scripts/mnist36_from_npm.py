"""Rebuild data/mnist-36 from the `mnist` npm package (MIT, Juan Cazala).

The package ships MNIST digits as JSON arrays of pixel intensities divided
by 255 and rounded to three decimals; rounding `v * 255` recovers the
original bytes. Only digits 3 and 6 are kept, written as one IDX
image/label pair named like the official training files.

    npm pack mnist@1.1.0 && tar xzf mnist-1.1.0.tgz
    python3 scripts/mnist36_from_npm.py package/src/digits data/mnist-36
"""
import json
import struct
import sys
from pathlib import Path


def main(src: Path, dst: Path) -> None:
    images, labels = [], []
    for digit in (3, 6):
        flat = json.loads((src / f"{digit}.json").read_text())["data"]
        assert len(flat) % 784 == 0
        for i in range(0, len(flat), 784):
            images.append(bytes(round(v * 255) for v in flat[i : i + 784]))
            labels.append(digit)
    dst.mkdir(parents=True, exist_ok=True)
    with open(dst / "train-images-idx3-ubyte", "wb") as f:
        f.write(struct.pack(">IIII", 2051, len(images), 28, 28))
        f.writelines(images)
    with open(dst / "train-labels-idx1-ubyte", "wb") as f:
        f.write(struct.pack(">II", 2049, len(labels)))
        f.write(bytes(labels))
    print(f"wrote {len(images)} images to {dst}")


if __name__ == "__main__":
    main(Path(sys.argv[1]), Path(sys.argv[2]))
