#!/usr/bin/env python3
"""Build a small MNIST subset in IDX format from the 5,000-digit sample that
ships inside the mlxtend wheel (rows are 784 pixels followed by the label).

Each class contributes its first 400 samples to the train split and the
remaining 100 to the test split; classes are interleaved round-robin.

    python3 tools/make_mnist_subset.py data/mnist
"""
import gzip
import io
import os
import struct
import subprocess
import sys
import tempfile
import zipfile

import numpy as np

CSV_IN_WHEEL = "mlxtend/data/data/mnist_5k.csv.gz"
TRAIN_PER_CLASS = 400


def fetch_csv() -> bytes:
    with tempfile.TemporaryDirectory() as tmp:
        subprocess.check_call(
            [sys.executable, "-m", "pip", "download", "--no-deps", "-q",
             "-d", tmp, "mlxtend==0.24.0"])
        wheel = next(f for f in os.listdir(tmp) if f.endswith(".whl"))
        with zipfile.ZipFile(os.path.join(tmp, wheel)) as z:
            return gzip.decompress(z.read(CSV_IN_WHEEL))


def write_idx(out_dir, prefix, images, labels):
    with open(os.path.join(out_dir, f"{prefix}-images-idx3-ubyte"), "wb") as f:
        f.write(struct.pack(">IIII", 0x00000803, len(images), 28, 28))
        f.write(images.astype(np.uint8).tobytes())
    with open(os.path.join(out_dir, f"{prefix}-labels-idx1-ubyte"), "wb") as f:
        f.write(struct.pack(">II", 0x00000801, len(labels)))
        f.write(labels.astype(np.uint8).tobytes())


def interleave(rows_by_class):
    out = []
    for i in range(max(len(r) for r in rows_by_class)):
        out.extend(r[i] for r in rows_by_class if i < len(r))
    return np.array(out)


def main():
    out_dir = sys.argv[1] if len(sys.argv) > 1 else "data/mnist"
    os.makedirs(out_dir, exist_ok=True)
    data = np.loadtxt(io.BytesIO(fetch_csv()), delimiter=",").astype(np.int64)
    by_class = [data[data[:, -1] == d] for d in range(10)]
    train = interleave([c[:TRAIN_PER_CLASS] for c in by_class])
    test = interleave([c[TRAIN_PER_CLASS:] for c in by_class])
    write_idx(out_dir, "train", train[:, :-1], train[:, -1])
    write_idx(out_dir, "t10k", test[:, :-1], test[:, -1])
    print(f"wrote {len(train)} train / {len(test)} test images to {out_dir}")


if __name__ == "__main__":
    main()
