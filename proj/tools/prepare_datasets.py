#!/usr/bin/env python3
"""Convert raw UCI-style dataset files into the CSV layout the acceptance
run reads: no header, features first, label in the last column.

Looks for these files under --raw (any subset):

  sonar.all-data | sonar.dat (KEEL)   -> sonar.csv
  waveform-+noise.data | waveform-5000.csv
                                      -> waveform-5000.csv
  semeion.data                        -> semeion.csv (one-hot -> digit)
  CNAE-9.data                         -> cnae-9.csv (label moved last)
  gisette_train.data + .labels, gisette_valid.data + .labels
                                      -> gisette.csv (7000 records)

Writes SHA256SUMS for the produced files next to them and prints the hash of
every raw input used.
"""

import argparse
import csv
import hashlib
import sys
from pathlib import Path


def sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def is_number(text):
    try:
        float(text)
        return True
    except ValueError:
        return False


def write_rows(path, rows):
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        count = 0
        for row in rows:
            writer.writerow(row)
            count += 1
    return count


def read_csv_rows(path):
    with open(path, newline="") as f:
        for row in csv.reader(f):
            row = [c.strip() for c in row]
            if row and row[0].startswith("@"):  # KEEL header lines
                continue
            if row and any(row):
                yield row


def sonar(raw):
    return read_csv_rows(first_existing(raw, "sonar.all-data|sonar.dat"))


def waveform(raw):
    src = raw / "waveform-+noise.data"
    if not src.exists():
        src = raw / "waveform-5000.csv"
    rows = read_csv_rows(src)
    for row in rows:
        if not is_number(row[0]):  # header line of the csv variant
            continue
        yield row


def semeion(raw):
    with open(raw / "semeion.data") as f:
        for line in f:
            values = line.split()
            if not values:
                continue
            if len(values) != 266:
                sys.exit(f"semeion.data: expected 266 values per line, got {len(values)}")
            onehot = [int(float(v)) for v in values[256:]]
            if sum(onehot) != 1:
                sys.exit("semeion.data: label block is not one-hot")
            yield values[:256] + [str(onehot.index(1))]


def cnae(raw):
    for row in read_csv_rows(raw / "CNAE-9.data"):
        yield row[1:] + [row[0]]


def gisette(raw):
    for part in ("train", "valid"):
        data = raw / f"gisette_{part}.data"
        labels = raw / f"gisette_{part}.labels"
        with open(data) as fd, open(labels) as fl:
            for line, label in zip(fd, fl):
                yield line.split() + [label.strip()]


DATASETS = [
    ("sonar.csv", ["sonar.all-data|sonar.dat"], sonar),
    ("waveform-5000.csv", ["waveform-+noise.data|waveform-5000.csv"], waveform),
    ("semeion.csv", ["semeion.data"], semeion),
    ("cnae-9.csv", ["CNAE-9.data"], cnae),
    ("gisette.csv", ["gisette_train.data", "gisette_train.labels", "gisette_valid.data", "gisette_valid.labels"],
     gisette),
]


def first_existing(raw, alternatives):
    for name in alternatives.split("|"):
        if (raw / name).exists():
            return raw / name
    return None


def main():
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--raw", type=Path, required=True, help="directory holding the downloaded files")
    parser.add_argument("--out", type=Path, default=Path(__file__).resolve().parent.parent / "data")
    args = parser.parse_args()

    args.out.mkdir(parents=True, exist_ok=True)
    produced = []
    for target, inputs, convert in DATASETS:
        sources = [first_existing(args.raw, name) for name in inputs]
        if any(s is None for s in sources):
            print(f"skip {target}: missing {', '.join(n for n, s in zip(inputs, sources) if s is None)}")
            continue
        for s in sources:
            print(f"raw  {sha256(s)}  {s.name}")
        count = write_rows(args.out / target, convert(args.raw))
        print(f"wrote {target}: {count} records")
        produced.append(target)

    if not produced:
        print("nothing converted")
        return 1
    manifest = args.out / "SHA256SUMS"
    entries = {}
    if manifest.exists():
        for line in manifest.read_text().splitlines():
            parts = line.split()
            if len(parts) == 2 and not line.startswith("#"):
                entries[parts[1].lstrip("*")] = parts[0]
    for name in produced:
        entries[name] = sha256(args.out / name)
    manifest.write_text("".join(f"{h}  {n}\n" for n, h in sorted(entries.items())))
    print(f"updated {manifest}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
