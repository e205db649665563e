#!/usr/bin/env python3
# Copyright 2026 The OnlineBoost Authors. All Rights Reserved.
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#     http://www.apache.org/licenses/LICENSE-2.0
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Builds data/*.csv (label first, no header) for Optdigits, Pendigits and Letter.

The UCI originals (CC BY 4.0) are taken from the KEEL copies bundled in the
keel-ds wheel on PyPI. Optdigits keeps the UCI row order, so its first rows
form the official training split. The Pendigits rows are shuffled, so its
split by position is a random one and shares writers between train and test.
Letter uses the customary first 15000 / last 5000 rows.
"""
import argparse
import pathlib
import subprocess
import sys
import tempfile
import zipfile

WHEEL = "keel-ds==0.2.5"
# name in the wheel, output prefix, number of training rows
SETS = [
    ("optdigits", "optdigits", 3823),
    ("penbased", "pendigits", 7494),
    ("letter", "letter", 15000),
]


def parse_label(tok):
    tok = tok.strip()
    if tok.isalpha():
        return ord(tok.upper()) - ord("A")
    return int(tok)


def convert(lines):
    rows = []
    for line in lines:
        line = line.strip()
        if not line or line.startswith("@"):
            continue
        toks = [t.strip() for t in line.split(",")]
        rows.append([str(parse_label(toks[-1]))] + toks[:-1])
    return rows


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent / "data"))
    ap.add_argument("--wheel", help="path to an already downloaded keel-ds wheel")
    args = ap.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    wheel = args.wheel
    if wheel is None:
        tmp = tempfile.mkdtemp()
        subprocess.check_call([sys.executable, "-m", "pip", "download", "--no-deps", WHEEL, "-d", tmp])
        wheel = str(next(pathlib.Path(tmp).glob("*.whl")))
    with zipfile.ZipFile(wheel) as z:
        for src, dst, n_train in SETS:
            text = z.read(f"keel_ds/data/balanced/raw/{src}.dat").decode()
            rows = convert(text.splitlines())
            for part, chunk in (("train", rows[:n_train]), ("test", rows[n_train:])):
                path = out / f"{dst}.{part}.csv"
                path.write_text("".join(",".join(r) + "\n" for r in chunk))
                print(f"{path}: {len(chunk)} rows")


if __name__ == "__main__":
    main()
