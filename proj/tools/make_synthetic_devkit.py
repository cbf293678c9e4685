#!/usr/bin/env python3
# Copyright 2026 The segkit Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Writes structural stand-ins for the devkit label-space files.

Each dataset gets `original` source classes of which exactly `projected`
distinct unified classes are reached. Surplus classes are split between the
unified void class and many-to-one merges onto already-used targets. Class
names are placeholders; the real devkit CSVs use the same format and can be
dropped in instead.
"""

import argparse
import csv
import pathlib
import random

# name, file stem, original classes, projected classes
DATASETS = [
    ("COCO", "coco", 201, 133),
    ("ADE20K", "ade20k", 151, 146),
    ("Cityscapes", "cityscapes", 34, 31),
    ("Vistas", "vistas", 66, 64),
    ("BDD", "bdd", 19, 19),
    ("IDD", "idd", 39, 26),
    ("WildDash2", "wilddash2", 34, 31),
    ("ScanNet", "scannet", 41, 41),
    ("VIPER", "viper", 32, 32),
]

UNIFIED_CLASSES = 256


def unified_name(i):
    return "unlabeled" if i == 0 else "unified_%03d" % i


def write_unified(out):
    with open(out / "unified.csv", "w", newline="\n") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["id", "name"])
        for i in range(UNIFIED_CLASSES):
            w.writerow([i, unified_name(i)])


def write_mapping(out, stem, original, projected):
    rng = random.Random(stem)
    targets = rng.sample(range(1, UNIFIED_CLASSES), projected)
    surplus = original - projected
    to_void = (surplus + 1) // 2
    merged = surplus - to_void
    rows = []
    sid = 0
    for _ in range(to_void):
        name = "unlabeled" if sid == 0 else "%s_%03d" % (stem, sid)
        rows.append((sid, name, 0))
        sid += 1
    for t in targets:
        rows.append((sid, "%s_%03d" % (stem, sid), t))
        sid += 1
    for j in range(merged):
        rows.append((sid, "%s_%03d" % (stem, sid), targets[j % projected]))
        sid += 1
    assert sid == original
    with open(out / (stem + ".csv"), "w", newline="\n") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["source_id", "source_name", "target_id", "target_name"])
        for s, n, t in rows:
            w.writerow([s, n, t, unified_name(t)])


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="data/devkit_synthetic")
    args = ap.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_unified(out)
    for _, stem, original, projected in DATASETS:
        write_mapping(out, stem, original, projected)


if __name__ == "__main__":
    main()
