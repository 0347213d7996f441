#!/usr/bin/env python3
# Copyright 2026 The lsmrec Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Materialize MovieLens 100K in the original u.data/u.item/u.user layout.

If the GroupLens archive is reachable it is used directly. Otherwise the copy
bundled with the RecBole wheel (identical ratings, slightly reduced item
metadata) is fetched through pip and converted.
"""

import argparse
import io
import pathlib
import subprocess
import sys
import tempfile
import urllib.request
import zipfile

GROUPLENS_URL = "https://files.grouplens.org/datasets/movielens/ml-100k.zip"
GENRES = [
    "unknown", "Action", "Adventure", "Animation", "Children's", "Comedy",
    "Crime", "Documentary", "Drama", "Fantasy", "Film-Noir", "Horror",
    "Musical", "Mystery", "Romance", "Sci-Fi", "Thriller", "War", "Western",
]


def from_grouplens(out: pathlib.Path) -> bool:
    try:
        with urllib.request.urlopen(GROUPLENS_URL, timeout=20) as resp:
            payload = resp.read()
    except OSError:
        return False
    with zipfile.ZipFile(io.BytesIO(payload)) as zf:
        for name in ("u.data", "u.item", "u.user"):
            (out / name).write_bytes(zf.read(f"ml-100k/{name}"))
    return True


def atomic_rows(text: str):
    lines = text.splitlines()
    return [line.split("\t") for line in lines[1:] if line]


def from_recbole(out: pathlib.Path) -> None:
    with tempfile.TemporaryDirectory() as tmp:
        subprocess.run(
            [sys.executable, "-m", "pip", "download", "--no-deps", "-q",
             "-d", tmp, "recbole==1.2.1"],
            check=True)
        wheel = next(pathlib.Path(tmp).glob("recbole-*.whl"))
        with zipfile.ZipFile(wheel) as zf:
            base = "recbole/dataset_example/ml-100k/ml-100k"
            inter = zf.read(base + ".inter").decode("latin-1")
            item = zf.read(base + ".item").decode("latin-1")
            user = zf.read(base + ".user").decode("latin-1")

    with open(out / "u.data", "w", encoding="latin-1", newline="\n") as f:
        for uid, iid, rating, ts in atomic_rows(inter):
            f.write(f"{uid}\t{iid}\t{int(float(rating))}\t{int(float(ts))}\n")

    with open(out / "u.item", "w", encoding="latin-1", newline="\n") as f:
        for iid, title, year, classes in atomic_rows(item):
            labels = set(classes.split())
            flags = "|".join("1" if g in labels else "0" for g in GENRES)
            if year.isdigit():
                f.write(f"{iid}|{title} ({year})|01-Jan-{year}|||{flags}\n")
            else:
                f.write(f"{iid}|unknown||||{flags}\n")

    with open(out / "u.user", "w", encoding="latin-1", newline="\n") as f:
        for uid, age, gender, occupation, zipcode in atomic_rows(user):
            f.write(f"{uid}|{age}|{gender}|{occupation}|{zipcode}\n")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="data/ml-100k")
    args = parser.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if from_grouplens(out):
        print(f"fetched GroupLens archive into {out}")
    else:
        from_recbole(out)
        print(f"converted bundled RecBole copy into {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
