"""Runs `cmsum gplot` on the gamma/Poisson fixture and checks the CSV and sidecar."""

import csv
import json
import subprocess
import sys
from pathlib import Path


def main() -> int:
    cmsum, fixtures, out = sys.argv[1], Path(sys.argv[2]), Path(sys.argv[3])
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "gplot_check.csv"
    sidecar = out / "gplot_check.csv.crossings.json"
    subprocess.run([cmsum, "gplot", str(fixtures / "example2.json"), "--points", "501", "--out", str(csv_path)],
                   check=True)

    with csv_path.open(newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["u", "g", "is_breakpoint"], rows[0]
    body = rows[1:]
    assert len(body) >= 501, len(body)
    us = [float(r[0]) for r in body]
    assert all(b >= a for a, b in zip(us, us[1:])), "u column is not sorted"
    assert all(r[2] in ("0", "1") for r in body)
    assert any(r[2] == "1" for r in body), "no breakpoints marked"

    side = json.loads(sidecar.read_text())
    cs = side["levels"][0]["crossing_set"]
    assert cs["n"] == 12, cs["n"]
    jumps = [i + 1 for i, p in enumerate(cs["points"]) if p["is_jump"]]
    assert jumps == [1, 3, 5, 7, 9, 11], jumps
    print("gplot outputs ok")
    return 0


if __name__ == "__main__":
    sys.exit(main())
