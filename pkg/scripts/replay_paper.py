"""Run the full replay with the checked-in config and print its SHA-256.

    python3 scripts/replay_paper.py [--write-fixture]
"""
import argparse
import hashlib
import io
import sys
import time
from pathlib import Path

from econo.cli import run

ROOT = Path(__file__).resolve().parents[1]
FIXTURE = ROOT / "tests" / "fixtures" / "replay_paper.sha256"


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--write-fixture", action="store_true")
    args = ap.parse_args()
    buf = io.StringIO()
    t0 = time.perf_counter()
    rc = run(["replay-paper", "--config", str(ROOT / "configs" / "paper.ini")], stdout=buf)
    elapsed = time.perf_counter() - t0
    if rc:
        sys.exit(rc)
    digest = hashlib.sha256(buf.getvalue().encode("utf-8")).hexdigest()
    print(f"sha256 {digest}  ({elapsed:.2f} s)")
    if args.write_fixture:
        FIXTURE.write_text(digest + "\n")
        print(f"wrote {FIXTURE}")


if __name__ == "__main__":
    main()
