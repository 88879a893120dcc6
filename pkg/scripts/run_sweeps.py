"""Run every JSON config in scripts/configs through the sweep command.

Usage: python3 scripts/run_sweeps.py [config ...] [--workers N]
Outputs land next to the paths named in each config, relative to the repo root.
"""
import argparse
import sys
from pathlib import Path

from boxgalerkin.cli import main

ROOT = Path(__file__).resolve().parents[1]


def run(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("configs", nargs="*", type=Path)
    p.add_argument("--workers", type=int, default=1)
    args = p.parse_args(argv)
    configs = args.configs or sorted((ROOT / "scripts" / "configs").glob("*.json"))
    (ROOT / "results").mkdir(exist_ok=True)
    status = 0
    for cfg in configs:
        print(f"== {cfg.name}", file=sys.stderr)
        code = main(["--workers", str(args.workers), "sweep", "--config", str(cfg)])
        status = max(status, code)
    return status


if __name__ == "__main__":
    sys.exit(run())
