"""Dominant drag mechanism on a 50 x 50 (z, T) grid with the analytic boundaries."""
import argparse
import pathlib
import sys

from emviscosity.cli import main
from emviscosity.config import RangeSpec, RunConfig


def build():
    cfg = RunConfig.example("regime-map")
    cfg.scenario.z_nm = cfg.scenario.T_K = None
    cfg.scenario.z_nm_range = RangeSpec(1.0, 1e4, 50)
    cfg.scenario.T_K_range = RangeSpec(0.1, 1e4, 50)
    return cfg


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--out-dir", default="results")
    p.add_argument("--workers", type=int, default=1)
    args = p.parse_args()
    out = pathlib.Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stem = pathlib.Path(__file__).stem
    cfg_path = out / f"{stem}.toml"
    cfg_path.write_text(build().dumps())
    sys.exit(main(["regime-map", "--config", str(cfg_path), "--out", str(out / f"{stem}.csv"),
                   "--workers", str(args.workers)]))
