"""Spectral density and thermal filter at 1 nm and 300 K."""
import argparse
import pathlib
import sys

from emviscosity.cli import main
from emviscosity.config import RangeSpec, RunConfig


def build():
    cfg = RunConfig.example("spectral-density")
    cfg.scenario.z_nm, cfg.scenario.T_K, cfg.scenario.v_m_s = 1.0, 300.0, None
    cfg.scenario.omega_eV_range = RangeSpec(1e-3, 20.0, 2)
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
    sys.exit(main(["spectral-density", "--config", str(cfg_path), "--out", str(out / f"{stem}.csv"),
                   "--workers", str(args.workers)]))
