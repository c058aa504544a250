"""Deterministic CSV output for simulation runs."""

from __future__ import annotations

import io
import json
import os
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .config import SimConfig
from .driver import DayRecord, RunSummary
from .grids import PayoffGrid, TimeGrid
from .profiles import ProfileError

FMT = "%.12g"

SUMMARY_COLUMNS = ("day", "mass", "ue_gap", "x_star", "max_density_change")
DENSITY_COLUMNS = ("day", "cell_index", "x_center", "k")
FLOW_COLUMNS = ("day", "t_center", "f", "g", "F", "G", "delta", "upsilon", "phi1", "phi2", "phi")

OUTPUT_FILES = ("summary.csv", "density.csv", "flows.csv", "manifest.json")


def _block(columns: Sequence[np.ndarray]) -> str:
    buf = io.StringIO()
    np.savetxt(buf, np.column_stack(columns), fmt=FMT, delimiter=",")
    return buf.getvalue()


class CsvSink:
    """Streams each day's rows to the three tables with one write per table per day.

    ``flow_every`` thins the (large) flow/cost table to every n-th day step;
    the summary and density tables always get every day.
    """

    def __init__(self, out_dir: str | Path, time: TimeGrid, payoff: PayoffGrid, flow_every: int = 1):
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.time = time
        self.payoff = payoff
        self.flow_every = max(1, int(flow_every))
        self._files = {}
        for name, cols in (("summary.csv", SUMMARY_COLUMNS),
                           ("density.csv", DENSITY_COLUMNS),
                           ("flows.csv", FLOW_COLUMNS)):
            fh = open(self.out_dir / name, "w", newline="")
            fh.write(",".join(cols) + "\n")
            self._files[name] = fh

    def _write(self, name: str, text: str) -> None:
        fh = self._files[name]
        fh.write(text)
        fh.flush()

    def emit(self, rec: DayRecord) -> None:
        I, M = self.payoff.I, self.time.M
        self._write("summary.csv", _block([
            np.array([rec.day]), np.array([rec.mass]), np.array([rec.ue_gap]),
            np.array([rec.x_star]), np.array([rec.max_density_change]),
        ]))
        self._write("density.csv", _block([
            np.full(I, rec.day), -np.arange(I), self.payoff.centers, rec.density.k,
        ]))
        if rec.step % self.flow_every == 0:
            fl, c = rec.flows, rec.costs
            self._write("flows.csv", _block([
                np.full(M, rec.day), self.time.centers, fl.f, fl.g,
                fl.at_centers(fl.F), fl.at_centers(fl.G), fl.at_centers(fl.delta),
                fl.at_centers(fl.upsilon), c.phi1, c.phi2, c.phi,
            ]))

    def close(self) -> None:
        for fh in self._files.values():
            fh.close()
        self._files = {}


def write_manifest(out_dir: str | Path, config: SimConfig, summary: RunSummary, f0_source: str) -> Path:
    manifest = {
        "version": __version__,
        "config": config.to_dict(),
        "f0": f0_source,
        "summary": {
            "converged": summary.converged,
            "convergence_day": summary.convergence_day,
            "final_day": summary.final_day,
            "final_gap": float(FMT % summary.final_gap),
            "final_x_star": summary.final_x_star,
            "initial_gap": float(FMT % summary.initial_gap),
            "stop_reason": summary.stop_reason,
            "n_days": summary.n_days,
        },
    }
    path = Path(out_dir) / "manifest.json"
    tmp = path.with_suffix(".json.tmp")
    tmp.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    os.replace(tmp, path)
    return path


def read_f0(path: str | Path) -> tuple[list[float], list[float]]:
    """Read ``t_start,rate`` rows (header optional) describing a step profile."""
    starts, rates = [], []
    header_allowed = True
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 2:
            raise ProfileError(f"{path}:{lineno}: expected two columns t_start,rate")
        try:
            t, r = float(parts[0]), float(parts[1])
        except ValueError:
            if header_allowed:
                header_allowed = False
                continue
            raise ProfileError(f"{path}:{lineno}: non-numeric value") from None
        header_allowed = False
        starts.append(t)
        rates.append(r)
    if not starts:
        raise ProfileError(f"{path}: no rows")
    return starts, rates
