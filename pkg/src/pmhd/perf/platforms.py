"""Platform-table CSV: ``id, t_peak_gflops, bw_<space>_gbs..., provenance``."""

from __future__ import annotations

import csv
import io
import os
import re
from importlib import resources

from .model import KernelIntensitySet, MeasuredRun, PerfInputError, RooflinePlatform

_BW = re.compile(r"^bw_(\w+?)_gbs$")


class PlatformParseError(PerfInputError):
    def __init__(self, message, row=None):
        super().__init__(f"row {row}: {message}" if row is not None else message)
        self.row = row


def _num(text, what, row):
    try:
        v = float(text)
    except (TypeError, ValueError):
        raise PlatformParseError(f"{what} is not a number: {text!r}", row) from None
    if not v > 0:
        raise PlatformParseError(f"{what} must be positive, got {v}", row)
    return v


def _provenance(text, row):
    out = {}
    for item in filter(None, (s.strip() for s in (text or "").split(";"))):
        key, sep, tag = item.partition(":")
        if not sep:
            raise PlatformParseError(f"malformed provenance entry {item!r}", row)
        out[key.strip()] = tag.strip()
    return out


def parse_platform_table(text: str) -> list[RooflinePlatform]:
    """Parse platform rows; a blank bandwidth cell means the space is not
    recorded for that platform.  Row numbers in errors count the header as 1."""
    lines = [ln for ln in text.splitlines() if not ln.lstrip().startswith("#")]
    if not any(ln.strip() for ln in lines):
        return []
    reader = csv.DictReader(io.StringIO("\n".join(lines)), skipinitialspace=True)
    cols = [c.strip() for c in reader.fieldnames or []]
    reader.fieldnames = cols
    for need in ("id", "t_peak_gflops"):
        if need not in cols:
            raise PlatformParseError(f"missing column {need!r}", 1)
    spaces = {c: _BW.match(c).group(1) for c in cols if _BW.match(c)}
    if not spaces:
        raise PlatformParseError("no bw_<space>_gbs column", 1)
    out = []
    for n, rec in enumerate(reader, start=2):
        if None in rec:
            raise PlatformParseError("too many fields", n)
        pid = (rec.get("id") or "").strip()
        if not pid:
            raise PlatformParseError("missing id", n)
        t_peak = _num(rec.get("t_peak_gflops"), "t_peak_gflops", n) * 1e9
        bw = {}
        for col, space in spaces.items():
            cell = (rec.get(col) or "").strip()
            if cell:
                bw[space] = _num(cell, col, n) * 1e9
        if not bw:
            raise PlatformParseError("no bandwidth given", n)
        out.append(RooflinePlatform(pid, t_peak, bw, _provenance(rec.get("provenance"), n)))
    return out


def load_platform_table(path) -> list[RooflinePlatform]:
    with open(path, newline="") as fh:
        return parse_platform_table(fh.read())


def format_platform_table(platforms) -> str:
    spaces = []
    for p in platforms:
        for m in p.bandwidth:
            if m not in spaces:
                spaces.append(m)
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["id", "t_peak_gflops"] + [f"bw_{m}_gbs" for m in spaces] + ["provenance"])
    for p in platforms:
        wr.writerow([p.id, repr(p.t_peak / 1e9)]
                    + [repr(p.bandwidth[m] / 1e9) if m in p.bandwidth else "" for m in spaces]
                    + [";".join(f"{k}:{v}" for k, v in p.provenance.items())])
    return buf.getvalue()


def write_platform_table(path, platforms) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(format_platform_table(platforms))


def _data(name: str) -> str:
    text = resources.files("pmhd.perf").joinpath("data").joinpath(name).read_text()
    return "\n".join(ln for ln in text.splitlines() if not ln.startswith("#"))


def reference_platforms() -> list[RooflinePlatform]:
    """The ten published devices with their DRAM/HBM/MCDRAM bandwidths."""
    return parse_platform_table(_data("published_platforms.csv"))


def reference_measurements():
    """Published V100 data point: (platform, intensities, run)."""
    rows = list(csv.DictReader(io.StringIO(_data("published_measurements.csv")), skipinitialspace=True))
    plats = {p.id: p for p in reference_platforms()}
    out = []
    for r in rows:
        plat = plats[r["platform"]]
        ints = KernelIntensitySet(r["app"], r["problem"],
                                  {r["space"]: float(r["cap_gflops"]) / (plat.bandwidth[r["space"]] / 1e9)})
        run = MeasuredRun(r["app"], r["problem"], plat.id, float(r["epsilon_gflops"]) * 1e9)
        out.append((plat, ints, run))
    return out


def find_platform(platforms, pid: str) -> RooflinePlatform:
    for p in platforms:
        if p.id == pid:
            return p
    raise PerfInputError(f"no platform record {pid!r}")


