"""Binary snapshot files.

Layout: ASCII header lines ``PMHD1``, ``dims <nx1> <nx2> <nx3>``, ``gamma <g>``,
``time <t>``, ``END``, then little-endian float64 payload: the eight conserved
variables over the global active grid (variable-major, k-j-i), followed by
the global staggered arrays b1f, b2f, b3f.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .mesh import NVAR, Mesh, gather_global

MAGIC = "PMHD1"


class SnapshotError(ValueError):
    pass


@dataclass
class Snapshot:
    dims: tuple[int, int, int]
    gamma: float
    time: float
    u: np.ndarray
    b1f: np.ndarray
    b2f: np.ndarray
    b3f: np.ndarray


def encode(dims, gamma: float, time: float, u, b1f, b2f, b3f) -> bytes:
    n1, n2, n3 = dims
    header = f"{MAGIC}\ndims {n1} {n2} {n3}\ngamma {gamma!r}\ntime {time!r}\nEND\n".encode("ascii")
    payload = b"".join(np.ascontiguousarray(a, dtype="<f8").tobytes() for a in (u, b1f, b2f, b3f))
    return header + payload


def snapshot_bytes(mesh: Mesh) -> bytes:
    u, b1, b2, b3 = gather_global(mesh)
    return encode(mesh.cfg.nx, mesh.cfg.gamma, mesh.time, u, b1, b2, b3)


def write_snapshot(mesh: Mesh, path) -> Path:
    path = Path(path)
    path.write_bytes(snapshot_bytes(mesh))
    return path


def digest(mesh: Mesh) -> str:
    return hashlib.sha256(snapshot_bytes(mesh)).hexdigest()


def decode(data: bytes) -> Snapshot:
    lines = []
    pos = 0
    for _ in range(5):
        end = data.find(b"\n", pos)
        if end < 0:
            raise SnapshotError("truncated header")
        lines.append(data[pos:end].decode("ascii"))
        pos = end + 1
    if lines[0] != MAGIC or lines[4] != "END":
        raise SnapshotError("not a PMHD1 snapshot")
    try:
        key, *dims = lines[1].split()
        assert key == "dims"
        n1, n2, n3 = (int(x) for x in dims)
        key, g = lines[2].split()
        assert key == "gamma"
        key, t = lines[3].split()
        assert key == "time"
    except (AssertionError, ValueError) as exc:
        raise SnapshotError(f"malformed header: {lines}") from exc
    shapes = [(NVAR, n3, n2, n1), (n3, n2, n1 + 1), (n3, n2 + 1, n1), (n3 + 1, n2, n1)]
    need = sum(int(np.prod(s)) for s in shapes) * 8
    if len(data) - pos != need:
        raise SnapshotError(f"payload has {len(data) - pos} bytes, expected {need}")
    arrays = []
    for s in shapes:
        n = int(np.prod(s))
        arrays.append(np.frombuffer(data, dtype="<f8", count=n, offset=pos).reshape(s).astype(float))
        pos += 8 * n
    return Snapshot((n1, n2, n3), float(g), float(t), *arrays)


def read_snapshot(path) -> Snapshot:
    return decode(Path(path).read_bytes())
