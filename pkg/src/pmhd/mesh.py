"""Cartesian mesh split into meshblocks, field storage and periodic ghost exchange.

Storage order is ``k, j, i`` with ``i`` fastest.  Cell arrays carry ``ng``
ghost layers on each side; the face-centred field ``bNf`` has one extra entry
along its own dimension (index ``i`` of ``b1f`` is the face at ``x_{i-1/2}``).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .engine import LoopBounds, LoopPolicy, kernel, max_op, par_for, par_reduce, region

NVAR = 8
IDN, IM1, IM2, IM3, IEN, IB1, IB2, IB3 = range(NVAR)
# primitive slots reuse the same layout: rho, v1, v2, v3, p, Bcc1..3
IVX, IVY, IVZ, IPR = IM1, IM2, IM3, IEN
VAR_NAMES = ("rho", "m1", "m2", "m3", "E", "B1", "B2", "B3")


class ConfigurationError(ValueError):
    pass


class BufferError(ValueError):
    pass


@dataclass(frozen=True)
class MeshConfig:
    nx: tuple[int, int, int] = (16, 16, 16)
    mb: tuple[int, int, int] | None = None   # defaults to one block
    ng: int = 2
    length: tuple[float, float, float] = (1.0, 1.0, 1.0)
    gamma: float = 5.0 / 3.0
    cfl: float = 0.3

    def __post_init__(self):
        if self.mb is None:
            object.__setattr__(self, "mb", tuple(self.nx))
        for n, m in zip(self.nx, self.mb):
            if n < 1 or m < 1:
                raise ConfigurationError(f"cell counts must be positive, got nx={self.nx} mb={self.mb}")
            if n % m:
                raise ConfigurationError(f"global size {n} is not a multiple of meshblock size {m}")
        if self.ng < 2:
            raise ConfigurationError("at least 2 ghost layers are required for PLM")
        if not self.gamma > 1.0:
            raise ConfigurationError("gamma must exceed 1")
        if not 0.0 < self.cfl < 1.0:
            raise ConfigurationError("cfl must lie in (0, 1)")
        if any(not L > 0 for L in self.length):
            raise ConfigurationError("domain lengths must be positive")

    @property
    def nblocks(self) -> tuple[int, int, int]:
        return tuple(n // m for n, m in zip(self.nx, self.mb))

    @property
    def dx(self) -> tuple[float, float, float]:
        return tuple(L / n for L, n in zip(self.length, self.nx))

    @property
    def ncells(self) -> int:
        return self.nx[0] * self.nx[1] * self.nx[2]


@dataclass(frozen=True)
class FaceId:
    dim: int    # 1, 2 or 3
    high: bool  # False: low side

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise ValueError("face dimension must be 1, 2 or 3")

    @property
    def opposite(self) -> "FaceId":
        return FaceId(self.dim, not self.high)


ALL_FACES = tuple(FaceId(d, h) for d in (1, 2, 3) for h in (False, True))


@dataclass
class BoundaryBuffer:
    face: FaceId   # the face it was packed from
    data: np.ndarray


class FieldState:
    """Conserved cell data plus the three staggered field components."""

    def __init__(self, shape: tuple[int, int, int]):
        nk, nj, ni = shape
        self.u = np.zeros((NVAR, nk, nj, ni))
        self.b1f = np.zeros((nk, nj, ni + 1))
        self.b2f = np.zeros((nk, nj + 1, ni))
        self.b3f = np.zeros((nk + 1, nj, ni))

    @property
    def bf(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return (self.b1f, self.b2f, self.b3f)

    def copy_from(self, other: "FieldState") -> None:
        for a, b in zip((self.u, *self.bf), (other.u, *other.bf)):
            a[...] = b


@dataclass
class MeshBlock:
    coords: tuple[int, int, int]   # position in the block grid (x1, x2, x3)
    mb: tuple[int, int, int]
    ng: int
    dx: tuple[float, float, float]
    offset: tuple[int, int, int]   # global index of the first active cell (x1, x2, x3)
    state: FieldState = field(init=False)
    half: FieldState = field(init=False)
    w: np.ndarray = field(init=False)

    def __post_init__(self):
        ng = self.ng
        self.shape = (self.mb[2] + 2 * ng, self.mb[1] + 2 * ng, self.mb[0] + 2 * ng)
        self.state = FieldState(self.shape)
        self.half = FieldState(self.shape)
        self.w = np.zeros((NVAR,) + self.shape)
        self.is_, self.ie = ng, ng + self.mb[0]
        self.js, self.je = ng, ng + self.mb[1]
        self.ks, self.ke = ng, ng + self.mb[2]
        self.scratch = None  # solver work arrays, allocated lazily

    # convenience views of the primary state
    @property
    def u(self) -> np.ndarray:
        return self.state.u

    @property
    def b1f(self) -> np.ndarray:
        return self.state.b1f

    @property
    def b2f(self) -> np.ndarray:
        return self.state.b2f

    @property
    def b3f(self) -> np.ndarray:
        return self.state.b3f

    @property
    def active(self) -> LoopBounds:
        return LoopBounds(self.ks, self.ke, self.js, self.je, self.is_, self.ie)

    @property
    def whole(self) -> LoopBounds:
        nk, nj, ni = self.shape
        return LoopBounds(0, nk, 0, nj, 0, ni)

    def active_slices(self) -> tuple[slice, slice, slice]:
        return (slice(self.ks, self.ke), slice(self.js, self.je), slice(self.is_, self.ie))

    def cell_centers(self, length_origin=(0.0, 0.0, 0.0)):
        """Cell-centre coordinates (x1, x2, x3) over the whole block incl. ghosts,
        computed from global indices so every decomposition yields identical values."""
        out = []
        for d in range(3):
            n = self.shape[2 - d]
            gidx = self.offset[d] - self.ng + np.arange(n)
            out.append(length_origin[d] + (gidx + 0.5) * self.dx[d])
        return out

    def face_coords(self):
        """Face coordinates x_{i-1/2} per dimension (one more than cells)."""
        out = []
        for d in range(3):
            n = self.shape[2 - d] + 1
            gidx = self.offset[d] - self.ng + np.arange(n)
            out.append(gidx * self.dx[d])
        return out


class Mesh:
    """The global grid as a periodic lattice of meshblocks."""

    def __init__(self, cfg: MeshConfig, policy: LoopPolicy | None = None):
        self.cfg = cfg
        self.policy = policy or LoopPolicy()
        self.time = 0.0
        self.cycle = 0
        self.diagnostics = {"roe_fallbacks": 0}
        self.nblocks = cfg.nblocks
        self.blocks: list[MeshBlock] = []
        self._grid: dict[tuple[int, int, int], MeshBlock] = {}
        for b3, b2, b1 in itertools.product(*(range(n) for n in reversed(self.nblocks))):
            offset = (b1 * cfg.mb[0], b2 * cfg.mb[1], b3 * cfg.mb[2])
            blk = MeshBlock((b1, b2, b3), tuple(cfg.mb), cfg.ng, cfg.dx, offset)
            self.blocks.append(blk)
            self._grid[(b1, b2, b3)] = blk

    def neighbor(self, blk: MeshBlock, face: FaceId) -> MeshBlock:
        c = list(blk.coords)
        d = face.dim - 1
        c[d] = (c[d] + (1 if face.high else -1)) % self.nblocks[d]
        return self._grid[tuple(c)]

    @property
    def gamma(self) -> float:
        return self.cfg.gamma


def build_mesh(cfg: MeshConfig, policy: LoopPolicy | None = None) -> Mesh:
    """Decompose ``cfg`` into zero-initialised meshblocks."""
    return Mesh(cfg, policy)


# -- buffer kernels ---------------------------------------------------------

@kernel
def pack_kernel(k, j, i, args):
    a, buf, off, ks, js, is_, nj, ni = args
    buf[off + ((k - ks) * nj + (j - js)) * ni + (i - is_)] = a[k, j, i]


@kernel
def unpack_kernel(k, j, i, args):
    a, buf, off, ks, js, is_, nj, ni = args
    a[k, j, i] = buf[off + ((k - ks) * nj + (j - js)) * ni + (i - is_)]


def _region(arr_shape, dim: int, lo: int, hi: int) -> LoopBounds:
    """Full extent of a (k, j, i) array except ``[lo, hi)`` along ``dim``."""
    r = [(0, arr_shape[0]), (0, arr_shape[1]), (0, arr_shape[2])]
    r[3 - dim] = (lo, hi)
    return LoopBounds(r[0][0], r[0][1], r[1][0], r[1][1], r[2][0], r[2][1])


def _segments(blk: MeshBlock, state: FieldState, face: FaceId, pack: bool):
    """(array, bounds) pairs in buffer order for packing from / unpacking into ``face``.

    Order: the eight conserved variables, the two tangential face components
    (ascending dimension), then the normal component.  A high-side pack also
    carries the shared normal face, which the lower-index block owns.
    """
    ng = blk.ng
    d = face.dim
    s = (blk.is_, blk.js, blk.ks)[d - 1]
    e = (blk.ie, blk.je, blk.ke)[d - 1]
    if pack:
        c_lo, c_hi = (e - ng, e) if face.high else (s, s + ng)
        n_lo, n_hi = (e - ng, e + 1) if face.high else (s + 1, s + ng + 1)
    else:
        c_lo, c_hi = (e, e + ng) if face.high else (s - ng, s)
        n_lo, n_hi = (e + 1, e + ng + 1) if face.high else (s - ng, s + 1)
    segs = [(state.u[v], _region(blk.shape, d, c_lo, c_hi)) for v in range(NVAR)]
    for t in (1, 2, 3):
        if t != d:
            arr = state.bf[t - 1]
            segs.append((arr, _region(arr.shape, d, c_lo, c_hi)))
    arr = state.bf[d - 1]
    segs.append((arr, _region(arr.shape, d, n_lo, n_hi)))
    return segs


def buffer_length(blk: MeshBlock, face: FaceId, pack: bool = True) -> int:
    return sum(b.size for _, b in _segments(blk, blk.state, face, pack))


def _move(policy, segs, buf, kern):
    off = 0
    for arr, b in segs:
        _, nj, ni = b.shape
        par_for(policy, b, kern, (arr, buf, off, b.ks, b.js, b.is_, nj, ni))
        off += b.size
    return off


def pack_boundary(blk: MeshBlock, face: FaceId, policy: LoopPolicy | None = None,
                  state: FieldState | None = None) -> BoundaryBuffer:
    """Copy the active layers adjacent to ``face`` into a flat buffer."""
    policy = policy or LoopPolicy()
    segs = _segments(blk, state or blk.state, face, pack=True)
    buf = np.empty(sum(b.size for _, b in segs))
    _move(policy, segs, buf, pack_kernel)
    return BoundaryBuffer(face, buf)


def unpack_boundary(blk: MeshBlock, face: FaceId, buf: BoundaryBuffer,
                    policy: LoopPolicy | None = None, state: FieldState | None = None) -> None:
    """Overwrite the ghost layers behind ``face`` from a buffer packed on the
    opposite face of the neighbouring block."""
    policy = policy or LoopPolicy()
    segs = _segments(blk, state or blk.state, face, pack=False)
    need = sum(b.size for _, b in segs)
    data = np.asarray(buf.data if isinstance(buf, BoundaryBuffer) else buf, dtype=float)
    if data.ndim != 1 or data.size != need:
        raise BufferError(f"buffer for face {face} must hold {need} values, got {data.size}")
    _move(policy, segs, data, unpack_kernel)


def exchange_ghosts(mesh: Mesh, half: bool = False) -> None:
    """Periodic ghost fill by ordered sweeps x1, x2, x3 (pack all, then unpack all)."""
    policy = mesh.policy
    with region("boundary"):
        for d in (1, 2, 3):
            lo, hi = FaceId(d, False), FaceId(d, True)
            packed = {}
            for blk in mesh.blocks:
                st = blk.half if half else blk.state
                packed[(id(blk), False)] = pack_boundary(blk, lo, policy, st)
                packed[(id(blk), True)] = pack_boundary(blk, hi, policy, st)
            for blk in mesh.blocks:
                st = blk.half if half else blk.state
                unpack_boundary(blk, lo, packed[(id(mesh.neighbor(blk, lo)), True)], policy, st)
                unpack_boundary(blk, hi, packed[(id(mesh.neighbor(blk, hi)), False)], policy, st)


@kernel
def divb_kernel(k, j, i, args):
    b1, b2, b3, dx1, dx2, dx3 = args
    div = ((b1[k, j, i + 1] - b1[k, j, i]) / dx1 + (b2[k, j + 1, i] - b2[k, j, i]) / dx2
           + (b3[k + 1, j, i] - b3[k, j, i]) / dx3)
    return abs(div)


def max_divergence_b(mesh: Mesh) -> float:
    """Largest |div B| over active cells, from the face-centred field."""
    out = 0.0
    for blk in mesh.blocks:
        dx1, dx2, dx3 = blk.dx
        val = par_reduce(mesh.policy, blk.active, divb_kernel,
                         (blk.b1f, blk.b2f, blk.b3f, dx1, dx2, dx3), max_op, 0.0)
        out = max(out, val)
    return out


def gather_global(mesh: Mesh):
    """Active-zone global arrays: (u[8, nx3, nx2, nx1], b1f, b2f, b3f)."""
    n1, n2, n3 = mesh.cfg.nx
    u = np.empty((NVAR, n3, n2, n1))
    b1 = np.empty((n3, n2, n1 + 1))
    b2 = np.empty((n3, n2 + 1, n1))
    b3 = np.empty((n3 + 1, n2, n1))
    for blk in mesh.blocks:
        o1, o2, o3 = blk.offset
        m1, m2, m3 = blk.mb
        ks, js, is_ = blk.ks, blk.js, blk.is_
        u[:, o3:o3 + m3, o2:o2 + m2, o1:o1 + m1] = blk.u[:, ks:ks + m3, js:js + m2, is_:is_ + m1]
        b1[o3:o3 + m3, o2:o2 + m2, o1:o1 + m1 + 1] = blk.b1f[ks:ks + m3, js:js + m2, is_:is_ + m1 + 1]
        b2[o3:o3 + m3, o2:o2 + m2 + 1, o1:o1 + m1] = blk.b2f[ks:ks + m3, js:js + m2 + 1, is_:is_ + m1]
        b3[o3:o3 + m3 + 1, o2:o2 + m2, o1:o1 + m1] = blk.b3f[ks:ks + m3 + 1, js:js + m2, is_:is_ + m1]
    return u, b1, b2, b3


def scatter_global(mesh: Mesh, u, b1, b2, b3) -> None:
    """Inverse of :func:`gather_global` (active zones only)."""
    for blk in mesh.blocks:
        o1, o2, o3 = blk.offset
        m1, m2, m3 = blk.mb
        ks, js, is_ = blk.ks, blk.js, blk.is_
        blk.u[:, ks:ks + m3, js:js + m2, is_:is_ + m1] = u[:, o3:o3 + m3, o2:o2 + m2, o1:o1 + m1]
        blk.b1f[ks:ks + m3, js:js + m2, is_:is_ + m1 + 1] = b1[o3:o3 + m3, o2:o2 + m2, o1:o1 + m1 + 1]
        blk.b2f[ks:ks + m3, js:js + m2 + 1, is_:is_ + m1] = b2[o3:o3 + m3, o2:o2 + m2 + 1, o1:o1 + m1]
        blk.b3f[ks:ks + m3 + 1, js:js + m2, is_:is_ + m1] = b3[o3:o3 + m3 + 1, o2:o2 + m2, o1:o1 + m1]
