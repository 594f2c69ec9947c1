"""Linear fast magnetosonic wave: initial condition, exact solution and L1 errors.

The eigenvector is not hand-coded.  It comes from an eigendecomposition of
the 1-D flux Jacobian along the wavevector, evaluated by complex-step
differentiation at the background state.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field

import numpy as np

from ..mesh import NVAR, VAR_NAMES, Mesh, MeshBlock, exchange_ghosts
from .eos import PrimState
from .integrator import face_to_center_b, update_primitives


class WaveSetupError(ValueError):
    pass


def _default_background() -> PrimState:
    return PrimState(1.0, 0.0, 0.0, 0.0, 0.6, 1.0, math.sqrt(2.0), 0.5)


@dataclass(frozen=True)
class WaveSetup:
    """Background primitives are given in the wave frame: component 1 along
    the wavevector, 2 and 3 along the transverse basis (see ``wave_basis``)."""

    background: PrimState = field(default_factory=_default_background)
    wavevector: tuple[int, int, int] = (1, 0, 0)
    amplitude: float = 1e-6
    mode: str = "fast"

    def __post_init__(self):
        if not any(self.wavevector):
            raise WaveSetupError("wavevector must be nonzero")
        if self.mode != "fast":
            raise WaveSetupError(f"unsupported wave mode {self.mode!r}")
        b = self.background
        if not (b.rho > 0.0 and b.p > 0.0):
            raise WaveSetupError("background must have positive density and pressure")


def wave_flux(U, bn, gamma):
    """1-D ideal-MHD flux of the 7-component conserved vector
    (rho, m_n, m_t1, m_t2, E, B_t1, B_t2); works for complex input."""
    rho, mn, mt1, mt2, e, bt1, bt2 = U
    vn, vt1, vt2 = mn / rho, mt1 / rho, mt2 / rho
    pb = 0.5 * (bn * bn + bt1 * bt1 + bt2 * bt2)
    p = (gamma - 1.0) * (e - 0.5 * rho * (vn * vn + vt1 * vt1 + vt2 * vt2) - pb)
    pt = p + pb
    vb = vn * bn + vt1 * bt1 + vt2 * bt2
    return np.array([mn, mn * vn + pt - bn * bn, mt1 * vn - bn * bt1, mt2 * vn - bn * bt2,
                     (e + pt) * vn - bn * vb, bt1 * vn - bn * vt1, bt2 * vn - bn * vt2])


def wave_conserved(w: PrimState, gamma: float) -> np.ndarray:
    e = (w.p / (gamma - 1.0) + 0.5 * w.rho * (w.v1 ** 2 + w.v2 ** 2 + w.v3 ** 2)
         + 0.5 * (w.B1 ** 2 + w.B2 ** 2 + w.B3 ** 2))
    return np.array([w.rho, w.rho * w.v1, w.rho * w.v2, w.rho * w.v3, e, w.B2, w.B3])


def flux_jacobian(w: PrimState, gamma: float, h: float = 1e-30) -> np.ndarray:
    """dF/dU at ``w`` (wave frame) by complex-step differentiation."""
    U = wave_conserved(w, gamma)
    J = np.empty((7, 7))
    for c in range(7):
        Uc = U.astype(complex)
        Uc[c] += 1j * h
        J[:, c] = wave_flux(Uc, w.B1, gamma).imag / h
    return J


def wave_basis(wavevector, length):
    """Unit vectors (e_n, e_t1, e_t2), right-handed, for the given period triple."""
    k = 2.0 * np.pi * np.asarray(wavevector, float) / np.asarray(length, float)
    kn = k / np.linalg.norm(k)
    zhat = np.array([0.0, 0.0, 1.0])
    t1 = np.cross(zhat, kn)
    if np.linalg.norm(t1) < 1e-12:
        t1 = np.array([1.0, 0.0, 0.0])
    t1 /= np.linalg.norm(t1)
    t2 = np.cross(kn, t1)
    return k, kn, t1, t2


@dataclass
class LinearWave:
    """Exact-solution descriptor for a plane fast wave."""

    setup: WaveSetup
    gamma: float
    k: np.ndarray            # lab-frame wavevector (radians per length)
    basis: tuple             # e_n, e_t1, e_t2
    speed: float             # eigenvalue along e_n (includes background drift)
    eigvec: np.ndarray       # wave-frame right eigenvector, rho component 1
    u0: np.ndarray           # lab-frame background (rho, m1, m2, m3, E)
    b0: np.ndarray           # lab-frame background field
    du: np.ndarray           # lab-frame perturbation (rho, m1, m2, m3, E)
    db: np.ndarray           # lab-frame field perturbation direction

    @property
    def omega(self) -> float:
        return self.speed * float(np.linalg.norm(self.k))

    @property
    def period(self) -> float:
        return 2.0 * math.pi / abs(self.omega)

    def phase(self, x1, x2, x3, t):
        return self.k[0] * x1 + self.k[1] * x2 + self.k[2] * x3 - self.omega * t


def fast_eigen(w: PrimState, gamma: float):
    """Largest eigenvalue of the wave-frame flux Jacobian and its right eigenvector."""
    lam, R = np.linalg.eig(flux_jacobian(w, gamma))
    scale = max(np.max(np.abs(lam)), 1.0)
    if np.max(np.abs(lam.imag)) > 1e-8 * scale:
        raise WaveSetupError("background state has complex characteristic speeds")
    n = int(np.argmax(lam.real))
    r = R[:, n].real
    if abs(r[0]) > 1e-8 * np.linalg.norm(r):
        r = r / r[0]
    else:
        r = r / np.linalg.norm(r)
    return float(lam[n].real), r


def build_wave(setup: WaveSetup, length, gamma: float) -> LinearWave:
    k, kn, t1, t2 = wave_basis(setup.wavevector, length)
    bg = setup.background
    speed, r = fast_eigen(bg, gamma)
    v0 = bg.v1 * kn + bg.v2 * t1 + bg.v3 * t2
    b0 = bg.B1 * kn + bg.B2 * t1 + bg.B3 * t2
    e0 = bg.p / (gamma - 1.0) + 0.5 * bg.rho * v0.dot(v0) + 0.5 * b0.dot(b0)
    u0 = np.array([bg.rho, *(bg.rho * v0), e0])
    dm = r[1] * kn + r[2] * t1 + r[3] * t2
    du = np.array([r[0], *dm, r[4]])
    db = r[5] * t1 + r[6] * t2
    return LinearWave(setup, gamma, k, (kn, t1, t2), speed, r, u0, b0, du, db)


def _edge_potential(wave: LinearWave, blk: MeshBlock, t: float):
    """Vector potential of the field perturbation on cell edges (A1, A2, A3)."""
    amp = wave.setup.amplitude
    avec = -amp * np.cross(wave.k, wave.db) / wave.k.dot(wave.k)
    xc1, xc2, xc3 = blk.cell_centers()
    xf1, xf2, xf3 = blk.face_coords()
    out = []
    # A_d lives at the cell centre along d and on faces along the other two
    for d, (x1, x2, x3) in enumerate(((xc1, xf2, xf3), (xf1, xc2, xf3), (xf1, xf2, xc3))):
        ph = wave.phase(x1[None, None, :], x2[None, :, None], x3[:, None, None], t)
        out.append(avec[d] * np.sin(ph))
    return out


def exact_faces(wave: LinearWave, blk: MeshBlock, t: float):
    """Face-centred field over the whole block: background plus the discrete
    curl of the edge potential (divergence-free to round-off)."""
    a1, a2, a3 = _edge_potential(wave, blk, t)
    dx1, dx2, dx3 = blk.dx
    b1 = (a3[:, 1:, :] - a3[:, :-1, :]) / dx2 - (a2[1:] - a2[:-1]) / dx3
    b2 = (a1[1:] - a1[:-1]) / dx3 - (a3[:, :, 1:] - a3[:, :, :-1]) / dx1
    b3 = (a2[:, :, 1:] - a2[:, :, :-1]) / dx1 - (a1[:, 1:] - a1[:, :-1]) / dx2
    return b1 + wave.b0[0], b2 + wave.b0[1], b3 + wave.b0[2]


def exact_cells(wave: LinearWave, blk: MeshBlock, t: float) -> np.ndarray:
    """Hydrodynamic conserved variables (rho, m, E) at cell centres, whole block."""
    x1, x2, x3 = blk.cell_centers()
    c = np.cos(wave.phase(x1[None, None, :], x2[None, :, None], x3[:, None, None], t))
    amp = wave.setup.amplitude
    return np.stack([wave.u0[v] + amp * wave.du[v] * c for v in range(5)])


def _fill_block(wave: LinearWave, blk: MeshBlock, t: float, u, b1f, b2f, b3f) -> None:
    u[:5] = exact_cells(wave, blk, t)
    b1f[...], b2f[...], b3f[...] = exact_faces(wave, blk, t)


def init_linear_wave(mesh: Mesh, setup: WaveSetup | None = None) -> LinearWave:
    """Load the wave into every block, fill ghosts and primitives, and keep the
    exact-solution descriptor on ``mesh.wave``."""
    setup = setup or WaveSetup()
    wave = build_wave(setup, mesh.cfg.length, mesh.gamma)
    for blk in mesh.blocks:
        st = blk.state
        _fill_block(wave, blk, mesh.time, st.u, st.b1f, st.b2f, st.b3f)
        face_to_center_b(blk, st, mesh.policy)
    exchange_ghosts(mesh)
    update_primitives(mesh, stage="init")
    mesh.wave = wave
    return wave


@dataclass(frozen=True)
class L1Errors:
    per_var: dict
    combined: float

    def row(self) -> list[float]:
        return [self.per_var[n] for n in VAR_NAMES] + [self.combined]


def exact_state(mesh: Mesh, t: float, wave: LinearWave | None = None) -> list[np.ndarray]:
    """Exact conserved variables over the active zone of each block."""
    wave = wave or mesh.wave
    out = []
    for blk in mesh.blocks:
        u = np.empty((NVAR,) + blk.shape)
        u[:5] = exact_cells(wave, blk, t)
        f1, f2, f3 = exact_faces(wave, blk, t)
        u[5] = 0.5 * (f1[:, :, :-1] + f1[:, :, 1:])
        u[6] = 0.5 * (f2[:, :-1, :] + f2[:, 1:, :])
        u[7] = 0.5 * (f3[:-1, :, :] + f3[1:, :, :])
        ks, js, is_ = blk.active_slices()
        out.append(u[:, ks, js, is_])
    return out


def l1_error(mesh: Mesh, setup: WaveSetup | None = None, t: float | None = None) -> L1Errors:
    """Mean absolute deviation from the exact wave per conserved variable and
    the root-sum-square over variables."""
    wave = mesh.wave if setup is None else build_wave(setup, mesh.cfg.length, mesh.gamma)
    t = mesh.time if t is None else t
    sums = np.zeros(NVAR)
    for blk, ex in zip(mesh.blocks, exact_state(mesh, t, wave)):
        ks, js, is_ = blk.active_slices()
        diff = np.abs(blk.u[:, ks, js, is_] - ex)
        sums += [math.fsum(diff[v].ravel()) for v in range(NVAR)]
    l1 = sums / mesh.cfg.ncells
    return L1Errors(dict(zip(VAR_NAMES, l1.tolist())), float(np.sqrt(np.sum(l1 ** 2))))


ERROR_COLUMNS = ["resolution", "cycles"] + [f"L1_{n}" for n in VAR_NAMES] + ["L1_combined"]


def append_errors(path, resolution: int, cycles: int, errors: L1Errors) -> None:
    """Append one row to ``errors.csv``, writing the header for a new file."""
    new = not os.path.exists(path) or os.path.getsize(path) == 0
    with open(path, "a", newline="") as fh:
        wr = csv.writer(fh)
        if new:
            wr.writerow(ERROR_COLUMNS)
        wr.writerow([resolution, cycles] + [repr(x) for x in errors.row()])
