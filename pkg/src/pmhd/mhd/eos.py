"""Adiabatic ideal-MHD equation of state and pointwise state records.

Magnetic fields are in Lorentz-Heaviside units (magnetic pressure B^2/2).
"""

from __future__ import annotations

from dataclasses import astuple, dataclass
from math import sqrt

import numpy as np

from ..engine import device, kernel


class UnphysicalStateError(ArithmeticError):
    """Raised when a conserved state maps to non-positive density or pressure."""

    def __init__(self, message, cell=None, stage=None):
        super().__init__(message)
        self.cell = cell
        self.stage = stage


@dataclass(frozen=True)
class PrimState:
    rho: float
    v1: float
    v2: float
    v3: float
    p: float
    B1: float
    B2: float
    B3: float

    def as_array(self) -> np.ndarray:
        return np.array(astuple(self), dtype=float)

    @classmethod
    def from_array(cls, a) -> "PrimState":
        return cls(*(float(x) for x in a))


@dataclass(frozen=True)
class ConsState:
    rho: float
    m1: float
    m2: float
    m3: float
    E: float
    B1: float
    B2: float
    B3: float

    def as_array(self) -> np.ndarray:
        return np.array(astuple(self), dtype=float)

    @classmethod
    def from_array(cls, a) -> "ConsState":
        return cls(*(float(x) for x in a))


@device
def pressure_from_cons(rho, m1, m2, m3, e, b1, b2, b3, gamma):
    di = 1.0 / rho
    ke = 0.5 * di * (m1 * m1 + m2 * m2 + m3 * m3)
    pb = 0.5 * (b1 * b1 + b2 * b2 + b3 * b3)
    return (gamma - 1.0) * (e - ke - pb)


@device
def total_energy(rho, v1, v2, v3, p, b1, b2, b3, gamma):
    return (p / (gamma - 1.0) + 0.5 * rho * (v1 * v1 + v2 * v2 + v3 * v3)
            + 0.5 * (b1 * b1 + b2 * b2 + b3 * b3))


@device
def fast_speed_sq(rho, p, bn, bt1, bt2, gamma):
    """Square of the fast magnetosonic speed along the direction of ``bn``."""
    di = 1.0 / rho
    cs2 = gamma * p * di
    ca2 = (bn * bn + bt1 * bt1 + bt2 * bt2) * di
    cat2 = (bt1 * bt1 + bt2 * bt2) * di
    # (cs2+ca2)^2 - 4 cs2 can^2 rewritten so the radicand is a sum of squares
    diff = cs2 - ca2
    return 0.5 * ((cs2 + ca2) + sqrt(diff * diff + 4.0 * cs2 * cat2))


def cons_to_prim(c: ConsState, gamma: float) -> PrimState:
    if not c.rho > 0.0:
        raise UnphysicalStateError(f"non-positive density {c.rho}")
    p = pressure_from_cons(c.rho, c.m1, c.m2, c.m3, c.E, c.B1, c.B2, c.B3, gamma)
    if not p > 0.0:
        raise UnphysicalStateError(f"non-positive pressure {p}")
    di = 1.0 / c.rho
    return PrimState(c.rho, c.m1 * di, c.m2 * di, c.m3 * di, p, c.B1, c.B2, c.B3)


def prim_to_cons(w: PrimState, gamma: float) -> ConsState:
    if not (w.rho > 0.0 and w.p > 0.0):
        raise UnphysicalStateError(f"invalid primitive state {w}")
    e = total_energy(w.rho, w.v1, w.v2, w.v3, w.p, w.B1, w.B2, w.B3, gamma)
    return ConsState(w.rho, w.rho * w.v1, w.rho * w.v2, w.rho * w.v3, e, w.B1, w.B2, w.B3)


def fast_speed(w: PrimState, gamma: float, dim: int) -> float:
    b = (w.B1, w.B2, w.B3)
    n = dim - 1
    return sqrt(fast_speed_sq(w.rho, w.p, b[n], b[(n + 1) % 3], b[(n + 2) % 3], gamma))


# -- cell kernels -------------------------------------------------------------

@kernel
def cons_to_prim_kernel(k, j, i, args):
    u, w, gamma = args
    rho = u[0, k, j, i]
    di = 1.0 / rho
    w[0, k, j, i] = rho
    w[1, k, j, i] = u[1, k, j, i] * di
    w[2, k, j, i] = u[2, k, j, i] * di
    w[3, k, j, i] = u[3, k, j, i] * di
    w[4, k, j, i] = pressure_from_cons(rho, u[1, k, j, i], u[2, k, j, i], u[3, k, j, i],
                                       u[4, k, j, i], u[5, k, j, i], u[6, k, j, i],
                                       u[7, k, j, i], gamma)
    w[5, k, j, i] = u[5, k, j, i]
    w[6, k, j, i] = u[6, k, j, i]
    w[7, k, j, i] = u[7, k, j, i]


@kernel
def face_to_center_kernel(k, j, i, args):
    u, b1, b2, b3 = args
    u[5, k, j, i] = 0.5 * (b1[k, j, i] + b1[k, j, i + 1])
    u[6, k, j, i] = 0.5 * (b2[k, j, i] + b2[k, j + 1, i])
    u[7, k, j, i] = 0.5 * (b3[k, j, i] + b3[k + 1, j, i])


@kernel
def dt_kernel(k, j, i, args):
    w, gamma, dx1, dx2, dx3 = args
    rho = w[0, k, j, i]
    p = w[4, k, j, i]
    b1 = w[5, k, j, i]
    b2 = w[6, k, j, i]
    b3 = w[7, k, j, i]
    c1 = sqrt(fast_speed_sq(rho, p, b1, b2, b3, gamma))
    c2 = sqrt(fast_speed_sq(rho, p, b2, b3, b1, gamma))
    c3 = sqrt(fast_speed_sq(rho, p, b3, b1, b2, gamma))
    t1 = dx1 / (abs(w[1, k, j, i]) + c1)
    t2 = dx2 / (abs(w[2, k, j, i]) + c2)
    t3 = dx3 / (abs(w[3, k, j, i]) + c3)
    return min(t1, min(t2, t3))
