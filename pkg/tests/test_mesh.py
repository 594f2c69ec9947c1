import numpy as np
import pytest

from pmhd.engine import LoopPolicy, Pattern
from pmhd.mesh import (ALL_FACES, BoundaryBuffer, BufferError, ConfigurationError, FaceId,
                       MeshConfig, build_mesh, buffer_length, exchange_ghosts, gather_global,
                       max_divergence_b, pack_boundary, scatter_global, unpack_boundary)


def test_build_mesh_blocks_and_spacing():
    m = build_mesh(MeshConfig(nx=(8, 6, 4), mb=(4, 3, 2), length=(2.0, 1.0, 1.0)))
    assert len(m.blocks) == 8
    assert m.cfg.dx == (0.25, 1 / 6, 0.25)
    blk = m.blocks[0]
    assert blk.u.shape == (8, 6, 7, 8)
    assert blk.b1f.shape == (6, 7, 9) and blk.b2f.shape == (6, 8, 8) and blk.b3f.shape == (7, 7, 8)
    assert not blk.u.any()


@pytest.mark.parametrize("kw", [dict(nx=(8, 8, 8), mb=(3, 8, 8)), dict(ng=1),
                                dict(nx=(0, 4, 4)), dict(cfl=1.5), dict(gamma=1.0)])
def test_bad_configs_rejected(kw):
    with pytest.raises(ConfigurationError):
        MeshConfig(**kw)


def _periodic_fields(rng, n1, n2, n3):
    u = rng.random((8, n3, n2, n1))
    g1 = rng.random((n3, n2, n1))
    g2 = rng.random((n3, n2, n1))
    g3 = rng.random((n3, n2, n1))
    b1 = np.concatenate([g1, g1[:, :, :1]], axis=2)
    b2 = np.concatenate([g2, g2[:, :1, :]], axis=1)
    b3 = np.concatenate([g3, g3[:1, :, :]], axis=0)
    return u, (g1, g2, g3), (b1, b2, b3)


@pytest.mark.parametrize("nx,mb", [((8, 6, 4), (4, 3, 2)), ((6, 6, 6), (6, 6, 6)),
                                   ((8, 4, 4), (2, 4, 4))])
def test_exchange_fills_periodic_images(rng, nx, mb):
    mesh = build_mesh(MeshConfig(nx=nx, mb=mb), LoopPolicy(Pattern.FLAT1D, workers=2))
    n1, n2, n3 = nx
    u, g, b = _periodic_fields(rng, n1, n2, n3)
    scatter_global(mesh, u, *b)
    exchange_ghosts(mesh)
    for blk in mesh.blocks:
        nk, nj, ni = blk.shape
        gi = (blk.offset[0] - blk.ng + np.arange(ni + 1)) % n1
        gj = (blk.offset[1] - blk.ng + np.arange(nj + 1)) % n2
        gk = (blk.offset[2] - blk.ng + np.arange(nk + 1)) % n3
        cells = np.ix_(gk[:nk], gj[:nj], gi[:ni])
        np.testing.assert_array_equal(blk.u, u[(slice(None),) + cells])
        np.testing.assert_array_equal(blk.b1f, g[0][np.ix_(gk[:nk], gj[:nj], gi)])
        np.testing.assert_array_equal(blk.b2f, g[1][np.ix_(gk[:nk], gj, gi[:ni])])
        np.testing.assert_array_equal(blk.b3f, g[2][np.ix_(gk, gj[:nj], gi[:ni])])


def test_pack_order_and_unpack_roundtrip(rng):
    mesh = build_mesh(MeshConfig(nx=(4, 4, 4)))
    blk = mesh.blocks[0]
    blk.u[...] = rng.random(blk.u.shape)
    for a in blk.state.bf:
        a[...] = rng.random(a.shape)
    face = FaceId(1, False)
    buf = pack_boundary(blk, face)
    ng, nk, nj = blk.ng, blk.shape[0], blk.shape[1]
    cells = nk * nj * ng
    # variable-major, then k-j-i with i fastest
    np.testing.assert_array_equal(buf.data[:cells], blk.u[0, :, :, 2:4].ravel())
    np.testing.assert_array_equal(buf.data[cells:2 * cells], blk.u[1, :, :, 2:4].ravel())
    off = 8 * cells
    tang = blk.b2f[:, :, 2:4].ravel()
    np.testing.assert_array_equal(buf.data[off:off + tang.size], tang)
    assert buf.data.size == buffer_length(blk, face)
    # unpacking the same buffer on the opposite side lands in the high ghosts
    unpack_boundary(blk, FaceId(1, True), buf)
    np.testing.assert_array_equal(blk.u[:, :, :, 6:8], blk.u[:, :, :, 2:4])


def test_unpack_length_mismatch():
    mesh = build_mesh(MeshConfig(nx=(4, 4, 4)))
    blk = mesh.blocks[0]
    for face in ALL_FACES:
        with pytest.raises(BufferError):
            unpack_boundary(blk, face, BoundaryBuffer(face, np.zeros(3)))


def test_max_divergence_matches_numpy(rng):
    mesh = build_mesh(MeshConfig(nx=(6, 6, 6), mb=(3, 6, 6), length=(1.0, 2.0, 3.0)))
    n = 6
    b1, b2, b3 = rng.random((n, n, n + 1)), rng.random((n, n + 1, n)), rng.random((n + 1, n, n))
    scatter_global(mesh, np.zeros((8, n, n, n)), b1, b2, b3)
    dx1, dx2, dx3 = mesh.cfg.dx
    div = (np.diff(b1, axis=2) / dx1 + np.diff(b2, axis=1) / dx2 + np.diff(b3, axis=0) / dx3)
    assert max_divergence_b(mesh) == np.abs(div).max()


def test_gather_scatter_roundtrip(rng):
    mesh = build_mesh(MeshConfig(nx=(4, 6, 2), mb=(2, 3, 1)))
    u = rng.random((8, 2, 6, 4))
    b = rng.random((2, 6, 5)), rng.random((2, 7, 4)), rng.random((3, 6, 4))
    scatter_global(mesh, u, *b)
    got = gather_global(mesh)
    np.testing.assert_array_equal(got[0], u)
    for x, y in zip(got[1:], b):
        np.testing.assert_array_equal(x, y)
