import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from pmhd.mhd.reconstruct import plm_reconstruct


def test_constant_line():
    line = np.tile(np.arange(1.0, 9.0), (9, 1))
    left, right = plm_reconstruct(line)
    np.testing.assert_array_equal(left, line[:6])
    np.testing.assert_array_equal(right, line[:6])


def test_linear_data_is_exact():
    x = np.arange(10.0)
    line = np.stack([0.5 + 0.25 * x] * 8, axis=1)
    left, right = plm_reconstruct(line)
    faces = 0.5 + 0.25 * (np.arange(2, 9) - 0.5)
    np.testing.assert_allclose(left[:, 0], faces, rtol=1e-15)
    np.testing.assert_allclose(right[:, 0], faces, rtol=1e-15)


def _mc(dl, dr):
    if dl * dr <= 0:
        return 0.0
    return np.sign(dl) * min(2 * abs(dl), 2 * abs(dr), 0.5 * abs(dl + dr))


def test_random_five_cell_stencils(rng):
    for _ in range(300):
        s = rng.normal(size=5)
        line = np.repeat(s[:, None], 8, axis=1)
        left, right = plm_reconstruct(line)
        # interfaces m=2 (cells 1|2) and m=3 (cells 2|3)
        slope_mid = _mc(s[2] - s[1], s[3] - s[2])
        if (s[2] - s[1]) * (s[3] - s[2]) <= 0:
            assert slope_mid == 0.0
            assert left[1, 0] == s[2] and right[0, 0] == s[2]
        assert left[1, 0] == s[2] + 0.5 * slope_mid
        assert right[0, 0] == s[2] - 0.5 * slope_mid


@given(st.lists(st.floats(-100, 100), min_size=6, max_size=20))
def test_interface_values_bounded_by_neighbours(vals):
    line = np.repeat(np.array(vals)[:, None], 8, axis=1)
    left, right = plm_reconstruct(line)
    for n, m in enumerate(range(2, len(vals) - 1)):
        lo, hi = min(vals[m - 1], vals[m]), max(vals[m - 1], vals[m])
        assert lo - 1e-12 <= left[n, 0] <= hi + 1e-12
        assert lo - 1e-12 <= right[n, 0] <= hi + 1e-12
