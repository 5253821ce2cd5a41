import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from smolgs.errors import InvalidCode
from smolgs.morton import (
    morton_decode,
    morton_decode_arrays,
    morton_encode,
    morton_encode_arrays,
)


def interleave_oracle(ix, iy, iz, depth):
    """Per-bit interleave, straight from the definition."""
    code = 0
    for k in range(depth):
        code |= ((ix >> k) & 1) << (3 * k)
        code |= ((iy >> k) & 1) << (3 * k + 1)
        code |= ((iz >> k) & 1) << (3 * k + 2)
    return code


def test_origin():
    assert morton_encode((0, 0, 0), 16) == 0


def test_unit_corner():
    assert morton_encode((1, 1, 1), 1) == 7


def test_documented_example():
    assert interleave_oracle(5, 3, 1, 3) == 87
    assert morton_encode((5, 3, 1), 3) == 87


def test_decode_simple():
    assert morton_decode(7, 1) == (1, 1, 1)
    assert morton_decode(0, 16) == (0, 0, 0)


def test_decode_rejects_large_code():
    with pytest.raises(InvalidCode):
        morton_decode(1 << 12, 4)


@given(
    st.integers(min_value=1, max_value=21),
    st.data(),
)
@settings(max_examples=200)
def test_roundtrip_property(depth, data):
    limit = (1 << depth) - 1
    ix = data.draw(st.integers(0, limit))
    iy = data.draw(st.integers(0, limit))
    iz = data.draw(st.integers(0, limit))
    code = morton_encode((ix, iy, iz), depth)
    assert code == interleave_oracle(ix, iy, iz, depth)
    assert morton_decode(code, depth) == (ix, iy, iz)


@pytest.mark.parametrize("depth", [1, 4, 8, 13, 21])
def test_roundtrip_arrays(depth):
    rng = np.random.default_rng(depth)
    n = 100_000 // 5
    limit = 1 << depth
    ix = rng.integers(0, limit, n, dtype=np.uint64)
    iy = rng.integers(0, limit, n, dtype=np.uint64)
    iz = rng.integers(0, limit, n, dtype=np.uint64)
    codes = morton_encode_arrays(ix, iy, iz, depth)
    dx, dy, dz = morton_decode_arrays(codes, depth)
    assert np.array_equal(dx, ix)
    assert np.array_equal(dy, iy)
    assert np.array_equal(dz, iz)


def test_child_index_convention():
    # Child index of the deepest level is (z<<2 | y<<1 | x).
    for x in range(2):
        for y in range(2):
            for z in range(2):
                assert morton_encode((x, y, z), 1) == (z << 2) | (y << 1) | x
