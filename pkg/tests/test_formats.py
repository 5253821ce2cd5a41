import struct

import numpy as np
import pytest

from smolgs.errors import CorruptStream, EmptyCloud, InvalidValue
from smolgs.fixtures import make_fixture
from smolgs.formats import (
    SPLT_HEADER,
    SPLT_MAGIC,
    detect_format,
    read_ascii_xyz,
    read_gaussian_ply,
    read_splt,
    write_ascii_xyz,
    write_attribute_ply,
    write_splt,
)


def write_test_ply(path, n=5, drop=None, fmt="binary_little_endian", extra_sh=0):
    rng = np.random.default_rng(0)
    names = ["x", "y", "z", "f_dc_0", "f_dc_1", "f_dc_2"]
    names += [f"f_rest_{i}" for i in range(extra_sh)]
    names += ["opacity", "scale_0", "scale_1", "scale_2",
              "rot_0", "rot_1", "rot_2", "rot_3"]
    if drop:
        names = [nm for nm in names if nm != drop]
    header = ["ply", f"format {fmt} 1.0", f"element vertex {n}"]
    header += [f"property float {nm}" for nm in names]
    header.append("end_header")
    data = rng.normal(0, 1, (n, len(names))).astype("<f4")
    with open(path, "wb") as fh:
        fh.write(("\n".join(header) + "\n").encode())
        fh.write(data.tobytes())
    return names, data


class TestSplt:
    def test_roundtrip(self, tmp_path):
        cloud = make_fixture("sphere", 100, seed=1)
        path = tmp_path / "a.splt"
        write_splt(path, cloud)
        back = read_splt(path)
        # storage is f32: exact after one f32 round-trip
        np.testing.assert_array_equal(back.xyz, cloud.xyz.astype(np.float32))
        np.testing.assert_array_equal(back.features, cloud.features.astype(np.float32))
        assert back.n_f == cloud.n_f

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "bad.splt"
        path.write_bytes(b"NOPE" + b"\x00" * 12)
        with pytest.raises(CorruptStream):
            read_splt(path)

    def test_ragged_body(self, tmp_path):
        path = tmp_path / "ragged.splt"
        path.write_bytes(SPLT_HEADER.pack(SPLT_MAGIC, 8) + b"\x00" * 10)
        with pytest.raises(CorruptStream):
            read_splt(path)

    def test_empty(self, tmp_path):
        path = tmp_path / "empty.splt"
        path.write_bytes(SPLT_HEADER.pack(SPLT_MAGIC, 8))
        with pytest.raises(EmptyCloud):
            read_splt(path)


class TestAscii:
    def test_roundtrip(self, tmp_path):
        cloud = make_fixture("cube", 50, seed=2)
        path = tmp_path / "pts.xyz"
        write_ascii_xyz(path, cloud)
        back = read_ascii_xyz(path)
        np.testing.assert_allclose(back.xyz, cloud.xyz, rtol=0, atol=0)
        assert np.all(back.features == 0)

    def test_blank_lines_skipped(self, tmp_path):
        path = tmp_path / "pts.xyz"
        path.write_text("1 2 3\n\n4 5 6\n")
        assert len(read_ascii_xyz(path)) == 2

    def test_short_line(self, tmp_path):
        path = tmp_path / "pts.xyz"
        path.write_text("1 2\n")
        with pytest.raises(InvalidValue) as exc:
            read_ascii_xyz(path)
        assert "line 1" in str(exc.value)

    def test_non_numeric(self, tmp_path):
        path = tmp_path / "pts.xyz"
        path.write_text("1 2 3\n1 spam 3\n")
        with pytest.raises(InvalidValue) as exc:
            read_ascii_xyz(path)
        assert "line 2" in str(exc.value)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "pts.xyz"
        path.write_text("\n\n")
        with pytest.raises(EmptyCloud):
            read_ascii_xyz(path)


class TestGaussianPly:
    def test_ingest(self, tmp_path):
        path = tmp_path / "scene.ply"
        names, data = write_test_ply(path, n=7, extra_sh=9)
        cloud = read_gaussian_ply(path)
        assert len(cloud) == 7 and cloud.n_f == 8
        np.testing.assert_array_equal(cloud.xyz[:, 0], data[:, names.index("x")].astype(np.float64))
        np.testing.assert_array_equal(
            cloud.features[:, 2], data[:, names.index("f_dc_2")].astype(np.float64)
        )
        # higher-order SH dropped; remaining channels zero
        assert np.all(cloud.features[:, 3:] == 0)
        np.testing.assert_array_equal(
            cloud.scales[:, 1], data[:, names.index("scale_1")].astype(np.float64)
        )

    def test_missing_property_named(self, tmp_path):
        path = tmp_path / "bad.ply"
        write_test_ply(path, drop="opacity")
        with pytest.raises(CorruptStream) as exc:
            read_gaussian_ply(path)
        assert "opacity" in str(exc.value)

    def test_big_endian_rejected(self, tmp_path):
        path = tmp_path / "be.ply"
        write_test_ply(path, fmt="binary_big_endian")
        with pytest.raises(CorruptStream):
            read_gaussian_ply(path)

    def test_truncated_body(self, tmp_path):
        path = tmp_path / "trunc.ply"
        write_test_ply(path, n=10)
        raw = path.read_bytes()
        path.write_bytes(raw[:-20])
        with pytest.raises(CorruptStream):
            read_gaussian_ply(path)

    def test_not_ply(self, tmp_path):
        path = tmp_path / "x.ply"
        path.write_bytes(b"hello world\n")
        with pytest.raises(CorruptStream):
            read_gaussian_ply(path)

    def test_nf_too_small(self, tmp_path):
        path = tmp_path / "scene.ply"
        write_test_ply(path)
        with pytest.raises(InvalidValue):
            read_gaussian_ply(path, n_f=2)


class TestAttributePly:
    def test_written_file_is_readable_binary_ply(self, tmp_path):
        path = tmp_path / "out.ply"
        n = 4
        rng = np.random.default_rng(3)
        write_attribute_ply(
            path,
            rng.normal(0, 1, (n, 3)),
            rng.uniform(0, 1, (n, 3)),
            rng.uniform(0, 1, n),
            rng.uniform(0, 1, (n, 3)),
            rng.normal(0, 1, (n, 4)),
        )
        raw = path.read_bytes()
        header, _, body = raw.partition(b"end_header\n")
        assert header.startswith(b"ply\nformat binary_little_endian 1.0")
        assert b"element vertex 4" in header
        assert len(body) == n * 14 * 4  # 14 f32 fields per record


class TestDetect:
    def test_all_three(self, tmp_path):
        cloud = make_fixture("sphere", 10, seed=4)
        ply, splt, xyz = tmp_path / "a.ply", tmp_path / "a.splt", tmp_path / "a.xyz"
        write_test_ply(ply)
        write_splt(splt, cloud)
        write_ascii_xyz(xyz, cloud)
        assert detect_format(ply) == "ply"
        assert detect_format(splt) == "splt"
        assert detect_format(xyz) == "ascii"
