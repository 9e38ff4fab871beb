import numpy as np
import pytest

from socialgf.container import read_container, write_container
from socialgf.errors import ArtifactError


def test_roundtrip_bit_exact(tmp_path):
    rng = np.random.default_rng(0)
    arrays = {
        "a": rng.standard_normal((3, 4)),
        "b": np.arange(5, dtype=np.int64),
        "c": np.array([1, 0, 1], dtype=np.uint8),
    }
    meta = {"kind": "test", "nested": {"x": 1.5, "tags": ["p", "q"]}}
    path = tmp_path / "t.sgfd"
    write_container(path, meta, arrays)
    m2, a2, header = read_container(path)
    assert m2 == meta
    assert header["tool_version"]
    for k in arrays:
        assert a2[k].dtype == arrays[k].dtype
        assert np.array_equal(a2[k], arrays[k])


def test_same_input_same_bytes(tmp_path):
    arrays = {"x": np.linspace(0, 1, 7)}
    write_container(tmp_path / "a", {"k": 1}, arrays)
    write_container(tmp_path / "b", {"k": 1}, arrays)
    assert (tmp_path / "a").read_bytes() == (tmp_path / "b").read_bytes()


def test_bad_magic_rejected(tmp_path):
    p = tmp_path / "bad"
    p.write_bytes(b"NOPE" + b"\x00" * 32)
    with pytest.raises(ArtifactError, match="magic"):
        read_container(p)


def test_truncation_rejected(tmp_path):
    p = tmp_path / "t.sgfd"
    write_container(p, {"k": 1}, {"x": np.ones(10)})
    data = p.read_bytes()
    p.write_bytes(data[:-8])
    with pytest.raises(ArtifactError, match="truncated"):
        read_container(p)


def test_trailing_bytes_rejected(tmp_path):
    p = tmp_path / "t.sgfd"
    write_container(p, {"k": 1}, {"x": np.ones(3)})
    p.write_bytes(p.read_bytes() + b"junk")
    with pytest.raises(ArtifactError, match="trailing"):
        read_container(p)


def test_unsupported_dtype_rejected(tmp_path):
    with pytest.raises(ArtifactError, match="dtype"):
        write_container(tmp_path / "x", {}, {"f32": np.zeros(3, dtype=np.float32)})


def test_missing_file_raises(tmp_path):
    with pytest.raises(ArtifactError):
        read_container(tmp_path / "does_not_exist")
