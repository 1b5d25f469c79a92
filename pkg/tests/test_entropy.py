import math
import threading

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from qrs import entropy
from qrs.entropy import (
    ByteStreamDevice,
    DeterministicPrng,
    LockedSource,
    OsEntropy,
    RemoteQrng,
    open_source,
    read_double_in,
    read_double_unit,
    read_doubles,
    read_int_in,
    read_ints,
    rejection_threshold,
)
from qrs.errors import DeviceUnavailable, InvalidParameter, InvalidRange, ShortRead
from oracles import splitmix64


def le_bytes(words):
    return b"".join(w.to_bytes(8, "little") for w in words)


class TestReadBytes:
    def test_zero_length(self):
        src = DeterministicPrng(1)
        assert src.read_bytes(0) == b""
        assert src.byte_counter == 0

    def test_equal_seeds_equal_streams(self):
        assert DeterministicPrng(77).read_bytes(16) == DeterministicPrng(77).read_bytes(16)

    def test_golden_bytes(self):
        assert DeterministicPrng(1).read_bytes(16).hex() == "c15c0289ec2d0a9167ec8e65a18debbe"
        assert DeterministicPrng(1).read_bytes(40) == le_bytes(splitmix64(1, 5))

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.integers(0, 37), max_size=20))
    def test_chunking_and_accounting(self, sizes):
        src = DeterministicPrng(3)
        chunks = [src.read_bytes(n) for n in sizes]
        assert [len(c) for c in chunks] == sizes
        assert src.byte_counter == sum(sizes)
        assert b"".join(chunks) == DeterministicPrng(3).read_bytes(sum(sizes))

    def test_counter_monotone_across_mixed_reads(self):
        src = DeterministicPrng(5)
        seen = [src.byte_counter]
        for _ in range(20):
            read_int_in(src, 0, 1000)
            read_double_unit(src)
            seen.append(src.byte_counter)
        assert seen == sorted(seen)

    def test_short_read_on_small_fixture(self, tmp_path):
        path = tmp_path / "eight.bin"
        path.write_bytes(bytes(8))
        with pytest.raises(ShortRead):
            ByteStreamDevice(path).read_bytes(16)

    def test_device_reads_sequentially(self, fixture_file):
        path = fixture_file(64)
        raw = path.read_bytes()
        src = ByteStreamDevice(path)
        assert src.read_bytes(10) + src.read_bytes(30) == raw[:40]
        assert src.byte_counter == 40

    def test_missing_device(self, tmp_path):
        with pytest.raises(DeviceUnavailable):
            ByteStreamDevice(tmp_path / "nope").read_bytes(1)

    def test_negative_length(self):
        with pytest.raises(InvalidParameter):
            DeterministicPrng(1).read_bytes(-1)

    def test_os_entropy_length(self):
        assert len(OsEntropy().read_bytes(33)) == 33


class TestReadIntIn:
    def test_singleton_consumes_nothing(self):
        src = DeterministicPrng(1)
        assert read_int_in(src, 5, 5) == 5
        assert src.byte_counter == 0

    def test_coin(self):
        src = DeterministicPrng(2)
        assert {read_int_in(src, 0, 1) for _ in range(200)} == {0, 1}

    def test_invalid_ranges(self):
        src = DeterministicPrng(1)
        with pytest.raises(InvalidRange):
            read_int_in(src, 3, 2)
        with pytest.raises(InvalidRange):
            read_int_in(src, 0, 2**32)
        assert 0 <= read_int_in(src, 0, 2**32 - 1) < 2**32

    def test_die_chi_square(self):
        src = DeterministicPrng(7)
        counts = np.bincount(read_ints(src, 0, 5, 10**5), minlength=6)
        assert stats.chisquare(counts).pvalue > 0.001
        # each face within 5 sigma of 1/6
        sigma = math.sqrt(10**5 * (1 / 6) * (5 / 6))
        assert np.all(np.abs(counts - 10**5 / 6) < 5 * sigma)

    @settings(max_examples=200)
    @given(span=st.integers(1, 2**32))
    def test_acceptance_region_is_multiple_of_span(self, span):
        width, limit = rejection_threshold(span)
        assert limit % span == 0
        assert 0 < limit <= 256**width
        assert 256**width - limit < span
        assert width == 1 or 256 ** (width - 1) < span

    @pytest.mark.parametrize("lo,hi", [(0, 5), (-3, 300), (10, 70000), (0, 2**32 - 1)])
    def test_batch_equals_sequential(self, lo, hi):
        a, b = DeterministicPrng(11), DeterministicPrng(11)
        seq = [read_int_in(a, lo, hi) for _ in range(300)]
        assert read_ints(b, lo, hi, 300).tolist() == seq
        assert a.byte_counter == b.byte_counter


class TestDoubles:
    def test_zero_and_max_words(self, tmp_path):
        path = tmp_path / "pattern.bin"
        path.write_bytes(bytes(8) + b"\xff" * 8)
        src = ByteStreamDevice(path)
        assert read_double_unit(src) == 0.0
        assert read_double_unit(src) == (2**53 - 1) / 2**53

    def test_mean(self):
        u = read_doubles(DeterministicPrng(8), 10**5)
        assert abs(u.mean() - 0.5) < 5 * math.sqrt(1 / 12 / 10**5)
        assert u.min() >= 0.0 and u.max() < 1.0

    def test_batch_equals_sequential(self):
        a, b = DeterministicPrng(12), DeterministicPrng(12)
        assert read_doubles(b, 100).tolist() == [read_double_unit(a) for _ in range(100)]

    def test_identity_scaling(self):
        assert read_double_in(DeterministicPrng(4), 0, 1) == read_double_unit(DeterministicPrng(4))

    def test_tiny_range_containment(self):
        src = DeterministicPrng(4)
        hi = 2.0 + 4 * np.finfo(float).eps
        for _ in range(2000):
            assert 2.0 <= read_double_in(src, 2.0, hi) < hi

    def test_phase_range(self):
        src = DeterministicPrng(4)
        x = [read_double_in(src, 0, 2 * math.pi) for _ in range(1000)]
        assert min(x) >= 0 and max(x) < 2 * math.pi

    @pytest.mark.parametrize("lo,hi", [(1, 1), (2, 1), (0, math.inf), (math.nan, 1)])
    def test_invalid(self, lo, hi):
        with pytest.raises(InvalidRange):
            read_double_in(DeterministicPrng(1), lo, hi)


class TestDescribe:
    def test_prng(self):
        d = DeterministicPrng(1).describe()
        assert d.backend_kind == "prng"
        assert d.serial_number is None and d.device_id is None and d.device_type is None

    def test_os(self):
        d = OsEntropy().describe()
        assert d.backend_kind == "os" and d.device_type is None

    def test_device(self, fixture_file):
        d = ByteStreamDevice(fixture_file(16)).describe()
        assert d.backend_kind == "device"
        assert d.device_type == "file"
        assert d.serial_number and isinstance(d.device_id, int)

    def test_character_device(self):
        d = ByteStreamDevice("/dev/urandom").describe()
        assert d.device_type == "character-device"

    def test_remote_unreachable(self, dead_endpoint):
        with pytest.raises(DeviceUnavailable):
            RemoteQrng(dead_endpoint, timeout_ms=500).describe()

    def test_remote_info(self, mock_qrng):
        d = RemoteQrng(mock_qrng).describe()
        assert (d.backend_kind, d.library_version, d.serial_number, d.device_type, d.device_id) == (
            "remote", "mock-qrng 2.1", "QX-0042", "usb-mock", 7,
        )


class TestRemote:
    def test_round_trip(self, mock_qrng):
        src = RemoteQrng(mock_qrng)
        got = src.read_bytes(10) + src.read_bytes(300)
        rng = np.random.default_rng(5)
        want = rng.integers(0, 256, 10, dtype=np.uint8).tobytes() + rng.integers(0, 256, 300, dtype=np.uint8).tobytes()
        assert got == want
        assert src.byte_counter == 310

    def test_non_200_is_unavailable(self, mock_qrng):
        src = RemoteQrng(mock_qrng.replace("/qrng", "/broken"))
        with pytest.raises(DeviceUnavailable):
            src.read_bytes(4)

    def test_unreachable(self, dead_endpoint):
        with pytest.raises(DeviceUnavailable):
            RemoteQrng(dead_endpoint, timeout_ms=500).read_bytes(4)

    def test_large_reads_are_chunked(self, mock_qrng, monkeypatch):
        monkeypatch.setattr(entropy, "MAX_REQUEST_BYTES", 64)
        assert len(RemoteQrng(mock_qrng).read_bytes(200)) == 200


class TestSpecs:
    @pytest.mark.parametrize(
        "spec,cls",
        [("prng:42", DeterministicPrng), ("prng:0x10", DeterministicPrng), ("os", OsEntropy),
         ("dev:/dev/urandom", ByteStreamDevice), ("http:http://localhost:1/q", RemoteQrng),
         ("http://localhost:1/q", RemoteQrng)],
    )
    def test_parse(self, spec, cls):
        assert isinstance(open_source(spec), cls)

    def test_http_endpoint_kept(self):
        assert open_source("http:http://127.0.0.1:9/x").endpoint == "http://127.0.0.1:9/x"

    @pytest.mark.parametrize("spec", ["", "prng", "prng:abc", "prng:-1", "dev:", "quantis", f"prng:{2**64}"])
    def test_reject(self, spec):
        with pytest.raises(InvalidParameter):
            open_source(spec)

    def test_env_default(self, monkeypatch):
        monkeypatch.setenv("QRS_ENTROPY", "prng:9")
        src = entropy.source_from_env()
        assert isinstance(src, DeterministicPrng) and src.seed == 9


def test_locked_source_shares_safely():
    src = LockedSource(DeterministicPrng(21))
    chunks = []
    lock = threading.Lock()

    def worker():
        local = [src.read_bytes(8) for _ in range(500)]
        with lock:
            chunks.extend(local)

    threads = [threading.Thread(target=worker) for _ in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert src.byte_counter == 4 * 500 * 8
    fresh = DeterministicPrng(21)
    assert sorted(chunks) == sorted(fresh.read_bytes(8) for _ in range(2000))
