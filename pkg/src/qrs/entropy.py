"""Randomness backends and the scaled reads built on top of them.

Every backend is an :class:`EntropySource` that hands out raw bytes through
:meth:`EntropySource.read_bytes`. Integers, unit doubles and bulk arrays are
derived from those bytes here, identically for every backend, so a recorded
byte stream replays to the same numbers whatever produced it.

Sources are single-owner objects. Wrap one in :class:`LockedSource` before
sharing it between threads.
"""
from __future__ import annotations

import json
import math
import os
import stat
import threading
import urllib.error
import urllib.request
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from . import kernels
from .errors import DeviceUnavailable, InvalidParameter, InvalidRange, ShortRead

__all__ = [
    "EntropySource",
    "DeterministicPrng",
    "OsEntropy",
    "ByteStreamDevice",
    "RemoteQrng",
    "LockedSource",
    "SourceDescriptor",
    "open_source",
    "source_from_env",
    "read_bytes",
    "read_int_in",
    "read_ints",
    "read_double_unit",
    "read_doubles",
    "read_double_in",
    "read_normals",
    "describe",
    "rejection_threshold",
]

ENV_VAR = "QRS_ENTROPY"
DEFAULT_SPEC = "os"
DEFAULT_TIMEOUT_MS = 5000
MAX_REQUEST_BYTES = 1 << 20
INV_2_53 = 1.0 / (1 << 53)


def _library_version():
    from . import __version__

    return f"{__version__}+{kernels.BACKEND}"


@dataclass(frozen=True)
class SourceDescriptor:
    """Metadata about a backend, in the spirit of a device info query."""

    backend_kind: str
    library_version: str
    serial_number: Optional[str] = None
    device_id: Optional[int] = None
    device_type: Optional[str] = None

    def to_dict(self):
        """Fields as a dict; absent device fields are left out."""
        return {k: v for k, v in asdict(self).items() if v is not None}


class EntropySource:
    """Base class for byte suppliers.

    Subclasses implement :meth:`_read` and :meth:`describe`. The public
    :meth:`read_bytes` enforces the length contract and keeps
    :attr:`byte_counter` up to date.
    """

    kind = "abstract"
    is_device = False

    def __init__(self):
        self._consumed = 0

    @property
    def byte_counter(self) -> int:
        """Total number of raw bytes consumed from this source."""
        return self._consumed

    def read_bytes(self, n: int) -> bytes:
        if n < 0:
            raise InvalidParameter(f"cannot read a negative number of bytes ({n})")
        if n == 0:
            return b""
        data = self._read(n)
        self._consumed += len(data)
        if len(data) != n:
            raise ShortRead(f"{self.kind} source returned {len(data)} of {n} bytes")
        return data

    def _read(self, n: int) -> bytes:
        raise NotImplementedError

    def describe(self) -> SourceDescriptor:
        raise NotImplementedError

    def close(self):
        pass

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    # convenience wrappers around the module-level readers
    def read_int_in(self, lo, hi):
        return read_int_in(self, lo, hi)

    def read_double_unit(self):
        return read_double_unit(self)

    def read_double_in(self, lo, hi):
        return read_double_in(self, lo, hi)


class DeterministicPrng(EntropySource):
    """Seeded splitmix64 generator.

    Each 64-bit output is emitted as 8 little-endian bytes. Leftover bytes of a
    partially used output are kept, so the stream does not depend on how reads
    are chunked.
    """

    kind = "prng"

    def __init__(self, seed: int):
        super().__init__()
        seed = int(seed)
        if not 0 <= seed < 1 << 64:
            raise InvalidParameter(f"seed must fit in 64 unsigned bits, got {seed}")
        self.seed = seed
        self._state = seed
        self._pending = b""

    def _read(self, n):
        have = len(self._pending)
        if have >= n:
            out, self._pending = self._pending[:n], self._pending[n:]
            return out
        nwords = -(-(n - have) // 8)
        words, self._state = kernels.splitmix64_words(self._state, nwords)
        fresh = words.astype("<u8", copy=False).tobytes()
        out = self._pending + fresh[: n - have]
        self._pending = fresh[n - have :]
        return out

    def describe(self):
        return SourceDescriptor("prng", _library_version())

    def __repr__(self):
        return f"DeterministicPrng(seed={self.seed})"


class OsEntropy(EntropySource):
    """The operating system CSPRNG (``os.urandom``)."""

    kind = "os"

    def _read(self, n):
        return os.urandom(n)

    def describe(self):
        return SourceDescriptor("os", _library_version())

    def __repr__(self):
        return "OsEntropy()"


class ByteStreamDevice(EntropySource):
    """Sequential reader over a character device or a recorded-entropy file."""

    kind = "device"
    is_device = True

    def __init__(self, path):
        super().__init__()
        self.path = os.fspath(path)
        self._fh = None

    def _open(self):
        if self._fh is None:
            try:
                self._fh = open(self.path, "rb", buffering=0)
            except OSError as exc:
                raise DeviceUnavailable(f"cannot open {self.path}: {exc.strerror}") from exc
        return self._fh

    def _read(self, n):
        fh = self._open()
        chunks = []
        remaining = n
        while remaining:
            try:
                chunk = fh.read(remaining)
            except OSError as exc:
                raise DeviceUnavailable(f"read from {self.path} failed: {exc}") from exc
            if not chunk:
                break
            chunks.append(chunk)
            remaining -= len(chunk)
        return b"".join(chunks)

    def describe(self):
        try:
            st = os.stat(self.path)
        except OSError as exc:
            raise DeviceUnavailable(f"cannot stat {self.path}: {exc.strerror}") from exc
        if stat.S_ISCHR(st.st_mode):
            dtype, dev_id = "character-device", st.st_rdev
        elif stat.S_ISBLK(st.st_mode):
            dtype, dev_id = "block-device", st.st_rdev
        elif stat.S_ISFIFO(st.st_mode):
            dtype, dev_id = "fifo", st.st_ino
        else:
            dtype, dev_id = "file", st.st_ino
        return SourceDescriptor(
            "device",
            _library_version(),
            serial_number=f"{st.st_dev:x}-{st.st_ino:x}",
            device_id=int(dev_id),
            device_type=dtype,
        )

    def close(self):
        if self._fh is not None:
            self._fh.close()
            self._fh = None

    def __repr__(self):
        return f"ByteStreamDevice({self.path!r})"


class RemoteQrng(EntropySource):
    """Client for a minimal HTTP random-bytes service.

    ``GET {endpoint}/randbytes?n=<count>`` must answer 200 with exactly
    ``count`` bytes; ``GET {endpoint}/info`` answers a JSON object with
    ``version``, ``serial`` and ``device_type``.
    """

    kind = "remote"
    is_device = True

    def __init__(self, endpoint: str, timeout_ms: int = DEFAULT_TIMEOUT_MS):
        super().__init__()
        if timeout_ms <= 0:
            raise InvalidParameter("timeout must be positive")
        self.endpoint = endpoint.rstrip("/")
        self.timeout_ms = timeout_ms

    def _get(self, path):
        url = f"{self.endpoint}{path}"
        try:
            with urllib.request.urlopen(url, timeout=self.timeout_ms / 1000) as resp:
                if resp.status != 200:
                    raise DeviceUnavailable(f"{url} answered {resp.status}")
                return resp.read()
        except urllib.error.HTTPError as exc:
            raise DeviceUnavailable(f"{url} answered {exc.code}") from exc
        except (urllib.error.URLError, OSError, ValueError) as exc:
            raise DeviceUnavailable(f"{url} unreachable: {exc}") from exc

    def _read(self, n):
        chunks = []
        remaining = n
        while remaining:
            ask = min(remaining, MAX_REQUEST_BYTES)
            body = self._get(f"/randbytes?n={ask}")
            chunks.append(body[:ask])
            if len(body) < ask:
                break
            remaining -= ask
        return b"".join(chunks)

    def describe(self):
        try:
            info = json.loads(self._get("/info"))
            return SourceDescriptor(
                "remote",
                str(info["version"]),
                serial_number=str(info["serial"]),
                device_id=int(info.get("device_id", 0)),
                device_type=str(info["device_type"]),
            )
        except (ValueError, KeyError, TypeError) as exc:
            raise DeviceUnavailable(f"malformed /info response from {self.endpoint}") from exc

    def __repr__(self):
        return f"RemoteQrng({self.endpoint!r}, timeout_ms={self.timeout_ms})"


class LockedSource(EntropySource):
    """Exclusive-access guard that lets several threads share one source.

    Each ``read_bytes`` call is atomic. Multi-read draws (rejection loops,
    normal pairs) stay valid but their bytes may interleave with other
    threads, so cross-thread order is not reproducible.
    """

    def __init__(self, inner: EntropySource):
        super().__init__()
        self.inner = inner
        self.kind = inner.kind
        self.is_device = inner.is_device
        self._lock = threading.Lock()

    @property
    def byte_counter(self):
        return self.inner.byte_counter

    def read_bytes(self, n):
        with self._lock:
            return self.inner.read_bytes(n)

    def describe(self):
        with self._lock:
            return self.inner.describe()

    def close(self):
        with self._lock:
            self.inner.close()


def open_source(spec: str, timeout_ms: int = DEFAULT_TIMEOUT_MS) -> EntropySource:
    """Build a source from a textual spec.

    Accepted forms are ``prng:<seed>``, ``os``, ``dev:<path>`` and
    ``http:<url>`` (``http:http://host:port/path``).
    """
    spec = spec.strip()
    head, sep, rest = spec.partition(":")
    if spec == "os":
        return OsEntropy()
    if head == "prng" and sep:
        try:
            seed = int(rest, 0)
        except ValueError:
            raise InvalidParameter(f"bad prng seed in {spec!r}") from None
        return DeterministicPrng(seed)
    if head == "dev" and rest:
        return ByteStreamDevice(rest)
    if head in ("http", "https") and rest:
        url = rest if "://" in rest else f"{head}:{rest}"
        return RemoteQrng(url, timeout_ms=timeout_ms)
    raise InvalidParameter(f"unrecognised entropy spec {spec!r}")


def source_from_env(default: str = DEFAULT_SPEC) -> EntropySource:
    return open_source(os.environ.get(ENV_VAR) or default)


def read_bytes(src: EntropySource, n: int) -> bytes:
    return src.read_bytes(n)


def rejection_threshold(span: int):
    """Return ``(width, limit)`` for unbiased draws from ``range(span)``.

    ``width`` is the smallest number of bytes covering ``span`` values and
    ``limit`` the largest multiple of ``span`` not exceeding ``256**width``.
    Words below ``limit`` are accepted and reduced modulo ``span``.
    """
    if not 1 <= span <= 1 << 32:
        raise InvalidRange(f"span must be in [1, 2**32], got {span}")
    width = max(1, ((span - 1).bit_length() + 7) // 8)
    total = 1 << (8 * width)
    return width, total - total % span


def _check_int_range(lo, hi):
    if lo > hi:
        raise InvalidRange(f"empty range [{lo}, {hi}]")
    if hi - lo >= 1 << 32:
        raise InvalidRange(f"range [{lo}, {hi}] wider than 2**32")


def read_int_in(src: EntropySource, lo: int, hi: int) -> int:
    """Uniform integer in the inclusive range ``[lo, hi]``."""
    lo, hi = int(lo), int(hi)
    _check_int_range(lo, hi)
    span = hi - lo + 1
    if span == 1:
        return lo
    width, limit = rejection_threshold(span)
    while True:
        word = int.from_bytes(src.read_bytes(width), "big")
        if word < limit:
            return lo + word % span


def read_ints(src: EntropySource, lo: int, hi: int, count: int) -> np.ndarray:
    """``count`` draws of :func:`read_int_in`, consuming the same bytes."""
    lo, hi = int(lo), int(hi)
    _check_int_range(lo, hi)
    span = hi - lo + 1
    if span == 1 or count == 0:
        return np.full(count, lo, dtype=np.int64)
    width, limit = rejection_threshold(span)
    parts = []
    need = count
    while need:
        buf = src.read_bytes(width * need)
        values, _ = kernels.rejection_ints(buf, width, span, limit, need)
        parts.append(values)
        need -= len(values)
    return np.concatenate(parts) + lo


def read_double_unit(src: EntropySource) -> float:
    """Uniform double on the dyadic grid ``k / 2**53`` in ``[0, 1)``."""
    return (int.from_bytes(src.read_bytes(8), "big") >> 11) * INV_2_53


def read_doubles(src: EntropySource, count: int) -> np.ndarray:
    """``count`` unit doubles, identical to repeated :func:`read_double_unit`."""
    return kernels.unit_doubles(src.read_bytes(8 * count))


def _check_real_range(lo, hi):
    if not (math.isfinite(lo) and math.isfinite(hi)) or not lo < hi:
        raise InvalidRange(f"need finite lo < hi, got [{lo}, {hi})")


def read_double_in(src: EntropySource, lo: float, hi: float) -> float:
    """Uniform double in ``[lo, hi)``."""
    lo, hi = float(lo), float(hi)
    _check_real_range(lo, hi)
    x = lo + (hi - lo) * read_double_unit(src)
    # rounding can land on hi for narrow ranges
    return x if x < hi else math.nextafter(hi, lo)


def read_doubles_in(src: EntropySource, lo: float, hi: float, count: int) -> np.ndarray:
    lo, hi = float(lo), float(hi)
    _check_real_range(lo, hi)
    x = lo + (hi - lo) * read_doubles(src, count)
    return np.where(x < hi, x, np.nextafter(hi, lo))


def read_normals(src: EntropySource, count: int) -> np.ndarray:
    """``count`` standard normal variates by the two-uniform Box-Muller form.

    Each variate consumes 16 bytes, plus 8 more for every zero first uniform
    that has to be redrawn.
    """
    parts = []
    carry = b""
    need = count
    while need:
        buf = carry + src.read_bytes(16 * need - len(carry))
        values, used = kernels.box_muller(buf, need)
        carry = buf[used:]
        parts.append(values)
        need -= len(values)
    if not parts:
        return np.empty(0, dtype=np.float64)
    return np.concatenate(parts)


def describe(src: EntropySource) -> SourceDescriptor:
    return src.describe()
