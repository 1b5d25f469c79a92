"""Throughput of entropy backends when producing unit-interval doubles."""
from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import asdict, dataclass
from typing import Optional, Sequence

from .entropy import open_source, read_doubles
from .errors import EntropyError, InvalidParameter

__all__ = ["BenchRow", "run_bench", "rows_to_csv", "rows_to_json", "parse_sizes", "WARMUP"]

WARMUP = 1000
CSV_HEADER = ["backend", "size", "elapsed_s", "throughput_per_s", "status"]


@dataclass
class BenchRow:
    backend: str
    backend_kind: str
    sample_size: int
    elapsed: Optional[float]
    throughput: Optional[float]
    status: str = "ok"
    error: Optional[str] = None

    @property
    def ok(self):
        return self.status == "ok"


def _time_once(spec, size, warmup):
    """Seconds needed to draw ``size`` doubles from a freshly opened source."""
    with open_source(spec) as src:
        read_doubles(src, warmup)
        t0 = time.perf_counter()
        read_doubles(src, size)
        return time.perf_counter() - t0


def run_bench(backends: Sequence[str], sizes: Sequence[int], repeats: int = 5, warmup: int = WARMUP):
    """Time every backend at every sample size.

    Each cell opens a fresh source, draws ``warmup`` values untimed, then times
    the draw of ``size`` values; the minimum over ``repeats`` runs is kept. A
    backend failure marks that cell ``failed`` and the run carries on.

    Returns:
        One :class:`BenchRow` per backend and size, backends outermost.
    """
    sizes = [int(s) for s in sizes]
    if not backends:
        raise InvalidParameter("no backends given")
    if not sizes or any(s < 1 for s in sizes) or sizes != sorted(sizes):
        raise InvalidParameter(f"sizes must be positive and ascending, got {sizes}")
    if repeats < 1:
        raise InvalidParameter(f"repeats must be positive, got {repeats}")
    # parse everything up front so a typo fails before any timing starts
    kinds = {spec: open_source(spec).kind for spec in backends}
    rows = []
    for spec in backends:
        for size in sizes:
            try:
                best = min(_time_once(spec, size, warmup) for _ in range(repeats))
            except EntropyError as exc:
                rows.append(BenchRow(spec, kinds[spec], size, None, None, "failed", type(exc).__name__))
                continue
            best = max(best, 1e-9)
            rows.append(BenchRow(spec, kinds[spec], size, best, size / best))
    return rows


def _fmt(x, redact):
    if x is None or redact:
        return ""
    return repr(x)


def rows_to_csv(rows, redact_timings: bool = False) -> str:
    """CSV text with header ``backend,size,elapsed_s,throughput_per_s,status``.

    ``redact_timings`` blanks the two timing columns so the output is
    reproducible byte for byte.
    """
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow([r.backend, r.sample_size, _fmt(r.elapsed, redact_timings),
                    _fmt(r.throughput, redact_timings), r.status])
    return buf.getvalue()


def rows_to_json(rows, redact_timings: bool = False) -> str:
    out = []
    for r in rows:
        d = asdict(r)
        if redact_timings:
            d["elapsed"] = d["throughput"] = None
        out.append(d)
    return json.dumps(out, indent=2) + "\n"


def parse_sizes(text: str) -> list[int]:
    """Parse ``"1e1..1e5"`` (every decade in between) or ``"10,100,5000"``."""
    text = text.strip()
    try:
        if ".." in text:
            lo, hi = (float(p) for p in text.split(".."))
            a, b = math.log10(lo), math.log10(hi)
            if lo < 1 or hi < lo or a != int(a) or b != int(b):
                raise ValueError
            return [10 ** e for e in range(int(a), int(b) + 1)]
        sizes = [int(float(p)) for p in text.split(",") if p.strip()]
    except ValueError:
        raise InvalidParameter(f"cannot parse sizes {text!r}") from None
    if not sizes:
        raise InvalidParameter("empty size list")
    return sizes
