"""Command-line front end.

Exit codes: 0 success, 1 verification failure (or invalid file for
``check``), 2 usage error, 3 entropy backend failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import __version__, bench, qstates, randkit, stats
from .entropy import DEFAULT_SPEC, DEFAULT_TIMEOUT_MS, ENV_VAR, open_source
from .errors import EntropyError, InvariantViolation, QrsError
from .statefile import load_document, make_document, read_documents, timestamp

log = logging.getLogger("qrs")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BACKEND = 0, 1, 2, 3

GEN_KINDS = (
    "ket", "product-ket", "unitary", "local-unitary", "state-hs", "state-bures",
    "state-induced", "product-state", "dynamical", "ginibre", "simplex", "graph",
)


class UsageError(QrsError):
    pass


def _int_list(text):
    try:
        values = [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _entropy_spec(args):
    return args.entropy or os.environ.get(ENV_VAR) or DEFAULT_SPEC


def _seed_of(spec):
    head, _, rest = spec.partition(":")
    return int(rest, 0) if head == "prng" else None


def _one_dim(kind, dims):
    if len(dims) != 1:
        raise UsageError(f"--kind {kind} takes exactly one dimension, got {dims}")
    return dims[0]


def _generate(kind, src, args):
    """Return ``(document kind, object, dims, measure)`` for one draw."""
    dims = args.dims
    if kind == "ket":
        return "ket", qstates.random_ket(src, _one_dim(kind, dims)), dims, None
    if kind == "product-ket":
        return "ket", qstates.random_product_ket(src, dims), dims, None
    if kind == "unitary":
        return "unitary", qstates.random_unitary(src, _one_dim(kind, dims)), dims, None
    if kind == "local-unitary":
        return "unitary", qstates.random_local_unitary(src, dims), dims, None
    if kind == "state-hs":
        return "density", qstates.random_state_hs(src, _one_dim(kind, dims)), dims, "hs"
    if kind == "state-bures":
        return "density", qstates.random_state_bures(src, _one_dim(kind, dims)), dims, "bures"
    if kind == "state-induced":
        mu = qstates.MeasureSpec.parse(args.measure or "")
        if mu.kind != "induced":
            raise UsageError("--kind state-induced needs --measure induced:K")
        n = _one_dim(kind, dims)
        return "density", qstates.random_state_induced(src, n, mu.ancilla), dims, str(mu)
    if kind == "product-state":
        mu = qstates.MeasureSpec.parse(args.measure or "hs")
        return "density", qstates.random_product_state(src, dims, mu), dims, str(mu)
    if kind == "dynamical":
        d = qstates.random_dynamical_matrix(src, _one_dim(kind, dims), args.k)
        return "dynamical", d, dims, None
    if kind == "ginibre":
        if len(dims) not in (1, 2):
            raise UsageError("--kind ginibre takes one or two dimensions")
        m, n = (dims[0], dims[0]) if len(dims) == 1 else dims
        return "ginibre", randkit.ginibre_matrix(src, m, n), [m, n], None
    if kind == "simplex":
        return "simplex", randkit.random_simplex(src, _one_dim(kind, dims)), dims, None
    if kind == "graph":
        if args.edges is None:
            raise UsageError("--kind graph needs --edges")
        return "graph", randkit.random_graph(src, _one_dim(kind, dims), args.edges), dims, None
    raise UsageError(f"unknown kind {kind!r}")


def _atomic_write(path, text):
    """Write ``text`` to ``path`` via a temporary file, removed on failure."""
    path = Path(path)
    tmp = path.with_name(path.name + ".partial")
    try:
        with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    finally:
        if tmp.exists():
            tmp.unlink()


def cmd_gen(args):
    if args.count < 1:
        raise UsageError("--count must be positive")
    spec = _entropy_spec(args)
    created = timestamp(args.deterministic)
    lines = []
    with open_source(spec, timeout_ms=args.timeout_ms) as src:
        for _ in range(args.count):
            doc_kind, obj, dims, measure = _generate(args.kind, src, args)
            doc = make_document(doc_kind, obj, dims, measure, backend=src.kind, seed=_seed_of(spec), created=created)
            lines.append(json.dumps(doc, separators=(",", ":")))
    text = "\n".join(lines) + "\n"
    if args.output in (None, "-"):
        sys.stdout.write(text)
    else:
        _atomic_write(args.output, text)
    return EXIT_OK


def cmd_verify(args):
    spec = _entropy_spec(args)
    if args.experiment == "eigenvalues":
        report = stats.run_sharded("eigenvalues", spec, args.jobs, n=args.dim, samples=args.samples, bins=args.bins)
    else:
        report = stats.run_sharded("mean-fidelity", spec, args.jobs, K_values=args.K, pairs_per_K=args.pairs)
    out = Path(args.output or f"{args.experiment}.json")
    _atomic_write(out, report.to_json())
    _atomic_write(out.with_suffix(".csv"), report.to_csv())
    verdict = "pass" if report.passed else "FAIL"
    print(f"{report.experiment}: {verdict} ({report.samples} samples) -> {out}", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_bench(args):
    backends = [b for b in args.backends.split(",") if b.strip()]
    sizes = bench.parse_sizes(args.sizes)
    rows = bench.run_bench(backends, sizes, repeats=args.repeats, warmup=args.warmup)
    render = bench.rows_to_json if args.json else bench.rows_to_csv
    text = render(rows, redact_timings=args.deterministic)
    if args.output in (None, "-"):
        sys.stdout.write(text)
    else:
        _atomic_write(args.output, text)
    return EXIT_OK


def cmd_entropy_info(args):
    with open_source(_entropy_spec(args), timeout_ms=args.timeout_ms) as src:
        info = src.describe()
    print(json.dumps(info.to_dict(), indent=2))
    return EXIT_OK


def cmd_check(args):
    bad = 0
    docs = read_documents(args.path)
    for i, doc in enumerate(docs, 1):
        try:
            load_document(doc)
        except (InvariantViolation, QrsError, ValueError) as exc:
            bad += 1
            print(f"{args.path}:{i}: {exc}", file=sys.stderr)
    print(f"{len(docs) - bad}/{len(docs)} documents valid", file=sys.stderr)
    return EXIT_OK if bad == 0 and docs else EXIT_FAIL


def build_parser():
    p = argparse.ArgumentParser(prog="qrs", description="Random quantum states from pluggable entropy sources.")
    p.add_argument("--version", action="version", version=f"qrs {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    ent = argparse.ArgumentParser(add_help=False)
    ent.add_argument("--entropy", help=f"prng:<seed> | os | dev:<path> | http:<url> (default ${ENV_VAR} or 'os')")
    ent.add_argument("--timeout-ms", type=int, default=DEFAULT_TIMEOUT_MS)

    g = sub.add_parser("gen", parents=[ent], help="generate random objects as JSON lines")
    g.add_argument("--kind", required=True, choices=GEN_KINDS)
    g.add_argument("--dims", required=True, type=_int_list, help="comma-separated dimensions")
    g.add_argument("--measure", help="hs | bures | induced:K")
    g.add_argument("--k", type=int, default=0, help="zero eigenvalues of a dynamical matrix")
    g.add_argument("--edges", type=int, help="edge count for --kind graph")
    g.add_argument("--count", type=int, default=1)
    g.add_argument("-o", "--output")
    g.add_argument("--deterministic", action="store_true", help="fixed timestamps for reproducible output")
    g.set_defaults(func=cmd_gen)

    v = sub.add_parser("verify", parents=[ent], help="run a statistical experiment")
    v.add_argument("experiment", choices=("eigenvalues", "mean-fidelity"))
    v.add_argument("--dim", type=int, default=4)
    v.add_argument("--samples", type=int, default=2000)
    v.add_argument("--bins", type=int, default=40)
    v.add_argument("--K", type=_int_list, default=[1, 2, 5, 10])
    v.add_argument("--pairs", type=int, default=10000)
    v.add_argument("--jobs", type=int, default=1)
    v.add_argument("-o", "--output", help="report JSON path; the CSV goes next to it")
    v.add_argument("--deterministic", action="store_true")
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bench", help="time entropy backends")
    b.add_argument("--backends", required=True, help="comma-separated entropy specs")
    b.add_argument("--sizes", default="1e1..1e5", help="'1e1..1e5' or '10,100,1000'")
    b.add_argument("--repeats", type=int, default=5)
    b.add_argument("--warmup", type=int, default=bench.WARMUP)
    b.add_argument("--json", action="store_true")
    b.add_argument("-o", "--output")
    b.add_argument("--deterministic", action="store_true", help="blank the timing columns")
    b.set_defaults(func=cmd_bench)

    e = sub.add_parser("entropy-info", parents=[ent], help="describe an entropy backend")
    e.set_defaults(func=cmd_entropy_info)

    c = sub.add_parser("check", help="validate a generated state file")
    c.add_argument("path")
    c.set_defaults(func=cmd_check)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except EntropyError as exc:
        print(f"qrs: entropy backend failed: {exc}", file=sys.stderr)
        return EXIT_BACKEND
    except (QrsError, ValueError) as exc:
        print(f"qrs: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"qrs: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
