"""Monte Carlo experiments comparing sampled states with closed-form predictions.

Each experiment is split into a *tally* (raw counts and sums, mergeable by
addition) and a *finalize* step producing an :class:`ExperimentReport`. That
split is what lets :func:`run_sharded` spread the sampling over processes
with independently seeded sources and still merge exactly.
"""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import stats as sps

from .entropy import EntropySource, open_source
from .errors import InvalidParameter
from .quantmetrics import fidelity, induced_mean_purity, mean_fidelity_2K
from .qstates import random_state_hs, random_state_induced

__all__ = [
    "Row",
    "ExperimentReport",
    "EigenTally",
    "FidelityTally",
    "eigenvalue_tally",
    "eigenvalue_experiment",
    "fidelity_tally",
    "mean_fidelity_experiment",
    "lambda_max_cdf",
    "run_sharded",
]

SIGMA_BAND = 5.0
MIN_EXPECTED = 5.0


@dataclass
class Row:
    x: float
    empirical: float
    analytic: Optional[float]
    stderr: float
    passed: Optional[bool]

    def to_dict(self):
        return {
            "x": self.x,
            "empirical": self.empirical,
            "analytic": self.analytic,
            "stderr": self.stderr,
            "pass": self.passed,
        }


@dataclass
class ExperimentReport:
    experiment: str
    samples: int
    rows: list
    summary: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        """True when every row carrying an analytic value is within the band."""
        return all(r.passed for r in self.rows if r.passed is not None)

    def to_dict(self):
        return {
            "experiment": self.experiment,
            "samples": self.samples,
            "rows": [r.to_dict() for r in self.rows],
            "summary": self.summary,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "empirical", "analytic", "stderr", "pass"])
        for r in self.rows:
            w.writerow([
                repr(r.x),
                repr(r.empirical),
                "" if r.analytic is None else repr(r.analytic),
                repr(r.stderr),
                "" if r.passed is None else str(r.passed).lower(),
            ])
        return buf.getvalue()


def _verdict(empirical, analytic, stderr):
    return bool(abs(empirical - analytic) < SIGMA_BAND * stderr)


# --- eigenvalue distribution ------------------------------------------------


@dataclass
class EigenTally:
    n: int
    bins: int
    samples: int = 0
    joint_counts: np.ndarray = None
    max_counts: np.ndarray = None
    ordered_sum: np.ndarray = None
    ordered_sumsq: np.ndarray = None
    purity_sum: float = 0.0
    purity_sumsq: float = 0.0
    max_simplex_error: float = 0.0

    def __post_init__(self):
        if self.joint_counts is None:
            self.joint_counts = np.zeros(self.bins, dtype=np.int64)
            self.max_counts = np.zeros(self.bins, dtype=np.int64)
            self.ordered_sum = np.zeros(self.n)
            self.ordered_sumsq = np.zeros(self.n)

    def __add__(self, other: "EigenTally") -> "EigenTally":
        if (self.n, self.bins) != (other.n, other.bins):
            raise InvalidParameter("cannot merge tallies of different shape")
        return EigenTally(
            self.n,
            self.bins,
            self.samples + other.samples,
            self.joint_counts + other.joint_counts,
            self.max_counts + other.max_counts,
            self.ordered_sum + other.ordered_sum,
            self.ordered_sumsq + other.ordered_sumsq,
            self.purity_sum + other.purity_sum,
            self.purity_sumsq + other.purity_sumsq,
            max(self.max_simplex_error, other.max_simplex_error),
        )


def _check_eigen_args(n, samples, bins):
    if n < 2:
        raise InvalidParameter(f"dimension must be at least 2, got {n}")
    if samples < 100:
        raise InvalidParameter(f"need at least 100 samples, got {samples}")
    if bins < 10:
        raise InvalidParameter(f"need at least 10 bins, got {bins}")


def eigenvalue_tally(src: EntropySource, n: int, samples: int, bins: int) -> EigenTally:
    """Sample ``samples`` HS states and accumulate their spectra."""
    tally = EigenTally(n, bins)
    spectra = np.empty((samples, n))
    for i in range(samples):
        spectra[i] = random_state_hs(src, n).eigenvalues()
    sums = spectra.sum(axis=1)
    err = max(float(np.max(np.abs(sums - 1.0))), float(max(0.0, -spectra.min())))
    ordered = spectra[:, ::-1]
    purity = np.sum(spectra**2, axis=1)
    tally.samples = samples
    tally.joint_counts = np.histogram(np.clip(spectra, 0.0, 1.0), bins=bins, range=(0.0, 1.0))[0]
    lo = 1.0 / n
    tally.max_counts = np.histogram(ordered[:, 0], bins=bins, range=(lo, 1.0))[0]
    tally.ordered_sum = ordered.sum(axis=0)
    tally.ordered_sumsq = (ordered**2).sum(axis=0)
    tally.purity_sum = float(purity.sum())
    tally.purity_sumsq = float((purity**2).sum())
    tally.max_simplex_error = err
    return tally


def lambda_max_cdf(x):
    """CDF of the largest eigenvalue of a 2x2 HS random state, on [1/2, 1]."""
    x = np.clip(np.asarray(x, dtype=np.float64), 0.5, 1.0)
    return (2.0 * x - 1.0) ** 3


def _merge_sparse(expected, observed):
    """Pool adjacent bins from the left until each expected count reaches 5."""
    e_out, o_out = [], []
    e_acc = o_acc = 0.0
    for e, o in zip(expected, observed):
        e_acc += e
        o_acc += o
        if e_acc >= MIN_EXPECTED:
            e_out.append(e_acc)
            o_out.append(o_acc)
            e_acc = o_acc = 0.0
    if e_acc or o_acc:
        if e_out:
            e_out[-1] += e_acc
            o_out[-1] += o_acc
        else:
            e_out.append(e_acc)
            o_out.append(o_acc)
    return np.array(e_out), np.array(o_out)


def _mean_se(total, total_sq, count):
    mean = total / count
    var = max(total_sq / count - mean * mean, 0.0) * count / max(count - 1, 1)
    return mean, math.sqrt(var / count)


def eigenvalue_finalize(t: EigenTally) -> ExperimentReport:
    n, bins, N = t.n, t.bins, t.samples
    rows = []
    summary = {"dimension": n, "bins": bins}
    if n == 2:
        summary["histogram"] = "largest eigenvalue on [1/2, 1]"
        edges = np.linspace(0.5, 1.0, bins + 1)
        width = edges[1] - edges[0]
        prob = np.diff(lambda_max_cdf(edges))
        for b in range(bins):
            p = float(prob[b])
            # binomial error on the count, floored at one count for near-empty bins
            se = math.sqrt(max(N * p * (1.0 - p), 1.0)) / (N * width)
            emp = float(t.max_counts[b]) / (N * width)
            ana = p / width
            rows.append(Row(float(0.5 * (edges[b] + edges[b + 1])), emp, ana, se, _verdict(emp, ana, se)))
        exp_c, obs_c = _merge_sparse(N * prob, t.max_counts.astype(float))
        chi2 = float(np.sum((obs_c - exp_c) ** 2 / exp_c))
        dof = len(exp_c) - 1
        summary.update(chi2=chi2, chi2_dof=dof, chi2_pvalue=float(sps.chi2.sf(chi2, dof)))
    else:
        summary["histogram"] = "all eigenvalues on [0, 1]"
        edges = np.linspace(0.0, 1.0, bins + 1)
        width = edges[1] - edges[0]
        total = N * n
        for b in range(bins):
            c = float(t.joint_counts[b])
            # Poisson error, floored at one count so empty bins keep a positive error
            se = math.sqrt(max(c, 1.0)) / (total * width)
            rows.append(Row(float(0.5 * (edges[b] + edges[b + 1])), c / (total * width), None, se, None))
    means, ses = [], []
    for i in range(n):
        m, s = _mean_se(t.ordered_sum[i], t.ordered_sumsq[i], N)
        means.append(m)
        ses.append(s)
    pm, ps = _mean_se(t.purity_sum, t.purity_sumsq, N)
    summary.update(
        ordered_eigenvalue_means=means,
        ordered_eigenvalue_stderr=ses,
        mean_purity=pm,
        mean_purity_stderr=ps,
        mean_purity_analytic=induced_mean_purity(n, n),
        max_simplex_error=t.max_simplex_error,
    )
    return ExperimentReport("eigenvalues", N, rows, summary)


def eigenvalue_experiment(src: EntropySource, n: int, samples: int, bins: int) -> ExperimentReport:
    """Histogram the spectra of ``samples`` Hilbert-Schmidt random states.

    For ``n = 2`` the rows compare the largest-eigenvalue histogram with the
    exact marginal ``6 (2x - 1)^2`` and the summary carries a chi-square test;
    for larger ``n`` the rows hold the joint histogram of all eigenvalues and
    the summary the means of each ordered eigenvalue.
    """
    _check_eigen_args(n, samples, bins)
    return eigenvalue_finalize(eigenvalue_tally(src, n, samples, bins))


# --- mean fidelity ----------------------------------------------------------


@dataclass
class FidelityTally:
    ks: tuple
    counts: np.ndarray
    sums: np.ndarray
    sumsqs: np.ndarray

    def __add__(self, other: "FidelityTally") -> "FidelityTally":
        if self.ks != other.ks:
            raise InvalidParameter("cannot merge tallies over different K values")
        return FidelityTally(
            self.ks, self.counts + other.counts, self.sums + other.sums, self.sumsqs + other.sumsqs
        )


def _check_fidelity_args(ks, pairs):
    if not ks or any(int(k) != k or k < 1 for k in ks):
        raise InvalidParameter(f"K values must be positive integers, got {list(ks)}")
    if pairs < 10:
        raise InvalidParameter(f"need at least 10 pairs per K, got {pairs}")


def fidelity_tally(src: EntropySource, ks: Sequence[int], pairs: int) -> FidelityTally:
    ks = tuple(int(k) for k in ks)
    sums = np.zeros(len(ks))
    sumsqs = np.zeros(len(ks))
    for j, k in enumerate(ks):
        vals = np.empty(pairs)
        for i in range(pairs):
            a = random_state_induced(src, 2, k)
            b = random_state_induced(src, 2, k)
            vals[i] = fidelity(a, b)
        sums[j] = vals.sum()
        sumsqs[j] = (vals**2).sum()
    return FidelityTally(ks, np.full(len(ks), pairs, dtype=np.int64), sums, sumsqs)


def fidelity_finalize(t: FidelityTally) -> ExperimentReport:
    rows = []
    for j, k in enumerate(t.ks):
        mean, se = _mean_se(t.sums[j], t.sumsqs[j], int(t.counts[j]))
        ana = mean_fidelity_2K(k)
        rows.append(Row(float(k), mean, ana, se, _verdict(mean, ana, se)))
    return ExperimentReport(
        "mean-fidelity", int(t.counts.sum()), rows, {"pairs_per_K": [int(c) for c in t.counts]}
    )


def mean_fidelity_experiment(src: EntropySource, K_values: Sequence[int], pairs_per_K: int) -> ExperimentReport:
    """Average fidelity of independent qubit pairs from the induced measure, per K.

    A row passes when the sample mean is within 5 standard errors of the
    closed form :func:`~qrs.quantmetrics.mean_fidelity_2K`.
    """
    _check_fidelity_args(K_values, pairs_per_K)
    return fidelity_finalize(fidelity_tally(src, K_values, pairs_per_K))


# --- sharding -----------------------------------------------------------------


def _shard_sizes(total, jobs):
    base, extra = divmod(total, jobs)
    return [base + (1 if i < extra else 0) for i in range(jobs)]


def _shard_specs(spec, jobs):
    head, _, rest = spec.partition(":")
    if head == "prng":
        seed = int(rest, 0)
        return [f"prng:{(seed + i) % (1 << 64)}" for i in range(jobs)]
    if spec == "os":
        return ["os"] * jobs
    raise InvalidParameter(f"cannot shard over entropy source {spec!r}; use prng or os")


def _run_eigen(spec, n, samples, bins):
    with open_source(spec) as src:
        return eigenvalue_tally(src, n, samples, bins)


def _run_fidelity(spec, ks, pairs):
    with open_source(spec) as src:
        return fidelity_tally(src, ks, pairs)


def run_sharded(experiment: str, spec: str, jobs: int, **params) -> ExperimentReport:
    """Run an experiment over ``jobs`` worker processes.

    Worker ``i`` samples from ``prng:<seed + i>`` (or its own OS source), and
    the tallies are summed before finalisation. ``jobs = 1`` runs in-process.

    Args:
        experiment: ``"eigenvalues"`` (params ``n``, ``samples``, ``bins``) or
            ``"mean-fidelity"`` (params ``K_values``, ``pairs_per_K``).
    """
    if jobs < 1:
        raise InvalidParameter(f"jobs must be positive, got {jobs}")
    if experiment == "eigenvalues":
        n, samples, bins = params["n"], params["samples"], params["bins"]
        _check_eigen_args(n, samples, bins)
        if jobs == 1:
            return eigenvalue_finalize(_run_eigen(spec, n, samples, bins))
        sizes = _shard_sizes(samples, jobs)
        calls = [(s, n, k, bins) for s, k in zip(_shard_specs(spec, jobs), sizes) if k]
        fn, finalize = _run_eigen, eigenvalue_finalize
    elif experiment == "mean-fidelity":
        ks, pairs = params["K_values"], params["pairs_per_K"]
        _check_fidelity_args(ks, pairs)
        if jobs == 1:
            return fidelity_finalize(_run_fidelity(spec, ks, pairs))
        sizes = _shard_sizes(pairs, jobs)
        calls = [(s, ks, k) for s, k in zip(_shard_specs(spec, jobs), sizes) if k]
        fn, finalize = _run_fidelity, fidelity_finalize
    else:
        raise InvalidParameter(f"unknown experiment {experiment!r}")
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        tallies = list(pool.map(fn, *zip(*calls)))
    total = tallies[0]
    for t in tallies[1:]:
        total = total + t
    return finalize(total)
