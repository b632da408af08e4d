"""Distributional-fidelity report: per-column shape scores, per-pair trend
scores, and their combined overall value.

Numeric shapes use the Kolmogorov-Smirnov complement, categorical shapes the
total-variation complement. Numeric pairs use correlation similarity; any pair
involving a categorical column is compared as a joint contingency table, with
numeric columns discretized into 4 quantile bins whose edges come from the
real column.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .errors import EmptyColumn, SchemaMismatch
from .schema import ColumnKind, Dataset, TableSchema

KS_COMPLEMENT = "KSComplement"
TV_COMPLEMENT = "TVComplement"
CORRELATION_SIMILARITY = "CorrelationSimilarity"
CONTINGENCY_SIMILARITY = "ContingencySimilarity"

QUANTILE_BINS = 4


@dataclass(frozen=True)
class QualityReport:
    overall_score: float
    shapes: dict[str, tuple[str, float]]  # column -> (metric_name, score)
    pair_trends: tuple[tuple[str, str, str, float], ...]  # (a, b, metric, score)
    shapes_average: float
    trends_average: float


def ks_complement(real_col, synth_col) -> float:
    """1 - D where D is the two-sample KS statistic over pooled sample points.

    ECDF values are computed as count/n so the result is bit-identical to a
    brute-force enumeration of the same ratios.
    """
    r = np.sort(np.asarray(real_col, dtype=np.float64))
    s = np.sort(np.asarray(synth_col, dtype=np.float64))
    if r.size == 0 or s.size == 0:
        raise EmptyColumn("ks_complement requires nonempty columns")
    pooled = np.union1d(r, s)
    cdf_r = np.searchsorted(r, pooled, side="right") / r.size
    cdf_s = np.searchsorted(s, pooled, side="right") / s.size
    d = float(np.max(np.abs(cdf_r - cdf_s)))
    return 1.0 - d


def tv_complement(real_col, synth_col) -> float:
    """1 - TVD between the empirical category frequencies.

    math.fsum makes the sum exact, hence independent of category enumeration
    order, so brute-force recomputation matches bitwise.
    """
    r = list(real_col)
    s = list(synth_col)
    if not r or not s:
        raise EmptyColumn("tv_complement requires nonempty columns")
    pc = Counter(r)
    qc = Counter(s)
    nr, ns = len(r), len(s)
    terms = [abs(pc[c] / nr - qc[c] / ns) for c in set(pc) | set(qc)]
    return 1.0 - 0.5 * math.fsum(terms)


def correlation_similarity(real_a, real_b, synth_a, synth_b) -> float:
    """1 - |rho_real - rho_synth| / 2 with Pearson rho; a zero-variance column
    contributes rho = 0."""
    rho_r = _pearson(np.asarray(real_a, dtype=np.float64), np.asarray(real_b, dtype=np.float64))
    rho_s = _pearson(np.asarray(synth_a, dtype=np.float64), np.asarray(synth_b, dtype=np.float64))
    return 1.0 - abs(rho_r - rho_s) / 2.0


def _pearson(x: np.ndarray, y: np.ndarray) -> float:
    if x.size == 0 or y.size == 0:
        raise EmptyColumn("correlation requires nonempty columns")
    if np.all(x == x[0]) or np.all(y == y[0]):
        return 0.0
    rho = float(np.corrcoef(x, y)[0, 1])
    return min(1.0, max(-1.0, rho))


def contingency_similarity(real_a, real_b, synth_a, synth_b) -> float:
    """1 - TVD between the empirical joint frequency tables of two label
    sequences; exact under reordering for the same reason as tv_complement."""
    ra, rb, sa, sb = list(real_a), list(real_b), list(synth_a), list(synth_b)
    if not ra or not sa:
        raise EmptyColumn("contingency_similarity requires nonempty columns")
    pc = Counter(zip(ra, rb))
    qc = Counter(zip(sa, sb))
    nr, ns = len(ra), len(sa)
    terms = [abs(pc[c] / nr - qc[c] / ns) for c in set(pc) | set(qc)]
    return 1.0 - 0.5 * math.fsum(terms)


def quantile_bin_edges(real_values, bins: int = QUANTILE_BINS) -> np.ndarray:
    """Interior quantile edges of the real column (bins-1 of them)."""
    arr = np.asarray(real_values, dtype=np.float64)
    if arr.size == 0:
        raise EmptyColumn("cannot derive bin edges from an empty column")
    qs = np.arange(1, bins) / bins
    return np.quantile(arr, qs)


def discretize(values, edges: np.ndarray) -> np.ndarray:
    """Right-closed binning: value v lands in bin #edges strictly below v, so
    v <= edges[0] is bin 0 and anything above the top edge is the last bin."""
    arr = np.asarray(values, dtype=np.float64)
    return np.searchsorted(edges, arr, side="left")


def _pair_labels(data: Dataset, name: str, kind: ColumnKind, edges_by_column: dict):
    if kind is ColumnKind.CATEGORICAL:
        return data.decoded(name).tolist()
    return discretize(data.decoded(name), edges_by_column[name]).tolist()


def quality_report(real: Dataset, synth: Dataset, schema: TableSchema) -> QualityReport:
    """Full fidelity report of ``synth`` against ``real`` under ``schema``.

    overall = (mean of shape scores + mean of pair-trend scores) / 2; a table
    with fewer than 2 columns reuses the shape average as the trend average.
    """
    if real.schema != schema or synth.schema != schema:
        raise SchemaMismatch("real and synthetic datasets must share the given schema")

    shapes: dict[str, tuple[str, float]] = {}
    for name, kind in schema.columns:
        if kind is ColumnKind.NUMERIC:
            shapes[name] = (KS_COMPLEMENT, ks_complement(real.decoded(name), synth.decoded(name)))
        else:
            shapes[name] = (TV_COMPLEMENT, tv_complement(
                real.decoded(name).tolist(), synth.decoded(name).tolist()
            ))
    shapes_average = float(np.mean([score for _, score in shapes.values()]))

    # Bin edges are derived once per numeric column, from the real data only,
    # and reused for the synthetic side.
    edges = {
        name: quantile_bin_edges(real.decoded(name))
        for name, kind in schema.columns
        if kind is ColumnKind.NUMERIC
    }

    trends: list[tuple[str, str, str, float]] = []
    cols = schema.columns
    for i in range(len(cols)):
        for j in range(i + 1, len(cols)):
            (name_a, kind_a), (name_b, kind_b) = cols[i], cols[j]
            if kind_a is ColumnKind.NUMERIC and kind_b is ColumnKind.NUMERIC:
                score = correlation_similarity(
                    real.decoded(name_a), real.decoded(name_b),
                    synth.decoded(name_a), synth.decoded(name_b),
                )
                trends.append((name_a, name_b, CORRELATION_SIMILARITY, score))
            else:
                score = contingency_similarity(
                    _pair_labels(real, name_a, kind_a, edges),
                    _pair_labels(real, name_b, kind_b, edges),
                    _pair_labels(synth, name_a, kind_a, edges),
                    _pair_labels(synth, name_b, kind_b, edges),
                )
                trends.append((name_a, name_b, CONTINGENCY_SIMILARITY, score))

    if trends:
        trends_average = float(np.mean([t[3] for t in trends]))
    else:
        trends_average = shapes_average
    overall = (shapes_average + trends_average) / 2.0
    return QualityReport(
        overall_score=overall,
        shapes=shapes,
        pair_trends=tuple(trends),
        shapes_average=shapes_average,
        trends_average=trends_average,
    )
