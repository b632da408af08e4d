"""Report emission with byte-level determinism.

All JSON documents are rendered with fixed key order and floats formatted to
exactly 6 decimal places, so identical inputs produce identical bytes. An
infinite FPR ratio serializes as the string "inf" and an undefined one as
"undefined".
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path

from .errors import FairsynthError, ValidationFailure
from .external import ExternalBackend
from .quality import QualityReport
from .schema import Dataset, Metadata, SplitSpec, write_csv
from .scoring import CompositeScore
from .supervisor import (
    RunConfig,
    SupervisorResult,
    Targets,
    run_pipeline,
)
from .tstr import FairnessReport

QUALITY_JSON = "sdmetrics_quality_report.json"
FAIRNESS_JSON = "fairness_metrics.json"
SUMMARY_JSON = "run_summary.json"
SYNTHETIC_CSV = "synthetic.csv"
BENCH_JSON = "bench_results.json"
BENCH_TABLE = "bench_table.txt"


def _render(value, indent: int = 0) -> str:
    pad = "  " * indent
    if value is None:
        return "null"
    if value is True:
        return "true"
    if value is False:
        return "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValidationFailure("non-finite float reached the JSON writer")
        return "%.6f" % value
    if isinstance(value, str):
        return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(value, dict):
        if not value:
            return "{}"
        inner = ",\n".join(
            f'{pad}  {_render(str(k))}: {_render(v, indent + 1)}' for k, v in value.items()
        )
        return "{\n" + inner + "\n" + pad + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        inner = ",\n".join(f"{pad}  {_render(v, indent + 1)}" for v in value)
        return "[\n" + inner + "\n" + pad + "]"
    raise ValidationFailure(f"cannot serialize {type(value).__name__} to report JSON")


def render_json(doc) -> str:
    """Deterministic JSON text (insertion-order keys, %.6f floats)."""
    return _render(doc) + "\n"


def ratio_value(ratio):
    """JSON form of a max-relative-FPR value: number, "inf", or "undefined"."""
    if ratio is None:
        return "undefined"
    if math.isinf(ratio):
        return "inf"
    return float(ratio)


def ratio_from_json(value):
    if value == "undefined" or value is None:
        return None
    if value == "inf":
        return float("inf")
    return float(value)


def quality_doc(quality: QualityReport) -> dict:
    return {
        "overall_score": quality.overall_score,
        "column_shapes": {
            "score": quality.shapes_average,
            "per_column": {
                name: {"metric": metric, "score": score}
                for name, (metric, score) in quality.shapes.items()
            },
        },
        "column_pair_trends": {
            "score": quality.trends_average,
            "per_pair": [
                {"a": a, "b": b, "metric": metric, "score": score}
                for a, b, metric, score in quality.pair_trends
            ],
        },
    }


def fairness_doc(fairness: FairnessReport, composite: CompositeScore) -> dict:
    return {
        "tstr": {
            "model": "logistic_regression",
            "threshold": fairness.threshold,
            "degenerate": fairness.degenerate,
        },
        "by_attribute": {
            attr: {
                "fpr": {g: ratio_value(v) for g, v in entry.fpr.items()},
                "max_rel_fpr": ratio_value(entry.max_rel_fpr),
            }
            for attr, entry in fairness.by_attribute.items()
        },
        "max_rel_fpr": ratio_value(fairness.max_rel_fpr),
        "fairness_mult": composite.fairness_mult,
        "quality": composite.quality,
        "synth_score": composite.synth_score,
    }


def config_doc(config: RunConfig) -> dict:
    return {
        "backend": config.backend,
        "train_rows": config.train_rows,
        "sample_rows": config.sample_rows,
        "epochs": config.epochs,
        "seed": config.seed,
        "correlation_shrinkage": config.correlation_shrinkage,
        "balance_groups": config.balance_groups,
        "balance_attribute": config.balance_attribute,
    }


def scores_doc(composite: CompositeScore) -> dict:
    return {
        "quality": composite.quality,
        "max_rel_fpr": ratio_value(composite.max_rel_fpr),
        "fairness_mult": composite.fairness_mult,
        "synth_score": composite.synth_score,
        "parity_ok": composite.parity_ok,
        "degenerate": composite.degenerate,
    }


def history_doc(history) -> list:
    entries = []
    for entry in history:
        doc = {
            "config": config_doc(entry.config),
            "scores": scores_doc(entry.composite) if entry.composite is not None else None,
            "action_taken": entry.action_taken,
        }
        if entry.error is not None:
            doc["error"] = entry.error
        entries.append(doc)
    return entries


def summary_doc(result: SupervisorResult) -> dict:
    return {
        "stop_reason": result.stop_reason,
        "best_iteration": result.best_iteration,
        "history": history_doc(result.history),
    }


def failed_summary_doc(history) -> dict:
    return {
        "stop_reason": "all_failed",
        "best_iteration": None,
        "history": history_doc(history),
    }


@dataclass(frozen=True)
class ReportBundle:
    out_dir: Path
    quality_json: dict
    fairness_json: dict
    summary_json: dict | None
    synthetic_csv: Path


def write_reports(
    quality: QualityReport,
    fairness: FairnessReport,
    composite: CompositeScore,
    synthetic: Dataset,
    out_dir: str | Path,
    summary: dict | None = None,
) -> ReportBundle:
    """Write the quality/fairness JSON reports plus the synthetic CSV (and the
    run summary when given); re-emitting the same inputs is byte-identical."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    q_doc = quality_doc(quality)
    f_doc = fairness_doc(fairness, composite)
    (out / QUALITY_JSON).write_text(render_json(q_doc), encoding="utf-8")
    (out / FAIRNESS_JSON).write_text(render_json(f_doc), encoding="utf-8")
    synthetic_csv = out / SYNTHETIC_CSV
    write_csv(synthetic, synthetic_csv)
    if summary is not None:
        (out / SUMMARY_JSON).write_text(render_json(summary), encoding="utf-8")
    return ReportBundle(
        out_dir=out,
        quality_json=q_doc,
        fairness_json=f_doc,
        summary_json=summary,
        synthetic_csv=synthetic_csv,
    )


@dataclass(frozen=True)
class BenchRow:
    backend: str
    quality: float | None = None
    max_rel_fpr: float | None = None
    synth_score: float | None = None
    degenerate: bool | None = None
    error: str | None = None


@dataclass(frozen=True)
class BenchResult:
    config: RunConfig
    rows: tuple[BenchRow, ...]


def batch_evaluate(
    backends: list[str],
    config: RunConfig,
    targets: Targets,
    data: Dataset,
    metadata: Metadata,
    split: SplitSpec | None = None,
    external_backends: dict[str, ExternalBackend] | None = None,
) -> BenchResult:
    """One full pipeline per backend (no refinement) with a shared split and
    seed; per-backend failures land in their row, the rest still run."""
    if not backends:
        raise ValidationFailure("bench needs at least one backend")
    if split is None:
        split = SplitSpec(train_rows=config.train_rows, seed=config.seed)
    rows: list[BenchRow] = []
    for backend in backends:
        run_cfg = replace(config, backend=backend)
        try:
            result = run_pipeline(
                run_cfg,
                data,
                metadata,
                split,
                parity_threshold=targets.parity_threshold,
                external_backends=external_backends,
            )
        except FairsynthError as exc:
            rows.append(BenchRow(backend=backend, error=str(exc)))
            continue
        rows.append(
            BenchRow(
                backend=backend,
                quality=result.composite.quality,
                max_rel_fpr=result.composite.max_rel_fpr,
                synth_score=result.composite.synth_score,
                degenerate=result.composite.degenerate,
            )
        )
    return BenchResult(config=config, rows=tuple(rows))


def bench_doc(result: BenchResult) -> dict:
    rows = []
    for row in result.rows:
        if row.error is not None:
            rows.append({"backend": row.backend, "error": row.error})
        else:
            rows.append(
                {
                    "backend": row.backend,
                    "quality": row.quality,
                    "max_rel_fpr": ratio_value(row.max_rel_fpr),
                    "synth_score": row.synth_score,
                    "degenerate": row.degenerate,
                }
            )
    return {"config": config_doc(result.config), "rows": rows}


def _cell(value) -> str:
    if value is None:
        return "undefined"
    if value is True:
        return "yes"
    if value is False:
        return "no"
    if isinstance(value, float):
        return "inf" if math.isinf(value) else "%.6f" % value
    return str(value)


def bench_table(result: BenchResult) -> str:
    """Aligned plain-text benchmark table; failed backends show ERROR."""
    header = ("backend", "quality", "max_rel_fpr", "synth_score", "degenerate")
    body: list[tuple[str, ...]] = []
    for row in result.rows:
        if row.error is not None:
            body.append((row.backend, "ERROR", "ERROR", "ERROR", "ERROR"))
        else:
            body.append(
                (
                    row.backend,
                    _cell(row.quality),
                    _cell(row.max_rel_fpr),
                    _cell(row.synth_score),
                    _cell(row.degenerate),
                )
            )
    widths = [max(len(r[i]) for r in [header, *body]) for i in range(len(header))]
    lines = []
    for r in [header, *body]:
        lines.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(r)).rstrip())
    return "\n".join(lines) + "\n"
