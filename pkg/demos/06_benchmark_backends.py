"""Benchmark several synthesizer backends on one table with one shared split.

Each backend gets a single pipeline run (no refinement) under the same seed,
train slice, and holdout, so the composite scores are directly comparable.
External backends are arbitrary commands wired in through a descriptor; one
that fails keeps its row with ERROR while the rest still report.
"""

import sys
from pathlib import Path

from fairsynth import (
    DemoSpec,
    ExternalBackend,
    RunConfig,
    Targets,
    batch_evaluate,
    bench_table,
    demo_metadata,
    make_demo_dataset,
)
from fairsynth.reports import bench_doc, render_json

data = make_demo_dataset(DemoSpec(n_rows=2000, seed=0))
metadata = demo_metadata()

config = RunConfig(train_rows=1000, sample_rows=500, epochs=20, seed=0)

# An external backend is any command template; {train_csv}, {rows}, {seed},
# {out_csv} and friends are substituted per run. This toy one just echoes the
# training rows back as "synthetic" output, which scores suspiciously well on
# fidelity; a real integration would shell out to an actual synthesizer.
echo_backend = ExternalBackend(
    name="copy_train",
    command=(
        sys.executable,
        "-c",
        "import shutil, sys; shutil.copy(sys.argv[1], sys.argv[2])",
        "{train_csv}",
        "{out_csv}",
    ),
)

result = batch_evaluate(
    ["gaussian_copula", "independent", "copy_train"],
    config,
    Targets(),
    data,
    metadata,
    external_backends={"copy_train": echo_backend},
)

print(bench_table(result), end="")

# The machine-readable version echoes the shared config so a row can be
# reproduced later from the JSON alone.
out_dir = Path(__file__).parent / "out"
out_dir.mkdir(exist_ok=True)
bench_path = out_dir / "bench_results.json"
bench_path.write_text(render_json(bench_doc(result)), encoding="utf-8")
print(f"\nwrote {bench_path}")

# Determinism check: the whole benchmark is a pure function of its inputs.
again = batch_evaluate(
    ["gaussian_copula", "independent", "copy_train"],
    config,
    Targets(),
    data,
    metadata,
    external_backends={"copy_train": echo_backend},
)
print(f"re-run identical: {bench_doc(again) == bench_doc(result)}")
