"""Bundled demo-dataset generator.

Emits a seeded table shaped like a small clinical screening dataset: two
demographic attributes (Race, Sex), two numeric scales, a categorical care
setting, and a binary Diagnosis label whose positive rate for one Race group
exceeds the base rate by a configurable disparity. It stands in for
restricted real data and keeps every test hermetic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationFailure
from .schema import CategoricalColumn, Dataset, Metadata, NumericColumn, TableSchema, ColumnKind

RACES = ("White", "Black", "Hispanic", "Asian")
RACE_WEIGHTS = (0.45, 0.25, 0.18, 0.12)
SEXES = ("Female", "Male")
SEX_WEIGHTS = (0.52, 0.48)
SETTINGS = ("community", "inpatient", "outpatient")

#: The Race group whose Diagnosis positive rate is raised by the disparity.
ELEVATED_GROUP = "Asian"

BASE_POSITIVE_RATE = 0.25

LABEL_COLUMN = "Diagnosis"
POSITIVE_LABEL = "positive"
NEGATIVE_LABEL = "negative"

DEMO_SCHEMA = TableSchema(
    (
        ("Race", ColumnKind.CATEGORICAL),
        ("Sex", ColumnKind.CATEGORICAL),
        ("symptom_scale", ColumnKind.NUMERIC),
        ("functioning_score", ColumnKind.NUMERIC),
        ("setting", ColumnKind.CATEGORICAL),
        (LABEL_COLUMN, ColumnKind.CATEGORICAL),
    )
)


@dataclass(frozen=True)
class DemoSpec:
    n_rows: int = 2000
    seed: int = 0
    disparity_strength: float = 0.3

    def __post_init__(self):
        if self.n_rows < 50:
            raise ValidationFailure("demo dataset needs n_rows >= 50")
        if not (0.0 <= self.disparity_strength <= 1.0):
            raise ValidationFailure("disparity_strength must lie in [0, 1]")


def demo_metadata() -> Metadata:
    return Metadata(
        label_column=LABEL_COLUMN,
        positive_label=POSITIVE_LABEL,
        protected_attributes=("Race", "Sex"),
    )


def make_demo_dataset(spec: DemoSpec) -> Dataset:
    """Deterministic per seed; one fixed draw order keeps output stable."""
    rng = np.random.default_rng(spec.seed)
    n = spec.n_rows

    race = rng.choice(np.array(RACES, dtype=object), size=n, p=RACE_WEIGHTS)
    sex = rng.choice(np.array(SEXES, dtype=object), size=n, p=SEX_WEIGHTS)

    elevated = race == ELEVATED_GROUP
    p_positive = np.where(
        elevated,
        min(1.0, BASE_POSITIVE_RATE + spec.disparity_strength),
        BASE_POSITIVE_RATE,
    )
    y = rng.random(n) < p_positive

    # Label-linked numeric scales: symptoms rise with a positive diagnosis
    # (plus a small group shift), functioning drops with it.
    symptom = rng.standard_normal(n) + 1.4 * y + 0.25 * elevated
    functioning = rng.normal(62.0, 11.0, size=n) - 9.0 * y

    # Care setting depends on the label.
    setting_p = np.where(y[:, None], [0.2, 0.5, 0.3], [0.5, 0.2, 0.3])
    u = rng.random(n)
    setting_idx = (u[:, None] >= np.cumsum(setting_p, axis=1)).sum(axis=1)
    setting = np.array(SETTINGS, dtype=object)[setting_idx]

    label = np.where(y, POSITIVE_LABEL, NEGATIVE_LABEL)

    columns = (
        CategoricalColumn.from_values(race.tolist()),
        CategoricalColumn.from_values(sex.tolist()),
        NumericColumn(symptom),
        NumericColumn(functioning),
        CategoricalColumn.from_values(setting.tolist()),
        CategoricalColumn.from_values(label.tolist()),
    )
    return Dataset(DEMO_SCHEMA, columns)
