"""Portfolio data ingestion and design-matrix encoding.

Two CSV layouts are understood:

* the policy schema, with exact header
  ``region,sg_ind,gender,smoker_status,lob,plan,issue_age,face_amount,duration,death``
  and categorical values restricted to the declared level sets; and
* the plain design schema written by the simulators: numeric predictor
  columns followed by a final ``y`` column.

Categoricals one-hot encode against fixed reference levels (COLI for
plan, EM for line of business, the first declared level elsewhere).
Issue age and duration are z-scored; face amount is log(x + shift)
min-max rescaled to [0, 1]. Transform parameters are learned on training
data only and frozen into an EncodingPlan; encoding test data never
updates them.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .model import Dataset

__all__ = [
    "LEVELS",
    "REFERENCE_LEVELS",
    "PolicyRecord",
    "DataError",
    "load_csv",
    "EncodingPlan",
    "EncodedData",
    "encode",
    "write_design_csv",
    "read_design_csv",
    "is_policy_csv",
    "POLICY_COLUMNS",
]

POLICY_COLUMNS = (
    "region",
    "sg_ind",
    "gender",
    "smoker_status",
    "lob",
    "plan",
    "issue_age",
    "face_amount",
    "duration",
    "death",
)

CATEGORICAL_FIELDS = ("region", "sg_ind", "gender", "smoker_status", "lob", "plan")
NUMERIC_FIELDS = ("issue_age", "face_amount", "duration")

LEVELS = {
    "region": (
        "Northest_NewEngland",
        "Northest_MidAtlantic",
        "Midwest",
        "South_Atlantic",
        "South_SouthCentral",
        "West_Mountain",
        "West_Pacific",
        "Foreign",
    ),
    "sg_ind": ("Brokerage", "Legacy", "UL_LTC", "NSG", "No Information", "SG"),
    "gender": ("Female", "Male"),
    "smoker_status": ("Smoker", "Nonsmoker", "Unismoker"),
    "lob": ("ISL", "TRAD", "EM", "No Information"),
    "plan": ("UL_LTC", "Term", "UL_NSG", "UL_SG", "VUL", "Whole Life", "COLI"),
}

REFERENCE_LEVELS = {
    "region": "Northest_NewEngland",
    "sg_ind": "Brokerage",
    "gender": "Female",
    "smoker_status": "Smoker",
    "lob": "EM",
    "plan": "COLI",
}


class DataError(ValueError):
    """Malformed input data; messages carry the offending row and field."""


@dataclass(frozen=True)
class PolicyRecord:
    """One exposure row, validated against the declared level sets."""

    region: str
    sg_ind: str
    gender: str
    smoker_status: str
    lob: str
    plan: str
    issue_age: float
    face_amount: float
    duration: float
    death: int

    def __post_init__(self):
        for fname in CATEGORICAL_FIELDS:
            value = getattr(self, fname)
            if value not in LEVELS[fname]:
                raise DataError(f"field {fname}: unknown level {value!r}")
        if not 0.0 <= self.issue_age <= 120.0:
            raise DataError(f"field issue_age: {self.issue_age} outside [0, 120]")
        if self.face_amount < 0.0:
            raise DataError(f"field face_amount: {self.face_amount} is negative")
        if self.duration < 0.0:
            raise DataError(f"field duration: {self.duration} is negative")
        if self.death not in (0, 1):
            raise DataError(f"field death: {self.death} is not 0/1")


def load_csv(path) -> list[PolicyRecord]:
    """Read policy records, reporting violations with their row number."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(line for line in fh if not line.startswith("#"))
        if reader.fieldnames is None:
            raise DataError(f"{path}: empty file (missing header)")
        missing = [c for c in POLICY_COLUMNS if c not in reader.fieldnames]
        if missing:
            raise DataError(f"{path}: missing columns {missing}")
        records = []
        for i, row in enumerate(reader, start=1):
            try:
                records.append(
                    PolicyRecord(
                        region=row["region"],
                        sg_ind=row["sg_ind"],
                        gender=row["gender"],
                        smoker_status=row["smoker_status"],
                        lob=row["lob"],
                        plan=row["plan"],
                        issue_age=_to_float(row["issue_age"], "issue_age"),
                        face_amount=_to_float(row["face_amount"], "face_amount"),
                        duration=_to_float(row["duration"], "duration"),
                        death=_to_death(row["death"]),
                    )
                )
            except DataError as exc:
                raise DataError(f"{path}: row {i}: {exc}") from None
    return records


def _to_float(text, fname):
    try:
        value = float(text)
    except (TypeError, ValueError):
        raise DataError(f"field {fname}: non-numeric value {text!r}")
    if not math.isfinite(value):
        raise DataError(f"field {fname}: non-finite value {text!r}")
    return value


def _to_death(text):
    if text in ("0", "1"):
        return int(text)
    raise DataError(f"field death: {text!r} is not 0/1")


@dataclass
class EncodingPlan:
    """Frozen transform parameters learned from training records."""

    references: dict = field(default_factory=lambda: dict(REFERENCE_LEVELS))
    age_mean: float | None = None
    age_sd: float | None = None
    duration_mean: float | None = None
    duration_sd: float | None = None
    log_face_min: float | None = None
    log_face_max: float | None = None
    face_log_shift: float = 1.0

    @property
    def fitted(self) -> bool:
        return self.age_mean is not None

    def fit(self, records: list[PolicyRecord]) -> "EncodingPlan":
        if not records:
            raise DataError("cannot fit an encoding plan on zero records")
        ages = np.array([r.issue_age for r in records])
        durs = np.array([r.duration for r in records])
        log_face = np.log(np.array([r.face_amount for r in records]) + self.face_log_shift)
        self.age_mean = float(ages.mean())
        self.age_sd = float(ages.std())  # population sd, recorded as such
        self.duration_mean = float(durs.mean())
        self.duration_sd = float(durs.std())
        self.log_face_min = float(log_face.min())
        self.log_face_max = float(log_face.max())
        for fname, sd in (("issue_age", self.age_sd), ("duration", self.duration_sd)):
            if sd == 0.0:
                raise DataError(f"field {fname} is constant; cannot z-score")
        if self.log_face_max == self.log_face_min:
            raise DataError("field face_amount is constant; cannot rescale")
        return self

    def to_json(self) -> str:
        return json.dumps(
            {
                "references": self.references,
                "age_mean": self.age_mean,
                "age_sd": self.age_sd,
                "duration_mean": self.duration_mean,
                "duration_sd": self.duration_sd,
                "log_face_min": self.log_face_min,
                "log_face_max": self.log_face_max,
                "face_log_shift": self.face_log_shift,
            },
            indent=2,
            sort_keys=True,
        )

    @staticmethod
    def from_json(text: str) -> "EncodingPlan":
        raw = json.loads(text)
        return EncodingPlan(**raw)

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json() + "\n")

    @staticmethod
    def load(path) -> "EncodingPlan":
        with open(path, encoding="utf-8") as fh:
            return EncodingPlan.from_json(fh.read())


@dataclass
class EncodedData:
    """Design matrix plus sidecars produced by ``encode``."""

    dataset: Dataset
    face: np.ndarray
    plan: EncodingPlan
    groups: list[tuple[str, list[int]]]
    clamped: int  # test-time face values outside the training range


def encode(records: list[PolicyRecord], plan: EncodingPlan | None = None) -> EncodedData:
    """Build the regression design from policy records.

    With ``plan=None`` (training mode) transform parameters are fitted on
    ``records`` first; pass a fitted plan to encode test data.
    """
    if plan is None:
        plan = EncodingPlan().fit(records)
    elif not plan.fitted:
        raise DataError("encoding plan has not been fitted")
    if not records:
        raise DataError("no records to encode")

    n = len(records)
    columns = [np.ones(n)]
    names = ["intercept"]
    groups: list[tuple[str, list[int]]] = []
    for fname in CATEGORICAL_FIELDS:
        ref = plan.references[fname]
        cols: list[int] = []
        for level in LEVELS[fname]:
            if level == ref:
                continue
            indicator = np.array(
                [1.0 if getattr(r, fname) == level else 0.0 for r in records]
            )
            cols.append(len(columns))
            columns.append(indicator)
            names.append(f"{fname}_{level.replace(' ', '_')}")
        groups.append((fname, cols))

    ages = np.array([r.issue_age for r in records])
    durs = np.array([r.duration for r in records])
    face = np.array([r.face_amount for r in records])
    log_face = np.log(face + plan.face_log_shift)
    scaled_face = (log_face - plan.log_face_min) / (plan.log_face_max - plan.log_face_min)
    clamped = int(np.sum((scaled_face < 0.0) | (scaled_face > 1.0)))
    scaled_face = np.clip(scaled_face, 0.0, 1.0)

    groups.append(("issue_age", [len(columns)]))
    columns.append((ages - plan.age_mean) / plan.age_sd)
    names.append("issue_age")
    groups.append(("face_amount", [len(columns)]))
    columns.append(scaled_face)
    names.append("face_amount")
    groups.append(("duration", [len(columns)]))
    columns.append((durs - plan.duration_mean) / plan.duration_sd)
    names.append("duration")

    X = np.column_stack(columns)
    y = np.array([r.death for r in records], dtype=np.int8)
    try:
        dataset = Dataset(y=y, X=X, column_names=tuple(names))
    except ValueError:
        offenders = _collinear_groups(X, names, groups)
        raise DataError(
            "encoded design is rank deficient; collinear groups: " + ", ".join(offenders)
        ) from None
    return EncodedData(dataset=dataset, face=face, plan=plan, groups=groups, clamped=clamped)


def _collinear_groups(X, names, groups):
    """Name the groups whose columns sit in the span of the others."""
    offenders = []
    rank_full = np.linalg.matrix_rank(X)
    for gname, cols in groups:
        if not cols:
            continue
        others = [j for j in range(X.shape[1]) if j not in cols]
        if np.linalg.matrix_rank(X[:, others]) == rank_full:
            offenders.append(gname)
    return offenders or ["<unidentified>"]


def write_design_csv(dataset: Dataset, path, header_comments=()):
    """Emit a plain numeric design CSV: predictors then a final y column."""
    names = list(dataset.names())[1:]  # intercept column implied
    with open(path, "w", newline="") as fh:
        for line in header_comments:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh)
        writer.writerow(names + ["y"])
        for row, yi in zip(dataset.X[:, 1:], dataset.y):
            writer.writerow([repr(float(v)) for v in row] + [int(yi)])


def read_design_csv(path) -> Dataset:
    """Read a design CSV (numeric columns, final column y) into a Dataset."""
    with open(path, newline="") as fh:
        reader = csv.reader(line for line in fh if not line.startswith("#"))
        rows = list(reader)
    if not rows:
        raise DataError(f"{path}: empty file (missing header)")
    header = rows[0]
    if not header or header[-1] != "y":
        raise DataError(f"{path}: design CSV must end with a 'y' column")
    names = header[:-1]
    body = rows[1:]
    X = np.ones((len(body), len(names) + 1))
    y = np.zeros(len(body), dtype=np.int8)
    for i, row in enumerate(body, start=1):
        if len(row) != len(header):
            raise DataError(f"{path}: row {i}: expected {len(header)} fields, got {len(row)}")
        try:
            X[i - 1, 1:] = [float(v) for v in row[:-1]]
        except ValueError:
            raise DataError(f"{path}: row {i}: non-numeric predictor value") from None
        if row[-1] not in ("0", "1"):
            raise DataError(f"{path}: row {i}: field y: {row[-1]!r} is not 0/1")
        y[i - 1] = int(row[-1])
    return Dataset(y=y, X=X, column_names=("intercept",) + tuple(names))


def is_policy_csv(path) -> bool:
    """Header sniff: does this file carry the policy schema?"""
    with open(path, newline="", encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("#"):
                continue
            header = next(csv.reader([line]), [])
            return set(POLICY_COLUMNS).issubset(header)
    return False
