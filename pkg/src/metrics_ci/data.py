"""Prediction records, accuracy aggregation, stratified folds and paired tables.

File layouts (UTF-8, LF line endings on output):

* ``predictions.csv``: ``model,fold,seed,sample_id,label,prediction``
* ``labels.csv``: ``sample_id,label``
* ``folds.csv``: ``sample_id,label,fold`` sorted by ``sample_id``
* ``estimates.csv``: ``group,accuracy,n``
"""

from __future__ import annotations

import csv
import io
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import (
    DomainError,
    FormatError,
    InsufficientDataError,
    IntegrityError,
    PairingError,
    ParseError,
)
from .rng import SplitMix64

PREDICTION_COLUMNS = ("model", "fold", "seed", "sample_id", "label", "prediction")
LABEL_COLUMNS = ("sample_id", "label")
FOLD_COLUMNS = ("sample_id", "label", "fold")
ESTIMATE_COLUMNS = ("group", "accuracy", "n")

# CLI key name -> PredictionRecord attribute
GROUP_KEYS = {"model": "model_id", "fold": "fold_id", "seed": "seed"}


def format_number(x, digits: int = 7) -> str:
    """Locale-free rendering with ``digits`` significant digits; integers verbatim."""
    if isinstance(x, int) and not isinstance(x, bool):
        return str(x)
    return format(float(x), f".{digits}g")


@dataclass(frozen=True)
class PredictionRecord:
    model_id: str
    fold_id: int
    seed: int
    sample_id: str
    true_label: str
    predicted_label: str

    @property
    def key(self):
        return (self.model_id, self.fold_id, self.seed, self.sample_id)

    @property
    def correct(self) -> bool:
        return self.true_label == self.predicted_label


@dataclass(frozen=True)
class AccuracyMeasurement:
    group: dict
    correct: int
    total: int
    accuracy: float = field(init=False)

    def __post_init__(self):
        if self.total < 1:
            raise DomainError("total must be positive")
        if not 0 <= self.correct <= self.total:
            raise DomainError(f"correct ({self.correct}) outside [0, {self.total}]")
        object.__setattr__(self, "accuracy", self.correct / self.total)

    @property
    def label(self) -> str:
        if not self.group:
            return "all"
        if len(self.group) == 1:
            return str(next(iter(self.group.values())))
        return "/".join(f"{k}={v}" for k, v in self.group.items())


@dataclass(frozen=True)
class FoldAssignment:
    k: int
    seed: int
    assignments: list  # (sample_id, class_label, fold_index), input order
    warnings: tuple = ()

    def fold_of(self) -> dict:
        return {sid: fold for sid, _, fold in self.assignments}

    def fold_sizes(self) -> list:
        sizes = [0] * self.k
        for _, _, fold in self.assignments:
            sizes[fold] += 1
        return sizes

    def class_fold_counts(self) -> dict:
        counts = defaultdict(lambda: [0] * self.k)
        for _, label, fold in self.assignments:
            counts[label][fold] += 1
        return dict(counts)


@dataclass(frozen=True)
class ContingencyTable:
    both_correct: int
    a_correct_b_wrong: int
    a_wrong_b_correct: int
    both_wrong: int
    n: int

    @property
    def b(self) -> int:
        return self.a_correct_b_wrong

    @property
    def c(self) -> int:
        return self.a_wrong_b_correct


@dataclass(frozen=True)
class Estimate:
    group: str
    accuracy: float
    n: int


def _text(source) -> str:
    if isinstance(source, (bytes, bytearray)):
        return bytes(source).decode("utf-8-sig")
    if isinstance(source, str):
        return source
    data = source.read()
    if isinstance(data, bytes):
        return data.decode("utf-8-sig")
    return data


def csv_reader(source, expected):
    """CSV reader positioned after a validated header."""
    reader = csv.reader(io.StringIO(_text(source), newline=""))
    try:
        header = next(reader)
    except StopIteration:
        raise FormatError(f"empty file; expected header {','.join(expected)}") from None
    for col in expected:
        if col not in header:
            raise FormatError(f"missing column {col!r}", line=1)
    for col in header:
        if col not in expected:
            raise FormatError(f"unexpected column {col!r}", line=1)
    if tuple(header) != tuple(expected):
        raise FormatError(
            f"columns out of order: expected {','.join(expected)}", line=1
        )
    return reader


def csv_rows(reader, width):
    for row in reader:
        if not row:
            continue
        if len(row) != width:
            raise ParseError(f"expected {width} fields, got {len(row)}", reader.line_num)
        yield reader.line_num, row


def parse_int(value, column, line, minimum=0):
    try:
        v = int(value)
    except ValueError:
        raise ParseError(f"{column} must be an integer, got {value!r}", line) from None
    if v < minimum:
        raise ParseError(f"{column} must be >= {minimum}, got {v}", line)
    return v


def write_csv(header, rows) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue().encode("utf-8")


def parse_predictions(source) -> list[PredictionRecord]:
    """Read ``predictions.csv`` from bytes, text or a file object."""
    reader = csv_reader(source, PREDICTION_COLUMNS)
    records = []
    seen = set()
    for line, (model, fold, seed, sample_id, label, prediction) in csv_rows(reader, 6):
        if not label:
            raise ParseError("label must be non-empty", line)
        if not prediction:
            raise ParseError("prediction must be non-empty", line)
        rec = PredictionRecord(
            model_id=model,
            fold_id=parse_int(fold, "fold", line),
            seed=parse_int(seed, "seed", line),
            sample_id=sample_id,
            true_label=label,
            predicted_label=prediction,
        )
        if rec.key in seen:
            raise IntegrityError(
                f"line {line}: duplicate key model={model!r} fold={rec.fold_id} "
                f"seed={rec.seed} sample_id={sample_id!r}"
            )
        seen.add(rec.key)
        records.append(rec)
    return records


def serialize_predictions(records: Iterable[PredictionRecord]) -> bytes:
    return write_csv(
        PREDICTION_COLUMNS,
        (
            (r.model_id, r.fold_id, r.seed, r.sample_id, r.true_label, r.predicted_label)
            for r in records
        ),
    )


def aggregate_accuracy(
    records: Sequence[PredictionRecord], group_by: Sequence[str]
) -> list[AccuracyMeasurement]:
    """Count correct predictions per distinct group key, sorted by key values."""
    if not records:
        raise InsufficientDataError("no prediction records")
    for key in group_by:
        if key not in GROUP_KEYS:
            raise DomainError(f"unknown group key {key!r}; choose from {sorted(GROUP_KEYS)}")
    attrs = [GROUP_KEYS[k] for k in group_by]
    correct = defaultdict(int)
    total = defaultdict(int)
    for r in records:
        gk = tuple(getattr(r, a) for a in attrs)
        total[gk] += 1
        correct[gk] += r.correct
    return [
        AccuracyMeasurement(group=dict(zip(group_by, gk)), correct=correct[gk], total=total[gk])
        for gk in sorted(total)
    ]


def stratified_folds(labels: Sequence[tuple], k: int, rng_seed: int) -> FoldAssignment:
    """Assign samples to ``k`` folds preserving class proportions.

    Classes are visited in sorted label order; each class's members are
    shuffled with one SplitMix64 generator seeded by ``rng_seed`` and dealt
    round-robin.  The deal position carries over from one class to the next,
    so class remainders are spread over different folds and fold totals differ
    by at most one.
    """
    if isinstance(k, bool) or not isinstance(k, int) or k < 2:
        raise DomainError(f"k must be an integer >= 2, got {k!r}")
    if rng_seed < 0:
        raise DomainError("rng_seed must be nonnegative")
    members = defaultdict(list)
    seen = set()
    for sample_id, label in labels:
        if sample_id in seen:
            raise IntegrityError(f"duplicate sample_id {sample_id!r}")
        seen.add(sample_id)
        members[label].append(sample_id)

    rng = SplitMix64(rng_seed)
    fold_of = {}
    warnings = []
    position = 0
    for label in sorted(members):
        ids = list(members[label])
        if len(ids) < k:
            warnings.append(
                f"class {label!r} has {len(ids)} members, fewer than k={k}; "
                "some folds receive none of it"
            )
        rng.shuffle(ids)
        for sid in ids:
            fold_of[sid] = position % k
            position += 1

    assignments = [(sid, label, fold_of[sid]) for sid, label in labels]
    return FoldAssignment(k=k, seed=rng_seed, assignments=assignments, warnings=tuple(warnings))


def contingency(
    records_a: Sequence[PredictionRecord], records_b: Sequence[PredictionRecord]
) -> ContingencyTable:
    """Paired outcome counts of two models over the same (fold, seed, sample)."""

    def index(records, which):
        out = {}
        for r in records:
            key = (r.fold_id, r.seed, r.sample_id)
            if key in out:
                raise IntegrityError(
                    f"model {which}: sample {r.sample_id!r} appears twice in fold "
                    f"{r.fold_id}, seed {r.seed}"
                )
            out[key] = r
        return out

    ia, ib = index(records_a, "A"), index(records_b, "B")
    if ia.keys() != ib.keys():
        diff = sorted(ia.keys() ^ ib.keys())
        shown = ", ".join(f"{sid} (fold {f}, seed {s})" for f, s, sid in diff[:10])
        more = f" and {len(diff) - 10} more" if len(diff) > 10 else ""
        raise PairingError(f"{len(diff)} unpaired samples: {shown}{more}")

    a = b = c = d = 0
    for key, ra in ia.items():
        rb = ib[key]
        if ra.true_label != rb.true_label:
            raise IntegrityError(
                f"sample {ra.sample_id!r} has label {ra.true_label!r} for model A "
                f"but {rb.true_label!r} for model B"
            )
        if ra.correct and rb.correct:
            a += 1
        elif ra.correct:
            b += 1
        elif rb.correct:
            c += 1
        else:
            d += 1
    return ContingencyTable(a, b, c, d, n=len(ia))


def parse_labels(source) -> list[tuple]:
    reader = csv_reader(source, LABEL_COLUMNS)
    out = []
    for line, (sample_id, label) in csv_rows(reader, 2):
        if not sample_id or not label:
            raise ParseError("sample_id and label must be non-empty", line)
        out.append((sample_id, label))
    return out


def folds_csv(assignment: FoldAssignment) -> bytes:
    rows = sorted(assignment.assignments, key=lambda t: t[0])
    return write_csv(FOLD_COLUMNS, rows)


def parse_estimates(source) -> list[Estimate]:
    """Read ``estimates.csv``; each bad row is reported with its line number."""
    reader = csv_reader(source, ESTIMATE_COLUMNS)
    out = []
    for line, (group, acc, n) in csv_rows(reader, 3):
        try:
            accuracy = float(acc)
        except ValueError:
            raise ParseError(f"accuracy must be a number, got {acc!r}", line) from None
        if not (math.isfinite(accuracy) and 0.0 <= accuracy <= 1.0):
            raise FormatError(f"accuracy must lie in [0, 1], got {acc!r}", line)
        out.append(Estimate(group=group, accuracy=accuracy, n=parse_int(n, "n", line, 1)))
    return out


def estimates_csv(estimates: Iterable[Estimate]) -> bytes:
    return write_csv(
        ESTIMATE_COLUMNS,
        ((e.group, format_number(e.accuracy), e.n) for e in estimates),
    )


def read_accuracy_column(source) -> list[float]:
    """Pull the ``accuracy`` column out of any CSV that has one."""
    reader = csv.reader(io.StringIO(_text(source), newline=""))
    try:
        header = next(reader)
    except StopIteration:
        raise FormatError("empty file; expected an 'accuracy' column") from None
    if "accuracy" not in header:
        raise FormatError("missing column 'accuracy'", line=1)
    col = header.index("accuracy")
    values = []
    for row in reader:
        if not row:
            continue
        try:
            v = float(row[col])
        except (ValueError, IndexError):
            raise ParseError(f"bad accuracy field in {row!r}", reader.line_num) from None
        if not math.isfinite(v):
            raise ParseError(f"accuracy must be finite, got {row[col]!r}", reader.line_num)
        values.append(v)
    return values
