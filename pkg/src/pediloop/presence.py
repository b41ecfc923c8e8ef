"""Presence questionnaire scoring: three 5-item subscales plus Cronbach's
alpha internal-consistency reliability.

The 15 items are Likert 1-5 and split, in order, into self-presence (1-5),
autonomous-vehicle presence (6-10) and environmental presence (11-15).
Alpha is computed from sums of squared deviations rather than variances:
alpha = k * (SS_total - sum SS_i) / ((k-1) * SS_total), which is the usual
k/(k-1) * (1 - sum(var_i)/var_total) with the (n-1) factors cancelled, so
the sample-vs-population variance convention cannot matter.
"""
from __future__ import annotations

import csv
import statistics
from dataclasses import dataclass
from io import StringIO
from pathlib import Path
from typing import Iterable, Sequence

from .errors import DegenerateDataError, ResponseValidationError

ITEM_COUNT = 15
SCALE_MIN, SCALE_MAX = 1, 5

SUBSCALES: tuple[tuple[str, range], ...] = (
    ("self_presence", range(0, 5)),
    ("autonomous_vehicle_presence", range(5, 10)),
    ("environmental_presence", range(10, 15)),
)


@dataclass(frozen=True)
class PresenceResponse:
    participant: str
    answers: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.answers) != ITEM_COUNT:
            raise ResponseValidationError(
                f"participant {self.participant}: expected {ITEM_COUNT} answers, got {len(self.answers)}"
            )
        for i, a in enumerate(self.answers, start=1):
            if not SCALE_MIN <= a <= SCALE_MAX:
                raise ResponseValidationError(
                    f"participant {self.participant}: item {i} answer {a} outside [{SCALE_MIN}, {SCALE_MAX}]"
                )


@dataclass(frozen=True)
class SubscaleStats:
    name: str
    mean: float
    sd: float  # sample (n-1); 0 for a single participant
    n: int


def score_subscales(responses: Sequence[PresenceResponse]) -> tuple[SubscaleStats, ...]:
    """Per-subscale mean and sample SD of participant subscale scores."""
    if not responses:
        raise ResponseValidationError("need at least one response")
    out = []
    for name, items in SUBSCALES:
        scores = [sum(r.answers[i] for i in items) / len(items) for r in responses]
        mean = statistics.fmean(scores)
        sd = statistics.stdev(scores) if len(scores) > 1 else 0.0
        out.append(SubscaleStats(name=name, mean=mean, sd=sd, n=len(scores)))
    return tuple(out)


def cronbach_alpha(matrix: Sequence[Sequence[float]]) -> float:
    """Cronbach's alpha over a participants-by-items score matrix."""
    n = len(matrix)
    if n < 2:
        raise DegenerateDataError(f"alpha needs at least 2 participants, got {n}")
    k = len(matrix[0])
    if k < 2:
        raise DegenerateDataError(f"alpha needs at least 2 items, got {k}")
    for row in matrix:
        if len(row) != k:
            raise ResponseValidationError("ragged score matrix")

    def ss(values: list[float]) -> float:
        mean = sum(values) / len(values)
        return sum((v - mean) ** 2 for v in values)

    ss_items = sum(ss([row[j] for row in matrix]) for j in range(k))
    totals = [sum(row) for row in matrix]
    ss_total = ss(totals)
    if ss_total == 0.0:
        raise DegenerateDataError("total scores have zero variance; alpha is undefined")
    return (k * (ss_total - ss_items)) / ((k - 1) * ss_total)


def alpha_for_responses(
    responses: Sequence[PresenceResponse], items: Iterable[int] | None = None
) -> float:
    """Alpha over all 15 items by default, or a 1-based item subset
    (e.g. a single subscale's items)."""
    idx = [i - 1 for i in items] if items is not None else list(range(ITEM_COUNT))
    for i in idx:
        if not 0 <= i < ITEM_COUNT:
            raise ResponseValidationError(f"item index {i + 1} outside 1..{ITEM_COUNT}")
    return cronbach_alpha([[float(r.answers[i]) for i in idx] for r in responses])


def parse_responses_csv(text: str) -> list[PresenceResponse]:
    """Comma-separated responses: header row, then one row per participant.

    First column is the participant id, followed by the 15 item columns.
    """
    rows = list(csv.reader(StringIO(text)))
    rows = [r for r in rows if r and any(cell.strip() for cell in r)]
    if len(rows) < 2:
        raise ResponseValidationError("response file needs a header row and at least one data row")
    header = rows[0]
    if len(header) != ITEM_COUNT + 1:
        raise ResponseValidationError(
            f"header row has {len(header)} columns, expected {ITEM_COUNT + 1} (participant + items)"
        )
    responses: list[PresenceResponse] = []
    for row_no, row in enumerate(rows[1:], start=2):
        if len(row) != ITEM_COUNT + 1:
            raise ResponseValidationError(
                f"row {row_no}: has {len(row)} columns, expected {ITEM_COUNT + 1}"
            )
        participant = row[0].strip()
        try:
            answers = tuple(int(cell.strip()) for cell in row[1:])
        except ValueError:
            raise ResponseValidationError(f"row {row_no}: non-integer answer")
        responses.append(PresenceResponse(participant=participant, answers=answers))
    return responses


def load_responses(path: str | Path) -> list[PresenceResponse]:
    return parse_responses_csv(Path(path).read_text(encoding="utf-8"))


def format_report(stats: Sequence[SubscaleStats], alpha: float) -> str:
    """Aligned text report in the conventional (M=..., SD=...) style."""
    width = max(len(s.name) for s in stats)
    lines = [
        f"{s.name.ljust(width)}  M={s.mean:.2f}  SD={s.sd:.3f}  n={s.n}" for s in stats
    ]
    lines.append(f"{'cronbach_alpha'.ljust(width)}  alpha={alpha:.3f}")
    return "\n".join(lines)


def report_jsonable(stats: Sequence[SubscaleStats], alpha: float) -> dict:
    return {
        "subscales": [
            {"name": s.name, "mean": s.mean, "sd": s.sd, "n": s.n} for s in stats
        ],
        "cronbach_alpha": alpha,
    }
