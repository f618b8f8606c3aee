"""Spaced-repetition review scheduling with expanding intervals.

SuperMemo-2 lineage: grades 0..5, an easiness factor floored at 1.3, and
fixed first intervals (1 day, then 5 days) before the multiplicative
expansion kicks in.  Failing grades restart the repetition ladder but
never subtract anything; mistakes are not punished.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from datetime import date, timedelta

from .errors import CanvasError

INITIAL_EASINESS = 2.5
MIN_EASINESS = 1.3
FIRST_INTERVAL_DAYS = 1
SECOND_INTERVAL_DAYS = 5


class InvalidGrade(CanvasError):
    code = "InvalidGrade"


@dataclass(frozen=True)
class ReviewItem:
    item_id: str
    module_ref: str
    easiness: float = INITIAL_EASINESS
    repetitions: int = 0
    interval_days: float = 0.0
    due_date: date = date.min

    def __post_init__(self):
        if self.easiness < MIN_EASINESS:
            raise InvalidGrade(f"easiness below the {MIN_EASINESS} floor")
        if self.repetitions < 0 or self.interval_days < 0:
            raise InvalidGrade("repetitions and interval must be >= 0")


def review(item: ReviewItem, grade: int, today: date) -> ReviewItem:
    """One graded recall; returns the rescheduled item.

    Grade >= 3 climbs the ladder (1 day, 5 days, then previous interval
    times the pre-update easiness, rounded up to whole days); grade < 3
    resets repetitions and the interval to 1 day.  The easiness update
    applies on every grade and never drops below the floor.
    """
    if not isinstance(grade, int) or isinstance(grade, bool) or not 0 <= grade <= 5:
        raise InvalidGrade(f"grade must be an integer in 0..5, got {grade!r}")
    if grade >= 3:
        repetitions = item.repetitions + 1
        if repetitions == 1:
            interval = float(FIRST_INTERVAL_DAYS)
        elif repetitions == 2:
            interval = float(SECOND_INTERVAL_DAYS)
        else:
            # the 1e-9 slack keeps float noise from pushing an exact
            # whole-day product up an extra day
            interval = float(math.ceil(item.interval_days * item.easiness - 1e-9))
    else:
        repetitions = 0
        interval = float(FIRST_INTERVAL_DAYS)
    easiness = max(
        MIN_EASINESS,
        item.easiness + (0.1 - (5 - grade) * (0.08 + (5 - grade) * 0.02)),
    )
    return replace(
        item,
        easiness=easiness,
        repetitions=repetitions,
        interval_days=interval,
        due_date=today + timedelta(days=interval),
    )


def due_items(items: list[ReviewItem], today: date) -> list[ReviewItem]:
    """Items due on or before today, ordered by due date then item id."""
    return sorted(
        (item for item in items if item.due_date <= today),
        key=lambda item: (item.due_date, item.item_id),
    )
