"""Three-valued results for bounded searches and budgeted decision procedures.

Bounded searches never assert nonexistence: they either return a
:class:`Certified` value carrying a re-checkable witness, or
:class:`Inconclusive` describing the resources that were exhausted.
Exact decision procedures (identity testing, vanishing checks) raise
:class:`BudgetExceeded` when they run out of budget; the exception is a
distinct third outcome, never a boolean.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Generic, TypeVar

T = TypeVar("T")


class BudgetExceeded(Exception):
    """An exact procedure ran out of its configured node/evaluation budget."""

    def __init__(self, message: str, budget: int):
        super().__init__(f"{message} (budget {budget})")
        self.budget = budget


@dataclass(frozen=True)
class Certified(Generic[T]):
    """A successful search result whose witness can be re-verified."""

    value: T

    @property
    def certified(self) -> bool:
        return True


@dataclass(frozen=True)
class Inconclusive:
    """A search that exhausted its bounds without finding a witness."""

    reason: str

    @property
    def certified(self) -> bool:
        return False


SearchOutcome = Certified[T] | Inconclusive
