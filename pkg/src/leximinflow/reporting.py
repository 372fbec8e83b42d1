"""Pass/fail reports shared by the property checkers and the solver self-checks.

A report either passes or carries a witness: the ids involved plus the two
sides of the violated (in)equality as exact rationals, so a failure can be
re-evaluated independently of the checker that produced it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .rational import Rational, format_rational


@dataclass(frozen=True)
class Witness:
    """The concrete violation behind a failed report."""

    subject: tuple[str, ...]
    lhs: Rational
    rhs: Rational
    note: str = ""

    def __str__(self) -> str:
        where = ", ".join(self.subject)
        text = f"[{where}] {format_rational(self.lhs)} vs {format_rational(self.rhs)}"
        if self.note:
            text += f" ({self.note})"
        return text


@dataclass(frozen=True)
class PropertyReport:
    name: str
    passed: bool
    witness: Optional[Witness] = None
    detail: str = ""
    seed: Optional[int] = None

    def __post_init__(self):
        if self.passed and self.witness is not None:
            raise ValueError("passing report must not carry a witness")
        if not self.passed and self.witness is None:
            raise ValueError("failing report must carry a witness")

    def __str__(self) -> str:
        verdict = "pass" if self.passed else f"FAIL {self.witness}"
        text = f"{self.name}: {verdict}"
        if self.detail:
            text += f" — {self.detail}"
        return text


def passing(name: str, detail: str = "", seed: Optional[int] = None) -> PropertyReport:
    return PropertyReport(name=name, passed=True, detail=detail, seed=seed)


def failing(
    name: str,
    subject: tuple[str, ...],
    lhs,
    rhs,
    note: str = "",
    detail: str = "",
    seed: Optional[int] = None,
) -> PropertyReport:
    return PropertyReport(
        name=name,
        passed=False,
        witness=Witness(subject=subject, lhs=Rational(lhs), rhs=Rational(rhs), note=note),
        detail=detail,
        seed=seed,
    )
