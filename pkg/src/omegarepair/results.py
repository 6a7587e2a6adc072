"""Result types shared by the threshold pipelines: thresholds with attainment
and memory classification, and mode-based finite-memory strategies."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional


class Attainment(enum.Enum):
    ATTAINED = "ATTAINED"
    INFIMUM_ONLY = "INFIMUM_ONLY"


class MemoryClass(enum.Enum):
    POSITIONAL = "POSITIONAL"
    FINITE = "FINITE"
    INFINITE_FOR_EXACT = "INFINITE_FOR_EXACT"


class Orientation(enum.Enum):
    REPAIR = "REPAIR"
    IMPAIR = "IMPAIR"


@dataclass(frozen=True)
class ThresholdResult:
    """Optimal threshold with attainment/memory classification.

    ``value`` is None when the threshold is infinite (no feasible
    repair/impair at any cost).  Good/bad threshold sets depend on the
    orientation: repair thresholds at or above tau* are good; impair
    thresholds strictly below tau* mean the system is safe.
    """

    value: Optional[Fraction]
    attainment: Optional[Attainment]
    memory: Optional[MemoryClass]
    orientation: Orientation

    @property
    def infinite(self) -> bool:
        return self.value is None

    @property
    def good_set(self) -> str:
        if self.orientation is Orientation.REPAIR:
            return "{}" if self.infinite else f"[{_q(self.value)}, oo)"
        return "(0, oo)" if self.infinite else f"(0, {_q(self.value)})"

    @property
    def bad_set(self) -> str:
        if self.orientation is Orientation.REPAIR:
            return "[0, oo)" if self.infinite else f"[0, {_q(self.value)})"
        return "{}" if self.infinite else f"[{_q(self.value)}, oo)"

    def __str__(self):
        v = "oo" if self.infinite else _q(self.value)
        tail = "" if self.infinite else f" {self.attainment.value} {self.memory.value}"
        return f"TAU* {v}{tail}"


def _q(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


class ExitKind(enum.Enum):
    AFTER_STEPS = "AFTER_STEPS"
    AFTER_ANCHOR_HITS = "AFTER_ANCHOR_HITS"
    AFTER_ACCEPTING_VISIT = "AFTER_ACCEPTING_VISIT"
    FOREVER = "FOREVER"


@dataclass(frozen=True)
class ExitRule:
    kind: ExitKind
    steps: Optional[int] = None
    anchor: Optional[object] = None

    def __str__(self):
        if self.kind is ExitKind.AFTER_STEPS:
            return f"AFTER_STEPS {self.steps}"
        if self.kind is ExitKind.AFTER_ANCHOR_HITS:
            return f"AFTER_ANCHOR_HITS {self.anchor} {self.steps}"
        return self.kind.value


@dataclass(frozen=True)
class StrategyMode:
    """Positional successor map over the owner's vertices plus an exit rule."""

    moves: dict  # vertex -> successor vertex
    exit_rule: ExitRule


@dataclass(frozen=True)
class FiniteMemoryStrategy:
    """Mode-based strategy: play the current mode's positional map until its
    exit rule fires, then advance to the next mode.

    With ``loop`` set, mode advancement wraps from the last mode back to the
    first (a round schedule); otherwise the final mode must run forever.
    """

    modes: tuple  # of StrategyMode
    epsilon: Optional[Fraction] = None
    guarantee: Optional[Fraction] = None
    loop: bool = False

    def __post_init__(self):
        if not self.modes:
            raise ValueError("strategy needs at least one mode")
        if not self.loop and self.modes[-1].exit_rule.kind is not ExitKind.FOREVER:
            raise ValueError("last mode of a non-looping strategy must be FOREVER")

    def serialize(self, vertex_name=str) -> str:
        lines = []
        for i, mode in enumerate(self.modes):
            lines.append(f"MODE {i}")
            for v in sorted(mode.moves, key=vertex_name):
                lines.append(f"MAP {vertex_name(v)} -> {vertex_name(mode.moves[v])}")
            lines.append(f"EXIT {mode.exit_rule}")
        if self.loop:
            lines.append("LOOP")
        return "\n".join(lines) + "\n"
