"""Objectives, due-date scenarios, statuses and solver configuration."""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional, Tuple

from ..instance import Instance, ProblemClass

DEFAULT_TIME_LIMIT = 3600.0


class Objective(str, Enum):
    MAKESPAN = "makespan"
    TIME_BALANCE = "timebalance"
    RESOURCE_BALANCE = "resourcebalance"


class Status(str, Enum):
    OPTIMAL = "OPTIMAL"
    FEASIBLE = "FEASIBLE"
    INFEASIBLE = "INFEASIBLE"
    TIME_LIMIT = "TIME_LIMIT"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Scenario:
    """Due-date regime: A (tardiness allowed), B (on time), C (bounded earliness v)."""

    kind: str = "A"
    v: Optional[Fraction] = None

    def __post_init__(self):
        kind = self.kind.upper()
        object.__setattr__(self, "kind", kind)
        if kind not in ("A", "B", "C"):
            raise ConfigError(f"unknown scenario {self.kind!r}")
        if kind == "C":
            if self.v is None:
                raise ConfigError("scenario C needs an earliness factor v")
            v = Fraction(self.v)
            if not 0 < v < 1:
                raise ConfigError("earliness factor must satisfy 0 < v < 1")
            object.__setattr__(self, "v", v)
        elif self.v is not None:
            raise ConfigError(f"scenario {kind} takes no earliness factor")

    @classmethod
    def parse(cls, kind: str, v=None) -> "Scenario":
        kind = kind.upper()
        if kind == "C":
            return cls("C", Fraction(v if v is not None else Fraction(1, 2)))
        return cls(kind)

    def window(self, due: int, horizon: int) -> Tuple[int, int]:
        """Allowed end times of a delivery activity with due date ``due``."""
        if self.kind == "A":
            return due, horizon
        if self.kind == "B":
            return due, due
        return math.ceil(due * (1 - self.v)), due

    @property
    def tag(self) -> str:
        return {"A": "Eq.15", "B": "Eq.45b", "C": "Eq.45c"}[self.kind]

    def __str__(self) -> str:
        return self.kind if self.kind != "C" else f"C(v={self.v})"


SCENARIO_A = Scenario("A")
SCENARIO_B = Scenario("B")


@dataclass(frozen=True)
class SolverConfig:
    objective: Objective = Objective.MAKESPAN
    scenario: Scenario = SCENARIO_A
    time_limit: float = DEFAULT_TIME_LIMIT
    problem_class: Optional[ProblemClass] = None
    big_M: Optional[int] = None
    # time balance over flexible activities only instead of all present ones
    flexible_only: bool = False
    node_limit: Optional[int] = None
    validate_incumbents: bool = True

    def __post_init__(self):
        object.__setattr__(self, "objective", Objective(self.objective))
        if isinstance(self.scenario, str):
            object.__setattr__(self, "scenario", Scenario.parse(self.scenario))

    def resolved(self, inst: Instance) -> "SolverConfig":
        """Fill instance-dependent fields and reject inconsistent combinations."""
        cls = self.problem_class or inst.problem_class
        if cls != inst.problem_class:
            raise ConfigError(f"config is for {cls.value}, instance is {inst.problem_class.value}")
        if not cls.time_flexible:
            if self.objective != Objective.MAKESPAN:
                raise ConfigError(f"{self.objective.value} is only defined for RCMPSP_ACTF")
            if self.scenario.kind != "A":
                raise ConfigError("due-date scenarios apply to RCMPSP_ACTF only")
        if self.objective == Objective.RESOURCE_BALANCE and not inst.balanced_ids:
            raise ConfigError("resource balance needs at least one balanced resource")
        big_m = inst.horizon if self.big_M is None else self.big_M
        if big_m != inst.horizon:
            raise ConfigError("big_M must equal the horizon T")
        return SolverConfig(self.objective, self.scenario, self.time_limit, cls, big_m,
                            self.flexible_only, self.node_limit, self.validate_incumbents)
