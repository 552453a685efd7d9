import enum
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..core.errors import InvalidPlanError


class EstimationMode(str, enum.Enum):
    EXACT = "exact"
    SAMPLED = "sampled"


class CircuitKind(str, enum.Enum):
    SWAP = "swap"
    INTERFERENCE = "interference"


def hoeffding_shots(epsilon: float, delta: float) -> int:
    """Shots so that a Bernoulli frequency is within epsilon of its mean with probability 1 - delta."""
    return math.ceil(math.log(2.0 / delta) / (2.0 * epsilon ** 2))


@dataclass(frozen=True)
class ShotPlan:
    shots: int = 1
    epsilon: float = 0.05
    delta: float = 0.05
    seed: Optional[int] = None
    mode: EstimationMode = EstimationMode.EXACT

    def validate(self) -> "ShotPlan":
        if not 0 < self.epsilon < 1:
            raise InvalidPlanError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if not 0 < self.delta < 1:
            raise InvalidPlanError(f"delta must lie in (0, 1), got {self.delta}")
        if self.mode is EstimationMode.SAMPLED:
            if self.shots < 1:
                raise InvalidPlanError(f"sampled mode needs shots >= 1, got {self.shots}")
            if self.seed is None:
                raise InvalidPlanError("sampled mode needs an explicit seed")
        return self

    @property
    def sampled(self) -> bool:
        return self.mode is EstimationMode.SAMPLED

    def to_dict(self) -> dict:
        return {"shots": self.shots, "epsilon": self.epsilon, "delta": self.delta,
                "seed": self.seed, "mode": self.mode.value}


@dataclass(frozen=True)
class MeasurementRecord:
    counts: Dict[str, int]
    total: int

    def __post_init__(self):
        if sum(self.counts.values()) != self.total:
            raise ValueError("measurement counts do not sum to the shot total")

    def frequency(self, label: str) -> float:
        return self.counts.get(label, 0) / self.total if self.total else 0.0


@dataclass(frozen=True)
class BatchedSample:
    p: int
    q: int
    ancilla: int


@dataclass(frozen=True)
class EstimationResult:
    estimate: float
    exact: float
    stderr: float
    shots: int
    circuit: CircuitKind
    p0: float  # estimated (or exact) ancilla-0 probability
    record: Optional[MeasurementRecord] = field(default=None, repr=False)


@dataclass(frozen=True)
class BatchedSampling:
    """
    Measurement of the batched superposition over valid (p, q) pairs.

    `joint[i, a]` is the exact probability of observing pair `pairs[i]` with
    ancilla a; `counts` holds the sampled tallies in the same layout.
    """
    pairs: List[Tuple[int, int]]
    p0: np.ndarray = field(repr=False)
    joint: np.ndarray = field(repr=False)
    counts: Optional[np.ndarray] = field(default=None, repr=False)
    samples: List[BatchedSample] = field(default_factory=list, repr=False)
    excluded_rows: Tuple[int, ...] = ()
    excluded_columns: Tuple[int, ...] = ()

    @property
    def shots(self) -> int:
        return int(self.counts.sum()) if self.counts is not None else 0

    def empirical(self) -> Optional[np.ndarray]:
        if self.counts is None or self.shots == 0:
            return None
        return self.counts / self.shots
