from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .circuits import CircuitKind, ShotPlan
from .qstate import PrepStrategy
from .tensor import ConvShape, OutputBatch
from ..schemas.engine import ResourceReport


@dataclass(frozen=True)
class QConvConfig:
    shape: ConvShape
    plan: ShotPlan = field(default_factory=ShotPlan)
    strategy: PrepStrategy = PrepStrategy.AUGMENTED_QRAM
    batched: bool = False
    circuit: CircuitKind = CircuitKind.INTERFERENCE
    parallel_units: int = 1

    def to_dict(self) -> dict:
        return {
            "shape": self.shape.to_dict(),
            "plan": self.plan.to_dict(),
            "strategy": self.strategy.value,
            "batched": self.batched,
            "circuit": self.circuit.value,
            "parallel_units": self.parallel_units,
        }


@dataclass(frozen=True)
class QConvResult:
    estimated: OutputBatch
    exact: OutputBatch
    stderr: np.ndarray = field(repr=False)
    max_abs_error: float
    mean_abs_error: float
    shots_used: int
    sign_loss: bool
    excluded_rows: Tuple[int, ...]
    excluded_columns: Tuple[int, ...]
    report: ResourceReport


@dataclass(frozen=True)
class BatchedConvResult:
    sampled_ranking: List[Tuple[int, int]]
    exact_ranking: List[Tuple[int, int]]
    counts: Optional[np.ndarray] = field(default=None, repr=False)  # (pairs, 2) ancilla counts
    result: Optional[QConvResult] = None

    def top_k(self, k: int) -> Tuple[List[Tuple[int, int]], List[Tuple[int, int]]]:
        return self.sampled_ranking[:k], self.exact_ranking[:k]
