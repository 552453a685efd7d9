from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field

from .qstate import CostSummary
from .tensor import TensorPayload


class QubitCounts(BaseModel):
    index_p: int
    index_q: int
    data: int
    ancilla: int = 1
    total: int


class ComparisonRow(BaseModel):
    method: str
    qram_complexity: str
    circuit_depth: str
    preprocessing: str
    state_prep: str
    nisq_suitability: str
    instantiated: Dict[str, float]


class ResourceReport(BaseModel):
    shape: Dict[str, int]
    qubits: QubitCounts
    shots_used: int
    shots_per_entry: int
    depth_class: str
    kernel_reshape_cost: int
    kernel_nnz: int
    ledger: Dict[str, int]
    strategies: List[CostSummary]
    comparison: List[ComparisonRow]


class QConvolveRequest(BaseModel):
    input: TensorPayload
    kernel: TensorPayload
    stride: int = Field(1, ge=1)
    pad: int = Field(0, ge=0)
    mode: str = "exact"
    shots: Optional[int] = Field(None, ge=1)
    epsilon: float = 0.05
    delta: float = 0.05
    seed: Optional[int] = None
    circuit: str = "interference"
    strategy: str = "aqram"
    parallel_units: int = Field(1, ge=1)
    batched: bool = False
    top_k: int = Field(5, ge=1)


class ResourcesRequest(BaseModel):
    N: int = Field(1, ge=1)
    H: int = Field(..., ge=1)
    W: int = Field(..., ge=1)
    C: int = Field(1, ge=1)
    R: int = Field(..., ge=1)
    S: int = Field(..., ge=1)
    M: int = Field(1, ge=1)
    stride: int = Field(1, ge=1)
    pad: int = Field(0, ge=0)
    mode: str = "exact"
    shots: Optional[int] = Field(None, ge=1)
    epsilon: float = 0.05
    delta: float = 0.05
    strategy: str = "aqram"
    parallel_units: int = Field(1, ge=1)
    copies: Optional[int] = Field(None, ge=0)


class RunManifest(BaseModel):
    command: str
    config: Dict[str, Any]
    seed: Optional[int] = None
    input_digests: Dict[str, str]
    tool_version: str
    timestamp: str
