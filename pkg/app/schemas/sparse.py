from typing import List, Optional, Union

from pydantic import BaseModel, Field

from .tensor import TensorPayload


class NnzStats(BaseModel):
    nnz: int
    row_nnz_max: int
    density: float


class SparseMatrixDump(BaseModel):
    rows: int
    cols: int
    entries: List[List[Union[int, float]]]  # [row, col, value], sorted by (row, col)


class ReshapeRequest(BaseModel):
    kernel: TensorPayload
    height: Optional[int] = Field(None, ge=1)
    width: Optional[int] = Field(None, ge=1)
    stride: int = Field(1, ge=1)
    pad: int = Field(0, ge=0)
    baseline: str = "dbt"
    input: Optional[TensorPayload] = None
    image: int = Field(0, ge=0)


class ReshapeOut(BaseModel):
    baseline: str
    matrix: SparseMatrixDump
    stats: NnzStats
    reshape_cost: int
    duplication: Optional[float] = None
