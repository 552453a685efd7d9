from typing import List

import numpy as np
from pydantic import BaseModel, Field, model_validator


class TensorPayload(BaseModel):
    """Row-major tensor interchange format: {"shape": [...], "data": [...]}."""
    shape: List[int]
    data: List[float]

    @model_validator(mode="after")
    def check_length(self):
        if any(d < 0 for d in self.shape):
            raise ValueError("shape entries must be nonnegative")
        expected = int(np.prod(self.shape)) if self.shape else 1
        if len(self.data) != expected:
            raise ValueError(f"data has {len(self.data)} values but shape {self.shape} needs {expected}")
        return self

    def to_array(self) -> np.ndarray:
        return np.asarray(self.data, dtype=np.float64).reshape(self.shape)

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "TensorPayload":
        arr = np.asarray(arr, dtype=np.float64)
        return cls(shape=list(arr.shape), data=[float(v) for v in arr.ravel()])


class ConvolveRequest(BaseModel):
    input: TensorPayload
    kernel: TensorPayload
    stride: int = Field(1, ge=1)
    pad: int = Field(0, ge=0)
