from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from ..core.errors import ShapeError


def output_extent(size: int, kernel: int, stride: int, pad: int) -> int:
    """Number of valid window positions along one spatial axis."""
    if size < 1 or kernel < 1:
        raise ShapeError(f"extents must be >= 1 (size={size}, kernel={kernel})")
    if stride < 1:
        raise ShapeError(f"stride must be >= 1, got {stride}")
    if pad < 0:
        raise ShapeError(f"padding must be >= 0, got {pad}")
    span = size + 2 * pad - kernel
    if span < 0:
        raise ShapeError(f"kernel extent {kernel} exceeds padded input extent {size + 2 * pad}")
    return span // stride + 1


@dataclass(frozen=True)
class ConvShape:
    N: int
    H: int
    W: int
    C: int
    R: int
    S: int
    M: int
    stride_h: int = 1
    stride_w: int = 1
    pad_h: int = 0
    pad_w: int = 0

    def __post_init__(self):
        for name in ("N", "H", "W", "C", "R", "S", "M"):
            if int(getattr(self, name)) < 1:
                raise ShapeError(f"{name} must be >= 1, got {getattr(self, name)}")
        # validates stride/pad and kernel-fits-input along both axes
        output_extent(self.H, self.R, self.stride_h, self.pad_h)
        output_extent(self.W, self.S, self.stride_w, self.pad_w)

    @property
    def E(self) -> int:
        return output_extent(self.H, self.R, self.stride_h, self.pad_h)

    @property
    def F(self) -> int:
        return output_extent(self.W, self.S, self.stride_w, self.pad_w)

    @property
    def input_size(self) -> int:
        return self.H * self.W * self.C

    @property
    def output_size(self) -> int:
        return self.E * self.F * self.M

    @property
    def patch_size(self) -> int:
        return self.R * self.S * self.C

    @classmethod
    def from_dims(
        cls,
        input_shape: Tuple[int, ...],
        kernel_shape: Tuple[int, ...],
        stride: int | Tuple[int, int] = 1,
        pad: int | Tuple[int, int] = 0,
    ) -> "ConvShape":
        if len(input_shape) != 4:
            raise ShapeError(f"input must be N×H×W×C, got shape {tuple(input_shape)}")
        if len(kernel_shape) != 4:
            raise ShapeError(f"kernel must be R×S×C×M, got shape {tuple(kernel_shape)}")
        n, h, w, c = (int(d) for d in input_shape)
        r, s, kc, m = (int(d) for d in kernel_shape)
        if kc != c:
            raise ShapeError(f"kernel has {kc} input channels but input has {c}")
        sh, sw = (stride, stride) if isinstance(stride, int) else stride
        ph, pw = (pad, pad) if isinstance(pad, int) else pad
        return cls(N=n, H=h, W=w, C=c, R=r, S=s, M=m,
                   stride_h=sh, stride_w=sw, pad_h=ph, pad_w=pw)

    def to_dict(self) -> dict:
        return {
            "N": self.N, "H": self.H, "W": self.W, "C": self.C,
            "R": self.R, "S": self.S, "M": self.M,
            "stride_h": self.stride_h, "stride_w": self.stride_w,
            "pad_h": self.pad_h, "pad_w": self.pad_w,
            "E": self.E, "F": self.F,
        }


def _as_tensor(data, name: str) -> np.ndarray:
    arr = np.array(data, dtype=np.float64)
    if arr.ndim != 4:
        raise ShapeError(f"{name} must be a 4-D tensor, got {arr.ndim}-D")
    if not np.all(np.isfinite(arr)):
        raise ShapeError(f"{name} contains non-finite values")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class InputBatch:
    """Images indexed (n, i, j, k), shape N×H×W×C."""
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "data", _as_tensor(self.data, "input batch"))

    @property
    def shape(self) -> Tuple[int, int, int, int]:
        return tuple(self.data.shape)


@dataclass(frozen=True)
class KernelBank:
    """Filters indexed (i, j, k, d), shape R×S×C×M."""
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "data", _as_tensor(self.data, "kernel bank"))

    @property
    def shape(self) -> Tuple[int, int, int, int]:
        return tuple(self.data.shape)


@dataclass(frozen=True)
class OutputBatch:
    """Feature maps indexed (n, iE, jF, dM), shape N×E×F×M."""
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.array(self.data, dtype=np.float64)
        if arr.ndim != 4:
            raise ShapeError(f"output batch must be a 4-D tensor, got {arr.ndim}-D")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def shape(self) -> Tuple[int, int, int, int]:
        return tuple(self.data.shape)
