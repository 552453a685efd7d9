"""
Classical convolution oracle and the flattening conventions the rest of
the pipeline relies on.

Input images flatten row-major, (i, j, k) ↦ i·W·C + j·C + k, one image per
column. Outputs flatten (iE, jF, dM) ↦ dM·E·F + iE·F + jF, so every filter's
E×F feature map is one contiguous block.
"""
import logging
from typing import Tuple

import numpy as np

from ..core.errors import ShapeError
from ..models.tensor import ConvShape, InputBatch, KernelBank, OutputBatch, output_extent

logger = logging.getLogger(__name__)


def derive_output_shape(H: int, W: int, R: int, S: int, stride: int = 1, pad: int = 0) -> Tuple[int, int]:
    return output_extent(H, R, stride, pad), output_extent(W, S, stride, pad)


def check_shapes(x: InputBatch, k: KernelBank, shape: ConvShape) -> None:
    if x.shape != (shape.N, shape.H, shape.W, shape.C):
        raise ShapeError(f"input shape {x.shape} does not match N×H×W×C = "
                         f"{(shape.N, shape.H, shape.W, shape.C)}")
    if k.shape != (shape.R, shape.S, shape.C, shape.M):
        raise ShapeError(f"kernel shape {k.shape} does not match R×S×C×M = "
                         f"{(shape.R, shape.S, shape.C, shape.M)}")


def conv_reference(x: InputBatch, k: KernelBank, shape: ConvShape) -> OutputBatch:
    """
    Y[n, iE, jF, dM] = Σ_{i,j,k} X[n, iE·sh + i − ph, jF·sw + j − pw, k] · K[i, j, k, dM]

    Out-of-bounds input positions read as zero.
    """
    check_shapes(x, k, shape)
    s = shape
    xp = np.pad(x.data, ((0, 0), (s.pad_h, s.pad_h), (s.pad_w, s.pad_w), (0, 0)))
    y = np.zeros((s.N, s.E, s.F, s.M), dtype=np.float64)
    row_span = s.stride_h * (s.E - 1) + 1
    col_span = s.stride_w * (s.F - 1) + 1
    for i in range(s.R):
        for j in range(s.S):
            window = xp[:, i:i + row_span:s.stride_h, j:j + col_span:s.stride_w, :]
            y += np.einsum("nefc,cm->nefm", window, k.data[i, j])
    logger.debug("conv_reference: %s -> output %s", x.shape, y.shape)
    return OutputBatch(y)


def flatten_input(x: InputBatch) -> np.ndarray:
    """HWC × N matrix, one flattened image per column."""
    n = x.shape[0]
    return np.ascontiguousarray(x.data.reshape(n, -1).T)


def unflatten_input(columns: np.ndarray, shape: ConvShape) -> InputBatch:
    columns = np.asarray(columns, dtype=np.float64)
    if columns.shape != (shape.input_size, shape.N):
        raise ShapeError(f"expected a {shape.input_size}×{shape.N} matrix, got {columns.shape}")
    return InputBatch(columns.T.reshape(shape.N, shape.H, shape.W, shape.C))


def flatten_output(y: OutputBatch) -> np.ndarray:
    """EFM × N matrix in the dM-major feature-map order."""
    n = y.shape[0]
    return np.ascontiguousarray(y.data.transpose(0, 3, 1, 2).reshape(n, -1).T)
