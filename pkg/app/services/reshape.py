"""
Convolution as a sparse matrix product.

`build_dbt_kernel` lays the filters out as the doubly block-Toeplitz matrix
K̃ (EFM × HWC) so that K̃ · flatten_input(X) is the flattened output. The
input-patch Toeplitz matrix is kept as a comparison baseline.
"""
import logging
from typing import List

import numpy as np
from scipy.sparse import csr_matrix

from ..core.errors import ShapeError
from ..models.sparse import ReshapePlan, SparseMatrix
from ..models.tensor import ConvShape, InputBatch, KernelBank, OutputBatch
from ..schemas.sparse import NnzStats
from .tensor_core import check_shapes

logger = logging.getLogger(__name__)


def _check_kernel(k: KernelBank, shape: ConvShape) -> None:
    if k.shape != (shape.R, shape.S, shape.C, shape.M):
        raise ShapeError(f"kernel shape {k.shape} does not match R×S×C×M = "
                         f"{(shape.R, shape.S, shape.C, shape.M)}")


def _tap_grid(shape: ConvShape):
    """Input coordinates hit by every (output position, kernel tap) pair, with an in-bounds mask."""
    s = shape
    iE, jF, i, j, k = np.meshgrid(
        np.arange(s.E), np.arange(s.F), np.arange(s.R), np.arange(s.S), np.arange(s.C),
        indexing="ij",
    )
    row = iE * s.stride_h + i - s.pad_h
    col = jF * s.stride_w + j - s.pad_w
    inside = (row >= 0) & (row < s.H) & (col >= 0) & (col < s.W)
    return iE, jF, i, j, k, row, col, inside


def build_dbt_kernel(k: KernelBank, shape: ConvShape) -> SparseMatrix:
    """
    Row p = dM·E·F + iE·F + jF holds one entry per in-bounds kernel tap:
    column (iE·sh + i − ph)·W·C + (jF·sw + j − pw)·C + k, value K[i, j, k, dM].
    Taps landing in the padding and zero kernel values are not stored.
    """
    _check_kernel(k, shape)
    s = shape
    plan = ReshapePlan(s)
    iE, jF, i, j, kk, row, col, inside = _tap_grid(s)
    iE, jF, i, j, kk = iE[inside], jF[inside], i[inside], j[inside], kk[inside]
    cols = plan.col_index(row[inside], col[inside], kk)

    rows_all, cols_all, vals_all = [], [], []
    for d in range(s.M):
        rows_all.append(plan.row_index(iE, jF, d))
        cols_all.append(cols)
        vals_all.append(k.data[i, j, kk, d])
    rows_idx = np.concatenate(rows_all)
    cols_idx = np.concatenate(cols_all)
    vals = np.concatenate(vals_all)
    keep = vals != 0.0
    m = SparseMatrix(csr_matrix((vals[keep], (rows_idx[keep], cols_idx[keep])),
                                shape=(s.output_size, s.input_size)))
    logger.info("built DBT kernel %d×%d with %d nonzeros", m.rows, m.cols, m.nnz)
    return m


def build_toeplitz_input(x: InputBatch, shape: ConvShape, image: int = 0) -> SparseMatrix:
    """
    Patch matrix X̃ (EF × RSC) of one image: row t = iE·F + jF is the window at
    that output position, column (i·S + j)·C + k, so X̃ · K[..., d].ravel() is
    feature map d.
    """
    if x.shape[1:] != (shape.H, shape.W, shape.C):
        raise ShapeError(f"image shape {x.shape[1:]} does not match H×W×C = {(shape.H, shape.W, shape.C)}")
    if not 0 <= image < x.shape[0]:
        raise ShapeError(f"image index {image} out of range for batch of {x.shape[0]}")
    s = shape
    iE, jF, i, j, kk, row, col, inside = _tap_grid(s)
    rows_idx = (iE * s.F + jF)[inside]
    cols_idx = ((i * s.S + j) * s.C + kk)[inside]
    vals = x.data[image][row[inside], col[inside], kk[inside]]
    keep = vals != 0.0
    return SparseMatrix(csr_matrix((vals[keep], (rows_idx[keep], cols_idx[keep])),
                                   shape=(s.E * s.F, s.patch_size)))


def build_toeplitz_batch(x: InputBatch, shape: ConvShape) -> List[SparseMatrix]:
    return [build_toeplitz_input(x, shape, image=n) for n in range(x.shape[0])]


def kernel_columns(k: KernelBank) -> np.ndarray:
    """RSC × M matrix whose column d is filter d flattened in (i, j, k) order."""
    r, s, c, m = k.shape
    return k.data.reshape(r * s * c, m)


def toeplitz_convolve(x: InputBatch, k: KernelBank, shape: ConvShape) -> OutputBatch:
    """Convolution through the patch baseline, image by image."""
    check_shapes(x, k, shape)
    kc = kernel_columns(k)
    maps = [m.matmul(kc).reshape(shape.E, shape.F, shape.M) for m in build_toeplitz_batch(x, shape)]
    return OutputBatch(np.stack(maps))


def reshape_output(y_flat: np.ndarray, shape: ConvShape) -> OutputBatch:
    y_flat = np.asarray(y_flat, dtype=np.float64)
    if y_flat.ndim == 1:
        y_flat = y_flat[:, None]
    if y_flat.shape != (shape.output_size, shape.N):
        raise ShapeError(f"expected a {shape.output_size}×{shape.N} matrix, got {y_flat.shape}")
    maps = y_flat.T.reshape(shape.N, shape.M, shape.E, shape.F)
    return OutputBatch(maps.transpose(0, 2, 3, 1))


def nnz_stats(m: SparseMatrix) -> NnzStats:
    size = m.rows * m.cols
    row_nnz = m.row_nnz()
    return NnzStats(
        nnz=m.nnz,
        row_nnz_max=int(row_nnz.max()) if row_nnz.size else 0,
        density=m.nnz / size if size else 0.0,
    )


def kernel_reshape_cost(shape: ConvShape) -> int:
    """Classical touches to lay out K̃, paid once per kernel configuration."""
    return shape.R * shape.S * shape.C * shape.M


def toeplitz_duplication(x: InputBatch, shape: ConvShape, image: int = 0) -> float:
    """How many times the patch baseline stores each nonzero pixel, on average."""
    pixels = int(np.count_nonzero(x.data[image]))
    if pixels == 0:
        return 0.0
    return build_toeplitz_input(x, shape, image).nnz / pixels
