from dataclasses import dataclass, field
from typing import Iterable, List, Tuple

import numpy as np
from scipy.sparse import csr_matrix

from ..core.errors import ShapeError
from .tensor import ConvShape


@dataclass(frozen=True)
class SparseMatrix:
    """
    Row-major sparse real matrix backed by a scipy CSR matrix.

    Column indices are strictly increasing within a row and every stored
    value is nonzero.
    """
    csr: csr_matrix = field(repr=False)

    def __post_init__(self):
        m = csr_matrix(self.csr, dtype=np.float64, copy=True)
        m.sum_duplicates()
        m.eliminate_zeros()
        m.sort_indices()
        object.__setattr__(self, "csr", m)

    @classmethod
    def from_entries(cls, rows: int, cols: int, entries: Iterable[Tuple[int, int, float]]) -> "SparseMatrix":
        triples = list(entries)
        if not triples:
            return cls(csr_matrix((rows, cols), dtype=np.float64))
        r, c, v = (np.asarray(a) for a in zip(*triples))
        if np.any(r < 0) or np.any(r >= rows) or np.any(c < 0) or np.any(c >= cols):
            raise ShapeError(f"entry index out of range for a {rows}×{cols} matrix")
        return cls(csr_matrix((v.astype(np.float64), (r, c)), shape=(rows, cols)))

    @property
    def rows(self) -> int:
        return self.csr.shape[0]

    @property
    def cols(self) -> int:
        return self.csr.shape[1]

    @property
    def nnz(self) -> int:
        return int(self.csr.nnz)

    def row_entries(self, p: int) -> List[Tuple[int, float]]:
        start, stop = self.csr.indptr[p], self.csr.indptr[p + 1]
        return [(int(c), float(v)) for c, v in zip(self.csr.indices[start:stop], self.csr.data[start:stop])]

    def row_dense(self, p: int) -> np.ndarray:
        return self.csr.getrow(p).toarray().ravel()

    def row_nnz(self) -> np.ndarray:
        return np.diff(self.csr.indptr)

    def entries(self) -> List[Tuple[int, int, float]]:
        """All (row, col, value) triples sorted by (row, col)."""
        coo = self.csr.tocoo()
        return [(int(r), int(c), float(v)) for r, c, v in zip(coo.row, coo.col, coo.data)]

    def dense(self) -> np.ndarray:
        return self.csr.toarray()

    def matmul(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.shape[0] != self.cols:
            raise ShapeError(f"cannot multiply {self.rows}×{self.cols} matrix by operand with {x.shape[0]} rows")
        return np.asarray(self.csr @ x)


@dataclass(frozen=True)
class ReshapePlan:
    """
    Index bijections of the reshaped kernel matrix.

    Rows p ↔ (iE, jF, dM) with p = dM·E·F + iE·F + jF, so each filter's
    feature map occupies a contiguous block. Columns r ↔ (i, j, k) with
    r = i·W·C + j·C + k, the flattening of an input image.
    """
    shape: ConvShape

    def row_index(self, iE: int, jF: int, dM: int) -> int:
        s = self.shape
        return dM * s.E * s.F + iE * s.F + jF

    def row_coords(self, p: int) -> Tuple[int, int, int]:
        s = self.shape
        dM, rest = divmod(p, s.E * s.F)
        iE, jF = divmod(rest, s.F)
        return iE, jF, dM

    def col_index(self, i: int, j: int, k: int) -> int:
        s = self.shape
        return i * s.W * s.C + j * s.C + k

    def col_coords(self, r: int) -> Tuple[int, int, int]:
        s = self.shape
        i, rest = divmod(r, s.W * s.C)
        j, k = divmod(rest, s.C)
        return i, j, k
