"""
File formats: tensors as JSON ({"shape", "data"}) or CSV, sparse matrix
dumps, result files and the run manifest embedded in every output.
"""
import csv
import hashlib
import io
import json
import os
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import ValidationError

from .. import __version__
from ..core.config import get_settings
from ..core.errors import ParseError
from ..models.engine import BatchedConvResult, QConvConfig, QConvResult
from ..models.sparse import SparseMatrix
from ..schemas.engine import RunManifest
from ..schemas.sparse import SparseMatrixDump
from ..schemas.tensor import TensorPayload


def _read_text(path: str | Path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ParseError(f"no such file: {path}")
    except (OSError, UnicodeDecodeError) as e:
        raise ParseError(f"cannot read {path}: {e}")


def _parse_csv_tensor(text: str, path: str | Path, ndim: int) -> np.ndarray:
    """
    First line: `shape,d1,...,dk` giving the shape of one row's tensor. Each
    further line is one flattened tensor; rows stack along a new leading axis,
    which is dropped again when a single row already has `ndim` dimensions.
    """
    reader = [row for row in csv.reader(io.StringIO(text)) if row and any(c.strip() for c in row)]
    if not reader or reader[0][0].strip().lower() != "shape":
        raise ParseError(f"{path}: CSV tensor must start with a 'shape,...' header line")
    try:
        shape = [int(c) for c in reader[0][1:]]
        rows = [[float(c) for c in row] for row in reader[1:]]
    except ValueError as e:
        raise ParseError(f"{path}: {e}")
    size = int(np.prod(shape)) if shape else 1
    if not rows or any(len(r) != size for r in rows):
        raise ParseError(f"{path}: every data row must hold {size} values for shape {shape}")
    arr = np.asarray(rows, dtype=np.float64).reshape([len(rows)] + shape)
    if arr.ndim == ndim + 1 and arr.shape[0] == 1:
        arr = arr[0]
    return arr


def load_tensor(path: str | Path, ndim: int = 4) -> np.ndarray:
    text = _read_text(path)
    if str(path).lower().endswith(".csv"):
        arr = _parse_csv_tensor(text, path, ndim)
    else:
        try:
            arr = TensorPayload.model_validate_json(text).to_array()
        except ValidationError as e:
            raise ParseError(f"{path}: not a tensor JSON document ({e.error_count()} problems)")
    if arr.ndim != ndim:
        raise ParseError(f"{path}: expected a {ndim}-D tensor, got shape {list(arr.shape)}")
    return arr


def load_json(path: str | Path) -> Dict[str, Any]:
    text = _read_text(path)
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"{path}: invalid JSON ({e.msg} at line {e.lineno})")
    if not isinstance(payload, dict):
        raise ParseError(f"{path}: expected a JSON object")
    return payload


def dumps(payload: Dict[str, Any]) -> str:
    """Canonical JSON text: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def write_json(path: Optional[str | Path], payload: Dict[str, Any]) -> str:
    text = dumps(payload)
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def file_digest(path: str | Path) -> str:
    return "sha256:" + hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _timestamp(inputs: Dict[str, str]) -> str:
    epoch = get_settings().SOURCE_DATE_EPOCH
    if epoch is None:
        mtimes = [os.path.getmtime(p) for p in inputs.values() if os.path.exists(p)]
        epoch = int(max(mtimes)) if mtimes else 0
    return datetime.fromtimestamp(epoch, tz=timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def build_manifest(command: str, config: Dict[str, Any], seed: Optional[int], inputs: Dict[str, str]) -> RunManifest:
    return RunManifest(
        command=command,
        config=config,
        seed=seed,
        input_digests={name: file_digest(p) for name, p in sorted(inputs.items())},
        tool_version=__version__,
        timestamp=_timestamp(inputs),
    )


def tensor_dict(arr: np.ndarray) -> Dict[str, Any]:
    return TensorPayload.from_array(arr).model_dump()


def sparse_dump(m: SparseMatrix) -> SparseMatrixDump:
    return SparseMatrixDump(rows=m.rows, cols=m.cols, entries=[[r, c, v] for r, c, v in m.entries()])


def result_dict(
    result: QConvResult,
    cfg: QConvConfig,
    batched: Optional[BatchedConvResult] = None,
    top_k: int = 5,
) -> Dict[str, Any]:
    payload: Dict[str, Any] = {
        "config": cfg.to_dict(),
        "seed": cfg.plan.seed if cfg.plan.sampled else None,
        "estimated": tensor_dict(result.estimated.data),
        "exact": tensor_dict(result.exact.data),
        "stderr": tensor_dict(result.stderr),
        "max_abs_error": result.max_abs_error,
        "mean_abs_error": result.mean_abs_error,
        "shots_used": result.shots_used,
        "sign_loss": result.sign_loss,
        "excluded_rows": list(result.excluded_rows),
        "excluded_columns": list(result.excluded_columns),
        "resources": result.report.model_dump(),
    }
    if batched is not None:
        sampled, exact = batched.top_k(top_k)
        payload["ranking"] = {
            "top_k": top_k,
            "sampled": [list(pq) for pq in sampled],
            "exact": [list(pq) for pq in exact],
        }
    return payload


def load_results(paths: List[str | Path]) -> List[Dict[str, Any]]:
    results = []
    for path in paths:
        payload = load_json(path)
        missing = [k for k in ("config", "max_abs_error", "mean_abs_error", "resources") if k not in payload]
        if missing:
            raise ParseError(f"{path}: not a result file (missing {', '.join(missing)})")
        results.append(payload)
    return results
