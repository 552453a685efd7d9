"""
Run orchestration shared by the CLI and the HTTP routers: option parsing
into domain configs and the per-command pipelines.
"""
import enum
import logging
from typing import Any, Dict, Optional, Type, TypeVar

import numpy as np

from ..core.errors import FlagError, ShapeError
from ..models.circuits import CircuitKind, EstimationMode, ShotPlan
from ..models.engine import QConvConfig
from ..models.qstate import PrepStrategy
from ..models.tensor import ConvShape, InputBatch, KernelBank
from ..schemas.sparse import ReshapeOut
from .engine import estimate_shot_budget, qconvolve, qconvolve_batched_sampling
from .reshape import (
    build_dbt_kernel,
    build_toeplitz_input,
    kernel_reshape_cost,
    nnz_stats,
    toeplitz_duplication,
)
from .storage import result_dict, sparse_dump
from .tensor_core import conv_reference

logger = logging.getLogger(__name__)

E = TypeVar("E", bound=enum.Enum)


def parse_choice(enum_cls: Type[E], value: str, flag: str) -> E:
    try:
        return enum_cls(value)
    except ValueError:
        choices = ", ".join(m.value for m in enum_cls)
        raise FlagError(f"{flag} must be one of {{{choices}}}, got {value!r}")


def build_config(
    shape: ConvShape,
    mode: str = "exact",
    shots: Optional[int] = None,
    epsilon: float = 0.05,
    delta: float = 0.05,
    seed: Optional[int] = None,
    circuit: str = "interference",
    strategy: str = "aqram",
    parallel_units: int = 1,
    batched: bool = False,
    entries: Optional[int] = None,
) -> QConvConfig:
    est_mode = parse_choice(EstimationMode, mode, "--mode")
    kind = parse_choice(CircuitKind, circuit, "--circuit")
    prep = parse_choice(PrepStrategy, strategy, "--strategy")
    if parallel_units < 1:
        raise FlagError(f"--parallel-units must be >= 1, got {parallel_units}")
    if not 0 < epsilon < 1 or not 0 < delta < 1:
        raise FlagError("--epsilon and --delta must lie in (0, 1)")

    if est_mode is EstimationMode.SAMPLED:
        if seed is None:
            raise FlagError("--seed is required in sampled mode")
        if shots is not None:
            if shots < 1:
                raise FlagError(f"--shots must be >= 1, got {shots}")
            plan = ShotPlan(shots=shots, epsilon=epsilon, delta=delta, seed=seed, mode=est_mode)
        else:
            # batched sampling draws one pool of shots; per-entry mode splits δ across the estimated entries
            if batched:
                entries = 1
            elif entries is None:
                entries = shape.output_size * shape.N
            plan = estimate_shot_budget(epsilon, delta, entries, seed=seed)
    else:
        # exact mode ignores the seed
        plan = ShotPlan(shots=1, epsilon=epsilon, delta=delta, seed=None, mode=est_mode)
    return QConvConfig(shape=shape, plan=plan, strategy=prep, batched=batched,
                       circuit=kind, parallel_units=parallel_units)


def make_shape(x: np.ndarray, k: np.ndarray, stride: int, pad: int) -> ConvShape:
    return ConvShape.from_dims(x.shape, k.shape, stride=stride, pad=pad)


def encodable_entries(x: np.ndarray, k: np.ndarray, shape: ConvShape) -> int:
    """Entries the circuits actually estimate: nonzero rows of K̃ times nonzero image columns."""
    rows = int(np.count_nonzero(build_dbt_kernel(KernelBank(k), shape).row_nnz()))
    cols = int(np.count_nonzero(np.any(x.reshape(x.shape[0], -1) != 0.0, axis=1)))
    return max(1, rows * cols)


def run_convolve(x: np.ndarray, k: np.ndarray, stride: int = 1, pad: int = 0) -> np.ndarray:
    shape = make_shape(x, k, stride, pad)
    return conv_reference(InputBatch(x), KernelBank(k), shape).data


def run_qconvolve(x: np.ndarray, k: np.ndarray, cfg: QConvConfig, top_k: int = 5) -> Dict[str, Any]:
    if top_k < 1:
        raise FlagError(f"--top-k must be >= 1, got {top_k}")
    xb, kb = InputBatch(x), KernelBank(k)
    if cfg.batched:
        batched = qconvolve_batched_sampling(xb, kb, cfg)
        return result_dict(batched.result, cfg, batched, top_k=top_k)
    return result_dict(qconvolve(xb, kb, cfg), cfg)


def run_reshape(
    k: np.ndarray,
    height: Optional[int],
    width: Optional[int],
    stride: int = 1,
    pad: int = 0,
    baseline: str = "dbt",
    x: Optional[np.ndarray] = None,
    image: int = 0,
) -> ReshapeOut:
    if baseline not in ("dbt", "toeplitz"):
        raise FlagError(f"--baseline must be one of {{dbt, toeplitz}}, got {baseline!r}")
    if x is not None:
        shape = make_shape(x, k, stride, pad)
    else:
        if baseline == "toeplitz":
            raise FlagError("the toeplitz baseline needs an --input image")
        if height is None or width is None:
            raise FlagError("--height and --width are required without --input")
        if k.ndim != 4:
            raise ShapeError(f"kernel must be R×S×C×M, got shape {list(k.shape)}")
        r, s, c, m = k.shape
        shape = ConvShape(N=1, H=height, W=width, C=c, R=r, S=s, M=m,
                          stride_h=stride, stride_w=stride, pad_h=pad, pad_w=pad)

    if baseline == "toeplitz":
        xb = InputBatch(x)
        matrix = build_toeplitz_input(xb, shape, image=image)
        duplication = toeplitz_duplication(xb, shape, image=image)
    else:
        matrix = build_dbt_kernel(KernelBank(k), shape)
        duplication = None
    return ReshapeOut(
        baseline=baseline,
        matrix=sparse_dump(matrix),
        stats=nnz_stats(matrix),
        reshape_cost=kernel_reshape_cost(shape),
        duplication=duplication,
    )
