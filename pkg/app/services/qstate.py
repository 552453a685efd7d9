"""
Amplitude encoding under a cost-modelled sparse key-value QRAM.

Encoding follows the two-phase procedure: the nonzero entries are
normalized into a compact superposition, then the key-value map scatters
each compact key K_i to its original index V_i. The state produced is always
exact; amplitude amplification and QRAM access are only counted in the
ledger.
"""
import hashlib
import logging
import math
from typing import Hashable, Optional

import numpy as np

from ..core.errors import DimensionMismatchError, ShapeError, ZeroVectorError
from ..models.qstate import (
    AmplitudeState,
    CostLedger,
    KeyValueMap,
    PrepStrategy,
    VectorProfile,
    padded_dim,
    qubits_for,
)
from ..schemas.qstate import CostSummary

logger = logging.getLogger(__name__)

# float noise must not push an exact integer round count up by one
_CEIL_TOL = 1e-9

_FORMULAS = {
    PrepStrategy.AMPLITUDE_AMPLIFICATION: ("C·√N·‖x‖∞", "None"),
    PrepStrategy.SPARSE_AMPLITUDE_AMPLIFICATION: ("nnz(x) + C·√nnz(x)·‖x‖∞", "Key Value Map"),
    PrepStrategy.AUGMENTED_QRAM: ("nnz(x) + C", "Metadata and Key Value Map"),
    PrepStrategy.PARALLEL_AUGMENTED_QRAM: ("nnz(x)/p + C", "Classical computer with p parallel processing units"),
}


def _ceil(value: float) -> int:
    return math.ceil(value - _CEIL_TOL)


def vector_key(v: np.ndarray) -> str:
    return hashlib.sha256(np.ascontiguousarray(v, dtype=np.float64).tobytes()).hexdigest()


def build_key_value_map(v) -> KeyValueMap:
    v = np.asarray(v, dtype=np.float64).ravel()
    return KeyValueMap(values=tuple(int(i) for i in np.flatnonzero(v)), n=int(v.shape[0]))


def _parallel_compact(values: np.ndarray, parts: int) -> np.ndarray:
    """
    Normalize p contiguous segments independently, keep the segment norms as
    metadata, and assemble the full compact state from them.
    """
    segments = [s for s in np.array_split(values, parts) if s.size]
    norms = np.array([np.linalg.norm(s) for s in segments])
    total = np.linalg.norm(norms)
    pieces = []
    for seg, seg_norm in zip(segments, norms):
        if seg_norm == 0.0:
            pieces.append(np.zeros_like(seg))
        else:
            pieces.append((seg / seg_norm) * (seg_norm / total))
    return np.concatenate(pieces)


def encode(
    v,
    ledger: Optional[CostLedger] = None,
    strategy: PrepStrategy = PrepStrategy.AUGMENTED_QRAM,
    key: Optional[Hashable] = None,
) -> AmplitudeState:
    v = np.asarray(v, dtype=np.float64).ravel()
    n = int(v.shape[0])
    if n < 1:
        raise ShapeError("cannot encode an empty vector")
    norm = float(np.linalg.norm(v))
    if norm == 0.0:
        raise ZeroVectorError("cannot amplitude-encode a zero vector")

    kv = build_key_value_map(v)
    nonzero = v[list(kv.values)]
    if strategy is PrepStrategy.PARALLEL_AUGMENTED_QRAM and ledger is not None and ledger.parallel_units > 1:
        compact = _parallel_compact(nonzero, ledger.parallel_units)
    else:
        compact = nonzero / norm
    state = AmplitudeState(amplitudes=kv.scatter(compact, padded_dim(n)), source_norm=norm, length=n)

    if ledger is not None:
        _charge(ledger, strategy, state, len(kv), key if key is not None else vector_key(v))
    return state


def _charge(ledger: CostLedger, strategy: PrepStrategy, state: AmplitudeState, nnz: int, key: Hashable) -> None:
    linf = float(np.max(np.abs(state.amplitudes)))
    if strategy is PrepStrategy.AMPLITUDE_AMPLIFICATION:
        touches = 0
    elif strategy is PrepStrategy.PARALLEL_AUGMENTED_QRAM:
        touches = math.ceil(nnz / ledger.parallel_units)
    else:
        touches = nnz
    profile = VectorProfile(nnz=nnz, dim=state.length, linf=linf)
    if ledger.register(key, profile, state.source_norm, touches):
        logger.debug("registered vector %s: nnz=%d, %d preprocessing touches", key, nnz, touches)

    increments = {"prep_invocations": 1}
    if strategy is PrepStrategy.AMPLITUDE_AMPLIFICATION:
        increments["amplitude_amp_rounds"] = _ceil(math.sqrt(state.length) * linf)
    elif strategy is PrepStrategy.SPARSE_AMPLITUDE_AMPLIFICATION:
        increments["amplitude_amp_rounds"] = _ceil(math.sqrt(nnz) * linf)
    if strategy.uses_qram:
        increments["qram_queries"] = qubits_for(state.length)
    ledger.charge(**increments)


def inner_product_exact(a: AmplitudeState, b: AmplitudeState) -> float:
    if a.dim != b.dim:
        raise DimensionMismatchError(f"states live on registers of size {a.dim} and {b.dim}")
    return float(np.clip(np.dot(a.amplitudes, b.amplitudes), -1.0, 1.0))


def ledger_profile(ledger: CostLedger) -> VectorProfile:
    """Aggregate profile of everything registered: total nnz, widest dimension, largest ℓ∞."""
    profiles = ledger.profiles
    if not profiles:
        return VectorProfile(nnz=0, dim=0, linf=0.0)
    return VectorProfile(
        nnz=sum(p.nnz for p in profiles),
        dim=max(p.dim for p in profiles),
        linf=max(p.linf for p in profiles),
    )


def ledger_report(
    ledger: CostLedger,
    strategy: PrepStrategy,
    copies: int,
    profile: Optional[VectorProfile] = None,
) -> CostSummary:
    """
    Closed-form cost of preparing `copies` states under `strategy`, with the
    polylog factor kept symbolic, next to the counted ledger values.
    """
    prof = profile or ledger_profile(ledger)
    p = ledger.parallel_units
    if strategy is PrepStrategy.AMPLITUDE_AMPLIFICATION:
        cost = copies * math.sqrt(prof.dim) * prof.linf
    elif strategy is PrepStrategy.SPARSE_AMPLITUDE_AMPLIFICATION:
        cost = prof.nnz + copies * math.sqrt(prof.nnz) * prof.linf
    elif strategy is PrepStrategy.AUGMENTED_QRAM:
        cost = prof.nnz + copies
    else:
        cost = prof.nnz / p + copies
    formula, extra = _FORMULAS[strategy]
    return CostSummary(
        strategy=strategy.value,
        copies=copies,
        nnz=prof.nnz,
        dim=prof.dim,
        linf=prof.linf,
        parallel_units=p,
        formula=formula,
        formula_cost=float(cost),
        polylog_factor=f"polylog({max(prof.dim, 1)})",
        extra_resources=extra,
        counted=ledger.snapshot(),
        note="‖x‖∞ taken on the normalized vector" if strategy.uses_amplification else None,
    )
