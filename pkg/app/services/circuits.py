"""
Overlap-estimation circuits simulated at the statevector level.

Two circuits are provided. The SWAP test measures (1 + ⟨ψ|φ⟩²)/2 on its
ancilla and so only recovers the overlap magnitude. The interference test
loads |K_p⟩ under ancilla 0 and |X_q⟩ under ancilla 1 and measures
(1 + ⟨K_p|X_q⟩)/2, keeping the sign.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..core.config import get_settings
from ..core.errors import DegenerateBatchError, DimensionMismatchError, InvalidPlanError
from ..models.circuits import (
    BatchedSample,
    BatchedSampling,
    CircuitKind,
    EstimationResult,
    MeasurementRecord,
    ShotPlan,
)
from ..models.qstate import AmplitudeState, CostLedger, PrepStrategy
from ..models.sparse import SparseMatrix
from .qstate import encode, inner_product_exact

logger = logging.getLogger(__name__)

_H = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2.0)


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Independent generator for task `stream` of a run seeded with `seed`."""
    family = get_settings().QCONV_RNG
    bit_generator = getattr(np.random, family, None)
    if not (isinstance(bit_generator, type) and issubclass(bit_generator, np.random.BitGenerator)):
        raise InvalidPlanError(f"unknown bit generator family {family!r}")
    return np.random.Generator(bit_generator(np.random.SeedSequence(seed, spawn_key=(stream,))))


class Statevector:
    """Real amplitudes over a tuple of registers of arbitrary dimension."""

    def __init__(self, amplitudes: np.ndarray):
        self.amplitudes = np.array(amplitudes, dtype=np.float64)

    @classmethod
    def product(cls, *registers: Sequence[float]) -> "Statevector":
        state = np.array(1.0)
        for reg in registers:
            state = np.multiply.outer(state, np.asarray(reg, dtype=np.float64))
        return cls(state)

    def hadamard(self, register: int) -> "Statevector":
        if self.amplitudes.shape[register] != 2:
            raise DimensionMismatchError("Hadamard acts on a qubit register")
        moved = np.tensordot(_H, self.amplitudes, axes=([1], [register]))
        self.amplitudes = np.moveaxis(moved, 0, register)
        return self

    def controlled_swap(self, control: int, a: int, b: int) -> "Statevector":
        t = np.moveaxis(self.amplitudes, control, 0).copy()
        # axis positions of a and b once the control axis is gone
        a_rest, b_rest = (a - (a > control)), (b - (b > control))
        t[1] = np.swapaxes(t[1], a_rest, b_rest)
        self.amplitudes = np.moveaxis(t, 0, control)
        return self

    def controlled_unitary(self, control: int, value: int, target: int, unitary: np.ndarray) -> "Statevector":
        t = np.moveaxis(self.amplitudes, (control, target), (0, 1)).copy()
        t[value] = np.tensordot(unitary, t[value], axes=([1], [0]))
        self.amplitudes = np.moveaxis(t, (0, 1), (control, target))
        return self

    def probability(self, register: int, outcome: int) -> float:
        branch = np.take(self.amplitudes, outcome, axis=register)
        return float(np.sum(branch ** 2))


def loader_unitary(target: np.ndarray) -> np.ndarray:
    """Real orthogonal matrix mapping |0⟩ to `target` (a Householder reflection)."""
    target = np.asarray(target, dtype=np.float64)
    dim = target.shape[0]
    e0 = np.zeros(dim)
    e0[0] = 1.0
    u = e0 - target
    uu = float(u @ u)
    if uu < 1e-30:
        return np.eye(dim)
    return np.eye(dim) - 2.0 * np.outer(u, u) / uu


def _check_dims(a: AmplitudeState, b: AmplitudeState) -> None:
    if a.dim != b.dim:
        raise DimensionMismatchError(f"states live on registers of size {a.dim} and {b.dim}")


def _canonical(a: AmplitudeState, b: AmplitudeState) -> Tuple[AmplitudeState, AmplitudeState]:
    # fixed operand order: f(a, b) == f(b, a) bit for bit
    return (a, b) if a.amplitudes.tobytes() <= b.amplitudes.tobytes() else (b, a)


def swap_test_probability(phi: AmplitudeState, psi: AmplitudeState) -> float:
    """Ancilla-0 probability of H · CSWAP · H on |0⟩|φ⟩|ψ⟩."""
    _check_dims(phi, psi)
    phi, psi = _canonical(phi, psi)
    sv = Statevector.product([1.0, 0.0], phi.amplitudes, psi.amplitudes)
    sv.hadamard(0).controlled_swap(0, 1, 2).hadamard(0)
    return min(1.0, max(0.0, sv.probability(0, 0)))


def interference_test_probability(kp: AmplitudeState, xq: AmplitudeState) -> float:
    """Ancilla-0 probability after H, load |K_p⟩ on ancilla 0 and |X_q⟩ on ancilla 1, H."""
    _check_dims(kp, xq)
    kp, xq = _canonical(kp, xq)
    zero = np.zeros(kp.dim)
    zero[0] = 1.0
    sv = Statevector.product([1.0, 0.0], zero)
    sv.hadamard(0)
    sv.controlled_unitary(0, 0, 1, loader_unitary(kp.amplitudes))
    sv.controlled_unitary(0, 1, 1, loader_unitary(xq.amplitudes))
    sv.hadamard(0)
    return min(1.0, max(0.0, sv.probability(0, 0)))


def circuit_probability(kp: AmplitudeState, xq: AmplitudeState, circuit: CircuitKind) -> float:
    if circuit is CircuitKind.SWAP:
        return swap_test_probability(kp, xq)
    return interference_test_probability(kp, xq)


def invert_probability(p0: float, circuit: CircuitKind) -> float:
    if circuit is CircuitKind.SWAP:
        return math.sqrt(max(0.0, 2.0 * p0 - 1.0))
    return 2.0 * p0 - 1.0


def _propagated_stderr(p_hat: float, shots: int, circuit: CircuitKind) -> float:
    se_p = math.sqrt(p_hat * (1.0 - p_hat) / shots)
    if circuit is CircuitKind.INTERFERENCE:
        return 2.0 * se_p
    gap = 2.0 * p_hat - 1.0
    # d/dp √(2p − 1) = 1/√(2p − 1); at the clamp use the bound √(2·se)
    return se_p / math.sqrt(gap) if gap > se_p else math.sqrt(2.0 * se_p)


def estimate_overlap(
    kp: AmplitudeState,
    xq: AmplitudeState,
    plan: ShotPlan,
    circuit: CircuitKind = CircuitKind.INTERFERENCE,
    stream: int = 0,
) -> EstimationResult:
    plan.validate()
    exact = inner_product_exact(kp, xq)
    p0 = circuit_probability(kp, xq, circuit)
    if not plan.sampled:
        analytic = abs(exact) if circuit is CircuitKind.SWAP else exact
        return EstimationResult(estimate=analytic, exact=exact, stderr=0.0, shots=0, circuit=circuit, p0=p0)

    rng = make_rng(plan.seed, stream)
    zeros = int(rng.binomial(plan.shots, p0))
    p_hat = zeros / plan.shots
    return EstimationResult(
        estimate=invert_probability(p_hat, circuit),
        exact=exact,
        stderr=_propagated_stderr(p_hat, plan.shots, circuit),
        shots=plan.shots,
        circuit=circuit,
        p0=p_hat,
        record=MeasurementRecord(counts={"0": zeros, "1": plan.shots - zeros}, total=plan.shots),
    )


def _shard_sizes(shots: int, shard: int) -> List[int]:
    full, rest = divmod(shots, shard)
    return [shard] * full + ([rest] if rest else [])


def batched_sample(
    kmat: SparseMatrix,
    xmat: np.ndarray,
    plan: ShotPlan,
    ledger: Optional[CostLedger] = None,
    strategy: PrepStrategy = PrepStrategy.AUGMENTED_QRAM,
) -> BatchedSampling:
    """
    Measure the uniform superposition over valid (p, q) pairs after the
    interference layer. Each valid pair carries weight 1/L, L the number of
    valid pairs, so P(p, q, 0) = P_pq(0)/L and P(p, q, 1) = (1 − P_pq(0))/L.
    Rows and columns that are entirely zero cannot be encoded and are excluded.
    """
    plan.validate()
    xmat = np.asarray(xmat, dtype=np.float64)
    if xmat.ndim != 2 or xmat.shape[0] != kmat.cols:
        raise DimensionMismatchError(f"input columns of length {xmat.shape[0]} do not match K̃ width {kmat.cols}")

    row_nnz = kmat.row_nnz()
    rows = [p for p in range(kmat.rows) if row_nnz[p] > 0]
    cols = [q for q in range(xmat.shape[1]) if np.any(xmat[:, q] != 0.0)]
    excluded_rows = tuple(p for p in range(kmat.rows) if row_nnz[p] == 0)
    excluded_cols = tuple(q for q in range(xmat.shape[1]) if q not in cols)
    if not rows or not cols:
        raise DegenerateBatchError("no encodable (row, column) pair in the batched system")

    row_states = {p: encode(kmat.row_dense(p), ledger, strategy) for p in rows}
    col_states = {q: encode(xmat[:, q], ledger, strategy) for q in cols}
    pairs = [(p, q) for p in rows for q in cols]
    p0 = np.array([interference_test_probability(row_states[p], col_states[q]) for p, q in pairs])
    weight = 1.0 / len(pairs)
    joint = np.stack([p0 * weight, (1.0 - p0) * weight], axis=1)

    if not plan.sampled:
        return BatchedSampling(pairs=pairs, p0=p0, joint=joint,
                               excluded_rows=excluded_rows, excluded_columns=excluded_cols)

    flat = joint.ravel() / joint.sum()
    sizes = _shard_sizes(plan.shots, max(1, get_settings().QCONV_SHOT_SHARD))

    def run_shard(index: int) -> np.ndarray:
        rng = make_rng(plan.seed, index)
        return rng.choice(flat.shape[0], size=sizes[index], p=flat)

    workers = max(1, get_settings().QCONV_WORKERS)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        draws = np.concatenate(list(pool.map(run_shard, range(len(sizes)))))
    counts = np.bincount(draws, minlength=flat.shape[0]).reshape(joint.shape)
    samples = [BatchedSample(p=pairs[c // 2][0], q=pairs[c // 2][1], ancilla=int(c % 2)) for c in draws]
    if ledger is not None:
        ledger.charge(shots=plan.shots, copies=plan.shots)
    logger.info("batched sampling: %d pairs, %d shots in %d shards", len(pairs), plan.shots, len(sizes))
    return BatchedSampling(pairs=pairs, p0=p0, joint=joint, counts=counts, samples=samples,
                           excluded_rows=excluded_rows, excluded_columns=excluded_cols)


def total_variation(p: np.ndarray, q: np.ndarray) -> float:
    return 0.5 * float(np.sum(np.abs(np.asarray(p) - np.asarray(q))))
