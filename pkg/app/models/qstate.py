import enum
import threading
from dataclasses import dataclass, field
from typing import Dict, Hashable, List, Tuple

import numpy as np


def padded_dim(n: int) -> int:
    """Smallest power of two >= n."""
    return 1 << max(0, int(n - 1).bit_length())


def qubits_for(n: int) -> int:
    """⌈log₂ n⌉, with a single basis state needing no qubit."""
    return max(0, int(n - 1).bit_length())


@dataclass(frozen=True)
class AmplitudeState:
    """Unit-norm real amplitudes over a power-of-two register, plus the source vector's norm."""
    amplitudes: np.ndarray = field(repr=False)
    source_norm: float
    length: int

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=np.float64)
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return int(self.amplitudes.shape[0])

    @property
    def qubits(self) -> int:
        return qubits_for(self.dim)

    def reconstruct(self) -> np.ndarray:
        return self.source_norm * self.amplitudes[: self.length]


@dataclass(frozen=True)
class KeyValueMap:
    """Contiguous key i ↔ original index V_i for the nonzero positions of a length-n vector."""
    values: Tuple[int, ...]
    n: int

    @property
    def pairs(self) -> List[Tuple[int, int]]:
        return list(enumerate(self.values))

    def __len__(self) -> int:
        return len(self.values)

    def value_of(self, key: int) -> int:
        return self.values[key]

    def key_of(self, value: int) -> int:
        pos = int(np.searchsorted(self.values, value))
        if pos >= len(self.values) or self.values[pos] != value:
            raise KeyError(value)
        return pos

    def scatter(self, compact: np.ndarray, dim: int) -> np.ndarray:
        """Place compact amplitudes at their original indices in a zero register of size dim."""
        out = np.zeros(dim, dtype=np.float64)
        out[list(self.values)] = compact
        return out


class PrepStrategy(str, enum.Enum):
    AMPLITUDE_AMPLIFICATION = "aa"
    SPARSE_AMPLITUDE_AMPLIFICATION = "sparse-aa"
    AUGMENTED_QRAM = "aqram"
    PARALLEL_AUGMENTED_QRAM = "parallel-aqram"

    @property
    def uses_qram(self) -> bool:
        return self in (PrepStrategy.AUGMENTED_QRAM, PrepStrategy.PARALLEL_AUGMENTED_QRAM)

    @property
    def uses_amplification(self) -> bool:
        return self in (PrepStrategy.AMPLITUDE_AMPLIFICATION, PrepStrategy.SPARSE_AMPLITUDE_AMPLIFICATION)


@dataclass(frozen=True)
class VectorProfile:
    nnz: int
    dim: int
    linf: float  # ℓ∞ norm of the normalized vector


class CostLedger:
    """
    Resource counters for state preparation and estimation.

    Counters only ever grow. Every mutation happens under one lock, so
    concurrent encodes see linearizable increments.
    """

    COUNTERS = ("preprocess_touches", "qram_queries", "prep_invocations",
                "amplitude_amp_rounds", "copies", "shots")

    def __init__(self, parallel_units: int = 1):
        if parallel_units < 1:
            raise ValueError(f"parallel_units must be >= 1, got {parallel_units}")
        self.parallel_units = parallel_units
        self.preprocess_touches = 0
        self.qram_queries = 0
        self.prep_invocations = 0
        self.amplitude_amp_rounds = 0
        self.copies = 0
        self.shots = 0
        self._profiles: Dict[Hashable, VectorProfile] = {}
        # norm metadata register, one stored norm per registered vector
        self._norms: Dict[Hashable, float] = {}
        self._lock = threading.Lock()

    def register(self, key: Hashable, profile: VectorProfile, norm: float, touches: int) -> bool:
        """Record a vector; preprocessing is charged only the first time a key is seen."""
        with self._lock:
            if key in self._profiles:
                return False
            self._profiles[key] = profile
            self._norms[key] = norm
            self.preprocess_touches += touches
            return True

    def charge(self, **increments: int) -> None:
        with self._lock:
            for name, amount in increments.items():
                if name not in self.COUNTERS:
                    raise KeyError(name)
                if amount < 0:
                    raise ValueError(f"ledger counter {name} cannot decrease")
                setattr(self, name, getattr(self, name) + int(amount))

    def stored_norm(self, key: Hashable) -> float:
        return self._norms[key]

    def is_registered(self, key: Hashable) -> bool:
        return key in self._profiles

    @property
    def profiles(self) -> List[VectorProfile]:
        with self._lock:
            return list(self._profiles.values())

    def snapshot(self) -> Dict[str, int]:
        with self._lock:
            out = {name: getattr(self, name) for name in self.COUNTERS}
            out["parallel_units"] = self.parallel_units
            out["registered_vectors"] = len(self._profiles)
            return out
