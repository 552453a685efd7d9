from typing import Dict, Optional

from pydantic import BaseModel


class CostSummary(BaseModel):
    """Closed-form state-preparation cost next to the counted ledger values."""
    strategy: str
    copies: int
    nnz: int
    dim: int
    linf: float
    parallel_units: int
    formula: str
    formula_cost: float
    polylog_factor: str
    extra_resources: str
    counted: Dict[str, int]
    note: Optional[str] = None
