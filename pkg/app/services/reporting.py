"""Text and CSV tables for result comparison and resource reports."""
import csv
import io
from typing import Any, Dict, List, Sequence

from ..core.errors import ShapeError
from ..schemas.engine import ResourceReport

COMPARE_COLUMNS = [
    "run", "mode", "circuit", "strategy", "shots_per_entry", "shots_used",
    "max_abs_error", "mean_abs_error", "preprocess_touches", "qram_queries", "prep_invocations",
]


def _fmt(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return f"{value:.6e}"
    return str(value)


def compare_rows(results: Sequence[Dict[str, Any]], names: Sequence[str]) -> List[Dict[str, Any]]:
    """One row per result file; results must share a convolution shape."""
    shapes = {repr(sorted(r["config"]["shape"].items())) for r in results}
    if len(shapes) > 1:
        raise ShapeError("cannot compare runs with different convolution shapes")
    rows = []
    for name, r in zip(names, results):
        cfg, res = r["config"], r["resources"]
        ledger = res.get("ledger", {})
        rows.append({
            "run": name,
            "mode": cfg["plan"]["mode"],
            "circuit": cfg["circuit"],
            "strategy": cfg["strategy"],
            "shots_per_entry": int(res.get("shots_per_entry", 0)),
            "shots_used": int(r.get("shots_used", 0)),
            "max_abs_error": float(r["max_abs_error"]),
            "mean_abs_error": float(r["mean_abs_error"]),
            "preprocess_touches": int(ledger.get("preprocess_touches", 0)),
            "qram_queries": int(ledger.get("qram_queries", 0)),
            "prep_invocations": int(ledger.get("prep_invocations", 0)),
        })
    return rows


def render_text(rows: Sequence[Dict[str, Any]], columns: Sequence[str]) -> str:
    cells = [[_fmt(row[c]) for c in columns] for row in rows]
    widths = [max([len(c)] + [len(r[i]) for r in cells]) for i, c in enumerate(columns)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines.extend("  ".join(v.ljust(w) for v, w in zip(r, widths)) for r in cells)
    return "\n".join(lines) + "\n"


def render_csv(rows: Sequence[Dict[str, Any]], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row[c]) for c in columns])
    return buf.getvalue()


def render_resources(report: ResourceReport) -> str:
    q = report.qubits
    out = [
        "qubits",
        render_text([{"index_p": q.index_p, "index_q": q.index_q, "data": q.data,
                      "ancilla": q.ancilla, "total": q.total}],
                    ["index_p", "index_q", "data", "ancilla", "total"]),
        f"kernel nnz: {report.kernel_nnz}   kernel reshape cost: {report.kernel_reshape_cost}   "
        f"shots/entry: {report.shots_per_entry}",
        f"depth class: {report.depth_class}",
        "",
        "state preparation",
        render_text([{"strategy": s.strategy, "formula": s.formula, "cost": s.formula_cost,
                      "polylog": s.polylog_factor, "extra": s.extra_resources} for s in report.strategies],
                    ["strategy", "formula", "cost", "polylog", "extra"]),
        "comparison",
        render_text([{"method": c.method, "qram": c.qram_complexity, "depth": c.circuit_depth,
                      "preprocessing": c.preprocessing, "state_prep": c.state_prep,
                      "nisq": c.nisq_suitability} for c in report.comparison],
                    ["method", "qram", "depth", "preprocessing", "state_prep", "nisq"]),
    ]
    return "\n".join(out)
