import csv
import io
import json
import math
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from ..models.lsi import LsiConstants
from ..models.report import InequalityReport, PunctureSweep
from ..models.zonoid import OrderCertificate


def _clean(value):
    """Plain JSON types; non-finite floats become None."""
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_clean(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def format_lsi_constants(constants: LsiConstants) -> dict:
    """Format one weight's constants"""
    return {
        "weight_kind": constants.weight_kind,
        "alpha": constants.alpha,
        "beta": constants.beta,
        "c_weighted": constants.c_weighted,
        "c_classical": constants.c_classical,
        "available": constants.available,
        "edge_trending": constants.edge_trending,
        "window": list(constants.window),
    }


def format_order_certificate(certificate: OrderCertificate) -> dict:
    return certificate.model_dump()


def format_inequality_report(report: InequalityReport) -> dict:
    """Format a verification report with its witness and grid"""
    return {
        "name": report.name,
        "trials": report.trials,
        "worst_margin": report.worst_margin,
        "violated": report.violated,
        "inconclusive": report.inconclusive,
        "witness": report.witness,
        "seed": report.seed,
        "tolerances": dict(report.tolerances),
        "grid": dict(report.grid),
    }


def format_puncture_sweep(sweep: PunctureSweep) -> dict:
    return {
        "rows": [row.model_dump() for row in sweep.rows],
        "max_c_hat": sweep.max_c_hat,
    }


def tabulate(command: str, payload: dict) -> Tuple[List[str], List[dict]]:
    """Flat table behind the CSV encoding of a command's JSON payload."""
    if command == "constants":
        columns = ["weight_kind", "alpha", "beta", "c_weighted", "c_classical", "available", "edge_trending"]
        return columns, payload["constants"]
    if command == "order":
        columns = ["c", "dominated", "worst_ratio", "witness_alpha", "minimal_c"]
        return columns, [payload]
    if command == "verify":
        columns = ["name", "trials", "worst_margin", "violated", "inconclusive", "seed"]
        return columns, payload["reports"]
    if command == "puncture-sweep":
        return ["R", "C_R", "sup_khat", "c_hat"], payload["rows"]
    if command == "example1":
        return ["x", "density", "kbar"], payload["profile"]
    raise ValueError(f"no table layout for command '{command}'")


def to_json(payload: dict) -> str:
    """Sorted keys and shortest round-trip floats, so equal runs give equal bytes."""
    return json.dumps(_clean(payload), sort_keys=True, indent=2, allow_nan=False) + "\n"


def _cell(value) -> str:
    value = _clean(value)
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def to_csv(columns: Sequence[str], rows: Iterable[dict]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row.get(name)) for name in columns])
    return buffer.getvalue()
