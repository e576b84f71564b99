"""Result records: JSON/CSV serialization, environment fingerprint and schema."""

from __future__ import annotations

import csv
import io
import json
import math
import platform
import sys
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

import numpy as np

from . import __version__
from .checks import Check
from .glauber import RNG_NAME

SCHEMA_VERSION = "1.0.0"
TOOL_NAME = "spectral-hardcore"


def to_jsonable(x: Any) -> Any:
    """Recursively convert numpy values and dataclass-like objects to JSON types.

    Non-finite floats become the strings ``"inf"``, ``"-inf"`` and ``"nan"``.
    """
    if isinstance(x, Check):
        return to_jsonable(x.as_record())
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return to_jsonable(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        v = float(x)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if x is None or isinstance(x, str):
        return x
    if hasattr(x, "to_json"):
        return to_jsonable(x.to_json())
    return str(x)


def environment_fingerprint() -> Dict[str, str]:
    import networkx
    import scipy

    return {
        "package": __version__,
        "python": sys.version.split()[0],
        "platform": platform.platform(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "networkx": networkx.__version__,
        "rng": RNG_NAME,
    }


def make_record(
    command: str,
    config: Dict[str, Any],
    checks: Sequence[Check],
    results: Dict[str, Any],
    warnings: Optional[List[str]] = None,
) -> Dict[str, Any]:
    failed = [c.name for c in checks if not c.passed]
    return to_jsonable(
        {
            "schema_version": SCHEMA_VERSION,
            "tool": TOOL_NAME,
            "command": command,
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "config": config,
            "status": "FAIL" if failed else "PASS",
            "checks": [c.as_record() for c in checks],
            "results": results,
            "warnings": list(warnings or []),
            "environment": environment_fingerprint(),
        }
    )


def dumps(record: Dict[str, Any]) -> str:
    # repr of a Python float is the shortest string that round-trips exactly
    return json.dumps(record, indent=2, sort_keys=False, allow_nan=False)


def format_float(x: Any) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return "%.17g" % float(x)
    return str(x)


def rows_to_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([format_float(v) for v in row])
    return buf.getvalue()


def checks_to_csv(checks: Sequence[Check]) -> str:
    return rows_to_csv(
        ["name", "lhs", "rhs", "slack", "pass", "skipped"],
        [(c.name, c.lhs, c.rhs, c.slack, c.passed, c.skipped or "") for c in checks],
    )


def schema() -> Dict[str, Any]:
    text = resources.files("spectral_hardcore").joinpath("schema/result_record.schema.json").read_text()
    return json.loads(text)


def validate(record: Dict[str, Any]) -> None:
    """Raise ``jsonschema.ValidationError`` if ``record`` does not match the shipped schema."""
    import jsonschema

    jsonschema.validate(record, schema())


def side_path(out: Path, suffix: str) -> Path:
    """``results.json`` -> ``results.<suffix>.csv``."""
    return out.with_name(f"{out.stem}.{suffix}.csv")
