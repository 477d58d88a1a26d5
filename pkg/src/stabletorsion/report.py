"""Fixed-schema report rows and their CSV / JSON serialization.

Reals are written with 17 significant digits; infinities as ``+inf``/``-inf``;
empty cells mean "not applicable". Nothing time-dependent is written, so equal
inputs give byte-identical files.
"""

import csv
import io
import json
import math
import subprocess
from dataclasses import asdict, dataclass
from pathlib import Path

COLUMNS = ("experiment", "alpha", "dim", "quantity", "value", "stderr", "lower", "upper",
           "verdict", "seed", "n", "h", "h_s")


@dataclass
class Row:
    experiment: str
    quantity: str
    value: float = None
    alpha: float = None
    dim: int = None
    stderr: float = None
    lower: float = None
    upper: float = None
    verdict: str = ""
    seed: int = None
    n: int = None
    h: float = None
    h_s: float = None


def fmt(x):
    if x is None:
        return ""
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "+inf" if x > 0 else "-inf"
        return "%.17g" % x
    return str(x)


def version_string():
    """Package version, with ``git describe`` appended when available."""
    from . import __version__

    try:
        out = subprocess.run(["git", "describe", "--always", "--dirty"],
                             cwd=Path(__file__).resolve().parent, capture_output=True,
                             text=True, timeout=5)
        if out.returncode == 0 and out.stdout.strip():
            return f"{__version__}+{out.stdout.strip()}"
    except (OSError, subprocess.SubprocessError):
        pass
    return __version__


def to_csv(rows, config=None, version=None):
    buf = io.StringIO()
    if version:
        buf.write(f"# version: {version}\n")
    for key, val in sorted((config or {}).items()):
        buf.write(f"# {key}: {fmt(val)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        d = asdict(r)
        w.writerow([fmt(d[c]) for c in COLUMNS])
    return buf.getvalue()


def _json_value(x):
    if isinstance(x, float) and (math.isinf(x) or math.isnan(x)):
        return fmt(x)
    if isinstance(x, dict):
        return {k: _json_value(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_json_value(v) for v in x]
    if hasattr(x, "tolist"):
        return _json_value(x.tolist())
    return x


def to_json(rows, config=None, version=None, extra=None):
    doc = {"version": version, "config": config or {},
           "columns": list(COLUMNS), "rows": [asdict(r) for r in rows]}
    if extra:
        doc["details"] = extra
    return json.dumps(_json_value(doc), indent=2, sort_keys=True) + "\n"


def write(text, path=None, stream=None):
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        (stream or __import__("sys").stdout).write(text)
