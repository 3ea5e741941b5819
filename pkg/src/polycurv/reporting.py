"""Run reports and their CSV / JSON serialisation.

Numbers are written with 17 significant digits so that CSV and JSON of the
same run parse back to identical floats.  Wall time is kept on the report
object but never written to files, so identical runs give identical bytes.
"""

import csv
import io
import json
import math
from dataclasses import dataclass, field


@dataclass
class RunReport:
    experiment: str
    params: dict
    columns: tuple
    rows: list = field(default_factory=list)
    checks: dict = field(default_factory=dict)
    wall_time: float = 0.0

    @property
    def passed(self):
        return all(self.checks.values())

    def check(self, name, ok):
        self.checks[name] = bool(ok)
        return bool(ok)


def format_value(x):
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        return f"{x:.17g}"
    if x is None:
        return ""
    return str(x)


def _json_value(x):
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, float):
        return None if not math.isfinite(x) else float(f"{x:.17g}")
    try:
        return _json_value(x.item())  # numpy scalars
    except AttributeError:
        return str(x)


def to_csv(report):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(report.columns)
    for row in report.rows:
        w.writerow([format_value(_plain(row.get(c))) for c in report.columns])
    return buf.getvalue()


def _plain(x):
    try:
        return x.item()
    except AttributeError:
        return x


def to_json(report):
    doc = {
        "experiment": report.experiment,
        "params": {k: _json_value(_plain(v)) for k, v in report.params.items()},
        "columns": list(report.columns),
        "rows": [{c: _json_value(_plain(row.get(c))) for c in report.columns} for row in report.rows],
        "checks": {k: bool(v) for k, v in report.checks.items()},
        "passed": report.passed,
    }
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def write_report(report, fmt="csv", path=None, stream=None):
    """Write ``report`` as CSV or JSON to ``path`` (or ``stream``)."""
    if fmt == "csv":
        text = to_csv(report)
    elif fmt == "json":
        text = to_json(report)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path is not None:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    elif stream is not None:
        stream.write(text)
    return text
