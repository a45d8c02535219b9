"""Config serialisation (YAML) and fixed-format CSV export.

CSV files start with a ``# units: natural`` line, then a header row. Floats
are written with 12 significant digits so reruns diff cleanly.
"""
from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import yaml

from .errors import ConfigurationError

UNITS_LINE = "# units: natural"


def fmt(value) -> str:
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return f"{float(value):.12g}"


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    buf.write(UNITS_LINE + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([v if isinstance(v, str) else fmt(v) for v in row])
    return buf.getvalue()


def read_csv(path) -> tuple[list[str], np.ndarray]:
    """Read back a file written by :func:`csv_text` (numeric columns only)."""
    lines = [ln for ln in Path(path).read_text().splitlines() if not ln.startswith("#")]
    header = lines[0].split(",")
    data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    return header, data.reshape(-1, len(header))


def distribution_csv(axis, density, axis_name="p") -> str:
    return csv_text([axis_name, "density"], zip(axis, density))


def wigner_csv(wmap) -> str:
    xs, ps = np.meshgrid(wmap.x_axis, wmap.p_axis, indexing="ij")
    return csv_text(["x", "p", "wigner"], zip(xs.ravel(), ps.ravel(), wmap.values.ravel()))


def sweep_csv(curve) -> str:
    n = max((len(p.strengths) for p in curve.points), default=0)
    header = ["t_f", "dx_ratio", "dv_ratio"] + [f"kappa_{i + 1}" for i in range(n)]
    rows = []
    for p in curve.valid():
        rows.append([p.t_f, p.dx_ratio, p.dv_ratio] + list(p.strengths)
                    + ["nan"] * (n - len(p.strengths)))
    return csv_text(header, rows)


def sensitivity_csv(smap) -> str:
    rows = ((a, b, smap.values[i, j]) for i, a in enumerate(smap.scales1)
            for j, b in enumerate(smap.scales2))
    return csv_text(["scale1", "scale2", "dp_ratio"], rows)


def dump_yaml(data) -> str:
    return yaml.safe_dump(_plain(data), sort_keys=False, default_flow_style=False)


def _plain(obj):
    """Convert numpy scalars/arrays and tuples into YAML-safe builtins."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def load_yaml(text: str, source: str = "<config>"):
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"{source}:{mark.line + 1}" if mark is not None else source
        raise ConfigurationError(f"{where}: invalid YAML ({getattr(exc, 'problem', exc)})") from None


def locate(text: str, path: Sequence) -> int | None:
    """1-based line number of the node at ``path`` (keys / list indices), if present."""
    try:
        node = yaml.compose(text)
    except yaml.YAMLError:
        return None
    line = None
    for key in path:
        if isinstance(node, yaml.MappingNode):
            for k, v in node.value:
                if k.value == str(key):
                    node, line = v, k.start_mark.line + 1
                    break
            else:
                return line
        elif isinstance(node, yaml.SequenceNode) and isinstance(key, int) \
                and key < len(node.value):
            node = node.value[key]
            line = node.start_mark.line + 1
        else:
            return line
    return line


def save_config(data: dict, path) -> None:
    Path(path).write_text(dump_yaml(data))
