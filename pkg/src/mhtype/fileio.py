"""Algebra definition files (JSON) and atomic output.

Schema::

    {
      "name": "teh0",
      "center_dim": 2, "v_dim": 2,
      "brackets": [{"i": 1, "j": 2, "z": [0, 1]}],
      "metric_center": [[1, 0], [0, 1]],
      "metric_v": [[1, 0], [0, 1]],
      "center_labels": ["e0", "e3"],      # optional
      "v_labels": ["e1", "e2"]            # optional
    }

Indices are 1-based with i < j.  Scalars are JSON numbers or exact strings
such as ``"-3/4"`` or ``"1/2*sqrt(2)"``.  Structural problems raise
:class:`FileParseError` carrying the JSON path of the offending field.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass

from .algebra import BlockMetric, StepTwoAlgebra
from .scalars import ScalarParseError, format_scalar, parse_scalar

__all__ = [
    "AlgebraFile",
    "FileParseError",
    "dump_algebra",
    "load_algebra",
    "loads",
    "parse_algebra",
    "payload",
    "write_atomic",
]

_REQUIRED = ("name", "center_dim", "v_dim", "brackets", "metric_center", "metric_v")
_OPTIONAL = ("center_labels", "v_labels")


class FileParseError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path
        self.message = message


@dataclass(frozen=True)
class AlgebraFile:
    name: str
    alg: StepTwoAlgebra
    metric: BlockMetric


def _int(obj, path):
    if isinstance(obj, bool) or not isinstance(obj, int):
        raise FileParseError(path, f"expected an integer, got {obj!r}")
    return obj


def _scalar(obj, path):
    try:
        return parse_scalar(obj)
    except ScalarParseError as exc:
        raise FileParseError(path, str(exc)) from None


def _matrix(obj, n, path):
    if not isinstance(obj, list) or len(obj) != n:
        raise FileParseError(path, f"expected a {n}x{n} matrix")
    rows = []
    for r, row in enumerate(obj):
        if not isinstance(row, list) or len(row) != n:
            raise FileParseError(f"{path}[{r}]", f"expected a row of length {n}")
        rows.append(tuple(_scalar(v, f"{path}[{r}][{c}]") for c, v in enumerate(row)))
    return tuple(rows)


def _labels(obj, n, path):
    if not isinstance(obj, list) or len(obj) != n or not all(isinstance(s, str) for s in obj):
        raise FileParseError(path, f"expected {n} strings")
    if len(set(obj)) != n:
        raise FileParseError(path, "labels must be distinct")
    return tuple(obj)


def parse_algebra(data) -> AlgebraFile:
    """Build an algebra from an already-decoded JSON object."""
    if not isinstance(data, dict):
        raise FileParseError("", "top level must be an object")
    unknown = sorted(set(data) - set(_REQUIRED) - set(_OPTIONAL))
    if unknown:
        raise FileParseError(unknown[0], "unknown field")
    for key in _REQUIRED:
        if key not in data:
            raise FileParseError(key, "missing required field")
    name = data["name"]
    if not isinstance(name, str):
        raise FileParseError("name", "expected a string")
    p = _int(data["center_dim"], "center_dim")
    m = _int(data["v_dim"], "v_dim")
    if p < 0:
        raise FileParseError("center_dim", "must be nonnegative")
    if m < 0:
        raise FileParseError("v_dim", "must be nonnegative")
    if not isinstance(data["brackets"], list):
        raise FileParseError("brackets", "expected a list")
    brackets = {}
    for n, entry in enumerate(data["brackets"]):
        path = f"brackets[{n}]"
        if not isinstance(entry, dict):
            raise FileParseError(path, "expected an object with i, j, z")
        extra = sorted(set(entry) - {"i", "j", "z"})
        if extra:
            raise FileParseError(f"{path}.{extra[0]}", "unknown field")
        for key in ("i", "j", "z"):
            if key not in entry:
                raise FileParseError(f"{path}.{key}", "missing required field")
        i, j = _int(entry["i"], f"{path}.i"), _int(entry["j"], f"{path}.j")
        if not 1 <= i <= m:
            raise FileParseError(f"{path}.i", f"index must be in 1..{m}")
        if not 1 <= j <= m:
            raise FileParseError(f"{path}.j", f"index must be in 1..{m}")
        if not i < j:
            raise FileParseError(path, "require i < j")
        if (i - 1, j - 1) in brackets:
            raise FileParseError(path, f"duplicate bracket [v{i}, v{j}]")
        z = entry["z"]
        if not isinstance(z, list) or len(z) != p:
            raise FileParseError(f"{path}.z", f"expected {p} center coordinates (center_dim)")
        brackets[(i - 1, j - 1)] = tuple(_scalar(v, f"{path}.z[{k}]") for k, v in enumerate(z))
    G_z = _matrix(data["metric_center"], p, "metric_center")
    G_v = _matrix(data["metric_v"], m, "metric_v")
    cl = _labels(data["center_labels"], p, "center_labels") if "center_labels" in data else ()
    vl = _labels(data["v_labels"], m, "v_labels") if "v_labels" in data else ()
    alg = StepTwoAlgebra.from_brackets(p, m, brackets, name, cl, vl)
    return AlgebraFile(name, alg, BlockMetric(G_z, G_v))


def load_algebra(path: str) -> AlgebraFile:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise FileParseError("", f"cannot read {path}: {exc.strerror}") from None
    return loads(text)


def loads(text: str) -> AlgebraFile:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FileParseError(f"line {exc.lineno} column {exc.colno}", exc.msg) from None
    return parse_algebra(data)


def payload(alg: StepTwoAlgebra, metric: BlockMetric, name: str | None = None, labels: bool = True) -> dict:
    """JSON-ready dict; every scalar is an exact string."""

    def mat(G):
        return [[format_scalar(c) for c in row] for row in G]

    out = {
        "name": alg.name if name is None else name,
        "center_dim": alg.p,
        "v_dim": alg.m,
        "brackets": [
            {"i": a + 1, "j": b + 1, "z": [format_scalar(c) for c in z]}
            for (a, b), z in sorted(alg.brackets().items())
        ],
        "metric_center": mat(metric.G_z),
        "metric_v": mat(metric.G_v),
    }
    if labels:
        out["center_labels"] = list(alg.center_labels)
        out["v_labels"] = list(alg.v_labels)
    return out


def dump_algebra(alg: StepTwoAlgebra, metric: BlockMetric, name: str | None = None) -> str:
    return json.dumps(payload(alg, metric, name), indent=2) + "\n"


def write_atomic(path: str, text: str) -> None:
    """Write the whole file via a temporary sibling and rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
