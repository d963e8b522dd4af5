"""Instance files and result persistence.

Instances are JSON documents.  Probabilities are plain number arrays; every
complex matrix or tensor is written row-major with each entry as a
``[re, im]`` pair.  Example::

    {
      "ensemble": {
        "prior": [0.5, 0.5],
        "states": [[[[1, 0], [0, 0]], [[0, 0], [0, 0]]],
                   [[[0.5, 0], [0.5, 0]], [[0.5, 0], [0.5, 0]]]],
        "labels": ["0", "+"]
      },
      "channel": [[0.9, 0.1], [0.1, 0.9]],
      "params": {"n": [2, 4, 6], "margin": 0.1}
    }

Results are rounded to 12 significant digits before they are written, so a
rerun with the same seed produces the same bytes.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from .qinfo import Ensemble, InvariantError, as_channel, as_distribution
from .redistribution import FourPartyPureState

SIG_DIGITS = 12


class ConfigError(ValueError):
    """An instance file is malformed or violates a type invariant."""


# ---------------------------------------------------------------------------
# complex arrays


def complex_from_pairs(data) -> np.ndarray:
    """Nested lists ending in ``[re, im]`` pairs to a complex array."""
    arr = np.asarray(data, dtype=float)
    if arr.ndim == 0 or arr.shape[-1] != 2:
        raise ConfigError("complex entries must be [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def complex_to_pairs(arr: np.ndarray) -> list:
    arr = np.asarray(arr, dtype=complex)
    return np.stack([arr.real, arr.imag], axis=-1).tolist()


# ---------------------------------------------------------------------------
# loading


def load_document(path: str | Path) -> dict:
    """Parse a JSON instance file, reporting the line of any syntax error."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return doc


def _field(doc: dict, key: str, source: str):
    if key not in doc:
        raise ConfigError(f"{source}: missing '{key}'")
    return doc[key]


def _wrap(source: str, key: str, fn, *args):
    try:
        return fn(*args)
    except (InvariantError, ConfigError, ValueError, TypeError) as exc:
        raise ConfigError(f"{source}: {key}: {exc}") from exc


def parse_ensemble(doc: dict, source: str = "<config>") -> Ensemble:
    raw = _field(doc, "ensemble", source)
    prior = _field(raw, "prior", source)
    states = _wrap(source, "ensemble.states", complex_from_pairs, _field(raw, "states", source))
    labels = raw.get("labels")
    return _wrap(source, "ensemble", Ensemble, prior, states, tuple(labels) if labels else None)


def parse_channel(doc: dict, source: str = "<config>", key: str = "channel") -> np.ndarray:
    return _wrap(source, key, as_channel, _field(doc, key, source))


def parse_distribution(doc: dict, key: str, source: str = "<config>") -> np.ndarray:
    return _wrap(source, key, as_distribution, _field(doc, key, source))


def parse_joint(doc: dict, key: str = "joint_xz", source: str = "<config>") -> np.ndarray:
    raw = np.asarray(_field(doc, key, source), dtype=float)
    if raw.ndim != 2:
        raise ConfigError(f"{source}: {key}: expected a matrix")
    _wrap(source, key, as_distribution, raw.ravel())
    return raw


def parse_matrix(doc: dict, key: str, source: str = "<config>") -> np.ndarray:
    raw = np.asarray(_field(doc, key, source), dtype=float)
    if raw.ndim != 2 or not np.all(np.isfinite(raw)):
        raise ConfigError(f"{source}: {key}: expected a finite matrix")
    return raw


def parse_state(doc: dict, source: str = "<config>") -> FourPartyPureState:
    raw = _field(doc, "state", source)
    dims = [int(d) for d in _field(raw, "dims", source)]
    if len(dims) != 4 or min(dims) < 1:
        raise ConfigError(f"{source}: state.dims must list four positive dimensions")
    amp = _wrap(source, "state.amplitudes", complex_from_pairs, _field(raw, "amplitudes", source))
    if amp.size != int(np.prod(dims)):
        raise ConfigError(f"{source}: state.amplitudes has {amp.size} entries, dims need {int(np.prod(dims))}")
    return _wrap(source, "state", FourPartyPureState.from_vector, amp.ravel(), dims)


def ensemble_to_doc(e: Ensemble) -> dict:
    out = {"prior": e.prior.tolist(), "states": complex_to_pairs(e.states)}
    if e.labels:
        out["labels"] = list(e.labels)
    return out


# ---------------------------------------------------------------------------
# persistence


def round_sig(x: float, digits: int = SIG_DIGITS) -> float:
    if x == 0:
        return 0.0
    if not math.isfinite(x):
        return x
    return float(f"{x:.{digits}g}")


def format_value(v: Any) -> str:
    """CSV cell text; floats are rounded to 12 significant digits."""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return f"{round_sig(v):.{SIG_DIGITS}g}"
    if v is None:
        return ""
    return str(v)


def clean(obj: Any) -> Any:
    """Convert numpy values to JSON types with rounded floats."""
    if isinstance(obj, dict):
        return {str(k): clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return round_sig(v) if math.isfinite(v) else str(v)
    return obj


def dumps_json(obj: Any) -> str:
    return json.dumps(clean(obj), indent=2, sort_keys=True) + "\n"


def csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    return buf.getvalue()


def read_csv_rows(path: Path, header: Sequence[str]) -> list[list[str]]:
    """Complete rows of an existing sweep file; an unexpected header is an error.

    Reading stops at the first row with the wrong number of fields, which is
    what an interrupted write leaves behind.
    """
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        return []
    if rows[0] != list(header):
        raise ConfigError(f"{path}: header {rows[0]} does not match {list(header)}")
    out = []
    for row in rows[1:]:
        if len(row) != len(header):
            break
        out.append(row)
    return out
