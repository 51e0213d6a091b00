"""JSON and CSV formats for frames, dual parameters, reports and traces.

Floats are written with Python's shortest round-trip representation, so a
value read back is bit-identical to the value written.  CSV output always
uses ``.`` as the decimal separator.
"""

import csv
import datetime as _dt
import io as _io
import json
from pathlib import Path

import numpy as np

from .errors import InvalidDimensions
from .frames import Frame


def _pairs(row):
    # + 0.0 folds -0.0 into 0.0
    return [[float(z.real) + 0.0, float(z.imag) + 0.0] for z in row]


def _complex_rows(rows, width=None):
    A = np.array([[complex(re, im) for re, im in row] for row in rows], dtype=np.complex128)
    if width is not None and A.size == 0:
        A = A.reshape(0, width)
    return A


def meta(version, config=None, timestamp=True):
    out = {"tool": "dualframe", "version": version}
    if config is not None:
        out["config"] = config
    if timestamp:
        out["created"] = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    return out


def frame_to_dict(F):
    return {"n": F.n, "N": F.N, "vectors": [_pairs(row) for row in F.vectors]}


def frame_from_dict(d):
    if "dual" in d and "vectors" not in d:
        d = d["dual"]
    try:
        n, N, rows = int(d["n"]), int(d["N"]), d["vectors"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidDimensions(f"malformed frame document: {exc}") from exc
    V = _complex_rows(rows, n)
    if V.shape != (N, n):
        raise InvalidDimensions(f"frame document declares N={N}, n={n} but holds {V.shape}")
    return Frame(V)


def parameter_to_dict(B):
    B = np.asarray(B, dtype=np.complex128)
    return {"rows": B.shape[0], "cols": B.shape[1], "entries": _pairs(B.ravel())}


def parameter_from_dict(d):
    if "parameter" in d and "entries" not in d:
        d = d["parameter"]
    try:
        r, c, entries = int(d["rows"]), int(d["cols"]), d["entries"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidDimensions(f"malformed parameter document: {exc}") from exc
    flat = np.array([complex(re, im) for re, im in entries], dtype=np.complex128)
    if flat.size != r * c:
        raise InvalidDimensions(f"parameter document declares {r}x{c} but holds {flat.size} entries")
    return flat.reshape(r, c)


def dumps(doc):
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def write_json(path, doc):
    Path(path).write_text(dumps(doc), encoding="utf-8")


def read_json(path):
    return json.loads(Path(path).read_text(encoding="utf-8"))


def write_frame(path, F, meta_doc=None):
    doc = frame_to_dict(F)
    if meta_doc is not None:
        doc["meta"] = meta_doc
    write_json(path, doc)


def read_frame(path):
    return frame_from_dict(read_json(path))


def report_to_dict(report):
    return {
        "spec": report.spec.as_dict(),
        "n": report.n,
        "N": report.N,
        "average": report.average,
        "lower_bound": report.lower_bound,
        "worst_case": report.worst_case,
        "per_pattern": [{"pattern": lab, "value": v} for lab, v in report.rows()],
    }


def _csv_text(header, rows):
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(x) if isinstance(x, float) else x for x in row])
    return buf.getvalue()


def report_csv(report):
    return _csv_text(["pattern", "value"], report.rows())


def read_report_csv(text):
    rows = list(csv.reader(_io.StringIO(text)))
    if not rows or rows[0] != ["pattern", "value"]:
        raise InvalidDimensions("expected a 'pattern,value' header")
    return [(lab, float(v)) for lab, v in rows[1:]]


def trace_csv(trace):
    return _csv_text(["iter", "value", "step"], ((int(i), float(v), float(s)) for i, v, s in trace))


def optimize_result_to_dict(result):
    return {
        "spec": result.spec.as_dict(),
        "method": result.method.value,
        "value": result.best_value,
        "canonical_value": result.canonical_value,
        "lower_bound": result.lower_bound,
        "certificate": result.certificate.value,
        "parameter": parameter_to_dict(result.best_parameter),
        "dual": frame_to_dict(result.best_dual),
        "trace": [[int(i), float(v), float(s)] for i, v, s in result.trace],
    }
