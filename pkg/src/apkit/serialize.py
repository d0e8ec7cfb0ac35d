"""Deterministic file formats: JSON reports, CSV tables, raw binary grids.

Every float is printed with %.17g so the decimal text round-trips the exact
binary value; dict keys are emitted sorted; complex numbers become
{"im":..., "re":...} objects. Nothing here writes timestamps or environment
details, keeping repeated runs byte-identical.
"""
from __future__ import annotations

import csv
import io
import json

import numpy as np

from .domain import DomainSpec
from .signals import GridFunction


def fmt_float(x: float) -> str:
    return "%.17g" % float(x)


def _emit(obj, out: list[str]) -> None:
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, (int, np.integer)) and not isinstance(obj, bool):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(fmt_float(float(obj)))
    elif isinstance(obj, (complex, np.complexfloating)):
        z = complex(obj)
        out.append('{"im": %s, "re": %s}' % (fmt_float(z.imag), fmt_float(z.real)))
    elif isinstance(obj, dict):
        out.append("{")
        for i, key in enumerate(sorted(obj)):
            if i:
                out.append(", ")
            out.append(json.dumps(str(key)))
            out.append(": ")
            _emit(obj[key], out)
        out.append("}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        out.append("[")
        seq = obj.tolist() if isinstance(obj, np.ndarray) else obj
        for i, item in enumerate(seq):
            if i:
                out.append(", ")
            _emit(item, out)
        out.append("]")
    elif hasattr(obj, "to_json"):
        _emit(obj.to_json(), out)
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dump_json(obj) -> str:
    out: list[str] = []
    _emit(obj, out)
    out.append("\n")
    return "".join(out)


# -- grid functions as CSV ---------------------------------------------------------

def grid_csv(f: GridFunction) -> str:
    """Rows in C order: one coordinate column per axis, then re, im."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    d = f.domain.ndim
    w.writerow([f"x{i}" for i in range(d)] + ["re", "im"])
    coords = f.domain.coordinates()
    mesh = np.meshgrid(*coords, indexing="ij") if d > 1 else [coords[0]]
    flat = [m.ravel() for m in mesh]
    vals = f.values.ravel()
    for i in range(vals.size):
        w.writerow([fmt_float(c[i]) for c in flat]
                   + [fmt_float(vals[i].real), fmt_float(vals[i].imag)])
    return buf.getvalue()


def parse_grid_csv(domain: DomainSpec, text: str) -> GridFunction:
    """Values from the re/im columns, in C order; header row optional.

    A row may carry d+2 columns (coordinates first) or exactly 2 (re, im).
    The coordinates are not trusted for placement, only the order is.
    """
    rows = [r for r in csv.reader(io.StringIO(text)) if r]
    if not rows:
        raise ValueError("empty CSV input")
    try:
        float(rows[0][-2])
    except (ValueError, IndexError):
        rows = rows[1:]
    need = int(np.prod(domain.shape))
    if len(rows) != need:
        raise ValueError(f"expected {need} data rows for this domain, got {len(rows)}")
    vals = np.empty(need, dtype=np.complex128)
    for i, r in enumerate(rows):
        if len(r) < 2:
            raise ValueError(f"row {i + 1} has fewer than two columns")
        vals[i] = complex(float(r[-2]), float(r[-1]))
    return GridFunction(domain, vals.reshape(domain.shape), provenance="csv")


# -- grid functions as binary --------------------------------------------------------

def grid_bytes(f: GridFunction) -> bytes:
    """One JSON header line (domain, dtype, shape), then raw '<c16' C-order data."""
    header = dump_json({"domain": f.domain.to_json(), "dtype": "<c16",
                        "shape": list(f.domain.shape)}).strip() + "\n"
    body = np.ascontiguousarray(f.values, dtype="<c16").tobytes()
    return header.encode("utf-8") + body


def parse_grid_bytes(blob: bytes, domain: DomainSpec | None = None) -> GridFunction:
    nl = blob.index(b"\n")
    header = json.loads(blob[:nl].decode("utf-8"))
    if header.get("dtype") != "<c16":
        raise ValueError("unsupported dtype in binary header")
    dom = DomainSpec.from_json(header["domain"])
    if domain is not None and domain != dom:
        raise ValueError("binary header domain does not match the requested domain")
    shape = tuple(header["shape"])
    vals = np.frombuffer(blob[nl + 1:], dtype="<c16")
    if vals.size != int(np.prod(shape)):
        raise ValueError("binary payload size does not match the header shape")
    return GridFunction(dom, vals.reshape(shape).copy(), provenance="binary")


# -- report tables --------------------------------------------------------------------

def _table_csv(columns: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt_float(x) if isinstance(x, (float, np.floating))
                    else str(x) for x in row])
    return buf.getvalue()


def spectrum_csv(report) -> str:
    d = len(report.freq_grid[0]) if report.freq_grid else 1
    cols = [f"freq{i}" for i in range(d)] + ["re", "im", "gap"]
    rows = [list(l.freq) + [l.coefficient.real, l.coefficient.imag, l.gap]
            for l in report.lines]
    return _table_csv(cols, rows)


def periods_csv(report) -> str:
    return _table_csv(["t", "distance"], list(report.periods))


def per_n_csv(est) -> str:
    rows = [[n, complex(v).real, complex(v).imag] for n, v in est.per_n]
    return _table_csv(["n", "re", "im"], rows)


def vanhove_csv(report) -> str:
    return _table_csv(["n", "ratio"], [list(row) for row in report.entries])


def classify_csv(report) -> str:
    return _table_csv(["t", "d_sup", "d_stepanov", "d_weyl", "d_mean"],
                      [list(r) for r in report.per_t])
