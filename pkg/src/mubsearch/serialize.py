"""File formats: basis-set JSON, residual reports, trace CSVs, run summaries.

Matrix files carry every real component with 17 significant digits, enough
to reproduce the double exactly on reload, so re-verification of a saved
search result gives the same residual totals. Trace files are append-only
CSV with header ``step,best_objective,temperature`` and one row per recorded
sample; they are flushed row by row so a long run can be watched mid-flight.
"""

import csv
import json
import math
import os

import numpy as np

from .objective import BasisSet, ResidualReport, WorstEntry

__all__ = [
    "format_float",
    "save_basis_set",
    "load_basis_set",
    "save_unitary_samples",
    "load_unitary_samples",
    "report_to_dict",
    "report_from_dict",
    "save_report",
    "summary_to_dict",
    "TraceWriter",
    "read_trace",
    "merge_traces",
    "write_merged_trace",
    "ensure_dir",
]

TRACE_HEADER = ("step", "best_objective", "temperature")


def format_float(v):
    """Render a finite float with 17 significant digits."""
    v = float(v)
    if not math.isfinite(v):
        raise ValueError(f"cannot serialize non-finite value {v}")
    return format(v, ".17g")


def _write_json(path, payload):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")


def _matrix_block(mat, pad):
    """Rows of [re, im] pairs, one JSON array line per matrix row."""
    rows = []
    for row in np.asarray(mat):
        cells = ", ".join(f"[{format_float(z.real)}, "
                          f"{format_float(z.imag)}]" for z in row)
        rows.append(f"{pad}[{cells}]")
    return ",\n".join(rows)


def save_basis_set(path, basis_set, report=None):
    """Write a BasisSet (and optionally its report) as a JSON file.

    Layout: top-level d, m, gauge_fixed, then one d x d array of [re, im]
    pairs per basis. The document is emitted by hand because the stdlib
    encoder offers no control over float rendering and the matrix entries
    must carry the full 17 significant digits.
    """
    body = ["  [\n" + _matrix_block(b, "   ") + "\n  ]"
            for b in basis_set.bases]
    doc = ("{\n"
           f' "d": {basis_set.d},\n'
           f' "m": {basis_set.m},\n'
           f' "gauge_fixed": {str(basis_set.gauge_fixed).lower()},\n'
           ' "bases": [\n' + ",\n".join(body) + "\n ]")
    if report is not None:
        doc += ',\n "report": ' + json.dumps(report_to_dict(report), indent=1)
    doc += "\n}\n"
    with open(path, "w") as fh:
        fh.write(doc)


def save_unitary_samples(path, n, mode, seed, samples):
    """Write sampled unitaries with their angle vectors, 17 digits each.

    `samples` is a sequence of (angle_vector, unitary) pairs. The file is a
    JSON object with n, mode, seed, count and a samples array; byte-for-byte
    reproducible for a fixed seed.
    """
    parts = []
    for angles, u in samples:
        avec = ", ".join(format_float(a) for a in np.asarray(angles))
        parts.append('  {\n   "angles": [' + avec + '],\n'
                     '   "unitary": [\n' + _matrix_block(u, "    ")
                     + "\n   ]\n  }")
    doc = ("{\n"
           f' "n": {n},\n'
           f' "mode": "{mode}",\n'
           f' "seed": {seed},\n'
           f' "count": {len(parts)},\n'
           ' "samples": [\n' + ",\n".join(parts) + "\n ]\n}\n")
    with open(path, "w") as fh:
        fh.write(doc)


def load_unitary_samples(path):
    """Read a sample file back; returns (n, mode, list of (angles, unitary))."""
    with open(path) as fh:
        payload = json.load(fh)
    n = payload["n"]
    out = []
    for item in payload["samples"]:
        angles = np.array(item["angles"], dtype=float)
        u = np.empty((n, n), dtype=np.complex128)
        for ri, row in enumerate(item["unitary"]):
            for ci, (re, im) in enumerate(row):
                u[ri, ci] = complex(re, im)
        out.append((angles, u))
    return n, payload["mode"], out


def _parse_entry(pair, where):
    if (not isinstance(pair, list)) or len(pair) != 2:
        raise ValueError(f"{where}: matrix entry must be a [re, im] pair")
    try:
        return complex(float(pair[0]), float(pair[1]))
    except (TypeError, ValueError):
        raise ValueError(f"{where}: non-numeric matrix entry {pair!r}")


def load_basis_set(path):
    """Read a basis-set file back into a BasisSet.

    Raises ValueError on any schema problem: missing keys, wrong basis
    count, matrices whose size disagrees with the declared d, bad entries.
    """
    with open(path) as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: not valid JSON ({exc})")
    if not isinstance(payload, dict):
        raise ValueError(f"{path}: expected a JSON object at top level")
    for key in ("d", "m", "gauge_fixed", "bases"):
        if key not in payload:
            raise ValueError(f"{path}: missing required key {key!r}")
    d, m = payload["d"], payload["m"]
    if not (isinstance(d, int) and isinstance(m, int)):
        raise ValueError(f"{path}: d and m must be integers")
    raw = payload["bases"]
    if not isinstance(raw, list) or len(raw) != m:
        raise ValueError(f"{path}: expected {m} bases, found "
                         f"{len(raw) if isinstance(raw, list) else 'none'}")
    bases = []
    for bi, rows in enumerate(raw):
        if not isinstance(rows, list) or len(rows) != d or any(
                not isinstance(r, list) or len(r) != d for r in rows):
            raise ValueError(f"{path}: basis {bi + 1} is not a {d}x{d} matrix")
        mat = np.empty((d, d), dtype=np.complex128)
        for ri, row in enumerate(rows):
            for ci, pair in enumerate(row):
                mat[ri, ci] = _parse_entry(
                    pair, f"{path}: basis {bi + 1} entry ({ri + 1},{ci + 1})")
        bases.append(mat)
    return BasisSet(d=d, m=m, gauge_fixed=bool(payload["gauge_fixed"]),
                    bases=tuple(bases))


def report_to_dict(report):
    # plain floats here: repr round-trips doubles exactly as JSON numbers
    out = {
        "total": report.total,
        "pair_count": report.pair_count,
        "per_pair": {f"{i},{j}": v
                     for (i, j), v in sorted(report.per_pair.items())},
    }
    if report.worst_entry is not None:
        w = report.worst_entry
        out["worst_entry"] = {"pair": list(w.pair), "entry": list(w.entry),
                              "value": w.value}
    return out


def report_from_dict(data):
    per_pair = {}
    for key, v in data["per_pair"].items():
        i, j = key.split(",")
        per_pair[(int(i), int(j))] = float(v)
    worst = None
    if "worst_entry" in data:
        w = data["worst_entry"]
        worst = WorstEntry(pair=tuple(w["pair"]), entry=tuple(w["entry"]),
                           value=float(w["value"]))
    return ResidualReport(total=float(data["total"]), per_pair=per_pair,
                          worst_entry=worst, pair_count=data["pair_count"])


def save_report(path, report):
    _write_json(path, report_to_dict(report))


class TraceWriter:
    """Append-only CSV sink for optimization trace rows."""

    def __init__(self, path):
        self._fh = open(path, "w", newline="")
        self._fh.write(",".join(TRACE_HEADER) + "\n")
        self._fh.flush()

    def __call__(self, step, best, temperature):
        self._fh.write(f"{step},{best!r},{temperature!r}\n")
        self._fh.flush()

    def close(self):
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def read_trace(path):
    """Load a trace CSV into arrays (steps, best, temperature)."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader, ()))
        if header != TRACE_HEADER:
            raise ValueError(f"{path}: unexpected trace header {header}")
        rows = [(int(r[0]), float(r[1]), float(r[2])) for r in reader]
    if not rows:
        raise ValueError(f"{path}: trace has no rows")
    steps = np.array([r[0] for r in rows], dtype=np.int64)
    best = np.array([r[1] for r in rows])
    temp = np.array([r[2] for r in rows])
    return steps, best, temp


def merge_traces(paths, keep_threshold=1e-2, thinned_rows=400):
    """Align several restart traces on a common step grid.

    Each trace is treated as a right-continuous step function of the
    cumulative evaluation count and sampled on the union of all step values.
    Returns (steps, per-trace best matrix, envelope minimum). Rows where the
    envelope is still above `keep_threshold` are all kept; the tail beyond
    that is thinned to about `thinned_rows` log-spaced steps (the last row
    always survives).
    """
    if not paths:
        raise ValueError("no trace files to merge")
    loaded = [read_trace(p) for p in paths]
    grid = np.unique(np.concatenate([s for s, _, _ in loaded]))
    columns = np.empty((len(loaded), grid.size))
    for i, (steps, best, _) in enumerate(loaded):
        # index of the latest sample at or before each grid point; before a
        # trace's first sample, carry its first value backward
        pos = np.searchsorted(steps, grid, side="right") - 1
        columns[i] = best[np.clip(pos, 0, steps.size - 1)]
    envelope = columns.min(axis=0)

    above = envelope > keep_threshold
    cut = int(np.argmin(above)) if not above.all() else grid.size
    tail = np.arange(cut, grid.size)
    if tail.size > thinned_rows:
        picks = np.unique(np.geomspace(1, tail.size, thinned_rows).astype(int) - 1)
        tail = tail[picks]
        if tail[-1] != grid.size - 1:
            tail = np.append(tail, grid.size - 1)
    keep = np.concatenate([np.arange(cut), tail])
    return grid[keep], columns[:, keep], envelope[keep]


def write_merged_trace(path, steps, columns, envelope, labels):
    """Write the merged trace table; envelope column only for several traces."""
    with open(path, "w", newline="") as fh:
        cols = ["step"] + [f"best_{lab}" for lab in labels]
        if columns.shape[0] > 1:
            cols.append("envelope_min")
        fh.write(",".join(cols) + "\n")
        for r in range(steps.size):
            row = [str(int(steps[r]))]
            row += [repr(float(v)) for v in columns[:, r]]
            if columns.shape[0] > 1:
                row.append(repr(float(envelope[r])))
            fh.write(",".join(row) + "\n")


def summary_to_dict(result):
    """JSON-ready summary of a SearchResult (wall times included)."""
    return {
        "d": result.d,
        "m": result.m,
        "gauge_fixed": result.gauge_fixed,
        "optimizer": result.optimizer,
        "threshold": result.threshold,
        "best_objective": result.best_objective,
        "best_restart": result.best_index,
        "success_count": result.success_count,
        "mu_subset": list(result.mu_subset),
        "restarts": [{
            "index": s.index,
            "seed": s.seed,
            "final_objective": s.final_objective,
            "evaluations": s.evaluations,
            "wall_time_s": round(s.wall_time, 3),
            "converged": s.converged,
        } for s in result.restarts],
    }


def ensure_dir(path):
    os.makedirs(path, exist_ok=True)
    return path
