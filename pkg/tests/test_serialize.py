import json
import math

import numpy as np
import pytest

from mubsearch.constructions import prime_mub_set
from mubsearch.hurwitz import compose_unitary_from_vector, sample_haar_vector
from mubsearch.objective import BasisSet, residual_report
from mubsearch.serialize import (
    TraceWriter,
    ensure_dir,
    format_float,
    load_basis_set,
    load_unitary_samples,
    merge_traces,
    read_trace,
    report_from_dict,
    save_basis_set,
    save_unitary_samples,
    summary_to_dict,
    write_merged_trace,
)


def test_format_float_round_trips_exactly():
    for v in (0.1, 1.0 / 3.0, math.pi, 1e-300, -2.5e17, 5e-324,
              1 / math.sqrt(6), 0.0, -0.0):
        assert float(format_float(v)) == v
    for bad in (math.nan, math.inf, -math.inf):
        with pytest.raises(ValueError):
            format_float(bad)


def _random_set(d, m, seed):
    rng = np.random.default_rng(seed)
    bases = tuple(compose_unitary_from_vector(sample_haar_vector(d, rng), d)
                  for _ in range(m))
    return BasisSet(d=d, m=m, gauge_fixed=False, bases=bases)


def test_basis_set_round_trip_is_bit_exact(tmp_path):
    for bs in (prime_mub_set(3), _random_set(4, 2, 60)):
        path = tmp_path / f"set_{bs.d}_{bs.m}.json"
        save_basis_set(path, bs)
        back = load_basis_set(path)
        assert back.d == bs.d and back.m == bs.m
        assert back.gauge_fixed == bs.gauge_fixed
        for a, b in zip(back.bases, bs.bases):
            assert np.array_equal(a, b)


def test_basis_set_file_is_plain_json(tmp_path):
    bs = prime_mub_set(2)
    path = tmp_path / "set.json"
    save_basis_set(path, bs)
    payload = json.loads(path.read_text())
    assert payload["d"] == 2 and payload["m"] == 3
    assert len(payload["bases"]) == 3
    entry = payload["bases"][0][0][0]
    assert isinstance(entry, list) and len(entry) == 2


def test_basis_set_with_embedded_report(tmp_path):
    bs = prime_mub_set(3)
    rep = residual_report(bs)
    path = tmp_path / "set.json"
    save_basis_set(path, bs, report=rep)
    payload = json.loads(path.read_text())
    back = report_from_dict(payload["report"])
    assert back.total == rep.total
    assert back.pair_count == rep.pair_count
    assert back.per_pair == rep.per_pair
    assert back.worst_entry == rep.worst_entry
    # the loader ignores the report and still returns the matrices
    assert np.array_equal(load_basis_set(path).bases[1], bs.bases[1])


def _write_payload(tmp_path, payload, name="bad.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return path


def test_load_rejects_malformed_files(tmp_path):
    good = {
        "d": 2, "m": 1, "gauge_fixed": False,
        "bases": [[[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]],
    }
    assert load_basis_set(_write_payload(tmp_path, good)).d == 2

    broken = tmp_path / "broken.json"
    broken.write_text("{ not json")
    with pytest.raises(ValueError, match="not valid JSON"):
        load_basis_set(broken)

    with pytest.raises(ValueError, match="top level"):
        load_basis_set(_write_payload(tmp_path, [1, 2, 3]))

    missing = dict(good)
    del missing["m"]
    with pytest.raises(ValueError, match="missing required key"):
        load_basis_set(_write_payload(tmp_path, missing))

    floaty = dict(good, d=2.0)
    with pytest.raises(ValueError, match="must be integers"):
        load_basis_set(_write_payload(tmp_path, floaty))

    short = dict(good, m=2)
    with pytest.raises(ValueError, match="expected 2 bases"):
        load_basis_set(_write_payload(tmp_path, short))

    ragged = dict(good, bases=[[[[1.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]])
    with pytest.raises(ValueError, match="not a 2x2 matrix"):
        load_basis_set(_write_payload(tmp_path, ragged))

    entries = dict(good, bases=[[[[1.0, 0.0, 9.0], [0.0, 0.0]],
                                 [[0.0, 0.0], [1.0, 0.0]]]])
    with pytest.raises(ValueError, match=r"\[re, im\] pair"):
        load_basis_set(_write_payload(tmp_path, entries))

    textual = dict(good, bases=[[[[1.0, "x"], [0.0, 0.0]],
                                 [[0.0, 0.0], [1.0, 0.0]]]])
    with pytest.raises(ValueError, match="non-numeric"):
        load_basis_set(_write_payload(tmp_path, textual))


def test_unitary_samples_round_trip(tmp_path):
    rng = np.random.default_rng(61)
    samples = []
    for _ in range(3):
        angles = sample_haar_vector(3, rng)
        samples.append((angles, compose_unitary_from_vector(angles, 3)))
    path = tmp_path / "samples.json"
    save_unitary_samples(path, 3, "haar", 61, samples)
    n, mode, back = load_unitary_samples(path)
    assert n == 3 and mode == "haar" and len(back) == 3
    for (a0, u0), (a1, u1) in zip(samples, back):
        assert np.array_equal(a0, a1)
        assert np.array_equal(u0, u1)


def test_trace_writer_and_reader(tmp_path):
    path = tmp_path / "trace.csv"
    with TraceWriter(path) as sink:
        sink(101, 0.1 + 0.2, 2.5)
        sink(2000, 1e-11, 3.4e-7)
    text = path.read_text().splitlines()
    assert text[0] == "step,best_objective,temperature"
    assert len(text) == 3
    steps, best, temp = read_trace(path)
    assert steps.tolist() == [101, 2000]
    assert best[0] == 0.1 + 0.2  # repr round trip, no precision loss
    assert best[1] == 1e-11
    assert temp[1] == 3.4e-7


def test_read_trace_rejects_bad_files(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("step,best_objective,temperature\n")
    with pytest.raises(ValueError, match="no rows"):
        read_trace(empty)
    wrong = tmp_path / "wrong.csv"
    wrong.write_text("a,b\n1,2\n")
    with pytest.raises(ValueError, match="unexpected trace header"):
        read_trace(wrong)


def _write_trace(path, rows):
    with TraceWriter(path) as sink:
        for r in rows:
            sink(*r)
    return path


def test_merge_traces_aligns_on_union_grid(tmp_path):
    a = _write_trace(tmp_path / "a.csv",
                     [(1, 1.0, 0.0), (10, 0.5, 0.0), (100, 0.004, 0.0)])
    b = _write_trace(tmp_path / "b.csv",
                     [(5, 2.0, 0.0), (50, 0.003, 0.0)])
    steps, columns, envelope = merge_traces([a, b])
    assert steps.tolist() == [1, 5, 10, 50, 100]
    assert columns[0].tolist() == [1.0, 1.0, 0.5, 0.5, 0.004]
    # before its first sample a trace carries its first value backward
    assert columns[1].tolist() == [2.0, 2.0, 2.0, 0.003, 0.003]
    assert envelope.tolist() == [1.0, 1.0, 0.5, 0.003, 0.003]


def test_merge_traces_keeps_everything_above_threshold(tmp_path):
    high = [(i + 1, 1.0 / (i + 1), 0.0) for i in range(50)]  # all > 1e-2
    low = [(1000 + i, 1e-6 / (i + 1), 0.0) for i in range(2000)]
    path = _write_trace(tmp_path / "t.csv", high + low)
    steps, columns, envelope = merge_traces([path], thinned_rows=100)
    # the high-objective prefix survives untouched
    assert set(range(1, 51)) <= set(steps.tolist())
    # the tail collapses to roughly thinned_rows log-spaced picks
    # (duplicate low indices merge, so a bit under the nominal count)
    assert 50 + 50 <= steps.size <= 50 + 101
    assert steps[-1] == 2999  # last row always kept
    assert np.all(np.diff(envelope) <= 0)


def test_merge_traces_requires_input():
    with pytest.raises(ValueError):
        merge_traces([])


def test_write_merged_trace_single_column(tmp_path):
    t = _write_trace(tmp_path / "only.csv", [(1, 0.5, 0.0), (2, 0.25, 0.0)])
    steps, columns, envelope = merge_traces([t])
    out = tmp_path / "merged.csv"
    write_merged_trace(out, steps, columns, envelope, ["r000"])
    lines = out.read_text().splitlines()
    assert lines[0] == "step,best_r000"
    assert lines[1] == "1,0.5"


def test_write_merged_trace_envelope_column(tmp_path):
    a = _write_trace(tmp_path / "a.csv", [(1, 1.0, 0.0), (4, 0.5, 0.0)])
    b = _write_trace(tmp_path / "b.csv", [(2, 0.75, 0.0)])
    steps, columns, envelope = merge_traces([a, b])
    out = tmp_path / "merged.csv"
    write_merged_trace(out, steps, columns, envelope, ["a", "b"])
    lines = out.read_text().splitlines()
    assert lines[0] == "step,best_a,best_b,envelope_min"
    for line in lines[1:]:
        cells = line.split(",")
        assert float(cells[3]) == min(float(cells[1]), float(cells[2]))


def test_summary_to_dict_is_json_ready(tmp_path):
    from mubsearch.optim import NelderMeadConfig, multistart_search
    res = multistart_search(2, 2, optimizer="amoeba", restarts=2,
                            base_seed=9,
                            nm_cfg=NelderMeadConfig(max_evals=800))
    summary = summary_to_dict(res)
    text = json.dumps(summary)
    back = json.loads(text)
    assert back["d"] == 2 and back["m"] == 2
    assert back["optimizer"] == "amoeba"
    assert len(back["restarts"]) == 2
    assert back["restarts"][1]["seed"] == "9:1"
    assert back["best_objective"] == res.best_objective


def test_ensure_dir(tmp_path):
    target = tmp_path / "x" / "y"
    assert ensure_dir(target) == target
    assert target.is_dir()
    ensure_dir(target)  # idempotent
