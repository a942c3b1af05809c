"""Acceptance checks, one per numbered criterion, each printing a verdict.

These are the slow end-to-end runs: the dimension-six searches dominate at
roughly half an hour total. Every test prints one [PASS]/[FAIL] line with
the measured numbers so a log skim shows the whole picture.
"""

import filecmp
import json
import math
import time
from contextlib import contextmanager

import numpy as np
from scipy import stats

from mubsearch.cli import main
from mubsearch.constructions import prime_mub_set
from mubsearch.hurwitz import (
    angle_count,
    qr_haar_sample,
    sample_unitaries,
    unitarity_defect,
)
from mubsearch.objective import (
    max_mu_subset,
    pair_residual,
    verify_mub,
)
from mubsearch.optim import multistart_search


@contextmanager
def criterion(capsys, num, label):
    """Print one verdict line for this criterion, pass or fail."""
    state = {"detail": ""}
    try:
        yield state
    except BaseException:
        with capsys.disabled():
            print(f"\n[FAIL] criterion {num}: {label} {state['detail']}")
        raise
    with capsys.disabled():
        print(f"\n[PASS] criterion {num}: {label} {state['detail']}")


def test_criterion_1_d6_m3_zero_is_reached(tmp_path, capsys):
    with criterion(capsys, 1,
                   "d=6 m=3 search envelope reaches < 1e-10") as state:
        t0 = time.perf_counter()
        run_dir = tmp_path / "d6m3"
        rc = main(["search", "-d", "6", "-m", "3", "--restarts", "20",
                   "--seed", "0", "--out", str(run_dir)])
        wall = time.perf_counter() - t0
        summary = json.loads((run_dir / "summary.json").read_text())
        best = summary["best_objective"]
        state["detail"] = (f"(best {best:.3e}, "
                           f"{summary['success_count']}/20 restarts, "
                           f"{wall / 60:.1f} min)")
        assert rc == 0
        assert best < 1e-10
        assert wall < 30 * 60


def test_criterion_2_d6_m4_floor_persists(capsys):
    with criterion(capsys, 2,
                   "d=6 m=4 best stays > 1e-3 in 3 repetitions") as state:
        t0 = time.perf_counter()
        bests = []
        for rep in range(3):
            res = multistart_search(6, 4, optimizer="both", restarts=20,
                                    base_seed=rep)
            bests.append(res.best_objective)
        wall = time.perf_counter() - t0
        state["detail"] = ("(bests " +
                           ", ".join(f"{b:.3e}" for b in bests) +
                           f", {wall / 60:.1f} min)")
        assert all(b > 1e-3 for b in bests)
        assert wall < 60 * 60


def test_criterion_3_prime_construction_oracle(capsys):
    with criterion(capsys, 3,
                   "prime d in {2,3,5,7}: d+1 bases verify as MU") as state:
        totals = []
        for d in (2, 3, 5, 7):
            bs = prime_mub_set(d)
            ok, report = verify_mub(bs, tol=1e-10)
            assert ok, f"verify_mub failed for d={d}"
            assert report.total < 1e-20
            assert max_mu_subset(bs) == list(range(1, d + 2))
            totals.append(report.total)
        state["detail"] = f"(largest residual {max(totals):.1e})"


def test_criterion_4_haar_statistics(capsys):
    with criterion(capsys, 4,
                   "Haar moments within 3 SE and KS p > 0.01 "
                   "for n in {2,3,6}") as state:
        count = 10_000
        details = []
        for n, seed in ((2, 1032), (3, 1033), (6, 1026)):
            rng = np.random.default_rng(seed)
            _, mats = sample_unitaries(n, count, rng)
            moments = np.mean(np.abs(mats) ** 2, axis=0)
            se = math.sqrt((n - 1.0) / (n * n * (n + 1.0)) / count)
            worst = float(np.max(np.abs(moments - 1.0 / n)))
            assert worst < 3.0 * se, (
                f"n={n}: worst moment deviation {worst:.2e} "
                f"exceeds 3 SE = {3 * se:.2e}")
            oracle_rng = np.random.default_rng(seed + 500)
            oracle = np.array([abs(qr_haar_sample(n, oracle_rng)[0, 0]) ** 2
                               for _ in range(count)])
            ours = np.abs(mats[:, 0, 0]) ** 2
            p = stats.ks_2samp(ours, oracle).pvalue
            assert p > 0.01, f"n={n}: KS p-value {p:.4f}"
            details.append(f"n={n} dev {worst / se:.2f} SE, p {p:.2f}")
        state["detail"] = "(" + "; ".join(details) + ")"


def test_criterion_5_unitarity_and_parameter_count(capsys):
    with criterion(capsys, 5,
                   "10^3 draws per n in {2..8} all unitary to 1e-12, "
                   "n^2 angles") as state:
        worst = 0.0
        for n in range(2, 9):
            assert angle_count(n) == n * n
            rng = np.random.default_rng(200 + n)
            _, mats = sample_unitaries(n, 1000, rng)
            defects = [unitarity_defect(u) for u in mats]
            worst = max(worst, max(defects))
            assert max(defects) < 1e-12
        state["detail"] = f"(worst defect {worst:.2e})"


def test_criterion_6_small_cases_converge(capsys):
    with criterion(capsys, 6,
                   "d=2 m=3 and d=3 m=4 reach < 1e-10 with K=5") as state:
        t0 = time.perf_counter()
        details = []
        for d, m in ((2, 3), (3, 4)):
            res = multistart_search(d, m, optimizer="both", restarts=5,
                                    base_seed=0)
            assert res.best_objective < 1e-10, (
                f"d={d} m={m}: best {res.best_objective:.3e}")
            details.append(f"d{d}m{m} {res.best_objective:.1e}")
        wall = time.perf_counter() - t0
        state["detail"] = ("(" + ", ".join(details) +
                           f", {wall:.0f} s)")
        assert wall < 5 * 60


def test_criterion_7_identity_pair_closed_form(capsys):
    with criterion(capsys, 7,
                   "pair residual of (I_d, I_d) equals d-1 "
                   "for d in {2..10}") as state:
        worst = 0.0
        for d in range(2, 11):
            eye = np.eye(d, dtype=np.complex128)
            got = pair_residual(eye, eye)
            worst = max(worst, abs(got - (d - 1)))
            assert abs(got - (d - 1)) <= 1e-12
        state["detail"] = f"(worst deviation {worst:.2e})"


def test_criterion_8_reproducible_searches(tmp_path, capsys):
    with criterion(capsys, 8,
                   "same config and seed give identical objectives "
                   "and trace files") as state:
        cfg = tmp_path / "config.json"
        cfg.write_text(json.dumps({
            "d": 2, "m": 3, "optimizer": "both", "restarts": 2,
            "base_seed": 17,
            "annealing": {"proposals_per_step": 2000, "max_evals": 40_000},
            "nelder_mead": {"max_evals": 10_000},
        }))
        dirs = [tmp_path / "run_a", tmp_path / "run_b"]
        codes = [main(["search", "--config", str(cfg), "--out", str(p)])
                 for p in dirs]
        assert codes[0] == codes[1]
        summaries = [json.loads((p / "summary.json").read_text())
                     for p in dirs]
        assert (summaries[0]["best_objective"]
                == summaries[1]["best_objective"])
        finals = [[r["final_objective"] for r in s["restarts"]]
                  for s in summaries]
        assert finals[0] == finals[1]
        for name in ("trace_r000.csv", "trace_r001.csv", "basis_set.json"):
            assert filecmp.cmp(dirs[0] / name, dirs[1] / name,
                               shallow=False), f"{name} differs"
        state["detail"] = (f"(best {summaries[0]['best_objective']:.3e} "
                           "twice, traces byte-identical)")
