"""Command-line harness: run searches, verify files, sample, export traces.

Subcommands:

  search        minimize the residual objective for a given (d, m)
  verify        check a saved basis-set file against the MU conditions
  sample        draw random unitaries and write them with their angles
  construct     export a closed-form basis set (prime MUB family, Fourier)
  trace-export  merge per-restart trace CSVs into one plot-ready table

Exit status is 0 when the command succeeded and, for `search`, a basis set
below the threshold was found; 1 when a completed search or verification
came up negative; 2 on configuration or input errors. A nonzero search is
reported as "no MU set found at this budget" rather than a nonexistence
claim, because a stalled minimization proves nothing by itself.

The default output root is the MUBSEARCH_OUT environment variable, falling
back to ./runs.
"""

import argparse
import glob
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field

import numpy as np

from .constructions import fourier_matrix, identity_basis, prime_mub_set
from .hurwitz import compose_unitary_from_vector, sample_haar_vector, \
    sample_uniform_vector
from .objective import BasisSet, max_modulus_deviation, max_mu_subset, \
    verify_mub
from .optim import AnnealingConfig, NelderMeadConfig, multistart_search
from . import serialize

OUT_ROOT_ENV = "MUBSEARCH_OUT"


@dataclass
class ExperimentConfig:
    """One search run, as read from a config file and/or command flags.

    The config file is flat JSON with these field names; `nelder_mead` and
    `annealing` are optional objects whose keys override the corresponding
    optimizer config fields (see NelderMeadConfig / AnnealingConfig).
    """

    d: int
    m: int
    optimizer: str = "both"
    restarts: int = 20
    base_seed: int = 0
    gauge_fixed: bool = True
    sampling: str = "haar"
    threshold: float = 1e-10
    out_dir: str | None = None
    nelder_mead: dict = field(default_factory=dict)
    annealing: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.d < 2:
            raise ValueError(f"d must be >= 2, got {self.d}")
        if self.m < 2:
            raise ValueError(f"m must be >= 2, got {self.m}")
        if self.restarts < 1:
            raise ValueError(f"restarts must be >= 1, got {self.restarts}")
        if self.optimizer not in ("amoeba", "annealing", "both"):
            raise ValueError(f"unknown optimizer {self.optimizer!r}")
        if self.sampling not in ("haar", "uniform"):
            raise ValueError(f"unknown sampling mode {self.sampling!r}")
        if self.threshold <= 0:
            raise ValueError("threshold must be positive")

    @classmethod
    def from_file(cls, path):
        with open(path) as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}: not valid JSON ({exc})")
        if not isinstance(data, dict):
            raise ValueError(f"{path}: config must be a JSON object")
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"{path}: unknown config keys {sorted(unknown)}")
        if "d" not in data or "m" not in data:
            raise ValueError(f"{path}: config must set d and m")
        return cls(**data)

    def optimizer_configs(self):
        try:
            nm = NelderMeadConfig(**self.nelder_mead)
            sa = AnnealingConfig(**{"target": self.threshold,
                                    "max_evals": 3_000_000,
                                    **self.annealing})
        except TypeError as exc:
            raise ValueError(f"bad optimizer config: {exc}")
        return nm, sa


def _merge_search_args(args):
    """Resolve the experiment config from file plus flag overrides."""
    if args.config is not None:
        base = ExperimentConfig.from_file(args.config)
    else:
        if args.dimension is None or args.bases is None:
            raise ValueError(
                "set -d and -m (or give --config) to define the search")
        base = ExperimentConfig(d=args.dimension, m=args.bases)
    data = asdict(base)
    if args.dimension is not None:
        data["d"] = args.dimension
    if args.bases is not None:
        data["m"] = args.bases
    if args.optimizer is not None:
        data["optimizer"] = args.optimizer
    if args.restarts is not None:
        data["restarts"] = args.restarts
    if args.seed is not None:
        data["base_seed"] = args.seed
    if args.threshold is not None:
        data["threshold"] = args.threshold
    if args.uniform_angles:
        data["sampling"] = "uniform"
    if args.out is not None:
        data["out_dir"] = args.out
    return ExperimentConfig(**data)


def _resolve_run_dir(cfg):
    if cfg.out_dir:
        return cfg.out_dir
    root = os.environ.get(OUT_ROOT_ENV, "runs")
    name = f"search_d{cfg.d}_m{cfg.m}_{cfg.optimizer}_seed{cfg.base_seed}"
    return os.path.join(root, name)


def cmd_search(args):
    cfg = _merge_search_args(args)
    run_dir = _resolve_run_dir(cfg)
    serialize.ensure_dir(run_dir)
    with open(os.path.join(run_dir, "config.json"), "w") as fh:
        json.dump(asdict(cfg), fh, indent=1)
        fh.write("\n")

    nm_cfg, sa_cfg = cfg.optimizer_configs()
    sinks = {k: serialize.TraceWriter(
        os.path.join(run_dir, f"trace_r{k:03d}.csv"))
        for k in range(cfg.restarts)}
    try:
        result = multistart_search(
            cfg.d, cfg.m, optimizer=cfg.optimizer, restarts=cfg.restarts,
            base_seed=cfg.base_seed, gauge_fixed=cfg.gauge_fixed,
            sampling=cfg.sampling, threshold=cfg.threshold,
            nm_cfg=nm_cfg, sa_cfg=sa_cfg, trace_sinks=sinks)
    finally:
        for w in sinks.values():
            w.close()

    serialize.save_basis_set(os.path.join(run_dir, "basis_set.json"),
                             result.best_set, result.report)
    with open(os.path.join(run_dir, "summary.json"), "w") as fh:
        json.dump(serialize.summary_to_dict(result), fh, indent=1)
        fh.write("\n")

    for s in result.restarts:
        print(f"restart {s.index:3d}  objective {s.final_objective:.6e}  "
              f"evals {s.evaluations:8d}  {s.wall_time:7.2f} s")
    print(f"best objective {result.best_objective:.6e} "
          f"(restart {result.best_index}), "
          f"{result.success_count}/{cfg.restarts} below threshold")
    print(f"run artifacts in {run_dir}")
    if result.best_objective < cfg.threshold:
        print(f"MU set found: d={cfg.d} m={cfg.m}, "
              f"largest MU subset {result.mu_subset}")
        return 0
    print(f"no MU set found at this budget: d={cfg.d} m={cfg.m}, "
          f"best objective {result.best_objective:.6e}")
    return 1


def cmd_verify(args):
    basis_set = serialize.load_basis_set(args.path)
    ok, report = verify_mub(basis_set, tol=args.tol)
    defect = basis_set.max_unitarity_defect()
    deviation = max_modulus_deviation(basis_set)
    print(f"d={basis_set.d} m={basis_set.m} "
          f"gauge_fixed={str(basis_set.gauge_fixed).lower()}")
    print(f"residual total: {report.total:.6e}")
    if report.worst_entry is not None:
        w = report.worst_entry
        print(f"worst entry: pair {w.pair} entry {w.entry} "
              f"value {w.value:.6e}")
    print(f"max unitarity defect: {defect:.6e}")
    print(f"max overlap modulus deviation: {deviation:.6e}")
    print(f"largest MU subset at tol {args.tol:g}: "
          f"{max_mu_subset(basis_set, tol=args.tol)}")
    if ok:
        print(f"verdict: MU set at tol {args.tol:g}")
        return 0
    branch = ("orthonormality (unitarity defect)"
              if defect >= args.tol else "unbiasedness (overlap moduli)")
    print(f"verdict: not an MU set at tol {args.tol:g}; failing branch: "
          f"{branch}")
    return 1


def cmd_sample(args):
    if args.n < 2:
        raise ValueError(f"n must be >= 2, got {args.n}")
    if args.count < 1:
        raise ValueError(f"count must be >= 1, got {args.count}")
    mode = "uniform" if args.uniform_angles else "haar"
    rng = np.random.default_rng(args.seed)
    draw = sample_uniform_vector if mode == "uniform" else sample_haar_vector
    samples = []
    for _ in range(args.count):
        vec = draw(args.n, rng)
        samples.append((vec, compose_unitary_from_vector(vec, args.n)))
    out = args.out
    if out is None:
        root = os.environ.get(OUT_ROOT_ENV, "runs")
        serialize.ensure_dir(root)
        out = os.path.join(root,
                           f"samples_n{args.n}_{mode}_seed{args.seed}.json")
    serialize.save_unitary_samples(out, args.n, mode, args.seed, samples)
    print(f"wrote {args.count} {mode} samples (n={args.n}) to {out}")
    if args.stats:
        _print_sample_stats(args.n, [u for _, u in samples])
    return 0


def _print_sample_stats(n, unitaries):
    """Moment test: mean |U_ij|^2 should sit near 1/n for every entry."""
    count = len(unitaries)
    mom = np.zeros((n, n))
    for u in unitaries:
        mom += np.abs(u) ** 2
    mom /= count
    # |U_ij|^2 is Beta(1, n-1) under Haar, hence this per-sample variance
    var = (n - 1.0) / (n * n * (n + 1.0))
    se = math.sqrt(var / count)
    dev = np.abs(mom - 1.0 / n)
    worst = float(dev.max())
    i, j = np.unravel_index(int(np.argmax(dev)), (n, n))
    print(f"mean |U_ij|^2 over {count} samples: target {1.0 / n:.6f}, "
          f"range [{mom.min():.6f}, {mom.max():.6f}]")
    print(f"worst entry ({i + 1},{j + 1}): deviation {worst:.3e} "
          f"= {worst / se:.2f} standard errors")


def cmd_construct(args):
    if args.kind == "prime-mub":
        basis_set = prime_mub_set(args.d)
    else:
        basis_set = BasisSet(
            d=args.d, m=2, gauge_fixed=True,
            bases=(identity_basis(args.d), fourier_matrix(args.d)))
    out = args.out
    if out is None:
        root = os.environ.get(OUT_ROOT_ENV, "runs")
        serialize.ensure_dir(root)
        out = os.path.join(root, f"{args.kind}_d{args.d}.json")
    serialize.save_basis_set(out, basis_set)
    print(f"wrote {args.kind} set for d={args.d} "
          f"({basis_set.m} bases) to {out}")
    return 0


def cmd_trace_export(args):
    paths = sorted(glob.glob(os.path.join(args.run_dir, "trace_*.csv")))
    if not paths:
        print(f"no trace files in {args.run_dir}", file=sys.stderr)
        return 1
    labels = [os.path.basename(p)[len("trace_"):-len(".csv")] for p in paths]
    steps, columns, envelope = serialize.merge_traces(paths)
    out = args.out or os.path.join(args.run_dir, "traces_merged.csv")
    serialize.write_merged_trace(out, steps, columns, envelope, labels)
    print(f"merged {len(paths)} traces ({steps.size} rows) into {out}")
    print(f"envelope minimum: {float(envelope.min()):.6e}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="mubsearch",
        description="Numerical search for mutually unbiased bases of C^d.")
    sub = parser.add_subparsers(dest="command", required=True)

    ps = sub.add_parser(
        "search", help="minimize the residual objective for (d, m)")
    ps.add_argument("--config", help="JSON experiment config file")
    ps.add_argument("-d", "--dimension", type=int, help="Hilbert dimension")
    ps.add_argument("-m", "--bases", type=int, help="number of bases")
    ps.add_argument("--optimizer", choices=["amoeba", "annealing", "both"])
    ps.add_argument("--restarts", type=int, metavar="K")
    ps.add_argument("--seed", type=int, help="base seed for all restarts")
    ps.add_argument("--threshold", type=float,
                    help="objective value counted as success")
    ps.add_argument("--uniform-angles", action="store_true",
                    help="draw start points with uniform angles instead of "
                         "the Haar-correct density")
    ps.add_argument("--out", help="output directory for this run")
    ps.set_defaults(func=cmd_search)

    pv = sub.add_parser("verify", help="check a basis-set file")
    pv.add_argument("path")
    pv.add_argument("--tol", type=float, default=1e-7,
                    help="entry-modulus tolerance (default 1e-7)")
    pv.set_defaults(func=cmd_verify)

    pm = sub.add_parser("sample", help="draw random unitaries to a file")
    pm.add_argument("n", type=int, help="matrix dimension (>= 2)")
    pm.add_argument("count", type=int, help="number of samples")
    pm.add_argument("--seed", type=int, default=0)
    pm.add_argument("--uniform-angles", action="store_true",
                    help="sample all angles uniformly instead of the "
                         "Haar-correct density")
    pm.add_argument("--stats", action="store_true",
                    help="print the |U_ij|^2 moment summary")
    pm.add_argument("--out", help="output file path")
    pm.set_defaults(func=cmd_sample)

    pc = sub.add_parser("construct", help="export a closed-form basis set")
    pc.add_argument("kind", choices=["prime-mub", "fourier"])
    pc.add_argument("d", type=int)
    pc.add_argument("--out", help="output file path")
    pc.set_defaults(func=cmd_construct)

    pt = sub.add_parser("trace-export",
                        help="merge per-restart traces into one table")
    pt.add_argument("run_dir")
    pt.add_argument("--out", help="output CSV path")
    pt.set_defaults(func=cmd_trace_export)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry_point():
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
