"""Command-line interface.

Subcommands: gen-data, train, eval, ablate, check-bound. Exit codes:
0 success, 1 usage error, 2 data/config error, 3 invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from . import data as data_mod
from . import mioracle, report
from .config import load_config, load_dataset
from .errors import (
    ConfigError,
    ContractError,
    DegenerateInputError,
    DomainError,
    FormatError,
    GeometryError,
    ParameterError,
    ShapeError,
)
from .model import load_model
from .pipeline import eval_model, run_trials, write_metrics_json, write_train_outputs
from .train import TrainConfig

BOUND_TOL = 1e-9

_SWEEPABLE = {
    "batch_size": ("batch_size", int),
    "lambda": ("lam", float),
    "lr": ("lr", float),
    "epochs": ("epochs", int),
    "t_af": ("t_af", float),
    "t_ap": ("t_ap", float),
    "views_per_sample": ("views_per_sample", int),
    "k": ("k", int),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _build_parser() -> _Parser:
    parser = _Parser(prog="contraclust", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gen = sub.add_parser("gen-data", help="generate a synthetic dataset file")
    gen.add_argument("--kind", choices=("blobs", "rings"), required=True)
    gen.add_argument("--out", required=True)
    gen.add_argument("--k", type=int, default=4)
    gen.add_argument("--n-per", type=int, default=500)
    gen.add_argument("--d", type=int, default=16)
    gen.add_argument("--spread", type=float, default=10.0)
    gen.add_argument("--sigma", type=float, default=1.0)
    gen.add_argument("--radius-gap", type=float, default=2.0)
    gen.add_argument("--noise", type=float, default=0.1)
    gen.add_argument("--seed", type=int, default=0)

    tr = sub.add_parser("train", help="run the multi-trial training pipeline")
    tr.add_argument("--config", required=True)
    tr.add_argument("--out", help="output directory (overrides run.out)")
    tr.add_argument("--trials", type=int, help="override run.trials")
    tr.add_argument("--ablate", action="append", default=[],
                    choices=("disable_af", "disable_ap", "disable_cr"))

    ev = sub.add_parser("eval", help="evaluate a checkpoint on a dataset")
    ev.add_argument("--model", required=True)
    ev.add_argument("--data", required=True)
    ev.add_argument("--out", help="directory for metrics.json and figures; prints JSON when omitted")

    ab = sub.add_parser("ablate", help="sweep one hyperparameter over the train pipeline")
    ab.add_argument("--config", required=True)
    ab.add_argument("--sweep", required=True, metavar="KEY=V1,V2,...")
    ab.add_argument("--out", help="output directory (overrides run.out)")

    cb = sub.add_parser("check-bound", help="randomized check of the MI / contrastive-loss bound")
    cb.add_argument("--systems", type=int, default=1000)
    cb.add_argument("--n-max", type=int, default=6)
    cb.add_argument("--seed", type=int, default=0)
    cb.add_argument("--out", help="directory for bound_check.csv and a scatter figure")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    try:
        return _dispatch(args)
    except ContractError as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 3
    except (ConfigError, FormatError, ParameterError, ShapeError, DomainError,
            DegenerateInputError, GeometryError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _dispatch(args) -> int:
    if args.command == "gen-data":
        return _cmd_gen_data(args)
    if args.command == "train":
        return _cmd_train(args)
    if args.command == "eval":
        return _cmd_eval(args)
    if args.command == "ablate":
        return _cmd_ablate(args)
    return _cmd_check_bound(args)


def _cmd_gen_data(args) -> int:
    if args.kind == "blobs":
        ds = data_mod.gen_blobs(k=args.k, n_per=args.n_per, d=args.d,
                                center_spread=args.spread, sigma=args.sigma, seed=args.seed)
    else:
        ds = data_mod.gen_rings(k=args.k, n_per=args.n_per, radius_gap=args.radius_gap,
                                noise=args.noise, seed=args.seed)
    data_mod.save_drcd(ds, args.out)
    print(f"wrote {args.out}: N={ds.n} D={ds.d} k={ds.k_true}")
    return 0


def _apply_overrides(cfg, args):
    if args.trials is not None:
        if args.trials < 1:
            raise ConfigError([f"--trials must be >= 1, got {args.trials}"])
        cfg = dataclasses.replace(cfg, trials=args.trials)
    for flag in args.ablate:
        cfg = dataclasses.replace(cfg, **{flag: True})
    if args.out:
        cfg = dataclasses.replace(cfg, out=args.out)
    return cfg


def _cmd_train(args) -> int:
    cfg = _apply_overrides(load_config(args.config), args)
    if not cfg.out:
        raise ConfigError(["no output directory: set run.out in the config or pass --out"])
    dataset = load_dataset(cfg)
    result = run_trials(cfg, dataset)
    write_train_outputs(result, dataset, cfg.out)
    payload = result["metrics"]
    mean, best = payload["mean"], payload["best"]
    if payload["dataset"]["labeled"]:
        print(f"mean acc={mean['acc']:.4f} nmi={mean['nmi']:.4f} ari={mean['ari']:.4f}")
        print(f"best acc={best['acc']:.4f} nmi={best['nmi']:.4f} ari={best['ari']:.4f} (seed {payload['best_seed']})")
    else:
        print(f"unlabeled data: losses only (best seed {payload['best_seed']})")
    print(f"artifacts in {cfg.out}")
    return 0


def _cmd_eval(args) -> int:
    model = load_model(args.model)
    path = Path(args.data)
    dataset = data_mod.load_csv(path) if path.suffix.lower() == ".csv" else data_mod.load_drcd(path)
    if model.input_dim != dataset.d:
        raise ConfigError([f"model expects D={model.input_dim} but dataset {path} has D={dataset.d}"])
    payload, pred, z = eval_model(model, dataset, TrainConfig(k=model.k))
    if args.out:
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        write_metrics_json(payload, outdir / "metrics.json")
        report.save_cluster_sizes_figure(payload["cluster_sizes"], outdir / "cluster_sizes.png")
        report.save_embedding_figure(z, pred, outdir / "embedding_scatter.png")
        print(f"artifacts in {outdir}")
    else:
        print(json.dumps(payload, sort_keys=True, indent=2))
    return 0


def _parse_sweep(sweep: str):
    if "=" not in sweep:
        raise ConfigError([f"--sweep must look like key=v1,v2,... got {sweep!r}"])
    key, _, values = sweep.partition("=")
    key = key.strip()
    if key not in _SWEEPABLE:
        raise ConfigError([f"cannot sweep {key!r}; choose from {sorted(_SWEEPABLE)}"])
    attr, typ = _SWEEPABLE[key]
    try:
        parsed = [typ(v.strip()) for v in values.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError([f"bad sweep value for {key}: {exc}"]) from exc
    if not parsed:
        raise ConfigError([f"--sweep {key}= needs at least one value"])
    return key, attr, parsed


def _cmd_ablate(args) -> int:
    cfg = load_config(args.config)
    if args.out:
        cfg = dataclasses.replace(cfg, out=args.out)
    if not cfg.out:
        raise ConfigError(["no output directory: set run.out in the config or pass --out"])
    key, attr, values = _parse_sweep(args.sweep)
    dataset = load_dataset(cfg)

    rows = []
    for value in values:
        sub_cfg = dataclasses.replace(cfg, train=dataclasses.replace(cfg.train, **{attr: value}))
        result = run_trials(sub_cfg, dataset)
        payload = result["metrics"]
        rows.append({
            "param": key, "value": value,
            "mean_acc": payload["mean"]["acc"], "mean_nmi": payload["mean"]["nmi"],
            "mean_ari": payload["mean"]["ari"],
            "best_acc": payload["best"]["acc"],
        })
        shown = {k: v for k, v in rows[-1].items() if k not in ("param",)}
        print(" ".join(f"{k}={v}" for k, v in shown.items()))

    outdir = Path(cfg.out)
    outdir.mkdir(parents=True, exist_ok=True)
    with open(outdir / "ablation.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["param", "value", "mean_acc", "mean_nmi", "mean_ari", "best_acc"])
        for r in rows:
            writer.writerow([r["param"], r["value"],
                             *("" if r[k] is None else repr(r[k]) for k in ("mean_acc", "mean_nmi", "mean_ari", "best_acc"))])
    if rows[0]["mean_acc"] is not None:
        report.save_sweep_figure(rows, key, outdir / "ablation.png")
    print(f"artifacts in {outdir}")
    return 0


def _cmd_check_bound(args) -> int:
    if args.systems < 1 or args.n_max < 1:
        raise ConfigError(["--systems and --n-max must be >= 1"])
    rng = np.random.default_rng(args.seed)
    rows = []
    violations = 0
    for _ in range(args.systems):
        n = int(rng.integers(1, args.n_max + 1))
        sys_ = mioracle.random_system(n, rng)
        kernel = mioracle.make_kernel(sys_)
        mi = mioracle.mi_exact(sys_)
        bound = mioracle.contrastive_bound(sys_, kernel)
        gap = mi - bound
        if gap < -BOUND_TOL:
            violations += 1
        rows.append((n, mi, bound, gap))

    print("n,mi,bound,gap")
    for n, mi, bound, gap in rows:
        print(f"{n},{mi!r},{bound!r},{gap!r}")
    if args.out:
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        with open(outdir / "bound_check.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["n", "mi", "bound", "gap"])
            for n, mi, bound, gap in rows:
                writer.writerow([n, repr(mi), repr(bound), repr(gap)])
        report.save_bound_figure([r[1] for r in rows], [r[2] for r in rows], outdir / "bound_gap.png")
    if violations:
        print(f"FAIL: {violations}/{args.systems} systems have mi - bound < -{BOUND_TOL}")
        return 3
    print(f"PASS: all {args.systems} systems satisfy mi - bound >= -{BOUND_TOL}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
