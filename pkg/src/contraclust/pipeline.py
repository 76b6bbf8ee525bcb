"""Multi-trial experiment pipeline behind the train/eval/ablate commands.

A pipeline run trains ``trials`` models from consecutive seeds, reports
per-trial and mean/best metrics as a stable JSON payload, and writes the
delimited artifacts (history.csv, embeddings.csv) plus rendered figures for
the best trial.
"""

from __future__ import annotations

import csv
import dataclasses
import json
from pathlib import Path

import numpy as np

from . import report
from .config import RunConfig
from .losses import total_loss
from .metrics import variance_report
from .model import forward, init_model, save_model
from .tensor import Tensor
from .train import CSV_COLUMNS, evaluate, train


def run_trials(cfg: RunConfig, dataset) -> dict:
    """Train cfg.trials models and collect metrics plus best-trial artifacts."""
    trials = []
    artifacts = []
    for t in range(cfg.trials):
        train_cfg = dataclasses.replace(cfg.train, seed=cfg.train.seed + t)
        aug_spec = dataclasses.replace(cfg.augment, seed=cfg.augment.seed + t)
        model = init_model([dataset.d] + list(cfg.hidden) + [train_cfg.k], seed=train_cfg.seed)
        model, history = train(model, dataset, train_cfg, aug_spec,
                               disable_af=cfg.disable_af, disable_ap=cfg.disable_ap, disable_cr=cfg.disable_cr)
        ev = evaluate(model, dataset)
        final_losses = None
        if history:
            last = history[-1]
            final_losses = {"af": last.af, "ap": last.ap, "cr": last.cr, "total": last.total}
        trials.append({
            "seed": train_cfg.seed,
            "acc": ev["acc"], "nmi": ev["nmi"], "ari": ev["ari"],
            "cluster_sizes": ev["cluster_sizes"],
            "final_losses": final_losses,
        })
        artifacts.append({"model": model, "history": history, "pred": ev["pred"]})

    labeled = dataset.y is not None
    if labeled:
        best_idx = int(np.argmax([t["acc"] for t in trials]))
    elif trials[0]["final_losses"] is not None:
        best_idx = int(np.argmin([t["final_losses"]["total"] for t in trials]))
    else:
        best_idx = 0

    def _agg(key, fn):
        vals = [t[key] for t in trials]
        return fn(vals) if labeled else None

    payload = {
        "dataset": {"name": dataset.name, "n": dataset.n, "d": dataset.d,
                    "k_true": dataset.k_true, "labeled": labeled},
        "config": cfg.describe(),
        "trials": trials,
        "mean": {k: _agg(k, lambda v: float(np.mean(v))) for k in ("acc", "nmi", "ari")},
        "best": {k: _agg(k, max) for k in ("acc", "nmi", "ari")},
        "best_seed": trials[best_idx]["seed"],
    }
    return {"metrics": payload, "best": artifacts[best_idx]}


def write_metrics_json(payload: dict, path) -> None:
    Path(path).write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def write_history_csv(history, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for rec in history:
            writer.writerow(rec.as_csv_row())


def write_embeddings_csv(model, dataset, path):
    z, p = forward(model, Tensor(dataset.x))
    pred = np.argmax(p.data, axis=1)
    k = model.k
    header = ["index", "label_true", "label_pred"] + [f"z{i}" for i in range(k)] + [f"p{i}" for i in range(k)]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for i in range(dataset.n):
            truth = "" if dataset.y is None else int(dataset.y[i])
            row = [i, truth, int(pred[i])]
            row += [repr(v) for v in z.data[i]]
            row += [repr(v) for v in p.data[i]]
            writer.writerow(row)
    return z.data, pred


def write_train_outputs(result: dict, dataset, outdir) -> None:
    """metrics.json, history.csv, model.drcm, embeddings.csv plus figures."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    write_metrics_json(result["metrics"], outdir / "metrics.json")
    best = result["best"]
    write_history_csv(best["history"], outdir / "history.csv")
    save_model(best["model"], outdir / "model.drcm")
    z, pred = write_embeddings_csv(best["model"], dataset, outdir / "embeddings.csv")
    if best["history"]:
        report.save_history_figure(best["history"], outdir / "training_curves.png")
    report.save_cluster_sizes_figure(np.bincount(pred, minlength=best["model"].k), outdir / "cluster_sizes.png")
    report.save_embedding_figure(z, pred, outdir / "embedding_scatter.png")


def eval_model(model, dataset, cfg_train) -> dict:
    """Metrics payload for a trained checkpoint on a dataset.

    Losses are evaluated with the identity view (the batch paired with
    itself), which keeps them well-defined without an augmentation spec.
    """
    ev = evaluate(model, dataset)
    x = Tensor(dataset.x)
    z, p = forward(model, x)
    breakdown = total_loss(z, z, p, p, cfg_train)
    payload = {
        "dataset": {"name": dataset.name, "n": dataset.n, "d": dataset.d,
                    "k_true": dataset.k_true, "labeled": dataset.y is not None},
        "acc": ev["acc"], "nmi": ev["nmi"], "ari": ev["ari"],
        "cluster_sizes": ev["cluster_sizes"],
        "losses_identity_view": breakdown.values(),
        "variance": None,
    }
    if dataset.y is not None:
        intra, inter = variance_report(p.data, dataset.y)
        payload["variance"] = {"intra_per_class": intra, "inter": inter}
    return payload, ev["pred"], z.data
