"""Run configuration: flat ``section.key=value`` text files.

Blank lines and ``#`` comments are ignored. Unknown keys are errors, and all
schema violations in a file are reported together. The documented schema:

    data.path=<file.drcd|file.csv>      # or a generator:
    data.kind=blobs|rings
    data.k=4  data.n_per=500  data.d=16  data.spread=10  data.sigma=1.0
    data.radius_gap=2.0  data.noise=0.1 # rings only
    data.seed=0
    data.standardize=0|1
    model.hidden=64                     # comma-separated hidden widths
    train.k=4          train.lr=1e-4    train.epochs=500
    train.batch_size=256  train.lambda=0.005
    train.t_af=0.5     train.t_ap=0.95  train.views_per_sample=2
    train.seed=0       train.normalize_af=0|1  train.normalize_ap=0|1
    augment.kind=gaussian_noise|feature_dropout|image_basic
    augment.sigma=0.5                   # default: half the mean feature std
    augment.dropout_prob=0.1  augment.flip_prob=0.5
    augment.crop_padding=2    augment.jitter=0.2
    augment.seed=<int>                  # default: train.seed
    run.out=<dir>  run.trials=5
    run.disable_af=0|1  run.disable_ap=0|1  run.disable_cr=0|1
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from . import data as data_mod
from .augment import AugmentSpec, default_noise_sigma
from .errors import ConfigError, ParameterError
from .train import TrainConfig


def _parse_bool(raw: str) -> bool:
    low = raw.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean (0/1), got {raw!r}")


def _parse_hidden(raw: str) -> list[int]:
    if not raw.strip():
        return []
    return [int(part) for part in raw.split(",")]


_SCHEMA = {
    "data.path": str,
    "data.kind": str,
    "data.k": int,
    "data.n_per": int,
    "data.d": int,
    "data.spread": float,
    "data.sigma": float,
    "data.radius_gap": float,
    "data.noise": float,
    "data.seed": int,
    "data.standardize": _parse_bool,
    "model.hidden": _parse_hidden,
    "train.k": int,
    "train.lr": float,
    "train.epochs": int,
    "train.batch_size": int,
    "train.lambda": float,
    "train.t_af": float,
    "train.t_ap": float,
    "train.views_per_sample": int,
    "train.seed": int,
    "train.normalize_af": _parse_bool,
    "train.normalize_ap": _parse_bool,
    "augment.kind": str,
    "augment.sigma": float,
    "augment.dropout_prob": float,
    "augment.flip_prob": float,
    "augment.crop_padding": int,
    "augment.jitter": float,
    "augment.seed": int,
    "run.out": str,
    "run.trials": int,
    "run.disable_af": _parse_bool,
    "run.disable_ap": _parse_bool,
    "run.disable_cr": _parse_bool,
}


@dataclass
class RunConfig:
    train: TrainConfig
    augment: AugmentSpec
    hidden: list[int] = field(default_factory=lambda: [64])
    data_path: str | None = None
    data_kind: str | None = None
    data_params: dict = field(default_factory=dict)
    standardize: bool = False
    out: str | None = None
    trials: int = 5
    disable_af: bool = False
    disable_ap: bool = False
    disable_cr: bool = False
    augment_sigma_auto: bool = False

    def describe(self) -> dict:
        """Stable, JSON-serializable view of every resolved setting."""
        return {
            "data": {"path": self.data_path, "kind": self.data_kind,
                     "params": dict(sorted(self.data_params.items())),
                     "standardize": self.standardize},
            "model": {"hidden": list(self.hidden)},
            "train": {"k": self.train.k, "lr": self.train.lr, "epochs": self.train.epochs,
                      "batch_size": self.train.batch_size, "lambda": self.train.lam,
                      "t_af": self.train.t_af, "t_ap": self.train.t_ap,
                      "views_per_sample": self.train.views_per_sample,
                      "seed": self.train.seed, "normalize_af": self.train.normalize_af,
                      "normalize_ap": self.train.normalize_ap},
            "augment": {"kind": self.augment.kind, "sigma": self.augment.noise_sigma,
                        "dropout_prob": self.augment.dropout_prob, "flip_prob": self.augment.flip_prob,
                        "crop_padding": self.augment.crop_padding, "jitter": self.augment.jitter_strength,
                        "seed": self.augment.seed, "sigma_auto": self.augment_sigma_auto},
            "run": {"trials": self.trials, "disable_af": self.disable_af,
                    "disable_ap": self.disable_ap, "disable_cr": self.disable_cr},
        }


def parse_config_text(text: str, source: str = "<config>") -> dict:
    """Parse key=value lines into a typed dict; collects every violation."""
    values: dict = {}
    problems: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            problems.append(f"{source}:{lineno}: expected key=value, got {raw.strip()!r}")
            continue
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _SCHEMA:
            problems.append(f"{source}:{lineno}: unknown key {key!r}")
            continue
        if key in values:
            problems.append(f"{source}:{lineno}: duplicate key {key!r}")
            continue
        try:
            values[key] = _SCHEMA[key](value)
        except ValueError as exc:
            problems.append(f"{source}:{lineno}: bad value for {key}: {exc}")
    if problems:
        raise ConfigError(problems)
    return values


def build_run_config(values: dict) -> RunConfig:
    """Assemble a RunConfig from parsed values, reporting all semantic problems."""
    problems: list[str] = []

    if "data.path" in values and "data.kind" in values:
        problems.append("data.path and data.kind are mutually exclusive")
    if "data.path" not in values and "data.kind" not in values:
        problems.append("one of data.path or data.kind is required")
    kind = values.get("data.kind")
    if kind is not None and kind not in ("blobs", "rings"):
        problems.append(f"data.kind must be blobs or rings, got {kind!r}")

    data_params = {}
    for name, default in (("k", 4), ("n_per", 500), ("d", 16), ("spread", 10.0),
                          ("sigma", 1.0), ("radius_gap", 2.0), ("noise", 0.1), ("seed", 0)):
        data_params[name] = values.get(f"data.{name}", default)

    train_cfg = TrainConfig(
        k=values.get("train.k", data_params["k"] if kind else 0),
        lr=values.get("train.lr", 1e-4),
        epochs=values.get("train.epochs", 500),
        batch_size=values.get("train.batch_size", 256),
        lam=values.get("train.lambda", 0.005),
        t_af=values.get("train.t_af", 0.5),
        t_ap=values.get("train.t_ap", 0.95),
        views_per_sample=values.get("train.views_per_sample", 2),
        seed=values.get("train.seed", 0),
        normalize_af=values.get("train.normalize_af", True),
        normalize_ap=values.get("train.normalize_ap", True),
    )
    if "train.k" not in values and not kind:
        problems.append("train.k is required when data comes from a file")

    sigma_auto = "augment.sigma" not in values
    augment_spec = AugmentSpec(
        kind=values.get("augment.kind", "gaussian_noise"),
        noise_sigma=values.get("augment.sigma", 0.0),
        dropout_prob=values.get("augment.dropout_prob", 0.1),
        flip_prob=values.get("augment.flip_prob", 0.5),
        crop_padding=values.get("augment.crop_padding", 2),
        jitter_strength=values.get("augment.jitter", 0.2),
        seed=values.get("augment.seed", train_cfg.seed),
    )

    trials = values.get("run.trials", 5)
    if trials < 1:
        problems.append(f"run.trials must be >= 1, got {trials}")

    try:
        train_cfg.validate()
    except ParameterError as exc:
        problems.append(str(exc))
    if not sigma_auto or augment_spec.kind != "gaussian_noise":
        try:
            augment_spec.validate()
        except ParameterError as exc:
            problems.append(str(exc))

    if problems:
        raise ConfigError(problems)

    return RunConfig(
        train=train_cfg,
        augment=augment_spec,
        hidden=values.get("model.hidden", [64]),
        data_path=values.get("data.path"),
        data_kind=kind,
        data_params=data_params,
        standardize=values.get("data.standardize", False),
        out=values.get("run.out"),
        trials=trials,
        disable_af=values.get("run.disable_af", False),
        disable_ap=values.get("run.disable_ap", False),
        disable_cr=values.get("run.disable_cr", False),
        augment_sigma_auto=sigma_auto,
    )


def load_config(path) -> RunConfig:
    return build_run_config(parse_config_text(Path(path).read_text(), source=str(path)))


def load_dataset(cfg: RunConfig) -> data_mod.Dataset:
    """Materialize the dataset a RunConfig names and resolve the auto noise sigma."""
    if cfg.data_path:
        path = Path(cfg.data_path)
        ds = data_mod.load_csv(path) if path.suffix.lower() == ".csv" else data_mod.load_drcd(path)
    elif cfg.data_kind == "blobs":
        p = cfg.data_params
        ds = data_mod.gen_blobs(k=p["k"], n_per=p["n_per"], d=p["d"],
                                center_spread=p["spread"], sigma=p["sigma"], seed=p["seed"])
    else:
        p = cfg.data_params
        ds = data_mod.gen_rings(k=p["k"], n_per=p["n_per"], radius_gap=p["radius_gap"],
                                noise=p["noise"], seed=p["seed"])
    if cfg.standardize:
        ds = data_mod.standardize(ds)
    if cfg.augment_sigma_auto and cfg.augment.kind == "gaussian_noise":
        cfg.augment.noise_sigma = default_noise_sigma(ds.x)
    cfg.augment.validate()
    return ds
