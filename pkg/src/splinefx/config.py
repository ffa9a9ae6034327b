"""Experiment configuration: YAML schema, validation, builders, execution.

A config file has an `experiment` name plus `stream`, `model`, and
`trainer` blocks, an optional `sweep` block, and an `output_dir`. Unknown
keys are rejected up front. Dotted-path overrides (model.grid_size=20)
come from the command line; sweep axes are the same paths with value
lists, expanded as a cartesian product.

Each run writes three artifacts under output_dir/<run_id>/: the per-step
CSV, a one-row summary CSV, and the resolved config snapshot whose re-run
reproduces the step CSV byte for byte.
"""

from __future__ import annotations

import copy
import hashlib
import itertools
from pathlib import Path

import numpy as np
import yaml

from .fixedpoint import parse_format
from .kan import FormatTriple
from .model import Model, make_kan, make_mlp
from .streams import (DigitsStreamConfig, XorStreamConfig, bundled_digits_rows,
                      digits_stream_from_rows, load_digits_file,
                      regression_stream, rotating_xor_stream)
from .trainer import RunLog, run_online, write_summary_csv

__all__ = [
    "ConfigError",
    "load_config",
    "apply_overrides",
    "validate_config",
    "build_model",
    "build_stream",
    "expand_sweep",
    "run_experiment",
    "dump_boundary_grid",
]

STREAM_DEFAULT_T = {"regression": 1500, "xor": 8000}

_SCHEMA = {
    "experiment": None,
    "output_dir": None,
    "stream": {
        "kind": None, "seed": None,
        # xor knobs
        "spread": None, "noise_scale": None, "kerr_strength": None,
        "drift_speed": None, "breathing_amplitude": None, "breathing_frequency": None,
        # digits knobs
        "path": None, "n_stationary": None, "n_rotating": None, "omega_deg_per_step": None,
        "use_bundled_fallback": None,
    },
    "model": {
        "type": None, "dims": None, "format": None, "formats": {
            "input": None, "weight": None, "output": None,
        },
        "grid_size": None, "spline_order": None, "lut_bits": None,
        "grid_range": None, "init_scale": None, "activation": None,
        "bias": None, "init_seed": None,
    },
    "trainer": {
        "T": None, "lr": None, "loss": None, "window": None, "freeze_after": None,
    },
    "sweep": {
        "axes": None, "seeds": None,
    },
}


class ConfigError(ValueError):
    pass


def _check_keys(block, schema, where: str):
    if not isinstance(block, dict):
        raise ConfigError(f"{where}: expected a mapping, got {type(block).__name__}")
    for key, val in block.items():
        if key not in schema:
            raise ConfigError(f"{where}: unknown key {key!r}")
        sub = schema[key]
        if isinstance(sub, dict) and isinstance(val, dict):
            _check_keys(val, sub, f"{where}.{key}")


def validate_config(cfg: dict) -> dict:
    _check_keys(cfg, _SCHEMA, "config")
    for required in ("experiment", "stream", "model", "trainer"):
        if required not in cfg:
            raise ConfigError(f"config: missing required block {required!r}")
    kind = cfg["stream"].get("kind")
    if kind not in ("regression", "xor", "digits"):
        raise ConfigError(f"config.stream.kind: expected regression|xor|digits, got {kind!r}")
    mtype = cfg["model"].get("type")
    if mtype not in ("kan", "mlp"):
        raise ConfigError(f"config.model.type: expected kan|mlp, got {mtype!r}")
    if "dims" not in cfg["model"]:
        raise ConfigError("config.model: missing dims")
    if "lr" not in cfg["trainer"]:
        raise ConfigError("config.trainer: missing lr")
    try:
        _parse_model_formats(cfg["model"])
    except ValueError as e:
        raise ConfigError(f"config.model: {e}") from None
    return cfg


def load_config(path: str | Path) -> dict:
    with open(path) as fh:
        try:
            cfg = yaml.safe_load(fh)
        except yaml.YAMLError as e:
            raise ConfigError(f"{path}: YAML parse error: {e}") from None
    if not isinstance(cfg, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return validate_config(cfg)


def apply_overrides(cfg: dict, overrides: list[str]) -> dict:
    """Apply dotted-path overrides like model.grid_size=20 (values parsed as YAML)."""
    cfg = copy.deepcopy(cfg)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r}: expected dotted.path=value")
        dotted, raw = item.split("=", 1)
        value = yaml.safe_load(raw)
        node = cfg
        parts = dotted.split(".")
        for p in parts[:-1]:
            node = node.setdefault(p, {})
            if not isinstance(node, dict):
                raise ConfigError(f"override {item!r}: {p} is not a mapping")
        node[parts[-1]] = value
    return validate_config(cfg)


def config_hash(cfg: dict) -> str:
    canon = yaml.safe_dump(cfg, sort_keys=True)
    return hashlib.sha256(canon.encode()).hexdigest()[:12]


def _parse_model_formats(mcfg: dict):
    if "formats" in mcfg:
        f = mcfg["formats"]
        triple = [parse_format(f[k]) for k in ("input", "weight", "output")]
        if any(t is None for t in triple) and any(t is not None for t in triple):
            raise ConfigError("config.model.formats: cannot mix float with fixed formats")
        if triple[0] is None:
            return None
        return FormatTriple(*triple)
    fmt = parse_format(str(mcfg.get("format", "float")))
    return None if fmt is None else FormatTriple.uniform(fmt)


def _task_and_loss(stream_kind: str, tcfg: dict) -> tuple[str, str]:
    task = {"regression": "regression", "xor": "binary", "digits": "multiclass"}[stream_kind]
    default_loss = "softmax_cross_entropy" if task == "multiclass" else "squared_error"
    return task, tcfg.get("loss", default_loss)


def build_model(cfg: dict) -> Model:
    mcfg = cfg["model"]
    task, loss = _task_and_loss(cfg["stream"]["kind"], cfg["trainer"])
    fmt = _parse_model_formats(mcfg)
    dims = [int(d) for d in mcfg["dims"]]
    seed = int(mcfg.get("init_seed", 0))
    if mcfg["type"] == "kan":
        grid_range = mcfg.get("grid_range", [-1.0, 1.0])
        return make_kan(dims, grid_size=int(mcfg.get("grid_size", 10)),
                        spline_order=int(mcfg.get("spline_order", 2)),
                        lut_bits=int(mcfg.get("lut_bits", 8)),
                        grid_range=grid_range, fmt=fmt,
                        init_scale=float(mcfg.get("init_scale", 0.1)),
                        seed=seed, loss_kind=loss, task=task)
    return make_mlp(dims, activation=mcfg.get("activation", "relu"), fmt=fmt,
                    seed=seed, bias=bool(mcfg.get("bias", True)),
                    loss_kind=loss, task=task)


def _digits_rows(scfg: dict):
    path = scfg.get("path")
    if path is not None:
        return load_digits_file(path)
    if scfg.get("use_bundled_fallback", False):
        return bundled_digits_rows()
    raise ConfigError("config.stream: digits needs a path (or use_bundled_fallback: true)")


def build_stream(cfg: dict):
    """Returns (iterator, default_T) for the configured stream."""
    scfg = cfg["stream"]
    kind = scfg["kind"]
    seed = int(scfg.get("seed", 0))
    if kind == "regression":
        T = int(cfg["trainer"].get("T", STREAM_DEFAULT_T["regression"]))
        return regression_stream(seed, T=T), T
    if kind == "xor":
        T = int(cfg["trainer"].get("T", STREAM_DEFAULT_T["xor"]))
        xcfg = XorStreamConfig(
            spread=float(scfg.get("spread", 1.5)),
            noise_scale=float(scfg.get("noise_scale", 0.4)),
            kerr_strength=float(scfg.get("kerr_strength", 0.4)),
            drift_speed=float(scfg.get("drift_speed", 0.05)),
            breathing_amplitude=float(scfg.get("breathing_amplitude", 0.2)),
            breathing_frequency=float(scfg.get("breathing_frequency", 0.01)),
            seed=seed)
        return rotating_xor_stream(xcfg, T=T), T
    rows = _digits_rows(scfg)
    dcfg = DigitsStreamConfig(
        path=scfg.get("path"),
        n_stationary=int(scfg.get("n_stationary", 2)),
        n_rotating=int(scfg.get("n_rotating", 8)),
        omega_deg_per_step=float(scfg.get("omega_deg_per_step", 0.005)),
        seed=seed)
    total = len(rows) * (dcfg.n_stationary + dcfg.n_rotating)
    T = int(cfg["trainer"].get("T", total))
    return digits_stream_from_rows(rows, dcfg), T


def resolve_freeze(cfg: dict, T: int) -> int | None:
    """trainer.freeze_after: a step count, or "stationary" for the digits
    warmup boundary (stationary epochs times corpus size)."""
    raw = cfg["trainer"].get("freeze_after")
    if raw is None:
        return None
    if raw == "stationary":
        scfg = cfg["stream"]
        if scfg["kind"] != "digits":
            raise ConfigError("freeze_after: 'stationary' only applies to digits streams")
        rows = _digits_rows(scfg)
        return int(scfg.get("n_stationary", 2)) * len(rows)
    return int(raw)


def expand_sweep(cfg: dict) -> list[dict]:
    """Cartesian expansion of sweep.axes into per-cell configs."""
    sweep = cfg.get("sweep")
    if not sweep or not sweep.get("axes"):
        return [cfg]
    axes = sweep["axes"]
    paths = sorted(axes)
    cells = []
    for combo in itertools.product(*(axes[p] for p in paths)):
        overrides = [f"{p}={yaml.safe_dump(v).strip()}" for p, v in zip(paths, combo)]
        cell = apply_overrides({k: v for k, v in cfg.items() if k != "sweep"}, overrides)
        suffix = "--".join(f"{p.split('.')[-1]}={v}" for p, v in zip(paths, combo))
        cell["experiment"] = f"{cfg['experiment']}--{suffix}"
        cells.append(cell)
    return cells


def run_experiment(cfg: dict, write_outputs: bool = True) -> RunLog:
    cfg = validate_config(copy.deepcopy(cfg))
    model = build_model(cfg)
    stream, T = build_stream(cfg)
    tcfg = cfg["trainer"]
    lr = float(tcfg["lr"])
    window = tcfg.get("window")
    window = None if window in (None, "inf") else int(window)
    mcfg = cfg["model"]
    fmt = parse_format(str(mcfg.get("format", "float"))) if "formats" not in mcfg else None
    meta = {
        "run_id": cfg["experiment"],
        "seed": cfg["stream"].get("seed", 0),
        "config_hash": config_hash(cfg),
        "G": mcfg.get("grid_size", "") if mcfg["type"] == "kan" else "",
        "s": int(mcfg.get("spline_order", 2)) + 1 if mcfg["type"] == "kan" else "",
        "W": fmt.W if fmt else "",
        "I": fmt.I if fmt else "",
    }
    out_dir = Path(cfg.get("output_dir", "runs")) / cfg["experiment"]
    sink = out_dir / "steps.csv" if write_outputs else None
    log = run_online(model, stream, lr=lr, T=T, window=window, meta=meta, log_sink=sink,
                     freeze_after=resolve_freeze(cfg, T))
    if write_outputs:
        write_summary_csv(out_dir / "summary.csv", [log])
        with open(out_dir / "resolved_config.yaml", "w") as fh:
            yaml.safe_dump(cfg, fh, sort_keys=True)
    log.meta["_model"] = model
    return log


def dump_boundary_grid(model: Model, path: str | Path, resolution: int = 100,
                       bounds: tuple[float, float] | None = None) -> None:
    """Evaluate predictions on a dense 2-D input grid and write i,q,pred rows."""
    if model.d_in != 2:
        raise ValueError("boundary grid export needs a 2-input model")
    if bounds is None:
        grid = getattr(model.layers[0], "grid", None)
        bounds = (grid.x_min, grid.x_max) if grid is not None else (-4.0, 4.0)
    lo, hi = bounds
    axis = np.linspace(lo, hi, resolution)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        fh.write("i,q,pred\n")
        for qv in axis:
            for iv in axis:
                pred = float(model.predict(np.array([iv, qv]))[0])
                fh.write(f"{float(iv)!r},{float(qv)!r},{pred!r}\n")
