"""Run configuration: flat ``section.key = value`` text files.

Example::

    source.synthetic = scenario.txt     # or: source.sequence = data/Basketball
    run.seed = 0
    run.reps = 5
    strategy.kind = joint               # joint | fixed | psr
    joint.mu = 5
    joint.K = 50
    joint.eta = 0.035

Relative source paths are resolved against the config file's directory.
Every key is listed in ``KEYS``; anything else is a :class:`ConfigError`
naming the key.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path

from .baselines import DecayConfig
from .tracking import SvmTrackConfig, TrackerConfig
from .weights import PriorSchedule


class ConfigError(ValueError):
    def __init__(self, key, message):
        super().__init__(f"{key}: {message}")
        self.key = key


def _bool(s: str) -> bool:
    v = s.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {s!r}")


def _window(s: str):
    return None if s.strip().lower() in ("none", "") else int(s)


def _float(s: str) -> float:
    v = float(s)
    if math.isnan(v):
        raise ValueError("nan is not allowed")
    return v


KEYS = {
    "source.synthetic": str, "source.sequence": str,
    "run.seed": int, "run.reps": int, "run.format": str,
    "strategy.kind": str, "strategy.gamma": _float, "strategy.window": _window,
    "joint.mu": _float, "joint.acs_iterations": int, "joint.capacity": int,
    "joint.activation_frame": int, "joint.lam": _float, "joint.K": int, "joint.eta": _float,
    "psr.threshold": _float, "psr.exclusion_radius": int,
    "features.grid": int, "features.search_factor": _float,
    "features.orientation_bins": _bool, "features.cosine_window": _bool,
    "features.normalize": _bool,
    "tracker.sigma_factor": _float, "tracker.learner": str,
    "svm.patch": int, "svm.negatives": int, "svm.search_radius": _float,
    "svm.search_step": _float, "svm.iterations": int,
}

FORMATS = ("csv", "json")


@dataclass
class RunConfig:
    tracker: TrackerConfig = field(default_factory=TrackerConfig)
    synthetic: Path | None = None
    sequence: Path | None = None
    seed: int = 0
    reps: int = 1
    format: str = "csv"

    def validate(self):
        if (self.synthetic is None) == (self.sequence is None):
            raise ConfigError("source", "exactly one of source.synthetic, source.sequence is required")
        if self.reps < 1:
            raise ConfigError("run.reps", "must be >= 1")
        if self.format not in FORMATS:
            raise ConfigError("run.format", f"must be one of {FORMATS}")
        return self


def parse_pairs(text: str) -> dict:
    """``key -> raw string`` from the flat format; later keys override earlier ones."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", f"expected key = value, got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in KEYS:
            raise ConfigError(key, "unknown key")
        out[key] = value
    return out


def build_run_config(pairs: dict, base_dir=None) -> RunConfig:
    """Typed :class:`RunConfig` from raw pairs; unset keys keep their defaults."""
    vals = {}
    for key, raw in pairs.items():
        if key not in KEYS:
            raise ConfigError(key, "unknown key")
        try:
            vals[key] = KEYS[key](raw)
        except (TypeError, ValueError) as exc:
            raise ConfigError(key, str(exc)) from None

    def section(prefix):
        return {k.split(".", 1)[1]: v for k, v in vals.items() if k.startswith(prefix + ".")}

    base = TrackerConfig()
    try:
        j = section("joint")
        sched = PriorSchedule(j.pop("K", base.joint.schedule.K), j.pop("eta", base.joint.schedule.eta))
        joint = replace(base.joint, schedule=sched, **j)
    except ValueError as exc:
        raise ConfigError(_first(vals, "joint"), str(exc)) from None
    s = section("strategy")
    try:
        decay = DecayConfig(s.get("gamma", base.decay.gamma), s.get("window", base.decay.window))
    except ValueError as exc:
        raise ConfigError(_first(vals, "strategy"), str(exc)) from None
    try:
        psr = replace(base.psr, **section("psr"))
    except ValueError as exc:
        raise ConfigError(_first(vals, "psr"), str(exc)) from None
    try:
        feats = replace(base.features, **section("features"))
    except ValueError as exc:
        raise ConfigError(_first(vals, "features"), str(exc)) from None
    t = section("tracker")
    try:
        tracker = TrackerConfig(joint, s.get("kind", base.strategy), decay, psr, feats,
                                t.get("sigma_factor", base.sigma_factor),
                                t.get("learner", base.learner),
                                replace(base.svm, **section("svm")))
    except ValueError as exc:
        key = "strategy.kind" if "strategy" in str(exc) else _first(vals, "tracker")
        raise ConfigError(key, str(exc)) from None

    base_dir = Path(base_dir) if base_dir is not None else Path(".")
    src = section("source")
    run = section("run")
    cfg = RunConfig(
        tracker,
        base_dir / src["synthetic"] if "synthetic" in src else None,
        base_dir / src["sequence"] if "sequence" in src else None,
        run.get("seed", 0), run.get("reps", 1), run.get("format", "csv"))
    return cfg.validate()


def _first(vals, prefix):
    keys = [k for k in vals if k.startswith(prefix + ".")]
    return keys[0] if keys else prefix


def load_run_config(path, overrides: dict | None = None) -> RunConfig:
    """Parse a config file, apply ``overrides`` (same flat keys), build the run config."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc}") from None
    pairs = parse_pairs(text)
    pairs.update(overrides or {})
    return build_run_config(pairs, path.parent)


def format_run_config(cfg: RunConfig) -> str:
    """Flat text echo that :func:`load_run_config` reads back into an equal config."""
    t = cfg.tracker
    lines = []
    if cfg.synthetic is not None:
        lines.append(f"source.synthetic = {Path(cfg.synthetic).resolve()}")
    if cfg.sequence is not None:
        lines.append(f"source.sequence = {Path(cfg.sequence).resolve()}")
    items = [
        ("run.seed", cfg.seed), ("run.reps", cfg.reps), ("run.format", cfg.format),
        ("strategy.kind", t.strategy), ("strategy.gamma", t.decay.gamma),
        ("strategy.window", t.decay.window),
        ("joint.mu", t.joint.mu), ("joint.acs_iterations", t.joint.acs_iterations),
        ("joint.capacity", t.joint.capacity), ("joint.activation_frame", t.joint.activation_frame),
        ("joint.lam", t.joint.lam), ("joint.K", t.joint.schedule.K),
        ("joint.eta", t.joint.schedule.eta),
        ("psr.threshold", t.psr.threshold), ("psr.exclusion_radius", t.psr.exclusion_radius),
        ("features.grid", t.features.grid), ("features.search_factor", t.features.search_factor),
        ("features.orientation_bins", t.features.orientation_bins),
        ("features.cosine_window", t.features.cosine_window),
        ("features.normalize", t.features.normalize),
        ("tracker.sigma_factor", t.sigma_factor), ("tracker.learner", t.learner),
    ]
    items += [(f"svm.{k}", getattr(t.svm, k)) for k in SvmTrackConfig.__dataclass_fields__]
    for key, v in items:
        lines.append(f"{key} = {v!r}" if isinstance(v, float) else f"{key} = {v}")
    return "\n".join(lines) + "\n"


__all__ = ["ConfigError", "KEYS", "RunConfig", "parse_pairs", "build_run_config",
           "load_run_config", "format_run_config"]
