"""Synthetic sequences with scripted corruption, plus the script text format.

Script format (one ``key = value`` per line, ``#`` comments)::

    length = 100
    target_size = 24
    occlusion = 30:39:1.0:background     # start:end:fraction:mode, repeatable
    jitter_std = 0.5
    drift_rate = 0.002
    noise_std = 0.01

Optional keys: ``frame_size = HxW``, ``jitter_threshold``, ``speed``.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np
from scipy.ndimage import gaussian_filter

from .types import CorruptionScript, OcclusionEvent, Rect, Sequence, SequenceError


class ScriptError(ValueError):
    def __init__(self, key, message):
        super().__init__(f"{key}: {message}")
        self.key = key


_SCALAR_KEYS = {
    "length": int, "target_size": int, "jitter_std": float, "jitter_threshold": float,
    "drift_rate": float, "noise_std": float, "speed": float,
}


def parse_occlusion(text: str) -> OcclusionEvent:
    parts = [p.strip() for p in text.split(":")]
    if len(parts) not in (3, 4):
        raise ValueError(f"expected start:end:fraction[:mode], got {text!r}")
    mode = parts[3] if len(parts) == 4 else "background"
    return OcclusionEvent(int(parts[0]), int(parts[1]), float(parts[2]), mode)


def parse_script(text: str) -> CorruptionScript:
    """Parse the key-value script format; errors name the offending key."""
    kwargs = {}
    occlusions = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ScriptError(f"line {lineno}", f"expected key = value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        try:
            if key == "occlusion":
                occlusions.append(parse_occlusion(value))
            elif key == "frame_size":
                h, w = value.lower().split("x")
                kwargs[key] = (int(h), int(w))
            elif key in _SCALAR_KEYS:
                kwargs[key] = _SCALAR_KEYS[key](value)
            else:
                raise ScriptError(key, "unknown key")
        except ScriptError:
            raise
        except ValueError as exc:
            raise ScriptError(key, str(exc)) from None
    try:
        return CorruptionScript(occlusions=tuple(occlusions), **kwargs)
    except (SequenceError, ValueError) as exc:
        raise ScriptError("script", str(exc)) from None


def load_script(path) -> CorruptionScript:
    return parse_script(Path(path).read_text())


def format_script(script: CorruptionScript) -> str:
    lines = [f"length = {script.length}", f"target_size = {script.target_size}",
             f"frame_size = {script.frame_size[0]}x{script.frame_size[1]}"]
    for ev in script.occlusions:
        lines.append(f"occlusion = {ev.start}:{ev.end}:{ev.fraction!r}:{ev.mode}")
    for key in ("jitter_std", "jitter_threshold", "drift_rate", "noise_std", "speed"):
        lines.append(f"{key} = {getattr(script, key)!r}")
    return "\n".join(lines) + "\n"


def _texture(rng, shape, smooth, lo, hi):
    t = gaussian_filter(rng.random(shape), smooth, mode="wrap")
    t = (t - t.min()) / max(t.max() - t.min(), 1e-12)
    return lo + (hi - lo) * t


def _trajectory(rng, script):
    """Integer top-left positions (0-based) of a target bouncing inside the frame."""
    H, W = script.frame_size
    s = script.target_size
    margin = s // 2
    lo = np.array([margin, margin], dtype=float)
    hi = np.array([H - s - margin, W - s - margin], dtype=float)
    pos = (lo + hi) / 2.0
    heading = rng.uniform(0, 2 * math.pi)
    out = []
    for _ in range(script.length):
        out.append(pos.copy())
        heading += rng.normal(0.0, 0.15)
        vel = script.speed * np.array([math.sin(heading), math.cos(heading)])
        nxt = pos + vel
        for ax in range(2):
            if nxt[ax] < lo[ax] or nxt[ax] > hi[ax]:
                vel[ax] = -vel[ax]
                heading = math.atan2(vel[0], vel[1])
        pos = np.clip(pos + vel, lo, hi)
    return np.rint(np.array(out)).astype(int)


def generate_sequence(script: CorruptionScript, seed: int = 0) -> Sequence:
    """Render a textured target moving over a textured background.

    Deterministic for a fixed ``seed``. Frames are quantized to 8-bit levels so
    they survive a PNG round trip unchanged.
    """
    rng = np.random.default_rng(seed)
    H, W = script.frame_size
    s = script.target_size
    background = _texture(rng, (H, W), 3.0, 0.25, 0.75)
    tex_a = _texture(rng, (s, s), 1.5, 0.0, 1.0)
    tex_b = _texture(rng, (s, s), 1.5, 0.0, 1.0)
    occluder = _texture(rng, (s, s), 2.0, 0.1, 0.9)
    path = _trajectory(rng, script)

    occlusion_at = {}
    for ev in script.occlusions:
        for k in range(ev.start, ev.end + 1):
            occlusion_at[k] = ev

    frames, truth, labels = [], [], []
    for k in range(1, script.length + 1):
        r, c = path[k - 1]
        if script.jitter_std > 0:
            off = np.rint(rng.normal(0.0, script.jitter_std, 2)).astype(int)
        else:
            off = np.zeros(2, dtype=int)
        r = int(np.clip(r + off[0], 0, H - s))
        c = int(np.clip(c + off[1], 0, W - s))
        mix = min(1.0, script.drift_rate * (k - 1))
        patch = (1.0 - mix) * tex_a + mix * tex_b
        ev = occlusion_at.get(k)
        corrupted = bool(np.hypot(*off) > script.jitter_threshold)
        if ev is not None and ev.fraction > 0:
            cols = int(math.ceil(ev.fraction * s))
            patch = patch.copy()
            if ev.mode == "background":
                patch[:, :cols] = background[r:r + s, c:c + cols]
            elif ev.mode == "noise":
                patch[:, :cols] = rng.random((s, cols))
            elif ev.mode == "constant":
                patch[:, :cols] = 0.5
            else:
                patch[:, :cols] = occluder[:, :cols]
            corrupted = True
        frame = background.copy()
        frame[r:r + s, c:c + s] = patch
        if script.noise_std > 0:
            frame = frame + rng.normal(0.0, script.noise_std, frame.shape)
        frame = np.rint(np.clip(frame, 0.0, 1.0) * 255.0) / 255.0
        frames.append(frame)
        truth.append(Rect(c + 1, r + 1, s, s))
        labels.append(corrupted)
    return Sequence(frames, truth, labels, name=f"synthetic-{seed}")
