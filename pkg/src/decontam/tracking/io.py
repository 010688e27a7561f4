"""OTB-style sequence directories: ``img/`` numbered images + ``groundtruth_rect.txt``."""

from __future__ import annotations

import re
from pathlib import Path

import numpy as np
from PIL import Image

from .types import Rect, Sequence, SequenceError

IMAGE_SUFFIXES = {".png", ".jpg", ".jpeg", ".bmp", ".tif", ".tiff", ".pgm"}
GROUND_TRUTH = "groundtruth_rect.txt"
LABELS = "corruption_labels.txt"


class IngestionError(SequenceError):
    pass


def parse_rect_line(line: str, lineno: int = 0) -> Rect:
    fields = [f for f in re.split(r"[,\s]+", line.strip()) if f]
    try:
        if len(fields) != 4:
            raise ValueError(f"expected 4 fields, got {len(fields)}")
        return Rect(*(float(f) for f in fields))
    except ValueError as exc:
        raise IngestionError(f"{GROUND_TRUTH} line {lineno}: {exc}") from None


def _numbered_images(img_dir: Path):
    files = [p for p in img_dir.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES]

    def key(p):
        m = re.search(r"(\d+)", p.stem)
        return (int(m.group(1)) if m else -1, p.name)

    return sorted(files, key=key)


def read_frame(path) -> np.ndarray:
    try:
        with Image.open(path) as im:
            gray = np.asarray(im.convert("L"), dtype=float)
    except (OSError, ValueError) as exc:
        raise IngestionError(f"unreadable image {path}: {exc}") from None
    return gray / 255.0


def load_sequence(directory, with_labels: bool = False) -> Sequence:
    """Load frames (grayscale in [0, 1]) and ground-truth rects.

    Rect lines may be separated by commas, tabs or spaces. Corruption labels
    are left out unless ``with_labels`` is set and a sidecar file exists.
    """
    root = Path(directory)
    img_dir = root / "img"
    if not img_dir.is_dir():
        raise IngestionError(f"no img/ directory under {root}")
    gt_path = root / GROUND_TRUTH
    if not gt_path.is_file():
        raise IngestionError(f"missing {gt_path}")
    lines = [(n, l) for n, l in enumerate(gt_path.read_text().splitlines(), 1) if l.strip()]
    rects = [parse_rect_line(l, n) for n, l in lines]
    images = _numbered_images(img_dir)
    if len(images) != len(rects):
        raise IngestionError(
            f"{len(images)} images but {len(rects)} ground-truth rects in {root}")
    frames = [read_frame(p) for p in images]
    labels = None
    if with_labels and (root / LABELS).is_file():
        labels = [l.strip() == "1" for l in (root / LABELS).read_text().splitlines() if l.strip()]
    return Sequence(frames, rects, labels, name=root.name)


def _fmt(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else repr(float(v))


def write_sequence(seq: Sequence, directory) -> Path:
    """Write ``seq`` in the loader's layout (8-bit PNG frames, labels sidecar)."""
    root = Path(directory)
    img_dir = root / "img"
    img_dir.mkdir(parents=True, exist_ok=True)
    width = max(4, len(str(len(seq))))
    for i, frame in enumerate(seq.frames, 1):
        data = np.rint(np.clip(frame, 0.0, 1.0) * 255.0).astype(np.uint8)
        Image.fromarray(data).save(img_dir / f"{i:0{width}d}.png")
    with open(root / GROUND_TRUTH, "w") as fh:
        for r in seq.ground_truth:
            fh.write(",".join(_fmt(v) for v in r.as_tuple()) + "\n")
    if seq.corruption_labels is not None:
        with open(root / LABELS, "w") as fh:
            fh.writelines(f"{int(bool(b))}\n" for b in seq.corruption_labels)
    return root
