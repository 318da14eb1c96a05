"""Synthetic 2D targets and CSV ingestion for sample clouds.

Generator parameters are conventions of this package (the classic spiral /
ring-of-modes / grid-of-modes layouts); every one is overridable through
``params``.
"""

from __future__ import annotations

import csv
import io

import numpy as np

from .errors import InvalidArgumentError
from .metrics import EmpiricalDistribution

__all__ = ["generate", "load_csv", "save_csv", "DATASET_NAMES"]

DATASET_NAMES = ("swiss_roll", "gaussians8", "gaussians25", "gaussian_init")

_DEFAULTS = {
    "swiss_roll": {"scale": 2.0, "jitter": 0.05},
    "gaussians8": {"radius": 2.0, "std": 0.05},
    "gaussians25": {"spacing": 1.0, "std": 0.05},
    "gaussian_init": {"init_scale": 1.0, "dim": 2},
}


def _stratified_components(n: int, k: int, rng) -> np.ndarray:
    """Component ids with counts as uniform as possible, shuffled."""
    base = np.repeat(np.arange(k), n // k)
    extra = rng.permutation(k)[: n % k]
    ids = np.concatenate([base, extra])
    rng.shuffle(ids)
    return ids


def generate(name: str, n: int, seed: int = 0, **params) -> EmpiricalDistribution:
    """Draw n samples from a named synthetic target, deterministic per seed."""
    if name not in DATASET_NAMES:
        raise InvalidArgumentError(
            f"unknown dataset {name!r}; choose one of {', '.join(DATASET_NAMES)}"
        )
    if n < 1:
        raise InvalidArgumentError("sample count must be >= 1")
    opts = dict(_DEFAULTS[name])
    unknown = set(params) - set(opts)
    if unknown:
        raise InvalidArgumentError(f"unknown parameters for {name}: {sorted(unknown)}")
    opts.update(params)
    rng = np.random.default_rng(seed)

    if name == "swiss_roll":
        scale, jitter = float(opts["scale"]), float(opts["jitter"])
        if scale <= 0 or jitter < 0:
            raise InvalidArgumentError("swiss_roll needs scale > 0 and jitter >= 0")
        t = rng.uniform(1.5 * np.pi, 4.5 * np.pi, size=n)
        pts = scale * np.stack([t * np.cos(t), t * np.sin(t)], axis=1) / (4.5 * np.pi)
        pts += jitter * rng.standard_normal((n, 2))
        return EmpiricalDistribution(pts)

    if name == "gaussians8":
        radius, std = float(opts["radius"]), float(opts["std"])
        if radius <= 0 or std < 0:
            raise InvalidArgumentError("gaussians8 needs radius > 0 and std >= 0")
        angles = 2.0 * np.pi * np.arange(8) / 8.0
        centers = radius * np.stack([np.cos(angles), np.sin(angles)], axis=1)
        ids = _stratified_components(n, 8, rng)
        pts = centers[ids] + std * rng.standard_normal((n, 2))
        return EmpiricalDistribution(pts)

    if name == "gaussians25":
        spacing, std = float(opts["spacing"]), float(opts["std"])
        if spacing <= 0 or std < 0:
            raise InvalidArgumentError("gaussians25 needs spacing > 0 and std >= 0")
        axis = spacing * (np.arange(5) - 2.0)
        gx, gy = np.meshgrid(axis, axis, indexing="ij")
        centers = np.stack([gx.ravel(), gy.ravel()], axis=1)
        ids = _stratified_components(n, 25, rng)
        pts = centers[ids] + std * rng.standard_normal((n, 2))
        return EmpiricalDistribution(pts)

    init_scale, dim = float(opts["init_scale"]), int(opts["dim"])
    if init_scale <= 0 or dim < 1:
        raise InvalidArgumentError("gaussian_init needs init_scale > 0 and dim >= 1")
    return EmpiricalDistribution(init_scale * rng.standard_normal((n, dim)))


def _looks_like_header(cells) -> bool:
    for cell in cells:
        try:
            float(cell)
        except ValueError:
            return True
    return False


def load_csv(path) -> EmpiricalDistribution:
    """Read a sample cloud: one row per sample, columns are coordinates.

    A single leading header row is detected (any non-numeric cell) and
    skipped; weights are uniform.
    """
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        width = None
        for lineno, cells in enumerate(reader, start=1):
            cells = [c.strip() for c in cells if c.strip() != ""] if cells else []
            if not cells:
                continue
            if lineno == 1 and _looks_like_header(cells):
                continue
            if width is None:
                width = len(cells)
            elif len(cells) != width:
                raise InvalidArgumentError(
                    f"{path}: line {lineno} has {len(cells)} columns, expected {width}"
                )
            try:
                rows.append([float(c) for c in cells])
            except ValueError as exc:
                raise InvalidArgumentError(f"{path}: line {lineno}: {exc}") from exc
    if not rows:
        raise InvalidArgumentError(f"{path}: no samples found")
    return EmpiricalDistribution(np.asarray(rows))


def save_csv(path, dist_or_samples) -> None:
    """Write samples as comma-separated decimals with 17 significant digits."""
    samples = getattr(dist_or_samples, "samples", dist_or_samples)
    samples = np.atleast_2d(np.asarray(samples, dtype=np.float64))
    buf = io.StringIO()
    for row in samples:
        buf.write(",".join(f"{v:.17g}" for v in row))
        buf.write("\n")
    with open(path, "w", newline="") as fh:
        fh.write(buf.getvalue())
