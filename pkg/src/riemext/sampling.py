"""Reproducible sample points.

Uniform variates come from numpy's PCG64 bit generator (PCG-XSL-RR 128/64)
seeded with the scenario seed; only ``Generator.random`` is used, whose
output is fixed by the bit stream, so samples agree across platforms.
Candidates failing a constraint are redrawn, at most ``MAX_REJECTIONS`` times
per accepted point.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .lifts import CotangentPoint

__all__ = ["MAX_REJECTIONS", "SamplingError", "make_rng", "uniform_box", "sample_points"]

MAX_REJECTIONS = 1000


class SamplingError(RuntimeError):
    """Too many consecutive rejections."""


def make_rng(seed: int) -> np.random.Generator:
    if not 0 <= int(seed) < 2**64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed!r}")
    return np.random.Generator(np.random.PCG64(int(seed)))


def uniform_box(rng: np.random.Generator, box: Sequence[Sequence[float]]) -> np.ndarray:
    box = np.asarray(box, dtype=float)
    u = rng.random(box.shape[0])
    return box[:, 0] + (box[:, 1] - box[:, 0]) * u


def sample_points(
    rng: np.random.Generator,
    count: int,
    x_box,
    omega_box,
    make: Callable[[np.ndarray, np.ndarray], CotangentPoint] | None = None,
    accept: Callable[[CotangentPoint], object] | None = None,
) -> tuple[list[CotangentPoint], int]:
    """Draw ``count`` accepted points; returns them with the number of rejections.

    ``make`` turns raw ``(x, omega)`` into a point (it may raise ``ValueError``
    to reject), ``accept`` evaluates whatever must be finite and nonsingular at
    the point (raising to reject).
    """
    pts = []
    rejected = 0
    for _ in range(count):
        for attempt in range(MAX_REJECTIONS + 1):
            x = uniform_box(rng, x_box)
            w = uniform_box(rng, omega_box)
            try:
                p = make(x, w) if make else CotangentPoint(x, w)
                if accept is not None:
                    accept(p)
            # expression domain errors and singular metrics are ValueErrors too
            except (ValueError, ZeroDivisionError):
                rejected += 1
                continue
            pts.append(p)
            break
        else:
            raise SamplingError(f"no acceptable point after {MAX_REJECTIONS} rejections")
    return pts, rejected
