"""Seeded sampling of evaluation points inside a metric's domain."""

from __future__ import annotations

import numpy as np

from .errors import SamplingExhausted

MAX_TRIES_PER_POINT = 1000


def sample_points(spec, n: int, seed: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """``n`` points: x uniform in the sampling ball, y with 0.5 <= |y| <= 2.

    Directions of y are uniform on the sphere; points with
    ``<w, y> <= y_margin`` are rejected when the domain has a half-space
    constraint ``w``.
    """
    dim = spec.dimension
    dom = spec.domain
    rng = np.random.default_rng(seed)
    radius = dom.sampling_radius
    out = []
    tries = 0
    while len(out) < n:
        tries += 1
        if tries > MAX_TRIES_PER_POINT * max(n, 1):
            raise SamplingExhausted(f"found only {len(out)} of {n} points for {spec.name}")
        d = rng.standard_normal(dim)
        x = d / np.linalg.norm(d) * radius * rng.uniform() ** (1.0 / dim)
        u = rng.standard_normal(dim)
        y = u / np.linalg.norm(u) * rng.uniform(0.5, 2.0)
        if dom.y_halfspace is not None and np.dot(dom.y_halfspace, y) <= dom.y_margin:
            continue
        if not dom.contains(x, y):
            continue
        out.append((x, y))
    return out
