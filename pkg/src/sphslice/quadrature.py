"""Quadrature rules: Gauss-Legendre segments, product rules on spheres, truncated flats.

Radial integrals over half-lines are handled by composite Gauss-Legendre on
dyadically widening panels.  That keeps nodes dense near the origin (where
integrands vary on scale one) while reaching very large truncation radii with
a node count that grows only logarithmically in the cutoff, which matters for
slowly decaying integrands pulled back from the sphere.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import roots_gegenbauer

__all__ = [
    "QuadratureSpec",
    "gauss_legendre",
    "composite_gauss",
    "sphere_rule",
    "flat_rule",
]


@dataclass(frozen=True)
class QuadratureSpec:
    """Discretization knobs shared by every operator in the package.

    sphere_order        nodes per angular dimension in product sphere rules
    radial_order        Gauss-Legendre order per radial panel
    radial_cutoff       truncation radius for integrals over flats
    hs_epsilon          largest inner cutoff of the hypersingular integral
    hs_outer            outer truncation radius of the hypersingular integral
    orientation_samples flats per point in dual-transform averages
    seed                seeds orientation sampling and random plane draws
    """

    sphere_order: int = 64
    radial_order: int = 128
    radial_cutoff: float = 40.0
    hs_epsilon: float = 0.05
    hs_outer: float = 30.0
    orientation_samples: int = 256
    seed: int = 0

    def __post_init__(self):
        if min(self.sphere_order, self.radial_order, self.orientation_samples) < 1:
            raise ValueError("orders and sample counts must be positive")
        if self.radial_cutoff < 1.0:
            raise ValueError("radial_cutoff must be at least 1")
        if not 0.0 < self.hs_epsilon < self.hs_outer:
            raise ValueError("need 0 < hs_epsilon < hs_outer")


@lru_cache(maxsize=None)
def _leggauss(order: int):
    # Cached reference rule on [-1, 1]; callers rescale, never mutate.
    x, w = leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre(order: int, a: float, b: float):
    """Gauss-Legendre nodes and weights on [a, b], exact through degree 2*order - 1."""
    if order < 1:
        raise ValueError("order must be >= 1")
    if not a < b:
        raise ValueError(f"empty interval [{a}, {b}]")
    x, w = _leggauss(int(order))
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    return mid + half * x, half * w


def panel_edges(lo: float, hi: float) -> np.ndarray:
    """Dyadic panel boundaries covering [lo, hi].

    From lo = 0 the first panel ends at min(1, hi); afterwards each panel is
    twice as wide as its predecessor, the last one clipped at hi.
    """
    if not hi > lo or lo < 0.0:
        raise ValueError(f"bad radial range [{lo}, {hi}]")
    edges = [lo]
    cur = 1.0 if lo == 0.0 else 2.0 * lo
    while cur < hi * (1.0 - 1e-12):
        edges.append(cur)
        cur *= 2.0
    edges.append(hi)
    return np.asarray(edges)


def composite_gauss(lo: float, hi: float, order: int):
    """Composite Gauss-Legendre on dyadic panels spanning [lo, hi]."""
    edges = panel_edges(lo, hi)
    nodes, weights = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        x, w = gauss_legendre(order, a, b)
        nodes.append(x)
        weights.append(w)
    return np.concatenate(nodes), np.concatenate(weights)


def _resolve_order(spec_or_order, attr: str) -> int:
    if isinstance(spec_or_order, QuadratureSpec):
        return getattr(spec_or_order, attr)
    return int(spec_or_order)


def sphere_rule(d: int, spec_or_order):
    """Quadrature on the unit sphere of dimension d (surface in R^{d+1}).

    Returns (nodes, weights) with nodes of shape (m, d+1) and positive weights
    summing to the sphere area.  d = 0 is the two-point set {+1, -1}; d = 1 is
    the uniform circle rule; d >= 2 is a product of a Gauss-Gegenbauer rule in
    the polar cosine with a recursive rule on the equatorial sphere.  Exact for
    spherical polynomials of degree up to the requested order.
    """
    if d < 0:
        raise ValueError("sphere dimension must be >= 0")
    order = _resolve_order(spec_or_order, "sphere_order")
    if order < 1:
        raise ValueError("order must be >= 1")
    if d == 0:
        nodes = np.array([[1.0], [-1.0]])
        return nodes, np.array([1.0, 1.0])
    if d == 1:
        m = order if order % 2 == 0 else order + 1  # even count keeps the rule antipodal
        ang = 2.0 * np.pi * (np.arange(m) + 0.5) / m
        nodes = np.column_stack([np.cos(ang), np.sin(ang)])
        return nodes, np.full(m, 2.0 * np.pi / m)
    # Polar weight (1 - z^2)^{(d-2)/2} corresponds to Gegenbauer alpha = (d-1)/2.
    z, wz = roots_gegenbauer(order, 0.5 * (d - 1))
    sub_nodes, sub_w = sphere_rule(d - 1, order)
    sin_pol = np.sqrt(np.clip(1.0 - z**2, 0.0, None))
    nodes = np.concatenate(
        [
            (sin_pol[:, None, None] * sub_nodes[None, :, :]).reshape(-1, d),
            np.repeat(z, len(sub_nodes))[:, None],
        ],
        axis=1,
    )
    weights = (wz[:, None] * sub_w[None, :]).ravel()
    return nodes, weights


def flat_rule(zeta, spec: QuadratureSpec):
    """Nodes and weights on an affine flat, truncated at radius radial_cutoff.

    The rule is polar in the flat's intrinsic coordinates about its closest
    point to the origin: composite dyadic Gauss-Legendre radially, a sphere
    rule in the angular factor.  Weights are positive and sum to the volume of
    the truncated ball of dimension d = zeta.dim.

    Tail error is the caller's responsibility: for an integrand decaying like
    r^{-lam} the neglected mass scales like radial_cutoff^{d - lam}.
    """
    basis = np.asarray(zeta.basis, dtype=float)
    offset = np.asarray(zeta.offset, dtype=float)
    d = basis.shape[0]
    if d < 1:
        raise ValueError("flat must have dimension >= 1")
    rho, w_rho = composite_gauss(0.0, spec.radial_cutoff, spec.radial_order)
    dirs, w_dir = sphere_rule(d - 1, spec.sphere_order)
    # y = rho * omega in intrinsic coordinates, mapped through the basis rows.
    intrinsic = rho[:, None, None] * dirs[None, :, :]
    nodes = offset[None, :] + intrinsic.reshape(-1, d) @ basis
    weights = (w_rho * rho ** (d - 1))[:, None] * w_dir[None, :]
    return nodes, weights.ravel()
