"""Smooth compactly supported bumps and the odd bump sum built on a fine set.

The basic bump centered at p with radius eps is

    b(q) = exp(1/eps) * exp(1/(d(p, q) - eps))   for d(p, q) < eps,
    b(q) = 0                                      otherwise,

a smooth function with value 1 at the center, values in [0, 1], and all
derivatives vanishing at the support boundary.  The odd bump sum attaches
a negative bump at every point of a fine set and a positive bump at every
antipode, producing a smooth odd function with 2|S| disjoint supports.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .finesets import FineSet
from .geometry import GeodesicSegment, SpherePoint, distance0
from .quadrature import DEFAULT_RULE, QuadratureRule, integrate_along, segment_integrals

# Within this distance of the support boundary the profile is evaluated as
# exactly 0: exp(1/(d - eps)) underflows there and the limit value is 0.
BOUNDARY_GUARD = 1e-12


def _profile(d: np.ndarray, eps: float) -> np.ndarray:
    """Unsigned bump profile as a function of center distance, vectorized."""
    d = np.asarray(d, dtype=float)
    out = np.zeros(d.shape)
    inside = d < eps - BOUNDARY_GUARD
    if np.any(inside):
        di = d[inside]
        out[inside] = np.exp(1.0 / eps + 1.0 / (di - eps))
    return out


@dataclass(frozen=True)
class BumpFunction:
    """A single bump: unit value at ``center``, support in the open eps-ball."""

    center: SpherePoint
    eps: float

    def __post_init__(self):
        if not (0.0 < self.eps < math.pi / 2.0):
            raise ValueError(f"bump radius {self.eps} outside (0, pi/2)")

    # Ball-support protocol used by the quadrature fast path.
    @property
    def support_centers(self) -> np.ndarray:
        return self.center.coords[None, :]

    @property
    def support_signs(self) -> np.ndarray:
        return np.ones(1)

    @property
    def support_radius(self) -> float:
        return self.eps

    @property
    def sup_abs(self) -> float:
        return 1.0

    def radial_profile(self, d) -> np.ndarray:
        return _profile(d, self.eps)

    def __call__(self, q):
        """Evaluate at a point (3,) or batch (n, 3) of unit vectors."""
        pts = np.asarray(q.coords if isinstance(q, SpherePoint) else q, dtype=float)
        single = pts.ndim == 1
        pts = np.atleast_2d(pts)
        d = np.arccos(np.clip(pts @ self.center.coords, -1.0, 1.0))
        vals = self.radial_profile(d)
        return float(vals[0]) if single else vals


@dataclass(frozen=True)
class OddBumpSum:
    """Odd sum of bumps over a fine set: -1 bumps on S, +1 bumps on -S.

    Requires 0 < eps < epsilon(S) so that the 2|S| supports are pairwise
    disjoint, which makes the sum odd with values in [-1, 1] and lets line
    integrals be assembled one support crossing at a time.
    """

    fine_set: FineSet
    eps: float
    _centers: np.ndarray = field(init=False, repr=False)
    _signs: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not (0.0 < self.eps < self.fine_set.epsilon_sigma):
            raise ValueError(
                f"bump radius {self.eps} must lie in (0, epsilon_sigma = "
                f"{self.fine_set.epsilon_sigma})"
            )
        pts = self.fine_set.points_array()
        centers = np.vstack([pts, -pts])
        signs = np.concatenate([-np.ones(len(pts)), np.ones(len(pts))])
        centers.setflags(write=False)
        signs.setflags(write=False)
        object.__setattr__(self, "_centers", centers)
        object.__setattr__(self, "_signs", signs)

    @property
    def support_centers(self) -> np.ndarray:
        return self._centers

    @property
    def support_signs(self) -> np.ndarray:
        return self._signs

    @property
    def support_radius(self) -> float:
        return self.eps

    @property
    def sup_abs(self) -> float:
        return 1.0

    def radial_profile(self, d) -> np.ndarray:
        return _profile(d, self.eps)

    def __call__(self, q):
        """Evaluate at a point (3,) or batch (n, 3); at most one bump is live."""
        pts = np.asarray(q.coords if isinstance(q, SpherePoint) else q, dtype=float)
        single = pts.ndim == 1
        pts = np.atleast_2d(pts)
        d = np.arccos(np.clip(pts @ self._centers.T, -1.0, 1.0))
        vals = self.radial_profile(d) @ self._signs
        return float(vals[0]) if single else vals

    def label(self) -> str:
        """Short content identifier for reports."""
        import hashlib

        h = hashlib.sha256()
        h.update(self.fine_set.points_array().tobytes())
        h.update(repr(self.eps).encode())
        return h.hexdigest()[:12]


def bump_eval(b: BumpFunction, q) -> float:
    """Value of the bump at q (0 outside the open support ball)."""
    return float(b(q))


def f_eval(f: OddBumpSum, q) -> float:
    """Value of the odd bump sum at q."""
    return float(f(q))


def diameter_integral(b: BumpFunction, rule: QuadratureRule | None = None) -> float:
    """∫ of the bump along any diameter chord of its support ball.

    The value depends only on eps: the chord parametrizes center distance
    as |s|, so the integral is 2 * ∫_0^eps profile(s) ds.
    """
    rule = rule or DEFAULT_RULE
    x, w = rule.panel_nodes()
    npan = rule.window_panels
    edges = np.linspace(0.0, b.eps, npan + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    s = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    ws = (half[:, None] * w[None, :]).ravel()
    return 2.0 * float(ws @ b.radial_profile(s))


def chord_integral(b: BumpFunction, chord: GeodesicSegment,
                   rule: QuadratureRule | None = None) -> float:
    """∫ of the bump along the chord's full crossing of the support ball.

    The chord is extended along its great circle to run boundary to
    boundary, as in the comparison argument; the input segment must lie
    inside the closed support ball.
    """
    rule = rule or DEFAULT_RULE
    for endpoint in (SpherePoint(chord.base), chord.end):
        if distance0(endpoint, b.center) > b.eps + 1e-9:
            raise ValueError("chord exits the support ball")
    # Integrate over the full crossing window of the chord's great circle.
    full = GeodesicSegment(chord.start, 2.0 * math.pi)
    return float(
        segment_integrals(
            b,
            full.base[None, :],
            full.direction[None, :],
            np.array([full.length]),
            rule,
        )[0]
    )


def chord_vs_diameter_gap(b: BumpFunction, chord: GeodesicSegment,
                          rule: QuadratureRule | None = None) -> float:
    """Diameter integral minus the (extended) chord integral; >= 0 always,
    and 0 exactly when the chord passes through the center."""
    rule = rule or DEFAULT_RULE
    return diameter_integral(b, rule) - chord_integral(b, chord, rule)
