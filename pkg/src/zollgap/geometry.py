"""Round-sphere geometry: points, tangents, geodesic arcs, and midpoint families.

Everything here lives on the unit 2-sphere with the standard metric of
constant curvature 1 (diameter pi, great circles of length 2*pi).  Points
are unit 3-vectors; angles and arclengths are in radians.  All values are
immutable after construction and all functions are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

UNIT_TOL = 1e-12
# Band inside which a pair of points is treated as exactly antipodal.
ANTIPODAL_TOL = 1e-9


def _as_vec3(v) -> np.ndarray:
    a = np.asarray(v, dtype=float)
    if a.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {a.shape}")
    return a


def normalize(v) -> np.ndarray:
    """Return v / |v| as a fresh array; error on (near-)zero input."""
    a = _as_vec3(v)
    n = float(np.linalg.norm(a))
    if n < 1e-15:
        raise ValueError("cannot normalize a zero 3-vector")
    return a / n


@dataclass(frozen=True)
class SpherePoint:
    """A point of the unit sphere, stored as a renormalized unit 3-vector."""

    coords: np.ndarray

    def __init__(self, coords):
        c = normalize(coords)
        if abs(np.linalg.norm(c) - 1.0) > UNIT_TOL:
            raise ValueError("failed to renormalize point to the unit sphere")
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)

    def __repr__(self):
        x, y, z = self.coords
        return f"SpherePoint([{x:.6f}, {y:.6f}, {z:.6f}])"


@dataclass(frozen=True)
class UnitTangent:
    """A unit tangent vector: base point plus orthogonal unit direction."""

    base: SpherePoint
    dir: np.ndarray

    def __init__(self, base, dir):
        if not isinstance(base, SpherePoint):
            base = SpherePoint(base)
        d = normalize(dir)
        # Project out any component along the base point, then re-check.
        d = d - float(d @ base.coords) * base.coords
        n = float(np.linalg.norm(d))
        if n < 1e-9:
            raise ValueError("tangent direction is (numerically) radial")
        d = d / n
        if abs(float(d @ base.coords)) > UNIT_TOL:
            raise ValueError("tangent direction not orthogonal to base point")
        d.setflags(write=False)
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "dir", d)


@dataclass(frozen=True)
class GeodesicSegment:
    """A unit-speed geodesic arc: point(s) = cos(s) * base + sin(s) * dir.

    Length is in (0, 2*pi]; a full great circle is length 2*pi, a great
    half-circle is length pi.
    """

    start: UnitTangent
    length: float

    def __post_init__(self):
        if not (0.0 < self.length <= 2.0 * math.pi + 1e-12):
            raise ValueError(f"segment length {self.length} outside (0, 2*pi]")

    @property
    def base(self) -> np.ndarray:
        return self.start.base.coords

    @property
    def direction(self) -> np.ndarray:
        return self.start.dir

    @property
    def end(self) -> SpherePoint:
        return geodesic_point(self, self.length)

    def reversed(self) -> "GeodesicSegment":
        """The same arc traversed backwards."""
        L = self.length
        b = math.cos(L) * self.base + math.sin(L) * self.direction
        d = -(-math.sin(L) * self.base + math.cos(L) * self.direction)
        return GeodesicSegment(UnitTangent(SpherePoint(b), d), L)


def antipode(p: SpherePoint) -> SpherePoint:
    """The antipodal point -p."""
    return SpherePoint(-p.coords)


def distance0(p, q) -> float:
    """Round distance arccos(<p, q>) in [0, pi], clamped against drift."""
    a = p.coords if isinstance(p, SpherePoint) else _as_vec3(p)
    b = q.coords if isinstance(q, SpherePoint) else _as_vec3(q)
    return float(math.acos(min(1.0, max(-1.0, float(a @ b)))))


def geodesic_point(seg: GeodesicSegment, s) -> SpherePoint | np.ndarray:
    """Point at arclength s along the segment.

    Scalar s returns a SpherePoint; an array of arclengths returns an
    (n, 3) array of unit vectors.  s must lie in [0, length] up to a tiny
    tolerance.
    """
    s_arr = np.asarray(s, dtype=float)
    if np.any(s_arr < -1e-12) or np.any(s_arr > seg.length + 1e-12):
        raise ValueError(f"arclength out of range [0, {seg.length}]")
    pts = (
        np.cos(s_arr)[..., None] * seg.base
        + np.sin(s_arr)[..., None] * seg.direction
    )
    if s_arr.ndim == 0:
        return SpherePoint(pts)
    return pts / np.linalg.norm(pts, axis=-1, keepdims=True)


def half_circle(v: UnitTangent) -> GeodesicSegment:
    """The great half-circle issuing from v; its endpoints are antipodal."""
    return GeodesicSegment(v, math.pi)


def tangent_frame(p: SpherePoint) -> tuple[np.ndarray, np.ndarray]:
    """A deterministic orthonormal frame (e1, e2) of the tangent plane at p.

    e1 is built from the coordinate axis least aligned with p, so the frame
    is reproducible and well conditioned everywhere.
    """
    c = p.coords
    k = int(np.argmin(np.abs(c)))
    axis = np.zeros(3)
    axis[k] = 1.0
    e1 = normalize(axis - float(axis @ c) * c)
    e2 = np.cross(c, e1)
    return e1, e2


def direction_at(p: SpherePoint, theta: float) -> np.ndarray:
    """Unit tangent direction at angle theta in the deterministic frame."""
    e1, e2 = tangent_frame(p)
    return math.cos(theta) * e1 + math.sin(theta) * e2


def minimizing_segment(p: SpherePoint, q: SpherePoint) -> GeodesicSegment:
    """The minimizing geodesic from p to q; requires 0 < d0(p, q) < pi."""
    d = distance0(p, q)
    if d < 1e-12:
        raise ValueError("p and q coincide; no unique segment")
    if d > math.pi - ANTIPODAL_TOL:
        raise ValueError("p and q are antipodal; minimizing segment not unique")
    t = normalize(q.coords - math.cos(d) * p.coords)
    return GeodesicSegment(UnitTangent(p, t), d)


# ---------------------------------------------------------------------------
# Midpoint families: two-leg equal-length paths joining a fixed pair p, q,
# parametrized by the midpoint on the great circle equidistant from p and q.
# For antipodal p, q the family degenerates to the circle of great
# half-circles from p to q.
# ---------------------------------------------------------------------------

GENERIC = "generic"
ANTIPODAL = "antipodal"


@dataclass(frozen=True)
class MidpointFamily:
    """The family of equal-leg piecewise-geodesic paths from p to q.

    The member at parameter theta has midpoint
        m(theta) = cos(theta) * u + sin(theta) * w
    on the equidistant great circle of (p, q), and consists of the two
    minimizing legs p -> m and m -> q, each of round length d0(p, m).

    kind == GENERIC   : d0(p, q) < pi; theta = 0 is the midpoint of the
                        minimizing geodesic, so the member at theta = 0
                        degenerates onto it.
    kind == ANTIPODAL : q = -p up to tolerance; every member is a great
                        half-circle.  theta = 0 points along `ref_dir`
                        (the reference tangent at p), so the short
                        subfamily is centered on it.
    """

    p: SpherePoint
    q: SpherePoint
    kind: str
    u: np.ndarray = field(repr=False)
    w: np.ndarray = field(repr=False)

    def midpoint(self, theta) -> np.ndarray:
        """Midpoint(s) m(theta); vectorized over theta."""
        th = np.asarray(theta, dtype=float)
        return np.cos(th)[..., None] * self.u + np.sin(th)[..., None] * self.w

    def leg_length(self, theta) -> np.ndarray:
        """Common round length of the two legs of the member at theta."""
        th = np.asarray(theta, dtype=float)
        m = self.midpoint(th)
        dots = np.clip(m @ self.p.coords, -1.0, 1.0)
        return np.arccos(dots)

    def member_length(self, theta) -> np.ndarray:
        """Total round length of the member at theta (two equal legs)."""
        return 2.0 * self.leg_length(theta)

    def member(self, theta: float) -> tuple[GeodesicSegment, GeodesicSegment]:
        """The two legs (p -> m, m -> q) of the member at theta."""
        m = SpherePoint(self.midpoint(float(theta)))
        leg1 = minimizing_segment(self.p, m)
        leg2 = minimizing_segment(m, self.q)
        return leg1, leg2


def midpoint_family(p: SpherePoint, q: SpherePoint, ref_dir=None) -> MidpointFamily:
    """Build the midpoint family joining p and q.

    For the antipodal kind (d0(p, q) within 1e-9 of pi) `ref_dir` fixes the
    tangent direction at p that gets parameter theta = 0; without it a
    deterministic frame direction is used.  For the generic kind theta = 0
    is always the minimizing-geodesic midpoint and ref_dir is ignored.
    """
    d = distance0(p, q)
    if d < 1e-12:
        raise ValueError("midpoint family is degenerate for p = q")
    if d > math.pi - ANTIPODAL_TOL:
        # Equidistant circle is the equator orthogonal to p.
        if ref_dir is not None:
            u = normalize(ref_dir)
            u = normalize(u - float(u @ p.coords) * p.coords)
        else:
            u = tangent_frame(p)[0]
        w = np.cross(p.coords, u)
        return MidpointFamily(p=p, q=antipode(p), kind=ANTIPODAL, u=u, w=w)
    # Pole of the equidistant circle is along p - q; theta = 0 at the
    # minimizing midpoint (p + q)/|p + q|.
    u = normalize(p.coords + q.coords)
    pole = normalize(p.coords - q.coords)
    w = np.cross(pole, u)
    return MidpointFamily(p=p, q=q, kind=GENERIC, u=u, w=w)


def family_for_segment(seg: GeodesicSegment) -> MidpointFamily:
    """Midpoint family joining the endpoints of seg.

    For a half-circle the family is referenced to seg itself: theta = 0 is
    the member tangent to seg (its midpoint is seg's own midpoint).
    """
    p = seg.start.base
    q = seg.end
    if seg.length > math.pi - ANTIPODAL_TOL:
        if seg.length > math.pi + 1e-12:
            raise ValueError("midpoint families require segment length <= pi")
        return midpoint_family(p, q, ref_dir=seg.direction)
    return midpoint_family(p, q)


def short_subfamily(fam: MidpointFamily) -> list[tuple[float, float]]:
    """Parameter intervals of members with round length <= pi.

    In the canonical parametrization used here the answer is the closed
    interval [-pi/2, pi/2] for both kinds:

    * generic: cos(leg length) = cos(theta) * cos(d0(p, q)/2), so the
      member length is <= pi exactly when cos(theta) >= 0;
    * antipodal: every member has length pi, and the short subfamily is
      the set of half-circles making an acute or right angle with the
      reference direction, i.e. |theta| <= pi/2.

    Returned as a list of closed intervals for forward compatibility with
    parameter sets that are not a single arc.
    """
    return [(-math.pi / 2.0, math.pi / 2.0)]


def subfamily_midpoints(fam: MidpointFamily, n: int) -> np.ndarray:
    """n midpoints sampled over the short subfamily, endpoints included."""
    (lo, hi), = short_subfamily(fam)
    thetas = np.linspace(lo, hi, n)
    return fam.midpoint(thetas)


def hausdorff_d0(a: np.ndarray, b: np.ndarray) -> float:
    """Hausdorff distance between two point sets under the round metric."""
    dots = np.clip(a @ b.T, -1.0, 1.0)
    d = np.arccos(dots)
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def fibonacci_sphere(n: int) -> np.ndarray:
    """Deterministic golden-angle lattice of n near-evenly spread points."""
    if n < 1:
        raise ValueError("need n >= 1")
    k = np.arange(n)
    z = 1.0 - (2.0 * k + 1.0) / n
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    golden = math.pi * (3.0 - math.sqrt(5.0))
    phi = golden * k
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)
