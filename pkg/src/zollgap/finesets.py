"""Fine point sets on the sphere: construction and certified margin checks.

A point set S is *fine* when (1) no triple is collinear on a great circle,
(2) no triple of great circles through pairs of S meets at a point outside
S and its antipodes, and (3) every open hemisphere contains at least three
points of S.  Each check returns a quantitative margin in radians rather
than a boolean, because downstream direction-set searches need slack, not
just validity.  The canonical construction perturbs each vertex of the
regular tetrahedron into a triple of nearby points.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import FinenessError

# Two points closer than this (or closer than this to being antipodal) are
# treated as coincident / antipodal, which voids condition (1).
POINT_TOL = 1e-9

TETRAHEDRON = np.array(
    [[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]]
) / math.sqrt(3.0)


def generate_perturbed_tetrahedron(seed: int, spread: float) -> np.ndarray:
    """12 candidate points: each tetrahedron vertex replaced by 3 nearby ones.

    Each replacement point is sampled uniformly in the closed geodesic cap
    of radius ``spread`` around its vertex.  Deterministic for a fixed seed.
    Fineness of the result is generic but not guaranteed; run the checks.
    """
    if not (0.0 <= spread < 0.3):
        raise ValueError(f"spread {spread} outside [0, 0.3)")
    rng = np.random.default_rng(seed)
    out = []
    for v in TETRAHEDRON:
        # Orthonormal frame at v for placing the cap samples.
        k = int(np.argmin(np.abs(v)))
        axis = np.zeros(3)
        axis[k] = 1.0
        e1 = axis - (axis @ v) * v
        e1 /= np.linalg.norm(e1)
        e2 = np.cross(v, e1)
        for _ in range(3):
            z = 1.0 - rng.random() * (1.0 - math.cos(spread))
            phi = rng.random() * 2.0 * math.pi
            r = math.sqrt(max(0.0, 1.0 - z * z))
            p = z * v + r * (math.cos(phi) * e1 + math.sin(phi) * e2)
            out.append(p / np.linalg.norm(p))
    return np.array(out)


def _pair_poles(points: np.ndarray) -> tuple[np.ndarray, list[tuple[int, int]]]:
    """Unit poles of the great circles through each unordered pair."""
    pairs = list(combinations(range(len(points)), 2))
    poles = np.array([np.cross(points[i], points[j]) for i, j in pairs])
    norms = np.linalg.norm(poles, axis=1)
    if np.any(norms < 1e-15):
        raise FinenessError("collinearity", "coincident or antipodal pair")
    return poles / norms[:, None], pairs


def check_collinearity(points: np.ndarray) -> float:
    """Margin of condition (1): min distance of any point to the great
    circle through any other two.  Raises on duplicate or antipodal pairs,
    which void the condition by convention."""
    points = np.asarray(points, dtype=float)
    n = len(points)
    if n < 3:
        raise ValueError("need at least 3 points")
    # Chordal test: an angular tolerance this small is invisible to arccos
    # of dot products, but not to vector differences.
    diff = np.linalg.norm(points[:, None, :] - points[None, :, :], axis=2)
    anti = np.linalg.norm(points[:, None, :] + points[None, :, :], axis=2)
    np.fill_diagonal(diff, np.inf)
    if diff.min() < POINT_TOL or anti.min() < POINT_TOL:
        raise FinenessError("collinearity", "duplicate or antipodal pair present")
    poles, pairs = _pair_poles(points)
    dist = np.abs(np.arcsin(np.clip(points @ poles.T, -1.0, 1.0)))  # (n, n_pairs)
    mask = np.ones_like(dist, dtype=bool)
    for col, (i, j) in enumerate(pairs):
        mask[i, col] = False
        mask[j, col] = False
    return float(dist[mask].min())


def check_concurrency(points: np.ndarray) -> float:
    """Margin of condition (2) over all triples of pair circles.

    Candidate concurrence points are the pairwise circle intersections;
    for a candidate x cut out by circles (a, b), the residual of the triple
    (a, b, c) is the distance from x to circle c.  The margin is the least
    residual over all candidates not lying in S or -S; a margin near zero
    means three circles nearly meet at a forbidden point.
    """
    points = np.asarray(points, dtype=float)
    poles, pairs = _pair_poles(points)
    n_circ = len(poles)
    # Distinctness of the circles is implied by condition (1).
    gram = np.abs(poles @ poles.T)
    np.fill_diagonal(gram, 0.0)
    if np.any(gram > 1.0 - 1e-12):
        raise FinenessError("concurrency", "coincident pair circles")

    a_idx, b_idx = np.triu_indices(n_circ, k=1)
    inter = np.cross(poles[a_idx], poles[b_idx])
    inter /= np.linalg.norm(inter, axis=1)[:, None]
    cand = np.vstack([inter, -inter])
    cand_a = np.concatenate([a_idx, a_idx])
    cand_b = np.concatenate([b_idx, b_idx])

    # Distance from every candidate to every circle.
    dist = np.abs(np.arcsin(np.clip(cand @ poles.T, -1.0, 1.0)))  # (n_cand, n_circ)
    cols = np.arange(n_circ)
    allowed = np.ones_like(dist, dtype=bool)
    allowed[np.arange(len(cand)), cand_a] = False
    allowed[np.arange(len(cand)), cand_b] = False
    del cols

    # Candidates at points of S or -S are licensed concurrences (chordal
    # test: arccos cannot resolve angles this small).
    full = np.vstack([points, -points])
    chord = np.linalg.norm(cand[:, None, :] - full[None, :, :], axis=2)
    near_set = chord.min(axis=1) <= POINT_TOL
    residual = np.where(allowed, dist, np.inf).min(axis=1)
    residual = residual[~near_set]
    if len(residual) == 0:
        raise FinenessError("concurrency", "no admissible candidate intersections")
    return float(residual.min())


def _third_largest_dot(points: np.ndarray, centers: np.ndarray) -> np.ndarray:
    dots = centers @ points.T  # (n_centers, n_points)
    part = np.partition(dots, dots.shape[1] - 3, axis=1)
    return part[:, -3]


def _latlon_grid(delta: float) -> np.ndarray:
    """Deterministic grid with covering radius at most ``delta``."""
    n_rings = max(2, int(math.ceil(math.pi / delta)) + 1)
    thetas = (np.arange(n_rings) + 0.5) * (math.pi / n_rings)
    pts = [np.array([0.0, 0.0, 1.0]), np.array([0.0, 0.0, -1.0])]
    for th in thetas:
        m = max(4, int(math.ceil(2.0 * math.pi * math.sin(th) / delta)) + 1)
        phis = np.arange(m) * (2.0 * math.pi / m)
        ring = np.stack(
            [np.sin(th) * np.cos(phis), np.sin(th) * np.sin(phis),
             np.full(m, math.cos(th))], axis=1
        )
        pts.append(ring)
    return np.vstack(pts)


def check_hemispheres(points: np.ndarray, grid_refine: float = 1.0) -> float:
    """Margin of condition (3): min over hemisphere centers c of
    arcsin(third-largest <c, p_i>).

    Positive margin m means every closed ball of radius pi/2 - m contains
    at least 3 of the points.  The minimum is attained either where two
    dot products tie (intersections of pair bisector circles, or extrema
    of a tied pair along its bisector), so those candidates are enumerated
    exactly; a Lipschitz grid sweep at resolution margin/4 then certifies
    that no smaller value was missed (dot products are 1-Lipschitz in the
    angle of c).  ``grid_refine`` scales the sweep resolution for the
    stability check.
    """
    points = np.asarray(points, dtype=float)
    if len(points) < 3:
        raise ValueError("need at least 3 points")
    pairs = list(combinations(range(len(points)), 2))
    bis_poles = np.array([points[i] - points[j] for i, j in pairs])
    norms = np.linalg.norm(bis_poles, axis=1)
    keep = norms > 1e-12
    bis_poles = bis_poles[keep] / norms[keep, None]

    cands = []
    a_idx, b_idx = np.triu_indices(len(bis_poles), k=1)
    inter = np.cross(bis_poles[a_idx], bis_poles[b_idx])
    inorm = np.linalg.norm(inter, axis=1)
    ok = inorm > 1e-12
    cands.append(inter[ok] / inorm[ok, None])
    # Extrema of a tied pair along its bisector circle: +-(p_i + p_j).
    sums = np.array([points[i] + points[j] for i, j in pairs])
    snorm = np.linalg.norm(sums, axis=1)
    ok = snorm > 1e-12
    cands.append(sums[ok] / snorm[ok, None])
    cands.append(points)
    cand = np.vstack(cands)
    cand = np.vstack([cand, -cand])

    s3_min = float(_third_largest_dot(points, cand).min())

    # Certify with a sweep: the true minimum is at least grid_min - delta.
    margin_scale = max(abs(s3_min), 1e-2)
    delta = (math.asin(min(1.0, margin_scale)) / 4.0) * grid_refine
    grid = _latlon_grid(delta)
    grid_min = float(_third_largest_dot(points, grid).min())
    s3_min = min(s3_min, grid_min)
    return float(math.asin(max(-1.0, min(1.0, s3_min))))


def min_pairwise_distance(points: np.ndarray) -> float:
    """Least round distance within S united with its antipodes."""
    full = np.vstack([points, -points])
    dots = np.clip(full @ full.T, -1.0, 1.0)
    np.fill_diagonal(dots, -1.0)
    return float(np.arccos(dots.max()))


def epsilon_sigma(points: np.ndarray, hemisphere_margin: float) -> float:
    """Ball radius: disjoint closed balls around S and -S, while every
    closed ball of radius pi/2 - eps still holds >= 3 points of S."""
    if hemisphere_margin <= 0.0:
        raise ValueError("hemisphere margin must be positive")
    half_min = (0.5 - 1e-3) * min_pairwise_distance(points)
    return float(min(half_min, hemisphere_margin))


@dataclass(frozen=True)
class FineSet:
    """A certified fine set: points plus positive margins and ball radius."""

    points: np.ndarray
    collinearity_margin: float
    concurrency_margin: float
    hemisphere_margin: float
    epsilon_sigma: float

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float).copy()
        norms = np.linalg.norm(pts, axis=1)
        if np.max(np.abs(norms - 1.0)) > 1e-12:
            pts = pts / norms[:, None]
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        for name in ("collinearity_margin", "concurrency_margin",
                     "hemisphere_margin", "epsilon_sigma"):
            if getattr(self, name) <= 0.0:
                raise FinenessError(name, f"{name} must be positive")

    def points_array(self) -> np.ndarray:
        return self.points

    def to_json_dict(self) -> dict:
        return {
            "points": [[float(x) for x in p] for p in self.points],
            "margins": {
                "collinearity": self.collinearity_margin,
                "concurrency": self.concurrency_margin,
                "hemisphere": self.hemisphere_margin,
            },
            "epsilon_sigma": self.epsilon_sigma,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "FineSet":
        try:
            return cls(
                points=np.array(d["points"], dtype=float),
                collinearity_margin=float(d["margins"]["collinearity"]),
                concurrency_margin=float(d["margins"]["concurrency"]),
                hemisphere_margin=float(d["margins"]["hemisphere"]),
                epsilon_sigma=float(d["epsilon_sigma"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise FinenessError("format", f"malformed fine set record: {exc}") from exc

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)


def certify_fine_set(points: np.ndarray) -> FineSet:
    """Run all three checks and assemble a FineSet, or raise FinenessError
    naming the first failing condition."""
    points = np.asarray(points, dtype=float)
    coll = check_collinearity(points)
    if coll <= 0.0:
        raise FinenessError("collinearity", f"margin {coll} not positive")
    conc = check_concurrency(points)
    if conc <= 0.0:
        raise FinenessError("concurrency", f"margin {conc} not positive")
    hemi = check_hemispheres(points)
    if hemi <= 0.0:
        raise FinenessError("hemisphere", f"margin {hemi} not positive")
    eps = epsilon_sigma(points, hemi)
    return FineSet(
        points=points,
        collinearity_margin=coll,
        concurrency_margin=conc,
        hemisphere_margin=hemi,
        epsilon_sigma=eps,
    )
