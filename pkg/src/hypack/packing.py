"""Explicit geodesic-ball packings inside B(p, R) with certified 2C separation.

The family places k+1 centers on a 2-plane through the packing center, at
distance R-C along directions spaced by twice the packing angle alpha, with
sin(alpha) = sinh(C)/sinh(R-C).  Adjacent centers are then exactly 2C apart
and the family size grows like sinh(R-C), which is the exponential lower
bound on the packing number.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from hypack.geometry import (
    DEFAULT_TOL,
    HPoint,
    HTangent,
    NumericRangeError,
    _log_sinh,
    dist_given_q,
    dist_polar_angle,
    distance,
    exp_map,
    minkowski_inner,
)

__all__ = [
    "BallFamily",
    "GrowthRow",
    "PackingReport",
    "PackingSpec",
    "count_lower_bound",
    "direction_count",
    "generate_centers",
    "growth_table",
    "growth_table_csv",
    "packing_angle",
    "verify_packing",
]

#: Family sizes beyond this are not exactly representable as floats; center
#: generation still works (indices are subsampled) but exact counting stops.
_EXACT_COUNT_MAX = float(2**53)


def packing_angle(C: float, R: float) -> float:
    """Half the angular spacing between adjacent center directions.

    alpha = arcsin(sinh(C) / sinh(R - C)), in (0, pi/2] for R > 2C.
    Strictly decreasing in R for fixed C.
    """
    if C <= 0.0:
        raise ValueError("packing_angle: C must be > 0")
    if R <= 2.0 * C:
        raise ValueError(f"packing_angle: need R > 2C (got R={R}, C={C})")
    log_ratio = float(_log_sinh(C) - _log_sinh(R - C))
    if log_ratio > 0.0:
        raise ValueError("packing_angle: sinh(C)/sinh(R-C) > 1")
    if log_ratio < -700.0:
        raise NumericRangeError(
            "packing_angle underflows; R - 2C is too large for double precision"
        )
    return math.asin(math.exp(log_ratio))


def direction_count(alpha: float) -> int:
    """Largest k with k*alpha <= pi - alpha; the family has k+1 directions."""
    if not 0.0 < alpha <= 0.5 * math.pi + 1e-12:
        raise ValueError("direction_count: alpha must lie in (0, pi/2]")
    k = int(math.floor(math.pi / alpha)) - 1
    while (k + 1) * alpha > math.pi:
        k -= 1
    while (k + 2) * alpha <= math.pi:
        k += 1
    return max(k, 1)


@dataclass(frozen=True)
class PackingSpec:
    """Parameters of one packing: ball radius C inside B(center, R).

    The 2-plane carrying the centers is spanned by two unit tangent vectors
    at the center; by default the first two frame directions.
    """

    C: float
    R: float
    center: HPoint
    plane: tuple[HTangent, HTangent]

    def __post_init__(self):
        if self.R <= 2.0 * self.C or self.C <= 0.0:
            raise ValueError(f"PackingSpec: need R > 2C > 0 (got R={self.R}, C={self.C})")
        u, w = self.plane
        if abs(u.norm - 1.0) > 1e-12 or abs(w.norm - 1.0) > 1e-12:
            raise ValueError("PackingSpec: plane vectors must be unit")
        if abs(float(minkowski_inner(u.vec, w.vec))) > 1e-12:
            raise ValueError("PackingSpec: plane vectors must be orthogonal")

    @staticmethod
    def at_origin(C: float, R: float, m: int) -> "PackingSpec":
        center = HPoint.origin(m)
        e1 = np.zeros(m + 1)
        e1[1] = 1.0
        e2 = np.zeros(m + 1)
        e2[2] = 1.0
        return PackingSpec(C, R, center, (HTangent(center, e1), HTangent(center, e2)))


@dataclass
class BallFamily:
    """Finite family of equal-radius balls with a certified min separation.

    ``alpha`` and ``indices`` record the generating angles: center j sits at
    plane angle 2*indices[j]*alpha.  They are what makes separation
    verification exact at large R, where stored unit directions can no
    longer resolve the angular gaps (the angle between adjacent directions
    falls below the eps-level quantization of the direction vectors).
    """

    centers: list[HPoint]
    radius: float
    min_separation: float
    enclosing: tuple[HPoint, float] | None = None
    alpha: float | None = None
    indices: np.ndarray | None = None
    center_radius: float | None = None
    family_size_uncapped: float | None = None

    def __len__(self) -> int:
        return len(self.centers)

    def pair_distance(self, i: int, j: int) -> float:
        """Distance between centers i and j via the stable angle kernel."""
        if self.alpha is None or self.indices is None:
            return distance(self.centers[i], self.centers[j])
        theta = 2.0 * abs(float(self.indices[i]) - float(self.indices[j])) * self.alpha
        rho = self.center_radius
        return float(dist_polar_angle(rho, rho, theta))


def generate_centers(spec: PackingSpec, cap: int = 100_000) -> BallFamily:
    """Build the 2-plane center family for `spec`.

    Emits centers exp_center((R-C) * v_j) for directions
    v_j = cos(2 j alpha) u + sin(2 j alpha) w, j = 0..k.  When k+1 exceeds
    `cap`, indices are subsampled evenly (which trivially preserves the 2C
    separation).
    """
    if cap < 2:
        raise ValueError("generate_centers: cap must be >= 2")
    alpha = packing_angle(spec.C, spec.R)
    k = direction_count(alpha)
    count = k + 1
    rho = spec.R - spec.C

    if count <= cap:
        idx = np.arange(count, dtype=float)
    else:
        idx = np.round(np.linspace(0.0, float(k), cap))
        idx = np.unique(idx)

    theta = 2.0 * idx * alpha
    u, w = spec.plane
    cos_t = np.cos(theta)
    sin_t = np.sin(theta)
    centers = []
    for ct, st in zip(cos_t, sin_t):
        vec = rho * (ct * u.vec + st * w.vec)
        centers.append(exp_map(HTangent(spec.center, vec, rho)))

    fam = BallFamily(
        centers=centers,
        radius=spec.C,
        min_separation=2.0 * spec.C,
        enclosing=(spec.center, spec.R),
        alpha=alpha,
        indices=idx,
        center_radius=rho,
        family_size_uncapped=float(count) if count <= _EXACT_COUNT_MAX else math.inf,
    )
    # construction-time spot check of the separation invariant
    if len(fam) <= 2048:
        rep = verify_packing(fam)
        if not rep.ok:
            raise AssertionError(f"generated family violates its invariants: {rep}")
    return fam


@dataclass(frozen=True)
class PackingReport:
    n_centers: int
    pairs_checked: int
    min_pairwise: float
    required_separation: float
    max_center_offset: float
    allowed_offset: float
    separation_ok: bool
    enclosure_ok: bool

    @property
    def ok(self) -> bool:
        return self.separation_ok and self.enclosure_ok


def _worker_count() -> int:
    raw = os.environ.get("HYPACK_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _pairwise_min_block(fam: BallFamily, i0: int, i1: int, block: int = 256) -> float:
    """Min distance over all pairs {i, j} with i0 <= i < i1, j > i.

    Rows are processed in blocks against all later columns so the O(n^2)
    sweep runs at numpy throughput; each block splits into a small masked
    triangular corner plus a maskless rectangle.
    """
    n = len(fam)
    best = math.inf
    use_angles = fam.alpha is not None and fam.indices is not None
    if use_angles:
        rho = fam.center_radius
        idx = fam.indices
    else:
        radii = np.array([c.r for c in fam.centers])
        dirs = np.array([c.direction for c in fam.centers])

    def eval_min(rows, cols, mask):
        if use_angles:
            # equal radii: distance is monotone in q = sin^2(theta/2), so
            # reduce q first and run the kernel once on the block minimum
            half = np.abs(idx[cols][None, :] - idx[rows][:, None]) * fam.alpha
            q = np.sin(half) ** 2
            if mask is not None:
                q = np.where(mask, q, np.inf)
            if not q.size:
                return math.inf
            qmin = float(np.min(q))
            if not math.isfinite(qmin):
                return math.inf
            return float(dist_given_q(rho, rho, qmin))
        diff = dirs[cols][None, :, :] - dirs[rows][:, None, :]
        q = np.clip(0.25 * np.sum(diff * diff, axis=-1), 0.0, 1.0)
        d = dist_given_q(radii[rows][:, None], radii[cols][None, :], q)
        if mask is not None:
            d = np.where(mask, d, math.inf)
        return float(np.min(d)) if d.size else math.inf

    for b0 in range(i0, i1, block):
        b1 = min(b0 + block, i1)
        rows = np.arange(b0, b1)
        corner_cols = np.arange(b0 + 1, min(b1 + 1, n))
        if corner_cols.size:
            best = min(best, eval_min(rows, corner_cols, corner_cols[None, :] > rows[:, None]))
        rect_cols = np.arange(b1 + 1, n)
        if rect_cols.size:
            best = min(best, eval_min(rows, rect_cols, None))
    return best


def verify_packing(fam: BallFamily, tol: float = DEFAULT_TOL, enum_cap: int = 20_000) -> PackingReport:
    """Brute-force O(n^2) verification of separation and enclosure.

    Uses the angle-based kernel when the family carries its generating
    angles, the polar-direction kernel otherwise.  HYPACK_THREADS > 1
    splits the row blocks across a thread pool; the min-reduction makes the
    result schedule-independent.
    """
    n = len(fam)
    if n > enum_cap:
        raise ValueError(f"verify_packing: {n} centers exceeds enumeration cap {enum_cap}")

    pairs = n * (n - 1) // 2
    min_pairwise = math.inf
    if n >= 2:
        workers = _worker_count()
        if workers > 1 and n > 512:
            from concurrent.futures import ThreadPoolExecutor

            bounds = np.linspace(0, n - 1, workers + 1).astype(int)
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = pool.map(
                    lambda se: _pairwise_min_block(fam, se[0], se[1]),
                    zip(bounds[:-1], bounds[1:]),
                )
            min_pairwise = min(results)
        else:
            min_pairwise = _pairwise_min_block(fam, 0, n - 1)

    max_offset = 0.0
    allowed = math.inf
    if fam.enclosing is not None:
        enc_center, enc_radius = fam.enclosing
        allowed = enc_radius - fam.radius
        max_offset = max(distance(enc_center, c) for c in fam.centers)

    return PackingReport(
        n_centers=n,
        pairs_checked=pairs,
        min_pairwise=min_pairwise,
        required_separation=fam.min_separation,
        max_center_offset=max_offset,
        allowed_offset=allowed,
        separation_ok=(n < 2) or (min_pairwise >= fam.min_separation - tol),
        enclosure_ok=(fam.enclosing is None) or (max_offset <= allowed + tol),
    )


def count_lower_bound(C: float, R: float) -> float:
    """Analytic lower bound (1/2)(sin a / a)(pi / sinh C) sinh(R - C).

    Always <= k+1 for the constructed family (the bound equals pi/(2 alpha)
    after substituting sin(alpha), and k+1 > pi/alpha - 1 >= pi/(2 alpha)).
    """
    alpha = packing_angle(C, R)
    log_val = (
        math.log(0.5)
        + math.log(math.sin(alpha) / alpha)
        + math.log(math.pi)
        - float(_log_sinh(C))
        + float(_log_sinh(R - C))
    )
    if log_val > 709.0:
        return math.inf
    return math.exp(log_val)


@dataclass(frozen=True)
class GrowthRow:
    R: float
    alpha: float
    family_size: float
    lower_bound: float
    ratio: float | None


def growth_table(C: float, R_values) -> list[GrowthRow]:
    """Family size and lower bound along an R schedule, with successive ratios."""
    rows: list[GrowthRow] = []
    prev_size: float | None = None
    for R in R_values:
        alpha = packing_angle(C, R)
        size = float(direction_count(alpha) + 1)
        bound = count_lower_bound(C, R)
        ratio = None if prev_size is None else size / prev_size
        rows.append(GrowthRow(R=float(R), alpha=alpha, family_size=size, lower_bound=bound, ratio=ratio))
        prev_size = size
    return rows


def growth_table_csv(rows: list[GrowthRow]) -> str:
    lines = ["R,alpha,family_size,lower_bound,ratio"]
    for row in rows:
        size = f"{int(row.family_size)}" if row.family_size <= _EXACT_COUNT_MAX else repr(row.family_size)
        ratio = "" if row.ratio is None else repr(row.ratio)
        lines.append(f"{row.R!r},{row.alpha!r},{size},{row.lower_bound!r},{ratio}")
    return "\n".join(lines) + "\n"
