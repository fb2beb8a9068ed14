"""Evaluable Lipschitz maps H^m -> R^n with certified constants.

Testbed maps for the compression search: the Poincare-ball chart (Lipschitz
constant 1/2), Busemann coordinate maps (1-Lipschitz per coordinate), and
Euclidean post-compositions.  Also the flat-graph surface demo showing a
proper embedding that is not strongly proper.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra

from hypack.geometry import HPoint, distance, sample_ball

__all__ = [
    "FlatGraphReport",
    "FlatGraphRow",
    "LipschitzMapHandle",
    "busemann_map",
    "compose_euclidean",
    "estimate_lipschitz",
    "flat_graph_example",
    "ideal_point",
    "poincare_inclusion",
    "radial_distance_map",
]


@dataclass(frozen=True)
class LipschitzMapHandle:
    """A map H^m -> R^n with a declared Lipschitz constant.

    ``fn`` must be pure and reentrant; handles are immutable and safe to
    share.  The declared L is an upper bound that sampled difference
    quotients are tested against.
    """

    fn: Callable[[HPoint], np.ndarray]
    L: float
    n: int
    m: int
    label: str

    def __call__(self, p: HPoint) -> np.ndarray:
        out = np.asarray(self.fn(p), dtype=float)
        if out.shape != (self.n,):
            raise ValueError(f"{self.label}: expected output of length {self.n}")
        return out

    def batch(self, points) -> np.ndarray:
        return np.array([self(p) for p in points])


def poincare_inclusion(m: int) -> LipschitzMapHandle:
    """Poincare-ball coordinates of a hyperboloid point, as a map to R^m.

    In polar form the chart is tanh(r/2) * direction, which stays exact at
    any radius.  The conformal factor (1-|z|^2)/2 <= 1/2 makes it
    1/2-Lipschitz, with the bound attained at the origin.
    """
    if m < 2:
        raise ValueError("poincare_inclusion: m must be >= 2")

    def fn(p: HPoint) -> np.ndarray:
        # tanh saturates to 1.0 in doubles near r ~ 38; round inward so the
        # image stays in the open ball (the shift is far below the
        # positional resolution eps*sinh(r) at such radii)
        t = min(math.tanh(0.5 * p.r), 1.0 - 1e-15)
        return t * p.direction

    return LipschitzMapHandle(fn=fn, L=0.5, n=m, m=m, label="poincare")


def ideal_point(direction) -> np.ndarray:
    """Future-null vector (1, u) for a unit direction u."""
    d = np.asarray(direction, dtype=float)
    n = np.linalg.norm(d)
    if n == 0.0:
        raise ValueError("ideal_point: direction must be nonzero")
    return np.concatenate(([1.0], d / n))


def busemann_map(ideal_points) -> LipschitzMapHandle:
    """Coordinates b_i(x) = log(-<x, xi_i>_M) for future-null xi_i.

    Each coordinate is a Busemann function, 1-Lipschitz, normalized to
    vanish at o by scaling xi so that xi_0 = 1.  Along the ray toward xi
    the value is exactly -t.  Evaluation is done in log-domain from polar
    data so it works at any radius.
    """
    etas = []
    m = None
    for xi in ideal_points:
        xi = np.asarray(xi, dtype=float)
        if xi[0] <= 0.0:
            raise ValueError("busemann_map: ideal point must have xi_0 > 0")
        xi = xi / xi[0]
        eta = xi[1:]
        if abs(eta @ eta - 1.0) > 1e-12:
            raise ValueError("busemann_map: ideal point is not null within 1e-12")
        eta = eta / np.linalg.norm(eta)
        if m is None:
            m = eta.shape[0]
        elif eta.shape[0] != m:
            raise ValueError("busemann_map: mixed dimensions")
        etas.append(eta)
    if not etas:
        raise ValueError("busemann_map: need at least one ideal point")
    E = np.array(etas)
    n = E.shape[0]

    def fn(p: HPoint) -> np.ndarray:
        # log(cosh r - sinh r * c) = logaddexp(r + log((1-c)/2), -r + log((1+c)/2))
        c = np.clip(E @ p.direction, -1.0, 1.0)
        r = p.r
        with np.errstate(divide="ignore"):
            a = r + np.log(0.5 * (1.0 - c))
            b = -r + np.log(0.5 * (1.0 + c))
        return np.logaddexp(a, b)

    return LipschitzMapHandle(fn=fn, L=math.sqrt(n), n=n, m=m, label="busemann")


def radial_distance_map(m: int) -> LipschitzMapHandle:
    """x -> d(o, x), the canonical 1-Lipschitz scalar map."""

    def fn(p: HPoint) -> np.ndarray:
        return np.array([p.r])

    return LipschitzMapHandle(fn=fn, L=1.0, n=1, m=m, label="radial")


def compose_euclidean(
    F: LipschitzMapHandle,
    g: Callable[[np.ndarray], np.ndarray],
    L_g: float,
    n_out: int | None = None,
    label: str | None = None,
) -> LipschitzMapHandle:
    """Post-compose F with an L_g-Lipschitz Euclidean map g."""
    if n_out is None:
        n_out = np.atleast_1d(np.asarray(g(np.zeros(F.n)), dtype=float)).shape[0]

    def fn(p: HPoint) -> np.ndarray:
        return np.atleast_1d(np.asarray(g(F(p)), dtype=float))

    return LipschitzMapHandle(
        fn=fn, L=F.L * L_g, n=n_out, m=F.m, label=label or f"composed({F.label})"
    )


def estimate_lipschitz(
    F: LipschitzMapHandle,
    pairs: int = 10_000,
    seed: int = 0,
    region_radius: float = 20.0,
) -> float:
    """Max sampled ratio |F(x)-F(y)| / d(x,y) over random pairs in B(o, radius).

    A lower bound on the true constant; shipped handles must keep it at or
    below the declared L.
    """
    if pairs < 1:
        raise ValueError("estimate_lipschitz: pairs must be >= 1")
    rng = np.random.default_rng(seed)
    X = sample_ball(F.m, region_radius, 2 * pairs, rng)
    best = 0.0
    for i in range(pairs):
        a = _point_from_tangent(X[2 * i])
        b = _point_from_tangent(X[2 * i + 1])
        d = distance(a, b)
        if d < 1e-12:
            continue
        best = max(best, float(np.linalg.norm(F(a) - F(b))) / d)
    return best


def _point_from_tangent(x: np.ndarray) -> HPoint:
    r = float(np.linalg.norm(x))
    if r == 0.0:
        return HPoint.origin(x.shape[0])
    return HPoint.from_polar(r, x / r)


# ---------------------------------------------------------------------------
# flat-graph demo surface
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FlatGraphRow:
    k: int
    extrinsic: float
    intrinsic_lo: float
    intrinsic_hi: float

    @property
    def ratio(self) -> float:
        return self.intrinsic_lo / self.extrinsic


@dataclass(frozen=True)
class FlatGraphReport:
    rows: list[FlatGraphRow]

    def to_json_rows(self) -> list[dict]:
        return [
            {
                "k": row.k,
                "extrinsic": row.extrinsic,
                "intrinsic_lo": row.intrinsic_lo,
                "intrinsic_hi": row.intrinsic_hi,
            }
            for row in self.rows
        ]


def _bump_height(x: np.ndarray, k: int) -> np.ndarray:
    """Smooth bump of height k supported on (k - 1/(k+1), k + 1/(k+1))."""
    t = (np.asarray(x, dtype=float) - k) * (k + 1.0)
    out = np.zeros_like(t)
    inside = np.abs(t) < 1.0
    ti = t[inside]
    out[inside] = k * np.exp(1.0 - 1.0 / (1.0 - ti * ti))
    return out


def _surface_path_length(xs, ys, k: int, subdiv: int = 32) -> float:
    """Length of the lifted polyline (x(t), y(t), f(x(t))) on the surface."""
    total = 0.0
    for (x0, y0), (x1, y1) in zip(zip(xs, ys), zip(xs[1:], ys[1:])):
        t = np.linspace(0.0, 1.0, subdiv + 1)
        px = x0 + (x1 - x0) * t
        py = y0 + (y1 - y0) * t
        pz = _bump_height(px, k)
        seg = np.sqrt(np.diff(px) ** 2 + np.diff(py) ** 2 + np.diff(pz) ** 2)
        total += float(seg.sum())
    return total


def _mesh_shortest_path(k: int, nx: int, ny: int = 7) -> float:
    """Dijkstra over the grid-graph of the bump strip, p_k to q_k.

    Edge weights are lifted-segment lengths, so any graph path is a genuine
    curve on the surface and the result is an upper bound for the intrinsic
    distance.
    """
    half = 1.0 / (k + 1.0)
    xs = np.linspace(k - half, k + half, nx)
    ys = np.linspace(-half / 2.0, half / 2.0, ny)
    zs = _bump_height(xs, k)

    def node(i, j):
        return i * ny + j

    rows, cols, vals = [], [], []
    steps = [(1, 0), (0, 1), (1, 1), (1, -1)]
    for i in range(nx):
        for j in range(ny):
            for di, dj in steps:
                i2, j2 = i + di, j + dj
                if 0 <= i2 < nx and 0 <= j2 < ny:
                    w = _segment_weight(xs[i], xs[i2], ys[j2] - ys[j], k)
                    rows.append(node(i, j))
                    cols.append(node(i2, j2))
                    vals.append(w)
    n_nodes = nx * ny
    graph = coo_matrix((vals, (rows, cols)), shape=(n_nodes, n_nodes))
    mid = ny // 2
    dist_row = dijkstra(graph, directed=False, indices=node(0, mid))
    return float(dist_row[node(nx - 1, mid)])


def _segment_weight(x0: float, x1: float, dy: float, k: int, subdiv: int = 8) -> float:
    px = np.linspace(x0, x1, subdiv + 1)
    pz = _bump_height(px, k)
    dxs = np.diff(px)
    dys = dy / subdiv
    return float(np.sum(np.sqrt(dxs**2 + dys**2 + np.diff(pz) ** 2)))


def flat_graph_example(K: int = 8, base_nx: int = 301, stabilize_tol: float = 0.1) -> FlatGraphReport:
    """Intrinsic vs extrinsic distances on the graph of g(x, y) = f(x).

    f is a smooth bump of height k over the k-th component of the support
    set, so p_k and q_k at its feet are 2/(k+1) apart in R^3 while every
    surface path between them climbs over the height-k ridge (the ridge is
    independent of y), giving an intrinsic lower bound of 2k.

    Rows carry the exact extrinsic gap, the ridge-climb lower bound read
    off the mesh, and a Dijkstra upper bound over the grid graph refined
    until it stabilizes within `stabilize_tol` relative change.
    """
    rows = []
    for k in range(1, K + 1):
        extrinsic = 2.0 / (k + 1.0)
        # mesh grids are centered so x = k is a node; the ridge height read
        # off the mesh is then exactly f(k) = k
        nx = base_nx if base_nx % 2 == 1 else base_nx + 1
        ridge = float(_bump_height(np.array([float(k)]), k)[0])
        lo = 2.0 * ridge
        hi_prev = _mesh_shortest_path(k, nx)
        hi = _mesh_shortest_path(k, 2 * nx - 1)
        while abs(hi_prev - hi) > stabilize_tol * hi:
            nx = 2 * nx - 1
            hi_prev, hi = hi, _mesh_shortest_path(k, 2 * nx - 1)
        rows.append(FlatGraphRow(k=k, extrinsic=extrinsic, intrinsic_lo=lo, intrinsic_hi=hi))
    return FlatGraphReport(rows=rows)
