"""Weighted point-cloud measures and the lattice criterion sums.

A measure is a finite list of nonzero points with nonnegative weights;
continuous densities enter through `discretize_density`. All reported sums
use a deterministic order and compensated accumulation so repeated runs are
bit-identical.
"""

import math
from dataclasses import dataclass

import numpy as np

from .geometry import cell_indices


class MeasureError(Exception):
    pass


class InvalidExponent(MeasureError):
    pass


class InvalidRange(MeasureError):
    pass


@dataclass(frozen=True)
class PointMeasure:
    """Positive Borel measure on R^d minus the origin, as a point cloud."""

    points: np.ndarray   # (n, d)
    weights: np.ndarray  # (n,)

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        w = np.asarray(self.weights, dtype=float)
        if pts.shape[0] != w.shape[0]:
            raise MeasureError("points and weights length mismatch")
        if pts.size and not np.all(np.isfinite(pts)):
            raise MeasureError("points must be finite")
        if w.size and (not np.all(np.isfinite(w)) or np.any(w < 0)):
            raise MeasureError("weights must be finite and nonnegative")
        if pts.size and np.any(np.all(pts == 0.0, axis=1)):
            raise MeasureError("measure must not charge the origin")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    @property
    def total_mass(self):
        return math.fsum(self.weights)

    def scaled(self, t):
        return PointMeasure(points=self.points, weights=t * self.weights)

    @classmethod
    def empty(cls, d):
        return cls(points=np.zeros((0, d)), weights=np.zeros(0))

    def to_dict(self):
        return {"points": self.points.tolist(), "weights": self.weights.tolist()}

    @classmethod
    def from_dict(cls, obj):
        return cls(points=np.asarray(obj["points"], float),
                   weights=np.asarray(obj["weights"], float))


@dataclass(frozen=True)
class CriterionReport:
    """Per-scale criterion values and their supremum over the scanned range."""

    per_k: dict
    sup_value: float
    p: float
    k_range: tuple

    @property
    def argmax_k(self):
        if not self.per_k:
            return None
        return max(sorted(self.per_k), key=lambda k: self.per_k[k])

    @property
    def sup_at_endpoint(self):
        k = self.argmax_k
        return k is not None and k in (self.k_range[0], self.k_range[1])

    def to_dict(self):
        return {
            # math.inf marks the annulus-mass mode; keep the JSON valid
            "p": self.p if math.isfinite(self.p) else "inf",
            "k_min": self.k_range[0],
            "k_max": self.k_range[1],
            "per_k": {str(k): self.per_k[k] for k in sorted(self.per_k)},
            "sup_value": self.sup_value,
            "sup_at_endpoint": self.sup_at_endpoint,
        }


def bin_measure(mu, geo, k):
    """Masses of the half-open lattice cells (A*)^k(R*(alpha)).

    Returns a dict keyed by the integer tuple alpha, including alpha = 0.
    """
    if mu.points.shape[0] == 0:
        return {}
    alphas = cell_indices(geo.adjoint_params, geo.adjoint_rectangle, k, mu.points)
    cells = {}
    for a, w in zip(map(tuple, alphas), mu.weights):
        cells.setdefault(a, []).append(float(w))
    return {a: math.fsum(ws) for a, ws in sorted(cells.items())}


def criterion_sum(mu, geo, k, q):
    """ell^q norm of the off-center cell masses at scale k."""
    if q < 1.0:
        raise InvalidExponent(f"q={q} must be >= 1")
    cells = bin_measure(mu, geo, k)
    zero = (0,) * mu.points.shape[1] if mu.points.size else None
    terms = [cells[a] ** q for a in sorted(cells) if a != zero]
    return math.fsum(terms) ** (1.0 / q)


def criterion_sup(mu, geo, k_range, p):
    """Sledd-Stegenga-type criterion sup_k of the ell^(2/(2-p)) sums."""
    if not (1.0 <= p < 2.0):
        raise InvalidExponent(f"p={p} must lie in [1, 2)")
    q = 2.0 / (2.0 - p)
    k_min, k_max = k_range
    per_k = {k: criterion_sum(mu, geo, k, q) for k in range(k_min, k_max + 1)}
    sup = max(per_k.values()) if per_k else 0.0
    return CriterionReport(per_k=per_k, sup_value=sup, p=p,
                           k_range=(k_min, k_max))


def annulus_mass(mu, adjoint_qnorm, k):
    """Mass of the quasi-norm level set {rho*(x) = b^k}."""
    if mu.points.shape[0] == 0:
        return 0.0
    idx = adjoint_qnorm.scale_indices(mu.points, k - 1, k + 1)
    return math.fsum(float(w) for w, i in zip(mu.weights, idx) if i == k)


def annulus_sup(mu, adjoint_qnorm, k_range):
    k_min, k_max = k_range
    if mu.points.shape[0] == 0:
        per_k = {k: 0.0 for k in range(k_min, k_max + 1)}
    else:
        idx = adjoint_qnorm.scale_indices(mu.points, k_min, k_max)
        per_k = {}
        for k in range(k_min, k_max + 1):
            sel = idx == k
            per_k[k] = math.fsum(map(float, mu.weights[sel]))
    sup = max(per_k.values()) if per_k else 0.0
    return CriterionReport(per_k=per_k, sup_value=sup, p=math.inf,
                           k_range=(k_min, k_max))


def _halton(n, d, skip):
    """Radical-inverse (Halton) sequence in [0,1)^d, deterministic."""
    primes = (2, 3, 5)[:d]
    out = np.empty((n, d))
    for j, p in enumerate(primes):
        idx = np.arange(skip + 1, skip + n + 1)
        res = np.zeros(n)
        f = 1.0 / p
        i = idx.copy()
        while np.any(i > 0):
            res += f * (i % p)
            i //= p
            f /= p
        out[:, j] = res
    return out


def discretize_density(gamma, geo, k_range, samples_per_shell, seed=0):
    """Point-cloud approximation of the density rho*(x)^(-gamma) dx.

    For each shell k, low-discrepancy points are placed in
    (A*)^(k+1)(Delta*) minus (A*)^k(Delta*) and weighted so the shell total
    equals shell-volume times b^(-gamma k). Same seed gives bit-identical
    output.
    """
    if samples_per_shell < 1:
        raise InvalidRange("samples_per_shell must be >= 1")
    k_min, k_max = k_range
    if k_min > k_max:
        raise InvalidRange(f"empty shell range {k_range}")
    d = geo.params.dimension
    b = geo.params.b
    adj = geo.adjoint_params.matrix
    q = geo.adjoint_ellipsoid.quadratic_form
    # base-shell sample in A*(Delta*) minus Delta*, by rejection from the
    # bounding box of A*(R*)
    box = np.abs(geo.adjoint_rectangle.vertices() @ adj.T).max(axis=0)
    base = np.empty((samples_per_shell, d))
    found, skip = 0, int(seed) * 7919
    while found < samples_per_shell:
        cand = (2.0 * _halton(4 * samples_per_shell, d, skip) - 1.0) * box
        skip += 4 * samples_per_shell
        inv = np.linalg.solve(adj, cand.T).T
        keep = cand[(q(inv) < 1.0) & (q(cand) >= 1.0)]
        take = min(len(keep), samples_per_shell - found)
        base[found:found + take] = keep[:take]
        found += take
    points, weights = [], []
    for k in range(k_min, k_max + 1):
        a_pow = np.linalg.matrix_power(adj, k)
        shell_vol = b ** (k + 1) - b ** k
        w = shell_vol * b ** (-gamma * k) / samples_per_shell
        points.append(base @ a_pow.T)
        weights.append(np.full(samples_per_shell, w))
    return PointMeasure(points=np.concatenate(points),
                        weights=np.concatenate(weights))
