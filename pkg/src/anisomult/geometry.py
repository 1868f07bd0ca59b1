"""Expansive dilation matrices, nested ellipsoids, step quasi-norms and the
rectangle lattice they induce.

All objects here are plain immutable containers plus pure functions; the
dimension is restricted to d in {1, 2}.
"""

import math
from dataclasses import dataclass, field

import numpy as np

# unit-ball volumes for d = 1, 2
_OMEGA = {1: 2.0, 2: math.pi}

_GELFAND_DEPTH = 40
_GELFAND_RTOL = 1e-9
_EXPANSIVE_TOL = 1e-9
_STRICTNESS_EPS = 1e-3


class GeometryError(Exception):
    pass


class NotExpansive(GeometryError):
    pass


class Singular(GeometryError):
    pass


class UnsupportedDimension(GeometryError):
    pass


class InvalidRatio(GeometryError):
    pass


class TruncationFailure(GeometryError):
    pass


class EmptySample(GeometryError):
    pass


def operator_norm(mat):
    """Largest singular value, via the closed form for d <= 2."""
    m = np.asarray(mat, dtype=float)
    if m.shape == (1, 1):
        return abs(m[0, 0])
    g = m.T @ m
    t = g[0, 0] + g[1, 1]
    det = g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]
    disc = max(t * t - 4.0 * det, 0.0)
    return math.sqrt(0.5 * (t + math.sqrt(disc)))


def spectral_radius(mat, depth=_GELFAND_DEPTH, rtol=_GELFAND_RTOL):
    """Gelfand formula ||A^(2^m)||^(1/2^m) by repeated squaring.

    The iterate is renormalized each step so the entries never overflow.
    """
    m = np.asarray(mat, dtype=float)
    log_acc = 0.0  # log of the accumulated normalization
    estimate = operator_norm(m)
    for step in range(1, depth + 1):
        s = operator_norm(m)
        if s == 0.0:
            return 0.0
        m = (m / s) @ (m / s)
        log_acc = 2.0 * (log_acc + math.log(s))
        new = math.exp((log_acc + math.log(operator_norm(m))) / 2.0 ** step)
        if abs(new - estimate) <= rtol * abs(new):
            return new
        estimate = new
    return estimate


@dataclass(frozen=True)
class DilationParams:
    """Validated expansive matrix with its eigen-modulus data."""

    matrix: np.ndarray
    dimension: int
    b: float            # |det A|
    m_minus: float      # smallest eigenvalue modulus
    m_plus: float       # largest eigenvalue modulus
    lambda_minus: float
    lambda_plus: float
    zeta_minus: float
    zeta_plus: float

    @property
    def adjoint(self):
        return self.matrix.T

    def adjoint_params(self):
        """Same spectrum, transposed matrix."""
        return DilationParams(
            matrix=self.matrix.T.copy(), dimension=self.dimension, b=self.b,
            m_minus=self.m_minus, m_plus=self.m_plus,
            lambda_minus=self.lambda_minus, lambda_plus=self.lambda_plus,
            zeta_minus=self.zeta_minus, zeta_plus=self.zeta_plus)


def validate_dilation(matrix):
    """Check expansiveness and derive the eigen-modulus exponents."""
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise UnsupportedDimension(f"expected a square matrix, got shape {m.shape}")
    d = m.shape[0]
    if d not in (1, 2):
        raise UnsupportedDimension(f"dimension {d} not supported (d must be 1 or 2)")
    det = np.linalg.det(m)
    b = float(abs(det))
    if b < 1e-12:
        raise Singular("matrix determinant modulus below 1e-12")
    m_plus = spectral_radius(m)
    m_minus = 1.0 / spectral_radius(np.linalg.inv(m))
    if m_minus <= 1.0 + _EXPANSIVE_TOL:
        raise NotExpansive(
            f"smallest eigenvalue modulus {m_minus:.12g} is not > 1")
    lam_minus = m_minus ** (1.0 - _STRICTNESS_EPS)
    lam_plus = m_plus ** (1.0 + _STRICTNESS_EPS)
    return DilationParams(
        matrix=m.copy(), dimension=d, b=b, m_minus=m_minus, m_plus=m_plus,
        lambda_minus=lam_minus, lambda_plus=lam_plus,
        zeta_minus=math.log(lam_minus) / math.log(b),
        zeta_plus=math.log(lam_plus) / math.log(b))


@dataclass(frozen=True)
class Ellipsoid:
    """Open set {x : x^T Q x < 1}, volume-normalized to measure exactly 1."""

    shape: np.ndarray
    contraction_ratio: float

    @property
    def dimension(self):
        return self.shape.shape[0]

    def quadratic_form(self, x):
        """q(x) = x^T Q x, vectorized over the last axis."""
        x = np.asarray(x, dtype=float)
        return np.einsum("...i,ij,...j->...", x, self.shape, x)


def contraction_ratio(params, shape):
    """max over x != 0 of q(A^-1 x)/q(x) for q given by `shape`."""
    a_inv = np.linalg.inv(params.matrix)
    m = a_inv.T @ shape @ a_inv
    # generalized eigenproblem M v = mu Q v; for d <= 2 solve Q^-1 M directly
    vals = np.linalg.eigvals(np.linalg.solve(shape, m))
    return float(np.max(vals.real))


def construct_ellipsoid(params, r=None):
    """Build the nested ellipsoid from the convergent series
    Q = sum_k r^(2k) (A^-k)^T (A^-k), then normalize to unit volume.
    """
    if r is None:
        r = math.sqrt(params.m_minus)
    if not (1.0 < r < params.m_minus):
        raise InvalidRatio(f"r={r} must lie in (1, {params.m_minus})")
    d = params.dimension
    a_inv = np.linalg.inv(params.matrix)
    q = np.eye(d)
    term_map = np.eye(d)
    for k in range(1, 201):
        term_map = term_map @ a_inv
        incr = (r ** (2 * k)) * (term_map.T @ term_map)
        q = q + incr
        if np.linalg.norm(incr, "fro") < 1e-12:
            break
    else:
        raise TruncationFailure("ellipsoid series did not converge in 200 terms")
    q = 0.5 * (q + q.T)
    # rescale so det Q = omega_d^2, i.e. |Delta| = 1 exactly
    scale = (_OMEGA[d] ** 2 / np.linalg.det(q)) ** (1.0 / d)
    q = q * scale
    rho = contraction_ratio(params, q)
    return Ellipsoid(shape=q, contraction_ratio=rho)


@dataclass(frozen=True)
class Rectangle:
    """Axis-aligned rectangle centered at 0, given by per-axis half widths."""

    half_widths: np.ndarray

    @property
    def dimension(self):
        return len(self.half_widths)

    def vertices(self):
        h = self.half_widths
        if len(h) == 1:
            return np.array([[-h[0]], [h[0]]])
        return np.array([[sx * h[0], sy * h[1]]
                         for sx in (-1, 1) for sy in (-1, 1)])


def bounding_rectangle(ellipsoid):
    """Smallest axis-aligned rectangle containing the ellipsoid."""
    q_inv = np.linalg.inv(ellipsoid.shape)
    return Rectangle(half_widths=np.sqrt(np.diag(q_inv)))


@dataclass(frozen=True)
class CoveringExponent:
    M: int


def covering_exponent(params, ellipsoid, rectangle):
    """Smallest M >= 0 with A^-M(R) inside the closed ellipsoid.

    The max of a convex quadratic over a box sits at a vertex, so the
    vertex test is exact.
    """
    verts = rectangle.vertices()
    a_inv = np.linalg.inv(params.matrix)
    mapped = verts.astype(float)
    for m in range(0, 256):
        if np.max(ellipsoid.quadratic_form(mapped)) <= 1.0:
            return CoveringExponent(M=m)
        mapped = mapped @ a_inv.T
    raise GeometryError("covering exponent search exceeded 256 iterations")


class QuasiNormContext:
    """Step quasi-norm rho(x) = b^k on the shell Delta_{k+1} minus Delta_k.

    Integer matrix powers are cached; the containment test itself is exact,
    so the returned scale index does not depend on the search heuristics.
    """

    def __init__(self, params, ellipsoid):
        self.params = params
        self.ellipsoid = ellipsoid
        self._powers = {0: np.eye(params.dimension)}
        self._a = params.matrix
        self._a_inv = np.linalg.inv(params.matrix)

    def power(self, k):
        cache = self._powers
        if k not in cache:
            # build incrementally from the nearest cached power toward 0
            if k > 0:
                base = max(j for j in cache if 0 <= j < k)
                p = cache[base]
                for j in range(base + 1, k + 1):
                    p = p @ self._a
                    cache[j] = p
            else:
                base = min(j for j in cache if k < j <= 0)
                p = cache[base]
                for j in range(base - 1, k - 1, -1):
                    p = p @ self._a_inv
                    cache[j] = p
        return cache[k]

    def q(self, x):
        return self.ellipsoid.quadratic_form(x)

    def q_at_scale(self, k, x):
        """q(A^-k x), vectorized over points in the leading axes of x."""
        return self.ellipsoid.quadratic_form(np.asarray(x, float) @ self.power(-k).T)

    def inside(self, k, x):
        """x in Delta_k (open)."""
        return self.q_at_scale(k, x) < 1.0

    def scale_index(self, x):
        """Unique k with x in Delta_{k+1} minus Delta_k."""
        x = np.asarray(x, dtype=float)
        qx = float(self.q(x))
        if qx == 0.0:
            raise ValueError("scale_index undefined at the origin")
        zbar = 0.5 * (self.params.zeta_minus + self.params.zeta_plus)
        logb = math.log(self.params.b)
        k0 = int(round(math.log(qx) / logb / (2.0 * zbar))) if qx > 0 else 0
        # bracket [lo, hi] with x outside Delta_lo and inside Delta_hi
        lo, hi = k0, k0
        step = 1
        while not self.inside(hi, x):
            hi += step
            step *= 2
        step = 1
        while self.inside(lo, x):
            lo -= step
            step *= 2
        # binary search on the monotone membership predicate
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if self.inside(mid, x):
                hi = mid
            else:
                lo = mid
        return hi - 1

    def scale_indices(self, points, k_lo, k_hi):
        """Vectorized scale_index over a point cloud.

        Values in [k_lo, k_hi] are exact; indices below are clamped to
        k_lo - 1 and indices above to k_hi + 1.
        """
        pts = np.asarray(points, dtype=float)
        n = pts.shape[0]
        idx = np.full(n, k_hi + 1, dtype=int)
        prev_inside = np.zeros(n, dtype=bool)
        for k in range(k_lo, k_hi + 2):
            ins = self.q_at_scale(k, pts) < 1.0
            idx[ins & ~prev_inside] = k - 1
            prev_inside |= ins
        return idx

    def quasi_norm(self, x):
        x = np.asarray(x, dtype=float)
        if float(self.q(x)) == 0.0:
            return 0.0
        return self.params.b ** self.scale_index(x)


def growth_bounds(ctx, samples):
    """Smallest c >= 1 making the four quasi-norm/Euclidean comparison
    inequalities hold on the sample."""
    samples = np.asarray(samples, dtype=float)
    if samples.size == 0:
        raise EmptySample("growth_bounds needs a nonempty sample")
    zm, zp = ctx.params.zeta_minus, ctx.params.zeta_plus
    c = 1.0
    for x in samples:
        rho = ctx.quasi_norm(x)
        if rho == 0.0:
            continue
        nx = float(np.linalg.norm(x))
        if rho >= 1.0:
            lo_exp, hi_exp = zm, zp
        else:
            lo_exp, hi_exp = zp, zm
        # c^-1 rho^lo <= |x| <= c rho^hi
        c = max(c, rho ** lo_exp / nx, nx / rho ** hi_exp)
    return c


def triangle_constant(ctx, n_dirs, rel_scales=range(-2, 3)):
    """Fitted quasi-triangle constant: max of rho(x + y)/(rho(x) + rho(y))
    over a dense deterministic scan.

    The ratio is invariant when x and y are dilated by A together, so x may
    be pinned to the outer boundary of the shell Delta_1 minus Delta; y runs
    over the same boundary directions at a few relative dyadic scales. The
    fit is a lower bound for the true constant; its stability under doubling
    n_dirs is the reported quality signal.
    """
    if n_dirs < 2:
        raise EmptySample("triangle_constant needs at least two directions")
    d = ctx.params.dimension
    if d == 1:
        dirs = np.array([[-1.0], [1.0]])
    else:
        theta = 2.0 * math.pi * np.arange(n_dirs) / n_dirs
        dirs = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    # scale each direction onto the outer edge of Delta_1
    q_at = ctx.q_at_scale(1, dirs)
    edge = dirs * np.sqrt((1.0 - 1e-9) / q_at)[:, None]
    c = 0.0
    for x in edge:
        rx = ctx.quasi_norm(x)
        for m in rel_scales:
            ys = edge @ ctx.power(m).T
            for y in ys:
                ry = ctx.quasi_norm(y)
                rs = ctx.quasi_norm(x + y)
                if rs > 0.0:
                    c = max(c, rs / (rx + ry))
    return c


def cell_index(adjoint_params, rect_star, k, x):
    """Lattice cell of x under the half-open tiling by (A*)^k(R*(alpha))."""
    return cell_indices(adjoint_params, rect_star, k, np.asarray(x, float)[None, :])[0]


def cell_indices(adjoint_params, rect_star, k, points):
    """Vectorized cell_index; points has shape (n, d)."""
    inv_pow = np.linalg.matrix_power(np.linalg.inv(adjoint_params.matrix), k) \
        if k >= 0 else np.linalg.matrix_power(adjoint_params.matrix, -k)
    y = np.asarray(points, dtype=float) @ inv_pow.T
    widths = 2.0 * rect_star.half_widths
    return np.floor(y / widths + 0.5).astype(int)


def _convex_polys_intersect(pa, pb):
    """Separating-axis test for two convex polygons given as vertex loops."""
    for poly in (pa, pb):
        n = len(poly)
        for i in range(n):
            edge = poly[(i + 1) % n] - poly[i]
            axis = np.array([-edge[1], edge[0]])
            proj_a = pa @ axis
            proj_b = pb @ axis
            if proj_a.max() < proj_b.min() or proj_b.max() < proj_a.min():
                return False
    return True


def shell_cover_count(adjoint_params, rect_star, n_exp, l):
    """Number of scale-(l-N) lattice cells whose closure meets the shell
    (A*)^l(R*) minus (A*)^{l-N}(R*).

    Computed in lattice coordinates at scale l-N, where the count is
    manifestly independent of l: cells are the unit translates R*(alpha) and
    the outer region is the parallelogram (A*)^N(R*).
    """
    d = adjoint_params.dimension
    h = rect_star.half_widths
    a_pow = np.linalg.matrix_power(adjoint_params.matrix, n_exp)
    if d == 1:
        outer = abs(a_pow[0, 0]) * h[0]
        count = 0
        alpha_max = int(math.floor(outer / (2 * h[0]) + 0.5)) + 1
        for a in range(-alpha_max, alpha_max + 1):
            if a == 0:
                continue
            lo, hi = 2 * h[0] * a - h[0], 2 * h[0] * a + h[0]
            if hi >= -outer and lo <= outer:
                count += 1
        return count
    # d == 2: outer parallelogram = image of the rectangle's vertex loop
    loop = np.array([[-h[0], -h[1]], [h[0], -h[1]], [h[0], h[1]], [-h[0], h[1]]])
    outer = loop @ a_pow.T
    span = np.ceil(np.abs(outer).max(axis=0) / (2 * h)).astype(int) + 1
    count = 0
    for a0 in range(-span[0], span[0] + 1):
        for a1 in range(-span[1], span[1] + 1):
            if a0 == 0 and a1 == 0:
                continue
            c = 2 * h * np.array([a0, a1], float)
            cell = loop + c
            if _convex_polys_intersect(cell, outer):
                count += 1
    return count


@dataclass(frozen=True)
class Geometry:
    """Full geometric context for one dilation matrix: primal and adjoint
    parameters, ellipsoids, bounding rectangles and covering exponents."""

    params: DilationParams
    ellipsoid: Ellipsoid
    rectangle: Rectangle
    M: int
    adjoint_params: DilationParams
    adjoint_ellipsoid: Ellipsoid
    adjoint_rectangle: Rectangle
    N: int
    qnorm: QuasiNormContext = field(repr=False)
    adjoint_qnorm: QuasiNormContext = field(repr=False)

    @property
    def b(self):
        return self.params.b


def build_geometry(matrix, r=None):
    params = validate_dilation(matrix)
    ell = construct_ellipsoid(params, r)
    rect = bounding_rectangle(ell)
    m_exp = covering_exponent(params, ell, rect).M
    adj = params.adjoint_params()
    adj_ell = construct_ellipsoid(adj, r)
    adj_rect = bounding_rectangle(adj_ell)
    n_exp = covering_exponent(adj, adj_ell, adj_rect).M
    return Geometry(
        params=params, ellipsoid=ell, rectangle=rect, M=m_exp,
        adjoint_params=adj, adjoint_ellipsoid=adj_ell,
        adjoint_rectangle=adj_rect, N=n_exp,
        qnorm=QuasiNormContext(params, ell),
        adjoint_qnorm=QuasiNormContext(adj, adj_ell))


def geometry_report(geo):
    """JSON-ready summary of the geometric data."""
    p = geo.params
    return {
        "b": p.b,
        "m_minus": p.m_minus,
        "m_plus": p.m_plus,
        "zeta_minus": p.zeta_minus,
        "zeta_plus": p.zeta_plus,
        "Q": geo.ellipsoid.shape.tolist(),
        "half_widths": geo.rectangle.half_widths.tolist(),
        "M": geo.M,
        "N": geo.N,
        "contraction_ratio": geo.ellipsoid.contraction_ratio,
    }
