"""Grid-sampled functions, atoms and their Fourier analysis.

Transforms at arbitrary frequencies are direct Riemann sums (exact for the
sampled data, O(N * |freqs|)); everything here is desk scale by design.
"""

import math
from dataclasses import dataclass

import numpy as np

from .geometry import cell_indices


class SpectralError(Exception):
    pass


class DegenerateProfile(SpectralError):
    pass


class NoValidFrequencies(SpectralError):
    pass


class BoundaryLeak(SpectralError):
    pass


@dataclass(frozen=True)
class Grid:
    """Uniform rectangular grid: per-axis origin, spacing and point count."""

    origin: np.ndarray
    spacing: np.ndarray
    shape: tuple

    def __post_init__(self):
        object.__setattr__(self, "origin", np.asarray(self.origin, float))
        object.__setattr__(self, "spacing", np.asarray(self.spacing, float))
        object.__setattr__(self, "shape", tuple(int(n) for n in self.shape))
        if any(n < 2 for n in self.shape):
            raise SpectralError("grid needs at least 2 points per axis")
        if np.any(self.spacing <= 0):
            raise SpectralError("grid spacing must be positive")

    @property
    def dimension(self):
        return len(self.shape)

    @property
    def cell_volume(self):
        return float(np.prod(self.spacing))

    def axes(self):
        return [self.origin[i] + self.spacing[i] * np.arange(self.shape[i])
                for i in range(self.dimension)]

    def points(self):
        """All grid points, flattened to shape (N, d)."""
        mesh = np.meshgrid(*self.axes(), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    @classmethod
    def centered(cls, half_extent, resolution):
        """Grid over the box [-h, h)^d with `resolution` points per axis."""
        h = np.atleast_1d(np.asarray(half_extent, float))
        n = np.full(len(h), resolution, dtype=int)
        return cls(origin=-h, spacing=2.0 * h / n, shape=tuple(n))


@dataclass(frozen=True)
class SampledFunction:
    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.shape != self.grid.shape:
            raise SpectralError(f"values shape {v.shape} != grid shape {self.grid.shape}")
        if not np.all(np.isfinite(v)):
            raise SpectralError("values must be finite")
        object.__setattr__(self, "values", v)

    @property
    def quad_weight(self):
        return self.grid.cell_volume

    def integral(self):
        return complex(self.values.sum()) * self.quad_weight \
            if np.iscomplexobj(self.values) else float(self.values.sum()) * self.quad_weight

    def norm_l1(self):
        return float(np.abs(self.values).sum()) * self.quad_weight

    def norm_l2(self):
        return math.sqrt(float((np.abs(self.values) ** 2).sum()) * self.quad_weight)

    def norm_lr(self, r):
        return (float((np.abs(self.values) ** r).sum()) * self.quad_weight) ** (1.0 / r)


def fourier_at(f, freqs, chunk=256):
    """hat f(xi) = sum_j f(x_j) exp(-2 pi i x_j . xi) * cell volume.

    Direct nonuniform transform at arbitrary frequency points (m, d).
    """
    freqs = np.atleast_2d(np.asarray(freqs, float))
    if freqs.shape[0] < 1:
        raise SpectralError("need at least one frequency")
    pts = f.grid.points()
    vals = f.values.ravel()
    out = np.empty(freqs.shape[0], dtype=complex)
    for i in range(0, freqs.shape[0], chunk):
        block = freqs[i:i + chunk]
        phase = pts @ block.T  # (N, m)
        out[i:i + chunk] = vals @ np.exp(-2j * np.pi * phase)
    return out * f.quad_weight


@dataclass(frozen=True)
class Atom:
    """Grid-sampled H^1-type atom at scale k: supported in x0 + Delta_k,
    bounded by b^-k, with vanishing integral."""

    k: int
    center: np.ndarray
    carrier: SampledFunction
    mass_bound: float


def make_atom(geo, k, center, seed=0, resolution=128):
    """Build an atom from a difference of two Gaussian bumps.

    The profile is drawn in the normalized coordinates u = A^-k(x - x0), so
    atoms with the same seed at different scales are exact dilates of each
    other. Truncation to the ellipsoid, mean correction on the support and a
    final rescale enforce the three atom conditions, which are re-verified
    before returning.
    """
    if resolution < 64:
        raise SpectralError("resolution must be >= 64")
    center = np.atleast_1d(np.asarray(center, float))
    d = geo.params.dimension
    rng = np.random.default_rng(seed)
    # bump parameters in normalized coordinates, well inside the ellipsoid
    qform = geo.ellipsoid.quadratic_form
    h0 = np.sqrt(np.diag(np.linalg.inv(geo.ellipsoid.shape)))
    c1 = 0.3 * h0 * (2.0 * rng.random(d) - 1.0)
    c2 = 0.3 * h0 * (2.0 * rng.random(d) - 1.0)
    w1 = (0.15 + 0.2 * rng.random()) * h0
    w2 = (0.15 + 0.2 * rng.random()) * h0

    a_pow = np.linalg.matrix_power(geo.params.matrix, k)
    b_pow = geo.params.b ** k
    # grid over the bounding box of x0 + Delta_k
    qk_inv = a_pow @ np.linalg.inv(geo.ellipsoid.shape) @ a_pow.T
    hk = np.sqrt(np.diag(qk_inv))
    grid = Grid(origin=center - hk, spacing=2.0 * hk / resolution,
                shape=(resolution,) * d)
    pts = grid.points()
    u = np.linalg.solve(a_pow, (pts - center).T).T
    prof = (np.exp(-0.5 * (((u - c1) / w1) ** 2).sum(axis=1))
            - np.exp(-0.5 * (((u - c2) / w2) ** 2).sum(axis=1)))
    support = qform(u) < 1.0
    prof = np.where(support, prof, 0.0)
    n_supp = int(support.sum())
    if n_supp == 0:
        raise DegenerateProfile("ellipsoid support contains no grid points")
    target = b_pow ** -1 * (1.0 - 1e-6)
    for _ in range(5):
        prof = prof - np.where(support, prof.sum() / n_supp, 0.0)
        peak = np.abs(prof).max()
        if peak == 0.0:
            raise DegenerateProfile("profile collapsed to zero")
        prof = prof * (target / peak)
        if abs(prof.sum()) * grid.cell_volume <= \
                1e-13 * np.abs(prof).sum() * grid.cell_volume:
            break
    else:
        raise DegenerateProfile("mean correction did not settle in 5 passes")
    carrier = SampledFunction(grid=grid, values=prof.reshape(grid.shape))
    _verify_atom(carrier, support.reshape(grid.shape), b_pow ** -1)
    return Atom(k=k, center=center, carrier=carrier, mass_bound=b_pow ** -1)


def _verify_atom(carrier, support, bound):
    v = carrier.values
    if np.any(v[~support] != 0.0):
        raise DegenerateProfile("atom leaks outside its ellipsoid")
    if np.abs(v).max() > bound:
        raise DegenerateProfile("atom exceeds its sup bound")
    if abs(v.sum()) * carrier.quad_weight > 1e-12 * carrier.norm_l1():
        raise DegenerateProfile("atom moment did not vanish")


def sample_shell(qnorm, k, n, seed=0):
    """n random points in the shell Delta_{k+1} minus Delta_k (quasi-norm
    level set rho = b^k)."""
    rng = np.random.default_rng(seed)
    d = qnorm.params.dimension
    a_k1 = qnorm.power(k + 1)
    q = qnorm.ellipsoid.quadratic_form
    h = np.sqrt(np.diag(np.linalg.inv(qnorm.ellipsoid.shape)))
    out = np.empty((n, d))
    found = 0
    while found < n:
        # base shell Delta minus A^-1(Delta): q(u) < 1 <= q(A u)
        cand = (2.0 * rng.random((4 * n, d)) - 1.0) * h
        keep = cand[(q(cand) < 1.0) & (q(cand @ qnorm.params.matrix.T) >= 1.0)]
        take = min(len(keep), n - found)
        out[found:found + take] = keep[:take]
        found += take
    return out @ a_k1.T


def verify_atom_decay(atom, adjoint_qnorm, zeta_minus, n_samples=200,
                      shells_below=6, seed=0):
    """Max of |hat a(xi)| / (b^(k zeta-) rho*(xi)^zeta-) over frequencies
    with rho*(xi) <= b^-k."""
    if shells_below < 1:
        raise NoValidFrequencies("need at least one shell below b^-k")
    b = adjoint_qnorm.params.b
    k = atom.k
    per_shell = max(1, n_samples // shells_below)
    ratios = []
    for j in range(-k - shells_below, -k):
        xi = sample_shell(adjoint_qnorm, j, per_shell, seed=seed + j + 1000)
        vals = np.abs(fourier_at(atom.carrier, xi))
        bound = b ** (k * zeta_minus) * (b ** j) ** zeta_minus
        ratios.append(vals.max() / bound)
    if not ratios:
        raise NoValidFrequencies("empty frequency shell range")
    return max(ratios)


def pair_against_measure(atom, mu, p=1.0):
    """(sum_i w_i |hat a(x_i)|^p)^(1/p) at the measure's points."""
    if mu.points.shape[0] == 0:
        return 0.0
    vals = np.abs(fourier_at(atom.carrier, mu.points))
    return float((mu.weights @ vals ** p) ** (1.0 / p))


def cell_sup_l2(atom, geo, k, alpha_span=6, subgrid=4):
    """sum over alpha != 0 of (sampled sup over (A*)^-(k+N)(R*(alpha)) of
    |hat a|)^2.

    Each cell is probed on a subgrid x subgrid lattice plus its center.
    """
    d = geo.params.dimension
    h = geo.adjoint_rectangle.half_widths
    scale = -(k + geo.N)
    a_pow = np.linalg.matrix_power(geo.adjoint_params.matrix, scale)
    # offsets within the unit cell, in lattice coordinates
    t = (np.arange(subgrid) + 0.5) / subgrid * 2.0 - 1.0
    if d == 1:
        offs = np.concatenate([t, [0.0]])[:, None] * h
        alphas = [(a,) for a in range(-alpha_span, alpha_span + 1) if a != 0]
    else:
        mesh = np.stack(np.meshgrid(t, t, indexing="ij"), axis=-1).reshape(-1, 2)
        offs = np.concatenate([mesh, [[0.0, 0.0]]]) * h
        alphas = [(a0, a1)
                  for a0 in range(-alpha_span, alpha_span + 1)
                  for a1 in range(-alpha_span, alpha_span + 1)
                  if (a0, a1) != (0,) * 2]
    sample_pts = []
    for alpha in alphas:
        centers = 2.0 * h * np.asarray(alpha, float)
        sample_pts.append((centers + offs) @ a_pow.T)
    pts = np.concatenate(sample_pts)
    vals = np.abs(fourier_at(atom.carrier, pts)).reshape(len(alphas), -1)
    sups = vals.max(axis=1)
    return float(math.fsum((sups ** 2).tolist()))


def _check_boundary_decay(f):
    v = np.abs(f.values)
    peak = v.max()
    if peak == 0.0:
        return
    if f.grid.dimension == 1:
        edge = max(v[0], v[-1])
    else:
        edge = max(v[0, :].max(), v[-1, :].max(), v[:, 0].max(), v[:, -1].max())
    if edge > 1e-10 * max(peak, 1.0):
        raise BoundaryLeak(f"boundary value {edge:.3g} too large")


def _interval_sups(axis_pts, values_sq, length):
    """Group grid points into the half-open intervals I(alpha) and return the
    per-interval sup of |f|^2 (dict alpha -> sup)."""
    alphas = np.floor(axis_pts / length + 0.5).astype(int)
    sups = {}
    for a, v in zip(alphas, values_sq):
        if v > sups.get(a, -1.0):
            sups[a] = v
    return sups


def sobolev_sup_sum_1d(f, f_prime, length):
    """Compare sum_alpha sup_{I(alpha)} |f|^2 with
    (1/|I|) int |f|^2 + |I| int |f'|^2 (the sharp constant is 2)."""
    _check_boundary_decay(f)
    x = f.grid.axes()[0]
    sups = _interval_sups(x, np.abs(f.values) ** 2, length)
    lhs = math.fsum(sups[a] for a in sorted(sups))
    rhs = (f.norm_l2() ** 2 / length + length * f_prime.norm_l2() ** 2)
    ratio = lhs / rhs if rhs > 0 else 0.0
    return lhs, rhs, ratio


def sobolev_sup_sum_2d(f, d1f, d2f, d21f, lengths):
    """2D sup-sum inequality: lhs against the four right-hand terms
    |I1|/|I2| int |d1 f|^2 + |Q| int |d2 d1 f|^2 + |I2|/|I1| int |d2 f|^2
    + 1/|Q| int |f|^2."""
    _check_boundary_decay(f)
    l1, l2 = lengths
    ax1, ax2 = f.grid.axes()
    a1 = np.floor(ax1 / l1 + 0.5).astype(int)
    a2 = np.floor(ax2 / l2 + 0.5).astype(int)
    sq = np.abs(f.values) ** 2
    sups = {}
    for i in range(len(ax1)):
        row = sq[i]
        for j in range(len(ax2)):
            key = (a1[i], a2[j])
            if row[j] > sups.get(key, -1.0):
                sups[key] = row[j]
    lhs = math.fsum(sups[k] for k in sorted(sups))
    area = l1 * l2
    terms = [
        (l1 / l2) * d1f.norm_l2() ** 2,
        area * d21f.norm_l2() ** 2,
        (l2 / l1) * d2f.norm_l2() ** 2,
        f.norm_l2() ** 2 / area,
    ]
    rhs = math.fsum(terms)
    ratio = lhs / rhs if rhs > 0 else 0.0
    return lhs, terms, ratio


# ---------------------------------------------------------------------------
# Bessel functions and Bochner-Riesz kernels

_BESSEL_SWITCH = 12.0


def bessel_j(nu, z):
    """J_nu(z) for real nu >= 0, z >= 0: power series up to z = 12, then the
    large-argument asymptotic expansion."""
    if z < 0 or nu < 0:
        raise ValueError("bessel_j requires nu >= 0 and z >= 0")
    if z <= _BESSEL_SWITCH:
        return _bessel_series(nu, z)
    return _bessel_asymptotic(nu, z)


def _bessel_series(nu, z):
    if z == 0.0:
        return 1.0 if nu == 0.0 else 0.0
    log_half_z = math.log(0.5 * z)
    total = 0.0
    sign = 1.0
    for m in range(200):
        log_term = ((2 * m + nu) * log_half_z
                    - math.lgamma(m + 1) - math.lgamma(m + nu + 1))
        term = sign * math.exp(log_term)
        total += term
        if abs(term) < 1e-16 * max(abs(total), 1e-300):
            return total
        sign = -sign
    return total


def _bessel_asymptotic(nu, z):
    mu = 4.0 * nu * nu
    # P ~ sum of even terms, Q ~ odd terms in the 1/(8z) expansion
    p_sum, q_sum = 1.0, 0.0
    term = 1.0
    for s in range(1, 30):
        term *= (mu - (2 * s - 1) ** 2) / (s * 8.0 * z)
        if s % 2 == 1:
            q_sum += term if (s // 2) % 2 == 0 else -term
        else:
            p_sum += term if (s // 2) % 2 == 0 else -term
        if abs(term) < 1e-17:
            break
    omega = z - 0.5 * nu * math.pi - 0.25 * math.pi
    return math.sqrt(2.0 / (math.pi * z)) * (p_sum * math.cos(omega)
                                             - q_sum * math.sin(omega))


def bessel_j_integral(nu, z, nodes=400):
    """Schlaefli integral representation, the independent oracle:
    (1/pi) int_0^pi cos(nu t - z sin t) dt
    - sin(nu pi)/pi int_0^inf exp(-nu t - z sinh t) dt.
    """
    x, w = np.polynomial.legendre.leggauss(nodes)
    t1 = 0.5 * math.pi * (x + 1.0)
    part1 = 0.5 * math.pi * float(w @ np.cos(nu * t1 - z * np.sin(t1))) / math.pi
    if z == 0.0:
        tail_hi = 50.0 / max(nu, 1e-9)
    else:
        tail_hi = max(4.0, math.asinh(50.0 / z) + 4.0)
    t2 = 0.5 * tail_hi * (x + 1.0)
    integrand = np.exp(-nu * t2 - z * np.sinh(t2))
    part2 = 0.5 * tail_hi * float(w @ integrand)
    return part1 - math.sin(nu * math.pi) / math.pi * part2


def bochner_riesz_inverse(lam, d, radii):
    """Inverse transform of (1-|xi|^2)^lambda_+ on the unit ball:
    Gamma(lam+1)/pi^lam * J_{d/2+lam}(2 pi r) / r^(d/2+lam)."""
    if lam <= -1:
        raise ValueError("lambda must exceed -1")
    nu = 0.5 * d + lam
    pref = math.gamma(lam + 1.0) / math.pi ** lam
    out = []
    for r in np.atleast_1d(np.asarray(radii, float)):
        r = abs(float(r))
        if r == 0.0:
            out.append(pref * math.pi ** nu / math.gamma(nu + 1.0))
        else:
            out.append(pref * bessel_j(nu, 2.0 * math.pi * r) / r ** nu)
    return np.array(out)


def bochner_riesz_quadrature(lam, d, radii, nodes=400, angular=512):
    """Same values by direct quadrature of the radial Fourier integral; no
    Bessel evaluation involved, so it cross-checks the closed form."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    u = 0.5 * (x + 1.0)          # radius in [0, 1]
    wu = 0.5 * w
    out = []
    for r in np.atleast_1d(np.asarray(radii, float)):
        r = abs(float(r))
        if d == 1:
            val = 2.0 * float(wu @ ((1.0 - u ** 2) ** lam
                                    * np.cos(2.0 * math.pi * r * u)))
        else:
            theta = 2.0 * math.pi * np.arange(angular) / angular
            phase = np.cos(2.0 * math.pi * r * np.outer(u, np.cos(theta)))
            ang = phase.mean(axis=1) * 2.0 * math.pi
            val = float(wu @ ((1.0 - u ** 2) ** lam * u * ang))
        out.append(val)
    return np.array(out)


def riesz_decay_product(lam, d, max_radius=1e3, n=400):
    """sup over |x| <= max_radius of |m_lambda_inv(x)| (1 + |x|^((d+1)/2+lam)).
    Finiteness mirrors the kernel's stated decay rate."""
    radii = np.concatenate([[0.0], np.geomspace(1e-3, max_radius, n)])
    vals = np.abs(bochner_riesz_inverse(lam, d, radii))
    weight = 1.0 + radii ** (0.5 * (d + 1) + lam)
    return float((vals * weight).max())


def ellipsoid_factor(ellipsoid):
    """Upper-triangular P with P^T P = Q, so Delta = P^-1(B(0,1))."""
    return np.linalg.cholesky(ellipsoid.shape).T


def chi_kernel(geo, k, lam):
    """chi_{k,lambda}(x) = (1 - |P (A*)^-k x|^2)^lambda_+ as a callable plus
    its analytic transform via the Bochner-Riesz closed form."""
    p_mat = ellipsoid_factor(geo.adjoint_ellipsoid)
    d = geo.params.dimension
    adj = geo.adjoint_params.matrix
    adj_neg_k = np.linalg.matrix_power(np.linalg.inv(adj), k) if k >= 0 \
        else np.linalg.matrix_power(adj, -k)
    a_pow_k = np.linalg.matrix_power(geo.params.matrix, k)
    p_inv_adj = np.linalg.inv(p_mat).T
    det_p = abs(np.linalg.det(p_mat))
    b_k = geo.params.b ** k

    def chi(x):
        y = np.atleast_2d(np.asarray(x, float)) @ (p_mat @ adj_neg_k).T
        s = (y ** 2).sum(axis=1)
        return np.where(s <= 1.0, (1.0 - np.minimum(s, 1.0)) ** lam, 0.0)

    def chi_hat(xi):
        y = np.atleast_2d(np.asarray(xi, float)) @ (p_inv_adj @ a_pow_k).T
        r = np.sqrt((y ** 2).sum(axis=1))
        return b_k / det_p * bochner_riesz_inverse(lam, d, r)

    return chi, chi_hat


def chi_transform_check(geo, k, lam, freqs, resolution=8192):
    """Max relative error between the grid-quadrature transform of
    chi_{k,lambda} and its closed form, over the given frequencies."""
    chi, chi_hat = chi_kernel(geo, k, lam)
    d = geo.params.dimension
    adj_pow = np.linalg.matrix_power(geo.adjoint_params.matrix, k)
    # support bounding box: (A*)^k applied to the adjoint rectangle
    box = np.abs(geo.adjoint_rectangle.vertices() @ adj_pow.T).max(axis=0)
    res = resolution if d == 1 else min(resolution, 512)
    grid = Grid.centered(box * 1.001, res)
    f = SampledFunction(grid=grid, values=chi(grid.points()).reshape(grid.shape))
    numeric = fourier_at(f, freqs)
    closed = chi_hat(freqs)
    scale = float(np.abs(closed).max())
    return float(np.max(np.abs(numeric - closed) / np.maximum(np.abs(closed),
                                                              1e-3 * scale)))
