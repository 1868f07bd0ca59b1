"""Anisotropic Littlewood-Paley windows and the square-function H^1 proxy.

The window eta is built from two smooth radial-in-q* cutoffs whose plateaus
are pinned to the adjoint ellipsoid's contraction ratio, so the support and
plateau constraints hold by construction. The H^1 norm is accessed only
through ||g(f)||_1.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import Geometry
from .spectral import Grid, SampledFunction, chi_kernel, fourier_at, sample_shell


class HardyError(Exception):
    pass


class GridTooCoarse(HardyError):
    pass


class SpectralLeak(HardyError):
    pass


class ThresholdViolation(HardyError):
    pass


class InvalidExponent(HardyError):
    pass


# ---------------------------------------------------------------------------
# smooth cutoffs

_GL_NODES = np.polynomial.legendre.leggauss(80)


def _bump(u):
    out = np.zeros_like(u)
    inside = (u > 0.0) & (u < 1.0)
    ui = u[inside]
    # near the endpoints 1/(u(1-u)) overflows to inf; exp(-inf) = 0 is right
    with np.errstate(over="ignore"):
        out[inside] = np.exp(-1.0 / (ui * (1.0 - ui)))
    return out


_BUMP_TOTAL = float(0.5 * _GL_NODES[1] @ _bump(0.5 * (_GL_NODES[0] + 1.0)))


def smooth_step(t):
    """C-infinity step: 0 for t <= 0, 1 for t >= 1, the normalized integral
    of exp(-1/(u(1-u))) in between."""
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    out = np.clip(t, 0.0, 1.0).copy()
    mid = (t > 0.0) & (t < 1.0)
    if np.any(mid):
        tm = t[mid]
        x, w = _GL_NODES
        # nodes for [0, t] per point
        u = 0.5 * tm[:, None] * (x[None, :] + 1.0)
        vals = _bump(u) @ w * (0.5 * tm)
        out[mid] = vals / _BUMP_TOTAL
    return float(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# the Littlewood-Paley family

@dataclass
class LPFamily:
    """Frequency window Psi-hat with its dilates tiling frequency space."""

    geometry: Geometry
    grid: Grid
    j_range: tuple
    eta_spec: dict
    psi_hat: SampledFunction
    partition_defect: float
    _freqs: np.ndarray = field(repr=False)
    _freq_shape: tuple = field(repr=False)
    _adj_inv: np.ndarray = field(repr=False)

    # -- window evaluation -------------------------------------------------
    def _qstar(self, xi):
        return self.geometry.adjoint_ellipsoid.quadratic_form(xi)

    def eta(self, xi):
        """Smooth bump: 1 on A*(Delta*) minus Delta*, supported in
        (A*)^2(Delta*) minus (A*)^-1(Delta*)."""
        xi = np.atleast_2d(np.asarray(xi, float))
        rho = self.eta_spec["plateau_in"]
        s_out = self.eta_spec["cutoff_out"]
        q_prev = self._qstar(xi @ self._adj_inv.T)
        q_here = self._qstar(xi)
        theta_out = 1.0 - smooth_step((q_prev - 1.0) / (s_out - 1.0))
        theta_in = 1.0 - smooth_step((q_here - rho) / (1.0 - rho))
        return theta_out * (1.0 - theta_in)

    def psi_hat_at(self, xi, j=0):
        """Psi-hat((A*)^-j xi) = eta / (finite sum of its dilates)."""
        xi = np.atleast_2d(np.asarray(xi, float))
        adj = self.geometry.adjoint_params.matrix
        zeta = xi @ np.linalg.matrix_power(self._adj_inv, j).T if j >= 0 \
            else xi @ np.linalg.matrix_power(adj, -j).T
        num = self.eta(zeta)
        denom = np.zeros_like(num)
        for i in range(-2, 3):
            pw = np.linalg.matrix_power(self._adj_inv, i) if i >= 0 \
                else np.linalg.matrix_power(adj, -i)
            denom += self.eta(zeta @ pw.T)
        out = np.zeros_like(num)
        nz = num > 0.0
        out[nz] = num[nz] / denom[nz]
        return out

    # -- grid helpers ------------------------------------------------------
    def fft_freqs(self):
        return self._freqs

    def multiplier(self, j):
        """Psi-hat_j on the fft frequency grid, shaped like the grid."""
        return self.psi_hat_at(self._freqs, j).reshape(self._freq_shape)

    def shell_masks(self, m_lo, m_hi):
        """Boolean mask of fft freqs xi with rho*(xi) in [b^m_lo, b^m_hi]."""
        adj = self.geometry.adjoint_params.matrix
        inner = np.linalg.matrix_power(np.linalg.inv(adj), m_lo) if m_lo >= 0 \
            else np.linalg.matrix_power(adj, -m_lo)
        outer_pow = m_hi + 1
        outer = np.linalg.matrix_power(np.linalg.inv(adj), outer_pow) if outer_pow >= 0 \
            else np.linalg.matrix_power(adj, -outer_pow)
        q_in = self._qstar(self._freqs @ inner.T)
        q_out = self._qstar(self._freqs @ outer.T)
        return (q_in >= 1.0) & (q_out < 1.0)


def build_lp_family(geo, grid, j_range, certified_shells=None):
    """Construct the window family on a spatial grid's fft frequencies.

    `certified_shells`, when given as (lo, hi), is the band of shells the
    caller relies on for accurate per-band norms; each such shell must hold
    at least 8 grid frequencies or GridTooCoarse is raised. Shells outside
    the certified band (in particular near-zero frequencies) still get exact
    multiplier values, just on fewer points.
    """
    j_min, j_max = j_range
    axes = [np.fft.fftfreq(n, d=h) for n, h in zip(grid.shape, grid.spacing)]
    mesh = np.meshgrid(*axes, indexing="ij")
    freqs = np.stack([m.ravel() for m in mesh], axis=-1)
    rho = geo.adjoint_ellipsoid.contraction_ratio
    family = LPFamily(
        geometry=geo, grid=grid, j_range=(j_min, j_max),
        eta_spec={"plateau_in": rho, "cutoff_out": 1.0 / rho},
        psi_hat=None, partition_defect=0.0,
        _freqs=freqs, _freq_shape=grid.shape,
        _adj_inv=np.linalg.inv(geo.adjoint_params.matrix))
    if certified_shells is not None:
        for j in range(certified_shells[0], certified_shells[1] + 1):
            n_pts = int(family.shell_masks(j, j).sum())
            if n_pts < 8:
                raise GridTooCoarse(
                    f"shell {j} has only {n_pts} grid frequencies")
    psi0 = family.psi_hat_at(freqs, 0).reshape(grid.shape)
    family.psi_hat = SampledFunction(grid=grid, values=psi0)
    band = family.shell_masks(j_min + 3, j_max - 3)
    if np.any(band):
        total = np.zeros(freqs.shape[0])
        for j in range(j_min, j_max + 1):
            total += family.psi_hat_at(freqs, j)
        family.partition_defect = float(np.abs(total[band] - 1.0).max())
    return family


def default_j_range(geo, grid):
    """Shell span (lo, hi) such that every nonzero fft frequency of the grid
    sits strictly inside the covered band [lo+1, hi-1]."""
    axes = [np.fft.fftfreq(n, d=h) for n, h in zip(grid.shape, grid.spacing)]
    mesh = np.meshgrid(*axes, indexing="ij")
    freqs = np.stack([m.ravel() for m in mesh], axis=-1)
    nz = freqs[np.any(freqs != 0.0, axis=1)]
    idx = geo.adjoint_qnorm.scale_indices(nz, -200, 200)
    return int(idx.min()) - 1, int(idx.max()) + 1


# ---------------------------------------------------------------------------
# the square function

@dataclass(frozen=True)
class SquareFunctionResult:
    g_values: SampledFunction
    l1_norm: float
    band_l1: dict
    band_l2: dict


def square_function(f, family, leak_tol=1e-6):
    """g(f) = (sum_j |Psi_j * f|^2)^(1/2) computed on the fft grid."""
    if f.grid.shape != family.grid.shape:
        raise HardyError("function grid does not match the family grid")
    j_min, j_max = family.j_range
    f_hat = np.fft.fftn(f.values)
    # all nonzero-frequency mass must sit on shells the j-window covers
    covered = family.shell_masks(j_min + 1, j_max - 1)
    power = np.abs(f_hat.ravel()) ** 2
    total = float(power.sum())
    if total > 0.0:
        outside = float(power[~covered].sum())
        # the zero frequency is never "covered"; it carries int f, which must
        # be negligible for an H^1 candidate anyway
        if outside > leak_tol * total:
            raise SpectralLeak(
                f"fraction {outside / total:.3g} of spectral mass outside "
                f"resolvable shells")
    acc = np.zeros(f.grid.shape)
    band_l1, band_l2 = {}, {}
    w = f.grid.cell_volume
    for j in range(j_min, j_max + 1):
        conv = np.fft.ifftn(f_hat * family.multiplier(j))
        acc += np.abs(conv) ** 2
        band_l1[j] = float(np.abs(conv).sum()) * w
        band_l2[j] = math.sqrt(float((np.abs(conv) ** 2).sum()) * w)
    g = np.sqrt(acc)
    gf = SampledFunction(grid=f.grid, values=g)
    return SquareFunctionResult(g_values=gf, l1_norm=gf.norm_l1(),
                                band_l1=band_l1, band_l2=band_l2)


def h1_proxy(f, family, leak_tol=1e-6):
    return square_function(f, family, leak_tol=leak_tol).l1_norm


def spatial_from_spectrum(family, spectrum_flat):
    """Invert a continuum spectrum sampled on the fft frequency grid to a
    centered spatial SampledFunction."""
    grid = family.grid
    vals = np.fft.ifftn(np.asarray(spectrum_flat).reshape(grid.shape))
    vals = np.fft.fftshift(vals.real) / grid.cell_volume
    return SampledFunction(grid=grid, values=vals)


def psi_spatial(family, l):
    """The dilate Psi_{-l} as a spatial grid function."""
    return spatial_from_spectrum(family, family.psi_hat_at(family.fft_freqs(), -l))


# ---------------------------------------------------------------------------
# band-limited synthesis for the lemma experiments

def _even_envelope(d, seed, n_modes=6):
    rng = np.random.default_rng(seed)
    amps = rng.uniform(0.4, 1.0, n_modes)
    omegas = rng.uniform(0.2, 1.5, (n_modes, d))

    def envelope(zeta):
        acc = np.ones(zeta.shape[0])
        for a, om in zip(amps, omegas):
            acc = acc + a * np.cos(2.0 * math.pi * zeta @ om)
        return acc

    return envelope


def synth_band_spectrum(family, k, seed, width_shells=3, gap=0.5):
    """Real, even spectrum vanishing identically on Delta*_k and confined to
    a few shells above it. Built in normalized coordinates (A*)^-k(xi), so
    different k with the same seed give exact dilates of one another.
    """
    geo = family.geometry
    adj = geo.adjoint_params.matrix
    inv_pow = np.linalg.matrix_power(np.linalg.inv(adj), k) if k >= 0 \
        else np.linalg.matrix_power(adj, -k)
    zeta = family.fft_freqs() @ inv_pow.T
    q = geo.adjoint_ellipsoid.quadratic_form
    inner = smooth_step((q(zeta) - 1.0) / gap)
    out_pow = np.linalg.matrix_power(np.linalg.inv(adj), width_shells)
    outer = 1.0 - smooth_step((q(zeta @ out_pow.T) - 1.0) / gap)
    env = _even_envelope(geo.params.dimension, seed)
    return env(zeta) * inner * outer


def lambda_threshold(geo, r):
    """Smallest admissible Bochner-Riesz exponent for the L^r lemma."""
    r_conj = r / (r - 1.0)
    return 1.0 / (r_conj * geo.params.zeta_minus) - 0.5 * (geo.params.dimension + 1)


def lemma_lr_experiment(family, k_range, lam, r, seed=0, leak_tol=1e-3):
    """Ratios ||g chi-hat_{k,lambda}||_{H^1-proxy} / (b^(k/r) ||g||_r) over
    the scale range, for frequency-synthesized g vanishing on Delta*_k."""
    if not (1.0 < r < math.inf):
        raise InvalidExponent(f"r={r} must lie in (1, inf)")
    geo = family.geometry
    thr = lambda_threshold(geo, r)
    if lam <= thr:
        raise ThresholdViolation(f"lambda={lam} must exceed {thr:.6g}")
    b = geo.params.b
    table = {}
    for k in k_range:
        g_hat = synth_band_spectrum(family, k, seed)
        g = spatial_from_spectrum(family, g_hat)
        _, chi_hat = chi_kernel(geo, k, lam)
        f = SampledFunction(grid=family.grid,
                            values=g.values * chi_hat(family.grid.points()
                                                      ).reshape(family.grid.shape))
        # continuum moment vanishes exactly (g-hat is zero on the kernel's
        # frequency support); the grid value only sees truncation tails
        moment = abs(float(f.values.sum())) * f.quad_weight
        if moment > 1e-4 * f.norm_l1():
            raise HardyError(f"k={k}: moment {moment:.3g} did not vanish")
        proxy = h1_proxy(f, family, leak_tol=leak_tol)
        table[k] = proxy / (b ** (k / r) * g.norm_lr(r))
    return table


def lemma_h1_experiment(family, k_range, lam, seed=0, leak_tol=1e-3):
    """L^2 case: ratios against b^(k/2) ||g||_2."""
    return lemma_lr_experiment(family, k_range, lam, 2.0, seed=seed,
                               leak_tol=leak_tol)


def hausdorff_young_check(family, r, n_trials=20, seed=0):
    """||g||_r <= ||g-hat||_r' on random band-limited grid functions;
    returns the max of ||g||_r / ||g-hat||_r'."""
    if r < 2.0:
        raise InvalidExponent("Hausdorff-Young needs r >= 2")
    r_conj = r / (r - 1.0)
    grid = family.grid
    d_xi = 1.0 / np.prod([n * h for n, h in zip(grid.shape, grid.spacing)])
    worst = 0.0
    for t in range(n_trials):
        g_hat = synth_band_spectrum(family, 0, seed + 31 * t + 1)
        g = spatial_from_spectrum(family, g_hat)
        lhs = g.norm_lr(r)
        rhs = (float((np.abs(g_hat) ** r_conj).sum()) * d_xi) ** (1.0 / r_conj)
        worst = max(worst, lhs / rhs)
    return worst


# ---------------------------------------------------------------------------
# necessity / sufficiency experiments for p >= 2

def psi_necessity_test(family, l_range, mu, p, shell_samples=400, seed=0):
    """Per-l proxies of Psi_{-l}, the window's plateau minimum on the shell
    rho* = b^-l, and the measure pairing, with the annulus-mass bound."""
    if p < 2.0:
        raise InvalidExponent(f"p={p} must be >= 2")
    from .measure import annulus_mass
    geo = family.geometry
    rows = {}
    for l in l_range:
        f = psi_spatial(family, l)
        proxy = h1_proxy(f, family, leak_tol=1e-6)
        pts = sample_shell(geo.adjoint_qnorm, -l, shell_samples, seed=seed + l + 77)
        shell_min = float(family.psi_hat_at(pts, -l).min())
        if shell_min <= 0.0:
            raise GridTooCoarse(f"window vanished on shell for l={l}")
        if mu.points.shape[0]:
            vals = family.psi_hat_at(mu.points, -l)
            pairing = float((mu.weights @ vals ** p) ** (1.0 / p))
        else:
            pairing = 0.0
        mass = annulus_mass(mu, geo.adjoint_qnorm, -l)
        rows[l] = {
            "proxy": proxy,
            "shell_min": shell_min,
            "pairing": pairing,
            "annulus_mass": mass,
            "bound_holds": mass ** (1.0 / p) <= pairing / shell_min + 1e-12,
        }
    return rows


def p_sufficiency_test(family, mu, p, test_functions, shell_checks=None,
                       seed=0):
    """Max of pairing/proxy over a band-limited test family, plus the
    five-term shell partition identity."""
    if p < 2.0:
        raise InvalidExponent(f"p={p} must be >= 2")
    geo = family.geometry
    j_min, j_max = family.j_range
    ratios = []
    for f in test_functions:
        res = square_function(f, family)
        if mu.points.shape[0]:
            vals = np.abs(fourier_at(f, mu.points))
            pairing = float((mu.weights @ vals ** p) ** (1.0 / p))
        else:
            pairing = 0.0
        ratios.append(pairing / res.l1_norm if res.l1_norm > 0 else 0.0)
    if shell_checks is None:
        shell_checks = range(j_min + 3, j_max - 2)
    five_term_defect = 0.0
    for l in shell_checks:
        pts = sample_shell(geo.adjoint_qnorm, l - 1, 64, seed=seed + l + 991)
        total = np.zeros(pts.shape[0])
        for j in range(l - 2, l + 3):
            total += family.psi_hat_at(pts, j)
        five_term_defect = max(five_term_defect,
                               float(np.abs(total - 1.0).max()))
    return {"max_ratio": max(ratios) if ratios else 0.0,
            "ratios": ratios,
            "five_term_defect": five_term_defect}


def band_limited_test_functions(family, count, seed=0):
    """Seeded family of band-limited spatial test functions."""
    out = []
    j_min, j_max = family.j_range
    for t in range(count):
        k = j_min + 3 + (t % max(1, j_max - j_min - 5))
        spec = synth_band_spectrum(family, k, seed + 13 * t + 5)
        out.append(spatial_from_spectrum(family, spec))
    return out
