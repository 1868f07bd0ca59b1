"""Named verification suites.

Each suite is a deterministic, seeded experiment that returns a SuiteReport
with its headline metrics and a pass flag against a fixed threshold. The
suites are what the `verify` CLI subcommand runs.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import build_geometry
from .measure import discretize_density, criterion_sup, annulus_sup
from .spectral import (Grid, SampledFunction, make_atom, verify_atom_decay,
                       pair_against_measure, cell_sup_l2, sobolev_sup_sum_1d,
                       sobolev_sup_sum_2d, bessel_j, bessel_j_integral,
                       bochner_riesz_inverse, bochner_riesz_quadrature,
                       chi_transform_check)
from . import hardy


class SuiteError(Exception):
    pass


@dataclass
class SuiteReport:
    name: str
    passed: bool
    metrics: dict
    thresholds: dict
    notes: list = field(default_factory=list)

    def to_dict(self):
        return {
            "name": self.name,
            "passed": bool(self.passed),
            "metrics": _jsonable(self.metrics),
            "thresholds": _jsonable(self.thresholds),
            "notes": list(self.notes),
        }


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(obj[k]) for k in sorted(obj)}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


def _default_geometry(d=1):
    if d == 1:
        return build_geometry(np.array([[2.0]]))
    return build_geometry(np.array([[2.0, 1.0], [0.0, 2.0]]))


def _default_family(geo, half_extent=32.0, resolution=4096,
                    certified=(-2, 4)):
    grid = Grid.centered(np.full(geo.params.dimension, half_extent), resolution)
    return hardy.build_lp_family(geo, grid, hardy.default_j_range(geo, grid),
                                 certified_shells=certified)


# ---------------------------------------------------------------------------

def suite_atom_decay(seed=0, k_range=range(-3, 4), resolution=128):
    """Scale stability of the atom transform decay constant and of the
    lattice-cell sup-l2 sums, including a subgrid refinement check."""
    geo = _default_geometry(2)
    zeta = geo.params.zeta_minus
    decay, cell, cell_fine = {}, {}, {}
    for k in k_range:
        atom = make_atom(geo, k, np.zeros(2), seed=seed, resolution=resolution)
        decay[k] = verify_atom_decay(atom, geo.adjoint_qnorm, zeta, seed=seed)
        cell[k] = cell_sup_l2(atom, geo, k, alpha_span=4, subgrid=4)
        cell_fine[k] = cell_sup_l2(atom, geo, k, alpha_span=4, subgrid=8)
    decay_spread = max(decay.values()) / min(decay.values())
    cell_spread = max(cell.values()) / min(cell.values())
    refine = max(abs(cell_fine[k] - cell[k]) / cell[k] for k in cell)
    metrics = {"decay_spread": decay_spread, "cell_spread": cell_spread,
               "cell_refinement_change": refine,
               "decay_per_k": {str(k): v for k, v in decay.items()},
               "cell_per_k": {str(k): v for k, v in cell.items()}}
    thr = {"decay_spread": 2.0, "cell_spread": 3.0,
           "cell_refinement_change": 0.10}
    passed = (decay_spread <= 2.0 and cell_spread <= 3.0 and refine < 0.10)
    return SuiteReport("atom-decay", passed, metrics, thr)


def _sobolev_1d_case(a, b_coef, s, length, half=12.0, n=4096):
    grid = Grid.centered(np.array([half * s]), n)
    x = grid.points()[:, 0]
    e = np.exp(-x ** 2 / (2.0 * s * s))
    f = (a + b_coef * x) * e
    fp = (b_coef - (a + b_coef * x) * x / (s * s)) * e
    fs = SampledFunction(grid=grid, values=f)
    fps = SampledFunction(grid=grid, values=fp)
    return sobolev_sup_sum_1d(fs, fps, length)


def suite_sobolev_1d(seed=0, n_cases=12):
    """Interval sup-sum inequality with sharp constant 2, plus exact
    invariance under dyadic rescaling of function and interval together."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_cases):
        a = rng.uniform(-1.0, 1.0)
        b_coef = rng.uniform(-1.0, 1.0)
        s = rng.uniform(0.5, 2.0)
        length = rng.choice([0.5, 1.0, 2.0]) * s
        _, _, ratio = _sobolev_1d_case(a, b_coef, s, length)
        worst = max(worst, ratio)
    # f(x/s) on a grid rescaled by the same dyadic s: ratio must not move
    _, _, r_base = _sobolev_1d_case(0.3, 1.0, 1.0, 1.0)
    _, _, r_scaled = _sobolev_1d_case(0.3, 0.5, 2.0, 2.0)
    invariance = abs(r_scaled - r_base) / r_base
    metrics = {"worst_ratio": worst, "rescaling_defect": invariance}
    thr = {"worst_ratio": 2.0 * 1.05, "rescaling_defect": 1e-9}
    passed = worst <= thr["worst_ratio"] and invariance <= 1e-9
    return SuiteReport("sobolev-1d", passed, metrics, thr)


def suite_sobolev_2d(seed=0, n_cases=10):
    """Rectangle sup-sum inequality: the ratio must stay of unit size, with
    no case exploding past 10x the family median."""
    rng = np.random.default_rng(seed)
    ratios = []
    for _ in range(n_cases):
        a1, a2 = rng.uniform(-1.0, 1.0, 2)
        s1, s2 = rng.uniform(0.6, 1.8, 2)
        l1 = float(rng.choice([0.5, 1.0, 2.0]) * s1)
        l2 = float(rng.choice([0.5, 1.0, 2.0]) * s2)
        grid = Grid.centered(np.array([10.0 * s1, 10.0 * s2]), 512)
        pts = grid.points()
        x, y = pts[:, 0], pts[:, 1]
        e1 = np.exp(-x ** 2 / (2 * s1 * s1))
        e2 = np.exp(-y ** 2 / (2 * s2 * s2))
        u = (a1 + x) * e1
        du = (1.0 - (a1 + x) * x / (s1 * s1)) * e1
        v = (a2 + y) * e2
        dv = (1.0 - (a2 + y) * y / (s2 * s2)) * e2
        shape = grid.shape
        fv = (u * v).reshape(shape)
        d1 = (du * v).reshape(shape)
        d2 = (u * dv).reshape(shape)
        d21 = (du * dv).reshape(shape)
        _, _, ratio = sobolev_sup_sum_2d(
            SampledFunction(grid=grid, values=fv),
            SampledFunction(grid=grid, values=d1),
            SampledFunction(grid=grid, values=d2),
            SampledFunction(grid=grid, values=d21), (l1, l2))
        ratios.append(ratio)
    med = float(np.median(ratios))
    metrics = {"max_ratio": max(ratios), "median_ratio": med,
               "max_over_median": max(ratios) / med}
    thr = {"max_over_median": 10.0}
    return SuiteReport("sobolev-2d", metrics["max_over_median"] <= 10.0,
                       metrics, thr)


def suite_bochner_riesz(seed=0):
    """Closed-form kernel against direct quadrature, Bessel series against
    the integral representation, branch agreement at the series/asymptotic
    switch, and the scaled transform identity for the dilated kernels."""
    geo = _default_geometry(1)
    rel_err = 0.0
    for lam in (1.0, 2.0):
        radii = np.array([0.1, 1.0, 10.0])
        closed = bochner_riesz_inverse(lam, 1, radii)
        quad = bochner_riesz_quadrature(lam, 1, radii)
        rel_err = max(rel_err, float(np.max(np.abs(closed - quad)
                                            / np.abs(closed))))
    branch = 0.0
    for nu in (0.5, 1.5, 2.5, 3.5):
        z = 12.0
        branch = max(branch, abs(bessel_j(nu, z - 1e-9)
                                 - bessel_j(nu, z + 1e-9)))
    oracle = 0.0
    for nu, z in ((0.5, 0.7), (1.5, 3.0), (2.5, 9.0), (1.0, 20.0)):
        oracle = max(oracle, abs(bessel_j(nu, z) - bessel_j_integral(nu, z)))
    chi_err = 0.0
    rng = np.random.default_rng(seed)
    freqs = rng.uniform(-4.0, 4.0, (24, 1))
    for k in (0, 1, 2):
        chi_err = max(chi_err, chi_transform_check(geo, k, 2.0, freqs))
    metrics = {"kernel_rel_err": rel_err, "branch_jump": branch,
               "bessel_oracle_err": oracle, "chi_identity_err": chi_err}
    thr = {"kernel_rel_err": 1e-6, "branch_jump": 1e-8,
           "bessel_oracle_err": 1e-10, "chi_identity_err": 1e-6}
    passed = (rel_err <= 1e-6 and branch <= 1e-8 and oracle <= 1e-10
              and chi_err <= 1e-6)
    return SuiteReport("bochner-riesz", passed, metrics, thr)


def suite_partition(seed=0):
    """Partition of unity on the fft grid and window support certificates."""
    from .spectral import sample_shell
    geo = _default_geometry(1)
    fam = _default_family(geo)
    plateau = fam.eta(sample_shell(geo.adjoint_qnorm, 0, 300, seed=seed + 1))
    outside = fam.eta(sample_shell(geo.adjoint_qnorm, 3, 300, seed=seed + 2))
    inside = fam.eta(sample_shell(geo.adjoint_qnorm, -4, 300, seed=seed + 3))
    metrics = {"partition_defect": fam.partition_defect,
               "plateau_min": float(plateau.min()),
               "support_leak": float(max(outside.max(), inside.max()))}
    thr = {"partition_defect": 1e-10, "plateau_min": 1.0 - 1e-12,
           "support_leak": 0.0}
    passed = (fam.partition_defect <= 1e-10
              and plateau.min() >= 1.0 - 1e-12
              and metrics["support_leak"] == 0.0)
    return SuiteReport("partition", passed, metrics, thr)


def suite_lemma_h1(seed=0, lam=2.0):
    geo = _default_geometry(1)
    fam = _default_family(geo)
    tab = hardy.lemma_h1_experiment(fam, range(-2, 3), lam=lam, seed=seed)
    spread = max(tab.values()) / min(tab.values())
    metrics = {"ratio_spread": spread,
               "ratios": {str(k): v for k, v in tab.items()},
               "lambda_threshold": hardy.lambda_threshold(geo, 2.0)}
    thr = {"ratio_spread": 3.0}
    return SuiteReport("lemma-h1", spread <= 3.0, metrics, thr)


def suite_lemma_lr(seed=0, lam=2.0, r=4.0):
    geo = _default_geometry(1)
    fam = _default_family(geo)
    tab = hardy.lemma_lr_experiment(fam, range(-2, 3), lam=lam, r=r, seed=seed)
    spread = max(tab.values()) / min(tab.values())
    hy = hardy.hausdorff_young_check(fam, r, n_trials=12, seed=seed)
    metrics = {"ratio_spread": spread, "hausdorff_young_max": hy,
               "ratios": {str(k): v for k, v in tab.items()},
               "lambda_threshold": hardy.lambda_threshold(geo, r)}
    thr = {"ratio_spread": 3.0, "hausdorff_young_max": 1.0 + 1e-12}
    passed = spread <= 3.0 and hy <= 1.0 + 1e-12
    return SuiteReport("lemma-lr", passed, metrics, thr)


def suite_psi_necessity(seed=0, p=2.0):
    geo = _default_geometry(1)
    fam = _default_family(geo)
    mu = discretize_density(1.0, geo, (-3, 3), 64, seed=seed)
    rows = hardy.psi_necessity_test(fam, range(-3, 4), mu, p, seed=seed)
    proxies = [rows[l]["proxy"] for l in rows]
    med = float(np.median(proxies))
    dev = max(abs(v - med) / med for v in proxies)
    min_plateau = min(rows[l]["shell_min"] for l in rows)
    bounds = all(rows[l]["bound_holds"] for l in rows)
    metrics = {"proxy_max_dev": dev, "plateau_min": min_plateau,
               "proxies": {str(l): rows[l]["proxy"] for l in rows},
               "annulus_bounds_hold": bounds}
    thr = {"proxy_max_dev": 0.20, "plateau_min": 0.1}
    passed = dev <= 0.20 and min_plateau >= 0.1 and bounds
    return SuiteReport("psi-necessity", passed, metrics, thr)


def suite_sufficiency_e2e(seed=0, n_atoms=50, p=1.5):
    """End-to-end: pairings of many random atoms against a discretized
    density must stay uniformly comparable, as the multiplier theorem's
    sufficiency direction predicts."""
    geo = _default_geometry(1)
    mu = discretize_density(1.0, geo, (-4, 4), 64, seed=seed)
    crit = criterion_sup(mu, geo, (-6, 6), p)
    rng = np.random.default_rng(seed)
    pairings = []
    for i in range(n_atoms):
        k = int(rng.integers(-2, 3))
        center = float(rng.uniform(-2.0, 2.0)) * geo.params.b ** k
        atom = make_atom(geo, k, np.array([center]), seed=seed + 101 * i,
                         resolution=128)
        pairings.append(pair_against_measure(atom, mu, p=p))
    spread = max(pairings) / min(pairings)
    metrics = {"pairing_spread": spread, "pairing_max": max(pairings),
               "pairing_min": min(pairings),
               "criterion_sup": crit.sup_value,
               "criterion_at_endpoint": crit.sup_at_endpoint}
    thr = {"pairing_spread": 5.0}
    return SuiteReport("sufficiency-e2e", spread <= 5.0, metrics, thr)


def suite_p_sufficiency(seed=0, p=2.0):
    geo = _default_geometry(1)
    fam = _default_family(geo)
    mu = discretize_density(1.0, geo, (-3, 3), 64, seed=seed)
    ann = annulus_sup(mu, geo.adjoint_qnorm, (-4, 4))
    funcs = hardy.band_limited_test_functions(fam, 8, seed=seed)
    res = hardy.p_sufficiency_test(fam, mu, p, funcs, seed=seed)
    metrics = {"five_term_defect": res["five_term_defect"],
               "max_pairing_ratio": res["max_ratio"],
               "annulus_sup": ann.sup_value}
    thr = {"five_term_defect": 1e-10}
    return SuiteReport("p-sufficiency", res["five_term_defect"] <= 1e-10,
                       metrics, thr)


SUITES = {
    "atom-decay": suite_atom_decay,
    "sobolev-1d": suite_sobolev_1d,
    "sobolev-2d": suite_sobolev_2d,
    "bochner-riesz": suite_bochner_riesz,
    "partition": suite_partition,
    "lemma-h1": suite_lemma_h1,
    "lemma-lr": suite_lemma_lr,
    "psi-necessity": suite_psi_necessity,
    "sufficiency-e2e": suite_sufficiency_e2e,
    "p-sufficiency": suite_p_sufficiency,
}


def run_suite(name, seed=0):
    if name not in SUITES:
        raise SuiteError(f"unknown suite {name!r}; known: {sorted(SUITES)}")
    return SUITES[name](seed=seed)
