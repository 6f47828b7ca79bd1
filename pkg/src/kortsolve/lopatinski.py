"""Boundary determinants and normalized lower-bound scans.

The per-mode boundary systems are 2x2: the matrix L couples (beta_N, gamma_N)
in the distinct-root cases, and M is its analogue in the double-root case IV.
Their determinants never vanish for lambda in the closed right half-plane
minus the origin; the scans below estimate the normalized infima

    inf |det| / (|lambda|^(1/2) + |xi|)^power

over log grids as a numerical shadow of that nonvanishing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CaseMismatchError, ConsistencyError
from .spectral import Case, FluidParams, ScanGrid, TangentialMode, compute_roots
from .symbols import SYMBOL_ORDERS, stable_symbol_values

# Homogeneity degree of each determinant under (xi, lambda) -> (r xi, r^2 lambda).
DET_L_DEGREE = 5
DET_M_DEGREE = 4


@dataclass(frozen=True)
class BoundaryMatrix:
    """The 2x2 boundary system: entries, right-hand-side template, case tag."""

    entries: np.ndarray
    rhs_template: str
    case: Case

    def det(self) -> complex:
        a = self.entries
        return complex(a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0])


def boundary_matrix(params: FluidParams, mode: TangentialMode) -> BoundaryMatrix:
    """Assemble the raw boundary matrix for the mode's case (I/II or IV)."""
    roots = compute_roots(params, mode)
    t1, t2, om = roots.t1, roots.t2, roots.omega
    xi_sq = mode.xi_sq
    if params.case in (Case.I, Case.II):
        entries = np.array([
            [t1 * t1 - xi_sq, t2 * t2 - xi_sq],
            [-t2 * (t1 * om - xi_sq), -t1 * (t2 * om - xi_sq)],
        ])
        rhs = "(lambda*g(0), t1*t2*i xi.h'(0))"
    elif params.case is Case.IV:
        mu, nu = params.mu, params.nu
        entries = np.array([
            [-2.0 * mu * (t2 - om) * (t2 + om), -2.0 * (nu - mu) * t2],
            [(t2 - om) * (2.0 * mu * om * (t2 + om) + (nu - mu) * xi_sq), (nu - mu) * xi_sq],
        ])
        rhs = "((nu-mu)*lambda*g(0), (nu-mu)*t2^2*i xi.h'(0))"
    else:
        raise CaseMismatchError(f"no 2x2 boundary matrix in case {params.case}")
    return BoundaryMatrix(entries=entries, rhs_template=rhs, case=params.case)


def det_L(params: FluidParams, mode: TangentialMode) -> complex:
    """det L = (t2-t1){t1 t2 om (t2+t1) - |xi|^2 (t2^2+t1 t2+t1^2-|xi|^2)}.

    Defined (and nonzero) in cases I and II.
    """
    if params.case not in (Case.I, Case.II):
        raise CaseMismatchError(f"det L requires case I or II, got {params.case}")
    roots = compute_roots(params, mode)
    t1, t2, om = roots.t1, roots.t2, roots.omega
    xi_sq = mode.xi_sq
    return complex((t2 - t1) * (t1 * t2 * om * (t2 + t1)
                                - xi_sq * (t2 * t2 + t1 * t2 + t1 * t1 - xi_sq)))


def det_M(params: FluidParams, mode: TangentialMode) -> complex:
    """det M = (nu - mu)(t2 - omega) q(xi, lambda), case IV only."""
    if params.case is not Case.IV:
        raise CaseMismatchError(f"det M requires case IV, got {params.case}")
    roots = compute_roots(params, mode)
    t2, om = roots.t2, roots.omega
    xi_sq = mode.xi_sq
    mu, nu = params.mu, params.nu
    q = 2.0 * ((2.0 * mu * (t2 + om) * om + (nu - mu) * xi_sq) * t2
               - mu * (t2 + om) * xi_sq)
    return complex((nu - mu) * (t2 - om) * q)


@dataclass
class LowerBoundReport:
    """Result of a normalized lower-bound scan for one named symbol."""

    name: str
    power: float
    infimum: float
    argmin_xi: float
    argmin_lam: complex
    band_infima: dict

    def csv_rows(self):
        rows = [("band", "inf", "argmin_xi", "argmin_lam_re", "argmin_lam_im")]
        for band, val in sorted(self.band_infima.items()):
            rows.append((band, f"{val:.12e}", "", "", ""))
        rows.append(("all", f"{self.infimum:.12e}", f"{self.argmin_xi:.6e}",
                     f"{self.argmin_lam.real:.6e}", f"{self.argmin_lam.imag:.6e}"))
        return rows


def lower_bound_scan(params: FluidParams, name: str, grid: ScanGrid,
                     normalize_power: float | None = None) -> LowerBoundReport:
    """Scan inf |symbol| / (|lambda|^(1/2)+|xi|)^power over the grid.

    `normalize_power` defaults to the symbol's declared order.  The scan uses
    the cancellation-free evaluation so that the reported infimum reflects
    the symbol, not floating-point noise.  An infimum below 1e-14 (after
    normalization) would contradict the nonvanishing results and is raised
    as an internal error with the offending point.
    """
    if normalize_power is None:
        normalize_power = SYMBOL_ORDERS[name]
    xi_sq, xi_norm, lam = grid.flat_points()
    vals = stable_symbol_values(params, name, xi_sq, lam)
    scale = np.sqrt(np.abs(lam)) + xi_norm
    ratios = np.abs(vals) / scale ** normalize_power
    k = int(np.argmin(ratios))
    inf = float(ratios[k])
    if inf < 1e-14:
        raise ConsistencyError(
            f"normalized |{name}| = {inf:.3e} at xi={xi_norm[k]}, lam={lam[k]}: "
            "potential zero of a provably nonvanishing symbol"
        )
    bands = {}
    band_idx = np.floor(np.log2(scale)).astype(int)
    for b in np.unique(band_idx):
        bands[int(b)] = float(np.min(ratios[band_idx == b]))
    return LowerBoundReport(name=name, power=float(normalize_power), infimum=inf,
                            argmin_xi=float(xi_norm[k]), argmin_lam=complex(lam[k]),
                            band_infima=bands)


def scan_stability(params: FluidParams, name: str, grid: ScanGrid,
                   refine_factor: int = 2):
    """Infimum on the grid and on a refined grid; returns (inf, inf_refined, drift).

    drift = |inf - inf_refined| / inf; small drift indicates the scan has
    resolved the true infimum of the normalized symbol.
    """
    base = lower_bound_scan(params, name, grid)
    fine = lower_bound_scan(params, name, grid.refined(refine_factor))
    drift = abs(base.infimum - fine.infimum) / base.infimum
    return base.infimum, fine.infimum, drift
