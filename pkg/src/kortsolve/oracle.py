"""Independent finite-difference oracle for the per-mode boundary value problem.

The reduced per-mode system is recast as a first-order companion system in

    y = (u_1, u_1', ..., u_{N-1}, u_{N-1}', u_N, phi, phi', phi'')

of complex dimension 2N+2, using the divergence constraint
u_N' = phi - i xi . u' to lower the order in u_N and the interior equations
to close u_j'' and phi'''.  The system y' = A y with constant A is then
discretized on [0, L] by a two-point box scheme (second order) or its
Obrechkoff correction (fourth order) and solved as one banded sparse system
with the physical boundary conditions at x = 0 and homogeneous Dirichlet
conditions at x = L.

Nothing here evaluates an exponential of A or reuses the closed-form roots;
agreement with `modes.solve_mode` is therefore a genuine cross-check.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import ConfigurationError, DomainError
from .modes import BoundaryTrace, ModeSolution, solve_mode
from .spectral import FluidParams, TangentialMode, compute_roots

SCHEMES = ("second_order_fd", "fourth_order_fd")


@dataclass(frozen=True)
class BvpConfig:
    """Truncated-interval discretization parameters.

    n >= 64 is the supported operating regime; smaller grids are accepted
    (with a warning) so that deliberate under-resolution can be exercised,
    but nothing is guaranteed about their accuracy.
    """

    length: float
    n: int
    scheme: str = "second_order_fd"
    far_bc: str = "dirichlet_zero"

    def __post_init__(self):
        if self.length <= 0:
            raise ConfigurationError("interval length must be positive")
        if self.n < 4:
            raise ConfigurationError("need at least 4 nodes")
        if self.n < 64:
            warnings.warn("BvpConfig with n < 64 is below the supported regime",
                          stacklevel=3)
        if self.scheme not in SCHEMES:
            raise ConfigurationError(f"scheme must be one of {SCHEMES}")
        if self.far_bc != "dirichlet_zero":
            raise ConfigurationError("only the dirichlet_zero far boundary is implemented")

    @classmethod
    def for_mode(cls, params: FluidParams, mode: TangentialMode, n: int = 4096,
                 decay_lengths: float = 40.0, scheme: str = "second_order_fd"):
        """Interval sized so exp(-Re t_min * L) = exp(-decay_lengths)."""
        roots = compute_roots(params, mode)
        tmin = min(roots.t1.real, roots.t2.real, roots.omega.real)
        return cls(length=decay_lengths / tmin, n=n, scheme=scheme)


@dataclass
class BvpSolution:
    """Nodal values of the oracle solve."""

    x: np.ndarray
    u: np.ndarray      # shape (N, n)
    phi: np.ndarray    # shape (n,)
    rho: np.ndarray    # shape (n,)
    far_field_ratio: float


def companion_matrix(params: FluidParams, mode: TangentialMode) -> np.ndarray:
    """The constant matrix A of the first-order companion system y' = A y."""
    N = mode.dim
    lam = mode.lam
    xi = mode.xi
    xi_sq = mode.xi_sq
    mu, nu, kappa = params.mu, params.nu, params.kappa
    dim = 2 * N + 2
    # layout: u_j at 2j, u_j' at 2j+1 (j = 0..N-2), u_N at 2N-2,
    #         phi at 2N-1, phi' at 2N, phi'' at 2N+1.
    iu = lambda j: 2 * j
    idu = lambda j: 2 * j + 1
    iun = 2 * N - 2
    iphi, idphi, iddphi = 2 * N - 1, 2 * N, 2 * N + 1

    A = np.zeros((dim, dim), dtype=complex)
    for j in range(N - 1):
        A[iu(j), idu(j)] = 1.0
        # u_j'' = (lam/mu + |xi|^2) u_j - i xi_j (lam nu + kappa |xi|^2)/(lam mu) phi
        #         + i xi_j kappa/(lam mu) phi''
        A[idu(j), iu(j)] = lam / mu + xi_sq
        A[idu(j), iphi] = -1j * xi[j] * (lam * nu + kappa * xi_sq) / (lam * mu)
        A[idu(j), iddphi] = 1j * xi[j] * kappa / (lam * mu)
    # u_N' = phi - sum_j i xi_j u_j
    A[iun, iphi] = 1.0
    for j in range(N - 1):
        A[iun, iu(j)] = -1j * xi[j]
    A[iphi, idphi] = 1.0
    A[idphi, iddphi] = 1.0
    # phi''' = [-lam (lam + mu |xi|^2) u_N - lam mu sum_j i xi_j u_j'
    #           + (lam (mu + nu) + kappa |xi|^2) phi'] / kappa
    A[iddphi, iun] = -lam * (lam + mu * xi_sq) / kappa
    for j in range(N - 1):
        A[iddphi, idu(j)] = -lam * mu * 1j * xi[j] / kappa
    A[iddphi, idphi] = (lam * (mu + nu) + kappa * xi_sq) / kappa
    return A


def solve_mode_bvp(params: FluidParams, mode: TangentialMode, trace: BoundaryTrace,
                   config: BvpConfig) -> BvpSolution:
    """Banded finite-difference solve of the per-mode BVP on [0, L].

    Boundary rows: u_j(0) = h_j, u_N(0) = 0, phi'(0) = lambda*g (which encodes
    d_N rho(0) = -g through rho = -phi/lambda), and u_J(L) = phi(L) = 0.
    """
    N = mode.dim
    if trace.h_hat.shape != (N - 1,):
        raise DomainError(f"h_hat must have length {N - 1}")
    roots = compute_roots(params, mode)
    tmin = min(roots.t1.real, roots.t2.real, roots.omega.real)
    if config.length < 10.0 / tmin:
        warnings.warn(
            f"interval length {config.length:.3g} is shorter than 10 decay lengths "
            f"({10.0 / tmin:.3g}); truncation error may dominate", stacklevel=2)

    A = companion_matrix(params, mode)
    dim = A.shape[0]
    n = config.n
    h = config.length / (n - 1)
    eye = np.eye(dim, dtype=complex)
    if config.scheme == "second_order_fd":
        right = eye / h - A / 2.0
        left = -(eye / h + A / 2.0)
    else:
        # Corrected trapezoid (Euler-Maclaurin): y_{i+1} - y_i =
        # (h/2) A (y_i + y_{i+1}) - (h^2/12) A^2 (y_{i+1} - y_i) + O(h^5).
        A2 = A @ A
        right = eye / h - A / 2.0 + (h / 12.0) * A2
        left = -(eye / h + A / 2.0 + (h / 12.0) * A2)

    rows, cols, vals = [], [], []
    rhs = np.zeros(dim * n, dtype=complex)

    def put_block(r0, c0, block):
        idx = np.nonzero(block)
        rows.extend((r0 + idx[0]).tolist())
        cols.extend((c0 + idx[1]).tolist())
        vals.extend(block[idx].tolist())

    for i in range(n - 1):
        put_block(i * dim, i * dim, left)
        put_block(i * dim, (i + 1) * dim, right)

    # Boundary rows occupy the last block of equations.
    r = (n - 1) * dim
    iu = lambda j: 2 * j
    iun = 2 * N - 2
    idphi = 2 * N
    iphi = 2 * N - 1
    for j in range(N - 1):  # u_j(0) = h_j
        rows.append(r)
        cols.append(iu(j))
        vals.append(1.0)
        rhs[r] = trace.h_hat[j]
        r += 1
    rows.append(r)  # u_N(0) = 0
    cols.append(iun)
    vals.append(1.0)
    r += 1
    rows.append(r)  # phi'(0) = lam * g
    cols.append(idphi)
    vals.append(1.0)
    rhs[r] = mode.lam * trace.g_hat
    r += 1
    far = (n - 1) * dim
    for j in range(N - 1):  # u_j(L) = 0
        rows.append(r)
        cols.append(far + iu(j))
        vals.append(1.0)
        r += 1
    rows.append(r)  # u_N(L) = 0
    cols.append(far + iun)
    vals.append(1.0)
    r += 1
    rows.append(r)  # phi(L) = 0
    cols.append(far + iphi)
    vals.append(1.0)
    r += 1
    assert r == dim * n

    matrix = sp.csc_matrix((vals, (rows, cols)), shape=(dim * n, dim * n))
    try:
        y = spla.spsolve(matrix, rhs)
    except RuntimeError as exc:  # pragma: no cover - singular factorization
        raise ConfigurationError(f"singular discrete system (n={n}, L={config.length}): {exc}")
    y = y.reshape(n, dim)

    x = np.linspace(0.0, config.length, n)
    u = np.empty((N, n), dtype=complex)
    for j in range(N - 1):
        u[j] = y[:, iu(j)]
    u[N - 1] = y[:, iun]
    phi = y[:, iphi]
    rho = -phi / mode.lam

    near = max(np.max(np.abs(u[:, : n // 8])), np.max(np.abs(phi[: n // 8])), 1e-300)
    far_vals = max(np.max(np.abs(u[:, -1])), abs(phi[-1]))
    return BvpSolution(x=x, u=u, phi=phi, rho=rho, far_field_ratio=float(far_vals / near))


def compare_with_closed_form(params: FluidParams, mode: TangentialMode, trace: BoundaryTrace,
                             config: BvpConfig, closed: ModeSolution | None = None):
    """Relative sup-norm disagreement between oracle and closed form.

    Returns (error, BvpSolution).  The error is normalized by the largest
    closed-form magnitude over the nodes, taken across all components.
    """
    if closed is None:
        closed = solve_mode(params, mode, trace)
    numeric = solve_mode_bvp(params, mode, trace, config)
    x = numeric.x
    ref = np.array([p.evaluate(x) for p in (closed.rho, *closed.u, closed.phi)])
    got = np.vstack([numeric.rho[None, :], numeric.u, numeric.phi[None, :]])
    scale = max(np.max(np.abs(ref)), 1e-300)
    return float(np.max(np.abs(ref - got)) / scale), numeric


@dataclass
class ConvergenceStudy:
    ns: list
    errors: list
    orders: list
    monotone: bool

    @property
    def order_estimate(self):
        return float(np.mean(self.orders)) if self.orders else math.nan


def convergence_study(params: FluidParams, mode: TangentialMode, trace: BoundaryTrace,
                      n_list, length: float | None = None,
                      scheme: str = "second_order_fd") -> ConvergenceStudy:
    """Empirical convergence order against the closed form.

    Orders are log(e_i/e_{i+1}) / log(n_{i+1}/n_i) for consecutive grids.
    Non-monotone error sequences are flagged rather than averaged away.
    """
    n_list = list(n_list)
    if len(n_list) < 3 or any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ConfigurationError("need at least three strictly increasing grid sizes")
    if length is None:
        length = BvpConfig.for_mode(params, mode, n=n_list[0]).length
    closed = solve_mode(params, mode, trace)
    errors = []
    for n in n_list:
        config = BvpConfig(length=length, n=n, scheme=scheme)
        err, _ = compare_with_closed_form(params, mode, trace, config, closed=closed)
        errors.append(err)
    orders = [math.log(errors[i] / errors[i + 1]) / math.log(n_list[i + 1] / n_list[i])
              for i in range(len(errors) - 1)]
    monotone = all(e2 < e1 for e1, e2 in zip(errors, errors[1:]))
    return ConvergenceStudy(ns=n_list, errors=errors, orders=orders, monotone=monotone)
