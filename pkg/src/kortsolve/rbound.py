"""Monte-Carlo probe of the randomized boundedness of solution-operator families.

An operator family {T(lambda)} is randomized-bounded when for every finite
selection T_1..T_m and inputs f_1..f_m the Rademacher averages satisfy

    E || sum_j r_j T_j f_j ||^2  <=  C^2  E || sum_j r_j f_j ||^2

with C independent of m and of the selection (realized here with exponent 2;
the property is exponent-independent).  The probe draws family members
across lambda decades, applies them to random band-limited boundary data,
and reports the empirical ratio per decade.  It is a necessary-condition
check: growing ratios falsify uniform boundedness, stable ratios prove
nothing.

Inputs and outputs are measured in the lifted tuples the theory pairs with
the operators: the output of the density solver is measured as
(grad^3 rho, lam^(1/2) grad^2 rho, lam grad rho, lam^(3/2) rho), the output
of the velocity solver as (grad^2 u, lam^(1/2) grad u, lam u), and boundary
data (g, h') through the same second-order lift applied per component.  All
derivatives are exact: tangential ones act as i*xi multipliers per lattice
mode and vertical ones differentiate the exponential profiles.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, GridError
from .fields import GridSpec
from .modes import BoundaryTrace, solve_mode
from .profiles import VerticalProfile
from .spectral import FluidParams, TangentialMode


def derivative_tuples(order: int, dim: int):
    """Canonical enumeration of ordered derivative multi-tuples."""
    return list(itertools.product(range(dim), repeat=order))


def lift_arity(kind: str, dim: int) -> int:
    n = dim
    if kind == "S0":
        return n**3 + n**2 + n + 1
    if kind == "T":
        return n**2 + n + 1
    raise DomainError(f"unknown lift kind {kind!r}")


# ---------------------------------------------------------------------------
# Sparse mode-profile fields and lifted tuples
# ---------------------------------------------------------------------------


@dataclass
class ModeField:
    """Field supported on a few tangential lattice modes with profile verticals."""

    modes: dict  # index tuple -> VerticalProfile
    spec: GridSpec

    def trace_coeff(self, index):
        return self.modes[index].value_at_zero()

    def scale(self, c):
        return ModeField({k: p.scaled(c) for k, p in self.modes.items()}, self.spec)


class LiftedTuple:
    """A tuple of derived fields, stored per active tangential mode.

    modes: dict index -> complex array (n_comp, n_z).  The l2 norm agrees
    with the dense grid norm by discrete Parseval over the tangential axes.
    """

    def __init__(self, modes, spec: GridSpec, n_comp: int):
        self.modes = modes
        self.spec = spec
        self.n_comp = n_comp

    def scaled(self, c):
        return LiftedTuple({k: c * v for k, v in self.modes.items()}, self.spec, self.n_comp)

    def __add__(self, other):
        out = {k: v.copy() for k, v in self.modes.items()}
        for k, v in other.modes.items():
            if k in out:
                out[k] = out[k] + v
            else:
                out[k] = v.copy()
        return LiftedTuple(out, self.spec, self.n_comp)

    def inner(self, other) -> complex:
        """Hilbert inner product matching the q = 2 grid norm."""
        w = self.spec.cell_volume() / self.spec.n_tangential ** (self.spec.dim - 1)
        acc = 0.0 + 0.0j
        for k, v in self.modes.items():
            o = other.modes.get(k)
            if o is not None:
                acc += np.vdot(o, v)
        return acc * w

    def norm(self, q: float = 2.0) -> float:
        if q == 2.0:
            return math.sqrt(max(self.inner(self).real, 0.0))
        dense = self.synthesize()
        vol = self.spec.cell_volume()
        return float((np.sum(np.abs(dense) ** q) * vol) ** (1.0 / q))

    def synthesize(self):
        """Dense (n_comp, *tangential, n_z) array via inverse tangential FFT."""
        spec = self.spec
        shape = (self.n_comp,) + spec.tangential_shape + (spec.n_vertical,)
        hat = np.zeros(shape, dtype=complex)
        for k, v in self.modes.items():
            hat[(slice(None), *k, slice(None))] = v
        axes = tuple(range(1, spec.dim))
        return np.fft.ifftn(hat, axes=axes)


def _lift_profiles(profile_sets, lam, spec: GridSpec, xi, kind: str):
    """Lifted component arrays for one mode.

    profile_sets: for kind 'S0' a single density profile; for kind 'T' a list
    of profiles (the lift concatenates the second-order lift of each).
    """
    lam = complex(lam)
    x = spec.vertical_coords()
    dim = spec.dim
    sqrt_lam = np.sqrt(lam)

    def deriv(profile, axes_tuple):
        factor = 1.0 + 0.0j
        v_order = 0
        for ax in axes_tuple:
            if ax < dim - 1:
                factor *= 1j * xi[ax]
            else:
                v_order += 1
        p = profile.differentiate(v_order) if v_order else profile
        return factor * p.evaluate(x)

    rows = []
    if kind == "S0":
        profile = profile_sets
        for t in derivative_tuples(3, dim):
            rows.append(deriv(profile, t))
        for t in derivative_tuples(2, dim):
            rows.append(sqrt_lam * deriv(profile, t))
        for t in derivative_tuples(1, dim):
            rows.append(lam * deriv(profile, t))
        rows.append(lam * sqrt_lam * profile.evaluate(x))
    elif kind == "T":
        for profile in profile_sets:
            for t in derivative_tuples(2, dim):
                rows.append(deriv(profile, t))
            for t in derivative_tuples(1, dim):
                rows.append(sqrt_lam * deriv(profile, t))
            rows.append(lam * profile.evaluate(x))
    else:
        raise DomainError(f"unknown lift kind {kind!r}")
    return np.array(rows)


def lift_boundary_data(data, lam) -> LiftedTuple:
    """The trace lift (T_lam g, T_lam h_1, ..., T_lam h_{N-1})."""
    g, hs = data
    spec = g.spec
    ks = spec.tangential_wavenumbers()
    out = {}
    n_comp = spec.dim * lift_arity("T", spec.dim)
    for index in set(g.modes) | set().union(*(set(h.modes) for h in hs)):
        xi = np.array([ks[i] for i in index])
        profiles = [g.modes.get(index, VerticalProfile.zero())] + \
            [h.modes.get(index, VerticalProfile.zero()) for h in hs]
        out[index] = _lift_profiles(profiles, lam, spec, xi, "T")
    return LiftedTuple(out, spec, n_comp)


# ---------------------------------------------------------------------------
# Operator families
# ---------------------------------------------------------------------------


class IdentityFamily:
    """T(lambda) = identity on the lifted input; the probe must report 1."""

    name = "identity"

    def apply(self, lam, data):
        return lift_boundary_data(data, lam)

    def input_lift(self, lam, data):
        return lift_boundary_data(data, lam)


class ReducedSolveFamily:
    """The boundary-data solution operators of the reduced problem.

    kind 'A2' measures the density output in the third-order lift; kind 'B2'
    measures the velocity vector in the second-order lift.  The grid is read
    off the data, so the probe driver can rescale it per lambda decade.
    """

    def __init__(self, params: FluidParams, kind: str):
        if kind not in ("A2", "B2"):
            raise DomainError("kind must be 'A2' or 'B2'")
        self.params = params
        self.kind = kind
        self.name = kind

    def apply(self, lam, data):
        g, hs = data
        spec = g.spec
        ks = spec.tangential_wavenumbers()
        out = {}
        if self.kind == "A2":
            n_comp = lift_arity("S0", spec.dim)
        else:
            n_comp = spec.dim * lift_arity("T", spec.dim)
        for index in set(g.modes) | set().union(*(set(h.modes) for h in hs)):
            xi = np.array([ks[i] for i in index])
            mode = TangentialMode(xi=xi, lam=lam, dim=spec.dim)
            g_hat = g.modes[index].value_at_zero() if index in g.modes else 0.0
            h_hat = np.array([h.modes[index].value_at_zero() if index in h.modes else 0.0
                              for h in hs])
            sol = solve_mode(self.params, mode, BoundaryTrace(g_hat, h_hat))
            if self.kind == "A2":
                out[index] = _lift_profiles(sol.rho, lam, spec, xi, "S0")
            else:
                out[index] = _lift_profiles(list(sol.u), lam, spec, xi, "T")
        return LiftedTuple(out, spec, n_comp)

    def input_lift(self, lam, data):
        return lift_boundary_data(data, lam)


class LiftedDense:
    """Dense lifted tuple (n_comp, *tangential, n_z) for the full-data families."""

    def __init__(self, values, spec: GridSpec):
        self.values = np.asarray(values, dtype=complex)
        self.spec = spec

    def scaled(self, c):
        return LiftedDense(c * self.values, self.spec)

    def __add__(self, other):
        return LiftedDense(self.values + other.values, self.spec)

    def inner(self, other) -> complex:
        return complex(np.vdot(other.values, self.values) * self.spec.cell_volume())

    def norm(self, q: float = 2.0) -> float:
        if q == 2.0:
            return math.sqrt(max(self.inner(self).real, 0.0))
        return float((np.sum(np.abs(self.values) ** q) * self.spec.cell_volume()) ** (1.0 / q))


def sample_full_data(rng, spec: GridSpec, modes_per_field: int = 4, rate_scale: float = 1.0):
    """Random band-limited (d, f, g) interior/boundary data for the full solve."""
    g, hs = sample_boundary_data(rng, spec, modes_per_field, rate_scale)
    d = sample_boundary_data(rng, spec, modes_per_field, rate_scale)[0]
    f = tuple(sample_boundary_data(rng, spec, 1, rate_scale)[0] for _ in range(spec.dim))
    return (d, f, g)


def lift_full_data(data, lam) -> LiftedTuple:
    """The data lift (grad d, lam^(1/2) d, f, grad^2 g, lam^(1/2) grad g, lam g)."""
    d, f, g = data
    spec = d.spec
    lam = complex(lam)
    sqrt_lam = np.sqrt(lam)
    ks = spec.tangential_wavenumbers()
    x = spec.vertical_coords()
    dim = spec.dim
    n_comp = dim + 1 + dim + dim * dim + dim + 1
    active = set(d.modes) | set(g.modes) | set().union(*(set(c.modes) for c in f))

    def deriv(profile, axes_tuple, xi):
        factor = 1.0 + 0.0j
        v_order = 0
        for ax in axes_tuple:
            if ax < dim - 1:
                factor *= 1j * xi[ax]
            else:
                v_order += 1
        p = profile.differentiate(v_order) if v_order else profile
        return factor * p.evaluate(x)

    out = {}
    zero = VerticalProfile.zero()
    for index in active:
        xi = np.array([ks[i] for i in index])
        pd = d.modes.get(index, zero)
        pg = g.modes.get(index, zero)
        rows = [deriv(pd, t, xi) for t in derivative_tuples(1, dim)]
        rows.append(sqrt_lam * pd.evaluate(x))
        rows += [f[i].modes.get(index, zero).evaluate(x) for i in range(dim)]
        rows += [deriv(pg, t, xi) for t in derivative_tuples(2, dim)]
        rows += [sqrt_lam * deriv(pg, t, xi) for t in derivative_tuples(1, dim)]
        rows.append(lam * pg.evaluate(x))
        out[index] = np.array(rows)
    return LiftedTuple(out, spec, n_comp)


class FullSolveFamily:
    """Solution operators of the full inhomogeneous problem (kinds 'A', 'B').

    The output lift mixes the two parts of the solution: spectral derivatives
    of the restricted whole-space part (computed on the doubled grid) and
    exact profile derivatives of the boundary correction.
    """

    def __init__(self, params: FluidParams, kind: str):
        if kind not in ("A", "B"):
            raise DomainError("kind must be 'A' or 'B'")
        self.params = params
        self.kind = kind
        self.name = kind

    def input_lift(self, lam, data):
        return lift_full_data(data, lam)

    def apply(self, lam, data):
        from .fields import (boundary_correction, extend, extend_vector,
                              vertical_spectral_derivative, whole_space_solve)
        d, f, g = data
        spec = d.spec
        lam = complex(lam)
        dim = spec.dim
        sqrt_lam = np.sqrt(lam)

        def synthesize(mode_field):
            hat = np.zeros(spec.tangential_shape + (spec.n_vertical,), dtype=complex)
            x = spec.vertical_coords()
            for k, p in mode_field.modes.items():
                hat[(*k, slice(None))] = p.evaluate(x)
            return np.fft.ifftn(hat, axes=tuple(range(dim - 1)))

        d_vals = synthesize(d)
        f_vals = [synthesize(c) for c in f]
        g_trace = synthesize(g)[..., 0]

        d2 = extend(d_vals, "even")
        f2 = extend_vector(f_vals, spec)
        rho2, u2, _ = whole_space_solve(spec, self.params, d2, f2, lam)
        dn_rho2 = vertical_spectral_derivative(rho2, spec)
        g_tilde = g_trace + dn_rho2[..., 0]
        h_tilde = [-u2[j][..., 0] for j in range(dim - 1)]

        mode_solutions = {}

        def collect(index, xi, sol):
            mode_solutions[index] = sol

        boundary_correction(self.params, spec, g_tilde, h_tilde, lam, collect=collect)

        ks = spec.tangential_wavenumbers()
        t_axes = tuple(range(dim - 1))
        kind_lift = "S0" if self.kind == "A" else "T"
        n_comp = lift_arity("S0", dim) if self.kind == "A" else dim * lift_arity("T", dim)

        # correction lift assembled from exact per-mode profile derivatives
        shape = (n_comp,) + spec.tangential_shape + (spec.n_vertical,)
        corr_hat = np.zeros(shape, dtype=complex)
        for index, sol in mode_solutions.items():
            xi = np.array([ks[i] for i in index])
            payload = sol.rho if self.kind == "A" else list(sol.u)
            corr_hat[(slice(None), *index, slice(None))] = \
                _lift_profiles(payload, lam, spec, xi, kind_lift)
        corr = np.fft.ifftn(corr_hat, axes=tuple(a + 1 for a in t_axes))

        # whole-space part lift via spectral derivatives on the doubled grid
        mesh = np.meshgrid(*([ks] * (dim - 1) + [spec.doubled_vertical_wavenumbers()]),
                           indexing="ij", sparse=True)

        def spectral_deriv(hat, axes_tuple):
            out = hat
            for ax in axes_tuple:
                out = out * (1j * mesh[ax])
            return out

        nz = spec.n_vertical
        rows = np.zeros(shape, dtype=complex)
        if self.kind == "A":
            hat = np.fft.fftn(rho2)
            comps = []
            for t in derivative_tuples(3, dim):
                comps.append(spectral_deriv(hat, t))
            for t in derivative_tuples(2, dim):
                comps.append(sqrt_lam * spectral_deriv(hat, t))
            for t in derivative_tuples(1, dim):
                comps.append(lam * spectral_deriv(hat, t))
            comps.append(lam * sqrt_lam * hat)
            for i, c in enumerate(comps):
                rows[i] = np.fft.ifftn(c)[..., :nz]
        else:
            row = 0
            for J in range(dim):
                hat = np.fft.fftn(u2[J])
                for t in derivative_tuples(2, dim):
                    rows[row] = np.fft.ifftn(spectral_deriv(hat, t))[..., :nz]
                    row += 1
                for t in derivative_tuples(1, dim):
                    rows[row] = np.fft.ifftn(sqrt_lam * spectral_deriv(hat, t))[..., :nz]
                    row += 1
                rows[row] = np.fft.ifftn(lam * hat)[..., :nz]
                row += 1
        return LiftedDense(rows + corr, spec)


class LogDerivativeFamily:
    """Central-difference realization of lambda d/dlambda of a family.

    Member at lambda maps data to (T((1+h)lam) - T((1-h)lam)) / (2h); the
    input lift stays at the base lambda.
    """

    def __init__(self, base, rel_step: float = 1e-3):
        if not (1e-6 <= rel_step <= 1e-2):
            raise DomainError("rel_step must lie in [1e-6, 1e-2]")
        self.base = base
        self.rel_step = rel_step
        self.name = f"d_{getattr(base, 'name', 'family')}"

    def apply(self, lam, data):
        h = self.rel_step
        lam = complex(lam)
        plus = self.base.apply((1.0 + h) * lam, data)
        minus = self.base.apply((1.0 - h) * lam, data)
        return (plus + minus.scaled(-1.0)).scaled(1.0 / (2.0 * h))

    def input_lift(self, lam, data):
        return self.base.input_lift(lam, data)


def lambda_log_derivative(family, rel_step: float = 1e-3) -> LogDerivativeFamily:
    return LogDerivativeFamily(family, rel_step)


# ---------------------------------------------------------------------------
# Data sampling and the probe driver
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProbeConfig:
    """Monte-Carlo probe controls.

    m family members and `trials` Rademacher draws per ratio; lambda is
    sampled per decade of |lambda| within `decades` at arguments drawn from
    `lambda_args`.  q is the spatial grid-norm exponent (2 uses the exact
    Hilbert-space path).
    """

    m: int = 8
    trials: int = 200
    q: float = 2.0
    decades: tuple = (1e-2, 1e2)
    lambda_args: tuple = (0.0, 1.2, -1.2)
    draws_per_decade: int = 2
    modes_per_field: int = 4
    rng_seed: int = 0

    def __post_init__(self):
        if self.m < 1 or self.trials < 50:
            raise DomainError("need m >= 1 and trials >= 50")


def probe_grid(dim: int = 2, n_tangential: int = 32, vertical_cutoff: float = 40.0,
               n_vertical: int = 192, box_half_length: float = math.pi) -> GridSpec:
    return GridSpec(dim=dim, box_half_length=box_half_length, n_tangential=n_tangential,
                    vertical_cutoff=vertical_cutoff, n_vertical=n_vertical)


def sample_boundary_data(rng, spec: GridSpec, modes_per_field: int = 4,
                         rate_scale: float = 1.0):
    """Random band-limited (g, h') data: low lattice modes x decaying profiles.

    `rate_scale` sets the vertical decay-rate magnitude; the probe driver
    couples it to |lambda|^(1/2) so every decade is exercised in the
    anisotropic scaling regime the operator family lives in.
    """
    n = spec.n_tangential
    band = max(2, n // 4)

    def draw_field():
        modes = {}
        for _ in range(modes_per_field):
            index = tuple(int(rng.integers(-band, band + 1)) % n for _ in range(spec.dim - 1))
            terms = []
            for _ in range(2):
                c = complex(rng.normal(), rng.normal())
                rate = rate_scale * complex(rng.uniform(0.5, 2.5), rng.uniform(-0.5, 0.5))
                terms.append((c, 0, rate))
            prof = VerticalProfile(terms)
            modes[index] = modes[index] + prof if index in modes else prof
        return ModeField(modes, spec)

    g = draw_field()
    hs = tuple(draw_field() for _ in range(spec.dim - 1))
    return (g, hs)


@dataclass
class ProbeReport:
    family: str
    q: float
    m: int
    trials: int
    decade_ratios: dict      # decade label -> max ratio over draws
    global_max: float
    redraws: int
    all_ratios: list = field(default_factory=list)

    @property
    def decade_spread(self) -> float:
        vals = list(self.decade_ratios.values())
        return max(vals) / min(vals)

    def to_json(self) -> str:
        return json.dumps({
            "family": self.family,
            "q": self.q,
            "m": self.m,
            "trials": self.trials,
            "per_decade_max_ratio": self.decade_ratios,
            "global_max_ratio": self.global_max,
            "decade_spread": self.decade_spread,
            "redraws": self.redraws,
        }, indent=2, sort_keys=True)


def _ratio_from_tuples(ys, xs, signs, q):
    """Empirical mean-square ratio over sign draws.

    For q = 2 the norms are Hilbertian, so ||sum r_j v_j||^2 = r^T G r with
    the Gram matrix G of the tuples; the Monte-Carlo average is then a cheap
    quadratic form per trial.
    """
    m = len(ys)
    if q == 2.0:
        gy = np.empty((m, m), dtype=complex)
        gx = np.empty((m, m), dtype=complex)
        for a in range(m):
            for b in range(a, m):
                gy[a, b] = ys[a].inner(ys[b])
                gy[b, a] = np.conj(gy[a, b])
                gx[a, b] = xs[a].inner(xs[b])
                gx[b, a] = np.conj(gx[a, b])
        num = np.einsum("tm,mk,tk->t", signs, gy, signs).real
        den = np.einsum("tm,mk,tk->t", signs, gx, signs).real
    else:
        num = np.empty(len(signs))
        den = np.empty(len(signs))
        for t, r in enumerate(signs):
            ysum = ys[0].scaled(r[0])
            xsum = xs[0].scaled(r[0])
            for j in range(1, m):
                ysum = ysum + ys[j].scaled(r[j])
                xsum = xsum + xs[j].scaled(r[j])
            num[t] = ysum.norm(q) ** 2
            den[t] = xsum.norm(q) ** 2
    den_mean = float(np.mean(den))
    if den_mean <= 0.0:
        raise DomainError("degenerate randomized-sum denominator")
    return math.sqrt(float(np.mean(num)) / den_mean)


def estimate_rbound(family, config: ProbeConfig, spec: GridSpec | None = None,
                    sampler=sample_boundary_data) -> ProbeReport:
    """Estimate randomized-sum ratios of `family` across lambda decades.

    The solution operators are quasi-homogeneous under (xi, lambda) ->
    (r xi, r^2 lambda), so each decade is probed on a grid rescaled by the
    decade's |lambda|^(1/2): box and cutoff shrink by that factor and the
    sampled vertical rates grow with it.  Per-decade ratios of a uniformly
    bounded family are then comparable by construction, and systematic
    growth across decades is the probe's falsification signal.
    """
    base = spec or probe_grid()
    lo, hi = config.decades
    n_dec = int(round(math.log10(hi / lo)))
    if n_dec < 1:
        raise GridError("decades must span at least one factor of 10")
    root = np.random.SeedSequence(config.rng_seed)
    decade_seeds = root.spawn(n_dec)

    decade_ratios = {}
    all_ratios = []
    redraws = 0
    for k in range(n_dec):
        d_lo = lo * 10.0**k
        label = f"[{d_lo:g},{d_lo * 10:g})"
        sigma = math.sqrt(d_lo * math.sqrt(10.0))  # decade-midpoint |lambda|^(1/2)
        dspec = GridSpec(dim=base.dim,
                         box_half_length=base.box_half_length / sigma,
                         n_tangential=base.n_tangential,
                         vertical_cutoff=base.vertical_cutoff / sigma,
                         n_vertical=base.n_vertical)
        rng = np.random.default_rng(decade_seeds[k])
        best = 0.0
        for _ in range(config.draws_per_decade):
            ys, xs = [], []
            while len(ys) < config.m:
                mag = d_lo * 10.0 ** rng.uniform(0.0, 1.0)
                arg = rng.choice(config.lambda_args)
                lam = mag * complex(math.cos(arg), math.sin(arg))
                data = sampler(rng, dspec, config.modes_per_field, rate_scale=sigma)
                x = family.input_lift(lam, data)
                if x.norm(config.q) == 0.0:
                    redraws += 1
                    continue
                ys.append(family.apply(lam, data))
                xs.append(x)
            signs = rng.integers(0, 2, size=(config.trials, config.m)) * 2.0 - 1.0
            ratio = _ratio_from_tuples(ys, xs, signs, config.q)
            all_ratios.append(ratio)
            best = max(best, ratio)
        decade_ratios[label] = best
    return ProbeReport(family=getattr(family, "name", "family"), q=config.q,
                       m=config.m, trials=config.trials, decade_ratios=decade_ratios,
                       global_max=max(decade_ratios.values()), redraws=redraws,
                       all_ratios=all_ratios)
