"""Discrete spectrum and winding diagnostics of the shifted step.

The zeros of a1(k) = 1 + A^2 exp(4ikR)/(4k^2) in the closed upper half
plane govern the sector structure of the long-time behaviour. For
non-degenerate parameters there are exactly 2n + 1 of them,

    i k0,  p_1, ..., p_n,  -conj(p_1), ..., -conj(p_n),

where n is fixed by (2n-1) pi / (2A) < R < (2n+1) pi / (2A), k0 > 0 solves
k = (A/2) exp(-2kR), and the p_j sit in the open second quadrant. On the
degenerate (boundary) parameter set R = (2n+1) pi / (2A) an extra real pair
+-A/2 appears; those parameters are flagged and refused downstream.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .numerics import BracketError, find_root_1d, winding_total
from .scattering import DomainError, SpectralData, StepParams, shifted_step_spectral

__all__ = [
    "SpectrumError",
    "BoundaryParamsError",
    "ZeroCount",
    "DiscreteSpectrum",
    "NormingConstants",
    "AssumptionsReport",
    "zero_count",
    "solve_k0",
    "solve_pj",
    "omegas",
    "solve_spectrum",
    "winding_arg",
    "argument_principle_count",
    "validate_assumptions",
    "norming_constants",
]

# Parameters closer to the degenerate set than this (in 2AR/pi units) are
# treated as degenerate.
BOUNDARY_TOL = 1e-12


class SpectrumError(Exception):
    """Base class for discrete-spectrum failures."""


class BoundaryParamsError(SpectrumError):
    """Parameters on (or numerically at) the degenerate set R = (2n+1)pi/2A."""


@dataclass(frozen=True)
class ZeroCount:
    """Number n of second-quadrant zeros, with degeneracy flag."""
    n: int
    boundary: bool


def zero_count(params: StepParams) -> ZeroCount:
    """Count parameter regime: n such that (2n-1)pi/2A < R < (2n+1)pi/2A."""
    y = 2.0 * params.A * params.R / np.pi
    nearest_odd = 2.0 * np.floor(y / 2.0) + 1.0
    if abs(y - nearest_odd) <= BOUNDARY_TOL * max(1.0, abs(y)):
        return ZeroCount(n=int((nearest_odd - 1) // 2), boundary=True)
    return ZeroCount(n=int(np.floor((y + 1.0) / 2.0)), boundary=False)


def solve_k0(params: StepParams) -> float:
    """The purely imaginary zero i k0: unique k0 > 0 with k = (A/2) exp(-2kR).

    Solved in log form, ln(2k/A) + 2kR = 0, which is strictly increasing.
    """
    A, R = params.A, params.R

    def g(k):
        return np.log(2.0 * k / A) + 2.0 * k * R

    def gp(k):
        return 1.0 / k + 2.0 * R

    lo = 0.5 * A * np.exp(-A * R)   # first Picard iterate, g(lo) < 0
    hi = 0.5 * A                    # g(hi) = AR > 0
    k0 = find_root_1d(g, lo, hi, tol=1e-15 * max(1.0, hi), fprime=gp)
    resid = abs(k0 - 0.5 * A * np.exp(-2.0 * k0 * R))
    if resid > 1e-12 * A:
        raise SpectrumError(f"k0 residual {resid:.2e} too large")
    return float(k0)


def _newton_polish_zero(params: StepParams, p: complex, steps: int = 4) -> complex:
    """Newton refinement of a zero of a1 using the analytic derivative."""
    A, R = params.A, params.R
    for _ in range(steps):
        w = (A * A) * np.exp(4j * p * R) / (4.0 * p * p)
        f = 1.0 + w
        df = w * (4j * R - 2.0 / p)
        if df == 0:
            break
        step = f / df
        if not np.isfinite(step.real) or not np.isfinite(step.imag):
            break
        p = p - step
    return p


def solve_pj(params: StepParams) -> tuple[complex, ...]:
    """Second-quadrant zeros p_1, ..., p_n of a1, ordered by decreasing Re.

    With theta = 2kR, the real part k1 = -Re p_j solves

        ln(2 k1 / A) = ln|sin(theta)| + theta cot(theta),

    one root per window theta in ((2j-1) pi/2, j pi), and then
    Im p_j = -k1 cot(2 k1 R) > 0. Bisection in the window, then a complex
    Newton polish directly on a1.
    """
    A, R = params.A, params.R
    n = zero_count(params).n
    zeros: list[complex] = []
    for j in range(1, n + 1):
        lo = (2 * j - 1) * np.pi / (4.0 * R)
        hi = j * np.pi / (2.0 * R)
        pad = (hi - lo) * 1e-9

        def g(k):
            th = 2.0 * k * R
            s = np.sin(th)
            return np.log(2.0 * k / A) - np.log(abs(s)) - th * (np.cos(th) / s)

        root = find_root_1d(g, lo + pad, hi - pad, tol=1e-15 * hi)
        k1 = root
        th = 2.0 * k1 * R
        p = complex(-k1, -k1 * (np.cos(th) / np.sin(th)))
        p = _newton_polish_zero(params, p)
        if not (p.real < 0 < p.imag):
            raise SpectrumError(f"zero p_{j} left the second quadrant: {p}")
        resid = abs(1.0 + (A * A) * np.exp(4j * p * R) / (4.0 * p * p))
        if resid > 1e-10:
            raise SpectrumError(f"|a1(p_{j})| = {resid:.2e} exceeds 1e-10")
        zeros.append(p)
    return tuple(zeros)


def omegas(params: StepParams, n: int | None = None) -> tuple[float, ...]:
    """Threshold rays omega_j = (2j-1) pi / (4R), j = 1..n."""
    if n is None:
        n = zero_count(params).n
    return tuple((2 * j - 1) * np.pi / (4.0 * params.R) for j in range(1, n + 1))


@dataclass(frozen=True)
class DiscreteSpectrum:
    """Zeros of a1 in the closed upper half plane plus the threshold rays.

    p[j-1] holds p_j; mirror zeros -conj(p_j) are derived. `boundary` marks
    the degenerate parameter set (extra real pair at +-A/2).
    """
    params: StepParams
    n: int
    boundary: bool
    k0: float
    p: tuple[complex, ...]
    omegas: tuple[float, ...]

    @property
    def mirror_p(self) -> tuple[complex, ...]:
        return tuple(-np.conj(pj) for pj in self.p)

    @property
    def zeros_upper(self) -> tuple[complex, ...]:
        return (1j * self.k0,) + self.p + self.mirror_p

    @property
    def total_zeros(self) -> int:
        return 2 * self.n + 1 + (2 if self.boundary else 0)

    def p_at(self, j: int) -> complex:
        """p_j with 1-based j (j = 1..n)."""
        if not 1 <= j <= self.n:
            raise IndexError(f"p_{j} does not exist (n = {self.n})")
        return self.p[j - 1]

    def omega_at(self, j: int) -> float:
        """omega_j with the conventions omega_0 = 0 and omega_(n+1) = inf."""
        if j == 0:
            return 0.0
        if j == self.n + 1:
            return np.inf
        if not 1 <= j <= self.n:
            raise IndexError(f"omega_{j} does not exist (n = {self.n})")
        return self.omegas[j - 1]

    def re_p_abs(self, j: int) -> float:
        """|Re p_j| with the convention Re p_0 = 0."""
        if j == 0:
            return 0.0
        return abs(self.p_at(j).real)


def solve_spectrum(params: StepParams) -> DiscreteSpectrum:
    """Assemble the full discrete spectrum for (A, R)."""
    zc = zero_count(params)
    k0 = solve_k0(params)
    p = solve_pj(params)
    om = omegas(params, zc.n)
    ds = DiscreteSpectrum(params=params, n=zc.n, boundary=zc.boundary,
                          k0=k0, p=p, omegas=om)
    # interleaving -omega_(j+1) < Re p_j < -omega_j is automatic from the
    # solver windows; keep it as a hard invariant anyway
    for j in range(1, zc.n + 1):
        if not (-ds.omega_at(j + 1) < ds.p_at(j).real < -ds.omega_at(j)):
            raise SpectrumError(f"Re p_{j} violates the threshold interleaving")
    return ds


# --- winding of the argument along the real axis -------------------------

def _tail_start(sd: SpectralData) -> float:
    if sd.params is not None:
        A, R = sd.params.A, sd.params.R
    elif sd.profile is not None:
        A = sd.profile.amplitude
        R = max(abs(sd.profile.center), 0.5)
    else:
        raise DomainError("spectral data carries no parameter metadata")
    # beyond K the product a1 a2 stays in the right half plane (|a1a2 - 1|
    # decays like A^2/4k^2), so the principal argument is the continuous one
    return max(50.0, 20.0 / R, 2.0 * A)


def winding_arg(sd: SpectralData, xi: float, tol: float = 1e-8) -> float:
    """Accumulated argument of a1 a2 along (-inf, -xi], for xi > 0.

    Anchored at 0 at -inf. The infinite tail is truncated at -K where
    |a1 a2 - 1| is safely inside the unit disc and the principal argument
    coincides with the continuous one; the remaining finite stretch is
    tracked by adaptive phase sampling.
    """
    if not (np.isfinite(xi) and xi > 0):
        raise DomainError(f"winding_arg needs xi > 0, got {xi}")
    K = _tail_start(sd)
    fun = sd.a1a2
    for _ in range(40):
        if abs(complex(np.asarray(fun(np.array([-K])))[0]) - 1.0) < 0.3:
            break
        K *= 1.5
    else:
        raise SpectrumError("could not find a settled tail start for the winding")
    if K <= xi:
        K = 1.5 * xi + 1.0
    if sd.params is not None:
        A, R = sd.params.A, sd.params.R
    else:
        A, R = sd.profile.amplitude, max(abs(sd.profile.center), 0.5)

    # coarse on the tail where the phase is pinned near 0, dense where the
    # oscillation exp(4 i zeta R) can wind
    B = max(xi, 0.7 * A)
    pieces = []
    if K > B * (1 + 1e-12):
        pieces.append(np.linspace(-K, -B, 600))
    periods = max(1.0, (B - xi) * R / (0.5 * np.pi))
    dense = np.linspace(-B, -xi, int(24 * periods) + 64)
    pieces.append(dense)
    grid = np.unique(np.concatenate(pieces))
    anchor = float(np.angle(np.asarray(fun(grid[:1]))[0]))
    delta = winding_total(fun, grid)
    return anchor + delta


def argument_principle_count(params: StepParams, radius: float | None = None) -> int:
    """Zeros of a1 in the open upper half plane, counted by winding.

    Counts zeros of the entire function f(k) = k^2 a1(k) = k^2 +
    (A^2/4) exp(4ikR) over a closed semicircular contour; multiplying by
    k^2 removes the double pole of a1 at the origin without affecting the
    upper-half-plane zero count, so no indentation is needed. All zeros
    satisfy |k| <= A/2, well inside the default radius 10 max(A, 1/R).
    """
    A, R = params.A, params.R
    if radius is None:
        radius = 10.0 * max(A, 1.0 / R)

    def f_real(k):
        return k * k + 0.25 * A * A * np.exp(4j * k * R)

    def f_arc(phi):
        k = radius * np.exp(1j * phi)
        return k * k + 0.25 * A * A * np.exp(4j * k * R)

    # real segment: only |k| < ~A/2 can wind; outside, k^2 dominates
    B = min(max(0.7 * A, 0.05 * radius), radius)
    periods = max(1.0, 2.0 * B * R / (0.5 * np.pi))
    seg = np.unique(np.concatenate([
        np.linspace(-radius, -B, 200),
        np.linspace(-B, B, int(24 * periods) + 64),
        np.linspace(B, radius, 200),
    ]))
    total = winding_total(f_real, seg)
    total += winding_total(f_arc, np.linspace(0.0, np.pi, 512))
    count = total / (2.0 * np.pi)
    nearest = int(np.round(count))
    if abs(count - nearest) > 1e-2:
        raise SpectrumError(
            f"contour winding {count:.6f} is not close to an integer; "
            "zeros too near the contour?")
    return nearest


# --- structural assumptions ----------------------------------------------

@dataclass(frozen=True)
class AssumptionsReport:
    """Checks backing the sector analysis: zero locations, counts, windings."""
    zero_residual_max: float
    count_expected: int
    count_contour: int
    band_probes: tuple[tuple[float, int, float], ...]   # (xi, m, winding)
    threshold_checks: tuple[tuple[float, float, float, float], ...]
    # (omega_i, winding below, winding above, expected crossing)
    ordering_ok: bool
    boundary: bool

    @property
    def bands_ok(self) -> bool:
        return all((2 * m - 1) * np.pi < w < (2 * m + 1) * np.pi
                   for _, m, w in self.band_probes)

    @property
    def thresholds_ok(self) -> bool:
        return all(below > cross - 1e-6 and above < cross + 1e-6 and below > above
                   for _, below, above, cross in self.threshold_checks)

    @property
    def passed(self) -> bool:
        return (not self.boundary and self.zero_residual_max <= 1e-10
                and self.count_expected == self.count_contour
                and self.ordering_ok and self.bands_ok and self.thresholds_ok)


def _ordering_ok(ds: DiscreteSpectrum) -> bool:
    """Interleaving -omega_(j+1) < Re p_j < -omega_j, with Re p decreasing in j."""
    ok = True
    for j in range(1, ds.n + 1):
        ok &= -ds.omega_at(j + 1) < ds.p_at(j).real < -ds.omega_at(j)
    for j in range(1, ds.n):
        ok &= ds.p_at(j + 1).real < ds.p_at(j).real
    return bool(ok)


def validate_assumptions(sd: SpectralData, ds: DiscreteSpectrum) -> AssumptionsReport:
    """Verify the structural picture behind the sector analysis.

    Checks that every claimed zero annihilates a1, that the contour count
    agrees with 2n+1, that the winding sits in ((2m-1)pi, (2m+1)pi) inside
    each band, and that it crosses the threshold values at the omega rays.
    Requires closed-form spectral data.
    """
    if sd.source != "closed_form" or sd.params is None:
        raise DomainError("validate_assumptions needs closed-form spectral data")
    params = sd.params
    residuals = [abs(complex(np.asarray(sd.a1(np.array([z], dtype=complex)))[0]))
                 for z in ds.zeros_upper]
    zero_residual_max = max(residuals)

    count_contour = argument_principle_count(params)

    band_probes = []
    for m in range(ds.n + 1):
        lo = ds.omega_at(ds.n - m)
        hi = ds.omega_at(ds.n - m + 1)
        xi = 2.0 * lo + 1.0 if np.isinf(hi) else 0.5 * (lo + hi)
        band_probes.append((float(xi), m, winding_arg(sd, xi)))

    threshold_checks = []
    for i in range(1, ds.n + 1):
        om = ds.omega_at(i)
        below = winding_arg(sd, om - 1e-3)
        above = winding_arg(sd, om + 1e-3)
        cross = (2 * (ds.n - i) + 1) * np.pi
        threshold_checks.append((float(om), below, above, float(cross)))

    return AssumptionsReport(
        zero_residual_max=zero_residual_max,
        count_expected=2 * ds.n + 1,
        count_contour=count_contour,
        band_probes=tuple(band_probes),
        threshold_checks=tuple(threshold_checks),
        ordering_ok=_ordering_ok(ds),
        boundary=ds.boundary)


@dataclass(frozen=True)
class NormingConstants:
    """b evaluated at the discrete spectrum: gamma0 = b(i k0), eta_j = b(p_j)."""
    gamma0: complex
    eta: tuple[complex, ...]


def norming_constants(sd: SpectralData, ds: DiscreteSpectrum) -> NormingConstants:
    """Norming constants at the simple zeros of a1 (closed-form data only)."""
    if not sd.supports_complex:
        raise DomainError("norming constants need evaluators valid off the real axis")
    gamma0 = complex(np.asarray(sd.b(np.array([1j * ds.k0])))[0])
    eta = tuple(complex(np.asarray(sd.b(np.array([pj])))[0]) for pj in ds.p)
    return NormingConstants(gamma0=gamma0, eta=eta)
