"""Sector classification and the scalar conjugation factor.

Along a ray x = 4 xi t the long-time behaviour is controlled by where
eta = |xi| falls relative to the threshold rays omega_j and the real parts
of the second-quadrant zeros p_j. Writing m for the band index
(omega_(n-m) < eta < omega_(n-m+1)), the conjugation factor

    delta(k) = (k + eta)^(i nu) prod_(s=0)^(m-1) (k + omega_(n-s))^(-1)
               exp( sum_(s=0)^(m) chi_s(k) )

removes the jump 1 + r1(k) r2(k) of the model problem across (-inf, -eta],
with exponent

    nu = (1/2pi) ln|a1 a2(-eta)| + i (W(eta) - 2 pi m) / (2 pi),

W the accumulated argument of a1 a2 along (-inf, -eta]. The chi_s are
log-kernel integrals of d/dzeta log(1 + r1 r2) over the corresponding
pieces of the cut. The infinite piece converges only as an oscillatory
improper integral; for closed-form data it is evaluated exactly by rotating
the contour into the upper half plane, where the integrand decays like
exp(4 zeta_im R).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .numerics import adaptive_quad
from .scattering import DomainError, SpectralData, reflection_coeffs
from .spectrum import BoundaryParamsError, DiscreteSpectrum, winding_arg

__all__ = [
    "DeformationError",
    "BoundaryRayError",
    "BranchCutError",
    "ExponentRangeError",
    "SectorLabel",
    "DeltaContext",
    "classify_sector",
    "band_index",
    "nu_of",
    "build_delta_context",
    "chi_s",
    "delta_eval",
    "delta_boundary",
    "r_as",
    "c0_constants",
]

# Rays closer than this to a sector boundary (0, +-omega_j, +-|Re p_j|) are
# refused: the asymptotic form changes across them.
RAY_EXCLUSION = 1e-9


class DeformationError(Exception):
    """Base class for conjugation-factor failures."""


class BoundaryRayError(DeformationError):
    """xi sits on (or numerically at) a sector boundary ray."""


class BranchCutError(DeformationError, ValueError):
    """delta evaluated on its branch cut (-inf, -eta] or at a pole."""


class ExponentRangeError(DeformationError):
    """Im nu left the open interval (-1/2, 1/2); the band index is wrong."""


@dataclass(frozen=True)
class SectorLabel:
    """Where a ray xi lives: band index m, sector kind, and case tag.

    kind is one of plateau_right / decay / plateau_left; the case tag
    i/ii/iii/iv records which reconstruction formula applies (i and iii for
    xi > 0, ii and iv for xi < 0).
    """
    m: int
    kind: str
    case: str
    xi: float


_KIND_OF_CASE = {"i": "plateau_right", "ii": "decay",
                 "iii": "decay", "iv": "plateau_left"}


def _check_ray(eta: float, ds: DiscreteSpectrum):
    if ds.boundary:
        raise BoundaryParamsError(
            "degenerate parameters (extra real spectrum); asymptotics undefined")
    if eta < RAY_EXCLUSION:
        raise BoundaryRayError(f"ray xi = +-{eta} is too close to xi = 0")
    for j in range(1, ds.n + 1):
        if abs(eta - ds.omega_at(j)) < RAY_EXCLUSION:
            raise BoundaryRayError(f"ray |xi| = {eta} sits on omega_{j}")
        if abs(eta - ds.re_p_abs(j)) < RAY_EXCLUSION:
            raise BoundaryRayError(f"ray |xi| = {eta} sits on |Re p_{j}|")


def band_index(eta: float, ds: DiscreteSpectrum) -> int:
    """Band index m with omega_(n-m) < eta < omega_(n-m+1), for eta > 0."""
    _check_ray(eta, ds)
    for j in range(ds.n + 1):
        if ds.omega_at(j) < eta < ds.omega_at(j + 1):
            return ds.n - j
    raise DeformationError(f"could not place eta = {eta} in a band")


def classify_sector(xi: float, ds: DiscreteSpectrum) -> SectorLabel:
    """Sector of the ray x = 4 xi t.

    For xi > 0: plateau (case i) when eta = |xi| exceeds |Re p_(n-m)| in its
    band (with the convention Re p_0 = 0 making all of the innermost band a
    plateau), decay (case iii) otherwise. For xi < 0 the mirror assignment:
    decay (case ii) above |Re p_(n-m)|, plateau (case iv) below.
    """
    if not np.isfinite(xi):
        raise DomainError(f"xi must be finite, got {xi}")
    eta = abs(xi)
    m = band_index(eta, ds)
    split = ds.re_p_abs(ds.n - m)
    if xi > 0:
        case = "i" if eta > split else "iii"
    else:
        case = "ii" if eta > split else "iv"
    return SectorLabel(m=m, kind=_KIND_OF_CASE[case], case=case, xi=float(xi))


def nu_of(xi: float, sd: SpectralData, m: int, tol: float = 1e-8) -> complex:
    """Exponent nu at the stationary point -xi (xi = eta > 0).

    Re nu from ln|a1 a2(-xi)|, Im nu from the accumulated argument along
    (-inf, -xi] shifted by the band index. Raises ExponentRangeError if the
    result leaves (-1/2, 1/2), which signals an inconsistent m.
    """
    if xi <= 0:
        raise DomainError("nu_of expects the positive ray magnitude")
    prod = complex(np.asarray(sd.a1a2(np.array([-xi], dtype=complex)))[0])
    re = np.log(abs(prod)) / (2.0 * np.pi)
    W = winding_arg(sd, xi, tol)
    im = (W - 2.0 * np.pi * m) / (2.0 * np.pi)
    if not -0.5 < im < 0.5:
        raise ExponentRangeError(
            f"Im nu = {im:.6f} outside (-1/2, 1/2) for xi={xi}, m={m}")
    return complex(re, im)


@dataclass(frozen=True)
class DeltaContext:
    """Everything needed to evaluate delta(k) on a fixed ray.

    intervals[s] is the piece of the cut carrying chi_s (s = 0..m; the first
    one reaches -inf). omegas_used are omega_(n-s) for s = 0..m-1, the poles
    absorbed by the explicit rational factor.
    """
    xi: float
    m: int
    nu: complex
    ds: DiscreteSpectrum
    sd: SpectralData
    intervals: tuple[tuple[float, float], ...]
    omegas_used: tuple[float, ...]
    tol: float
    _memo: dict = field(default_factory=dict, repr=False, compare=False)

    def chi_sum(self, k: complex) -> complex:
        return sum(chi_s(k, s, self) for s in range(self.m + 1))


def build_delta_context(xi: float, sd: SpectralData, ds: DiscreteSpectrum,
                        tol: float = 1e-10) -> DeltaContext:
    """Assemble the conjugation data for eta = xi > 0 (band index derived)."""
    if xi <= 0:
        raise DomainError("build_delta_context expects the positive ray magnitude")
    m = band_index(xi, ds)
    nu = nu_of(xi, sd, m, tol=max(tol, 1e-10))
    intervals: list[tuple[float, float]] = []
    for s in range(m + 1):
        lo = -np.inf if s == 0 else -ds.omega_at(ds.n - s + 1)
        hi = -ds.omega_at(ds.n - s) if s < m else -xi
        intervals.append((lo, hi))
    omegas_used = tuple(ds.omega_at(ds.n - s) for s in range(m))
    return DeltaContext(xi=float(xi), m=m, nu=nu, ds=ds, sd=sd,
                        intervals=tuple(intervals), omegas_used=omegas_used,
                        tol=tol)


def _density(sd: SpectralData):
    """d/dzeta log(1 + r1 r2), analytic when available, differenced otherwise."""
    if sd.dlog_jump is not None:
        return sd.dlog_jump
    pair = reflection_coeffs(sd)
    if sd.k_grid is None:
        raise DomainError("no density available for this spectral data")
    h = 0.5 * float(np.min(np.diff(sd.k_grid)))

    def g(z):
        z = np.asarray(z, dtype=float)
        p0 = 1.0 + pair.product(z)
        pp = 1.0 + pair.product(z + h)
        pm = 1.0 + pair.product(z - h)
        return (pp - pm) / (2.0 * h * p0)

    return g


def _chi_tail(k: complex, hi: float, ctx: DeltaContext) -> complex:
    """Integral of log(k - zeta) g(zeta) over (-inf, hi], done safely.

    Closed-form data: split at -K (K past the zero-free bound A/2 and past
    Re k) and rotate the remaining ray into the upper half plane, where the
    integrand decays like exp(-4 R y); the quarter-contour closes because
    1 + r1 r2 has no zeros and log(k - zeta) no cut in that region. ODE
    data: integrate by parts and truncate the 1/zeta^2 remainder, which
    caps the achievable accuracy near 1e-5.
    """
    sd = ctx.sd
    g = _density(sd)
    if sd.source == "closed_form":
        A, R = sd.params.A, sd.params.R
        K = max(0.7 * A + 0.5, abs(hi) + 1.0, 2.0 - k.real)
        finite = adaptive_quad(lambda z: np.log(k - z) * g(z), -K, hi, tol=ctx.tol)
        Y = 10.0 / R

        def vert(y):
            z = -K + 1j * np.asarray(y)
            return np.log(k - z) * g(z)

        tail = adaptive_quad(vert, 0.0, Y, tol=ctx.tol)
        return finite.value + (-1j) * tail.value

    # ODE data: L(zeta) = log(1 + r1 r2) -> 0 at -inf, so integrating by
    # parts gives log(k + K) L(-K) + int L(zeta)/(k - zeta) dzeta.
    kg = sd.k_grid
    K = abs(hi) + 1.0
    K2 = min(-float(kg[0]), 60.0 * K)
    if K2 <= K:
        raise DomainError("ODE grid too narrow for the tail of chi_0")
    pair = reflection_coeffs(sd)

    def L(z):
        return np.log(1.0 + pair.product(np.asarray(z, dtype=float)))

    finite = adaptive_quad(lambda z: np.log(k - z) * g(z), -K, hi, tol=ctx.tol)
    bterm = np.log(k + K) * complex(np.asarray(L(np.array([-K])))[0])
    rest = adaptive_quad(lambda z: L(z) / (k - z), -K2, -K,
                         tol=max(ctx.tol, 1e-7), max_subdiv=20000)
    return finite.value + bterm + rest.value


def chi_s(k: complex, s: int, ctx: DeltaContext) -> complex:
    """chi_s(k) = -(1/2 pi i) int log(k - zeta) g(zeta) dzeta over piece s.

    The principal log kernel is valid for every k off (-inf, -xi] because
    Im(k - zeta) keeps a fixed sign along each real piece. Endpoint log
    singularities (k at the right end of the last piece) are integrable and
    handled by the graded quadrature.
    """
    if not 0 <= s <= ctx.m:
        raise IndexError(f"chi_{s} does not exist on this ray (m = {ctx.m})")
    k = complex(k)
    key = (k, s)
    hit = ctx._memo.get(key)
    if hit is not None:
        return hit
    lo, hi = ctx.intervals[s]
    if np.isinf(lo):
        raw = _chi_tail(k, hi, ctx)
    else:
        g = _density(ctx.sd)
        raw = adaptive_quad(lambda z: np.log(k - z) * g(z), lo, hi,
                            tol=ctx.tol).value
    out = raw / (-2j * np.pi)
    ctx._memo[key] = out
    return out


def delta_eval(k: complex, ctx: DeltaContext) -> complex:
    """The conjugation factor delta(k) away from its branch cut.

    delta(k) = (k + xi)^(i nu) prod (k + omega_(n-s))^(-1) exp(sum chi_s(k)).
    Tends to 1 at infinity and satisfies delta+ = delta- (1 + r1 r2) across
    (-inf, -xi].
    """
    k = complex(k)
    if k.imag == 0.0 and k.real <= -ctx.xi:
        raise BranchCutError(f"k = {k} lies on the branch cut (-inf, {-ctx.xi}]")
    for om in ctx.omegas_used:
        if abs(k + om) < 1e-12:
            raise BranchCutError(f"k = {k} is a pole of delta (at -omega)")
    power = np.exp(1j * ctx.nu * np.log(k + ctx.xi))
    rational = np.prod([1.0 / (k + om) for om in ctx.omegas_used]) if ctx.omegas_used else 1.0
    return power * rational * np.exp(ctx.chi_sum(k))


def _chi_boundary(kr: float, s: int, side: int, ctx: DeltaContext) -> complex:
    """One-sided chi_s at a real point kr on the cut.

    On each piece the kernel log(k - zeta) degenerates to ln|kr - zeta| plus
    i pi (from above) or -i pi (from below) wherever zeta > kr. Pieces are
    split at kr so the quadrature grades into the integrable log singularity
    from both sides and never sees the indicator jump.
    """
    key = (complex(kr), s, side)
    hit = ctx._memo.get(key)
    if hit is not None:
        return hit
    g = _density(ctx.sd)
    lo, hi = ctx.intervals[s]

    def left_kernel(z):
        z = np.asarray(z, dtype=float)
        return np.log(kr - z) * g(z)

    def right_kernel(z):
        z = np.asarray(z, dtype=float)
        return (np.log(z - kr) + 1j * np.pi * side) * g(z)

    raw = 0.0 + 0.0j
    if np.isinf(lo):
        sd = ctx.sd
        if sd.source != "closed_form":
            raise DomainError(
                "cut boundary values need closed-form spectral data")
        A, R = sd.params.A, sd.params.R
        K = max(0.7 * A + 0.5, abs(hi) + 1.0, 2.0 - kr)
        # -K < kr always, so the rotated leg never touches the singularity
        # and is the same from both sides of the cut.
        Y = 10.0 / R

        def vert(y):
            z = -K + 1j * np.asarray(y)
            return np.log(kr - z) * g(z)

        raw += (-1j) * adaptive_quad(vert, 0.0, Y, tol=ctx.tol).value
        lo = -K
    if kr <= lo:
        raw += adaptive_quad(right_kernel, lo, hi, tol=ctx.tol).value
    elif kr >= hi:
        raw += adaptive_quad(left_kernel, lo, hi, tol=ctx.tol).value
    else:
        raw += adaptive_quad(left_kernel, lo, kr, tol=ctx.tol).value
        raw += adaptive_quad(right_kernel, kr, hi, tol=ctx.tol).value
    out = raw / (-2j * np.pi)
    ctx._memo[key] = out
    return out


def delta_boundary(kr: float, ctx: DeltaContext, side: int = 1) -> complex:
    """Boundary value of delta at a point of the open cut (-inf, -xi).

    side=+1 is the limit from the upper half plane, -1 from below. The power
    factor picks up exp(i nu (ln|kr + xi| +- i pi)), the rational factor is
    real and single valued, and each chi_s gets its one-sided kernel. The
    two values satisfy delta+ = delta- (1 + r1 r2) pointwise on the cut.
    """
    kr = float(kr)
    if side not in (1, -1):
        raise ValueError(f"side must be +1 or -1, got {side}")
    if not kr < -ctx.xi - 1e-12:
        raise BranchCutError(
            f"kr = {kr} is not interior to the cut (-inf, {-ctx.xi})")
    for om in ctx.omegas_used:
        if abs(kr + om) < 1e-9:
            raise BranchCutError(f"kr = {kr} is a pole of delta (at -omega)")
    power = np.exp(1j * ctx.nu * (np.log(abs(kr + ctx.xi)) + 1j * np.pi * side))
    rational = np.prod([1.0 / (kr + om) for om in ctx.omegas_used]) \
        if ctx.omegas_used else 1.0
    chi = sum(_chi_boundary(kr, s, side, ctx) for s in range(ctx.m + 1))
    return power * rational * np.exp(chi)


def r_as(k: complex, sd: SpectralData, ds: DiscreteSpectrum, m: int,
         with_d: bool = False) -> tuple[complex, complex]:
    """Modified reflection coefficients feeding the model problem.

    Multiplies r1 by prod ((k - p_(n-s)) / (k + omega_(n-s)))^2 over
    s = 0..m-1 (and r2 by the inverse), which trades the poles of the
    conjugated jump for benign zeros. In the sectors below |Re p_(n-m)|
    (with_d=True) an extra factor d(k)^2 = (k / (k - p_(n-m)))^2 moves the
    nearest pole pair as well. The product r1 r2 is unchanged.
    """
    pair = reflection_coeffs(sd)
    r1v = complex(np.asarray(pair.r1(np.array([k], dtype=complex)))[0])
    r2v = complex(np.asarray(pair.r2(np.array([k], dtype=complex)))[0])
    factor = 1.0 + 0.0j
    for s in range(m):
        p = ds.p_at(ds.n - s)
        om = ds.omega_at(ds.n - s)
        factor *= ((k - p) / (k + om)) ** 2
    r1v *= factor
    r2v /= factor
    if with_d:
        p = ds.p_at(ds.n - m)
        d2 = (k / (k - p)) ** 2
        r1v /= d2
        r2v *= d2
    return r1v, r2v


def c0_constants(ds: DiscreteSpectrum, m: int, delta0: complex,
                 ) -> tuple[complex, complex | None]:
    """Residue-type constants of the model solution at the origin.

    c0 = A delta(0)^2 / (2i) prod (omega_(n-s)/p_(n-s))^2 drives the plateau
    sectors; its sharp companion c0# = 2i p_(n-m)^2 / (A delta(0)^2) prod
    (p_(n-s)/omega_(n-s))^2 drives the sectors below |Re p_(n-m)| and only
    exists for m < n. Their product is p_(n-m)^2.
    """
    A = ds.params.A
    prod = 1.0 + 0.0j
    for s in range(m):
        prod *= (ds.omega_at(ds.n - s) / ds.p_at(ds.n - s)) ** 2
    c0 = A * delta0 * delta0 / 2j * prod
    if m < ds.n:
        c0sharp = 2j * ds.p_at(ds.n - m) ** 2 / (A * delta0 * delta0) / prod
    else:
        c0sharp = None
    return c0, c0sharp
