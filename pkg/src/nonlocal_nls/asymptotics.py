"""Leading long-time behaviour along rays x = 4 xi t.

Two independent evaluation routes are provided. `q_asymptotic` assembles
the explicit sector formulas: a plateau constant (where present) plus one
or two oscillatory corrections of modulus t^(-1/2 -+ Im nu) built from
closed-form coefficients alpha_1..alpha_6. `q_via_parametrix` rebuilds the
same value from the parabolic-cylinder parametrix data (beta, gamma, the
matrix B, and the residue constants), following the reconstruction formula
of the matrix problem. The two must agree to roundoff; the second route is
the regression oracle for the first.

All quantities on a ray xi are evaluated through the mirror-symmetric
pipeline at eta = |xi|: for xi < 0 the reconstruction reads the solution at
-x, which is what the case ii / case iv formulas encode.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .deformation import (
    DeltaContext,
    SectorLabel,
    build_delta_context,
    c0_constants,
    classify_sector,
    delta_eval,
    r_as,
)
from .numerics import complex_gamma
from .scattering import DomainError, SpectralData, reflection_coeffs
from .spectrum import DiscreteSpectrum

__all__ = [
    "PhaseData",
    "RayContext",
    "AsymptoticEval",
    "SectorRow",
    "ray_context",
    "plateau_constant",
    "alpha",
    "q_asymptotic",
    "q_via_parametrix",
    "sector_table",
]

_LN2 = np.log(2.0)


@dataclass(frozen=True)
class PhaseData:
    """Oscillatory phase theta(k) = 4 k xi + 2 k^2 with stationary point -xi."""
    xi: float

    def value(self, k):
        k = np.asarray(k, dtype=complex)
        return 4.0 * k * self.xi + 2.0 * k * k

    @property
    def stationary_point(self) -> float:
        return -self.xi


@dataclass
class RayContext:
    """Shared per-ray data: sector, exponent, conjugation values, constants."""
    xi: float
    eta: float
    sector: SectorLabel
    sd: SpectralData
    ds: DiscreteSpectrum
    dctx: DeltaContext
    nu: complex
    delta0: complex
    chi_sum_eta: complex      # sum_s chi_s(-eta)
    c0: complex
    c0sharp: complex | None
    r1_eta: complex           # r1(-eta)
    r2_eta: complex
    beta: complex
    gamma: complex
    pw: float                 # prod (omega_(n-s) - eta), s = 0..m-1


def ray_context(xi: float, sd: SpectralData, ds: DiscreteSpectrum,
                tol: float = 1e-10) -> RayContext:
    """Build every ray-level quantity once (both routes feed off this)."""
    if not np.isfinite(xi):
        raise DomainError(f"xi must be finite, got {xi}")
    sector = classify_sector(xi, ds)
    eta = abs(xi)
    dctx = build_delta_context(eta, sd, ds, tol=tol)
    nu = dctx.nu
    delta0 = delta_eval(0.0, dctx)
    chi_sum_eta = dctx.chi_sum(-eta)
    c0, c0sharp = c0_constants(ds, dctx.m, delta0)
    pair = reflection_coeffs(sd)
    r1_eta = complex(np.asarray(pair.r1(np.array([-eta], dtype=complex)))[0])
    r2_eta = complex(np.asarray(pair.r2(np.array([-eta], dtype=complex)))[0])

    with_d = sector.case in ("iii", "iv")
    r1as, r2as = r_as(-eta, sd, ds, dctx.m, with_d=with_d)
    pref = np.sqrt(2.0 * np.pi) * np.exp(-np.pi * nu / 2.0)
    beta = pref * np.exp(-3j * np.pi / 4.0) / (r1as * complex_gamma(-1j * nu))
    gamma = pref * np.exp(-1j * np.pi / 4.0) / (r2as * complex_gamma(1j * nu))

    pw = 1.0
    for om in dctx.omegas_used:
        pw *= om - eta
    return RayContext(xi=float(xi), eta=eta, sector=sector, sd=sd, ds=ds,
                      dctx=dctx, nu=nu, delta0=delta0,
                      chi_sum_eta=chi_sum_eta, c0=c0, c0sharp=c0sharp,
                      r1_eta=r1_eta, r2_eta=r2_eta, beta=beta, gamma=gamma,
                      pw=float(pw))


def plateau_constant(xi: float, sd: SpectralData, ds: DiscreteSpectrum,
                     tol: float = 1e-10, ray: RayContext | None = None) -> complex:
    """The t-independent limit along the ray (0 in the decay sectors).

    Right plateaus carry A delta(0)^2 prod (omega_(n-s)/p_(n-s))^2; left
    plateaus carry the reflected constant built from c0#.
    """
    ray = ray if ray is not None else ray_context(xi, sd, ds, tol=tol)
    if ray.sector.case == "i":
        return 2j * ray.c0
    if ray.sector.case == "iv":
        return -2j * np.conj(ray.c0sharp)
    return 0.0 + 0.0j


def _prod_p_sq(ray: RayContext, upto: int) -> complex:
    """prod_(s=0)^(upto-1) (eta + p_(n-s))^2."""
    out = 1.0 + 0.0j
    for s in range(upto):
        out *= (ray.eta + ray.ds.p_at(ray.ds.n - s)) ** 2
    return out


_ALPHA_CASE = {1: "i", 2: "i", 3: "ii", 4: "iii", 5: "iv", 6: "iv"}


def alpha(j: int, xi: float, sd: SpectralData, ds: DiscreteSpectrum,
          tol: float = 1e-10, ray: RayContext | None = None) -> complex:
    """Coefficient alpha_j of the oscillatory correction in its sector.

    j = 1, 2 live on right plateaus, 3 on right-moving decay, 4 on left
    decay, 5, 6 on left plateaus; requesting a j outside its sector raises.
    """
    ray = ray if ray is not None else ray_context(xi, sd, ds, tol=tol)
    if _ALPHA_CASE.get(j) != ray.sector.case:
        raise DomainError(
            f"alpha_{j} is not defined in a case {ray.sector.case} sector")
    nu = ray.nu
    eta = ray.eta
    chs = ray.chi_sum_eta
    rt_pi = np.sqrt(np.pi)
    if j == 1:
        pp = _prod_p_sq(ray, ray.dctx.m)
        return (rt_pi * ray.c0 ** 2 * pp
                / (eta ** 2 * ray.r2_eta * complex_gamma(1j * nu))
                * np.exp(-np.pi * nu / 2 + 3j * np.pi / 4 - 2 * chs
                         + 3j * nu * _LN2))
    if j == 2:
        pp = _prod_p_sq(ray, ray.dctx.m)
        return (rt_pi / (pp * ray.r1_eta * complex_gamma(-1j * nu))
                * np.exp(-np.pi * nu / 2 + 1j * np.pi / 4 + 2 * chs
                         - 3j * nu * _LN2))
    if j == 3:
        pp = np.conj(_prod_p_sq(ray, ray.dctx.m))
        nub = np.conj(nu)
        return (rt_pi * pp / (np.conj(ray.r2_eta) * complex_gamma(-1j * nub))
                * np.exp(-np.pi * nub / 2 + 1j * np.pi / 4 - 2 * np.conj(chs)
                         - 3j * nub * _LN2))
    if j == 4:
        pp = _prod_p_sq(ray, ray.dctx.m + 1)
        return (rt_pi * eta ** 2
                / (pp * ray.r1_eta * complex_gamma(-1j * nu))
                * np.exp(-np.pi * nu / 2 + 1j * np.pi / 4 + 2 * chs
                         - 3j * nu * _LN2))
    if j == 5:
        pp = np.conj(_prod_p_sq(ray, ray.dctx.m + 1))
        nub = np.conj(nu)
        return (rt_pi * pp
                / (eta ** 2 * np.conj(ray.r2_eta) * complex_gamma(-1j * nub))
                * np.exp(-np.pi * nub / 2 + 1j * np.pi / 4 - 2 * np.conj(chs)
                         - 3j * nub * _LN2))
    if j == 6:
        pp = np.conj(_prod_p_sq(ray, ray.dctx.m + 1))
        nub = np.conj(nu)
        return (rt_pi * np.conj(ray.c0sharp) ** 2
                / (pp * np.conj(ray.r1_eta) * complex_gamma(1j * nub))
                * np.exp(-np.pi * nub / 2 + 3j * np.pi / 4 + 2 * np.conj(chs)
                         + 3j * nub * _LN2))
    raise ValueError(f"alpha index must be 1..6, got {j}")


def _oscillatory_terms(ray: RayContext, t: float) -> tuple[tuple[str, complex], ...]:
    """All structural correction terms of the sector at time t.

    Each term is t^(-1/2 -+ Im nu) alpha_j exp(-+ 4 i t xi^2 +- i Re nu ln t);
    the labels record which alpha it carries.
    """
    nu = ray.nu
    re, im = nu.real, nu.imag
    eta2 = ray.eta * ray.eta
    lnt = np.log(t)
    slow = t ** (-0.5 - im)
    fast = t ** (-0.5 + im)
    case = ray.sector.case
    if case == "i":
        a1 = alpha(1, ray.xi, ray.sd, ray.ds, ray=ray)
        a2 = alpha(2, ray.xi, ray.sd, ray.ds, ray=ray)
        return (
            ("alpha1", slow * a1 * np.exp(-4j * t * eta2 + 1j * re * lnt)),
            ("alpha2", fast * a2 * np.exp(4j * t * eta2 - 1j * re * lnt)),
        )
    if case == "ii":
        a3 = alpha(3, ray.xi, ray.sd, ray.ds, ray=ray)
        return (("alpha3", slow * a3 * np.exp(4j * t * eta2 - 1j * re * lnt)),)
    if case == "iii":
        a4 = alpha(4, ray.xi, ray.sd, ray.ds, ray=ray)
        return (("alpha4", fast * a4 * np.exp(4j * t * eta2 - 1j * re * lnt)),)
    if case == "iv":
        a5 = alpha(5, ray.xi, ray.sd, ray.ds, ray=ray)
        a6 = alpha(6, ray.xi, ray.sd, ray.ds, ray=ray)
        return (
            ("alpha5", slow * a5 * np.exp(4j * t * eta2 - 1j * re * lnt)),
            ("alpha6", fast * a6 * np.exp(-4j * t * eta2 + 1j * re * lnt)),
        )
    raise ValueError(f"unknown case {case}")


def _remainder(kind: str, im: float) -> tuple[float, bool]:
    """Remainder order (t-exponent, with-log flag) by kind and Im nu."""
    if kind == "R1":
        if im > 0:
            return -1.0, False
        if im == 0:
            return -1.0, True
        return -1.0 + 2.0 * abs(im), False
    if kind == "R2":
        if im > 0:
            return -1.0 + 2.0 * im, False
        if im == 0:
            return -1.0, True
        return -1.0, False
    if kind == "R3":
        if im == 0:
            return -1.0, True
        return -1.0 + 2.0 * abs(im), False
    raise ValueError(kind)


def _retention(case: str, im: float) -> tuple[tuple[int, ...], str]:
    """Indices of the retained corrections and the remainder kind.

    In the two-term sectors only the corrections not absorbed by the
    remainder are kept: the slow one for Im nu <= -1/6, both in the middle
    band, the fast one for Im nu >= 1/6.
    """
    if case in ("ii", "iii"):
        return (0,), "R2"
    if im <= -1.0 / 6.0:
        return (0,), "R1"
    if im < 1.0 / 6.0:
        return (0, 1), "R3"
    return (1,), "R2"


@dataclass(frozen=True)
class AsymptoticEval:
    """Asymptotic value of q at (x, t) = (4 xi t, t) with its breakdown.

    `corrections` holds the oscillatory terms retained by the sector formula
    (one or two); `corrections_full` always holds the complete structural
    set, whose sum is what the parametrix route reproduces exactly.
    `remainder_order` describes the neglected remainder, e.g. "t^-1" or
    "t^-1 log t".
    """
    xi: float
    t: float
    sector: SectorLabel
    leading: complex
    corrections: tuple[complex, ...]
    corrections_full: tuple[complex, ...]
    remainder_order: str
    value: complex
    value_full: complex


def q_asymptotic(x: float, t: float, sd: SpectralData, ds: DiscreteSpectrum,
                 tol: float = 1e-10, ray: RayContext | None = None) -> AsymptoticEval:
    """Explicit long-time evaluation of q(x, t) along its ray.

    The retained corrections follow the Im nu subcases; `value_full` keeps
    every structural term (useful for cross-route comparison, since the
    subcase split merely reclassifies a term as remainder).
    """
    if not (np.isfinite(t) and t > 0):
        raise DomainError(f"need t > 0, got {t}")
    xi = x / (4.0 * t)
    if ray is None:
        ray = ray_context(xi, sd, ds, tol=tol)
    elif abs(ray.xi - xi) > 1e-12 * max(1.0, abs(xi)):
        raise DomainError("ray context does not match (x, t)")
    leading = plateau_constant(xi, sd, ds, ray=ray)
    terms = _oscillatory_terms(ray, t)
    values = tuple(v for _, v in terms)
    keep_idx, rem_kind = _retention(ray.sector.case, ray.nu.imag)
    kept = tuple(values[i] for i in keep_idx)
    exponent, with_log = _remainder(rem_kind, ray.nu.imag)
    rem = f"t^{exponent:.6g}" + (" log t" if with_log else "")
    return AsymptoticEval(
        xi=float(xi), t=float(t), sector=ray.sector, leading=leading,
        corrections=kept, corrections_full=values,
        remainder_order=rem,
        value=leading + sum(kept),
        value_full=leading + sum(values))


def _B_offdiag(ray: RayContext, t: float) -> tuple[complex, complex]:
    """Off-diagonal entries of the parametrix matching matrix at time t."""
    nu = ray.nu
    eta2 = ray.eta * ray.eta
    ln8t = np.log(8.0 * t)
    pw2 = ray.pw * ray.pw
    b12 = (-1j * ray.beta * np.exp(4j * t * eta2 + 2.0 * ray.chi_sum_eta)
           * np.exp(-1j * nu * ln8t) / pw2)
    b21 = (1j * ray.gamma * np.exp(-4j * t * eta2 - 2.0 * ray.chi_sum_eta)
           * np.exp(1j * nu * ln8t) * pw2)
    return b12, b21


def q_via_parametrix(x: float, t: float, sd: SpectralData, ds: DiscreteSpectrum,
                     tol: float = 1e-10, ray: RayContext | None = None) -> complex:
    """q(x, t) rebuilt from the parametrix data (the cross-check route).

    Runs the matrix reconstruction: the residue constant c0 (or c0#) plus
    the B-matrix contribution, read off at +x or -x according to the sector
    side. Agrees with `q_asymptotic(...).value_full` to roundoff.
    """
    if not (np.isfinite(t) and t > 0):
        raise DomainError(f"need t > 0, got {t}")
    xi = x / (4.0 * t)
    if ray is None:
        ray = ray_context(xi, sd, ds, tol=tol)
    b12, b21 = _B_offdiag(ray, t)
    rt8t = np.sqrt(8.0 * t)
    eta = ray.eta
    case = ray.sector.case
    if case == "i":
        bas12 = ((ray.c0 / eta) ** 2 * b21 - b12) / rt8t
        return 2j * (ray.c0 + bas12)
    if case == "ii":
        return 2j * np.conj(b21) / rt8t
    if case == "iii":
        return -2j * b12 / rt8t
    if case == "iv":
        bas21 = ((ray.c0sharp / eta) ** 2 * b12 - b21) / rt8t
        return -2j * (np.conj(ray.c0sharp) + np.conj(bas21))
    raise ValueError(f"unknown case {case}")


@dataclass(frozen=True)
class SectorRow:
    """One sector of the xi axis: open interval, band index, kind, case."""
    lo: float
    hi: float
    m: int
    kind: str
    case: str


def sector_table(ds: DiscreteSpectrum) -> tuple[SectorRow, ...]:
    """The full sector decomposition of the xi axis, ascending (4n+2 rows)."""
    breaks = sorted({ds.omega_at(j) for j in range(1, ds.n + 1)}
                    | {ds.re_p_abs(j) for j in range(1, ds.n + 1)})
    edges_pos = [0.0] + breaks + [np.inf]
    rows: list[SectorRow] = []
    for lo, hi in zip(edges_pos[:-1], edges_pos[1:]):
        probe = lo + 1.0 if np.isinf(hi) else 0.5 * (lo + hi)
        lab_pos = classify_sector(probe, ds)
        lab_neg = classify_sector(-probe, ds)
        rows.append(SectorRow(lo=lo, hi=hi, m=lab_pos.m,
                              kind=lab_pos.kind, case=lab_pos.case))
        rows.insert(0, SectorRow(lo=-hi, hi=-lo, m=lab_neg.m,
                                 kind=lab_neg.kind, case=lab_neg.case))
    rows.sort(key=lambda r: (r.lo, r.hi))
    assert len(rows) == 4 * ds.n + 2
    return tuple(rows)
