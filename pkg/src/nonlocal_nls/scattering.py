"""Scattering coefficients of step-like initial data.

For the shifted step

    q0(x) = 0 (x < R),   q0(x) = A (x > R),   A > 0, R > 0,

the scattering coefficients of the associated nonlocal Zakharov-Shabat pair
have closed forms

    a1(k) = 1 + A^2 exp(4ikR) / (4 k^2)
    a2(k) = 1
    b(k)  = A exp(2ikR) / (2ik)

which this module provides directly, alongside a direct ODE computation of
the same coefficients for arbitrary step-like profiles (used to validate the
closed forms and to handle smoothed steps).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "ScatteringError",
    "DomainError",
    "StepParams",
    "Profile",
    "SpectralData",
    "ReflectionPair",
    "UnitarityReport",
    "shifted_step_spectral",
    "ode_scattering",
    "reflection_coeffs",
    "validate_unitarity",
]

# Evaluating the coefficients closer to the origin than this is refused:
# a1 and b have a double and a simple pole at k = 0.
K_POLE_FLOOR = 1e-12
# The ODE route additionally loses conditioning near k = 0 (the background
# normalisation matrices carry A/2k), so its grid is kept off a wider zone.
K_ODE_FLOOR = 1e-3


class ScatteringError(Exception):
    """Base class for scattering failures."""


class DomainError(ScatteringError, ValueError):
    """Input outside the supported domain (bad params, bad grid, bad span)."""


@dataclass(frozen=True)
class StepParams:
    """Shifted-step initial data: height A > 0, shift R > 0."""
    A: float
    R: float

    def __post_init__(self):
        if not (np.isfinite(self.A) and self.A > 0.0):
            raise DomainError(f"step height must be positive, got A={self.A}")
        if not (np.isfinite(self.R) and self.R > 0.0):
            raise DomainError(f"step shift must be positive, got R={self.R}")


@dataclass(frozen=True)
class Profile:
    """A step-like profile q0 with limits `left` at -inf and `amplitude` at +inf.

    The evaluator must be vectorized. `decay_scale` is the e-folding scale of
    the tails (profiles are assumed to approach their limits exponentially),
    `center` is the location of the transition and `breakpoints` lists any
    jump discontinuities so the ODE integrator can split there.
    """
    q0: Callable[[np.ndarray], np.ndarray]
    amplitude: float
    decay_scale: float = 1.0
    left: float = 0.0
    center: float = 0.0
    name: str = "profile"
    breakpoints: tuple[float, ...] = ()

    def __call__(self, x):
        return self.q0(np.asarray(x, dtype=float))


@dataclass
class SpectralData:
    """Scattering coefficients a1, a2, b as callables.

    `source` is "closed_form" (entire-function evaluators, valid for complex
    k away from k = 0) or "ode" (grid interpolants, real k only). For the
    closed form, `dlog_jump` evaluates d/dk log(1 + r1 r2) analytically; the
    ODE source falls back to a finite difference of the interpolants.
    """
    a1: Callable
    a2: Callable
    b: Callable
    source: str
    params: StepParams | None = None
    profile: Profile | None = None
    k_grid: np.ndarray | None = None
    dlog_jump: Callable | None = None
    supports_complex: bool = False

    def a1a2(self, k):
        return self.a1(k) * self.a2(k)


@dataclass(frozen=True)
class ReflectionPair:
    """Right and left reflection coefficients r1 = b/a1, r2(k) = conj(b(-conj k))/a2."""
    r1: Callable
    r2: Callable

    def product(self, k):
        return self.r1(k) * self.r2(k)


def _check_k_pole(k: np.ndarray, floor: float):
    if np.any(np.abs(k) < floor):
        raise DomainError(
            f"scattering coefficients are singular at k=0; |k| >= {floor} required")


def shifted_step_spectral(params: StepParams) -> SpectralData:
    """Closed-form scattering coefficients of the shifted step (A, R)."""
    A, R = params.A, params.R

    def _w(k):
        # w(k) = A^2 exp(4ikR) / (4 k^2); a1 = 1 + w
        return (A * A) * np.exp(4j * k * R) / (4.0 * k * k)

    def a1(k):
        k = np.asarray(k, dtype=complex)
        _check_k_pole(k, K_POLE_FLOOR)
        return 1.0 + _w(k)

    def a2(k):
        k = np.asarray(k, dtype=complex)
        return np.ones_like(k)

    def b(k):
        k = np.asarray(k, dtype=complex)
        _check_k_pole(k, K_POLE_FLOOR)
        return A * np.exp(2j * k * R) / (2j * k)

    def dlog_jump(k):
        # 1 + r1 r2 = 1/a1 here, so d/dk log(1 + r1 r2) = -w'/(1 + w).
        k = np.asarray(k, dtype=complex)
        _check_k_pole(k, K_POLE_FLOOR)
        w = _w(k)
        return -(w * (4j * R - 2.0 / k)) / (1.0 + w)

    return SpectralData(a1=a1, a2=a2, b=b, source="closed_form",
                        params=params, dlog_jump=dlog_jump,
                        supports_complex=True)


# --- direct computation from the Jost ODE -------------------------------

def _background_matrices(A: float, k: np.ndarray):
    """Normalisation matrices solving the constant-background Jost systems.

    With zero left background the limits of the coefficient matrix are
    triangular, U- = [[0,0],[-A,0]] and U+ = [[0,A],[0,0]], and the bounded
    solutions of U N = ik [sigma3, N] are unitriangular with the single
    off-diagonal entry A/(2ik).
    """
    nk = k.size
    n_minus = np.zeros((nk, 2, 2), dtype=complex)
    n_plus = np.zeros((nk, 2, 2), dtype=complex)
    n_minus[:, 0, 0] = n_minus[:, 1, 1] = 1.0
    n_plus[:, 0, 0] = n_plus[:, 1, 1] = 1.0
    n_minus[:, 1, 0] = A / (2j * k)
    n_plus[:, 0, 1] = A / (2j * k)
    return n_minus, n_plus


def _integrate_jost(profile: Profile, k: np.ndarray, x_from: float, x_to: float,
                    y0: np.ndarray, rtol: float, atol: float) -> np.ndarray:
    """Propagate the 2x2 Jost solutions for every k at once.

    State layout: (nk, 4) = (psi11, psi12, psi21, psi22), flattened. The
    coefficient matrix couples q0(x) and conj(q0(-x)):

        psi11' = q0 psi21
        psi12' = q0 psi22 - 2ik psi12
        psi21' = -conj(q0(-x)) psi11 + 2ik psi21
        psi22' = -conj(q0(-x)) psi12
    """
    from scipy.integrate import solve_ivp

    nk = k.size
    two_ik = 2j * k

    def rhs(x, y):
        psi = y.reshape(nk, 4)
        q = complex(np.asarray(profile.q0(np.array([x])), dtype=complex)[0])
        qm = np.conj(complex(np.asarray(profile.q0(np.array([-x])), dtype=complex)[0]))
        out = np.empty_like(psi)
        out[:, 0] = q * psi[:, 2]
        out[:, 1] = q * psi[:, 3] - two_ik * psi[:, 1]
        out[:, 2] = -qm * psi[:, 0] + two_ik * psi[:, 2]
        out[:, 3] = -qm * psi[:, 1]
        return out.ravel()

    # split at discontinuities of q0(x) and of q0(-x)
    cuts = sorted({b for b in profile.breakpoints} | {-b for b in profile.breakpoints})
    if x_from < x_to:
        nodes = [x_from] + [c for c in cuts if x_from < c < x_to] + [x_to]
    else:
        nodes = [x_from] + [c for c in reversed(cuts) if x_to < c < x_from] + [x_to]
    y = y0.astype(complex).ravel()
    for seg_a, seg_b in zip(nodes[:-1], nodes[1:]):
        sol = solve_ivp(rhs, (seg_a, seg_b), y, method="DOP853",
                        rtol=rtol, atol=atol, dense_output=False)
        if not sol.success:
            raise ScatteringError(
                f"Jost integration failed on [{seg_a}, {seg_b}]: {sol.message}")
        y = sol.y[:, -1]
    return y.reshape(nk, 2, 2)


def _interp_evaluator(k_grid: np.ndarray, values: np.ndarray):
    re = values.real.copy()
    im = values.imag.copy()

    def ev(k):
        k = np.asarray(k, dtype=float)
        if np.any(k < k_grid[0]) or np.any(k > k_grid[-1]):
            raise DomainError("requested k outside the computed grid")
        return np.interp(k, k_grid, re) + 1j * np.interp(k, k_grid, im)

    return ev


def ode_scattering(profile: Profile, k_grid: Sequence[float],
                   x_span: tuple[float, float] | None = None,
                   rtol: float = 1e-10, atol: float = 1e-12,
                   tail_tol: float = 1e-8) -> SpectralData:
    """Scattering coefficients of a step-like profile by direct integration.

    Integrates the Jost solutions normalised at -inf and +inf towards a
    common matching point and reads off the transition matrix there. All k
    on the (real) grid are propagated in one batched solver run. Profiles
    must be within `tail_tol` of their limits at the span ends.
    """
    if profile.left != 0.0:
        raise DomainError("ode_scattering expects a zero left background")
    k = np.asarray(sorted(k_grid), dtype=float)
    if k.size == 0:
        raise DomainError("empty k grid")
    if np.any(~np.isfinite(k)):
        raise DomainError("k grid must be finite and real")
    if np.any(np.abs(k) < K_ODE_FLOOR):
        raise DomainError(f"ODE route requires |k| >= {K_ODE_FLOOR}")
    if np.any(np.diff(k) == 0.0):
        raise DomainError("k grid has repeated points")

    if x_span is None:
        half = abs(profile.center) + 40.0 * max(1.0, profile.decay_scale)
        x_span = (-half, half)
    x_min, x_max = x_span
    if not x_min < -abs(profile.center) < x_max:
        raise DomainError("x_span must contain the transition region")

    ends = np.asarray(profile.q0(np.array([x_min, x_max])), dtype=complex)
    if abs(ends[0] - profile.left) > tail_tol:
        raise DomainError(
            f"profile not settled at x_min: |q0 - left| = {abs(ends[0]-profile.left):.2e}")
    if abs(ends[1] - profile.amplitude) > tail_tol:
        raise DomainError(
            f"profile not settled at x_max: |q0 - A| = {abs(ends[1]-profile.amplitude):.2e}")

    n_minus, n_plus = _background_matrices(profile.amplitude, k)
    x_match = -profile.center
    psi1 = _integrate_jost(profile, k, x_min, x_match, n_minus, rtol, atol)
    psi2 = _integrate_jost(profile, k, x_max, x_match, n_plus, rtol, atol)

    # Phi = psi2^{-1} psi1 at the matching point, then undo the plane-wave
    # conjugation: S = exp(ik x_m sigma3) Phi exp(-ik x_m sigma3).
    det2 = psi2[:, 0, 0] * psi2[:, 1, 1] - psi2[:, 0, 1] * psi2[:, 1, 0]
    if np.any(np.abs(det2 - 1.0) > 1e-6):
        raise ScatteringError(
            f"Jost determinant drifted by {np.max(np.abs(det2-1.0)):.2e}; "
            "tighten rtol/atol or shrink the span")
    inv2 = np.empty_like(psi2)
    inv2[:, 0, 0] = psi2[:, 1, 1] / det2
    inv2[:, 0, 1] = -psi2[:, 0, 1] / det2
    inv2[:, 1, 0] = -psi2[:, 1, 0] / det2
    inv2[:, 1, 1] = psi2[:, 0, 0] / det2
    phi = np.einsum("kij,kjl->kil", inv2, psi1)
    phase = np.exp(2j * k * x_match)
    a1_vals = phi[:, 0, 0]
    b_vals = phi[:, 1, 0] / phase
    a2_vals = phi[:, 1, 1]

    return SpectralData(
        a1=_interp_evaluator(k, a1_vals),
        a2=_interp_evaluator(k, a2_vals),
        b=_interp_evaluator(k, b_vals),
        source="ode", profile=profile, k_grid=k,
        dlog_jump=None, supports_complex=False)


def reflection_coeffs(sd: SpectralData) -> ReflectionPair:
    """Reflection coefficients r1 = b / a1 and r2(k) = conj(b(-conj k)) / a2(k).

    On the real axis r2(k) = conj(b(-k)) / a2(k). Evaluation at a zero of a1
    is refused.
    """
    def r1(k):
        a1v = sd.a1(k)
        if np.any(np.abs(a1v) < 1e-13):
            raise ScatteringError("r1 evaluated at (or too near) a zero of a1")
        return sd.b(k) / a1v

    def r2(k):
        k = np.asarray(k, dtype=complex)
        if not sd.supports_complex and np.any(np.abs(k.imag) > 0):
            raise DomainError("this source only supports real k")
        refl = -np.conj(k)
        return np.conj(sd.b(refl.real if not sd.supports_complex else refl)) / sd.a2(k)

    return ReflectionPair(r1=r1, r2=r2)


@dataclass(frozen=True)
class UnitarityReport:
    """Residuals of the algebraic identities tying a1, a2, b together."""
    max_det_residual: float
    max_schwarz_a1: float
    max_schwarz_a2: float
    k_checked: int

    @property
    def passed(self) -> bool:
        return max(self.max_det_residual, self.max_schwarz_a1,
                   self.max_schwarz_a2) < 1e-6


def validate_unitarity(sd: SpectralData, k_grid: Sequence[float] | None = None,
                       ) -> UnitarityReport:
    """Check det S = 1 and the Schwarz symmetries on a real k grid.

    The identities are a1(k) a2(k) + b(k) conj(b(-k)) = 1 and
    conj(aj(-k)) = aj(k) for real k away from 0.
    """
    if k_grid is None:
        if sd.k_grid is not None:
            k = np.asarray(sd.k_grid, dtype=float)
        else:
            k = np.linspace(-10.0, 10.0, 401)
            k = k[np.abs(k) > 2 * K_ODE_FLOOR]
    else:
        k = np.asarray(k_grid, dtype=float)
    det = sd.a1(k) * sd.a2(k) + sd.b(k) * np.conj(sd.b(-k)) - 1.0
    schwarz1 = np.conj(sd.a1(-k)) - sd.a1(k)
    schwarz2 = np.conj(sd.a2(-k)) - sd.a2(k)
    return UnitarityReport(
        max_det_residual=float(np.max(np.abs(det))),
        max_schwarz_a1=float(np.max(np.abs(schwarz1))),
        max_schwarz_a2=float(np.max(np.abs(schwarz2))),
        k_checked=int(k.size))
