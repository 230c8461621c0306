"""Shared numerical kernels.

Complex gamma function, adaptive Gauss-Kronrod quadrature for complex-valued
integrands, bracketed root finding, and continuous phase tracking. Everything
here is deterministic: no RNG, no environment-dependent behaviour.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "NumericsError",
    "GammaPoleError",
    "QuadratureError",
    "BracketError",
    "PhaseError",
    "QuadratureResult",
    "complex_gamma",
    "adaptive_quad",
    "find_root_1d",
    "unwrap_arg",
    "winding_total",
]


class NumericsError(Exception):
    """Base class for failures of the kernels in this module."""


class GammaPoleError(NumericsError, ValueError):
    """Gamma evaluated at a nonpositive integer."""


class QuadratureError(NumericsError):
    """Adaptive quadrature did not reach the requested tolerance.

    Carries the partial estimate so callers can decide whether the result
    is still usable at a looser tolerance.
    """

    def __init__(self, message: str, partial: complex, error_estimate: float,
                 subdivisions: int):
        super().__init__(
            f"{message} (partial={partial!r}, err={error_estimate:.3e}, "
            f"subdivisions={subdivisions})")
        self.partial = partial
        self.error_estimate = error_estimate
        self.subdivisions = subdivisions


class BracketError(NumericsError, ValueError):
    """Root bracket does not straddle a sign change."""


class PhaseError(NumericsError):
    """Phase samples too coarse (or zero) for reliable unwrapping."""


# Lanczos approximation, g = 607/128, 15 coefficients. Accurate to roughly
# machine precision on the right half plane; the reflection formula covers
# Re z < 1/2.
_LANCZOS_G = 607.0 / 128.0
_LANCZOS_C = (
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
)


def complex_gamma(z: complex) -> complex:
    """Gamma function for complex argument.

    Lanczos series for Re z >= 1/2, reflection formula otherwise. Relative
    accuracy is about 1e-13 on the strip |Re z|, |Im z| <= 10 used by the
    asymptotic constants.

    Raises GammaPoleError at the poles (nonpositive integers).
    """
    z = complex(z)
    if not (np.isfinite(z.real) and np.isfinite(z.imag)):
        raise ValueError(f"complex_gamma: non-finite argument {z!r}")
    if z.real < 0.5:
        if z.imag == 0.0 and z.real == np.floor(z.real):
            raise GammaPoleError(f"gamma pole at z={z.real}")
        # gamma(z) gamma(1-z) = pi / sin(pi z)
        return np.pi / (np.sin(np.pi * z) * complex_gamma(1.0 - z))
    zz = z - 1.0
    s = _LANCZOS_C[0]
    for k in range(1, len(_LANCZOS_C)):
        s += _LANCZOS_C[k] / (zz + k)
    t = zz + _LANCZOS_G + 0.5
    return np.sqrt(2.0 * np.pi) * t ** (zz + 0.5) * np.exp(-t) * s


@dataclass(frozen=True)
class QuadratureResult:
    """Adaptive quadrature output: value, error estimate, work counter."""
    value: complex
    error_estimate: float
    subdivisions: int


# 15-point Kronrod nodes (nonnegative half) with Kronrod weights, and the
# embedded 7-point Gauss weights (attached to nodes 1, 3, 5, 7).
_XGK = np.array([
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0,
])
_WGK = np.array([
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728,
])
_WG = np.array([
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469,
])

_NODES = np.concatenate((-_XGK[:-1], _XGK[::-1]))          # 15 ascending nodes
_KRON_W = np.concatenate((_WGK[:-1], _WGK[::-1]))
_GAUSS_W = np.zeros(15)
_GAUSS_W[1:14:2] = np.concatenate((_WG[:-1], _WG[::-1]))   # nodes 1,3,...,13


def _gk15(f: Callable[[np.ndarray], np.ndarray], a: float, b: float):
    """One Gauss-Kronrod panel on [a, b]. Returns (value, error)."""
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    x = mid + half * _NODES
    y = np.asarray(f(x), dtype=complex)
    if y.shape != x.shape:
        raise ValueError("adaptive_quad: integrand must be vectorized")
    if not np.all(np.isfinite(y.real) & np.isfinite(y.imag)):
        raise QuadratureError(
            f"non-finite integrand value on [{a}, {b}]", complex(np.nan), np.inf, 0)
    kron = half * np.sum(_KRON_W * y)
    gauss = half * np.sum(_GAUSS_W * y)
    return kron, abs(kron - gauss)


def adaptive_quad(f: Callable[[np.ndarray], np.ndarray], a: float, b: float,
                  tol: float = 1e-10, max_subdiv: int = 4000) -> QuadratureResult:
    """Integrate a complex-valued integrand over the finite interval [a, b].

    Globally adaptive bisection of Gauss-Kronrod 15 panels, always splitting
    the panel with the current largest error estimate. `f` must accept an
    ndarray of abscissae and return an ndarray of values. The nodes are
    strictly interior, so integrable endpoint singularities (log, mild
    algebraic) are handled by grading alone.

    The tolerance is absolute. On exhaustion of the subdivision budget a
    QuadratureError carrying the partial estimate is raised.
    """
    if not (np.isfinite(a) and np.isfinite(b)):
        raise ValueError("adaptive_quad: interval endpoints must be finite")
    if a == b:
        return QuadratureResult(0.0 + 0.0j, 0.0, 0)
    val, err = _gk15(f, a, b)
    # heap of (-error, tiebreak, a, b, value); tiebreak keeps ordering total
    counter = 0
    heap = [(-err, counter, a, b, val)]
    total_val = val
    total_err = err
    ndiv = 0
    min_width = abs(b - a) * 1e-15
    while total_err > tol:
        if ndiv >= max_subdiv:
            raise QuadratureError("subdivision budget exhausted",
                                  total_val, total_err, ndiv)
        neg_e, _, lo, hi, v = heapq.heappop(heap)
        if hi - lo <= min_width:
            raise QuadratureError("interval collapsed below resolution",
                                  total_val, total_err, ndiv)
        mid = 0.5 * (lo + hi)
        v1, e1 = _gk15(f, lo, mid)
        v2, e2 = _gk15(f, mid, hi)
        total_val += v1 + v2 - v
        total_err += e1 + e2 - (-neg_e)
        counter += 1
        heapq.heappush(heap, (-e1, counter, lo, mid, v1))
        counter += 1
        heapq.heappush(heap, (-e2, counter, mid, hi, v2))
        ndiv += 1
        if ndiv % 64 == 0:
            # drift control: rebuild totals from the heap
            total_val = sum(item[4] for item in heap)
            total_err = sum(-item[0] for item in heap)
    return QuadratureResult(total_val, total_err, ndiv)


def find_root_1d(f: Callable[[float], float], lo: float, hi: float,
                 tol: float = 1e-14, fprime: Callable[[float], float] | None = None,
                 max_iter: int = 200) -> float:
    """Root of a continuous scalar function on a sign-changing bracket.

    Bisection down to bracket width `tol` (absolute), then an optional
    Newton polish when `fprime` is supplied. Raises BracketError when
    f(lo) and f(hi) have the same strict sign.
    """
    if not lo < hi:
        raise ValueError(f"find_root_1d: bad bracket [{lo}, {hi}]")
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if np.sign(flo) == np.sign(fhi):
        raise BracketError(
            f"no sign change on [{lo}, {hi}]: f(lo)={flo:.3e}, f(hi)={fhi:.3e}")
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            lo = hi = mid
            break
        if np.sign(fm) == np.sign(flo):
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    x = 0.5 * (lo + hi)
    if fprime is not None:
        for _ in range(12):
            fx = f(x)
            if fx == 0.0:
                break
            dfx = fprime(x)
            if dfx == 0.0 or not np.isfinite(dfx):
                break
            step = fx / dfx
            x_new = x - step
            if not (lo - tol <= x_new <= hi + tol):
                break
            if abs(x_new - x) <= abs(x) * 1e-16:
                x = x_new
                break
            x = x_new
    return x


def unwrap_arg(values: np.ndarray, start: float | None = None) -> np.ndarray:
    """Continuous argument along a sampled curve of nonzero complex values.

    Neighbouring samples must differ in argument by less than pi; larger
    wrapped jumps raise PhaseError so the caller can densify. When `start`
    is given, the first output is the representative of arg(values[0])
    nearest to it (this anchors the branch chosen at the left end of the
    curve); otherwise the principal argument is used.

    Every output differs from the principal argument of its sample by an
    integer multiple of 2 pi.
    """
    v = np.asarray(values, dtype=complex)
    if v.ndim != 1 or v.size == 0:
        raise ValueError("unwrap_arg: need a 1-d, nonempty sample array")
    mag = np.abs(v)
    if np.any(mag == 0.0) or not np.all(np.isfinite(mag)):
        raise PhaseError("unwrap_arg: zero or non-finite sample")
    d = np.angle(v[1:] / v[:-1])
    if d.size and np.max(np.abs(d)) >= np.pi * (1.0 - 1e-12):
        raise PhaseError(
            f"unwrap_arg: phase jump {np.max(np.abs(d)):.6f} rad is unresolved")
    a0 = float(np.angle(v[0]))
    if start is not None:
        a0 = start + float(np.angle(np.exp(1j * (a0 - start))))
    out = np.empty(v.size)
    out[0] = a0
    if d.size:
        out[1:] = a0 + np.cumsum(d)
    return out


def winding_total(fun: Callable[[np.ndarray], np.ndarray], grid: np.ndarray,
                  max_jump: float = 0.5 * np.pi, max_rounds: int = 24) -> float:
    """Accumulated argument change of ``fun`` along a parameter grid.

    Evaluates on the given grid and inserts midpoints wherever the phase
    step is max_jump or more, repeating until the sampling resolves the
    curve. Returns arg(fun(grid[-1])) - arg(fun(grid[0])) tracked
    continuously. `fun` must be vectorized. The initial grid has to be fine
    enough that no full phase turn can hide between neighbours.
    """
    s = np.asarray(grid, dtype=float)
    if s.ndim != 1 or s.size < 2:
        raise ValueError("winding_total: need at least two grid points")
    v = np.asarray(fun(s), dtype=complex)
    for _ in range(max_rounds):
        mag = np.abs(v)
        if np.any(mag == 0.0) or not np.all(np.isfinite(mag)):
            raise PhaseError("winding_total: zero or non-finite sample")
        d = np.abs(np.angle(v[1:] / v[:-1]))
        bad = np.nonzero(d >= max_jump)[0]
        if bad.size == 0:
            u = unwrap_arg(v)
            return float(u[-1] - u[0])
        mids = 0.5 * (s[bad] + s[bad + 1])
        vm = np.asarray(fun(mids), dtype=complex)
        s = np.insert(s, bad + 1, mids)
        v = np.insert(v, bad + 1, vm)
    raise PhaseError(
        f"winding_total: sampling did not resolve the curve after "
        f"{max_rounds} refinement rounds ({s.size} points)")
