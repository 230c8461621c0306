import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nonlocal_nls.numerics import (
    BracketError,
    GammaPoleError,
    PhaseError,
    QuadratureError,
    adaptive_quad,
    complex_gamma,
    find_root_1d,
    unwrap_arg,
    winding_total,
)

mpmath = pytest.importorskip("mpmath")


# --- complex gamma ---------------------------------------------------------

def test_gamma_half_integer():
    assert complex_gamma(0.5) == pytest.approx(np.sqrt(np.pi), rel=1e-14)
    assert complex_gamma(1.0) == pytest.approx(1.0, rel=1e-14)
    assert complex_gamma(5.0) == pytest.approx(24.0, rel=1e-14)


def test_gamma_imaginary_axis_modulus():
    # |Gamma(iy)|^2 = pi / (y sinh(pi y))
    for y in (0.3, 1.0, 2.7):
        got = abs(complex_gamma(1j * y)) ** 2
        assert got == pytest.approx(np.pi / (y * np.sinh(np.pi * y)), rel=1e-12)


def test_gamma_vs_mpmath_scattered_points():
    pts = [0.1 + 0.0j, 2.5 - 1.5j, -1.3 + 0.7j, 1e-3 + 1j, -4.2 - 3.3j,
           6.0 + 9.0j, 0.5 + 0.5j]
    for z in pts:
        want = complex(mpmath.gamma(mpmath.mpc(z)))
        got = complex_gamma(z)
        assert abs(got - want) <= 1e-12 * abs(want)


def test_gamma_vs_scipy_grid():
    from scipy.special import gamma as sgamma
    rng = np.random.default_rng(7)
    z = rng.uniform(-4, 4, 60) + 1j * rng.uniform(-4, 4, 60)
    z = z[np.abs(z - np.round(z.real)) > 0.05]
    for zz in z:
        want = sgamma(zz)
        assert abs(complex_gamma(zz) - want) <= 1e-11 * max(1.0, abs(want))


def test_gamma_reflection_identity():
    rng = np.random.default_rng(11)
    for _ in range(40):
        z = complex(rng.uniform(0.1, 3), rng.uniform(-3, 3))
        lhs = complex_gamma(z) * complex_gamma(1 - z)
        rhs = np.pi / np.sin(np.pi * z)
        assert abs(lhs - rhs) <= 1e-11 * abs(rhs)


def test_gamma_pole_raises():
    for z in (0.0, -1.0, -2.0):
        with pytest.raises(GammaPoleError):
            complex_gamma(z)


# --- adaptive quadrature ---------------------------------------------------

def test_quad_polynomial_exact():
    res = adaptive_quad(lambda x: 3 * x ** 2, 0.0, 1.0)
    assert res.value == pytest.approx(1.0, abs=1e-13)


def test_quad_sin():
    res = adaptive_quad(np.sin, 0.0, np.pi)
    assert res.value == pytest.approx(2.0, abs=1e-12)


def test_quad_complex_oscillatory():
    # int_0^50 e^{ix} dx = (e^{50i} - 1)/i
    res = adaptive_quad(lambda x: np.exp(1j * x), 0.0, 50.0, tol=1e-12)
    want = (np.exp(50j) - 1.0) / 1j
    assert abs(res.value - want) <= 1e-10


def test_quad_log_endpoint_singularity():
    res = adaptive_quad(np.log, 0.0, 1.0, tol=1e-10)
    assert res.value == pytest.approx(-1.0, abs=1e-9)


def test_quad_log_kernel_oscillatory_vs_mpmath():
    # the chi-type integrand: log(k - x) * e^{2ix} near an endpoint
    k = 0.5 + 0.25j
    res = adaptive_quad(lambda x: np.log(k - x) * np.exp(2j * x), -3.0, 0.4,
                        tol=1e-11)
    want = mpmath.quad(lambda x: mpmath.log(k - x) * mpmath.exp(2j * x),
                       [-3.0, 0.4])
    assert abs(res.value - complex(want)) <= 1e-9


def test_quad_error_estimate_is_honest():
    res = adaptive_quad(lambda x: np.cos(7 * x), 0.0, 3.0, tol=1e-11)
    want = np.sin(21.0) / 7.0
    assert abs(res.value - want) <= max(res.error_estimate, 1e-12) * 10


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_quad_nonfinite_integrand_raises():
    with pytest.raises(QuadratureError):
        adaptive_quad(lambda x: 1.0 / x, -1.0, 1.0)


@settings(max_examples=30, deadline=None)
@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2))
def test_quad_additive_in_interval(a, mid, b):
    lo, hi = min(a, b), max(a, b)
    if hi - lo < 1e-3:
        return
    mid = lo + (hi - lo) * (0.25 + 0.5 * abs(np.sin(mid)))
    f = lambda x: np.exp(-x) * np.sin(3 * x)
    whole = adaptive_quad(f, lo, hi, tol=1e-12).value
    parts = adaptive_quad(f, lo, mid, tol=1e-12).value + \
        adaptive_quad(f, mid, hi, tol=1e-12).value
    assert whole == pytest.approx(parts, abs=5e-11)


# --- bracketed root finding ------------------------------------------------

def test_root_sqrt2():
    r = find_root_1d(lambda x: x * x - 2.0, 0.0, 2.0)
    assert r == pytest.approx(np.sqrt(2.0), abs=1e-13)


def test_root_omega_constant():
    # x e^x = 1; reference value W(1) to 10 digits
    r = find_root_1d(lambda x: np.log(x) + x, 0.1, 1.0)
    assert r == pytest.approx(0.5671432904097838, abs=1e-12)
    want = float(mpmath.lambertw(1.0).real)
    assert r == pytest.approx(want, abs=1e-12)


def test_root_newton_polish_matches_bisection():
    f = lambda x: np.cos(x) - x
    fp = lambda x: -np.sin(x) - 1.0
    r1 = find_root_1d(f, 0.0, 1.0)
    r2 = find_root_1d(f, 0.0, 1.0, fprime=fp)
    assert r1 == pytest.approx(r2, abs=1e-12)


def test_root_requires_bracket():
    with pytest.raises(BracketError):
        find_root_1d(lambda x: x * x + 1.0, -1.0, 1.0)


# --- phase unwrapping and winding ------------------------------------------

def test_unwrap_linear_phase():
    th = np.linspace(0.0, 6 * np.pi, 400)
    u = unwrap_arg(np.exp(1j * th))
    assert u[-1] - u[0] == pytest.approx(6 * np.pi, abs=1e-9)


def test_unwrap_start_anchor():
    th = np.linspace(0.2, 2.0, 50)
    u = unwrap_arg(np.exp(1j * th), start=0.2 + 4 * np.pi)
    assert u[0] == pytest.approx(0.2 + 4 * np.pi, abs=1e-12)
    assert u[-1] == pytest.approx(2.0 + 4 * np.pi, abs=1e-9)


def test_unwrap_rejects_half_turn_jumps():
    vals = np.array([1.0, -1.0, 1.0], dtype=complex)
    with pytest.raises(PhaseError):
        unwrap_arg(vals)


def test_unwrap_rejects_zero():
    with pytest.raises(PhaseError):
        unwrap_arg(np.array([1.0, 0.0, 1.0], dtype=complex))


@settings(max_examples=40, deadline=None)
@given(st.integers(-3, 3), st.floats(0.1, 2.0))
def test_unwrap_recovers_winding(turns, scale):
    th = np.linspace(0.0, turns * 2 * np.pi, max(40 * abs(turns), 16))
    u = unwrap_arg(scale * np.exp(1j * th))
    assert u[-1] - u[0] == pytest.approx(turns * 2 * np.pi, abs=1e-8)


def test_winding_total_circle():
    fun = lambda s: np.exp(1j * 2 * np.pi * np.asarray(s))
    w = winding_total(fun, np.linspace(0.0, 1.0, 7))
    assert w == pytest.approx(2 * np.pi, abs=1e-9)


def test_winding_total_refines_sparse_grid():
    # five turns sampled on a deliberately coarse grid
    fun = lambda s: np.exp(5j * 2 * np.pi * np.asarray(s))
    w = winding_total(fun, np.linspace(0.0, 1.0, 9))
    assert w == pytest.approx(10 * np.pi, abs=1e-9)
