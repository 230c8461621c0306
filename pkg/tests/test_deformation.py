import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nonlocal_nls.scattering import StepParams, reflection_coeffs, shifted_step_spectral
from nonlocal_nls.spectrum import BoundaryParamsError, solve_spectrum
from nonlocal_nls.deformation import (
    BoundaryRayError,
    BranchCutError,
    ExponentRangeError,
    band_index,
    build_delta_context,
    c0_constants,
    chi_s,
    classify_sector,
    delta_boundary,
    delta_eval,
    nu_of,
    r_as,
)


def setup_case(A, R):
    params = StepParams(A, R)
    return shifted_step_spectral(params), solve_spectrum(params)


SD0, DS0 = setup_case(1.0, 1.0)          # n = 0
SD1, DS1 = setup_case(1.0, np.pi)        # n = 1: omega_1 = 1/4 < |Re p_1|


# --- sector classification ---------------------------------------------------

def test_classify_n0():
    assert classify_sector(0.7, DS0).case == "i"
    assert classify_sector(1e-3, DS0).case == "i"
    assert classify_sector(-0.7, DS0).case == "ii"
    assert classify_sector(0.7, DS0).kind == "plateau_right"
    assert classify_sector(-0.7, DS0).kind == "decay"


def test_classify_n1_layout():
    om = DS1.omega_at(1)
    sp = DS1.re_p_abs(1)
    assert om < sp
    probes = [(-2 * sp, "ii", 0), (-(om + sp) / 2, "iv", 0), (-om / 2, "ii", 1),
              (om / 2, "i", 1), ((om + sp) / 2, "iii", 0), (2 * sp, "i", 0)]
    for xi, case, m in probes:
        lab = classify_sector(xi, DS1)
        assert (lab.case, lab.m) == (case, m), xi


def test_band_index_inequality():
    for eta in (0.05, 0.2, 0.3, 1.0, 7.3):
        m = band_index(eta, DS1)
        assert DS1.omega_at(DS1.n - m) < eta < DS1.omega_at(DS1.n - m + 1)


@settings(max_examples=60, deadline=None)
@given(st.floats(-4.0, 4.0))
def test_classification_partition(xi):
    # every non-boundary ray lands in exactly one of the four cases and the
    # sign of xi fixes the side
    if abs(xi) < 1e-3:
        return
    if min(abs(abs(xi) - b) for b in
           (DS1.omega_at(1), DS1.re_p_abs(1))) < 1e-6:
        return
    lab = classify_sector(xi, DS1)
    assert lab.case in ("i", "ii", "iii", "iv")
    if xi > 0:
        assert lab.case in ("i", "iii")
    else:
        assert lab.case in ("ii", "iv")


def test_boundary_rays_refused():
    with pytest.raises(BoundaryRayError):
        classify_sector(0.0, DS0)
    with pytest.raises(BoundaryRayError):
        classify_sector(DS1.omega_at(1), DS1)
    with pytest.raises(BoundaryRayError):
        classify_sector(-DS1.re_p_abs(1), DS1)


def test_degenerate_params_refused():
    sd, ds = setup_case(1.0, np.pi / 2)
    assert ds.boundary
    with pytest.raises(BoundaryParamsError):
        classify_sector(0.5, ds)


# --- the exponent nu ---------------------------------------------------------

def test_nu_real_part_matches_modulus():
    for (sd, ds, eta) in [(SD0, DS0, 0.6), (SD1, DS1, 0.1), (SD1, DS1, 0.9)]:
        m = band_index(eta, ds)
        nu = nu_of(eta, sd, m)
        want = np.log(abs(complex(sd.a1a2(np.array([-eta], dtype=complex))[0]))) \
            / (2 * np.pi)
        assert nu.real == pytest.approx(want, abs=1e-12)


def test_nu_imag_in_open_interval():
    rng = np.random.default_rng(5)
    for sd, ds in ((SD0, DS0), (SD1, DS1)):
        breaks = [ds.omega_at(j) for j in range(1, ds.n + 1)]
        hi = (max(breaks) * 3 if breaks else 3.0)
        for eta in rng.uniform(1e-2, hi, 25):
            if any(abs(eta - b) < 1e-4 for b in breaks):
                continue
            nu = nu_of(eta, sd, band_index(eta, ds))
            assert -0.5 < nu.imag < 0.5


def test_nu_wrong_band_raises():
    eta = 0.1      # inside the innermost band of DS1, m = 1
    with pytest.raises(ExponentRangeError):
        nu_of(eta, SD1, 0)


# --- delta -------------------------------------------------------------------

def test_delta_tends_to_one():
    for (sd, ds, eta) in [(SD0, DS0, 0.8), (SD1, DS1, 0.9), (SD1, DS1, 0.12)]:
        ctx = build_delta_context(eta, sd, ds, tol=1e-11)
        assert abs(delta_eval(1e4, ctx) - 1.0) <= 1e-4
        assert abs(delta_eval(1e4 + 5j, ctx) - 1.0) <= 1e-4


def test_delta_jump_identity_boundary_values():
    # delta+ = delta- (1 + r1 r2) pointwise on the cut, at 1e-10
    rng = np.random.default_rng(17)
    for (sd, ds, etas) in [(SD0, DS0, (0.6,)), (SD1, DS1, (0.15, 0.5))]:
        pair = reflection_coeffs(sd)
        for eta in etas:
            ctx = build_delta_context(eta, sd, ds, tol=1e-11)
            for _ in range(5):
                kr = -eta - 10 ** rng.uniform(-2, 1)
                if any(abs(kr + om) < 5e-2 for om in ctx.omegas_used):
                    continue
                dp = delta_boundary(kr, ctx, +1)
                dm = delta_boundary(kr, ctx, -1)
                jump = 1.0 + complex(pair.product(np.array([kr]))[0])
                assert abs(dp / dm - jump) <= 1e-10


def test_delta_boundary_matches_interior_limit():
    ctx = build_delta_context(0.6, SD0, DS0, tol=1e-11)
    kr = -1.7
    for side, off in ((+1, 1e-7j), (-1, -1e-7j)):
        bnd = delta_boundary(kr, ctx, side)
        near = delta_eval(kr + off, ctx)
        assert abs(near - bnd) / abs(bnd) <= 1e-5


def test_delta_jump_offset_route_is_epsilon_limited():
    # evaluating just off the cut floors near eps*log scale, far above the
    # boundary-value route
    pair = reflection_coeffs(SD0)
    ctx = build_delta_context(0.6, SD0, DS0, tol=1e-11)
    kr = -1.3
    eps = 1e-6
    ratio = delta_eval(kr + 1j * eps, ctx) / delta_eval(kr - 1j * eps, ctx)
    jump = 1.0 + complex(pair.product(np.array([kr]))[0])
    err = abs(ratio - jump)
    assert 1e-9 < err < 1e-4


def test_delta_guards():
    ctx = build_delta_context(0.6, SD0, DS0)
    with pytest.raises(BranchCutError):
        delta_eval(-0.6, ctx)
    with pytest.raises(BranchCutError):
        delta_eval(-2.0, ctx)
    ctx1 = build_delta_context(0.9, SD1, DS1)
    with pytest.raises(BranchCutError):
        delta_boundary(-0.89, ctx1)             # not interior to the cut
    with pytest.raises(ValueError):
        delta_boundary(-2.0, ctx1, side=0)
    ctx_in = build_delta_context(0.12, SD1, DS1)  # m = 1, pole at -omega_1
    with pytest.raises(BranchCutError):
        delta_eval(-DS1.omega_at(1), ctx_in)
    with pytest.raises(BranchCutError):
        delta_boundary(-DS1.omega_at(1), ctx_in)


def test_chi_tail_against_mpmath_quadosc():
    # independent high-precision evaluation of the oscillatory tail integral
    mpmath = pytest.importorskip("mpmath")
    A, R, eta = 1.0, 1.0, 0.8
    ctx = build_delta_context(eta, SD0, DS0, tol=1e-12)
    k = 0.5 + 0.3j
    got = chi_s(k, 0, ctx)
    mpmath.mp.dps = 25

    def integrand(u):
        w = mpmath.exp(-4j * u * R) / (4 * u * u)
        g = -w * (4j * R + 2 / u) / (1 + w)
        return mpmath.log(k + u) * g

    raw = mpmath.quadosc(integrand, [eta, mpmath.inf],
                         period=mpmath.pi / (2 * R))
    want = complex(raw / (-2j * mpmath.pi))
    mpmath.mp.dps = 15
    assert abs(got - want) <= 1e-12


def test_chi_s_index_guard():
    ctx = build_delta_context(0.6, SD0, DS0)
    with pytest.raises(IndexError):
        chi_s(1.0 + 1j, 1, ctx)


def test_delta_context_intervals_cover_cut():
    ctx = build_delta_context(0.12, SD1, DS1)
    assert ctx.m == 1
    (lo0, hi0), (lo1, hi1) = ctx.intervals
    assert np.isinf(lo0) and lo0 < 0
    assert hi0 == lo1 == -DS1.omega_at(1)
    assert hi1 == -0.12
    assert ctx.omegas_used == (DS1.omega_at(1),)


# --- modified reflection coefficients and residue constants -------------------

def test_r_as_preserves_product():
    k = 0.37 + 0.0j
    pair = reflection_coeffs(SD1)
    base = complex(pair.product(np.array([k]))[0])
    for m, with_d in ((0, False), (0, True), (1, False)):
        r1v, r2v = r_as(k, SD1, DS1, m, with_d=with_d)
        assert r1v * r2v == pytest.approx(base, rel=1e-12)


def test_r_as_moves_pole_zero_pairs():
    # r1 = b/a1 has a simple pole at p_1; the quadratic factor of the m = 1
    # modification turns it into a simple zero there
    p1 = DS1.p_at(1)
    eps = 1e-4
    vals = []
    for s in (1.0, 2.0):
        k = p1 + s * eps
        r1v, _ = r_as(k, SD1, DS1, 1, with_d=False)
        vals.append(abs(r1v))
    assert vals[1] / vals[0] == pytest.approx(2.0, rel=0.05)


def test_c0_product_identity():
    # c0 * c0# = p_(n-m)^2 whenever both exist
    ctx = build_delta_context(0.12, SD1, DS1)
    d0 = delta_eval(0.0, ctx)
    m = 0
    c0, c0s = c0_constants(DS1, m, d0)
    assert c0s is not None
    assert c0 * c0s == pytest.approx(DS1.p_at(DS1.n - m) ** 2, rel=1e-12)


def test_c0_sharp_absent_in_innermost_band():
    ctx = build_delta_context(0.12, SD1, DS1)
    d0 = delta_eval(0.0, ctx)
    c0, c0s = c0_constants(DS1, DS1.n, d0)
    assert c0s is None
    assert np.isfinite(c0)
