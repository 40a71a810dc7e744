"""Special-function bases: gamma, Weber, Whittaker, Mathieu."""

import math

import mpmath
import numpy as np
import pytest
from scipy.special import mathieu_a, mathieu_b, pbdv

from ermakov.bases import (
    BasisKind,
    gamma,
    inv_gamma,
    mathieu_char_value,
    mathieu_char_value_truncated,
    mathieu_coefficients,
    mathieu_column,
    mathieu_pair,
    weber_basis,
    weber_column,
    weber_pair,
    weber_seed,
    whittaker_basis,
    whittaker_m_column,
    whittaker_pair,
)
from ermakov.errors import (
    CharValueConvergenceError,
    ConfigurationError,
    DegeneratePairError,
    PoleError,
    SeriesConvergenceError,
)
from ermakov.linear import wronskian_check

# ---------------------------------------------------------------------------
# gamma
# ---------------------------------------------------------------------------


def test_gamma_classic_values():
    assert gamma(1.0) == 1.0
    assert gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-15)
    assert gamma(5.0) == pytest.approx(24.0, rel=1e-15)


def test_gamma_poles():
    for x in (0.0, -1.0, -7.0):
        with pytest.raises(PoleError):
            gamma(x)
        assert inv_gamma(x) == 0.0


def test_gamma_against_mpmath_across_range():
    rng = np.random.default_rng(7)
    xs = rng.uniform(-20.0, 50.0, size=60)
    xs = xs[np.abs(xs - np.round(xs)) > 1e-3]  # stay away from the poles
    for x in xs:
        ref = float(mpmath.gamma(float(x)))
        assert gamma(float(x)) == pytest.approx(ref, rel=1e-12)


# ---------------------------------------------------------------------------
# Weber / parabolic cylinder
# ---------------------------------------------------------------------------


def test_weber_ground_state_closed_form():
    xi = np.linspace(-4.0, 4.0, 401)
    col = weber_column(0.0, xi)
    np.testing.assert_allclose(col.y, np.exp(-(xi**2) / 4.0), atol=1e-9)
    assert col.y[np.searchsorted(xi, 2.0)] == pytest.approx(math.exp(-1.0), abs=1e-8)


def test_weber_first_state_closed_form():
    # D_1(xi) = xi exp(-xi^2/4), so D_1(2) = 2/e
    col = weber_column(1.0, np.array([0.0, 1.0, 2.0]))
    assert col.y[-1] == pytest.approx(2.0 * math.exp(-1.0), rel=1e-8)


def test_weber_seeds_match_pbdv():
    for nu in (0.5, 1.7, -0.3, 2.25):
        y0, dy0 = weber_seed(nu)
        ref_y, ref_dy = pbdv(nu, 0.0)
        assert y0 == pytest.approx(float(ref_y), rel=1e-12, abs=1e-12)
        assert dy0 == pytest.approx(float(ref_dy), rel=1e-12, abs=1e-12)


def test_weber_column_matches_pbdv():
    xi = np.linspace(-5.0, 5.0, 21)
    for nu in (0.5, 1.7, -0.3):
        col = weber_column(nu, xi)
        ref = np.array([float(pbdv(nu, float(x))[0]) for x in xi])
        np.testing.assert_allclose(col.y, ref, rtol=1e-6, atol=1e-9)


def test_weber_pair_wronskian_constancy():
    xi = np.linspace(-4.0, 4.0, 801)
    pair = weber_pair(0.5, xi)
    assert wronskian_check(pair) <= 1e-9 * max(1.0, abs(pair.W))
    # known value sqrt(2 pi) / Gamma(-nu)
    assert pair.W == pytest.approx(math.sqrt(2 * math.pi) / math.gamma(-0.5), rel=1e-12)


def test_weber_integer_order_degenerates():
    xi = np.linspace(-3.0, 3.0, 101)
    with pytest.raises(DegeneratePairError):
        weber_pair(1.0, xi)
    pair = weber_basis(1.0, xi)  # second-kind companion route
    assert pair.W != 0.0
    assert wronskian_check(pair) <= 1e-9 * max(1.0, abs(pair.W))


@pytest.mark.parametrize("n, hermite", [(0, lambda x: 1.0 + 0 * x),
                                        (1, lambda x: 2.0 * x),
                                        (2, lambda x: 4.0 * x**2 - 2.0)])
def test_weber_hermite_reduction(n, hermite):
    xi = np.linspace(-4.0, 4.0, 801)
    col = weber_column(float(n), xi)
    ref = np.exp(-(xi**2) / 4.0) * hermite(xi / math.sqrt(2.0))
    c = float(np.dot(col.y, ref) / np.dot(ref, ref))
    assert np.max(np.abs(col.y - c * ref)) <= 1e-6 * np.max(np.abs(c * ref))


# ---------------------------------------------------------------------------
# Whittaker, mu = 1/2
# ---------------------------------------------------------------------------


def test_whittaker_m_ground_value():
    # kappa = 1: M(z) = z exp(-z/2); at z = 1 that is e^{-1/2}
    col = whittaker_m_column(1.0, np.array([0.5, 1.0, 2.0]), lam=0.5)  # z = x
    assert col.y[1] == pytest.approx(math.exp(-0.5), rel=1e-12)


def test_whittaker_laguerre_ratio_root():
    # kappa = 2: M / (z e^{-z/2}) is proportional to L_1^(1)(z) = 2 - z
    z = np.linspace(0.1, 10.0, 991)
    col = whittaker_m_column(2.0, z, lam=0.5)
    ratio = col.y / (z * np.exp(-z / 2.0))
    ref = 2.0 - z
    c = float(np.dot(ratio, ref) / np.dot(ref, ref))
    np.testing.assert_allclose(ratio, c * ref, atol=1e-10)
    root = z[np.argmin(np.abs(ratio))]
    assert root == pytest.approx(2.0, abs=0.02)


def test_whittaker_m_matches_mpmath():
    x = np.linspace(0.2, 12.0, 7)
    for kappa in (1.3, 0.4, 2.6):
        col = whittaker_m_column(kappa, x, lam=1.0)
        ref = np.array([float(mpmath.whitm(kappa, 0.5, 2.0 * v)) for v in x])
        np.testing.assert_allclose(col.y, ref, rtol=1e-11)


def test_whittaker_w_column_is_w_up_to_scale():
    x = np.linspace(0.05, 10.0, 401)
    pair = whittaker_pair(1.3, x, lam=1.0)
    idx = [20, 150, 300]
    ref = np.array([float(mpmath.whitw(1.3, 0.5, 2.0 * x[i])) for i in idx])
    ratio = pair.y2[idx] / ref
    # leading-term anchoring leaves a single overall scale, constant in x
    assert np.max(np.abs(ratio - ratio[0])) <= 1e-6 * abs(ratio[0])


def test_whittaker_pair_wronskian_on_subgrids():
    x = np.linspace(0.025, 15.0, 2001)
    pair = whittaker_pair(1.3, x, lam=1.0)
    assert wronskian_check(pair) <= 1e-8 * max(1.0, abs(pair.W))
    rng = np.random.default_rng(3)
    idx = np.sort(rng.choice(x.size, size=200, replace=False))
    assert wronskian_check(pair.subgrid(idx)) <= 1e-8 * max(1.0, abs(pair.W))


def test_whittaker_quantized_kappa_degenerates():
    x = np.linspace(0.1, 10.0, 101)
    with pytest.raises(DegeneratePairError):
        whittaker_pair(2.0, x, lam=0.5)
    pair = whittaker_basis(2.0, x, lam=0.5)
    assert wronskian_check(pair) <= 1e-8 * max(1.0, abs(pair.W))


def test_whittaker_series_term_cap_flag():
    with pytest.raises(SeriesConvergenceError):
        whittaker_m_column(1.3, np.array([40.0]), lam=1.0, term_cap=10)


def test_whittaker_grid_validation():
    with pytest.raises(ConfigurationError):
        whittaker_m_column(1.0, np.array([-1.0, 1.0]), lam=1.0)
    with pytest.raises(ConfigurationError):
        whittaker_m_column(1.0, np.array([1.0]), lam=0.0)


# ---------------------------------------------------------------------------
# Mathieu
# ---------------------------------------------------------------------------


def test_mathieu_char_values_at_zero_q():
    for ell in range(6):
        assert mathieu_char_value(ell, "even", 0.0) == pytest.approx(ell**2, abs=1e-10)
    for ell in range(1, 6):
        assert mathieu_char_value(ell, "odd", 0.0) == pytest.approx(ell**2, abs=1e-10)


@pytest.mark.parametrize("ell", range(5))
def test_mathieu_even_char_against_scipy(ell):
    for q in (0.5, 1.0, 5.0):
        ref = float(mathieu_a(ell, q))
        assert mathieu_char_value(ell, "even", q) == pytest.approx(ref, rel=1e-8, abs=1e-8)


@pytest.mark.parametrize("ell", range(1, 5))
def test_mathieu_odd_char_against_scipy(ell):
    for q in (0.5, 1.0, 5.0):
        ref = float(mathieu_b(ell, q))
        assert mathieu_char_value(ell, "odd", q) == pytest.approx(ref, rel=1e-8, abs=1e-8)


def test_mathieu_truncation_doubling_stability():
    for ell, parity in ((0, "even"), (1, "even"), (2, "even"), (1, "odd"), (2, "odd")):
        a32 = mathieu_char_value_truncated(ell, parity, 1.0, 32)
        a64 = mathieu_char_value_truncated(ell, parity, 1.0, 64)
        assert abs(a64 - a32) <= 1e-10


def test_mathieu_small_q_continuity():
    for ell, parity in ((0, "even"), (3, "even"), (2, "odd")):
        a = mathieu_char_value(ell, parity, 1e-8)
        assert abs(a - ell**2) <= 1e-6


def test_mathieu_char_convergence_error():
    with pytest.raises(CharValueConvergenceError):
        mathieu_char_value(0, "even", 1.0, tol=0.0, size_cap=64)


def test_mathieu_invalid_orders():
    with pytest.raises(ConfigurationError):
        mathieu_char_value(0, "odd", 1.0)
    with pytest.raises(ConfigurationError):
        mathieu_char_value(-1, "even", 1.0)
    with pytest.raises(ConfigurationError):
        mathieu_char_value(1, "mixed", 1.0)


def test_mathieu_harmonic_limit_ce2():
    nu = np.linspace(0.0, 2.0 * math.pi, 501)
    col, a = mathieu_column(2, 0.0, nu)
    assert a == pytest.approx(4.0, abs=1e-12)
    np.testing.assert_allclose(col.y, np.cos(2.0 * nu), atol=1e-12)


def test_mathieu_modified_harmonic_limit_se1():
    mu = np.linspace(0.0, 3.0, 301)
    col, _ = mathieu_column(1, 0.0, mu, modified=True, parity="odd")
    ratio = col.y[1:] / np.sinh(mu[1:])
    assert np.max(np.abs(ratio - ratio[0])) <= 1e-12


def test_mathieu_ce0_ode_residual():
    # fourth-order stencil keeps the differencing error below the target
    nu = np.linspace(0.0, 2.0 * math.pi, 4001)
    col, a = mathieu_column(0, 0.25, nu)
    h = nu[1] - nu[0]
    y = col.y
    d2 = (-y[4:] + 16 * y[3:-1] - 30 * y[2:-2] + 16 * y[1:-3] - y[:-4]) / (12 * h**2)
    residual = d2 + (a - 2 * 0.25 * np.cos(2 * nu[2:-2])) * y[2:-2]
    assert np.max(np.abs(residual)) <= 1e-8


def test_mathieu_coefficients_decay_and_normalization():
    harmonics, c = mathieu_coefficients(0, "even", 0.5)
    assert c[0] > 0
    assert np.linalg.norm(c) == pytest.approx(1.0, rel=1e-14)
    assert abs(c[-1]) < 1e-50  # backward recurrence keeps tiny tails tiny


def test_mathieu_pair_certified():
    nu = np.linspace(0.0, 2.0 * math.pi, 1001)
    pair = mathieu_pair(0, 0.5, nu)
    assert wronskian_check(pair) <= 1e-8 * max(1.0, abs(pair.W))
    mu = np.linspace(0.0, 3.0, 1001)
    pair_mod = mathieu_pair(1, 0.25, mu, modified=True, parity="odd")
    assert wronskian_check(pair_mod) <= 1e-8 * max(1.0, abs(pair_mod.W))


def test_modified_column_solves_hyperbolic_equation():
    # restricted to mu <= 2: beyond that the hyperbolic-sum round-off noise
    # (absolute, ~1e-11) is amplified by 1/h^2 and swamps the FD oracle
    mu = np.linspace(0.0, 2.0, 2001)
    col, a = mathieu_column(0, 0.5, mu, modified=True)
    h = mu[1] - mu[0]
    y = col.y
    d2 = (-y[4:] + 16 * y[3:-1] - 30 * y[2:-2] + 16 * y[1:-3] - y[:-4]) / (12 * h**2)
    residual = d2 + (2 * 0.5 * np.cosh(2 * mu[2:-2]) - a) * y[2:-2]
    scale = np.max(np.abs(y))
    assert np.max(np.abs(residual)) <= 1e-7 * max(1.0, scale)


# ---------------------------------------------------------------------------
# Basis descriptors and the subgrid invariant
# ---------------------------------------------------------------------------


def test_basis_kind_validation():
    with pytest.raises(ConfigurationError):
        BasisKind.weber(math.inf)
    with pytest.raises(ConfigurationError):
        BasisKind.mathieu(1, "sideways", 0.5)


@pytest.mark.parametrize(
    "kind, grid",
    [
        (BasisKind.trig(1.0), np.linspace(-10, 10, 801)),
        (BasisKind.weber(0.5), np.linspace(-5, 5, 801)),
        (BasisKind.whittaker(1.3, 1.0), np.linspace(0.05, 12.0, 801)),
        (BasisKind.mathieu(0, "even", 0.5), np.linspace(0, 2 * math.pi, 801)),
        (BasisKind.mathieu(1, "odd", 0.25, modified=True), np.linspace(0, 3, 801)),
    ],
)
def test_every_basis_pair_passes_wronskian_on_subgrids(kind, grid):
    pair = kind.build(grid)
    tol = 1e-8 * max(1.0, abs(pair.W))
    assert wronskian_check(pair) <= tol
    rng = np.random.default_rng(11)
    idx = np.sort(rng.choice(grid.size, size=101, replace=False))
    assert wronskian_check(pair.subgrid(idx)) <= tol
