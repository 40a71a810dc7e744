"""Closed-form-anchored fundamental pairs for the named problem bases.

Four families are provided:

* trigonometric pairs (cos k0 q, sin k0 q) for constant frequency,
* Weber / parabolic-cylinder pairs (D_nu(xi), D_nu(-xi)) for the equation
  y'' + (nu + 1/2 - xi^2/4) y = 0, seeded at xi = 0 from the classical
  gamma-function values and extended by normal-form integration,
* Whittaker pairs (M_{kappa,1/2}(2 lambda x), W_{kappa,1/2}(2 lambda x)),
  the M column from its regular power series at the origin and the W
  column integrated inward from a large-argument exponential seed,
* Mathieu pairs: the periodic solution of requested order and parity from
  the truncated Fourier-coefficient ladder, paired with a numerically
  integrated second-kind companion (for q != 0 the even and odd periodic
  functions solve different equations, so they cannot form a pair).

All series-built columns expose derivative columns obtained by term-wise
differentiation, never by numeric differencing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .catalog import FrequencyProfile
from .errors import (
    CharValueConvergenceError,
    ConfigurationError,
    DegeneratePairError,
    EngineError,
    PoleError,
    SeriesConvergenceError,
)
from .linear import (
    DEFAULT_SETTINGS,
    Column,
    FundamentalPair,
    IntegrationSettings,
    companion_pair,
    integrate_normal_form,
)

_SQRT_PI = math.sqrt(math.pi)
_SQRT_2PI = math.sqrt(2.0 * math.pi)


# ---------------------------------------------------------------------------
# Gamma function
# ---------------------------------------------------------------------------

def gamma(x: float) -> float:
    """Gamma function on the real line; poles raise :class:`PoleError`."""
    x = float(x)
    if x <= 0.0 and x == math.floor(x):
        raise PoleError(f"gamma pole at x = {x!r}")
    try:
        return math.gamma(x)
    except ValueError as exc:  # pragma: no cover - guarded above
        raise PoleError(str(exc)) from None


def inv_gamma(x: float) -> float:
    """1 / gamma(x), which is entire: returns 0.0 at the poles of gamma."""
    x = float(x)
    if x <= 0.0 and x == math.floor(x):
        return 0.0
    return 1.0 / math.gamma(x)


# ---------------------------------------------------------------------------
# Trigonometric pair
# ---------------------------------------------------------------------------

def trig_profile(k0: float) -> FrequencyProfile:
    return FrequencyProfile.from_omega2(
        lambda q: np.full_like(np.asarray(q, dtype=float), k0**2), constants={"k0": k0}
    )


def trig_pair(k0: float, grid: np.ndarray) -> FundamentalPair:
    """Exact pair (cos k0 q, sin k0 q) sampled analytically; W = k0."""
    if k0 == 0.0 or not math.isfinite(k0):
        raise ConfigurationError(f"trig pair needs a finite nonzero wavenumber, got {k0!r}")
    grid = np.asarray(grid, dtype=float)
    c, s = np.cos(k0 * grid), np.sin(k0 * grid)
    return FundamentalPair(grid, c, -k0 * s, s, k0 * c, float(k0))


# ---------------------------------------------------------------------------
# Weber / parabolic-cylinder basis
# ---------------------------------------------------------------------------

def weber_profile(nu: float) -> FrequencyProfile:
    """Frequency nu + 1/2 - xi^2/4 of the parabolic-cylinder equation."""
    return FrequencyProfile.from_omega2(
        lambda xi: nu + 0.5 - 0.25 * np.asarray(xi, dtype=float) ** 2,
        label="xi",
        constants={"nu": nu},
    )


def weber_seed(nu: float) -> tuple[float, float]:
    """(D_nu(0), D_nu'(0)) from the classical gamma-function expressions."""
    y0 = _SQRT_PI * 2.0 ** (0.5 * nu) * inv_gamma(0.5 * (1.0 - nu))
    dy0 = -_SQRT_PI * 2.0 ** (0.5 * (nu + 1.0)) * inv_gamma(-0.5 * nu)
    return y0, dy0


def _is_nonneg_integer(nu: float, tol: float = 1e-9) -> bool:
    return nu > -tol and abs(nu - round(nu)) < tol


def weber_column(
    nu: float, grid: np.ndarray, settings: IntegrationSettings | None = None
) -> Column:
    """D_nu sampled on ``grid`` by outward integration from the origin."""
    if not math.isfinite(nu):
        raise ConfigurationError(f"weber order must be finite, got {nu!r}")
    grid = np.asarray(grid, dtype=float)
    y0, dy0 = weber_seed(nu)
    lo = min(float(grid[0]), 0.0)
    hi = max(float(grid[-1]), 0.0)
    return integrate_normal_form(
        weber_profile(nu), (lo, hi), (y0, dy0), settings or DEFAULT_SETTINGS,
        grid=grid, anchor=0.0,
    )


def weber_pair(
    nu: float, xi_grid: np.ndarray, settings: IntegrationSettings | None = None
) -> FundamentalPair:
    """Pair (D_nu(xi), D_nu(-xi)).

    For nonnegative integer nu the reflection D_n(-xi) = (-1)^n D_n(xi)
    makes the pair dependent; a :class:`DegeneratePairError` is raised and
    the caller should complete the D_n column with an identity-data
    second-kind companion instead (see :func:`weber_basis`).
    """
    if _is_nonneg_integer(nu):
        raise DegeneratePairError(
            f"D_nu(-xi) is proportional to D_nu(xi) for integer nu = {nu!r};"
            " use a second-kind companion generated by identity-data integration"
        )
    grid = np.asarray(xi_grid, dtype=float)
    c1 = weber_column(nu, grid, settings)
    if np.allclose(grid, -grid[::-1], rtol=0.0, atol=1e-12):
        y2, dy2 = c1.y[::-1].copy(), -c1.dy[::-1].copy()
    else:
        y0, dy0 = weber_seed(nu)
        lo = min(float(grid[0]), 0.0)
        hi = max(float(grid[-1]), 0.0)
        c2 = integrate_normal_form(
            weber_profile(nu), (lo, hi), (y0, -dy0), settings or DEFAULT_SETTINGS,
            grid=grid, anchor=0.0,
        )
        y2, dy2 = c2.y, c2.dy
    y0, dy0 = weber_seed(nu)
    w = -2.0 * y0 * dy0
    # Transcription check: the same Wronskian by the duplication identity.
    w_identity = _SQRT_2PI * inv_gamma(-nu)
    if abs(w - w_identity) > 1e-10 * max(1.0, abs(w)):
        raise EngineError(
            f"parabolic-cylinder seed values inconsistent: W = {w!r} vs {w_identity!r}"
        )
    return FundamentalPair(grid, c1.y, c1.dy, y2, dy2, w)


def weber_basis(
    nu: float, xi_grid: np.ndarray, settings: IntegrationSettings | None = None
) -> FundamentalPair:
    """Weber pair, falling back to a second-kind companion at integer order."""
    try:
        return weber_pair(nu, xi_grid, settings)
    except DegeneratePairError:
        column = weber_column(nu, np.asarray(xi_grid, dtype=float), settings)
        return companion_pair(weber_profile(nu), column, settings)


# ---------------------------------------------------------------------------
# Whittaker basis (mu = 1/2)
# ---------------------------------------------------------------------------

def whittaker_profile(kappa: float, lam: float) -> FrequencyProfile:
    """Frequency -lam^2 + 2 lam kappa / x of the half-line equation."""
    return FrequencyProfile.from_omega2(
        lambda x: -(lam**2) + 2.0 * lam * kappa / np.asarray(x, dtype=float),
        domain=(0.0, math.inf),
        label="x",
        constants={"kappa": kappa, "lam": lam},
    )


def _whittaker_m_series(
    kappa: float, z: np.ndarray, tail_tol: float, term_cap: int
) -> tuple[np.ndarray, np.ndarray]:
    """Kummer series S(z) = 1F1(1 - kappa; 2; z) and S'(z), term-wise.

    The tail is bounded by the geometric estimate once the term ratio drops
    below 1/2; failing to reach that within ``term_cap`` terms raises
    :class:`SeriesConvergenceError`.
    """
    s = np.ones_like(z)
    ds = np.zeros_like(z)
    term = np.ones_like(z)
    zmax = float(np.max(np.abs(z)))
    for n in range(term_cap):
        ratio_coeff = (1.0 - kappa + n) / ((2.0 + n) * (1.0 + n))
        new_term = term * ratio_coeff * z
        s = s + new_term
        ds = ds + (n + 1) * term * ratio_coeff  # d/dz of a_{n+1} z^{n+1}
        term = new_term
        next_ratio = (1.0 - kappa + n + 1) / ((3.0 + n) * (2.0 + n))
        bound = abs(next_ratio) * zmax
        if bound < 0.5:
            tail = float(np.max(np.abs(term))) * bound / (1.0 - bound)
            if tail <= tail_tol * max(1.0, float(np.max(np.abs(s)))):
                return s, ds
    raise SeriesConvergenceError(
        f"Whittaker M series did not meet its tail bound within {term_cap} terms"
    )


def whittaker_m_column(
    kappa: float,
    x_grid: np.ndarray,
    lam: float,
    tail_tol: float = 1e-12,
    term_cap: int = 2000,
) -> Column:
    """M_{kappa,1/2}(2 lam x) with the leading series coefficient fixed to 1."""
    x = np.asarray(x_grid, dtype=float)
    if np.any(x <= 0.0):
        raise ConfigurationError("Whittaker grid must lie in (0, inf)")
    if lam <= 0.0:
        raise ConfigurationError(f"lambda must be positive, got {lam!r}")
    z = 2.0 * lam * x
    s, ds = _whittaker_m_series(kappa, z, tail_tol, term_cap)
    expo = np.exp(-0.5 * z)
    m = z * expo * s
    dm_dz = expo * ((1.0 - 0.5 * z) * s + z * ds)
    return Column(x, m, 2.0 * lam * dm_dz)


def _whittaker_w_settings() -> IntegrationSettings:
    # The seed magnitude e^{-z/2} z^kappa is far below 1, so the inward
    # integration is run at tight relative tolerance with a vanishing
    # absolute floor; accuracy then tracks the solution scale throughout.
    return IntegrationSettings(rel_tol=1e-12, abs_tol=1e-280)


def whittaker_pair(
    kappa: float,
    x_grid: np.ndarray,
    lam: float,
    settings: IntegrationSettings | None = None,
    anchor_x: float | None = None,
) -> FundamentalPair:
    """Pair (M_{kappa,1/2}(2 lam x), W_{kappa,1/2}(2 lam x)).

    The W column is anchored at large argument by its leading exponential
    asymptotic term only, so its absolute normalization is approximate by
    O(1/z_anchor); downstream quadratic-form coefficients absorb the scale.
    At quantized kappa = n + 1 the two functions are proportional and a
    :class:`DegeneratePairError` is raised.
    """
    if kappa >= 0.5 and abs(kappa - round(kappa)) < 1e-9:
        raise DegeneratePairError(
            f"M and W are proportional at quantized kappa = {kappa!r};"
            " use a second-kind companion generated by identity-data integration"
        )
    x = np.asarray(x_grid, dtype=float)
    m_col = whittaker_m_column(kappa, x, lam)
    if anchor_x is None:
        anchor_x = max(30.0 / (2.0 * lam), 2.0 * float(x[-1]))
    z_a = 2.0 * lam * anchor_x
    w_a = math.exp(-0.5 * z_a) * z_a**kappa
    dw_a = 2.0 * lam * math.exp(-0.5 * z_a) * z_a ** (kappa - 1.0) * (kappa - 0.5 * z_a)
    w_col = integrate_normal_form(
        whittaker_profile(kappa, lam),
        (float(x[0]), anchor_x),
        (w_a, dw_a),
        settings or _whittaker_w_settings(),
        grid=x,
        anchor=anchor_x,
    )
    mid = len(x) // 2
    wronskian = float(
        m_col.y[mid] * w_col.dy[mid] - m_col.dy[mid] * w_col.y[mid]
    )
    return FundamentalPair(x, m_col.y, m_col.dy, w_col.y, w_col.dy, wronskian)


def whittaker_basis(
    kappa: float,
    x_grid: np.ndarray,
    lam: float,
    settings: IntegrationSettings | None = None,
) -> FundamentalPair:
    """Whittaker pair, falling back to a companion at quantized kappa."""
    try:
        return whittaker_pair(kappa, x_grid, lam, settings)
    except DegeneratePairError:
        column = whittaker_m_column(kappa, np.asarray(x_grid, dtype=float), lam)
        return companion_pair(
            whittaker_profile(kappa, lam), column, settings or DEFAULT_SETTINGS
        )


# ---------------------------------------------------------------------------
# Mathieu basis
# ---------------------------------------------------------------------------

_PARITIES = ("even", "odd")


def _mathieu_ladder(ell: int, parity: str) -> tuple[int, int, int]:
    """(first harmonic, harmonic step, eigenvalue index) for the family."""
    if parity not in _PARITIES:
        raise ConfigurationError(f"parity must be 'even' or 'odd', got {parity!r}")
    if ell < 0 or ell != int(ell):
        raise ConfigurationError(f"order must be a nonnegative integer, got {ell!r}")
    ell = int(ell)
    if parity == "even":
        if ell % 2 == 0:
            return 0, 2, ell // 2
        return 1, 2, (ell - 1) // 2
    if ell == 0:
        raise ConfigurationError("odd parity requires order >= 1 (sin-type solutions)")
    if ell % 2 == 0:
        return 2, 2, ell // 2 - 1
    return 1, 2, (ell - 1) // 2


def _mathieu_matrix(ell: int, parity: str, q: float, size: int):
    """Symmetric tridiagonal Fourier-coefficient matrix of the family."""
    first, step, index = _mathieu_ladder(ell, parity)
    harmonics = first + step * np.arange(size)
    diag = harmonics.astype(float) ** 2
    off = np.full(size - 1, q, dtype=float)
    if parity == "even" and first == 0:
        off[0] = math.sqrt(2.0) * q
    elif parity == "even" and first == 1:
        diag[0] += q
    elif parity == "odd" and first == 1:
        diag[0] -= q
    return diag, off, index


def mathieu_char_value_truncated(ell: int, parity: str, q: float, size: int) -> float:
    """Characteristic value from one fixed truncation of the ladder matrix."""
    diag, off, index = _mathieu_matrix(ell, parity, q, size)
    vals = eigh_tridiagonal(diag, off, select="i", select_range=(index, index))[0]
    return float(vals[0])


def mathieu_char_value(
    ell: int,
    parity: str,
    q: float,
    tol: float = 1e-10,
    size_cap: int = 4096,
) -> float:
    """Converged characteristic value a_ell (even) or b_ell (odd).

    Convergence means doubling the truncation changes the value by at most
    ``tol``; the doubled value is returned.
    """
    size = max(32, 4 * int(ell) + 20)
    prev = mathieu_char_value_truncated(ell, parity, q, size)
    while size <= size_cap:
        size *= 2
        cur = mathieu_char_value_truncated(ell, parity, q, size)
        if abs(cur - prev) <= tol:
            return cur
        prev = cur
    raise CharValueConvergenceError(
        f"characteristic value (ell={ell}, parity={parity}, q={q}) not converged"
        f" at truncation cap {size_cap}"
    )


def mathieu_coefficients(
    ell: int, parity: str, q: float, a: float | None = None, size: int | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """(harmonics, coefficients) of the periodic solution of order ``ell``.

    Coefficients come from backward recurrence through the three-term ladder
    (stable for the minimal solution, so each entry keeps relative accuracy;
    the plain eigenvector would only be accurate in absolute terms, which is
    not enough for the hyperbolic sums).  The vector is normalized to unit
    Euclidean norm with the order-``ell`` harmonic coefficient positive.
    """
    first, step, index = _mathieu_ladder(ell, parity)
    if size is None:
        size = max(40, index + 25)
    if a is None:
        a = mathieu_char_value(ell, parity, q)
    harmonics = (first + step * np.arange(size)).astype(float)
    c = np.zeros(size, dtype=float)
    if q == 0.0:
        c[index] = 1.0
        return harmonics, c

    even_even = parity == "even" and first == 0
    c[size - 1] = 1.0
    above = 0.0
    bottom = 2 if even_even else 1
    for k in range(size - 1, bottom - 1, -1):
        h = harmonics[k]
        new = (a - h * h) * c[k] / q - above
        above = c[k]
        c[k - 1] = new
        if abs(new) > 1e250:
            c[k - 1 :] /= abs(new)
            above /= abs(new)
    if even_even:
        # The k = 1 row couples twice to the constant mode.
        c[0] = ((a - 4.0) * c[1] - q * c[2]) / (2.0 * q)

    c /= math.sqrt(float(np.dot(c, c)))
    pivot = c[index] if c[index] != 0.0 else c[int(np.argmax(np.abs(c)))]
    if pivot < 0.0:
        c = -c

    # Bottom-row consistency: nonzero residual here means the characteristic
    # value and the recurrence ladder disagree.
    if even_even:
        residual = a * c[0] - q * c[1]
    elif parity == "even":
        residual = (a - 1.0 - q) * c[0] - q * c[1]
    elif first == 2:
        residual = (a - 4.0) * c[0] - q * c[1]
    else:
        residual = (a - 1.0 + q) * c[0] - q * c[1]
    if abs(residual) > 1e-6 * max(1.0, abs(a)):
        raise EngineError(
            f"Mathieu coefficient ladder inconsistent (residual {residual:.3e})"
        )
    return harmonics, c


def mathieu_profile(a: float, q: float, modified: bool) -> FrequencyProfile:
    """Frequency a - 2q cos 2nu, or its hyperbolic continuation 2q cosh 2mu - a."""
    if modified:
        fn = lambda mu: 2.0 * q * np.cosh(2.0 * np.asarray(mu, dtype=float)) - a
    else:
        fn = lambda nu: a - 2.0 * q * np.cos(2.0 * np.asarray(nu, dtype=float))
    return FrequencyProfile.from_omega2(fn, constants={"a_M": a, "q_M": q})


def mathieu_column(
    ell: int,
    q: float,
    grid: np.ndarray,
    modified: bool = False,
    parity: str = "even",
    size: int | None = None,
) -> tuple[Column, float]:
    """Periodic (or hyperbolically continued) Mathieu column and its char value.

    Plain:    sum_k c_k cos(h_k nu)   or  sum_k c_k sin(h_k nu)
    Modified: sum_k c_k cosh(h_k mu)  or  sum_k c_k sinh(h_k mu)
    """
    grid = np.asarray(grid, dtype=float)
    a = mathieu_char_value(ell, parity, q)
    harmonics, coeffs = mathieu_coefficients(ell, parity, q, a=a, size=size)
    if modified and float(np.max(harmonics)) * float(np.max(np.abs(grid))) > 700.0:
        raise ConfigurationError(
            "hyperbolic-sum terms would overflow on this grid; reduce the grid"
            " extent or the coefficient count"
        )
    y = np.zeros_like(grid)
    dy = np.zeros_like(grid)
    even_fn = parity == "even"
    for h, c in zip(harmonics, coeffs):
        if c == 0.0:
            continue
        arg = h * grid
        if modified:
            if even_fn:
                y += c * np.cosh(arg)
                dy += c * h * np.sinh(arg)
            else:
                y += c * np.sinh(arg)
                dy += c * h * np.cosh(arg)
        else:
            if even_fn:
                y += c * np.cos(arg)
                dy += -c * h * np.sin(arg)
            else:
                y += c * np.sin(arg)
                dy += c * h * np.cos(arg)
    return Column(grid, y, dy), a


def mathieu_pair(
    ell: int,
    q: float,
    grid: np.ndarray,
    modified: bool = False,
    parity: str = "even",
    settings: IntegrationSettings | None = None,
    size: int | None = None,
) -> FundamentalPair:
    """Mathieu fundamental pair of the requested order and parity.

    The first column is the periodic solution built from the coefficient
    ladder; the second is a second-kind companion of the same equation from
    identity-data integration (the opposite-parity periodic function belongs
    to a different characteristic value whenever q != 0).
    """
    column, a = mathieu_column(ell, q, grid, modified=modified, parity=parity, size=size)
    return companion_pair(mathieu_profile(a, q, modified), column, settings or DEFAULT_SETTINGS)


# ---------------------------------------------------------------------------
# Basis descriptors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BasisKind:
    """Named fundamental-pair recipe with its parameters.

    Tags: "trig", "weber", "whittaker" (second index fixed to 1/2),
    "mathieu", "mathieu_modified".
    """

    tag: str
    params: tuple[tuple[str, float | str], ...]

    def __post_init__(self):
        for _, v in self.params:
            if isinstance(v, float) and not math.isfinite(v):
                raise ConfigurationError(f"basis parameter {v!r} must be finite")

    def param(self, name: str):
        for k, v in self.params:
            if k == name:
                return v
        raise ConfigurationError(f"basis {self.tag!r} has no parameter {name!r}")

    @classmethod
    def trig(cls, k0: float) -> "BasisKind":
        return cls("trig", (("k0", float(k0)),))

    @classmethod
    def weber(cls, nu: float) -> "BasisKind":
        return cls("weber", (("nu", float(nu)),))

    @classmethod
    def whittaker(cls, kappa: float, lam: float) -> "BasisKind":
        return cls("whittaker", (("kappa", float(kappa)), ("lam", float(lam))))

    @classmethod
    def mathieu(cls, ell: int, parity: str, q: float, modified: bool = False) -> "BasisKind":
        if parity not in _PARITIES:
            raise ConfigurationError(f"parity must be 'even' or 'odd', got {parity!r}")
        tag = "mathieu_modified" if modified else "mathieu"
        return cls(tag, (("ell", int(ell)), ("parity", parity), ("q", float(q))))

    def profile(self) -> FrequencyProfile:
        if self.tag == "trig":
            return trig_profile(self.param("k0"))
        if self.tag == "weber":
            return weber_profile(self.param("nu"))
        if self.tag == "whittaker":
            return whittaker_profile(self.param("kappa"), self.param("lam"))
        a = mathieu_char_value(self.param("ell"), self.param("parity"), self.param("q"))
        return mathieu_profile(a, self.param("q"), self.tag == "mathieu_modified")

    def build(
        self, grid: np.ndarray, settings: IntegrationSettings | None = None
    ) -> FundamentalPair:
        """Construct the pair on ``grid``, with automatic second-kind
        companions at degenerate (quantized) parameter values."""
        if self.tag == "trig":
            return trig_pair(self.param("k0"), grid)
        if self.tag == "weber":
            return weber_basis(self.param("nu"), grid, settings)
        if self.tag == "whittaker":
            return whittaker_basis(self.param("kappa"), grid, self.param("lam"))
        return mathieu_pair(
            self.param("ell"),
            self.param("q"),
            grid,
            modified=self.tag == "mathieu_modified",
            parity=self.param("parity"),
            settings=settings,
        )
