"""Arbitrary-precision eta, theta, Euler polynomials, incomplete gamma and I-Bessel.

All analytic values are mpmath ``mpf``/``mpc`` numbers computed at the active
mpmath precision (see :func:`precision`).
"""
from __future__ import annotations

import contextlib
import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from math import comb

import mpmath
from mpmath import mp

from .config import get_config
from .quadrature import QuadratureError, integrate


class DomainError(ValueError):
    pass


@contextlib.contextmanager
def precision(bits: int | None = None):
    """Run the block at ``bits`` of mantissa (default: configured precision).

    Never lowers the precision already in force.
    """
    bits = get_config().precision_bits if bits is None else bits
    if bits < 64:
        raise ValueError("precision must be at least 64 bits")
    with mp.workprec(max(bits, mp.prec)):
        yield


def to_mpf(x):
    """mpf from an int, float, mpf or Fraction."""
    if isinstance(x, Fraction):
        return mp.mpf(x.numerator) / x.denominator
    return mp.mpf(x)


def _check_tau(tau):
    tau = mp.mpc(tau)
    if tau.imag <= 0:
        raise DomainError(f"Im(tau) must be positive, got tau={tau}")
    return tau


def _terms_for(radius, eps_bits):
    """Smallest N with radius**N below 2**-eps_bits."""
    lr = -mpmath.log(radius)
    if lr <= 0:
        raise DomainError("series does not converge: |q| >= 1")
    return int(mpmath.ceil(eps_bits * mpmath.log(2) / lr)) + 2


# ---------------------------------------------------------------------------
# eta and theta


def eta(tau, N: int | None = None, method: str = "product"):
    """Dedekind eta q^(1/24) prod_{n>=1} (1 - q^n), q = e^(2 pi i tau).

    ``method="series"`` sums Euler's pentagonal series instead of the
    product; it needs far fewer terms when |q| is close to 1.
    """
    tau = _check_tau(tau)
    q = mpmath.expjpi(2 * tau)
    q24 = mpmath.expjpi(tau / 12)
    if method == "product":
        if N is None:
            N = _terms_for(abs(q), mp.prec + 8)
        prod = mp.mpc(1)
        qn = mp.mpc(1)
        for _ in range(N):
            qn *= q
            prod *= 1 - qn
        return q24 * prod
    if method == "series":
        # eta = sum_{n in Z} (-1)^n q^((6n+1)^2/24)
        lr = 2 * mp.pi * tau.imag
        total = mp.mpc(0)
        n = 0
        while True:
            e1, e2 = 6 * n + 1, -6 * n + 1
            if n > 0 and lr * min(e1 * e1, e2 * e2) / 24 > (mp.prec + 8) * math.log(2):
                break
            sign = -1 if n % 2 else 1
            total += sign * mpmath.expjpi(tau * e1 * e1 / 12)
            if n > 0:
                total += sign * mpmath.expjpi(tau * e2 * e2 / 12)
            n += 1
        return total
    raise ValueError(f"unknown method {method!r}")


def theta(w, tau, N: int | None = None, method: str = "product"):
    """Jacobi theta i zeta^(1/2) q^(1/8) prod (1-q^n)(1-zeta q^n)(1-zeta^-1 q^(n-1)).

    zeta^(1/2) means e^(pi i w).  ``method="series"`` uses the triple-product
    identity theta = sum_{nu in 1/2 + Z} e^(pi i nu) q^(nu^2/2) zeta^nu.
    """
    tau = _check_tau(tau)
    w = mp.mpc(w)
    if method == "product":
        q = mpmath.expjpi(2 * tau)
        zeta = mpmath.expjpi(2 * w)
        if N is None:
            worst = abs(q) * max(abs(zeta), 1 / abs(zeta))
            if worst >= 1:
                # |Im w| > Im tau: the tail still decays, just later
                worst_n = abs(q) ** 2 * max(abs(zeta), 1 / abs(zeta))
                N = _terms_for(mpmath.sqrt(worst_n), mp.prec + 8) + 2
            else:
                N = _terms_for(worst, mp.prec + 8)
        zinv = 1 / zeta
        prod = 1 - zinv
        qn = mp.mpc(1)
        for _ in range(N):
            qn *= q
            # (1 - q^n)(1 - zeta q^n) and the next (1 - zeta^-1 q^n) factor
            prod *= (1 - qn) * (1 - zeta * qn) * (1 - zinv * qn)
        return 1j * mpmath.expjpi(w) * mpmath.expjpi(tau / 4) * prod
    if method == "series":
        v = tau.imag
        y = abs(w.imag)
        bound = (mp.prec + 8) * math.log(2)
        # |term| = exp(-pi v nu^2 - 2 pi nu Im w) < 2^-bits once |nu| > J
        J = int(mpmath.ceil((y + mpmath.sqrt(y * y + v * bound / mp.pi)) / v)) + 1
        half = mp.mpf(1) / 2
        total = mpmath.fsum(mpmath.expjpi(nu + nu * nu * tau + 2 * nu * w)
                            for j in range(J + 1) for nu in (j + half, -j - half))
        return total
    raise ValueError(f"unknown method {method!r}")


def sqrt_minus_i_tau(tau):
    """Principal branch of sqrt(-i tau), with argument in (-pi/4, pi/4) for Im tau > 0."""
    return mpmath.sqrt(-1j * mp.mpc(tau))


def eta_transformation_residual(tau, method: str = "product"):
    tau = _check_tau(tau)
    lhs = eta(-1 / tau, method=method)
    rhs = sqrt_minus_i_tau(tau) * eta(tau, method=method)
    return abs(lhs - rhs) / max(1, abs(rhs))


def theta_transformation_residual(w, tau, method: str = "product"):
    tau = _check_tau(tau)
    w = mp.mpc(w)
    lhs = theta(w / tau, -1 / tau, method=method)
    rhs = -1j * sqrt_minus_i_tau(tau) * mpmath.expjpi(w * w / tau) * theta(w, tau, method=method)
    return abs(lhs - rhs) / max(1, abs(rhs))


# ---------------------------------------------------------------------------
# Euler polynomials


class EulerPolyTable:
    """Exact rational coefficients of E_0(x), ..., E_maxDegree(x).

    Built from 2 x^r = E_r(x) + sum_{j<=r} C(r, j) E_j(x), which is the t^r
    coefficient of (e^t + 1) * sum E_r(x) t^r / r! = 2 e^(xt).
    """

    def __init__(self, maxDegree: int = 0):
        self.coeffs: list[list[Fraction]] = []
        self._lock = threading.Lock()
        self.extend(maxDegree)

    @property
    def maxDegree(self) -> int:
        return len(self.coeffs) - 1

    def extend(self, degree: int) -> None:
        with self._lock:
            for r in range(len(self.coeffs), degree + 1):
                poly = [Fraction(0)] * (r + 1)
                poly[r] = Fraction(2)
                for j in range(r):
                    c = comb(r, j)
                    for i, a in enumerate(self.coeffs[j]):
                        poly[i] -= c * a
                self.coeffs.append([a / 2 for a in poly])

    def poly(self, r: int) -> list[Fraction]:
        if r > self.maxDegree:
            self.extend(r)
        return self.coeffs[r]

    def __call__(self, r: int, x) -> Fraction:
        x = Fraction(x)
        acc = Fraction(0)
        for a in reversed(self.poly(r)):
            acc = acc * x + a
        return acc


_EULER = EulerPolyTable(32)


def euler_polynomial(r: int, x) -> Fraction:
    """E_r(x), exactly, for rational x."""
    if r < 0:
        raise ValueError("r must be nonnegative")
    return _EULER(r, x)


def euler_number(l: int) -> Fraction:
    """E_l = 2^l E_l(1/2): 1, 0, -1, 0, 5, 0, -61, ..."""
    return 2 ** l * euler_polynomial(l, Fraction(1, 2))


def euler_binomial_identity(j: int, x) -> Fraction:
    """sum_l C(j, l) (x - 1/2)^(j-l) E_l / 2^l, which should equal E_j(x)."""
    x = Fraction(x)
    return sum(comb(j, l) * (x - Fraction(1, 2)) ** (j - l) * euler_number(l) / 2 ** l
               for l in range(j + 1))


@dataclass
class SeriesCheck:
    lhs: object
    rhs: object
    residual: object
    tail_bound: object


def sech2_series_check(t, R: int) -> SeriesCheck:
    """Compare -1/2 sech^2(t/2) with sum_{r=0}^{R} E_{2r+1}(0) t^(2r)/(2r)!.

    The coefficients E_{2r+1}(0) alternate in sign, so once the terms shrink
    the first omitted term bounds the truncation error (``tail_bound``).
    """
    t = mp.mpf(t)
    if abs(t) >= mp.pi:
        raise DomainError(f"|t| must be < pi for the sech^2 series, got {t}")
    lhs = -mpmath.sech(t / 2) ** 2 / 2

    def term(r):
        return to_mpf(euler_polynomial(2 * r + 1, 0)) * t ** (2 * r) / mpmath.factorial(2 * r)

    rhs = mpmath.fsum(term(r) for r in range(R + 1))
    nxt, after = abs(term(R + 1)), abs(term(R + 2))
    tail = nxt if after <= nxt else mp.inf
    return SeriesCheck(lhs, rhs, abs(lhs - rhs), tail)


def euler_integral_closed_form(j: int) -> Fraction:
    """(-1)^(j+1) E_(2j+1)(0) / 2."""
    return (-1) ** (j + 1) * euler_polynomial(2 * j + 1, 0) / 2


def euler_integral(j: int, tol: float = 1e-30):
    """integral_0^inf w^(2j+1) / sinh(pi w) dw by composite Gauss-Legendre.

    [0, 1] is one panel; the tail is covered by doubling panels [1, 2, 4, ...]
    out to where w^(2j+1) e^(-pi w) is below the working epsilon.
    """
    if j < 0 or j > 12:
        raise ValueError("euler_integral supports 0 <= j <= 12")

    def f(w):
        return w ** (2 * j + 1) / mpmath.sinh(mp.pi * w)

    # cutoff W: (2j+1) log W - pi W < -(prec+10) log 2
    W = mp.mpf(2)
    target = -(mp.prec + 10) * math.log(2)
    while (2 * j + 1) * mpmath.log(W) - mp.pi * W > target:
        W *= 2
    breaks = [mp.mpf(0), mp.mpf(1)]
    b = mp.mpf(2)
    while b < W:
        breaks.append(b)
        b *= 2
    breaks.append(W)
    try:
        res = integrate(f, breaks, npts=24, rel_tol=tol, max_doublings=8)
    except QuadratureError as exc:
        raise QuadratureError(f"euler_integral({j}) did not converge", exc.achieved, exc.nodes) from exc
    return res.value


# ---------------------------------------------------------------------------
# incomplete gamma


def incomplete_gamma(alpha, x):
    """Upper incomplete gamma integral_x^inf e^-w w^(alpha-1) dw, x > 0.

    Continued fraction (modified Lentz) for x > alpha + 1, otherwise
    Gamma(alpha) minus the lower-gamma power series.
    """
    alpha, x = mp.mpf(alpha), mp.mpf(x)
    if x <= 0:
        raise DomainError("incomplete_gamma requires x > 0")
    eps = mp.mpf(2) ** (-mp.prec)
    if x > alpha + 1:
        tiny = mp.mpf(2) ** (-2 * mp.prec)
        b = x + 1 - alpha
        c = 1 / tiny
        d = 1 / b
        h = d
        i = 1
        while True:
            an = -i * (i - alpha)
            b += 2
            d = an * d + b
            if abs(d) < tiny:
                d = tiny
            c = b + an / c
            if abs(c) < tiny:
                c = tiny
            d = 1 / d
            delta = d * c
            h *= delta
            if abs(delta - 1) < eps:
                break
            i += 1
            if i > 100000:
                raise ArithmeticError("incomplete_gamma continued fraction did not converge")
        return mpmath.exp(-x + alpha * mpmath.log(x)) * h
    # lower gamma: x^a e^-x sum x^n / (a (a+1) ... (a+n))
    term = 1 / alpha
    total = term
    n = 1
    with mp.workprec(mp.prec + 20):
        while abs(term) > eps * abs(total):
            term *= x / (alpha + n)
            total += term
            n += 1
        lower = total * mpmath.exp(-x + alpha * mpmath.log(x))
        return +(mpmath.gamma(alpha) - lower)


# ---------------------------------------------------------------------------
# I-Bessel

BESSEL_CROSSOVER = 30


def _bessel_I_series(nu, x):
    half = x / 2
    with mp.workprec(mp.prec + 30):
        term = half ** nu * mpmath.rgamma(nu + 1)
        total = term
        k = 0
        peaked = False
        if term == 0:
            # negative integer order: the first |nu| terms vanish
            n = int(-nu)
            return _bessel_I_series(mp.mpf(n), x)
        eps = mp.mpf(2) ** (-mp.prec)
        while True:
            k += 1
            term *= half * half / (k * (k + nu))
            total += term
            if k > abs(nu) + x and abs(term) < eps * abs(total):
                break
        return total


def _bessel_I_asymptotic(nu, x):
    mu = 4 * nu * nu
    eps = mp.mpf(2) ** (-mp.prec - 10)
    with mp.workprec(mp.prec + 20):
        a = mp.mpf(1)
        growing = mp.mpf(1)   # sum (-1)^k a_k / x^k
        decaying = mp.mpf(1)  # sum a_k / x^k
        k = 0
        prev = mp.inf
        while True:
            k += 1
            a *= (mu - (2 * k - 1) ** 2) / (k * 8)
            term = a / x ** k
            if term == 0:
                break
            if abs(term) > prev or abs(term) < eps:
                break
            prev = abs(term)
            growing += (-1) ** k * term
            decaying += term
        pre = 1 / mpmath.sqrt(2 * mp.pi * x)
        return pre * (mpmath.exp(x) * growing - mpmath.sinpi(nu) * mpmath.exp(-x) * decaying)


def bessel_I(nu, x, method: str | None = None):
    """Modified Bessel function I_nu(x) of real order, x > 0.

    Power series for x <= 30, Hankel asymptotic expansion (including the
    exponentially small e^-x companion) above.
    """
    nu, x = mp.mpf(nu), mp.mpf(x)
    if x <= 0:
        raise DomainError("bessel_I requires x > 0")
    if method is None:
        method = "series" if x <= BESSEL_CROSSOVER else "asymptotic"
    if method == "series":
        return _bessel_I_series(nu, x)
    if method == "asymptotic":
        return _bessel_I_asymptotic(nu, x)
    raise ValueError(f"unknown method {method!r}")
