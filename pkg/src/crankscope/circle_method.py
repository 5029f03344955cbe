"""Numerical Wright circle method for the crank generating functions.

C_{m,k}(q) = sum_n M_k(m, n) q^n is evaluated two ways:

* ``C_mk_integral``: 2 P(q)^k * integral_0^{1/2} g(w; tau) cos(2 pi m w) dw with
  g = i (zeta^(1/2) - zeta^(-1/2)) eta(tau)^3 / theta(w; tau),
* ``C_mk_series``: P(q)^k times the zeta^m coefficient of g, read off the
  Lerch sum, sum_{j>=1} (-1)^(j-1) q^(j(j-1)/2 + j|m|) (1 - q^j).

The second is cheap and drives the contour integrals; the first is the
object the dominant-pole analysis is about, and the two are checked against
each other.

Throughout, a point on the circle |q| = e^(-beta_k) is described by
z = beta_k (1 + i x m^(-1/3)), tau = i z / (2 pi), q = e^(-z).
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import mpmath
from mpmath import mp

from . import exact_core
from .quadrature import QuadratureError, QuadResult, graded_breaks, integrate, trapezoid_periodic
from .special_functions import DomainError, bessel_I, eta, precision, theta

LN2 = math.log(2)


class SingularityError(ArithmeticError):
    pass


def beta_k(k: int, n: int):
    return mp.pi * mpmath.sqrt(mp.mpf(k) / (6 * n))


@dataclass(frozen=True)
class CirclePoint:
    k: int
    n: int
    m: int
    x: float = 0.0

    def __post_init__(self):
        if self.n < 1 or self.k < 1:
            raise ValueError("need k >= 1 and n >= 1")
        if self.m < 0:
            raise ValueError("m must be nonnegative (M_k is even in m)")
        if self.m == 0 and self.x != 0:
            raise ValueError("the x-parametrisation needs m >= 1 unless x = 0")
        if self.m and abs(self.x) > self.x_max * (1 + mp.mpf(10) ** -12):
            raise ValueError(f"|x|={abs(self.x)} exceeds pi m^(1/3)/beta_k = {float(self.x_max):.6g}")

    @property
    def beta(self):
        return beta_k(self.k, self.n)

    @property
    def x_max(self):
        return mp.pi * mp.mpf(self.m) ** (mp.mpf(1) / 3) / self.beta

    @property
    def z(self):
        if self.m == 0:
            return mp.mpc(self.beta)
        return self.beta * mp.mpc(1, mp.mpf(self.x) * mp.mpf(self.m) ** (-mp.mpf(1) / 3))

    @property
    def tau(self):
        return 1j * self.z / (2 * mp.pi)

    @property
    def q(self):
        return mpmath.exp(-self.z)

    @property
    def near_pole(self) -> bool:
        return abs(self.x) <= 1


def _tau_from_z(z):
    return 1j * mp.mpc(z) / (2 * mp.pi)


def _guard_bits(z, factor=1.0) -> int:
    """Bits lost to cancellation when evaluating q-series of size e^(-c Re(1/z))."""
    return int(factor * float(mp.pi ** 2 * (1 / mp.mpc(z)).real) / LN2) + 32


# ---------------------------------------------------------------------------
# g and C_{m,k}


def P_power(z, k: int = 1):
    """P(q)^k = q^(k/24) / eta(tau)^k at q = e^(-z)."""
    z = mp.mpc(z)
    with mp.workprec(mp.prec + _guard_bits(z, 1 / 6)):
        tau = _tau_from_z(z)
        val = (mpmath.exp(-z / 24) / eta(tau, method="series")) ** k
    return +val


def g_dominant(w, z):
    """2 pi sin(pi w) / (z sinh(2 pi^2 w / z)) * e^(2 pi^2 w^2 / z); equals 1 at w = 0."""
    w, z = mp.mpmathify(w), mp.mpc(z)
    if w == 0:
        return mp.mpc(1)
    a = 2 * mp.pi ** 2 / z
    return 2 * mp.pi * mpmath.sin(mp.pi * w) / (z * mpmath.sinh(a * w)) * mpmath.exp(a * w * w)


def g_at(w, z, extra_bits: int = 0):
    """g(w; i z / 2 pi), with enough guard bits that eta^3 and theta keep full precision."""
    w = mp.mpmathify(w)
    z = mp.mpc(z)
    wr = mpmath.nint(w.real) if isinstance(w, mp.mpc) else mpmath.nint(w)
    if w == wr:
        return mp.mpc(1)
    if abs(w - wr) < mp.mpf(2) ** (-(mp.prec // 4)):
        raise SingularityError(f"g evaluated too close to the removable zero at w={wr}")
    prec = mp.prec
    with mp.workprec(prec + _guard_bits(z, 0.5) + extra_bits):
        tau = _tau_from_z(z)
        num = 1j * (mpmath.expjpi(w) - mpmath.expjpi(-w)) * eta(tau, method="series") ** 3
        den = theta(w, tau, method="series")
        if den == 0:
            raise SingularityError(f"theta underflow at w={w}")
        val = num / den
    return +val


def g_eval(w, point: CirclePoint, extra_bits: int = 0):
    return g_at(w, point.z, extra_bits)


def g_m_series(m: int, z):
    """zeta^m coefficient of g: sum_{j>=1} (-1)^(j-1) q^(j(j-1)/2 + j|m|) (1 - q^j)."""
    m = abs(m)
    z = mp.mpc(z)
    with mp.workprec(mp.prec + 32 + int(float(m * z.real) / LN2)):
        q = mpmath.exp(-z)
        lim = (mp.prec + 10) * LN2
        total = mp.mpc(0)
        qj = mp.mpc(1)         # q^j
        qe = mpmath.exp(-m * z)  # q^(j(j-1)/2 + j m) at j = 1
        j = 1
        while True:
            qj *= q
            total += (qe if j % 2 else -qe) * (1 - qj)
            qe *= qj * mpmath.exp(-m * z) if m else qj
            j += 1
            if float(z.real) * (j * (j - 1) / 2 + j * m) > lim:
                break
    return +total


def C_mk_series(point_or_m, k: int | None = None, z=None):
    """C_{m,k}(e^(-z)) from P^k and the Lerch coefficient series.

    Call as ``C_mk_series(point)`` or ``C_mk_series(m, k, z)``.
    """
    if isinstance(point_or_m, CirclePoint):
        m, k, z = point_or_m.m, point_or_m.k, point_or_m.z
    else:
        m = point_or_m
    return P_power(z, k) * g_m_series(m, z)


def w_breaks(z):
    """Panels on [0, 1/2] graded towards w = 0, where theta's zeros come closest."""
    h = abs(mp.mpc(z)) / (2 * mp.pi)
    return graded_breaks(0, mp.mpf(1) / 2, min(h, mp.mpf(1) / 8))


def _cos_integral(f, m, z, rel_tol, npts):
    def integrand(w):
        return f(w) * mpmath.cos(2 * mp.pi * m * w)
    return integrate(integrand, w_breaks(z), npts=npts, rel_tol=rel_tol, abs_tol=0)


def C_mk_integral(point: CirclePoint, quad_nodes: int = 20, rel_tol: float = 1e-12,
                  return_result: bool = False):
    """2 P(q)^k integral_0^{1/2} g(w; tau) cos(2 pi m w) dw by graded Gauss-Legendre."""
    z = point.z
    res = _cos_integral(lambda w: g_at(w, z), point.m, z, rel_tol, quad_nodes)
    val = 2 * P_power(z, point.k) * res.value
    return (val, res) if return_result else val


def G1(point: CirclePoint, quad_nodes: int = 20, rel_tol: float = 1e-15, return_result: bool = False):
    """(4 pi / z) integral_0^{1/2} sin(pi w)/sinh(2 pi^2 w/z) e^(2 pi^2 w^2/z) cos(2 pi m w) dw."""
    z = point.z
    res = _cos_integral(lambda w: g_dominant(w, z), point.m, z, rel_tol, quad_nodes)
    val = 2 * res.value
    return (val, res) if return_result else val


def G2(point: CirclePoint, quad_nodes: int = 20, rel_tol: float = 1e-8, return_result: bool = False):
    """2 integral_0^{1/2} (g - dominant approximation) cos(2 pi m w) dw.

    The integrand is of size exp(-2 pi^2 Re(1/z) (2 - w - w^2)), so
    g is evaluated with that many extra guard bits.
    """
    z = point.z
    extra = _guard_bits(z, 2.0)

    def diff(w):
        with mp.workprec(mp.prec + extra):
            return g_at(w, z) - g_dominant(w, z)

    res = _cos_integral(diff, point.m, z, rel_tol, quad_nodes)
    val = 2 * res.value
    return (val, res) if return_result else val


def G1_main(point: CirclePoint):
    return point.z / 4 * mpmath.sech(point.beta * point.m / 2) ** 2


def g1_error_shape(point: CirclePoint):
    """beta_k^2 m^(2/3) sech^2(beta_k m / 2)."""
    b = point.beta
    return b * b * mp.mpf(point.m) ** (mp.mpf(2) / 3) * mpmath.sech(b * point.m / 2) ** 2


def g2_bound_shape(point: CirclePoint):
    """(1 / beta_k) exp(-5 pi^2 / (4 beta_k))."""
    b = point.beta
    return mpmath.exp(-5 * mp.pi ** 2 / (4 * b)) / b


def near_pole_main(point: CirclePoint):
    """z^(k/2+1) / (4 (2 pi)^(k/2)) sech^2(beta_k m/2) e^(k pi^2/(6 z))."""
    z, k = point.z, point.k
    return (z ** (mp.mpf(k) / 2 + 1) / (4 * (2 * mp.pi) ** (mp.mpf(k) / 2))
            * mpmath.sech(point.beta * point.m / 2) ** 2 * mpmath.exp(k * mp.pi ** 2 / (6 * z)))


def decomposition_residual(point: CirclePoint, quad_nodes: int = 20):
    """|C_mk_integral - P^k (G1 + G2)| / |C_mk_integral|."""
    c = C_mk_integral(point, quad_nodes)
    recon = P_power(point.z, point.k) * (G1(point, quad_nodes) + G2(point, quad_nodes))
    return abs(c - recon) / abs(c)


def dominant_residual(w, point: CirclePoint):
    """|g / dominant approximation - 1| and the predicted size e^(-4 pi^2 (1-w) Re(1/z))."""
    z = point.z
    extra = _guard_bits(z, 4.0 * (1 - float(w)))
    with mp.workprec(mp.prec + extra):
        r = abs(g_at(w, z) / g_dominant(w, z) - 1)
    pred = mpmath.exp(-4 * mp.pi ** 2 * (1 - mp.mpf(w)) * (1 / z).real)
    return +r, pred


def fit_decay_rate(samples: Sequence[tuple]) -> float:
    """Least-squares slope of -log(residual) against s = (1-w) Re(1/z)."""
    xs = [float(s) for s, _ in samples]
    ys = [-float(mpmath.log(r)) for _, r in samples]
    n = len(xs)
    mx, my = sum(xs) / n, sum(ys) / n
    sxx = sum((a - mx) ** 2 for a in xs)
    sxy = sum((a - mx) * (b - my) for a, b in zip(xs, ys))
    return sxy / sxx


# ---------------------------------------------------------------------------
# I_ell and its comparison with the Euler integrals


def _check_z(z):
    z = mp.mpc(z)
    if z.real <= 0:
        raise DomainError("need Re z > 0")
    return z


def _default_tol(rel_tol):
    return mp.mpf(2) ** (-(mp.prec - 32)) if rel_tol is None else rel_tol


def I_ell(l: int, z, rel_tol=None):
    """integral_0^{1/2} w^(2l+1) / sinh(2 pi^2 w / z) dw (tolerance defaults to the working precision)."""
    z = _check_z(z)
    rel_tol = _default_tol(rel_tol)
    a = 2 * mp.pi ** 2 / z
    return integrate(lambda w: w ** (2 * l + 1) / mpmath.sinh(a * w), w_breaks(z),
                     npts=20, rel_tol=rel_tol).value


def _tail_integral(l: int, z, start, rel_tol):
    a = 2 * mp.pi ** 2 / z
    decay = a.real
    W = mp.mpf(start) + 1
    target = -(mp.prec + 10) * LN2
    while (2 * l + 1) * mpmath.log(W) - decay * W > target:
        W *= 2
    step = max(min(1 / decay, mp.mpf(1)), mp.mpf(1) / 64)
    breaks = []
    b = mp.mpf(start)
    while b < W:
        breaks.append(b)
        b += step
        step *= 2
    breaks.append(W)
    return integrate(lambda w: w ** (2 * l + 1) / mpmath.sinh(a * w), breaks,
                     npts=20, rel_tol=rel_tol, abs_tol=mp.mpf(2) ** (-mp.prec + 20)).value


def I_ell_split(l: int, z, rel_tol=None) -> dict:
    """The pieces of I_l = integral_0^inf - integral_{1/2}^inf.

    ``half``: I_l directly; ``full``: the real-axis integral to infinity;
    ``tail``: integral_{1/2}^inf; ``closed``: (z/2pi)^(2l+2) (-1)^(l+1) E_{2l+1}(0)/2.
    """
    from .special_functions import euler_integral_closed_form, to_mpf
    z = _check_z(z)
    rel_tol = _default_tol(rel_tol)
    half = I_ell(l, z, rel_tol)
    tail = _tail_integral(l, z, mp.mpf(1) / 2, rel_tol)
    a = 2 * mp.pi ** 2 / z
    head = integrate(lambda w: w ** (2 * l + 1) / mpmath.sinh(a * w), w_breaks(z),
                     npts=20, rel_tol=rel_tol).value
    full = head + tail
    closed = (z / (2 * mp.pi)) ** (2 * l + 2) * to_mpf(euler_integral_closed_form(l))
    return {"half": half, "full": full, "tail": tail, "closed": closed,
            "tail_bound_shape": mpmath.exp(-mp.pi ** 2 * (1 / z).real)}


# ---------------------------------------------------------------------------
# minor arcs


def minor_arc_shape(point: CirclePoint):
    """n^((3-k)/4) exp(pi sqrt(kn/6) - sqrt(6kn)/(8 pi) m^(-2/3))."""
    k, n, m = point.k, mp.mpf(point.n), mp.mpf(point.m)
    return n ** ((3 - mp.mpf(k)) / 4) * mpmath.exp(
        mp.pi * mpmath.sqrt(k * n / 6) - mpmath.sqrt(6 * k * n) / (8 * mp.pi) * m ** (-mp.mpf(2) / 3))


def calibrate_minor_arc_constant(k: int, m: int, n: int, xs: Sequence[float] | None = None,
                                 safety: float = 2.0):
    """safety * max_x |C_{m,k}| / shape over a grid of 1 <= x <= x_max at one n."""
    base = CirclePoint(k, n, m, 1.0)
    if xs is None:
        xmax = float(base.x_max)
        xs = [1 + (xmax - 1) * i / 16 for i in range(17)]
    ratios = [abs(C_mk_series(CirclePoint(k, n, m, x))) / minor_arc_shape(CirclePoint(k, n, m, x)) for x in xs]
    return safety * max(ratios)


def minor_arc_bound_check(point: CirclePoint, constant) -> tuple:
    """(|C_{m,k}(q)|, constant * shape, ok) for a point with 1 <= |x| <= x_max."""
    if not 1 <= abs(point.x) <= point.x_max * (1 + mp.mpf(10) ** -12):
        raise ValueError("minor-arc check needs 1 <= |x| <= pi m^(1/3) / beta_k")
    lhs = abs(C_mk_series(point))
    rhs = constant * minor_arc_shape(point)
    return lhs, rhs, bool(lhs <= rhs)


def P_modulus(u, v):
    """|P(q)| = |1/(q;q)_inf| at tau = u + i v."""
    tau = mp.mpc(u, v)
    z = -2j * mp.pi * tau
    return abs(P_power(z, 1))


def p_bound_shape(v, M):
    """sqrt(v) exp((1/v)(pi/12 - (1/(2 pi))(1 - 1/sqrt(1+M^2))))."""
    v, M = mp.mpf(v), mp.mpf(M)
    return mpmath.sqrt(v) * mpmath.exp((mp.pi / 12 - (1 - 1 / mpmath.sqrt(1 + M * M)) / (2 * mp.pi)) / v)


def p_bound_check(u, v, M, constant) -> tuple:
    """(|P(q)|, constant * shape, ok); only u > 0 with M v <= u <= 1/2 is covered."""
    u, v = mp.mpf(u), mp.mpf(v)
    if not (u > 0 and M * v <= u <= mp.mpf(1) / 2):
        raise ValueError("need M v <= u <= 1/2 with u > 0")
    lhs = P_modulus(u, v)
    rhs = constant * p_bound_shape(v, M)
    return lhs, rhs, bool(lhs <= rhs)


# ---------------------------------------------------------------------------
# Cauchy integral and the major/minor split


@dataclass
class ArcRecord:
    label: str
    k: int
    n: int
    m: int
    x_lo: float
    x_hi: float
    value: float
    tolerance: float
    nodes: int
    precision_bits: int

    def to_json(self) -> dict:
        return asdict(self)


def dump_records(records: Sequence[ArcRecord], path=None) -> str:
    text = json.dumps([r.to_json() for r in records], indent=1)
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    return text


def cauchy_coefficient(k: int, m: int, n: int, evaluator: str = "series", n0: int = 32,
                       abs_tol: float = 1e-6, max_doublings: int = 8) -> QuadResult:
    """(1/2 pi) integral_{-pi}^{pi} C_{m,k}(e^{-beta-i theta}) e^{(beta+i theta) n} d(theta).

    The integrand is periodic in theta, so the trapezoid rule is used.
    ``evaluator`` selects C_mk_series or C_mk_integral for the generating function.
    """
    beta = beta_k(k, max(n, 1))
    m = abs(m)
    if evaluator == "series":
        def C(z):
            return C_mk_series(m, k, z)
    elif evaluator == "integral":
        def C(z):
            z = mp.mpc(z)
            res = _cos_integral(lambda w: g_at(w, z), m, z, 1e-12, 20)
            return 2 * P_power(z, k) * res.value
    else:
        raise ValueError(f"unknown evaluator {evaluator!r}")

    def f(theta):
        z = mp.mpc(beta, theta)
        return C(z) * mpmath.exp(n * z)

    res = trapezoid_periodic(f, -mp.pi, 2 * mp.pi, n0=n0, abs_tol=abs_tol, max_doublings=max_doublings)
    res.value = res.value.real
    return res


def cauchy_coefficients(k: int, m: int, n_max: int, n0: int = 64, abs_tol: float = 1e-6,
                        max_doublings: int = 6) -> list:
    """Coefficients n = 0..n_max of C_{m,k} from one radius e^(-beta_k(n_max)).

    All n share the samples of C on the circle; each estimate is refined
    by doubling until it moves by less than ``abs_tol``.
    """
    beta = beta_k(k, max(n_max, 1))
    m = abs(m)
    N = n0
    samples = [C_mk_series(m, k, mp.mpc(beta, 2 * mp.pi * j / N)) for j in range(N)]

    def estimate(samples, N):
        out = []
        for n in range(n_max + 1):
            s = mpmath.fsum(c * mpmath.expjpi(2 * n * mp.mpf(j) / N) for j, c in enumerate(samples))
            out.append((s / N * mpmath.exp(n * beta)).real)
        return out

    prev = estimate(samples, N)
    for _ in range(max_doublings):
        odd = [C_mk_series(m, k, mp.mpc(beta, 2 * mp.pi * (2 * j + 1) / (2 * N))) for j in range(N)]
        merged = [None] * (2 * N)
        merged[0::2], merged[1::2] = samples, odd
        samples, N = merged, 2 * N
        cur = estimate(samples, N)
        err = max(abs(a - b) for a, b in zip(cur, prev))
        if err <= abs_tol:
            return cur
        prev = cur
    raise QuadratureError("Cauchy coefficients did not converge", float(err), N)


def cauchy_coefficients_integral(k: int, ms: Sequence[int], n: int, n0: int = 64, abs_tol: float = 1e-6,
                                 max_doublings: int = 4, rel_tol: float = 1e-10) -> dict:
    """M_k(m, n) for several m from the w-integral form of C_{m,k}.

    For a fixed point on the circle the Gauss-Legendre nodes in w do not
    depend on m, so g is evaluated once per node and shared.
    """
    beta = beta_k(k, max(n, 1))
    ms = sorted({abs(m) for m in ms})

    def values_at(theta):
        z = mp.mpc(beta, theta)
        memo = {}

        def g(w):
            key = mpmath.nstr(w, mp.dps)
            if key not in memo:
                memo[key] = g_at(w, z)
            return memo[key]
        pk = 2 * P_power(z, k) * mpmath.exp(n * z)
        return [pk * _cos_integral(g, m, z, rel_tol, 20).value for m in ms]

    N = n0
    sums = [mpmath.fsum(col) for col in zip(*[values_at(-mp.pi + 2 * mp.pi * j / N) for j in range(N)])]
    prev = [s_ / N for s_ in sums]
    for _ in range(max_doublings):
        odd = [values_at(-mp.pi + 2 * mp.pi * (2 * j + 1) / (2 * N)) for j in range(N)]
        sums = [s_ + mpmath.fsum(col) for s_, col in zip(sums, zip(*odd))]
        N *= 2
        cur = [s_ / N for s_ in sums]
        err = max(abs(a - b) for a, b in zip(cur, prev))
        if err <= abs_tol:
            return {m: v.real for m, v in zip(ms, cur)}
        prev = cur
    raise QuadratureError("Cauchy coefficients (integral form) did not converge", float(err), N)


@dataclass
class WrightSplit:
    M_major: object
    E_minor: object
    records: list = field(default_factory=list)

    @property
    def total(self):
        return self.M_major + self.E_minor


def _x_integrand(k, m, n):
    beta = beta_k(k, n)
    c = mp.mpf(m) ** (-mp.mpf(1) / 3)

    def f(x):
        z = beta * mp.mpc(1, x * c)
        return C_mk_series(m, k, z) * mpmath.exp(n * z)
    return f


def wright_split(k: int, m: int, n: int, npts: int = 20, abs_tol: float = 1e-4) -> WrightSplit:
    """M_k(m, n) = M + E with M over |x| <= 1 and E over 1 <= |x| <= pi m^(1/3)/beta_k.

    The integrand at -x is the conjugate of that at x, so both pieces are
    2 Re of the half-range integral.
    """
    if m < 1:
        raise ValueError("the x-parametrisation needs m >= 1")
    beta = beta_k(k, n)
    pref = beta / (2 * mp.pi * mp.mpf(m) ** (mp.mpf(1) / 3))
    f = _x_integrand(k, m, n)
    xmax = mp.pi * mp.mpf(m) ** (mp.mpf(1) / 3) / beta
    # panel width in x for roughly beta/2 in theta
    width = mp.mpf(m) ** (mp.mpf(1) / 3) / 2
    major_breaks = [mp.mpf(0), mp.mpf(1) / 2, mp.mpf(1)] if width >= 1 else \
        [mp.mpf(i) / int(mpmath.ceil(1 / width)) for i in range(int(mpmath.ceil(1 / width)) + 1)]
    npan = int(mpmath.ceil((xmax - 1) / width))
    minor_breaks = [1 + (xmax - 1) * i / npan for i in range(npan + 1)]
    tol = abs_tol / (2 * float(pref))
    major = integrate(f, major_breaks, npts=npts, rel_tol=0, abs_tol=tol)
    minor = integrate(f, minor_breaks, npts=npts, rel_tol=0, abs_tol=tol)
    M = 2 * pref * major.value.real
    E = 2 * pref * minor.value.real
    recs = [
        ArcRecord("major", k, n, m, -1.0, 1.0, float(M), float(2 * pref * major.error), 2 * major.nodes, mp.prec),
        ArcRecord("minor", k, n, m, 1.0, float(xmax), float(E), float(2 * pref * minor.error), 2 * minor.nodes, mp.prec),
    ]
    return WrightSplit(M, E, recs)


# ---------------------------------------------------------------------------
# P_{s,k} and the loop integral for I-Bessel


def P_sk(s, k: int, n: int, m: int, npts: int = 20, rel_tol: float = 1e-15):
    """(1/2 pi i) integral_{1-i m^(-1/3)}^{1+i m^(-1/3)} v^s e^(X(v + 1/v)) dv, X = pi sqrt(kn/6)."""
    s = mp.mpf(s)
    if s <= 0 or m < 1:
        raise ValueError("need s > 0 and m >= 1")
    X = mp.pi * mpmath.sqrt(mp.mpf(k) * n / 6)
    c = mp.mpf(m) ** (-mp.mpf(1) / 3)

    def f(t):
        v = mp.mpc(1, t)
        return v ** s * mpmath.exp(X * (v + 1 / v))

    panels = max(2, int(mpmath.ceil(2 * c * mpmath.sqrt(X))))
    breaks = [-c + 2 * c * i / panels for i in range(panels + 1)]
    # v = 1 + i t, dv = i dt
    return integrate(f, breaks, npts=npts, rel_tol=rel_tol).value / (2 * mp.pi)


@dataclass
class ContourSpec:
    segments: list
    nodes_per_segment: int = 20

    def __post_init__(self):
        segs = [(mp.mpc(a), mp.mpc(b)) for a, b in self.segments]
        for (a0, b0), (a1, b1) in zip(segs, segs[1:]):
            if abs(b0 - a1) > mp.mpf(10) ** (-mp.dps // 2):
                raise ValueError(f"segments are not connected: {b0} != {a1}")
        self.segments = segs

    def winding_number(self) -> int:
        """Turns about 0, closing the path with a straight segment end -> start."""
        pts = [a for a, _ in self.segments] + [self.segments[-1][1]]
        total = mp.mpf(0)
        for a, b in zip(pts, pts[1:] + pts[:1]):
            total += mpmath.arg(b / a)
        return int(mpmath.nint(total / (2 * mp.pi)))

    def crosses_branch_cut(self) -> bool:
        """Does any segment cross the negative real axis?"""
        for a, b in self.segments:
            if (a.imag > 0) != (b.imag > 0) and a.imag != b.imag:
                t = a.imag / (a.imag - b.imag)
                if (a + t * (b - a)).real < 0:
                    return True
            elif a.imag == 0 == b.imag and min(a.real, b.real) < 0:
                return True
        return False


def loop_contour(c=1, x=10, nodes_per_segment: int = 20) -> ContourSpec:
    """The Hankel-type loop from -inf - i c/2 around 0 to -inf + i c/2.

    Segments: (-T - ic/2, -1 - ic/2), (-1 - ic/2, -1 - ic), (-1 - ic, 1 - ic),
    (1 - ic, 1 + ic) and mirror images; T is where e^(x(t + 1/t)) underflows
    the working precision.
    """
    c = mp.mpf(c)
    T = 1 + (mp.prec + 20) * LN2 / mp.mpf(x)
    pts = [mp.mpc(-T, -c / 2), mp.mpc(-1, -c / 2), mp.mpc(-1, -c), mp.mpc(1, -c),
           mp.mpc(1, c), mp.mpc(-1, c), mp.mpc(-1, c / 2), mp.mpc(-T, c / 2)]
    return ContourSpec(list(zip(pts, pts[1:])), nodes_per_segment)


def contour_bessel(l, x, spec: ContourSpec | None = None, rel_tol: float = 1e-15):
    """I_l(2x) as (1/2 pi i) integral over the loop of t^(-l-1) e^(x(t + 1/t)) dt."""
    l, x = mp.mpf(l), mp.mpf(x)
    if x <= 0:
        raise DomainError("contour_bessel requires x > 0")
    spec = loop_contour(1, x) if spec is None else spec
    if spec.winding_number() != 1:
        raise DomainError("contour does not surround the origin counterclockwise")
    if spec.crosses_branch_cut():
        raise DomainError("contour crosses the branch cut of t^(-l-1) on the negative axis")
    scale = mpmath.exp(2 * x) / mpmath.sqrt(4 * mp.pi * x)

    def f(t):
        return t ** (-l - 1) * mpmath.exp(x * (t + 1 / t))

    parts = []
    for a, b in spec.segments:
        d = b - a
        length = abs(d)
        npan = max(1, int(mpmath.ceil(length * mpmath.sqrt(x) / 2)))
        res = integrate(lambda s: f(a + d * s), [mp.mpf(i) / npan for i in range(npan + 1)],
                        npts=spec.nodes_per_segment, rel_tol=0, abs_tol=rel_tol * scale)
        parts.append(d * res.value)
    return mpmath.fsum(parts) / (2j * mp.pi)


def calibrate_p_bound_constant(v, us: Sequence, M=2, safety: float = 2.0):
    """safety * max_u |P(q)| / shape at one v, over the admissible u."""
    return safety * max(P_modulus(u, v) / p_bound_shape(v, M) for u in us if M * mp.mpf(v) <= mp.mpf(u))
