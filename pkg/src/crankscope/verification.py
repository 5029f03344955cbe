"""Residual suites behind ``crankscope verify``.

Each suite returns a list of :class:`Check` rows.  A check passes when its
measured value satisfies the comparison against ``threshold``.
"""
from __future__ import annotations

import logging
import random
from fractions import Fraction
from dataclasses import dataclass
from typing import Callable

import mpmath
from mpmath import mp

from . import circle_method as cm
from . import exact_core
from . import special_functions as sf

log = logging.getLogger(__name__)


@dataclass
class Check:
    suite: str
    name: str
    value: float
    threshold: float
    ok: bool
    detail: str = ""

    def as_record(self) -> dict:
        return {"suite": self.suite, "name": self.name, "value": self.value,
                "threshold": self.threshold, "status": "PASS" if self.ok else "FAIL",
                "detail": self.detail}


RECORD_COLUMNS = ("suite", "name", "value", "threshold", "status", "detail")


def _below(suite, name, value, threshold, detail="") -> Check:
    v = float(value)
    return Check(suite, name, v, float(threshold), bool(v < threshold), detail)


def _at_most(suite, name, value, threshold, detail="") -> Check:
    v = float(value)
    return Check(suite, name, v, float(threshold), bool(v <= threshold), detail)


def random_tau(rng: random.Random):
    """A point of the upper half-plane with Im tau in [0.5, 2], Re tau in [-1/2, 1/2]."""
    return mp.mpc(rng.uniform(-0.5, 0.5), rng.uniform(0.5, 2.0))


def suite_euler(j_max: int = 8, R: int = 20) -> list[Check]:
    out = []
    for j in range(j_max + 1):
        got = sf.euler_integral(j)
        want = sf.to_mpf(sf.euler_integral_closed_form(j))
        out.append(_below("euler", f"euler_integral({j})", abs(got - want), 1e-10))
    for t in ("0", "0.5", "1", "1.5", "2"):
        chk = sf.sech2_series_check(mp.mpf(t), R)
        out.append(_at_most("euler", f"sech2_series(t={t},R={R})", chk.residual, chk.tail_bound))
    x = Fraction(1, 3)
    for j in range(12):
        diff = sf.euler_binomial_identity(j, x) - sf.euler_polynomial(j, x)
        out.append(Check("euler", f"binomial_identity({j})", float(abs(diff)), 0.0, diff == 0, "exact"))
    return out


def suite_modular(samples: int = 50, seed: int = 20240601, tol: float = 1e-40) -> list[Check]:
    rng = random.Random(seed)
    out = []
    for i in range(samples):
        tau = random_tau(rng)
        out.append(_below("modular", f"eta[{i}]", sf.eta_transformation_residual(tau), tol,
                          mpmath.nstr(tau, 6)))
    for i in range(samples):
        tau = random_tau(rng)
        w = mp.mpc(rng.uniform(0.05, 0.45), rng.uniform(-0.2, 0.2))
        out.append(_below("modular", f"theta[{i}]", sf.theta_transformation_residual(w, tau), tol,
                          f"w={mpmath.nstr(w, 6)} tau={mpmath.nstr(tau, 6)}"))
    return out


def suite_dominant(n: int = 100, m: int = 1, k: int = 1) -> list[Check]:
    out = []
    samples = []
    for x in (0.0, 0.5, 1.0):
        pt = cm.CirclePoint(k, n, m, x)
        for w in ("0.25", "0.5", "0.75"):
            r, pred = cm.dominant_residual(mp.mpf(w), pt)
            samples.append(((1 - mp.mpf(w)) * (1 / pt.z).real, r))
    rate = cm.fit_decay_rate(samples)
    target = float(4 * mp.pi ** 2)
    out.append(Check("dominant", "decay_rate", rate, target,
                     target / 2 <= rate <= 2 * target, "within a factor 2 of 4 pi^2"))
    pt = cm.CirclePoint(k, n, m, 0.5)
    out.append(_below("dominant", "decomposition", cm.decomposition_residual(pt), 1e-10))
    c_int = cm.C_mk_integral(pt)
    c_ser = cm.C_mk_series(pt)
    out.append(_below("dominant", "integral_vs_series", abs(c_int - c_ser) / abs(c_ser), 1e-10))
    # fitted constant for the G1 error shape: calibrate at n, check at 4n
    lo, hi = cm.CirclePoint(k, n, m, 0.5), cm.CirclePoint(k, 4 * n, m, 0.5)
    const = abs(cm.G1(lo) - cm.G1_main(lo)) / cm.g1_error_shape(lo)
    ratio_hi = abs(cm.G1(hi) - cm.G1_main(hi)) / cm.g1_error_shape(hi)
    out.append(_at_most("dominant", f"G1_constant(n={4 * n})", ratio_hi, 2 * const,
                        f"calibrated {float(const):.4g} at n={n}"))
    return out


def suite_minor(n: int = 100, m: int = 4, k: int = 1) -> list[Check]:
    out = []
    n_cal = max(1, n // 2)
    const = cm.calibrate_minor_arc_constant(k, m, n_cal)
    xmax = float(cm.CirclePoint(k, n, m, 1.0).x_max)
    for x in (1.0, xmax / 2, xmax):
        lhs, rhs, ok = cm.minor_arc_bound_check(cm.CirclePoint(k, n, m, x), const)
        out.append(Check("minor", f"minor_arc(x={x:.4g})", float(lhs), float(rhs), ok,
                         f"constant calibrated at n={n_cal}"))
    us = [mp.mpf(1) / 4, mp.mpf(2) / 5, mp.mpf(1) / 2]
    c35 = cm.calibrate_p_bound_constant(mp.mpf("0.1"), us, 2)
    for v in ("0.05", "0.025"):
        for u in us:
            lhs, rhs, ok = cm.p_bound_check(u, mp.mpf(v), 2, c35)
            out.append(Check("minor", f"P_bound(u={mpmath.nstr(u, 3)},v={v})", float(lhs), float(rhs), ok,
                             "constant calibrated at v=0.1"))
    return out


def suite_circle(n: int = 30, m: int = 1, k: int = 1, tol: float = 1e-2) -> list[Check]:
    out = []
    res = cm.cauchy_coefficient(k, m, n)
    exact = exact_core.M_exact(k, m, n)
    err = abs(res.value - exact)
    out.append(Check("circle", f"cauchy(k={k},m={m},n={n})", float(err), tol,
                     bool(err < tol and int(mpmath.nint(res.value)) == exact), f"exact={exact}"))
    if m >= 1:
        ws = cm.wright_split(k, m, n)
        err = abs(ws.total - exact)
        out.append(_below("circle", f"wright_split(k={k},m={m},n={n})", err, tol,
                          f"E/M={mpmath.nstr(ws.E_minor / ws.M_major, 4)}"))
        out.append(_below("circle", "minor_smaller_than_major", abs(ws.E_minor / ws.M_major), 1.0))
    return out


def suite_bessel(xs=(20, 50, 100), orders=(0, mp.mpf(-7) / 2), s_n=(100, 400, 1600), m: int = 3,
                 k: int = 1) -> list[Check]:
    out = []
    for x in xs:
        for l in orders:
            c = cm.contour_bessel(l, x)
            b = sf.bessel_I(l, 2 * x)
            out.append(_below("bessel", f"contour_bessel(l={mpmath.nstr(l, 3)},x={x})",
                              abs(c - b) / abs(b), 1e-8))
    s = mp.mpf(k) / 2 + 1
    errs = []
    for n in s_n:
        P = cm.P_sk(s, k, n, m)
        I = sf.bessel_I(-s - 1, mp.pi * mpmath.sqrt(mp.mpf(2 * k * n) / 3))
        errs.append(abs(P / I - 1))
    for (n0, e0), (n1, e1) in zip(zip(s_n, errs), list(zip(s_n, errs))[1:]):
        out.append(Check("bessel", f"P_sk_trend(n={n0}->{n1})", float(e1), float(e0), bool(e1 < e0)))
    return out


def run_suite(name: str, **kwargs) -> list[Check]:
    """Run one suite at the configured working precision."""
    try:
        suite = SUITES[name]
    except KeyError:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)}") from None
    with sf.precision():
        return suite(**kwargs)


SUITES: dict[str, Callable[..., list[Check]]] = {
    "euler": suite_euler,
    "modular": suite_modular,
    "dominant": suite_dominant,
    "minor": suite_minor,
    "circle": suite_circle,
    "bessel": suite_bessel,
}
