"""Composite Gauss-Legendre and periodic trapezoid rules on mpmath numbers.

Both rules refine by doubling and stop once two successive estimates agree
to the requested tolerance.  Summation order is fixed by the node layout, so
results are reproducible at a given precision and node count.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import mpmath
from mpmath import mp


class QuadratureError(ArithmeticError):
    def __init__(self, message: str, achieved: float, nodes: int):
        super().__init__(f"{message} (achieved {achieved:.3g} with {nodes} nodes)")
        self.achieved = achieved
        self.nodes = nodes


@dataclass
class QuadResult:
    value: object
    error: float
    nodes: int
    converged: bool
    history: list = field(default_factory=list)


@lru_cache(maxsize=64)
def gauss_legendre_nodes(npts: int, prec: int) -> tuple[tuple, tuple]:
    """Nodes and weights of the npts-point rule on [-1, 1] at ``prec`` bits."""
    with mp.workprec(prec + 20):
        xs, ws = [], []
        for i in range(1, npts // 2 + 1):
            x = mpmath.cos(mp.pi * (4 * i - 1) / (4 * npts + 2))
            for _ in range(100):
                p0, p1 = mp.mpf(1), x
                for j in range(2, npts + 1):
                    p0, p1 = p1, ((2 * j - 1) * x * p1 - (j - 1) * p0) / j
                dp = npts * (x * p1 - p0) / (x * x - 1)
                dx = p1 / dp
                x -= dx
                if abs(dx) < mp.mpf(2) ** (-prec - 10):
                    break
            p0, p1 = mp.mpf(1), x
            for j in range(2, npts + 1):
                p0, p1 = p1, ((2 * j - 1) * x * p1 - (j - 1) * p0) / j
            dp = npts * (x * p1 - p0) / (x * x - 1)
            w = 2 / ((1 - x * x) * dp * dp)
            xs += [x, -x]
            ws += [w, w]
        if npts % 2:
            p0, p1 = mp.mpf(1), mp.mpf(0)
            for j in range(2, npts + 1):
                p0, p1 = p1, ((2 * j - 1) * 0 * p1 - (j - 1) * p0) / j
            dp = npts * (-p0)
            xs.append(mp.mpf(0))
            ws.append(2 / (dp * dp))
        order = sorted(range(npts), key=lambda i: xs[i])
        return tuple(+xs[i] for i in order), tuple(+ws[i] for i in order)


def _gl_panels(f, breaks, npts):
    xs, ws = gauss_legendre_nodes(npts, mp.prec)
    terms = []
    for a, b in zip(breaks, breaks[1:]):
        half = (b - a) / 2
        mid = (a + b) / 2
        terms.append(half * mpmath.fsum(w * f(mid + half * x) for x, w in zip(xs, ws)))
    return mpmath.fsum(terms)


def _split(breaks):
    out = [breaks[0]]
    for a, b in zip(breaks, breaks[1:]):
        out += [(a + b) / 2, b]
    return out


def integrate(f: Callable, breaks: Sequence, npts: int = 20, rel_tol: float = 1e-12,
              abs_tol: float = 0.0, max_doublings: int = 10, strict: bool = True) -> QuadResult:
    """Composite Gauss-Legendre over the panels given by ``breaks``.

    Every panel is bisected until successive estimates differ by at most
    max(abs_tol, rel_tol * |I|).
    """
    breaks = [mp.mpmathify(b) for b in breaks]
    prev = _gl_panels(f, breaks, npts)
    history = [prev]
    nodes = npts * (len(breaks) - 1)
    err = float("inf")
    for _ in range(max_doublings):
        breaks = _split(breaks)
        cur = _gl_panels(f, breaks, npts)
        nodes = npts * (len(breaks) - 1)
        history.append(cur)
        err = float(abs(cur - prev))
        if err <= max(abs_tol, rel_tol * float(abs(cur))):
            return QuadResult(cur, err, nodes, True, history)
        prev = cur
    if strict:
        raise QuadratureError("Gauss-Legendre refinement did not converge", err, nodes)
    return QuadResult(prev, err, nodes, False, history)


def trapezoid_periodic(f: Callable, period_start, period: object, n0: int = 64, rel_tol: float = 1e-12,
                       abs_tol: float = 0.0, max_doublings: int = 10, strict: bool = True) -> QuadResult:
    """(1/period) * integral of a periodic f over one period, by the trapezoid rule.

    Doubling reuses every previous node.
    """
    a = mp.mpmathify(period_start)
    L = mp.mpmathify(period)
    n = n0
    s = mpmath.fsum(f(a + L * j / n) for j in range(n))
    prev = s / n
    history = [prev]
    err = float("inf")
    for _ in range(max_doublings):
        s = s + mpmath.fsum(f(a + L * (2 * j + 1) / (2 * n)) for j in range(n))
        n *= 2
        cur = s / n
        history.append(cur)
        err = float(abs(cur - prev))
        if err <= max(abs_tol, rel_tol * float(abs(cur))):
            return QuadResult(cur, err, n, True, history)
        prev = cur
    if strict:
        raise QuadratureError("trapezoid refinement did not converge", err, n)
    return QuadResult(prev, err, n, False, history)


def graded_breaks(a, b, h, ratio: int = 2) -> list:
    """Break points a, a+h, a+ratio*h, ... clustered at ``a``, ending at b."""
    a, b, h = mp.mpmathify(a), mp.mpmathify(b), mp.mpmathify(h)
    out = [a]
    step = h
    while a + step < b:
        out.append(a + step)
        step *= ratio
    out.append(b)
    return out
