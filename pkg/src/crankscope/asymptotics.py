"""The sech^2 main term for M_k(m, n) and comparison tables against exact counts."""
from __future__ import annotations

import csv
import io
import json
import math
import warnings
from dataclasses import asdict, dataclass
from decimal import ROUND_HALF_EVEN, Decimal

import mpmath
from mpmath import mp

from . import exact_core
from .exact_core import SeriesCache, TruncationLimitError
from .special_functions import precision


class OutOfRangeWarning(UserWarning):
    pass


@dataclass(frozen=True)
class AsymptoticParams:
    k: int
    n: int
    m: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be positive")
        if self.n < 1:
            raise ValueError("n must be positive")

    @property
    def beta(self):
        """beta_k = pi sqrt(k / (6 n))."""
        return mp.pi * mpmath.sqrt(mp.mpf(self.k) / (6 * self.n))

    @property
    def range_bound(self):
        """log(n) / (6 beta_k); for k = 1 this is sqrt(n) log(n) / (pi sqrt 6)."""
        return mpmath.log(self.n) / (6 * self.beta)

    @property
    def in_range(self) -> bool:
        return abs(self.m) <= self.range_bound


def _params(k, m=None, n=None) -> AsymptoticParams:
    if isinstance(k, AsymptoticParams):
        return k
    return AsymptoticParams(k, n, m)


def sech2_profile(beta, m):
    return beta / 4 * mpmath.sech(beta * m / 2) ** 2


def main_term(params: AsymptoticParams | int, m: int | None = None, n: int | None = None):
    """(beta_k/4) sech^2(beta_k m / 2) p_k(n), with the exact p_k(n).

    Accepts either an :class:`AsymptoticParams` or ``(k, m, n)``.  An m
    outside the proven range only triggers :class:`OutOfRangeWarning`.
    """
    par = _params(params, m, n)
    if not par.in_range:
        warnings.warn(f"|m|={abs(par.m)} outside the asymptotic range for n={par.n}",
                      OutOfRangeWarning, stacklevel=2)
    with precision():
        return sech2_profile(par.beta, par.m) * exact_core.p_colored(par.k, par.n)


def pk_asymptotic(k: int, n: int):
    """2 (k/3)^((1+k)/4) (8n)^(-(3+k)/4) exp(pi sqrt(2kn/3))."""
    if n < 1:
        raise ValueError("n must be positive")
    with precision():
        k_, n_ = mp.mpf(k), mp.mpf(n)
        return (2 * (k_ / 3) ** ((1 + k_) / 4) * (8 * n_) ** (-(3 + k_) / 4)
                * mpmath.exp(mp.pi * mpmath.sqrt(2 * k_ * n_ / 3)))


def round3(x) -> float:
    """Round to 3 decimals, half-even."""
    d = Decimal(mpmath.nstr(x, 30, strip_zeros=False))
    return float(d.quantize(Decimal("0.001"), rounding=ROUND_HALF_EVEN))


@dataclass
class TableRow:
    k: int
    n: int
    m: int
    M_exact: int | None
    M_tilde: object
    ratio: float | None
    in_range: bool

    def as_record(self) -> dict:
        d = asdict(self)
        d["M_tilde"] = mpmath.nstr(self.M_tilde, 15)
        if self.ratio is not None:
            d["ratio"] = f"{self.ratio:.3f}"
        return d


COLUMNS = ("k", "n", "m", "M_exact", "M_tilde", "ratio", "in_range")


def table_row(k: int, n: int, m: int, cache: SeriesCache | None = None,
              allow_missing: bool = False) -> TableRow:
    par = AsymptoticParams(k, n, m)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", OutOfRangeWarning)
        mt = main_term(par)
    try:
        exact = exact_core.M_exact(k, m, n, cache=cache)
    except TruncationLimitError:
        if not allow_missing:
            raise
        exact = None
    ratio = None
    if exact is not None:
        with precision():
            ratio = round3(mp.mpf(exact) / mt)
    return TableRow(k, n, m, exact, mt, ratio, par.in_range)


def ratio_table(k: int, n_list, m_list, cache: SeriesCache | None = None) -> list[TableRow]:
    """Rows (n, m, exact, main term, ratio) ordered by n then m."""
    if n_list:
        # expand once up to the largest n
        (cache or exact_core.default_cache()).series(k, max(n_list))
    return [table_row(k, n, m, cache) for n in n_list for m in m_list]


def rows_to_csv(rows, fh=None) -> str:
    out = fh or io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(COLUMNS)
    for r in rows:
        rec = r.as_record() if isinstance(r, TableRow) else r
        writer.writerow(["" if rec[c] is None else rec[c] for c in COLUMNS])
    return out.getvalue() if fh is None else ""


def rows_to_json(rows, fh=None) -> str:
    recs = [r.as_record() if isinstance(r, TableRow) else r for r in rows]
    recs = [{c: rec[c] for c in COLUMNS} for rec in recs]
    text = json.dumps(recs, indent=1)
    if fh is not None:
        fh.write(text + "\n")
    return text


def mass_within_bound(n: int, cache: SeriesCache | None = None) -> tuple[int, object]:
    """(#partitions of n with |crank| <= sqrt(n) log(n)/(pi sqrt 6), that count / p(n))."""
    if n < 1:
        raise ValueError("n must be positive")
    bound = AsymptoticParams(1, n, 0).range_bound
    mmax = int(mpmath.floor(bound))
    cache = cache or exact_core.default_cache()
    term = cache.series(1, n)[n]
    count = sum(term[m] for m in range(-mmax, mmax + 1))
    with precision():
        return count, mp.mpf(count) / exact_core.p(n)


def sech2_mass_fraction(n: int):
    """Share of the sech^2 profile inside the crank bound: tanh(log(n)/12)."""
    return mpmath.tanh(mpmath.log(n) / 12)


def error_exponent_check(k: int, n_list, m: int, cache: SeriesCache | None = None) -> list[tuple]:
    """[(n, |ratio - 1| / (beta_k^(1/2) |m|^(1/3)))] for each n."""
    if m == 0:
        raise ValueError("the normalised error is undefined at m = 0; use raw_error")
    out = []
    with precision():
        for n in n_list:
            par = AsymptoticParams(k, n, m)
            ratio = mp.mpf(exact_core.M_exact(k, m, n, cache=cache)) / main_term(par)
            out.append((n, abs(ratio - 1) / (mpmath.sqrt(par.beta) * mp.mpf(abs(m)) ** (mp.mpf(1) / 3))))
    return out


def raw_error(k: int, n_list, m: int, cache: SeriesCache | None = None) -> list[tuple]:
    """[(n, |ratio - 1|)] without normalisation (the m = 0 fallback)."""
    out = []
    with precision():
        for n in n_list:
            ratio = mp.mpf(exact_core.M_exact(k, m, n, cache=cache)) / main_term(k, m, n)
            out.append((n, abs(ratio - 1)))
    return out


def exact_ratios(k: int, m: int, n_list, cache: SeriesCache | None = None) -> list:
    with precision():
        return [mp.mpf(exact_core.M_exact(k, m, n, cache=cache)) / main_term(k, m, n) for n in n_list]


# ---------------------------------------------------------------------------
# reference numerical table for k = 1

# (m, n): (M(m, n), M_tilde(m, n), ratio); large values as printed to 10 digits
REFERENCE_TABLE = {
    (0, 20): ("41", "45", "0.912"),
    (0, 50): ("8626", "9261", "0.931"),
    (0, 500): ("3.228743492e19", "3.298285542e19", "0.979"),
    (0, 1000): ("2.403603986e29", "2.439699707e29", "0.985"),
    (1, 20): ("38", "44", "0.863"),
    (1, 50): ("8541", "9185", "0.930"),
    (1, 500): ("3.226300403e19", "3.295574297e19", "0.979"),
    (1, 1000): ("2.402671309e29", "2.438696696e29", "0.985"),
}


@dataclass
class CellCheck:
    cell: str
    expected: str
    got: str
    ok: bool


def _as_printed(value, printed: str) -> str:
    """Render ``value`` at the precision of the printed string."""
    if "e" in printed:
        digits = len(printed.split("e")[0].replace(".", "").lstrip("0"))
        return mpmath.nstr(mp.mpf(value), digits, min_fixed=1, max_fixed=0).replace("e+", "e")
    return str(int(mpmath.nint(value)))


def _same_printed(got: str, expected: str) -> bool:
    if "e" in expected:
        return Decimal(got) == Decimal(expected)
    return got == expected


def verify_reference_table(n_limit: int = 1000, cache: SeriesCache | None = None,
                           ratio_tol: float = 0.001) -> list[CellCheck]:
    """Recompute every reference cell with n <= n_limit.

    Exact and main-term cells must match at the printed precision; ratios
    within ``ratio_tol``.
    """
    checks = []
    keys = sorted((k for k in REFERENCE_TABLE if k[1] <= n_limit), key=lambda t: (t[1], t[0]))
    if keys:
        (cache or exact_core.default_cache()).series(1, max(n for _, n in keys))
    with precision():
        for m, n in keys:
            exp_M, exp_Mt, exp_ratio = REFERENCE_TABLE[(m, n)]
            row = table_row(1, n, m, cache)
            got_M = _as_printed(row.M_exact, exp_M)
            got_Mt = _as_printed(row.M_tilde, exp_Mt)
            ratio = mp.mpf(row.M_exact) / row.M_tilde
            checks.append(CellCheck(f"M({m},{n})", exp_M, got_M, _same_printed(got_M, exp_M)))
            checks.append(CellCheck(f"M~({m},{n})", exp_Mt, got_Mt, _same_printed(got_Mt, exp_Mt)))
            checks.append(CellCheck(f"ratio({m},{n})", exp_ratio, mpmath.nstr(ratio, 6),
                                    abs(ratio - mp.mpf(exp_ratio)) <= ratio_tol))
    return checks
