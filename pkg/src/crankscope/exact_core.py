"""Exact big-integer crank data.

Three independent routes produce the crank counts M_k(m, n):

* enumeration of partitions and direct evaluation of the crank statistic,
* expansion of the product (q)_inf^(2-k) / ((zeta q)_inf (zeta^-1 q)_inf),
* (k = 1 only) expansion of the Lerch-sum representation.

Everything here is integer arithmetic; nothing in this module touches floats.
"""
from __future__ import annotations

import gzip
import hashlib
import json
import logging
import os
import threading
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Mapping, Sequence

from .config import get_config

log = logging.getLogger(__name__)

CACHE_FORMAT = "crankscope-crank-series"
CACHE_VERSION = 1


class EnumerationTooLarge(ValueError):
    pass


class TruncationLimitError(ValueError):
    pass


class CacheError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# partitions and the crank statistic


@dataclass(frozen=True)
class Partition:
    parts: tuple[int, ...] = ()

    def __post_init__(self):
        parts = tuple(self.parts)
        object.__setattr__(self, "parts", parts)
        if any(p < 1 for p in parts):
            raise ValueError(f"parts must be positive: {parts}")
        if any(a < b for a, b in zip(parts, parts[1:])):
            raise ValueError(f"parts must be weakly decreasing: {parts}")

    @property
    def n(self) -> int:
        return sum(self.parts)

    def __len__(self):
        return len(self.parts)

    def __iter__(self):
        return iter(self.parts)

    def __repr__(self):
        return f"Partition{self.parts}"


def _partitions_bounded(n: int, largest: int) -> Iterator[tuple[int, ...]]:
    # lexicographically increasing, every part <= largest
    if n == 0:
        yield ()
        return
    for first in range(1, min(n, largest) + 1):
        for rest in _partitions_bounded(n - first, first):
            yield (first,) + rest


def iter_partitions(n: int, limit: int | None = None) -> Iterator[Partition]:
    if n < 0:
        raise ValueError("n must be nonnegative")
    limit = get_config().enumeration_limit if limit is None else limit
    if n > limit:
        raise EnumerationTooLarge(
            f"enumeration too large: n={n} exceeds enumeration limit {limit} (p(n)={p(n)})"
        )
    for parts in _partitions_bounded(n, n):
        yield Partition(parts)


def partitions_of(n: int, limit: int | None = None) -> list[Partition]:
    """All partitions of ``n`` in lexicographic order of their part tuples."""
    return list(iter_partitions(n, limit))


def crank(lam: Partition | Sequence[int]) -> int:
    """Andrews-Garvan crank; the empty partition has crank 0."""
    parts = lam.parts if isinstance(lam, Partition) else tuple(lam)
    ones = sum(1 for x in parts if x == 1)
    if ones == 0:
        return max(parts, default=0)
    return sum(1 for x in parts if x > ones) - ones


def crank_census(n: int, limit: int | None = None) -> dict[int, int]:
    """Histogram {crank: count} over all partitions of ``n``."""
    counts = Counter(crank(lam) for lam in iter_partitions(n, limit))
    return dict(sorted(counts.items()))


# ---------------------------------------------------------------------------
# partition numbers

_p_values: list[int] = [1]
_p_lock = threading.Lock()


# above this the recurrence table is not grown; the Rademacher series is used
RECURRENCE_MAX = 20000
COLORED_MAX = 6000


def p(n: int) -> int:
    """Number of partitions of ``n``.

    Euler's pentagonal recurrence up to RECURRENCE_MAX, sympy's exact
    Rademacher-series evaluation beyond.
    """
    if n < 0:
        return 0
    if n > RECURRENCE_MAX and n >= len(_p_values):
        from sympy.functions.combinatorial.numbers import partition
        return int(partition(n))
    with _p_lock:
        vals = _p_values
        for m in range(len(vals), n + 1):
            total = 0
            j = 1
            while True:
                g1 = j * (3 * j - 1) // 2
                if g1 > m:
                    break
                sign = 1 if j % 2 else -1
                total += sign * vals[m - g1]
                g2 = g1 + j
                if g2 <= m:
                    total += sign * vals[m - g2]
                j += 1
            vals.append(total)
        return vals[n]


def _sigma_list(N: int) -> list[int]:
    sig = [0] * (N + 1)
    for d in range(1, N + 1):
        for mult in range(d, N + 1, d):
            sig[mult] += d
    return sig


_pk_values: dict[int, list[int]] = {}


def colored_partition_numbers(k: int, N: int) -> list[int]:
    """[p_k(0), ..., p_k(N)], the coefficients of (q;q)_inf^-k."""
    if k < 1:
        raise ValueError("k must be a positive integer")
    cached = _pk_values.get(k)
    if cached is not None and len(cached) > N:
        return cached[: N + 1]
    if k == 1:
        vals = [p(n) for n in range(N + 1)]
    else:
        # n a_n = k sum_j sigma(j) a_{n-j}
        sig = _sigma_list(N)
        vals = [1] + [0] * N
        for n in range(1, N + 1):
            acc = sum(sig[j] * vals[n - j] for j in range(1, n + 1))
            vals[n], rem = divmod(k * acc, n)
            assert rem == 0
    _pk_values[k] = vals
    return vals


def p_colored(k: int, n: int) -> int:
    if n < 0:
        return 0
    if k == 1:
        return p(n)
    if n > COLORED_MAX:
        raise ValueError(f"p_{k}({n}) is beyond the exact recurrence range (n <= {COLORED_MAX})")
    return colored_partition_numbers(k, n)[n]


# ---------------------------------------------------------------------------
# Laurent polynomials in zeta


@dataclass(frozen=True)
class LaurentPoly:
    """sum_j coeffs[j] * zeta^(lo + j), stored trimmed."""

    lo: int = 0
    coeffs: tuple[int, ...] = ()

    def __post_init__(self):
        c = list(self.coeffs)
        lo = self.lo
        start = 0
        while start < len(c) and c[start] == 0:
            start += 1
        end = len(c)
        while end > start and c[end - 1] == 0:
            end -= 1
        c = c[start:end]
        object.__setattr__(self, "coeffs", tuple(c))
        object.__setattr__(self, "lo", lo + start if c else 0)

    @classmethod
    def from_dict(cls, d: Mapping[int, int]) -> "LaurentPoly":
        d = {e: c for e, c in d.items() if c}
        if not d:
            return cls()
        lo, hi = min(d), max(d)
        return cls(lo, tuple(d.get(e, 0) for e in range(lo, hi + 1)))

    @classmethod
    def monomial(cls, exponent: int, coeff: int = 1) -> "LaurentPoly":
        return cls(exponent, (coeff,))

    @property
    def hi(self) -> int:
        return self.lo + len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __getitem__(self, m: int) -> int:
        j = m - self.lo
        if 0 <= j < len(self.coeffs):
            return self.coeffs[j]
        return 0

    def to_dict(self) -> dict[int, int]:
        return {self.lo + j: c for j, c in enumerate(self.coeffs) if c}

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        lo = min(self.lo, other.lo)
        hi = max(self.hi, other.hi)
        return LaurentPoly(lo, tuple(self[e] + other[e] for e in range(lo, hi + 1)))

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly(self.lo, tuple(-c for c in self.coeffs))

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + (-other)

    def __mul__(self, other) -> "LaurentPoly":
        if isinstance(other, int):
            return LaurentPoly(self.lo, tuple(other * c for c in self.coeffs))
        if self.is_zero() or other.is_zero():
            return LaurentPoly()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return LaurentPoly(self.lo + other.lo, tuple(out))

    __rmul__ = __mul__

    def shift(self, d: int) -> "LaurentPoly":
        """Multiply by zeta^d."""
        return LaurentPoly(self.lo + d, self.coeffs) if self.coeffs else self

    def at_one(self) -> int:
        return sum(self.coeffs)

    def reflect(self) -> "LaurentPoly":
        """zeta -> zeta^-1."""
        return LaurentPoly(-self.hi, tuple(reversed(self.coeffs))) if self.coeffs else self

    def __repr__(self):
        if not self.coeffs:
            return "LaurentPoly(0)"
        return "LaurentPoly(" + " + ".join(f"{c}*z^{e}" for e, c in self.to_dict().items()) + ")"


@dataclass
class BivariateSeries:
    """Truncated series sum_{n<=trunc} terms[n](zeta) q^n."""

    trunc: int
    terms: list[LaurentPoly]

    def __post_init__(self):
        if len(self.terms) != self.trunc + 1:
            raise ValueError("need exactly trunc + 1 terms")

    def __getitem__(self, n: int) -> LaurentPoly:
        if n < 0:
            return LaurentPoly()
        if n > self.trunc:
            raise TruncationLimitError(f"series known only through q^{self.trunc}, asked for q^{n}")
        return self.terms[n]

    def coefficient(self, m: int, n: int) -> int:
        return self[n][m]

    def __eq__(self, other):
        if not isinstance(other, BivariateSeries):
            return NotImplemented
        return self.trunc == other.trunc and self.terms == other.terms

    def truncate(self, N: int) -> "BivariateSeries":
        if N > self.trunc:
            raise TruncationLimitError(f"cannot extend a series truncated at {self.trunc} to {N}")
        return BivariateSeries(N, self.terms[: N + 1])


# ---------------------------------------------------------------------------
# product route
#
# Row n of the series is held as one big integer: the coefficient of zeta^m
# sits in a B-bit signed slot at position m + N.  Multiplying a row by zeta^(+-1)
# is then a shift by B bits, and a full row update is a single big-integer add.


def _signed_bits(bound: int) -> int:
    return bound.bit_length() + 2


def _decode_row(x: int, width: int, offset_slots: int, lo: int, hi: int) -> LaurentPoly:
    mask = (1 << width) - 1
    half = 1 << (width - 1)
    x >>= width * (offset_slots + lo)
    out = []
    for _ in range(hi - lo + 1):
        d = x & mask
        if d >= half:
            d -= 1 << width
        out.append(d)
        x = (x - d) >> width
    if x != 0:
        raise ArithmeticError("packed row has content outside its exponent window")
    return LaurentPoly(lo, tuple(out))


def _pochhammer_power(e: int, N: int) -> list[int]:
    """Coefficients of (q;q)_inf^e through q^N, for e >= 0."""
    base = [1] + [0] * N
    for _ in range(e):
        for j in range(1, N + 1):
            for n in range(N, j - 1, -1):
                base[n] -= base[n - j]
    return base


def expand_C(k: int, N: int, limit: int | None = None) -> BivariateSeries:
    """Exact expansion of C_k(zeta; q) through q^N by multiplying out the products."""
    if k < 1:
        raise ValueError("k must be a positive integer")
    if N < 0:
        raise ValueError("N must be nonnegative")
    limit = get_config().truncation_limit if limit is None else limit
    if N > limit:
        raise TruncationLimitError(f"N={N} exceeds truncation limit {limit}")

    if k <= 2:
        base = _pochhammer_power(2 - k, N)
    else:
        base = colored_partition_numbers(k - 2, N)

    # every intermediate coefficient is dominated by the zeta=1 majorant
    bound = colored_partition_numbers(abs(2 - k) + 2, N)[N]
    width = _signed_bits(bound)
    off = width * N
    rows = [c << off for c in base]
    for j in range(1, N + 1):
        for n in range(j, N + 1):
            rows[n] += rows[n - j] << width
        for n in range(j, N + 1):
            # exact: row n-j has no content below slot N-(n-j) >= 1
            rows[n] += rows[n - j] >> width
    terms = [_decode_row(rows[n], width, N, -n, n) for n in range(N + 1)]
    return BivariateSeries(N, terms)


# ---------------------------------------------------------------------------
# Lerch-sum route (k = 1)


def expand_C_lerch(N: int, k: int = 1) -> BivariateSeries:
    """C_1 through q^N from (1 - zeta)/(q)_inf * sum_n (-1)^n q^(n(n+1)/2) / (1 - zeta q^n).

    The n = 0 summand 1/(1 - zeta) cancels the prefactor and contributes 1.
    """
    if k != 1:
        raise ValueError("the Lerch representation is implemented for k = 1 only")
    if N < 0:
        raise ValueError("N must be nonnegative")
    # S = 1/(1 - zeta) + sum_{n>=1} (-1)^n q^{T_n} sum_r zeta^r q^{nr}
    #       - sum_{j>=1} (-1)^j q^{T_j} sum_r zeta^{-r-1} q^{jr}
    # (negative indices rewritten via 1/(1 - zeta q^-j) = -zeta^-1 q^j / (1 - zeta^-1 q^j))
    acc: list[dict[int, int]] = [dict() for _ in range(N + 1)]
    n = 1
    while n * (n + 1) // 2 <= N:
        tri = n * (n + 1) // 2
        sign = -1 if n % 2 else 1
        r = 0
        while tri + n * r <= N:
            e = tri + n * r
            acc[e][r] = acc[e].get(r, 0) + sign
            acc[e][-r - 1] = acc[e].get(-r - 1, 0) - sign
            r += 1
        n += 1
    one_minus_zeta = LaurentPoly(0, (1, -1))
    s_terms = [LaurentPoly.from_dict(d) * one_minus_zeta for d in acc]
    s_terms[0] = s_terms[0] + LaurentPoly.monomial(0)
    pn = [p(j) for j in range(N + 1)]
    terms = []
    for n in range(N + 1):
        t = LaurentPoly()
        for j in range(n + 1):
            if not s_terms[n - j].is_zero():
                t = t + s_terms[n - j] * pn[j]
        terms.append(t)
    return BivariateSeries(N, terms)


# ---------------------------------------------------------------------------
# coefficient cache


def _canonical_terms(series: BivariateSeries) -> list:
    return [[t.lo, list(t.coeffs)] for t in series.terms]


def _checksum(k: int, N: int, payload: list) -> str:
    blob = json.dumps([k, N, payload], separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def cache_path(cache_dir: str | os.PathLike, k: int, N: int) -> Path:
    return Path(cache_dir) / f"crank_k{k}_N{N}.v{CACHE_VERSION}.json.gz"


def save_series(series: BivariateSeries, k: int, cache_dir: str | os.PathLike) -> Path:
    payload = _canonical_terms(series)
    record = {
        "format": CACHE_FORMAT,
        "version": CACHE_VERSION,
        "k": k,
        "N": series.trunc,
        "checksum": _checksum(k, series.trunc, payload),
        "terms": payload,
    }
    path = cache_path(cache_dir, k, series.trunc)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + f".tmp{os.getpid()}")
    with gzip.open(tmp, "wt") as fh:
        json.dump(record, fh, separators=(",", ":"))
    os.replace(tmp, path)
    return path


def load_series(path: str | os.PathLike) -> tuple[int, BivariateSeries]:
    """Read a cache file, verifying header and checksum. Returns (k, series)."""
    try:
        with gzip.open(path, "rt") as fh:
            record = json.load(fh)
    except (OSError, ValueError) as exc:
        raise CacheError(f"unreadable cache file {path}: {exc}") from exc
    if record.get("format") != CACHE_FORMAT or record.get("version") != CACHE_VERSION:
        raise CacheError(f"{path}: unsupported format/version")
    k, N, payload = record["k"], record["N"], record["terms"]
    if _checksum(k, N, payload) != record.get("checksum"):
        raise CacheError(f"{path}: checksum mismatch")
    terms = [LaurentPoly(lo, tuple(c)) for lo, c in payload]
    return k, BivariateSeries(N, terms)


def _cached_files(cache_dir: Path, k: int) -> list[tuple[int, Path]]:
    if not cache_dir.is_dir():
        return []
    found = []
    for path in cache_dir.glob(f"crank_k{k}_N*.v{CACHE_VERSION}.json.gz"):
        try:
            N = int(path.name.split("_N")[1].split(".")[0])
        except (IndexError, ValueError):
            continue
        found.append((N, path))
    return sorted(found)


class SeriesCache:
    """In-memory plus optional on-disk store of C_k expansions.

    Readers may run concurrently; at most one expansion per k is computed at
    a time.
    """

    def __init__(self, cache_dir: str | os.PathLike | None = None, limit: int | None = None):
        self.cache_dir = Path(cache_dir) if cache_dir is not None else None
        self.limit = limit
        self._series: dict[int, BivariateSeries] = {}
        self._locks: dict[int, threading.Lock] = {}
        self._guard = threading.Lock()

    def _lock(self, k: int) -> threading.Lock:
        with self._guard:
            return self._locks.setdefault(k, threading.Lock())

    def _limit(self) -> int:
        return get_config().truncation_limit if self.limit is None else self.limit

    def series(self, k: int, n: int) -> BivariateSeries:
        """A cached expansion of C_k covering at least q^n."""
        s = self._series.get(k)
        if s is not None and s.trunc >= n:
            return s
        limit = self._limit()
        if n > limit:
            raise TruncationLimitError(f"n={n} exceeds truncation limit {limit}")
        with self._lock(k):
            s = self._series.get(k)
            if s is not None and s.trunc >= n:
                return s
            s = self._from_disk(k, n)
            if s is None:
                current = self._series[k].trunc if k in self._series else 0
                target = min(limit, max(n, 2 * current, 64))
                log.info("expanding C_%d through q^%d", k, target)
                s = expand_C(k, target, limit=limit)
                if self.cache_dir is not None:
                    save_series(s, k, self.cache_dir)
            self._series[k] = s
            return s

    def _from_disk(self, k: int, n: int) -> BivariateSeries | None:
        if self.cache_dir is None:
            return None
        for N, path in _cached_files(self.cache_dir, k):
            if N < n:
                continue
            try:
                kk, s = load_series(path)
            except CacheError as exc:
                log.warning("ignoring cache file: %s", exc)
                continue
            if kk == k:
                return s
        return None

    def info(self) -> list[dict]:
        rows = []
        if self.cache_dir is not None:
            for k in sorted({int(p.name.split("_k")[1].split("_")[0])
                             for p in self.cache_dir.glob("crank_k*_N*.json.gz")}):
                for N, path in _cached_files(self.cache_dir, k):
                    rows.append({"k": k, "N": N, "path": str(path), "bytes": path.stat().st_size})
        return rows

    def clear(self) -> int:
        self._series.clear()
        removed = 0
        if self.cache_dir is not None and self.cache_dir.is_dir():
            for path in self.cache_dir.glob("crank_k*_N*.json.gz"):
                path.unlink()
                removed += 1
        return removed


_default_cache: SeriesCache | None = None


def default_cache() -> SeriesCache:
    global _default_cache
    cfg = get_config()
    if _default_cache is None or _default_cache.cache_dir != cfg.cache_dir:
        _default_cache = SeriesCache(cfg.cache_dir)
    return _default_cache


def reset_default_cache() -> None:
    global _default_cache
    _default_cache = None


def M_exact(k: int, m: int, n: int, cache: SeriesCache | None = None) -> int:
    """Exact M_k(m, n)."""
    if n < 0:
        return 0
    if abs(m) > n:
        return 0
    cache = default_cache() if cache is None else cache
    return cache.series(k, n).coefficient(m, n)


@dataclass
class CrankTable:
    k: int
    maxN: int
    entries: dict[tuple[int, int], int]

    @classmethod
    def build(cls, k: int, maxN: int, m_range: tuple[int, int] | None = None,
              cache: SeriesCache | None = None) -> "CrankTable":
        cache = default_cache() if cache is None else cache
        s = cache.series(k, maxN)
        entries = {}
        for n in range(maxN + 1):
            term = s[n]
            lo, hi = (-n, n) if m_range is None else m_range
            for m in range(lo, hi + 1):
                entries[(m, n)] = term[m]
        return cls(k, maxN, entries)

    def __getitem__(self, key: tuple[int, int]) -> int:
        return self.entries.get(key, 0)

    def column_sum(self, n: int) -> int:
        return sum(v for (m, nn), v in self.entries.items() if nn == n)
