import gzip
import json
from collections import Counter

import pytest
from hypothesis import given, strategies as st
from sympy.functions.combinatorial.numbers import partition as sympy_partition

from crankscope import exact_core
from crankscope.exact_core import (
    BivariateSeries, CacheError, CrankTable, EnumerationTooLarge, LaurentPoly, Partition,
    SeriesCache, TruncationLimitError, crank, crank_census, expand_C, expand_C_lerch,
    iter_partitions, p, p_colored, partitions_of,
)


def brute_partitions(n, largest=None):
    largest = n if largest is None else largest
    if n == 0:
        yield ()
        return
    for first in range(min(n, largest), 0, -1):
        for rest in brute_partitions(n - first, first):
            yield (first,) + rest


# --- partitions and the crank ---------------------------------------------

def test_partition_validation():
    assert Partition((3, 1, 1)).n == 5
    with pytest.raises(ValueError):
        Partition((1, 2))
    with pytest.raises(ValueError):
        Partition((2, 0))


def test_partitions_counts_match_sympy():
    for n in range(0, 21):
        assert len(partitions_of(n)) == int(sympy_partition(n))
    assert len(partitions_of(20)) == 627


def test_partitions_are_distinct_and_sum():
    parts = partitions_of(12)
    assert len({tuple(x) for x in parts}) == len(parts)
    assert all(sum(x) == 12 for x in parts)
    assert {tuple(x) for x in parts} == set(brute_partitions(12))


def test_enumeration_limit():
    with pytest.raises(EnumerationTooLarge):
        partitions_of(30, limit=20)


def test_crank_examples():
    assert crank((5,)) == 5
    assert crank((4, 2, 1, 1)) == -1  # two ones, one part larger than 2
    assert crank((1, 1, 1)) == -3
    assert crank((3, 1)) == 0
    assert crank_census(2) == {-2: 1, 2: 1}


@given(st.integers(min_value=2, max_value=18))
def test_census_symmetric(n):
    c = crank_census(n)
    assert all(c.get(m, 0) == c.get(-m, 0) for m in c)
    assert sum(c.values()) == p(n)


# --- partition numbers ---------------------------------------------------

def test_p_against_sympy():
    for n in list(range(60)) + [100, 500, 1000]:
        assert p(n) == int(sympy_partition(n))
    assert p(-3) == 0


def test_p_large_uses_exact_rademacher():
    assert p(25000) == int(sympy_partition(25000))


def test_p_colored_small():
    assert [p_colored(2, n) for n in range(4)] == [1, 2, 5, 10]
    assert p_colored(1, 10) == 42


@given(st.integers(min_value=0, max_value=60))
def test_p2_is_self_convolution(n):
    assert p_colored(2, n) == sum(p(j) * p(n - j) for j in range(n + 1))


def test_p3_convolution():
    for n in range(40):
        assert p_colored(3, n) == sum(p_colored(2, j) * p(n - j) for j in range(n + 1))


def test_p_colored_range_limit():
    with pytest.raises(ValueError):
        p_colored(2, exact_core.COLORED_MAX + 1)


# --- Laurent polynomials -------------------------------------------------

laurent = st.builds(LaurentPoly.from_dict,
                    st.dictionaries(st.integers(-6, 6), st.integers(-50, 50), max_size=6))


@given(laurent, laurent)
def test_laurent_mul_commutes(a, b):
    assert (a * b) == (b * a)


@given(laurent, laurent, laurent)
def test_laurent_distributive(a, b, c):
    assert a * (b + c) == a * b + a * c


@given(laurent, laurent)
def test_laurent_at_one_is_homomorphism(a, b):
    assert (a * b).at_one() == a.at_one() * b.at_one()
    assert (a + b).at_one() == a.at_one() + b.at_one()


@given(laurent)
def test_laurent_reflect_shift(a):
    assert a.reflect().reflect() == a
    assert a.shift(3)[5] == a[2]
    assert (a - a).is_zero()


def test_laurent_trimmed():
    x = LaurentPoly(-2, [0, 0, 3, 0])
    assert x.lo == 0 and x.to_dict() == {0: 3}


# --- the bivariate expansion ---------------------------------------------

def test_expand_matches_census():
    s = expand_C(1, 25)
    for n in range(2, 26):
        assert s[n].to_dict() == crank_census(n)


def test_expand_n1_anomaly():
    # the generating function differs from the census only at n = 1
    assert expand_C(1, 2)[1].to_dict() == {-1: 1, 0: -1, 1: 1}


def test_expand_matches_lerch():
    assert expand_C(1, 60) == expand_C_lerch(60)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_column_sums(k):
    s = expand_C(k, 60)
    assert [s[n].at_one() for n in range(61)] == [p_colored(k, n) for n in range(61)]


def test_expand_k2_small():
    s = expand_C(2, 3)
    assert [s[n].at_one() for n in range(4)] == [1, 2, 5, 10]
    assert s[0].to_dict() == {0: 1}


def test_truncation_error():
    s = expand_C(1, 10)
    with pytest.raises(TruncationLimitError):
        s[11]
    with pytest.raises(TruncationLimitError):
        expand_C(1, 50, limit=20)


def test_symmetry_in_m():
    s = expand_C(2, 40)
    for n in range(41):
        row = s[n]
        assert all(row[m] == row[-m] for m in range(n + 1))


# --- cache ---------------------------------------------------------------

def test_cache_roundtrip(tmp_path):
    s = expand_C(1, 30)
    path = exact_core.save_series(s, 1, tmp_path)
    k, back = exact_core.load_series(path)
    assert k == 1 and back == s


def test_cache_rejects_bad_checksum(tmp_path):
    path = exact_core.save_series(expand_C(1, 20), 1, tmp_path)
    with gzip.open(path, "rt") as fh:
        doc = json.load(fh)
    doc["terms"][5][1][0] += 1
    with gzip.open(path, "wt") as fh:
        json.dump(doc, fh)
    with pytest.raises(CacheError):
        exact_core.load_series(path)


def test_series_cache_disk_reuse(tmp_path):
    c1 = SeriesCache(tmp_path, limit=200)
    s = c1.series(1, 40)
    assert s.trunc >= 40
    assert c1.info()
    c2 = SeriesCache(tmp_path, limit=200)
    assert c2.series(1, 40) == s
    assert c1.clear() >= 1
    assert c1.info() == []


def test_series_cache_limit(tmp_path):
    with pytest.raises(TruncationLimitError):
        SeriesCache(tmp_path, limit=30).series(1, 31)


def test_crank_table(series_cache):
    t = CrankTable.build(1, 50, cache=series_cache)
    assert t[(0, 50)] == 8626 and t[(1, 50)] == 8541
    assert t.column_sum(50) == p(50)
    assert exact_core.M_exact(1, 60, 50, cache=series_cache) == 0
