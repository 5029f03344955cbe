import json
import warnings

import mpmath
import pytest
from mpmath import mp

from crankscope import asymptotics as asy
from crankscope import exact_core


def test_beta_and_range():
    par = asy.AsymptoticParams(1, 600, 0)
    assert abs(par.beta - mp.pi / 60) < 1e-60
    assert abs(par.range_bound - mpmath.sqrt(600) * mpmath.log(600) / (mp.pi * mpmath.sqrt(6))) < 1e-60
    assert par.in_range
    assert not asy.AsymptoticParams(1, 100, 50).in_range
    with pytest.raises(ValueError):
        asy.AsymptoticParams(0, 10, 0)


def test_main_term_value():
    mt = asy.main_term(1, 0, 1000)
    ref = mp.pi / mpmath.sqrt(6000) / 4 * exact_core.p(1000)
    assert abs(mt - ref) / ref < 1e-60
    assert mpmath.nstr(mt, 10) == "2.439699707e+29"


def test_main_term_even_in_m():
    assert asy.main_term(2, 3, 200) == asy.main_term(2, -3, 200)


def test_main_term_out_of_range_warns():
    with pytest.warns(asy.OutOfRangeWarning):
        asy.main_term(1, 40, 50)


@pytest.mark.parametrize("k,n,tol", [(1, 1000, 0.02), (1, 100, 0.05), (2, 50, 0.2)])
def test_pk_asymptotic(k, n, tol):
    ratio = asy.pk_asymptotic(k, n) / exact_core.p_colored(k, n)
    assert abs(ratio - 1) < tol


def test_pk_asymptotic_improves():
    errs = [abs(asy.pk_asymptotic(1, n) / exact_core.p(n) - 1) for n in (100, 400, 1000)]
    assert errs[0] > errs[1] > errs[2]


def test_round3():
    assert asy.round3(mp.mpf("0.9125")) == 0.912
    assert asy.round3(mp.mpf("0.9135")) == 0.914
    assert asy.round3(mp.mpf("0.98549")) == 0.985


def test_table_row_and_formats(series_cache):
    rows = asy.ratio_table(1, [20, 50], [0, 1], cache=series_cache)
    assert [(r.n, r.m, r.M_exact) for r in rows] == [(20, 0, 41), (20, 1, 38), (50, 0, 8626), (50, 1, 8541)]
    assert [r.ratio for r in rows] == [0.912, 0.863, 0.931, 0.930]
    assert ",0.930," in asy.rows_to_csv(rows)
    text = asy.rows_to_csv(rows)
    assert text.splitlines()[0] == ",".join(asy.COLUMNS)
    recs = json.loads(asy.rows_to_json(rows))
    assert recs[2]["M_exact"] == 8626 and set(recs[0]) == set(asy.COLUMNS)
    assert asy.rows_to_csv(rows) == text  # deterministic


def test_table_row_beyond_truncation(series_cache):
    small = exact_core.SeriesCache(None, limit=100)
    row = asy.table_row(1, 200, 0, cache=small, allow_missing=True)
    assert row.M_exact is None and row.ratio is None
    with pytest.raises(exact_core.TruncationLimitError):
        asy.table_row(1, 200, 0, cache=small)


def test_mass_within_bound_small(series_cache):
    # bound at n=2 is below 1 and M(0,2) = 0
    count, frac = asy.mass_within_bound(2, cache=series_cache)
    assert count == 0 and frac == 0


def test_mass_fraction_tracks_sech2(series_cache):
    grid = [50, 100, 200, 500, 1000]
    fracs = [asy.mass_within_bound(n, cache=series_cache)[1] for n in grid]
    assert all(b >= a - 0.01 for a, b in zip(fracs, fracs[1:]))
    for n, f in zip(grid[1:], fracs[1:]):
        assert abs(f - asy.sech2_mass_fraction(n)) < 0.05
    assert abs(fracs[1] - mp.mpf("0.3246")) < 1e-3
    assert abs(fracs[-1] - mp.mpf("0.5161")) < 1e-3


def test_mass_count_is_exact(series_cache):
    n = 60
    count, _ = asy.mass_within_bound(n, cache=series_cache)
    bound = asy.AsymptoticParams(1, n, 0).range_bound
    brute = sum(v for m, v in exact_core.crank_census(n).items() if abs(m) <= bound)
    assert count == brute


def test_error_exponent_requires_m(series_cache):
    with pytest.raises(ValueError):
        asy.error_exponent_check(1, [100], 0, cache=series_cache)
    raw = asy.raw_error(1, [100, 200], 0, cache=series_cache)
    assert raw[1][1] < raw[0][1]


def test_reference_table_partial(series_cache):
    checks = asy.verify_reference_table(50, cache=series_cache)
    assert len(checks) == 12 and all(c.ok for c in checks)


def test_printed_rendering():
    assert asy._as_printed(mp.mpf("32282434922222222222"), "3.228743492e19") == "3.228243492e19"
    assert asy._as_printed(mp.mpf("44.95"), "45") == "45"
