import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import chi2_contingency

import oracles
from catbn.citest import CiConfig, CITester, chi2_sf, chi_squared, g_squared, independent
from catbn.dataset import Dataset, contingency, read_csv_text
from catbn.graph import Variable


def test_two_by_two_values():
    t = [[20, 10], [10, 20]]
    chi = chi_squared(t)
    assert chi.statistic == pytest.approx(20 / 3, abs=1e-12)
    assert chi.dof == 1 and chi.n == 60
    assert chi.p_value == pytest.approx(0.0098, abs=1e-4)
    g2 = g_squared(t)
    assert g2.statistic == pytest.approx(2 * (40 * math.log(4 / 3) + 20 * math.log(2 / 3)), abs=1e-12)


@pytest.mark.parametrize("x,dof", [(0.5, 1), (3.8415, 1), (6.6349, 1), (10.0, 4), (25.0, 7), (1e-3, 3), (80.0, 30)])
def test_chi2_sf_three_ways(x, dof):
    high = float(mpmath.gammainc(dof / 2, x / 2, mpmath.inf, regularized=True))
    assert chi2_sf(x, dof) == pytest.approx(high, rel=1e-10)
    assert oracles.chi2_sf_oracle(x, dof) == pytest.approx(high, rel=1e-10)


def test_chi2_sf_domain():
    assert chi2_sf(0.0, 3) == 1.0
    with pytest.raises(ValueError):
        chi2_sf(-1.0, 1)
    with pytest.raises(ValueError):
        chi2_sf(1.0, 0)


@settings(max_examples=120, deadline=None)
@given(st.integers(0, 100_000), st.integers(1, 3), st.integers(2, 4), st.integers(2, 4))
def test_stratified_statistics_match_oracle(seed, strata, r, c):
    rng = np.random.default_rng(seed)
    tables = oracles.random_table(rng, (strata, r, c), high=12)
    tables[rng.random(tables.shape) < 0.3] = 0
    if strata > 1:
        tables[0] = 0  # an empty stratum contributes nothing
    chi = chi_squared(tables)
    stat, dof = oracles.chi2_stat_oracle(tables)
    assert chi.statistic == pytest.approx(stat, rel=1e-10, abs=1e-10)
    assert chi.dof == dof
    assert g_squared(tables).statistic == pytest.approx(oracles.g2_stat_oracle(tables), rel=1e-10, abs=1e-10)
    assert g_squared(tables).dof == dof


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 100_000))
def test_unstratified_matches_scipy(seed):
    rng = np.random.default_rng(seed)
    t = rng.integers(1, 40, size=(3, 4))
    stat, p, dof, _ = chi2_contingency(t, correction=False)
    res = chi_squared(t)
    assert res.statistic == pytest.approx(stat) and res.p_value == pytest.approx(p) and res.dof == dof
    stat, p, _, _ = chi2_contingency(t, correction=False, lambda_="log-likelihood")
    assert g_squared(t).statistic == pytest.approx(stat)


def test_empty_rows_reduce_dof():
    t = np.array([[[5, 5, 0], [3, 7, 0]], [[0, 0, 0], [0, 0, 0]]])
    res = chi_squared(t)
    assert res.dof == 1
    assert chi_squared([[4, 0], [6, 0]]).dof == 0
    assert chi_squared([[4, 0], [6, 0]]).p_value == 1.0


def test_contingency_table_orientation():
    d = read_csv_text("x,y,z\n0,0,0\n0,1,0\n1,1,1\n1,1,0\n0,0,1\n")
    t = contingency(d, "x", ["y", "z"])
    expected = np.zeros((2, 2, 2))  # (z, x, y)
    for x, y, z in d.codes:
        expected[z, x, y] += 1
    assert chi_squared(t).statistic == pytest.approx(chi_squared(expected).statistic)


def _dataset(rng, n, dependent):
    a = rng.integers(0, 2, size=n)
    b = np.where(rng.random(n) < 0.8, a, 1 - a) if dependent else rng.integers(0, 2, size=n)
    c = np.where(rng.random(n) < 0.8, b, 1 - b)
    return Dataset([Variable(v, ["0", "1"]) for v in "abc"], np.column_stack([a, b, c]))


def test_tester_decisions():
    rng = np.random.default_rng(0)
    d = _dataset(rng, 5000, dependent=True)
    t = CITester(d, CiConfig(alpha=0.01))
    assert not t.independent(0, 2)
    assert t.independent(0, 2, [1])
    assert t.association(0, 1) > t.association(0, 2) > 0
    before = t.n_tests
    t.result(2, 0)
    assert t.n_tests == before  # memoised irrespective of argument order
    assert independent(d, "a", "c", ["b"], test="g2", alpha=0.01)
    with pytest.raises(ValueError):
        t.result(0, 0)
    with pytest.raises(ValueError):
        t.result(0, 1, [1])


def test_undecidable_counts_as_independent():
    rng = np.random.default_rng(1)
    d = _dataset(rng, 12, dependent=True)
    t = CITester(d, CiConfig(min_obs_per_dof=20))
    assert t.independent(0, 1)
    assert t.association(0, 1) == 0.0


def test_config_validation():
    with pytest.raises(ValueError):
        CiConfig(test="fisher")
    with pytest.raises(ValueError):
        CiConfig(alpha=1.0)
    with pytest.raises(ValueError):
        CiConfig(max_cond_size=-1)


def test_tester_rejects_missing():
    with pytest.raises(ValueError):
        CITester(read_csv_text("a,b\n0,?\n1,1\n"))


def test_type_one_error_rate():
    # under independence the rejection rate is close to alpha
    rng = np.random.default_rng(7)
    rejections = 0
    for _ in range(400):
        d = _dataset(rng, 300, dependent=False)
        rejections += not CITester(d, CiConfig(alpha=0.05)).independent(0, 1)
    assert 0.02 <= rejections / 400 <= 0.09
