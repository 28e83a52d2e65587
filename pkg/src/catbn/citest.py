"""Pearson chi-squared and G-squared (conditional) independence tests."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import special, stats

from .dataset import ContingencyTable, DataError, Dataset, joint_codes

__all__ = [
    "TestResult",
    "CiConfig",
    "CITester",
    "chi_squared",
    "g_squared",
    "chi2_sf",
    "independent",
    "TESTS",
]


@dataclass(frozen=True)
class TestResult:
    """Outcome of one independence test."""

    __test__ = False  # keep pytest from collecting this class

    statistic: float
    dof: int
    p_value: float
    n: int = 0

    @property
    def association(self) -> float:
        """``-log p``: a dependence strength comparable across degrees of freedom."""
        if self.dof <= 0:
            return 0.0
        return float(-stats.chi2.logsf(self.statistic, self.dof))


def chi2_sf(x: float, dof: int) -> float:
    """Upper tail of the chi-squared distribution, ``Q(dof/2, x/2)``."""
    if x < 0:
        raise ValueError("statistic must be non-negative")
    if dof <= 0:
        raise ValueError("degrees of freedom must be positive")
    if x == 0:
        return 1.0
    return float(special.gammaincc(dof / 2.0, x / 2.0))


def _as_strata(t) -> np.ndarray:
    """Return counts shaped ``(strata, rows, cols)``.

    A ContingencyTable is read with the child as the row variable, the first
    conditioning variable as the column variable and the rest as strata.
    """
    if isinstance(t, ContingencyTable):
        if not t.conditioning:
            raise ValueError("need at least one conditioning variable to form a 2-way table")
        r, c, *zc = t.cardinalities
        nz = int(np.prod(zc)) if zc else 1
        # counts[k, u] with u row-major over (y, z...)
        arr = t.counts.reshape(r, c, nz)
        return np.transpose(arr, (2, 0, 1)).astype(float)
    arr = np.asarray(t, dtype=float)
    if arr.ndim == 2:
        return arr[None, :, :]
    if arr.ndim == 3:
        return arr
    raise ValueError("table must be 2-D or 3-D")


def _expected(o: np.ndarray):
    n = o.sum(axis=(1, 2))
    rows = o.sum(axis=2)
    cols = o.sum(axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        e = rows[:, :, None] * cols[:, None, :] / n[:, None, None]
    e = np.where(n[:, None, None] > 0, e, 0.0)
    r_eff = (rows > 0).sum(axis=1)
    c_eff = (cols > 0).sum(axis=1)
    dof = int((np.clip(r_eff - 1, 0, None) * np.clip(c_eff - 1, 0, None)).sum())
    return e, dof, int(n.sum())


def chi_squared(t) -> TestResult:
    """Pearson chi-squared summed over strata.

    Cells with zero expected count are skipped and degenerate strata add no
    degrees of freedom.  With zero degrees of freedom the p-value is 1.
    """
    o = _as_strata(t)
    e, dof, n = _expected(o)
    mask = e > 0
    stat = float((((o - e) ** 2)[mask] / e[mask]).sum())
    p = chi2_sf(stat, dof) if dof > 0 else 1.0
    return TestResult(stat, dof, p, n)


def g_squared(t) -> TestResult:
    """Likelihood-ratio statistic ``2 * sum O ln(O/E)``; empty cells add 0."""
    o = _as_strata(t)
    e, dof, n = _expected(o)
    mask = o > 0
    stat = float(2.0 * (o[mask] * np.log(o[mask] / e[mask])).sum())
    stat = max(stat, 0.0)
    p = chi2_sf(stat, dof) if dof > 0 else 1.0
    return TestResult(stat, dof, p, n)


TESTS = {"chi2": chi_squared, "g2": g_squared}


@dataclass(frozen=True)
class CiConfig:
    """Settings shared by the constraint-based learners.

    ``min_obs_per_dof`` controls the small-sample rule: a test whose total
    count is below ``min_obs_per_dof * dof`` is declared undecidable and
    treated as independence.  Set it to 0 to disable the rule.
    """

    test: str = "chi2"
    alpha: float = 0.05
    max_cond_size: int | None = None
    min_obs_per_dof: float = 5.0

    def __post_init__(self):
        if self.test not in TESTS:
            raise ValueError(f"unknown test {self.test!r}; choose from {sorted(TESTS)}")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        if self.max_cond_size is not None and self.max_cond_size < 0:
            raise ValueError("max_cond_size must be non-negative")


def _strata_counts(d: Dataset, x: int, y: int, z: Sequence[int]) -> np.ndarray:
    card = d.cardinalities
    zc = [int(card[k]) for k in z]
    nz = int(np.prod(zc)) if zc else 1
    rx, ry = int(card[x]), int(card[y])
    rows, w = d.patterns()
    zi = joint_codes(rows[:, list(z)], zc)
    key = (zi * rx + rows[:, x]) * ry + rows[:, y]
    return np.bincount(key, weights=w, minlength=nz * rx * ry).astype(np.int64).reshape(nz, rx, ry)


class CITester:
    """Memoised independence tests bound to one complete dataset."""

    def __init__(self, d: Dataset, cfg: CiConfig | None = None):
        if d.has_missing():
            raise DataError("independence tests need a dataset without missing values")
        self.data = d
        self.cfg = cfg or CiConfig()
        self._fn = TESTS[self.cfg.test]
        self._memo: dict = {}
        self.n_tests = 0

    def result(self, x: int, y: int, z=()) -> TestResult:
        if x == y:
            raise ValueError("x and y must differ")
        z = tuple(sorted(set(z)))
        if x in z or y in z:
            raise ValueError("x and y must not be in the conditioning set")
        key = (min(x, y), max(x, y), z)
        res = self._memo.get(key)
        if res is None:
            self.n_tests += 1
            res = self._fn(_strata_counts(self.data, key[0], key[1], z))
            self._memo[key] = res
        return res

    def undecidable(self, res: TestResult) -> bool:
        return res.dof == 0 or res.n < self.cfg.min_obs_per_dof * res.dof

    def independent(self, x: int, y: int, z=()) -> bool:
        res = self.result(x, y, z)
        return self.undecidable(res) or res.p_value >= self.cfg.alpha

    def association(self, x: int, y: int, z=()) -> float:
        res = self.result(x, y, z)
        return 0.0 if self.undecidable(res) else res.association


def independent(d: Dataset, x, y, z=(), test: str = "chi2", alpha: float = 0.05, min_obs_per_dof: float = 5.0) -> bool:
    """True when the test fails to reject independence of ``x`` and ``y`` given ``z``.

    Undecidable tests (no degrees of freedom, or too few rows for the
    degrees of freedom) also count as independence.
    """
    xi, yi = d.index(x), d.index(y)
    zi = [d.index(v) for v in z]
    if xi == yi:
        raise ValueError("x and y must differ")
    if xi in zi or yi in zi:
        raise ValueError("x and y must not be in the conditioning set")
    if (d.codes[:, [xi, yi, *zi]] < 0).any():
        raise DataError("independence tests need complete data in the tested columns")
    cfg = CiConfig(test, alpha, None, min_obs_per_dof)
    res = TESTS[cfg.test](_strata_counts(d, xi, yi, zi))
    if res.dof == 0 or res.n < cfg.min_obs_per_dof * res.dof:
        return True
    return res.p_value >= alpha
