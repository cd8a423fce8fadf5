"""Scalar statistics: correlations, standardization, paired and group tests.

The estimators here are the building blocks of the analysis pipelines:
Pearson/biserial/polychoric correlations, z-scores, simple least squares,
the Wilcoxon signed-rank test with a common-language effect size and the
pooled two-sample t-test with Cohen's D.

Conventions, used consistently: the sample (n-1) standard deviation except
where a formula calls for the population form (noted), and two-sided
p-values throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats as sps
from scipy.optimize import minimize_scalar
from scipy.special import ndtr, ndtri, owens_t

from .errors import ContractError, DegenerateDataError

__all__ = [
    "Correlation",
    "TestResult",
    "ContingencyTable",
    "PolychoricEstimate",
    "bivariate_normal_cdf",
    "pearson",
    "biserial",
    "crosstab",
    "polychoric",
    "tetrachoric",
    "zscore",
    "ols_simple",
    "wilcoxon_signed_rank",
    "cles_paired",
    "t_test_ind",
]

RHO_BOUND = 0.999
_TINY = 1e-300


@dataclass(frozen=True)
class Correlation:
    """A correlation with its two-sided p-value."""

    r: float
    p_value: float
    n: int

    def __float__(self):
        return self.r


@dataclass(frozen=True)
class TestResult:
    """Statistic, two-sided p-value and an effect size (CLES or Cohen's D)."""

    statistic: float
    p_value: float
    effect_size: float
    n: int
    method: str

    def to_dict(self) -> dict:
        return {"statistic": self.statistic, "p_value": self.p_value,
                "effect_size": self.effect_size, "n": self.n, "method": self.method}


@dataclass
class ContingencyTable:
    """r x c cross-classification counts with ordered category labels."""

    counts: np.ndarray
    row_labels: list
    col_labels: list

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=float)
        if self.counts.ndim != 2:
            raise ContractError(f"counts must be 2-d, got shape {self.counts.shape}")
        if np.any(self.counts < 0):
            raise ContractError("counts must be non-negative")
        if self.counts.sum() < 1:
            raise DegenerateDataError("contingency table is empty")

    @classmethod
    def from_pairs(cls, x, y) -> "ContingencyTable":
        return crosstab(x, y)


def crosstab(x, y) -> ContingencyTable:
    """Cross-classify two discrete vectors over their observed categories."""
    x = np.asarray(x)
    y = np.asarray(y)
    if x.shape != y.shape or x.ndim != 1:
        raise ContractError("crosstab needs two equal-length vectors")
    xcats, xcodes = np.unique(x, return_inverse=True)
    ycats, ycodes = np.unique(y, return_inverse=True)
    counts = np.zeros((len(xcats), len(ycats)))
    np.add.at(counts, (xcodes, ycodes), 1)
    return ContingencyTable(counts, list(xcats), list(ycats))


# ---------------------------------------------------------------------------
# bivariate normal CDF


def bivariate_normal_cdf(h, k, rho):
    """P(X <= h, Y <= k) for a standard bivariate normal with correlation rho.

    Exact via Owen's T function; vectorized over broadcastable inputs and
    accurate to near machine precision. Infinite limits marginalize as
    expected.
    """
    h, k, rho = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (h, k, rho)))
    out = np.empty(h.shape)
    # infinite limits reduce to univariate margins
    neg_inf = (h == -np.inf) | (k == -np.inf)
    h_inf = np.isposinf(h) & ~neg_inf
    k_inf = np.isposinf(k) & ~neg_inf & ~h_inf
    finite = ~(neg_inf | h_inf | k_inf)
    out[neg_inf] = 0.0
    out[h_inf] = ndtr(k[h_inf])
    out[k_inf] = ndtr(h[k_inf])
    if np.any(finite):
        out[finite] = _bvn_finite(h[finite], k[finite], rho[finite])
    return float(out) if out.ndim == 0 else out


def _bvn_finite(h, k, rho):
    s2 = 1.0 - rho * rho
    out = np.empty(h.shape)

    # |rho| = 1 degenerates to perfectly (anti)dependent margins
    sing = s2 <= 0
    if np.any(sing):
        pos = sing & (rho > 0)
        out[pos] = ndtr(np.minimum(h[pos], k[pos]))
        neg = sing & (rho < 0)
        out[neg] = np.maximum(0.0, ndtr(h[neg]) + ndtr(k[neg]) - 1.0)

    gen = ~sing
    out[gen] = _bvn_owen(h[gen], k[gen], rho[gen])
    return out


def _bvn_owen(h, k, rho):
    """Owen's T identity for finite h, k and |rho| < 1 (arrays)."""
    s = np.sqrt(1.0 - rho * rho)
    with np.errstate(divide="ignore", invalid="ignore"):
        t1 = owens_t(h, (k - rho * h) / (h * s))
        t2 = owens_t(k, (h - rho * k) / (k * s))
    # at h = 0 the Owen argument diverges; T(0, +-inf) = +-1/4
    h0 = h == 0
    if h0.any():
        t1 = np.where(h0, 0.25 * np.sign(k), t1)
    k0 = k == 0
    if k0.any():
        t2 = np.where(k0, 0.25 * np.sign(h), t2)
    delta = np.where((h * k > 0) | ((h * k == 0) & (h + k >= 0)), 0.0, 0.5)
    val = 0.5 * (ndtr(h) + ndtr(k)) - t1 - t2 - delta
    both0 = h0 & k0
    if both0.any():
        val = np.where(both0, 0.25 + np.arcsin(rho) / (2.0 * np.pi), val)
    return np.clip(val, 0.0, 1.0)


def _bvn_point(h, k, rho, ndtr_h, ndtr_k):
    """Scalar Owen's T identity with precomputed margins (hot path)."""
    if rho == 0.0:
        return ndtr_h * ndtr_k
    s = math.sqrt(1.0 - rho * rho)
    if h == 0.0 and k == 0.0:
        return 0.25 + math.asin(rho) / (2.0 * math.pi)
    if h == 0.0:
        t1 = 0.25 if k > 0 else -0.25
    else:
        t1 = float(owens_t(h, (k - rho * h) / (h * s)))
    if k == 0.0:
        t2 = 0.25 if h > 0 else -0.25
    else:
        t2 = float(owens_t(k, (h - rho * k) / (k * s)))
    delta = 0.5 if (h * k < 0 or (h * k == 0 and h + k < 0)) else 0.0
    val = 0.5 * (ndtr_h + ndtr_k) - t1 - t2 - delta
    return min(max(val, 0.0), 1.0)


# ---------------------------------------------------------------------------
# correlations


def _as_vector(v, name):
    v = np.asarray(v, dtype=float)
    if v.ndim != 1:
        raise ContractError(f"{name} must be a 1-d vector")
    return v


def pearson(x, y) -> Correlation:
    """Sample Pearson correlation with its two-sided p (t transform)."""
    x = _as_vector(x, "x")
    y = _as_vector(y, "y")
    if x.shape != y.shape:
        raise ContractError(f"length mismatch: {x.shape[0]} vs {y.shape[0]}")
    n = x.shape[0]
    if n < 3:
        raise ContractError(f"need at least 3 pairs, got {n}")
    xc = x - x.mean()
    yc = y - y.mean()
    sx = math.sqrt(xc @ xc)
    sy = math.sqrt(yc @ yc)
    if sx == 0 or sy == 0:
        raise DegenerateDataError("pearson is undefined for constant input")
    r = float(np.clip((xc @ yc) / (sx * sy), -1.0, 1.0))
    if abs(r) == 1.0:
        p = 0.0
    else:
        t = r * math.sqrt((n - 2) / (1.0 - r * r))
        p = 2.0 * sps.t.sf(abs(t), n - 2)
    return Correlation(r, float(p), n)


def biserial(continuous, binary, point: bool = False) -> float:
    """Biserial correlation of a numeric score with a 0/1 variable.

    Assumes the binary variable dichotomizes a latent normal:

        r_b = (M1 - M0) / s * p * q / phi(ndtri(p))

    with p the proportion of ones and s the population-form SD of the
    score (the classical formula). ``point=True`` gives the plain
    point-biserial (the Pearson correlation with the 0/1 coding) instead.
    The result is clamped to [-1, 1].
    """
    y = _as_vector(continuous, "continuous")
    b = np.asarray(binary)
    if y.shape != b.shape:
        raise ContractError(f"length mismatch: {y.shape[0]} vs {b.shape[0]}")
    if not np.all((b == 0) | (b == 1)):
        raise ContractError("binary variable must contain only 0 and 1")
    p = float(b.mean())
    if p == 0.0 or p == 1.0:
        raise DegenerateDataError("binary variable has a single class")
    s = float(y.std())
    if s == 0:
        raise DegenerateDataError("score is constant")
    m1 = float(y[b == 1].mean())
    m0 = float(y[b == 0].mean())
    q = 1.0 - p
    if point:
        r = (m1 - m0) / s * math.sqrt(p * q)
    else:
        density = math.exp(-0.5 * ndtri(p) ** 2) / math.sqrt(2.0 * math.pi)
        r = (m1 - m0) / s * p * q / density
    return float(np.clip(r, -1.0, 1.0))


@dataclass(frozen=True)
class PolychoricEstimate:
    """Latent-correlation estimate with saturation/correction flags."""

    rho: float
    saturated: bool = False
    corrected: bool = False
    n: int = 0

    def __float__(self):
        return self.rho


def _margin_thresholds(margin):
    """Interior normal quantiles of the cumulative margin, with inf bounds."""
    cum = np.cumsum(margin) / margin.sum()
    inner = ndtri(np.clip(cum[:-1], 1e-12, 1 - 1e-12))
    return np.concatenate(([-np.inf], inner, [np.inf]))


def _fit_rho(counts, tol):
    a = _margin_thresholds(counts.sum(axis=1))
    b = _margin_thresholds(counts.sum(axis=0))

    if counts.shape == (2, 2):
        # 2x2 is the common case; one interior CDF point, pure scalars
        h, k = float(a[1]), float(b[1])
        nh, nk = float(ndtr(h)), float(ndtr(k))
        cells = tuple(float(v) for v in counts.ravel())

        def nll(rho):
            p11 = _bvn_point(h, k, float(rho), nh, nk)
            total = 0.0
            for count, prob in zip(cells, (p11, nh - p11, nk - p11, 1.0 - nh - nk + p11)):
                if count:
                    total -= count * math.log(prob if prob > _TINY else _TINY)
            return total
    else:
        r, c = counts.shape
        margin_a = ndtr(a)  # includes the 0/1 boundary rows
        margin_b = ndtr(b)
        hgrid, kgrid = np.meshgrid(a[1:-1], b[1:-1], indexing="ij")
        hflat, kflat = hgrid.ravel(), kgrid.ravel()
        observed = counts > 0
        n_observed = counts[observed]

        def nll(rho):
            grid = np.empty((r + 1, c + 1))
            grid[0, :] = 0.0
            grid[:, 0] = 0.0
            grid[-1, :] = margin_b
            grid[:, -1] = margin_a
            interior = _bvn_owen(hflat, kflat, np.broadcast_to(float(rho), hflat.shape))
            grid[1:-1, 1:-1] = interior.reshape(r - 1, c - 1)
            cell = grid[1:, 1:] - grid[:-1, 1:] - grid[1:, :-1] + grid[:-1, :-1]
            return -float(np.sum(n_observed * np.log(np.maximum(cell[observed], _TINY))))

    res = minimize_scalar(nll, bounds=(-RHO_BOUND, RHO_BOUND), method="bounded",
                          options={"xatol": tol})
    return float(res.x)


def polychoric(table, tol: float = 1e-6) -> PolychoricEstimate:
    """Two-step polychoric correlation from a cross-table of ordinal counts.

    Step 1 fixes the latent thresholds at the normal quantiles of the
    cumulative margins; step 2 maximizes the bivariate-normal cell-probability
    likelihood over rho by bounded derivative-free search on
    (-0.999, 0.999). The 2x2 case is the tetrachoric correlation.

    Tables whose estimate pins to the bound are clamped and flagged
    ``saturated``; if zero cells caused the pinning, they receive a +0.5
    continuity correction and the fit is rerun (``corrected``).

    Parameters
    ----------
    table : ContingencyTable or array-like
        Non-negative counts. Both margins need at least two nonempty
        categories and no all-zero row or column.
    tol : float
        Absolute tolerance of the rho search.
    """
    counts = np.asarray(table.counts if isinstance(table, ContingencyTable) else table,
                        dtype=float)
    if counts.ndim != 2:
        raise ContractError(f"table must be 2-d, got shape {counts.shape}")
    if np.any(counts < 0):
        raise ContractError("counts must be non-negative")
    row = counts.sum(axis=1)
    col = counts.sum(axis=0)
    if counts.shape[0] < 2 or counts.shape[1] < 2:
        raise DegenerateDataError(f"need >= 2 categories per margin, got {counts.shape}")
    if np.any(row == 0) or np.any(col == 0):
        raise DegenerateDataError("margin category with zero total")
    n = int(counts.sum())

    rho = _fit_rho(counts, tol)
    saturated = abs(rho) >= RHO_BOUND - 10 * tol
    corrected = False
    if saturated and np.any(counts == 0):
        adjusted = np.where(counts == 0, 0.5, counts)
        rho = _fit_rho(adjusted, tol)
        corrected = True
        saturated = abs(rho) >= RHO_BOUND - 10 * tol
    if saturated:
        rho = math.copysign(RHO_BOUND, rho)
    return PolychoricEstimate(rho, saturated, corrected, n)


def tetrachoric(table, tol: float = 1e-6) -> PolychoricEstimate:
    """Tetrachoric correlation: :func:`polychoric` on a 2x2 table."""
    counts = np.asarray(table.counts if isinstance(table, ContingencyTable) else table)
    if counts.shape != (2, 2):
        raise ContractError(f"tetrachoric needs a 2x2 table, got {counts.shape}")
    return polychoric(counts, tol)


# ---------------------------------------------------------------------------
# standardization and regression


def zscore(x) -> np.ndarray:
    """Center and scale to sample (n-1) SD one."""
    x = _as_vector(x, "x")
    if x.shape[0] < 2:
        raise ContractError(f"need at least 2 values, got {x.shape[0]}")
    s = x.std(ddof=1)
    if s == 0:
        raise DegenerateDataError("zscore is undefined for constant input")
    return (x - x.mean()) / s


class LinearFit(tuple):
    """(intercept, slope) pair with a predict helper."""

    __slots__ = ()

    def __new__(cls, intercept, slope):
        return super().__new__(cls, (float(intercept), float(slope)))

    @property
    def intercept(self):
        return self[0]

    @property
    def slope(self):
        return self[1]

    def predict(self, x):
        return self.intercept + self.slope * np.asarray(x, dtype=float)


def ols_simple(x, y) -> LinearFit:
    """Least-squares line y = intercept + slope * x."""
    x = _as_vector(x, "x")
    y = _as_vector(y, "y")
    if x.shape != y.shape:
        raise ContractError(f"length mismatch: {x.shape[0]} vs {y.shape[0]}")
    if x.shape[0] < 2:
        raise ContractError(f"need at least 2 points, got {x.shape[0]}")
    xc = x - x.mean()
    sxx = xc @ xc
    if sxx == 0:
        raise DegenerateDataError("ols is undefined for constant x")
    slope = (xc @ (y - y.mean())) / sxx
    return LinearFit(y.mean() - slope * x.mean(), slope)


# ---------------------------------------------------------------------------
# paired and group tests


def _signed_rank_pmf(doubled_ranks):
    """Counts of each doubled rank-sum over all 2**n sign assignments."""
    total = int(doubled_ranks.sum())
    counts = np.zeros(total + 1)
    counts[0] = 1.0
    for s in doubled_ranks:
        prev = counts
        counts = prev.copy()
        counts[s:] += prev[:-s]
    return counts / counts.sum()


def wilcoxon_signed_rank(a, b, exact_limit: int = 25) -> TestResult:
    """Wilcoxon matched-pairs signed-rank test.

    Zero differences are dropped and ties receive midranks. The statistic V
    is the sum of ranks of the positive differences. The two-sided p-value
    is exact (full sign-flip distribution, conditional on the observed
    ranks) for n <= ``exact_limit``; larger samples use the normal
    approximation with tie and continuity corrections. The attached effect
    size is :func:`cles_paired` of the inputs.
    """
    a = _as_vector(a, "a")
    b = _as_vector(b, "b")
    if a.shape != b.shape:
        raise ContractError(f"length mismatch: {a.shape[0]} vs {b.shape[0]}")
    effect = cles_paired(a, b)
    d = a - b
    d = d[d != 0]
    n = d.shape[0]
    if n == 0:
        raise DegenerateDataError("all paired differences are zero")
    ranks = sps.rankdata(np.abs(d))
    v = float(ranks[d > 0].sum())

    if n <= exact_limit:
        doubled = np.rint(2 * ranks).astype(int)
        pmf = _signed_rank_pmf(doubled)
        v2 = int(round(2 * v))
        p = 2.0 * min(pmf[: v2 + 1].sum(), pmf[v2:].sum())
        method = "wilcoxon-exact"
    else:
        mean = n * (n + 1) / 4.0
        _, tie_counts = np.unique(ranks, return_counts=True)
        var = n * (n + 1) * (2 * n + 1) / 24.0 - ((tie_counts**3 - tie_counts).sum()) / 48.0
        dev = v - mean
        z = (dev - 0.5 * np.sign(dev)) / math.sqrt(var)
        p = 2.0 * sps.norm.sf(abs(z))
        method = "wilcoxon-normal"
    return TestResult(v, float(min(p, 1.0)), effect, n, method)


def cles_paired(a, b) -> float:
    """Common-language effect size for paired data.

    The probability that the first argument is smaller than the second,
    with ties split: (#{a_i < b_i} + #{a_i = b_i} / 2) / n. When a and b
    are deviation scores this reads "chance that method a deviates less".
    """
    a = _as_vector(a, "a")
    b = _as_vector(b, "b")
    if a.shape != b.shape:
        raise ContractError(f"length mismatch: {a.shape[0]} vs {b.shape[0]}")
    if a.shape[0] == 0:
        raise ContractError("empty input")
    return float(((a < b).sum() + 0.5 * (a == b).sum()) / a.shape[0])


def t_test_ind(a, b) -> TestResult:
    """Pooled-variance two-sample t-test with Cohen's D as effect size."""
    a = _as_vector(a, "a")
    b = _as_vector(b, "b")
    na, nb = a.shape[0], b.shape[0]
    if na < 2 or nb < 2:
        raise ContractError(f"each group needs >= 2 values, got {na} and {nb}")
    df = na + nb - 2
    pooled_var = ((na - 1) * a.var(ddof=1) + (nb - 1) * b.var(ddof=1)) / df
    if pooled_var == 0:
        raise DegenerateDataError("pooled variance is zero")
    sp = math.sqrt(pooled_var)
    t = (a.mean() - b.mean()) / (sp * math.sqrt(1.0 / na + 1.0 / nb))
    p = 2.0 * sps.t.sf(abs(t), df)
    cohen_d = (a.mean() - b.mean()) / sp
    return TestResult(float(t), float(p), float(cohen_d), na + nb, "t-independent")
