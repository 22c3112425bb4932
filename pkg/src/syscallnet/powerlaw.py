"""Discrete power-law fitting and bootstrap goodness of fit.

The tail cutoff ``x_min`` is chosen by minimizing the Kolmogorov-Smirnov
distance between the empirical tail and the fitted model; the exponent is the
exact discrete maximum-likelihood estimate, whose normalizer is the Hurwitz
zeta function.  Plausibility is judged with a semi-parametric bootstrap: the
tail of each synthetic sample is drawn from the fitted model, the body is
resampled from the observations below ``x_min``, and every synthetic sample is
refit with the full procedure.

All candidate cutoffs are evaluated at once, so the Hurwitz zeta function
(and its derivative in the exponent) is implemented here in vectorized form:
direct summation below ``_Q0`` and an Euler-Maclaurin tail above it.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .errors import InsufficientTail

MIN_TAIL = 10
PLAUSIBLE = 0.1

_Q0 = 40
_LNK = np.log(np.arange(1, _Q0, dtype=float))  # ln k for k = 1 .. _Q0-1
# B_2j / (2j)! for j = 1..6
_EM = (1.0 / 12.0, -1.0 / 720.0, 1.0 / 30240.0, -1.0 / 1209600.0, 1.0 / 47900160.0,
       -691.0 / 1307674368000.0)


def _em_tail(s, a, deriv=False):
    """Euler-Maclaurin approximation of zeta(s, a) for a >= _Q0, in Horner form.

    Uses three correction terms when every exponent is below 8 (relative
    error < 1e-10 at a = 40) and six otherwise.
    """
    nterms = 3 if s.size and s.max() < 8.0 else len(_EM)
    lna = np.log(a)
    a_s = np.exp(-s * lna)  # a^-s
    t = 1.0 / (a * a)
    p = np.full_like(s, _EM[nterms - 1])
    dp = np.zeros_like(s) if deriv else None
    for j in range(nterms, 1, -1):
        lo = s + (2 * j - 3)
        hi = s + (2 * j - 2)
        if deriv:
            dp = t * ((lo + hi) * p + lo * hi * dp)
        p = _EM[j - 2] + t * lo * hi * p
    sm1 = s - 1.0
    w = a / sm1 + 0.5 + s * p / a
    z = a_s * w
    if not deriv:
        return z
    dw = -a / (sm1 * sm1) + (p + s * dp) / a
    return z, a_s * (dw - lna * w)


def hurwitz_zeta(s, q, deriv=False):
    """zeta(s, q) = sum_{k>=0} (q+k)^-s for s > 1 and integer q >= 1.

    With ``deriv=True`` also returns the derivative with respect to ``s``.
    """
    s = np.asarray(s, dtype=float)
    q = np.asarray(q, dtype=float)
    s, q = np.broadcast_arrays(s, q)
    s = np.ascontiguousarray(s).ravel()
    q = q.ravel()
    r = _em_tail(s, np.maximum(q, float(_Q0)), deriv)
    out, dout = r if deriv else (r, None)
    small = np.flatnonzero(q < _Q0)
    if small.size:
        ss, qs = s[small], q[small]
        terms = np.exp(-ss[:, None] * _LNK[None, :])
        terms[np.arange(1, _Q0)[None, :] < qs[:, None]] = 0.0
        out[small] += terms.sum(axis=1)
        if deriv:
            dout[small] -= terms @ _LNK
    return (out, dout) if deriv else out


@dataclass
class PowerLawFit:
    x_min: int
    alpha: float
    p_of_xmin: float
    ks_statistic: float
    n_tail: int
    n: int
    p_value: float | None = None
    n_bootstrap: int | None = None
    seed: int | None = None

    @property
    def plausible(self) -> bool | None:
        if self.p_value is None:
            return None
        return self.p_value > PLAUSIBLE

    def to_dict(self) -> dict:
        d = asdict(self)
        d["ks"] = d.pop("ks_statistic")
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)


def _mle_alpha(x0, n, sumlog, tol=1e-10, max_iter=50):
    """Discrete MLE of the exponent for each candidate cutoff (vectorized secant).

    Solves  -n * zeta'(a, x0) / zeta(a, x0) = sumlog  for a > 1.
    """
    x0 = np.asarray(x0, float)
    mean_log = sumlog / n

    def score(a):
        z, dz = hurwitz_zeta(a, x0, deriv=True)
        return -dz / z - mean_log  # model E[ln X] minus sample mean; decreasing in a

    a0 = 1.0 + n / (sumlog - n * np.log(x0 - 0.5))
    a0 = np.clip(a0, 1.05, 50.0)
    a1 = a0 + 0.01
    f0, f1 = score(a0), score(a1)
    for _ in range(max_iter):
        denom = f1 - f0
        step = np.where(denom != 0, f1 * (a1 - a0) / np.where(denom != 0, denom, 1.0), 0.0)
        a2 = a1 - step
        a2 = np.where(a2 <= 1.0, 1.0 + 0.5 * (a1 - 1.0), a2)
        a0, f0 = a1, f1
        a1 = a2
        if np.all(np.abs(step) < tol * np.maximum(1.0, a1)):
            break
        f1 = score(a1)
    return a1


def _zeta_grid(alphas, q):
    """zeta(alphas[j], q[i]) as a (len(alphas), len(q)) array for integer q >= 1."""
    s = alphas[:, None]
    a = np.maximum(q, float(_Q0))
    nterms = 3 if alphas.max() < 8.0 else len(_EM)
    inv_a = (1.0 / a)[None, :]
    t = inv_a * inv_a
    p = _EM[nterms - 1]
    for j in range(nterms, 1, -1):
        p = _EM[j - 2] + t * ((s + (2 * j - 3)) * (s + (2 * j - 2)) * p)
    w = np.multiply.outer(1.0 / (alphas - 1.0), a)
    w += 0.5
    w += s * p * inv_a
    z = np.exp(np.multiply.outer(-alphas, np.log(a)))
    z *= w
    small = np.flatnonzero(q < _Q0)
    if small.size:
        # zeta(s, q) = zeta(s, _Q0) + sum_{k=q}^{_Q0-1} k^-s
        terms = np.exp(-s * _LNK[None, :])
        tails = np.cumsum(terms[:, ::-1], axis=1)[:, ::-1]  # tails[:, k-1] = sum_{i>=k} i^-s
        z[:, small] += tails[:, q[small].astype(np.int64) - 1]
    return z


def _ks_all(uniq, counts, starts, alphas):
    """KS distance of each candidate cutoff ``uniq[starts[j]]`` with exponent ``alphas[j]``.

    Works on complementary CDFs.  The empirical and model distributions are
    both step functions on the integers, so the supremum is attained at an
    observed value ``u`` or just before it.
    """
    u = uniq.astype(float)
    rows = np.arange(len(starts))
    z_after = _zeta_grid(alphas, u + 1.0)                   # zeta(a, u+1)
    z_at = np.exp(np.multiply.outer(-alphas, np.log(u)))    # u^-a
    z_at += z_after                                         # zeta(a, u)
    inv_z0 = (1.0 / z_at[rows, starts])[:, None]

    tail_tot = np.cumsum(counts[::-1])[::-1]  # observations >= uniq[i]
    inv_n = (1.0 / tail_tot[starts])[:, None]
    # |P_emp(X > u) - P_model(X > u)| and the same with X >= u
    d1 = z_after * inv_z0
    d1 -= (tail_tot - counts)[None, :] * inv_n
    np.abs(d1, out=d1)
    d2 = z_at * inv_z0
    d2 -= tail_tot[None, :] * inv_n
    np.abs(d2, out=d2)
    np.maximum(d1, d2, out=d1)
    d1[np.arange(len(uniq))[None, :] < starts[:, None]] = 0.0
    return d1.max(axis=1)


def _prepare(sample):
    x = np.asarray(sample)
    if x.ndim != 1:
        raise ValueError("sample must be one dimensional")
    if x.size and (np.any(x < 1) or np.any(x != np.floor(x))):
        raise ValueError("power-law sample must hold integers >= 1")
    return x.astype(np.int64)


def fit_power_law(sample, x_min: int | None = None) -> PowerLawFit:
    """Fit a discrete power law to the tail of ``sample``.

    Parameters
    ----------
    sample : array of positive integers
    x_min : int, optional
        Fix the cutoff instead of scanning for the KS minimizer.

    Raises
    ------
    InsufficientTail
        When no admissible cutoff leaves at least 10 observations with at least
        two distinct values (a constant sample is rejected this way).
    """
    x = _prepare(sample)
    n = x.size
    uniq, counts = np.unique(x, return_counts=True)
    tail_tot = np.cumsum(counts[::-1])[::-1]
    # cutoffs leaving >= MIN_TAIL observations and more than one distinct value
    ok = (tail_tot >= MIN_TAIL) & (np.arange(len(uniq)) < len(uniq) - 1)
    if x_min is not None:
        ok &= uniq == x_min
    starts = np.flatnonzero(ok)
    if starts.size == 0:
        raise InsufficientTail(
            f"no cutoff leaves {MIN_TAIL} observations with distinct values (n={n})"
        )
    logs = np.log(uniq.astype(float)) * counts
    sumlog = np.cumsum(logs[::-1])[::-1][starts]
    n_tail = tail_tot[starts]
    x0 = uniq[starts]
    alphas = _mle_alpha(x0, n_tail.astype(float), sumlog)
    ks = _ks_all(uniq, counts, starts, alphas)
    best = int(np.argmin(ks))
    return PowerLawFit(
        x_min=int(x0[best]),
        alpha=float(alphas[best]),
        p_of_xmin=float(counts[starts[best]] / n_tail[best]),
        ks_statistic=float(ks[best]),
        n_tail=int(n_tail[best]),
        n=int(n),
    )


_MAX_DRAW = float(2**53)


class _TailSampler:
    """Inverse-CDF sampler for a discrete power law with a lookup table.

    Values beyond the table (total mass below ~1e-6 for typical exponents) are
    drawn from the continuous approximation conditioned on exceeding it.
    """

    def __init__(self, alpha: float, x_min: int, table_size: int = 100_000):
        self.alpha = alpha
        self.x_min = int(x_min)
        k = np.arange(self.x_min, self.x_min + table_size, dtype=float)
        pmf = np.exp(-alpha * np.log(k)) / float(hurwitz_zeta(alpha, self.x_min)[0])
        self.cdf = np.cumsum(pmf)
        self.x_end = self.x_min + table_size

    def __call__(self, size: int, rng: np.random.Generator) -> np.ndarray:
        r = rng.random(size)
        out = self.x_min + np.searchsorted(self.cdf, r, side="right")
        far = out >= self.x_end
        if far.any():
            # continuous approximation past the table, conditioned on X >= x_end
            r2 = rng.random(int(far.sum()))
            with np.errstate(over="ignore"):
                v = np.floor((self.x_end - 0.5) * (1.0 - r2) ** (-1.0 / (self.alpha - 1.0)) + 0.5)
            # exponents near 1 can overflow; cap where float64 still holds exact integers
            out[far] = np.minimum(v, _MAX_DRAW)
        return out.astype(np.int64)


def sample_power_law(alpha: float, x_min: int, size: int, rng) -> np.ndarray:
    """Draw ``size`` values from a discrete power law on ``[x_min, inf)``."""
    rng = np.random.default_rng(rng)
    return _TailSampler(alpha, x_min)(size, rng)


def _replicate_ks(args):
    seed, indices, alpha, x_min, n, n_tail, body = args
    sampler = _TailSampler(alpha, x_min)
    body = np.asarray(body, dtype=np.int64)
    out = []
    for i in indices:
        rng = np.random.default_rng([seed, i])
        k = rng.binomial(n, n_tail / n) if body.size else n
        synth = np.concatenate([sampler(k, rng), rng.choice(body, n - k)]) if body.size else sampler(n, rng)
        try:
            out.append(fit_power_law(synth).ks_statistic)
        except InsufficientTail:
            out.append(math.nan)
    return out


def bootstrap_ks(fit: PowerLawFit, sample, n_bootstrap: int = 1000, seed: int = 0,
                 jobs: int = 1) -> np.ndarray:
    """KS statistics of ``n_bootstrap`` synthetic samples, replicate ``i`` seeded by ``(seed, i)``.

    Replicates that cannot be refit are returned as NaN.
    """
    x = _prepare(sample)
    body = x[x < fit.x_min]
    n_tail = int(np.sum(x >= fit.x_min))
    idx = list(range(n_bootstrap))
    if jobs <= 1:
        return np.array(_replicate_ks((seed, idx, fit.alpha, fit.x_min, x.size, n_tail, body)))
    chunks = [idx[i::jobs] for i in range(jobs)]
    args = [(seed, c, fit.alpha, fit.x_min, x.size, n_tail, body) for c in chunks]
    out = np.empty(n_bootstrap)
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        for c, res in zip(chunks, pool.map(_replicate_ks, args)):
            out[c] = res
    return out


def p_value_from_ensemble(observed_ks: float, synthetic_ks) -> float:
    """Fraction of valid synthetic KS statistics at least as large as the observed one."""
    s = np.asarray(synthetic_ks, float)
    s = s[~np.isnan(s)]
    if s.size == 0:
        return math.nan
    return float(np.count_nonzero(s >= observed_ks) / s.size)


def goodness_of_fit(fit: PowerLawFit, sample, n_bootstrap: int = 1000, seed: int = 0,
                    jobs: int = 1) -> float:
    if n_bootstrap < 100:
        raise ValueError("n_bootstrap must be at least 100")
    ks = bootstrap_ks(fit, sample, n_bootstrap, seed, jobs)
    return p_value_from_ensemble(fit.ks_statistic, ks)


def power_law_test(sample, n_bootstrap: int = 1000, seed: int = 0, jobs: int = 1) -> PowerLawFit:
    """Fit, then attach the bootstrap p-value, bootstrap count and seed."""
    fit = fit_power_law(sample)
    fit.p_value = goodness_of_fit(fit, sample, n_bootstrap, seed, jobs)
    fit.n_bootstrap = n_bootstrap
    fit.seed = seed
    return fit


def degree_sample(graphs, direction: str = "in", weighted: bool = False) -> np.ndarray:
    """Positive node degrees pooled over one or more graphs, in graph then node order.

    Zero-degree nodes are left out: a power law is only defined on ``x >= 1``.
    """
    from .callgraph import SystemCallGraph
    from .metrics import degrees

    if isinstance(graphs, SystemCallGraph):
        graphs = [graphs]
    vals = [d for g in graphs for d in degrees(g, direction, weighted).values() if d > 0]
    return np.array(vals, dtype=np.int64)
