"""Short-cycle counts of configuration multigraphs and Monte Carlo checks of their Poisson limits.

Cycle convention: X_1 counts loops, X_2 counts unordered pairs of parallel
edges (C(m, 2) per cell pair of multiplicity m), and X_j for j >= 3 counts
edge sets forming a cycle through j distinct cells, so parallel edges give
distinct cycles.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import stats

from . import kernels, moments
from .orientations import count_orientations_fast_kernel
from .pairing import Multigraph, Pairing, all_partners_array, sample_pairing

MAX_CYCLE_LENGTH = 12
# below this many cells the Poisson limit is not a meaningful target
ASYMPTOTIC_MIN_N = 100


@dataclass(frozen=True)
class CycleCensus:
    counts: dict

    def __getitem__(self, j):
        return self.counts.get(j, 0)


def _padded_neighbors(g: Multigraph) -> np.ndarray:
    deg = max((len(a) for a in g.adjacency), default=0)
    nbr = np.full((g.n, max(deg, 1)), -1, dtype=np.int64)
    for v, adj in enumerate(g.adjacency):
        for k, (w, _) in enumerate(adj):
            nbr[v, k] = w
    return nbr


def _check_jmax(j_max):
    if not 1 <= j_max <= MAX_CYCLE_LENGTH:
        raise ValueError(f"j_max must be in 1..{MAX_CYCLE_LENGTH}")


def count_cycles(g: Multigraph, j_max: int, backend=None) -> CycleCensus:
    _check_jmax(j_max)
    c = kernels.cycle_census(_padded_neighbors(g), j_max, backend=backend)
    return CycleCensus({j: int(c[j]) for j in range(1, j_max + 1)})


def census_array(p: Pairing, j_max: int, backend=None) -> np.ndarray:
    """Cycle counts ``X_1..X_jmax`` of a configuration, straight from its neighbour table."""
    _check_jmax(j_max)
    return kernels.cycle_census(p.neighbor_cells(), j_max, backend=backend)[1:]


def _replicate_block(n, d, j_max, seed, reps, threads, backend):
    def one(r):
        return census_array(sample_pairing(n, d, seed, replicate=r, backend=backend), j_max, backend)

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(one, range(reps)))
    else:
        rows = [one(r) for r in range(reps)]
    return np.array(rows, dtype=np.int64).reshape(reps, j_max)


def cycle_samples(n, d, reps, j_max, seed, threads=None, backend=None) -> np.ndarray:
    """``(reps, j_max)`` array of cycle counts; row ``r`` uses the draw stream ``(seed, r)``."""
    if reps < 1:
        raise ValueError("reps must be at least 1")
    return _replicate_block(n, d, j_max, seed, reps, threads, backend)


def exhaustive_cycle_counts(n, d, j_max, backend=None) -> np.ndarray:
    rows = [kernels.cycle_census((row // d).reshape(n, d), j_max, backend=backend)[1:]
            for row in all_partners_array(n, d)]
    return np.array(rows, dtype=np.int64)


def lambda_theory(j: int, d: int = 4) -> float:
    return (d - 1) ** j / (2 * j)


def monte_carlo_cycle_means(n, d, reps, j_max, seed, threads=None, backend=None) -> list[dict]:
    """Per-j sample mean, standard error and dispersion of X_j.

    ``reps="all"`` averages exactly over every configuration (desk scale only);
    the mean is then also returned as a :class:`Fraction`.
    """
    if reps == "all":
        x = exhaustive_cycle_counts(n, d, j_max, backend=backend)
        out = []
        for j in range(1, j_max + 1):
            col = x[:, j - 1]
            out.append({"j": j, "lambda_theory": lambda_theory(j, d), "mean": float(col.mean()),
                        "mean_exact": Fraction(int(col.sum()), len(col)), "stderr": 0.0,
                        "dispersion": _dispersion(col)})
        return out
    x = cycle_samples(n, d, reps, j_max, seed, threads=threads, backend=backend)
    out = []
    for j in range(1, j_max + 1):
        col = x[:, j - 1].astype(float)
        sd = col.std(ddof=1) if reps > 1 else math.nan
        out.append({"j": j, "lambda_theory": lambda_theory(j, d), "mean": float(col.mean()),
                    "stderr": float(sd / math.sqrt(reps)), "dispersion": _dispersion(col)})
    return out


def _dispersion(col):
    col = np.asarray(col, dtype=float)
    m = col.mean()
    if len(col) < 2 or m == 0:
        return math.nan
    return float(col.var(ddof=1) / m)


def falling_factorial_array(x: np.ndarray, ell: int) -> np.ndarray:
    out = np.ones_like(x, dtype=object)
    for i in range(ell):
        out = out * (x - i)
    return out


def joint_factorial_moment_estimate(n, ells, reps, seed, backend=None) -> dict:
    """Estimate of ``E[Y prod (X_i)_{l_i}] / E[Y]``.

    ``reps="all"`` enumerates every configuration and returns the exact rational.
    Otherwise the numerator is a Monte Carlo mean divided by the exact E[Y].
    """
    ells = list(ells)
    if not any(ells):
        return {"estimate": 1.0, "exact": Fraction(1), "stderr": 0.0, "reps": reps}
    j_max = max(i + 1 for i, l in enumerate(ells) if l)
    if reps == "all":
        partners = all_partners_array(n, 4)
        total = Fraction(0)
        for row in partners:
            p = Pairing(n, 4, row)
            y = count_orientations_fast_kernel(p, backend=backend)
            if y:
                x = census_array(p, j_max, backend)
                w = 1
                for i, l in enumerate(ells):
                    for t in range(l):
                        w *= int(x[i]) - t
                total += y * w
        exact = total / len(partners) / moments.expected_Y_exact(n)
        return {"estimate": float(exact), "exact": exact, "stderr": 0.0, "reps": len(partners)}
    vals = np.empty(reps, dtype=float)
    for r in range(reps):
        p = sample_pairing(n, 4, seed, replicate=r, backend=backend)
        y = count_orientations_fast_kernel(p, backend=backend)
        w = 0
        if y:
            x = census_array(p, j_max, backend)
            w = 1
            for i, l in enumerate(ells):
                for t in range(l):
                    w *= int(x[i]) - t
        vals[r] = y * w
    ey = float(moments.expected_Y_exact(n))
    return {"estimate": float(vals.mean() / ey), "stderr": float(vals.std(ddof=1) / math.sqrt(reps) / ey),
            "reps": reps}


def poisson_dispersion_test(n, d, reps, j, seed, j_max=None, threads=None, backend=None, level=0.997) -> dict:
    """Index of dispersion of X_j with a chi-square interval, plus pairwise correlations of X_1..X_jmax."""
    if reps < 100:
        raise ValueError("reps must be at least 100")
    j_max = max(j, j_max or j, 2)
    x = cycle_samples(n, d, reps, j_max, seed, threads=threads, backend=backend).astype(float)
    col = x[:, j - 1]
    disp = _dispersion(col)
    # under a Poisson null, (reps - 1) * D is approximately chi-square(reps - 1)
    alpha = 1 - level
    df = reps - 1
    lo = stats.chi2.ppf(alpha / 2, df) / df
    hi = stats.chi2.ppf(1 - alpha / 2, df) / df
    corr = {}
    for a in range(j_max):
        for b in range(a + 1, j_max):
            if x[:, a].std() > 0 and x[:, b].std() > 0:
                corr[f"{a + 1},{b + 1}"] = float(np.corrcoef(x[:, a], x[:, b])[0, 1])
            else:
                corr[f"{a + 1},{b + 1}"] = math.nan
    rep = {"n": n, "d": d, "j": j, "reps": reps, "mean": float(col.mean()), "dispersion": disp,
           "poisson_band": (float(lo), float(hi)), "correlations": corr,
           "correlation_band": 3 / math.sqrt(reps)}
    if n < ASYMPTOTIC_MIN_N:
        rep["status"] = "asymptotic regime not reached"
    else:
        ok = lo <= disp <= hi and all(abs(c) <= rep["correlation_band"] for c in corr.values() if c == c)
        rep["status"] = "pass" if ok else "fail"
    return rep
