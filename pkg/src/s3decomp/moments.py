"""Exact and asymptotic moments of Y, the number of (3,0)-orientations in P(n, 4).

Exact values are :class:`fractions.Fraction`; asymptotic values are computed
in the log domain and only exponentiated when they fit in a double.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, asdict
from fractions import Fraction
from functools import lru_cache

import mpmath

SQRT_3_2 = math.sqrt(1.5)
HALF_LN_3_2 = 0.5 * math.log(1.5)


@lru_cache(maxsize=None)
def factorial(k: int) -> int:
    if k < 0:
        raise ValueError("factorial of a negative number")
    return math.factorial(k)


def binom(a: int, b: int) -> int:
    """``C(a, b)`` with the convention ``C(a, b) = 0`` for ``b < 0`` or ``b > a``."""
    if b < 0 or a < 0 or b > a:
        return 0
    return math.comb(a, b)


def falling(x: int, k: int) -> int:
    """Falling factorial ``x (x-1) ... (x-k+1)``."""
    out = 1
    for i in range(k):
        out *= x - i
    return out


def perfect_matchings(npoints: int) -> int:
    m, r = divmod(npoints, 2)
    if r:
        return 0
    return factorial(2 * m) // (factorial(m) * 2**m)


def _need_div3(n: int):
    if n % 3:
        raise ValueError(f"3 must divide n (got n = {n})")


def expected_Y_exact(n: int) -> Fraction:
    _need_div3(n)
    if n <= 0:
        raise ValueError("n must be positive")
    k = 2 * n // 3
    return Fraction(binom(n, k) * 4**k * factorial(2 * n), perfect_matchings(4 * n))


def log_expected_Y_asymptotic(n: int) -> float:
    return math.log(3 / math.sqrt(2)) + (n / 3) * math.log(27 / 16)


def expected_Y_asymptotic(n: int) -> float:
    """``(3/sqrt 2) (27/16)^(n/3)``; overflows to ``inf`` for huge n, use the log variant then."""
    _need_div3(n)
    return _exp(log_expected_Y_asymptotic(n))


def y2_terms(n: int):
    """Yield ``((A, B), term)`` for every summand of the exact second moment."""
    _need_div3(n)
    third = n // 3
    common = Fraction(factorial(2 * n) * factorial(n) * 4 ** (7 * n // 3), factorial(4 * n))
    for A, B in _ab_lattice(n):
        num = 3**B * factorial(3 * A + 2 * B) * factorial(2 * n - 3 * A - 2 * B)
        den = (4 ** (A + B) * factorial(A) * factorial(B)
               * factorial(2 * third - A - B) ** 2 * factorial(A + B - third))
        yield (A, B), common * Fraction(num, den)


def expected_Y2_exact(n: int) -> Fraction:
    _need_div3(n)
    return sum((t for _, t in y2_terms(n)), Fraction(0))


def _ab_lattice(n: int):
    third = n // 3
    for A in range(0, 2 * third + 1):
        for B in range(max(0, third - A), 2 * third - A + 1):
            yield A, B


def log_expected_Y2_asymptotic(n: int) -> float:
    return math.log(SQRT_3_2 * 4.5) + (2 * n / 3) * math.log(27 / 16)


def expected_Y2_asymptotic(n: int) -> float:
    _need_div3(n)
    return _exp(log_expected_Y2_asymptotic(n))


def log_fraction(x: Fraction) -> float:
    """Natural log of a positive rational too large for a double."""
    if x <= 0:
        raise ValueError("log of a non-positive number")
    num, den = x.numerator, x.denominator
    return _log_int(num) - _log_int(den)


def _log_int(k: int) -> float:
    bits = k.bit_length()
    if bits < 1000:
        return math.log(k)
    shift = bits - 900
    return math.log(k >> shift) + shift * math.log(2)


def _exp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


@dataclass
class MomentReport:
    n: int
    exact: Fraction
    asymptotic: float
    ratio: float
    log_exact: float
    log_asymptotic: float

    def to_dict(self):
        d = asdict(self)
        d["exact"] = f"{self.exact.numerator}/{self.exact.denominator}"
        for k in ("asymptotic", "ratio", "log_exact", "log_asymptotic"):
            d[k] = _fmt(d[k])
        return d


def _fmt(x: float):
    return float(f"{x:.15g}") if math.isfinite(x) else str(x)


def _report(n, exact, log_asym):
    log_exact = log_fraction(exact)
    return MomentReport(n, exact, _exp(log_asym), _exp(log_exact - log_asym), log_exact, log_asym)


def report_Y(n: int) -> MomentReport:
    return _report(n, expected_Y_exact(n), log_expected_Y_asymptotic(n))


def report_Y2(n: int) -> MomentReport:
    return _report(n, expected_Y2_exact(n), log_expected_Y2_asymptotic(n))


def second_moment_ratio(n: int) -> MomentReport:
    """Exact ``E[Y^2] / E[Y]^2`` against its limit sqrt(3/2)."""
    exact = expected_Y2_exact(n) / expected_Y_exact(n) ** 2
    return _report(n, exact, math.log(SQRT_3_2))


def second_moment_ratio_distance(n: int) -> float:
    """``|E[Y^2]/E[Y]^2 - sqrt(3/2)|`` evaluated at 40 significant digits."""
    r = second_moment_ratio(n).exact
    with mpmath.workdps(40):
        return float(abs(mpmath.mpf(r.numerator) / r.denominator - mpmath.sqrt(mpmath.mpf(3) / 2)))


def expected_YXj_exact(n: int, j: int) -> Fraction:
    """Exact ``E[Y X_j]``, ``X_j`` counting j-cycles on j distinct cells (loops, parallel pairs at j = 1, 2)."""
    _need_div3(n)
    if j < 1:
        raise ValueError("j must be at least 1")
    if j > n:
        return Fraction(0)
    k = 2 * n // 3
    s_sum = sum(binom(j, 2 * s) * binom(n - j, k - j + s) * 8**s for s in range(j // 2 + 1))
    num = falling(n, j) * 4**k * 3**j * factorial(2 * n - j) * s_sum
    return Fraction(num, perfect_matchings(4 * n) * j)


def yxj_ratio_exact(n: int, j: int) -> Fraction:
    return expected_YXj_exact(n, j) / expected_Y_exact(n)


def yxj_ratio_asymptotic(j: int) -> Fraction:
    """Limit of ``E[Y X_j]/E[Y]``: ``(3^j + (-1)^j) / (2j)``, exactly."""
    if j < 1:
        raise ValueError("j must be at least 1")
    return Fraction(3**j + (-1) ** j, 2 * j)


def lam(j: int) -> Fraction:
    """Poisson mean of the j-cycle count in P(n, 4): ``3^j / (2j)``."""
    if j < 1:
        raise ValueError("j must be at least 1")
    return Fraction(3**j, 2 * j)


def delta(j: int) -> Fraction:
    """Relative shift of the j-cycle mean under the Y-weighted measure, ``(-1/3)^j``."""
    if j < 1:
        raise ValueError("j must be at least 1")
    return Fraction(-1, 3) ** j


def delta_negated_power(j: int) -> Fraction:
    """The alternative sign convention ``-(1/3)^j``; agrees with :func:`delta` only for odd j."""
    return -Fraction(1, 3) ** j


@dataclass
class ConditioningParameters:
    lambda_j: list
    delta_j: list
    series_sum: Fraction


def conditioning_parameters(J: int) -> ConditioningParameters:
    lams = [lam(j) for j in range(1, J + 1)]
    dels = [delta(j) for j in range(1, J + 1)]
    return ConditioningParameters(lams, dels, sum((l * d * d for l, d in zip(lams, dels)), Fraction(0)))


def conditioning_checklist(J: int = 50, n: int | None = 240, tol: float = 0.05) -> dict:
    """Numerical status of the three small-subgraph-conditioning conditions.

    (1) cycle means, reported as the lambda_j values (checked by simulation elsewhere);
    (2) the per-j ratio ``E[Y X_j]/E[Y]`` at size ``n`` against ``lambda_j (1 + delta_j)``;
    (3) the partial sum of ``lambda_j delta_j^2`` and ``exp`` of it against the
        exact second-moment ratio at size ``n``.
    """
    params = conditioning_parameters(J)
    with mpmath.workdps(60):
        partial = mpmath.mpf(params.series_sum.numerator) / params.series_sum.denominator
        target = mpmath.log(mpmath.mpf(3) / 2) / 2
        exp_partial = mpmath.exp(partial)
        sum_err = float(abs(partial - target))
        exp_err = float(abs(exp_partial - mpmath.sqrt(mpmath.mpf(3) / 2)))
    tail_bound = 3.0 ** (-J)
    rep = {
        "J": J,
        "lambda": [_fmt(float(x)) for x in params.lambda_j[:10]],
        "delta": [f"{x.numerator}/{x.denominator}" for x in params.delta_j[:10]],
        "deltas_above_minus_one": all(x > -1 for x in params.delta_j),
        "partial_sum": _fmt(float(partial)),
        "half_ln_3_2": _fmt(HALF_LN_3_2),
        "partial_sum_error": sum_err,
        "tail_bound": tail_bound,
        "exp_partial_sum": _fmt(float(exp_partial)),
        "exp_error": exp_err,
        "delta_sign_note": "delta_j = (-1/3)^j; the variant -(1/3)^j differs at even j, delta_j^2 is unaffected",
    }
    conds = {"1": {"status": "see cycles", "lambda": rep["lambda"]}}
    cond3_ok = rep["deltas_above_minus_one"] and sum_err <= tail_bound
    if n is not None:
        ratio = second_moment_ratio(n)
        dist = second_moment_ratio_distance(n)
        rep["second_moment_ratio"] = {"n": n, "value": _fmt(float(ratio.exact)), "distance_to_sqrt_3_2": dist,
                                      "tolerance": tol}
        cond3_ok = cond3_ok and dist < tol
        per_j = []
        for j in range(1, min(J, 6) + 1):
            ex = float(yxj_ratio_exact(n, j))
            lim = float(lam(j) * (1 + delta(j)))
            per_j.append({"j": j, "exact_ratio": _fmt(ex), "limit": _fmt(lim), "rel_error": _fmt(abs(ex / lim - 1))})
        conds["2"] = {"status": "pass" if all(r["rel_error"] < tol for r in per_j) else "fail", "per_j": per_j}
    conds["3"] = {"status": "pass" if cond3_ok else "fail"}
    rep["conditions"] = conds
    return rep
