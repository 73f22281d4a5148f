"""The second-moment exponent f(a, b), its maximisation over R, and the Laplace estimate of E[Y^2].

Here ``a = A/n`` is the share of cells that are centers of both signatures with
the same special point and ``b = B/n`` the share with different special points.
R = {0 <= a, b <= 2/3, 1/3 <= a + b <= 2/3}.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import moments

LN3, LN4 = math.log(3.0), math.log(4.0)
P0 = (1 / 9, 1 / 3)
P0_EXACT = (Fraction(1, 9), Fraction(1, 3))
F_P0 = 2 * LN3 - (4 / 3) * LN4
REGION_TOL = 1e-12


@dataclass(frozen=True)
class Point2:
    a: float
    b: float

    def __iter__(self):
        return iter((self.a, self.b))


@dataclass(frozen=True)
class HessianMatrix:
    faa: float
    fab: float
    fbb: float

    @property
    def det(self):
        return self.faa * self.fbb - self.fab * self.fab

    @property
    def trace(self):
        return self.faa + self.fbb

    def eigenvalues(self) -> tuple[float, float]:
        half = self.trace / 2
        disc = math.sqrt(float(half * half - self.det))
        return (float(half) - disc, float(half) + disc)

    def as_array(self) -> np.ndarray:
        return np.array([[self.faa, self.fab], [self.fab, self.fbb]], dtype=float)


@dataclass
class StationaryReport:
    points: list
    global_max: Point2
    global_max_value: float
    hessian_at_max: HessianMatrix
    boundary_maxima: list
    corners: list
    h_roots: list = field(default_factory=list)


def in_region(a, b, tol=REGION_TOL) -> bool:
    return (-tol <= a <= 2 / 3 + tol and -tol <= b <= 2 / 3 + tol
            and 1 / 3 - tol <= a + b <= 2 / 3 + tol)


def _xlogx(x):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(x > 0, x * np.log(np.where(x > 0, x, 1.0)), 0.0)


def _clip0(x):
    # absorb rounding just outside the boundary
    return np.where(np.abs(x) < REGION_TOL, 0.0, x)


def f_vec(a, b):
    """Vectorised f on arrays already known to lie in closed R."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    u = _clip0(3 * a + 2 * b)
    w = _clip0(2 - 3 * a - 2 * b)
    free = _clip0(2 / 3 - a - b)
    both_leaf = _clip0(a + b - 1 / 3)
    return (b * (LN3 - LN4) + _xlogx(w) + _xlogx(u) - _xlogx(_clip0(a)) - a * LN4
            - _xlogx(_clip0(b)) - 2 * _xlogx(free) - _xlogx(both_leaf) - (2 / 3) * LN4)


def f(p) -> float:
    """Exponential rate of the (A, B) summand, with ``x ln x = 0`` at ``x = 0``."""
    a, b = p
    if not in_region(a, b):
        raise ValueError(f"({a}, {b}) lies outside R")
    return float(f_vec(a, b))


def _interior(a, b):
    return a > 0 and b > 0 and 1 / 3 < a + b < 2 / 3


def _require_interior(p):
    a, b = p
    if not _interior(a, b):
        raise ValueError(f"({a}, {b}) is not an interior point of R")
    return a, b


def grad_f(p) -> tuple[float, float]:
    a, b = _require_interior(p)
    w, u, free, both = 2 - 3 * a - 2 * b, 3 * a + 2 * b, 2 / 3 - a - b, a + b - 1 / 3
    fa = -3 * math.log(w) + 3 * math.log(u) - math.log(a) - LN4 + 2 * math.log(free) - math.log(both)
    fb = LN3 - LN4 - 2 * math.log(w) + 2 * math.log(u) - math.log(b) + 2 * math.log(free) - math.log(both)
    return fa, fb


def hessian_f(p) -> HessianMatrix:
    """Second partials; exact when ``p`` holds :class:`Fraction` coordinates."""
    a, b = p
    if not _interior(float(a), float(b)):
        raise ValueError(f"({a}, {b}) is not an interior point of R")
    one = Fraction(1) if isinstance(a, Fraction) else 1.0
    two_thirds = 2 * one / 3
    third = one / 3
    w, u = 2 * one - 3 * a - 2 * b, 3 * a + 2 * b
    free, both = two_thirds - a - b, a + b - third
    shared = -2 / free - 1 / both
    faa = 9 / w + 9 / u - 1 / a + shared
    fab = 6 / w + 6 / u + shared
    fbb = 4 / w + 4 / u - 1 / b + shared
    return HessianMatrix(faa, fab, fbb)


def b_star(a: float) -> float:
    """Non-negative root in b of ``6a - 9a^2 = 9ab + 2b^2``."""
    if not -REGION_TOL <= a <= 2 / 3 + REGION_TOL:
        raise ValueError("b_star is defined for 0 <= a <= 2/3")
    a = min(max(a, 0.0), 2 / 3)
    return -9 * a / 4 + 0.25 * math.sqrt(9 * a * a + 48 * a)


def stationarity_residual(a: float, b: float) -> float:
    return 6 * a - 9 * a * a - (9 * a * b + 2 * b * b)


def h(a: float) -> float:
    """First stationarity equation evaluated along ``b = b_star(a)``."""
    b = b_star(a)
    return (3 * a + 2 * b) ** 3 * (2 / 3 - a - b) ** 2 - 4 * a * (2 - 3 * a - 2 * b) ** 3 * (a + b - 1 / 3)


def _bisect(fn, lo, hi, tol):
    flo = fn(lo)
    for _ in range(200):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        fm = fn(mid)
        if fm == 0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def h_roots(grid: int = 10_000, tol: float = 1e-12) -> list[float]:
    """Zeros of h on [0, 2/3]: exact endpoint zeros plus every sign change on the grid, bisected."""
    xs = np.linspace(0.0, 2 / 3, grid + 1)
    hs = np.array([h(x) for x in xs])
    scale = np.max(np.abs(hs))
    roots = []
    for i, x in enumerate(xs):
        if abs(hs[i]) <= 1e-14 * scale:
            roots.append(float(x))
    for i in range(grid):
        if hs[i] * hs[i + 1] < 0:
            roots.append(_bisect(h, xs[i], xs[i + 1], tol))
    roots.sort()
    merged = []
    for r in roots:
        if not merged or r - merged[-1] > 1e-9:
            merged.append(r)
    return merged


# -- boundary segments -------------------------------------------------------

def _dir_derivative_anti(a, b):
    """d/dt f(a - t, b + t); finite on the segments a + b = 1/3 and a + b = 2/3."""
    return LN3 + math.log(2 - 3 * a - 2 * b) - math.log(3 * a + 2 * b) - math.log(b) + math.log(a)


def d_segment_a0(b):
    """d/db f(0, b) for 1/3 < b < 2/3."""
    return (LN3 - LN4 - 2 * math.log(2 - 2 * b) + 2 * math.log(2 * b) - math.log(b)
            + 2 * math.log(2 / 3 - b) - math.log(b - 1 / 3))


def d2_segment_a0(b):
    return 2 / (1 - b) + 1 / b - 2 / (2 / 3 - b) - 1 / (b - 1 / 3)


def d_segment_low_diag(b):
    """d/db f(1/3 - b, b) for 0 < b < 1/3."""
    return _dir_derivative_anti(1 / 3 - b, b)


def d2_segment_low_diag(b):
    return 1 / (1 + b) + 1 / (1 - b) - 1 / b - 1 / (1 / 3 - b)


def d_segment_high_diag(b):
    """d/db f(2/3 - b, b) = ln((2 - 3b)/(2 - b)) for 0 < b < 2/3."""
    return math.log((2 - 3 * b) / (2 - b))


def d_segment_b0(a):
    """d/da f(a, 0) = ln(9a^2 / (4(2 - 3a)(3a - 1))) for 1/3 < a < 2/3."""
    return math.log(9 * a * a / (4 * (2 - 3 * a) * (3 * a - 1)))


SEGMENTS = {
    "a=0": ((0.0, 1 / 3), (0.0, 2 / 3)),
    "a+b=1/3": ((1 / 3, 0.0), (0.0, 1 / 3)),
    "a+b=2/3": ((2 / 3, 0.0), (0.0, 2 / 3)),
    "b=0": ((1 / 3, 0.0), (2 / 3, 0.0)),
}

CORNERS = [(2 / 3, 0.0), (1 / 3, 0.0), (0.0, 2 / 3), (0.0, 1 / 3)]


def boundary_maxima(tol: float = 1e-9) -> list:
    """``(segment, Point2, f)`` for the maximiser of f along each edge of R."""
    eps = 1e-15
    out = []
    b1 = _bisect(d_segment_a0, 1 / 3 + eps, 2 / 3 - eps, tol)
    out.append(("a=0", Point2(0.0, b1), f((0.0, b1))))
    b2 = _bisect(d_segment_low_diag, eps, 1 / 3 - eps, tol)
    out.append(("a+b=1/3", Point2(1 / 3 - b2, b2), f((1 / 3 - b2, b2))))
    # derivative < 0 throughout: maximum at the b = 0 end
    out.append(("a+b=2/3", Point2(2 / 3, 0.0), f((2 / 3, 0.0))))
    # derivative > 0 throughout: maximum at the a = 2/3 end
    out.append(("b=0", Point2(2 / 3, 0.0), f((2 / 3, 0.0))))
    return out


def find_stationary_points() -> StationaryReport:
    roots = h_roots()
    points = []
    for a in roots:
        b = b_star(a)
        if in_region(a, b, tol=1e-9):
            a_s, b_s = _snap(a), _snap(b)
            points.append((Point2(a_s, b_s), f((a_s, b_s))))
    bmax = boundary_maxima()
    corners = [(Point2(*c), f(c)) for c in CORNERS]
    candidates = points + [(p, v) for _, p, v in bmax] + corners
    best, best_v = max(candidates, key=lambda t: t[1])
    if _interior(best.a, best.b):
        hess = hessian_f(P0_EXACT) if _close(best, P0) else hessian_f((best.a, best.b))
    else:
        hess = None
    return StationaryReport(points=points, global_max=best, global_max_value=best_v,
                            hessian_at_max=hess, boundary_maxima=bmax, corners=corners, h_roots=roots)


def _close(p, q, tol=1e-9):
    return abs(p.a - q[0]) <= tol and abs(p.b - q[1]) <= tol


def _snap(x):
    return 0.0 if abs(x) < 1e-12 else x


def grid_maximum(size: int = 2000):
    """Max of f over a ``size x size`` grid of the bounding box, restricted to R."""
    xs = np.linspace(0.0, 2 / 3, size)
    aa, bb = np.meshgrid(xs, xs, indexing="ij")
    s = aa + bb
    mask = (s >= 1 / 3 - 1e-15) & (s <= 2 / 3 + 1e-15)
    vals = np.full(aa.shape, -np.inf)
    vals[mask] = f_vec(aa[mask], bb[mask])
    idx = np.unravel_index(np.argmax(vals), vals.shape)
    return vals, aa, bb, Point2(float(aa[idx]), float(bb[idx])), float(vals[idx])


# -- polynomial part and the Laplace estimate --------------------------------

def g_n(p, n: int) -> float:
    """Polynomial prefactor of the (A, B) summand at finite n (Gosper offsets 1/(6n))."""
    a, b = p
    if not in_region(a, b, tol=1e-9):
        raise ValueError(f"({a}, {b}) lies outside R")
    e = 1 / (6 * n)
    num = (3 * a + 2 * b) * (2 - 3 * a - 2 * b)
    den = 2 * (a + e) * (b + e) * (2 / 3 - a - b + e) ** 2 * (a + b - 1 / 3 + e)
    return math.sqrt(num / den) / (2 * math.pi)


def g_limit(p) -> float:
    a, b = p
    den = 2 * a * b * (2 / 3 - a - b) ** 2 * (a + b - 1 / 3)
    if den <= 0:
        raise ValueError(f"g has a vanishing denominator at ({a}, {b})")
    return math.sqrt((3 * a + 2 * b) * (2 - 3 * a - 2 * b) / den) / (2 * math.pi)


G_P0 = 81 / (4 * math.pi) * math.sqrt(1.5)


def log_laplace_approximation(n: int) -> float:
    det = float(hessian_f(P0_EXACT).det)
    return math.log(2 * math.pi / math.sqrt(abs(det))) + math.log(g_limit(P0)) + F_P0 * n


def laplace_approximation(n: int) -> float:
    """Gaussian-integral estimate ``2 pi / sqrt|det H| * g(P0) * exp(f(P0) n)`` of E[Y^2]."""
    if n % 3:
        raise ValueError("3 must divide n")
    return moments._exp(log_laplace_approximation(n))


def log_gosper_factorial(s: float) -> float:
    """``ln s!`` via ``s! ~ sqrt(2 pi (s + 1/6)) (s/e)^s``; finite at s = 0."""
    xlx = s * math.log(s) if s > 0 else 0.0
    return 0.5 * math.log(2 * math.pi * (s + 1 / 6)) + xlx - s


def log_gosper_summand(n: int, A: int, B: int) -> float:
    """The (A, B) summand with every factorial replaced by its Gosper approximation."""
    t = n // 3
    lg = log_gosper_factorial
    return (lg(2 * n) + lg(n) + (7 * n // 3) * LN4 + B * LN3 + lg(3 * A + 2 * B) + lg(2 * n - 3 * A - 2 * B)
            - lg(4 * n) - (A + B) * LN4 - lg(A) - lg(B) - 2 * lg(2 * t - A - B) - lg(A + B - t))


@dataclass
class SummandRow:
    A: int
    B: int
    log_exact: float
    log_approx: float
    log_gosper: float

    @property
    def ratio(self):
        """Error factor S: exact summand over ``g_n/n * exp(f n)`` (``inf`` where g_n vanishes)."""
        if self.log_approx == -math.inf:
            return math.inf
        return math.exp(self.log_exact - self.log_approx)

    @property
    def gosper_ratio(self):
        return math.exp(self.log_exact - self.log_gosper)


def summand_profile(n: int) -> dict:
    """Exact (A, B) summands next to ``g_n/n * exp(f n)`` and the all-Gosper approximation."""
    if n % 3:
        raise ValueError("3 must divide n")
    if n > 600:
        raise ValueError("summand_profile is limited to n <= 600")
    rows = []
    for (A, B), term in moments.y2_terms(n):
        a, b = A / n, B / n
        log_exact = moments.log_fraction(term)
        g = g_n((a, b), n)
        log_approx = math.log(g / n) + f((a, b)) * n if g > 0 else -math.inf
        rows.append(SummandRow(A, B, log_exact, log_approx, log_gosper_summand(n, A, B)))
    peak = max(rows, key=lambda r: r.log_exact)
    finite = [r.ratio for r in rows if math.isfinite(r.ratio)]
    gos = [r.gosper_ratio for r in rows]
    return {
        "n": n,
        "rows": rows,
        "peak": (peak.A, peak.B),
        "peak_ratio": peak.ratio,
        "ratio_min": min(finite),
        "ratio_max": max(finite),
        "degenerate_points": sum(1 for r in rows if not math.isfinite(r.ratio)),
        "gosper_max_rel_deviation": max(abs(x - 1) for x in gos),
    }
