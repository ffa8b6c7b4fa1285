"""Moduli of continuity: construction, axioms, and Osgood classification.

A modulus of continuity here is a concave, strictly increasing map
mu : [0,1] -> [0,1] with mu(0) = 0.  The dichotomy this package revolves
around is whether the improper integral of 1/mu over (0, 1] diverges
(the Osgood condition) or converges; the divergent side feeds the weight
construction, the convergent side feeds the explicit non-uniqueness
construction.

Classification of the integral from samples alone is undecidable, so
built-in moduli carry their analytic class and the numeric dyadic-sum
heuristic must agree with it; user-supplied moduli get the heuristic with
an Unknown escape hatch.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np
from scipy.integrate import quad

from .report import CheckRow, VerificationReport

__all__ = [
    "OsgoodClass",
    "Modulus",
    "ModulusError",
    "ClassificationError",
    "make_builtin",
    "builtin_names",
    "modulus_from_name",
    "osgood_integral",
    "OsgoodResult",
    "check_remark1",
    "normalize_sqrt_cap",
]


class ModulusError(ValueError):
    """Invalid modulus construction or arguments."""


class ClassificationError(RuntimeError):
    """Measured Osgood class contradicts the claimed analytic class."""


class OsgoodClass(enum.Enum):
    DIVERGENT = "divergent"
    CONVERGENT = "convergent"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Modulus:
    """A modulus of continuity with evaluation and classification metadata.

    Attributes
    ----------
    name : identifier used by the CLI and reports.
    fn : vectorized evaluation s in [0,1] -> mu(s) in [0,1].
    osgood_class : claimed analytic classification of the integral of 1/mu.
    normalized : True once the sqrt cap s -> min(mu(s), sqrt(s)) has been
        applied.
    lower_linear_constant : c > 0 with mu(s) >= c*s on [0,1]; concavity
        guarantees c = mu(1) for a raw modulus.
    """

    name: str
    fn: Callable[[np.ndarray], np.ndarray]
    osgood_class: OsgoodClass
    normalized: bool = False
    lower_linear_constant: float = 0.0

    def __call__(self, s):
        return self.fn(s)


def _linear(s):
    return np.asarray(s, dtype=float)


def _loglinear(s):
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    m = s > 0
    sm = np.where(m, s, 1.0)
    np.multiply(sm, 1.0 - np.log(sm), where=m, out=out)
    return out


def _sqrt(s):
    return np.sqrt(np.asarray(s, dtype=float))


def _power(alpha):
    def f(s):
        return np.asarray(s, dtype=float) ** alpha

    return f


def make_builtin(kind: str, alpha: float | None = None) -> Modulus:
    """Instantiate one of the built-in moduli.

    kind is one of "linear", "loglinear", "sqrt", "power"; "power" requires
    alpha in (0, 1).  Linear and loglinear are Osgood-divergent, sqrt and
    power are convergent; the class is set analytically.
    """
    kind = kind.lower()
    if kind == "linear":
        return Modulus("linear", _linear, OsgoodClass.DIVERGENT,
                       lower_linear_constant=1.0)
    if kind == "loglinear":
        return Modulus("loglinear", _loglinear, OsgoodClass.DIVERGENT,
                       lower_linear_constant=1.0)
    if kind == "sqrt":
        return Modulus("sqrt", _sqrt, OsgoodClass.CONVERGENT,
                       lower_linear_constant=1.0)
    if kind == "power":
        if alpha is None or not (0.0 < alpha < 1.0):
            raise ModulusError(f"power modulus needs alpha in (0,1), got {alpha!r}")
        return Modulus(f"power:{alpha:g}", _power(alpha), OsgoodClass.CONVERGENT,
                       lower_linear_constant=1.0)
    raise ModulusError(f"unknown modulus kind {kind!r}")


def builtin_names() -> list[str]:
    return ["linear", "loglinear", "sqrt", "power:<alpha>"]


def modulus_from_name(name: str) -> Modulus:
    """Parse CLI-style names: linear | loglinear | sqrt | power:0.8."""
    if name.startswith("power:"):
        return make_builtin("power", alpha=float(name.split(":", 1)[1]))
    return make_builtin(name)


# ---------------------------------------------------------------------------
# Osgood classification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OsgoodResult:
    value: float                 # quadrature of 1/mu over [eps_floor, 1]
    classification: OsgoodClass  # measured class
    diagnostic: float            # tail slope (divergent) or Cauchy residual
    dyadic_partials: np.ndarray  # I(2^-k) for k = 1..K


# Heuristic thresholds for the dyadic classifier.  Increment ratios that
# stay below _GEO_RATIO_MAX over the trailing window witness a geometric
# (Cauchy) tail; otherwise a trailing-half regression slope above
# _SLOPE_TOL witnesses unbounded growth.
_GEO_RATIO_MAX = 0.95
_SLOPE_TOL = 1e-3
_TRAIL_WINDOW = 10


def _integrand(mu: Modulus):
    def f(s):
        return 1.0 / float(mu.fn(s))

    return f


def osgood_integral(mu: Modulus, eps_floor: float = 1e-12,
                    quad_tol: float = 1e-9) -> OsgoodResult:
    """Quadrature of the reciprocal-modulus integral plus a class heuristic.

    Integrates 1/mu over [eps_floor, 1] one dyadic panel at a time
    (each panel via adaptive Gauss-Kronrod), classifies from the dyadic
    partial sums I(2^-k), and errors out if a definite measured class
    contradicts a definite claimed class.
    """
    if not (0.0 < eps_floor < 1.0):
        raise ModulusError(f"eps_floor must lie in (0,1), got {eps_floor}")
    f = _integrand(mu)
    kmax = int(math.floor(math.log2(1.0 / eps_floor)))
    partials = []
    total = 0.0
    hi = 1.0
    for k in range(1, kmax + 1):
        lo = 2.0 ** (-k)
        piece, _ = quad(f, lo, hi, epsabs=quad_tol / (kmax + 1), epsrel=1e-12,
                        limit=200)
        total += piece
        partials.append(total)
        hi = lo
    if hi > eps_floor:
        piece, _ = quad(f, eps_floor, hi, epsabs=quad_tol / (kmax + 1),
                        epsrel=1e-12, limit=200)
        total += piece
    partials = np.asarray(partials)

    measured, diagnostic = _classify_dyadic(partials)
    if (measured is not OsgoodClass.UNKNOWN
            and mu.osgood_class is not OsgoodClass.UNKNOWN
            and measured is not mu.osgood_class):
        raise ClassificationError(
            f"modulus {mu.name!r} claims {mu.osgood_class.value} but the "
            f"dyadic sums measure {measured.value} (diagnostic {diagnostic:.3g})")
    return OsgoodResult(total, measured, diagnostic, partials)


def _classify_dyadic(partials: np.ndarray) -> tuple[OsgoodClass, float]:
    if len(partials) < 4:
        return OsgoodClass.UNKNOWN, math.nan
    inc = np.diff(partials)
    w = min(_TRAIL_WINDOW, len(inc) - 1)
    tail_ratios = inc[-w:] / inc[-w - 1:-1]
    rmax = float(tail_ratios.max())
    if rmax <= _GEO_RATIO_MAX:
        # geometric tail: remaining mass is bounded by a convergent series
        tail_bound = float(inc[-1]) * rmax / (1.0 - rmax)
        return OsgoodClass.CONVERGENT, tail_bound / float(partials[-1])
    half = len(partials) // 2
    ks = np.arange(half + 1, len(partials) + 1, dtype=float)
    slope = float(np.polyfit(ks, partials[half:], 1)[0])
    if slope > _SLOPE_TOL:
        return OsgoodClass.DIVERGENT, slope
    return OsgoodClass.UNKNOWN, slope


# ---------------------------------------------------------------------------
# Modulus axioms and their consequences
# ---------------------------------------------------------------------------

def check_remark1(mu: Modulus, sample_count: int = 64,
                  tol: float = 1e-10) -> VerificationReport:
    """Check the modulus axioms and their monotonicity consequences.

    Samples log-spaced chains and reports, per property, the worst
    violation at relative tolerance ``tol``:

    * mu(0) = 0 and mu(1) <= 1,
    * strict monotonicity,
    * concavity,
    * mu(s) >= s * mu(1),
    * s -> mu(s)/s non-increasing,
    * sigma -> sigma^2 * mu(1/sigma) non-decreasing on [1, inf).
    """
    if sample_count < 16:
        raise ModulusError("sample_count must be at least 16")
    rows = []
    s = np.logspace(-12, 0, sample_count)
    v = np.asarray(mu.fn(s), dtype=float)
    mu0 = float(mu.fn(0.0))
    mu1 = float(mu.fn(1.0))

    rows.append(CheckRow("endpoints", "modulus-def",
                         measured=max(abs(mu0), mu1 - 1.0), threshold=tol,
                         passed=abs(mu0) <= tol and mu1 <= 1.0 + tol))

    gaps = np.diff(v)
    worst = float(gaps.min())
    rows.append(CheckRow("strict-monotone", "modulus-def",
                         measured=worst, threshold=0.0, passed=worst > 0.0))

    worst_conc = 0.0
    for lam in (0.25, 0.5, 0.75):
        mid = lam * s[:-4] + (1.0 - lam) * s[4:]
        lhs = np.asarray(mu.fn(mid), dtype=float)
        rhs = lam * v[:-4] + (1.0 - lam) * v[4:]
        worst_conc = max(worst_conc, float((rhs - lhs).max()))
    rows.append(CheckRow("concavity", "modulus-def",
                         measured=worst_conc, threshold=tol,
                         passed=worst_conc <= tol))

    low = float((s * mu1 - v).max())
    rows.append(CheckRow("lower-linear", "rem1",
                         measured=low, threshold=tol * max(mu1, 1.0),
                         passed=low <= tol * max(mu1, 1.0)))

    ratio = v / s
    worst_ratio = float(np.diff(ratio).max())  # should be <= 0
    rows.append(CheckRow("ratio-nonincreasing", "rem1",
                         measured=worst_ratio, threshold=tol * float(ratio.max()),
                         passed=worst_ratio <= tol * float(ratio.max())))

    sigma = np.logspace(0, 12, sample_count)
    grow = sigma**2 * np.asarray(mu.fn(1.0 / sigma), dtype=float)
    worst_grow = float((-np.diff(grow)).max())  # should be <= 0
    rows.append(CheckRow("sigma2mu-nondecreasing", "rem1",
                         measured=worst_grow, threshold=tol * float(grow.max()),
                         passed=worst_grow <= tol * float(grow.max())))

    return VerificationReport(module="modulus", rows=rows,
                              context={"modulus": mu.name,
                                       "sample_count": sample_count})


def normalize_sqrt_cap(mu: Modulus) -> Modulus:
    """Cap the modulus at sqrt: s -> min(mu(s), sqrt(s)).

    The cap never changes the Osgood class (1/min(mu, sqrt) differs from
    1/mu by an integrable amount), is idempotent, and re-measures the
    lower linear constant on a log-spaced grid, clamped from below by the
    capped value at 1.
    """
    if mu.normalized:
        return mu
    raw = mu.fn

    def capped(s):
        s = np.asarray(s, dtype=float)
        return np.minimum(np.asarray(raw(s), dtype=float), np.sqrt(s))

    s = np.logspace(-12, 0, 4097)
    ratios = np.asarray(capped(s), dtype=float) / s
    cap1 = float(capped(1.0))
    c = max(float(ratios.min()), cap1 * (1.0 - 1e-12))
    return replace(mu, fn=capped, normalized=True, lower_linear_constant=c)
