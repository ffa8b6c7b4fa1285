"""The explicit backward-parabolic non-uniqueness construction.

Given a modulus mu whose reciprocal integral converges (capped at sqrt),
this module builds the classical gluing of decaying cosine modes: smooth
time cutoffs A, B, C, J, node and frequency sequences

    a_n = -sum_{j>=n} 1/((j+k0)^2 mu(1/(j+k0))),    z_n = (n+k0)^3,

derived quantities r_n = a_{n+1}-a_n, q_n, p_n = (z_{n+1}-z_n) r_n, and the
piecewise solution u together with the time coefficient l(t) and the
lower-order coefficients b1, b2, c that force the equation to hold exactly.

Numerics
--------
* The solution spans exponent ranges like exp(-q_n) with q_n ~ 1e7, far
  outside double range, so every point evaluation is carried as a mantissa
  together with a separate log scale.  Coefficients l, b1, b2, c and all
  relative residuals are ratios of mantissas and stay finite everywhere.
* r_n is stored as the *floating-point difference* of the stored nodes
  a_{n+1} - a_n (within ~4e-13 relative of its defining value), and q_n
  accumulates the same rounded products; junction exponents from adjacent
  segments are then bitwise consistent and continuity holds to rounding.
* Node tails are summed directly and finished with an Euler-Maclaurin
  midpoint integral correction; direct summation alone cannot reach the
  target accuracy for slowly converging tails.
* The truncated construction treats times between the last built node and
  zero as identically zero once the decay bound at the truncation index
  falls below 1e-16, which makes the truncation invisible in doubles.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad
from scipy.optimize import minimize_scalar

from .bump import smoothstep, smoothstep_d1, smoothstep_d2
from .modulus import Modulus, OsgoodClass
from .mollify import TimeFunction
from .report import CheckRow, VerificationReport

__all__ = [
    "PlissError",
    "HorizonError",
    "Orientation",
    "CutoffFamily",
    "make_cutoffs",
    "PlissSequences",
    "build_sequences",
    "choose_k0",
    "PlissConstruction",
    "build_construction",
    "PointEval",
    "ScaledPointEval",
    "eval_solution",
    "eval_fields",
    "eval_l",
    "eval_lower_order",
    "l_time_function",
    "l_from_sequences",
    "default_segments",
    "verify_conditions",
    "verify_cmu_regularity",
    "fd_cross_check",
    "junction_continuity_gap",
    "export_construction",
]

_TINY = 1e-300
_ZERO_EXTENSION_LOG = math.log(1e-16)


class PlissError(ValueError):
    """Invalid construction arguments or violated build invariants."""


class HorizonError(PlissError):
    """Evaluation time outside the built horizon."""


class Orientation(enum.Enum):
    CONSTRUCTION = "construction"   # supp u = {t <= 0}, operator d_t - lapl
    REFLECTED = "reflected"         # supp u = {t >= 0}, operator d_t + lapl


# ---------------------------------------------------------------------------
# cutoffs
# ---------------------------------------------------------------------------

_W1 = 1.0 / 5.0 - 1.0 / 6.0   # rising ramp width of J
_W2 = 1.0 / 2.0 - 1.0 / 3.0   # falling ramp width of J


@dataclass(frozen=True)
class CutoffFamily:
    """Smooth scalar cutoffs with closed-form derivatives.

    Plateaus: A = 1 below 1/5 and 0 above 1/4; B = 0 outside (0, 1) and 1 on
    [1/6, 1/2]; C = 0 below 1/4 and 1 above 1/3; J = -2 below 1/6 and above
    1/2, and 2 on [1/5, 1/3].  The sup norms of J' and J'' are measured at
    construction by dense sampling plus bounded refinement.
    """

    A: Callable
    B: Callable
    C: Callable
    J: Callable
    dA: Callable
    dB: Callable
    dC: Callable
    dJ: Callable
    d2J: Callable
    j_prime_sup: float
    j_second_sup: float
    j_peak_pos: float   # s where J' attains its maximum
    j_peak_neg: float   # s where J' attains its minimum


def _cut_A(s):
    return 1.0 - smoothstep((np.asarray(s, dtype=float) - 0.2) * 20.0)


def _cut_dA(s):
    return -20.0 * smoothstep_d1((np.asarray(s, dtype=float) - 0.2) * 20.0)


def _cut_C(s):
    return smoothstep((np.asarray(s, dtype=float) - 0.25) * 12.0)


def _cut_dC(s):
    return 12.0 * smoothstep_d1((np.asarray(s, dtype=float) - 0.25) * 12.0)


def _cut_B(s):
    s = np.asarray(s, dtype=float)
    return smoothstep(6.0 * s) * (1.0 - smoothstep(2.0 * (s - 0.5)))


def _cut_dB(s):
    s = np.asarray(s, dtype=float)
    return (6.0 * smoothstep_d1(6.0 * s) * (1.0 - smoothstep(2.0 * (s - 0.5)))
            - 2.0 * smoothstep(6.0 * s) * smoothstep_d1(2.0 * (s - 0.5)))


def _cut_J(s):
    s = np.asarray(s, dtype=float)
    up = smoothstep((s - 1.0 / 6.0) / _W1)
    down = 1.0 - smoothstep((s - 1.0 / 3.0) / _W2)
    return -2.0 + 4.0 * up * down


def _cut_dJ(s):
    s = np.asarray(s, dtype=float)
    up = smoothstep((s - 1.0 / 6.0) / _W1)
    down = 1.0 - smoothstep((s - 1.0 / 3.0) / _W2)
    dup = smoothstep_d1((s - 1.0 / 6.0) / _W1) / _W1
    ddown = -smoothstep_d1((s - 1.0 / 3.0) / _W2) / _W2
    return 4.0 * (dup * down + up * ddown)


def _cut_d2J(s):
    s = np.asarray(s, dtype=float)
    up = smoothstep((s - 1.0 / 6.0) / _W1)
    down = 1.0 - smoothstep((s - 1.0 / 3.0) / _W2)
    dup = smoothstep_d1((s - 1.0 / 6.0) / _W1) / _W1
    ddown = -smoothstep_d1((s - 1.0 / 3.0) / _W2) / _W2
    d2up = smoothstep_d2((s - 1.0 / 6.0) / _W1) / _W1**2
    d2down = -smoothstep_d2((s - 1.0 / 3.0) / _W2) / _W2**2
    return 4.0 * (d2up * down + 2.0 * dup * ddown + up * d2down)


def _refine_extremum(f, s_grid):
    vals = np.asarray(f(s_grid))
    i = int(np.argmax(vals))
    lo = s_grid[max(i - 2, 0)]
    hi = s_grid[min(i + 2, len(s_grid) - 1)]
    res = minimize_scalar(lambda s: -float(f(s)), bounds=(lo, hi),
                          method="bounded", options={"xatol": 1e-13})
    return float(res.x), float(-res.fun)


def make_cutoffs() -> CutoffFamily:
    """Build the cutoffs and measure the J-derivative sup norms."""
    s = np.linspace(-0.1, 1.1, 24001)
    peak_pos, dj_max = _refine_extremum(_cut_dJ, s)
    peak_neg, ndj_max = _refine_extremum(lambda x: -_cut_dJ(x), s)
    _, d2j_max = _refine_extremum(lambda x: np.abs(_cut_d2J(x)), s)
    return CutoffFamily(A=_cut_A, B=_cut_B, C=_cut_C, J=_cut_J,
                        dA=_cut_dA, dB=_cut_dB, dC=_cut_dC, dJ=_cut_dJ,
                        d2J=_cut_d2J,
                        j_prime_sup=max(dj_max, ndj_max),
                        j_second_sup=d2j_max,
                        j_peak_pos=peak_pos, j_peak_neg=peak_neg)


# ---------------------------------------------------------------------------
# sequences
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PlissSequences:
    """Node, frequency, and gap sequences of the construction.

    Arrays are 0-based: a[i] = a_{i+1} holds for i = 0..N (N = n_segments),
    z[i] = z_{i+1} for i = 0..N+1, q[i] = q_{i+1} for i = 0..N, and
    r[i] = r_{i+1}, p[i] = p_{i+1} for i = 0..N-1.  r is the exact floating
    difference of the stored nodes.
    """

    mu: Modulus
    k0: int
    n_segments: int
    a: np.ndarray
    r: np.ndarray
    z: np.ndarray
    q: np.ndarray
    q_lo: np.ndarray        # compensated low parts: q_true = q + q_lo
    p: np.ndarray
    c_lin: float
    tail_bound_log: float   # log of the decay bound at the truncation index

    @property
    def horizon(self) -> tuple[float, float]:
        return float(self.a[0]), float(self.a[-1])

    @property
    def zero_extension_ok(self) -> bool:
        return self.tail_bound_log < _ZERO_EXTENSION_LOG


def _gap_fn(mu: Modulus):
    def g(m):
        m = np.asarray(m, dtype=float)
        return 1.0 / (m**2 * np.asarray(mu.fn(1.0 / m), dtype=float))

    return g


def _node_tail(mu: Modulus, start: float, direct_terms: int = 30000) -> float:
    """sum_{m >= start} 1/(m^2 mu(1/m)) by direct summation plus an
    Euler-Maclaurin midpoint integral tail."""
    g = _gap_fn(mu)
    ms = start + np.arange(direct_terms, dtype=float)
    direct = float(np.sum(g(ms)))
    M = start + direct_terms
    edge = M - 0.5
    delta = 1.0 / edge
    # integral of g over [edge, inf) equals integral of 1/mu over (0, 1/edge]
    integral, _ = quad(lambda w: 2.0 * w / float(mu.fn(w * w)), 0.0,
                       math.sqrt(delta), epsabs=1e-15, epsrel=1e-13, limit=200)
    h = edge * 1e-6
    gprime = (float(g(edge + h)) - float(g(edge - h))) / (2.0 * h)
    return direct + integral + gprime / 24.0


def _require_admissible(mu: Modulus):
    if mu.osgood_class is OsgoodClass.DIVERGENT:
        raise PlissError("construction needs a convergent-integral modulus; "
                         "the node series diverges otherwise")
    if mu.osgood_class is not OsgoodClass.CONVERGENT:
        raise PlissError("construction needs a certified convergent modulus")
    if not mu.normalized:
        raise PlissError("apply normalize_sqrt_cap to the modulus first")


def build_sequences(mu: Modulus, k0: int, n_segments: int) -> PlissSequences:
    """Populate all sequence arrays and check the order conditions.

    Requires a convergent, sqrt-capped modulus; n_segments >= 10.  Raises
    on violations of the node/frequency order conditions (4.1)-(4.3).
    """
    _require_admissible(mu)
    if n_segments < 10:
        raise PlissError("n_segments must be at least 10")
    if k0 < 1:
        raise PlissError("k0 must be a positive integer")
    N = int(n_segments)
    g = _gap_fn(mu)

    a = np.empty(N + 1)
    a[N] = -_node_tail(mu, float(N + 1 + k0))
    gaps = g(k0 + np.arange(1, N + 1, dtype=float))
    for i in range(N - 1, -1, -1):
        a[i] = a[i + 1] - gaps[i]
    r = np.diff(a)                      # exact float node differences
    m_all = k0 + np.arange(1, N + 3, dtype=float)
    z = m_all**3                        # z_{1}..z_{N+2}
    zdiff = 3.0 * m_all**2 + 3.0 * m_all + 1.0
    p = zdiff[:N] * r
    # q carried in compensated (hi, lo) form: the hi parts quantize at
    # ulp(q) ~ 1e-9 for q ~ 1e7, which alone would spoil the 1e-10 junction
    # continuity; the lo parts are folded into the mantissa exponents.
    q = np.empty(N + 1)
    q_lo = np.empty(N + 1)
    q[0], q_lo[0] = 0.0, 0.0
    hi, lo = 0.0, 0.0
    terms = z[1:N + 1] * r
    for i in range(N):
        w = float(terms[i])
        s_sum = hi + w
        bp = s_sum - hi
        err = (hi - (s_sum - bp)) + (w - bp)   # TwoSum error term, exact
        hi, lo = s_sum, lo + err
        q[i + 1], q_lo[i + 1] = hi, lo
    p_ext = zdiff[N] * float(g(k0 + N + 1))
    tail_bound_log = -q[N] + 2.0 * p_ext

    if not (a[0] > -1.0 and np.all(np.diff(a) > 0.0) and a[-1] < 0.0):
        raise PlissError(
            f"node sequence fails the order condition (4.1): a_1 = {a[0]:.6g} "
            f"must lie in (-1, 0); slowly converging reciprocal integrals "
            f"need a (possibly much) larger k0")
    if not (z[0] > 1.0 and np.all(np.diff(z) > 0.0)):
        raise PlissError("frequency sequence fails the order condition (4.2)")
    if not np.all(p > 1.0):
        raise PlissError("gap products fail p_n > 1 (4.3); increase k0")

    return PlissSequences(mu=mu, k0=int(k0), n_segments=N, a=a, r=r, z=z,
                          q=q, q_lo=q_lo, p=p,
                          c_lin=float(mu.lower_linear_constant),
                          tail_bound_log=float(tail_bound_log))


def choose_k0(mu: Modulus, n_segments: int = 200,
              cuts: CutoffFamily | None = None, k0_cap: int = 10**6) -> int:
    """Smallest k0 admitting the construction, by monotone bisection.

    Admissibility at k0: the parabolicity condition
    sup_n p_n/(r_n z_n) <= 1/(2 ||J'||_inf), the gap products p_n > 1, the
    premise r_n (n+k0) <= 1, and a finite regularity ratio (4.6) on
    n <= n_segments.  The bisection is seeded by the closed-form bound
    p_n/(r_n z_n) <= 7/(n+k0).
    """
    _require_admissible(mu)
    cuts = cuts or make_cutoffs()
    d = cuts.j_prime_sup
    n = np.arange(1, n_segments + 1, dtype=float)

    def admissible(k0: float) -> bool:
        m = n + k0
        ratio = 3.0 / m + 3.0 / m**2 + 1.0 / m**3     # p_n / (r_n z_n)
        if ratio[0] > 1.0 / (2.0 * d):
            return False
        mu_at = np.asarray(mu.fn(1.0 / m), dtype=float)
        if (m * mu_at)[0] < 1.0:                      # r_n (n+k0) <= 1 premise
            return False
        p = (3.0 * m**2 + 3.0 * m + 1.0) / (m**2 * mu_at)
        if not np.all(p > 1.0):
            return False
        r = 1.0 / (m**2 * mu_at)
        chain = ratio / np.asarray(mu.fn(r), dtype=float)
        return bool(np.all(np.isfinite(chain)))

    seed = max(2, int(math.ceil(14.0 * d - 1.0)))
    hi = min(seed, k0_cap)
    while not admissible(hi):
        hi *= 2
        if hi > k0_cap:
            raise PlissError(f"no admissible k0 below {k0_cap}")
    lo = 1
    while lo < hi:
        mid = (lo + hi) // 2
        if admissible(mid):
            hi = mid
        else:
            lo = mid + 1
    return int(hi)


# ---------------------------------------------------------------------------
# the assembled construction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PlissConstruction:
    seqs: PlissSequences
    cuts: CutoffFamily
    orientation: Orientation = Orientation.CONSTRUCTION

    def __post_init__(self):
        s = self.seqs
        sup_ratio = float(np.max(s.p / (s.r * s.z[:s.n_segments])))
        bound = 1.0 / (2.0 * self.cuts.j_prime_sup)
        if sup_ratio > bound * (1.0 + 1e-12):
            raise PlissError(
                f"parabolicity condition (4.5) fails: sup p/(rz) = {sup_ratio:.4g} "
                f"> {bound:.4g}; increase k0")
        # sampled coefficient bounds at the ramp extrema of the widest segments
        n = min(64, s.n_segments)
        peaks = np.concatenate([
            s.a[:n] + self.cuts.j_peak_pos * s.r[:n],
            s.a[:n] + self.cuts.j_peak_neg * s.r[:n]])
        lvals = 1.0 + np.asarray(self.cuts.dJ((peaks - np.tile(s.a[:n], 2))
                                              / np.tile(s.r[:n], 2))) \
            * np.tile(s.p[:n] / (s.r[:n] * s.z[:n]), 2)
        if lvals.min() < 0.5 - 1e-12 or lvals.max() > 1.5 + 1e-12:
            raise PlissError(
                f"coefficient leaves [1/2, 3/2]: range "
                f"[{lvals.min():.6g}, {lvals.max():.6g}]")

    def reflected(self) -> "PlissConstruction":
        flip = (Orientation.REFLECTED
                if self.orientation is Orientation.CONSTRUCTION
                else Orientation.CONSTRUCTION)
        return PlissConstruction(self.seqs, self.cuts, flip)


def default_segments(mu: Modulus, k0: int, floor: int = 10,
                     cap: int = 4000) -> int:
    """Smallest horizon making the truncation invisible in doubles.

    Returns the first n with -q_n + 2 p_n below log(1e-16), floored at the
    build minimum.
    """
    g = _gap_fn(mu)
    q = 0.0
    n = 1
    while n < cap:
        m = float(k0 + n)
        r = float(g(m))
        p = (3.0 * m**2 + 3.0 * m + 1.0) * r
        if -q + 2.0 * p < _ZERO_EXTENSION_LOG and n >= floor:
            return n
        q += (m + 1.0) ** 3 * r
        n += 1
    return cap


def build_construction(mu: Modulus, k0: int | None = None,
                       n_segments: int | None = None,
                       orientation: Orientation = Orientation.CONSTRUCTION,
                       ) -> PlissConstruction:
    """Convenience builder: choose k0 if not given, size the horizon, build."""
    cuts = make_cutoffs()
    if k0 is None:
        k0 = choose_k0(mu, cuts=cuts)
    if n_segments is None:
        n_segments = default_segments(mu, k0)
    seqs = build_sequences(mu, k0, n_segments)
    return PlissConstruction(seqs=seqs, cuts=cuts, orientation=orientation)


# ---------------------------------------------------------------------------
# point evaluation (mantissa + log scale)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScaledPointEval:
    """Mantissas relative to exp(log_scale); ratios are scale-free."""

    log_scale: float
    u: float
    u_t: float
    u_x1: float
    u_x2: float
    u_x1x1: float
    u_x2x2: float
    Lu: float
    residual: float
    residual_rel: float


@dataclass(frozen=True)
class PointEval:
    """Field values at one point; see ``scaled`` for the underflow-safe view.

    The literal floats u, u_t, ... honestly under- or overflow outside the
    representable window (the construction spans exponents far beyond
    doubles); l, b1, b2, c and the relative residual are mantissa ratios and
    are always finite.
    """

    t: float
    x1: float
    x2: float
    u: float
    u_t: float
    u_x1: float
    u_x2: float
    u_x1x1: float
    u_x2x2: float
    l: float
    b1: float
    b2: float
    c: float
    Lu: float
    residual: float
    scaled: ScaledPointEval


def _eval_segment_arrays(seqs: PlissSequences, cuts: CutoffFamily,
                         t, x1, x2, seg_idx, ref=None):
    """Mantissa fields on segment indices seg_idx (0-based), vectorized.

    With ref=None mantissas are relative to the per-point natural scale
    (max term exponent); with a float ref they are relative to exp(ref),
    which must be within double range of the natural scale.
    """
    a_n = seqs.a[seg_idx]
    r_n = seqs.r[seg_idx]
    z_n = seqs.z[seg_idx]
    z_n1 = seqs.z[seg_idx + 1]
    q_n = seqs.q[seg_idx]
    q_lo_n = seqs.q_lo[seg_idx]
    p_n = seqs.p[seg_idx]

    theta = t - a_n
    s = theta / r_n
    A, B, C, J = cuts.A(s), cuts.B(s), cuts.C(s), cuts.J(s)
    dA, dB, dC, dJ = cuts.dA(s), cuts.dB(s), cuts.dC(s), cuts.dJ(s)

    e1 = -z_n * theta
    e2 = e1 + J * p_n
    e3 = -z_n1 * theta
    if ref is None:
        m_rel = np.maximum(np.maximum(e1, e2), e3)
        log_scale = -q_n + m_rel
    else:
        # (-q_n - ref) is an exact difference of nearby stored scales
        m_rel = -(-q_n - float(ref))
        log_scale = np.broadcast_to(float(ref), np.shape(theta)).astype(float)
    g1 = np.exp(e1 - m_rel - q_lo_n)
    g2 = np.exp(e2 - m_rel - q_lo_n)
    g3 = np.exp(e3 - m_rel - q_lo_n)

    sz_n = np.sqrt(z_n)
    sz_n1 = np.sqrt(z_n1)
    cos1, sin1 = np.cos(sz_n * x1), np.sin(sz_n * x1)
    cos2, sin2 = np.cos(sz_n1 * x1), np.sin(sz_n1 * x1)
    cosy, siny = np.cos(sz_n * x2), np.sin(sz_n * x2)

    t1, t2, t3 = A * g1 * cos1, B * g2 * cosy, C * g3 * cos2
    u = t1 + t2 + t3
    u_t = ((dA / r_n - A * z_n) * g1 * cos1
           + (dB / r_n + B * (dJ * p_n / r_n - z_n)) * g2 * cosy
           + (dC / r_n - C * z_n1) * g3 * cos2)
    u_x1 = -A * sz_n * g1 * sin1 - C * sz_n1 * g3 * sin2
    u_x2 = -B * sz_n * g2 * siny
    u_x1x1 = -A * z_n * g1 * cos1 - C * z_n1 * g3 * cos2
    u_x2x2 = -B * z_n * g2 * cosy

    l = 1.0 + dJ * p_n / (r_n * z_n)
    Lu = u_t - u_x1x1 - l * u_x2x2
    Lu_id = (dA * g1 * cos1 + dB * g2 * cosy + dC * g3 * cos2) / r_n \
        + 2.0 * B * dJ * p_n * g2 * cosy / r_n
    scale_L = (np.abs(dA) * g1 + np.abs(dB) * g2 + np.abs(dC) * g3
               + 2.0 * np.abs(B * dJ) * p_n * g2) / r_n
    scale_u = A * g1 + B * g2 + C * g3
    scale_x1 = A * sz_n * g1 + C * sz_n1 * g3
    scale_x2 = B * sz_n * g2
    scale_t = (np.abs(dA) / r_n + A * z_n) * g1 \
        + (np.abs(dB) / r_n + B * (np.abs(dJ) * p_n / r_n + z_n)) * g2 \
        + (np.abs(dC) / r_n + C * z_n1) * g3
    return {
        "log_scale": log_scale, "u": u, "u_t": u_t, "u_x1": u_x1,
        "u_x2": u_x2, "u_x1x1": u_x1x1, "u_x2x2": u_x2x2, "l": l,
        "Lu": Lu, "Lu_id": Lu_id, "scale_L": scale_L, "scale_u": scale_u,
        "scale_x1": scale_x1, "scale_x2": scale_x2, "scale_t": scale_t,
    }


def _eval_v1_arrays(seqs: PlissSequences, t, x1, ref=None):
    """The pure leading mode, valid for t <= a_1."""
    z1 = seqs.z[0]
    sz = np.sqrt(z1)
    theta = t - seqs.a[0]
    cos1, sin1 = np.cos(sz * x1), np.sin(sz * x1)
    zero = np.zeros_like(cos1)
    if ref is None:
        amp = np.ones_like(cos1)
        log_scale = -z1 * theta
    else:
        amp = np.exp(-z1 * theta - float(ref))
        log_scale = np.broadcast_to(float(ref), np.shape(cos1)).astype(float)
    return {
        "log_scale": log_scale, "u": amp * cos1, "u_t": -z1 * amp * cos1,
        "u_x1": -sz * amp * sin1, "u_x2": zero, "u_x1x1": -z1 * amp * cos1,
        "u_x2x2": zero, "l": np.ones_like(cos1),
        "Lu": zero, "Lu_id": zero, "scale_L": zero,
        "scale_u": amp, "scale_x1": sz * amp,
        "scale_x2": zero, "scale_t": z1 * amp,
    }


def eval_fields(pc: PlissConstruction, t, x1, x2, *,
                force_segment: int | None = None,
                log_scale_ref: float | None = None) -> dict:
    """Vectorized mantissa evaluation of every field at (t, x1, x2).

    Returns a dict of arrays: log_scale, the scaled fields u, u_t, u_x1,
    u_x2, u_x1x1, u_x2x2, Lu, the coefficients l, b1, b2, c, the relative
    equation residual residual_rel, the scaled absolute residual, the
    identity gap lu_gap_rel, and a degenerate-denominator flag.  All
    orientation sign flips are applied.

    force_segment pins the branch: n >= 1 evaluates segment n's formula,
    0 evaluates the leading-mode branch.  log_scale_ref (only with
    force_segment) fixes the output scale, enabling cross-branch and
    finite-difference comparisons at a common reference; it must stay
    within double range of the natural scale.
    """
    reflected = pc.orientation is Orientation.REFLECTED
    t_in = np.asarray(t, dtype=float)
    tb, x1b, x2b = np.broadcast_arrays(
        -t_in if reflected else t_in,
        np.asarray(x1, dtype=float), np.asarray(x2, dtype=float))
    shape = tb.shape
    tf, x1f, x2f = (np.ravel(v).astype(float) for v in (tb, x1b, x2b))
    seqs, cuts = pc.seqs, pc.cuts
    a = seqs.a

    if np.any(tf < a[0] - 1.0) or np.any(tf > 1.0):
        raise HorizonError("t outside [a_1 - 1, 1] (construction time)")

    keys = ["log_scale", "u", "u_t", "u_x1", "u_x2", "u_x1x1", "u_x2x2",
            "l", "Lu", "Lu_id", "scale_L", "scale_u", "scale_x1",
            "scale_x2", "scale_t"]
    out = {k: np.zeros(tf.shape) for k in keys}
    out["l"] = np.ones(tf.shape)

    if force_segment is not None:
        if int(force_segment) == 0:
            seg = _eval_v1_arrays(seqs, tf, x1f, ref=log_scale_ref)
        else:
            idx = int(force_segment) - 1
            if not (0 <= idx < seqs.n_segments):
                raise PlissError(
                    f"segment {force_segment} outside 0..{seqs.n_segments}")
            seg = _eval_segment_arrays(seqs, cuts, tf, x1f, x2f,
                                       np.full(tf.shape, idx, dtype=int),
                                       ref=log_scale_ref)
        for k in keys:
            out[k] = np.broadcast_to(np.asarray(seg[k], dtype=float),
                                     tf.shape).copy()
        return _finalize_fields(pc, out, shape)

    m_zero = tf >= 0.0
    m_v1 = tf <= a[0]
    m_seg = ~(m_zero | m_v1)
    if np.any(m_seg):
        pos = np.searchsorted(a, tf[m_seg], side="right") - 1
        beyond = pos >= seqs.n_segments
        if np.any(beyond):
            if not seqs.zero_extension_ok:
                raise HorizonError(
                    "t beyond the built horizon and the truncation tail is "
                    "not negligible; rebuild with more segments")
            # zero extension: fields stay zero there
            keep = ~beyond
            sub = np.flatnonzero(m_seg)[keep]
            pos = pos[keep]
        else:
            sub = np.flatnonzero(m_seg)
        if len(sub):
            seg = _eval_segment_arrays(seqs, cuts, tf[sub], x1f[sub],
                                       x2f[sub], pos)
            for k in keys:
                out[k][sub] = seg[k]
    if np.any(m_v1):
        v1 = _eval_v1_arrays(seqs, tf[m_v1], x1f[m_v1])
        for k in keys:
            out[k][m_v1] = v1[k]
    return _finalize_fields(pc, out, shape)


def _finalize_fields(pc: PlissConstruction, f: dict, shape) -> dict:
    reflected = pc.orientation is Orientation.REFLECTED
    u, u_x1, u_x2 = f["u"], f["u_x1"], f["u_x2"]
    Lu = f["Lu"]
    D = u**2 + u_x1**2 + u_x2**2
    scale_D = f["scale_u"]**2 + f["scale_x1"]**2 + f["scale_x2"]**2
    guard_D = _TINY + 1e-14 * scale_D
    guard_L = _TINY + 1e-14 * f["scale_L"]
    ok = D > guard_D
    degenerate = (~ok) & (np.abs(Lu) > guard_L)
    factor = np.where(ok, -Lu / np.where(ok, D, 1.0), 0.0)
    b1 = factor * u_x1
    b2 = factor * u_x2
    c = factor * u

    # construction: u_t - u_x1x1 - l u_x2x2 + b.grad u + c u;
    # reflected:    u_t + u_x1x1 + l u_x2x2 + b.grad u + c u with u_t, b, c
    # sign-flipped, which is exactly minus the construction expression.
    u_t = -f["u_t"] if reflected else f["u_t"]
    residual = Lu + b1 * u_x1 + b2 * u_x2 + c * u
    if reflected:
        residual = -residual
    res_scale = (np.abs(u_t) + np.abs(f["u_x1x1"]) + np.abs(f["l"] * f["u_x2x2"])
                 + np.abs(b1 * u_x1) + np.abs(b2 * u_x2) + np.abs(c * u))
    residual_rel = np.abs(residual) / np.maximum(res_scale, _TINY)
    gap_scale = (np.abs(f["u_t"]) + np.abs(f["u_x1x1"])
                 + np.abs(f["l"] * f["u_x2x2"]) + f["scale_L"] + _TINY)
    lu_gap_rel = np.abs(Lu - f["Lu_id"]) / gap_scale

    out = {
        "log_scale": f["log_scale"].reshape(shape),
        "u": f["u"].reshape(shape),
        "u_t": u_t.reshape(shape),
        "u_x1": u_x1.reshape(shape),
        "u_x2": u_x2.reshape(shape),
        "u_x1x1": f["u_x1x1"].reshape(shape),
        "u_x2x2": f["u_x2x2"].reshape(shape),
        "l": f["l"].reshape(shape),
        "b1": (-b1 if reflected else b1).reshape(shape),
        "b2": (-b2 if reflected else b2).reshape(shape),
        "c": (-c if reflected else c).reshape(shape),
        "Lu": (-Lu if reflected else Lu).reshape(shape),
        "residual": residual.reshape(shape),
        "residual_rel": residual_rel.reshape(shape),
        "lu_gap_rel": lu_gap_rel.reshape(shape),
        "degenerate": degenerate.reshape(shape),
        "scale_t": f["scale_t"].reshape(shape),
    }
    return out


def _safe_exp(x: float) -> float:
    if x > 709.0:
        return math.inf
    if x < -745.0:
        return 0.0
    return math.exp(x)


def eval_solution(pc: PlissConstruction, t: float, x1: float,
                  x2: float) -> PointEval:
    """Evaluate the solution and coefficients at one point.

    The plain-float fields honestly leave double range deep in the
    construction; the scaled view stays finite.
    """
    f = eval_fields(pc, float(t), float(x1), float(x2))
    ls = float(f["log_scale"])
    s = _safe_exp(ls)

    def lift(key):
        v = float(f[key])
        return v * s if v != 0.0 else 0.0

    scaled = ScaledPointEval(
        log_scale=ls, u=float(f["u"]), u_t=float(f["u_t"]),
        u_x1=float(f["u_x1"]), u_x2=float(f["u_x2"]),
        u_x1x1=float(f["u_x1x1"]), u_x2x2=float(f["u_x2x2"]),
        Lu=float(f["Lu"]), residual=float(f["residual"]),
        residual_rel=float(f["residual_rel"]))
    return PointEval(
        t=float(t), x1=float(x1), x2=float(x2),
        u=lift("u"), u_t=lift("u_t"), u_x1=lift("u_x1"), u_x2=lift("u_x2"),
        u_x1x1=lift("u_x1x1"), u_x2x2=lift("u_x2x2"),
        l=float(f["l"]), b1=float(f["b1"]), b2=float(f["b2"]),
        c=float(f["c"]), Lu=lift("Lu"), residual=lift("residual"),
        scaled=scaled)


def _eval_l_seqs(seqs: PlissSequences, cuts: CutoffFamily, tf: np.ndarray):
    out = np.ones_like(tf)
    m_seg = (tf > seqs.a[0]) & (tf < 0.0)
    if np.any(m_seg):
        pos = np.searchsorted(seqs.a, tf[m_seg], side="right") - 1
        inside = pos < seqs.n_segments
        sub = np.flatnonzero(m_seg)[inside]
        pos = pos[inside]
        if len(sub):
            s = (tf[sub] - seqs.a[pos]) / seqs.r[pos]
            out[sub] = 1.0 + cuts.dJ(s) * seqs.p[pos] / (seqs.r[pos] * seqs.z[pos])
    return out


def eval_l(pc: PlissConstruction, t):
    """The time coefficient l; vectorized, 1 outside the glued segments."""
    reflected = pc.orientation is Orientation.REFLECTED
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    shape = t_arr.shape
    tf = (-t_arr if reflected else t_arr).ravel()
    out = _eval_l_seqs(pc.seqs, pc.cuts, tf)
    if np.isscalar(t) or np.asarray(t).ndim == 0:
        return float(out[0])
    return out.reshape(shape)


def eval_lower_order(pc: PlissConstruction, t: float, x1: float,
                     x2: float) -> tuple[float, float, float]:
    """(b1, b2, c) at one point; (0, 0, 0) on the zero set of the solution."""
    f = eval_fields(pc, float(t), float(x1), float(x2))
    return float(f["b1"]), float(f["b2"]), float(f["c"])


def l_time_function(pc: PlissConstruction) -> TimeFunction:
    """The coefficient l as a mollification test family (defined on all R)."""
    return TimeFunction(name=f"pliss-l:{pc.seqs.mu.name}:k0={pc.seqs.k0}",
                        fn=lambda t: eval_l(pc, t))


def l_from_sequences(seqs: PlissSequences,
                     cuts: CutoffFamily | None = None) -> TimeFunction:
    """The coefficient l built from raw sequences, bypassing the
    parabolicity gate.

    Useful as a modulus-regular mollification test function at small k0,
    where the segment scales are coarse enough to be resolvable; the
    resulting l is still modulus-continuous but not uniformly parabolic.
    """
    cuts = cuts or make_cutoffs()

    def f(t):
        t = np.asarray(t, dtype=float)
        shape = t.shape
        out = _eval_l_seqs(seqs, cuts, t.ravel())
        return out.reshape(shape)

    return TimeFunction(name=f"pliss-l:{seqs.mu.name}:k0={seqs.k0}", fn=f)


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------

def _log_decay_row(seqs: PlissSequences, base_log: np.ndarray, check_id: str,
                   anchor: str) -> CheckRow:
    """Decay of exp(base) * z_{n+1}^al * p_n^be * r_n^-ga for al,be,ga in 1..3.

    Monotone decrease of the log along n, for every exponent triple, is the
    desk-scale witness that the quantity tends to zero.
    """
    N = seqs.n_segments
    lz = np.log(seqs.z[1:N + 1])
    lp = np.log(seqs.p)
    lr = np.log(seqs.r)
    worst_inc = -math.inf
    drop = math.inf
    for al in (1.0, 2.0, 3.0):
        for be in (1.0, 2.0, 3.0):
            for ga in (1.0, 2.0, 3.0):
                h = base_log + al * lz + be * lp - ga * lr
                worst_inc = max(worst_inc, float(np.max(np.diff(h))))
                drop = min(drop, float(h[0] - h[-1]))
    passed = worst_inc < 0.0
    return CheckRow(check_id, anchor, measured=worst_inc, threshold=0.0,
                    passed=passed,
                    detail=f"worst log increment {worst_inc:.4g}, "
                           f"smallest total log drop {drop:.4g}")


def verify_conditions(pc: PlissConstruction,
                      n_max: int | None = None) -> VerificationReport:
    """Check the sequence conditions and closed-form bounds, one row each."""
    seqs, cuts = pc.seqs, pc.cuts
    N = min(n_max or seqs.n_segments, seqs.n_segments)
    a, r, z, q, p = (seqs.a[:N + 1], seqs.r[:N], seqs.z[:N + 2],
                     seqs.q[:N + 1], seqs.p[:N])
    k0 = seqs.k0
    m = k0 + np.arange(1, N + 1, dtype=float)
    c_lin = seqs.c_lin
    mu = seqs.mu
    rows = []

    rows.append(CheckRow("nodes-ordered", "(4.1)",
                         measured=float(a[-1]), threshold=0.0,
                         passed=bool(a[0] > -1.0 and np.all(np.diff(a) > 0)
                                     and a[-1] < 0.0),
                         detail=f"a_1={a[0]:.6g}, a_(N+1)={a[-1]:.6g}"))
    rows.append(CheckRow("frequencies-ordered", "(4.2)",
                         measured=float(z[0]), threshold=1.0,
                         passed=bool(z[0] > 1.0 and np.all(np.diff(z) > 0))))
    rows.append(CheckRow("gap-products", "(4.3)",
                         measured=float(p.min()), threshold=1.0,
                         passed=bool(np.all(p > 1.0))))

    sub = PlissSequences(mu, k0, N, a, r, z, q, seqs.q_lo[:N + 1], p, c_lin,
                         seqs.tail_bound_log)
    rows.append(_log_decay_row(sub, -q[:N] + 2.0 * p, "solution-decay", "(4.4)"))

    ratio = p / (r * z[:N])
    bound45 = 1.0 / (2.0 * cuts.j_prime_sup)
    rows.append(CheckRow("parabolicity-sup", "(4.5)",
                         measured=float(ratio.max()), threshold=bound45,
                         passed=bool(ratio.max() <= bound45 * (1 + 1e-12))))

    chain = ratio / np.asarray(mu.fn(r), dtype=float)
    rows.append(CheckRow("regularity-ratio-finite", "(4.6)",
                         measured=float(chain.max()), threshold=math.inf,
                         passed=bool(np.all(np.isfinite(chain)))))
    rows.append(CheckRow("regularity-chain", "(4.6)-chain",
                         measured=float(chain.max()), threshold=7.0,
                         passed=bool(chain.max() <= 7.0)))

    rows.append(_log_decay_row(sub, -p, "coefficient-decay", "(4.7)"))

    bound_q = ((m + 1.0) * m - (k0 + 3.0) * (k0 + 2.0)) / 2.0
    margin = q[1:N] - bound_q[1:]             # q_n vs bound_n for n = 2..N
    rows.append(CheckRow("partial-sum-lower", "(4.9)",
                         measured=float(margin.min()), threshold=0.0,
                         passed=bool(np.all(margin >= 0.0))))

    lo10 = 3.0 * np.sqrt(m)
    hi10 = 3.0 / c_lin * (m + 2.0)
    marg10 = min(float((p - lo10).min()), float((hi10 - p).min()))
    rows.append(CheckRow("gap-product-bracket", "(4.10)",
                         measured=marg10, threshold=0.0,
                         passed=marg10 >= -1e-12 * float(p.max())))

    lo11 = m ** -1.5
    hi11 = 1.0 / (c_lin * m)
    marg11 = min(float((r - lo11).min() / lo11.max()),
                 float((hi11 - r).min() / hi11.max()))
    rows.append(CheckRow("gap-bracket", "(4.11)",
                         measured=marg11, threshold=0.0,
                         passed=marg11 >= -1e-10))

    ident = (3.0 * m**2 + 3.0 * m + 1.0) / m**3
    closed = 3.0 / m + 3.0 / m**2 + 1.0 / m**3
    gap412 = float(np.max(np.abs(ratio - closed) / closed))
    rows.append(CheckRow("ratio-identity", "(4.12)",
                         measured=gap412, threshold=1e-12,
                         passed=gap412 <= 1e-12,
                         detail=f"stored ratio vs closed form; polynomial form "
                                f"gap {float(np.max(np.abs(ident - closed)/closed)):.3g}"))

    premise = r * m
    rows.append(CheckRow("gap-premise", "r-premise",
                         measured=float(premise.max()), threshold=1.0,
                         passed=bool(premise.max() <= 1.0 + 1e-12)))

    lhs13 = np.asarray(mu.fn(r), dtype=float) / r
    rhs13 = np.asarray(mu.fn(1.0 / m), dtype=float) * m
    marg13 = float(((lhs13 - rhs13) / rhs13).min())
    rows.append(CheckRow("gap-modulus-ratio", "(4.13)",
                         measured=marg13, threshold=0.0,
                         passed=marg13 >= -1e-10))

    return VerificationReport(module="pliss", rows=rows,
                              context={"modulus": mu.name, "k0": k0,
                                       "segments": N,
                                       "j_prime_sup": cuts.j_prime_sup})


def _snap(v: float, grid: float) -> float:
    return float(np.round(v / grid) * grid)


def fd_cross_check(pc: PlissConstruction, points: int = 200,
                   seed: int = 11, rel_step: float = 1e-4) -> float:
    """Worst relative gap between closed-form derivatives and 4th-order
    centered differences of the solution, against the local magnitude scale.

    Steps are rel_step times the local scales 1/z_n (time) and
    1/sqrt(z_{n+1}) (space).  Stencil nodes are snapped to dyadic grids so
    the steps are exact in floating point, and the x offsets stay within a
    few local wavelengths: at phases sqrt(z) x ~ 1e4 the trig-argument
    rounding alone would swamp any second-difference at this step size.
    """
    rng = np.random.default_rng(seed)
    seqs = pc.seqs
    raw = pc if pc.orientation is Orientation.CONSTRUCTION else pc.reflected()
    worst = 0.0
    segs = rng.integers(1, seqs.n_segments + 1, points)
    ss = rng.uniform(0.05, 0.95, points)
    gt = 2.0**-48
    w5 = np.array([-2.0, -1.0, 0.0, 1.0, 2.0])
    for n, s in zip(segs, ss):
        i = int(n) - 1
        sz = math.sqrt(float(seqs.z[i + 1]))
        gx = 2.0 ** math.floor(math.log2(rel_step * 1e-3 / sz))
        tc = _snap(float(seqs.a[i] + s * seqs.r[i]), gt)
        x1c, x2c = (_snap(float(v) / sz, gx) for v in rng.uniform(0.05, 3.0, 2))
        probe = eval_fields(raw, tc, x1c, x2c, force_segment=int(n))
        ref = float(probe["log_scale"])
        f0 = eval_fields(raw, tc, x1c, x2c, force_segment=int(n),
                         log_scale_ref=ref)
        den = float(f0["scale_t"]) + _TINY
        h = max(_snap(rel_step / float(seqs.z[i + 1]), gt), gt)
        ft = eval_fields(raw, tc + h * w5[[0, 1, 3, 4]], np.full(4, x1c),
                         np.full(4, x2c), force_segment=int(n),
                         log_scale_ref=ref)
        fd = (ft["u"][0] - 8 * ft["u"][1] + 8 * ft["u"][2] - ft["u"][3]) / (12 * h)
        worst = max(worst, abs(fd - float(f0["u_t"])) / den)
        hx = max(_snap(rel_step / sz, gx), gx)
        for axis, key in ((1, "u_x1x1"), (2, "u_x2x2")):
            xs1 = x1c + hx * w5 if axis == 1 else np.full(5, x1c)
            xs2 = x2c + hx * w5 if axis == 2 else np.full(5, x2c)
            fx = eval_fields(raw, np.full(5, tc), xs1, xs2,
                             force_segment=int(n), log_scale_ref=ref)
            fd2 = (-fx["u"][0] + 16 * fx["u"][1] - 30 * fx["u"][2]
                   + 16 * fx["u"][3] - fx["u"][4]) / (12 * hx**2)
            worst = max(worst, abs(fd2 - float(f0[key])) / den)
    return worst


def junction_continuity_gap(pc: PlissConstruction, junctions=None,
                            seed: int = 3, x_samples: int = 8) -> float:
    """Worst relative field gap across segment junctions.

    Both sides are evaluated with the branch pinned and a shared log scale;
    the gluing coefficients make the one-sided formulas agree exactly, so
    anything beyond rounding is a sequencing bug.
    """
    rng = np.random.default_rng(seed)
    seqs = pc.seqs
    raw = pc if pc.orientation is Orientation.CONSTRUCTION else pc.reflected()
    if junctions is None:
        junctions = sorted({1, 2, seqs.n_segments - 1,
                            *rng.integers(1, seqs.n_segments,
                                          size=8).tolist()})
    worst = 0.0
    for n in junctions:
        tj = float(seqs.a[n])
        x1 = rng.uniform(0, 2 * math.pi, x_samples)
        x2 = rng.uniform(0, 2 * math.pi, x_samples)
        probe = eval_fields(raw, np.full(x_samples, tj), x1, x2,
                            force_segment=int(n))
        ref = float(probe["log_scale"][0])
        fa = eval_fields(raw, np.full(x_samples, tj), x1, x2,
                         force_segment=int(n), log_scale_ref=ref)
        fb = eval_fields(raw, np.full(x_samples, tj), x1, x2,
                         force_segment=int(n) + 1, log_scale_ref=ref)
        for key in ("u", "u_t", "u_x1", "u_x2", "u_x1x1", "u_x2x2"):
            scale = max(float(np.max(np.abs(fa[key]))),
                        float(np.max(np.abs(fb[key]))), _TINY)
            worst = max(worst, float(np.max(np.abs(fa[key] - fb[key]))) / scale)
        worst = max(worst, float(np.max(np.abs(fa["l"] - fb["l"]))))
    return worst


def verify_cmu_regularity(pc: PlissConstruction, pair_count: int = 2000,
                          rng: np.random.Generator | None = None,
                          ) -> VerificationReport:
    """Sampled Hoelder-type ratio sup |l(t)-l(s)| / mu(|t-s|).

    Pairs are stratified within segments, across segments, and near the
    support boundary.  The pass threshold is twice the theoretical bound
    max(2||J'||, ||J''||) * sup_n chain_n inflated by the junction-distance
    factor, a crude but honest ceiling.
    """
    rng = rng or np.random.default_rng(0)
    seqs, cuts = pc.seqs, pc.cuts
    N = seqs.n_segments
    mu = seqs.mu
    third = pair_count // 3

    seg = rng.integers(0, min(N, 400), size=third)
    s1 = rng.uniform(0.0, 1.0, size=third)
    s2 = rng.uniform(0.0, 1.0, size=third)
    t_a = seqs.a[seg] + s1 * seqs.r[seg]
    t_b = seqs.a[seg] + s2 * seqs.r[seg]

    seg1 = rng.integers(0, min(N, 400), size=third)
    seg2 = rng.integers(0, min(N, 400), size=third)
    t_c = seqs.a[seg1] + rng.uniform(0, 1, third) * seqs.r[seg1]
    t_d = seqs.a[seg2] + rng.uniform(0, 1, third) * seqs.r[seg2]

    rest = pair_count - 2 * third
    t_e = seqs.a[-1] + rng.uniform(0.0, 1e-3, rest) * (-seqs.a[-1])
    t_f = rng.uniform(0.0, 0.5, rest)

    ts = np.concatenate([t_a, t_c, t_e])
    ss = np.concatenate([t_b, t_d, t_f])
    keep = np.abs(ts - ss) > 1e-300
    ts, ss = ts[keep], ss[keep]
    lt = eval_l(pc, ts) if pc.orientation is Orientation.CONSTRUCTION \
        else eval_l(pc, -ts)
    lsv = eval_l(pc, ss) if pc.orientation is Orientation.CONSTRUCTION \
        else eval_l(pc, -ss)
    gaps = np.abs(ts - ss)
    gaps = np.minimum(gaps, 1.0)
    ratios = np.abs(lt - lsv) / np.asarray(mu.fn(gaps), dtype=float)
    measured = float(ratios.max())

    chain = (seqs.p / (seqs.r * seqs.z[:N])) / np.asarray(mu.fn(seqs.r), dtype=float)
    theory = max(12.0 * cuts.j_prime_sup, cuts.j_second_sup) * float(chain.max())
    rows = [CheckRow("cmu-ratio", "(4.6)", measured=measured,
                     threshold=2.0 * theory,
                     passed=measured <= 2.0 * theory,
                     detail=f"pairs={len(ts)}, theory bound {theory:.4g}")]
    return VerificationReport(module="pliss", rows=rows,
                              context={"modulus": mu.name, "pairs": len(ts)})


# ---------------------------------------------------------------------------
# export
# ---------------------------------------------------------------------------

def _parse_axis(spec: str) -> np.ndarray:
    lo, hi, num = spec.split(":")
    return np.linspace(float(lo), float(hi), int(num))


def export_construction(pc: PlissConstruction, grid_spec: str, path,
                        fmt: str = "csv") -> dict:
    """Write (t, x1, x2, u, l, b1, b2, c, residual) records for a grid.

    grid_spec is "t0:t1:nt,x10:x11:nx1,x20:x21:nx2".  The residual column
    is the scale-relative equation residual (the absolute one underflows).
    Returns the metadata dict (also written next to CSV output).
    """
    import json as _json

    parts = grid_spec.split(",")
    if len(parts) != 3:
        raise PlissError("grid spec must have three axes t,x1,x2")
    t_ax, x1_ax, x2_ax = (_parse_axis(p) for p in parts)
    tt, xx1, xx2 = np.meshgrid(t_ax, x1_ax, x2_ax, indexing="ij")
    f = eval_fields(pc, tt, xx1, xx2)
    with np.errstate(over="ignore", under="ignore", invalid="ignore"):
        # honest under/overflow; a zero mantissa is zero at any scale
        u_plain = np.where(f["u"] == 0.0, 0.0,
                           np.exp(f["log_scale"]) * f["u"])
    meta = {
        "orientation": pc.orientation.value,
        "support": "t >= 0" if pc.orientation is Orientation.REFLECTED
                   else "t <= 0",
        "modulus": pc.seqs.mu.name,
        "k0": pc.seqs.k0,
        "segments": pc.seqs.n_segments,
        "rows": int(tt.size),
        "columns": ["t", "x1", "x2", "u", "l", "b1", "b2", "c", "residual"],
        "residual_column": "relative to the local magnitude scale",
    }
    path = str(path)
    if fmt == "csv":
        cols = np.column_stack([tt.ravel(), xx1.ravel(), xx2.ravel(),
                                u_plain.ravel(), f["l"].ravel(),
                                f["b1"].ravel(), f["b2"].ravel(),
                                f["c"].ravel(), f["residual_rel"].ravel()])
        header = ",".join(meta["columns"])
        np.savetxt(path, cols, delimiter=",", header=header, comments="",
                   fmt="%.17g")
        with open(path + ".meta.json", "w") as fh:
            _json.dump(meta, fh, sort_keys=True, indent=2)
    elif fmt == "json":
        payload = dict(meta)
        payload["records"] = {
            "t": tt.ravel().tolist(), "x1": xx1.ravel().tolist(),
            "x2": xx2.ravel().tolist(), "u": u_plain.ravel().tolist(),
            "l": f["l"].ravel().tolist(), "b1": f["b1"].ravel().tolist(),
            "b2": f["b2"].ravel().tolist(), "c": f["c"].ravel().tolist(),
            "residual": f["residual_rel"].ravel().tolist(),
        }
        with open(path, "w") as fh:
            _json.dump(payload, fh, sort_keys=True)
    else:
        raise PlissError(f"unknown export format {fmt!r}")
    return meta
