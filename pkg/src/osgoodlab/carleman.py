"""Weight functions built from a divergent modulus, and the large-parameter
inequality probe.

For an Osgood-divergent modulus mu the primitive weight is

    phi(t)   = integral of 1/mu over [1/t, 1],      t >= 1,
    Phi(tau) = integral of phi^{-1} over [0, tau],

so Phi' = phi^{-1} >= 1 and Phi'' satisfies the exact identity

    Phi''(tau) = (Phi'(tau))^2 * mu(1 / Phi'(tau)).

phi is tabulated by cumulative quadrature on a log-spaced grid and inverted
by monotone bracketing; Phi integrates the cubic Hermite interpolant of
phi^{-1} (node derivatives are known in closed form), and Phi'' is *defined*
by the identity in downstream use.  Finite-difference comparisons of both
derivative relations are build-time self-checks: if they fail at the stated
tolerances the table is rebuilt on a finer grid.

The inequality probe evaluates both sides of the conjugated weighted
estimate on sampled families.  Its output is heuristic evidence only: the
report language says "consistent with", never "proves".
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .bump import smoothstep, smoothstep_d1
from .dyadic import GridField, dealiased_product, grid_coordinates, spectral_derivative
from .modulus import Modulus, OsgoodClass
from .report import CheckRow, VerificationReport

__all__ = [
    "WeightTable",
    "WeightError",
    "TableRangeError",
    "WeightOverflowError",
    "IdentityResidualError",
    "build_phi",
    "build_Phi",
    "build_weight_table",
    "invert_phi",
    "weight_value",
    "weight_table_report",
    "CarlemanProbeConfig",
    "CarlemanProbeReport",
    "probe_carleman",
]


class WeightError(ValueError):
    """Invalid weight-table construction or arguments."""


class TableRangeError(WeightError):
    """Requested argument lies outside the tabulated range."""


class WeightOverflowError(WeightError):
    """The weight exponent exceeds the double-precision range."""


class IdentityResidualError(RuntimeError):
    """The curvature identity self-check failed after grid refinement."""


# ---------------------------------------------------------------------------
# cubic Hermite helpers (node derivatives known in closed form)
# ---------------------------------------------------------------------------

def _hermite_eval(x, y, d, xq):
    xq = np.asarray(xq, dtype=float)
    i = np.clip(np.searchsorted(x, xq, side="right") - 1, 0, len(x) - 2)
    h = x[i + 1] - x[i]
    u = (xq - x[i]) / h
    h00 = (1.0 + 2.0 * u) * (1.0 - u) ** 2
    h10 = u * (1.0 - u) ** 2
    h01 = u**2 * (3.0 - 2.0 * u)
    h11 = u**2 * (u - 1.0)
    return h00 * y[i] + h10 * h * d[i] + h01 * y[i + 1] + h11 * h * d[i + 1]


def _hermite_panel_integrals(x, y, d):
    h = np.diff(x)
    return h * (0.5 * (y[:-1] + y[1:]) + h * (d[:-1] - d[1:]) / 12.0)


def _hermite_partial_integral(x, y, d, xq):
    """Integral of the Hermite interpolant from x[i] to xq (same panel)."""
    xq = np.asarray(xq, dtype=float)
    i = np.clip(np.searchsorted(x, xq, side="right") - 1, 0, len(x) - 2)
    h = x[i + 1] - x[i]
    u = (xq - x[i]) / h
    H00 = u - u**3 + 0.5 * u**4
    H10 = 0.5 * u**2 - 2.0 * u**3 / 3.0 + 0.25 * u**4
    H01 = u**3 - 0.5 * u**4
    H11 = 0.25 * u**4 - u**3 / 3.0
    return i, h * (H00 * y[i] + H10 * h * d[i] + H01 * y[i + 1] + H11 * h * d[i + 1])


_FD6 = np.array([-1.0, 9.0, -45.0, 0.0, 45.0, -9.0, 1.0]) / 60.0


def _uniform_fd6(y, h):
    """6th-order first derivative at interior nodes of a uniform grid."""
    return np.convolve(y, _FD6[::-1], mode="valid") / h


def _local_poly_derivative(x, y, half=3):
    """First derivative at interior nodes of a smooth nonuniform table."""
    n = len(x)
    out = np.full(n, np.nan)
    for i in range(half, n - half):
        xs = x[i - half:i + half + 1] - x[i]
        scale = np.max(np.abs(xs))
        c = np.polynomial.polynomial.polyfit(xs / scale, y[i - half:i + half + 1],
                                             2 * half)
        out[i] = c[1] / scale
    return out


# ---------------------------------------------------------------------------
# the weight table
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WeightTable:
    """Tabulated phi, phi^{-1}, Phi with closed-form node derivatives.

    t_nodes are log-spaced on [1, t_max]; tau_nodes[i] = phi(t_nodes[i])
    with tau_nodes[0] = 0 exactly.  Phi_nodes (present once build_Phi has
    run) hold the cumulative integral of phi^{-1}.
    """

    mu: Modulus
    t_max: float
    quad_tol: float
    t_nodes: np.ndarray
    tau_nodes: np.ndarray
    phi_prime_nodes: np.ndarray
    Phi_nodes: np.ndarray | None = None
    interpolation_order: int = 3  # cubic Hermite with closed-form slopes

    @property
    def tau_max(self) -> float:
        return float(self.tau_nodes[-1])

    def phi(self, t):
        """phi by Hermite interpolation in y = log t."""
        t = np.asarray(t, dtype=float)
        if np.any(t < 1.0) or np.any(t > self.t_max * (1 + 1e-12)):
            raise TableRangeError("phi argument outside [1, t_max]")
        y = np.log(self.t_nodes)
        dtau_dy = self.t_nodes * self.phi_prime_nodes
        return _hermite_eval(y, self.tau_nodes, dtau_dy, np.log(t))

    def phi_inverse(self, tau):
        """phi^{-1} by Hermite interpolation on the tau table."""
        tau = np.asarray(tau, dtype=float)
        if np.any(tau < 0.0) or np.any(tau > self.tau_max * (1 + 1e-12)):
            raise TableRangeError("tau outside [0, tau_max]")
        dt_dtau = 1.0 / self.phi_prime_nodes
        return _hermite_eval(self.tau_nodes, self.t_nodes, dt_dtau, tau)

    def Phi(self, tau):
        if self.Phi_nodes is None:
            raise WeightError("Phi not built yet; call build_Phi")
        tau_arr = np.asarray(tau, dtype=float)
        if np.any(tau_arr < 0.0) or np.any(tau_arr > self.tau_max * (1 + 1e-12)):
            raise TableRangeError("tau outside [0, tau_max]")
        dt_dtau = 1.0 / self.phi_prime_nodes
        i, partial = _hermite_partial_integral(self.tau_nodes, self.t_nodes,
                                               dt_dtau, tau_arr)
        return self.Phi_nodes[i] + partial

    def Phi1(self, tau):
        """Phi' = phi^{-1}."""
        return self.phi_inverse(tau)

    def Phi2(self, tau):
        """Phi'', defined by the curvature identity (exact, not differenced)."""
        p1 = np.asarray(self.phi_inverse(tau), dtype=float)
        return p1**2 * np.asarray(self.mu.fn(1.0 / p1), dtype=float)


def _phi_prime(mu: Modulus, t: np.ndarray) -> np.ndarray:
    return 1.0 / (t**2 * np.asarray(mu.fn(1.0 / t), dtype=float))


def build_phi(mu: Modulus, t_max: float, quad_tol: float = 1e-9,
              nodes: int | None = None) -> WeightTable:
    """Tabulate phi on a log-spaced grid by cumulative panel quadrature.

    Rejects non-divergent moduli.  A 6th-order finite-difference comparison
    of the table against the closed-form derivative
    phi'(t) = 1 / (t^2 mu(1/t)) must hold at interior nodes within
    10*quad_tol relative, else WeightError is raised (callers may retry on
    a finer grid; build_weight_table does so automatically).
    """
    if mu.osgood_class is not OsgoodClass.DIVERGENT:
        raise WeightError(
            f"weight construction needs a divergent modulus, got {mu.osgood_class.value}")
    if t_max < 2.0:
        raise WeightError("t_max must be at least 2")
    y_max = math.log(t_max)
    M = nodes or max(193, int(math.ceil(y_max / 0.015)) + 1)
    y = np.linspace(0.0, y_max, M)
    t = np.exp(y)
    t[0], t[-1] = 1.0, t_max

    f = lambda s: 1.0 / float(mu.fn(s))
    increments = np.empty(M - 1)
    for i in range(M - 1):
        lo, hi = 1.0 / t[i + 1], 1.0 / t[i]
        increments[i], _ = quad(f, lo, hi, epsabs=quad_tol * 0.05 / M,
                                epsrel=1e-13, limit=200)
    tau = np.concatenate([[0.0], np.cumsum(increments)])
    pp = _phi_prime(mu, t)

    # self-check: FD of the table in y versus t * phi'(t)
    h = y[1] - y[0]
    fd = _uniform_fd6(tau, h)
    exact = (t * pp)[3:-3]
    rel = np.max(np.abs(fd - exact) / np.abs(exact))
    if rel > 10.0 * quad_tol:
        raise WeightError(
            f"phi derivative self-check failed: {rel:.3e} > {10*quad_tol:.1e} "
            f"(nodes={M})")
    return WeightTable(mu=mu, t_max=float(t_max), quad_tol=float(quad_tol),
                       t_nodes=t, tau_nodes=tau, phi_prime_nodes=pp)


def build_Phi(wt: WeightTable, identity_rtol: float = 1e-6) -> WeightTable:
    """Augment the table with Phi and run the curvature self-checks.

    Phi integrates the Hermite interpolant of phi^{-1} panel by panel.
    Phi'' is computed two ways at interior nodes: a local polynomial
    derivative of Phi' on the tau grid, and the right side of the curvature
    identity; they must agree within identity_rtol relative.  Monotone
    growth of the identity side is verified on the sampled range.
    """
    dt_dtau = 1.0 / wt.phi_prime_nodes
    panels = _hermite_panel_integrals(wt.tau_nodes, wt.t_nodes, dt_dtau)
    Phi_nodes = np.concatenate([[0.0], np.cumsum(panels)])

    p1 = wt.t_nodes
    if np.any(np.diff(p1) <= 0.0) or p1[0] < 1.0 - 1e-12:
        raise IdentityResidualError("phi^{-1} table is not >= 1 and increasing")
    rhs = p1**2 * np.asarray(wt.mu.fn(1.0 / p1), dtype=float)
    fd = _local_poly_derivative(wt.tau_nodes, p1)
    interior = slice(3, len(p1) - 3)
    rel = np.max(np.abs(fd[interior] - rhs[interior]) / np.abs(rhs[interior]))
    if rel > identity_rtol:
        raise IdentityResidualError(
            f"curvature identity residual {rel:.3e} exceeds {identity_rtol:.1e}")
    growth = np.diff(rhs)
    if np.any(growth < -1e-12 * rhs.max()):
        raise IdentityResidualError("Phi'' fails to grow on the sampled range")
    return replace(wt, Phi_nodes=Phi_nodes)


def build_weight_table(mu: Modulus, t_max: float,
                       quad_tol: float = 1e-9) -> WeightTable:
    """build_phi + build_Phi with node doubling until the self-checks pass."""
    y_max = math.log(max(t_max, 2.0))
    M = max(193, int(math.ceil(y_max / 0.015)) + 1)
    last_err: Exception | None = None
    for _ in range(5):
        try:
            return build_Phi(build_phi(mu, t_max, quad_tol, nodes=M))
        except (WeightError, IdentityResidualError) as exc:
            last_err = exc
            M = 2 * (M - 1) + 1
    raise IdentityResidualError(
        f"weight table failed self-checks up to {M} nodes: {last_err}")


def invert_phi(wt: WeightTable, tau: float) -> float:
    """Solve phi(t) = tau by bracketing on the table plus local quadrature.

    The returned t satisfies |phi(t) - tau| <= quad_tol, with the residual
    measured against a fresh quadrature from the nearest node (not just the
    interpolant).  phi^{-1}(0) = 1 exactly.
    """
    tau = float(tau)
    if tau < 0.0 or tau > wt.tau_max * (1 + 1e-12):
        raise TableRangeError(f"tau={tau} outside [0, {wt.tau_max}]")
    if tau == 0.0:
        return 1.0
    i = int(np.clip(np.searchsorted(wt.tau_nodes, tau, side="right") - 1,
                    0, len(wt.tau_nodes) - 2))
    f = lambda s: 1.0 / float(wt.mu.fn(s))
    t_lo, t_hi = wt.t_nodes[i], wt.t_nodes[i + 1]
    tau_lo = wt.tau_nodes[i]

    def resid(t):
        piece, _ = quad(f, 1.0 / t, 1.0 / t_lo, epsabs=wt.quad_tol * 1e-3,
                        epsrel=1e-13, limit=200)
        return tau_lo + piece - tau

    if resid(t_hi) < 0.0:  # guard against interpolation edge rounding
        t_hi *= 1.0 + 1e-12
    root = brentq(resid, t_lo, t_hi, xtol=1e-14 * t_hi, rtol=8.9e-16)
    if abs(resid(root)) > wt.quad_tol:
        raise WeightError("inversion residual exceeds quad_tol")
    return float(root)


_EXP_MAX = 709.0


def weight_value(wt: WeightTable, gamma: float, T: float, t: float) -> float:
    """exp((2/gamma) * Phi(gamma*(T - t))), decreasing in t, equal to 1 at t=T.

    Raises TableRangeError when gamma*(T-t) leaves the table and
    WeightOverflowError (distinct) when the exponent leaves double range.
    """
    if gamma <= 0.0 or T <= 0.0:
        raise WeightError("gamma and T must be positive")
    if t < 0.0 or t > T:
        raise WeightError(f"t={t} outside [0, T]")
    tau = gamma * (T - t)
    if tau > wt.tau_max * (1 + 1e-12):
        raise TableRangeError(
            f"gamma*(T-t)={tau:.6g} exceeds tau_max={wt.tau_max:.6g}")
    expo = (2.0 / gamma) * float(wt.Phi(tau))
    if expo > _EXP_MAX:
        raise WeightOverflowError(f"weight exponent {expo:.6g} overflows")
    return math.exp(expo)


def weight_table_report(wt: WeightTable, rng: np.random.Generator | None = None,
                        n_inverse: int = 100) -> VerificationReport:
    """Table-quality report: identity residual, inversion consistency,
    growth monitor, and the t=T normalization."""
    rng = rng or np.random.default_rng(0)
    rows = []

    p1 = wt.t_nodes
    rhs = wt.Phi2(wt.tau_nodes)
    fd = _local_poly_derivative(wt.tau_nodes, p1)
    interior = slice(3, len(p1) - 3)
    rel = float(np.max(np.abs(fd[interior] - rhs[interior]) / np.abs(rhs[interior])))
    rows.append(CheckRow("curvature-identity", "(6)", measured=rel,
                         threshold=1e-6, passed=rel <= 1e-6))

    ts = np.exp(rng.uniform(0.0, math.log(wt.t_max), n_inverse))
    worst = 0.0
    for t in ts:
        tau = float(wt.phi(t))
        back = invert_phi(wt, tau)
        worst = max(worst, abs(back - t) / t)
    rows.append(CheckRow("inverse-consistency", "plumbing", measured=worst,
                         threshold=1e-8, passed=worst <= 1e-8))

    growth = float(wt.Phi1(wt.tau_max) / wt.Phi1(0.0))
    rows.append(CheckRow("phi1-growth", "(6bis)", measured=growth,
                         threshold=10.0, passed=growth >= 10.0))

    w_at_T = weight_value(wt, 2.0, min(1.0, wt.tau_max / 4.0), min(1.0, wt.tau_max / 4.0))
    rows.append(CheckRow("weight-at-T", "(7)", measured=w_at_T, threshold=1.0,
                         passed=w_at_T == 1.0))
    return VerificationReport(module="carleman", rows=rows,
                              context={"modulus": wt.mu.name, "t_max": wt.t_max})


# ---------------------------------------------------------------------------
# the inequality probe
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CarlemanProbeConfig:
    T: float = 0.3
    gamma_grid: tuple = (8.0, 16.0, 32.0, 64.0, 128.0, 256.0)
    lambda0: float = 1.0
    resolution: int = 256
    dim: int = 1
    test_family: str = "sine-mode"
    time_nodes: int = 129

    def __post_init__(self):
        g = np.asarray(self.gamma_grid, dtype=float)
        if np.any(g < 1.0) or np.any(np.diff(g) <= 0.0):
            raise WeightError("gamma grid must be >= 1 and strictly increasing")
        if self.T <= 0.0:
            raise WeightError("T must be positive")
        if not (0.0 < self.lambda0 <= 1.0):
            raise WeightError("lambda0 must lie in (0, 1]")
        if self.time_nodes < 5 or self.time_nodes % 2 == 0:
            raise WeightError("time_nodes must be odd and >= 5")


@dataclass(frozen=True)
class CarlemanProbeReport:
    gammas: np.ndarray
    lhs: np.ndarray
    rhs_bracket: np.ndarray
    ratios: np.ndarray          # lhs / (gamma^(1/2) * bracket)
    ratios_gamma: np.ndarray    # lhs / (gamma * bracket), recorded alongside
    gamma0: float | None
    constant: float | None
    feasible: bool
    trivial: bool
    statement: str

    def to_report(self) -> VerificationReport:
        rows = []
        for g, r in zip(self.gammas, self.ratios):
            rows.append(CheckRow(f"ratio-gamma{g:g}", "(8)", measured=float(r),
                                 threshold=0.0, passed=bool(r > 0.0) or self.trivial))
        mono = bool(np.all(np.diff(self.ratios) >= -1e-12 * np.abs(self.ratios[:-1])))
        rows.append(CheckRow("ratio-monotone", "(8)",
                             measured=float(self.ratios[-1] - self.ratios[0])
                             if len(self.ratios) > 1 else 0.0,
                             threshold=0.0, passed=mono or self.trivial))
        rows.append(CheckRow("feasible-region", "(7)",
                             measured=self.constant if self.constant is not None else 0.0,
                             threshold=0.0, passed=self.feasible))
        return VerificationReport(module="carleman", rows=rows,
                                  context={"statement": self.statement,
                                           "gamma0": self.gamma0,
                                           "constant": self.constant})


def _time_window(t, T):
    # smooth window supported in (0, T/2), sine-modulated
    s = smoothstep(8.0 * t / T) * smoothstep(8.0 * (T / 2.0 - t) / T)
    return np.sin(2.0 * math.pi * t / T) * s


def _time_window_d1(t, T):
    a = 2.0 * math.pi / T
    s1 = smoothstep(8.0 * t / T)
    s2 = smoothstep(8.0 * (T / 2.0 - t) / T)
    d1 = smoothstep_d1(8.0 * t / T) * 8.0 / T
    d2 = smoothstep_d1(8.0 * (T / 2.0 - t) / T) * 8.0 / T
    w = np.sin(a * t)
    return a * np.cos(a * t) * s1 * s2 + w * d1 * s2 - w * s1 * d2


def _probe_family(name: str, cfg: CarlemanProbeConfig):
    coords = grid_coordinates(cfg.resolution, cfg.dim)
    space = np.cos(coords[0])
    if name == "sine-mode":
        return (lambda t: _time_window(t, cfg.T) * space,
                lambda t: _time_window_d1(t, cfg.T) * space)
    if name == "time-constant":
        return (lambda t: np.ones(1) * space, lambda t: 0.0 * space)
    if name == "zero":
        return (lambda t: 0.0 * space, lambda t: 0.0 * space)
    raise WeightError(f"unknown test family {name!r}")


def _ellipticity_floor(coeffs, dim: int, resolution: int) -> float:
    if coeffs is None:
        return 1.0
    if dim == 1:
        a = coeffs[0][0]
        vals = a.values if isinstance(a, GridField) else np.asarray([float(a)])
        return float(np.min(vals))
    a11 = coeffs[0][0].values if isinstance(coeffs[0][0], GridField) else float(coeffs[0][0])
    a22 = coeffs[1][1].values if isinstance(coeffs[1][1], GridField) else float(coeffs[1][1])
    a12 = coeffs[0][1].values if isinstance(coeffs[0][1], GridField) else float(coeffs[0][1])
    tr = a11 + a22
    disc = np.sqrt((a11 - a22) ** 2 + 4.0 * a12**2)
    return float(np.min((tr - disc) / 2.0))


def _divergence_form(coeffs, v: np.ndarray, dim: int) -> np.ndarray:
    """sum_jk d_j(a_jk d_k v), spectral derivatives, dealiased products."""
    if coeffs is None:
        out = np.zeros_like(v)
        for ax in range(dim):
            out = out + spectral_derivative(spectral_derivative(v, ax), ax)
        return out
    out = np.zeros_like(v)
    for k in range(dim):
        dkv = spectral_derivative(v, k)
        for j in range(dim):
            a = coeffs[j][k]
            if isinstance(a, GridField):
                prod = dealiased_product(a.values, dkv)
            else:
                prod = float(a) * dkv
            out = out + spectral_derivative(prod, j)
    return out


def probe_carleman(cfg: CarlemanProbeConfig, wt: WeightTable,
                   coeffs=None) -> CarlemanProbeReport:
    """Evaluate both sides of the conjugated weighted inequality per gamma.

    For each gamma the left side is the time integral of
    ||dv/dt + sum_jk d_j(a_jk d_k v) + Phi'(gamma(T-t)) v||^2 and the right
    bracket is the integral of ||grad v||^2 + gamma^(1/2)||v||^2; the
    report fits the largest C and smallest gamma0 with
    LHS >= C * gamma^(1/2) * bracket on the grid.  An empty feasible region
    is reported, not raised.  The spatial derivatives are spectral and the
    time integral is composite Simpson.
    """
    lam = _ellipticity_floor(coeffs, cfg.dim, cfg.resolution)
    if lam < cfg.lambda0 - 1e-12:
        raise WeightError(
            f"coefficients violate the ellipticity floor: {lam:.6g} < {cfg.lambda0}")
    gammas = np.asarray(cfg.gamma_grid, dtype=float)
    if gammas[-1] * cfg.T > wt.tau_max * (1 + 1e-12):
        raise TableRangeError("weight table too short for the gamma grid; "
                              "rebuild with a larger t_max")
    v_of_t, dv_of_t = _probe_family(cfg.test_family, cfg)
    nt = cfg.time_nodes
    tq = np.linspace(0.0, cfg.T / 2.0, nt)
    h = tq[1] - tq[0]
    wq = np.ones(nt)
    wq[1:-1:2], wq[2:-1:2] = 4.0, 2.0
    wq *= h / 3.0

    cell = (2.0 * math.pi / cfg.resolution) ** cfg.dim
    a_q = np.empty(nt)  # ||F0||^2 with F0 = dv/dt + div-form
    b_q = np.empty(nt)  # <F0, v>
    c_q = np.empty(nt)  # ||v||^2
    g_q = np.empty(nt)  # ||grad v||^2
    for i, t in enumerate(tq):
        v = v_of_t(t)
        dv = dv_of_t(t)
        F0 = dv + _divergence_form(coeffs, v, cfg.dim)
        a_q[i] = np.sum(np.abs(F0) ** 2) * cell
        b_q[i] = np.sum(np.real(np.conj(F0) * v)) * cell
        c_q[i] = np.sum(np.abs(v) ** 2) * cell
        g_q[i] = sum(np.sum(np.abs(spectral_derivative(v, ax)) ** 2) * cell
                     for ax in range(cfg.dim))

    int_grad = float(wq @ g_q)
    int_l2 = float(wq @ c_q)
    lhs = np.empty_like(gammas)
    for i, g in enumerate(gammas):
        P = np.asarray(wt.Phi1(g * (cfg.T - tq)), dtype=float)
        lhs[i] = float(wq @ (a_q + 2.0 * P * b_q + P**2 * c_q))
    bracket = int_grad + np.sqrt(gammas) * int_l2

    trivial = bool(int_l2 == 0.0 and int_grad == 0.0 and np.all(lhs == 0.0))
    if trivial:
        ratios = np.zeros_like(gammas)
        ratios_gamma = np.zeros_like(gammas)
        return CarlemanProbeReport(gammas, lhs, bracket, ratios, ratios_gamma,
                                   gamma0=float(gammas[0]), constant=0.0,
                                   feasible=True, trivial=True,
                                   statement="trivial family: both sides vanish; "
                                             "consistent with the estimate")
    ratios = lhs / (np.sqrt(gammas) * bracket)
    ratios_gamma = lhs / (gammas * bracket)

    gamma0 = None
    constant = None
    for i in range(len(gammas)):
        tail = ratios[i:]
        if np.all(np.diff(tail) >= -1e-12 * np.abs(tail[:-1])) and np.all(tail > 0.0):
            gamma0 = float(gammas[i])
            constant = float(tail.min())
            break
    feasible = gamma0 is not None
    statement = ("measured ratios are consistent with the weighted estimate "
                 "on this family; they do not prove it")
    return CarlemanProbeReport(gammas, lhs, bracket, ratios, ratios_gamma,
                               gamma0, constant, feasible, False, statement)
