"""Dyadic frequency decomposition on periodic grids, with probes.

The estimates this package checks are local in frequency, so the lattice
Fourier series on the torus [0, 2*pi)^n (n = 1 or 2) is the desk-scale
surrogate for the whole-space setting: integer frequencies, FFT transforms,
exact Plancherel norms.  The partition is built from a radial profile that
is exactly 1 on |xi| <= 1 and exactly 0 on |xi| >= 2; the dyadic pieces

    m_nu(xi) = profile(xi / 2^nu) - profile(xi / 2^(nu-1)),   nu >= 1,

telescope, overlap at most pairwise, and sum to a resolved low-pass.

Pointwise products of sampled fields are dealiased by spectral zero padding
to twice the resolution before multiplying, so multiplier applications act
on the true product spectrum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bump import smoothstep
from .report import CheckRow, VerificationReport

__all__ = [
    "GridField",
    "DyadicPartition",
    "GridError",
    "AliasingError",
    "lp_block",
    "lp_reconstruct",
    "check_almost_orthogonality",
    "check_bernstein",
    "commutator",
    "commutator_gradient_ratio",
    "probe_commutator_bound",
    "multiplier_locality_gap",
    "downsample",
    "grid_coordinates",
    "random_band_limited",
    "spectral_derivative",
    "dealiased_product",
]


class GridError(ValueError):
    """Invalid grid construction or mismatched resolutions."""


class AliasingError(GridError):
    """An operation would touch or fold across the grid Nyquist frequency."""


def _is_pow2(n: int) -> bool:
    return n >= 2 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class GridField:
    """Samples of a field on the uniform periodic grid over [0, 2*pi)^n.

    values has shape (N,) for n = 1 or (N, N) for n = 2, with N a power of
    two; entries may be real or complex but must be finite.
    """

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.ndim not in (1, 2):
            raise GridError(f"expected 1D or 2D samples, got ndim={v.ndim}")
        if v.ndim == 2 and v.shape[0] != v.shape[1]:
            raise GridError(f"2D grid must be square, got {v.shape}")
        if not _is_pow2(v.shape[0]):
            raise GridError(f"resolution must be a power of two, got {v.shape[0]}")
        if not np.all(np.isfinite(v)):
            raise GridError("grid samples must be finite")
        object.__setattr__(self, "values", v)

    @property
    def resolution(self) -> int:
        return self.values.shape[0]

    @property
    def dim(self) -> int:
        return self.values.ndim

    def norm_l2(self) -> float:
        """L2 norm over the torus (Plancherel-consistent)."""
        cell = (2.0 * math.pi / self.resolution) ** self.dim
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2) * cell))

    def spectrum(self) -> np.ndarray:
        return np.fft.fftn(self.values)

    @staticmethod
    def from_function(f, resolution: int, dim: int = 1) -> "GridField":
        x = 2.0 * math.pi * np.arange(resolution) / resolution
        if dim == 1:
            return GridField(np.asarray(f(x), dtype=float))
        xx, yy = np.meshgrid(x, x, indexing="ij")
        return GridField(np.asarray(f(xx, yy), dtype=float))


def grid_coordinates(resolution: int, dim: int = 1):
    x = 2.0 * math.pi * np.arange(resolution) / resolution
    if dim == 1:
        return (x,)
    return np.meshgrid(x, x, indexing="ij")


def _freq_1d(N: int) -> np.ndarray:
    return np.fft.fftfreq(N, d=1.0 / N)  # integer lattice as floats


def _freq_magnitude(N: int, dim: int) -> np.ndarray:
    k = _freq_1d(N)
    if dim == 1:
        return np.abs(k)
    kx, ky = np.meshgrid(k, k, indexing="ij")
    return np.sqrt(kx**2 + ky**2)


# ---------------------------------------------------------------------------
# spectral plumbing: derivatives, padding, dealiased products
# ---------------------------------------------------------------------------

def spectral_derivative(values: np.ndarray, axis: int = 0) -> np.ndarray:
    """d/dx_axis via the integer frequency lattice; exact for trig data."""
    N = values.shape[axis]
    k = _freq_1d(N)
    shape = [1] * values.ndim
    shape[axis] = N
    mult = 1j * k.reshape(shape)
    out = np.fft.ifftn(np.fft.fftn(values) * mult)
    if np.isrealobj(values):
        return out.real
    return out


def _pad_axis(spec: np.ndarray, axis: int, N2: int) -> np.ndarray:
    spec = np.moveaxis(spec, axis, 0)
    N = spec.shape[0]
    half = N // 2
    out = np.zeros((N2,) + spec.shape[1:], dtype=complex)
    out[:half] = spec[:half]
    if half > 1:
        out[N2 - (half - 1):] = spec[half + 1:]
    # split the Nyquist bin symmetrically between +N/2 and -N/2
    out[half] = 0.5 * spec[half]
    out[N2 - half] += 0.5 * spec[half]
    return np.moveaxis(out, 0, axis)


def _truncate_axis(spec: np.ndarray, axis: int, N: int) -> np.ndarray:
    spec = np.moveaxis(spec, axis, 0)
    N2 = spec.shape[0]
    half = N // 2
    out = np.zeros((N,) + spec.shape[1:], dtype=complex)
    out[:half] = spec[:half]
    if half > 1:
        out[half + 1:] = spec[N2 - (half - 1):]
    out[half] = spec[half] + spec[N2 - half]
    return np.moveaxis(out, 0, axis)


def _upsample(values: np.ndarray, factor: int = 2) -> np.ndarray:
    spec = np.fft.fftn(values)
    for ax in range(values.ndim):
        spec = _pad_axis(spec, ax, values.shape[ax] * factor)
    out = np.fft.ifftn(spec) * factor**values.ndim
    return out.real if np.isrealobj(values) else out


def _spectrum_to_coarse(spec: np.ndarray, N: int) -> np.ndarray:
    for ax in range(spec.ndim):
        spec = _truncate_axis(spec, ax, N)
    return spec


def dealiased_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Samples, on the original grid, of the product of the two trig
    interpolants, computed on a 2x grid so no spectral bin folds back.

    The result is exact when the product spectrum stays below the original
    Nyquist frequency; otherwise the high modes are discarded (never
    aliased), which is the correct projection for multiplier work.
    """
    fine = _upsample(a) * _upsample(b)
    spec = _spectrum_to_coarse(np.fft.fftn(fine), a.shape[0]) / 2**a.ndim
    out = np.fft.ifftn(spec)
    if np.isrealobj(a) and np.isrealobj(b):
        return out.real
    return out


def downsample(u: GridField, resolution: int, tol: float = 1e-12) -> GridField:
    """Spectral restriction to a coarser grid; exact for band-limited data.

    Raises AliasingError if more than ``tol`` of the energy lives at or
    above the target Nyquist frequency.
    """
    if resolution >= u.resolution:
        if resolution == u.resolution:
            return u
        raise GridError("downsample target must not exceed the source resolution")
    spec = u.spectrum()
    mag = _freq_magnitude(u.resolution, u.dim)
    outside = np.sum(np.abs(spec[mag >= resolution // 2]) ** 2)
    total = np.sum(np.abs(spec) ** 2)
    if total > 0 and outside > tol * total:
        raise AliasingError(
            f"field carries energy above the target Nyquist ({outside/total:.2e})")
    coarse = _spectrum_to_coarse(spec, resolution) / (u.resolution / resolution) ** u.dim
    vals = np.fft.ifftn(coarse)
    if np.isrealobj(u.values):
        vals = vals.real
    return GridField(vals)


def random_band_limited(resolution: int, kmax: int, rng: np.random.Generator,
                        dim: int = 1) -> GridField:
    """Seeded real random field with spectrum supported in |xi| <= kmax."""
    if kmax >= resolution // 2:
        raise AliasingError("kmax must stay below the Nyquist frequency")
    shape = (resolution,) * dim
    z = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    mask = _freq_magnitude(resolution, dim) <= kmax
    vals = np.fft.ifftn(z * mask).real
    vals *= resolution ** (dim / 2)  # O(1) sample amplitude
    return GridField(vals)


# ---------------------------------------------------------------------------
# the dyadic partition
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DyadicPartition:
    """Radial dyadic partition of the frequency lattice.

    profile(r) = 1 - S(r - 1) equals 1 for r <= 1, 0 for r >= 2, and is
    smooth and radially non-increasing in between.  nu_max bounds the block
    index; dimension selects the lattice.  Multiplier arrays are cached per
    (nu, resolution); the fill is idempotent, so concurrent readers are
    safe.
    """

    nu_max: int
    dim: int = 1
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise GridError(f"dimension must be 1 or 2, got {self.dim}")
        if self.nu_max < 0:
            raise GridError("nu_max must be non-negative")

    @staticmethod
    def profile(r):
        return 1.0 - smoothstep(np.asarray(r, dtype=float) - 1.0)

    def piece(self, nu: int, r):
        """Scalar multiplier value of block nu at radius r."""
        r = np.asarray(r, dtype=float)
        if nu == 0:
            return self.profile(r)
        return self.profile(r / 2.0**nu) - self.profile(r / 2.0 ** (nu - 1))

    def block_limit(self, resolution: int) -> int:
        """Largest nu whose block support stays below the grid Nyquist."""
        return min(self.nu_max, int(math.log2(resolution)) - 2)

    def multiplier(self, nu: int, resolution: int) -> np.ndarray:
        key = (nu, resolution)
        if key not in self._cache:
            mag = _freq_magnitude(resolution, self.dim)
            self._cache[key] = np.asarray(self.piece(nu, mag), dtype=float)
        return self._cache[key]


def lp_block(part: DyadicPartition, u: GridField, nu: int) -> GridField:
    """Frequency block nu of u (block 0 is the low-pass)."""
    if u.dim != part.dim:
        raise GridError(f"field dimension {u.dim} != partition dimension {part.dim}")
    if nu < 0 or nu > part.nu_max:
        raise GridError(f"block index {nu} outside 0..{part.nu_max}")
    if nu > 0 and 2 ** (nu + 1) > u.resolution // 2:
        raise AliasingError(
            f"block {nu} touches the Nyquist frequency at resolution {u.resolution}")
    spec = u.spectrum() * part.multiplier(nu, u.resolution)
    vals = np.fft.ifftn(spec)
    if np.isrealobj(u.values):
        vals = vals.real
    return GridField(vals)


def lp_reconstruct(part: DyadicPartition, u: GridField, nu_top: int) -> GridField:
    """Sum of blocks 0..nu_top; telescopes to a dilated low-pass of u."""
    total = np.zeros_like(np.asarray(u.values, dtype=complex))
    spec = u.spectrum()
    for nu in range(nu_top + 1):
        total += spec * part.multiplier(nu, u.resolution)
    vals = np.fft.ifftn(total)
    if np.isrealobj(u.values):
        vals = vals.real
    return GridField(vals)


def check_almost_orthogonality(part: DyadicPartition,
                               u: GridField) -> tuple[float, float]:
    """Return (sum_ratio, inverse_ratio) for the block energy identity.

    sum_ratio is sum_nu ||u_nu||^2 / ||u||^2; with pairwise-overlapping
    pieces both it and its reciprocal must lie within the bracket [1/2, 2],
    and on fully resolved inputs sum_ratio lands in [1/2, 1].
    """
    nrm = u.norm_l2()
    if nrm == 0.0:
        raise GridError("almost-orthogonality check needs a nonzero field")
    top = part.block_limit(u.resolution)
    total = 0.0
    for nu in range(top + 1):
        total += lp_block(part, u, nu).norm_l2() ** 2
    ratio = total / nrm**2
    return ratio, 1.0 / ratio


def check_bernstein(part: DyadicPartition, u: GridField, nu: int,
                    tol: float = 1e-12) -> VerificationReport:
    """Directional and gradient norm bounds for one frequency block.

    Upper: ||d_j u_nu|| <= 2^(nu+1) ||u_nu|| for every axis j.
    Lower (nu >= 1): ||grad u_nu|| >= 2^(nu-1) ||u_nu||.
    Supports are exact on the lattice, so violations beyond rounding are
    bugs, not estimate failures.
    """
    block = lp_block(part, u, nu)
    bn = block.norm_l2()
    if bn == 0.0:
        raise GridError(f"block {nu} of the given field is zero")
    rows = []
    grad_sq = 0.0
    for ax in range(block.dim):
        dn = GridField(spectral_derivative(block.values, ax)).norm_l2()
        grad_sq += dn**2
        bound = 2.0 ** (nu + 1) * bn
        rows.append(CheckRow(f"upper-axis{ax}-nu{nu}", "bernstein-upper",
                             measured=dn / bn, threshold=2.0 ** (nu + 1),
                             passed=dn <= bound * (1.0 + tol)))
    if nu >= 1:
        gn = math.sqrt(grad_sq)
        bound = 2.0 ** (nu - 1) * bn
        rows.append(CheckRow(f"lower-grad-nu{nu}", "bernstein-lower",
                             measured=gn / bn, threshold=2.0 ** (nu - 1),
                             passed=gn >= bound * (1.0 - tol)))
    return VerificationReport(module="dyadic", rows=rows,
                              context={"nu": nu, "resolution": u.resolution})


def commutator(part: DyadicPartition, a: GridField, w: GridField,
               nu: int) -> GridField:
    """[m_nu, a] w = m_nu(D)(a w) - a * m_nu(D) w on the sample grid.

    The first term is computed on a 2x-padded grid so the product spectrum
    is exact before the multiplier acts; the second term is an exact
    pointwise product of samples.
    """
    if a.resolution != w.resolution or a.dim != w.dim:
        raise GridError("coefficient and field resolutions must match")
    if np.iscomplexobj(a.values):
        raise GridError("coefficient field must be real-valued")
    if nu > 0 and 2 ** (nu + 1) > w.resolution // 2:
        raise AliasingError(
            f"block {nu} touches the Nyquist frequency at resolution {w.resolution}")
    N = w.resolution
    fine = _upsample(a.values) * _upsample(w.values)
    spec_fine = np.fft.fftn(fine)
    mag_fine = _freq_magnitude(2 * N, w.dim)
    spec_fine *= np.asarray(part.piece(nu, mag_fine), dtype=float)
    term1 = np.fft.ifftn(_spectrum_to_coarse(spec_fine, N) / 2**w.dim)
    term2 = a.values * lp_block(part, w, nu).values
    vals = term1 - term2
    if np.isrealobj(w.values):
        vals = vals.real
    return GridField(vals)


def multiplier_locality_gap(part: DyadicPartition, resolution: int) -> float:
    """Max over the lattice of |m_mu * m_nu| over pairs |mu - nu| >= 2.

    Zero witnesses the spectral-support separation that kills far
    cross-block terms in the commutator kernel argument.
    """
    top = part.block_limit(resolution)
    worst = 0.0
    for mu in range(top + 1):
        mm = part.multiplier(mu, resolution)
        for nu in range(mu + 2, top + 1):
            worst = max(worst, float(np.max(np.abs(mm * part.multiplier(nu, resolution)))))
    return worst


def _coefficient_entries(a_mat, dim: int, resolution: int):
    """Normalize a coefficient specification to a dim x dim array grid."""
    out = {}
    for j in range(dim):
        for k in range(dim):
            entry = a_mat[j][k]
            if isinstance(entry, GridField):
                if entry.resolution != resolution:
                    entry = downsample(entry, resolution)
                out[(j, k)] = entry.values
            else:
                out[(j, k)] = float(entry) * np.ones((resolution,) * dim)
    return out


def commutator_gradient_ratio(part: DyadicPartition, a_mat, v: GridField) -> float:
    """sum_nu || sum_jk d_j [m_nu, a_jk] d_k v ||^2 / ||grad v||^2."""
    dim = v.dim
    N = v.resolution
    entries = _coefficient_entries(a_mat, dim, N)
    dv = [spectral_derivative(v.values, ax) for ax in range(dim)]
    grad_sq = sum(GridField(d).norm_l2() ** 2 for d in dv)
    if grad_sq == 0.0:
        raise GridError("commutator ratio needs a field with a nonzero gradient")
    top = part.block_limit(N)
    total = 0.0
    for nu in range(top + 1):
        acc = np.zeros((N,) * dim, dtype=float)
        for j in range(dim):
            for k in range(dim):
                comm = commutator(part, GridField(entries[(j, k)]),
                                  GridField(dv[k]), nu)
                acc = acc + spectral_derivative(comm.values, j)
        total += GridField(acc).norm_l2() ** 2
    return total / grad_sq


def probe_commutator_bound(part: DyadicPartition, a_family, v: GridField,
                           resolutions=(256, 512, 1024),
                           slope_tol: float = 0.05) -> VerificationReport:
    """Measure the commutator-gradient ratio across grid refinements.

    Each coefficient matrix in ``a_family`` is paired with spectral
    restrictions of ``v`` at the requested resolutions; the bound holds
    when the per-octave growth of the ratio (slope of ratio against log2 of
    the resolution, relative to the mean ratio) stays within slope_tol.
    """
    rows = []
    data = {}
    for idx, a_mat in enumerate(a_family):
        ratios = []
        for N in sorted(resolutions):
            vn = downsample(v, N) if N <= v.resolution else v
            ratios.append(commutator_gradient_ratio(part, a_mat, vn))
        ratios = np.asarray(ratios)
        data[idx] = ratios
        mean = float(ratios.mean())
        if mean <= 1e-13:
            slope_rel = 0.0  # identically commuting family
        else:
            slope = float(np.polyfit(np.log2(sorted(resolutions)), ratios, 1)[0])
            slope_rel = slope / mean
        rows.append(CheckRow(f"ratio-bounded-a{idx}", "(2.7)",
                             measured=float(ratios.max()), threshold=math.inf,
                             passed=bool(np.all(np.isfinite(ratios))),
                             detail=f"ratios vs N: {ratios.tolist()}"))
        rows.append(CheckRow(f"growth-slope-a{idx}", "(2.7)",
                             measured=slope_rel, threshold=slope_tol,
                             passed=abs(slope_rel) <= slope_tol))
    rep = VerificationReport(module="dyadic", rows=rows,
                             context={"resolutions": list(sorted(resolutions))})
    rep.context["ratios"] = {str(k): v.tolist() for k, v in data.items()}
    return rep
