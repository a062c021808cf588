"""Discrete short-time Fourier transform, modulation-norm estimators, Wigner
transform, the low/high frequency splitting of rough potentials, and potentials
that are Fourier transforms of finite atomic measures.

Conventions: V_g f(x, xi) = F[f . conj(T_x g)](xi), lattice positions are a
subsampling of the grid and lattice frequencies a subsampling of the dual
grid; all continuum norms are lattice sums with cell weights.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import EpsilonTooSmall
from .grid import (GridSpec, PhaseGrid, SampledField, SymbolField, dft,
                   field_from_function)


def default_window(grid: GridSpec) -> SampledField:
    """Unit-L2 Gaussian window exp(-pi |x|^2), normalized on the grid."""
    w = field_from_function(grid, lambda p: np.exp(-np.pi * np.sum(
        np.atleast_2d(p).reshape(-1, grid.dim) ** 2, axis=1)))
    return SampledField(grid, w.values / w.norm2())


@dataclass
class StftSpec:
    """Window and lattice for the discrete STFT.

    lattice_step_x / lattice_step_xi are integer strides in grid samples and
    frequency bins (1 = dense lattice).  weight_s is the exponent of the
    (1 + |xi|)^s frequency weight used by the weighted sup norm.
    """

    window: SampledField
    lattice_step_x: int = 1
    lattice_step_xi: int = 1
    weight_s: float = 0.0

    def __post_init__(self):
        n = self.window.grid.points_per_axis
        if n % self.lattice_step_x or n % self.lattice_step_xi:
            raise ValueError("lattice steps must divide the grid extent")
        if abs(self.window.norm2() - 1.0) > 1e-10:
            raise ValueError("window must be unit L2-normalized")

    @property
    def grid(self) -> GridSpec:
        return self.window.grid

    @property
    def x_cell(self) -> float:
        return (self.lattice_step_x * self.grid.spacing) ** self.grid.dim

    @property
    def xi_cell(self) -> float:
        return (self.lattice_step_xi * self.grid.freq_spacing) ** self.grid.dim

    def x_indices(self):
        n = self.grid.points_per_axis
        one = range(0, n, self.lattice_step_x)
        return list(product(one, repeat=self.grid.dim))

    def xi_slices(self) -> tuple:
        return (slice(None, None, self.lattice_step_xi),) * self.grid.dim

    def xi_points(self) -> np.ndarray:
        ax = self.grid.freq_axis()[:: self.lattice_step_xi]
        mesh = np.meshgrid(*([ax] * self.grid.dim), indexing="ij")
        return np.stack([a.ravel() for a in mesh], axis=-1)


@dataclass
class StftMatrix:
    """V_g f sampled on the lattice; axes are (x positions..., frequencies...)."""

    values: np.ndarray
    spec: StftSpec


def _window_at(spec: StftSpec, idx: tuple) -> np.ndarray:
    """Window centered at the lattice point x_idx, translated periodically.

    Periodic wrap keeps every lattice window an exact copy of the base one
    (no boundary truncation); for the Gaussian window the wrap-around tail is
    below 1e-80 on the default grids.
    """
    g = spec.grid
    shift = tuple(i - g.points_per_axis // 2 for i in idx)
    return np.roll(spec.window.values, shift, axis=tuple(range(g.dim)))


def iter_stft(f: SampledField, spec: StftSpec):
    """Yield (x lattice index tuple, V_g f(x, .) on the lattice frequencies)."""
    g = f.grid
    if g != spec.grid:
        raise ValueError("field and window grids do not match")
    sl = spec.xi_slices()
    for idx in spec.x_indices():
        win = _window_at(spec, idx)
        spectrum = dft(SampledField(g, f.values * np.conj(win)), -1)
        yield idx, spectrum.values[sl]


def stft(f: SampledField, spec: StftSpec) -> StftMatrix:
    g = spec.grid
    npos = g.points_per_axis // spec.lattice_step_x
    nfreq = g.points_per_axis // spec.lattice_step_xi
    out = np.empty((npos,) * g.dim + (nfreq,) * g.dim, dtype=complex)
    for idx, row in iter_stft(f, spec):
        pos = tuple(i // spec.lattice_step_x for i in idx)
        out[pos] = row
    return StftMatrix(out, spec)


def stft_adjoint(mat: StftMatrix, spec: StftSpec) -> SampledField:
    """V_g^* F = sum over the lattice of F(x,xi) pi(x,xi) g, with cell weights.

    The inner frequency sum sum_xi F(x,xi) e^{2 pi i xi.y} is an inverse DFT
    of the lattice row embedded into the full frequency grid.
    """
    g = spec.grid
    acc = np.zeros(g.shape, dtype=complex)
    for idx in spec.x_indices():
        pos = tuple(i // spec.lattice_step_x for i in idx)
        full = np.zeros(g.shape, dtype=complex)
        full[spec.xi_slices()] = mat.values[pos]
        inner = dft(SampledField(g, full), +1).values * (2.0 * g.half_width) ** g.dim
        acc += inner * _window_at(spec, idx)
    return SampledField(g, acc * spec.x_cell * spec.xi_cell)


INF_S = "inf-s"
INF_1 = "inf-1"
FL_1 = "fl-1"


def mod_norm(f: SampledField, spec: StftSpec, kind: str, exponent: float | None = None) -> float:
    """Lattice estimator of M^infty_s, M^{infty,1} and FL^1_r norms.

    inf-s: sup |V_g f| (1+|xi|)^s;  inf-1: sum_xi sup_x |V_g f| * cell;
    fl-1 bypasses the STFT and weights |Ff| directly.
    """
    g = f.grid
    if kind == FL_1:
        r = 0.0 if exponent is None else exponent
        spec_f = dft(f, -1)
        w = (1.0 + np.linalg.norm(g.freq_points(), axis=1)) ** r
        return float(np.sum(np.abs(spec_f.values.ravel()) * w) * g.freq_cell)
    if kind == INF_S:
        s = spec.weight_s if exponent is None else exponent
        xi = spec.xi_points()
        w = (1.0 + np.linalg.norm(xi, axis=1)) ** s
        best = 0.0
        for _, row in iter_stft(f, spec):
            best = max(best, float(np.max(np.abs(row.ravel()) * w)))
        return best
    if kind == INF_1:
        profile = None
        for _, row in iter_stft(f, spec):
            mag = np.abs(row)
            profile = mag if profile is None else np.maximum(profile, mag)
        return float(np.sum(profile) * spec.xi_cell)
    raise ValueError(f"unknown modulation norm kind: {kind}")


def frequency_profile(f: SampledField, spec: StftSpec) -> np.ndarray:
    """S(xi) = sup over lattice positions of |V_g f(x, xi)|."""
    profile = None
    for _, row in iter_stft(f, spec):
        mag = np.abs(row)
        profile = mag if profile is None else np.maximum(profile, mag)
    return profile


def wigner(f: SampledField, g2: SampledField) -> SymbolField:
    """Cross-Wigner transform W(f,g)(x,xi) on the phase grid (d = 1).

    Half-index samples f(x + y/2) g(x - y/2)* come from 2x zero-padded
    (trigonometric) refinement; the y-transform reuses the centered DFT on a
    doubled grid and is subsampled back onto the base frequency axis.
    """
    g = f.grid
    if g.dim != 1:
        raise NotImplementedError("wigner is implemented for d = 1")
    if g2.grid != g:
        raise ValueError("fields must share a grid")
    n = g.points_per_axis
    fr = _refine2(f.values)
    gr = _refine2(g2.values)
    # A[i, m] = f(x_i + y_m / 2) conj(g(x_i - y_m / 2)), y_m = -2L + m h
    a = np.zeros((n, 2 * n), dtype=complex)
    i = np.arange(n)
    for m in range(2 * n):
        off = m - n
        plus = 2 * i + off
        minus = 2 * i - off
        ok = (plus >= 0) & (plus < 2 * n) & (minus >= 0) & (minus < 2 * n)
        a[ok, m] = fr[plus[ok]] * np.conj(gr[minus[ok]])
    big = GridSpec(1, 2.0 * g.half_width, 2 * n)
    rows = np.empty((n, 2 * n), dtype=complex)
    for i in range(n):
        rows[i] = dft(SampledField(big, a[i]), -1).values
    vals = rows[:, ::2]  # big freq axis subsampled onto the base axis
    return SymbolField(PhaseGrid(g), vals)


def _refine2(values: np.ndarray) -> np.ndarray:
    """2x trigonometric refinement of a 1d field by spectral zero padding."""
    n = values.shape[0]
    spec = np.fft.fftshift(np.fft.fft(np.fft.ifftshift(values)))
    padded = np.zeros(2 * n, dtype=complex)
    padded[n // 2: n // 2 + n] = spec
    return np.fft.fftshift(np.fft.ifft(np.fft.ifftshift(padded))) * 2.0


def cross_ambiguity_l1(spec: StftSpec) -> float:
    """Phase-space L1 norm of V_g g, the adjoint-bound constant."""
    g = spec.window
    total = 0.0
    for _, row in iter_stft(g, spec):
        total += float(np.sum(np.abs(row))) * spec.xi_cell * spec.x_cell
    return total


def sjostrand_decompose(f: SampledField, eps: float, spec: StftSpec):
    """Split f = f1 + f2 with f1 frequency-localized and |f2|_{M^infty,1} <= eps.

    f1 = V_g^*(V_g f . chi_R) with R the smallest lattice radius whose tail
    sum of S(xi) = sup_x |V_g f| stays within the adjoint-norm budget; the
    boundary shell at R is kept only fractionally, scaled so the estimated
    tail equals the budget exactly.  The fractional cut keeps the norm of f2
    proportional to eps instead of staircasing with the lattice shells.
    """
    if np.max(np.abs(f.values)) == 0.0:
        zero = SampledField(f.grid, np.zeros(f.grid.shape))
        return zero, zero.copy(), 0.0
    mat = stft(f, spec)
    d = f.grid.dim
    pos_axes = tuple(range(d))
    profile = np.max(np.abs(mat.values), axis=pos_axes)
    xi = spec.xi_points()
    radii = np.linalg.norm(xi, axis=1).reshape(profile.shape)
    budget = eps / cross_ambiguity_l1(spec)
    if budget <= 0.0:
        raise EpsilonTooSmall(f"budget {budget:.3e} is not positive")

    levels = np.unique(radii)
    chosen = None
    for r in levels:
        tail = float(np.sum(profile[radii > r]) * spec.xi_cell)
        if tail <= budget:
            chosen = float(r)
            tail_beyond = tail
            break
    if chosen is None:
        raise EpsilonTooSmall(
            f"even the full band leaves tail above the budget {budget:.3e}")

    shell = radii == chosen
    shell_mass = float(np.sum(profile[shell]) * spec.xi_cell)
    if shell_mass > 0.0 and chosen > 0.0:
        # the innermost shell is never split: the low band survives even
        # when the budget dwarfs the whole tail
        into_f2 = min(1.0, (budget - tail_beyond) / shell_mass)
    else:
        into_f2 = 0.0
    clipped = mat.values.copy()
    clipped[..., radii > chosen] = 0.0
    clipped[..., shell] *= 1.0 - into_f2
    f1 = stft_adjoint(StftMatrix(clipped, spec), spec)
    f2 = SampledField(f.grid, f.values - f1.values)
    return f1, f2, chosen


@dataclass(frozen=True)
class MeasurePotential:
    """V(x) = sum_j c_j exp(2 pi i k_j . x), the transform of an atomic measure."""

    atoms: tuple

    @property
    def total_variation(self) -> float:
        return float(sum(abs(c) for _, c in self.atoms))


def measure_potential_field(p: MeasurePotential, grid: GridSpec) -> SampledField:
    vals = np.zeros(grid.size, dtype=complex)
    pts = grid.points()
    for k, c in p.atoms:
        k = np.atleast_1d(np.asarray(k, dtype=float))
        vals = vals + c * np.exp(2j * np.pi * (pts @ k))
    return SampledField(grid, vals)


def measure_norm_bound(p: MeasurePotential, spec: StftSpec):
    """(lhs, rhs) with lhs the Sjostrand-norm estimate of the potential and
    rhs = |g|_{L1} * total variation of the measure."""
    field = measure_potential_field(p, spec.grid)
    lhs = mod_norm(field, spec, INF_1)
    g_l1 = float(np.sum(np.abs(spec.window.values)) * spec.grid.cell)
    return lhs, g_l1 * p.total_variation
