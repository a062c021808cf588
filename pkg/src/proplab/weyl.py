"""Weyl quantization on centered grids and its calculus.

The quantization rule K(x,y) = Integral sigma((x+y)/2, xi) e^{2 pi i (x-y) xi} dxi
becomes an exact lag transform on the grid: with the symbol trigonometrically
refined onto the half-step x lattice,

    K[i, j] = G[i + j, (i - j) mod N],
    G[s, l] = dxi * sum_k sigma_ref[s, k] e^{2 pi i l h xi_k},

and G is exactly N-periodic in the lag l because h * dxi = 1/N.  The inverse
(symbol of a kernel) refines the kernel instead and transforms along the
anti-diagonal, mirroring the Wigner transform of a rank-one kernel.

Symbols are treated as periodic over the phase box; the experiments only feed
grid-periodic band-limited symbols, for which every resampling here is exact.
"""

from __future__ import annotations

import numpy as np

from . import _kernels
from .errors import DimensionUnsupported, NotFree
from .grid import GridSpec, KernelMatrix, PhaseGrid, SampledField, SymbolField
from .symplectic import PhaseQuadratic, SymplecticBlocks


def _require_1d(grid: GridSpec):
    if grid.dim != 1:
        raise DimensionUnsupported("Weyl calculus is implemented for d = 1")


def _refine_axis(vals: np.ndarray, axis: int) -> np.ndarray:
    """2x trigonometric refinement along one axis by spectral zero padding."""
    n = vals.shape[axis]
    vals = np.moveaxis(vals, axis, 0)
    spec = np.fft.fftshift(np.fft.fft(np.fft.ifftshift(vals, axes=0), axis=0), axes=0)
    padded = np.zeros((2 * n,) + vals.shape[1:], dtype=complex)
    padded[n // 2: n // 2 + n] = spec
    out = np.fft.fftshift(np.fft.ifft(np.fft.ifftshift(padded, axes=0), axis=0), axes=0) * 2.0
    return np.moveaxis(out, 0, axis)


def _lag_quantize(ref2: np.ndarray, g: GridSpec) -> KernelMatrix:
    """Kernel from the symbol sampled on the doubled (midpoint, xi) lattice.

    ref2 has shape (2N, 2N): midpoints on the half-step x lattice, xi on the
    half-step frequency lattice.  The lag transform

        G[s, lam] = (dxi/2) sum_k ref2[s, k] e^{2 pi i lam (k - N) / (2N)}

    resolves lags up to 4L, and the kernel is the periodization of the
    continuum one: wrapping y by 2L shifts the midpoint by L and the lag by
    2L, so

        K[i, j] = G[i + j, (i - j) mod 2N] + G[(i + j + N) mod 2N, (i - j + N) mod 2N].
    """
    n = g.points_per_axis
    lag = np.fft.ifft(ref2, axis=1) * n * g.freq_cell
    lag = lag * (-1.0) ** np.arange(2 * n)[None, :]
    i = np.arange(n)
    s = i[:, None] + i[None, :]
    d = i[:, None] - i[None, :]
    direct = lag[s, d % (2 * n)]
    wrapped = lag[(s + n) % (2 * n), (d + n) % (2 * n)]
    return KernelMatrix(g, direct + wrapped)


def weyl_quantize(sigma: SymbolField) -> KernelMatrix:
    """Kernel matrix of the Weyl operator sigma^w (midpoint rule, exact lags)."""
    g = sigma.phase_grid.base
    _require_1d(g)
    ref2 = _refine_axis(_refine_axis(sigma.values, 0), 1)
    return _lag_quantize(ref2, g)


def quantize_modes(coeffs: np.ndarray, freqs: np.ndarray, g: GridSpec) -> KernelMatrix:
    """Weyl kernel of sigma given as an explicit mode sum over phase space.

    Evaluates sum_q c_q e^{2 pi i (u_q x + v_q xi)} exactly on the doubled
    midpoint/frequency lattice, so symbols that are not box-periodic (sheared
    or rotated band-limited symbols) quantize without interpolation leakage.
    """
    _require_1d(g)
    n = g.points_per_axis
    mhalf = -g.half_width + 0.5 * g.spacing * np.arange(2 * n)
    xihalf = 0.5 * g.freq_spacing * (np.arange(2 * n) - n)
    mesh = np.stack([np.repeat(mhalf, 2 * n), np.tile(xihalf, 2 * n)], axis=-1)
    ref2 = _kernels.eval_fourier_modes(np.asarray(coeffs, dtype=complex),
                                       np.asarray(freqs, dtype=float),
                                       mesh).reshape(2 * n, 2 * n)
    return _lag_quantize(ref2, g)


def _fourier_shift(arr: np.ndarray, spacing: float, delta: float) -> np.ndarray:
    """Samples of the periodic band-limited interpolant at points + delta
    (along axis 0)."""
    n = arr.shape[0]
    fr = np.fft.fftfreq(n, d=spacing)
    return np.fft.ifft(np.fft.fft(arr, axis=0)
                       * np.exp(2j * np.pi * fr * delta)[:, None], axis=0)


def symbol_of_kernel(k: KernelMatrix) -> SymbolField:
    """sigma(x, xi) = Integral K(x + y/2, x - y/2) e^{-2 pi i y xi} dy.

    Inverse of the periodized midpoint rule: each kernel entry is read as the
    lag-transform slot with the shorter lag representative (|x - y| <= L on
    the double cover), the off-parity midpoints come from a half-step
    trigonometric shift, and the lag transform is inverted exactly.  This is
    a two-sided inverse of weyl_quantize on symbols whose lag content stays
    within half the box (|y| <= L); kernels with longer-range action get the
    short-lag reading.
    """
    g = k.grid
    _require_1d(g)
    n = g.points_per_axis
    h = g.spacing
    i = np.arange(n)
    s = i[:, None] + i[None, :]
    d = i[:, None] - i[None, :]
    lag = np.zeros((2 * n, 2 * n), dtype=complex)
    short = np.abs(d) <= n // 2
    far = ~short
    lag[s[short], d[short] % (2 * n)] = k.entries[short]
    lag[(s[far] + n) % (2 * n), (d[far] + n) % (2 * n)] = k.entries[far]
    # each lag column holds midpoints of one parity; shift to fill the other
    lam = np.arange(2 * n)
    even_l = lam[lam % 2 == 0]
    odd_l = lam[lam % 2 == 1]
    lag[1::2, even_l] = _fourier_shift(lag[0::2, even_l], h, 0.5 * h)
    lag[0::2, odd_l] = _fourier_shift(lag[1::2, odd_l], h, -0.5 * h)
    # invert G[s, lam] = (dxi/2) sum_k sigma[s, k] e^{2 pi i lam (k - N)/(2N)}
    ref2 = np.fft.fft(lag[0::2, :] * (-1.0) ** lam[None, :], axis=1) * h
    return SymbolField(PhaseGrid(g), ref2[:, 0::2])


def multiplication_symbol(v: SampledField) -> SymbolField:
    """sigma(x, xi) = V(x), the symbol of pointwise multiplication by V."""
    _require_1d(v.grid)
    n = v.grid.points_per_axis
    return SymbolField(PhaseGrid(v.grid), np.repeat(v.values[:, None], n, axis=1))


def twisted_product(sigma: SymbolField, rho: SymbolField) -> SymbolField:
    """sigma # rho, computed through the kernel matrices of the two factors."""
    if sigma.phase_grid != rho.phase_grid:
        raise ValueError("symbol grids do not match")
    return symbol_of_kernel(weyl_quantize(sigma).compose(weyl_quantize(rho)))


def phase_fourier_modes(sigma: SymbolField, rel_tol: float = 1e-12):
    """(coeffs, freqs) of the symbol's Fourier series over the phase box.

    Frequencies are (p, q) with p on the dual of the x axis (step 1/2L) and q
    on the dual of the xi axis (step h); modes below rel_tol * max are dropped.
    """
    g = sigma.phase_grid.base
    _require_1d(g)
    n = g.points_per_axis
    # both axes are centered (0 sits at index N/2), so the shifted FFT is the
    # exact series transform with no origin-phase correction
    c = np.fft.fftshift(np.fft.fft2(np.fft.ifftshift(sigma.values))) / n**2
    a = np.arange(n) - n // 2
    p = a * g.freq_spacing
    q = a * g.spacing
    keep = np.abs(c) > rel_tol * np.max(np.abs(c))
    pa, qa = np.nonzero(keep)
    freqs = np.stack([p[pa], q[qa]], axis=-1)
    return c[pa, qa], freqs


def compose_with_flow(sigma: SymbolField, s: SymplecticBlocks) -> SymbolField:
    """sigma(S z) resampled on the phase grid by trigonometric interpolation.

    The symbol is treated as periodic over the phase box, so transformed
    points falling outside wrap around; exact for grid-periodic symbols.
    """
    pg = sigma.phase_grid
    _require_1d(pg.base)
    coeffs, freqs = phase_fourier_modes(sigma)
    pts = pg.points() @ s.matrix().T
    vals = _kernels.eval_fourier_modes(coeffs, freqs, pts)
    return SymbolField(pg, vals)


def conjugate_through_fio(sigma: SymbolField, phi: PhaseQuadratic) -> SymbolField:
    """Amplitude sigma~ with sigma^w . FIO(Phi) = FIO(Phi, amplitude sigma~).

    Three steps, carried out exactly on the symbol's Fourier modes: a shear
    of the second variable by the x-quadratic coefficient (mode (u, v) picks
    up u -> u + v a), a chirp e^{pi i u v} on each mode (the Fourier-side
    multiplier), and a rescaling of the second variable by the cross
    coefficient (v -> v b).  Working mode-wise avoids the interpolation
    leakage a grid FFT would incur, since the sheared symbol is no longer
    box-periodic.  The result is the two-variable amplitude a(x, y) sampled
    with y on the spatial axis.
    """
    pg = sigma.phase_grid
    g = pg.base
    _require_1d(g)
    if phi.dim != 1:
        raise DimensionUnsupported("FIO conjugation is implemented for d = 1")
    b = -float(phi.m_xy[0, 0])
    if abs(b) < 1e-12:
        raise NotFree("degenerate phase: cross coefficient vanishes")
    a_coef = float(phi.m_xx[0, 0])
    coeffs, freqs = phase_fourier_modes(sigma)
    u = freqs[:, 0] + freqs[:, 1] * a_coef
    v = freqs[:, 1]
    coeffs = coeffs * np.exp(1j * np.pi * u * v)
    out_freqs = np.stack([u, v * b], axis=-1)
    n = g.points_per_axis
    x = g.axis()
    pts = np.stack([np.repeat(x, n), np.tile(x, n)], axis=-1)
    vals = _kernels.eval_fourier_modes(coeffs, out_freqs, pts)
    return SymbolField(pg, vals.reshape(n, n))


def fio_matrix(phi: PhaseQuadratic, grid: GridSpec,
               amplitude: np.ndarray | None = None) -> np.ndarray:
    """Raw oscillatory matrix e^{2 pi i Phi(x_i, y_j)}, optionally with an
    amplitude a(x_i, y_j) factor (no normalization prefactors)."""
    pts = grid.points()
    chirp = _kernels.chirp_kernel(pts, pts, phi.m_xx, phi.m_xy, phi.m_yy)
    if amplitude is not None:
        chirp = chirp * amplitude
    return chirp


def fio_swap_residual(sigma: SymbolField, phi: PhaseQuadratic,
                      collar: int | None = None) -> float:
    """Relative Frobenius residual of the symbol-through-FIO identity.

    The discrete sigma^w is periodic over the box while the oscillatory
    matrix is not, so the identity can only hold away from the wrap: the
    residual is taken over output rows at least `collar` samples from the
    box edge (default N/32).  For band-limited symbols the excluded rows
    carry all of the mismatch and the interior residual is at rounding level.
    """
    g = sigma.phase_grid.base
    if collar is None:
        collar = g.points_per_axis // 32
    lhs = weyl_quantize(sigma).entries @ fio_matrix(phi, g) * g.cell
    rhs = fio_matrix(phi, g, conjugate_through_fio(sigma, phi).values)
    keep = slice(collar, g.points_per_axis - collar)
    return float(np.linalg.norm(lhs[keep] - rhs[keep]) / np.linalg.norm(rhs[keep]))


def symplectic_covariance_residual(sigma: SymbolField, s: SymplecticBlocks) -> float:
    """Relative norm of (sigma o S)^w - mu(S)^{-1} sigma^w mu(S) as matrices.

    mu(S) is assembled on the symbol's base grid; the metaplectic phase
    cancels in the conjugation, so the single-step phase choice suffices.
    The matrix identity is exact (to rounding) when S maps the phase lattice
    to itself, which on an N = 4L^2 grid includes quarter rotations and
    integer shears; for other S the grid realization of mu(S) is not
    invertible-stable and the residual reflects that, so state-level checks
    are the right tool there.
    """
    from .metaplectic import build_propagator  # local import to avoid a cycle

    g = sigma.phase_grid.base
    h = g.cell
    coeffs, freqs = phase_fourier_modes(sigma)
    # sigma(Sz) has modes at S^T q, generally off-lattice; quantize from the
    # modes directly to avoid re-expansion leakage
    lhs = quantize_modes(coeffs, freqs @ s.matrix(), g).entries
    if np.max(np.abs(s.matrix() - np.eye(2 * g.dim))) < 1e-9:
        # composite flows that collapse to the identity are not free
        mu_op = np.eye(g.size, dtype=complex)
    else:
        # the unit phase cancels between mu and mu^{-1}, so fix it to 1
        mu_op = build_propagator(s, g, phase_factor=1.0 + 0.0j).kernel_entries() * h
    inner = weyl_quantize(sigma).entries * h @ mu_op
    rhs = np.linalg.solve(mu_op, inner) / h
    return float(np.linalg.norm(lhs - rhs) / np.linalg.norm(rhs))


def exp_remainder(u: SampledField, t: float, n: int) -> SampledField:
    """u0 with e^{-i(t/n)u} = 1 + i(t/n)u0, i.e. the first-order remainder."""
    if t == 0.0:
        raise ValueError("t must be non-zero")
    tau = t / n
    vals = (np.exp(-1j * tau * u.values) - 1.0) / (1j * tau)
    return SampledField(u.grid, vals)


def almost_diag_profile(sigma: SymbolField, lattice_step: int = 16):
    """Shell maxima of |<sigma^w pi(z) phi, pi(w) phi>| over |w - z| = r.

    phi is the unit Gaussian window; z, w run over a coarse phase lattice
    (every lattice_step-th grid point in x and xi).  Returns a list of
    (radius, peak) pairs sorted by radius and the fitted decay exponent of
    log(peak) against log(1 + radius) over the nonzero tail.
    """
    from .tfa import default_window  # local import to avoid a cycle

    g = sigma.phase_grid.base
    _require_1d(g)
    n = g.points_per_axis
    phi_vals = default_window(g).values
    q = weyl_quantize(sigma).entries * g.cell

    idx = np.arange(0, n, lattice_step)
    xs = g.axis()[idx]
    xis = g.freq_axis()[idx]
    shifts = [np.roll(phi_vals, i - n // 2) for i in idx]
    cols = []
    zpts = []
    x_axis = g.axis()
    for a, sh in enumerate(shifts):
        for b, xi in enumerate(xis):
            cols.append(sh * np.exp(2j * np.pi * xi * x_axis))
            zpts.append((xs[a], xi))
    w = np.stack(cols, axis=1)  # (N, M) columns pi(z) phi
    zpts = np.array(zpts)
    gram = (w.conj().T @ (q @ w)) * g.cell  # <sigma^w pi(z)phi, pi(w)phi>

    diff = zpts[None, :, :] - zpts[:, None, :]
    r = np.sqrt(np.sum(diff**2, axis=-1))
    mags = np.abs(gram)
    shells = {}
    rr = np.round(r, 9)
    for radius in np.unique(rr):
        shells[float(radius)] = float(np.max(mags[rr == radius]))
    table = sorted(shells.items())

    tail = [(rad, pk) for rad, pk in table if rad > 0 and pk > 1e-300]
    if len(tail) >= 2:
        lr = np.log([1.0 + rad for rad, _ in tail])
        lp = np.log([pk for _, pk in tail])
        slope = float(np.polyfit(lr, lp, 1)[0])
    else:
        slope = 0.0
    return table, slope
