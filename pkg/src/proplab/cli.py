"""Configuration-driven experiment runner.

Subcommands: flow, kernel, converge, modbound, exceptional, perturb,
freeslice, oracles.  Each reads an INI config (section layout documented in
the README), runs one scenario, checks the scenario's built-in assertions,
and writes CSV tables plus self-contained SVG line plots into the output
directory.  Exit status: 0 on success, 1 on a failed assertion or scenario
error, 2 on a malformed config.  All outputs are deterministic given the
seed, and files are only written once the whole scenario has finished.
"""

from __future__ import annotations

import argparse
import configparser
import os
import sys
import tempfile

import numpy as np

from .errors import ConfigError, EmptyTable, ProplabError
from .grid import (GridSpec, KernelMatrix, SampledField, dft,
                   sup_norm_on_compact)
from .metaplectic import (FAST_CHIRP_FFT, QUADRATURE, mehler_oracle,
                          propagator_for)
from .rng import SplitMix64
from .symplectic import (QuadraticHamiltonian, canonical_j, flow, phase_form)
from .tfa import (INF_1, MeasurePotential, StftSpec, default_window,
                  frequency_profile, measure_norm_bound, mod_norm,
                  sjostrand_decompose, stft, stft_adjoint, wigner)
from .trotter import (TrotterScenario, convergence_report,
                      exceptional_blowup_scan, factor_out_phase,
                      kernel_mod_norm, perturbation_split_report,
                      time_slice_free_kernel, trotter_kernel)
from .weyl import (fio_swap_residual, symplectic_covariance_residual,
                   weyl_quantize)

EXIT_OK = 0
EXIT_ASSERTION = 1
EXIT_CONFIG = 2


# -- number and file formatting -------------------------------------------

def format_number(x) -> str:
    """Shortest round-trip decimal; integers stay integral."""
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def render_csv(header, rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(format_number(v) for v in row))
    return "\n".join(lines) + "\n"


def _atomic_write(path: str, text: str):
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# -- SVG line plots --------------------------------------------------------

def emit_svg(table, plot_spec) -> str:
    """Self-contained SVG with one polyline per series.

    table: list of (x, y) pair lists, one per series; plot_spec: dict with
    title, xlabel, ylabel, optional xlog/ylog flags and series labels.
    """
    series = table if isinstance(table[0] if table else None, list) else [table]
    if not series or not any(len(s) for s in series):
        raise EmptyTable("no rows to plot")
    width, height = 640, 420
    ml, mr, mt, mb = 70, 20, 40, 50
    xlog = plot_spec.get("xlog", False)
    ylog = plot_spec.get("ylog", False)

    def tx(v, log):
        return np.log10(v) if log else v

    xs = [tx(p[0], xlog) for s in series for p in s]
    ys = [tx(p[1], ylog) for s in series for p in s]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0

    def px(v):
        return ml + (tx(v, xlog) - x0) / (x1 - x0) * (width - ml - mr)

    def py(v):
        return height - mb - (tx(v, ylog) - y0) / (y1 - y0) * (height - mt - mb)

    colors = ["#1b6ca8", "#c0392b", "#27ae60", "#8e44ad", "#d68910",
              "#16a085", "#7f8c8d", "#2c3e50", "#a93226"]
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2}" y="24" text-anchor="middle" font-family="monospace" '
        f'font-size="14">{plot_spec.get("title", "")}</text>',
        f'<text x="{width / 2}" y="{height - 12}" text-anchor="middle" '
        f'font-family="monospace" font-size="12">{plot_spec.get("xlabel", "")}</text>',
        f'<text x="16" y="{height / 2}" text-anchor="middle" font-family="monospace" '
        f'font-size="12" transform="rotate(-90 16 {height / 2})">'
        f'{plot_spec.get("ylabel", "")}</text>',
        f'<rect x="{ml}" y="{mt}" width="{width - ml - mr}" '
        f'height="{height - mt - mb}" fill="none" stroke="#555"/>',
    ]
    for corner, anchor, val in ((ml, "start", x0), (width - mr, "end", x1)):
        label = f"1e{val:.2f}" if xlog else f"{val:.4g}"
        parts.append(f'<text x="{corner}" y="{height - mb + 16}" text-anchor="{anchor}" '
                     f'font-family="monospace" font-size="10">{label}</text>')
    for yv, val in ((height - mb, y0), (mt, y1)):
        label = f"1e{val:.2f}" if ylog else f"{val:.4g}"
        parts.append(f'<text x="{ml - 6}" y="{yv + 4}" text-anchor="end" '
                     f'font-family="monospace" font-size="10">{label}</text>')
    labels = plot_spec.get("labels", [])
    for k, s in enumerate(series):
        color = colors[k % len(colors)]
        pts = " ".join(f"{px(p[0]):.2f},{py(p[1]):.2f}" for p in s)
        if len(s) == 1:
            parts.append(f'<circle cx="{px(s[0][0]):.2f}" cy="{py(s[0][1]):.2f}" '
                         f'r="4" fill="{color}"/>')
        else:
            parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                         f'stroke-width="1.5"/>')
        if k < len(labels):
            parts.append(f'<text x="{width - mr - 8}" y="{mt + 16 + 14 * k}" '
                         f'text-anchor="end" font-family="monospace" font-size="11" '
                         f'fill="{color}">{labels[k]}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


# -- config parsing --------------------------------------------------------

def _floats(text: str):
    return [float(v.strip()) for v in text.split(",") if v.strip()]


def _ints(text: str):
    return [int(v.strip()) for v in text.split(",") if v.strip()]


class Config:
    """Validated view over the INI file."""

    def __init__(self, path: str, seed_override=None):
        parser = configparser.ConfigParser()
        read = parser.read(path)
        if not read:
            raise ConfigError(f"cannot read config file: {path}")
        self.parser = parser
        self.path = path
        self.seed = seed_override
        if self.seed is None:
            self.seed = self.get_int("experiment", "seed", 1)

    def get(self, section, key, default=None):
        try:
            return self.parser.get(section, key)
        except (configparser.NoSectionError, configparser.NoOptionError):
            if default is None:
                raise ConfigError(f"missing [{section}] {key} in {self.path}")
            return default

    def get_float(self, section, key, default=None):
        raw = self.get(section, key, None if default is None else str(default))
        try:
            return float(raw)
        except ValueError:
            raise ConfigError(f"[{section}] {key}: not a number: {raw!r}")

    def get_int(self, section, key, default=None):
        raw = self.get(section, key, None if default is None else str(default))
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(f"[{section}] {key}: not an integer: {raw!r}")

    def grid(self) -> GridSpec:
        d = self.get_int("grid", "dim", 1)
        half = self.get_float("grid", "half_width")
        pts = self.get_int("grid", "points")
        try:
            return GridSpec(d, half, pts)
        except ValueError as err:
            raise ConfigError(f"[grid]: {err}")

    def hamiltonian(self) -> QuadraticHamiltonian:
        preset = self.get("hamiltonian", "preset", "harmonic")
        if preset == "harmonic":
            return QuadraticHamiltonian.harmonic(1)
        if preset == "free":
            return QuadraticHamiltonian.free_particle(1)
        if preset == "explicit":
            a = self.get_float("hamiltonian", "a")
            b = self.get_float("hamiltonian", "b")
            c = self.get_float("hamiltonian", "c")
            return QuadraticHamiltonian(1, [[a]], [[b]], [[c]])
        raise ConfigError(f"unknown hamiltonian preset: {preset}")

    def potential(self, grid: GridSpec) -> SampledField:
        preset = self.get("potential", "preset", "zero")
        x = grid.points()[:, 0] if grid.dim == 1 else None
        if preset == "zero":
            return SampledField(grid, np.zeros(grid.size))
        if preset == "cosine-sum":
            terms = self.get("potential", "terms")
            vals = np.zeros(grid.size)
            for item in terms.split(","):
                if not item.strip():
                    continue
                try:
                    amp, freq = item.split(":")
                    vals = vals + float(amp) * np.cos(2.0 * np.pi * float(freq) * x)
                except ValueError:
                    raise ConfigError(f"[potential] terms: bad item {item!r}")
            return SampledField(grid, vals)
        if preset == "gaussian-bump":
            amp = self.get_float("potential", "amplitude", 1.0)
            width = self.get_float("potential", "width", 1.0)
            center = self.get_float("potential", "center", 0.0)
            return SampledField(grid, amp * np.exp(-np.pi * ((x - center) / width) ** 2))
        if preset == "measure-atoms":
            atoms = self.measure_atoms()
            vals = np.zeros(grid.size, dtype=complex)
            for k, c in atoms.atoms:
                vals = vals + c * np.exp(2j * np.pi * k * x)
            return SampledField(grid, vals)
        if preset == "random-band-limited":
            band = self.get_int("potential", "band", 5)
            rng = SplitMix64(self.seed)
            n = grid.points_per_axis
            spec = np.zeros(n, dtype=complex)
            coeffs = rng.normals(2 * band + 1) + 1j * rng.normals(2 * band + 1)
            spec[n // 2 - band: n // 2 + band + 1] = coeffs
            # hermitian symmetry keeps the potential real
            spec = 0.5 * (spec + np.conj(spec[::-1].copy()))
            field = dft(SampledField(grid, spec), +1)
            return SampledField(grid, field.values.real)
        raise ConfigError(f"unknown potential preset: {preset}")

    def measure_atoms(self) -> MeasurePotential:
        raw = self.get("potential", "atoms")
        atoms = []
        for item in raw.split(","):
            if not item.strip():
                continue
            try:
                k, c = item.split(":")
                atoms.append((float(k), complex(c)))
            except ValueError:
                raise ConfigError(f"[potential] atoms: bad item {item!r}")
        return MeasurePotential(tuple(atoms))


# -- scenario runners ------------------------------------------------------

def _check(ok: bool, message: str, failures: list):
    if not ok:
        failures.append(message)


def run_flow(cfg: Config, out: dict, quiet: bool):
    """Random-Hamiltonian flow suite: symplectic, group-law, inverse defects."""
    count = cfg.get_int("flow", "count", 200)
    t_lo, t_hi = _floats(cfg.get("flow", "t_range", "-10,10"))
    tol_sym = cfg.get_float("flow", "symplectic_tol", 1e-10)
    tol_group = cfg.get_float("flow", "group_tol", 1e-8)
    tol_inv = cfg.get_float("flow", "inverse_tol", 1e-10)
    rng = SplitMix64(cfg.seed)
    j = canonical_j(1)
    rows = []
    failures = []
    for i in range(count):
        a = rng.normals(1)[0]
        b = rng.normals(1)[0]
        c = rng.normals(1)[0]
        t = t_lo + (t_hi - t_lo) * rng.uniform()
        h = QuadraticHamiltonian(1, [[a]], [[b]], [[c]])
        m = flow(h, t).matrix()
        sym = float(np.max(np.abs(m.T @ j @ m - j)))
        m2 = flow(h, 0.5 * t).matrix()
        group = float(np.max(np.abs(m2 @ m2 - m)))
        minv = flow(h, -t).matrix()
        inv = float(np.max(np.abs(minv @ m - np.eye(2))))
        rows.append((i, t, sym, group, inv))
        _check(sym <= tol_sym, f"symplectic defect {sym:.2e} at case {i}", failures)
        _check(group <= tol_group, f"group-law defect {group:.2e} at case {i}", failures)
        _check(inv <= tol_inv, f"inverse defect {inv:.2e} at case {i}", failures)
    out["flow.csv"] = render_csv(
        ("case", "t", "symplectic_defect", "group_defect", "inverse_defect"), rows)
    out["flow.svg"] = emit_svg(
        [[(r[0] + 1, max(r[2], 1e-18)) for r in rows]],
        {"title": "flow defects", "xlabel": "case", "ylabel": "symplectic defect",
         "ylog": True})
    return failures


def run_kernel(cfg: Config, out: dict, quiet: bool):
    """Propagator kernel oracle comparisons on one grid."""
    grid = cfg.grid()
    h = cfg.hamiltonian()
    t = cfg.get_float("time", "t", 1.0)
    preset = cfg.get("hamiltonian", "preset", "harmonic")
    radius = cfg.get_float("kernel", "radius", 0.5 * grid.half_width)
    tol = cfg.get_float("kernel", "tolerance", 1e-3)
    failures = []
    rows = []
    prop = propagator_for(h, t, grid, method=QUADRATURE)
    kq = prop.kernel()
    if preset == "free":
        pts = grid.points()
        diff = pts[:, None, :] - pts[None, :, :]
        ana = np.exp(1j * np.sum(diff**2, axis=-1) / (2.0 * t)) \
            / np.sqrt(2j * np.pi * t) ** grid.dim
        scale = float(np.max(np.abs(ana)))
        err = sup_norm_on_compact(kq, KernelMatrix(grid, ana), radius) / scale
        rows.append(("free_vs_analytic", err, tol))
        _check(err <= tol, f"free kernel error {err:.2e} > {tol}", failures)
    elif preset == "harmonic":
        ko = mehler_oracle(t, grid)
        scale = float(np.max(np.abs(ko.entries)))
        err = float(np.max(np.abs(kq.entries - ko.entries))) / scale
        rows.append(("quadrature_vs_mehler", err, tol))
        _check(err <= tol, f"mehler mismatch {err:.2e} > {tol}", failures)
        pf = propagator_for(h, t, grid, method=FAST_CHIRP_FFT)
        cols = np.eye(grid.size, dtype=complex) / grid.cell
        kf = pf.apply_columns(cols)
        err2 = float(np.max(np.abs(kf - kq.entries))) / scale
        rows.append(("fast_vs_quadrature", err2, tol))
        _check(err2 <= tol, f"fast path mismatch {err2:.2e} > {tol}", failures)
        sup_pred = abs(np.sin(t)) ** (-0.5 * grid.dim)
        sup_err = abs(float(np.max(np.abs(kq.entries))) - sup_pred) / sup_pred
        rows.append(("sup_magnitude", sup_err, tol))
        _check(sup_err <= tol, f"sup magnitude off by {sup_err:.2e}", failures)
    out["kernel.csv"] = render_csv(("check", "residual", "threshold"), rows)
    out["kernel.svg"] = emit_svg(
        [[(i + 1, max(r[1], 1e-18)) for i, r in enumerate(rows)]],
        {"title": "kernel oracle residuals", "xlabel": "check #",
         "ylabel": "residual", "ylog": True})
    return failures


def _scenario(cfg: Config):
    grid = cfg.grid()
    h = cfg.hamiltonian()
    v = cfg.potential(grid)
    t = cfg.get_float("time", "t", 1.0)
    n_list = _ints(cfg.get("time", "n_list", "4,8,16,32,64,128,256"))
    ref_n = cfg.get_int("time", "reference_n", 4 * max(n_list))
    return TrotterScenario(h, v, t, tuple(n_list), grid, ref_n)


def run_converge(cfg: Config, out: dict, quiet: bool):
    sc = _scenario(cfg)
    collapse_tol = cfg.get_float("converge", "collapse_tol", 0.0)
    rep = convergence_report(sc)
    centers = rep.window_centers
    header = ["n", "sup_error"]
    header += [f"fl1_z{i}{j}" for i in range(3) for j in range(3)][: len(centers)]
    header += ["mod_inf1", "mod_infs"]
    rows = [(r.n, r.sup_error, *r.windowed, r.mod_inf1, r.mod_infs)
            for r in rep.rows]
    out["converge.csv"] = render_csv(header, rows)
    out["converge.svg"] = emit_svg(
        [[(r.n, max(r.sup_error, 1e-18)) for r in rep.rows]],
        {"title": "kernel convergence", "xlabel": "n", "ylabel": "sup error",
         "xlog": True, "ylog": True, "labels": ["sup error"]})
    failures = []
    sup = [r.sup_error for r in rep.rows]
    if collapse_tol > 0.0:
        _check(max(sup) <= collapse_tol,
               f"collapse error {max(sup):.2e} > {collapse_tol}", failures)
    else:
        _check(all(a > b for a, b in zip(sup, sup[1:])),
               "sup errors are not strictly decreasing", failures)
        _check(sup[-1] <= 5.0 * rep.cauchy_tag,
               f"final error {sup[-1]:.2e} above 5x Cauchy tag {rep.cauchy_tag:.2e}",
               failures)
        floor = 5.0 * rep.cauchy_tag
        for j in range(len(centers)):
            seq = [r.windowed[j] for r in rep.rows]
            ok = all(a > b or b <= floor for a, b in zip(seq, seq[1:]))
            _check(ok, f"windowed error at center {j} not decreasing", failures)
    _check(not rep.skipped, f"skipped step counts: {rep.skipped}", failures)
    return failures


def run_modbound(cfg: Config, out: dict, quiet: bool):
    sc = _scenario(cfg)
    ratio_cap = cfg.get_float("modbound", "ratio_cap", 3.0)
    phi = phase_form(flow(sc.hamiltonian, sc.t))
    rows = []
    for n in sc.n_list:
        k = trotter_kernel(sc, n)
        flat = factor_out_phase(k, phi)
        rows.append((n, kernel_mod_norm(flat, INF_1)))
    norms = [r[1] for r in rows]
    ratio = max(norms) / min(norms)
    out["modbound.csv"] = render_csv(("n", "mod_inf1"), rows)
    out["modbound.svg"] = emit_svg(
        [[(n, v) for n, v in rows]],
        {"title": "phase-factored mod norm", "xlabel": "n",
         "ylabel": "Inf1 norm", "xlog": True})
    failures = []
    _check(ratio <= ratio_cap, f"mod-norm ratio {ratio:.3f} > {ratio_cap}", failures)
    return failures


def run_exceptional(cfg: Config, out: dict, quiet: bool):
    grid = cfg.grid()
    h = cfg.hamiltonian()
    t_star = cfg.get_float("exceptional", "t_star")
    offsets = _floats(cfg.get("exceptional", "offsets", "0.2,0.1,0.05,0.025"))
    spread_cap = cfg.get_float("exceptional", "ratio_spread", 0.01)
    rows = exceptional_blowup_scan(h, t_star, offsets, grid)
    out["exceptional.csv"] = render_csv(
        ("delta", "sup_kernel", "detB_invsqrt", "ratio"), rows)
    out["exceptional.svg"] = emit_svg(
        [[(r[0], r[1]) for r in rows], [(r[0], r[2]) for r in rows]],
        {"title": "blow-up approaching the exceptional time", "xlabel": "delta",
         "ylabel": "sup |kernel|", "xlog": True, "ylog": True,
         "labels": ["measured", "|det B|^-1/2"]})
    ratios = [r[3] for r in rows]
    spread = max(ratios) / min(ratios) - 1.0
    failures = []
    _check(spread <= spread_cap,
           f"ratio spread {spread:.4f} exceeds {spread_cap}", failures)
    return failures


def run_perturb(cfg: Config, out: dict, quiet: bool):
    sc = _scenario(cfg)
    eps_list = _floats(cfg.get("perturb", "eps_list", "0.2,0.1,0.05"))
    slope_lo = cfg.get_float("perturb", "slope_lo", 0.8)
    slope_hi = cfg.get_float("perturb", "slope_hi", 1.2)
    check_decomp = cfg.get("perturb", "check_decomposition", "no") == "yes"
    n = cfg.get_int("perturb", "n", max(sc.n_list))
    failures = []
    results = []
    spec = StftSpec(default_window(sc.grid))
    for eps in eps_list:
        if check_decomp:
            f1, f2, r = sjostrand_decompose(sc.potential, eps, spec)
            norm2 = mod_norm(f2, spec, INF_1)
            _check(norm2 <= eps, f"||f2|| = {norm2:.4e} exceeds eps {eps}", failures)
            # the low band must stay frequency-localized near the cut radius
            prof = frequency_profile(f1, spec)
            radii = np.linalg.norm(spec.xi_points(), axis=1).reshape(prof.shape)
            leak = float(np.sum(prof[radii > r + 2.0]) / np.sum(prof))
            _check(leak <= 1e-6, f"f1 leaks {leak:.2e} beyond the cut", failures)
        rem, bound = perturbation_split_report(sc, eps, n)
        _check(rem <= bound, f"remainder {rem:.3e} above bound {bound:.3e}", failures)
        results.append((eps, rem))
    slope = float(np.polyfit(np.log([r[0] for r in results]),
                             np.log([max(r[1], 1e-300) for r in results]), 1)[0])
    rows = [(eps, rem, slope) for eps, rem in results]
    out["perturb.csv"] = render_csv(("epsilon", "remainder_norm", "linear_fit_slope"), rows)
    out["perturb.svg"] = emit_svg(
        [[(eps, max(rem, 1e-18)) for eps, rem in results]],
        {"title": "remainder vs split budget", "xlabel": "epsilon",
         "ylabel": "remainder norm", "xlog": True, "ylog": True})
    _check(slope_lo <= slope <= slope_hi,
           f"log-log slope {slope:.3f} outside [{slope_lo}, {slope_hi}]", failures)
    return failures


def run_freeslice(cfg: Config, out: dict, quiet: bool):
    grid = cfg.grid()
    v = cfg.potential(grid)
    t = cfg.get_float("time", "t", 1.0)
    n_list = _ints(cfg.get("time", "n_list", "1,2,4,8"))
    tol = cfg.get_float("freeslice", "tolerance", 1e-8)
    h = QuadraticHamiltonian.free_particle(1)
    failures = []
    rows = []
    for n in n_list:
        sc = TrotterScenario(h, v, t, (n,), grid, 4 * n)
        kt = trotter_kernel(sc, n, method="chirp")
        ks = time_slice_free_kernel(v, t, n, grid)
        scale = float(np.max(np.abs(kt.entries)))
        err = float(np.max(np.abs(kt.entries - ks.entries))) / scale
        rows.append((n, err))
        _check(err <= tol, f"slice mismatch {err:.2e} at n={n}", failures)
    out["freeslice.csv"] = render_csv(("n", "relative_difference"), rows)
    out["freeslice.svg"] = emit_svg(
        [[(n, max(e, 1e-18)) for n, e in rows]],
        {"title": "polygonal slicing vs product kernel", "xlabel": "n",
         "ylabel": "relative difference", "ylog": True})
    return failures


ORACLE_CHECKS = ("free_kernel", "mehler", "stft_inversion", "wigner_duality",
                 "covariance", "fio_swap", "measure_bound")


def _random_symbol(rng: SplitMix64, grid: GridSpec):
    """Smooth band-limited random symbol on the phase grid."""
    from .grid import PhaseGrid, SymbolField

    n = grid.points_per_axis
    c = np.zeros((n, n), dtype=complex)
    c[n // 2 - 6: n // 2 + 7, n // 2 - 3: n // 2 + 4] = (
        rng.normals(13 * 7).reshape(13, 7) + 1j * rng.normals(13 * 7).reshape(13, 7))
    vals = np.fft.fftshift(np.fft.ifft2(np.fft.ifftshift(c))) * n * n
    return SymbolField(PhaseGrid(grid), vals)


def _oracle_battery(cfg: Config, checks):
    """(name, residual, threshold) triples for the cross-module oracle run."""
    grid = GridSpec(1, 8.0, 256)
    rng = SplitMix64(cfg.seed)
    sspec = StftSpec(default_window(grid))
    harm = QuadraticHamiltonian.harmonic(1)
    rows = []

    if "free_kernel" in checks:
        free = QuadraticHamiltonian.free_particle(1)
        g12 = GridSpec(1, 12.0, 1024)
        prop = propagator_for(free, 1.0, g12, method=QUADRATURE)
        pts = g12.points()
        ana = np.exp(1j * (pts[:, 0][:, None] - pts[:, 0][None, :]) ** 2 / 2.0) \
            / np.sqrt(2j * np.pi)
        err = sup_norm_on_compact(prop.kernel(), KernelMatrix(g12, ana), 6.0) \
            / float(np.max(np.abs(ana)))
        rows.append(("free_kernel", err, 1e-3))

    if "mehler" in checks:
        ko = mehler_oracle(1.0, grid)
        kq = propagator_for(harm, 1.0, grid, method=QUADRATURE).kernel()
        rows.append(("mehler", float(np.max(np.abs(ko.entries - kq.entries)))
                     / float(np.max(np.abs(ko.entries))), 1e-6))

    n = grid.points_per_axis
    spec_vals = np.zeros(n, dtype=complex)
    spec_vals[n // 2 - 12: n // 2 + 12] = rng.normals(24) + 1j * rng.normals(24)
    f = dft(SampledField(grid, spec_vals), +1)

    if "stft_inversion" in checks:
        rec = stft_adjoint(stft(f, sspec), sspec)
        rows.append(("stft_inversion",
                     float(np.linalg.norm(rec.values - f.values))
                     / float(np.linalg.norm(f.values)), 1e-8))

    sig = _random_symbol(rng, grid)

    if "wigner_duality" in checks:
        # localized packets: the periodized quantizer and the non-periodic
        # Wigner transform only agree on functions that decay inside the box
        x = grid.axis()
        fp = SampledField(grid, np.exp(-np.pi * (x - 0.3) ** 2)
                          * np.exp(2j * np.pi * 0.7 * x))
        gp = SampledField(grid, np.exp(-np.pi * (x + 0.5) ** 2 / 1.3)
                          * np.exp(-2j * np.pi * 1.1 * x))
        lhs = np.vdot(gp.values, weyl_quantize(sig).apply(fp).values) * grid.cell
        w = wigner(fp, gp)
        rhs = np.sum(sig.values * w.values) * sig.phase_grid.cell
        rows.append(("wigner_duality", abs(lhs - rhs) / abs(rhs), 1e-6))

    if "covariance" in checks:
        quarter = flow(harm, 0.5 * np.pi)
        rows.append(("covariance",
                     symplectic_covariance_residual(sig, quarter), 1e-3))

    if "fio_swap" in checks:
        phi = phase_form(flow(harm, 0.7))
        rows.append(("fio_swap", fio_swap_residual(sig, phi), 1e-3))

    if "measure_bound" in checks:
        sets = cfg.get_int("oracles", "measure_sets", 10)
        worst = 0.0
        for _ in range(sets):
            count = 2 + int(rng.uniform() * 4)
            atoms = tuple((round(float(rng.uniform() * 4 - 2) * 16) / 16,
                           complex(rng.normals(1)[0], rng.normals(1)[0]))
                          for _ in range(count))
            lhs_v, rhs_v = measure_norm_bound(MeasurePotential(atoms), sspec)
            if rhs_v > 0:
                worst = max(worst, lhs_v / rhs_v)
        rows.append(("measure_bound", worst, 1.05))
    return rows


def run_oracles(cfg: Config, out: dict, quiet: bool):
    raw = cfg.get("oracles", "checks", ",".join(ORACLE_CHECKS))
    checks = [c.strip() for c in raw.split(",") if c.strip()]
    unknown = [c for c in checks if c not in ORACLE_CHECKS]
    if unknown:
        raise ConfigError(f"unknown oracle checks: {unknown}")
    rows = _oracle_battery(cfg, checks)
    failures = []
    for name, residual, threshold in rows:
        _check(residual <= threshold,
               f"oracle {name}: {residual:.3e} > {threshold}", failures)
    out["oracles.csv"] = render_csv(
        ("check", "residual", "threshold"),
        [(name, res, thr) for name, res, thr in rows])
    out["oracles.svg"] = emit_svg(
        [[(i + 1, max(res, 1e-18)) for i, (_, res, _) in enumerate(rows)]],
        {"title": "oracle residuals", "xlabel": "check #", "ylabel": "residual",
         "ylog": True})
    return failures


RUNNERS = {
    "flow": run_flow,
    "kernel": run_kernel,
    "converge": run_converge,
    "modbound": run_modbound,
    "exceptional": run_exceptional,
    "perturb": run_perturb,
    "freeslice": run_freeslice,
    "oracles": run_oracles,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="proplab", description="product-formula propagator experiments")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in RUNNERS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True)
        p.add_argument("--out", default=".")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--threads", type=int, default=None)
        p.add_argument("--quiet", action="store_true")
    args = parser.parse_args(argv)

    if args.threads is not None:
        try:
            import numba
            numba.set_num_threads(max(1, args.threads))
        except ImportError:
            pass

    try:
        cfg = Config(args.config, seed_override=args.seed)
        out_files: dict = {}
        failures = RUNNERS[args.command](cfg, out_files, args.quiet)
    except (ConfigError, configparser.Error) as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except ProplabError as err:
        print(f"{type(err).__name__}: {err}", file=sys.stderr)
        return EXIT_ASSERTION

    os.makedirs(args.out, exist_ok=True)
    for name, text in sorted(out_files.items()):
        _atomic_write(os.path.join(args.out, name), text)
        if not args.quiet:
            print(f"wrote {os.path.join(args.out, name)}")
    if failures:
        for msg in failures:
            print(f"FAILED: {msg}", file=sys.stderr)
        return EXIT_ASSERTION
    if not args.quiet:
        print("all assertions passed")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
