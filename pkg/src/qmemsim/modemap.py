"""Mode map over junction inductance and the avoided-crossing fit.

mode_map() sweeps the cell for every inductance on a grid and records the
two lowest notch resonances in band.  Narrow far-detuned dips would slip
through a uniform coarse grid, so each row reuses the previous row's peak
positions as focused dense windows (mode tracking).

fit_avoided_crossing() fits the two-branch hybridization model

    f+-(l) = (f_a(l) + f_b)/2 +- sqrt( ((f_a(l) - f_b)/2)^2 + g^2 )

with a constant bare cavity frequency f_b, a cubic bare coupler branch
f_a(l) and coupling g (linear frequency, half the minimum splitting).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from .cell import (
    MemoryCell,
    adaptive_sweep,
    sc_mode_estimate,
    tcr_mode_estimate,
)
from .jjfet import On
from .resonance import ResonancePeak, find_resonances


@dataclass(frozen=True)
class ModeMapRow:
    """Two lowest in-band resonances at one junction inductance."""

    l_j: float
    f_mode1: float
    f_mode2: float

    def __post_init__(self):
        if not (0 < self.f_mode1 < self.f_mode2):
            raise ValueError("mode map row requires 0 < f_mode1 < f_mode2")

    @property
    def splitting(self) -> float:
        return self.f_mode2 - self.f_mode1


@dataclass(frozen=True)
class ModeMap:
    """Mode frequencies over a swept inductance grid.

    rows hold every grid point where two resonances were resolved; points
    where fewer than two dips were found are listed in `flagged` with a
    reason and excluded from fits.
    """

    rows: tuple[ModeMapRow, ...]
    flagged: tuple[tuple[float, str], ...] = ()

    def __post_init__(self):
        if any(
            a.l_j >= b.l_j for a, b in zip(self.rows, self.rows[1:])
        ):
            raise ValueError("mode map rows must be sorted by inductance")

    @property
    def l(self):
        return np.array([r.l_j for r in self.rows])

    @property
    def f1(self):
        return np.array([r.f_mode1 for r in self.rows])

    @property
    def f2(self):
        return np.array([r.f_mode2 for r in self.rows])

    @property
    def splitting(self):
        return self.f2 - self.f1


def default_band(cell: MemoryCell, l_grid) -> tuple[float, float]:
    """Frequency band wide enough to hold both modes over the whole sweep."""
    f_sc = sc_mode_estimate(cell)
    f_lo = min(tcr_mode_estimate(cell, max(l_grid)), f_sc)
    f_hi = max(tcr_mode_estimate(cell, min(l_grid)), f_sc)
    return 0.90 * f_lo, 1.10 * f_hi


def _row_peaks(cell, l_j, band, focus, min_depth_db):
    freqs, s21 = adaptive_sweep(
        cell, On(l_j), band, detect_db=min_depth_db / 2, focus=focus
    )
    peaks = [p for p in find_resonances(freqs, s21, min_depth_db=min_depth_db)
             if band[0] < p.f0 < band[1]]
    return peaks[:2]


def _focus_from(peaks: list[ResonancePeak]):
    windows = []
    for p in peaks:
        lw = p.f0 / p.q_loaded if p.q_loaded else 1e6
        half = max(15.0 * lw, 4e7)
        windows.append((p.f0, half, max(lw / 8.0, 2e3)))
    return windows


def mode_map(cell: MemoryCell, l_grid, f_band=None, min_depth_db: float = 0.01) -> ModeMap:
    """Two-mode map of the cell over a junction-inductance grid.

    Parameters
    ----------
    l_grid : strictly increasing inductances, henry
    f_band : (lo, hi) Hz; derived from the geometry when omitted
    min_depth_db : detection threshold passed to the peak finder

    Grid points where two dips could not be resolved are flagged and
    excluded, never silently dropped.
    """
    l_grid = np.asarray(l_grid, dtype=float)
    if l_grid.ndim != 1 or len(l_grid) < 2:
        raise ValueError("l_grid must hold at least two inductances")
    if np.any(l_grid <= 0) or np.any(np.diff(l_grid) <= 0):
        raise ValueError("l_grid must be positive and strictly increasing")
    band = f_band if f_band is not None else default_band(cell, l_grid)

    rows = []
    flagged = []
    tracked: list[ResonancePeak] = []
    for l_j in l_grid:
        focus = _focus_from(tracked) if tracked else [
            (sc_mode_estimate(cell), 5e7, 1e4),
            (tcr_mode_estimate(cell, l_j), 2e8, 1e5),
        ]
        peaks = _row_peaks(cell, l_j, band, focus, min_depth_db)
        if len(peaks) < 2:
            flagged.append((float(l_j), f"{len(peaks)} resonance(s) in band"))
            continue
        rows.append(ModeMapRow(float(l_j), peaks[0].f0, peaks[1].f0))
        tracked = peaks
    return ModeMap(rows=tuple(rows), flagged=tuple(flagged))


# ------------------------- hybridization model -------------------------


@dataclass(frozen=True)
class CrossingFit:
    """Fitted avoided crossing.

    g : Hz, coupling strength (half the minimum splitting)
    l_cross : henry, inductance of closest approach
    f_cross : Hz, frequency at closest approach (bare-cavity branch)
    window : (henry, henry), inductances where the splitting stays within
        sqrt(2) of its minimum
    coeffs : cubic coefficients of the bare coupler branch (highest first,
        arguments in henry, values in Hz)
    residual_rms : Hz, rms misfit over both branches
    """

    g: float
    l_cross: float
    f_cross: float
    window: tuple[float, float]
    coeffs: tuple[float, float, float, float]
    residual_rms: float

    def __post_init__(self):
        if self.g <= 0:
            raise ValueError("coupling must be positive")
        if not self.window[0] <= self.l_cross <= self.window[1]:
            raise ValueError("closest approach must lie inside the window")

    def bare_coupler(self, l_j):
        """Bare coupler-branch frequency f_a(l_j), Hz."""
        return np.polyval(self.coeffs, l_j)

    @property
    def bare_cavity(self) -> float:
        """Bare storage-branch frequency f_b, Hz."""
        return self.f_cross

    def branches(self, l_j):
        """Model hybridized branches (f_minus, f_plus) at l_j."""
        fa = self.bare_coupler(l_j)
        fb = self.f_cross
        mid = 0.5 * (fa + fb)
        gap = np.sqrt(0.25 * (fa - fb) ** 2 + self.g**2)
        return mid - gap, mid + gap


def hybridized_map(l_grid, coeffs, f_b: float, g: float) -> ModeMap:
    """Closed-form two-mode map; the oracle generator for the fit."""
    rows = []
    for l_j in np.asarray(l_grid, dtype=float):
        fa = float(np.polyval(coeffs, l_j))
        mid = 0.5 * (fa + f_b)
        gap = math.sqrt(0.25 * (fa - f_b) ** 2 + g**2)
        rows.append(ModeMapRow(float(l_j), mid - gap, mid + gap))
    return ModeMap(rows=tuple(rows))


def _bracketed_root(fn, grid, pick_near: float):
    vals = np.array([fn(x) for x in grid])
    sign_change = np.where(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
    if len(sign_change) == 0:
        return None
    i = sign_change[np.argmin(np.abs(grid[sign_change] - pick_near))]
    lo, hi = grid[i], grid[i + 1]
    flo = fn(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = fn(mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
        if hi - lo <= 1e-12 * abs(mid):
            break
    return 0.5 * (lo + hi)


def fit_avoided_crossing(mode_map: ModeMap) -> CrossingFit:
    """Least-squares hybridization fit of a mode map.

    Requires at least 8 valid rows and a crossing inside the grid;
    otherwise raises ValueError("crossing not bracketed").
    """
    if len(mode_map.rows) < 8:
        raise ValueError("need at least 8 valid mode-map rows to fit")
    l = mode_map.l
    f1 = mode_map.f1
    f2 = mode_map.f2

    scale = 1e9  # condition the fit in GHz
    fb0 = 0.5 * (f1[0] + f2[-1]) / scale
    fa0 = (f1 + f2) / scale - fb0
    coeffs0 = np.polyfit(l / 1e-12, fa0, 3)  # per-pH powers for conditioning
    g0 = 0.5 * np.min(f2 - f1) / scale

    def model(p):
        fb, g = p[0], p[1]
        fa = np.polyval(p[2:], l / 1e-12)
        mid = 0.5 * (fa + fb)
        gap = np.sqrt(0.25 * (fa - fb) ** 2 + g**2)
        return mid - gap, mid + gap

    def residuals(p):
        lo, hi = model(p)
        return np.concatenate([lo - f1 / scale, hi - f2 / scale])

    p0 = np.concatenate([[fb0, g0], coeffs0])
    res = least_squares(residuals, p0, xtol=1e-15, ftol=1e-15, gtol=1e-15)
    fb = res.x[0] * scale
    g = abs(res.x[1]) * scale
    coeffs_ph = res.x[2:]

    # back to SI: polynomial in henry
    coeffs = tuple(
        float(c * scale / (1e-12 ** k)) for c, k in zip(coeffs_ph, (3, 2, 1, 0))
    )

    def fa_si(l_j):
        return np.polyval(coeffs, l_j)

    grid = np.linspace(l[0], l[-1], 512)
    l_cross = _bracketed_root(lambda x: fa_si(x) - fb, grid, l[np.argmin(f2 - f1)])
    if l_cross is None:
        raise ValueError("crossing not bracketed")
    lo_edge = _bracketed_root(lambda x: fa_si(x) - fb - 2.0 * g, grid, l_cross)
    hi_edge = _bracketed_root(lambda x: fa_si(x) - fb + 2.0 * g, grid, l_cross)
    edges = sorted(
        [e if e is not None else edge for e, edge in ((lo_edge, l[0]), (hi_edge, l[-1]))]
    )
    rms = float(np.sqrt(np.mean(res.fun**2))) * scale
    return CrossingFit(
        g=float(g),
        l_cross=float(l_cross),
        f_cross=float(fb),
        window=(float(edges[0]), float(edges[1])),
        coeffs=coeffs,
        residual_rms=rms,
    )
