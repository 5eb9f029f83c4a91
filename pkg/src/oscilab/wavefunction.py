"""Position-space representation: Hermite numerics, eigenfunctions, packets.

Two evaluation strategies coexist on purpose. The standalone `hermite` uses
the raw polynomial recurrence H_{k+1} = 2x H_k - 2k H_{k-1}, which overflows
near n ~ 150 at moderate x. Eigenfunctions therefore run the recurrence on
the Gaussian-weighted, orthonormal functions directly, which stay bounded
for any level.

The coherent packet is available as a truncated eigenfunction series and in
two algebraically identical closed forms: a Gaussian with a complex center,
and the historical form written through the mean coordinate and momentum.
Their pointwise agreement is asserted in tests rather than assumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .coherent import CoherentLabel, dynamical_coherent_state
from .fock import DimensionMismatchError, OscillatorParams
from .observables import averages_closedform

__all__ = [
    "CLOSED_FORMS",
    "SpatialGrid",
    "WaveSample",
    "hermite",
    "eigenfunction",
    "eigenfunction_table",
    "generating_sum_check",
    "psi_series",
    "psi_series_grid",
    "psi_closed",
    "psi_closed_grid",
    "quadrature_norm",
    "packet_moments",
    "trapezoid_grid",
    "default_packet_grid",
    "gauss_hermite_grid",
]

# The complex-center Gaussian and the Schrodinger mean-coordinate form.
CLOSED_FORMS = ("complex_center", "schrodinger")

DEFAULT_GRID_HALFWIDTH = 10.0  # in units of the oscillator length
DEFAULT_GRID_POINTS = 2001


@dataclass(frozen=True, eq=False)
class SpatialGrid:
    """Quadrature nodes and positive weights on a strictly increasing axis."""

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        wts = np.array(self.weights, dtype=float)
        if pts.ndim != 1 or wts.ndim != 1:
            raise ValueError("points and weights must be 1-d arrays")
        if pts.size != wts.size:
            raise DimensionMismatchError(
                f"{pts.size} points but {wts.size} weights"
            )
        if not (np.all(np.isfinite(pts)) and np.all(np.isfinite(wts))):
            raise ValueError("grid entries must be finite")
        if np.any(np.diff(pts) <= 0):
            raise ValueError("points must be strictly increasing")
        if np.any(wts <= 0):
            raise ValueError("weights must be positive")
        pts.setflags(write=False)
        wts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", wts)

    def __len__(self) -> int:
        return self.points.size


@dataclass(frozen=True)
class WaveSample:
    """Complex amplitude at one position (units length**-1/2)."""

    x: float
    value: complex

    def __post_init__(self):
        v = complex(self.value)
        if not (
            math.isfinite(self.x)
            and math.isfinite(v.real)
            and math.isfinite(v.imag)
        ):
            raise ValueError("sample must be finite")
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "value", v)


def _as_axis(x) -> tuple[np.ndarray, bool]:
    arr = np.asarray(x, dtype=float)
    return np.atleast_1d(arr), arr.ndim == 0


def hermite(n: int, x):
    """Physicists' Hermite polynomial H_n(x) by the three-term recurrence.

    Accepts a scalar or an array of positions. No overflow trap: for large
    n * x the values exceed double range and return inf.
    """
    n = int(n)
    if n < 0:
        raise ValueError(f"order must be nonnegative, got {n}")
    xs, scalar = _as_axis(x)
    h_prev = np.ones_like(xs)
    if n == 0:
        return float(h_prev[0]) if scalar else h_prev
    h = 2.0 * xs
    for k in range(1, n):
        h, h_prev = 2.0 * xs * h - 2.0 * k * h_prev, h
    return float(h[0]) if scalar else h


def eigenfunction_table(n_max: int, x, params: OscillatorParams) -> np.ndarray:
    """Orthonormal eigenfunctions phi_0..phi_n_max stacked along axis 0.

    Runs the recurrence on the weighted functions themselves,
        phi_{k+1} = sqrt(2/(k+1)) xi phi_k - sqrt(k/(k+1)) phi_{k-1},
    with xi = x sqrt(M omega / hbar), so no factorials or bare Hermite
    values ever appear.
    """
    n_max = int(n_max)
    if n_max < 0:
        raise ValueError(f"n_max must be nonnegative, got {n_max}")
    xs, _ = _as_axis(x)
    xi = xs * math.sqrt(params.mass * params.omega / params.hbar)
    table = np.empty((n_max + 1, xs.size), dtype=float)
    prefactor = (params.mass * params.omega / (math.pi * params.hbar)) ** 0.25
    table[0] = prefactor * np.exp(-0.5 * xi * xi)
    if n_max >= 1:
        table[1] = math.sqrt(2.0) * xi * table[0]
    for k in range(1, n_max):
        table[k + 1] = (
            math.sqrt(2.0 / (k + 1)) * xi * table[k]
            - math.sqrt(k / (k + 1.0)) * table[k - 1]
        )
    return table


def eigenfunction(n: int, x, params: OscillatorParams):
    """Oscillator eigenfunction phi_n(x), normalized to unit square integral."""
    xs, scalar = _as_axis(x)
    values = eigenfunction_table(int(n), xs, params)[-1]
    return float(values[0]) if scalar else values


def generating_sum_check(x: float, t: float, k_max: int) -> float:
    """Truncation residual of sum_k t^k H_k(x) / k! against exp(2xt - t^2)."""
    k_max = int(k_max)
    if k_max < 0:
        raise ValueError(f"k_max must be nonnegative, got {k_max}")
    x = float(x)
    t = float(t)
    h_prev, h = 1.0, 2.0 * x
    coeff = 1.0  # t^k / k!
    total = 1.0  # k = 0 term
    for k in range(1, k_max + 1):
        coeff *= t / k
        total += coeff * h
        h, h_prev = 2.0 * x * h - 2.0 * k * h_prev, h
    return abs(total - math.exp(2.0 * x * t - t * t))


def psi_series_grid(
    label: CoherentLabel,
    x,
    t: float,
    params: OscillatorParams,
    n_max: int,
) -> np.ndarray:
    """Coherent packet as the truncated eigenfunction series, on an array of x."""
    xs, _ = _as_axis(x)
    coeffs = dynamical_coherent_state(label, t, params, n_max).coeffs
    table = eigenfunction_table(n_max, xs, params)
    return coeffs @ table


def psi_series(
    label: CoherentLabel,
    x: float,
    t: float,
    params: OscillatorParams,
    n_max: int,
) -> WaveSample:
    value = psi_series_grid(label, x, t, params, n_max)[0]
    return WaveSample(float(x), complex(value))


def psi_closed_grid(
    label: CoherentLabel,
    x,
    t: float,
    params: OscillatorParams,
    form: str,
) -> np.ndarray:
    """Closed-form coherent packet on an array of positions.

    form="complex_center": Gaussian whose squared shift has the complex
    center chi(t) sqrt(2 hbar / M omega), taken literally.
    form="schrodinger": the same packet written through the mean coordinate
    and momentum, a plane-wave factor on a real-centered Gaussian.

    All complex exponentials are evaluated directly from their real and
    imaginary parts; no multivalued logarithm is involved, so sweeps over t
    never hit a branch cut.
    """
    if form not in CLOSED_FORMS:
        raise ValueError(f"form must be one of {CLOSED_FORMS}, got {form!r}")
    xs, _ = _as_axis(x)
    hbar, mass, omega = params.hbar, params.mass, params.omega
    prefactor = (mass * omega / (math.pi * hbar)) ** 0.25
    if form == "complex_center":
        chit = label.chi * complex(np.exp(-1j * omega * t))
        shift = chit * math.sqrt(2.0 * hbar / (mass * omega))
        amp = prefactor * math.exp(-0.5 * label.nbar)
        phase = np.exp(-0.5j * omega * t + 0.5 * chit * chit)
        return amp * phase * np.exp(-(mass * omega / (2.0 * hbar)) * (xs - shift) ** 2)
    rec = averages_closedform(label, t, params)
    xb, pb = rec.mean_x, rec.mean_p
    phase = np.exp(-1j * (0.5 * omega * t + 0.5 * pb * xb / hbar))
    plane = np.exp(1j * (pb / hbar) * xs)
    gauss = np.exp(-(mass * omega / (2.0 * hbar)) * (xs - xb) ** 2)
    return prefactor * phase * plane * gauss


def psi_closed(
    label: CoherentLabel,
    x: float,
    t: float,
    params: OscillatorParams,
    form: str,
) -> WaveSample:
    value = psi_closed_grid(label, x, t, params, form)[0]
    return WaveSample(float(x), complex(value))


def quadrature_norm(samples: Sequence[WaveSample], grid: SpatialGrid) -> float:
    """Sum of weights * |value|^2, approximating the square integral.

    Samples are assumed aligned with the grid points, in order.
    """
    if len(samples) != len(grid):
        raise DimensionMismatchError(
            f"{len(samples)} samples on a grid of {len(grid)} points"
        )
    if not samples:
        return 0.0
    values = np.array([s.value for s in samples], dtype=complex)
    return float(np.sum(grid.weights * np.abs(values) ** 2))


def packet_moments(
    samples: Sequence[WaveSample], grid: SpatialGrid
) -> tuple[float, float, float]:
    """(squared norm, mean position, position variance) of |value|^2.

    Mean and variance are normalized by the squared norm, so a slightly
    leaky truncation does not skew them.
    """
    if len(samples) != len(grid):
        raise DimensionMismatchError(
            f"{len(samples)} samples on a grid of {len(grid)} points"
        )
    density = grid.weights * np.abs(
        np.array([s.value for s in samples], dtype=complex)
    ) ** 2
    norm2 = float(np.sum(density))
    if norm2 <= 0.0:
        raise ValueError("cannot take moments of a zero-norm sample set")
    mean = float(np.sum(grid.points * density) / norm2)
    var = float(np.sum((grid.points - mean) ** 2 * density) / norm2)
    return norm2, mean, var


def trapezoid_grid(lo: float, hi: float, npoints: int) -> SpatialGrid:
    """Uniform grid with trapezoid weights on [lo, hi]."""
    npoints = int(npoints)
    if npoints < 2:
        raise ValueError(f"need at least 2 points, got {npoints}")
    if not hi > lo:
        raise ValueError(f"need hi > lo, got [{lo}, {hi}]")
    points = np.linspace(lo, hi, npoints)
    step = points[1] - points[0]
    weights = np.full(npoints, step)
    weights[0] = weights[-1] = 0.5 * step
    return SpatialGrid(points, weights)


def default_packet_grid(
    params: OscillatorParams,
    center: float = 0.0,
    halfwidth: float = DEFAULT_GRID_HALFWIDTH,
    npoints: int = DEFAULT_GRID_POINTS,
) -> SpatialGrid:
    """Trapezoid grid spanning center +/- halfwidth oscillator lengths."""
    if halfwidth <= 0:
        raise ValueError(f"halfwidth must be positive, got {halfwidth}")
    span = halfwidth * params.length_scale
    return trapezoid_grid(center - span, center + span, npoints)


def gauss_hermite_grid(
    order: int, params: OscillatorParams, center: float = 0.0
) -> SpatialGrid:
    """Gauss-Hermite nodes scaled to physical length, Gaussian weight unfolded.

    The stored weights include exp(+xi^2), so `quadrature_norm` integrates
    plain |value|^2. Orders beyond ~350 overflow the unfolding and fail the
    grid finiteness validation before any physics sees them.
    """
    order = int(order)
    if order < 1:
        raise ValueError(f"order must be positive, got {order}")
    xi, w = np.polynomial.hermite.hermgauss(order)
    scale = params.length_scale
    return SpatialGrid(center + scale * xi, scale * w * np.exp(xi * xi))
