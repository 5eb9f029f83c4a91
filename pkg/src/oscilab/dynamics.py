"""Phase transformations, exact Fock-basis propagation, mean-motion checks.

The Hamiltonian is diagonal in the number basis, so time evolution is exact
per-level phase rotation; no integrator lives in the library. The phase
transformation a -> a e^(i alpha) acts on states as coeffs[n] -> coeffs[n]
e^(-i n alpha); the consistency of the two pictures is verified through
expectation values in the tests, not assumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coherent import CoherentLabel, auto_n_max, coherent_coefficients
from .fock import Operator, OscillatorParams, StateVector
from .observables import ObservableRecord, averages_bruteforce, averages_closedform

__all__ = [
    "PhaseAngle",
    "Trajectory",
    "phase_transform_ladder",
    "rotate_xp",
    "transform_state_phase",
    "propagate_fock",
    "sample_times",
    "sample_trajectory",
    "ehrenfest_residual",
]

TRAJECTORY_METHODS = ("bruteforce", "closedform")


@dataclass(frozen=True)
class PhaseAngle:
    """Rotation angle of the phase transformation, in radians."""

    alpha: float

    def __post_init__(self):
        if not math.isfinite(self.alpha):
            raise ValueError(f"angle must be finite, got {self.alpha!r}")
        object.__setattr__(self, "alpha", float(self.alpha))

    @property
    def reduced(self) -> float:
        """Angle folded into [0, 2 pi), for reporting only."""
        return self.alpha % (2.0 * math.pi)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Uniformly sampled time series of observable records."""

    records: tuple[ObservableRecord, ...]
    dt: float

    def __post_init__(self):
        records = tuple(self.records)
        if not records:
            raise ValueError("trajectory needs at least one record")
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ValueError(f"dt must be finite and positive, got {self.dt!r}")
        times = np.array([r.time for r in records])
        if times.size > 1:
            steps = np.diff(times)
            if np.any(steps <= 0):
                raise ValueError("record times must be strictly increasing")
            tol = 1e-9 * max(1.0, float(np.max(np.abs(times))))
            if np.max(np.abs(steps - self.dt)) > tol:
                raise ValueError("record times must be uniformly spaced by dt")
        object.__setattr__(self, "records", records)
        object.__setattr__(self, "dt", float(self.dt))

    def __len__(self) -> int:
        return len(self.records)

    def times(self) -> np.ndarray:
        return np.array([r.time for r in self.records])

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.records])


def phase_transform_ladder(a: Operator, alpha: PhaseAngle) -> Operator:
    """Rotated annihilation operator a * e^(i alpha).

    The creation-operator rule (conjugate phase) follows from `.dagger`.
    """
    return Operator(a.matrix * complex(np.exp(1j * alpha.alpha)), a.n_max)


def rotate_xp(
    mean_x: float, mean_p: float, alpha: PhaseAngle, params: OscillatorParams
) -> tuple[float, float]:
    """Coordinate-momentum rotation induced by the phase transformation.

    x' = -(p / M omega) sin(alpha) + x cos(alpha)
    p' = p cos(alpha) + M omega x sin(alpha)
    The classical energy form M omega^2 x^2 / 2 + p^2 / 2M is invariant.
    """
    sin_a = math.sin(alpha.alpha)
    cos_a = math.cos(alpha.alpha)
    m_omega = params.mass * params.omega
    x_new = -(mean_p / m_omega) * sin_a + mean_x * cos_a
    p_new = mean_p * cos_a + m_omega * mean_x * sin_a
    return x_new, p_new


def transform_state_phase(state: StateVector, alpha: PhaseAngle) -> StateVector:
    """State-space image of the phase transformation: coeffs[n] * e^(-i n alpha).

    Norm and level populations are untouched; a coherent state maps to the
    coherent state of the rotated label chi e^(-i alpha).
    """
    n = np.arange(state.coeffs.size)
    phases = np.exp(-1j * alpha.alpha * n)
    return StateVector(state.coeffs * phases, state.n_max, time=state.time)


def propagate_fock(state: StateVector, t: float, params: OscillatorParams) -> StateVector:
    """Exact evolution by t: each level rotates by e^(-i omega (n + 1/2) t).

    Composes additively: propagating by t1 then t2 equals propagating by
    t1 + t2. Level populations never change.
    """
    n = np.arange(state.coeffs.size)
    phases = np.exp(-1j * params.omega * float(t) * (n + 0.5))
    return StateVector(state.coeffs * phases, state.n_max, time=state.time + float(t))


def sample_times(t_start: float, t_end: float, dt: float) -> np.ndarray:
    """Uniform samples t_start + k dt up to and including t_end (within rounding)."""
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if t_end < t_start:
        raise ValueError(f"need t_end >= t_start, got [{t_start}, {t_end}]")
    count = int(math.floor((t_end - t_start) / dt + 1e-9)) + 1
    return t_start + dt * np.arange(count)


def sample_trajectory(
    label: CoherentLabel,
    params: OscillatorParams,
    t_start: float,
    t_end: float,
    dt: float,
    method: str = "bruteforce",
    n_max: int | None = None,
) -> Trajectory:
    """Observable records of a coherent state on a uniform time grid.

    method="bruteforce" propagates the truncated state exactly and takes
    matrix expectations; method="closedform" evaluates the label formulas.
    When n_max is None the truncation-tail rule picks it, plus two levels of
    headroom for the second moments.
    """
    if method not in TRAJECTORY_METHODS:
        raise ValueError(f"method must be one of {TRAJECTORY_METHODS}, got {method!r}")
    times = sample_times(t_start, t_end, dt)
    if method == "closedform":
        records = [averages_closedform(label, t, params) for t in times]
        return Trajectory(tuple(records), dt)
    if n_max is None:
        n_max = auto_n_max(label) + 2
    base = coherent_coefficients(label, n_max)
    records = []
    for t in times:
        state = propagate_fock(base, t, params)
        records.append(averages_bruteforce(state, params))
    return Trajectory(tuple(records), dt)


def ehrenfest_residual(
    traj: Trajectory, params: OscillatorParams
) -> tuple[float, float]:
    """Worst violation of the classical oscillator equations along a trajectory.

    At interior samples, centered differences test both the second-order
    equations D2 x + omega^2 x = 0, D2 p + omega^2 p = 0 and the first-order
    relations D x = p / M, D p = -M omega^2 x; per component the worse of
    the two is returned. For exact means both scale as dt^2.
    """
    if len(traj) < 3:
        raise ValueError(f"need at least 3 records, got {len(traj)}")
    dt = traj.dt
    omega2 = params.omega**2
    x = traj.column("mean_x")
    p = traj.column("mean_p")

    def second(values: np.ndarray) -> np.ndarray:
        return (values[2:] - 2.0 * values[1:-1] + values[:-2]) / (dt * dt)

    def first(values: np.ndarray) -> np.ndarray:
        return (values[2:] - values[:-2]) / (2.0 * dt)

    res_x2 = float(np.max(np.abs(second(x) + omega2 * x[1:-1])))
    res_x1 = float(np.max(np.abs(first(x) - p[1:-1] / params.mass)))
    res_p2 = float(np.max(np.abs(second(p) + omega2 * p[1:-1])))
    res_p1 = float(np.max(np.abs(first(p) + params.mass * omega2 * x[1:-1])))
    return max(res_x2, res_x1), max(res_p2, res_p1)
