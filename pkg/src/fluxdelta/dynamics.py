"""Time evolution of the driven three-level atom and adiabatic-frame bookkeeping."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .atom import (
    CROSSING_TOL,
    PulseSchedule,
    adiabatic_eigenvectors,
    at_crossing,
    build_rwa,
)
from .errors import ConfigurationError, IntegrationError

DEFAULT_TOLERANCE = 1e-10


@dataclass(frozen=True)
class Trajectory:
    """Propagated state on a time grid.

    ``frame_overlaps[i, k-1]`` is |<E_k(t_i)|psi(t_i)>|^2; rows at level
    crossings are NaN and flagged in ``masked``.
    """

    times: np.ndarray
    states: np.ndarray = field(repr=False)
    frame_overlaps: np.ndarray = field(repr=False)
    masked: np.ndarray = field(repr=False)
    schedule: PulseSchedule | None = None
    nfev: int = 0

    @property
    def populations(self) -> np.ndarray:
        return np.abs(self.states) ** 2

    @property
    def norms(self) -> np.ndarray:
        return np.linalg.norm(self.states, axis=1)

    @property
    def norm_drift(self) -> float:
        return float(np.max(np.abs(self.norms - 1.0)))

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]


def _frame_columns(s: PulseSchedule, t: float, crossing_tol: float = CROSSING_TOL):
    """Eigenvector columns at ``t`` or ``None`` at a (near-)crossing."""
    if at_crossing(s, t, crossing_tol=crossing_tol):
        return None
    return adiabatic_eigenvectors(s, t)


def frame_overlaps(s: PulseSchedule, times, states):
    out = np.full((len(times), 3), np.nan)
    masked = np.zeros(len(times), dtype=bool)
    for i, (t, psi) in enumerate(zip(times, states)):
        vecs = _frame_columns(s, t)
        if vecs is None:
            masked[i] = True
            continue
        out[i] = np.abs(vecs.conj().T @ psi) ** 2
    return out, masked


def default_span(s: PulseSchedule) -> tuple[float, float]:
    """[earliest centre - 5 widths, latest centre + 5 widths]."""
    return s.support(5.0)


def _normalized(psi0):
    psi = np.asarray(psi0, dtype=complex).reshape(3)
    if abs(np.linalg.norm(psi) - 1.0) > 1e-12:
        raise ConfigurationError("initial state must be normalized", "psi0")
    return psi


def propagate(
    s: PulseSchedule,
    psi0: Sequence[complex],
    t_span: tuple[float, float] | None = None,
    tolerance: float = DEFAULT_TOLERANCE,
    *,
    t_eval: Sequence[float] | None = None,
    overlaps: bool = True,
) -> Trajectory:
    """Integrate i dpsi/dt = H(t) psi with an adaptive 8th-order Runge-Kutta.

    The state is never renormalized, so ``Trajectory.norm_drift`` measures
    the integration error. ``t_span`` may run backwards.
    """
    psi = _normalized(psi0)
    if not tolerance > 0:
        raise ConfigurationError("tolerance must be positive", "tolerance")
    t0, t1 = default_span(s) if t_span is None else (float(t_span[0]), float(t_span[1]))
    if not (np.isfinite(t0) and np.isfinite(t1)) or t0 == t1:
        raise ConfigurationError("t_span must be a finite, non-empty interval", "t_span")
    if t_eval is None:
        n = max(int(abs(t1 - t0) * 20) + 1, 2)
        t_eval = np.linspace(t0, t1, n)
    t_eval = np.asarray(t_eval, dtype=float)

    def rhs(t, y):
        return -1j * (build_rwa(s, t) @ y)

    sol = solve_ivp(
        rhs, (t0, t1), psi, method="DOP853", t_eval=t_eval, rtol=tolerance, atol=tolerance * 1e-2
    )
    if not sol.success:
        failed_at = float(sol.t[-1]) if sol.t.size else t0
        raise IntegrationError(sol.message, time=failed_at)
    states = sol.y.T
    if overlaps:
        ov, masked = frame_overlaps(s, sol.t, states)
    else:
        ov, masked = np.full((len(sol.t), 3), np.nan), np.zeros(len(sol.t), dtype=bool)
    return Trajectory(sol.t, states, ov, masked, s, int(sol.nfev))


def propagate_midpoint(
    s: PulseSchedule,
    psi0: Sequence[complex],
    t_span: tuple[float, float] | None = None,
    steps: int = 20_000,
) -> np.ndarray:
    """Final state from a fixed-step exponential midpoint rule.

    Each step applies exp(-i H(t + dt/2) dt) exactly (Hermitian
    eigendecomposition), so the scheme is unitary and second order.
    """
    psi = _normalized(psi0)
    t0, t1 = default_span(s) if t_span is None else t_span
    dt = (t1 - t0) / steps
    mids = t0 + (np.arange(steps) + 0.5) * dt
    w, v = np.linalg.eigh(build_rwa(s, mids))
    phases = np.exp(-1j * w * dt)
    props = np.einsum("nij,nj,nkj->nik", v, phases, v.conj())
    for u in props:
        psi = u @ psi
    return psi


def midpoint_extrapolated(
    s: PulseSchedule,
    psi0: Sequence[complex],
    t_span: tuple[float, float] | None = None,
    steps: int = 20_000,
) -> np.ndarray:
    """Populations from Richardson extrapolation of ``steps`` and ``2*steps`` midpoint runs."""
    coarse = np.abs(propagate_midpoint(s, psi0, t_span, steps)) ** 2
    fine = np.abs(propagate_midpoint(s, psi0, t_span, 2 * steps)) ** 2
    return (4.0 * fine - coarse) / 3.0


@dataclass(frozen=True)
class ComponentMap:
    """P_{k,m}(t) = |<m|E_k(t)>|^2 for one adiabatic state."""

    level: int
    times: np.ndarray
    probabilities: np.ndarray  # (n_t, 3)
    masked: np.ndarray


def adiabatic_component_map(
    s: PulseSchedule, t_grid: Sequence[float], k: int = 3, crossing_tol: float = CROSSING_TOL
) -> ComponentMap:
    if k not in (1, 2, 3):
        raise ConfigurationError("k must be 1, 2 or 3", "k")
    times = np.asarray(t_grid, dtype=float)
    probs = np.full((len(times), 3), np.nan)
    masked = np.zeros(len(times), dtype=bool)
    for i, t in enumerate(times):
        vecs = _frame_columns(s, t, crossing_tol)
        if vecs is None:
            masked[i] = True
            continue
        probs[i] = np.abs(vecs[:, k - 1]) ** 2
    return ComponentMap(k, times, probs, masked)


@dataclass(frozen=True)
class PhaseSurface:
    level: int
    phis: np.ndarray
    times: np.ndarray
    probabilities: np.ndarray  # (n_phi, n_t, 3)
    masked: np.ndarray  # (n_phi, n_t)

    def masked_count(self) -> dict[float, int]:
        return {float(p): int(m.sum()) for p, m in zip(self.phis, self.masked)}


def phase_sweep(
    s_base: PulseSchedule,
    phi_grid: Sequence[float],
    t_grid: Sequence[float],
    k: int = 3,
    *,
    workers: int | None = None,
) -> PhaseSurface:
    """Component maps for each total phase in ``phi_grid`` (others held fixed)."""
    phis = np.asarray(phi_grid, dtype=float)
    if phis.size == 0:
        raise ConfigurationError("phi_grid must not be empty", "phi_grid")
    if np.any(np.abs(phis) > np.pi + 1e-12):
        raise ConfigurationError("phi values must lie in [-pi, pi]", "phi_grid")

    def one(phi):
        return adiabatic_component_map(s_base.with_total_phase(phi), t_grid, k)

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            maps = list(pool.map(one, phis))
    else:
        maps = [one(phi) for phi in phis]
    return PhaseSurface(
        k,
        phis,
        np.asarray(t_grid, dtype=float),
        np.stack([m.probabilities for m in maps]),
        np.stack([m.masked for m in maps]),
    )


def transfer_fidelity(traj: Trajectory, target: Sequence[complex]) -> float:
    """|<target|psi(t_final)>|^2 for a normalized target."""
    target = np.asarray(target, dtype=complex)
    norm = np.linalg.norm(target)
    if norm == 0:
        raise ConfigurationError("target must be nonzero", "target")
    return float(abs(np.vdot(target / norm, traj.final_state)) ** 2)
