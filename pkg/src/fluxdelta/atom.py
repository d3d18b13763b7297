"""Driven three-level Delta atom under the rotating-wave approximation.

Basis order is (|0>, |1>, |2>). For each transition m <- n (m > n) the drive
supplies a complex Gaussian Rabi envelope

    Omega_mn(t) = omega0 * A_mn * exp(i phi_mn - (t - t_mn)^2 / w^2)

and the interaction-picture Hamiltonian is

    H(t) = sum_{m>n} Omega_mn(t) e^{i Delta_mn t} |m><n| + h.c.

Write a = H[1, 0], b = H[2, 1], c = H[2, 0]. The characteristic polynomial is

    lambda^3 - |Omega|^2 lambda - 2 Re(a b c*) = 0,
    |Omega|^2 = |a|^2 + |b|^2 + |c|^2,

so the spectrum depends on the drive phases only through the phase of the
cyclic product c a* b*,

    beta(t) = omega' t + phi_tot,
    phi_tot = phi_20 - phi_10 - phi_21,
    omega'  = Delta_20 - Delta_10 - Delta_21.

The roots follow from the trigonometric (Viete) solution

    E_k = (2 |Omega| / sqrt 3) cos[(theta + 2 (k - 1) pi) / 3],
    cos theta = 3 sqrt(3) |a b c| cos(beta) / |Omega|^3,

which always orders them E_1 >= E_3 >= E_2.

Time is measured in units of the common pulse width and frequencies in units
of its inverse.
"""

from __future__ import annotations

import dataclasses
import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ConfigurationError, CrossingError, SingularParametrizationError, StepSizeError

DEFAULT_OMEGA0 = 20.0
DEFAULT_DT = 1e-4
CROSSING_TOL = 1e-6  # relative to |Omega(t)|
#: Pulses are treated as switched off this many widths away from their centre.
TRUNCATION_WIDTHS = 6.0

SQRT3 = math.sqrt(3.0)
TRANSITIONS = ("10", "21", "20")


@dataclass(frozen=True)
class PulseSpec:
    amplitude_factor: float
    phase: float = 0.0
    center: float = 0.0
    width: float = 1.0

    def __post_init__(self):
        if not math.isfinite(self.amplitude_factor) or self.amplitude_factor < 0:
            raise ConfigurationError("amplitude_factor must be >= 0", "amplitude_factor")
        # width = inf gives a constant envelope
        if math.isnan(self.width) or self.width <= 0:
            raise ConfigurationError("width must be > 0", "width")
        if not (math.isfinite(self.phase) and math.isfinite(self.center)):
            raise ConfigurationError("phase and center must be finite", "phase")

    def envelope(self, t):
        t = np.asarray(t, dtype=float)
        return self.amplitude_factor * np.exp(-(((t - self.center) / self.width) ** 2))

    def value(self, t):
        return self.envelope(t) * np.exp(1j * self.phase)

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        return -2.0 * (t - self.center) / self.width**2 * self.value(t)


@dataclass(frozen=True)
class PulseSchedule:
    """Three Gaussian pulses plus detunings (Delta_10, Delta_21, Delta_20)."""

    pulse_10: PulseSpec
    pulse_21: PulseSpec
    pulse_20: PulseSpec
    omega0: float = DEFAULT_OMEGA0
    detunings: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        if not math.isfinite(self.omega0) or self.omega0 <= 0:
            raise ConfigurationError("omega0 must be > 0", "omega0")
        det = tuple(float(d) for d in self.detunings)
        if len(det) != 3 or not all(math.isfinite(d) for d in det):
            raise ConfigurationError("detunings must be three finite numbers", "detunings")
        object.__setattr__(self, "detunings", det)

    @property
    def pulses(self) -> tuple[PulseSpec, PulseSpec, PulseSpec]:
        return self.pulse_10, self.pulse_21, self.pulse_20

    @property
    def omega_prime(self) -> float:
        d10, d21, d20 = self.detunings
        return d20 - d10 - d21

    @property
    def total_phase(self) -> float:
        return self.pulse_20.phase - self.pulse_10.phase - self.pulse_21.phase

    def with_total_phase(self, phi: float) -> "PulseSchedule":
        """Same schedule with the 2<-0 phase chosen so that phi_tot = phi."""
        phase20 = phi + self.pulse_10.phase + self.pulse_21.phase
        return dataclasses.replace(self, pulse_20=dataclasses.replace(self.pulse_20, phase=phase20))

    def with_omega0(self, omega0: float) -> "PulseSchedule":
        return dataclasses.replace(self, omega0=omega0)

    def shifted_phases(self, d10: float, d21: float, d20: float) -> "PulseSchedule":
        return dataclasses.replace(
            self,
            pulse_10=dataclasses.replace(self.pulse_10, phase=self.pulse_10.phase + d10),
            pulse_21=dataclasses.replace(self.pulse_21, phase=self.pulse_21.phase + d21),
            pulse_20=dataclasses.replace(self.pulse_20, phase=self.pulse_20.phase + d20),
        )

    def support(self, widths: float = TRUNCATION_WIDTHS) -> tuple[float, float]:
        lo = min(p.center - widths * p.width for p in self.pulses)
        hi = max(p.center + widths * p.width for p in self.pulses)
        return lo, hi

    def is_constant(self) -> bool:
        return all(p.amplitude_factor == 0 for p in self.pulses)


# Central times (t_21, t_10, t_20) of the named schedules, in pulse widths.
PRESET_CENTERS = {
    "fig2a-dashdot": (2.0, 3.0, 4.0),
    "fig2a-solid": (2.0, 3.7, 4.0),
    "fig2a-dotted": (2.0, 4.0, 4.0),
    "fig2b": (2.0, 4.0, 4.0),
    "fig3": (2.0, 3.0, 4.0),
}
PRESET_AMPLITUDES = {"10": 0.9, "21": 1.0, "20": 0.85}


def preset_schedule(
    name: str,
    total_phase: float = 0.0,
    omega0: float = DEFAULT_OMEGA0,
    detunings: tuple[float, float, float] = (0.0, 0.0, 0.0),
) -> PulseSchedule:
    """Named pulse schedules; all share the amplitudes 0.9 (1<-0), 1.0 (2<-1), 0.85 (2<-0)."""
    try:
        t21, t10, t20 = PRESET_CENTERS[name]
    except KeyError:
        raise ConfigurationError(
            f"unknown schedule preset {name!r}; choose from {sorted(PRESET_CENTERS)}", "preset"
        ) from None
    s = PulseSchedule(
        pulse_10=PulseSpec(PRESET_AMPLITUDES["10"], 0.0, t10),
        pulse_21=PulseSpec(PRESET_AMPLITUDES["21"], 0.0, t21),
        pulse_20=PulseSpec(PRESET_AMPLITUDES["20"], 0.0, t20),
        omega0=omega0,
        detunings=detunings,
    )
    return s.with_total_phase(total_phase)


def evaluate_pulses(s: PulseSchedule, t):
    """Bare Rabi values (Omega_10, Omega_21, Omega_20) at time(s) ``t``."""
    return tuple(s.omega0 * p.value(t) for p in s.pulses)


def couplings(s: PulseSchedule, t):
    """Hamiltonian entries (a, b, c) = (H[1,0], H[2,1], H[2,0]) including detuning phases."""
    t = np.asarray(t, dtype=float)
    return tuple(
        om * np.exp(1j * d * t) for om, d in zip(evaluate_pulses(s, t), s.detunings)
    )


def coupling_derivatives(s: PulseSchedule, t):
    t = np.asarray(t, dtype=float)
    out = []
    for p, d in zip(s.pulses, s.detunings):
        phase = np.exp(1j * d * t)
        out.append(s.omega0 * (p.derivative(t) + 1j * d * p.value(t)) * phase)
    return tuple(out)


def _assemble(a, b, c):
    a, b, c = np.broadcast_arrays(a, b, c)
    h = np.zeros(a.shape + (3, 3), dtype=complex)
    h[..., 1, 0] = a
    h[..., 2, 1] = b
    h[..., 2, 0] = c
    h[..., 0, 1] = np.conj(a)
    h[..., 1, 2] = np.conj(b)
    h[..., 0, 2] = np.conj(c)
    return h


def build_rwa(s: PulseSchedule, t) -> np.ndarray:
    """RWA Hamiltonian; shape (3, 3) for scalar ``t``, (..., 3, 3) otherwise."""
    return _assemble(*couplings(s, t))


def rwa_derivative(s: PulseSchedule, t) -> np.ndarray:
    """Analytic dH/dt."""
    return _assemble(*coupling_derivatives(s, t))


def field_strength(s: PulseSchedule, t):
    """|Omega(t)| = sqrt(|a|^2 + |b|^2 + |c|^2)."""
    a, b, c = couplings(s, t)
    return np.sqrt(np.abs(a) ** 2 + np.abs(b) ** 2 + np.abs(c) ** 2)


def wrap_phase(x):
    """Map angles into (-pi, pi]."""
    y = np.mod(np.asarray(x, dtype=float) + np.pi, 2 * np.pi) - np.pi
    y = np.where(y == -np.pi, np.pi, y)
    return float(y) if y.ndim == 0 else y


def beta(s: PulseSchedule, t):
    """Dynamical phase omega' t + phi_tot of the cyclic product, in (-pi, pi]."""
    return wrap_phase(s.omega_prime * np.asarray(t, dtype=float) + s.total_phase)


def cos_theta(s: PulseSchedule, t):
    a, b, c = couplings(s, t)
    mag = field_strength(s, t)
    with np.errstate(invalid="ignore", divide="ignore"):
        ct = 3.0 * SQRT3 * np.real(a * b * np.conj(c)) / mag**3
    return np.clip(np.nan_to_num(ct), -1.0, 1.0)


def trig_levels(mag, cos_t):
    """(E1, E2, E3) = (2 mag / sqrt 3) cos[(theta + 2 (k-1) pi) / 3]."""
    mag = np.asarray(mag, dtype=float)
    theta = np.arccos(np.clip(cos_t, -1.0, 1.0))
    k = np.arange(3)
    return (2.0 * mag / SQRT3)[..., None] * np.cos((np.asarray(theta)[..., None] + 2 * np.pi * k) / 3.0)


def analytic_eigenvalues(s: PulseSchedule, t) -> np.ndarray:
    """Instantaneous levels ordered (E1, E2, E3), i.e. top, bottom, middle.

    Returns zeros where |Omega| < 1e-14 omega0 (field-free point); see
    ``is_field_free``.
    """
    mag = field_strength(s, t)
    levels = trig_levels(mag, cos_theta(s, t))
    return np.where((mag < 1e-14 * s.omega0)[..., None], 0.0, levels)


def is_field_free(s: PulseSchedule, t):
    return field_strength(s, t) < 1e-14 * s.omega0


def min_level_gap(energies) -> float:
    e = np.asarray(energies, dtype=float)
    return float(min(abs(e[0] - e[1]), abs(e[0] - e[2]), abs(e[1] - e[2])))


def at_crossing(s: PulseSchedule, t, energies=None, crossing_tol: float = CROSSING_TOL) -> bool:
    """True where the smallest gap is within ``crossing_tol`` of |Omega(t)|.

    The trigonometric levels lose about half the working precision next to a
    degeneracy (the arccos of cos(theta) ~ 1), so the tolerance is relative
    to the instantaneous field and sits well above sqrt(machine epsilon).
    Field-free points count as crossings.
    """
    if energies is None:
        energies = analytic_eigenvalues(s, t)
    return min_level_gap(energies) <= crossing_tol * float(field_strength(s, t))


def gauge_fix(v: np.ndarray, tiny: float = 1e-12) -> np.ndarray:
    """Make the |0> component real positive, falling back to |1> then |2> when it vanishes."""
    v = np.asarray(v, dtype=complex)
    for comp in v:
        if abs(comp) >= tiny:
            return v * (abs(comp) / comp)
    return v


def analytic_eigenvector(s: PulseSchedule, t: float, k: int) -> np.ndarray:
    """Normalized closed-form eigenvector |E_k> with a real positive |0> component.

    With E = E_k and b_k = E^2 - |b|^2,

        <1|E_k> ~ (a E + b* c) / b_k = e^{i arg a} (|b c| e^{+i beta} + E |a|) / b_k,
        <2|E_k> ~ (c E + a b) / b_k  = e^{i arg c} (|a b| e^{-i beta} + E |c|) / b_k,

    relative to <0|E_k> ~ 1.
    """
    if k not in (1, 2, 3):
        raise ConfigurationError("k must be 1, 2 or 3", "k")
    t = float(t)
    a, b, c = (complex(x) for x in couplings(s, t))
    mag2 = abs(a) ** 2 + abs(b) ** 2 + abs(c) ** 2
    energy = float(analytic_eigenvalues(s, t)[k - 1])
    bk = energy**2 - abs(b) ** 2
    if mag2 == 0.0 or abs(bk) < 1e-10 * mag2:
        raise SingularParametrizationError(f"b_{k} vanishes at t={t!r}")
    a1 = (a * energy + np.conj(b) * c) / bk
    a2 = (c * energy + a * b) / bk
    norm = math.sqrt(1.0 + abs(a1) ** 2 + abs(a2) ** 2)
    if 1.0 / norm < 1e-12:
        raise SingularParametrizationError(f"|0> component of |E_{k}> vanishes at t={t!r}")
    return np.array([1.0, a1, a2], dtype=complex) / norm


# eigh sorts ascending: (E2, E3, E1)
_SORTED_TO_LABEL = np.array([2, 0, 1])


def direct_eigensystem(s: PulseSchedule, t: float) -> tuple[np.ndarray, np.ndarray]:
    """(E1, E2, E3) and gauge-fixed eigenvector columns from a dense solver."""
    w, v = np.linalg.eigh(build_rwa(s, float(t)))
    w, v = w[_SORTED_TO_LABEL], v[:, _SORTED_TO_LABEL]
    vecs = np.column_stack([gauge_fix(v[:, j]) for j in range(3)])
    return w, vecs


def adiabatic_eigenvectors(s: PulseSchedule, t: float) -> np.ndarray:
    """Columns |E_1>, |E_2>, |E_3>; closed form where it is regular, dense solver otherwise."""
    cols = []
    fallback = None
    for k in (1, 2, 3):
        try:
            cols.append(analytic_eigenvector(s, t, k))
        except SingularParametrizationError:
            if fallback is None:
                fallback = direct_eigensystem(s, t)[1]
            cols.append(fallback[:, k - 1])
    return np.column_stack(cols)


def _off_diagonal_max(m):
    m = np.array(m, dtype=float, copy=True)
    np.fill_diagonal(m, 0.0)
    return float(m.max())


@dataclass(frozen=True)
class AdiabaticFrame:
    time: float
    energies: np.ndarray  # (E1, E2, E3)
    vectors: np.ndarray = field(repr=False)  # columns |E_k>
    couplings: np.ndarray = field(repr=False)  # F_kl from <E_k|dH/dt|E_l> / (E_l - E_k)^2
    couplings_fd: np.ndarray = field(repr=False)  # F_kl from finite differences of |E_l>

    @property
    def max_coupling(self) -> float:
        return _off_diagonal_max(self.couplings)

    @property
    def min_gap(self) -> float:
        e = self.energies
        return float(min(abs(e[0] - e[1]), abs(e[0] - e[2]), abs(e[1] - e[2])))

    @property
    def method_discrepancy(self) -> float:
        """max |F_fd - F| relative to the largest F in the frame."""
        scale = self.max_coupling
        diff = _off_diagonal_max(np.abs(self.couplings_fd - self.couplings))
        if scale == 0.0:
            return 0.0 if diff < 1e-12 else math.inf
        return diff / scale


def _coupling_matrix(numerators, energies):
    gaps = energies[:, None] - energies[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.abs(numerators) / gaps**2
    np.fill_diagonal(out, 0.0)
    return out


def adiabatic_frame(
    s: PulseSchedule,
    t: float,
    dt: float = DEFAULT_DT,
    *,
    crossing_tol: float = CROSSING_TOL,
    check_tol: float = 0.05,
) -> AdiabaticFrame:
    """Instantaneous eigenbasis and nonadiabatic couplings at ``t``.

    F_kl = |<E_k| d/dt |E_l>| / |E_k - E_l| is evaluated both from the
    analytic dH/dt and from a centred difference of gauge-fixed eigenvectors;
    a relative disagreement above ``check_tol`` raises ``StepSizeError``.
    """
    if not dt > 0:
        raise ConfigurationError("dt must be positive", "dt")
    t = float(t)
    energies = analytic_eigenvalues(s, t)
    if at_crossing(s, t, energies, crossing_tol):
        raise CrossingError(f"adiabatic levels cross at t={t!r} (gap {min_level_gap(energies):.3e})")
    vecs = adiabatic_eigenvectors(s, t)

    dh = rwa_derivative(s, t)
    analytic = _coupling_matrix(vecs.conj().T @ dh @ vecs, energies)

    dvec = (adiabatic_eigenvectors(s, t + dt) - adiabatic_eigenvectors(s, t - dt)) / (2.0 * dt)
    overlap = vecs.conj().T @ dvec
    gaps = energies[:, None] - energies[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        fd = np.abs(overlap) / np.abs(gaps)
    np.fill_diagonal(fd, 0.0)

    frame = AdiabaticFrame(t, energies, vecs, analytic, fd)
    if frame.method_discrepancy > check_tol:
        raise StepSizeError(
            f"coupling estimates disagree by {frame.method_discrepancy:.2%} at t={t!r}; adjust dt"
        )
    return frame


def coupling_profile(s: PulseSchedule, t_grid: Sequence[float], crossing_tol: float = CROSSING_TOL):
    """max_{k != l} F_kl(t) on a grid via the analytic-derivative route.

    Returns (values, masked); crossing points carry NaN and ``masked=True``.
    """
    t = np.asarray(t_grid, dtype=float)
    values = np.full(t.shape, np.nan)
    masked = np.zeros(t.shape, dtype=bool)
    for i, ti in enumerate(t):
        energies = analytic_eigenvalues(s, ti)
        if at_crossing(s, ti, energies, crossing_tol):
            masked[i] = True
            continue
        vecs = adiabatic_eigenvectors(s, ti)
        values[i] = _off_diagonal_max(_coupling_matrix(vecs.conj().T @ rwa_derivative(s, ti) @ vecs, energies))
    return values, masked


def rabi_from_circuit(
    eig,
    op,
    drive_amplitudes: Sequence[complex],
    *,
    centers: tuple[float, float, float] = (3.0, 2.0, 4.0),
    width: float = 1.0,
    detunings: tuple[float, float, float] = (0.0, 0.0, 0.0),
    threshold: float = 1e-6,
) -> PulseSchedule:
    """Seed a pulse schedule from circuit matrix elements.

    ``drive_amplitudes`` are the complex flux amplitudes (Phi_10, Phi_21,
    Phi_20). Each Rabi frequency is Omega_mn = <m|sin(2 pi f + 2 phi_m)|n>
    Phi_mn in units of the symbolic current prefactor; ``omega0`` is the
    largest modulus and ``centers`` are (t_10, t_21, t_20).
    """
    from .transitions import matrix_elements

    s = matrix_elements(eig, op, 3)
    elements = (s[1, 0], s[2, 1], s[2, 0])
    drives = tuple(complex(x) for x in drive_amplitudes)
    if len(drives) != 3:
        raise ConfigurationError("need three drive amplitudes", "drive_amplitudes")
    biggest_element = max(abs(x) for x in elements)
    forbidden = biggest_element > 0 and abs(elements[2]) < threshold * biggest_element
    rabi = [e * d for e, d in zip(elements, drives)]
    if forbidden:
        rabi[2] = 0j
        warnings.warn(
            "0<->2 transition is parity-forbidden; the Delta dynamics reduce to a ladder",
            stacklevel=2,
        )
    omega0 = max(abs(r) for r in rabi)
    if omega0 == 0.0:
        omega0 = 1.0
    specs = [
        PulseSpec(abs(r) / omega0, float(np.angle(r)) if r != 0 else 0.0, float(ct), width)
        for r, ct in zip(rabi, centers)
    ]
    return PulseSchedule(*specs, omega0=omega0, detunings=detunings)
