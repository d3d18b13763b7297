"""Circulating current, microwave matrix elements and selection rules.

The loop current is I = -(2 pi alpha E_J / Phi_0) sin(2 pi f + 2 phi_m), so a
weak flux drive Phi_a couples eigenstates through

    t_ij = <i| I Phi_a |j> = -(2 pi alpha E_J Phi_a / Phi_0) s_ij,
    s_ij = <i| sin(2 pi f + phi1 - phi2) |j>.

Only the dimensionless ``s_ij`` is computed; the prefactor stays symbolic.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .circuit import (
    ChargeBasisOperator,
    CircuitParams,
    EigenSystem,
    _hermitian_coo,
    _map_grid,
    _shift_pairs,
    flux_phase,
    spectrum,
)
from .errors import AmbiguousStructureError, ConfigurationError, ConvergenceError, DegenerateLevelsError

CURRENT_SCALE = "-2*pi*alpha*E_J*Phi_a0/Phi_0"
DEFAULT_THRESHOLD = 1e-6
PAIRS = ((0, 1), (1, 2), (0, 2))


class Structure(str, enum.Enum):
    XI = "Xi"
    DELTA = "Delta"

    def __str__(self):
        return self.value


def current_operator(params: CircuitParams) -> ChargeBasisOperator:
    """Dimensionless sin(2 pi f + phi1 - phi2) in the charge basis."""
    N = params.cutoff
    rows, cols = _shift_pairs(N, 1, -1)
    # sin x = (e^{ix} - e^{-ix}) / 2i; e^{i(phi1 - phi2)} raises n1, lowers n2
    vals = np.full(rows.size, flux_phase(params.f) / 2j)
    return ChargeBasisOperator(_hermitian_coo(params.dimension, rows, cols, vals), N, params)


@dataclass(frozen=True)
class TransitionTable:
    f: float
    moduli: np.ndarray  # |s_ij| for i, j in {0, 1, 2}
    diagonal: np.ndarray  # s_ii (real)
    scale: str = CURRENT_SCALE

    @property
    def s01(self) -> float:
        return float(self.moduli[0, 1])

    @property
    def s12(self) -> float:
        return float(self.moduli[1, 2])

    @property
    def s02(self) -> float:
        return float(self.moduli[0, 2])

    def pairs(self) -> dict[tuple[int, int], float]:
        return {p: float(self.moduli[p]) for p in PAIRS}


def matrix_elements(eig: EigenSystem, op: ChargeBasisOperator, n: int = 3) -> np.ndarray:
    """Complex <i|op|j> for the lowest ``n`` states (gauge-dependent phases)."""
    if eig.states.shape[0] != op.dimension:
        raise ConfigurationError(
            f"eigenvectors have dimension {eig.states.shape[0]}, operator {op.dimension}",
            "op",
        )
    if eig.states.shape[1] < n:
        raise ConfigurationError(f"need at least {n} eigenstates, got {eig.states.shape[1]}", "eig")
    vecs = eig.states[:, :n]
    return vecs.conj().T @ (op.matrix @ vecs)


def transition_moduli(eig: EigenSystem, op: ChargeBasisOperator) -> TransitionTable:
    if eig.params is not None and op.params is not None and eig.params.f != op.params.f:
        raise ConfigurationError("eigensystem and operator built at different f", "op")
    s = matrix_elements(eig, op, 3)
    upper = np.triu(np.abs(s), 1)
    f = op.params.f if op.params is not None else float("nan")
    return TransitionTable(f=f, moduli=upper + upper.T, diagonal=np.real(np.diag(s)).copy())


def classify_structure(table: TransitionTable, threshold: float = DEFAULT_THRESHOLD) -> Structure:
    """Xi if only the 0-2 element is suppressed, Delta if none is."""
    if not threshold > 0:
        raise ConfigurationError("threshold must be positive", "threshold")
    values = table.pairs()
    biggest = max(values.values())
    if biggest <= 0.0:
        raise AmbiguousStructureError("all transition moduli vanish")
    suppressed = [p for p, v in values.items() if v < threshold * biggest]
    if not suppressed:
        return Structure.DELTA
    if suppressed == [(0, 2)]:
        return Structure.XI
    raise AmbiguousStructureError(f"suppressed transitions {suppressed} match neither Xi nor Delta")


def transitions_at(params: CircuitParams, k: int = 4) -> TransitionTable:
    eig = spectrum(params, k)
    gaps = np.diff(eig.levels)
    if np.any(gaps < 1e-10):
        raise DegenerateLevelsError(f"tracked levels within 1e-10 E_J at f={params.f!r}")
    return transition_moduli(eig, current_operator(params))


def sweep_transitions(
    params_base: CircuitParams,
    f_grid: Sequence[float],
    *,
    workers: int | None = None,
) -> list[TransitionTable]:
    """Transition tables along ``f_grid``; states are tracked by energy order."""
    f_values = [float(f) for f in f_grid]
    if not f_values:
        raise ConfigurationError("f_grid must not be empty", "f_grid")
    if any(not 0.0 <= f <= 1.0 for f in f_values):
        raise ConfigurationError("f values must lie in [0, 1]", "f_grid")

    def one(f):
        try:
            return transitions_at(params_base.with_flux(f))
        except ConvergenceError as exc:
            raise ConvergenceError(str(exc), f=f) from exc

    return _map_grid(one, f_values, workers)


def parity_selection_defect(eig: EigenSystem, op: ChargeBasisOperator, parity: np.ndarray) -> float:
    """Largest |<i|op|j>| over pairs of equal parity among the given states."""
    n = len(parity)
    s = matrix_elements(eig, op, n)
    same = [
        abs(s[i, j])
        for i, j in itertools.product(range(n), repeat=2)
        if np.sign(parity[i]) == np.sign(parity[j])
    ]
    return float(max(same)) if same else 0.0
