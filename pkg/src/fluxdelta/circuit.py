"""Three-junction flux qubit in the two-dimensional charge basis.

The circuit has two identical junctions (Josephson energy E_J, capacitance C_J)
and a third, smaller one scaled by ``alpha``. With the junction phases
phi1, phi2 and their conjugate Cooper-pair numbers n1, n2 the Hamiltonian
in units of E_J reads

    H = (2 E_c / E_J) [(n1 + n2)^2 + (n1 - n2)^2 / (1 + 2 alpha)]
        + 2 + alpha - cos(phi1) - cos(phi2) - alpha cos(2 pi f + phi1 - phi2)

which is the same operator as P_p^2/2M_p + P_m^2/2M_m + U(phi_p, phi_m)
written in phi_p = (phi1 + phi2)/2, phi_m = (phi1 - phi2)/2. The charging
energy convention is E_c = e^2 / 2C_J, so hbar^2 / 2M_p = e^2 / C_J = 2 E_c.

Working with (n1, n2) instead of the half-angle coordinates avoids the
parity constraint between the charges conjugate to phi_p and phi_m.
"""

from __future__ import annotations

import dataclasses
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import ConfigurationError, ConvergenceError, DegenerateLevelsError

#: Cutoff that converges the six lowest levels below 1e-8 E_J at E_J/E_c = 40.
DEFAULT_CUTOFF = 12
DEFAULT_MAX_DIMENSION = 40_000
#: Above this linear dimension ``eigensolve`` switches to ARPACK.
DEFAULT_SPARSE_THRESHOLD = 4_000

RESIDUAL_TOL = 1e-9
DEGENERACY_TOL = 1e-10


@dataclass(frozen=True)
class CircuitParams:
    """Parameters of the three-junction loop.

    Parameters
    ----------
    alpha : float
        Ratio of the small junction's Josephson energy (and capacitance) to
        that of the two large junctions. Must lie in (0, 1).
    ej_over_ec : float
        E_J / E_c with E_c = e^2 / 2C_J.
    f : float
        Reduced external flux Phi_e / Phi_0. Values outside [0, 1] are
        wrapped modulo 1 with a warning.
    cutoff : int
        Charge cutoff N; the basis holds all |n1|, |n2| <= N.
    """

    alpha: float = 0.8
    ej_over_ec: float = 40.0
    f: float = 0.5
    cutoff: int = DEFAULT_CUTOFF

    def __post_init__(self):
        alpha = float(self.alpha)
        if not math.isfinite(alpha) or not 0.0 < alpha < 1.0:
            raise ConfigurationError(f"alpha must lie in (0, 1), got {self.alpha!r}", "alpha")
        ratio = float(self.ej_over_ec)
        if not math.isfinite(ratio) or ratio <= 0.0:
            raise ConfigurationError(f"ej_over_ec must be positive, got {self.ej_over_ec!r}", "ej_over_ec")
        if isinstance(self.cutoff, bool) or int(self.cutoff) != self.cutoff or self.cutoff < 1:
            raise ConfigurationError(f"cutoff must be an integer >= 1, got {self.cutoff!r}", "cutoff")
        f = float(self.f)
        if not math.isfinite(f):
            raise ConfigurationError(f"f must be finite, got {self.f!r}", "f")
        if not 0.0 <= f <= 1.0:
            wrapped = f % 1.0
            warnings.warn(f"reduced flux f={f!r} wrapped to {wrapped!r}", stacklevel=3)
            f = wrapped
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "ej_over_ec", ratio)
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "cutoff", int(self.cutoff))

    @property
    def dimension(self) -> int:
        return (2 * self.cutoff + 1) ** 2

    def with_flux(self, f: float) -> "CircuitParams":
        return dataclasses.replace(self, f=f)


@dataclass(frozen=True)
class ChargeBasisOperator:
    """Sparse Hermitian operator on the (n1, n2) charge lattice.

    Basis index of (n1, n2) is ``(n1 + N) * (2N + 1) + (n2 + N)``.
    """

    matrix: sp.csr_matrix
    cutoff: int
    params: CircuitParams | None = None

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()

    def hermiticity_defect(self) -> float:
        """max |A[r, c] - conj(A[c, r])| over all entries."""
        diff = self.matrix - self.matrix.conj().T
        return float(abs(diff).max()) if diff.nnz else 0.0

    def matrix_element(self, bra: np.ndarray, ket: np.ndarray) -> complex:
        return complex(np.vdot(bra, self.matrix @ ket))


@dataclass(frozen=True)
class EigenSystem:
    levels: np.ndarray
    states: np.ndarray = field(repr=False)
    params: CircuitParams | None = None

    def __len__(self):
        return len(self.levels)


def charge_grid(cutoff: int) -> tuple[np.ndarray, np.ndarray]:
    """Flattened (n1, n2) arrays in basis order."""
    ns = np.arange(-cutoff, cutoff + 1)
    n1, n2 = np.meshgrid(ns, ns, indexing="ij")
    return n1.ravel(), n2.ravel()


def _index(n1, n2, cutoff):
    return (n1 + cutoff) * (2 * cutoff + 1) + (n2 + cutoff)


def _hermitian_coo(dim, rows, cols, vals, diag=None):
    """Assemble ``sum_e vals[e] |rows[e]><cols[e]| + h.c.`` (+ real diagonal)."""
    r = np.concatenate([rows, cols])
    c = np.concatenate([cols, rows])
    v = np.concatenate([vals, np.conj(vals)])
    if diag is not None:
        d = np.arange(dim)
        r = np.concatenate([r, d])
        c = np.concatenate([c, d])
        v = np.concatenate([v, diag.astype(complex)])
    return sp.coo_matrix((v, (r, c)), shape=(dim, dim)).tocsr()


def _shift_pairs(cutoff, d1, d2):
    """Basis index pairs (target, source) for (n1, n2) -> (n1 + d1, n2 + d2)."""
    n1, n2 = charge_grid(cutoff)
    m1, m2 = n1 + d1, n2 + d2
    ok = (np.abs(m1) <= cutoff) & (np.abs(m2) <= cutoff)
    return _index(m1[ok], m2[ok], cutoff), _index(n1[ok], n2[ok], cutoff)


def flux_phase(f: float) -> complex:
    """exp(i 2 pi f), with exact values at quarter periods."""
    turns = (4.0 * f) % 4.0
    exact = {0.0: 1.0 + 0j, 1.0: 1j, 2.0: -1.0 + 0j, 3.0: -1j}
    if turns in exact:
        return exact[turns]
    return complex(np.exp(2j * np.pi * f))


def charging_diagonal(params: CircuitParams) -> np.ndarray:
    n1, n2 = charge_grid(params.cutoff)
    plus = (n1 + n2).astype(float)
    minus = (n1 - n2).astype(float)
    return (2.0 / params.ej_over_ec) * (plus**2 + minus**2 / (1.0 + 2.0 * params.alpha))


def build_hamiltonian(
    params: CircuitParams,
    *,
    josephson: bool = True,
    max_dimension: int = DEFAULT_MAX_DIMENSION,
) -> ChargeBasisOperator:
    """Charge-basis matrix of the circuit Hamiltonian in units of E_J.

    ``josephson=False`` drops every Josephson term including the constant
    offset, leaving the pure charging spectrum (a test hook).
    """
    dim = params.dimension
    if dim > max_dimension:
        raise ConfigurationError(
            f"basis dimension {dim} exceeds max_dimension={max_dimension}", "cutoff"
        )
    N = params.cutoff
    diag = charging_diagonal(params)
    if not josephson:
        empty = np.empty(0, dtype=int)
        return ChargeBasisOperator(
            _hermitian_coo(dim, empty, empty, np.empty(0, complex), diag), N, params
        )

    diag = diag + (2.0 + params.alpha)
    rows, cols, vals = [], [], []
    # -cos(phi1) and -cos(phi2): -1/2 on unit charge shifts
    for d1, d2 in ((1, 0), (0, 1)):
        r, c = _shift_pairs(N, d1, d2)
        rows.append(r)
        cols.append(c)
        vals.append(np.full(r.size, -0.5, dtype=complex))
    # -alpha cos(2 pi f + phi1 - phi2)
    r, c = _shift_pairs(N, 1, -1)
    rows.append(r)
    cols.append(c)
    vals.append(np.full(r.size, -0.5 * params.alpha * flux_phase(params.f)))
    matrix = _hermitian_coo(
        dim, np.concatenate(rows), np.concatenate(cols), np.concatenate(vals), diag
    )
    return ChargeBasisOperator(matrix, N, params)


def _fix_gauge(vectors: np.ndarray) -> np.ndarray:
    """Make the largest-modulus component of each column real and positive."""
    out = np.array(vectors, dtype=complex, copy=True)
    for j in range(out.shape[1]):
        col = out[:, j]
        pivot = col[np.argmax(np.abs(col))]
        out[:, j] = col * (abs(pivot) / pivot)
    return out


def _orthonormalize_degenerate(levels, vectors, tol=DEGENERACY_TOL):
    start = 0
    k = len(levels)
    while start < k:
        stop = start + 1
        while stop < k and levels[stop] - levels[stop - 1] < tol:
            stop += 1
        if stop - start > 1:
            q, _ = np.linalg.qr(vectors[:, start:stop])
            vectors[:, start:stop] = q
        start = stop
    return vectors


def eigensolve(
    h: ChargeBasisOperator,
    k: int,
    *,
    sparse_threshold: int = DEFAULT_SPARSE_THRESHOLD,
    maxiter: int | None = None,
    seed: int = 0,
) -> EigenSystem:
    """Lowest ``k`` eigenpairs of ``h``, ascending and gauge-fixed.

    Dense LAPACK for dimensions up to ``sparse_threshold``, ARPACK with a
    seeded start vector above it. Every returned pair is checked against
    the residual bound ``||H v - e v|| <= 1e-9 ||H||_1``.
    """
    dim = h.dimension
    if not 1 <= k <= dim:
        raise ConfigurationError(f"k must lie in [1, {dim}], got {k}", "k")
    if dim <= sparse_threshold or k >= dim - 1:
        levels, vectors = scipy.linalg.eigh(
            h.toarray(), subset_by_index=[0, k - 1], driver="evr"
        )
    else:
        rng = np.random.default_rng(seed)
        v0 = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        try:
            levels, vectors = spla.eigsh(
                h.matrix, k=k, which="SA", v0=v0, tol=0, maxiter=maxiter
            )
        except spla.ArpackNoConvergence as exc:
            iters = maxiter if maxiter is not None else dim * 10
            raise ConvergenceError("ARPACK did not converge", iterations=iters) from exc
        order = np.argsort(levels, kind="stable")
        levels, vectors = levels[order], vectors[:, order]

    vectors = _orthonormalize_degenerate(levels, np.array(vectors, dtype=complex))
    vectors = _fix_gauge(vectors)

    norm = spla.norm(h.matrix, 1)
    residuals = np.linalg.norm(h.matrix @ vectors - vectors * levels, axis=0)
    worst = float(residuals.max())
    if worst > RESIDUAL_TOL * max(norm, 1.0):
        raise ConvergenceError(f"eigenpair residual {worst:.3e} exceeds tolerance")
    return EigenSystem(np.asarray(levels, dtype=float), vectors, h.params)


def spectrum(params: CircuitParams, k: int = 6, **kwargs) -> EigenSystem:
    """Shortcut for ``eigensolve(build_hamiltonian(params), k)``."""
    return eigensolve(build_hamiltonian(params), k, **kwargs)


@dataclass(frozen=True)
class SpectrumTable:
    """Levels on a flux grid; ``levels[i, j]`` is level j at ``f[i]``."""

    f: np.ndarray
    levels: np.ndarray

    def __len__(self):
        return len(self.f)


def _map_grid(func, grid, workers):
    if workers and workers > 1 and len(grid) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(func, grid))
    return [func(x) for x in grid]


def sweep_spectrum(
    params_base: CircuitParams,
    f_grid: Sequence[float],
    k: int = 6,
    *,
    workers: int | None = None,
) -> SpectrumTable:
    f_values = np.asarray(list(f_grid), dtype=float)
    if f_values.size == 0:
        raise ConfigurationError("f_grid must not be empty", "f_grid")
    bad = (f_values < 0.0) | (f_values > 1.0) | ~np.isfinite(f_values)
    if bad.any():
        raise ConfigurationError(f"f values outside [0, 1]: {f_values[bad].tolist()}", "f_grid")

    def levels_at(f):
        try:
            return spectrum(params_base.with_flux(f), k).levels
        except ConvergenceError as exc:
            raise ConvergenceError(str(exc), f=f) from exc

    rows = _map_grid(levels_at, f_values, workers)
    return SpectrumTable(f_values, np.vstack(rows))


RATIO_PAIRS = ((2, 0), (2, 1), (1, 0))


def ratio_table(levels: Sequence[float]) -> tuple[float, float, float]:
    """(D20, D21, D10) with D_ij = (e3 - e2) / (e_i - e_j)."""
    e = np.asarray(levels, dtype=float)
    if e.size < 4:
        raise ConfigurationError("ratio_table needs the four lowest levels", "levels")
    if np.any(np.diff(e[:4]) < 0):
        raise ConfigurationError("levels must be ascending", "levels")
    top = e[3] - e[2]
    out = []
    for i, j in RATIO_PAIRS:
        gap = e[i] - e[j]
        if gap < 1e-12:
            raise DegenerateLevelsError(f"levels {i} and {j} are degenerate (gap {gap:.3e})")
        out.append(float(top / gap))
    return tuple(out)


def charge_permutation(cutoff: int, kind: str = "swap") -> np.ndarray:
    """Index map of a charge-lattice symmetry; ``v[perm]`` is the image of ``v``.

    ``swap``: (n1, n2) -> (n2, n1), i.e. phi_m -> -phi_m. A symmetry only when
    2f is an integer; it is the one that fixes the microwave selection rules.

    ``inversion``: (n1, n2) -> (-n2, -n1), i.e. phi_p -> -phi_p. A symmetry
    at every f.
    """
    n1, n2 = charge_grid(cutoff)
    if kind == "swap":
        return _index(n2, n1, cutoff)
    if kind == "inversion":
        return _index(-n2, -n1, cutoff)
    raise ConfigurationError(f"unknown symmetry {kind!r}", "kind")


def parities(eig: EigenSystem, kind: str = "swap") -> np.ndarray:
    """Real expectation <v|P|v> of the reflection for each state (+1 / -1 if definite)."""
    cutoff = eig.params.cutoff if eig.params else int(round((math.isqrt(eig.states.shape[0]) - 1) / 2))
    perm = charge_permutation(cutoff, kind)
    return np.real(np.einsum("ij,ij->j", eig.states.conj(), eig.states[perm, :]))
