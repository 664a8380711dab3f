"""Brute-force propagation on a truncated ions (x) phonon (x) photon space.

The full basis index is ``(ion * (P + 1) + phonon) * (Q + 1) + photon`` with
``ion`` in the product order of :mod:`ionw.basis`, ``P = max_phonons`` and
``Q = max_photons``.  Energies are in units of hbar*g*eta.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np

from .basis import PRODUCT_LABELS, coupled_transform, product_index, symmetric_states
from .dynamics import AmplitudeSet, Preparation
from .errors import ChainResidualError, TruncationError, ValidationError

MAX_DIM = 4096
LEAKAGE_TOL = 1e-12


@dataclass(frozen=True)
class FockTruncation:
    max_phonons: int
    max_photons: int

    def __post_init__(self):
        if self.max_phonons < 0 or self.max_photons < 0:
            raise ValidationError("truncation levels must be non-negative")
        if self.dim > MAX_DIM:
            raise ValidationError(f"truncated dimension {self.dim} exceeds {MAX_DIM}")

    @classmethod
    def for_chain(cls, m: int, n: int, margin: int = 2) -> FockTruncation:
        """Truncation holding every state of the (m, n) chain plus a safety margin."""
        return cls(max(m + 1, 0) + margin, max(n + 1, 0) + margin)

    @property
    def dim(self) -> int:
        return 8 * (self.max_phonons + 1) * (self.max_photons + 1)

    def index(self, ion: int, phonons: int, photons: int) -> int:
        return (ion * (self.max_phonons + 1) + phonons) * (self.max_photons + 1) + photons

    def contains(self, phonons: int, photons: int) -> bool:
        return 0 <= phonons <= self.max_phonons and 0 <= photons <= self.max_photons


def _lowering(levels: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, levels)), 1)


def ion_raising() -> np.ndarray:
    """Collective raising operator sum_j sigma_+^(j) in the product basis."""
    sp = np.zeros((8, 8))
    for col, lab in enumerate(PRODUCT_LABELS):
        for j in range(3):
            if lab[j] == 0:
                row = col + (1 << j)
                sp[row, col] = 1.0
    return sp


def build_hamiltonian(tr: FockTruncation) -> np.ndarray:
    """Red-sideband interaction sigma_+ b a + h.c. as a dense real symmetric matrix."""
    a = _lowering(tr.max_phonons + 1)
    b = _lowering(tr.max_photons + 1)
    up = np.kron(ion_raising(), np.kron(a, b))
    return up + up.T


def number_operators(tr: FockTruncation) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Diagonals of ion excitation, phonon and photon number operators."""
    ions = np.array([lab.excitations for lab in PRODUCT_LABELS], dtype=float)
    ph = np.arange(tr.max_phonons + 1, dtype=float)
    pt = np.arange(tr.max_photons + 1, dtype=float)
    one_ph, one_pt = np.ones_like(ph), np.ones_like(pt)
    n_ion = np.kron(ions, np.kron(one_ph, one_pt))
    n_ph = np.kron(np.ones(8), np.kron(ph, one_pt))
    n_pt = np.kron(np.ones(8), np.kron(one_ph, pt))
    return n_ion, n_ph, n_pt


def coupled_frame(H: np.ndarray, tr: FockTruncation) -> np.ndarray:
    """H rewritten with the ionic factor in the coupled basis."""
    modes = (tr.max_phonons + 1) * (tr.max_photons + 1)
    W = np.kron(coupled_transform(), np.eye(modes))
    return W @ H @ W.T


def initial_state(tr: FockTruncation, ions, phonons: int, photons: int) -> np.ndarray:
    """Product state (ionic state) (x) |phonons, photons>.

    ``ions`` is either a product-basis index / ``(i1, i2, i3)`` tuple or an
    8-component amplitude vector (any internal state, including sigma=1 parts).
    """
    if not tr.contains(phonons, photons):
        raise ValidationError(f"|{phonons}, {photons}> lies outside the truncation")
    if isinstance(ions, tuple):
        ions = product_index(*ions)
    if np.isscalar(ions):
        v = np.zeros(8, dtype=complex)
        v[int(ions)] = 1.0
    else:
        v = np.asarray(ions, dtype=complex)
        if v.shape != (8,) or abs(np.linalg.norm(v) - 1) > 1e-12:
            raise ValidationError("ionic state must be a normalized 8-vector")
    mode = np.zeros((tr.max_phonons + 1) * (tr.max_photons + 1), dtype=complex)
    mode[phonons * (tr.max_photons + 1) + photons] = 1.0
    return np.kron(v, mode)


def boundary_mask(tr: FockTruncation) -> np.ndarray:
    _, n_ph, n_pt = number_operators(tr)
    return (n_ph == tr.max_phonons) | (n_pt == tr.max_photons)


class Propagator:
    """exp(-i H tau) via a single dense eigendecomposition, reusable across tau."""

    def __init__(self, H: np.ndarray, truncation: FockTruncation | None = None):
        self.H = np.asarray(H)
        self.truncation = truncation

    @cached_property
    def _eig(self):
        return np.linalg.eigh(self.H)

    @cached_property
    def _boundary(self):
        if self.truncation is None:
            return None
        return boundary_mask(self.truncation)

    def evolve(self, initial: np.ndarray, taus) -> np.ndarray:
        """States at each tau, shape ``taus.shape + (dim,)``."""
        initial = np.asarray(initial, dtype=complex)
        if abs(np.linalg.norm(initial) - 1) > 1e-12:
            raise ValidationError("initial state is not normalized")
        w, v = self._eig
        coeffs = v.conj().T @ initial
        phases = np.exp(-1j * np.multiply.outer(np.asarray(taus, dtype=float), w))
        states = (phases * coeffs) @ v.T
        if self._boundary is not None:
            leak = float(np.max(np.sum(np.abs(states[..., self._boundary]) ** 2, axis=-1), initial=0.0))
            if leak > LEAKAGE_TOL:
                raise TruncationError(f"population {leak:.3e} reached the truncation edge", leak)
        return states


def propagate(H: np.ndarray, initial: np.ndarray, tau: float, truncation: FockTruncation | None = None) -> np.ndarray:
    return Propagator(H, truncation).evolve(initial, tau)


class ChainProjection(NamedTuple):
    amplitudes: AmplitudeSet
    residual: float


def chain_vectors(tr: FockTruncation, m: int, n: int) -> np.ndarray:
    """Rows: |000;m+1,n+1>, |W1;m,n>, |W2;m-1,n-1>, |111;m-2,n-2> (zero if out of range)."""
    sym = symmetric_states()
    rows = np.zeros((4, tr.dim), dtype=complex)
    for k in range(4):
        ph, pt = m + 1 - k, n + 1 - k
        if tr.contains(ph, pt):
            mode = np.zeros((tr.max_phonons + 1) * (tr.max_photons + 1))
            mode[ph * (tr.max_photons + 1) + pt] = 1.0
            rows[k] = np.kron(sym[k], mode)
    return rows


def extract_chain_amplitudes(
    state: np.ndarray,
    tr: FockTruncation,
    m: int,
    n: int,
    preparation: Preparation = Preparation.GROUND,
    tol: float = 1e-10,
) -> ChainProjection:
    """Project an evolved state onto its four-state chain.

    Amplitudes are assigned with the same role convention as
    :class:`ionw.dynamics.AmplitudeSet`.
    """
    rows = chain_vectors(tr, m, n)
    c = rows.conj() @ np.asarray(state, dtype=complex)
    residual = float(max(np.linalg.norm(state) ** 2 - np.sum(np.abs(c) ** 2), 0.0))
    if residual > tol:
        raise ChainResidualError(f"weight {residual:.3e} lies outside the chain", residual)
    preparation = Preparation(preparation)
    if preparation is Preparation.EXCITED:
        c = c[::-1]
    return ChainProjection(AmplitudeSet(*(complex(x) for x in c), preparation=preparation), residual)


def chain_series(m: int, n: int, taus, preparation: Preparation = Preparation.GROUND) -> np.ndarray:
    """Oracle chain amplitudes ordered by excitation count, shape (len(taus), 4).

    For the excited preparation ``(m, n)`` are the chain labels, i.e. the
    initial state is |111> (x) |m-2, n-2>.
    """
    preparation = Preparation(preparation)
    tr = FockTruncation.for_chain(m, n)
    if preparation is Preparation.GROUND:
        psi0 = initial_state(tr, 0, m + 1, n + 1)
    else:
        psi0 = initial_state(tr, 7, m - 2, n - 2)
    states = Propagator(build_hamiltonian(tr), tr).evolve(psi0, taus)
    return states @ chain_vectors(tr, m, n).conj().T
