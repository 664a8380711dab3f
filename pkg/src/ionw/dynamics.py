"""Closed-form dynamics of the sigma=3 invariant chain.

All public time arguments are the dimensionless interaction parameter
``tau = g * eta * t`` except :func:`w1_generation_time`, which returns seconds.

The chain for a given ``(m, n)`` consists of the four states::

    |111> (x) |m-2, n-2>,  |W2> (x) |m-1, n-1>,  |W1> (x) |m, n>,  |000> (x) |m+1, n+1>

and the interaction couples neighbours with strengths sqrt(2)*A, sqrt(2)*B,
sqrt(2)*C (in units of hbar*g*eta), listed from the |111> end.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize_scalar

from .basis import composite_index
from .errors import ValidationError

DEGENERATE_BETA = 1e-12
RADICAND_CLAMP = 1e-12
LAMB_DICKE_WARN = 0.1


class Preparation(str, enum.Enum):
    GROUND = "ground"
    EXCITED = "excited"


@dataclass(frozen=True)
class SimulationConfig:
    """Initial preparation and physical parameters.

    ``phonons0`` and ``photons0`` are the physical counts present at t=0.
    For the all-ground preparation these are (m+1, n+1); for the
    all-excited preparation they are (m-2, n-2).

    ``g`` is the ion-cavity coupling as an angular rate in s^-1.
    ``nu``, ``omega_c`` and ``omega_0`` only matter when
    ``include_global_phase`` is set.
    """

    preparation: Preparation = Preparation.GROUND
    phonons0: int = 3
    photons0: int = 3
    g: float = 8.95e6
    eta: float = 0.01
    include_global_phase: bool = False
    nu: float = 0.0
    omega_c: float = 0.0
    omega_0: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "preparation", Preparation(self.preparation))
        for name in ("phonons0", "photons0"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or v < 0:
                raise ValidationError(f"{name} must be a non-negative integer, got {v!r}")
        if not self.g > 0:
            raise ValidationError(f"g must be positive, got {self.g!r}")
        if not self.eta > 0:
            raise ValidationError(f"eta must be positive, got {self.eta!r}")
        if self.eta > LAMB_DICKE_WARN:
            warnings.warn(
                f"eta={self.eta} is outside the Lamb-Dicke regime assumed by the model",
                stacklevel=3,
            )

    @property
    def chain_mn(self) -> tuple[int, int]:
        """The (m, n) labels of the chain containing the initial state."""
        if self.preparation is Preparation.GROUND:
            return self.phonons0 - 1, self.photons0 - 1
        return self.phonons0 + 2, self.photons0 + 2

    @property
    def omega1(self) -> float:
        """Zero-point frequency of the chain, in s^-1."""
        m, n = self.chain_mn
        return self.nu * (m + 1.5) + self.omega_c * (n + 1) - 1.5 * self.omega_0

    @property
    def phase_rate(self) -> float:
        """Global phase accumulated per unit tau (0 unless the phase is requested)."""
        if not self.include_global_phase:
            return 0.0
        return self.omega1 / (self.g * self.eta)

    def seconds(self, tau):
        return np.asarray(tau) / (self.g * self.eta)


@dataclass(frozen=True)
class SpectralData:
    A: float
    B: float
    C: float
    mu: float
    beta: float
    mu1: float
    mu2: float
    eigenvalues: tuple[float, float, float, float]
    dim: int

    @property
    def degenerate(self) -> bool:
        return self.beta <= DEGENERATE_BETA


@dataclass(frozen=True)
class AmplitudeSet:
    """The four chain amplitudes at one tau.

    For the ground preparation ``a0..a3`` are the weights of |000>, |W1>,
    |W2>, |111>.  For the excited preparation the roles are reversed:
    ``a0`` is the weight of |111> and ``a3`` the weight of |000>.
    """

    a0: complex
    a1: complex
    a2: complex
    a3: complex
    tau: float = 0.0
    preparation: Preparation = Preparation.GROUND

    def as_array(self) -> np.ndarray:
        return np.array([self.a0, self.a1, self.a2, self.a3], dtype=complex)

    def by_excitation(self) -> np.ndarray:
        """Amplitudes of |000>, |W1>, |W2>, |111> regardless of preparation."""
        a = self.as_array()
        return a if self.preparation is Preparation.GROUND else a[::-1]

    @property
    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.as_array()) ** 2))


def _couplings(m: int, n: int) -> tuple[float, float, float]:
    A = math.sqrt(1.5 * (m - 1) * (n - 1)) if m >= 1 and n >= 1 else 0.0
    B = math.sqrt(2.0 * m * n) if m >= 0 and n >= 0 else 0.0
    C = math.sqrt(1.5 * (m + 1) * (n + 1)) if m >= -1 and n >= -1 else 0.0
    return A, B, C


def _tridiagonal(A: float, B: float, C: float) -> np.ndarray:
    off = math.sqrt(2.0) * np.array([A, B, C])
    return np.diag(off, 1) + np.diag(off, -1)


def _clamped_sqrt(x: float) -> float:
    if x < 0:
        if x < -RADICAND_CLAMP:
            raise ArithmeticError(f"negative radicand {x!r} beyond clamp tolerance")
        return 0.0
    return math.sqrt(x)


def _spectral(A: float, B: float, C: float) -> SpectralData:
    mu = A * A + B * B + C * C
    beta = _clamped_sqrt(mu * mu - 4 * A * A * C * C)
    lo = _clamped_sqrt(mu - beta)
    hi = _clamped_sqrt(mu + beta)
    dim = 1
    for c in (C, B, A):
        if c == 0.0:
            break
        dim += 1
    return SpectralData(
        A=A, B=B, C=C, mu=mu, beta=beta,
        mu1=mu - 2 * A * A, mu2=mu - 2 * C * C,
        eigenvalues=(-lo, lo, -hi, hi), dim=dim,
    )


def block_hamiltonian(m: int, n: int) -> tuple[SpectralData, np.ndarray]:
    """Spectral data and 4x4 sigma=3 block, ordered from the |111> end.

    Rungs that would require negative Fock occupation are zeroed.
    """
    A, B, C = _couplings(m, n)
    return _spectral(A, B, C), _tridiagonal(A, B, C)


class DiagonalizingUnitary(NamedTuple):
    matrix: np.ndarray
    eigenvalues: np.ndarray
    numeric: bool


def spectral_unitary(s: SpectralData) -> DiagonalizingUnitary:
    """Orthogonal U with U @ H @ U.T = diag(eigenvalues).

    Rows are eigenvectors; columns follow the Hamiltonian's basis order
    (the |111> end first).  Falls back to ``numpy.linalg.eigh`` when beta
    vanishes, in which case ``numeric`` is True.
    """
    if s.degenerate:
        w, v = np.linalg.eigh(_tridiagonal(s.A, s.B, s.C))
        return DiagonalizingUnitary(v.T, w, True)
    b = s.beta

    def r(x):
        return _clamped_sqrt(x / (4 * b))

    p2, m2 = r(b + s.mu2), r(b - s.mu2)
    p1, m1 = r(b + s.mu1), r(b - s.mu1)
    # Closed form written with columns in |000>-end-first order; flipped below.
    U = np.array(
        [
            [p2, -m1, -m2, p1],
            [-p2, -m1, m2, p1],
            [-m2, p1, -p2, m1],
            [m2, p1, p2, m1],
        ]
    )
    return DiagonalizingUnitary(U[:, ::-1].copy(), np.array(s.eigenvalues), False)


def _closed_form(s: SpectralData, tau) -> np.ndarray:
    """Amplitudes on |000>-end, next, next, far end for a start at the |000> end.

    Returns an array of shape (4,) + shape(tau).
    """
    tau = np.asarray(tau, dtype=float)
    b, mu1, mu2 = s.beta, s.mu1, s.mu2
    wp = _clamped_sqrt(s.mu + b) * tau
    wm = _clamped_sqrt(s.mu - b) * tau
    cp, cm, sp, sm = np.cos(wp), np.cos(wm), np.sin(wp), np.sin(wm)
    bm2, bp2 = _clamped_sqrt(b - mu2), _clamped_sqrt(b + mu2)
    bm1, bp1 = _clamped_sqrt(b - mu1), _clamped_sqrt(b + mu1)
    k = 1.0 / (2 * b)
    a0 = k * ((b - mu2) * cp + (b + mu2) * cm)
    a1 = -1j * k * (bm2 * bp1 * sp + bp2 * bm1 * sm)
    a2 = k * bm2 * bp2 * (cp - cm)
    a3 = -1j * k * (bm2 * bm1 * sp - bp2 * bp1 * sm)
    return np.array([a0 + 0j, a1, a2 + 0j, a3])


def _numeric(A: float, B: float, C: float, tau) -> np.ndarray:
    tau = np.asarray(tau, dtype=float)
    # Chain ordered from the starting end; the start is the last basis state.
    w, v = np.linalg.eigh(_tridiagonal(A, B, C))
    phases = np.exp(-1j * np.multiply.outer(tau, w))
    column = (phases * v[3]) @ v.T  # <k| exp(-iH tau) |3>
    return np.moveaxis(column[..., ::-1], -1, 0)


def _from_start(A: float, B: float, C: float, tau) -> np.ndarray:
    """Chain amplitudes for a start at the end whose coupling is ``C``."""
    s = _spectral(A, B, C)
    if s.degenerate:
        return _numeric(A, B, C, tau)
    return _closed_form(s, tau)


def _phase(phase_rate: float, tau):
    if phase_rate == 0.0:
        return 1.0
    return np.exp(-1j * phase_rate * np.asarray(tau, dtype=float))


def amplitudes_ground(m: int, n: int, tau: float, phase_rate: float = 0.0) -> AmplitudeSet:
    """Evolve |000> (x) |m+1, n+1> for a time tau."""
    a = _from_start(*_couplings(m, n), tau) * _phase(phase_rate, tau)
    return AmplitudeSet(*(complex(x) for x in a), tau=float(tau))


def amplitudes_excited(phonons: int, photons: int, tau: float, phase_rate: float = 0.0) -> AmplitudeSet:
    """Evolve |111> (x) |phonons, photons> for a time tau.

    The chain has (m, n) = (phonons + 2, photons + 2).  Starting from the
    |111> end is the ground-state problem on the reversed chain, i.e. with the
    outer couplings A and C exchanged.
    """
    A, B, C = _couplings(phonons + 2, photons + 2)
    a = _from_start(C, B, A, tau) * _phase(phase_rate, tau)
    return AmplitudeSet(*(complex(x) for x in a), tau=float(tau), preparation=Preparation.EXCITED)


def evolve(cfg: SimulationConfig, tau: float) -> AmplitudeSet:
    if cfg.preparation is Preparation.GROUND:
        m, n = cfg.chain_mn
        return amplitudes_ground(m, n, tau, cfg.phase_rate)
    return amplitudes_excited(cfg.phonons0, cfg.photons0, tau, cfg.phase_rate)


def amplitude_series(cfg: SimulationConfig, taus) -> np.ndarray:
    """Vectorised amplitudes, shape (len(taus), 4), ordered by excitation count."""
    taus = np.asarray(taus, dtype=float)
    A, B, C = _couplings(*cfg.chain_mn)
    if cfg.preparation is Preparation.GROUND:
        a = _from_start(A, B, C, taus)
    else:
        a = _from_start(C, B, A, taus)[::-1]
    return (a * _phase(cfg.phase_rate, taus)).T


def probabilities(a: AmplitudeSet) -> tuple[float, float, float, float]:
    """Probabilities of finding 0, 1, 2, 3 ions excited."""
    p = np.abs(a.by_excitation()) ** 2
    return tuple(float(x) for x in p)


def composite_state(cfg: SimulationConfig, tau: float) -> np.ndarray:
    """32-component state on the (2, 2, 2, 4) logical space at tau."""
    return composite_from_amplitudes(evolve(cfg, tau).by_excitation())


def composite_from_amplitudes(c) -> np.ndarray:
    """Place excitation-ordered amplitudes (|000>, |W1>, |W2>, |111>) on the logical space.

    The photon-phonon level d equals the number of excited ions.
    """
    c = np.asarray(c, dtype=complex)
    psi = np.zeros(32, dtype=complex)
    r3 = 1 / math.sqrt(3)
    for i1 in (0, 1):
        for i2 in (0, 1):
            for i3 in (0, 1):
                k = i1 + i2 + i3
                weight = c[k] if k in (0, 3) else c[k] * r3
                psi[composite_index(i1, i2, i3, k)] = weight
    return psi


def w_window_amplitudes(m: int, n: int, preparation: Preparation = Preparation.GROUND) -> AmplitudeSet:
    """Amplitudes when both chain sines equal +1.

    For the ground preparation this is the W1-like state (only |W1> and
    |111> populated); for the excited preparation with physical counts
    ``(m, n)`` it is the W2-like state (only |W2> and |000> populated).
    """
    preparation = Preparation(preparation)
    if preparation is Preparation.GROUND:
        A, B, C = _couplings(m, n)
    else:
        C, B, A = _couplings(m + 2, n + 2)
    s = _spectral(A, B, C)
    if s.degenerate:
        raise ValidationError("no W window: the chain does not evolve")
    if A == 0.0:
        # the slow mode has zero frequency, so its sine never reaches 1
        raise ValidationError("no W window: the chain has a zero-frequency mode")
    b = s.beta
    bm2, bp2 = _clamped_sqrt(b - s.mu2), _clamped_sqrt(b + s.mu2)
    bm1, bp1 = _clamped_sqrt(b - s.mu1), _clamped_sqrt(b + s.mu1)
    a1 = -1j / (2 * b) * (bm2 * bp1 + bp2 * bm1)
    a3 = -1j / (2 * b) * (bm2 * bm1 - bp2 * bp1)
    return AmplitudeSet(0j, a1, 0j, a3, tau=float("nan"), preparation=preparation)


def locate_peak(cfg: SimulationConfig, level: int, tau_lo: float, tau_hi: float, grid: int = 400) -> tuple[float, float]:
    """Tau in [tau_lo, tau_hi] maximising the probability of ``level`` excited ions.

    A coarse grid picks the bracket; a bounded scalar search refines it.
    Returns ``(tau, probability)``.
    """
    taus = np.linspace(tau_lo, tau_hi, grid)
    p = np.abs(amplitude_series(cfg, taus)[:, level]) ** 2
    i = int(np.argmax(p))
    lo = taus[max(i - 1, 0)]
    hi = taus[min(i + 1, grid - 1)]

    def f(t):
        return -abs(amplitude_series(cfg, [t])[0, level]) ** 2

    res = minimize_scalar(f, bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
    return float(res.x), float(-res.fun)


def w1_generation_time(n_photons: int, g: float, eta: float) -> float:
    """Shortest time (s) to reach the W1 peak from one phonon and ``n_photons`` photons."""
    if n_photons < 1:
        raise ValidationError("at least one photon is needed to generate a W1 state")
    if g <= 0 or eta <= 0:
        raise ValidationError("g and eta must be positive")
    return math.pi / (2 * g * eta * math.sqrt(3 * n_photons))


def w2_peak_probability(n: int) -> float:
    """Peak |W2> probability for two initial phonons and n+1 photons."""
    if n < 0:
        raise ValidationError(f"n must be non-negative, got {n}")
    return 24 * n * (n + 1) / (5 * n + 3) ** 2
