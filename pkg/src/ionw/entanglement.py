"""Partial transposes and negativities on the (2, 2, 2, 4) space of ions A, B, C and mode D.

Every partial transpose is a pure index permutation, so the gather tables are
built once per subsystem set and reused.  A K-way transpose only touches
matrix elements whose bra and ket labels differ in exactly K subsystems.

For a transpose on a single subsystem p the identity

    rho_G = sum_{K=1..4} rho_K - 3 rho

holds for every operator.  Elements in which only p differs (K = 1) are
simply complex-conjugated by the transpose, so when those coherences are
real the K = 1 term equals rho and the familiar form
``rho_G = rho_2 + rho_3 + rho_4 - 2 rho`` follows.  The one-way term is
reported separately as ``E1`` so that

    N_G = E1 + E2 + E3 + E4 - E0

is exact for every state; ``E1`` vanishes on all states this package evolves.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .basis import COMPOSITE_DIMS, PRODUCT_LABELS, symmetric_states
from .dynamics import AmplitudeSet, SimulationConfig, composite_state, evolve
from .errors import ValidationError

SUBSYSTEMS = "ABCD"
NEGATIVE_EIG = -1e-12
HERMITIAN_TOL = 1e-10


@lru_cache(maxsize=None)
def _labels(dims: tuple[int, ...]) -> np.ndarray:
    """Subsystem labels of every basis index, first subsystem most significant."""
    return np.array(list(np.ndindex(*dims)))


def _positions(subsystems: str, dims: tuple[int, ...] = COMPOSITE_DIMS) -> tuple[int, ...]:
    names = SUBSYSTEMS[: len(dims)]
    try:
        pos = tuple(sorted({names.index(s) for s in subsystems.upper()}))
    except ValueError:
        raise ValidationError(f"unknown subsystem in {subsystems!r}") from None
    if not pos:
        raise ValidationError("at least one subsystem is required")
    return pos


def subsystem_dim(subsystems: str, dims: tuple[int, ...] = COMPOSITE_DIMS) -> int:
    return math.prod(dims[p] for p in _positions(subsystems, dims))


@lru_cache(maxsize=None)
def _gather(dims: tuple[int, ...], positions: tuple[int, ...]):
    """Row/column source indices realising the transpose on ``positions``."""
    labels = _labels(dims)
    size = len(labels)
    bra = np.repeat(labels[:, None, :], size, axis=1)
    ket = np.repeat(labels[None, :, :], size, axis=0)
    src_bra, src_ket = bra.copy(), ket.copy()
    for p in positions:
        src_bra[..., p] = ket[..., p]
        src_ket[..., p] = bra[..., p]
    rows = np.ravel_multi_index(np.moveaxis(src_bra, -1, 0), dims)
    cols = np.ravel_multi_index(np.moveaxis(src_ket, -1, 0), dims)
    rows.setflags(write=False)
    cols.setflags(write=False)
    return rows, cols


@lru_cache(maxsize=None)
def _differs(dims: tuple[int, ...]) -> np.ndarray:
    labels = _labels(dims)
    d = labels[:, None, :] != labels[None, :, :]
    d.setflags(write=False)
    return d


@dataclass(frozen=True)
class TransposeSpec:
    """Which partial transpose to build.

    ``kind`` is ``"global"``, ``"kway"`` (needs ``k``) or ``"constrained"``
    (needs a three-letter ``triple`` containing ``subsystem``).
    """

    subsystem: str
    kind: str = "global"
    k: int | None = None
    triple: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "subsystem", self.subsystem.upper())
        _positions(self.subsystem)
        if self.kind == "global":
            return
        if len(self.subsystem) != 1:
            raise ValidationError("K-way transposes are defined for a single subsystem")
        if self.kind == "kway":
            if self.k not in (1, 2, 3, 4):
                raise ValidationError(f"K must be in 1..4, got {self.k!r}")
        elif self.kind == "constrained":
            t = (self.triple or "").upper()
            if len(set(t)) != 3 or self.subsystem not in t:
                raise ValidationError(f"triple {self.triple!r} must name 3 subsystems including {self.subsystem}")
            _positions(t)
            object.__setattr__(self, "triple", "".join(sorted(t)))
        else:
            raise ValidationError(f"unknown transpose kind {self.kind!r}")

    @classmethod
    def global_(cls, subsystem: str) -> TransposeSpec:
        return cls(subsystem)

    @classmethod
    def kway(cls, subsystem: str, k: int) -> TransposeSpec:
        return cls(subsystem, "kway", k=k)

    @classmethod
    def constrained(cls, subsystem: str, triple: str) -> TransposeSpec:
        return cls(subsystem, "constrained", triple=triple)

    def mask(self, dims: tuple[int, ...] = COMPOSITE_DIMS) -> np.ndarray | None:
        """Boolean mask of transposed elements, or None for the global transpose."""
        if self.kind == "global":
            return None
        diff = _differs(dims)
        if self.kind == "kway":
            return diff.sum(axis=-1) == self.k
        want = np.zeros(len(dims), dtype=bool)
        want[list(_positions(self.triple, dims))] = True
        return np.all(diff == want, axis=-1)


def _as_operator(rho, dims: tuple[int, ...] = COMPOSITE_DIMS) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    size = math.prod(dims)
    if rho.shape != (size, size):
        raise ValidationError(f"expected a {size}x{size} operator, got shape {rho.shape}")
    return rho


def density_from_pure(state) -> np.ndarray:
    psi = np.asarray(state, dtype=complex)
    if psi.shape != (32,):
        raise ValidationError(f"expected a 32-component state, got shape {psi.shape}")
    if abs(np.linalg.norm(psi) - 1) > 1e-12:
        raise ValidationError("state is not normalized")
    return np.outer(psi, psi.conj())


def check_density(rho, tol: float = 1e-12, psd_tol: float = 1e-10) -> None:
    """Raise ValidationError unless rho is Hermitian, unit-trace and PSD."""
    rho = _as_operator(rho)
    if np.max(np.abs(rho - rho.conj().T)) > tol:
        raise ValidationError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > tol:
        raise ValidationError("density matrix does not have unit trace")
    if np.linalg.eigvalsh(rho).min() < -psd_tol:
        raise ValidationError("density matrix is not positive semidefinite")


def reduce_to_ions(rho) -> np.ndarray:
    """Trace out D; the result is ordered like :data:`ionw.basis.PRODUCT_LABELS`."""
    rho = _as_operator(rho).reshape(8, 4, 8, 4)
    red = np.einsum("idjd->ij", rho)
    # composite ion index is 4*i1 + 2*i2 + i3; product order is i1 + 2*i2 + 4*i3
    order = [4 * l.i1 + 2 * l.i2 + l.i3 for l in PRODUCT_LABELS]
    return red[np.ix_(order, order)]


def ion_mixture_weights(rho_ions) -> np.ndarray:
    """Populations of |000>, |W1>, |W2>, |111> in an 8x8 ionic operator."""
    sym = symmetric_states()
    return np.real(np.einsum("ki,ij,kj->k", sym, np.asarray(rho_ions), sym))


def partial_transpose(rho, spec: TransposeSpec, dims: tuple[int, ...] = COMPOSITE_DIMS) -> np.ndarray:
    """Partial transpose of ``rho`` on a space with subsystem dimensions ``dims``.

    ``dims`` defaults to the (2, 2, 2, 4) layout; pass ``(2, 2, 2)`` for a
    three-qubit operator.  Subsystems are named A, B, C, D in ``dims`` order.
    """
    rho = _as_operator(rho, dims)
    rows, cols = _gather(dims, _positions(spec.subsystem, dims))
    out = rho[rows, cols]
    mask = spec.mask(dims)
    if mask is not None:
        out = np.where(mask, out, rho)
    return out


def negativity(pt, d_p: int) -> float:
    """(||pt||_1 - 1) / (d_p - 1) for a Hermitian partial transpose."""
    pt = np.asarray(pt, dtype=complex)
    if np.max(np.abs(pt - pt.conj().T)) > HERMITIAN_TOL:
        raise ValidationError("partial transpose is not Hermitian")
    if d_p < 2:
        raise ValidationError(f"subsystem dimension must be at least 2, got {d_p}")
    w = np.linalg.eigvalsh(pt)
    return float((np.sum(np.abs(w)) - 1) / (d_p - 1))


def global_negativity(rho, subsystems: str, dims: tuple[int, ...] = COMPOSITE_DIMS) -> float:
    pt = partial_transpose(rho, TransposeSpec(subsystems), dims)
    return negativity(pt, subsystem_dim(subsystems, dims))


class KWayNegativities(NamedTuple):
    NG: float
    E1: float
    E2: float
    E3: float
    E4: float
    E0: float


def _negative_projector(rho, p: str, dims):
    pt = partial_transpose(rho, TransposeSpec(p), dims)
    w, v = np.linalg.eigh(pt)
    neg = w < NEGATIVE_EIG
    vn = v[:, neg]
    return vn @ vn.conj().T, float(w[neg].sum())


def _sandwich(P, op) -> float:
    return float(np.real(np.sum(P.T * op)))


def partial_kway_negativities(rho, p: str, dims: tuple[int, ...] = COMPOSITE_DIMS) -> KWayNegativities:
    """Split the global negativity on subsystem ``p`` into K-way parts.

    The negative eigenspace of the global transpose enters through its
    projector, so degenerate negative eigenvalues need no special handling.
    """
    rho = _as_operator(rho, dims)
    p = p.upper()
    if len(p) != 1:
        raise ValidationError("partial K-way negativities need a single subsystem")
    n_parties = len(dims)
    scale = -2.0 / (subsystem_dim(p, dims) - 1)
    P, neg_sum = _negative_projector(rho, p, dims)
    rows, cols = _gather(dims, _positions(p, dims))
    pt = rho[rows, cols]
    count = _differs(dims).sum(axis=-1)
    E = {k: scale * _sandwich(P, np.where(count == k, pt, rho)) if k <= n_parties else 0.0 for k in range(1, 5)}
    E0 = scale * (n_parties - 2) * _sandwich(P, rho)
    # one-way term measured against rho itself; zero when those coherences are real
    E1 = E[1] - scale * _sandwich(P, rho)
    return KWayNegativities(scale * neg_sum, E1, E[2], E[3], E[4], E0)


def constrained_3way_negativities(rho, p: str) -> dict[str, float]:
    """Three-way contributions restricted to each triple containing ``p``."""
    rho = _as_operator(rho)
    p = p.upper()
    scale = -2.0 / (subsystem_dim(p) - 1)
    P, _ = _negative_projector(rho, p, COMPOSITE_DIMS)
    out = {}
    for triple in itertools.combinations(SUBSYSTEMS, 3):
        if p in triple:
            t = "".join(triple)
            out[t] = scale * _sandwich(P, partial_transpose(rho, TransposeSpec.constrained(p, t)))
    return out


@dataclass(frozen=True)
class AnalyticNegativities:
    NG_A: float
    E2_A: float
    E3_A: float
    E4_A: float
    NG_D: float
    E2_D: float
    E3_D: float
    E4_D: float
    NG_AB: float


def analytic_negativities(a) -> AnalyticNegativities:
    """Closed-form negativities of the symmetric chain state.

    ``a`` is an :class:`AmplitudeSet` or the four amplitudes of |000>,
    |W1>, |W2>, |111> in that order.
    """
    c = a.by_excitation() if isinstance(a, AmplitudeSet) else np.asarray(a, dtype=complex)
    r = np.abs(c)
    p = r**2
    if abs(p.sum() - 1) > 1e-10:
        raise ValidationError("amplitudes are not normalized")
    ng_a = 2 * math.sqrt(max((p[0] + 2 * p[1] / 3 + p[2] / 3) * (p[3] + p[1] / 3 + 2 * p[2] / 3), 0.0))
    if ng_a < 1e-12:
        e4_a = e3_a = e2_a = 0.0
    else:
        k = 4 / ng_a
        e4_a = k * (p[0] * p[3] + p[1] * p[2] / 3)
        e3_a = k * (2 * p[0] * p[2] / 3 + 2 * p[1] * p[3] / 3)
        e2_a = k * (p[0] * p[1] / 3 + p[2] * p[3] / 3 + 2 * (p[1] ** 2 + p[1] * p[2] + p[2] ** 2) / 9)
    e4_d = 2 / 3 * r[0] * r[3] + 2 / 9 * r[1] * r[2]
    e3_d = 2 / 3 * (r[0] * r[2] + r[1] * r[3])
    e2_d = 2 / 3 * (r[0] * r[1] + r[2] * r[3]) + 4 / 9 * r[1] * r[2]
    ng_d = 2 / 3 * (r[0] * (r[1] + r[2] + r[3]) + r[1] * (r[2] + r[3]) + r[2] * r[3])
    m0 = math.sqrt(p[0] + p[1] / 3)
    m1 = math.sqrt(2 * p[1] / 3 + 2 * p[2] / 3)
    m2 = math.sqrt(p[3] + p[2] / 3)
    ng_ab = 2 / 3 * (m0 * m1 + m0 * m2 + m1 * m2)
    return AnalyticNegativities(ng_a, e2_a, e3_a, e4_a, ng_d, e2_d, e3_d, e4_d, ng_ab)


@dataclass
class NegativityReport:
    tau: float
    A: KWayNegativities
    D: KWayNegativities
    NG_AB: float
    constrained_A: dict[str, float]
    constrained_D: dict[str, float]
    analytic: AnalyticNegativities | None = None
    discrepancy: dict[str, float] = field(default_factory=dict)

    def for_subsystem(self, p: str) -> KWayNegativities:
        return {"A": self.A, "D": self.D}[p.upper()]

    def as_dict(self) -> dict:
        out = asdict(self)
        out["A"] = self.A._asdict()
        out["D"] = self.D._asdict()
        return out


def numeric_report(rho, tau: float = float("nan")) -> NegativityReport:
    return NegativityReport(
        tau=tau,
        A=partial_kway_negativities(rho, "A"),
        D=partial_kway_negativities(rho, "D"),
        NG_AB=global_negativity(rho, "AB"),
        constrained_A=constrained_3way_negativities(rho, "A"),
        constrained_D=constrained_3way_negativities(rho, "D"),
    )


def entanglement_report(cfg: SimulationConfig, tau: float) -> NegativityReport:
    """Numeric negativities of the evolved state with closed-form cross-checks."""
    rho = density_from_pure(composite_state(cfg, tau))
    report = numeric_report(rho, tau)
    an = analytic_negativities(evolve(cfg, tau))
    report.analytic = an
    report.discrepancy = {
        "NG_A": abs(report.A.NG - an.NG_A),
        "E2_A": abs(report.A.E2 - an.E2_A),
        "E3_A": abs(report.A.E3 - an.E3_A),
        "E4_A": abs(report.A.E4 - an.E4_A),
        "NG_D": abs(report.D.NG - an.NG_D),
        "E2_D": abs(report.D.E2 - an.E2_D),
        "E3_D": abs(report.D.E3 - an.E3_D),
        "E4_D": abs(report.D.E4 - an.E4_D),
        "NG_AB": abs(report.NG_AB - an.NG_AB),
    }
    return report
