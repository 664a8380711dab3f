"""Invariant suite behind ``ionw verify``."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .dynamics import Preparation, SimulationConfig, amplitude_series, composite_from_amplitudes
from .entanglement import (
    TransposeSpec,
    constrained_3way_negativities,
    density_from_pure,
    global_negativity,
    partial_kway_negativities,
    partial_transpose,
    analytic_negativities,
)
from .oracle import chain_series

TOLERANCES = {
    "normalization": 1e-12,
    "oracle": 1e-8,
    "decomposition": 1e-9,
    "pt_sum": 1e-14,
    "qubit_symmetry": 1e-10,
    "analytic": 1e-9,
    "constrained": 1e-9,
    "single_phonon": 1e-10,
    "a2_roots": 1e-12,
}


@dataclass
class Check:
    name: str
    deviation: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.deviation <= self.tolerance)


def default_configs() -> list[SimulationConfig]:
    cfgs = [SimulationConfig(Preparation.GROUND, m + 1, n + 1) for m in range(5) for n in range(5)]
    cfgs += [SimulationConfig(Preparation.EXCITED, p, q) for p in range(3) for q in range(3)]
    return cfgs


def _worst(store: dict, key: str, value: float) -> None:
    store[key] = max(store.get(key, 0.0), float(value))


def verify(configs: list[SimulationConfig] | None = None, taus=None) -> list[Check]:
    """Run every invariant over ``configs`` x ``taus`` and report the worst deviations."""
    if configs is None:
        configs = default_configs()
    if taus is None:
        taus = np.linspace(0, 3 * np.pi, 120)
    taus = np.asarray(taus, dtype=float)
    worst: dict[str, float] = {}

    for cfg in configs:
        cfg = replace(cfg, include_global_phase=False)
        amps = amplitude_series(cfg, taus)
        _worst(worst, "normalization", np.max(np.abs(np.sum(np.abs(amps) ** 2, axis=1) - 1)))
        m, n = cfg.chain_mn
        oracle = chain_series(m, n, taus, cfg.preparation)
        _worst(worst, "oracle", np.max(np.abs(oracle - amps)))

        for c in amps:
            rho = density_from_pure(composite_from_amplitudes(c))
            ka = partial_kway_negativities(rho, "A")
            kd = partial_kway_negativities(rho, "D")
            for p, k in (("A", ka), ("D", kd)):
                _worst(worst, "decomposition", abs(k.NG - (k.E2 + k.E3 + k.E4 - k.E0)))
                G = partial_transpose(rho, TransposeSpec(p))
                parts = sum(partial_transpose(rho, TransposeSpec.kway(p, K)) for K in (2, 3, 4))
                _worst(worst, "pt_sum", np.max(np.abs(G - (parts - 2 * rho))))
            ngs = [global_negativity(rho, q) for q in "ABC"]
            _worst(worst, "qubit_symmetry", max(ngs) - min(ngs))
            an = analytic_negativities(c)
            diffs = [
                an.NG_A - ka.NG, an.E2_A - ka.E2, an.E3_A - ka.E3, an.E4_A - ka.E4,
                an.NG_D - kd.NG, an.E2_D - kd.E2, an.E3_D - kd.E3, an.E4_D - kd.E4,
                an.NG_AB - global_negativity(rho, "AB"),
            ]
            _worst(worst, "analytic", np.max(np.abs(diffs)))
            con = constrained_3way_negativities(rho, "A")
            _worst(worst, "constrained", max(abs(con["ABC"]), abs(con["ABD"] - ka.E3 / 2), abs(con["ACD"] - ka.E3 / 2)))
            if cfg.preparation is Preparation.GROUND and m == 0:
                for p in "ABCD":
                    kp = partial_kway_negativities(rho, p)
                    _worst(worst, "single_phonon", max(abs(kp.E3), abs(kp.E4)))

        if cfg.preparation is Preparation.GROUND and (m, n) == (1, 1):
            roots = np.pi / 2 * np.arange(0, 7)
            _worst(worst, "a2_roots", np.max(np.abs(amplitude_series(cfg, roots)[:, 2])))

    return [Check(name, worst[name], TOLERANCES[name]) for name in TOLERANCES if name in worst]
