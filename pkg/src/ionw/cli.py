"""Command-line scenario runner.

    ionw sweep [--prep ground|excited] [--phonons N] [--photons N] [--figure N] ...
    ionw headline
    ionw verify [--prep ...] [--steps N]

Exit codes: 0 success, 1 invalid input, 2 invariant breach.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__
from .checks import TOLERANCES, default_configs, verify
from .dynamics import (
    Preparation,
    SimulationConfig,
    amplitude_series,
    amplitudes_ground,
    composite_from_amplitudes,
    probabilities,
    w1_generation_time,
    w2_peak_probability,
)
from .basis import w_states
from .entanglement import (
    constrained_3way_negativities,
    density_from_pure,
    global_negativity,
    partial_kway_negativities,
)
from .errors import ValidationError
from .oracle import chain_series

COLUMNS = [
    "tau", "P0", "P1", "P2", "P3",
    "NG_A", "E2_A", "E3_A", "E4_A", "E0_A",
    "NG_D", "E2_D", "E3_D", "E4_D", "E0_D",
    "NG_AB", "E3_A_ABC", "E3_A_ABD", "E3_A_ACD",
]
AMPLITUDE_COLUMNS = [f"a{i}_{part}" for i in range(4) for part in ("re", "im")]
ORACLE_COLUMNS = ["oracle_dev"]
OUTPUTS = ("probabilities", "negativities_A", "negativities_D", "negativity_AB", "amplitudes", "oracle_check")
DEFAULT_OUTPUTS = frozenset(OUTPUTS[:4])
DEFAULT_STEPS = 600
DEFAULT_TAU_MAX = 3 * math.pi


@dataclass(frozen=True)
class SweepRequest:
    config: SimulationConfig
    tau_min: float = 0.0
    tau_max: float = DEFAULT_TAU_MAX
    steps: int = DEFAULT_STEPS
    outputs: frozenset = DEFAULT_OUTPUTS

    def __post_init__(self):
        object.__setattr__(self, "outputs", frozenset(self.outputs))
        unknown = self.outputs - set(OUTPUTS)
        if unknown:
            raise ValidationError(f"unknown outputs: {sorted(unknown)}")
        if not self.tau_min < self.tau_max:
            raise ValidationError("tau_min must be smaller than tau_max")
        if self.steps < 2:
            raise ValidationError("steps must be at least 2")

    @property
    def taus(self) -> np.ndarray:
        return np.linspace(self.tau_min, self.tau_max, self.steps)

    @property
    def columns(self) -> list[str]:
        cols = list(COLUMNS)
        if "amplitudes" in self.outputs:
            cols += AMPLITUDE_COLUMNS
        if "oracle_check" in self.outputs:
            cols += ORACLE_COLUMNS
        return cols


@dataclass(frozen=True)
class FigureRecipe:
    figure: int
    configs: tuple[SimulationConfig, ...]
    outputs: frozenset
    caption: str = ""


_GROUND_33 = SimulationConfig(Preparation.GROUND, 3, 3)
_EXCITED_00 = SimulationConfig(Preparation.EXCITED, 0, 0)

FIGURES = {
    1: FigureRecipe(1, (_GROUND_33,), frozenset({"probabilities"}), "P0..P3 from |000,3,3>"),
    2: FigureRecipe(2, (_EXCITED_00,), frozenset({"probabilities"}), "P0..P3 from |111,0,0>"),
    3: FigureRecipe(3, (_GROUND_33,), frozenset({"negativities_A"}), "N_G^A and E_K^A from |0000>"),
    4: FigureRecipe(4, (_GROUND_33,), frozenset({"negativities_D"}), "N_G^D and E_K^D from |0000>"),
    5: FigureRecipe(5, (_EXCITED_00,), frozenset({"negativities_A"}), "N_G^A and E_K^A from |1113>"),
    6: FigureRecipe(6, (_EXCITED_00,), frozenset({"negativities_D"}), "N_G^D and E_K^D from |1113>"),
    7: FigureRecipe(7, (_GROUND_33, _EXCITED_00), frozenset({"negativity_AB"}), "N_G^AB from |0000> and |1113>"),
}


def figure_requests(figure: int, steps: int = DEFAULT_STEPS, tau_max: float = DEFAULT_TAU_MAX) -> list[SweepRequest]:
    try:
        recipe = FIGURES[figure]
    except KeyError:
        raise ValidationError(f"no recipe for figure {figure}; choose 1-7") from None
    return [SweepRequest(cfg, 0.0, tau_max, steps, recipe.outputs) for cfg in recipe.configs]


def _rows_for(req: SweepRequest, taus: np.ndarray) -> list[dict]:
    cfg = req.config
    amps = amplitude_series(cfg, taus)
    want = req.outputs
    oracle = None
    if "oracle_check" in want:
        plain = amplitude_series(replace(cfg, include_global_phase=False), taus)
        oracle = np.max(np.abs(chain_series(*cfg.chain_mn, taus, cfg.preparation) - plain), axis=1)
    rows = []
    for i, (tau, c) in enumerate(zip(taus, amps)):
        row = dict.fromkeys(req.columns)
        row["tau"] = float(tau)
        if "probabilities" in want:
            for k, p in enumerate(np.abs(c) ** 2):
                row[f"P{k}"] = float(p)
        need_rho = want & {"negativities_A", "negativities_D", "negativity_AB"}
        rho = density_from_pure(composite_from_amplitudes(c)) if need_rho else None
        if "negativities_A" in want:
            k = partial_kway_negativities(rho, "A")
            row.update(NG_A=k.NG, E2_A=k.E2, E3_A=k.E3, E4_A=k.E4, E0_A=k.E0)
            for t, v in constrained_3way_negativities(rho, "A").items():
                row[f"E3_A_{t}"] = v
        if "negativities_D" in want:
            k = partial_kway_negativities(rho, "D")
            row.update(NG_D=k.NG, E2_D=k.E2, E3_D=k.E3, E4_D=k.E4, E0_D=k.E0)
        if "negativity_AB" in want:
            row["NG_AB"] = global_negativity(rho, "AB")
        if "amplitudes" in want:
            for k in range(4):
                row[f"a{k}_re"] = float(c[k].real)
                row[f"a{k}_im"] = float(c[k].imag)
        if oracle is not None:
            row["oracle_dev"] = float(oracle[i])
        rows.append(row)
    return rows


def _chunk(args):
    req, taus = args
    return _rows_for(req, taus)


def run_sweep(req: SweepRequest, workers: int = 1) -> list[dict]:
    """One row per tau; columns not requested are None.

    Amplitude columns hold the amplitudes of |000>, |W1>, |W2>, |111>.
    """
    taus = req.taus
    if workers <= 1:
        return _rows_for(req, taus)
    chunks = np.array_split(taus, workers)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = pool.map(_chunk, [(req, c) for c in chunks])
    return [row for part in parts for row in part]


def _fmt(v) -> str:
    return "" if v is None else repr(float(v))


def to_csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row[c]) for c in columns])
    return buf.getvalue()


def metadata(req: SweepRequest, figure: int | None = None) -> dict:
    cfg = asdict(req.config)
    cfg["preparation"] = req.config.preparation.value
    return {
        "code": "ionw",
        "version": __version__,
        "figure": figure,
        "config": cfg,
        "tau_min": req.tau_min,
        "tau_max": req.tau_max,
        "steps": req.steps,
        "outputs": sorted(req.outputs),
        "columns": req.columns,
        "tolerances": TOLERANCES,
    }


def to_json(rows: list[dict], req: SweepRequest, figure: int | None = None) -> str:
    return json.dumps({"metadata": metadata(req, figure), "rows": rows}, indent=1, sort_keys=False) + "\n"


def headline_numbers() -> dict:
    t_min = w1_generation_time(1, 8.95e6, 0.01)
    w1, _ = w_states()
    return {
        "t_min_us": t_min * 1e6,
        "probabilities_tau_pi_8": probabilities(amplitudes_ground(1, 1, math.pi / 8)),
        "probabilities_tau_pi_4": probabilities(amplitudes_ground(1, 1, math.pi / 4)),
        "w1_negativity": global_negativity(np.outer(w1, w1), "A", dims=(2, 2, 2)),
        "w2_peak_probability": {n: w2_peak_probability(n) for n in range(1, 11)},
    }


def _print_headline(h: dict, out) -> None:
    print(f"W1 generation time (g=8.95e6 s^-1, eta=0.01, 1 photon): {h['t_min_us']:.3f} us", file=out)
    print("m=n=1, tau=pi/8  P0..P3:", " ".join(f"{p:.6f}" for p in h["probabilities_tau_pi_8"]), file=out)
    print("m=n=1, tau=pi/4  P0..P3:", " ".join(f"{p:.6f}" for p in h["probabilities_tau_pi_4"]), file=out)
    print(f"single-qubit negativity of |W1><W1|: {h['w1_negativity']:.10f}", file=out)
    print("peak |W2> probability, two phonons, n+1 photons:", file=out)
    for n, p in h["w2_peak_probability"].items():
        print(f"  n={n:2d}  {p:.6f}", file=out)


def _config_from_args(args) -> SimulationConfig:
    prep = Preparation(args.prep)
    default = 3 if prep is Preparation.GROUND else 0
    return SimulationConfig(
        prep,
        default if args.phonons is None else args.phonons,
        default if args.photons is None else args.photons,
        g=args.g,
        eta=args.eta,
    )


def _write(text: str, path: Path | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        path.write_text(text)


def _series_path(out: Path | None, label: str, many: bool) -> Path | None:
    if out is None or not many:
        return out
    return out.with_name(f"{out.stem}_{label}{out.suffix}")


def cmd_sweep(args) -> int:
    if args.figure is not None:
        reqs = figure_requests(args.figure, args.steps, args.tau_max)
    else:
        outputs = set(args.outputs.split(",")) if args.outputs else set(DEFAULT_OUTPUTS)
        reqs = [SweepRequest(_config_from_args(args), args.tau_min, args.tau_max, args.steps, outputs)]
    if args.with_oracle:
        reqs = [replace(r, outputs=r.outputs | {"oracle_check"}) for r in reqs]
    many = len(reqs) > 1
    for req in reqs:
        rows = run_sweep(req, args.workers)
        label = req.config.preparation.value
        if args.format == "json":
            text = to_json(rows, req, args.figure)
        else:
            text = to_csv(rows, req.columns)
            if many and args.out is None:
                text = f"# series: {label}\n" + text
        _write(text, _series_path(args.out, label, many))
    return 0


def cmd_headline(args) -> int:
    h = headline_numbers()
    if args.format == "json":
        h = dict(h, w2_peak_probability={str(k): v for k, v in h["w2_peak_probability"].items()})
        sys.stdout.write(json.dumps(h, indent=1) + "\n")
    else:
        _print_headline(h, sys.stdout)
    return 0


def cmd_verify(args) -> int:
    configs = default_configs() if args.prep is None else [_config_from_args(args)]
    taus = np.linspace(0, args.tau_max, args.steps)
    checks = verify(configs, taus)
    for c in checks:
        status = "PASS" if c.passed else "FAIL"
        print(f"{status}  {c.name:<16} max deviation {c.deviation:.3e}  (tol {c.tolerance:.0e})")
    failed = [c.name for c in checks if not c.passed]
    if failed:
        print("invariant breach: " + ", ".join(failed), file=sys.stderr)
        return 2
    return 0


def _add_config_flags(p, prep_default):
    p.add_argument("--prep", choices=[x.value for x in Preparation], default=prep_default)
    p.add_argument("--phonons", type=int, default=None, help="initial phonon count (default 3 ground, 0 excited)")
    p.add_argument("--photons", type=int, default=None, help="initial photon count (default 3 ground, 0 excited)")
    p.add_argument("--g", type=float, default=8.95e6, help="ion-cavity coupling, angular, s^-1")
    p.add_argument("--eta", type=float, default=0.01, help="Lamb-Dicke parameter")
    p.add_argument("--tau-max", type=float, default=DEFAULT_TAU_MAX)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ionw", description="Three trapped ions in a red-sideband cavity.")
    parser.add_argument("--version", action="version", version=f"ionw {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sw = sub.add_parser("sweep", help="tabulate probabilities and negativities over tau")
    _add_config_flags(sw, "ground")
    sw.add_argument("--tau-min", type=float, default=0.0)
    sw.add_argument("--steps", type=int, default=DEFAULT_STEPS)
    sw.add_argument("--figure", type=int, default=None, help="use the fixed recipe for figure 1-7")
    sw.add_argument("--outputs", default=None, help=f"comma-separated subset of {','.join(OUTPUTS)}")
    sw.add_argument("--with-oracle", action="store_true", help="add brute-force deviation column")
    sw.add_argument("--out", type=Path, default=None)
    sw.add_argument("--format", choices=("csv", "json"), default="csv")
    sw.add_argument("--workers", type=int, default=1)
    sw.set_defaults(func=cmd_sweep)

    hl = sub.add_parser("headline", help="print the headline numbers")
    hl.add_argument("--format", choices=("text", "json"), default="text")
    hl.set_defaults(func=cmd_headline)

    vf = sub.add_parser("verify", help="run the invariant suite")
    _add_config_flags(vf, None)
    vf.add_argument("--steps", type=int, default=120)
    vf.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
