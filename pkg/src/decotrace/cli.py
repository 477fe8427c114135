"""``decotrace`` command-line interface.

Exit codes: 0 on success (for ``threshold``: the scenario survives), 2 when
``threshold`` finds that entanglement does not survive, 1 on any error,
including usage errors.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import decoherence as deco
from . import metrics
from ._parallel import ordered_map
from .errors import ConfigurationError, DecotraceError
from .report import format_number, to_csv, to_json
from .scenario import ELECTRON_VOLT, SWEEP_AXES, TORR, Scenario, sweep, threshold_check
from .scenario_file import parse_scenario_file
from .states import BoundState, DoubleGaussian, MomentumGrid, tabulate

log = logging.getLogger("decotrace")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_DECOHERED = 2

FORMATS = ("csv", "json")
MAX_JOINT_DIM = 48 * 48

# unit name -> factor to SI, per sweep axis
UNITS = {
    "pressure": {"pa": 1.0, "torr": TORR},
    "length": {"m": 1.0, "cm": 1e-2},
    "energy": {"ev": ELECTRON_VOLT, "j": 1.0},
    "sigma_p": {"per_m": 1.0, "per_um": 1e6},
}
DEFAULT_UNITS = {"pressure": "pa", "length": "m", "energy": "ev", "sigma_p": "per_m"}


@dataclass
class RunConfig:
    command: str
    scenario: Scenario
    output: Optional[Path] = None
    fmt: str = "csv"
    n_points: Optional[int] = None
    extent: float = 5.0
    axis: Optional[str] = None
    values: tuple = ()
    n_list: tuple = (0.0,)
    mode: str = "gaussian"
    events: Optional[float] = None
    nodes: int = deco.QUADRATURE_NODES
    modes: int = 32
    max_joint_dim: int = MAX_JOINT_DIM
    diag_out: Optional[Path] = None
    compare_out: Optional[Path] = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.fmt not in FORMATS:
            raise ConfigurationError(f"output format must be one of {FORMATS}, got {self.fmt!r}")
        if not self.extent > 0:
            raise ConfigurationError(f"extent must be positive, got {self.extent}")


def _emit(cfg, text):
    if cfg.output is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        Path(cfg.output).write_text(text, encoding="utf-8")


def _grid(cfg, default_points):
    n = cfg.n_points or default_points
    half = cfg.extent * max(cfg.scenario.sigma_p, cfg.scenario.sigma_c)
    return MomentumGrid.symmetric(half, n)


VERDICT_COLUMNS = ("N", "sigma_q2", "lhs", "rhs", "survives", "margin")


def run_threshold(cfg: RunConfig) -> int:
    """One-row verdict report; 0 if entanglement survives, 2 if not."""
    s = cfg.scenario
    v = threshold_check(s)
    if s.interaction_number is not None and not math.isclose(s.N, s.derived_N, rel_tol=0.05):
        log.info("N override %.6g differs from ideal-gas estimate %.6g", s.N, s.derived_N)
    row = (s.label, v.N, v.sigma_q2, v.lhs, v.rhs, v.survives, v.margin, v.reason or "")
    header = ("label",) + VERDICT_COLUMNS + ("reason",)
    if cfg.fmt == "json":
        _emit(cfg, to_json(dict(zip(header, row))))
    else:
        _emit(cfg, to_csv(header, [row]))
    return EXIT_OK if v.survives else EXIT_DECOHERED


def run_sweep(cfg: RunConfig) -> int:
    if not cfg.values:
        raise ConfigurationError("sweep needs at least one value")
    result = sweep(cfg.scenario, cfg.axis, cfg.values)
    header = ("axis_value", "N", "lhs", "rhs", "survives", "margin")
    shown = cfg.extra.get("shown_values", result.values)
    rows = [(x, v.N, v.lhs, v.rhs, v.survives, v.margin) for x, v in zip(shown, result)]
    crossing = result.crossing
    if cfg.fmt == "json":
        _emit(cfg, to_json({
            "axis": cfg.axis, "unit": cfg.extra.get("unit"),
            "rows": [dict(zip(header, r)) for r in rows],
            "crossing_index": crossing, "crossings": result.crossings,
        }))
    else:
        note = "none" if crossing is None else str(crossing)
        _emit(cfg, to_csv(header, rows, [f"crossing_index={note}"]))
    return EXIT_OK


def evolve_table(scenario: Scenario, grid: MomentumGrid, n_list, max_joint_dim=MAX_JOINT_DIM):
    """Negativity and purity of the mixed-branch state for each N in ``n_list``.

    Returns ``(rows, final_state, schmidt_number_at_zero)`` where each row is
    ``(N, negativity, purity, schmidt_number_at_N0)``.
    """
    dim = grid.n_points ** 2
    if dim > max_joint_dim:
        raise ConfigurationError(
            f"joint dimension {dim} exceeds cap {max_joint_dim}; use a smaller --grid "
            f"(at most {math.isqrt(max_joint_dim)} points)")
    if any(not n >= 0 for n in n_list):
        raise ConfigurationError("every N in the list must be >= 0")
    amp = tabulate(DoubleGaussian(scenario.sigma_p, scenario.sigma_c), grid, grid)
    k0 = metrics.schmidt_number(metrics.schmidt_decompose(amp))
    sigma_q = math.sqrt(scenario.sigma_q2)
    coherent = deco.apply_kernel(amp, deco.kernel_gaussian(sigma_q, 0.0, grid))

    def point(n):
        decohered = deco.apply_kernel(amp, deco.kernel_gaussian(sigma_q, n, grid))
        rho = deco.mix_branches(coherent, decohered, n)
        return rho, metrics.negativity(rho), metrics.purity(rho)

    results = ordered_map(point, n_list)
    rows = [(n, neg, pur, k0) for n, (_, neg, pur) in zip(n_list, results)]
    final = results[-1][0] if results else coherent
    return rows, final, k0


def run_evolve(cfg: RunConfig) -> int:
    grid = _grid(cfg, 48)
    rows, final, _ = evolve_table(cfg.scenario, grid, cfg.n_list, cfg.max_joint_dim)
    header = ("N", "negativity", "purity", "schmidt_number_at_N0")
    if cfg.fmt == "json":
        _emit(cfg, to_json({"grid_points": grid.n_points, "k_max": grid.k_max,
                            "rows": [dict(zip(header, r)) for r in rows]}))
    else:
        _emit(cfg, to_csv(header, rows))
    if cfg.diag_out is not None:
        sig = final.reduced_signal().diagonal().real / grid.spacing
        idl = final.reduced_idler().diagonal().real / grid.spacing
        text = to_csv(("k", "signal_density", "idler_density"),
                      zip(grid.points, sig, idl), [f"N={format_number(cfg.n_list[-1])}"])
        Path(cfg.diag_out).write_text(text, encoding="utf-8")
    return EXIT_OK


def run_schmidt(cfg: RunConfig) -> int:
    s = cfg.scenario
    grid = _grid(cfg, 128)
    amp = tabulate(DoubleGaussian(s.sigma_p, s.sigma_c), grid, grid)
    spectrum = metrics.schmidt_decompose(amp)
    k = metrics.schmidt_number(spectrum)
    ratio = s.sigma_p / s.sigma_c
    analytic = 0.5 * (ratio + 1.0 / ratio)
    summary = {
        "schmidt_number": k,
        "schmidt_number_analytic": analytic,
        "conditional_width": metrics.conditional_width(amp),
        "pump_width": metrics.pump_width(amp),
        "pure_state_negativity": metrics.pure_state_negativity(spectrum),
        "grid_points": grid.n_points,
    }
    shown = spectrum.coefficients[:cfg.modes]
    if cfg.fmt == "json":
        summary["coefficients"] = shown
        _emit(cfg, to_json(summary))
    else:
        rows = [(n, c, c * c) for n, c in enumerate(shown)]
        notes = [f"{key}={format_number(value)}" for key, value in summary.items()]
        _emit(cfg, to_csv(("n", "coefficient", "weight"), rows, notes))
    return EXIT_OK


def run_kernel(cfg: RunConfig) -> int:
    s = cfg.scenario
    grid = _grid(cfg, 64)
    sigma_q = math.sqrt(s.sigma_q2)
    comparison = None
    if cfg.mode == "gaussian":
        events = s.N if cfg.events is None else cfg.events
        kernel = deco.kernel_gaussian(sigma_q, events, grid)
    elif cfg.mode == "quadrature":
        params = deco.MatrixElementParams(BoundState(sigma_q))
        kernel = deco.kernel_quadrature(params, grid, cfg.nodes)
        if cfg.events is not None and cfg.events != 1:
            kernel = deco.multi_event_kernel(kernel, cfg.events)
        comparison = deco.closed_form_comparison(params, grid, cfg.nodes)
    else:
        raise ConfigurationError(f"unknown kernel mode {cfg.mode!r}")

    k = grid.points
    v = kernel.values
    if cfg.fmt == "json":
        payload = {"mode": cfg.mode, "event_number": kernel.event_number,
                   "k": k, "real": v.real, "imag": v.imag}
        if comparison is not None:
            payload["closed_form_comparison"] = comparison
        _emit(cfg, to_json(payload))
    else:
        rows = ((k[j], k[l], v[j, l].real, v[j, l].imag)
                for j in range(k.size) for l in range(k.size))
        _emit(cfg, to_csv(("k_i", "k_i_prime", "real", "imag"), rows,
                          [f"mode={cfg.mode}", f"event_number={format_number(kernel.event_number)}"]))
    if comparison is not None and cfg.compare_out is not None:
        header = tuple(comparison[0])
        Path(cfg.compare_out).write_text(
            to_csv(header, [tuple(r.values()) for r in comparison]), encoding="utf-8")
    return EXIT_OK


COMMANDS = {
    "threshold": run_threshold,
    "sweep": run_sweep,
    "evolve": run_evolve,
    "schmidt": run_schmidt,
    "kernel": run_kernel,
}


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with 1 so that 2 stays reserved for 'decohered'."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _float_list(text):
    try:
        values = tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")
    return values


def build_parser():
    parser = _Parser(prog="decotrace",
                     description="Entanglement survival of biphotons under ionizing decoherence.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, grid_default=None):
        p.add_argument("-s", "--scenario", required=True,
                       help="scenario file, or @name for a bundled one")
        p.add_argument("-o", "--output", type=Path, help="output file (default: stdout)")
        p.add_argument("--format", dest="fmt", choices=FORMATS, default="csv")
        if grid_default is not None:
            p.add_argument("--grid", dest="n_points", type=int, default=grid_default,
                           help=f"points per axis (default {grid_default})")
            p.add_argument("--extent", type=float, default=5.0,
                           help="grid half-width in units of max(sigma_p, sigma_c)")
        return p

    common(sub.add_parser("threshold", help="evaluate the survival threshold"))

    p = common(sub.add_parser("sweep", help="threshold along one parameter"))
    p.add_argument("--axis", required=True, choices=SWEEP_AXES)
    p.add_argument("--values", required=True, type=_float_list)
    p.add_argument("--unit", help="unit of --values; " + "; ".join(
        f"{a}: {'|'.join(u)}" for a, u in UNITS.items()))

    p = common(sub.add_parser("evolve", help="negativity and purity versus N"), 48)
    p.add_argument("--n-list", dest="n_list", type=_float_list, default=(0.0,))
    p.add_argument("--max-dim", dest="max_joint_dim", type=int, default=MAX_JOINT_DIM)
    p.add_argument("--diag-out", type=Path, help="write the final reduced diagonals here")

    p = common(sub.add_parser("schmidt", help="Schmidt spectrum of the pure state"), 128)
    p.add_argument("--modes", type=int, default=32, help="coefficients to list")

    p = common(sub.add_parser("kernel", help="decoherence kernel matrix"), 64)
    p.add_argument("--mode", choices=("quadrature", "gaussian"), default="gaussian")
    p.add_argument("--events", type=float,
                   help="event number (default: scenario N for gaussian, 1 for quadrature)")
    p.add_argument("--nodes", type=int, default=deco.QUADRATURE_NODES)
    p.add_argument("--compare-out", type=Path,
                   help="quadrature mode: write the closed-form comparison here")
    return parser


def config_from_args(args) -> RunConfig:
    scenario = parse_scenario_file(args.scenario)
    kw = dict(command=args.command, scenario=scenario, output=args.output, fmt=args.fmt)
    for name in ("n_points", "extent", "n_list", "max_joint_dim", "diag_out", "modes",
                 "mode", "events", "nodes", "compare_out", "axis"):
        if hasattr(args, name):
            kw[name] = getattr(args, name)
    if args.command == "sweep":
        unit = (args.unit or DEFAULT_UNITS[args.axis]).lower()
        factors = UNITS[args.axis]
        if unit not in factors:
            raise ConfigurationError(
                f"unit {unit!r} not valid for axis {args.axis}; choose {'|'.join(factors)}")
        if not args.values:
            raise ConfigurationError("--values must list at least one number")
        kw["values"] = tuple(v * factors[unit] for v in args.values)
        kw["extra"] = {"shown_values": args.values, "unit": unit}
    return RunConfig(**kw)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        cfg = config_from_args(args)
        return COMMANDS[cfg.command](cfg)
    except (DecotraceError, OSError) as exc:
        print(f"decotrace: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
