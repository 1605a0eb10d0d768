"""Command-line front end.

Every subcommand computes in natural units (hbar = m = 1, lengths in units
of the lattice constant) and converts to SI only when writing output.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np
from scipy.constants import hbar, m_e

from . import entangle, manybody, moments, oracle, ruler
from .errors import QuantumLengthError

FORMAT_VERSION = 1


@dataclass
class OutputEnvelope:
    command: str
    parameters: dict
    units: dict
    rows: list[dict]
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> str:
        body = {
            "format_version": FORMAT_VERSION,
            "command": self.command,
            "parameters": self.parameters,
            "units": self.units,
            "rows": self.rows,
            "notes": self.notes,
        }
        return json.dumps(body, indent=2, allow_nan=True) + "\n"

    def to_csv(self) -> str:
        header: list[str] = []
        for row in self.rows:
            header.extend(k for k in row if k not in header)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for row in self.rows:
            w.writerow([_csv_cell(row.get(k)) for k in header])
        return buf.getvalue()


def _csv_cell(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".9g")
    return v


# column name -> physical kind, for SI conversion
LENGTH, ENERGY = "length", "energy"


@dataclass
class Result:
    rows: list[dict]
    kinds: dict[str, str] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)


def _to_si(result: Result, a0_m: float) -> None:
    energy_unit = hbar ** 2 / (m_e * a0_m ** 2)
    scale = {LENGTH: a0_m, ENERGY: energy_unit}
    for row in result.rows:
        for k, kind in result.kinds.items():
            v = row.get(k)
            if isinstance(v, float):
                row[k] = v * scale[kind]
            elif isinstance(v, list):
                row[k] = [x * scale[kind] for x in v]


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def _parse_segments(text: str) -> list[tuple[float, float]]:
    segs = []
    for part in text.split(","):
        lo, hi = part.split(":")
        segs.append((float(lo), float(hi)))
    return segs


def cmd_length(args) -> Result:
    method = args.method
    rows = []
    if args.system == "box":
        for n in args.n:
            d = moments.BoxEigenstate(args.width, n)
            l2 = moments.length_L2(d, method)
            l4 = moments.length_L4(d, method)
            rows.append({"system": "box", "n": n, "width": args.width, "L2": l2.L2, "L4": l4.L4,
                         "L2_over_a": l2.L2 / args.width, "L4_over_a": l4.L4 / args.width})
        notes = list(l4.notes)
    elif args.segments:
        segs = _parse_segments(args.segments)
        per = moments.segment_lengths(segs)
        for (lo, hi), L in zip(sorted(segs), per):
            rows.append({"system": "rod", "segment_lo": lo, "segment_hi": hi, "L2": L})
        rows.append({"system": "rod", "segment_lo": None, "segment_hi": None,
                     "L2": moments.nonuniform_rod_length(segs)})
        notes = ["last row is the whole rod; earlier rows are its occupied pieces"]
    else:
        d = moments.UniformRod(0.0, args.width)
        rows.append({"system": "rod", "n": None, "width": args.width,
                     "L2": moments.length_L2(d, method).L2, "L4": moments.length_L4(d, method).L4})
        notes = []
    kinds = {k: LENGTH for k in ("width", "L2", "L4", "segment_lo", "segment_hi")}
    return Result(rows, kinds, notes)


def cmd_density(args) -> Result:
    grid = args.grid or 201
    rows = []
    notes = ["x_over_a and rho_times_a are dimensionless and never converted"]
    if args.kind == "mixture":
        a = args.width
        if args.spacing is None:
            L1 = ruler.self_consistent_segment_length(a, args.segments).L1_numeric
        else:
            L1 = args.spacing
        prof = ruler.entangled_segment_density(args.segments, a, L1, grid)
        total = prof.grid[-1] - prof.grid[0]
        for x, r in zip(prof.grid, prof.values):
            rows.append({"segments": args.segments, "spacing_over_a": L1 / a,
                         "x_over_a": float(x / a), "rho_times_a": float(r * a)})
        notes.append(f"support spans {total / a:.9g} well widths")
        return Result(rows, {}, notes)
    for n_max in args.n_max:
        if args.kind == "fermion":
            plan = manybody.FillingPlan.paired(manybody.Statistics.FERMION, 2 * n_max)
        else:
            plan = manybody.FillingPlan.boson_ground(2 * n_max)
        prof = manybody.electron_density(args.width, plan, grid)
        for x, r in zip(prof.grid, prof.values):
            rows.append({"n_max": n_max, "particles": plan.particle_count,
                         "x_over_a": float(x / args.width), "rho_times_a": float(r * args.width)})
    return Result(rows, {}, notes)


def cmd_fill(args) -> Result:
    rows = []
    for N in range(args.n_min, args.n_max + 1, args.step):
        if args.statistics == "fermion":
            L = manybody.fermion_length(args.width, N)
        else:
            L = manybody.boson_length(args.width, N)
        rows.append({"N": N, "statistics": args.statistics, "width": args.width, "L": L,
                     "L_over_a": L / args.width,
                     "classical_over_a": math.sqrt(1.0 - 2.0 / N) if N >= 2 else 0.0})
    return Result(rows, {"width": LENGTH, "L": LENGTH})


def cmd_ruler(args) -> Result:
    notes = ["energies are in units of hbar^2/(m a0^2)"]
    kinds = {"L_R": LENGTH, "per_segment": LENGTH, "monolithic": LENGTH,
             "delta_L": LENGTH, "delta_L_sweep": LENGTH,
             "E_G": ENERGY, "E_G_prime": ENERGY, "work": ENERGY}
    # ruler energies come in h = m = 1 units; E[hbar units] = 4 pi^2 E[h units]
    h_to_hbar = 4.0 * math.pi ** 2
    if args.optimal:
        opt = ruler.optimal_ruling(args.n, args.a0)
        rows = [{"N": opt.N, "R_closed_form": opt.R_closed_form, "R_star": opt.R_star,
                 "delta_L": opt.delta_L, "R_sweep": opt.R_sweep,
                 "delta_L_sweep": opt.delta_L_sweep}]
        return Result(rows, kinds, notes)
    if args.sweep:
        rows = [{"N": args.n, "R": R, "residual": ruler.precision_condition_residual(args.n, R)}
                for R in ruler.admissible_rulings(args.n)]
        return Result(rows, kinds, notes)
    spec = ruler.RulerSpec(args.a0, args.n, args.r, args.statistics)
    seg = ruler.segment_length(spec)
    en = ruler.cutting_energy(spec)
    rows = [{"N": args.n, "R": args.r, "statistics": args.statistics,
             "per_segment": seg.per_segment, "L_R": seg.total, "monolithic": seg.monolithic,
             "E_G": en.E_G * h_to_hbar, "E_G_prime": en.E_G_prime * h_to_hbar,
             "work": en.work * h_to_hbar, "energy_ratio": en.ratio}]
    return Result(rows, kinds, notes)


def cmd_parse_check(args) -> Result:
    rows, notes = [], []
    for N in args.n:
        rep = ruler.self_consistent_segment_length(args.width, N)
        rows.append({"N": N, "a": rep.a, "L1_solved": rep.L1_solved,
                     "L1_numeric": rep.L1_numeric, "L1_alternate_coefficient": rep.L1_alternate_coefficient,
                     "coefficient_discrepancy": rep.coefficient_discrepancy_flag,
                     "N_times_L1": N * rep.L1_numeric, "L_direct": rep.L_direct,
                     "iterations": rep.iterations})
        if rep.coefficient_discrepancy_flag and not notes:
            notes.append(
                f"the alternate constant-term coefficient 1/3 - 1/(2 pi^2) gives L1/a = {rep.L1_alternate_coefficient / rep.a:.6f}, "
                f"re-derived value is {rep.L1_solved / rep.a:.6f}; flagged as discrepant"
            )
    kinds = {k: LENGTH for k in ("a", "L1_solved", "L1_numeric", "L1_alternate_coefficient",
                                 "N_times_L1", "L_direct")}
    return Result(rows, kinds, notes)


def _report_rows(label, rep: entangle.ScenarioReport) -> list[dict]:
    rows = [{"scenario": label, "stage": "initial", "step": 0, "direction": None,
             "donor_level": None, "acceptor_level": None, "photon_energy": None,
             "object_electrons": None, "ruler_electrons": None,
             "classical_ratio": rep.classical_ratio, "quantum_ratio": rep.initial_quantum_ratio,
             "total_energy": rep.initial_energy}]
    for i, t in enumerate(rep.log, 1):
        rows.append({"scenario": label, "stage": "transfer", "step": i, "direction": t.direction,
                     "donor_level": t.donor_level, "acceptor_level": t.acceptor_level,
                     "photon_energy": t.photon_energy})
    no, nr = rep.final_counts
    rows.append({"scenario": label, "stage": "final", "step": rep.transfers,
                 "object_electrons": no, "ruler_electrons": nr,
                 "classical_ratio": rep.classical_ratio, "quantum_ratio": rep.quantum_ratio,
                 "total_energy": rep.final_energy})
    return rows


def cmd_entangle(args) -> Result:
    notes = ["quantum_ratio is empty (null) when a box holds no electrons: not defined",
             "energies are in units of hbar^2/(m a0^2)"]
    kinds = {"photon_energy": ENERGY, "total_energy": ENERGY}
    rows = []
    if args.table:
        for col in entangle.table_scenarios(epsilon=args.epsilon):
            rows.extend(_report_rows(col.label, col.report))
        return Result(rows, kinds, notes)
    obj = entangle.MaterialBox.ground_state(args.object_lattice, 2 * args.object_cells)
    rul = entangle.MaterialBox.ground_state(args.ruler_lattice, 2 * args.ruler_cells)
    rep = entangle.relax(entangle.MeasurementScenario(obj, rul, args.policy))
    rows.extend(_report_rows("custom", rep))
    return Result(rows, kinds, notes)


def cmd_oracle(args) -> Result:
    if args.kind == "spread":
        grid = args.grid or 256
        v = oracle.brute_force_spread(args.levels, args.width, args.statistics, grid,
                                      spin_orbitals=args.spin_orbitals)
        rows = [{"levels": " ".join(map(str, args.levels)), "statistics": args.statistics,
                 "grid": grid, "spread": v}]
        return Result(rows, {}, ["spread is a squared length in units of a0^2; not converted"])
    if args.kind == "box-x2":
        a, n = args.width, args.n
        spec = oracle.QuadratureSpec(0.0, a, 1e-12)
        v = oracle.integrate(lambda x: (2.0 / a) * x * x * np.sin(n * math.pi * x / a) ** 2, spec)
        return Result([{"n": n, "width": a, "x2": v}], {}, ["x2 is in units of a0^2; not converted"])
    if args.kind == "zeta":
        lo, hi = oracle.zeta2_tail_bounds(args.m)
        rows = [{"m": args.m, "partial_sum": oracle.partial_zeta2(args.m),
                 "tail_lower": lo, "tail_upper": hi}]
        return Result(rows)
    # sweep
    cands = ruler.admissible_rulings(args.n)
    R = oracle.find_sign_change(lambda r: ruler.precision_condition_residual(args.n, r),
                                cands[0], cands[-1], cands)
    return Result([{"N": args.n, "R": R,
                    "residual": ruler.precision_condition_residual(args.n, R)}])


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _positive_float(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--grid", type=int, default=None, help="grid points or grid size")
    common.add_argument("--units", choices=("natural", "si"), default="natural")
    common.add_argument("--a0-meters", type=_positive_float, default=1e-10,
                        help="lattice constant in meters for --units si")
    common.add_argument("--policy", choices=("none", "pairwise", "single"), default="pairwise")
    common.add_argument("--out", default=None, help="write output here instead of stdout")

    parser = argparse.ArgumentParser(prog="qlength", description="Quantum lengths of confined particles.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("length", parents=[common], help="L2 and L4 of a box eigenstate or rod")
    p.add_argument("--system", choices=("box", "rod"), default="box")
    p.add_argument("--n", type=int, nargs="+", default=[1])
    p.add_argument("--width", type=_positive_float, default=1.0)
    p.add_argument("--segments", default=None, help="rod pieces as lo:hi,lo:hi")
    p.add_argument("--method", choices=("analytic", "quadrature"), default="analytic")
    p.set_defaults(func=cmd_length)

    p = sub.add_parser("density", parents=[common], help="one-particle density profiles")
    p.add_argument("--kind", choices=("fermion", "boson", "mixture"), default="fermion")
    p.add_argument("--n-max", type=int, nargs="+", default=[1, 3, 9, 27, 200])
    p.add_argument("--width", type=_positive_float, default=1.0)
    p.add_argument("--segments", type=int, default=2, help="wells in the mixture")
    p.add_argument("--spacing", type=_positive_float, default=None,
                   help="well spacing; default is the self-consistent value")
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("fill", parents=[common], help="length against particle count")
    p.add_argument("--statistics", choices=("fermion", "boson"), default="fermion")
    p.add_argument("--n-min", type=int, default=2)
    p.add_argument("--n-max", type=int, default=40)
    p.add_argument("--step", type=int, default=2)
    p.add_argument("--width", type=_positive_float, default=1.0)
    p.set_defaults(func=cmd_fill)

    p = sub.add_parser("ruler", parents=[common], help="segmented ruler lengths and energies")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--a0", type=_positive_float, default=1.0)
    p.add_argument("--statistics", choices=("fermion", "boson"), default="fermion")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--optimal", action="store_true")
    mode.add_argument("--sweep", action="store_true")
    p.set_defaults(func=cmd_ruler)

    p = sub.add_parser("parse-check", parents=[common], help="self-consistent stacked segment length")
    p.add_argument("--n", type=int, nargs="+", default=[2, 3, 5, 10])
    p.add_argument("--width", type=_positive_float, default=1.0)
    p.set_defaults(func=cmd_parse_check)

    p = sub.add_parser("entangle", parents=[common], help="object and ruler electron transfer")
    p.add_argument("--object-cells", type=int, default=5)
    p.add_argument("--object-lattice", type=_positive_float, default=1.2000012)
    p.add_argument("--ruler-cells", type=int, default=2)
    p.add_argument("--ruler-lattice", type=_positive_float, default=1.0)
    p.add_argument("--table", action="store_true", help="all four reference scenarios")
    p.add_argument("--epsilon", type=float, default=1e-6)
    p.set_defaults(func=cmd_entangle)

    p = sub.add_parser("oracle", parents=[common], help="run a brute-force verifier")
    p.add_argument("--kind", choices=("spread", "box-x2", "zeta", "sweep"), required=True)
    p.add_argument("--levels", type=int, nargs="+", default=[1, 2])
    p.add_argument("--statistics", choices=("fermion", "boson"), default="fermion")
    p.add_argument("--spin-orbitals", action="store_true")
    p.add_argument("--width", type=_positive_float, default=1.0)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--m", type=int, default=5)
    p.set_defaults(func=cmd_oracle)
    return parser


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    params = {k: v for k, v in vars(args).items() if k != "func"}
    try:
        result = args.func(args)
    except QuantumLengthError as exc:
        stderr.write(f"error: {exc.code}: {exc}\n")
        return 1
    except ValueError as exc:
        stderr.write(f"error: invalid_value: {exc}\n")
        return 1

    units = {"system": args.units}
    if args.units == "si":
        _to_si(result, args.a0_meters)
        units.update({"a0_meters": args.a0_meters, "length": "m", "energy": "J"})
    else:
        units.update({"length": "a0", "energy": "hbar^2/(m a0^2)"})

    env = OutputEnvelope(args.command, params, units, result.rows, result.notes)
    text = env.to_json() if args.format == "json" else env.to_csv()
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return 0


def main(argv=None) -> int:
    return run(argv)
