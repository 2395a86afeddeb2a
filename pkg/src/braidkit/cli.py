"""Command-line interface: ``braidkit <command> [options]``.

Exit codes: 0 success, 1 usage error, 2 domain error (phase boundary, EP on
grid, singular Laplacian, unrepresentable couplings), 3 I/O error.

CSV layouts
-----------
phase-diagram     axis1, axis2, xi, boundary_flag
spectrum pbc      k, band, re_E, im_E
spectrum obc      index, re_E, im_E, center_of_mass, ipr, side
spectrum fl-sweep axis1, axis2, f_L
ep-scan           m, boundary, type, count, k_values
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Optional

import numpy as np

from . import __version__
from .braid import Axis, braid_report, braiding_index_roots, phase_diagram
from .circuit import (
    TABLE_I,
    CircuitParams,
    build_netlist,
    correspondence_error,
    disorder_sample,
    greens_reconstruct,
    stability_check,
    synthesize,
    table_i_params,
)
from .circuit.netlist import parse_si
from .eps import classify_transition, gap_zeros_real_k, table2_generate, table_to_csv
from .errors import DomainError
from .model import ModelSpec, load_model
from .spectra import left_fraction_grid, obc_states, pbc_strands, states_to_csv, strands_to_csv

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _axis(text: str) -> Axis:
    """``PATH:START:STOP:NUM``, e.g. ``c_ab_neg_m:-3:3:121``."""
    parts = text.rsplit(":", 3)
    if len(parts) != 4:
        raise argparse.ArgumentTypeError(f"axis must be PATH:START:STOP:NUM, got {text!r}")
    path, start, stop, num = parts
    try:
        axis = Axis(path, float(start), float(stop), int(num))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    return axis


def _add_model_options(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("model (JSON file, or inline unidirectional couplings)")
    g.add_argument("--model", help="model JSON file (required for H3)")
    g.add_argument("--m", type=int, default=3, help="left range m (default 3)")
    g.add_argument("--n", type=int, default=1, help="right range n (default 1)")
    g.add_argument("--cab0", type=float, default=1.0, help="intra-cell coupling c_ab0")
    g.add_argument("--cabm", type=float, default=0.0, help="coupling c_ab_neg_m")
    g.add_argument("--cban", type=float, default=0.0, help="coupling c_ba_n")
    g.add_argument("--ci", type=float, default=None, help="on-site potential (selects H2)")
    g.add_argument("--cz", type=float, default=0.0, help="sigma_z mass term")


def _model(args) -> ModelSpec:
    if args.model:
        return load_model(args.model)
    if args.ci is not None:
        return ModelSpec.h2(args.cab0, args.cabm, args.cban, args.m, args.n, c_i=args.ci, c_z=args.cz)
    return ModelSpec.h1(args.cab0, args.cabm, args.cban, args.m, args.n, c_z=args.cz)


def _emit(text: str, output: Optional[str]) -> None:
    if output:
        with open(output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _floatish(x):
    return repr(float(x))


def cmd_braid(args) -> int:
    report = braid_report(_model(args), args.samples)
    data = report.to_dict()
    if args.format == "json":
        _emit(json.dumps(data, indent=2) + "\n", args.output)
    else:
        lines = [
            f"xi = {data['xi_integral']}",
            f"xi_roots = {data['xi_roots']}",
            f"agreement = {str(data['agreement']).lower()}",
            f"braid_word = {data['braid_word'] or '(empty)'}",
            f"reduced_word = {data['reduced_word'] or '(empty)'}",
            f"knot = {data['knot_name']}",
        ]
        _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK


def cmd_phase_diagram(args) -> int:
    diagram = phase_diagram(_model(args), args.axis1, args.axis2, workers=args.workers)
    _emit(diagram.to_json() + "\n" if args.format == "json" else diagram.to_csv(), args.output)
    return EXIT_OK


def cmd_spectrum(args) -> int:
    model = _model(args)
    if args.mode == "pbc":
        strands = pbc_strands(model, args.K)
        if args.format == "json":
            text = json.dumps({"k": strands.k.tolist(),
                               "e1": [[z.real, z.imag] for z in strands.e1],
                               "e2": [[z.real, z.imag] for z in strands.e2]}) + "\n"
        else:
            text = strands_to_csv(strands)
    elif args.mode == "obc":
        if args.nodes % 2:
            raise UsageError("--nodes must be even (two nodes per cell)")
        states = obc_states(model, args.nodes // 2, "OBC")
        if args.format == "json":
            text = json.dumps([{"index": i, "re_E": s.energy.real, "im_E": s.energy.imag,
                                "center_of_mass": s.stats.center_of_mass, "ipr": s.stats.ipr,
                                "side": s.stats.side} for i, s in enumerate(states, start=1)]) + "\n"
        else:
            text = states_to_csv(states)
    else:
        if args.axis1 is None or args.axis2 is None:
            raise UsageError("fl-sweep needs --axis1 and --axis2")
        grid = left_fraction_grid(model, args.axis1, args.axis2, args.nodes)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["axis1", "axis2", "f_L"])
        for i, a in enumerate(args.axis1.values):
            for j, b in enumerate(args.axis2.values):
                writer.writerow([_floatish(a), _floatish(b), _floatish(grid[i, j])])
        text = buf.getvalue()
    _emit(text, args.output)
    return EXIT_OK


def cmd_ep_scan(args) -> int:
    if args.orders:
        _emit(table_to_csv(table2_generate(args.orders)), args.output)
        return EXIT_OK
    model = _model(args)
    ks = gap_zeros_real_k(model)
    data = {"k_values": [float(k) for k in ks], "count": len(ks)}
    if args.param:
        from .model import get_param
        value = float(np.real(get_param(model, args.param)))
        t = classify_transition(model, args.param, value, args.eps)
        data.update(type=t.transition_type, xi_before=t.xi_before, xi_after=t.xi_after,
                    consistent=t.consistent)
    _emit(json.dumps(data, indent=2) + "\n", args.output)
    return EXIT_OK


def _circuit_params(args) -> CircuitParams:
    if getattr(args, "params", None):
        with open(args.params, encoding="utf-8") as fh:
            params = CircuitParams.from_dict(json.load(fh))
    elif getattr(args, "phase", None):
        params = table_i_params(args.phase)
    else:
        params = synthesize(_model(args), parse_si(args.c0), args.freq)
    changes = {}
    if getattr(args, "r0", None) is not None:
        changes["r0"] = math.inf if args.r0.lower() in ("inf", "none") else parse_si(args.r0)
    if getattr(args, "esr", None) is not None:
        changes["esr"] = parse_si(args.esr)
    if getattr(args, "leak", None) is not None:
        changes["inic_leak"] = args.leak
    return params.with_(**changes) if changes else params


def cmd_circuit(args) -> int:
    action = args.action
    if action == "synth":
        params = synthesize(_model(args), parse_si(args.c0), args.freq)
        _emit(params.to_json() + "\n", args.output)
        return EXIT_OK
    params = _circuit_params(args)
    omega = params.omega_a
    if action == "export":
        _emit(build_netlist(params, args.cells, args.bc).to_spice(), args.output)
    elif action == "verify":
        ideal = params.with_(r0=math.inf, esr=0.0, inic_leak=0.0)
        err = correspondence_error(ideal, args.samples)
        green = greens_reconstruct(params if math.isfinite(params.r0) else params.with_(r0=20.0),
                                   omega, args.cells, args.bc)
        _emit(json.dumps({"correspondence_residual": err, "greens_error": green.error,
                          "f_r": omega / (2 * math.pi), "detuned": params.detuned}, indent=2) + "\n",
              args.output)
    elif action == "stability":
        rep = stability_check(params, omega, args.cells, args.bc)
        _emit(json.dumps({"min_imag": rep.min_imag, "stable": rep.stable,
                          "r0": params.to_dict()["r0"]}, indent=2) + "\n", args.output)
    elif action == "disorder":
        model = _model(args) if (args.model or args.cabm or args.cban) else params.to_model()
        base, on = braiding_index_roots(model)
        if on:
            raise DomainError("on phase boundary: the unperturbed model has no definite xi")
        changed = 0
        boundary_hits = 0
        for draw in range(args.draws):
            xi, hit = braiding_index_roots(disorder_sample(model, args.tolerance, args.seed + draw))
            changed += xi != base
            boundary_hits += hit
        _emit(json.dumps({"xi": base, "draws": args.draws, "tolerance_pct": args.tolerance,
                          "changed": changed, "boundary_hits": boundary_hits,
                          "stable": changed == 0}, indent=2) + "\n", args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="braidkit", description=__doc__.split("\n")[0],
                     epilog=__doc__.split("CSV layouts", 1)[1].join(["CSV layouts", ""]),
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("braid", help="braiding index, braid word and knot name")
    _add_model_options(p)
    p.add_argument("--samples", type=int, default=512)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--output")
    p.set_defaults(func=cmd_braid)

    p = sub.add_parser("phase-diagram", help="xi over a two-parameter grid (CSV: axis1,axis2,xi,boundary_flag)")
    _add_model_options(p)
    p.add_argument("--axis1", type=_axis, required=True, help="PATH:START:STOP:NUM")
    p.add_argument("--axis2", type=_axis, required=True, help="PATH:START:STOP:NUM")
    p.add_argument("--workers", type=int, default=None, help="threads (default: BRAIDKIT_THREADS or 1)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output")
    p.set_defaults(func=cmd_phase_diagram)

    p = sub.add_parser("spectrum", help="PBC strands, OBC eigenstates or an f_L sweep")
    p.add_argument("mode", choices=("pbc", "obc", "fl-sweep"))
    _add_model_options(p)
    p.add_argument("--K", type=int, default=256, help="momenta for pbc")
    p.add_argument("--nodes", type=int, default=40, help="chain nodes for obc / fl-sweep")
    p.add_argument("--axis1", type=_axis)
    p.add_argument("--axis2", type=_axis)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("ep-scan", help="exceptional-point table or a single boundary query")
    _add_model_options(p)
    p.add_argument("--orders", type=int, nargs="+", help="generate the EP table for these orders m")
    p.add_argument("--param", help="classify the transition across this parameter's current value")
    p.add_argument("--eps", type=float, default=1e-3)
    p.add_argument("--output")
    p.set_defaults(func=cmd_ep_scan)

    p = sub.add_parser("circuit", help="circuit synthesis, netlist export and checks")
    p.add_argument("action", choices=("synth", "export", "verify", "stability", "disorder"))
    _add_model_options(p)
    p.add_argument("--params", help="CircuitParams JSON file")
    p.add_argument("--phase", type=int, choices=sorted(TABLE_I), help="use printed component values")
    p.add_argument("--c0", default="4.7n", help="physical c_ab0 capacitance (SI suffix ok)")
    p.add_argument("--freq", default="auto", help="target frequency in Hz or 'auto' (200 kHz)")
    p.add_argument("--r0", help="grounding resistance in ohm or 'inf'")
    p.add_argument("--esr", help="inductor series resistance in ohm")
    p.add_argument("--leak", type=float, help="INIC reverse leakage fraction")
    p.add_argument("--cells", type=int, default=10)
    p.add_argument("--bc", choices=("PBC", "OBC", "pbc", "obc"), default="PBC")
    p.add_argument("--samples", type=int, default=256)
    p.add_argument("--tolerance", type=float, default=5.0, help="disorder tolerance in percent")
    p.add_argument("--draws", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output")
    p.set_defaults(func=cmd_circuit)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "freq", "auto") != "auto":
            args.freq = parse_si(args.freq)
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"braidkit: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"braidkit: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, KeyError) as exc:
        print(f"braidkit: invalid input: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
