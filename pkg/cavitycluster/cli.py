#
# Copyright (c) 2024 The cavity-cluster contributors
#
# This program and the accompanying materials are made available under the
# terms of the Eclipse Public License 2.0 which is available at
# http://www.eclipse.org/legal/epl-2.0, or the Apache License, Version 2.0
# which is available at https://www.apache.org/licenses/LICENSE-2.0.
#
# SPDX-License-Identifier: EPL-2.0 OR Apache-2.0
#
"""
The ``cavity-cluster`` command line.

Every subcommand writes one report (JSON, or CSV where the report is a table) to ``--output`` or standard
output. Exit codes: 0 on success, 1 when a verification fails, 2 on usage or input errors.
"""
import argparse
import logging
import math
import os
import sys
from typing import Any, List, Optional, Sequence

import numpy as np

from .cavitymodel import ModelParams, compare_full_and_effective
from .chaingate import (
    GATE_PAIRING, MEDIATOR_INPUTS, canonical_gate, conditional_map, gate_distance, gate_report, normalized_map, t0,
)
from .clusterfab import fabrication_options, fidelity_sweep, run_fabrication
from .codec import dumps, to_csv
from .config import Config
from .enums import EstimateMode, MediatorPolicy
from .errors import CavityError
from .lattice import LatticeLayout
from .log import init_logger
from .mbqc import grover_two_qubit, single_qubit_prep_demo
from .numkernel import fidelity
from .recycling import (
    IdealGateSource, RecyclingProgram, RecyclingRound, circuit_oracle, mediated_gate_source, run_recycling,
)
from .resources import estimate_shor15, general_grid_for_width, resource_report, to_nanoseconds

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

VERIFY_TOL = 1e-8
SWEEP_HEADER = ("delta_over_A", "fidelity_mean", "fidelity_postselected", "noise_rate", "seed")
UNITS = {"A": None, "ns-toroid": "toroid", "ns-stripline": "stripline"}

class UsageError(CavityError):
    "The command line asks for something the subcommand cannot produce."

def _time(args, t: float) -> float:
    technology = UNITS[args.units]
    return t if technology is None else to_nanoseconds(t, technology)

def _emit(args, report: Any, header: Optional[Sequence[str]] = None, rows: Optional[List[Sequence]] = None):
    fmt = args.format or ("csv" if header is not None and args.command == "sweep-fidelity" else "json")
    if fmt == "csv":
        if header is None:
            raise UsageError(f"{args.command} has no CSV form, use --format json")
        text = to_csv(header, rows)
    else:
        text = dumps(report)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        logger.info("report written to %s", args.output)
    else:
        sys.stdout.write(text)

def _rng(args, config: Config) -> np.random.Generator:
    seed = args.seed if args.seed is not None else int(config.get("mbqc/seed", 0))
    return np.random.default_rng(seed)

def _threads(args, config: Config) -> int:
    threads = args.threads if args.threads is not None else int(config.get("runtime/threads", 0))
    return threads if threads > 0 else (os.cpu_count() or 1)

def _parse_grid(text: str):
    try:
        rows, cols = (int(p) for p in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must read RxC, got {text!r}") from None
    return rows, cols

def cmd_gate_verify(args, config: Config) -> int:
    A = args.A if args.A is not None else float(config.get("model/A", 1.0))
    outcomes = [args.outcome] if args.outcome is not None else [0, 1]
    duration = args.time * t0(A)
    if args.time == 1.0:
        entries = [e for e in gate_report(A, args.mediator_input, _threads(args, config)) if e["outcome"] in outcomes]
    else:
        entries = []
        for o in outcomes:
            M, probs = conditional_map(A, o, duration, args.mediator_input)
            distance = gate_distance(canonical_gate(o), normalized_map(M))
            entries.append({"outcome": o, "mediator_input": args.mediator_input, "available": True,
                            "gate_matrix": normalized_map(M), "distance_to_canonical": distance,
                            "branch_probabilities": probs, "pairing": GATE_PAIRING[o]})
    ok = all(e["available"] and e["distance_to_canonical"] < VERIFY_TOL for e in entries)
    for e in entries:
        if e["available"]:
            logger.info("outcome %d: %s, distance %.3e", e["outcome"], e["pairing"], e["distance_to_canonical"])
    report = {"A": A, "time": _time(args, duration), "units": args.units, "verified": ok, "gates": entries}
    rows = [(e["outcome"], e.get("pairing", ""), e.get("distance_to_canonical", ""), e["available"]) for e in entries]
    _emit(args, report, ("outcome", "pairing", "distance_to_canonical", "available"), rows)
    return EXIT_OK if ok else EXIT_FAILED

def cmd_sweep_fidelity(args, config: Config) -> int:
    rows, cols = args.grid
    layout = LatticeLayout.from_shape(rows, cols)
    if not layout.chains():
        raise UsageError(f"a {rows}x{cols} grid hosts no logical edge")
    if args.points < 1 or not 0 < args.delta_min <= args.delta_max:
        raise UsageError("the detuning range must be positive and nonempty")
    deltas = np.linspace(args.delta_min, args.delta_max, args.points).tolist()
    decays = args.decay if args.decay else [float(config.get("fabrication/decay", 0.0))]
    seed = args.seed if args.seed is not None else int(config.get("mbqc/seed", 0))
    options = fabrication_options(config)
    table = fidelity_sweep(layout, deltas, decays, A=float(config.get("model/A", 1.0)), seed=seed,
                           threads=_threads(args, config), dt=options["dt"],
                           frame_correction=options["frame_correction"],
                           stark_compensation=options["stark_compensation"],
                           decay_during_idle=options["decay_during_idle"],
                           checkpoint_every=options["checkpoint_every"], tolerance=options["tolerance"],
                           postselect=args.postselect or options["mediator_policy"] is MediatorPolicy.POST_SELECT_ZERO)
    report = [dict(zip(SWEEP_HEADER, row)) for row in table]
    _emit(args, report, SWEEP_HEADER, table)
    return EXIT_OK

def _fabricated(args, config: Config):
    options = fabrication_options(config)
    if args.delta_off is not None:
        options["delta_off"] = args.delta_off
    if args.decay is not None:
        options["noise"] = args.decay
    options["mediator_policy"] = MediatorPolicy.MEASURE_AND_RESET
    return run_fabrication(LatticeLayout.from_shape(3, 3), None, **options)

def cmd_mbqc(args, config: Config) -> int:
    ideal = args.source == "ideal"
    if args.demo == "prep":
        source = None if ideal else _fabricated(args, config)
        result = single_qubit_prep_demo(args.theta, args.phi, source, rng=_rng(args, config))
        report = {"demo": "prep", "source": args.source, "theta": args.theta, "phi": args.phi,
                  "fidelity": result.fidelity, "outcomes": result.outcomes}
        ok = not ideal or result.fidelity > 1 - VERIFY_TOL
    elif args.demo == "grover":
        source = None if ideal else _fabricated(args, config)
        result = grover_two_qubit(args.marked, source)
        report = {"demo": "grover", "source": args.source, "marked": args.marked,
                  "success_probability": result.success_probability, "histogram": result.histogram}
        ok = not ideal or result.success_probability > 1 - VERIFY_TOL
    else:
        program = _recycling_program(args, config)
        if ideal:
            gates = IdealGateSource()
        else:
            options = fabrication_options(config)
            delta_off = args.delta_off if args.delta_off is not None else options["delta_off"]
            decay = args.decay if args.decay is not None else options["noise"]
            gates = mediated_gate_source(delta_off, decay, dt=options["dt"])
        result = run_recycling(program, gates, rng=_rng(args, config))
        value = fidelity(result.state, circuit_oracle(program))
        report = {"demo": "recycle", "source": args.source, "program": program.to_json(),
                  "fidelity_to_circuit": value, "rounds": result.log}
        ok = not ideal or value > 1 - VERIFY_TOL
    _emit(args, report)
    return EXIT_OK if ok else EXIT_FAILED

def _recycling_program(args, config: Config) -> RecyclingProgram:
    if args.program:
        with open(args.program, "r", encoding="utf-8") as f:
            return RecyclingProgram.from_json(f.read())
    policy = config.get("mbqc/vertical_edges", "fresh")
    rng = np.random.default_rng(args.seed or 0)
    rounds = []
    for k in range(args.rounds):
        angles = tuple(float(a) for a in rng.uniform(0, 2 * math.pi, args.width))
        vertical = tuple(r for r in range(args.width - 1) if r % 2 == k % 2)
        rounds.append(RecyclingRound(angles, vertical))
    return RecyclingProgram(args.width, tuple(rounds), policy)

def cmd_resources(args, config: Config) -> int:
    params = ModelParams.from_config(config)
    modes = [EstimateMode.from_str(args.mode)] if args.mode else list(EstimateMode)
    technology = UNITS[args.units]
    estimates = []
    for mode in modes:
        if args.width is not None:
            estimates.append(general_grid_for_width(args.width, args.breadth, mode))
        else:
            estimates.append(estimate_shor15(mode))
    report = [resource_report(e, params, technology) for e in estimates]
    rows = [(str(e.mode), e.rows, e.cols, e.logical_qubits, e.steps, _time(args, e.time)) for e in estimates]
    _emit(args, report, ("mode", "rows", "cols", "logical_qubits", "steps", "time"), rows)
    return EXIT_OK

def cmd_validate_full_model(args, config: Config) -> int:
    params = ModelParams.from_config(config)
    if args.g is not None:
        params = ModelParams(params.omega_d, params.omega_0, args.g, params.A, params.kappa, params.gamma, params.n_max)
    result = compare_full_and_effective(params, samples=args.samples)
    ok = result["max_infidelity"] < args.tolerance
    report = dict(result, period=_time(args, result["period"]), units=args.units, verified=ok, tolerance=args.tolerance)
    _emit(args, report)
    return EXIT_OK if ok else EXIT_FAILED

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cavity-cluster",
                                     description="Cluster-state computing in arrays of coupled cavities.")
    parser.add_argument("--config", help="JSON5 configuration file (default: $CAVITYCLUSTER_CONFIG)")
    parser.add_argument("--set", action="append", metavar="PATH=JSON5",
                        help="override one configuration value, e.g. fabrication/delta_off=32; repeatable")
    parser.add_argument("--seed", type=int, help="random seed (default: mbqc/seed of the configuration)")
    parser.add_argument("--output", "-o", help="write the report to this file instead of standard output")
    parser.add_argument("--format", choices=("csv", "json"), help="report format")
    parser.add_argument("--threads", type=int, help="worker threads (default: machine parallelism)")
    parser.add_argument("--units", choices=sorted(UNITS), default="A",
                        help="time unit of the reports: 1/A, or nanoseconds for a technology")
    parser.add_argument("--log-level", help="error, warn, info or debug (default: $CAVITYCLUSTER_LOG)")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    gate = sub.add_parser("gate-verify", help="extract and certify the two conditional gates")
    gate.add_argument("--A", type=float, help="hopping of the effective chain")
    gate.add_argument("--outcome", type=int, choices=(0, 1))
    gate.add_argument("--time", type=float, default=1.0, help="evolution time, in units of t0")
    gate.add_argument("--mediator-input", choices=sorted(MEDIATOR_INPUTS), default="plus")
    gate.set_defaults(handler=cmd_gate_verify)

    sweep = sub.add_parser("sweep-fidelity", help="cluster fidelity against the idle detuning")
    sweep.add_argument("--grid", type=_parse_grid, default=(3, 3), help="cavity grid, RxC")
    sweep.add_argument("--delta-min", type=float, default=4.0)
    sweep.add_argument("--delta-max", type=float, default=64.0)
    sweep.add_argument("--points", type=int, default=8)
    sweep.add_argument("--decay", type=float, action="append", help="polariton loss rate, repeatable")
    sweep.add_argument("--postselect", action="store_true", help="also run the post-selected protocol")
    sweep.set_defaults(handler=cmd_sweep_fidelity)

    mbqc = sub.add_parser("mbqc", help="measurement-based demos on the box cluster")
    mbqc.add_argument("demo", choices=("prep", "grover", "recycle"))
    mbqc.add_argument("--source", choices=("ideal", "fabricated"), default="ideal",
                      help="ideal cluster, or one fabricated with finite detuning and decay")
    mbqc.add_argument("--delta-off", type=float)
    mbqc.add_argument("--decay", type=float)
    mbqc.add_argument("--theta", type=float, default=0.0)
    mbqc.add_argument("--phi", type=float, default=0.0)
    mbqc.add_argument("--marked", type=int, choices=range(4), default=0)
    mbqc.add_argument("--width", type=int, default=2)
    mbqc.add_argument("--rounds", type=int, default=3)
    mbqc.add_argument("--program", help="JSON recycling program, replaces --width and --rounds")
    mbqc.set_defaults(handler=cmd_mbqc)

    res = sub.add_parser("resources", help="grid size and time estimates, with feasibility windows")
    res.add_argument("--mode", choices=[m.value for m in EstimateMode])
    res.add_argument("--width", type=int, help="logical width; the factoring-15 estimate when omitted")
    res.add_argument("--breadth", type=int, default=1)
    res.set_defaults(handler=cmd_resources)

    full = sub.add_parser("validate-full-model", help="cross-check the effective model on two cavities")
    full.add_argument("--g", type=float, help="atom-photon coupling, in units of A")
    full.add_argument("--samples", type=int, default=41)
    full.add_argument("--tolerance", type=float, default=0.05, help="largest accepted infidelity")
    full.set_defaults(handler=cmd_validate_full_model)
    return parser

def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        init_logger(args.log_level)
        config = Config.from_file(args.config) if args.config else Config.from_env()
        for item in args.set or ():
            path, sep, value = item.partition("=")
            if not sep:
                raise UsageError(f"--set expects PATH=JSON5, got {item!r}")
            config.insert_json5(path, value)
        return args.handler(args, config)
    except (CavityError, ValueError) as e:
        logger.error("%s", e)
        print(f"cavity-cluster: error: {e}", file=sys.stderr)
        return EXIT_USAGE
