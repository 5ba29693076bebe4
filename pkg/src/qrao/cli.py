"""Command-line entry point (``qrao``)."""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import logging
import sys

from . import analysis, harness
from .encoding import QracAssignment, assign_qrac, build_ising_hamiltonian, build_qrac_hamiltonian
from .errors import QraoError
from .graph import format_edge_list, generate_random_regular, read_edge_list
from .pauli import Hamiltonian
from .rounding import computational_rounding, magic_rounding, pauli_rounding
from .simulator import NoiseParams
from .vqe import VqeConfig, candidate_from_params, run_vqe, write_trace_csv

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        print(text)


def _read_json(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _noise(args) -> NoiseParams:
    return NoiseParams(global_p=args.global_p, global_N=args.global_N, cnot_error=args.cnot_error)


def cmd_gen_graph(args) -> None:
    g = generate_random_regular(args.nodes, args.degree, args.seed)
    _emit(format_edge_list(g), args.out)


def cmd_encode(args) -> None:
    g = read_edge_list(args.graph)
    if args.encoding == "ising":
        h, a = build_ising_hamiltonian(g), None
    else:
        a = assign_qrac(g)
        h = build_qrac_hamiltonian(g, a)
    obj = {"encoding": args.encoding, "hamiltonian": h.to_json(), "assignment": a.to_json() if a else None}
    _emit(json.dumps(obj, indent=2), args.out)


def cmd_vqe(args) -> None:
    enc = _read_json(args.encoded)
    h = Hamiltonian.from_json(enc["hamiltonian"])
    cfg = VqeConfig(args.layers, args.sweeps, None if args.exact else args.shots, args.seed)
    res = run_vqe(h, cfg, _noise(args))
    if args.trace_csv:
        write_trace_csv(res, args.trace_csv)
    _emit(json.dumps(res.to_json(), indent=2), args.out)


def cmd_round(args) -> None:
    g = read_edge_list(args.graph)
    enc = _read_json(args.encoded)
    res = _read_json(args.vqe_result)
    noise = NoiseParams(**res["noise"])
    state = candidate_from_params(res["num_qubits"], res["layers"], res["params"], noise)
    if args.method == "computational":
        out = computational_rounding(state, g, args.shots or 1, args.seed)
    else:
        if enc.get("assignment") is None:
            raise QraoError(f"{args.method} rounding needs a QRAC encoding")
        a = QracAssignment.from_json(enc["assignment"])
        if args.method == "pauli":
            out = pauli_rounding(state, a, g, shots=args.shots, seed=args.seed)
        else:
            out = magic_rounding(state, a, args.rounds, g, args.seed)
    _emit(out.dumps(), args.out)


def cmd_bounds(args) -> None:
    if args.sweep is not None:
        rows = analysis.crossover_sweep(args.p, args.sweep, args.qubit_ratio, args.edges, args.opt_cut)
        fh = open(args.out, "w", newline="") if args.out else sys.stdout
        try:
            w = csv.writer(fh)
            w.writerow(["N1", "ratio_ising", "ratio_qrac_lower"])
            w.writerows(rows)
        finally:
            if args.out:
                fh.close()
        return
    rep = analysis.bounds_report(args.p, args.N, args.nodes, args.edges, args.opt_cut, args.layers,
                                 args.delta, args.epsilon, args.qubit_ratio)
    _emit(json.dumps(rep, indent=2), args.out)


def cmd_experiment(args) -> None:
    cfg = harness.load_config(args.config) if args.config else harness.ExperimentConfig()
    overrides = {}
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if args.out:
        overrides["output_path"] = args.out
    if args.workers is not None:
        overrides["workers"] = args.workers
    cfg = dataclasses.replace(cfg, **overrides)
    if not cfg.output_path:
        raise UsageError("experiment needs an output path (--out or output_path in the config)")
    failed = 0
    for rec in harness.run_experiment(cfg):
        failed += rec["status"] != "ok"
    if failed:
        logging.getLogger(__name__).warning("%d record(s) failed", failed)


def cmd_summarize(args) -> None:
    rows = harness.aggregate(harness.load_records(args.results))
    if args.out:
        harness.write_summary_csv(rows, args.out)
    else:
        for r in rows:
            print(json.dumps(dataclasses.asdict(r)))
    if args.compare:
        other = harness.aggregate(harness.load_records(args.compare))
        for d in harness.compare_noise_impact(rows, other):
            print(json.dumps(dataclasses.asdict(d)))


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qrao", description="MaxCut via Ising and QRAC encodings on a noisy simulator.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, seed_default=0):
        sp.add_argument("--seed", type=int, default=seed_default)
        sp.add_argument("--out", help="output file (default: stdout)")

    def noise(sp):
        sp.add_argument("--cnot-error", type=float, default=0.0)
        sp.add_argument("--global-p", type=float, default=1.0)
        sp.add_argument("--global-N", type=int, default=0)

    sp = sub.add_parser("gen-graph", help="random regular graph as an edge list")
    sp.add_argument("--nodes", type=int, required=True)
    sp.add_argument("--degree", type=int, default=3)
    common(sp)
    sp.set_defaults(func=cmd_gen_graph)

    sp = sub.add_parser("encode", help="build a Hamiltonian from an edge list")
    sp.add_argument("graph")
    sp.add_argument("--encoding", choices=["ising", "qrac"], default="qrac")
    common(sp)
    sp.set_defaults(func=cmd_encode)

    sp = sub.add_parser("vqe", help="optimize a candidate state for an encoded Hamiltonian")
    sp.add_argument("encoded")
    sp.add_argument("--layers", type=int, default=3)
    sp.add_argument("--sweeps", type=int, default=2)
    sp.add_argument("--shots", type=int, default=1024, help="shots per Pauli term")
    sp.add_argument("--exact", action="store_true", help="exact expectation values")
    sp.add_argument("--trace-csv")
    noise(sp)
    common(sp)
    sp.set_defaults(func=cmd_vqe)

    sp = sub.add_parser("round", help="round a VQE result to a bitstring")
    sp.add_argument("graph")
    sp.add_argument("encoded")
    sp.add_argument("vqe_result")
    sp.add_argument("--method", choices=["pauli", "magic", "computational"], default="magic")
    sp.add_argument("--shots", type=int, default=None)
    sp.add_argument("--rounds", type=int, default=1024)
    common(sp)
    sp.set_defaults(func=cmd_round)

    sp = sub.add_parser("bounds", help="closed-form shot counts and noisy ratio bounds")
    sp.add_argument("--p", type=float, default=0.99)
    sp.add_argument("--N", type=int, default=100)
    sp.add_argument("--nodes", type=int, default=40)
    sp.add_argument("--edges", type=int, default=60)
    sp.add_argument("--opt-cut", type=int, default=60)
    sp.add_argument("--layers", type=int, default=3)
    sp.add_argument("--delta", type=float, default=0.05)
    sp.add_argument("--epsilon", type=float, default=0.1)
    sp.add_argument("--qubit-ratio", type=float, default=1.0 / 3.0)
    sp.add_argument("--sweep", type=int, metavar="N1_MAX", help="emit CSV rows for N1 = 0..N1_MAX")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_bounds)

    sp = sub.add_parser("experiment", help="run the batch pipeline to JSON Lines")
    sp.add_argument("--config")
    sp.add_argument("--seed", type=int, default=None, help="master seed override")
    sp.add_argument("--out")
    sp.add_argument("--workers", type=int, default=None)
    sp.set_defaults(func=cmd_experiment)

    sp = sub.add_parser("summarize", help="aggregate a results file")
    sp.add_argument("results")
    sp.add_argument("--compare", help="second (noisy) results file for per-group ratio drops")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_summarize)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"qrao: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        args.func(args)
    except UsageError as exc:
        print(f"qrao: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (QraoError, OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"qrao: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
