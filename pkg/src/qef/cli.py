"""Command-line front end.

Exit codes: 0 ok, 1 I/O, parse or flag error, 2 not dual-containing,
3 synthesis failure, 4 verification failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import warnings
from pathlib import Path

import numpy as np

from qef import __version__, faults, gf2
from qef.circuit import StabilizerTableau, parse_circuit, serialize
from qef.code import (
    EaCssCode,
    ParseError,
    RankDeficient,
    TooLarge,
    brute_force_distance,
    ea_extend,
    load_matrix,
    random_dual_containing,
    write_matrix,
)
from qef.encoder import synth_nonft, verify_nonft
from qef.ftencoder import (
    BadPartition,
    BlockPartition,
    OddBlockCountZSeed,
    Unsolvable,
    plan_blocks,
    synth_ft,
    verify_ft,
)

EXIT_OK, EXIT_IO, EXIT_NOT_DUAL, EXIT_SYNTH, EXIT_VERIFY = 0, 1, 2, 3, 4


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_IO, f"{self.prog}: error: {message}\n")


def _probability(text: str) -> float:
    v = float(text)
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"{text} is not in [0, 1]")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"{text} must be >= 1")
    return v


def _cuts(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad boundary list {text!r}") from None


def _default_seed() -> int:
    env = os.environ.get("QEF_SEED")
    return int(env) if env else 0


def _emit(args, payload: dict, human: list[str]) -> None:
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        print("\n".join(human))


def _load_pair(args) -> tuple[np.ndarray, np.ndarray]:
    try:
        return load_matrix(args.hx, args.format), load_matrix(args.hz, args.format)
    except OSError as exc:
        raise CliError(f"cannot read input: {exc}", EXIT_IO) from exc
    except ParseError as exc:
        raise CliError(f"parse error: {exc}", EXIT_IO) from exc


def _load_code(args) -> EaCssCode:
    hx, hz = _load_pair(args)
    if hx.shape[1] != hz.shape[1]:
        raise CliError(f"column mismatch: {hx.shape[1]} vs {hz.shape[1]}", EXIT_IO)
    try:
        return ea_extend(hx, hz)
    except RankDeficient as exc:
        raise CliError(str(exc), EXIT_SYNTH) from exc


def _partition(args, ea: EaCssCode) -> BlockPartition:
    try:
        return plan_blocks(ea.n, args.blocks if args.boundaries is None else None, args.boundaries)
    except BadPartition as exc:
        raise CliError(f"bad partition: {exc}", EXIT_SYNTH) from exc


def _synth_ft(ea, part):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", OddBlockCountZSeed)
        try:
            return synth_ft(ea, part)
        except (Unsolvable, BadPartition) as exc:
            raise CliError(f"synthesis failed: {exc}", EXIT_SYNTH) from exc


def _protected_ft(layout) -> list[int]:
    return [i for i, r in enumerate(layout.columns.roles) if r.kind in ("entangled", "epair-rx")]


# --- subcommands --------------------------------------------------------------


def cmd_check(args) -> int:
    hx, hz = _load_pair(args)
    c = gf2.rank(gf2.matmul(hx, hz.T))
    n = hx.shape[1]
    k = n - gf2.rank(hx) - gf2.rank(hz)
    info = {"n": n, "rho1": hx.shape[0], "rho2": hz.shape[0], "k": k, "c": c, "dual_containing": c == 0}
    _emit(args, info, [f"{key:16s} {val}" for key, val in info.items()])
    return EXIT_OK if c == 0 else EXIT_NOT_DUAL


def cmd_extend(args) -> int:
    ea = _load_code(args)
    fmt = args.format
    if args.output:
        Path(f"{args.output}_hx.txt").write_text(write_matrix(ea.hx, fmt))
        Path(f"{args.output}_hz.txt").write_text(write_matrix(ea.hz, fmt))
    payload = {"c": ea.c, "hx": ea.hx.tolist(), "hz": ea.hz.tolist()}
    _emit(args, payload, [f"c = {ea.c}", "hx:", write_matrix(ea.hx, fmt), "hz:", write_matrix(ea.hz, fmt)])
    return EXIT_OK


def cmd_random(args) -> int:
    h1, h2 = random_dual_containing(args.n, args.rho1, args.seed, args.rho2)
    Path(f"{args.output}_hx.txt").write_text(write_matrix(h1, args.format))
    Path(f"{args.output}_hz.txt").write_text(write_matrix(h2, args.format))
    _emit(args, {"hx": f"{args.output}_hx.txt", "hz": f"{args.output}_hz.txt"},
          [f"wrote {args.output}_hx.txt and {args.output}_hz.txt"])
    return EXIT_OK


def cmd_synth(args) -> int:
    ea = _load_code(args)
    if args.mode == "nonft":
        syn = synth_nonft(ea)
        failures = verify_nonft(ea, syn.encoder, syn.perm)
        circuit = syn.encoder
        layout = {"mode": "nonft", "qubits": circuit.qubits, "c": ea.c, "perm": list(syn.perm)}
    else:
        part = _partition(args, ea)
        syn = _synth_ft(ea, part)
        aug = [q for block in syn.trace.augmented for q in block]
        fin = syn.trace.final
        failures = verify_ft(syn.encoder, ea, part, aug, fin)
        circuit = syn.encoder
        layout = {
            "mode": "ft",
            "qubits": circuit.qubits,
            **syn.layout.to_json(),
            "augmented": aug,
            "final": {"x": fin.xpart.tolist(), "z": fin.zpart.tolist()},
        }
    if failures:
        raise CliError(f"internal verification failed: {', '.join(failures)}", EXIT_VERIFY)
    text = serialize(circuit)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    if args.layout:
        Path(args.layout).write_text(json.dumps(layout, sort_keys=True, indent=1) + "\n")
    print(f"{args.mode}: {circuit.qubits} qubits, {circuit.cx_count} CX, verified", file=sys.stderr)
    return EXIT_OK


def cmd_verify(args) -> int:
    ea = _load_code(args)
    try:
        circuit = parse_circuit(Path(args.circuit).read_text())
        layout = json.loads(Path(args.layout).read_text())
    except OSError as exc:
        raise CliError(f"cannot read input: {exc}", EXIT_IO) from exc
    except (ParseError, json.JSONDecodeError) as exc:
        raise CliError(f"parse error: {exc}", EXIT_IO) from exc
    if layout.get("mode") == "ft":
        blocks = tuple(tuple(b) for b in layout["blocks"])
        part = BlockPartition(ea.n, blocks)
        expected = None
        if "final" in layout:
            expected = StabilizerTableau(np.array(layout["final"]["x"]), np.array(layout["final"]["z"]))
        failures = verify_ft(circuit, ea, part, layout.get("augmented", []), expected)
    else:
        failures = verify_nonft(ea, circuit, tuple(layout.get("perm", range(circuit.qubits))))
    _emit(args, {"ok": not failures, "failures": failures},
          ["ok" if not failures else "FAILED: " + ", ".join(failures)])
    return EXIT_OK if not failures else EXIT_VERIFY


def _bounds_report(args, ea: EaCssCode, p: float) -> tuple[faults.PropagationReport, object, object]:
    nonft = synth_nonft(ea)
    part = _partition(args, ea)
    ft = _synth_ft(ea, part)
    report = faults.PropagationReport(
        faults.bound_nonft(nonft.standard, p, args.paper_literal),
        faults.bound_ft(ft.trace, p, args.paper_literal),
        {"nonft": faults.nonft_weights(nonft.standard), "ft": faults.ft_weights(ft.trace)},
    )
    return report, nonft, ft


def cmd_bounds(args) -> int:
    ea = _load_code(args)
    report, _, _ = _bounds_report(args, ea, args.p)
    _emit(args, report.to_json(), [f"p        {args.p}", f"bound_nf {report.bound_nf:.6g}", f"bound_ft {report.bound_ft:.6g}"])
    return EXIT_OK


def cmd_simulate(args) -> int:
    ea = _load_code(args)
    report, nonft, ft = _bounds_report(args, ea, args.p)
    if args.mode == "nonft":
        circuit, protected = nonft.encoder, ea.receiver_cols
    else:
        circuit, protected = ft.encoder, _protected_ft(ft.layout)
    report.mc = faults.simulate(circuit, faults.FaultModel(args.p), args.trials, args.seed, protected, args.injection)
    mc = report.mc
    bound = report.bound_nf if args.mode == "nonft" else report.bound_ft
    _emit(args, report.to_json(), [
        f"encoder  {args.mode} ({circuit.cx_count} CX, injection per {args.injection})",
        f"p        {mc.p}",
        f"trials   {mc.trials}   seed {mc.seed}",
        f"estimate {mc.estimate:.6g} +- {mc.stderr:.2g}",
        f"bound    {bound:.6g}",
    ])
    return EXIT_OK


def cmd_min_blocks(args) -> int:
    ea = _load_code(args)
    if not 1 <= args.g_max <= ea.n:
        raise CliError(f"--g-max must lie in 1..{ea.n}", EXIT_IO)
    pinned = {}
    if args.boundaries is not None:
        part = _partition(args, ea)
        pinned[part.g] = part
    g = faults.min_blocks(ea, args.p, args.g_max, pinned)
    _emit(args, {"p": args.p, "g_max": args.g_max, "min_blocks": g},
          [f"min_blocks {g if g is not None else 'none'} (p={args.p}, g_max={args.g_max})"])
    return EXIT_OK


def cmd_distance(args) -> int:
    ea = _load_code(args)
    target = ea
    if args.blocks is not None or args.boundaries is not None:
        target = _synth_ft(ea, _partition(args, ea)).ft_code()
    try:
        d = brute_force_distance(target)
    except TooLarge as exc:
        raise CliError(str(exc), EXIT_IO) from exc
    _emit(args, {"n": target.n, "k": target.k, "c": target.c, "d": d},
          [f"[[{target.n},{target.k},{d};{target.c}]]"])
    return EXIT_OK


# --- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qef", description="CSS / EA encoder synthesis and fault-propagation analysis")
    parser.add_argument("--version", action="version", version=f"qef {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, matrices=True):
        if matrices:
            p.add_argument("hx", help="X check matrix file")
            p.add_argument("hz", help="Z check matrix file")
        p.add_argument("--format", choices=["dense", "alist"], default="dense")
        p.add_argument("--json", action="store_true", help="machine-readable output")

    def blocks(p, default=2):
        p.add_argument("--blocks", type=_positive, default=default, metavar="G")
        p.add_argument("--boundaries", type=_cuts, default=None, metavar="I1,I2,...",
                       help="1-based cut points after the listed data qubits")

    p = sub.add_parser("check", help="report parameters and the Bell-pair count")
    common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("extend", help="append receiver columns so the pair commutes")
    common(p)
    p.add_argument("-o", "--output", help="write <OUTPUT>_hx.txt and <OUTPUT>_hz.txt")
    p.set_defaults(func=cmd_extend)

    p = sub.add_parser("random", help="write a random dual-containing pair")
    common(p, matrices=False)
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--rho1", type=_positive, required=True)
    p.add_argument("--rho2", type=int, default=None)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_random)

    p = sub.add_parser("synth", help="synthesize and verify an encoder")
    p.add_argument("mode", choices=["nonft", "ft"])
    common(p)
    blocks(p)
    p.add_argument("-o", "--output", help="circuit file (stdout if omitted)")
    p.add_argument("--layout", help="layout JSON output path")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("verify", help="re-check a circuit against a code")
    p.add_argument("circuit")
    common(p)
    p.add_argument("--layout", required=True)
    p.set_defaults(func=cmd_verify)

    for name, func, help_ in (
        ("bounds", cmd_bounds, "analytic propagation bounds"),
        ("simulate", cmd_simulate, "Monte Carlo fault injection"),
    ):
        p = sub.add_parser(name, help=help_)
        common(p)
        blocks(p)
        p.add_argument("--p", type=_probability, required=True)
        p.add_argument("--paper-literal", action="store_true", help="use the additive factor form")
        if name == "simulate":
            p.add_argument("--mode", choices=["nonft", "ft"], default="nonft")
            p.add_argument("--trials", type=_positive, default=100_000)
            p.add_argument("--seed", type=int, default=_default_seed())
            p.add_argument("--injection", choices=["group", "gate"], default="group")
        p.set_defaults(func=func)

    p = sub.add_parser("min-blocks", help="smallest g whose FT bound wins")
    common(p)
    p.add_argument("--p", type=_probability, required=True)
    p.add_argument("--g-max", type=_positive, required=True)
    p.add_argument("--boundaries", type=_cuts, default=None, help="pin the layout for one g")
    p.add_argument("--blocks", type=_positive, default=None, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_min_blocks)

    p = sub.add_parser("distance", help="brute-force minimum distance")
    common(p)
    p.add_argument("--blocks", type=_positive, default=None, help="distance of the g-block FT code")
    p.add_argument("--boundaries", type=_cuts, default=None)
    p.set_defaults(func=cmd_distance)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"qef: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
