"""Command-line interface: gen / solve / verify / bench / curves.

All output is deterministic for a fixed command line: the solver output
never includes wall-clock readings, bench CSVs zero the wall-time column
in simulated mode, and every random draw flows from the explicit seeds.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .constants import curves_csv
from .core import (
    DP_AUTO_EXPONENT,
    DP_TARGET_CAP,
    Instance,
    brute_force,
    decide_to_search,
    instance_from_text,
    instance_to_text,
)
from .harness import (
    ALGORITHMS,
    KINDS,
    GenSpec,
    RunConfig,
    VerifyConfig,
    _checked_answer,
    generate,
    run_algorithm,
    run_suite,
    verify_suite,
)
from .wordram import Machine

#: Solvers the auto-router may replace with the reachability table when
#: the target is small enough for it to be the obviously cheaper tool.
_EXPONENTIAL = ("mim", "bitpack", "repov", "packedrepov")


def _parse_u64(text: str) -> int:
    value = int(text)
    if value < 0 or value >= 1 << 64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return value


def _parse_int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in text.split(",") if tok)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}") from exc


def _parse_range(text: str) -> tuple[int, ...]:
    """"a..b" (inclusive) or a single integer."""
    if ".." in text:
        lo_txt, hi_txt = text.split("..", 1)
        try:
            lo, hi = int(lo_txt), int(hi_txt)
        except ValueError as exc:
            raise argparse.ArgumentTypeError(f"bad range {text!r}") from exc
        if hi < lo:
            raise argparse.ArgumentTypeError(f"empty range {text!r}")
        return tuple(range(lo, hi + 1))
    try:
        return (int(text),)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad range {text!r}") from exc


def _parse_rho_grid(text: str) -> tuple[float, ...]:
    """"a..b:step" (inclusive, step > 0) or a single float."""
    if ".." in text:
        head, _, step_txt = text.partition(":")
        if not step_txt:
            raise argparse.ArgumentTypeError("rho range needs a step: a..b:step")
        lo_txt, hi_txt = head.split("..", 1)
        try:
            lo, hi, step = float(lo_txt), float(hi_txt), float(step_txt)
        except ValueError as exc:
            raise argparse.ArgumentTypeError(f"bad rho grid {text!r}") from exc
        if step <= 0 or hi < lo:
            raise argparse.ArgumentTypeError(f"bad rho grid {text!r}")
        count = int(round((hi - lo) / step)) + 1
        grid = tuple(round(lo + i * step, 12) for i in range(count) if lo + i * step <= hi + 1e-12)
        return grid
    try:
        return (float(text),)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad rho value {text!r}") from exc


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="logshave",
        description=(
            "Subset-sum solvers with word-level parallelism, an instrumented "
            "cost simulator, and reproducible experiment suites."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate one instance file")
    gen.add_argument("--kind", required=True, choices=KINDS)
    gen.add_argument("--n", required=True, type=int)
    gen.add_argument("--bits", required=True, type=int)
    gen.add_argument("--plant-balance", type=float, default=None)
    gen.add_argument("--seed", required=True, type=_parse_u64)
    gen.add_argument("-o", "--output", required=True)

    solve = sub.add_parser("solve", help="run one solver on an instance file")
    solve.add_argument("--alg", required=True, choices=ALGORITHMS)
    solve.add_argument("--ell", type=int, default=None, help="simulated word length in bits")
    solve.add_argument(
        "--mode",
        choices=("circuit", "word"),
        default=None,
        help="run on the instrumented simulator under this cost model",
    )
    solve.add_argument("--seed", type=_parse_u64, default=0)
    solve.add_argument(
        "--search",
        action="store_true",
        help="reconstruct an explicit witness via staged self-reduction",
    )
    solve.add_argument(
        "--dp-threshold",
        type=float,
        default=DP_AUTO_EXPONENT,
        help=(
            "route to the reachability table when target <= 2^(threshold*n); "
            "0 disables routing"
        ),
    )
    solve.add_argument("file")

    verify = sub.add_parser("verify", help="statistical detection report")
    verify.add_argument("--alg", required=True, choices=ALGORITHMS)
    verify.add_argument("--family", required=True, choices=KINDS)
    verify.add_argument("--n", required=True, type=int)
    verify.add_argument("--trials", required=True, type=int)
    verify.add_argument("--amplify", required=True, type=int)
    verify.add_argument("--seed", required=True, type=_parse_u64)

    bench = sub.add_parser("bench", help="grid run, CSV output")
    bench.add_argument("--algs", required=True, type=str)
    bench.add_argument("--n", required=True, type=_parse_range, metavar="A..B")
    bench.add_argument("--ell", required=True, type=_parse_int_list, metavar="L1,L2,...")
    bench.add_argument("--trials", required=True, type=int)
    bench.add_argument("--seed", required=True, type=_parse_u64)
    bench.add_argument("-o", "--output", required=True)

    curves = sub.add_parser("curves", help="solved constant curves, CSV output")
    curves.add_argument("--rho", required=True, type=_parse_rho_grid, metavar="A..B:STEP")
    curves.add_argument("-o", "--output", required=True)

    return parser


def _cmd_gen(args) -> int:
    spec = GenSpec(
        kind=args.kind,
        n=args.n,
        value_bits=args.bits,
        seed=args.seed,
        plant_balance=args.plant_balance,
    )
    inst, mask = generate(spec)
    Path(args.output).write_text(instance_to_text(inst, planted_mask=mask))
    print(f"wrote {args.output} (kind={args.kind}, n={inst.n}, target_bits={inst.target.bit_length()})")
    return 0


def _cmd_solve(args) -> int:
    text = Path(args.file).read_text()
    inst, _mask = instance_from_text(text, word_len=args.ell)
    alg = args.alg
    routed = False
    if (
        alg in _EXPONENTIAL
        and args.dp_threshold > 0
        and inst.target <= min(int(2.0 ** (args.dp_threshold * inst.n)), DP_TARGET_CAP)
    ):
        alg = "dp"
        routed = True
    machine = Machine(inst.word_len, args.mode) if args.mode else None
    if args.search:
        def decider(sub_inst: Instance, sub_seed: int):
            try:
                return run_algorithm(alg, sub_inst, rng_seed=sub_seed, machine=machine)
            except ValueError as exc:
                if "too small" not in str(exc):
                    raise
                # the committing loop shrinks subinstances below the packed
                # layout's size floor; an exact scan is cheap at that size
                return brute_force(sub_inst)

        verdict = decide_to_search(decider, inst, rng_seed=args.seed)
    else:
        verdict = run_algorithm(alg, inst, rng_seed=args.seed, machine=machine)
    answer = _checked_answer(verdict, inst)
    print(f"algorithm: {args.alg}")
    if routed:
        print("routed: dp")
    print(f"n: {inst.n}")
    print(f"ell: {inst.word_len}")
    print(f"mode: {args.mode if args.mode else 'native'}")
    print(f"seed: {args.seed}")
    print(f"verdict: {'yes' if answer else 'no'}")
    if answer:
        print(f"witness: 0x{verdict.witness.subset_mask:x}")
        print("witness_sum: ok")
    if args.search:
        print(f"trials_used: {verdict.trials_used}")
    if machine is not None:
        print(f"charged_cost: {machine.charged_cost}")
    return 0 if answer else 1


def _cmd_verify(args) -> int:
    cfg = VerifyConfig(
        algorithm=args.alg,
        family=args.family,
        n=args.n,
        trials=args.trials,
        amplify=args.amplify,
        master_seed=args.seed,
    )
    report = verify_suite(cfg)
    sys.stdout.write(report.to_text())
    return 0 if report.false_positives == 0 else 1


def _cmd_bench(args) -> int:
    algs = tuple(tok for tok in args.algs.split(",") if tok)
    cfg = RunConfig(
        algorithms=algs,
        n_values=args.n,
        ell_values=args.ell,
        trials=args.trials,
        master_seed=args.seed,
    )
    csv_text = run_suite(cfg)
    Path(args.output).write_text(csv_text)
    rows = sum(1 for line in csv_text.splitlines() if line and not line.startswith("#")) - 1
    print(f"wrote {args.output} ({rows} rows)")
    return 0


def _cmd_curves(args) -> int:
    Path(args.output).write_text(curves_csv(args.rho))
    print(f"wrote {args.output} ({len(args.rho)} grid points)")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "gen": _cmd_gen,
        "solve": _cmd_solve,
        "verify": _cmd_verify,
        "bench": _cmd_bench,
        "curves": _cmd_curves,
    }
    try:
        return handlers[args.command](args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
