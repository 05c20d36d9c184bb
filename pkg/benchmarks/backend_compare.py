"""Wall-clock comparison of the compiled and pure-Python backends.

Runs the same solver workload twice — once per backend, each in a fresh
interpreter so the import-time backend selection is exercised for real —
checks that both backends return identical verdicts, and prints a
speedup table.

Usage::

    python3 benchmarks/backend_compare.py

The pure run forces ``LOGSHAVE_FORCE_PY=1``; the native run requires the
compiled extension (it aborts with a clear message if only the pure
backend is importable).
"""
from __future__ import annotations

import json
import os
import subprocess
import sys
import time

WORKLOAD = [
    # (algorithm, n, value_bits, word_len, trials)
    ("brute", 20, 30, 64, 40),
    ("mim", 24, 34, 64, 40),
    ("bitpack", 22, 32, 64, 40),
    ("repov", 22, 32, 64, 40),
    ("packedrepov", 22, 32, 256, 40),
]
MASTER_SEED = 20260822


def _measure() -> None:
    """Child mode: run the workload on whatever backend imported, emit JSON."""
    from logshave import backend_name
    from logshave._rng import derive_seed
    from logshave.harness import GenSpec, generate, run_algorithm
    from logshave.core import Instance

    results = {"backend": backend_name(), "rows": []}
    for alg, n, bits, ell, trials in WORKLOAD:
        verdicts = []
        t0 = time.perf_counter()
        for i in range(trials):
            inst_seed = derive_seed(MASTER_SEED, "inst", "dense", n, i)
            inst, _ = generate(GenSpec("dense", n, bits, inst_seed))
            inst = Instance(values=inst.values, target=inst.target, word_len=ell)
            seed = derive_seed(MASTER_SEED, alg, inst_seed, i)
            verdicts.append(run_algorithm(alg, inst, rng_seed=seed).answer)
        elapsed = time.perf_counter() - t0
        results["rows"].append(
            {"alg": alg, "trials": trials, "seconds": elapsed, "verdicts": verdicts}
        )
    json.dump(results, sys.stdout)


def _run_child(force_pure: bool) -> dict:
    env = dict(os.environ)
    if force_pure:
        env["LOGSHAVE_FORCE_PY"] = "1"
    else:
        env.pop("LOGSHAVE_FORCE_PY", None)
    proc = subprocess.run(
        [sys.executable, os.path.abspath(__file__), "--measure"],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    return json.loads(proc.stdout)


def main() -> int:
    if "--measure" in sys.argv:
        _measure()
        return 0
    native = _run_child(force_pure=False)
    if native["backend"] != "native":
        print("compiled backend unavailable; build the extension first", file=sys.stderr)
        return 1
    pure = _run_child(force_pure=True)
    assert pure["backend"] == "python"
    print(f"{'algorithm':<12} {'trials':>6} {'native_s':>10} {'python_s':>10} {'speedup':>8}")
    for nrow, prow in zip(native["rows"], pure["rows"]):
        assert nrow["alg"] == prow["alg"]
        if nrow["verdicts"] != prow["verdicts"]:
            print(f"VERDICT MISMATCH in {nrow['alg']}", file=sys.stderr)
            return 1
        speedup = prow["seconds"] / nrow["seconds"] if nrow["seconds"] > 0 else float("inf")
        print(
            f"{nrow['alg']:<12} {nrow['trials']:>6} {nrow['seconds']:>10.4f} "
            f"{prow['seconds']:>10.4f} {speedup:>7.1f}x"
        )
    print("verdict parity: ok (all runs identical across backends)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
