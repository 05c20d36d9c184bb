"""Instance generators, experiment suites, and deterministic CSV reporting.

Families
--------
``dense``
    n values drawn uniformly from [1, 2^value_bits] with a uniform target
    in [max(values), sum(values)].  Density — and hence the yes/no mix —
    is controlled by the ratio n / value_bits.
``planted``
    A witness subset S of size n // 2 is selected first and the target is
    set to its exact sum, so the instance is solvable by construction and
    the witness mask is recorded.  ``plant_balance`` controls the fraction
    of the generator's canonical core block (the first
    min(n // 2, max(4, floor(log2 n))) indices) that S occupies; the
    default 0.5 puts half the core into the witness.
``unbalanced-planted``
    Same construction with a default ``plant_balance`` of 0.0: the witness
    avoids the canonical core entirely, which places it outside the
    near-half band that the core-splitting solvers sample for.
``low-additive-structure``
    Values are a run of increasing powers of two padded with ones, so the
    set of reachable subset sums is far smaller than 2^n.  A witness of
    size n // 2 containing the largest power is planted and recorded.
``no-instance``
    An unsolvable instance.  When the value range is small enough the
    generator rejection-samples targets until the reachability oracle
    confirms no subset attains one; otherwise it falls back to an explicit
    parity obstruction (all values even, odd target), which is unsolvable
    by inspection.

Determinism
-----------
Every random choice flows from a single stream seeded by mixing the spec
seed with the spec's discrete fields, so generation is a pure function of
the spec.  Suite runs derive one 64-bit seed per (algorithm, instance,
trial) triple from the master seed; rows are sorted by
(algorithm, n, word length, seed) before writing, so the emitted CSV is
byte-identical across repeat runs — and across worker counts — for the
same configuration.  Wall-clock time is measured only for native (un-
instrumented) runs; simulated runs report the charged operation count and
write a zero in the wall-time column, keeping simulated output free of
timing noise.

Every yes verdict produced inside a suite is re-validated by summing the
witness; an invalid witness raises immediately rather than being scored.
"""
from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from ._rng import SplitMix64, derive_seed
from .baseline import bit_packing, meet_in_the_middle
from .core import (
    BRUTE_FORCE_CAP,
    DP_TARGET_CAP,
    Instance,
    Verdict,
    brute_force,
    dp_bellman,
)
from .representation import packed_representation_ov, representation_ov
from .wordram import Machine

KINDS = (
    "dense",
    "planted",
    "unbalanced-planted",
    "low-additive-structure",
    "no-instance",
)
ALGORITHMS = ("brute", "dp", "mim", "bitpack", "repov", "packedrepov")
#: Solvers whose verdict does not depend on the seed (the hashed baseline
#: is seeded but zero-error, so its answer is seed-independent too).
SEED_INDEPENDENT = ("brute", "dp", "mim", "bitpack")
CSV_HEADER = "algorithm,n,ell,mode,seed,verdict,charged_cost,wall_ns,success,extra_json"
DEFAULT_VALUE_BITS = 40
#: Attempts at drawing an oracle-confirmed unreachable target before the
#: no-instance generator falls back to the parity construction.
_NO_INSTANCE_TRIES = 64
#: Reachability-oracle budget for no-instance generation: above this
#: target size the parity construction is used directly.
_NO_INSTANCE_DP_CAP = 1 << 22


def _ceil_log2(n: int) -> int:
    return (n - 1).bit_length() if n > 1 else 0


@dataclass(frozen=True)
class GenSpec:
    """Recipe for one reproducible instance.

    ``plant_balance`` is only meaningful for the planted kinds and gives
    the fraction of the canonical core block occupied by the witness.
    """

    kind: str
    n: int
    value_bits: int
    seed: int
    plant_balance: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown instance kind {self.kind!r}; choose from {KINDS}")
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.value_bits < max(1, _ceil_log2(self.n)):
            raise ValueError(
                f"value_bits={self.value_bits} too small for n={self.n}: "
                f"need at least max(1, ceil(log2 n)) = {max(1, _ceil_log2(self.n))}"
            )
        if self.seed < 0 or self.seed >= 1 << 64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.plant_balance is not None:
            if self.kind not in ("planted", "unbalanced-planted"):
                raise ValueError("plant_balance only applies to the planted kinds")
            if not (0.0 <= self.plant_balance <= 1.0):
                raise ValueError("plant_balance must lie in [0, 1]")


def _canonical_core_size(n: int) -> int:
    """Core block the planted generators balance against: first indices."""
    return max(1, min(n // 2 if n >= 2 else 1, max(4, n.bit_length() - 1)))


def _draw_values(rng: SplitMix64, n: int, value_bits: int) -> list[int]:
    return [1 + rng.next_below(1 << value_bits) for _ in range(n)]


def _pick(rng: SplitMix64, pool: list[int], count: int) -> list[int]:
    """Draw ``count`` distinct elements from pool, in stream order."""
    chosen: list[int] = []
    pool = list(pool)
    for _ in range(count):
        j = rng.next_below(len(pool))
        chosen.append(pool.pop(j))
    return chosen


def _planted(spec: GenSpec, rng: SplitMix64) -> tuple[Instance, int]:
    n = spec.n
    values = _draw_values(rng, n, spec.value_bits)
    core = _canonical_core_size(n)
    if spec.plant_balance is not None:
        frac = spec.plant_balance
    else:
        frac = 0.5 if spec.kind == "planted" else 0.0
    witness_size = max(1, n // 2)
    in_core = min(round(frac * core), core, witness_size)
    outside_needed = witness_size - in_core
    if outside_needed > n - core:
        raise ValueError(
            f"cannot plant witness of size {witness_size} with only {in_core} "
            f"core members when just {n - core} indices lie outside the core"
        )
    chosen = _pick(rng, list(range(core)), in_core)
    chosen += _pick(rng, list(range(core, n)), outside_needed)
    mask = 0
    for i in chosen:
        mask |= 1 << i
    target = sum(values[i] for i in chosen)
    # Non-witness values exceeding the target can never participate and
    # would make the instance invalid; redraw them inside [1, target].
    for i in range(n):
        if not ((mask >> i) & 1) and values[i] > target:
            values[i] = 1 + rng.next_below(target)
    inst = Instance.make(values, target)
    if inst.mask_sum(mask) != target:
        raise AssertionError("planted witness must sum to the target")
    return inst, mask


def _low_additive(spec: GenSpec, rng: SplitMix64) -> tuple[Instance, int]:
    n = spec.n
    # Powers 2^0 .. 2^(p-1), then ones.  Keep roughly ceil(log2 n) slots
    # as ones and never exceed the configured value width.
    powers = max(1, min(n - _ceil_log2(n), spec.value_bits))
    values = [1 << i for i in range(powers)] + [1] * (n - powers)
    witness_size = max(1, n // 2)
    top = powers - 1  # index of the largest value; forced into the witness
    chosen = [top] + _pick(rng, [i for i in range(n) if i != top], witness_size - 1)
    mask = 0
    for i in chosen:
        mask |= 1 << i
    target = sum(values[i] for i in chosen)
    inst = Instance.make(values, target)
    if inst.mask_sum(mask) != target:
        raise AssertionError("planted witness must sum to the target")
    return inst, mask


def _no_instance(spec: GenSpec, rng: SplitMix64) -> Instance:
    n = spec.n
    values = _draw_values(rng, n, spec.value_bits)
    total = sum(values)
    top = max(values)
    if total <= min(DP_TARGET_CAP, _NO_INSTANCE_DP_CAP):
        for _ in range(_NO_INSTANCE_TRIES):
            target = top + rng.next_below(total - top + 1)
            candidate = Instance.make(values, target)
            if not dp_bellman(candidate).answer:
                return candidate
    # Parity obstruction: all values even, target odd.  The target may
    # exceed the total; it only needs to dominate every single value.
    values = [2 * (1 + rng.next_below(1 << max(1, spec.value_bits - 1))) for _ in range(n)]
    total = sum(values)
    top = max(values)
    target = (top + rng.next_below(total - top + 1)) | 1
    return Instance.make(values, target)


def generate(spec: GenSpec) -> tuple[Instance, int | None]:
    """Produce the instance described by ``spec``.

    Returns the instance and, for the planted kinds, the witness mask that
    was embedded (``None`` otherwise).  Deterministic per spec.
    """
    rng = SplitMix64(
        derive_seed(spec.seed, "gen", spec.kind, spec.n, spec.value_bits)
    )
    if spec.kind == "dense":
        values = _draw_values(rng, spec.n, spec.value_bits)
        total = sum(values)
        top = max(values)
        target = top + rng.next_below(total - top + 1)
        return Instance.make(values, target), None
    if spec.kind in ("planted", "unbalanced-planted"):
        return _planted(spec, rng)
    if spec.kind == "low-additive-structure":
        return _low_additive(spec, rng)
    if spec.kind == "no-instance":
        return _no_instance(spec, rng), None
    raise AssertionError(f"unhandled kind {spec.kind!r}")


# --------------------------------------------------------------------------
# Solving helpers shared by the suites and the CLI


def _with_word_len(inst: Instance, ell: int | None) -> Instance:
    if ell is None or ell == inst.word_len:
        return inst
    return Instance(values=inst.values, target=inst.target, word_len=ell)


def run_algorithm(
    alg: str,
    inst: Instance,
    rng_seed: int = 0,
    machine: Machine | None = None,
    report: dict | None = None,
) -> Verdict:
    """Dispatch one solver by name.

    The two oracles ignore both the seed and the machine (they are
    reference procedures, not cost-modelled algorithms).
    """
    if alg == "brute":
        return brute_force(inst)
    if alg == "dp":
        return dp_bellman(inst)
    if alg == "mim":
        return meet_in_the_middle(inst, machine=machine)
    if alg == "bitpack":
        return bit_packing(inst, rng_seed=rng_seed, machine=machine)
    if alg == "repov":
        return representation_ov(inst, rng_seed=rng_seed, machine=machine, report=report)
    if alg == "packedrepov":
        return packed_representation_ov(
            inst, rng_seed=rng_seed, machine=machine, report=report
        )
    raise ValueError(f"unknown algorithm {alg!r}; choose from {ALGORITHMS}")


def _checked_answer(verdict: Verdict, inst: Instance) -> bool:
    if verdict.answer and not verdict.check(inst):
        raise AssertionError("yes verdict carries a witness that does not sum to the target")
    return verdict.answer


# --------------------------------------------------------------------------
# Bench suite


@dataclass(frozen=True)
class BenchRow:
    """One solver run; matches the CSV schema column for column."""

    algorithm: str
    n: int
    ell: int
    mode: str
    seed: int
    verdict: str
    charged_cost: int
    wall_ns: int
    success: bool
    extra: dict

    def sort_key(self):
        return (self.algorithm, self.n, self.ell, self.seed)

    def csv_fields(self) -> list[str]:
        return [
            self.algorithm,
            str(self.n),
            str(self.ell),
            self.mode,
            str(self.seed),
            self.verdict,
            str(self.charged_cost),
            str(self.wall_ns),
            "true" if self.success else "false",
            json.dumps(self.extra, sort_keys=True, separators=(",", ":")),
        ]


@dataclass(frozen=True)
class RunConfig:
    """Configuration for :func:`run_suite`.

    ``mode`` selects between the two simulated cost models ("circuit" or
    "word") and real execution ("native").  Simulated rows carry the
    charged cost and a zero wall time; native rows carry the measured
    wall time and a zero charged cost.  ``budget_s`` caps the total wall
    clock; exceeding it truncates the suite with an explicit marker (and
    makes the output dependent on machine speed, so leave it unset when
    byte-reproducibility matters).
    """

    algorithms: tuple[str, ...]
    n_values: tuple[int, ...]
    ell_values: tuple[int, ...]
    trials: int
    master_seed: int
    kind: str = "dense"
    value_bits: int = DEFAULT_VALUE_BITS
    plant_balance: float | None = None
    mode: str = "circuit"
    workers: int = 1
    budget_s: float | None = None

    def validate(self) -> None:
        for alg in self.algorithms:
            if alg not in ALGORITHMS:
                raise ValueError(f"unknown algorithm {alg!r}; choose from {ALGORITHMS}")
        if self.kind not in KINDS:
            raise ValueError(f"unknown instance kind {self.kind!r}")
        if self.mode not in ("circuit", "word", "native"):
            raise ValueError("mode must be one of circuit, word, native")
        if self.trials < 1:
            raise ValueError("trials must be positive")
        if not self.n_values or not self.ell_values:
            raise ValueError("need at least one n and one word length")
        if self.workers < 1:
            raise ValueError("workers must be positive")


def _instance_for(cfg: RunConfig, n: int, trial: int) -> tuple[Instance, int | None, int]:
    inst_seed = derive_seed(cfg.master_seed, "inst", cfg.kind, n, trial)
    spec = GenSpec(
        kind=cfg.kind,
        n=n,
        value_bits=cfg.value_bits,
        seed=inst_seed,
        plant_balance=cfg.plant_balance,
    )
    inst, mask = generate(spec)
    return inst, mask, inst_seed


def _known_truth(cfg_kind: str, inst: Instance, mask: int | None) -> bool | None:
    """Ground truth when it is cheaply available, else None."""
    if mask is not None:
        return True
    if cfg_kind == "no-instance":
        return False
    if inst.n <= BRUTE_FORCE_CAP:
        return brute_force(inst).answer
    return None


def _run_job(cfg: RunConfig, alg: str, n: int, ell: int, trial: int) -> BenchRow:
    inst0, mask, inst_seed = _instance_for(cfg, n, trial)
    seed = derive_seed(cfg.master_seed, alg, inst_seed, trial)
    extra: dict = {}
    try:
        inst = _with_word_len(inst0, ell)
    except ValueError as exc:
        return BenchRow(alg, n, ell, cfg.mode, seed, "error", 0, 0, False, {"error": str(exc)})
    machine = None
    report: dict | None = None
    if cfg.mode in ("circuit", "word"):
        machine = Machine(ell, cfg.mode)
        if alg in ("repov", "packedrepov"):
            report = {}
    try:
        t0 = time.perf_counter_ns()
        verdict = run_algorithm(alg, inst, rng_seed=seed, machine=machine, report=report)
        elapsed = time.perf_counter_ns() - t0
    except (ValueError, MemoryError) as exc:
        return BenchRow(alg, n, ell, cfg.mode, seed, "error", 0, 0, False, {"error": str(exc)})
    answer = _checked_answer(verdict, inst)
    truth = _known_truth(cfg.kind, inst0, mask)
    if truth is None:
        success = True
    elif truth:
        # One-sided solvers may miss a planted witness; that is a scored
        # outcome, not an error.
        success = answer
    else:
        success = not answer
    if report is not None:
        for key in ("case", "p"):
            if key in report:
                extra[key] = report[key]
    charged = machine.charged_cost if machine is not None else 0
    wall = elapsed if cfg.mode == "native" else 0
    return BenchRow(
        alg, n, ell, cfg.mode, seed, "yes" if answer else "no", charged, wall, success, extra
    )


def _run_job_tuple(args) -> BenchRow:
    return _run_job(*args)


def _fit_slope(points: list[tuple[float, float]]) -> float:
    """Least-squares slope of y against x."""
    k = len(points)
    mean_x = sum(x for x, _ in points) / k
    mean_y = sum(y for _, y in points) / k
    denom = sum((x - mean_x) ** 2 for x, _ in points)
    if denom == 0:
        return math.nan
    return sum((x - mean_x) * (y - mean_y) for x, y in points) / denom


def _summary_lines(cfg: RunConfig, rows: list[BenchRow]) -> list[str]:
    lines = ["# summary"]
    cost_of: dict[tuple[str, int, int], list[int]] = {}
    for row in rows:
        if row.verdict in ("yes", "no") and row.charged_cost > 0:
            cost_of.setdefault((row.algorithm, row.ell, row.n), []).append(row.charged_cost)
    for alg in cfg.algorithms:
        for ell in cfg.ell_values:
            points = []
            for n in sorted(set(cfg.n_values)):
                costs = cost_of.get((alg, ell, n))
                if costs:
                    mean_cost = sum(costs) / len(costs)
                    points.append((float(n), math.log2(mean_cost)))
            if len(points) >= 2:
                slope = _fit_slope(points)
                lines.append(
                    f"# slope algorithm={alg} ell={ell} slope={slope:.9g} points={len(points)}"
                )
        # Cost ratio across word lengths at the largest n with data.
        for n in sorted(set(cfg.n_values), reverse=True):
            per_ell = {
                ell: sum(cost_of[(alg, ell, n)]) / len(cost_of[(alg, ell, n)])
                for ell in cfg.ell_values
                if (alg, ell, n) in cost_of
            }
            if len(per_ell) >= 2:
                base = per_ell[min(per_ell)]
                for ell in sorted(per_ell):
                    lines.append(
                        f"# ratio algorithm={alg} n={n} ell={ell} "
                        f"mean_cost={per_ell[ell]:.9g} vs_min_ell={per_ell[ell] / base:.9g}"
                    )
                break
    return lines


def run_suite(cfg: RunConfig) -> str:
    """Run the configured grid and return the CSV text (rows + summary).

    One row per (algorithm, n, word length, trial); rows are sorted by
    (algorithm, n, word length, seed) so the byte stream is independent
    of execution order.  Per-run failures (a solver refusing an
    undersized instance, a simulated layout that cannot fit) become
    ``error`` rows; an exhausted wall budget truncates the suite with a
    marker comment.
    """
    cfg.validate()
    jobs = [
        (cfg, alg, n, ell, trial)
        for alg in cfg.algorithms
        for n in cfg.n_values
        for ell in cfg.ell_values
        for trial in range(cfg.trials)
    ]
    rows: list[BenchRow] = []
    truncated_after: int | None = None
    started = time.monotonic()
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            for done, row in enumerate(pool.map(_run_job_tuple, jobs)):
                rows.append(row)
                if cfg.budget_s is not None and time.monotonic() - started > cfg.budget_s:
                    truncated_after = done + 1
                    break
    else:
        for done, job in enumerate(jobs):
            if cfg.budget_s is not None and time.monotonic() - started > cfg.budget_s:
                truncated_after = done
                break
            rows.append(_run_job_tuple(job))
    rows.sort(key=BenchRow.sort_key)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    buf.write(CSV_HEADER + "\n")
    for row in rows:
        writer.writerow(row.csv_fields())
    for line in _summary_lines(cfg, rows):
        buf.write(line + "\n")
    if truncated_after is not None:
        buf.write(
            f"# truncated: wall budget {cfg.budget_s}s exhausted after "
            f"{truncated_after} of {len(jobs)} runs\n"
        )
    return buf.getvalue()


# --------------------------------------------------------------------------
# Verify suite


def _wilson(successes: int, trials: int, z: float = 1.959963984540054) -> tuple[float, float]:
    """95% score interval for a binomial proportion."""
    if trials == 0:
        return (0.0, 1.0)
    p = successes / trials
    zz = z * z / trials
    center = (p + zz / 2.0) / (1.0 + zz)
    half = z * math.sqrt(p * (1.0 - p) / trials + zz / (4.0 * trials)) / (1.0 + zz)
    return (max(0.0, center - half), min(1.0, center + half))


@dataclass(frozen=True)
class VerifyConfig:
    """Configuration for :func:`verify_suite`.

    ``amplify`` independent runs are attempted per instance; a yes is
    final (witnesses are validated, so yes answers are trustworthy),
    while seed-independent solvers stop after a single run either way.
    """

    algorithm: str
    family: str
    n: int
    trials: int
    amplify: int
    master_seed: int
    value_bits: int = DEFAULT_VALUE_BITS
    ell: int | None = None
    plant_balance: float | None = None

    def validate(self) -> None:
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.family not in KINDS:
            raise ValueError(f"unknown instance kind {self.family!r}")
        if self.trials < 1 or self.amplify < 1:
            raise ValueError("trials and amplify must be positive")
        if self.family == "dense" and self.n > BRUTE_FORCE_CAP:
            raise ValueError(
                "dense instances have no recorded truth; the oracle covers "
                f"only n <= {BRUTE_FORCE_CAP}"
            )


@dataclass(frozen=True)
class VerifyReport:
    """Detection statistics for one solver on one instance family."""

    algorithm: str
    family: str
    n: int
    ell: int
    trials: int
    amplify: int
    yes_instances: int
    detected: int
    detection_rate: float
    ci_low: float
    ci_high: float
    false_positives: int
    agreement: float

    def to_text(self) -> str:
        lines = [
            f"algorithm: {self.algorithm}",
            f"family: {self.family}",
            f"n: {self.n}",
            f"ell: {self.ell}",
            f"trials: {self.trials}",
            f"amplify: {self.amplify}",
            f"yes_instances: {self.yes_instances}",
            f"detected: {self.detected}",
            f"detection_rate: {self.detection_rate:.6f}",
            f"detection_ci95: [{self.ci_low:.6f}, {self.ci_high:.6f}]",
            f"false_positives: {self.false_positives}",
            f"agreement: {self.agreement:.6f}",
        ]
        return "\n".join(lines) + "\n"


def verify_suite(cfg: VerifyConfig) -> VerifyReport:
    """Measure detection rate and false positives on a generated family.

    Ground truth comes from the family itself (planted kinds are yes with
    a recorded witness, no-instances are no) or from the exhaustive
    oracle for dense instances.  Every yes verdict is re-validated by
    summing its witness; a yes on a no-instance counts as a false
    positive — the report's consumer treats any nonzero count as failure.
    """
    cfg.validate()
    yes_instances = 0
    detected = 0
    false_positives = 0
    agree = 0
    ell_used: int | None = None
    for i in range(cfg.trials):
        inst_seed = derive_seed(cfg.master_seed, "inst", cfg.family, cfg.n, i)
        spec = GenSpec(
            kind=cfg.family,
            n=cfg.n,
            value_bits=cfg.value_bits,
            seed=inst_seed,
            plant_balance=cfg.plant_balance,
        )
        inst, mask = generate(spec)
        inst = _with_word_len(inst, cfg.ell)
        if ell_used is None:
            ell_used = inst.word_len
        truth = _known_truth(cfg.family, inst, mask)
        if truth is None:
            raise AssertionError("verify families always carry ground truth")
        if truth:
            yes_instances += 1
        reps = 1 if cfg.algorithm in SEED_INDEPENDENT else cfg.amplify
        answer = False
        for rep in range(reps):
            seed = derive_seed(cfg.master_seed, cfg.algorithm, inst_seed, rep)
            verdict = run_algorithm(cfg.algorithm, inst, rng_seed=seed)
            if _checked_answer(verdict, inst):
                answer = True
                break
        if answer and not truth:
            false_positives += 1
        if answer and truth:
            detected += 1
        if answer == truth:
            agree += 1
    rate = detected / yes_instances if yes_instances else 0.0
    lo, hi = _wilson(detected, yes_instances) if yes_instances else (0.0, 1.0)
    return VerifyReport(
        algorithm=cfg.algorithm,
        family=cfg.family,
        n=cfg.n,
        ell=ell_used if ell_used is not None else 0,
        trials=cfg.trials,
        amplify=cfg.amplify,
        yes_instances=yes_instances,
        detected=detected,
        detection_rate=rate,
        ci_low=lo,
        ci_high=hi,
        false_positives=false_positives,
        agreement=agree / cfg.trials,
    )
