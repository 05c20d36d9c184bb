"""Exact subset-sum solvers that trade word length for running time.

The library implements a ladder of worst-case decision procedures for
subset sum — exhaustive scan, a reachability table, half-enumeration with
a sorted two-pointer merge, a zero-error hashed variant that packs many
hash values into single machine words, and two randomized core-splitting
solvers that sample residue classes and reduce collision testing to a
set-disjointness scan on packed words — together with the instrumented
word-RAM simulator used to measure their charged operation counts, the
numeric machinery that solves the exponent-balancing equations behind the
parameter choices, and reproducible instance generators, experiment
suites, and a command-line interface.

Hot inner loops run in a compiled extension when it is available; set
``LOGSHAVE_FORCE_PY=1`` before import to force the pure-Python paths.
Both produce bit-identical verdicts and random streams.
"""
from ._rng import SplitMix64, derive_seed, is_prime
from .baseline import (
    BitPackConfig,
    Partition,
    bit_packing,
    bit_packing_advance,
    canonical_partition,
    meet_in_the_middle,
    mitm_two_pointer,
)
from .constants import (
    ConstantSet,
    ConvergenceError,
    boundary_rho,
    chain_factor,
    curves_csv,
    emit_curves,
    entropy,
    max_speedup_exponent,
    solve_base_constants,
    solve_case_constants,
)
from .core import (
    Instance,
    SizeCapError,
    Solution,
    Verdict,
    brute_force,
    decide_to_search,
    default_word_len,
    dp_bellman,
    instance_from_text,
    instance_to_text,
)
from .enumeration import (
    EnumerationCapError,
    ResidueSplit,
    SumList,
    enumerate_indices,
    enumerate_with_core,
    merge_sorted,
    residue_split,
    restricted_enumeration,
    sorted_sum_enumeration,
)
from .harness import (
    ALGORITHMS,
    KINDS,
    BenchRow,
    GenSpec,
    RunConfig,
    VerifyConfig,
    VerifyReport,
    generate,
    run_algorithm,
    run_suite,
    verify_suite,
)
from .hashing import PseudolinearHash, default_out_bits, draw_hash, hash_eval
from .representation import (
    RepParams,
    annotate_good_residue,
    packed_representation_ov,
    prime_residue_spread,
    representation_ov,
    sample_prime,
    select_c,
    select_d,
)
from .wordram import (
    Machine,
    MemoTable,
    PackedWord,
    QuarterCatalog,
    WordLayoutError,
    build_memo,
    hash_ov_word,
    ov_word,
    pack_values,
    packed_hash_compare,
    unpack_word,
)

__version__ = "0.1.0"


def backend_name() -> str:
    """Which kernel backend this process is using: "native" or "python"."""
    from ._backend import BACKEND

    return BACKEND


__all__ = [
    "ALGORITHMS",
    "BenchRow",
    "BitPackConfig",
    "ConstantSet",
    "ConvergenceError",
    "EnumerationCapError",
    "GenSpec",
    "Instance",
    "KINDS",
    "Machine",
    "MemoTable",
    "PackedWord",
    "Partition",
    "PseudolinearHash",
    "QuarterCatalog",
    "RepParams",
    "ResidueSplit",
    "RunConfig",
    "SizeCapError",
    "Solution",
    "SplitMix64",
    "SumList",
    "Verdict",
    "VerifyConfig",
    "VerifyReport",
    "WordLayoutError",
    "annotate_good_residue",
    "backend_name",
    "bit_packing",
    "bit_packing_advance",
    "boundary_rho",
    "brute_force",
    "build_memo",
    "canonical_partition",
    "chain_factor",
    "curves_csv",
    "decide_to_search",
    "default_out_bits",
    "default_word_len",
    "derive_seed",
    "dp_bellman",
    "draw_hash",
    "emit_curves",
    "entropy",
    "enumerate_indices",
    "enumerate_with_core",
    "generate",
    "hash_eval",
    "hash_ov_word",
    "instance_from_text",
    "instance_to_text",
    "is_prime",
    "max_speedup_exponent",
    "meet_in_the_middle",
    "merge_sorted",
    "mitm_two_pointer",
    "ov_word",
    "pack_values",
    "packed_hash_compare",
    "packed_representation_ov",
    "prime_residue_spread",
    "representation_ov",
    "residue_split",
    "restricted_enumeration",
    "run_algorithm",
    "run_suite",
    "sample_prime",
    "select_c",
    "select_d",
    "solve_base_constants",
    "solve_case_constants",
    "sorted_sum_enumeration",
    "unpack_word",
    "verify_suite",
]
