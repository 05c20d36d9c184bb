# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the uninstrumented decision paths.

Each ``*_decide`` function mirrors, step for step, the instrumented
Python implementation of the same algorithm — including the exact
pseudo-random stream (generator, rejection sampling, draw order) — so
that verdicts and witnesses are bit-identical across backends.  Inputs
outside a kernel's supported envelope return ``NotImplemented`` and the
caller falls through to the instrumented path.

Python-level helpers (constants solving, partition layout, catalogs,
the exact preprocessing searches) are reused from the package rather
than re-implemented: they are cheap per call, and sharing them removes
any chance of semantic drift.  Only the hot loops are C.
"""

from libc.stdlib cimport malloc, free, qsort
from libc.stdint cimport int64_t, uint64_t

import math

from ._rng import derive_seed
from .baseline import BitPackConfig, canonical_partition
from .constants import ConvergenceError, solve_base_constants, solve_case_constants
from .core import Instance
from .enumeration import enumerate_indices
from .representation import (
    MIN_C_SIZE,
    _budgets,
    _catalog_shifts,
    preprocess_additive,
    preprocess_unbalanced,
    rep_c_size,
)
from .wordram import Machine, QuarterCatalog

cdef extern from *:
    ctypedef unsigned long long u128 "__uint128_t"
    int __builtin_ctzll(unsigned long long x) nogil
    int __builtin_clzll(unsigned long long x) nogil

cdef uint64_t GOLDEN = <uint64_t>0x9E3779B97F4A7C15
cdef uint64_t MIX1 = <uint64_t>0xBF58476D1CE4E5B9
cdef uint64_t MIX2 = <uint64_t>0x94D049BB133111EB

DEF MAX_HALF_BITS = 21
DEF MAX_N = 44
DEF SUM_LIMIT_BITS = 62


# ---------------------------------------------------------------- rng

cdef inline uint64_t rng_next(uint64_t* state) noexcept nogil:
    cdef uint64_t z
    state[0] = state[0] + GOLDEN
    z = state[0]
    z ^= z >> 30
    z = z * MIX1
    z ^= z >> 27
    z = z * MIX2
    z ^= z >> 31
    return z


cdef inline uint64_t rng_below(uint64_t* state, uint64_t bound) noexcept nogil:
    # same rejection scheme as the Python generator: draw the top
    # bit_length(bound-1) bits of one 64-bit output until < bound
    cdef int nbits
    cdef uint64_t v
    if bound <= 1:
        return 0
    nbits = 64 - __builtin_clzll(bound - 1)
    while True:
        v = rng_next(state) >> (64 - nbits)
        if v < bound:
            return v


# ---------------------------------------------------------- primality

cdef inline uint64_t mulmod(uint64_t a, uint64_t b, uint64_t m) noexcept nogil:
    return <uint64_t>((<u128>a * <u128>b) % <u128>m)


cdef inline uint64_t powmod(uint64_t b, uint64_t e, uint64_t m) noexcept nogil:
    cdef uint64_t r = 1
    b = b % m
    while e:
        if e & 1:
            r = mulmod(r, b, m)
        b = mulmod(b, b, m)
        e >>= 1
    return r


cdef bint c_is_prime(uint64_t num) noexcept nogil:
    cdef uint64_t sp[12]
    cdef uint64_t d, x
    cdef int k, i, r
    cdef bint composite_escape
    sp[0] = 2; sp[1] = 3; sp[2] = 5; sp[3] = 7; sp[4] = 11; sp[5] = 13
    sp[6] = 17; sp[7] = 19; sp[8] = 23; sp[9] = 29; sp[10] = 31; sp[11] = 37
    if num < 2:
        return False
    for k in range(12):
        if num % sp[k] == 0:
            return num == sp[k]
    d = num - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for k in range(12):
        x = powmod(sp[k], d, num)
        if x == 1 or x == num - 1:
            continue
        composite_escape = True
        for i in range(r - 1):
            x = mulmod(x, x, num)
            if x == num - 1:
                composite_escape = False
                break
        if composite_escape:
            return False
    return True


# ------------------------------------------------------- enumeration

cdef struct SumArr:
    int64_t* s
    uint64_t* m
    Py_ssize_t n


cdef void free_arr(SumArr* a) noexcept:
    if a.s != NULL:
        free(a.s)
        a.s = NULL
    if a.m != NULL:
        free(a.m)
        a.m = NULL
    a.n = 0


cdef int enum_build(int64_t* vals, object order, SumArr* out) except -1:
    """Sorted distinct subset sums with masks, absorption-merged.

    ``order`` lists global indices already sorted ascending by value
    (stable).  Tie-breaking and dedup (keep the existing mask) match
    the instrumented enumeration exactly.
    """
    cdef Py_ssize_t h = len(order)
    cdef Py_ssize_t total = (<Py_ssize_t>1) << h
    cdef int64_t* cs = <int64_t*>malloc(total * sizeof(int64_t))
    cdef uint64_t* cm = <uint64_t*>malloc(total * sizeof(uint64_t))
    cdef int64_t* xs = <int64_t*>malloc(total * sizeof(int64_t))
    cdef uint64_t* xm = <uint64_t*>malloc(total * sizeof(uint64_t))
    cdef int64_t* ts
    cdef uint64_t* tm
    cdef Py_ssize_t curn, pos, i, j, outn
    cdef int64_t v, sval
    cdef uint64_t bit, mval
    cdef int gi
    cdef bint take_left
    if cs == NULL or cm == NULL or xs == NULL or xm == NULL:
        if cs != NULL: free(cs)
        if cm != NULL: free(cm)
        if xs != NULL: free(xs)
        if xm != NULL: free(xm)
        raise MemoryError()
    cs[0] = 0
    cm[0] = 0
    curn = 1
    for pos in range(h):
        gi = order[pos]
        v = vals[gi]
        bit = (<uint64_t>1) << gi
        i = 0
        j = 0
        outn = 0
        while i < curn or j < curn:
            if i >= curn:
                take_left = False
            elif j >= curn:
                take_left = True
            else:
                take_left = cs[i] <= cs[j] + v
            if take_left:
                sval = cs[i]
                mval = cm[i]
                i += 1
            else:
                sval = cs[j] + v
                mval = cm[j] | bit
                j += 1
            if outn == 0 or xs[outn - 1] != sval:
                xs[outn] = sval
                xm[outn] = mval
                outn += 1
        ts = cs; cs = xs; xs = ts
        tm = cm; cm = xm; xm = tm
        curn = outn
    free(xs)
    free(xm)
    out.s = cs
    out.m = cm
    out.n = curn
    return 0


cdef Py_ssize_t two_pointer(int64_t* sa, Py_ssize_t lo_a, Py_ssize_t hi_a,
                            int64_t* sb, Py_ssize_t lo_b, Py_ssize_t hi_b,
                            int64_t target, Py_ssize_t* out_j) noexcept nogil:
    cdef Py_ssize_t i = lo_a
    cdef Py_ssize_t j = hi_b - 1
    cdef int64_t s
    while i < hi_a and j >= lo_b:
        s = sa[i] + sb[j]
        if s == target:
            out_j[0] = j
            return i
        if s < target:
            i += 1
        else:
            j -= 1
    return -1


cdef Py_ssize_t bsearch_i64(int64_t* arr, Py_ssize_t n, int64_t key) noexcept nogil:
    cdef Py_ssize_t lo = 0
    cdef Py_ssize_t hi = n
    cdef Py_ssize_t mid
    while lo < hi:
        mid = (lo + hi) // 2
        if arr[mid] < key:
            lo = mid + 1
        else:
            hi = mid
    if lo < n and arr[lo] == key:
        return lo
    return -1


cdef int fill_values(object values, int64_t** out, Py_ssize_t n) except -1:
    cdef int64_t* v = <int64_t*>malloc(n * sizeof(int64_t))
    cdef Py_ssize_t i
    if v == NULL:
        raise MemoryError()
    for i in range(n):
        v[i] = values[i]
    out[0] = v
    return 0


def _sorted_by_value(values, idx):
    return sorted(idx, key=lambda i: values[i])


cdef object gate_common(object values, object target, Py_ssize_t n):
    """Shared envelope checks; returns the total or None when unsupported."""
    cdef object total = 0
    if n < 1 or n > MAX_N:
        return None
    for v in values:
        total += v
    if total >= (1 << SUM_LIMIT_BITS):
        return None
    if target < 0 or target >= (1 << SUM_LIMIT_BITS):
        return None
    return total


# ------------------------------------------------------- brute force

def brute_force_scan(values, target):
    """First subset mask summing to target along a reflected-code walk."""
    cdef Py_ssize_t n = len(values)
    cdef int64_t* v = NULL
    cdef uint64_t mask = 0
    cdef uint64_t k, lim, bit
    cdef int64_t acc = 0
    cdef int64_t tgt
    cdef int b
    if target == 0:
        return 0
    if target < 0:
        return None
    if n < 1 or n > 30 or gate_common(values, target, n) is None:
        from . import _kernels_py

        return _kernels_py.brute_force_scan(values, target)
    tgt = target
    fill_values(values, &v, n)
    lim = (<uint64_t>1) << n
    k = 1
    try:
        while k < lim:
            b = __builtin_ctzll(k)
            bit = (<uint64_t>1) << b
            if mask & bit:
                mask ^= bit
                acc -= v[b]
            else:
                mask |= bit
                acc += v[b]
            if acc == tgt:
                return mask
            k += 1
        return None
    finally:
        free(v)


# ---------------------------------------------------- meet in middle

cdef object mim_core(object values, object target, int word_len):
    """Exact canonical-halves decision; mask or None (never NotImplemented)."""
    cdef Py_ssize_t n = len(values)
    cdef int64_t* v = NULL
    cdef SumArr la
    cdef SumArr lb
    cdef Py_ssize_t ii, jj
    la.s = NULL; la.m = NULL; la.n = 0
    lb.s = NULL; lb.m = NULL; lb.n = 0
    if n < 2:
        if n == 1 and values[0] == target:
            return 1
        return None
    part = canonical_partition(n)
    order_a = _sorted_by_value(values, part.a_idx)
    order_b = _sorted_by_value(values, part.b_idx)
    fill_values(values, &v, n)
    try:
        enum_build(v, order_a, &la)
        enum_build(v, order_b, &lb)
        ii = two_pointer(la.s, 0, la.n, lb.s, 0, lb.n, <int64_t>target, &jj)
        if ii < 0:
            return None
        return la.m[ii] | lb.m[jj]
    finally:
        free_arr(&la)
        free_arr(&lb)
        free(v)


def mim_decide(values, target, word_len):
    cdef Py_ssize_t n = len(values)
    if n < 2:
        return NotImplemented
    if gate_common(values, target, n) is None:
        return NotImplemented
    if (n + 1) // 2 > MAX_HALF_BITS:
        return NotImplemented
    return mim_core(values, target, word_len)


# -------------------------------------------------------- bit packing

cdef inline uint64_t hash_eval_c(u128 u, int64_t y, int ell, int m,
                                 u128 emask) noexcept nogil:
    cdef u128 prod = (u * <u128>(<uint64_t>y)) & emask
    return <uint64_t>(prod >> (ell - m))


cdef u128 draw_multiplier(uint64_t* state, int ell) noexcept nogil:
    # replicates: u = (next_bits(ell-1) << 1) | 1
    cdef uint64_t w0, w1
    cdef u128 x
    if ell <= 65:
        w0 = rng_next(state)
        if ell == 65:
            return ((<u128>w0) << 1) | 1
        return <u128>(((w0 >> (64 - (ell - 1))) << 1) | 1)
    w0 = rng_next(state)
    w1 = rng_next(state)
    x = (((<u128>w0) << 64) | <u128>w1) >> (128 - (ell - 1))
    return (x << 1) | 1


def bitpack_decide(values, target, word_len, rng_seed):
    cdef Py_ssize_t n = len(values)
    cdef int ell = word_len
    cdef int64_t* v = NULL
    cdef SumArr wd
    cdef SumArr la
    cdef SumArr lb
    cdef uint64_t* ha = NULL
    cdef uint64_t* hb = NULL
    cdef uint64_t state, ht, tm, tm1, maskm
    cdef u128 u_big, emask
    cdef Py_ssize_t cap, nwa, nwb, d_pos, i, j, lo_a, hi_a2, lo_b, hi_b2, ii, jj
    cdef int64_t t_prime, a_max, b_min
    cdef int m
    cdef bint pred
    wd.s = NULL; wd.m = NULL; wd.n = 0
    la.s = NULL; la.m = NULL; la.n = 0
    lb.s = NULL; lb.m = NULL; lb.n = 0

    if ell < 8 or ell > 128:
        return NotImplemented
    if gate_common(values, target, n) is None:
        return NotImplemented
    cfg = BitPackConfig()
    m_py, d_size = cfg.resolved(ell)
    m = m_py
    if m > 63 or n < d_size + 2:
        return NotImplemented
    part = canonical_partition(n, c_size=0, d_size=d_size)
    if max(len(part.a_idx), len(part.b_idx), len(part.d_idx)) > MAX_HALF_BITS:
        return NotImplemented

    state = derive_seed(rng_seed, "bitpack-hash")
    u_big = draw_multiplier(&state, ell)
    if ell == 128:
        emask = (<u128>0) - 1
    else:
        emask = ((<u128>1) << ell) - 1

    order_d = _sorted_by_value(values, part.d_idx)
    order_a = _sorted_by_value(values, part.a_idx)
    order_b = _sorted_by_value(values, part.b_idx)
    fill_values(values, &v, n)
    try:
        enum_build(v, order_d, &wd)
        enum_build(v, order_a, &la)
        enum_build(v, order_b, &lb)
        ha = <uint64_t*>malloc(la.n * sizeof(uint64_t))
        hb = <uint64_t*>malloc(lb.n * sizeof(uint64_t))
        if ha == NULL or hb == NULL:
            raise MemoryError()
        for i in range(la.n):
            ha[i] = hash_eval_c(u_big, la.s[i], ell, m, emask)
        for j in range(lb.n):
            hb[j] = hash_eval_c(u_big, lb.s[j], ell, m, emask)
        cap = ell // m
        if cap < 1:
            cap = 1
        nwa = (la.n + cap - 1) // cap
        nwb = (lb.n + cap - 1) // cap
        maskm = ((<uint64_t>1) << m) - 1

        for d_pos in range(wd.n):
            t_prime = <int64_t>target - wd.s[d_pos]
            if t_prime < 0:
                continue
            ht = hash_eval_c(u_big, t_prime, ell, m, emask)
            tm = ht & maskm
            tm1 = (ht - 1) & maskm
            i = 0
            j = nwb - 1
            while i < nwa and j >= 0:
                lo_a = i * cap
                hi_a2 = (i + 1) * cap
                if hi_a2 > la.n:
                    hi_a2 = la.n
                lo_b = j * cap
                hi_b2 = (j + 1) * cap
                if hi_b2 > lb.n:
                    hi_b2 = lb.n
                pred = False
                for ii in range(lo_a, hi_a2):
                    for jj in range(lo_b, hi_b2):
                        if ((ha[ii] + hb[jj]) & maskm) == tm or (
                            (ha[ii] + hb[jj]) & maskm
                        ) == tm1:
                            pred = True
                            break
                    if pred:
                        break
                if pred:
                    ii = two_pointer(
                        la.s, lo_a, hi_a2, lb.s, lo_b, hi_b2, t_prime, &jj
                    )
                    if ii >= 0:
                        return la.m[ii] | lb.m[jj] | wd.m[d_pos]
                a_max = la.s[hi_a2 - 1]
                b_min = lb.s[lo_b]
                if a_max + b_min < t_prime:
                    i += 1
                else:
                    j -= 1
        return None
    finally:
        free_arr(&wd)
        free_arr(&la)
        free_arr(&lb)
        if ha != NULL:
            free(ha)
        if hb != NULL:
            free(hb)
        free(v)


# ----------------------------------------------- representation + OV

cdef struct CoupleEnt:
    int64_t s
    uint64_t b


cdef int cmp_ent(const void* pa, const void* pb) noexcept nogil:
    cdef int64_t x = (<const CoupleEnt*>pa).s
    cdef int64_t y = (<const CoupleEnt*>pb).s
    if x < y:
        return -1
    if x > y:
        return 1
    return 0


cdef struct Csr:
    Py_ssize_t* start      # p + 1 offsets
    Py_ssize_t* pos        # positions into the source list, bucketed
    Py_ssize_t max_bucket


cdef void free_csr(Csr* c) noexcept:
    if c.start != NULL:
        free(c.start)
        c.start = NULL
    if c.pos != NULL:
        free(c.pos)
        c.pos = NULL


cdef int build_csr(SumArr* lst, int64_t p, Csr* out) except -1:
    cdef Py_ssize_t i, b
    cdef Py_ssize_t* cnt = <Py_ssize_t*>malloc((p + 1) * sizeof(Py_ssize_t))
    cdef Py_ssize_t* pos = <Py_ssize_t*>malloc(lst.n * sizeof(Py_ssize_t))
    cdef Py_ssize_t* fill = NULL
    if cnt == NULL or pos == NULL:
        if cnt != NULL: free(cnt)
        if pos != NULL: free(pos)
        raise MemoryError()
    for i in range(p + 1):
        cnt[i] = 0
    for i in range(lst.n):
        cnt[lst.s[i] % p] += 1
    out.max_bucket = 0
    for i in range(p):
        if cnt[i] > out.max_bucket:
            out.max_bucket = cnt[i]
    # prefix sums into offsets
    cdef Py_ssize_t acc = 0, c
    for i in range(p):
        c = cnt[i]
        cnt[i] = acc
        acc += c
    cnt[p] = acc
    fill = <Py_ssize_t*>malloc((p + 1) * sizeof(Py_ssize_t))
    if fill == NULL:
        free(cnt)
        free(pos)
        raise MemoryError()
    for i in range(p + 1):
        fill[i] = cnt[i]
    for i in range(lst.n):
        b = lst.s[i] % p
        pos[fill[b]] = i
        fill[b] += 1
    free(fill)
    out.start = cnt
    out.pos = pos
    return 0


cdef Py_ssize_t gather_compress(SumArr* lst, Csr* csr, int64_t p, int64_t r,
                                int64_t* shifts, Py_ssize_t qn,
                                CoupleEnt* buf,
                                Py_ssize_t* created_out) noexcept nogil:
    """Couples with shifted sum ≡ r (mod p), sorted and OR-compressed."""
    cdef Py_ssize_t cnt = 0, qi, k, b0, b1, w
    cdef int64_t key
    for qi in range(qn):
        key = (r - shifts[qi]) % p
        if key < 0:
            key += p
        b0 = csr.start[key]
        b1 = csr.start[key + 1]
        for k in range(b0, b1):
            buf[cnt].s = lst.s[csr.pos[k]] + shifts[qi]
            buf[cnt].b = (<uint64_t>1) << qi
            cnt += 1
    created_out[0] = cnt
    if cnt > 1:
        qsort(buf, cnt, sizeof(CoupleEnt), cmp_ent)
    w = 0
    for k in range(cnt):
        if w > 0 and buf[w - 1].s == buf[k].s:
            buf[w - 1].b |= buf[k].b
        else:
            buf[w] = buf[k]
            w += 1
    return w


cdef Py_ssize_t couple_scan(CoupleEnt* ea, Py_ssize_t na,
                            CoupleEnt* eb, Py_ssize_t nb,
                            int64_t target, uint64_t* disj,
                            Py_ssize_t* out_j, int* out_qi,
                            int* out_qj) noexcept nogil:
    """Two-pointer over compressed couples; lowest disjoint pair on match."""
    cdef Py_ssize_t i = 0
    cdef Py_ssize_t j = nb - 1
    cdef int64_t s
    cdef uint64_t rem, hits
    cdef int qi
    while i < na and j >= 0:
        s = ea[i].s + eb[j].s
        if s == target:
            rem = ea[i].b
            while rem:
                qi = __builtin_ctzll(rem)
                hits = disj[qi] & eb[j].b
                if hits:
                    out_j[0] = j
                    out_qi[0] = qi
                    out_qj[0] = __builtin_ctzll(hits)
                    return i
                rem &= rem - 1
            i += 1
        elif s < target:
            i += 1
        else:
            j -= 1
    return -1


cdef int64_t sample_prime_c(uint64_t* state, int ell, double beta) except -1:
    """Twin of the prime sampler: same bounds, same rejection stream."""
    lo = math.ceil(ell ** (1.0 + beta / 2.0))
    hi = math.floor(2.0 * (ell ** (1.0 + beta / 2.0)))
    cdef uint64_t span = hi - lo + 1
    cdef uint64_t base_lo = lo
    cdef uint64_t cand
    while True:
        cand = base_lo + rng_below(state, span)
        if c_is_prime(cand):
            return <int64_t>cand


def repov_decide(values, target, word_len, rng_seed, c_s, c_k):
    cdef Py_ssize_t n = len(values)
    cdef int ell = word_len
    cdef uint64_t state
    cdef int64_t p, otarget, tot, r, rb_res, a_val, b_val
    cdef int64_t* v = NULL
    cdef int64_t* shifts = NULL
    cdef uint64_t* disj = NULL
    cdef uint64_t* gq = NULL
    cdef SumArr la
    cdef SumArr lb
    cdef Csr csr_a
    cdef Csr csr_b
    cdef CoupleEnt* buf_a = NULL
    cdef CoupleEnt* buf_b = NULL
    cdef Py_ssize_t qn, ia, ib, jj, na, nb, created_a, created_b
    cdef Py_ssize_t s_budget_c, k_cutoff_c, orient_s, orient_couples
    cdef int qi, qj, flipped
    cdef uint64_t mask, full_mask
    la.s = NULL; la.m = NULL; la.n = 0
    lb.s = NULL; lb.m = NULL; lb.n = 0
    csr_a.start = NULL; csr_a.pos = NULL
    csr_b.start = NULL; csr_b.pos = NULL

    if ell < 8 or ell > 4096:
        return NotImplemented
    total = gate_common(values, target, n)
    if total is None:
        return NotImplemented

    base = solve_base_constants()
    c_size = rep_c_size(ell, base.beta)
    if n < c_size + 2:
        if n < 2:
            if n == 1 and values[0] == target:
                return 1
            return None
        return mim_core(values, target, word_len)
    if (n - c_size + 1) // 2 > MAX_HALF_BITS:
        return NotImplemented

    state = derive_seed(rng_seed, "repov")
    p = sample_prime_c(&state, ell, base.beta)
    if p >= (1 << 26):
        return NotImplemented
    s_budget, k_cutoff = _budgets(
        n, ell, base.eps1, base.beta, base.lambda_, c_s, c_k
    )
    s_budget_c = s_budget
    k_cutoff_c = k_cutoff
    part = canonical_partition(n, c_size=c_size)
    c_idx = part.c_idx

    inst = Instance(values=tuple(values), target=target, word_len=ell)
    mach = Machine(ell, model="circuit")
    pre = preprocess_unbalanced(inst, c_idx, base.eps1, mach)
    if pre is not None:
        return pre.witness.subset_mask
    wc = enumerate_indices(inst.values, c_idx)
    if len(wc) <= (2**c_size) * (ell ** (-base.lambda_)):
        va = preprocess_additive(inst, c_idx, base.lambda_, mach)
        if va is not None:
            if va.answer:
                return va.witness.subset_mask
            return None

    q_max = max(0, math.floor((1.0 + base.eps2) * c_size / 4.0))
    catalog = QuarterCatalog(c_size, q_max)
    qn = len(catalog.masks)
    if qn > 64:
        return NotImplemented
    shifts_py = _catalog_shifts(values, c_idx, catalog)

    order_a = _sorted_by_value(values, part.a_idx)
    order_b = _sorted_by_value(values, part.b_idx)
    fill_values(values, &v, n)
    try:
        enum_build(v, order_a, &la)
        enum_build(v, order_b, &lb)
        build_csr(&la, p, &csr_a)
        build_csr(&lb, p, &csr_b)
        if qn * (csr_a.max_bucket + csr_b.max_bucket) > 8_000_000:
            return NotImplemented
        shifts = <int64_t*>malloc(qn * sizeof(int64_t))
        disj = <uint64_t*>malloc(qn * sizeof(uint64_t))
        gq = <uint64_t*>malloc(qn * sizeof(uint64_t))
        buf_a = <CoupleEnt*>malloc(
            (qn * csr_a.max_bucket + 1) * sizeof(CoupleEnt)
        )
        buf_b = <CoupleEnt*>malloc(
            (qn * csr_b.max_bucket + 1) * sizeof(CoupleEnt)
        )
        if (shifts == NULL or disj == NULL or gq == NULL
                or buf_a == NULL or buf_b == NULL):
            raise MemoryError()
        for qi in range(qn):
            shifts[qi] = shifts_py[qi]
            disj[qi] = catalog.disjoint_bitmaps[qi]
            mask = 0
            qmask = catalog.masks[qi]
            for k in range(c_size):
                if (qmask >> k) & 1:
                    mask |= (<uint64_t>1) << (<int>c_idx[k])
            gq[qi] = mask

        tot = total
        full_mask = ((<uint64_t>1) << n) - 1
        for flipped in range(2):
            otarget = <int64_t>target if flipped == 0 else tot - <int64_t>target
            if otarget < 0:
                continue
            orient_s = 0
            orient_couples = 0
            while orient_s < s_budget_c and orient_couples < k_cutoff_c:
                r = <int64_t>rng_below(&state, <uint64_t>p)
                orient_s += 1
                na = gather_compress(
                    &la, &csr_a, p, r, shifts, qn, buf_a, &created_a
                )
                rb_res = ((otarget % p) - r) % p
                if rb_res < 0:
                    rb_res += p
                nb = gather_compress(
                    &lb, &csr_b, p, rb_res, shifts, qn, buf_b, &created_b
                )
                orient_couples += created_a + created_b
                ia = couple_scan(
                    buf_a, na, buf_b, nb, otarget, disj, &jj, &qi, &qj
                )
                if ia >= 0:
                    a_val = buf_a[ia].s - shifts[qi]
                    b_val = buf_b[jj].s - shifts[qj]
                    ib = bsearch_i64(la.s, la.n, a_val)
                    jj = bsearch_i64(lb.s, lb.n, b_val)
                    if ib < 0 or jj < 0:
                        raise AssertionError("couple sum lost its source")
                    mask = la.m[ib] | lb.m[jj] | gq[qi] | gq[qj]
                    if flipped:
                        mask ^= full_mask
                    return mask
        return None
    finally:
        free_arr(&la)
        free_arr(&lb)
        free_csr(&csr_a)
        free_csr(&csr_b)
        if shifts != NULL: free(shifts)
        if disj != NULL: free(disj)
        if gq != NULL: free(gq)
        if buf_a != NULL: free(buf_a)
        if buf_b != NULL: free(buf_b)
        if v != NULL: free(v)


def packedrepov_decide(values, target, word_len, rng_seed, c_s, c_k):
    """Combined-solver kernel: handles the exact-fallback regime natively.

    The non-degenerate regimes (selected blocks, packed couple words)
    are left to the instrumented implementation; this kernel re-derives
    the identical case decision — same constants, same prime draw — and
    answers only when that decision lands on the exact half-list scan.
    """
    cdef Py_ssize_t n = len(values)
    cdef int ell = word_len
    cdef uint64_t state
    if ell < 8 or ell > 4096:
        return NotImplemented
    if gate_common(values, target, n) is None:
        return NotImplemented
    if (n + 1) // 2 > MAX_HALF_BITS:
        return NotImplemented

    base = solve_base_constants()
    lg = max(1.0, math.log2(ell))
    rho = math.log2(max(2, n)) / lg
    try:
        case_set = solve_case_constants(rho)
        beta_r = case_set.beta_rho
    except (ValueError, ConvergenceError):
        beta_r = base.beta

    state = derive_seed(rng_seed, "packedrepov")
    cdef int64_t p = sample_prime_c(&state, ell, beta_r)
    p_py = p
    residue_count = len({v % p_py for v in values})
    threshold = n / lg

    fallback = False
    if residue_count > threshold:
        c_target = math.floor(0.5 * math.log2(max(1.0, threshold)))
        d_target = max(1, round((2.0 - rho + beta_r / 2.0) * lg))
        if c_target < MIN_C_SIZE or n < c_target + d_target + 2:
            fallback = True
    else:
        d_size = max(1, round(lg))
        classes = {}
        for i, v in enumerate(values):
            classes.setdefault(v % p_py, []).append(i)
        big = max(classes, key=lambda rr: (len(classes[rr]), -rr))
        c_size = rep_c_size(ell, beta_r)
        if len(classes[big]) < d_size or n < c_size + d_size + 2:
            fallback = True
    if not fallback:
        return NotImplemented
    if n < 2:
        if n == 1 and values[0] == target:
            return 1
        return None
    return mim_core(values, target, word_len)
