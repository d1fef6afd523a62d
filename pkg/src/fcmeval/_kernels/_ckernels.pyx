# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled similarity kernels.

Mirrors pure.py operation-for-operation; keep the two in lockstep. The
parity test suite compares both backends on random inputs.
"""

from libc.math cimport exp, log
from libc.stdlib cimport free, malloc
from libc.string cimport memset

ALIGN_DP_LIMIT = 12

cdef int _ALIGN_DP_LIMIT = 12


cdef int* _to_int_array(object seq, Py_ssize_t n) except NULL:
    cdef int* arr = <int*> malloc(n * sizeof(int) if n > 0 else sizeof(int))
    if arr == NULL:
        raise MemoryError()
    cdef Py_ssize_t i
    for i in range(n):
        arr[i] = seq[i]
    return arr


def bleu_kernel(object cand, object ref, int max_n, double eps):
    """Geometric mean of clipped n-gram precisions times the brevity penalty."""
    cdef Py_ssize_t c = len(cand)
    if c == 0:
        return 0.0
    cdef Py_ssize_t r = len(ref)
    cdef int* ca = _to_int_array(cand, c)
    cdef int* ra = NULL
    cdef int top_n, n
    cdef Py_ssize_t a, b, k
    cdef int total, matched, c_count, r_count
    cdef bint is_first, equal
    cdef double log_sum = 0.0
    cdef double numerator, score
    try:
        ra = _to_int_array(ref, r)
        top_n = max_n if max_n < <int> c else <int> c
        for n in range(1, top_n + 1):
            total = <int> c - n + 1
            matched = 0
            for a in range(total):
                # only count each distinct candidate n-gram once
                is_first = True
                for b in range(a):
                    equal = True
                    for k in range(n):
                        if ca[a + k] != ca[b + k]:
                            equal = False
                            break
                    if equal:
                        is_first = False
                        break
                if not is_first:
                    continue
                c_count = 0
                for b in range(total):
                    equal = True
                    for k in range(n):
                        if ca[a + k] != ca[b + k]:
                            equal = False
                            break
                    if equal:
                        c_count += 1
                r_count = 0
                for b in range(r - n + 1):
                    equal = True
                    for k in range(n):
                        if ca[a + k] != ra[b + k]:
                            equal = False
                            break
                    if equal:
                        r_count += 1
                matched += c_count if c_count < r_count else r_count
            numerator = matched if matched > 0 else eps
            log_sum += log(numerator / total)
        score = exp(log_sum / top_n)
        if c < r:
            score *= exp(1.0 - (<double> r) / (<double> c))
        return score
    finally:
        free(ca)
        if ra != NULL:
            free(ra)


def rouge1_kernel(object cand, object ref):
    """Unigram-overlap F-measure: 2m / (|cand| + |ref|) with clipped m."""
    cdef Py_ssize_t c = len(cand)
    cdef Py_ssize_t r = len(ref)
    if c == 0 and r == 0:
        return 1.0
    if c == 0 or r == 0:
        return 0.0
    cdef int* ca = _to_int_array(cand, c)
    cdef int* ra = NULL
    cdef Py_ssize_t a, b
    cdef int matched = 0, c_count, r_count
    cdef bint is_first
    try:
        ra = _to_int_array(ref, r)
        for a in range(c):
            is_first = True
            for b in range(a):
                if ca[b] == ca[a]:
                    is_first = False
                    break
            if not is_first:
                continue
            c_count = 0
            for b in range(c):
                if ca[b] == ca[a]:
                    c_count += 1
            r_count = 0
            for b in range(r):
                if ra[b] == ca[a]:
                    r_count += 1
            matched += c_count if c_count < r_count else r_count
        if matched == 0:
            return 0.0
        return 2.0 * matched / (<double> (c + r))
    finally:
        free(ca)
        if ra != NULL:
            free(ra)


cdef inline int _stage(int ce, int cs, int cy, int re_, int rs, int ry) nogil:
    if ce == re_:
        return 1
    if cs >= 0 and cs == rs:
        return 2
    if cy >= 0 and cy == ry:
        return 3
    return 0


# DP value encoding: ((n1*13 + n2)*13 + n3)*16 + (15 - chunks); -1 = unreachable.
DEF CHUNK_BASE = 16
DEF STAGE3_DELTA = 16
DEF STAGE2_DELTA = 16 * 13
DEF STAGE1_DELTA = 16 * 13 * 13


def meteor_align(object cand_exact, object cand_stem, object cand_syn,
                 object ref_exact, object ref_stem, object ref_syn):
    """Staged unigram alignment; returns (match count, chunk count)."""
    cdef Py_ssize_t n_cand = len(cand_exact)
    cdef Py_ssize_t n_ref = len(ref_exact)
    if n_cand == 0 or n_ref == 0:
        return (0, 0)

    cdef int* ce = _to_int_array(cand_exact, n_cand)
    cdef int* cs = NULL
    cdef int* cy = NULL
    cdef int* re_ = NULL
    cdef int* rs = NULL
    cdef int* ry = NULL
    cdef int* allowed = NULL
    cdef Py_ssize_t i, j
    try:
        cs = _to_int_array(cand_stem, n_cand)
        cy = _to_int_array(cand_syn, n_cand)
        re_ = _to_int_array(ref_exact, n_ref)
        rs = _to_int_array(ref_stem, n_ref)
        ry = _to_int_array(ref_syn, n_ref)
        allowed = <int*> malloc(n_cand * n_ref * sizeof(int))
        if allowed == NULL:
            raise MemoryError()
        for i in range(n_cand):
            for j in range(n_ref):
                allowed[i * n_ref + j] = _stage(ce[i], cs[i], cy[i], re_[j], rs[j], ry[j])
        if n_ref > _ALIGN_DP_LIMIT:
            return _greedy_align(allowed, <int> n_cand, <int> n_ref)
        return _dp_align(allowed, <int> n_cand, <int> n_ref)
    finally:
        free(ce)
        if cs != NULL: free(cs)
        if cy != NULL: free(cy)
        if re_ != NULL: free(re_)
        if rs != NULL: free(rs)
        if ry != NULL: free(ry)
        if allowed != NULL: free(allowed)


cdef tuple _dp_align(int* allowed, int n_cand, int n_ref):
    cdef int n_states = (1 << n_ref) * (n_ref + 1)
    cdef int* cur = <int*> malloc(n_states * sizeof(int))
    cdef int* nxt = <int*> malloc(n_states * sizeof(int))
    cdef int* tmp
    cdef int i, j, mask, last, stage, value, new_value, idx, best, mhi
    cdef int n1, n2, n3
    if cur == NULL or nxt == NULL:
        if cur != NULL: free(cur)
        if nxt != NULL: free(nxt)
        raise MemoryError()
    try:
        memset(cur, 0xFF, n_states * sizeof(int))  # all -1
        cur[0 * (n_ref + 1) + n_ref] = 15  # (0,0,0) matches, 0 chunks
        for i in range(n_cand):
            memset(nxt, 0xFF, n_states * sizeof(int))
            for mask in range(1 << n_ref):
                for last in range(n_ref + 1):
                    value = cur[mask * (n_ref + 1) + last]
                    if value < 0:
                        continue
                    # candidate position i left unmatched
                    idx = mask * (n_ref + 1) + n_ref
                    if nxt[idx] < value:
                        nxt[idx] = value
                    for j in range(n_ref):
                        stage = allowed[i * n_ref + j]
                        if stage == 0 or (mask >> j) & 1:
                            continue
                        if stage == 1:
                            new_value = value + STAGE1_DELTA
                        elif stage == 2:
                            new_value = value + STAGE2_DELTA
                        else:
                            new_value = value + STAGE3_DELTA
                        if last == n_ref or j != last + 1:
                            new_value -= 1  # one more chunk
                        idx = (mask | (1 << j)) * (n_ref + 1) + j
                        if nxt[idx] < new_value:
                            nxt[idx] = new_value
            tmp = cur
            cur = nxt
            nxt = tmp
        best = -1
        for idx in range(n_states):
            if cur[idx] > best:
                best = cur[idx]
        mhi = best // CHUNK_BASE
        n3 = mhi % 13
        n2 = (mhi // 13) % 13
        n1 = mhi // 169
        return (n1 + n2 + n3, 15 - (best % CHUNK_BASE))
    finally:
        free(cur)
        free(nxt)


cdef tuple _greedy_align(int* allowed, int n_cand, int n_ref):
    cdef int* cand_match = <int*> malloc(n_cand * sizeof(int))
    cdef int* ref_used = <int*> malloc(n_ref * sizeof(int))
    cdef int stage, i, j, matches, chunks, prev_i, prev_j
    if cand_match == NULL or ref_used == NULL:
        if cand_match != NULL: free(cand_match)
        if ref_used != NULL: free(ref_used)
        raise MemoryError()
    try:
        for i in range(n_cand):
            cand_match[i] = -1
        memset(ref_used, 0, n_ref * sizeof(int))
        for stage in range(1, 4):
            for i in range(n_cand):
                if cand_match[i] >= 0:
                    continue
                for j in range(n_ref):
                    if not ref_used[j] and 0 < allowed[i * n_ref + j] <= stage:
                        cand_match[i] = j
                        ref_used[j] = 1
                        break
        matches = 0
        chunks = 0
        prev_i = -2
        prev_j = -2
        for i in range(n_cand):
            j = cand_match[i]
            if j < 0:
                continue
            matches += 1
            if i != prev_i + 1 or j != prev_j + 1:
                chunks += 1
            prev_i = i
            prev_j = j
        if matches == 0:
            return (0, 0)
        return (matches, chunks)
    finally:
        free(cand_match)
        free(ref_used)
