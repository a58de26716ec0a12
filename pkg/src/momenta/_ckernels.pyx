# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled word kernels; same contract as ``_pykernels``."""


cdef tuple _word_mul(tuple a, tuple b, int[:] exps, int n, int d2, bint herm, long *phase_out):
    cdef Py_ssize_t ia = 0, t
    cdef Py_ssize_t la = len(a), lb = len(b), sb
    cdef long phase = 0
    cdef int i, j, p, q
    cdef list out
    cdef tuple lt
    if la == 0:
        phase_out[0] = 0
        return b
    if lb == 0:
        phase_out[0] = 0
        return a
    out = []
    for sb in range(lb):
        lt = <tuple>b[sb]
        j = lt[0]
        q = lt[1]
        while ia < la and (<tuple>a[ia])[0] < j:
            out.append(a[ia])
            ia += 1
        for t in range(ia, la):
            lt = <tuple>a[t]
            i = lt[0]
            if i > j:
                p = lt[1]
                phase += 2 * exps[i * n + j] * p * q
        if ia < la and (<tuple>a[ia])[0] == j:
            p = (<tuple>a[ia])[1] + q
            if herm:
                p = p % 2
            if p:
                out.append((j, p))
            ia += 1
        else:
            out.append(b[sb])
    while ia < la:
        out.append(a[ia])
        ia += 1
    phase_out[0] = phase % d2
    if phase_out[0] < 0:
        phase_out[0] += d2
    return tuple(out)


def word_mul(tuple a, tuple b, int[:] exps, int n, int d2, bint herm):
    cdef long ph = 0
    cdef tuple w = _word_mul(a, b, exps, n, d2, herm, &ph)
    return w, ph


def word_star(tuple a, int[:] exps, int n, int d2, bint herm):
    cdef long phase = 0
    cdef Py_ssize_t s, t, la = len(a)
    cdef int i, j, p, q
    for s in range(la):
        i = (<tuple>a[s])[0]
        p = (<tuple>a[s])[1]
        for t in range(s + 1, la):
            j = (<tuple>a[t])[0]
            q = (<tuple>a[t])[1]
            phase += 2 * exps[j * n + i] * p * q
    phase = phase % d2
    if phase < 0:
        phase += d2
    if herm:
        return a, phase
    return tuple([(lt[0], -lt[1]) for lt in a]), phase


def entry_block(list rows, list cols, int[:] exps, int n, int d2, bint herm, bint upper,
                dict table=None):
    cdef Py_ssize_t r, c, start, nr = len(rows), nc = len(cols)
    cdef long p2 = 0
    cdef long ph
    cdef tuple ws, es, w, e, prod, key, row, col
    cdef object cid
    cdef list keys = [], phases = []
    for r in range(nr):
        row = <tuple>rows[r]
        ws = <tuple>row[0]
        es = <tuple>row[1]
        ph = row[2]
        start = r if upper else 0
        for c in range(start, nc):
            col = <tuple>cols[c]
            w = <tuple>col[0]
            e = <tuple>col[1]
            prod = _word_mul(ws, w, exps, n, d2, herm, &p2)
            if len(prod):
                key = tuple(sorted(es + e + (prod,)))
            elif len(es) and len(e):
                key = tuple(sorted(es + e))
            elif len(es):
                key = es
            else:
                key = e
            if table is not None:
                cid = table.get(key)
                if cid is None:
                    cid = len(table)
                    table[key] = cid
                keys.append(cid)
            else:
                keys.append(key)
            phases.append((ph + p2) % d2)
    return keys, phases
