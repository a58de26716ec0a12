"""Pure-Python word kernels; mirrors ``_ckernels.pyx`` line for line.

A canonical word is a tuple of ``(index, power)`` pairs with strictly
increasing indices and non-zero powers.  Phases are integers mod ``2d``
standing for ``exp(i pi k / d)``; ``exps`` is the flattened ``n*n`` table of
commutation exponents, so swapping ``a_i^p`` past ``a_j^q`` costs
``2 * e_ij * p * q``.
"""


def word_mul(a, b, exps, n, d2, herm):
    if not a:
        return b, 0
    if not b:
        return a, 0
    phase = 0
    out = []
    ia = 0
    la = len(a)
    for j, q in b:
        # letters of ``a`` with index > j must move right past a_j^q
        while ia < la and a[ia][0] < j:
            out.append(a[ia])
            ia += 1
        for t in range(ia, la):
            i, p = a[t]
            if i > j:
                phase += 2 * exps[i * n + j] * p * q
        if ia < la and a[ia][0] == j:
            p = a[ia][1] + q
            if herm:
                p %= 2
            if p:
                out.append((j, p))
            ia += 1
        else:
            out.append((j, q))
    while ia < la:
        out.append(a[ia])
        ia += 1
    return tuple(out), phase % d2


def word_star(a, exps, n, d2, herm):
    phase = 0
    la = len(a)
    for s in range(la):
        i, p = a[s]
        for t in range(s + 1, la):
            j, q = a[t]
            phase += 2 * exps[j * n + i] * p * q
    if herm:
        return a, phase % d2
    return tuple((i, -p) for i, p in a), phase % d2


def entry_block(rows, cols, exps, n, d2, herm, upper, table=None):
    """Scalar ``<u* v>`` keys for every row/column pair.

    ``rows`` holds ``(word_star, expectations_star, phase)`` for each left
    index monomial (already involuted), ``cols`` holds ``(word, expectations)``.
    With ``upper`` only pairs ``c >= r`` are produced, row-major.
    Returns ``(keys, phases)``; if ``table`` is a dict, keys are interned
    into it and their integer ids are returned instead.
    """
    keys = []
    phases = []
    for r in range(len(rows)):
        ws, es, ph = rows[r]
        start = r if upper else 0
        for c in range(start, len(cols)):
            w, e = cols[c]
            prod, p2 = word_mul(ws, w, exps, n, d2, herm)
            if prod:
                key = tuple(sorted(es + e + (prod,)))
            elif es and e:
                key = tuple(sorted(es + e))
            else:
                key = es or e
            if table is not None:
                key = table.setdefault(key, len(table))
            keys.append(key)
            phases.append((ph + p2) % d2)
    return keys, phases
