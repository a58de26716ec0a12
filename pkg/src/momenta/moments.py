"""Symbolic moment matrices over state-monomial index sets.

Entries ``M(u, v) = <u* v>`` are canonicalized exactly; positions whose
scalars agree up to phase share an equality class.  Conjugation links each
class to the class of its adjoint, and :func:`real_embedding` turns the
complex structure into real decision variables for the SDP.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import kernels
from .algebra import (IDENTITY, StateMonomial, _context, conj_key, involution,
                      multiply, expectation_reduce, phase_value,
                      render, word_star)
from .graph import CommutationGraph

DEFAULT_INDEX_CAP = 5000


class IndexSetTooLarge(ValueError):
    def __init__(self, count: int, cap: int):
        super().__init__(f"index set would have {count} elements (cap {cap})")
        self.count = count
        self.cap = cap


@dataclass(frozen=True)
class IndexSet:
    kind: str
    level: int
    monomials: tuple[StateMonomial, ...]

    def __len__(self):
        return len(self.monomials)

    def is_prefix_of(self, other: "IndexSet") -> bool:
        return other.monomials[:len(self.monomials)] == self.monomials


# index sets -----------------------------------------------------------------

def build_theta_index_set(g: CommutationGraph, k: int) -> IndexSet:
    """``<a_i1*>...<a_ik*> a_i1...a_ik`` over increasing distinct indices, sizes 0..k."""
    if not 1 <= k <= max(g.n, 1):
        raise ValueError(f"need 1 <= k <= n={g.n}, got k={k}")
    star = 1 if g.hermitian else -1
    mons = []
    for size in range(k + 1):
        for subset in itertools.combinations(range(g.n), size):
            word = tuple((i, 1) for i in subset)
            exps = tuple(sorted(((i, star),) for i in subset))
            mons.append(StateMonomial(word, exps, 0))
    return IndexSet("theta", k, tuple(mons))


def _words_by_degree(g: CommutationGraph, max_deg: int) -> list[list[tuple]]:
    """Canonical non-identity words grouped by degree 1..max_deg."""
    out: list[list[tuple]] = [[] for _ in range(max_deg + 1)]
    powers = [1] if g.hermitian else [p for q in range(1, max_deg + 1) for p in (q, -q)]

    def rec(start: int, word: tuple, deg: int):
        if word:
            out[deg].append(word)
        for i in range(start, g.n):
            for p in powers:
                if deg + abs(p) <= max_deg:
                    rec(i + 1, word + ((i, p),), deg + abs(p))

    rec(0, (), 0)
    for lst in out:
        lst.sort()
    return out


def full_index_count(g: CommutationGraph, level: int) -> int:
    """Number of canonical state monomials of degree <= level, without building them."""
    words = [len(w) for w in _words_by_degree(g, level)]
    # multisets of non-identity words by total degree
    ms = [1] + [0] * level
    for t in range(1, level + 1):
        for _ in range(words[t]):
            for s in range(t, level + 1):
                ms[s] += ms[s - t]
    word_counts = [1] + words[1:]
    return sum(word_counts[a] * ms[s] for a in range(level + 1) for s in range(level + 1 - a))


def build_full_index_set(g: CommutationGraph, level: int,
                         cap: int = DEFAULT_INDEX_CAP) -> IndexSet:
    """All canonical state monomials of total degree at most ``level``.

    Ordered by degree first, so the level-l set is a prefix of level l+1.
    """
    if level < 1:
        raise ValueError("level must be >= 1")
    count = full_index_count(g, level)
    if count > cap:
        raise IndexSetTooLarge(count, cap)
    by_deg = _words_by_degree(g, level)
    nonid = [(w, t) for t in range(1, level + 1) for w in by_deg[t]]
    multisets: list[tuple[tuple, int]] = [((), 0)]

    def rec(start: int, acc: tuple, deg: int):
        for idx in range(start, len(nonid)):
            w, t = nonid[idx]
            if deg + t <= level:
                nxt = acc + (w,)
                multisets.append((nxt, deg + t))
                rec(idx, nxt, deg + t)

    rec(0, (), 0)
    mons = []
    for w0, a in [((), 0)] + nonid:
        for ms, s in multisets:
            if a + s <= level:
                mons.append(StateMonomial(w0, tuple(sorted(ms)), 0))
    mons.sort(key=StateMonomial.sort_key)
    return IndexSet("full", level, tuple(mons))


def custom_index_set(monomials: Sequence[StateMonomial], level: int = 0) -> IndexSet:
    """Deduplicated (phase dropped) index set with the identity first."""
    seen = {IDENTITY}
    mons = [IDENTITY]
    for m in monomials:
        m = m.without_phase()
        if m not in seen:
            seen.add(m)
            mons.append(m)
    return IndexSet("custom", level, tuple(mons))


def union_index_sets(*sets: IndexSet) -> IndexSet:
    return custom_index_set([m for s in sets for m in s.monomials],
                            max(s.level for s in sets))


def pair_index_set(g: CommutationGraph) -> IndexSet:
    """Alternative level-2 sequence ``<(a_i a_j)*> a_i a_j`` (with singletons)."""
    mons = [IDENTITY]
    for size in (1, 2):
        for subset in itertools.combinations(range(g.n), size):
            word = tuple((i, 1) for i in subset)
            ws, ph = word_star(word, g)
            mons.append(StateMonomial(word, (ws,), ph))
    return custom_index_set(mons, 2)


# layouts --------------------------------------------------------------------

@dataclass
class MomentLayout:
    graph: CommutationGraph
    index: IndexSet
    class_keys: list
    pos_class: np.ndarray
    pos_phase: np.ndarray
    conjugate: list  # per class: (class id, phase)
    objective: list  # (class id, coefficient)
    _class_ids: dict = field(repr=False, default_factory=dict)

    @property
    def size(self) -> int:
        return len(self.index)

    @property
    def num_classes(self) -> int:
        return len(self.class_keys)

    def class_of(self, key: tuple) -> int | None:
        return self._class_ids.get(key)

    def representative(self, cls: int) -> StateMonomial:
        return StateMonomial((), self.class_keys[cls], 0)

    def entry(self, u: StateMonomial, v: StateMonomial) -> tuple[int | None, tuple, int]:
        """Class id (or None), canonical key and phase of ``<u* v>`` for arbitrary monomials."""
        s = expectation_reduce(multiply(involution(u, self.graph), v, self.graph))
        return self.class_of(s.expectations), s.expectations, s.phase

    def positions(self, cls: int) -> list[tuple[int, int]]:
        rows, cols = np.nonzero(self.pos_class == cls)
        return list(zip(rows.tolist(), cols.tolist()))

    def dump(self) -> str:
        """Deterministic text listing for golden-file comparisons."""
        d = self.graph.d
        lines = [f"layout kind={self.index.kind} level={self.index.level} "
                 f"size={self.size} classes={self.num_classes}"]
        for r, m in enumerate(self.index.monomials):
            lines.append(f"index {r}: {render(m, d)}")
        for c, key in enumerate(self.class_keys):
            cc, ph = self.conjugate[c]
            lines.append(f"class {c}: {render(StateMonomial((), key, 0), d)} ; conj {cc} phase {ph}")
        for r in range(self.size):
            lines.append("row %d: %s" % (r, " ".join(
                f"{self.pos_class[r, c]}@{self.pos_phase[r, c]}" for c in range(self.size))))
        lines.append("objective: " + " ".join(f"{c}*{w:g}" for c, w in self.objective))
        return "\n".join(lines) + "\n"


def objective_key(g: CommutationGraph, i: int) -> tuple:
    """Key of ``<a_i*><a_i>``, i.e. ``|<a_i>|^2``."""
    if g.hermitian:
        return (((i, 1),), ((i, 1),))
    return tuple(sorted([((i, 1),), ((i, -1),)]))


def build_layout(idx: IndexSet, g: CommutationGraph, backend: str | None = None) -> MomentLayout:
    """Canonicalize every entry ``<u* v>`` and group positions into classes."""
    kern = kernels.get(backend)
    exps, n, d2, herm = _context(g)
    mons = idx.monomials
    m = len(mons)
    rows, cols = [], []
    for u in mons:
        us = involution(u, g)
        rows.append((us.word, us.expectations, us.phase))
        cols.append((u.word, u.expectations))
    class_ids: dict = {}
    up, phases = kern.entry_block(rows, cols, exps, n, d2, herm, True, class_ids)
    conj_cls, conj_ph = [], []
    class_keys = list(class_ids)
    c = 0
    while c < len(class_keys):  # conjugates may open new classes
        ck, ph = conj_key(class_keys[c], g)
        if ck not in class_ids:
            class_ids[ck] = len(class_keys)
            class_keys.append(ck)
        conj_cls.append(class_ids[ck])
        conj_ph.append(ph)
        c += 1
    conj_cls_a = np.array(conj_cls, dtype=np.int64)
    conj_ph_a = np.array(conj_ph, dtype=np.int64)

    iu = np.triu_indices(m)
    pos_class = np.empty((m, m), dtype=np.int64)
    pos_phase = np.empty((m, m), dtype=np.int64)
    pos_class[iu] = up
    pos_phase[iu] = phases
    # lower triangle by involution: <v* u> = conj(<u* v>)
    il = np.tril_indices(m, -1)
    src_cls = pos_class[il[1], il[0]]
    pos_class[il] = conj_cls_a[src_cls]
    pos_phase[il] = (conj_ph_a[src_cls] - pos_phase[il[1], il[0]]) % d2
    conjugate = list(zip(conj_cls, conj_ph))

    objective = []
    for i in range(g.n):
        c = class_ids.get(objective_key(g, i))
        if c is None:
            raise ValueError(f"index set does not contain the objective term |<a{i}>|^2")
        objective.append((c, 1.0))
    return MomentLayout(g, idx, class_keys, pos_class, pos_phase, conjugate, objective, class_ids)


def exchange_phase(rows_seq: Sequence[int], cols_seq: Sequence[int], a: int, b: int,
                   g: CommutationGraph) -> int:
    """Sign picked up when positions ``a < b`` of the joint sequence are swapped.

    The joint sequence is ``(i_k, ..., i_1, j_1, ..., j_k)`` (row indices
    reversed by the adjoint).  Computed directly from the exponent table as
    ``prod_{a < c <= b} zeta(s_a, s_c) zeta(s_c, s_b)``; returns the exponent
    mod 4 (0 for +1, 2 for -1).
    """
    if g.d != 2:
        raise ValueError("exchange_phase is defined for hermitian d=2 graphs")
    seq = list(reversed(rows_seq)) + list(cols_seq)
    if not 0 <= a < b < len(seq):
        raise IndexError(f"positions {a}, {b} out of range for length {len(seq)}")
    total = 0
    for c in range(a + 1, b + 1):
        total += g.exponents[seq[a]][seq[c]] + g.exponents[seq[c]][seq[b]]
    return (2 * total) % 4


# real embedding -------------------------------------------------------------

@dataclass
class RealLayout:
    """Real parametrization of a layout.

    Every class value is ``sum_v coef[v] * x_v + const`` over real variables
    ``x``; each class has at most two variables (``var_idx`` -1 if unused).
    """
    layout: MomentLayout
    compact: bool
    labels: list  # (class id, part)
    var_idx: np.ndarray  # (num_classes, 2)
    var_coef: np.ndarray  # complex (num_classes, 2)
    const: np.ndarray  # complex (num_classes,)

    @property
    def size(self) -> int:
        return self.layout.size if self.compact else 2 * self.layout.size

    @property
    def num_vars(self) -> int:
        return len(self.labels)

    def pinned(self) -> dict[int, complex]:
        return {c: complex(self.const[c]) for c in range(len(self.const))
                if (self.var_idx[c] < 0).all()}

    def class_values(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        xv = np.concatenate([x, [0.0]])
        return (self.const + self.var_coef[:, 0] * xv[self.var_idx[:, 0]]
                + self.var_coef[:, 1] * xv[self.var_idx[:, 1]])

    def complex_matrix(self, x: np.ndarray) -> np.ndarray:
        lay = self.layout
        vals = self.class_values(x)
        return _phases(lay) * vals[lay.pos_class]

    def objective_terms(self) -> tuple[np.ndarray, np.ndarray]:
        """Per-vertex real objective rows ``A`` and constants ``b``: term_i = A[i] @ x + b[i]."""
        lay = self.layout
        A = np.zeros((len(lay.objective), self.num_vars))
        b = np.zeros(len(lay.objective))
        for t, (c, w) in enumerate(lay.objective):
            for s in range(2):
                v = self.var_idx[c, s]
                if v >= 0:
                    A[t, v] += w * self.var_coef[c, s].real
            b[t] = w * self.const[c].real
        return A, b


def _phases(lay: MomentLayout) -> np.ndarray:
    d = lay.graph.d
    table = np.array([phase_value(k, d) for k in range(2 * d)])
    return table[lay.pos_phase]


def real_embedding(layout: MomentLayout, compact: bool | None = None) -> RealLayout:
    """Real variables for the complex moment matrix.

    Conjugate-paired classes share one complex value (two reals); a
    self-conjugate class is a real multiple of a fixed phase.  In compact
    mode (all phases real) imaginary parts are dropped, which pins classes
    whose value must be purely imaginary to zero.
    """
    d = layout.graph.d
    d2 = 2 * d
    all_real = (not np.any(layout.pos_phase % d)
                and all(ph % d == 0 for _, ph in layout.conjugate))
    if compact is None:
        compact = all_real
    elif compact and not all_real:
        raise ValueError("compact embedding needs real phases")
    nc = layout.num_classes
    var_idx = -np.ones((nc, 2), dtype=np.int64)
    var_coef = np.zeros((nc, 2), dtype=complex)
    const = np.zeros(nc, dtype=complex)
    done = np.zeros(nc, dtype=bool)
    labels: list = []
    norm = layout.class_of(())
    for c in range(nc):
        if done[c]:
            continue
        done[c] = True
        if c == norm:
            const[c] = 1.0
            continue
        cc, ph = layout.conjugate[c]
        if cc == c:
            # conj(z) = w^ph z  =>  z = t * exp(-i pi ph / 2d)
            if compact and ph % d2:
                continue  # purely imaginary, pinned to zero
            var_idx[c, 0] = len(labels)
            var_coef[c, 0] = phase_value(-ph, d2)
            labels.append((c, "re" if ph % d2 == 0 else "ray"))
            continue
        done[cc] = True
        conj_phase = phase_value(-ph, d)
        var_idx[c, 0] = var_idx[cc, 0] = len(labels)
        var_coef[c, 0] = 1.0
        var_coef[cc, 0] = conj_phase
        labels.append((c, "re"))
        if not compact:
            var_idx[c, 1] = var_idx[cc, 1] = len(labels)
            var_coef[c, 1] = 1j
            var_coef[cc, 1] = -1j * conj_phase
            labels.append((c, "im"))
    return RealLayout(layout, compact, labels, var_idx, var_coef, const)
