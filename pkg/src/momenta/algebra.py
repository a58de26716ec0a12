"""Exact algebra of words and state monomials.

Letters ``a_i`` are unitary (``a_i* a_i = a_i a_i* = e``) and obey
``a_i a_j = zeta_ij a_j a_i``.  Words are kept in a canonical form: sorted by
operator index, each index carrying a net non-zero power (``a_i*`` is power
-1).  For hermitian letters powers live mod 2, so words are square-free.

Phases are integers mod ``2d`` meaning ``exp(i pi k / d)``; ``zeta_ij`` is
``2 e_ij`` in these units and half-integer powers of ``omega`` are exact.

A state monomial ``w0 <w1> ... <wm>`` is stored as a canonical word part, a
sorted tuple of canonical expectation words (identity factors dropped) and a
single phase.
"""
from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from . import kernels
from .graph import CommutationGraph

WordKey = tuple  # tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class Letter:
    index: int
    starred: bool = False


@dataclass(frozen=True)
class Word:
    powers: WordKey
    phase: int = 0

    @property
    def letters(self) -> tuple[Letter, ...]:
        out = []
        for i, p in self.powers:
            out.extend([Letter(i, p < 0)] * abs(p))
        return tuple(out)

    @property
    def degree(self) -> int:
        return sum(abs(p) for _, p in self.powers)

    def is_identity(self) -> bool:
        return not self.powers


@dataclass(frozen=True)
class StateMonomial:
    word: WordKey = ()
    expectations: tuple = ()
    phase: int = 0

    @property
    def degree(self) -> int:
        return _deg(self.word) + sum(_deg(w) for w in self.expectations)

    def is_scalar(self) -> bool:
        return not self.word

    def without_phase(self) -> "StateMonomial":
        return StateMonomial(self.word, self.expectations, 0)

    def sort_key(self):
        return (self.degree, len(self.expectations), self.expectations, self.word)


IDENTITY = StateMonomial()


def _deg(w: WordKey) -> int:
    return sum(abs(p) for _, p in w)


def phase_order(g: CommutationGraph) -> int:
    return 2 * g.d


def phase_value(k: int, d: int) -> complex:
    """``exp(i pi k / d)`` with exact values on the axes."""
    k %= 2 * d
    if k == 0:
        return 1.0 + 0j
    if 2 * k == 2 * d:
        return -1.0 + 0j
    if 2 * k == d:
        return 1j
    if 2 * k == 3 * d:
        return -1j
    return cmath.exp(1j * math.pi * k / d)


@lru_cache(maxsize=256)
def _context(g: CommutationGraph):
    return kernels.pack_exponents(g.exponents), g.n, 2 * g.d, bool(g.hermitian)


def word_mul(a: WordKey, b: WordKey, g: CommutationGraph) -> tuple[WordKey, int]:
    exps, n, d2, herm = _context(g)
    return kernels.word_mul(a, b, exps, n, d2, herm)


def word_star(a: WordKey, g: CommutationGraph) -> tuple[WordKey, int]:
    exps, n, d2, herm = _context(g)
    return kernels.word_star(a, exps, n, d2, herm)


def _as_letter(x, g: CommutationGraph) -> Letter:
    if isinstance(x, Letter):
        letter = x
    elif isinstance(x, tuple):
        letter = Letter(int(x[0]), bool(x[1]))
    else:
        letter = Letter(int(x))
    if not 0 <= letter.index < g.n:
        raise IndexError(f"letter index {letter.index} out of range for n={g.n}")
    if g.hermitian and letter.starred:
        letter = Letter(letter.index)
    return letter


def canonicalize_word(letters: Iterable, g: CommutationGraph) -> Word:
    """Canonical form of a raw letter sequence.

    ``letters`` may hold :class:`Letter` objects, ``(index, starred)`` tuples
    or bare indices.  One commutation phase is collected per transposition.
    """
    word: WordKey = ()
    phase = 0
    for x in letters:
        letter = _as_letter(x, g)
        word, ph = word_mul(word, ((letter.index, -1 if letter.starred else 1),), g)
        phase += ph
    return Word(word, phase % (2 * g.d))


def expectation_of(w: Word | WordKey, g: CommutationGraph, phase: int = 0) -> StateMonomial:
    """The scalar ``<w>``; ``<e>`` is 1."""
    if isinstance(w, Word):
        phase += w.phase
        w = w.powers
    if not w:
        return StateMonomial((), (), phase % (2 * g.d))
    return StateMonomial((), (w,), phase % (2 * g.d))


def make_monomial(word: Word | WordKey = (), expectations: Sequence = (), phase: int = 0,
                  g: CommutationGraph | None = None) -> StateMonomial:
    """Assemble a canonical monomial from (possibly raw) parts.

    Expectation parts given as :class:`Word` contribute their phases; raw
    letter lists are canonicalized against ``g``.
    """
    d2 = 2 * g.d if g is not None else None
    if isinstance(word, Word):
        phase += word.phase
        word = word.powers
    elif g is not None and word and not isinstance(word[0], tuple):
        cw = canonicalize_word(word, g)
        word, phase = cw.powers, phase + cw.phase
    exps = []
    for e in expectations:
        if isinstance(e, Word):
            phase += e.phase
            e = e.powers
        elif g is not None and e and not isinstance(e[0], tuple):
            ce = canonicalize_word(e, g)
            e, phase = ce.powers, phase + ce.phase
        if e:
            exps.append(tuple(e))
    if d2:
        phase %= d2
    return StateMonomial(tuple(word), tuple(sorted(exps)), phase)


def involution(m: StateMonomial, g: CommutationGraph) -> StateMonomial:
    """Adjoint ``(v <w>)* = v* <w*>``, re-canonicalized."""
    d2 = 2 * g.d
    phase = -m.phase
    w, ph = word_star(m.word, g)
    phase += ph
    exps = []
    for e in m.expectations:
        es, ph = word_star(e, g)
        phase += ph
        exps.append(es)
    return StateMonomial(w, tuple(sorted(exps)), phase % d2)


def multiply(x: StateMonomial, y: StateMonomial, g: CommutationGraph) -> StateMonomial:
    """Product in the algebra; expectation factors commute with everything."""
    w, ph = word_mul(x.word, y.word, g)
    return StateMonomial(w, tuple(sorted(x.expectations + y.expectations)),
                         (x.phase + y.phase + ph) % (2 * g.d))


def expectation_reduce(m: StateMonomial, g: CommutationGraph | None = None) -> StateMonomial:
    """``<w0 <w1>...> = <w0><w1>...``; the result has an empty word part."""
    if not m.word:
        return m
    return StateMonomial((), tuple(sorted(m.expectations + (m.word,))), m.phase)


def conj_key(key: tuple, g: CommutationGraph) -> tuple[tuple, int]:
    """Involution of a scalar key (sorted expectation words) with its phase."""
    phase = 0
    out = []
    for e in key:
        es, ph = word_star(e, g)
        phase += ph
        out.append(es)
    return tuple(sorted(out)), phase % (2 * g.d)


# text rendering -------------------------------------------------------------

def _render_word(w: WordKey) -> str:
    if not w:
        return "e"
    parts = []
    for i, p in w:
        tok = f"a{i}*" if p < 0 else f"a{i}"
        parts.extend([tok] * abs(p))
    return " ".join(parts)


def render(m: StateMonomial, d: int = 2) -> str:
    """Render like ``-<a0 a1> a0 a1``; phases other than +-1 as ``(k/2d)``."""
    k = m.phase % (2 * d)
    if k == 0:
        prefix = ""
    elif k == d:
        prefix = "-"
    else:
        prefix = f"({k}/{2 * d}) "
    body = " ".join(f"<{_render_word(e)}>" for e in m.expectations)
    if m.word or not body:
        word = _render_word(m.word) if m.word else ("1" if not body else "")
        body = f"{body} {word}".strip()
    return prefix + body


_TOKEN = re.compile(r"\(\s*(\d+)\s*/\s*(\d+)\s*\)|<([^<>]*)>|(-)|(a\d+\*?)|(\be\b)|(\b1\b)")


def parse_monomial(text: str, g: CommutationGraph) -> StateMonomial:
    """Inverse of :func:`render`; word letters may be in any order."""
    d2 = 2 * g.d
    phase = 0
    exps = []
    letters = []
    pos = 0
    text = text.strip()
    for m in _TOKEN.finditer(text):
        if text[pos:m.start()].strip():
            raise ValueError(f"cannot parse {text[pos:m.start()]!r} in {text!r}")
        pos = m.end()
        num, den, inner, minus, letter = m.group(1), m.group(2), m.group(3), m.group(4), m.group(5)
        if num is not None:
            if int(den) != d2:
                raise ValueError(f"phase denominator {den} does not match 2d={d2}")
            phase += int(num)
        elif inner is not None:
            toks = inner.split()
            if toks == ["e"] or not toks:
                continue
            exps.append(canonicalize_word([_parse_letter(t) for t in toks], g))
        elif minus:
            phase += g.d
        elif letter:
            letters.append(_parse_letter(letter))
    if text[pos:].strip():
        raise ValueError(f"cannot parse {text[pos:]!r}")
    word = canonicalize_word(letters, g)
    return make_monomial(word, exps, phase, g)


def _parse_letter(tok: str) -> Letter:
    if not re.fullmatch(r"a\d+\*?", tok):
        raise ValueError(f"bad letter {tok!r}")
    return Letter(int(tok[1:].rstrip("*")), tok.endswith("*"))
