"""Explicit Heisenberg-Weyl realizations, Haar sampling and see-saw lower bounds.

``sigma(k, l) |i> = omega^(i l) |i + k>`` with ``omega = exp(2 pi i / d)``.
Strings of such factors act as monomial matrices (a permutation times a
diagonal), which is how states are evaluated; dense matrices are built only
on request.  Random states come from ``numpy.random.default_rng`` (PCG64),
whose stream for a given seed is fixed across platforms.
"""
from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg

from .algebra import StateMonomial, phase_value
from .graph import CommutationGraph

DIM_CAP = 4096


class DimensionError(ValueError):
    pass


@dataclass(frozen=True)
class WeylString:
    """``omega2^phase * (x)_t sigma(k_t, l_t)`` with ``omega2 = exp(i pi / d)``."""
    d: int
    sites: tuple[tuple[int, int], ...]
    phase: int = 0

    @property
    def num_sites(self) -> int:
        return len(self.sites)

    @property
    def dim(self) -> int:
        return self.d ** len(self.sites)

    def action(self) -> tuple[np.ndarray, np.ndarray]:
        """``(perm, diag)`` with ``A |x> = diag[x] |perm[x]>``."""
        d = self.d
        N = len(self.sites)
        if self.dim > DIM_CAP:
            raise DimensionError(f"dimension {self.dim} exceeds cap {DIM_CAP}")
        digits = np.indices((d,) * N).reshape(N, -1) if N else np.zeros((0, 1), dtype=int)
        shifted = digits.copy()
        expo = np.zeros(digits.shape[1], dtype=np.int64)
        for t, (k, l) in enumerate(self.sites):
            shifted[t] = (digits[t] + k) % d
            expo += digits[t] * l
        weights = d ** np.arange(N - 1, -1, -1) if N else np.zeros(0, dtype=int)
        perm = (weights @ shifted).astype(np.int64) if N else np.zeros(1, dtype=np.int64)
        # omega^expo * omega2^phase, all in units of pi/d
        diag = np.exp(1j * math.pi * ((2 * expo + self.phase) % (2 * d)) / d)
        return perm, diag

    def commutation_exponent(self, other: "WeylString") -> int:
        """``e`` with ``A B = omega^e B A``."""
        if other.d != self.d or len(other.sites) != len(self.sites):
            raise ValueError("strings live on different spaces")
        return sum(l * m - k * n for (k, l), (m, n) in zip(self.sites, other.sites)) % self.d


def sigma_matrix(k: int, l: int, d: int) -> np.ndarray:
    M = np.zeros((d, d), dtype=complex)
    w = cmath.exp(2j * math.pi / d)
    for i in range(d):
        M[(i + k) % d, i] = w ** ((i * l) % d)
    return M


def weyl_matrix(s: WeylString) -> np.ndarray:
    if s.dim > DIM_CAP:
        raise DimensionError(f"dimension {s.dim} exceeds cap {DIM_CAP}")
    M = np.ones((1, 1), dtype=complex)
    for k, l in s.sites:
        M = np.kron(M, sigma_matrix(k, l, s.d))
    return phase_value(s.phase, s.d) * M


def displacement_matrix(k: int, l: int, d: int) -> np.ndarray:
    """``D(k, l) = omega^(k l / 2) sigma(k, l)``; ``k, l`` are used unreduced in the phase."""
    return phase_value(k * l, d) * sigma_matrix(k, l, d)


def displacement_string(d: int, sites: Sequence[tuple[int, int]]) -> WeylString:
    """Tensor product of displacement operators as a :class:`WeylString`."""
    return WeylString(d, tuple((k % d, l % d) for k, l in sites),
                      sum(k * l for k, l in sites) % (2 * d))


def realize_graph(g: CommutationGraph) -> list[WeylString]:
    """One string per vertex on ``n`` sites.

    String ``i`` carries ``X`` on site ``i`` and ``Z^e_ij`` on each earlier
    site ``j``, which gives ``A_i A_j = omega^e_ij A_j A_i``.  No site holds
    both ``X`` and ``Z``, so for ``d = 2`` every string is hermitian.
    """
    out = []
    for i in range(g.n):
        sites = [(0, 0)] * g.n
        for j in range(i):
            sites[j] = (0, g.exponents[i][j])
        sites[i] = (1, 0)
        out.append(WeylString(g.d, tuple(sites), 0))
    return out


def graph_from_strings(strings: Sequence[WeylString], name: str = "") -> CommutationGraph:
    n = len(strings)
    d = strings[0].d if strings else 2
    table = tuple(tuple(strings[i].commutation_exponent(strings[j]) for j in range(n))
                  for i in range(n))
    return CommutationGraph(n, d, table, d == 2, name)


def check_realization(strings: Sequence[WeylString], g: CommutationGraph) -> bool:
    return all(strings[i].commutation_exponent(strings[j]) == g.exponents[i][j]
               for i in range(g.n) for j in range(g.n))


# states ---------------------------------------------------------------------

def haar_sample(dim: int, count: int, seed: int = 0) -> np.ndarray:
    """``count`` Haar-random pure states as rows, from normalized complex Gaussians."""
    return _haar_rows(np.random.default_rng(seed), count, dim)


def _haar_rows(rng, count, dim):
    z = rng.standard_normal((count, dim)) + 1j * rng.standard_normal((count, dim))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def _actions(strings):
    return [s.action() for s in strings]


def expectations(strings: Sequence[WeylString], psi: np.ndarray, actions=None) -> np.ndarray:
    """``<psi|A_i|psi>`` for each string; ``psi`` may be one state or a stack of rows."""
    psi = np.asarray(psi)
    single = psi.ndim == 1
    P = psi[None, :] if single else psi
    acts = actions or _actions(strings)
    if acts and P.shape[1] != acts[0][0].size:
        raise ValueError(f"state dimension {P.shape[1]} does not match operators ({acts[0][0].size})")
    out = np.empty((P.shape[0], len(acts)), dtype=complex)
    for t, (perm, diag) in enumerate(acts):
        out[:, t] = np.einsum("sx,sx->s", P[:, perm].conj(), diag * P)
    return out[0] if single else out


def objective_value(strings: Sequence[WeylString], psi: np.ndarray, actions=None):
    """``sum_i |<A_i>|^2`` (vectorized over rows of ``psi``)."""
    ex = expectations(strings, psi, actions)
    return np.sum(np.abs(ex) ** 2, axis=-1)


def apply_string(action, psi: np.ndarray) -> np.ndarray:
    perm, diag = action
    out = np.empty_like(psi)
    out[perm] = diag * psi
    return out


def joint_eigenstate(strings: Sequence[WeylString], subset: Sequence[int], seed: int = 0) -> np.ndarray:
    """Common eigenvalue-1 eigenvector of pairwise commuting strings with ``A^d = 1``."""
    for a, b in itertools.combinations(subset, 2):
        if strings[a].commutation_exponent(strings[b]):
            raise ValueError(f"strings {a} and {b} do not commute")
    dim = strings[0].dim
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    for i in subset:
        act = strings[i].action()
        acc = v.copy()
        w = v
        for _ in range(strings[i].d - 1):
            w = apply_string(act, w)
            acc += w
        v = acc / strings[i].d
    nrm = np.linalg.norm(v)
    if nrm < 1e-10:
        raise ValueError("no common eigenvalue-1 eigenvector")
    return v / nrm


def seesaw_polish(strings: Sequence[WeylString], psi0: np.ndarray, max_iter: int = 200,
                  tol: float = 1e-10, actions=None) -> tuple[np.ndarray, float, list]:
    """Fixed-point ascent: replace psi by the top eigenvector of
    ``H = sum_i conj(<A_i>) A_i + h.c.``.

    The objective is convex in the state, so each step cannot decrease it.
    Returns ``(state, value, history)``.
    """
    acts = actions or _actions(strings)
    psi = np.asarray(psi0, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    dim = psi.size
    value = float(objective_value(strings, psi, acts))
    history = [value]
    for _ in range(max_iter):
        ex = expectations(strings, psi, acts)
        H = np.zeros((dim, dim), dtype=complex)
        cols = np.arange(dim)
        for c, (perm, diag) in zip(ex, acts):
            H[perm, cols] += np.conj(c) * diag
        H = H + H.conj().T
        _, vecs = scipy.linalg.eigh(H, subset_by_index=[dim - 1, dim - 1])
        cand = vecs[:, 0]
        new = float(objective_value(strings, cand, acts))
        if new < value:
            break  # round-off only; keep the better state
        improvement = new - value
        psi, value = cand, new
        history.append(value)
        if improvement <= tol * max(1.0, abs(value)):
            break
    return psi, value, history


def sampled_lower_bound(strings: Sequence[WeylString], count: int, seed: int = 0,
                        polish: int = 4, max_iter: int = 200, tol: float = 1e-10,
                        starts: Sequence[np.ndarray] = ()) -> dict:
    """Best Haar sample and the best see-saw value from the top samples plus ``starts``."""
    acts = _actions(strings)
    dim = strings[0].dim
    best_sample = 0.0
    cands: list[np.ndarray] = list(starts)
    if count > 0:
        # one generator, drawn in chunks so memory stays bounded
        rng = np.random.default_rng(seed)
        chunk = max(1, (1 << 20) // dim)
        top_vals = np.empty(0)
        top_states = np.empty((0, dim), dtype=complex)
        for start in range(0, count, chunk):
            states = _haar_rows(rng, min(chunk, count - start), dim)
            vals = np.concatenate([top_vals, objective_value(strings, states, acts)])
            pool = np.concatenate([top_states, states])
            order = np.argsort(-vals, kind="stable")[:max(polish, 1)]
            top_vals, top_states = vals[order], pool[order]
        best_sample = float(top_vals[0])
        cands += list(top_states[:polish])
    best_val, best_state = best_sample, None
    for psi in cands:
        st, v, _ = seesaw_polish(strings, psi, max_iter, tol, acts)
        if v > best_val or best_state is None:
            best_val, best_state = max(v, best_val), st
    return {"sampled": best_sample, "polished": best_val, "state": best_state}


# monomial evaluation --------------------------------------------------------

def word_operator(word, strings: Sequence[WeylString]) -> np.ndarray:
    """Dense matrix of a canonical word ``prod a_i^p`` on the given strings."""
    dim = strings[0].dim
    M = np.eye(dim, dtype=complex)
    for i, p in word:
        A = weyl_matrix(strings[i])
        M = M @ np.linalg.matrix_power(A if p > 0 else A.conj().T, abs(p))
    return M


def evaluate_monomial(m: StateMonomial, strings: Sequence[WeylString], psi: np.ndarray,
                      cache: dict | None = None) -> np.ndarray:
    """Vector ``m|psi>``: scalars evaluated on ``psi``, word applied to ``psi``."""
    cache = {} if cache is None else cache

    def op(w):
        if w not in cache:
            cache[w] = word_operator(w, strings)
        return cache[w]

    coeff = phase_value(m.phase, strings[0].d)
    for e in m.expectations:
        coeff *= np.vdot(psi, op(e) @ psi)
    return coeff * (op(m.word) @ psi)


def state_moment_matrix(index, strings: Sequence[WeylString], psi: np.ndarray) -> np.ndarray:
    """``M(u, v) = <psi| u^dag v |psi>`` over an index set; PSD by construction."""
    cache: dict = {}
    V = np.column_stack([evaluate_monomial(u, strings, psi, cache) for u in index.monomials])
    return V.conj().T @ V


# text fixtures ----------------------------------------------------------------

def format_strings(strings: Sequence[WeylString]) -> str:
    if not strings:
        return "d=2 sites=0\n"
    lines = [f"d={strings[0].d} sites={strings[0].num_sites}"]
    for s in strings:
        lines.append(" ".join(f"{k},{l}" for k, l in s.sites) + f" phase={s.phase}")
    return "\n".join(lines) + "\n"


def parse_strings(text: str) -> list[WeylString]:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    head = dict(tok.split("=") for tok in lines[0].split())
    d, N = int(head["d"]), int(head["sites"])
    out = []
    for ln in lines[1:]:
        toks = ln.split()
        phase = 0
        if toks and toks[-1].startswith("phase="):
            phase = int(toks.pop()[len("phase="):])
        sites = tuple(tuple(int(v) for v in t.split(",")) for t in toks)
        if len(sites) != N:
            raise ValueError(f"expected {N} sites in {ln!r}")
        out.append(WeylString(d, sites, phase % (2 * d)))
    return out


def format_state(psi: np.ndarray) -> str:
    return "".join(f"{z.real:.17g} {z.imag:.17g}\n" for z in np.asarray(psi).ravel())


def parse_state(text: str) -> np.ndarray:
    vals = [tuple(map(float, ln.split())) for ln in text.splitlines() if ln.strip()]
    return np.array([complex(a, b) for a, b in vals])
