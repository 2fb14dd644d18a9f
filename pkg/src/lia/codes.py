"""Random linear codebooks over a prime field, mapped onto the scaled grid.

A code is a k x n generator matrix with i.i.d. uniform entries in Z_p.  A
message vector w in Z_p^k encodes to the residues w^T G mod p; the real-form
codeword places each residue on the grid (L/p)*Z_p reduced into the basic
interval.  The realized rate is k*log2(p)/n bits per channel use (k is an
explicit input because a target rate rarely gives an integer dimension).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

import numpy as np

from .diophantine import is_prime
from .modarith import GridPoint, Residue, grid_real, mod_interval

ENUMERATION_CAP = 3000  # default bound on p**k for exhaustive operations

MessageVector = np.ndarray  # length-k int vector with entries in {0, ..., p-1}


@dataclass(frozen=True, eq=False)
class LinearCode:
    p: int
    n: int
    k: int
    generator: np.ndarray  # k x n residues mod p
    seed: int | None = None

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"p must be prime, got {self.p}")
        if self.k < 1 or self.n < 1:
            raise ValueError("k and n must be positive")
        if self.k > self.n:
            raise ValueError(f"k={self.k} exceeds n={self.n}; rate above log2(p) is meaningless")
        g = np.asarray(self.generator, dtype=np.int64)
        if g.shape != (self.k, self.n):
            raise ValueError(f"generator shape {g.shape} != ({self.k}, {self.n})")
        if g.min() < 0 or g.max() >= self.p:
            raise ValueError("generator entries must lie in {0, ..., p-1}")
        g.setflags(write=False)
        object.__setattr__(self, "generator", g)

    @property
    def rate(self) -> float:
        """Realized rate k*log2(p)/n in bits per channel use."""
        return self.k * math.log2(self.p) / self.n


class Codeword:
    """Length-n sequence of grid points: residues plus derived real forms."""

    __slots__ = ("residues", "p")

    def __init__(self, residues, p: int):
        r = np.asarray(residues, dtype=np.int64)
        if r.ndim != 1:
            raise ValueError("codeword residues must be one-dimensional")
        if r.size and (r.min() < 0 or r.max() >= p):
            raise ValueError("codeword residues out of range")
        r.setflags(write=False)
        self.residues = r
        self.p = p

    @property
    def reals(self) -> np.ndarray:
        return grid_real(self.residues, self.p)

    def __len__(self):
        return self.residues.size

    def __getitem__(self, t) -> GridPoint:
        return GridPoint(Residue(int(self.residues[t]), self.p))

    def __eq__(self, other):
        return (
            isinstance(other, Codeword)
            and self.p == other.p
            and np.array_equal(self.residues, other.residues)
        )

    def __repr__(self):
        return f"Codeword(p={self.p}, residues={self.residues.tolist()})"


def sample_code(p: int, n: int, k: int, seed: int) -> LinearCode:
    """Draw a generator with i.i.d. uniform entries; deterministic in seed."""
    rng = np.random.default_rng(seed)
    g = rng.integers(0, p, size=(k, n), dtype=np.int64)
    return LinearCode(p=p, n=n, k=k, generator=g, seed=seed)


def encode(code: LinearCode, w) -> Codeword:
    """Map a message vector to its codeword, residues (w^T G) mod p."""
    wv = np.asarray(w, dtype=np.int64)
    if wv.shape != (code.k,):
        raise ValueError(f"message shape {wv.shape} != ({code.k},)")
    if wv.size and (wv.min() < 0 or wv.max() >= code.p):
        raise ValueError("message entries must lie in {0, ..., p-1}")
    return Codeword((wv @ code.generator) % code.p, code.p)


def all_codewords(code: LinearCode, cap: int = ENUMERATION_CAP):
    """All p**k (message, codeword) pairs in lexicographic message order."""
    count = code.p**code.k
    if count > cap:
        raise ValueError(f"p**k = {count} exceeds enumeration cap {cap}")
    out = []
    for w in product(range(code.p), repeat=code.k):
        wv = np.asarray(w, dtype=np.int64)
        out.append((wv, encode(code, wv)))
    return out


def messages_dependent(w1, w2, p: int) -> bool:
    """True iff the two message vectors are linearly dependent over Z_p."""
    a = np.asarray(w1, dtype=np.int64) % p
    b = np.asarray(w2, dtype=np.int64) % p
    nz = np.flatnonzero(a)
    if nz.size == 0:
        return True
    i = int(nz[0])
    c = int(b[i]) * pow(int(a[i]), p - 2, p) % p
    return bool(np.all((c * a - b) % p == 0))


@dataclass(frozen=True)
class LinearityReport:
    passed: bool
    trials: int
    failures: int


def check_linearity(code: LinearCode, trials: int, seed: int, table=None) -> LinearityReport:
    """Verify [f(w1) + f(w2)]* = f((w1 + w2) mod p) on random message pairs.

    The identity is checked exactly in the residue domain and to 1e-12 in
    the real domain.  ``table`` optionally supplies the codewords for the
    left-hand side (a mapping from message tuples); a corrupted table makes
    the check fail, which gives the negative control.
    """
    rng = np.random.default_rng(seed)
    lookup = (lambda w: table[tuple(int(v) for v in w)]) if table is not None else (
        lambda w: encode(code, w)
    )
    failures = 0
    for _ in range(trials):
        w1 = rng.integers(0, code.p, size=code.k)
        w2 = rng.integers(0, code.p, size=code.k)
        c1, c2 = lookup(w1), lookup(w2)
        c3 = encode(code, (w1 + w2) % code.p)
        residues_ok = np.array_equal((c1.residues + c2.residues) % code.p, c3.residues)
        reals_ok = np.max(np.abs(mod_interval(c1.reals + c2.reals) - c3.reals)) < 1e-12
        if not (residues_ok and reals_ok):
            failures += 1
    return LinearityReport(failures == 0, trials, failures)


def code_to_text(code: LinearCode) -> str:
    """Serialize: header "p n k seed", then k rows of n residues."""
    seed = "-" if code.seed is None else str(code.seed)
    lines = [f"{code.p} {code.n} {code.k} {seed}"]
    for row in code.generator:
        lines.append(" ".join(str(int(v)) for v in row))
    return "\n".join(lines) + "\n"


def code_from_text(text: str) -> LinearCode:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty code text")
    head = lines[0].split()
    if len(head) != 4:
        raise ValueError(f"bad code header: {lines[0]!r}")
    p, n, k = int(head[0]), int(head[1]), int(head[2])
    seed = None if head[3] == "-" else int(head[3])
    if len(lines) != 1 + k:
        raise ValueError(f"expected {k} generator rows, got {len(lines) - 1}")
    g = np.asarray([[int(v) for v in ln.split()] for ln in lines[1:]], dtype=np.int64)
    return LinearCode(p=p, n=n, k=k, generator=g, seed=seed)


def save_code(code: LinearCode, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(code_to_text(code))


def load_code(path) -> LinearCode:
    with open(path, "r", encoding="ascii") as fh:
        return code_from_text(fh.read())
