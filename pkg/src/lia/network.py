"""K-user integer-interference channel: modulo alignment and joint decoding.

Every user transmits from one shared linear code.  Because the cross gains
are integers, the interference seen by receiver j folds into a single
codeword x_IF = [sum_k a_jk x_k]* of the same code, and the receiver faces
the two-user channel [h_jj x_j + x_IF + z]*: the interference candidate
takes the unit-gain role and the desired candidate the gain-h_jj role in
the joint decoder.  Only the desired message is scored; a wrong
interference-sum estimate alone does not count against the scheme.

Channel files: first line K, then K whitespace-separated rows.  Diagonal
entries may be "a/b" fractions or decimals; off-diagonal entries must parse
as integers (rational cross gains are rejected, not rescaled, because the
rescaling would change per-receiver SNR in an unspecified way).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources

import numpy as np

from .codes import Codeword, LinearCode, encode
from .diophantine import Gain, parse_gain
from .macsim import AMBIGUOUS, PairDecoder, wilson_interval
from .modarith import mod_interval
from .rates import db_to_linear, dof_benchmark, theorem2_sym_rate, time_sharing_sum_rate


class ChannelFormatError(ValueError):
    """A channel matrix file is missing structure or has bad entries."""


@dataclass(frozen=True, eq=False)
class ChannelMatrix:
    """K-user gain matrix: real diagonal, exact-integer off-diagonal."""

    K: int
    direct: tuple[Gain, ...]  # diagonal gains h_jj
    cross: np.ndarray  # K x K int64, zero diagonal

    def __post_init__(self):
        if self.K < 2:
            raise ValueError("K must be at least 2")
        if len(self.direct) != self.K:
            raise ValueError("need one direct gain per user")
        c = np.asarray(self.cross, dtype=np.int64)
        if c.shape != (self.K, self.K):
            raise ValueError(f"cross shape {c.shape} != ({self.K}, {self.K})")
        if np.any(np.diagonal(c) != 0):
            raise ValueError("cross matrix must have a zero diagonal")
        c.setflags(write=False)
        object.__setattr__(self, "cross", c)

    @classmethod
    def from_rows(cls, rows) -> "ChannelMatrix":
        """Build from a square array-like; off-diagonals must be integers."""
        grid = [list(r) for r in rows]
        K = len(grid)
        if any(len(r) != K for r in grid):
            raise ValueError("channel matrix must be square")
        direct = []
        cross = np.zeros((K, K), dtype=np.int64)
        for j in range(K):
            for k in range(K):
                v = grid[j][k]
                if j == k:
                    direct.append(v if isinstance(v, Fraction) else float(v))
                    continue
                iv = v if isinstance(v, int) else (
                    int(v) if float(v) == int(v) else None
                )
                if iv is None:
                    raise ValueError(
                        f"off-diagonal gain h[{j}][{k}]={v!r} is not an integer"
                    )
                cross[j, k] = iv
        return cls(K=K, direct=tuple(direct), cross=cross)

    def as_float(self) -> np.ndarray:
        """Dense float matrix (diagonal floated)."""
        m = self.cross.astype(float)
        for j, g in enumerate(self.direct):
            m[j, j] = float(g)
        return m


def parse_channel_text(text: str) -> ChannelMatrix:
    """Parse the channel file format (integer off-diagonals enforced)."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ChannelFormatError("empty channel file")
    try:
        K = int(lines[0])
    except ValueError:
        raise ChannelFormatError(f"first line must be K, got {lines[0]!r}") from None
    if len(lines) != 1 + K:
        raise ChannelFormatError(f"expected {K} matrix rows, got {len(lines) - 1}")
    rows = []
    for j, ln in enumerate(lines[1:]):
        toks = ln.split()
        if len(toks) != K:
            raise ChannelFormatError(f"row {j + 1} has {len(toks)} entries, expected {K}")
        row = []
        for k, tok in enumerate(toks):
            if j == k:
                try:
                    row.append(parse_gain(tok))
                except (ValueError, ZeroDivisionError):
                    raise ChannelFormatError(f"bad diagonal gain {tok!r}") from None
            else:
                try:
                    row.append(int(tok))
                except ValueError:
                    raise ChannelFormatError(
                        f"off-diagonal gain h[{j}][{k}]={tok!r} must be an integer"
                    ) from None
        rows.append(row)
    return ChannelMatrix.from_rows(rows)


def load_channel_file(path) -> ChannelMatrix:
    with open(path, "r", encoding="ascii") as fh:
        return parse_channel_text(fh.read())


def parse_real_matrix_text(text: str, K_expected: int | None = None) -> np.ndarray:
    """Same file format with arbitrary real entries (power-time input)."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ChannelFormatError("empty channel file")
    try:
        K = int(lines[0])
    except ValueError:
        raise ChannelFormatError(f"first line must be K, got {lines[0]!r}") from None
    if K_expected is not None and K != K_expected:
        raise ChannelFormatError(f"expected K={K_expected}, file has K={K}")
    if len(lines) != 1 + K:
        raise ChannelFormatError(f"expected {K} matrix rows, got {len(lines) - 1}")
    rows = []
    for ln in lines[1:]:
        toks = ln.split()
        if len(toks) != K:
            raise ChannelFormatError("ragged channel matrix")
        try:
            rows.append([float(parse_gain(t)) for t in toks])
        except (ValueError, ZeroDivisionError):
            raise ChannelFormatError(f"bad matrix entry in row {ln!r}") from None
    return np.asarray(rows, dtype=float)


_EXAMPLE_CROSS = np.asarray(
    [
        [0, 1, 2, 3, 4],
        [5, 0, 3, 6, 7],
        [2, 11, 0, 1, 3],
        [3, 7, 6, 0, 9],
        [11, 2, 6, 4, 0],
    ],
    dtype=np.int64,
)


def example_channel(h: Gain) -> ChannelMatrix:
    """The bundled 5-user example matrix with diagonal h."""
    return ChannelMatrix(K=5, direct=(h,) * 5, cross=_EXAMPLE_CROSS.copy())


def bundled_channel_path(name: str = "channel5_h0707.txt"):
    """Filesystem path of a channel file shipped with the package."""
    return resources.files("lia").joinpath("data", name)


def align_interference(code: LinearCode, gains, messages) -> tuple[np.ndarray, Codeword]:
    """Fold gain-scaled codewords into the aligned message and its codeword.

    Returns (w_IF, codeword) with w_IF = (sum_k gains[k] * w_k) mod p.  The
    codeword equals the component-wise mod-interval sum of the gain-scaled
    codewords exactly, because everything is computed on residues.
    """
    if len(gains) != len(messages):
        raise ValueError("gains and messages must have equal length")
    if len(messages) == 0:
        raise ValueError("need at least one interferer")
    total = np.zeros(code.k, dtype=np.int64)
    for g, w in zip(gains, messages):
        gi = int(g)
        if gi != g:
            raise ValueError(f"interference gain {g!r} is not an integer")
        total = total + gi * np.asarray(w, dtype=np.int64)
    w_if = total % code.p
    return w_if, encode(code, w_if)


class _SingleUserDecoder:
    """Exhaustive single-user decode of [h x + z]* (no interference case)."""

    def __init__(self, code: LinearCode, gain: Gain):
        from .codes import all_codewords

        pairs = all_codewords(code)
        self.messages = np.vstack([w for w, _ in pairs])
        self.table = mod_interval(
            float(gain) * np.vstack([cw.reals for _, cw in pairs])
        )
        self.n = code.n

    def decode(self, y):
        d = mod_interval(np.asarray(y, dtype=float)[None, :] - self.table)
        metrics = np.einsum("ij,ij->i", d, d)
        hits = np.flatnonzero(metrics == metrics.min())
        if hits.size > 1:
            return None  # tie, declared an error
        return self.messages[int(hits[0])].copy()


@dataclass(frozen=True)
class NetworkSimResult:
    """Per-receiver and network error estimates over one seeded run."""

    trials: int
    receiver_errors: tuple[int, ...]
    receiver_p_e: tuple[float, ...]
    receiver_ci95: tuple[tuple[float, float], ...]
    network_errors: int
    network_p_e: float
    network_ci95: tuple[float, float]


def simulate_network(
    H: ChannelMatrix,
    code: LinearCode,
    snr: float,
    trials: int,
    seed: int,
    workers: int = 1,
) -> NetworkSimResult:
    """Monte Carlo run of the aligned-interference network at linear SNR.

    Trial t draws all K messages from SeedSequence(seed, spawn_key=(t, 0))
    and receiver j's noise from spawn_key=(t, 1 + j); receiver j errs iff
    its decoded desired message differs from w_j (ambiguity included).
    Counts are bit-identical for any worker count.
    """
    if not (snr > 0 and math.isfinite(snr)):
        raise ValueError("snr must be positive and finite")
    if trials < 1:
        raise ValueError("trials must be at least 1")
    K = H.K
    sigma = math.sqrt(1.0 / snr)
    # A receiver with no interferers faces a point-to-point channel: there is
    # no aligned codeword to decode jointly, so it searches messages alone.
    has_interference = [bool(np.any(H.cross[j])) for j in range(K)]
    pair_decoders: dict[float, PairDecoder] = {}
    single_decoders: dict[float, _SingleUserDecoder] = {}
    for j, g in enumerate(H.direct):
        key = float(g)
        if has_interference[j] and key not in pair_decoders:
            pair_decoders[key] = PairDecoder(code, g)
        if not has_interference[j] and key not in single_decoders:
            single_decoders[key] = _SingleUserDecoder(code, g)
    diag = [float(g) for g in H.direct]
    cross = H.cross.astype(float)

    def trial(t):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(t, 0)))
        W = rng.integers(0, code.p, size=(K, code.k))
        X = np.vstack([encode(code, W[u]).reals for u in range(K)])
        errs = np.zeros(K, dtype=np.int64)
        for j in range(K):
            rng_j = np.random.default_rng(
                np.random.SeedSequence(seed, spawn_key=(t, 1 + j))
            )
            z = rng_j.normal(0.0, sigma, size=code.n)
            interference = cross[j] @ X  # a_jj = 0 keeps the desired term out
            y = mod_interval(diag[j] * X[j] + interference + z)
            if has_interference[j]:
                out = pair_decoders[diag[j]].decode(y)
                decoded = None if out is AMBIGUOUS else out[1]
            else:
                decoded = single_decoders[diag[j]].decode(y)
            errs[j] = int(decoded is None or not np.array_equal(decoded, W[j]))
        return errs

    totals = np.zeros(K, dtype=np.int64)
    network_errors = 0
    if workers <= 1:
        results = map(trial, range(trials))
    else:
        pool = ThreadPoolExecutor(max_workers=workers)
        try:
            results = list(pool.map(trial, range(trials), chunksize=16))
        finally:
            pool.shutdown()
    for errs in results:
        totals += errs
        network_errors += int(errs.any())

    return NetworkSimResult(
        trials=trials,
        receiver_errors=tuple(int(e) for e in totals),
        receiver_p_e=tuple(float(e / trials) for e in totals),
        receiver_ci95=tuple(wilson_interval(int(e), trials) for e in totals),
        network_errors=network_errors,
        network_p_e=network_errors / trials,
        network_ci95=wilson_interval(network_errors, trials),
    )


def sum_rate_curves(H: ChannelMatrix, snr_db_grid, p_max: int | None = None):
    """Rows (snr_db, aligned sum rate, time-sharing sum rate, benchmark).

    The aligned sum rate is K times the symmetric rate; the benchmark uses
    h = max_j h_jj.
    """
    grid = list(snr_db_grid)
    if not grid:
        raise ValueError("snr_db_grid must be nonempty")
    h_bench = max(float(g) for g in H.direct)
    rows = []
    for snr_db in grid:
        snr = db_to_linear(float(snr_db))
        sym = theorem2_sym_rate(H, snr, p_max).rate
        rows.append(
            (
                float(snr_db),
                H.K * sym,
                time_sharing_sum_rate(H.K, snr),
                dof_benchmark(H.K, h_bench, snr),
            )
        )
    return rows
