"""The 3-user power-time schedule: power back-off plus one repeat frame.

The channel is used 4n times to move three length-n codewords per user.
Fixed receiver scalings (1/h12, 1/h23, 1/h31) turn the gain matrix into
h_tilde with ones at (1,2), (2,3) and (3,1).  In data frame t one
transmitter backs off so that receiver t sees both interferers with gain
exactly one: the interference folds into a single codeword and receiver t
decodes its own frame-t codeword through the two-user joint decoder.  In
frame 4 each user repeats its already-decoded codeword; every receiver
subtracts its known codeword, decodes the remaining two-user MAC, and then
strips the now-known interference from the two residual frames.  Every one
of the twelve decode steps is a two-user channel evaluated through the
same-codebook rate bound; the schedule's symmetric rate is 3/4 of the
smallest step rate (three data frames out of four channel uses).

SNR bookkeeping: the fixed receiver scalings are pure renaming (noise is
normalized after them, which makes the rate invariant to rescaling a row of
H together with that receiver's noise).  Normalizing one step by its
stronger gain g multiplies the step SNR by g**2, and the per-frame back-off
factors are already folded into the equivalent gain matrices.  Frame-4
subtraction is treated as exact: error propagation across frames is not
modeled in the rate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .rates import default_p_max, theorem1_rate

SYMBOL_RATE = 0.75  # three data frames per four channel uses

_ORDERING_CHECKS = (
    ("h13 >= h12", 0, 2, 0, 1),
    ("h22 >= h23", 1, 1, 1, 2),
    ("h32 >= h31", 2, 1, 2, 0),
)


class GainOrderingError(ValueError):
    """The canonical schedule's gain ordering assumption fails."""

    def __init__(self, inequality: str, lhs: float, rhs: float):
        self.inequality = inequality
        super().__init__(
            f"gain ordering {inequality} fails ({lhs:.6g} < {rhs:.6g}); "
            "only the canonical ordering is supported"
        )


@dataclass(frozen=True)
class GainAssumption:
    """The three orderings the canonical schedule requires."""

    h13_ge_h12: bool
    h22_ge_h23: bool
    h32_ge_h31: bool

    @classmethod
    def from_matrix(cls, H) -> "GainAssumption":
        H = np.asarray(H, dtype=float)
        return cls(
            h13_ge_h12=bool(H[0, 2] >= H[0, 1]),
            h22_ge_h23=bool(H[1, 1] >= H[1, 2]),
            h32_ge_h31=bool(H[2, 1] >= H[2, 0]),
        )

    @property
    def ok(self) -> bool:
        return self.h13_ge_h12 and self.h22_ge_h23 and self.h32_ge_h31


@dataclass(frozen=True)
class DecodeStep:
    """One two-user decode, mapped to the MAC rate bound.

    ``gains`` is the step's raw two-user gain pair from the equivalent
    frame matrix; the stronger gain takes the unit role, giving the
    effective ratio ``gamma_eff`` and the SNR multiplier ``snr_mult``.
    """

    frame: int
    receiver: int
    label: str
    gains: tuple[float, float]
    gamma_eff: float
    snr_mult: float


def _make_step(frame: int, receiver: int, label: str, g_a: float, g_b: float) -> DecodeStep:
    if abs(g_a) >= abs(g_b):
        strong, weak = g_a, g_b
    else:
        strong, weak = g_b, g_a
    return DecodeStep(
        frame=frame,
        receiver=receiver,
        label=label,
        gains=(g_a, g_b),
        gamma_eff=weak / strong,
        snr_mult=strong * strong,
    )


@dataclass(frozen=True)
class Schedule:
    """The full 4-frame plan for one channel matrix."""

    matrix: np.ndarray
    receiver_scalings: tuple[float, float, float]  # 1/h12, 1/h23, 1/h31
    h_tilde: np.ndarray
    alphas: tuple[float, float, float]  # frame-1 alpha3, frame-2 alpha1, frame-3 alpha2
    frame_matrices: tuple[np.ndarray, ...]  # equivalent gains, frames 1..4
    steps: tuple[DecodeStep, ...]
    symbol_rate: float = SYMBOL_RATE


ALIGNMENT_TOL = 1e-12


def build_schedule(H) -> Schedule:
    """Construct the canonical schedule; rejects a violated gain ordering."""
    H = np.asarray(H, dtype=float)
    if H.shape != (3, 3):
        raise ValueError(f"power-time schedule needs a 3x3 matrix, got {H.shape}")
    if np.any(H == 0.0) or not np.all(np.isfinite(H)):
        raise ValueError("all channel gains must be finite and nonzero")
    for name, r1, c1, r2, c2 in _ORDERING_CHECKS:
        if not H[r1, c1] >= H[r2, c2]:
            raise GainOrderingError(name, H[r1, c1], H[r2, c2])

    scalings = (1.0 / H[0, 1], 1.0 / H[1, 2], 1.0 / H[2, 0])
    ht = np.vstack([H[0] / H[0, 1], H[1] / H[1, 2], H[2] / H[2, 0]])
    # x/x == 1.0 exactly in IEEE arithmetic, but assert the alignment anyway
    for j, k in ((0, 1), (1, 2), (2, 0)):
        if abs(ht[j, k] - 1.0) > ALIGNMENT_TOL:
            raise AssertionError("receiver scaling failed to produce a unit gain")

    alpha3 = 1.0 / ht[0, 2]
    alpha1 = 1.0 / ht[1, 0]
    alpha2 = 1.0 / ht[2, 1]

    def scaled(col: int, alpha: float, aligned_row: int) -> np.ndarray:
        m = ht.copy()
        m[:, col] *= alpha
        if abs(m[aligned_row, col] - 1.0) > ALIGNMENT_TOL:
            raise AssertionError("power back-off failed to align the interferer")
        m[aligned_row, col] = 1.0  # exact by construction, pin the float
        return m

    ht1 = scaled(2, alpha3, 0)
    ht2 = scaled(0, alpha1, 1)
    ht3 = scaled(1, alpha2, 2)
    ht4 = ht.copy()

    steps = (
        # data frames: receiver t sees its interferers perfectly aligned
        _make_step(1, 1, "frame1 aligned decode at rx1", ht1[0, 0], 1.0),
        _make_step(2, 2, "frame2 aligned decode at rx2", ht2[1, 1], 1.0),
        _make_step(3, 3, "frame3 aligned decode at rx3", ht3[2, 2], 1.0),
        # repeat frame: subtract the own known codeword, decode the other two
        _make_step(4, 1, "frame4 MAC at rx1 (users 2,3)", ht4[0, 1], ht4[0, 2]),
        _make_step(4, 2, "frame4 MAC at rx2 (users 1,3)", ht4[1, 0], ht4[1, 2]),
        _make_step(4, 3, "frame4 MAC at rx3 (users 1,2)", ht4[2, 0], ht4[2, 1]),
        # residual frames: strip the interferer learned in frame 4
        _make_step(2, 1, "frame2 residual at rx1", ht2[0, 0], ht2[0, 2]),
        _make_step(3, 1, "frame3 residual at rx1", ht3[0, 0], ht3[0, 1]),
        _make_step(1, 2, "frame1 residual at rx2", ht1[1, 1], ht1[1, 2]),
        _make_step(3, 2, "frame3 residual at rx2", ht3[1, 0], ht3[1, 1]),
        _make_step(1, 3, "frame1 residual at rx3", ht1[2, 1], ht1[2, 2]),
        _make_step(2, 3, "frame2 residual at rx3", ht2[2, 0], ht2[2, 2]),
    )
    for m in (ht, ht1, ht2, ht3, ht4):
        m.setflags(write=False)
    return Schedule(
        matrix=H,
        receiver_scalings=scalings,
        h_tilde=ht,
        alphas=(alpha3, alpha1, alpha2),
        frame_matrices=(ht1, ht2, ht3, ht4),
        steps=steps,
    )


def schedule_rate(H, snr: float, p_max: Optional[int] = None) -> float:
    """Symmetric rate of the power-time code: 3/4 of the worst step rate."""
    sched = H if isinstance(H, Schedule) else build_schedule(H)
    if not (snr > 0 and math.isfinite(snr)):
        raise ValueError("snr must be positive and finite")
    worst = math.inf
    for step in sched.steps:
        snr_eff = snr * step.snr_mult
        bound = p_max if p_max is not None else default_p_max(snr_eff)
        worst = min(worst, theorem1_rate(step.gamma_eff, snr_eff, bound).rate)
        if worst == 0.0:
            break
    return SYMBOL_RATE * worst


def dof_factor(
    H,
    snr_grid,
    p_max_rule: Optional[Callable[[float], int]] = None,
) -> list[tuple[float, float]]:
    """(snr, sum_rate / ((1/2) log2 snr)) along an ascending SNR grid."""
    grid = [float(s) for s in snr_grid]
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("snr_grid must be strictly ascending")
    sched = H if isinstance(H, Schedule) else build_schedule(H)
    out = []
    for snr in grid:
        p_max = p_max_rule(snr) if p_max_rule is not None else None
        sum_rate = 3.0 * schedule_rate(sched, snr, p_max)
        denom = 0.5 * math.log2(snr) if snr > 1.0 else 0.0
        out.append((snr, sum_rate / denom if sum_rate > 0.0 and denom > 0.0 else 0.0))
    return out
