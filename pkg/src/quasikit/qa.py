"""Quasianalyticity criterion series and related inequalities.

Three series decide quasianalyticity of the class attached to a weight
sequence: the reciprocal suffix-root infimum series, the reciprocal-root
series of the convex minorant, and the minorant quotient series.  All agree
on divergence; at a finite horizon the package computes their terms exactly
in the log domain and reports trend verdicts plus the finite-horizon
inequality chain that links them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ValidationError
from .sequences import LogSequence, RegularizedSequence, convex_regularize
from .series import EPS_CONV, SIGMA_DIV, SeriesReport, diagnose_series

# Flag threshold for the trivial quasianalytic case: the sequence's n-th
# roots stay below e**LIMINF_CAP on the tail of the horizon.  A flag, not a
# proof; callers may pass their own cap.
LIMINF_CAP = 50.0

# Relative slack for the finite-horizon inequality chain.
CHAIN_RTOL = 1e-9


def beta_sequence(seq: LogSequence) -> np.ndarray:
    """log beta_n = min_{n <= k < N} L_k / k for n = 1..N-1 (suffix minimum)."""
    if seq.length < 2:
        raise ValidationError("beta_sequence needs at least 2 entries")
    logs = seq.logs
    n_len = seq.length
    out = np.empty(n_len - 1, dtype=float)
    running = math.inf
    for k in range(n_len - 1, 0, -1):
        running = min(running, logs[k] / k)
        out[k - 1] = running
    return out


def carleman_series(
    seq: LogSequence,
    sigma_div: float = SIGMA_DIV,
    eps_conv: float = EPS_CONV,
) -> SeriesReport:
    """Terms 1/beta_n for n = 1..N-1, with the trend verdict."""
    log_beta = beta_sequence(seq)
    terms = np.exp(-log_beta)
    return diagnose_series(terms, sigma_div=sigma_div, eps_conv=eps_conv)


def root_series(
    reg: RegularizedSequence,
    sigma_div: float = SIGMA_DIV,
    eps_conv: float = EPS_CONV,
) -> SeriesReport:
    """Terms exp(-L^c_n / n) for n = 1..N-1."""
    if reg.length < 2:
        raise ValidationError("root_series needs at least 2 entries")
    logs_c = reg.as_array()
    n = np.arange(1, reg.length, dtype=float)
    terms = np.exp(-logs_c[1:] / n)
    return diagnose_series(terms, sigma_div=sigma_div, eps_conv=eps_conv)


def ratio_series(
    reg: RegularizedSequence,
    sigma_div: float = SIGMA_DIV,
    eps_conv: float = EPS_CONV,
) -> SeriesReport:
    """Terms exp(L^c_{n-1} - L^c_n) for n = 1..N-1."""
    if reg.length < 2:
        raise ValidationError("ratio_series needs at least 2 entries")
    logs_c = reg.as_array()
    terms = np.exp(logs_c[:-1] - logs_c[1:])
    return diagnose_series(terms, sigma_div=sigma_div, eps_conv=eps_conv)


@dataclass(frozen=True)
class CarlemanCheck:
    lhs: float
    rhs: float
    ok: bool


def carleman_inequality_check(a: Sequence[float]) -> CarlemanCheck:
    """Check sum_k (a_1...a_k)^(1/k) <= e * sum_k a_k for positive a.

    The left side accumulates running log-sums so products of thousands of
    factors never overflow.
    """
    values = [float(v) for v in a]
    if not values:
        raise ValidationError("carleman_inequality_check needs a nonempty input")
    for k, v in enumerate(values):
        if not (v > 0) or not math.isfinite(v):
            raise ValidationError(f"entry a[{k}] = {v!r} is not a positive real")
    lhs = 0.0
    log_prod = 0.0
    for k, v in enumerate(values, start=1):
        log_prod += math.log(v)
        lhs += math.exp(log_prod / k)
    rhs = math.e * math.fsum(values)
    return CarlemanCheck(lhs=lhs, rhs=rhs, ok=lhs <= rhs)


def liminf_check(seq: LogSequence, cap: float = LIMINF_CAP) -> bool:
    """Flag the trivially quasianalytic case: tail roots bounded by e**cap.

    Takes the minimum of L_n/n over the second half of the horizon and
    compares it against ``cap``.  Heuristic by construction.
    """
    if seq.length < 8:
        raise ValidationError("liminf_check needs at least 8 entries")
    logs = seq.logs
    half = seq.length // 2
    tail_min = min(logs[n] / n for n in range(half, seq.length))
    return tail_min < cap


@dataclass(frozen=True)
class QAReport:
    """Aggregate of the three criterion series for one sequence."""

    beta: tuple[float, ...]
    carleman: SeriesReport
    root_c: SeriesReport
    ratio_c: SeriesReport
    liminf_flag: bool
    chain_ok: bool

    def verdicts(self) -> tuple[str, str, str]:
        return (self.carleman.verdict, self.root_c.verdict, self.ratio_c.verdict)

    def to_json(self) -> dict:
        return {
            "beta": list(self.beta),
            "carleman": self.carleman.to_json(),
            "root_c": self.root_c.to_json(),
            "ratio_c": self.ratio_c.to_json(),
            "liminf_flag": self.liminf_flag,
            "chain_ok": self.chain_ok,
        }


def chain_holds(
    root_rep: SeriesReport,
    carleman_rep: SeriesReport,
    ratio_rep: SeriesReport,
    rtol: float = CHAIN_RTOL,
) -> bool:
    """Finite-horizon inequality chain over the common index range:

    sum exp(-L^c_n/n) >= sum 1/beta_n >= sum M^c_{n-1}/M^c_n,
    and sum exp(-L^c_n/n) <= e * sum M^c_{n-1}/M^c_n.
    """
    s_root = math.fsum(root_rep.terms)
    s_beta = math.fsum(carleman_rep.terms)
    s_ratio = math.fsum(ratio_rep.terms)
    return (
        s_root >= s_beta * (1.0 - rtol)
        and s_beta >= s_ratio * (1.0 - rtol)
        and s_root <= math.e * s_ratio * (1.0 + rtol)
    )


def analyze(
    seq: LogSequence,
    sigma_div: float = SIGMA_DIV,
    eps_conv: float = EPS_CONV,
    liminf_cap: float = LIMINF_CAP,
) -> QAReport:
    """Regularize, compute the three criterion series, and aggregate."""
    if seq.length < 8:
        raise ValidationError("analyze needs at least 8 entries")
    reg = convex_regularize(seq)
    log_beta = beta_sequence(seq)
    rep_c = diagnose_series(np.exp(-log_beta), sigma_div=sigma_div, eps_conv=eps_conv)
    rep_root = root_series(reg, sigma_div=sigma_div, eps_conv=eps_conv)
    rep_ratio = ratio_series(reg, sigma_div=sigma_div, eps_conv=eps_conv)
    return QAReport(
        beta=tuple(float(v) for v in log_beta),
        carleman=rep_c,
        root_c=rep_root,
        ratio_c=rep_ratio,
        liminf_flag=liminf_check(seq, cap=liminf_cap),
        chain_ok=chain_holds(rep_root, rep_c, rep_ratio),
    )
