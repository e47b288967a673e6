"""Series-convergence probing and bracketing of the critical exponent.

The partial sums of sum a_n^-sigma are accumulated in the log domain
(log-sum-exp), so terms never underflow no matter how large a_n gets.  A
finite prefix can never prove convergence or divergence; the verdict is an
explicit heuristic built from dyadic block contribution ratios and the
block-to-block decay trend, with every threshold recorded on the trace.

Bracketing bisects on sigma between a certified Diverging verdict below and
a certified Converging verdict above.  The bisection stops at the first
Inconclusive verdict rather than manufacturing precision near the critical
exponent, where the series changes character arbitrarily slowly.

Independent sigma evaluations are pure and may run in parallel over the
same immutable prefix; each partial-sum accumulation is a sequential fold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import gmpy2

from .errors import InvalidParam, InvalidSigma, NoBracket, TooShort
from .estimators import (
    Diagnostic,
    FunctionalKind,
    functional_stream,
    stolz_eps_stream,
    tail_liminf,
    tail_limsup,
)
from .numeric import ctx, mpfr_from
from .sequences import SequencePrefix


class Verdict(str, Enum):
    CONVERGING = "converging"
    DIVERGING = "diverging"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class ProbeThresholds:
    """Verdict thresholds; every trace records the set it was judged by.

    ``conv_ratio`` / ``div_ratio`` bound the last complete dyadic block's
    contribution ratio (block sum / running total).  ``trend_conv`` /
    ``trend_div`` bound the mean log2 block-to-block growth over the last
    ``trend_blocks`` ratios: clear decay certifies convergence, flat or
    growing blocks certify divergence, and the band between is Inconclusive
    by design.
    """

    conv_ratio: float = 1e-3
    div_ratio: float = 0.1
    trend_conv: float = -0.02
    trend_div: float = -0.005
    trend_blocks: int = 3

    def __post_init__(self):
        if not (0 < self.conv_ratio and 0 < self.div_ratio):
            raise InvalidParam("contribution-ratio thresholds must be positive")
        if self.trend_conv >= self.trend_div:
            raise InvalidParam("trend_conv must lie strictly below trend_div")


# bracketing judges probes by trend first, so the ratio gates are wider
BRACKET_THRESHOLDS = ProbeThresholds(conv_ratio=0.05, div_ratio=0.02)


@dataclass(frozen=True)
class SumTrace:
    """Log-domain partial sums of sum a_n^-sigma with a convergence verdict.

    ``partial_sums_log`` holds (n, ln S_n) checkpoints at the dyadic block
    ends plus the final index.  ``tail_increment_ratio`` is the last
    complete block's share of the running total.
    """

    sigma: float
    partial_sums_log: tuple
    verdict: Verdict
    tail_increment_ratio: float
    block_trend: float | None
    block_log_sums: tuple
    thresholds: ProbeThresholds
    n_terms: int


def partial_sums(
    prefix: SequencePrefix,
    sigma,
    thresholds: ProbeThresholds | None = None,
) -> SumTrace:
    """Accumulate sum exp(-sigma ln a_n) by log-sum-exp and judge its tail."""
    thresholds = thresholds or ProbeThresholds()
    if len(prefix) < 32:
        raise TooShort("partial_sums needs a prefix of length >= 32")
    bits = prefix.precision_bits
    sigma_m = mpfr_from(sigma, bits)
    if not sigma_m > 0:
        raise InvalidSigma(f"sigma must be > 0, got {sigma}")
    lns = prefix.ln_terms
    n_total = len(lns)
    checkpoints = []
    block_log_sums = []
    with ctx(bits):
        log1p, exp = gmpy2.log1p, gmpy2.exp
        ln_total = None
        block_ln = None
        block_end = 2  # current dyadic block is [2^k, 2^(k+1)); first is {1}

        def fold(total, block):
            if total is None:
                return block
            if block <= total:
                return total + log1p(exp(block - total))
            return block + log1p(exp(total - block))

        for pos in range(n_total):
            n = pos + 1
            if n >= block_end:
                # the running total only advances at block boundaries
                ln_total = fold(ln_total, block_ln)
                checkpoints.append((n - 1, ln_total))
                block_log_sums.append((n - 1, block_ln))
                block_ln = None
                block_end *= 2
            term = -sigma_m * lns[pos]
            if block_ln is None:
                block_ln = term
            elif term <= block_ln:
                block_ln = block_ln + log1p(exp(term - block_ln))
            else:
                block_ln = term + log1p(exp(block_ln - term))
        if block_ln is not None:
            ln_total = fold(ln_total, block_ln)
            if n_total + 1 == block_end:
                block_log_sums.append((n_total, block_ln))
        checkpoints.append((n_total, ln_total))

        # judge on complete blocks only
        ratio = None
        trend = None
        if block_log_sums:
            last_end, last_ln = block_log_sums[-1]
            total_at_end = next(c for c in checkpoints if c[0] == last_end)[1]
            ratio = float(gmpy2.exp(last_ln - total_at_end))
            ratios = []
            for (_, a), (_, b) in zip(block_log_sums[:-1], block_log_sums[1:]):
                ratios.append(float((b - a) / gmpy2.log(gmpy2.mpfr(2))))
            if ratios:
                window = ratios[-thresholds.trend_blocks:]
                trend = sum(window) / len(window)

    verdict = Verdict.INCONCLUSIVE
    if ratio is not None and trend is not None:
        if ratio > thresholds.div_ratio and trend >= thresholds.trend_div:
            verdict = Verdict.DIVERGING
        elif ratio < thresholds.conv_ratio and trend <= thresholds.trend_conv:
            verdict = Verdict.CONVERGING

    return SumTrace(
        sigma=float(sigma_m),
        partial_sums_log=tuple(checkpoints),
        verdict=verdict,
        tail_increment_ratio=ratio if ratio is not None else math.nan,
        block_trend=trend,
        block_log_sums=tuple(block_log_sums),
        thresholds=thresholds,
        n_terms=n_total,
    )


@dataclass(frozen=True)
class TauBracket:
    """Certified [lo, hi] bracket for the exponent of convergence.

    ``lo`` carries a Diverging verdict (or is the a-priori divergent sigma=0,
    flagged by ``lo_is_axiom``); ``hi`` carries a Converging verdict unless
    ``hi_certified`` is false.  ``probes`` lists every (sigma, verdict)
    evaluated, ``stopped_at`` the first Inconclusive sigma if any.
    ``eps_upper_estimate`` is the density estimate on the same prefix; the
    two estimate the same exponent, and ``consistency_gap`` is their
    distance from the bracket midpoint.
    """

    lo: float
    hi: float
    lo_is_axiom: bool
    hi_certified: bool
    probes: tuple
    stopped_at: float | None
    eps_upper_estimate: float
    consistency_gap: float

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def midpoint(self) -> float:
        return (self.hi + self.lo) / 2


def bracket_tau(
    prefix,
    sigma_lo: float,
    sigma_hi: float,
    steps: int = 12,
    thresholds: ProbeThresholds | None = None,
) -> TauBracket:
    """Bisect on sigma for the tightest (Diverging, Converging) bracket.

    ``prefix`` may be a SequencePrefix or a FamilySpec to generate first.
    sigma = 0 always diverges for an infinite set, so a Converging or
    Inconclusive verdict at the low endpoint widens the bracket to [0, .]
    instead of failing.  Only a Diverging verdict at both endpoints leaves
    nothing to bracket and raises NoBracket.
    """
    if not isinstance(prefix, SequencePrefix):
        from .families import FiniteSetReport, generate

        prefix = generate(prefix)
        if isinstance(prefix, FiniteSetReport):
            raise InvalidParam("cannot bracket a finite value set")
    if not (0 < sigma_lo < sigma_hi):
        raise InvalidParam("need 0 < sigma_lo < sigma_hi")
    if steps < 4:
        raise InvalidParam("steps must be >= 4")
    thresholds = thresholds or BRACKET_THRESHOLDS

    probes: list[tuple[float, Verdict]] = []

    def verdict_at(sig: float) -> Verdict:
        v = partial_sums(prefix, sig, thresholds).verdict
        probes.append((sig, v))
        return v

    v_lo = verdict_at(sigma_lo)
    v_hi = verdict_at(sigma_hi)
    if v_lo is Verdict.DIVERGING and v_hi is Verdict.DIVERGING:
        raise NoBracket(
            f"both endpoints ({sigma_lo}, {sigma_hi}) look divergent; raise sigma_hi"
        )

    lo_is_axiom = v_lo is not Verdict.DIVERGING
    cur_lo = 0.0 if lo_is_axiom else sigma_lo
    if v_lo is Verdict.CONVERGING:
        cur_hi, hi_certified = sigma_lo, True
    elif v_hi is Verdict.CONVERGING:
        cur_hi, hi_certified = sigma_hi, True
    else:
        cur_hi, hi_certified = sigma_hi, False

    stopped_at = None
    if hi_certified:
        for _ in range(steps):
            mid = (cur_lo + cur_hi) / 2
            v = verdict_at(mid)
            if v is Verdict.DIVERGING:
                cur_lo = mid
                lo_is_axiom = False
            elif v is Verdict.CONVERGING:
                cur_hi = mid
            else:
                stopped_at = mid
                break

    eps_est = _eps_upper_estimate(prefix)
    mid = (cur_lo + cur_hi) / 2
    return TauBracket(
        lo=cur_lo,
        hi=cur_hi,
        lo_is_axiom=lo_is_axiom,
        hi_certified=hi_certified,
        probes=tuple(probes),
        stopped_at=stopped_at,
        eps_upper_estimate=eps_est,
        consistency_gap=abs(mid - eps_est),
    )


def _eps_upper_estimate(prefix: SequencePrefix) -> float:
    """The profile's refined upper density estimate, computed directly."""
    quot = stolz_eps_stream(prefix)
    q_up = tail_limsup(quot)
    q_lo = tail_liminf(quot)
    spread = float(q_up.tail_estimate) - float(q_lo.tail_estimate)
    if (
        q_up.diagnostic is not Diagnostic.DIVERGING
        and q_lo.diagnostic is not Diagnostic.DIVERGING
        and spread <= 0.05
    ):
        return float(q_up.tail_estimate)
    eps = functional_stream(prefix, FunctionalKind.EPS)
    return float(tail_limsup(eps).tail_estimate)
