"""Index functionals, tail-window limsup/liminf estimation, density profiles.

The quantities of interest are limits over an infinite sequence; a finite
prefix can only support surrogates.  The policy here is explicit and
reportable: a limsup (liminf) is estimated by the max (min) over the last
``tail_fraction`` of the samples, and extrema over dyadic index blocks
[2^k, 2^{k+1}) classify the stream as Converging / Oscillating / Diverging /
Inconclusive.  The divergence label is heuristic by construction -- no
finite prefix proves divergence.

Streams are computed independently per functional over the same immutable
prefix and may be evaluated in parallel; estimation itself is a sequential
fold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import gmpy2

from .errors import EmptyStream, InvalidParam, TooShort
from .numeric import ctx, euler_gamma
from .sequences import SequencePrefix

# Exact partial harmonic sums are used up to this argument; beyond it the
# asymptotic ln x + gamma + 1/(2x) is indistinguishable at working tolerance.
HARMONIC_EXACT_LIMIT = 10**6


class FunctionalKind(str, Enum):
    EPS = "eps"                  # log n / log a_n
    RHO = "rho"                  # a_n / a_{n+1}
    ALPHA_STAT = "alpha-stat"    # n * g_n / a_{n+1}
    BETA_STAT = "beta-stat"      # n * g_n / a_n
    HARMONIC = "harmonic"        # H(n) / H(a_n)


@dataclass(frozen=True)
class FunctionalStream:
    """Lazily produced (n, value) samples of one index functional."""

    kind: FunctionalKind | None
    indices: tuple
    values: tuple

    def __len__(self):
        return len(self.values)

    @property
    def samples(self):
        return zip(self.indices, self.values)


def functional_stream(prefix: SequencePrefix, kind: FunctionalKind) -> FunctionalStream:
    """One sample per eligible index of the requested functional."""
    n_min = 2 if kind in (FunctionalKind.RHO, FunctionalKind.ALPHA_STAT, FunctionalKind.BETA_STAT) else 3
    if len(prefix) < n_min:
        raise TooShort(f"{kind.value} needs a prefix of length >= {n_min}")
    if kind is FunctionalKind.EPS:
        return _eps_stream(prefix)
    if kind is FunctionalKind.RHO:
        return _gap_stream(prefix, kind)
    if kind in (FunctionalKind.ALPHA_STAT, FunctionalKind.BETA_STAT):
        return _gap_stream(prefix, kind)
    if kind is FunctionalKind.HARMONIC:
        return _harmonic_stream(prefix)
    raise InvalidParam(f"unknown functional kind {kind!r}")


def _eps_stream(prefix: SequencePrefix) -> FunctionalStream:
    bits = prefix.precision_bits
    offset = prefix.index_offset
    lns = prefix.ln_terms
    indices = []
    values = []
    with ctx(bits):
        for pos in range(len(lns)):
            n = pos + 1 + offset
            if n < 2:
                continue  # log 1 = 0 would divide by a possibly-zero log a_1
            indices.append(n)
            values.append(gmpy2.log(gmpy2.mpz(n)) / lns[pos])
    return FunctionalStream(FunctionalKind.EPS, tuple(indices), tuple(values))


def _gap_stream(prefix: SequencePrefix, kind: FunctionalKind) -> FunctionalStream:
    bits = prefix.precision_bits
    offset = prefix.index_offset
    indices = []
    values = []
    with ctx(bits):
        if prefix.is_exact:
            terms = prefix.values
            for pos in range(len(terms) - 1):
                n = pos + 1 + offset
                a, b = gmpy2.mpz(terms[pos]), gmpy2.mpz(terms[pos + 1])
                if kind is FunctionalKind.RHO:
                    v = a / b
                elif kind is FunctionalKind.ALPHA_STAT:
                    v = (n * (b - a)) / b
                else:
                    v = (n * (b - a)) / a
                indices.append(n)
                values.append(v)
        else:
            lns = prefix.values
            for pos in range(len(lns) - 1):
                n = pos + 1 + offset
                d = lns[pos + 1] - lns[pos]
                if kind is FunctionalKind.RHO:
                    v = gmpy2.exp(-d)
                elif kind is FunctionalKind.ALPHA_STAT:
                    v = -n * gmpy2.expm1(-d)
                else:
                    v = n * gmpy2.expm1(d)
                indices.append(n)
                values.append(v)
    return FunctionalStream(kind, tuple(indices), tuple(values))


class _HarmonicAccumulator:
    """Rolling H(x) = sum_{k<=x} 1/k with the documented exact/asymptotic split."""

    def __init__(self, bits: int):
        self.bits = bits
        self.arg = 0
        with ctx(bits):
            self.acc = gmpy2.mpfr(0)
        self.gamma = euler_gamma(bits)

    def value_at(self, x: int, ln_x=None):
        with ctx(self.bits):
            if x <= HARMONIC_EXACT_LIMIT:
                if x < self.arg:
                    raise InvalidParam("harmonic accumulator arguments must be non-decreasing")
                one = gmpy2.mpfr(1)
                for k in range(self.arg + 1, x + 1):
                    self.acc += one / k
                self.arg = x
                return self.acc
            ln_val = ln_x if ln_x is not None else gmpy2.log(gmpy2.mpz(x))
            return ln_val + self.gamma + gmpy2.mpfr(1) / (2 * gmpy2.mpz(x))


def _harmonic_stream(prefix: SequencePrefix) -> FunctionalStream:
    bits = prefix.precision_bits
    offset = prefix.index_offset
    numer = _HarmonicAccumulator(bits)
    denom = _HarmonicAccumulator(bits)
    indices = []
    values = []
    ln_limit = math.log(HARMONIC_EXACT_LIMIT)
    with ctx(bits):
        for pos in range(len(prefix)):
            n = pos + 1 + offset
            hn = numer.value_at(n)
            if prefix.is_exact:
                ha = denom.value_at(prefix.values[pos])
            else:
                ln_a = prefix.values[pos]
                if ln_a <= ln_limit:
                    a = int(gmpy2.floor(gmpy2.exp(ln_a) + gmpy2.mpfr("0.5")))
                    a = max(a, 1)
                    ha = denom.value_at(a)
                else:
                    ha = ln_a + denom.gamma + gmpy2.exp(-ln_a) / 2
            indices.append(n)
            values.append(hn / ha)
    return FunctionalStream(FunctionalKind.HARMONIC, tuple(indices), tuple(values))


def stolz_eps_stream(prefix: SequencePrefix) -> FunctionalStream:
    """Difference-quotient refinement of the EPS functional.

    Samples are log((n+1)/n) / log(a_{n+1}/a_n).  By the difference-quotient
    sandwich these bracket the exponential densities asymptotically and
    converge much faster than log n / log a_n when a_n has a multiplicative
    constant.
    """
    if len(prefix) < 2:
        raise TooShort("the difference-quotient stream needs length >= 2")
    bits = prefix.precision_bits
    offset = prefix.index_offset
    indices = []
    values = []
    with ctx(bits):
        if prefix.is_exact:
            terms = prefix.values
            for pos in range(len(terms) - 1):
                n = pos + 1 + offset
                a, b = gmpy2.mpz(terms[pos]), gmpy2.mpz(terms[pos + 1])
                dln_a = gmpy2.log1p((b - a) / a)
                indices.append(n)
                values.append(gmpy2.log1p(gmpy2.mpfr(1) / n) / dln_a)
        else:
            lns = prefix.values
            for pos in range(len(lns) - 1):
                n = pos + 1 + offset
                d = lns[pos + 1] - lns[pos]
                indices.append(n)
                values.append(gmpy2.log1p(gmpy2.mpfr(1) / n) / d)
    return FunctionalStream(None, tuple(indices), tuple(values))


# ---------------------------------------------------------------------------
# tail-window estimation
# ---------------------------------------------------------------------------

class Diagnostic(str, Enum):
    CONVERGING = "converging"
    OSCILLATING = "oscillating"
    DIVERGING = "diverging"
    INCONCLUSIVE = "inconclusive"


class Mode(str, Enum):
    LIMSUP = "limsup"
    LIMINF = "liminf"


@dataclass(frozen=True)
class WindowPolicy:
    tail_fraction: float = 0.5
    spread_tol: float = 0.05
    # monotone block growth is called divergence only past this factor over
    # the last three blocks, so slow convergence from below is not mislabeled
    div_growth: float = 1.2

    def __post_init__(self):
        if not (0 < self.tail_fraction < 1):
            raise InvalidParam("tail_fraction must lie in (0,1)")
        if self.spread_tol <= 0:
            raise InvalidParam("spread_tol must be positive")
        if self.div_growth <= 1:
            raise InvalidParam("div_growth must exceed 1")


@dataclass(frozen=True)
class EstimateTrace:
    """Finite-prefix surrogate for a limsup or liminf.

    ``tail_estimate`` is the extremum over the final window;
    ``block_extrema`` holds (block_end_n, extremum) for every complete
    dyadic block and drives the convergence diagnostic.  ``last_value`` is
    the final sample, useful for streams known to be eventually monotone.
    """

    mode: Mode
    block_extrema: tuple
    tail_estimate: object
    last_value: object
    diagnostic: Diagnostic
    tail_fraction: float
    n_samples: int


def tail_limsup(stream: FunctionalStream, policy: WindowPolicy | None = None) -> EstimateTrace:
    return _tail_estimate(stream, Mode.LIMSUP, policy or WindowPolicy())


def tail_liminf(stream: FunctionalStream, policy: WindowPolicy | None = None) -> EstimateTrace:
    return _tail_estimate(stream, Mode.LIMINF, policy or WindowPolicy())


def _tail_estimate(stream: FunctionalStream, mode: Mode, policy: WindowPolicy) -> EstimateTrace:
    values = stream.values
    if not values:
        raise EmptyStream("cannot estimate over an empty stream")
    pick = max if mode is Mode.LIMSUP else min
    count = math.ceil(policy.tail_fraction * len(values))
    tail_est = pick(values[len(values) - count:])

    indices = stream.indices
    n_min, n_max = indices[0], indices[-1]
    blocks = []
    k = 0
    while 2**k < n_min:
        k += 1  # the first fully covered dyadic block starts at or after n_min
    pos = 0
    while True:
        lo, hi = 2**k, 2 ** (k + 1) - 1
        if hi > n_max:
            break
        while pos < len(indices) and indices[pos] < lo:
            pos += 1
        extremum = None
        while pos < len(indices) and indices[pos] <= hi:
            v = values[pos]
            if extremum is None or (v > extremum if mode is Mode.LIMSUP else v < extremum):
                extremum = v
            pos += 1
        if extremum is not None:
            blocks.append((hi, extremum))
        k += 1

    diagnostic = _classify(blocks, policy)
    return EstimateTrace(
        mode=mode,
        block_extrema=tuple(blocks),
        tail_estimate=tail_est,
        last_value=values[-1],
        diagnostic=diagnostic,
        tail_fraction=policy.tail_fraction,
        n_samples=len(values),
    )


def _classify(blocks, policy: WindowPolicy) -> Diagnostic:
    if len(blocks) < 3:
        return Diagnostic.INCONCLUSIVE
    e1, e2, e3 = (b[1] for b in blocks[-3:])
    lo, hi = min(e1, e2, e3), max(e1, e2, e3)
    if hi - lo <= policy.spread_tol:
        return Diagnostic.CONVERGING
    if e1 < e2 < e3:
        growing = e3 > e1 * policy.div_growth if e1 > 0 else e3 - e1 > policy.spread_tol
        return Diagnostic.DIVERGING if growing else Diagnostic.INCONCLUSIVE
    if e1 > e2 > e3:
        return Diagnostic.INCONCLUSIVE
    return Diagnostic.OSCILLATING


# ---------------------------------------------------------------------------
# profile assembly
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProfileConfig:
    window: WindowPolicy = WindowPolicy()
    refine_tol: float = 0.05


@dataclass(frozen=True)
class DensityProfile:
    """The assembled six-statistic report plus the implied density interval.

    The six named traces are the raw tail-window surrogates.  The refined
    epsilon scalars substitute the difference-quotient estimates whenever
    those stabilize (tight spread, no divergence); that choice is recorded
    in ``refined_from_quotients``.
    """

    family_tag: str
    n_terms: int
    precision_bits: int
    eps_lower: EstimateTrace
    eps_upper: EstimateTrace
    rho_lower: EstimateTrace
    rho_upper: EstimateTrace
    alpha_stat_liminf: EstimateTrace
    beta_stat_limsup: EstimateTrace
    alpha_stat_limsup: EstimateTrace
    beta_stat_liminf: EstimateTrace
    harmonic_lower: EstimateTrace
    harmonic_upper: EstimateTrace
    quotient_lower: EstimateTrace
    quotient_upper: EstimateTrace
    eps_lower_refined: object
    eps_upper_refined: object
    eps_estimate: object
    refined_from_quotients: bool
    implied_interval: tuple
    eps_harmonic_discrepancy: object

    @property
    def tail_fraction(self):
        return self.eps_upper.tail_fraction


def reciprocal_bound(trace: EstimateTrace, bits: int):
    """1/estimate with the conventions 1/inf = 0 and 1/0 = inf -> clip to 1."""
    if trace.diagnostic is Diagnostic.DIVERGING:
        return gmpy2.mpfr(0)
    with ctx(bits):
        v = trace.tail_estimate
        if v <= 0:
            return gmpy2.mpfr(1)
        r = 1 / gmpy2.mpfr(v)
        if r > 1:
            return gmpy2.mpfr(1)
        if r < 0:
            return gmpy2.mpfr(0)
        return r


def density_profile(prefix: SequencePrefix, config: ProfileConfig | None = None) -> DensityProfile:
    """Run all five functionals and assemble the density report."""
    if len(prefix) < 16:
        raise TooShort("density_profile needs a prefix of length >= 16")
    config = config or ProfileConfig()
    w = config.window
    bits = prefix.precision_bits

    eps = functional_stream(prefix, FunctionalKind.EPS)
    eps_lower, eps_upper = tail_liminf(eps, w), tail_limsup(eps, w)
    del eps
    rho = functional_stream(prefix, FunctionalKind.RHO)
    rho_lower, rho_upper = tail_liminf(rho, w), tail_limsup(rho, w)
    del rho
    alpha = functional_stream(prefix, FunctionalKind.ALPHA_STAT)
    alpha_liminf, alpha_limsup = tail_liminf(alpha, w), tail_limsup(alpha, w)
    del alpha
    beta = functional_stream(prefix, FunctionalKind.BETA_STAT)
    beta_liminf, beta_limsup = tail_liminf(beta, w), tail_limsup(beta, w)
    del beta
    harm = functional_stream(prefix, FunctionalKind.HARMONIC)
    harm_lower, harm_upper = tail_liminf(harm, w), tail_limsup(harm, w)
    del harm
    quot = stolz_eps_stream(prefix)
    quot_lower, quot_upper = tail_liminf(quot, w), tail_limsup(quot, w)
    del quot

    with ctx(bits):
        spread = quot_upper.tail_estimate - quot_lower.tail_estimate
        refine = (
            quot_upper.diagnostic is not Diagnostic.DIVERGING
            and quot_lower.diagnostic is not Diagnostic.DIVERGING
            and spread <= config.refine_tol
        )
        if refine:
            ref_lo, ref_up = quot_lower.tail_estimate, quot_upper.tail_estimate
        else:
            ref_lo, ref_up = eps_lower.tail_estimate, eps_upper.tail_estimate
        eps_estimate = (ref_lo + ref_up) / 2
        interval_lo = reciprocal_bound(beta_limsup, bits)
        interval_hi = reciprocal_bound(alpha_liminf, bits)
        discrepancy = max(
            abs(eps_upper.tail_estimate - harm_upper.tail_estimate),
            abs(eps_lower.tail_estimate - harm_lower.tail_estimate),
        )

    return DensityProfile(
        family_tag=prefix.family_tag,
        n_terms=len(prefix),
        precision_bits=bits,
        eps_lower=eps_lower,
        eps_upper=eps_upper,
        rho_lower=rho_lower,
        rho_upper=rho_upper,
        alpha_stat_liminf=alpha_liminf,
        beta_stat_limsup=beta_limsup,
        alpha_stat_limsup=alpha_limsup,
        beta_stat_liminf=beta_liminf,
        harmonic_lower=harm_lower,
        harmonic_upper=harm_upper,
        quotient_lower=quot_lower,
        quotient_upper=quot_upper,
        eps_lower_refined=ref_lo,
        eps_upper_refined=ref_up,
        eps_estimate=eps_estimate,
        refined_from_quotients=refine,
        implied_interval=(interval_lo, interval_hi),
        eps_harmonic_discrepancy=discrepancy,
    )
