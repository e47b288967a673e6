"""Inequality and theorem checks on concrete prefixes and analytic grids.

Every check returns a CheckReport rather than a bare bool: hypotheses that
the input does not meet yield Vacuous (never a silent Pass), and any leg
that leans on a heuristic divergence diagnostic downgrades Pass to
Heuristic-Pass.  All checks are pure; a batch runner may evaluate different
families in parallel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import gmpy2
import numpy as np

from .errors import InvalidGrid, InvalidParam, LengthMismatch, NotIncreasing, TooShort
from .estimators import (
    Diagnostic,
    DensityProfile,
    FunctionalStream,
    WindowPolicy,
    density_profile,
    reciprocal_bound,
    tail_liminf,
    tail_limsup,
)
from .families import FiniteSetReport, generate
from .numeric import ctx, mpfr_from
from .sequences import SequencePrefix


class CheckStatus(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    VACUOUS = "vacuous"
    HEURISTIC_PASS = "heuristic-pass"


@dataclass(frozen=True)
class CheckReport:
    check_id: str
    status: CheckStatus
    tolerance: float
    witnesses: tuple = ()
    details: dict = field(default_factory=dict)

    @property
    def failed(self) -> bool:
        return self.status is CheckStatus.FAIL


# ---------------------------------------------------------------------------
# gap-statistic sandwich: 1/beta <= lower eps <= upper eps <= 1/alpha
# ---------------------------------------------------------------------------

def check_sandwich(profile: DensityProfile, tol: float = 0.05) -> CheckReport:
    """Verify the reciprocal gap-statistic bounds around the densities.

    Legs whose bound comes from a Diverging statistic cannot be checked
    numerically on a finite prefix (the bound collapses to 0 by the 1/inf
    convention); they are accepted and flagged, downgrading the result to
    Heuristic-Pass.
    """
    bits = profile.precision_bits
    lo_bound = reciprocal_bound(profile.beta_stat_limsup, bits)
    hi_bound = reciprocal_bound(profile.alpha_stat_liminf, bits)
    eps_lo = profile.eps_lower_refined
    eps_up = profile.eps_upper_refined
    heuristic = []
    witnesses = []
    if profile.beta_stat_limsup.diagnostic is Diagnostic.DIVERGING:
        heuristic.append("lower-leg-divergent-beta")
    elif not lo_bound <= eps_lo + tol:
        witnesses.append((1, (float(lo_bound), float(eps_lo))))
    if not eps_lo <= eps_up + tol:
        witnesses.append((2, (float(eps_lo), float(eps_up))))
    if profile.alpha_stat_liminf.diagnostic is Diagnostic.DIVERGING:
        heuristic.append("upper-leg-divergent-alpha")
    elif not eps_up <= hi_bound + tol:
        witnesses.append((3, (float(eps_up), float(hi_bound))))
    if witnesses:
        status = CheckStatus.FAIL
    elif heuristic:
        status = CheckStatus.HEURISTIC_PASS
    else:
        status = CheckStatus.PASS
    return CheckReport(
        check_id="sandwich",
        status=status,
        tolerance=tol,
        witnesses=tuple(witnesses),
        details={
            "family": profile.family_tag,
            "lower_bound": float(lo_bound),
            "eps_lower": float(eps_lo),
            "eps_upper": float(eps_up),
            "upper_bound": float(hi_bound),
            "heuristic_legs": tuple(heuristic),
        },
    )


# ---------------------------------------------------------------------------
# implied density interval from the four gap-envelope statistics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RuleApplication:
    rule: str
    statistic: str
    statistic_value: float
    bound: float
    heuristic: bool = False


@dataclass(frozen=True)
class IntervalResult:
    lo: float
    hi: float
    rules: tuple


def implied_density_interval(profile: DensityProfile, tol: float = 0.05) -> IntervalResult:
    """Best density bounds derivable from the gap envelopes.

    Lower bounds use the limsups of n*g_n/a_n and n*g_n/a_{n+1} (reciprocal
    envelope constants >= 1); upper bounds use the liminfs, plus the
    almost-thin rule (upper limit ratio < 1) and the positive-gap-ratio
    rule, both of which force density zero.  Hypotheses are accepted at the
    level of tail statistics; each applied rule is named in the trace.
    """
    bits = profile.precision_bits
    rules: list[RuleApplication] = []

    def stat(trace):
        return float(trace.tail_estimate)

    lo = 0.0
    hi = 1.0

    # lower-bound rules: g_n/a_n <= (beta/n)(1+o(1)) gives eps_lower >= 1/beta
    for rule, trace, name in (
        ("envelope-upper-gap-over-curr", profile.beta_stat_limsup, "limsup n*g/a_n"),
        ("envelope-upper-gap-over-next", profile.alpha_stat_limsup, "limsup n*g/a_{n+1}"),
    ):
        if trace.diagnostic is Diagnostic.DIVERGING:
            continue  # beta = inf gives the vacuous bound 0
        value = stat(trace)
        if value >= 1:
            bound = min(1.0, 1.0 / value)
            rules.append(RuleApplication(rule, name, value, bound))
            lo = max(lo, bound)

    # upper-bound rules: g_n/a_n >= (alpha/n)(1+o(1)) gives eps_upper <= 1/alpha
    for rule, trace, name in (
        ("envelope-lower-gap-over-next", profile.alpha_stat_liminf, "liminf n*g/a_{n+1}"),
        ("envelope-lower-gap-over-curr", profile.beta_stat_liminf, "liminf n*g/a_n"),
    ):
        if trace.diagnostic is Diagnostic.DIVERGING:
            rules.append(RuleApplication(rule, name, math.inf, 0.0, heuristic=True))
            hi = min(hi, 0.0)
            continue
        value = stat(trace)
        if value >= 1:
            bound = min(1.0, 1.0 / value)
            rules.append(RuleApplication(rule, name, value, bound))
            hi = min(hi, bound)

    # almost-thin rule: upper limit ratio < 1 forces density zero
    rho_up = stat(profile.rho_upper)
    if rho_up < 1 - tol:
        rules.append(RuleApplication("almost-thin", "limsup a_n/a_{n+1}", rho_up, 0.0))
        hi = min(hi, 0.0)

    # positive relative gaps force density zero: liminf g_n/a_n > 0
    with ctx(bits):
        gap_over_curr_liminf = float(1 / gmpy2.mpfr(rho_up) - 1) if rho_up > 0 else math.inf
    if gap_over_curr_liminf > tol:
        rules.append(
            RuleApplication("positive-gap-ratio", "liminf g_n/a_n", gap_over_curr_liminf, 0.0)
        )
        hi = min(hi, 0.0)

    return IntervalResult(lo=lo, hi=hi, rules=tuple(rules))


def check_interval(profile: DensityProfile, tol: float = 0.05) -> CheckReport:
    """Wrap implied_density_interval as a pass/fail consistency check."""
    res = implied_density_interval(profile, tol)
    ok = res.lo <= res.hi + tol
    informative = res.lo > 0 or res.hi < 1
    trace_ok = bool(res.rules) if informative else True
    status = CheckStatus.PASS if (ok and trace_ok) else CheckStatus.FAIL
    witnesses = () if status is CheckStatus.PASS else ((0, (res.lo, res.hi)),)
    return CheckReport(
        check_id="interval",
        status=status,
        tolerance=tol,
        witnesses=witnesses,
        details={
            "family": profile.family_tag,
            "lo": res.lo,
            "hi": res.hi,
            "rules": tuple(
                {
                    "rule": r.rule,
                    "statistic": r.statistic,
                    "value": r.statistic_value,
                    "bound": r.bound,
                    "heuristic": r.heuristic,
                }
                for r in res.rules
            ),
        },
    )


# ---------------------------------------------------------------------------
# difference-quotient sandwich on arbitrary positive sequences
# ---------------------------------------------------------------------------

def check_stolz(
    x_terms,
    y_terms,
    tol: float = 0.05,
    window: WindowPolicy | None = None,
    bits: int = 128,
) -> CheckReport:
    """Tail-estimate ordering of difference quotients around x_n/y_n.

    Requires positive x, strictly increasing positive y.  Verifies
    liminf dx/dy <= liminf x/y <= limsup x/y <= limsup dx/dy within tol on
    the finite surrogates.
    """
    x = [mpfr_from(v, bits) for v in x_terms]
    y = [mpfr_from(v, bits) for v in y_terms]
    if len(x) != len(y):
        raise LengthMismatch(f"x has {len(x)} terms, y has {len(y)}")
    if len(x) < 3:
        raise TooShort("need at least 3 terms")
    if any(v <= 0 for v in x):
        raise InvalidParam("x terms must be positive")
    for i in range(1, len(y)):
        if not y[i] > y[i - 1]:
            raise NotIncreasing(f"y not strictly increasing at index {i}")
    if y[0] <= 0:
        raise InvalidParam("y terms must be positive")
    window = window or WindowPolicy()
    with ctx(bits):
        ratios = tuple(a / b for a, b in zip(x, y))
        quotients = tuple(
            (x[i + 1] - x[i]) / (y[i + 1] - y[i]) for i in range(len(x) - 1)
        )
    idx = tuple(range(1, len(ratios) + 1))
    r_stream = FunctionalStream(None, idx, ratios)
    q_stream = FunctionalStream(None, idx[:-1], quotients)
    r_lo = tail_liminf(r_stream, window).tail_estimate
    r_up = tail_limsup(r_stream, window).tail_estimate
    q_lo = tail_liminf(q_stream, window).tail_estimate
    q_up = tail_limsup(q_stream, window).tail_estimate
    # the tail-window increment average is a dy-weighted mean of the tail
    # quotients, so q_lo <= avg <= q_up holds exactly, not just in the limit
    count = math.ceil(window.tail_fraction * len(quotients))
    i0 = len(quotients) - count
    with ctx(bits):
        window_avg = (x[-1] - x[i0]) / (y[-1] - y[i0])
        exact_slack = gmpy2.mpfr(2) ** -(bits // 2)
    witnesses = []
    if not (q_lo - exact_slack <= window_avg <= q_up + exact_slack):
        witnesses.append((0, (float(q_lo), float(window_avg), float(q_up))))
    if not q_lo <= r_lo + tol:
        witnesses.append((1, (float(q_lo), float(r_lo))))
    if not r_lo <= r_up + tol:
        witnesses.append((2, (float(r_lo), float(r_up))))
    if not r_up <= q_up + tol:
        witnesses.append((3, (float(r_up), float(q_up))))
    status = CheckStatus.FAIL if witnesses else CheckStatus.PASS
    return CheckReport(
        check_id="stolz",
        status=status,
        tolerance=tol,
        witnesses=tuple(witnesses),
        details={
            "quotient_liminf": float(q_lo),
            "ratio_liminf": float(r_lo),
            "ratio_limsup": float(r_up),
            "quotient_limsup": float(q_up),
            "window_increment_avg": float(window_avg),
        },
    )


# ---------------------------------------------------------------------------
# analytic inequality grids
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GridSpec:
    log_bound_points: int = 10**4
    growth_points: int = 10**3
    growth_x_max: float = 10**4
    precision_bits: int = 128
    derivative_rel_tol: float = 1e-6

    def __post_init__(self):
        if self.log_bound_points < 2 or self.growth_points < 2:
            raise InvalidGrid("grids need at least 2 points")
        if self.growth_x_max <= 1:
            raise InvalidGrid("growth grid upper end must exceed 1")


def check_analytic_inequalities(grid: GridSpec | None = None) -> CheckReport:
    """Pointwise checks of the three analytic facts the estimates lean on.

    On [0, 1/2]:   -ln(1-x) <= x + x^2.
    On [1, x_max]: with f(x) = (1 + x^-1/2)^x,
                   f'(x) >= f(x) / (2 (sqrt x + 1))   (closed form, plus a
                   central-difference cross-check of the derivative), and
                   f(x) >= 2^sqrt(x).
    """
    grid = grid or GridSpec()
    bits = grid.precision_bits
    witnesses = []
    slack = gmpy2.mpfr(2) ** -(bits - 28)
    max_fd_gap = 0.0
    with ctx(bits):
        for xf in np.linspace(0.0, 0.5, grid.log_bound_points):
            x = gmpy2.mpfr(float(xf))
            lhs = -gmpy2.log1p(-x)
            rhs = x + x * x
            if not lhs <= rhs + slack:
                witnesses.append(("log-bound", float(xf), float(lhs), float(rhs)))

        h_scale = gmpy2.mpfr(2) ** -40
        for xf in np.geomspace(1.0, grid.growth_x_max, grid.growth_points):
            x = gmpy2.mpfr(float(xf))
            sq = gmpy2.sqrt(x)
            f = gmpy2.exp(x * gmpy2.log1p(1 / sq))
            bracket = gmpy2.log1p(1 / sq) - 1 / (2 * (sq + 1))
            deriv = f * bracket
            floor_rate = f / (2 * (sq + 1))
            if not deriv >= floor_rate - slack * f:
                witnesses.append(("derivative-floor", float(xf), float(deriv), float(floor_rate)))
            # independent derivative route: central finite difference
            h = x * h_scale
            fp = gmpy2.exp((x + h) * gmpy2.log1p(1 / gmpy2.sqrt(x + h)))
            fm = gmpy2.exp((x - h) * gmpy2.log1p(1 / gmpy2.sqrt(x - h)))
            fd = (fp - fm) / (2 * h)
            rel = abs(fd - deriv) / deriv
            max_fd_gap = max(max_fd_gap, float(rel))
            if rel > grid.derivative_rel_tol:
                witnesses.append(("derivative-xcheck", float(xf), float(fd), float(deriv)))
            low = gmpy2.exp2(sq)
            if not f >= low - slack * low:
                witnesses.append(("doubling-floor", float(xf), float(f), float(low)))
    status = CheckStatus.FAIL if witnesses else CheckStatus.PASS
    return CheckReport(
        check_id="analytic",
        status=status,
        tolerance=grid.derivative_rel_tol,
        witnesses=tuple(witnesses[:16]),
        details={
            "log_bound_points": grid.log_bound_points,
            "growth_points": grid.growth_points,
            "growth_x_max": grid.growth_x_max,
            "precision_bits": bits,
            "max_derivative_gap": max_fd_gap,
        },
    )


# ---------------------------------------------------------------------------
# almost-thin implies zero exponent, with vacuity tracking
# ---------------------------------------------------------------------------

def tau_zero_threshold(n: int) -> float:
    """N-dependent ceiling for 'looks like zero density' at prefix length n.

    0.1 up to 10^4 samples, 0.05 from 10^6, log-interpolated between: the
    direct estimate decays only logarithmically for geometric-like families,
    so the threshold cannot be a single constant.
    """
    if n <= 10**4:
        return 0.1
    if n >= 10**6:
        return 0.05
    frac = (math.log10(n) - 4) / 2
    return 0.1 + (0.05 - 0.1) * frac


def check_rho_implies_tau_zero(
    prefix: SequencePrefix,
    tol: float = 0.05,
    profile: DensityProfile | None = None,
) -> CheckReport:
    """If the upper limit ratio is below 1, the density estimate must be ~0.

    Vacuous when the estimated upper limit ratio reaches 1 - tol: the
    theorem's hypothesis is unmet (its converse is false, so Vacuous is the
    only honest answer there).
    """
    if len(prefix) < 16:
        raise TooShort("needs a prefix of length >= 16")
    profile = profile or density_profile(prefix)
    rho_up = float(profile.rho_upper.tail_estimate)
    threshold = tau_zero_threshold(profile.n_terms)
    eps_est = float(profile.eps_upper_refined)
    details = {
        "family": profile.family_tag,
        "rho_upper": rho_up,
        "eps_upper_refined": eps_est,
        "eps_upper_raw": float(profile.eps_upper.tail_estimate),
        "eps_last_sample": float(profile.eps_upper.last_value),
        "threshold": threshold,
    }
    if rho_up >= 1 - tol:
        return CheckReport("rho-tau", CheckStatus.VACUOUS, tol, details=details)
    if eps_est <= threshold:
        return CheckReport("rho-tau", CheckStatus.PASS, tol, details=details)
    return CheckReport(
        "rho-tau",
        CheckStatus.FAIL,
        tol,
        witnesses=((0, (rho_up, eps_est, threshold)),),
        details=details,
    )


# ---------------------------------------------------------------------------
# batch manifest
# ---------------------------------------------------------------------------

_CHECK_NAMES = ("sandwich", "interval", "rho-tau", "stolz", "analytic")


def run_check(check: str, prefix: SequencePrefix | None, tol: float,
              profile: DensityProfile | None = None) -> CheckReport:
    """Run one named check against a prefix (analytic checks ignore it)."""
    if check == "analytic":
        return check_analytic_inequalities()
    if prefix is None:
        raise InvalidParam(f"check {check!r} needs a family or sequence file")
    if check == "stolz":
        # the canonical instance: x = log n, y = log a_n (both must be > 0)
        bits = prefix.precision_bits
        lns = list(prefix.ln_terms)
        start = 1 if prefix.index_offset == 0 else 0
        while start < len(lns) and not lns[start] > 0:
            start += 1
        with ctx(bits):
            x = [
                gmpy2.log(gmpy2.mpz(pos + 1 + prefix.index_offset))
                for pos in range(start, len(lns))
            ]
        return check_stolz(x, lns[start:], tol=tol, bits=bits)
    profile = profile or density_profile(prefix)
    if check == "sandwich":
        return check_sandwich(profile, tol)
    if check == "interval":
        return check_interval(profile, tol)
    if check == "rho-tau":
        return check_rho_implies_tau_zero(prefix, tol, profile=profile)
    raise InvalidParam(f"unknown check {check!r}; expected one of {_CHECK_NAMES}")


def parse_manifest(text: str):
    """Parse manifest lines: '<check> <family> key=value... [tol=0.05]'.

    '#' comments and blank lines are skipped.  The family token may be '-'
    for checks that take no input (analytic).
    """
    from .families import family_spec_from_tokens

    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) < 2:
            raise InvalidParam(f"manifest line {lineno}: expected '<check> <family> ...'")
        check, family = parts[0], parts[1]
        if check not in _CHECK_NAMES:
            raise InvalidParam(f"manifest line {lineno}: unknown check {check!r}")
        tokens = {}
        tol = 0.05
        for tok in parts[2:]:
            if "=" not in tok:
                raise InvalidParam(f"manifest line {lineno}: malformed token {tok!r}")
            key, value = tok.split("=", 1)
            if key == "tol":
                tol = float(value)
            else:
                tokens[key] = value
        spec = None
        if family != "-":
            tokens["family"] = family
            spec = family_spec_from_tokens(tokens)
        rows.append((check, spec, tol))
    return rows


def run_manifest(rows) -> list[CheckReport]:
    """Execute manifest rows in order; family outputs are cached per spec."""
    cache: dict = {}
    reports = []
    for check, spec, tol in rows:
        prefix = None
        if spec is not None:
            if spec not in cache:
                out = generate(spec)
                if isinstance(out, FiniteSetReport):
                    raise InvalidParam(
                        f"family {spec.label()} produced a finite set report; "
                        f"checks need a sequence prefix"
                    )
                cache[spec] = out
            prefix = cache[spec]
        reports.append(run_check(check, prefix, tol))
    return reports
