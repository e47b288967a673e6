"""Catalog of sequence-family generators.

Each generator produces a validated SequencePrefix (or, for convergent
products, a FiniteSetReport).  Exact families are computed with exact
integer arithmetic: floors of fractional powers go through integer k-th
roots or a directed-rounding interval certificate, never through floating
exponentiation.  Families whose terms outgrow the exact bit budget switch
to the log-domain representation.

Generators dedup silently and record the collision count in prefix
metadata.  Distinct generator instances are independent and may run in
parallel; a single iterator is consumed sequentially.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from types import MappingProxyType
from typing import Iterator

import gmpy2

from .errors import FloorUncertifiable, InvalidParam, PrecisionUnderflow
from .numeric import (
    DEFAULT_PRECISION_BITS,
    MAX_PRECISION_BITS,
    certified_floor,
    ctx,
    exact_fraction,
    half_away_round,
    iroot,
    mpfr_from,
    validate_precision,
)
from .sequences import SequencePrefix, build_log_prefix, build_prefix, read_terms

# Terms are kept exact while ln(a_n) stays below this many bits; beyond it a
# family switches wholesale to the log-domain representation (prefixes never
# mix the two).
DEFAULT_EXACT_BIT_BUDGET = 128

# A convergent-product family is declared finite after this many consecutive
# indices produce no new floor value.
DEFAULT_STALL_WINDOW = 10**4

_LN2 = math.log(2.0)


class FamilyKind(str, Enum):
    POWER = "power"
    GEOMETRIC = "geometric"
    ARITHMETIC = "arithmetic"
    POLYNOMIAL = "polynomial"
    DOUBLE_EXP_UNION = "double-exp-union"
    SQRT_EXP = "sqrt-exp"
    NONSQUARE_SQUARES = "nonsquare-squares"
    PRODUCT = "product"
    FROM_FILE = "from-file"
    INTERLEAVE = "interleave"


@dataclass(frozen=True)
class FamilySpec:
    """Declarative description of a family: kind + parameters + length."""

    kind: FamilyKind
    n: int
    params: object = field(default_factory=dict)
    precision_bits: int = DEFAULT_PRECISION_BITS

    def __post_init__(self):
        if not isinstance(self.params, MappingProxyType):
            object.__setattr__(self, "params", MappingProxyType(dict(self.params)))

    def __hash__(self):
        items = tuple(sorted(self.params.items(), key=lambda kv: kv[0]))
        return hash((self.kind, self.n, self.precision_bits, items))

    def label(self) -> str:
        inner = ",".join(f"{k}={v}" for k, v in self.params.items())
        return f"{self.kind.value}({inner})" if inner else self.kind.value


@dataclass(frozen=True)
class FiniteSetReport:
    """Distinct floor values of a convergent-product family.

    Returned instead of a prefix when the deduped value set stops growing
    for ``stall_window`` consecutive indices.
    """

    family_tag: str
    values: tuple
    n_evaluated: int
    stall_window: int
    last_new_at: int


def _positive_int(value, name: str) -> int:
    try:
        n = int(value)
    except (TypeError, ValueError) as exc:
        raise InvalidParam(f"{name} must be an integer, got {value!r}") from exc
    if n < 1:
        raise InvalidParam(f"{name} must be >= 1, got {n}")
    return n


def _dedup_increasing(terms) -> tuple[list[int], int, int]:
    """Keep strictly increasing distinct terms >= 1; count drops."""
    out: list[int] = []
    collapsed = 0
    dropped = 0
    for t in terms:
        if t < 1:
            dropped += 1
            continue
        if out and t == out[-1]:
            collapsed += 1
            continue
        out.append(t)
    return out, collapsed, dropped


# ---------------------------------------------------------------------------
# power: floor(n^(1/a)) for a in (0, 1]
# ---------------------------------------------------------------------------

def iter_power_terms(a) -> Iterator[int]:
    a = exact_fraction(a, "a", max_denominator=10**4)
    if not (0 < a <= 1):
        raise InvalidParam("a must lie in (0,1]")
    inv = 1 / a
    q, p = inv.numerator, inv.denominator
    if q > 512:
        raise InvalidParam(
            f"a={a} gives exponent {inv}; numerators above 512 are not supported exactly"
        )
    last = 0
    for n in itertools.count(1):
        v = iroot(n**q, p)
        if v > last:
            last = v
            yield v


def gen_power(a, n, precision_bits: int = DEFAULT_PRECISION_BITS) -> SequencePrefix:
    """First n distinct values of floor(m^(1/a)), by exact root arithmetic."""
    n = _positive_int(n, "n")
    terms = list(itertools.islice(iter_power_terms(a), n))
    return build_prefix(
        terms,
        family_tag=f"power(a={exact_fraction(a, 'a')})",
        precision_bits=precision_bits,
        meta={"a": str(exact_fraction(a, "a"))},
    )


# ---------------------------------------------------------------------------
# geometric-like: round(alpha * b^n)
# ---------------------------------------------------------------------------

def gen_geometric(
    alpha,
    b,
    n,
    precision_bits: int = DEFAULT_PRECISION_BITS,
    exact_bit_budget: int = DEFAULT_EXACT_BIT_BUDGET,
) -> SequencePrefix:
    """round(alpha * b^m) for m = 1..n, deduped.

    Switches the whole prefix to log-domain once ln(alpha * b^n) exceeds the
    exact bit budget.
    """
    n = _positive_int(n, "n")
    alpha_f = exact_fraction(alpha, "alpha")
    b_f = exact_fraction(b, "b")
    if alpha_f <= 0:
        raise InvalidParam("alpha must be > 0")
    if b_f <= 1:
        raise InvalidParam("b must be > 1")
    tag = f"geometric(alpha={alpha_f},b={b_f})"
    ln_last = (
        math.log(alpha_f.numerator) - math.log(alpha_f.denominator)
        + n * (math.log(b_f.numerator) - math.log(b_f.denominator))
    )
    if ln_last <= exact_bit_budget * _LN2:
        raw = []
        val = alpha_f
        for _ in range(n):
            val *= b_f
            raw.append(half_away_round(val))
        terms, collapsed, dropped = _dedup_increasing(raw)
        return build_prefix(
            terms,
            family_tag=tag,
            precision_bits=precision_bits,
            meta={
                "alpha": str(alpha_f),
                "b": str(b_f),
                "dedup_collapsed": collapsed,
                "dropped_below_one": dropped,
            },
        )
    with ctx(precision_bits):
        ln_alpha = gmpy2.log(gmpy2.mpq(alpha_f.numerator, alpha_f.denominator))
        ln_b = gmpy2.log(gmpy2.mpq(b_f.numerator, b_f.denominator))
        lns = [ln_alpha + m * ln_b for m in range(1, n + 1)]
    return build_log_prefix(
        lns,
        precision_bits=precision_bits,
        family_tag=tag,
        meta={"alpha": str(alpha_f), "b": str(b_f), "rounding_ignored_in_log_domain": True},
    )


# ---------------------------------------------------------------------------
# arithmetic and polynomial families
# ---------------------------------------------------------------------------

def iter_arithmetic_terms(k, l) -> Iterator[int]:
    k = int(k)
    l = int(l)
    if k < 0:
        raise InvalidParam("k must be >= 0")
    if l < 1:
        raise InvalidParam("l must be >= 1")
    for m in itertools.count(1):
        yield k + l * m


def gen_arithmetic(k, l, n, precision_bits: int = DEFAULT_PRECISION_BITS) -> SequencePrefix:
    """k + l*m for m = 1..n."""
    n = _positive_int(n, "n")
    terms = list(itertools.islice(iter_arithmetic_terms(k, l), n))
    return build_prefix(
        terms,
        family_tag=f"arithmetic(k={int(k)},l={int(l)})",
        precision_bits=precision_bits,
        meta={"k": int(k), "l": int(l)},
    )


def iter_polynomial_coeff_terms(coeffs) -> Iterator[int]:
    coeffs = [int(c) for c in coeffs]
    if len(coeffs) < 2 or all(c == 0 for c in coeffs[1:]):
        raise InvalidParam("coeffs must define a non-constant polynomial")
    if any(c < 0 for c in coeffs):
        raise InvalidParam("coeffs must be non-negative")
    last = 0
    for m in itertools.count(1):
        v = sum(c * m**i for i, c in enumerate(coeffs))
        if v > last:
            last = v
            yield v


def iter_polynomial_real_terms(t, d, precision_bits: int) -> Iterator[int]:
    """floor(t * m^d) for real d >= 1, t > 0, with bit-correct floors.

    Rational d with a small denominator goes through exact integer roots:
    floor(t * m^(p/q)) = iroot(t_num^q * m^p, q) // t_den.  Anything else is
    evaluated as an interval with directed rounding and escalating
    precision until the floor is certified.
    """
    t_f = exact_fraction(t, "t")
    if t_f <= 0:
        raise InvalidParam("t must be > 0")
    d_f: Fraction | None
    try:
        d_f = exact_fraction(d, "d", max_denominator=64)
    except InvalidParam:
        d_f = None
    if d_f is not None:
        if d_f < 1:
            raise InvalidParam("d must be >= 1")
        p, q = d_f.numerator, d_f.denominator
        tn_q = t_f.numerator**q
        last = 0
        for m in itertools.count(1):
            v = iroot(tn_q * m**p, q) // t_f.denominator
            if v > last:
                last = v
                yield v
        return
    d_m = mpfr_from(d, 256)
    if d_m < 1:
        raise InvalidParam("d must be >= 1")
    t_q = gmpy2.mpq(t_f.numerator, t_f.denominator)
    last = 0
    for m in itertools.count(1):
        def ev(m=m):
            # all positive and increasing in every rounding step for m >= 1
            return t_q * gmpy2.exp(d_m * gmpy2.log(gmpy2.mpfr(m)))

        v, _ = certified_floor(ev, precision_bits, what=f"t*{m}^d")
        if v > last:
            last = v
            yield v


def gen_polynomial(
    n,
    coeffs=None,
    t=None,
    d=None,
    precision_bits: int = DEFAULT_PRECISION_BITS,
) -> SequencePrefix:
    """Integer polynomial values, or floor(t * m^d) with certified floors."""
    n = _positive_int(n, "n")
    if coeffs is not None:
        if t is not None or d is not None:
            raise InvalidParam("give either coeffs or (t, d), not both")
        terms = list(itertools.islice(iter_polynomial_coeff_terms(coeffs), n))
        tag = f"polynomial(coeffs={[int(c) for c in coeffs]})"
        meta = {"coeffs": tuple(int(c) for c in coeffs)}
    else:
        if t is None or d is None:
            raise InvalidParam("polynomial family needs coeffs or both t and d")
        terms = list(itertools.islice(iter_polynomial_real_terms(t, d, precision_bits), n))
        tag = f"polynomial(t={t},d={d})"
        meta = {"t": str(t), "d": str(d)}
    return build_prefix(terms, family_tag=tag, precision_bits=precision_bits, meta=meta)


# ---------------------------------------------------------------------------
# union of {2^n} and {2^(2^m) + 1}
# ---------------------------------------------------------------------------

def iter_double_exp_union_terms() -> Iterator[int]:
    pow_n = 1
    exp_m = 1
    nxt_pow = 2 ** pow_n
    nxt_double = 2 ** (2 ** exp_m) + 1
    while True:
        # the two streams never collide: powers of two are even, doubles odd
        if nxt_pow < nxt_double:
            yield nxt_pow
            pow_n += 1
            nxt_pow = 2 ** pow_n
        else:
            yield nxt_double
            exp_m += 1
            nxt_double = 2 ** (2 ** exp_m) + 1


def gen_double_exp_union(n, precision_bits: int = DEFAULT_PRECISION_BITS) -> SequencePrefix:
    """Sorted merge of {2^m} and {2^(2^M)+1}, first n elements."""
    n = _positive_int(n, "n")
    if n < 2:
        raise InvalidParam("n must be >= 2 for the union family")
    terms = list(itertools.islice(iter_double_exp_union_terms(), n))
    return build_prefix(
        terms, family_tag="double-exp-union", precision_bits=precision_bits
    )


# ---------------------------------------------------------------------------
# floor((1 + 1/sqrt(m))^m), log-domain
# ---------------------------------------------------------------------------

def sqrt_exp_ln(m: int, precision_bits: int = DEFAULT_PRECISION_BITS):
    """ln of (1 + 1/sqrt(m))^m at the given precision."""
    with ctx(precision_bits):
        return gmpy2.mpfr(m) * gmpy2.log1p(1 / gmpy2.sqrt(gmpy2.mpfr(m)))


def sqrt_exp_start_index(precision_bits: int = DEFAULT_PRECISION_BITS, scan_limit: int = 512) -> int:
    """Smallest index from which consecutive terms differ by more than 1.

    Determined numerically: the underlying real terms are eventually
    strictly separated, but the first few are not; the returned index is
    recorded in family metadata as an empirical value.
    """
    with ctx(precision_bits):
        last_bad = 0
        prev = gmpy2.exp(sqrt_exp_ln(1, precision_bits))
        for m in range(2, scan_limit + 1):
            cur = gmpy2.exp(sqrt_exp_ln(m, precision_bits))
            if cur - prev <= 1:
                last_bad = m - 1
            prev = cur
    return last_bad + 1


def gen_sqrt_exp(n, precision_bits: int = DEFAULT_PRECISION_BITS) -> SequencePrefix:
    """Log-domain prefix of ln((1 + 1/sqrt(m))^m) = m*log1p(m^-1/2).

    Starts at the empirically certified index from which the integer floors
    are strictly increasing.  Flooring is ignored in the log domain; the
    resulting ln error is below 1/u_start and recorded in metadata.
    """
    n = _positive_int(n, "n")
    start = sqrt_exp_start_index(precision_bits)
    lns = [sqrt_exp_ln(m, precision_bits) for m in range(start, start + n)]
    for i in range(1, len(lns)):
        if not lns[i] > lns[i - 1]:
            raise PrecisionUnderflow(i, "sqrt-exp log terms not separated; raise precision_bits")
    with ctx(precision_bits):
        err_bound = float(gmpy2.exp(-lns[0]))
    return build_log_prefix(
        lns,
        precision_bits=precision_bits,
        family_tag="sqrt-exp",
        meta={
            "start_index": start,
            "index_offset": start - 1,
            "ln_floor_error_bound": err_bound,
        },
    )


# ---------------------------------------------------------------------------
# m^2 over non-square m
# ---------------------------------------------------------------------------

def iter_nonsquare_square_terms() -> Iterator[int]:
    for m in itertools.count(1):
        r = math.isqrt(m)
        if r * r == m:
            continue
        yield m * m


def gen_nonsquare_squares(n, precision_bits: int = DEFAULT_PRECISION_BITS) -> SequencePrefix:
    n = _positive_int(n, "n")
    terms = list(itertools.islice(iter_nonsquare_square_terms(), n))
    return build_prefix(terms, family_tag="nonsquare-squares", precision_bits=precision_bits)


# ---------------------------------------------------------------------------
# floor(c * prod_{i<=m} (1 + 1/i^alpha))
# ---------------------------------------------------------------------------

def gen_product(
    c,
    alpha,
    n,
    stall_window: int = DEFAULT_STALL_WINDOW,
    precision_bits: int = DEFAULT_PRECISION_BITS,
    exact_bit_budget: int = DEFAULT_EXACT_BIT_BUDGET,
):
    """Floors of c * prod (1 + i^-alpha); FiniteSetReport when the set stalls.

    For alpha > 1 the infinite product converges, so the floor set is
    finite: once no new value appears for ``stall_window`` consecutive
    indices a FiniteSetReport is returned.  For alpha < 1 the terms grow
    super-polynomially and the family switches to log-domain.
    """
    n = _positive_int(n, "n")
    stall_window = _positive_int(stall_window, "stall_window")
    c_f = exact_fraction(c, "c")
    if c_f <= 0:
        raise InvalidParam("c must be > 0")
    alpha_f = exact_fraction(alpha, "alpha")
    if alpha_f <= 0:
        raise InvalidParam("alpha must be > 0")
    tag = f"product(c={c_f},alpha={alpha_f})"

    # quick growth probe in doubles to pick the representation
    ln_u = math.log(c_f.numerator) - math.log(c_f.denominator)
    af = float(alpha_f)
    grows_past_budget = False
    for i in range(1, n + 1):
        ln_u += math.log1p(i**-af)
        if ln_u > exact_bit_budget * _LN2:
            grows_past_budget = True
            break
    if grows_past_budget:
        return _gen_product_log(c_f, alpha_f, n, tag, precision_bits)
    if alpha_f.denominator == 1:
        return _gen_product_exact_rational(c_f, int(alpha_f), n, tag, stall_window, precision_bits)
    return _gen_product_interval(c_f, alpha_f, n, tag, stall_window, precision_bits)


def _gen_product_log(c_f: Fraction, alpha_f: Fraction, n: int, tag: str, bits: int) -> SequencePrefix:
    with ctx(bits):
        alpha_q = gmpy2.mpq(alpha_f.numerator, alpha_f.denominator)
        ln_u = gmpy2.log(gmpy2.mpq(c_f.numerator, c_f.denominator))
        lns = []
        for i in range(1, n + 1):
            ln_u = ln_u + gmpy2.log1p(gmpy2.exp(-(alpha_q * gmpy2.log(gmpy2.mpfr(i)))))
            lns.append(ln_u)
    first_positive = next((j for j, v in enumerate(lns) if v > 0), None)
    if first_positive is None:
        raise InvalidParam("product terms never exceed 1; increase n or c")
    lns = lns[first_positive:]
    with ctx(bits):
        err_bound = float(gmpy2.exp(-lns[0]))
    return build_log_prefix(
        lns,
        precision_bits=bits,
        family_tag=tag,
        meta={
            "index_offset": first_positive,
            "rounding_ignored_in_log_domain": True,
            "ln_floor_error_bound": err_bound,
        },
    )


def _product_collect(n, stall_window, floor_at):
    """Shared stall/dedup scan over floor values."""
    values: list[int] = []
    seen: set[int] = set()
    last_new_at = 0
    m = 0
    while m < n:
        m += 1
        v = floor_at(m)
        if v >= 1 and v not in seen:
            seen.add(v)
            values.append(v)
            last_new_at = m
        elif m - last_new_at >= stall_window:
            return values, m, last_new_at, True
    return values, m, last_new_at, False


def _gen_product_exact_rational(c_f, alpha_int, n, tag, stall_window, bits):
    # integer alpha: every partial product is an exact rational
    prod = Fraction(1)

    def floor_at(m):
        nonlocal prod
        prod *= Fraction(m**alpha_int + 1, m**alpha_int)
        val = c_f * prod
        return val.numerator // val.denominator

    values, m, last_new_at, stalled = _product_collect(n, stall_window, floor_at)
    return _product_result(values, m, last_new_at, stalled, tag, stall_window, bits)


def _gen_product_interval(c_f, alpha_f, n, tag, stall_window, bits):
    alpha_q = gmpy2.mpq(alpha_f.numerator, alpha_f.denominator)
    c_q = gmpy2.mpq(c_f.numerator, c_f.denominator)
    state = {"bits": bits, "lo": gmpy2.mpfr(1), "hi": gmpy2.mpfr(1), "m": 0}

    def factor_bounds(i, b):
        # 1 + i^-alpha: the exponent is negated, so bound directions swap
        with ctx(b, gmpy2.RoundUp):
            t_hi = alpha_q * gmpy2.log(gmpy2.mpfr(i))
        with ctx(b, gmpy2.RoundDown):
            t_lo = alpha_q * gmpy2.log(gmpy2.mpfr(i))
            f_lo = 1 + gmpy2.exp(-t_hi)
        with ctx(b, gmpy2.RoundUp):
            f_hi = 1 + gmpy2.exp(-t_lo)
        return f_lo, f_hi

    def advance_to(m):
        b = state["bits"]
        f_lo, f_hi = factor_bounds(m, b)
        with ctx(b, gmpy2.RoundDown):
            state["lo"] = state["lo"] * f_lo
        with ctx(b, gmpy2.RoundUp):
            state["hi"] = state["hi"] * f_hi
        state["m"] = m

    def rebuild(m, b):
        state["bits"] = b
        state["lo"] = gmpy2.mpfr(1)
        state["hi"] = gmpy2.mpfr(1)
        state["m"] = 0
        for i in range(1, m + 1):
            advance_to(i)

    def floor_at(m):
        advance_to(m)
        while True:
            b = state["bits"]
            with ctx(b, gmpy2.RoundDown):
                u_lo = state["lo"] * c_q
            with ctx(b, gmpy2.RoundUp):
                u_hi = state["hi"] * c_q
            fl, fh = int(gmpy2.floor(u_lo)), int(gmpy2.floor(u_hi))
            if fl == fh:
                return fl
            if b >= MAX_PRECISION_BITS:
                raise FloorUncertifiable(
                    f"floor of {tag} at index {m} straddles an integer at {b}-bit precision"
                )
            rebuild(m, min(2 * b, MAX_PRECISION_BITS))

    values, m, last_new_at, stalled = _product_collect(n, stall_window, floor_at)
    return _product_result(values, m, last_new_at, stalled, tag, stall_window, bits)


def _product_result(values, m, last_new_at, stalled, tag, stall_window, bits):
    if stalled:
        return FiniteSetReport(
            family_tag=tag,
            values=tuple(values),
            n_evaluated=m,
            stall_window=stall_window,
            last_new_at=last_new_at,
        )
    return build_prefix(
        values,
        family_tag=tag,
        precision_bits=bits,
        meta={"stalled": False, "n_evaluated": m},
    )


# ---------------------------------------------------------------------------
# experimental block interleaving
# ---------------------------------------------------------------------------

def _exact_iterator(spec: FamilySpec) -> Iterator[int]:
    p = spec.params
    if spec.kind is FamilyKind.POWER:
        return iter_power_terms(p["a"])
    if spec.kind is FamilyKind.ARITHMETIC:
        return iter_arithmetic_terms(p.get("k", 0), p.get("l", 1))
    if spec.kind is FamilyKind.POLYNOMIAL:
        if "coeffs" in p:
            return iter_polynomial_coeff_terms(p["coeffs"])
        return iter_polynomial_real_terms(p["t"], p["d"], spec.precision_bits)
    if spec.kind is FamilyKind.DOUBLE_EXP_UNION:
        return iter_double_exp_union_terms()
    if spec.kind is FamilyKind.NONSQUARE_SQUARES:
        return iter_nonsquare_square_terms()
    if spec.kind is FamilyKind.GEOMETRIC:
        return _iter_geometric_exact(p["alpha"], p["b"])
    raise InvalidParam(f"interleave supports exact families only, not {spec.kind.value}")


def _iter_geometric_exact(alpha, b) -> Iterator[int]:
    alpha_f = exact_fraction(alpha, "alpha")
    b_f = exact_fraction(b, "b")
    if alpha_f <= 0 or b_f <= 1:
        raise InvalidParam("geometric needs alpha > 0 and b > 1")
    val = alpha_f
    last = 0
    while True:
        val *= b_f
        t = half_away_round(val)
        if t > last:
            last = t
            yield t


def gen_interleave(
    spec_a: FamilySpec,
    spec_b: FamilySpec,
    schedule,
    n,
    precision_bits: int = DEFAULT_PRECISION_BITS,
) -> SequencePrefix:
    """Alternating blocks from two exact families, shifted to stay increasing.

    Experimental composer: the output is a valid strictly increasing prefix
    but no density value is asserted for it.
    """
    n = _positive_int(n, "n")
    schedule = [int(s) for s in schedule]
    if not schedule or any(s < 1 for s in schedule):
        raise InvalidParam("schedule must be a non-empty list of positive block lengths")
    iters = [_exact_iterator(spec_a), _exact_iterator(spec_b)]
    out: list[int] = []
    side = 0
    sched = itertools.cycle(schedule)
    while len(out) < n:
        blk = next(sched)
        block = list(itertools.islice(iters[side], blk))
        if not block:
            raise InvalidParam("a sub-family iterator was exhausted")
        shift = 0
        if out and block[0] <= out[-1]:
            shift = out[-1] + 1 - block[0]
        out.extend(t + shift for t in block)
        side ^= 1
    return build_prefix(
        out[:n],
        family_tag=f"interleave[{spec_a.label()}|{spec_b.label()}]",
        precision_bits=precision_bits,
        meta={"schedule": tuple(schedule), "experimental": True},
    )


# ---------------------------------------------------------------------------
# dispatch + declarative config
# ---------------------------------------------------------------------------

def generate(spec: FamilySpec):
    """Produce the prefix (or FiniteSetReport) described by a FamilySpec."""
    validate_precision(spec.precision_bits)
    p = dict(spec.params)
    bits = spec.precision_bits
    kind = spec.kind
    if kind is FamilyKind.POWER:
        return gen_power(p["a"], spec.n, precision_bits=bits)
    if kind is FamilyKind.GEOMETRIC:
        return gen_geometric(p["alpha"], p["b"], spec.n, precision_bits=bits)
    if kind is FamilyKind.ARITHMETIC:
        return gen_arithmetic(p.get("k", 0), p.get("l", 1), spec.n, precision_bits=bits)
    if kind is FamilyKind.POLYNOMIAL:
        return gen_polynomial(
            spec.n,
            coeffs=p.get("coeffs"),
            t=p.get("t"),
            d=p.get("d"),
            precision_bits=bits,
        )
    if kind is FamilyKind.DOUBLE_EXP_UNION:
        return gen_double_exp_union(spec.n, precision_bits=bits)
    if kind is FamilyKind.SQRT_EXP:
        return gen_sqrt_exp(spec.n, precision_bits=bits)
    if kind is FamilyKind.NONSQUARE_SQUARES:
        return gen_nonsquare_squares(spec.n, precision_bits=bits)
    if kind is FamilyKind.PRODUCT:
        return gen_product(
            p.get("c", 1),
            p["alpha"],
            spec.n,
            stall_window=int(p.get("stall_window", DEFAULT_STALL_WINDOW)),
            precision_bits=bits,
        )
    if kind is FamilyKind.FROM_FILE:
        with open(p["path"], "r", encoding="utf-8") as fp:
            return read_terms(fp, family_tag=f"file:{p['path']}", precision_bits=bits)
    if kind is FamilyKind.INTERLEAVE:
        return gen_interleave(p["spec_a"], p["spec_b"], p["schedule"], spec.n, precision_bits=bits)
    raise InvalidParam(f"unknown family kind {kind!r}")


_FAMILY_PARAM_NAMES = {
    FamilyKind.POWER: {"a"},
    FamilyKind.GEOMETRIC: {"alpha", "b"},
    FamilyKind.ARITHMETIC: {"k", "l"},
    FamilyKind.POLYNOMIAL: {"coeffs", "t", "d"},
    FamilyKind.DOUBLE_EXP_UNION: set(),
    FamilyKind.SQRT_EXP: set(),
    FamilyKind.NONSQUARE_SQUARES: set(),
    FamilyKind.PRODUCT: {"c", "alpha", "stall_window"},
    FamilyKind.FROM_FILE: {"path"},
}


def family_spec_from_tokens(tokens: dict, n: int | None = None,
                            precision_bits: int = DEFAULT_PRECISION_BITS) -> FamilySpec:
    """Build a FamilySpec from key=value tokens (config files, manifests).

    Recognized keys: ``family`` plus the family's own parameter names, ``n``
    and ``precision_bits``.  ``coeffs`` is a comma-separated integer list.
    """
    tokens = dict(tokens)
    if "family" not in tokens:
        raise InvalidParam("missing 'family' key")
    try:
        kind = FamilyKind(tokens.pop("family"))
    except ValueError as exc:
        raise InvalidParam(f"unknown family {tokens.get('family')!r}") from exc
    if kind is FamilyKind.INTERLEAVE:
        raise InvalidParam("interleave specs are built programmatically, not from tokens")
    n_val = tokens.pop("n", None)
    if n_val is not None:
        n = int(n_val)
    if n is None:
        raise InvalidParam("missing 'n'")
    bits = int(tokens.pop("precision_bits", precision_bits))
    allowed = _FAMILY_PARAM_NAMES[kind]
    params = {}
    for key, value in tokens.items():
        if key not in allowed:
            raise InvalidParam(f"family {kind.value} does not take parameter {key!r}")
        if key == "coeffs":
            params[key] = tuple(int(v) for v in str(value).split(","))
        elif key == "stall_window":
            params[key] = int(value)
        else:
            params[key] = value
    return FamilySpec(kind=kind, n=n, params=params, precision_bits=bits)


def parse_family_config(text: str, precision_bits: int = DEFAULT_PRECISION_BITS) -> FamilySpec:
    """Parse a declarative key=value config block into a FamilySpec."""
    tokens = {}
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidParam(f"malformed config line (expected key=value): {line!r}")
        key, value = line.split("=", 1)
        tokens[key.strip()] = value.strip()
    return family_spec_from_tokens(tokens, precision_bits=precision_bits)


def catalog_families(n: int, union_n: int | None = None,
                     precision_bits: int = DEFAULT_PRECISION_BITS) -> list[FamilySpec]:
    """The ten concrete families used by the verification suites."""

    def mk(kind, **params):
        length = params.pop("n", n)
        return FamilySpec(kind=kind, n=length, params=params, precision_bits=precision_bits)

    return [
        mk(FamilyKind.POWER, a="1/2"),
        mk(FamilyKind.POWER, a="1/3"),
        mk(FamilyKind.ARITHMETIC, k=3, l=5),
        mk(FamilyKind.POLYNOMIAL, coeffs=(1, 2, 3)),
        mk(FamilyKind.POLYNOMIAL, t="1", d="2.5"),
        mk(FamilyKind.NONSQUARE_SQUARES),
        mk(FamilyKind.GEOMETRIC, alpha="1", b="2"),
        mk(FamilyKind.SQRT_EXP),
        mk(FamilyKind.DOUBLE_EXP_UNION, n=union_n or n),
        mk(FamilyKind.PRODUCT, c="1", alpha="1/2"),
    ]
