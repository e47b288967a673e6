"""Low-level arbitrary-precision helpers.

Exact integer work uses plain Python ints (arbitrary precision by nature);
high-precision reals are gmpy2/MPFR values created inside explicit
precision contexts.  Nothing in this module depends on the ambient gmpy2
context: every function that rounds takes an explicit bit count.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable

import gmpy2

from .errors import FloorUncertifiable, InvalidParam

DEFAULT_PRECISION_BITS = 128
MIN_LOG_PRECISION_BITS = 64
MAX_PRECISION_BITS = 1024


def ctx(bits: int, rounding=None):
    """A gmpy2 context manager with the given binary precision."""
    if rounding is None:
        return gmpy2.context(precision=bits)
    return gmpy2.context(precision=bits, round=rounding)


def validate_precision(bits: int) -> int:
    if not isinstance(bits, int) or bits < MIN_LOG_PRECISION_BITS or bits > MAX_PRECISION_BITS:
        raise InvalidParam(
            f"precision_bits must be an integer in [{MIN_LOG_PRECISION_BITS}, {MAX_PRECISION_BITS}], got {bits}"
        )
    return bits


def exact_fraction(value, name: str = "value", max_denominator: int | None = None) -> Fraction:
    """Convert a number-like parameter to an exact Fraction.

    Strings are parsed exactly ("0.5", "1/3"); floats convert to their exact
    binary value.  ``max_denominator`` guards families whose cost explodes
    with the denominator; violating it raises InvalidParam with a hint to
    pass a fraction string instead.
    """
    try:
        if isinstance(value, str):
            frac = Fraction(value.strip())
        elif isinstance(value, Fraction):
            frac = value
        elif isinstance(value, int):
            frac = Fraction(value)
        elif isinstance(value, float):
            frac = Fraction(value)
        else:
            frac = Fraction(value)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise InvalidParam(f"{name} is not a usable number: {value!r}") from exc
    if max_denominator is not None and frac.denominator > max_denominator:
        raise InvalidParam(
            f"{name}={value!r} has denominator {frac.denominator} > {max_denominator}; "
            f"pass an exact fraction string such as '1/3'"
        )
    return frac


def mpfr_from(value, bits: int):
    """Round an int/float/str/Fraction/mpfr into an mpfr at ``bits``."""
    with ctx(bits):
        if isinstance(value, Fraction):
            return gmpy2.mpfr(gmpy2.mpq(value.numerator, value.denominator))
        if isinstance(value, str):
            return gmpy2.mpfr(value)
        return gmpy2.mpfr(value)


def iroot(x: int, k: int) -> int:
    """floor(x ** (1/k)) for integers x >= 0, k >= 1, by integer Newton."""
    if k < 1:
        raise InvalidParam(f"root degree must be >= 1, got {k}")
    if x < 0:
        raise InvalidParam("iroot requires a non-negative argument")
    if k == 1 or x < 2:
        return x
    if k == 2:
        return math.isqrt(x)
    if x.bit_length() <= k:
        return 1
    # start from an over-estimate; the iteration decreases to the floor root
    r = 1 << -((-x.bit_length()) // k)
    while True:
        nr = ((k - 1) * r + x // r ** (k - 1)) // k
        if nr >= r:
            return r
        r = nr


def half_away_round(frac: Fraction) -> int:
    """round(frac) with exact halves going away from zero (4.5 -> 5)."""
    num, den = frac.numerator, frac.denominator
    if num >= 0:
        return (2 * num + den) // (2 * den)
    return -((-2 * num + den) // (2 * den))


def log_addexp(a, b, bits: int):
    """log(exp(a) + exp(b)) without materializing either exponential."""
    with ctx(bits):
        if a >= b:
            return a + gmpy2.log1p(gmpy2.exp(b - a))
        return b + gmpy2.log1p(gmpy2.exp(a - b))


def ln_int(n: int, bits: int):
    """Natural log of a positive integer at the given precision."""
    with ctx(bits):
        return gmpy2.log(gmpy2.mpz(n))


def euler_gamma(bits: int):
    with ctx(bits):
        return gmpy2.const_euler()


def certified_floor(
    evaluate: Callable[[], object],
    bits: int,
    max_bits: int = MAX_PRECISION_BITS,
    what: str = "value",
) -> tuple[int, int]:
    """Certified floor of a positive real defined by ``evaluate``.

    ``evaluate`` must compute the value using only operations monotone in
    their rounding (additions/multiplications of positives, exp, log of
    arguments > 1, ...), so that running it under RoundDown / RoundUp
    contexts yields true lower / upper bounds.  Precision doubles until both
    bounds share a floor; if the interval still straddles an integer at
    ``max_bits`` the floor is reported as uncertifiable.

    Returns (floor, bits_used).
    """
    while True:
        with ctx(bits, gmpy2.RoundDown):
            lo = evaluate()
        with ctx(bits, gmpy2.RoundUp):
            hi = evaluate()
        f_lo = int(gmpy2.floor(lo))
        f_hi = int(gmpy2.floor(hi))
        if f_lo == f_hi:
            return f_lo, bits
        if bits >= max_bits:
            raise FloorUncertifiable(
                f"floor of {what} straddles an integer at {max_bits}-bit precision "
                f"(bounds {lo} .. {hi})"
            )
        bits = min(2 * bits, max_bits)


def decimal_str(value, digits: int | None = None) -> str:
    """Full-precision decimal string for report serialization."""
    if isinstance(value, bool):
        return str(value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, type(gmpy2.mpfr(0))):
        if digits is None:
            digits = max(2, value.precision * 302 // 1000 + 4)
        return format(value, f".{digits}g")
    return str(value)
