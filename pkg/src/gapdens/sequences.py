"""Strictly increasing integer sequences in exact and log-domain form.

A prefix stores either exact arbitrary-precision integers or high-precision
natural logs of the (conceptual) integer terms.  The log form exists because
several interesting sequences blow past any machine word within a handful of
terms; everything downstream (ratios, gap statistics, series probes) only
ever needs ln(a_n) and ratios of consecutive terms.

All types are immutable after construction and safe to share across threads;
operations are pure functions.
"""

from __future__ import annotations

import functools
import re
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from types import MappingProxyType

import gmpy2

from .errors import (
    EmptyInput,
    InvalidParam,
    NotStrictlyIncreasing,
    PrecisionUnderflow,
    TooShort,
)
from .numeric import (
    DEFAULT_PRECISION_BITS,
    ctx,
    ln_int,
    mpfr_from,
    validate_precision,
)

_MPFR_TYPE = type(gmpy2.mpfr(0))


class Domain(str, Enum):
    EXACT = "exact"
    LOG = "log"


@functools.total_ordering
@dataclass(frozen=True)
class TermValue:
    """One sequence element: an exact integer or a log-domain surrogate.

    Comparisons are total.  Exact/exact compares integers; any comparison
    involving a log-domain value compares natural logs at the coarser
    precision of the pair.
    """

    exact: int | None = None
    ln_value: object | None = None
    precision_bits: int | None = None

    @classmethod
    def from_int(cls, value: int) -> "TermValue":
        if value < 1:
            raise InvalidParam(f"exact terms must be >= 1, got {value}")
        return cls(exact=int(value))

    @classmethod
    def from_ln(cls, ln_value, precision_bits: int) -> "TermValue":
        validate_precision(precision_bits)
        ln_value = mpfr_from(ln_value, precision_bits)
        if ln_value < 0:
            raise InvalidParam(f"log-domain terms must have ln >= 0, got {ln_value}")
        return cls(ln_value=ln_value, precision_bits=precision_bits)

    @property
    def is_exact(self) -> bool:
        return self.exact is not None

    def ln(self, bits: int | None = None):
        """Natural log of the term at the requested (or stored) precision."""
        if self.is_exact:
            return ln_int(self.exact, bits or DEFAULT_PRECISION_BITS)
        if bits is None or bits == self.precision_bits:
            return self.ln_value
        return mpfr_from(self.ln_value, bits)

    def _cmp_key(self, other: "TermValue"):
        if self.is_exact and other.is_exact:
            return self.exact, other.exact
        bits = min(
            self.precision_bits or MAXBITS_SENTINEL,
            other.precision_bits or MAXBITS_SENTINEL,
        )
        return self.ln(bits), other.ln(bits)

    def __eq__(self, other):
        if not isinstance(other, TermValue):
            return NotImplemented
        a, b = self._cmp_key(other)
        return a == b

    def __lt__(self, other):
        if not isinstance(other, TermValue):
            return NotImplemented
        a, b = self._cmp_key(other)
        return a < b

    def __hash__(self):
        if self.is_exact:
            return hash(("exact", self.exact))
        return hash(("log", float(self.ln_value)))


MAXBITS_SENTINEL = 1 << 30


@dataclass(frozen=True)
class SequencePrefix:
    """Finite prefix a_1 < a_2 < ... < a_N with provenance metadata.

    ``values`` holds ints (exact domain) or mpfr natural logs (log domain);
    a prefix never mixes the two.  ``meta`` carries family parameters,
    dedup counts and, where relevant, the index offset mapping prefix
    positions to the natural index of the generating formula.
    """

    domain: Domain
    family_tag: str
    precision_bits: int
    values: tuple
    meta: object = field(default_factory=dict)

    def __post_init__(self):
        if not isinstance(self.meta, MappingProxyType):
            object.__setattr__(self, "meta", MappingProxyType(dict(self.meta)))

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, i: int) -> TermValue:
        v = self.values[i]
        if self.domain is Domain.EXACT:
            return TermValue(exact=v)
        return TermValue(ln_value=v, precision_bits=self.precision_bits)

    @property
    def is_exact(self) -> bool:
        return self.domain is Domain.EXACT

    @property
    def index_offset(self) -> int:
        """Offset between prefix position (1-based) and the natural index n."""
        return int(self.meta.get("index_offset", 0))

    @property
    def exact_terms(self) -> tuple:
        if not self.is_exact:
            raise InvalidParam("prefix is log-domain; exact terms unavailable")
        return self.values

    @functools.cached_property
    def ln_terms(self) -> tuple:
        """Natural logs of all terms at the prefix precision (cached)."""
        if self.is_exact:
            bits = self.precision_bits
            with ctx(bits):
                return tuple(gmpy2.log(gmpy2.mpz(v)) for v in self.values)
        return self.values

    def max_term_exceeds(self, bound: int) -> bool:
        if self.is_exact:
            return self.values[-1] > bound
        with ctx(self.precision_bits):
            return self.values[-1] > gmpy2.log(gmpy2.mpz(bound))


def build_prefix(
    raw_terms,
    dedup: bool = False,
    family_tag: str = "custom",
    precision_bits: int = DEFAULT_PRECISION_BITS,
    meta: dict | None = None,
) -> SequencePrefix:
    """Validated exact prefix from arbitrary-precision integers.

    Duplicates collapse only when ``dedup`` is set; otherwise any
    non-increasing pair raises NotStrictlyIncreasing with the offending
    index.
    """
    validate_precision(precision_bits)
    terms = [int(t) for t in raw_terms]
    if not terms:
        raise EmptyInput("term list is empty")
    collapsed = 0
    out: list[int] = []
    for i, t in enumerate(terms):
        if t < 1:
            raise InvalidParam(f"exact terms must be >= 1, got {t} at index {i}")
        if out:
            if t == out[-1] and dedup:
                collapsed += 1
                continue
            if t <= out[-1]:
                raise NotStrictlyIncreasing(i)
        out.append(t)
    info = dict(meta or {})
    info.setdefault("dedup_collapsed", collapsed)
    return SequencePrefix(Domain.EXACT, family_tag, precision_bits, tuple(out), info)


def build_log_prefix(
    ln_terms,
    precision_bits: int = DEFAULT_PRECISION_BITS,
    family_tag: str = "custom",
    meta: dict | None = None,
) -> SequencePrefix:
    """Validated log-domain prefix from natural logs of the terms.

    Inputs may be floats, decimal strings, Fractions or mpfr values; the
    given order must be strictly increasing as exact numbers.  Consecutive
    terms whose rounded logs differ by less than 2^-(bits-8) are rejected as
    indistinguishable at this precision.
    """
    validate_precision(precision_bits)
    raw = list(ln_terms)
    if not raw:
        raise EmptyInput("log term list is empty")

    def as_exact(v):
        if isinstance(v, _MPFR_TYPE):
            return Fraction(*v.as_integer_ratio()) if gmpy2.is_finite(v) else None
        if isinstance(v, (int, float, Fraction)):
            return Fraction(v)
        if isinstance(v, str):
            return Fraction(v)
        return None

    exact_view = [as_exact(v) for v in raw]
    rounded = [mpfr_from(v, precision_bits) for v in raw]
    threshold = mpfr_from(Fraction(1, 2 ** (precision_bits - 8)), precision_bits)
    for i in range(len(raw)):
        if rounded[i] < 0:
            raise InvalidParam(f"log-domain terms must have ln >= 0, got {rounded[i]} at index {i}")
        if i == 0:
            continue
        prev_e, cur_e = exact_view[i - 1], exact_view[i]
        if prev_e is not None and cur_e is not None and cur_e <= prev_e:
            raise NotStrictlyIncreasing(i)
        with ctx(precision_bits):
            diff = rounded[i] - rounded[i - 1]
        if diff <= 0 and (prev_e is None or cur_e is None):
            raise NotStrictlyIncreasing(i)
        if diff < threshold:
            raise PrecisionUnderflow(i)
    return SequencePrefix(
        Domain.LOG, family_tag, precision_bits, tuple(rounded), dict(meta or {})
    )


@dataclass(frozen=True)
class GapRatioSample:
    """Ratios a_n/a_{n+1}, g_n/a_{n+1} and g_n/a_n for one consecutive pair."""

    index: int
    ratio_prev: object
    gap_over_next: object
    gap_over_curr: object


def gap_ratio_samples(prefix: SequencePrefix) -> list[GapRatioSample]:
    """One GapRatioSample per consecutive pair of the prefix.

    Exact prefixes divide exact integers and round once at the prefix
    precision.  Log prefixes use exp/expm1 on the stored log differences so
    that tiny gaps (g_n = 1 next to enormous terms) survive.
    """
    if len(prefix) < 2:
        raise TooShort("gap ratios need a prefix of length >= 2")
    bits = prefix.precision_bits
    offset = prefix.index_offset
    out: list[GapRatioSample] = []
    if prefix.is_exact:
        terms = prefix.values
        with ctx(bits):
            for i in range(len(terms) - 1):
                a, b = gmpy2.mpz(terms[i]), gmpy2.mpz(terms[i + 1])
                g = b - a
                out.append(
                    GapRatioSample(
                        index=i + 1 + offset,
                        ratio_prev=a / b,
                        gap_over_next=g / b,
                        gap_over_curr=g / a,
                    )
                )
        return out
    lns = prefix.values
    with ctx(bits):
        for i in range(len(lns) - 1):
            d = lns[i + 1] - lns[i]
            out.append(
                GapRatioSample(
                    index=i + 1 + offset,
                    ratio_prev=gmpy2.exp(-d),
                    gap_over_next=-gmpy2.expm1(-d),
                    gap_over_curr=gmpy2.expm1(d),
                )
            )
    return out


# ---------------------------------------------------------------------------
# Text ingestion formats
#
# Exact:       one decimal integer per line, ascending, '#' comments allowed.
# Log-domain:  header '#logdomain precision=<bits>', then one decimal real
#              (natural log) per line.
# ---------------------------------------------------------------------------

_LOG_HEADER = re.compile(r"^#logdomain\s+precision=(\d+)\s*$")


def write_terms(prefix: SequencePrefix, fp) -> None:
    """Write a prefix in the text ingestion format."""
    if prefix.is_exact:
        for t in prefix.values:
            fp.write(f"{t}\n")
        return
    digits = prefix.precision_bits * 302 // 1000 + 4
    fp.write(f"#logdomain precision={prefix.precision_bits}\n")
    for v in prefix.values:
        fp.write(format(v, f".{digits}g") + "\n")


def read_terms(fp, family_tag: str = "file", precision_bits: int = DEFAULT_PRECISION_BITS,
               dedup: bool = False) -> SequencePrefix:
    """Parse the text ingestion format into a prefix."""
    lines = fp.read().splitlines()
    log_bits = None
    body_start = 0
    for i, line in enumerate(lines):
        if not line.strip():
            continue
        m = _LOG_HEADER.match(line.strip())
        if m:
            log_bits = int(m.group(1))
            body_start = i + 1
        break
    values: list[str] = []
    for line in lines[body_start:]:
        text = line.split("#", 1)[0].strip()
        if text:
            values.append(text)
    if not values:
        raise EmptyInput("no terms found in input")
    if log_bits is not None:
        return build_log_prefix(values, precision_bits=log_bits, family_tag=family_tag)
    try:
        ints = [int(v) for v in values]
    except ValueError as exc:
        raise InvalidParam(f"malformed integer line in sequence file: {exc}") from exc
    return build_prefix(ints, dedup=dedup, family_tag=family_tag, precision_bits=precision_bits)
