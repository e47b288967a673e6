"""Serialization of results: a stable JSON schema, CSV views, pretty text.

Every document carries a ``schema`` tag.  High-precision values serialize
as decimal strings (full precision); pretty output rounds to 4 significant
digits for human consumption.  CSV round-trips the declared fields without
loss: the profile view is one row per statistic, everything else flattens
to (path, value) rows.
"""

from __future__ import annotations

import csv
import io
import json
import math

from .errors import SchemaError
from .estimators import DensityProfile, EstimateTrace
from .families import FiniteSetReport
from .numeric import decimal_str
from .probe import SumTrace, TauBracket
from .verify import CheckReport

SCHEMA_PROFILE = "gapdens.density_profile/1"
SCHEMA_CHECK = "gapdens.check_report/1"
SCHEMA_SUITE = "gapdens.check_suite/1"
SCHEMA_SUM_TRACE = "gapdens.sum_trace/1"
SCHEMA_BRACKET = "gapdens.tau_bracket/1"
SCHEMA_FINITE = "gapdens.finite_set/1"
SCHEMA_TABLE = "gapdens.table/1"

_TRACE_NAMES = (
    "eps_lower",
    "eps_upper",
    "rho_lower",
    "rho_upper",
    "alpha_stat_liminf",
    "beta_stat_limsup",
    "alpha_stat_limsup",
    "beta_stat_liminf",
    "harmonic_lower",
    "harmonic_upper",
    "quotient_lower",
    "quotient_upper",
)


def trace_to_dict(trace: EstimateTrace) -> dict:
    return {
        "mode": trace.mode.value,
        "tail_estimate": decimal_str(trace.tail_estimate),
        "last_value": decimal_str(trace.last_value),
        "diagnostic": trace.diagnostic.value,
        "tail_fraction": trace.tail_fraction,
        "n_samples": trace.n_samples,
        "block_extrema": [[n, decimal_str(v)] for n, v in trace.block_extrema],
    }


def profile_to_dict(profile: DensityProfile) -> dict:
    return {
        "schema": SCHEMA_PROFILE,
        "family": profile.family_tag,
        "n_terms": profile.n_terms,
        "precision_bits": profile.precision_bits,
        "statistics": {name: trace_to_dict(getattr(profile, name)) for name in _TRACE_NAMES},
        "eps_lower_refined": decimal_str(profile.eps_lower_refined),
        "eps_upper_refined": decimal_str(profile.eps_upper_refined),
        "eps_estimate": decimal_str(profile.eps_estimate),
        "refined_from_quotients": profile.refined_from_quotients,
        "implied_interval": {
            "lo": decimal_str(profile.implied_interval[0]),
            "hi": decimal_str(profile.implied_interval[1]),
        },
        "eps_harmonic_discrepancy": decimal_str(profile.eps_harmonic_discrepancy),
    }


def check_to_dict(report: CheckReport) -> dict:
    return {
        "schema": SCHEMA_CHECK,
        "check_id": report.check_id,
        "status": report.status.value,
        "tolerance": report.tolerance,
        "witnesses": [list(w) for w in report.witnesses],
        "details": _plain(report.details),
    }


def suite_to_dict(reports) -> dict:
    docs = [check_to_dict(r) for r in reports]
    return {
        "schema": SCHEMA_SUITE,
        "reports": docs,
        "failures": sum(1 for r in reports if r.failed),
    }


def sum_trace_to_dict(trace: SumTrace) -> dict:
    return {
        "schema": SCHEMA_SUM_TRACE,
        "sigma": trace.sigma,
        "verdict": trace.verdict.value,
        "tail_increment_ratio": trace.tail_increment_ratio,
        "block_trend": trace.block_trend,
        "n_terms": trace.n_terms,
        "thresholds": {
            "conv_ratio": trace.thresholds.conv_ratio,
            "div_ratio": trace.thresholds.div_ratio,
            "trend_conv": trace.thresholds.trend_conv,
            "trend_div": trace.thresholds.trend_div,
            "trend_blocks": trace.thresholds.trend_blocks,
        },
        "partial_sums_log": [[n, decimal_str(v)] for n, v in trace.partial_sums_log],
        "block_log_sums": [[n, decimal_str(v)] for n, v in trace.block_log_sums],
    }


def bracket_to_dict(bracket: TauBracket) -> dict:
    return {
        "schema": SCHEMA_BRACKET,
        "lo": bracket.lo,
        "hi": bracket.hi,
        "width": bracket.width,
        "midpoint": bracket.midpoint,
        "lo_is_axiom": bracket.lo_is_axiom,
        "hi_certified": bracket.hi_certified,
        "stopped_at": bracket.stopped_at,
        "eps_upper_estimate": bracket.eps_upper_estimate,
        "consistency_gap": bracket.consistency_gap,
        "probes": [[sigma, verdict.value] for sigma, verdict in bracket.probes],
    }


def finite_set_to_dict(report: FiniteSetReport) -> dict:
    return {
        "schema": SCHEMA_FINITE,
        "family": report.family_tag,
        "values": list(report.values),
        "n_evaluated": report.n_evaluated,
        "stall_window": report.stall_window,
        "last_new_at": report.last_new_at,
    }


def _plain(value):
    """Recursively coerce report details into JSON-safe values."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, (str, bool, int)) or value is None:
        return value
    if isinstance(value, float):
        return value if math.isfinite(value) else decimal_str(value)
    return decimal_str(value)


def to_json(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=False)


# ---------------------------------------------------------------------------
# schema validation
# ---------------------------------------------------------------------------

_REQUIRED_KEYS = {
    SCHEMA_PROFILE: (
        "family", "n_terms", "precision_bits", "statistics",
        "eps_lower_refined", "eps_upper_refined", "eps_estimate",
        "refined_from_quotients", "implied_interval", "eps_harmonic_discrepancy",
    ),
    SCHEMA_CHECK: ("check_id", "status", "tolerance", "witnesses", "details"),
    SCHEMA_SUITE: ("reports", "failures"),
    SCHEMA_SUM_TRACE: (
        "sigma", "verdict", "tail_increment_ratio", "block_trend",
        "n_terms", "thresholds", "partial_sums_log", "block_log_sums",
    ),
    SCHEMA_BRACKET: (
        "lo", "hi", "width", "midpoint", "lo_is_axiom", "hi_certified",
        "stopped_at", "eps_upper_estimate", "consistency_gap", "probes",
    ),
    SCHEMA_FINITE: ("family", "values", "n_evaluated", "stall_window", "last_new_at"),
    SCHEMA_TABLE: ("n", "rows"),
}

_TRACE_KEYS = ("mode", "tail_estimate", "last_value", "diagnostic",
               "tail_fraction", "n_samples", "block_extrema")


def validate_report(doc: dict) -> None:
    """Raise SchemaError unless the document matches its declared schema."""
    if not isinstance(doc, dict) or "schema" not in doc:
        raise SchemaError("document lacks a schema tag")
    schema = doc["schema"]
    if schema not in _REQUIRED_KEYS:
        raise SchemaError(f"unknown schema {schema!r}")
    missing = [k for k in _REQUIRED_KEYS[schema] if k not in doc]
    if missing:
        raise SchemaError(f"{schema} document missing keys: {missing}")
    if schema == SCHEMA_PROFILE:
        for name in _TRACE_NAMES:
            trace = doc["statistics"].get(name)
            if trace is None:
                raise SchemaError(f"profile missing statistic {name!r}")
            bad = [k for k in _TRACE_KEYS if k not in trace]
            if bad:
                raise SchemaError(f"statistic {name!r} missing {bad}")
    if schema == SCHEMA_SUITE:
        for sub in doc["reports"]:
            validate_report(sub)
    if schema == SCHEMA_TABLE:
        for row in doc["rows"]:
            for key in ("family", "alpha_hat", "beta_hat", "expected_alpha",
                        "expected_beta", "eps_hat", "abs_delta"):
                if key not in row:
                    raise SchemaError(f"table row missing {key!r}")


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------

PROFILE_CSV_COLUMNS = (
    "statistic", "mode", "tail_estimate", "last_value",
    "diagnostic", "tail_fraction", "n_samples",
)
_PROFILE_SCALARS = (
    "eps_lower_refined", "eps_upper_refined", "eps_estimate",
    "eps_harmonic_discrepancy",
)


def to_csv(doc: dict) -> str:
    """CSV view of a document: per-statistic rows for profiles and tables,
    flattened (path, value) rows otherwise."""
    schema = doc.get("schema")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if schema == SCHEMA_PROFILE:
        writer.writerow(PROFILE_CSV_COLUMNS)
        for name in _TRACE_NAMES:
            t = doc["statistics"][name]
            writer.writerow([
                name, t["mode"], t["tail_estimate"], t["last_value"],
                t["diagnostic"], t["tail_fraction"], t["n_samples"],
            ])
        for name in _PROFILE_SCALARS:
            writer.writerow([name, "scalar", doc[name], "", "", "", ""])
        writer.writerow(["implied_lo", "scalar", doc["implied_interval"]["lo"], "", "", "", ""])
        writer.writerow(["implied_hi", "scalar", doc["implied_interval"]["hi"], "", "", "", ""])
        return buf.getvalue()
    if schema == SCHEMA_TABLE:
        cols = ("family", "alpha_hat", "beta_hat", "expected_alpha",
                "expected_beta", "eps_hat", "abs_delta")
        writer.writerow(cols)
        for row in doc["rows"]:
            writer.writerow([row[c] for c in cols])
        return buf.getvalue()
    writer.writerow(("path", "value"))
    for path, value in _flatten(doc):
        writer.writerow((path, value))
    return buf.getvalue()


def _flatten(value, prefix=""):
    if isinstance(value, dict):
        for k, v in value.items():
            yield from _flatten(v, f"{prefix}{k}.")
        return
    if isinstance(value, (list, tuple)):
        for i, v in enumerate(value):
            yield from _flatten(v, f"{prefix}{i}.")
        return
    yield prefix.rstrip("."), value


def profile_csv_round_trip(text: str) -> dict:
    """Parse a profile CSV back into {statistic: {column: value}}."""
    rows = list(csv.reader(io.StringIO(text)))
    header, body = rows[0], rows[1:]
    if tuple(header) != PROFILE_CSV_COLUMNS:
        raise SchemaError(f"unexpected profile CSV header: {header}")
    out = {}
    for row in body:
        record = dict(zip(header[1:], row[1:]))
        out[row[0]] = record
    return out


def profile_declared_view(doc: dict) -> dict:
    """The projection of a profile document that its CSV view declares."""
    out = {}
    for name in _TRACE_NAMES:
        t = doc["statistics"][name]
        out[name] = {
            "mode": str(t["mode"]),
            "tail_estimate": str(t["tail_estimate"]),
            "last_value": str(t["last_value"]),
            "diagnostic": str(t["diagnostic"]),
            "tail_fraction": str(t["tail_fraction"]),
            "n_samples": str(t["n_samples"]),
        }
    for name in _PROFILE_SCALARS:
        out[name] = _scalar_row(doc[name])
    out["implied_lo"] = _scalar_row(doc["implied_interval"]["lo"])
    out["implied_hi"] = _scalar_row(doc["implied_interval"]["hi"])
    return out


def _scalar_row(value) -> dict:
    return {
        "mode": "scalar", "tail_estimate": str(value), "last_value": "",
        "diagnostic": "", "tail_fraction": "", "n_samples": "",
    }


# ---------------------------------------------------------------------------
# pretty rendering (4 significant digits)
# ---------------------------------------------------------------------------

def _sig4(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return str(value)
    if isinstance(value, (int,)):
        return str(value)
    if isinstance(value, str):
        try:
            value = float(value)
        except ValueError:
            return value
    if isinstance(value, float) and not math.isfinite(value):
        return "+inf" if value > 0 else str(value)
    return f"{float(value):.4g}"


def render_pretty(doc: dict) -> str:
    schema = doc.get("schema")
    lines = []
    if schema == SCHEMA_PROFILE:
        lines.append(f"density profile: {doc['family']}  "
                     f"(N={doc['n_terms']}, {doc['precision_bits']}-bit)")
        for name in _TRACE_NAMES:
            t = doc["statistics"][name]
            lines.append(
                f"  {name:18s} {t['mode']:6s} {_sig4(t['tail_estimate']):>10s}"
                f"  [{t['diagnostic']}]"
            )
        lines.append(f"  eps refined        [{_sig4(doc['eps_lower_refined'])}, "
                     f"{_sig4(doc['eps_upper_refined'])}]"
                     f"  (from quotients: {doc['refined_from_quotients']})")
        lines.append(f"  eps estimate       {_sig4(doc['eps_estimate'])}")
        lines.append(f"  implied interval   [{_sig4(doc['implied_interval']['lo'])}, "
                     f"{_sig4(doc['implied_interval']['hi'])}]")
        lines.append(f"  eps vs harmonic    {_sig4(doc['eps_harmonic_discrepancy'])}")
        return "\n".join(lines) + "\n"
    if schema == SCHEMA_CHECK:
        return _render_check(doc) + "\n"
    if schema == SCHEMA_SUITE:
        for sub in doc["reports"]:
            lines.append(_render_check(sub))
        lines.append(f"failures: {doc['failures']}")
        return "\n".join(lines) + "\n"
    if schema == SCHEMA_SUM_TRACE:
        lines.append(
            f"partial sums: sigma={_sig4(doc['sigma'])}  verdict={doc['verdict']}"
        )
        lines.append(f"  last block share   {_sig4(doc['tail_increment_ratio'])}")
        lines.append(f"  block trend (log2) {_sig4(doc['block_trend'])}")
        n, v = doc["partial_sums_log"][-1]
        lines.append(f"  ln partial sum     {_sig4(v)}  at n={n}")
        return "\n".join(lines) + "\n"
    if schema == SCHEMA_BRACKET:
        certified = "certified" if doc["hi_certified"] else "UNCERTIFIED"
        lines.append(f"tau bracket: [{_sig4(doc['lo'])}, {_sig4(doc['hi'])}]"
                     f"  width={_sig4(doc['width'])} ({certified})")
        lines.append(f"  density estimate   {_sig4(doc['eps_upper_estimate'])}"
                     f"  (gap to midpoint {_sig4(doc['consistency_gap'])})")
        lines.append("  probes: " + ", ".join(
            f"{_sig4(s)}:{v}" for s, v in doc["probes"]))
        return "\n".join(lines) + "\n"
    if schema == SCHEMA_FINITE:
        lines.append(f"finite set: {doc['family']}")
        lines.append(f"  values ({len(doc['values'])}): {doc['values']}")
        lines.append(f"  stalled after {doc['last_new_at']} "
                     f"(window {doc['stall_window']}, scanned {doc['n_evaluated']})")
        return "\n".join(lines) + "\n"
    if schema == SCHEMA_TABLE:
        return render_table(doc)
    return to_json(doc) + "\n"


def _render_check(doc: dict) -> str:
    head = f"[{doc['status'].upper():14s}] {doc['check_id']}"
    fam = doc["details"].get("family")
    if fam:
        head += f"  {fam}"
    if doc["witnesses"]:
        head += f"  witnesses={doc['witnesses']}"
    return head


def render_table(doc: dict) -> str:
    cols = ("family", "alpha_hat", "beta_hat", "expected_alpha",
            "expected_beta", "eps_hat", "abs_delta")
    rows = [[str(r[c]) if c == "family" else _sig4(r[c]) for c in cols]
            for r in doc["rows"]]
    header = ["family", "alpha^", "beta^", "alpha", "beta", "eps^", "|delta|"]
    widths = [max(len(h), *(len(r[i]) for r in rows)) for i, h in enumerate(header)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths))]
    for r in rows:
        lines.append("  ".join(c.ljust(w) for c, w in zip(r, widths)))
    return "\n".join(lines) + "\n"
