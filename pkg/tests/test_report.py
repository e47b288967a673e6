import json

import pytest

from gapdens.errors import SchemaError
from gapdens.estimators import density_profile
from gapdens.families import gen_geometric, gen_power, gen_product
from gapdens.probe import bracket_tau, partial_sums
from gapdens.report import (
    bracket_to_dict,
    check_to_dict,
    finite_set_to_dict,
    profile_csv_round_trip,
    profile_declared_view,
    profile_to_dict,
    render_pretty,
    suite_to_dict,
    sum_trace_to_dict,
    to_csv,
    to_json,
    validate_report,
)
from gapdens.verify import check_analytic_inequalities, check_sandwich


@pytest.fixture(scope="module")
def profile_doc():
    return profile_to_dict(density_profile(gen_power("1/2", 300)))


def test_profile_doc_validates_and_serializes(profile_doc):
    validate_report(profile_doc)
    parsed = json.loads(to_json(profile_doc))
    assert parsed["schema"] == "gapdens.density_profile/1"
    assert parsed["statistics"]["eps_upper"]["diagnostic"] == "converging"
    # high-precision values travel as decimal strings
    assert isinstance(parsed["eps_estimate"], str)
    assert abs(float(parsed["eps_estimate"]) - 0.5) < 1e-6


def test_profile_csv_round_trip_declared_fields(profile_doc):
    text = to_csv(profile_doc)
    parsed = profile_csv_round_trip(text)
    assert parsed == profile_declared_view(profile_doc)


def test_check_report_doc(profile_doc):
    rep = check_sandwich(density_profile(gen_power("1/2", 300)))
    doc = check_to_dict(rep)
    validate_report(doc)
    suite = suite_to_dict([rep])
    validate_report(suite)
    assert suite["failures"] == 0
    csv_text = to_csv(suite)
    assert "path,value" in csv_text.splitlines()[0]


def test_sum_trace_and_bracket_docs():
    p = gen_geometric(1, 2, 1000)
    trace = partial_sums(p, 0.5)
    doc = sum_trace_to_dict(trace)
    validate_report(doc)
    br = bracket_tau(p, 0.01, 0.5)
    bdoc = bracket_to_dict(br)
    validate_report(bdoc)
    assert bdoc["lo"] == 0.0
    pretty = render_pretty(bdoc)
    assert "tau bracket" in pretty


def test_finite_set_doc():
    rep = gen_product(10, 2, 10**5)
    doc = finite_set_to_dict(rep)
    validate_report(doc)
    assert doc["values"][0] == 20


def test_pretty_rounds_to_4_digits(profile_doc):
    text = render_pretty(profile_doc)
    assert "0.5" in text
    # no 40-digit decimal strings leak into pretty output
    assert not any(len(tok) > 25 for tok in text.split())


def test_validate_rejects_bad_docs(profile_doc):
    with pytest.raises(SchemaError):
        validate_report({"no": "schema"})
    with pytest.raises(SchemaError):
        validate_report({"schema": "gapdens.unknown/9"})
    broken = dict(profile_doc)
    del broken["eps_estimate"]
    with pytest.raises(SchemaError):
        validate_report(broken)


def test_analytic_check_doc_roundtrip():
    doc = check_to_dict(check_analytic_inequalities())
    validate_report(doc)
    assert doc["status"] == "pass"
