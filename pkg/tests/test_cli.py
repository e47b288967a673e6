import json

from gapdens.cli import main
from gapdens.report import validate_report


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_generate_power(capsys):
    code, out, _ = run_cli(capsys, "generate", "--family", "power", "--a", "0.5", "--n", "10")
    assert code == 0
    assert [int(v) for v in out.split()] == [1, 4, 9, 16, 25, 36, 49, 64, 81, 100]


def test_generate_union_file(tmp_path, capsys):
    path = tmp_path / "union.txt"
    code, _, _ = run_cli(
        capsys, "generate", "--family", "double-exp-union", "--n", "11", "--out", str(path)
    )
    assert code == 0
    lines = path.read_text().split()
    assert len(lines) == 11
    assert lines[-1] == "257"


def test_generate_bad_param_exit_2(capsys):
    code, _, err = run_cli(capsys, "generate", "--family", "power", "--a", "1.5", "--n", "10")
    assert code == 2
    assert "a must lie in (0,1]" in err


def test_generate_io_error_exit_3(capsys):
    code, _, err = run_cli(
        capsys, "generate", "--family", "power", "--a", "0.5", "--n", "5",
        "--out", "/nonexistent-dir/x.txt",
    )
    assert code == 3


def test_unknown_flag_exit_2(capsys):
    code, _, _ = run_cli(capsys, "profile", "--no-such-flag")
    assert code == 2


def test_profile_json_schema(capsys):
    code, out, _ = run_cli(
        capsys, "profile", "--family", "arithmetic", "--k", "3", "--l", "5",
        "--n", "2000", "--format", "json",
    )
    assert code == 0
    doc = json.loads(out)
    validate_report(doc)
    assert abs(float(doc["eps_estimate"]) - 1.0) < 0.02
    assert abs(float(doc["statistics"]["alpha_stat_liminf"]["tail_estimate"]) - 1) < 0.01


def test_profile_from_file(tmp_path, capsys):
    path = tmp_path / "squares.txt"
    path.write_text("".join(f"{n*n}\n" for n in range(1, 200)))
    code, out, _ = run_cli(capsys, "profile", "--file", str(path), "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert abs(float(doc["eps_estimate"]) - 0.5) < 0.01


def test_profile_csv_output(capsys):
    code, out, _ = run_cli(
        capsys, "profile", "--family", "power", "--a", "0.5", "--n", "300",
        "--format", "csv",
    )
    assert code == 0
    assert out.splitlines()[0].startswith("statistic,mode,tail_estimate")


def test_verify_single_check(capsys):
    code, out, _ = run_cli(
        capsys, "verify", "--check", "sandwich", "--family", "power", "--a", "0.5",
        "--n", "500", "--format", "json",
    )
    assert code == 0
    doc = json.loads(out)
    validate_report(doc)
    assert doc["failures"] == 0


def test_verify_corrupt_file_exit_2(tmp_path, capsys):
    path = tmp_path / "bad.txt"
    path.write_text("5\n4\n9\n")
    code, _, err = run_cli(capsys, "verify", "--check", "sandwich", "--file", str(path))
    assert code == 2
    assert "strictly increasing" in err


def test_verify_manifest(tmp_path, capsys):
    manifest = tmp_path / "checks.txt"
    manifest.write_text(
        "sandwich power a=1/2 n=400\n"
        "analytic -\n"
        "rho-tau geometric alpha=1 b=2 n=300\n"
    )
    code, out, _ = run_cli(capsys, "verify", "--manifest", str(manifest), "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert [r["check_id"] for r in doc["reports"]] == ["sandwich", "analytic", "rho-tau"]
    assert [r["status"] for r in doc["reports"]] == ["pass", "pass", "pass"]


def test_table_small(capsys):
    code, out, _ = run_cli(
        capsys, "table", "--n", "400", "--union-n", "40", "--format", "json"
    )
    assert code == 0
    doc = json.loads(out)
    validate_report(doc)
    assert len(doc["rows"]) == 9
    geo = next(r for r in doc["rows"] if r["family"] == "2^m")
    assert geo["alpha_hat"] == "+inf(div)"


def test_probe_sigma_trace(capsys):
    code, out, _ = run_cli(
        capsys, "probe", "--family", "geometric", "--alpha", "1", "--b", "2",
        "--n", "1000", "--sigma", "0.2", "--format", "json",
    )
    assert code == 0
    doc = json.loads(out)
    validate_report(doc)
    assert doc["verdict"] == "converging"


def test_probe_negative_sigma_exit_2(capsys):
    code, _, err = run_cli(
        capsys, "probe", "--family", "power", "--a", "0.5", "--n", "64", "--sigma", "-1"
    )
    assert code == 2


def test_probe_bracket(capsys):
    code, out, _ = run_cli(
        capsys, "probe", "--family", "power", "--a", "0.5", "--n", "20000",
        "--bracket", "0.1", "1.0", "--format", "json",
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["lo"] <= 0.5 <= doc["hi"]


def test_config_overrides_flags(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("family = power\na = 0.5\nn = 12\n")
    code, out, _ = run_cli(
        capsys, "--config", str(cfg), "generate", "--family", "arithmetic", "--n", "3"
    )
    assert code == 0
    assert [int(v) for v in out.split()] == [1, 4, 9, 16, 25, 36, 49, 64, 81, 100, 121, 144]


def test_env_precision(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("GAPDENS_PRECISION", "192")
    path = tmp_path / "seq.txt"
    code, _, _ = run_cli(
        capsys, "generate", "--family", "sqrt-exp", "--n", "5", "--out", str(path)
    )
    assert code == 0
    assert path.read_text().startswith("#logdomain precision=192\n")


def test_help_exits_zero(capsys):
    code, _, _ = run_cli(capsys, "--help")
    assert code == 0
