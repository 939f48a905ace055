import json
import math

import numpy as np
import pytest

from bnl import cli, gpauli


def run(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def write_coeffs(tmp_path, text="0,1.0,0.0\n1,0.5,0.0\n"):
    path = tmp_path / "coeffs.csv"
    path.write_text(text)
    return str(path)


def test_missing_subcommand_is_usage_error(capsys):
    code, _, _ = run(capsys)
    assert code == 1


def test_unknown_flag_is_usage_error(capsys):
    code, _, err = run(capsys, "contextuality", "bsv", "--nope")
    assert code == 1


def test_bsv_without_gamma_is_usage_error(capsys):
    code, _, err = run(capsys, "contextuality", "bsv")
    assert code == 1
    assert "--gamma" in err


def test_verify_algebra_passes(capsys):
    code, out, _ = run(capsys, "verify-algebra", "--cutoff", "6")
    assert code == 0
    payload = json.loads(out)
    assert payload["passed"] is True
    assert payload["max_product_residual"] < 1e-12


def test_verify_algebra_trivial_cutoff(capsys):
    code, out, _ = run(capsys, "verify-algebra", "--cutoff", "0")
    assert code == 0
    assert json.loads(out)["max_spectrum_deviation"] == 0.0


def test_verify_algebra_detects_corrupted_table(capsys, monkeypatch):
    # tamper with the quadratic-form table so the cross-check trips
    broken = (
        gpauli.PAULI[0],
        np.array([[0, 1], [1, 0.5]], dtype=complex),
        gpauli.PAULI[2],
        gpauli.PAULI[3],
    )
    monkeypatch.setattr(gpauli, "PAULI", broken)
    code, out, _ = run(capsys, "verify-algebra", "--cutoff", "2", "--construction", "direct")
    assert code == 2
    assert json.loads(out)["passed"] is False


def test_contextuality_single_point(capsys):
    code, out, _ = run(capsys, "contextuality", "bsv", "--gamma", "1.0", "--cutoff", "40")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "gamma,p_diag,pm_value,margin,lo,hi,verdict"
    fields = lines[1].split(",")
    assert float(fields[0]) == 1.0
    assert float(fields[2]) == pytest.approx(6 - 6 / math.cosh(2), abs=1e-7)
    assert fields[6] == "violated"


def test_contextuality_qubit_reaches_six(capsys):
    code, out, _ = run(capsys, "contextuality", "qubit", "--bell-state", "singlet")
    assert code == 0
    fields = out.strip().splitlines()[1].split(",")
    assert fields[0] == ""
    assert float(fields[2]) == pytest.approx(6.0, abs=1e-12)


def test_contextuality_sweep_brackets_the_flip(capsys):
    code, out, _ = run(
        capsys,
        "contextuality",
        "bsv",
        "--gamma-min", "0.0",
        "--gamma-max", "1.2",
        "--steps", "25",
        "--cutoff", "40",
    )
    assert code == 0
    rows = [line.split(",") for line in out.strip().splitlines()[1:]]
    assert len(rows) == 25
    verdicts = [r[6] for r in rows]
    gammas = [float(r[0]) for r in rows]
    flip = next(k for k in range(1, 25) if verdicts[k] == "violated")
    assert verdicts[flip - 1] == "not_violated"
    assert gammas[flip - 1] < math.acosh(3) / 2 < gammas[flip]


def test_contextuality_json_format(capsys):
    code, out, _ = run(capsys, "contextuality", "bsv", "--gamma", "0.5", "--json")
    assert code == 0
    payload = json.loads(out)
    assert payload["rows"][0]["verdict"] == "not_violated"


def test_outputs_are_byte_deterministic(capsys, tmp_path):
    args = ("contextuality", "bsv", "--gamma-min", "0.1", "--gamma-max", "1.1", "--steps", "7")
    _, first, _ = run(capsys, *args)
    _, second, _ = run(capsys, *args)
    assert first == second
    _, v1, _ = run(capsys, "verify-algebra", "--cutoff", "4")
    _, v2, _ = run(capsys, "verify-algebra", "--cutoff", "4")
    assert v1 == v2


def test_out_flag_writes_file(capsys, tmp_path):
    target = tmp_path / "report.json"
    code, out, _ = run(capsys, "verify-algebra", "--cutoff", "2", "--out", str(target))
    assert code == 0
    assert out == ""
    assert json.loads(target.read_text())["passed"] is True


def test_entanglement_witness_bghz(capsys, tmp_path):
    code, out, _ = run(
        capsys, "entanglement", "witness", "bghz", "--coeffs", write_coeffs(tmp_path)
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["verdict"] == "entangled"
    assert payload["value"] < 0
    assert payload["witness"] == "ghz3"


def test_entanglement_witness_party_mismatch(capsys, tmp_path):
    code, _, err = run(
        capsys,
        "entanglement", "witness", "bghz",
        "--coeffs", write_coeffs(tmp_path),
        "--witness", "singlet",
    )
    assert code == 1
    assert "parties" in err


def test_entanglement_witness_coeff_parse_error(capsys, tmp_path):
    path = tmp_path / "coeffs.csv"
    path.write_text("0,1.0,0.0\nbroken\n")
    code, _, err = run(capsys, "entanglement", "witness", "bghz", "--coeffs", str(path))
    assert code == 3
    assert ":2:" in err


def test_entanglement_ns_family_bsv(capsys):
    code, out, _ = run(capsys, "entanglement", "ns-family", "bsv", "--gamma", "0.3")
    assert code == 0
    payload = json.loads(out)
    assert payload["detected"] is True
    assert len(payload["members"]) == 9


def test_entanglement_gram_phi_plus(capsys):
    code, out, _ = run(capsys, "entanglement", "gram", "qubit", "--bell-state", "phi+")
    assert code == 0
    payload = json.loads(out)
    want = np.zeros((4, 4))
    want[0, 0] = want[0, 3] = want[3, 0] = want[3, 3] = 0.5
    assert np.allclose(payload["normalized_real"], want, atol=1e-12)
    assert np.allclose(payload["normalized_imag"], np.zeros((4, 4)), atol=1e-12)
    assert payload["trace"] == pytest.approx(1.0, abs=1e-12)


def test_entanglement_gram_rejects_diagonal_state(capsys, tmp_path):
    path = tmp_path / "state.csv"
    path.write_text("1,1,2,0,1.0,0.0\n")
    code, _, err = run(capsys, "entanglement", "gram", "state", "--state", str(path))
    assert code == 2
    assert "diagonal" in err


def test_entanglement_witness_embedded_ghz(capsys):
    code, out, _ = run(capsys, "entanglement", "witness", "qubit", "--ghz")
    assert code == 0
    payload = json.loads(out)
    assert payload["witness"] == "ghz3"
    assert payload["value"] == pytest.approx(-1.0, abs=1e-12)
    assert payload["verdict"] == "entangled"


def test_entanglement_separable_source_not_detected(capsys):
    code, out, _ = run(
        capsys, "entanglement", "witness", "separable", "--seed", "5", "--witness", "ghz3"
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["verdict"] == "not_detected"
    assert payload["value"] >= -1e-10


def test_entanglement_bghz_gen_curve_is_labeled(capsys):
    code, out, _ = run(
        capsys,
        "entanglement", "witness", "bghz-gen",
        "--gamma-min", "0.05",
        "--gamma-max", "0.4",
        "--steps", "4",
        "--cutoff", "6",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["authoritative"] is False
    values = [point["witness_value"] for point in payload["curve"]]
    assert all(v < 0 for v in values)


def test_bell_bghz(capsys, tmp_path):
    code, out, _ = run(capsys, "bell", "bghz", "--coeffs", write_coeffs(tmp_path))
    assert code == 0
    payload = json.loads(out)
    assert payload["verdict"] == "violated"
    assert payload["value"] == pytest.approx(payload["structural_expected"], abs=1e-12)


def test_bell_qubit_ghz(capsys):
    code, out, _ = run(capsys, "bell", "qubit", "--ghz")
    assert code == 0
    assert json.loads(out)["value"] == pytest.approx(4.0, abs=1e-12)


def test_bell_qubit_without_ghz_is_usage_error(capsys):
    code, _, err = run(capsys, "bell", "qubit")
    assert code == 1


def test_bell_product_state_respects_bound(capsys):
    code, out, _ = run(capsys, "bell", "product-state")
    assert code == 0
    assert abs(json.loads(out)["value"]) <= 2.0


def test_counterexample_default(capsys):
    code, out, _ = run(capsys, "counterexample")
    assert code == 0
    payload = json.loads(out)
    assert payload["distance"] > 0.5
    assert payload["stokes_distance"] < 1e-12
    assert payload["matches_balanced_form"] is True


def test_counterexample_sign_flip(capsys):
    code, out, _ = run(capsys, "counterexample", "--sign-flip")
    assert code == 0
    payload = json.loads(out)
    assert payload["distance"] > 0.5
    assert payload["stokes_distance"] < 1e-12


def test_counterexample_one_photon_block(capsys):
    code, out, _ = run(capsys, "counterexample", "--block", "1")
    assert code == 0
    assert json.loads(out)["distance"] < 1e-12


class TestStateFiles:
    def test_embedded_singlet_file(self, capsys, tmp_path):
        path = tmp_path / "singlet.csv"
        amp = 1 / math.sqrt(2)
        path.write_text(f"1,0,0,1,{amp},0.0\n0,1,1,0,{-amp},0.0\n")
        code, out, _ = run(capsys, "contextuality", "state", "--state", str(path))
        assert code == 0
        assert float(out.strip().splitlines()[1].split(",")[2]) == pytest.approx(6.0, abs=1e-10)

    def test_renormalization_warning(self, capsys, tmp_path):
        path = tmp_path / "half.csv"
        path.write_text("1,0,0,1,0.5,0.0\n")
        code, _, err = run(capsys, "contextuality", "state", "--state", str(path))
        assert code == 0
        assert "renormalizing" in err

    def test_malformed_line_names_line(self, capsys, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("1,0,0,1,0.7,0.0\n1,0,0,oops,0.7,0.0\n")
        code, _, err = run(capsys, "contextuality", "state", "--state", str(path))
        assert code == 3
        assert ":2:" in err

    def test_duplicate_row_rejected(self, capsys, tmp_path):
        path = tmp_path / "dup.csv"
        path.write_text("1,0,0,1,0.7,0.0\n1,0,0,1,0.1,0.0\n")
        code, _, err = run(capsys, "contextuality", "state", "--state", str(path))
        assert code == 3
        assert "duplicate" in err

    def test_three_beam_file_feeds_bell(self, capsys, tmp_path):
        path = tmp_path / "ghz.csv"
        amp = 1 / math.sqrt(2)
        path.write_text(f"1,0,1,0,1,0,{amp},0.0\n0,1,0,1,0,1,{amp},0.0\n")
        code, out, _ = run(capsys, "bell", "state", "--state", str(path))
        assert code == 0
        assert json.loads(out)["value"] == pytest.approx(4.0, abs=1e-10)

    def test_beam_count_must_match_command(self, capsys, tmp_path):
        path = tmp_path / "two.csv"
        path.write_text("1,0,0,1,1.0,0.0\n")
        code, _, err = run(capsys, "bell", "state", "--state", str(path))
        assert code == 1
        assert "three" in err
