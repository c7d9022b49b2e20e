import json
import subprocess
import sys

import pytest

from ietlab import RigidityCertificate, corpus, verify_certificate
from ietlab.cli import main


@pytest.fixture()
def golden_path(tmp_path):
    path = tmp_path / "golden.json"
    path.write_text(json.dumps(corpus.load("golden_rotation").to_json(), indent=2))
    return str(path)


@pytest.fixture()
def identity_path(tmp_path):
    path = tmp_path / "identity.json"
    path.write_text(json.dumps(corpus.load("identity").to_json(), indent=2))
    return str(path)


def test_entry_point_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "ietlab.cli", "--help"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "certify-rigidity" in proc.stdout


def test_minimality_artifact(golden_path, tmp_path):
    out = tmp_path / "min.json"
    assert main(["minimality", "--iet", golden_path, "--depth", "100",
                 "--output", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["certified"] is True
    assert data["status"] == "certified_minimal_up_to_100"


def test_return_map_artifact(golden_path, tmp_path):
    out = tmp_path / "rm.json"
    rc = main(["return-map", "--iet", golden_path, "--lo", "0",
               "--hi", "3/2-1/2*sqrt(5)", "--output", str(out)])
    assert rc == 0
    data = json.loads(out.read_text())
    assert sorted(p["return_time"] for p in data["pieces"]) == [2, 3]
    assert data["kac_sum"] == "1"


def test_certify_verify_loop(golden_path, tmp_path):
    cert_path = tmp_path / "cert.json"
    assert main(["certify-rigidity", "--iet", golden_path, "--epsilon", "1/10",
                 "--n", "44", "--output", str(cert_path)]) == 0
    assert main(["verify-certificate", "--certificate", str(cert_path),
                 "--output", str(tmp_path / "verify.json")]) == 0
    report = json.loads((tmp_path / "verify.json").read_text())
    assert report["ok"] is True
    # the emitted artifact re-parses to an equal in-memory value
    cert = RigidityCertificate.from_json(json.loads(cert_path.read_text()))
    assert cert.to_json() == json.loads(cert_path.read_text())
    assert verify_certificate(cert).ok


def test_certify_batch_with_ratio(golden_path, tmp_path):
    out = tmp_path / "batch.json"
    rc = main(["certify-rigidity", "--iet", golden_path, "--epsilon", "1/10",
               "--n-list", "22,44,88", "--output", str(out), "--seed", "7"])
    assert rc == 0
    data = json.loads(out.read_text())
    assert data["kind"] == "certificate-batch"
    assert data["n_values"] == [22, 44, 88]
    assert len(data["certificates"]) == 3
    assert data["seed"] == 7
    assert data["max_k_ratio"] is not None


def test_tampered_certificate_exits_4(golden_path, tmp_path, capsys):
    cert_path = tmp_path / "cert.json"
    main(["certify-rigidity", "--iet", golden_path, "--epsilon", "1/10",
          "--n", "22", "--output", str(cert_path)])
    data = json.loads(cert_path.read_text())
    data["region"][0][1] = "1"  # enlarge the region
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(data))
    rc = main(["verify-certificate", "--certificate", str(bad)])
    captured = capsys.readouterr()
    assert rc == 4
    err = json.loads(captured.err)
    assert err["error"]["type"] == "VerificationError"


def test_rational_rotation_rejected_exit_3(tmp_path, capsys):
    path = tmp_path / "rot13.json"
    path.write_text(json.dumps(corpus.load("rotation_1_3").to_json()))
    rc = main(["certify-rigidity", "--iet", str(path), "--epsilon", "1/10",
               "--n", "50"])
    assert rc == 3
    err = json.loads(capsys.readouterr().err)
    assert err["error"]["type"] == "PreconditionError"


def test_parse_error_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    rc = main(["minimality", "--iet", str(bad), "--depth", "5"])
    assert rc == 2
    rc = main(["minimality", "--iet", str(tmp_path / "missing.json"),
               "--depth", "5"])
    assert rc == 2


def test_correlations_csv(identity_path, tmp_path):
    out = tmp_path / "corr.csv"
    rc = main(["correlations", "--iet", identity_path, "--n-from", "0",
               "--n-to", "3", "--depth", "1", "--output", str(out)])
    assert rc == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "n,a,b,value,target,deviation"
    assert "0,0,0,1/2,1/4,1/4" in lines
    assert "3,0,0,1/2,1/4,1/4" in lines
    assert len(lines) == 1 + 4 * 4


def test_mixing_window_artifact(identity_path, tmp_path):
    out = tmp_path / "mw.json"
    rc = main(["mixing-window", "--iet", identity_path, "--j", "1", "--k", "3",
               "--epsilon", "1/5", "--depth", "1", "--output", str(out)])
    assert rc == 0
    data = json.loads(out.read_text())
    assert data["passed"] is False
    assert data["witness"]["deviation"] == "1/4"


def test_block_mixing_artifact(golden_path, tmp_path):
    cert_path = tmp_path / "cert.json"
    main(["certify-rigidity", "--iet", golden_path, "--epsilon", "1/10",
          "--n", "704", "--output", str(cert_path)])
    cert = RigidityCertificate.from_json(json.loads(cert_path.read_text()))
    from ietlab import block_mixing_thresholds

    _, cap = block_mixing_thresholds(cert.measure())
    out = tmp_path / "block.json"
    rc = main(["block-mixing", "--certificate", str(cert_path),
               "--epsilon", f"{cap.numerator}/{cap.denominator}",
               "--output", str(out)])
    assert rc == 0
    data = json.loads(out.read_text())
    assert data["kind"] == "block-mixing-witness"


def test_partition_artifact(golden_path, tmp_path):
    out = tmp_path / "part.json"
    rc = main(["partition", "--iet", golden_path, "--n", "6",
               "--output", str(out)])
    assert rc == 0
    data = json.loads(out.read_text())
    assert len(data["points"]) == 7
    assert len(data["elements"]) == 8
    assert data["classes"]


def test_config_file_with_flag_override(golden_path, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "command": "minimality",
        "iet": golden_path,
        "depth": 5,
    }))
    out = tmp_path / "a.json"
    rc = main(["minimality", "--config", str(cfg), "--depth", "9",
               "--output", str(out)])
    assert rc == 0
    assert json.loads(out.read_text())["depth"] == 9


def test_config_unknown_field_rejected(golden_path, tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"iet": golden_path, "depth": 5, "bogus": 1}))
    rc = main(["minimality", "--config", str(cfg)])
    assert rc == 2
    err = json.loads(capsys.readouterr().err)
    assert "bogus" in err["error"]["detail"]["fields"]


def test_config_command_mismatch_rejected(golden_path, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"command": "partition", "iet": golden_path}))
    rc = main(["minimality", "--config", str(cfg), "--depth", "5"])
    assert rc == 2


def test_missing_parameters_exit_2(golden_path):
    assert main(["certify-rigidity", "--iet", golden_path,
                 "--epsilon", "1/10"]) == 2
    assert main(["return-map", "--iet", golden_path]) == 2


def test_determinism_byte_identical(golden_path, identity_path, tmp_path):
    pairs = [
        (["certify-rigidity", "--iet", golden_path, "--epsilon", "1/10",
          "--n", "44"], "cert"),
        (["return-map", "--iet", golden_path, "--lo", "0", "--hi", "1/4"], "rm"),
        (["correlations", "--iet", identity_path, "--n-from", "0",
          "--n-to", "2", "--depth", "1"], "corr"),
        (["partition", "--iet", golden_path, "--n", "5"], "part"),
    ]
    for argv, tag in pairs:
        a = tmp_path / f"{tag}_a"
        b = tmp_path / f"{tag}_b"
        assert main(argv + ["--output", str(a)]) == 0
        assert main(argv + ["--output", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()
