import json
import subprocess
import sys

import pytest
import yaml

from maprenewal.cli import main
from maprenewal.cli.main import emit_plot_data
from maprenewal.markov_model import gallery


def _summary(out):
    return (out / "summary.txt").read_text()


def test_spectral_suite_on_iid(tmp_path, capsys):
    assert main(["--gallery", "iid", "--suite", "spectral", "--out", str(tmp_path)]) == 0
    text = _summary(tmp_path)
    for name in ("lambda_at_zero", "decomposition", "covariance_moments", "nonlattice"):
        assert f"PASS   {name}:" in text
    assert "lambda_vs_t.csv" in {p.name for p in tmp_path.iterdir()}
    assert "config" in capsys.readouterr().out


def test_bad_transition_row_exits_2(tmp_path, capsys):
    spec = gallery("two_state").to_dict()
    spec["transition"] = [[0.5, 0.6], [0.5, 0.5]]
    path = tmp_path / "bad.yaml"
    path.write_text(yaml.safe_dump(spec))
    assert main(["--model", str(path), "--out", str(tmp_path / "o")]) == 2
    assert "transition row 0" in capsys.readouterr().err


def test_unknown_gallery_exits_2(tmp_path):
    assert main(["--gallery", "no_such_model", "--out", str(tmp_path)]) == 2


def test_lattice_control_is_an_expected_failure(tmp_path):
    assert main(["--gallery", "lattice_negative_control", "--suite", "renewal", "--out", str(tmp_path)]) == 0
    assert "XFAIL  negative_control:" in _summary(tmp_path)


def test_unexpected_lattice_claim_fails(tmp_path, capsys):
    cfg = tmp_path / "exp.yaml"
    cfg.write_text(yaml.safe_dump({"gallery": "doeblin_k_state", "suite": "spectral", "expect": "lattice"}))
    assert main(["--config", str(cfg), "--out", str(tmp_path / "o")]) == 1
    assert "FAIL: nonlattice" in capsys.readouterr().err


def test_config_file_overrides_flags(tmp_path):
    cfg = tmp_path / "exp.yaml"
    cfg.write_text(yaml.safe_dump({"gallery": "iid", "seed": 11}))
    assert main(["--gallery", "two_state", "--seed", "3", "--config", str(cfg),
                 "--out", str(tmp_path / "o")]) == 0
    head = _summary(tmp_path / "o").splitlines()[0]
    assert head.startswith("model iid ")


def test_unknown_config_key_exits_2(tmp_path):
    cfg = tmp_path / "exp.yaml"
    cfg.write_text("gallery: iid\nfrobnicate: 1\n")
    assert main(["--config", str(cfg), "--out", str(tmp_path / "o")]) == 2


def test_runs_are_byte_identical(tmp_path):
    outs = []
    for k in range(2):
        out = tmp_path / f"run{k}"
        assert main(["--gallery", "two_state", "--suite", "spectral", "--seed", "5", "--out", str(out)]) == 0
        outs.append(out)
    for name in ("results.json", "summary.txt", "lambda_vs_t.csv"):
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()


def test_config_hash_is_recorded(tmp_path):
    assert main(["--gallery", "two_state", "--out", str(tmp_path)]) == 0
    recs = json.loads((tmp_path / "results.json").read_text())
    hashes = {r["config_hash"] for r in recs}
    assert len(hashes) == 1 and len(hashes.pop()) == 16


def test_plot_data_on_empty_results(tmp_path):
    paths = emit_plot_data([], tmp_path)
    assert paths["lambda_vs_t"].read_text() == "model_id,norm_t,abs_lambda\n"
    assert paths["ratio_vs_a"].read_text().count("\n") == 1


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "maprenewal", "--gallery", "iid", "--out", str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr


@pytest.mark.slow
def test_renewal_suite_on_iid(tmp_path):
    assert main(["--gallery", "iid", "--suite", "renewal", "--a-max", "20", "--out", str(tmp_path)]) == 0
    text = _summary(tmp_path)
    assert "PASS   route_agreement" in text and "PASS   asymptote_ratio" in text
