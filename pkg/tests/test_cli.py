"""The command-line interface: exit codes, JSON contracts, reproducibility."""

import json
import subprocess
import sys
from pathlib import Path

import jsonschema
import numpy as np
import pytest

import torusskew
import torusskew.cli as cli_module
import torusskew.estimation as estimation_module
from torusskew import InconsistentEvidenceError
from torusskew.cli import main

SCHEMA_DIR = Path(torusskew.__file__).parent / "schemas"


def check_schema(payload, name):
    schema = json.loads((SCHEMA_DIR / f"{name}.schema.json").read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    jsonschema.validate(payload, schema, cls=jsonschema.Draft202012Validator)


def write_model(path, payload):
    path.write_text(json.dumps(payload, indent=2) + "\n")
    return str(path)


@pytest.fixture()
def models(tmp_path):
    return {
        "cosine": write_model(
            tmp_path / "cosine.json",
            {"family": "cosine", "kappa1": 1.0, "kappa2": 1.0, "beta": 0.5,
             "mu": [0.4, -1.1], "lambda": [0.5, 0.3], "mechanism": "sine"},
        ),
        "pvm": write_model(
            tmp_path / "pvm.json",
            {"family": "product_von_mises", "kappa": [1.5, 2.5],
             "lambda": [0.5, 0.3]},
        ),
        "sine": write_model(
            tmp_path / "sine.json",
            {"family": "sine", "kappa1": 1.0, "kappa2": 1.0, "beta": 0.9},
        ),
        "power": write_model(
            tmp_path / "power.json",
            {"family": "cosine", "kappa1": 1.0, "kappa2": 1.0, "beta": 0.5,
             "lambda": [0.3, 0.2], "mechanism": {"power": 3}},
        ),
        "bad": write_model(
            tmp_path / "bad.json",
            {"family": "product_von_mises", "kappa": [1.0, 1.0],
             "lambda": [0.8, 0.4]},
        ),
        "sharp_sine": write_model(
            tmp_path / "sharp_sine.json",
            {"family": "sine", "kappa1": 20.0, "kappa2": 20.0, "beta": 10.0},
        ),
    }


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    payload = json.loads(captured.out) if captured.out.strip() else None
    return code, payload, captured.err


# ----------------------------------------------------------------- validate


def test_validate_accepts_good_model(models, capsys):
    code, payload, _ = run(capsys, "validate", "--model", models["cosine"])
    assert code == 0
    assert payload["valid"] is True
    assert payload["violations"] == []
    check_schema(payload, "validate")
    check_schema(payload["model"], "model")


def test_validate_rejects_bad_model(models, capsys):
    code, payload, err = run(capsys, "validate", "--model", models["bad"])
    assert code == 1
    assert payload["valid"] is False
    assert any("<= 1" in v for v in payload["violations"])
    assert "invalid model" in err
    check_schema(payload, "validate")


def test_validate_missing_file_is_domain_error(capsys):
    code, payload, err = run(capsys, "validate", "--model", "/no/such.json")
    assert code == 1
    assert payload is None
    assert "cannot read" in err


def test_malformed_json_reports_position(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text('{"family": "sine", oops}')
    code, _, err = run(capsys, "validate", "--model", str(path))
    assert code == 1
    assert "line 1" in err and "column" in err


def test_unknown_descriptor_field_is_domain_error(tmp_path, capsys):
    path = write_model(
        tmp_path / "extra.json",
        {"family": "product_von_mises", "kappa": [1.0], "kapa": 2.0},
    )
    code, _, err = run(capsys, "validate", "--model", path)
    assert code == 1
    assert "kapa" in err


# ------------------------------------------------------------------ density


def test_density_theta_and_data(models, tmp_path, capsys):
    data = tmp_path / "pts.csv"
    data.write_text("theta_1,theta_2\n0.1,0.2\n-1.0,2.0\n")
    code, payload, _ = run(
        capsys,
        "density", "--model", models["cosine"],
        "--theta", "0.0,0.0", "--theta", "1.0,-1.0",
        "--data", str(data),
    )
    assert code == 0
    check_schema(payload, "density")
    assert len(payload["points"]) == 4
    assert len(payload["log_density"]) == 4
    assert np.allclose(
        payload["density"], np.exp(payload["log_density"]), rtol=1e-12
    )


def test_density_degrees_converts_inputs_not_descriptor(models, capsys):
    code_deg, payload_deg, _ = run(
        capsys, "density", "--model", models["cosine"], "--degrees",
        "--theta", "90.0,0.0",
    )
    code_rad, payload_rad, _ = run(
        capsys, "density", "--model", models["cosine"],
        "--theta", f"{np.pi / 2},0.0",
    )
    assert code_deg == code_rad == 0
    assert payload_deg["log_density"] == payload_rad["log_density"]
    # the echoed model descriptor stays in radians
    assert payload_deg["model"]["mu"] == [0.4, -1.1]


def test_density_without_points_is_domain_error(models, capsys):
    code, _, err = run(capsys, "density", "--model", models["cosine"])
    assert code == 1
    assert "--theta" in err or "--data" in err


def test_density_accuracy_failure_exits_two(models, capsys):
    code, _, err = run(
        capsys,
        "density", "--model", models["sharp_sine"],
        "--theta", "0.0,0.0", "--grid-n", "16",
    )
    assert code == 2
    assert "error" in err


def test_density_wrong_arity_theta(models, capsys):
    code, _, err = run(
        capsys, "density", "--model", models["cosine"], "--theta", "0.1"
    )
    assert code == 1
    assert "dimension" in err


# ------------------------------------------------------------------- sample


def test_sample_writes_csv_and_meta(models, tmp_path, capsys):
    out = tmp_path / "draws.csv"
    code, _, _ = run(
        capsys,
        "sample", "--model", models["cosine"], "--n", "500",
        "--seed", "7", "--out", str(out),
    )
    assert code == 0
    draws = np.loadtxt(out, delimiter=",", skiprows=1)
    assert draws.shape == (500, 2)
    assert np.all(draws >= -np.pi) and np.all(draws < np.pi)
    meta = json.loads((tmp_path / "draws.meta.json").read_text())
    check_schema(meta, "sample_meta")
    assert meta["rows"] == 500
    assert meta["columns"] == ["theta_1", "theta_2"]
    assert meta["config"]["seed"] == 7


def test_sample_byte_determinism(models, tmp_path, capsys):
    out = tmp_path / "draws.csv"
    args = ("sample", "--model", models["cosine"], "--n", "200",
            "--seed", "3", "--out", str(out))
    run(capsys, *args)
    first_csv = out.read_bytes()
    first_meta = (tmp_path / "draws.meta.json").read_bytes()
    run(capsys, *args)
    assert out.read_bytes() == first_csv
    assert (tmp_path / "draws.meta.json").read_bytes() == first_meta


def test_sample_rejects_bad_thread_count(models, tmp_path, capsys):
    code, _, err = run(
        capsys,
        "sample", "--model", models["cosine"], "--n", "10",
        "--threads", "0", "--out", str(tmp_path / "x.csv"),
    )
    assert code == 1
    assert "workers" in err


# ---------------------------------------------------------------------- fim


def test_fim_report_schema_and_rank(models, capsys):
    code, payload, _ = run(capsys, "fim", "--model", models["cosine"])
    assert code == 0
    check_schema(payload, "fim")
    assert payload["rank"] == 3
    assert len(payload["matrix"]) == 4
    assert len(payload["null_basis"]) == 1


def test_fim_full_rank_case(models, capsys):
    code, payload, _ = run(capsys, "fim", "--model", models["sine"])
    assert code == 0
    assert payload["rank"] == 4
    assert payload["null_basis"] == []


# --------------------------------------------------------------- characterize


def test_characterize_singular_verdict(models, capsys):
    code, payload, _ = run(capsys, "characterize", "--model", models["cosine"])
    assert code == 0
    check_schema(payload, "verdict")
    assert payload["verdict"] == "singular"
    assert np.allclose(payload["gamma"], [-1.0, -1.0], atol=1e-9)


def test_characterize_nonsingular_verdict(models, capsys):
    code, payload, _ = run(capsys, "characterize", "--model", models["sine"])
    assert code == 0
    check_schema(payload, "verdict")
    assert payload["verdict"] == "nonsingular"
    assert payload["min_eigenvalue"] > 0


def test_characterize_power_mechanism_same_gamma(models, capsys):
    code, payload, _ = run(capsys, "characterize", "--model", models["power"])
    assert code == 0
    assert payload["verdict"] == "singular"
    assert np.allclose(payload["gamma"], [-1.0, -1.0], atol=1e-9)


def test_characterize_inconsistent_is_a_result(models, capsys, monkeypatch):
    def fake(base, grid_N, tol, skew_scale):
        raise InconsistentEvidenceError(
            null_space_dim=2, best_alpha=[0.5, 0.5], deviation=0.3
        )

    monkeypatch.setattr(cli_module, "characterize", fake)
    code, payload, _ = run(capsys, "characterize", "--model", models["cosine"])
    assert code == 0  # a verdict, not a failure
    check_schema(payload, "verdict")
    assert payload["verdict"] == "inconsistent"
    assert payload["deviation"] == 0.3


def test_characterize_writes_out_file_byte_identically(models, tmp_path, capsys):
    out = tmp_path / "verdict.json"
    args = ("characterize", "--model", models["cosine"], "--out", str(out))
    code, payload, _ = run(capsys, *args)
    assert code == 0
    assert payload is None  # routed to the file, not stdout
    first = out.read_bytes()
    run(capsys, *args)
    assert out.read_bytes() == first
    check_schema(json.loads(first), "verdict")


# ---------------------------------------------------------------------- fit


def test_fit_recovers_model_from_csv(models, tmp_path, capsys):
    from torusskew import sample
    from torusskew.descriptors import read_model_file
    from torusskew.skewing import write_samples_csv

    truth = read_model_file(models["pvm"])
    data_path = tmp_path / "data.csv"
    write_samples_csv(data_path, sample(truth, 4000, seed=12))
    init = write_model(
        tmp_path / "init.json",
        {"family": "product_von_mises", "kappa": [1.5, 2.5]},
    )
    code, payload, _ = run(
        capsys, "fit", "--model", init, "--data", str(data_path)
    )
    assert code == 0
    check_schema(payload, "fit")
    assert payload["converged"] is True
    assert np.max(np.abs(np.array(payload["model"]["lambda"]) - [0.5, 0.3])) < 0.15
    assert np.max(np.abs(payload["model"]["mu"])) < 0.15


# -------------------------------------------------------------------- rates


@pytest.fixture()
def quick_rates(monkeypatch):
    monkeypatch.setattr(estimation_module, "MIN_REPLICATIONS", 2)
    monkeypatch.setattr(estimation_module, "MIN_DECADES", 0.5)


def test_rates_paired_design(models, tmp_path, quick_rates, capsys):
    out = tmp_path / "rates.json"
    code, _, _ = run(
        capsys,
        "rates", "--model", models["pvm"], "--model", models["cosine"],
        "--n-grid", "60,150,400", "--reps", "2", "--seed", "5",
        "--out", str(out),
    )
    assert code == 0
    payload = json.loads(out.read_text())
    check_schema(payload, "rates")
    assert len(payload["experiments"]) == 2
    first, second = payload["experiments"]
    assert first["seed"] == second["seed"] == 5  # paired seeds
    assert first["csv"].endswith("_1_product_von_mises.csv")
    assert second["csv"].endswith("_2_cosine.csv")
    for entry in payload["experiments"]:
        table = Path(entry["csv"]).read_text().splitlines()
        assert table[0] == "n,rmse_lambda,rmse_mu,reps"
        assert len(table) == 4


def test_rates_rejects_non_sine_mechanism(models, tmp_path, capsys):
    code, _, err = run(
        capsys,
        "rates", "--model", models["power"], "--n-grid", "60,150,400",
        "--reps", "2", "--out", str(tmp_path / "r.json"),
    )
    assert code == 1
    assert "sine mechanism" in err


def test_rates_rejects_malformed_n_grid(models, tmp_path, capsys):
    code, _, err = run(
        capsys,
        "rates", "--model", models["pvm"], "--n-grid", "500,abc",
        "--reps", "200", "--out", str(tmp_path / "r.json"),
    )
    assert code == 1
    assert "--n-grid" in err


def test_rates_enforces_replication_floor(models, tmp_path, capsys):
    code, _, err = run(
        capsys,
        "rates", "--model", models["pvm"], "--n-grid", "500,2000,16000",
        "--reps", "3", "--out", str(tmp_path / "r.json"),
    )
    assert code == 1
    assert "reps" in err


# ------------------------------------------------------------recovered usage


def test_usage_errors_exit_one(models):
    with pytest.raises(SystemExit) as exc:
        main(["density"])  # missing required --model
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["no-such-command"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 1


def test_console_entry_point_subprocess(models):
    proc = subprocess.run(
        [sys.executable, "-m", "torusskew.cli", "validate",
         "--model", models["cosine"]],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    payload = json.loads(proc.stdout)
    assert payload["valid"] is True
