import json

import numpy as np
import pytest

from strukt import StructureKind, frob_norm, load_polynomial, random_structured, save_polynomial
from strukt import polycore
from strukt.cli import EXIT_CERTIFICATION, EXIT_OK, EXIT_USAGE, ExperimentConfig, main
from strukt.errors import StruktError


@pytest.fixture
def poly_file(tmp_path):
    p = random_structured(2, 5, StructureKind.symmetric, 1.0, seed=3)
    path = tmp_path / "poly.json"
    save_polynomial(p, path)
    return path, p


def test_linearize_recover_roundtrip(tmp_path, poly_file, capsys):
    path, p = poly_file
    pencil_path = tmp_path / "pencil.json"
    assert main(["linearize", str(path), "--kind", "symmetric", "--output", str(pencil_path)]) == EXIT_OK
    back_path = tmp_path / "back.json"
    assert main(["recover", str(pencil_path), "--output", str(back_path)]) == EXIT_OK
    back = load_polynomial(back_path)
    assert frob_norm(back - p) <= 1e-13 * frob_norm(p)
    out = capsys.readouterr().out
    assert "sign=" in out and "norm_P=" in out


def test_linearize_even_grade_exits_2(tmp_path, capsys):
    p = polycore.from_coeff_list([np.eye(2)] * 5)  # grade 4 symmetric
    path = tmp_path / "even.json"
    save_polynomial(p, path)
    assert main(["linearize", str(path), "--kind", "symmetric"]) == EXIT_USAGE
    assert "odd grade required" in capsys.readouterr().err


def test_linearize_missing_file_exits_2(tmp_path):
    assert main(["linearize", str(tmp_path / "nope.json"), "--kind", "even"]) == EXIT_USAGE


def test_recover_missing_sidecar_exits_2(tmp_path, poly_file):
    path, _ = poly_file
    assert main(["recover", str(path)]) == EXIT_USAGE


def test_recover_zero_pencil_gives_zero(tmp_path):
    size = 10
    zero = polycore.zeros(size, size, 1)
    path = tmp_path / "zero.json"
    polycore.save_polynomial(zero, path)
    with open(tmp_path / "zero.sidecar.json", "w") as fh:
        json.dump({"k": 2, "n": 2, "kind": "symmetric", "sign": 1}, fh)
    out = tmp_path / "rec.json"
    assert main(["recover", str(path), "--output", str(out)]) == EXIT_OK
    assert frob_norm(load_polynomial(out)) == 0.0


def test_perturb_writes_pencil(tmp_path, poly_file):
    path, _ = poly_file
    pencil_path = tmp_path / "pencil.json"
    main(["linearize", str(path), "--kind", "symmetric", "--output", str(pencil_path)])
    out = tmp_path / "pert.json"
    assert main(["perturb", str(pencil_path), "--norm", "1e-6", "--seed", "4", "--output", str(out)]) == EXIT_OK
    pert = load_polynomial(out)
    base = load_polynomial(pencil_path)
    assert abs(frob_norm(pert - base) - 1e-6) <= 1e-16


def test_sigma_min_passes(capsys):
    assert main(["sigma-min", "--kmax", "3", "--kinds", "even,odd"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "1.41421356" in out


def test_eigs_on_polynomial(tmp_path, capsys):
    p = random_structured(2, 3, StructureKind.palindromic, 1.0, seed=6)
    path = tmp_path / "p.json"
    save_polynomial(p, path)
    assert main(["eigs", str(path), "--kind", "palindromic"]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["count"] == 6
    assert doc["symmetry_score"] <= 1e-8


def test_eigs_on_pencil_file(tmp_path, poly_file, capsys):
    path, _ = poly_file
    pencil_path = tmp_path / "pencil.json"
    main(["linearize", str(path), "--kind", "symmetric", "--output", str(pencil_path)])
    capsys.readouterr()
    assert main(["eigs", str(pencil_path)]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["count"] == 10
    assert doc["kind"] == "symmetric"


def test_certify_default_config(tmp_path, capsys):
    out = tmp_path / "rep.csv"
    assert main(["certify", "--output", str(out)]) == EXIT_OK
    assert "certify: 20/20" in capsys.readouterr().out
    assert out.read_text().count("\n") == 21


def test_certify_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["certify", "--output", str(a)]) == EXIT_OK
    assert main(["certify", "--output", str(b)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_certify_zero_norm_config(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(
        json.dumps(
            {
                "kind": "palindromic",
                "grade": 3,
                "n": 2,
                "pert_norms": [0.0],
                "trials": 1,
                "seed": 7,
            }
        )
    )
    out = tmp_path / "rep.json"
    assert main(["certify", str(cfg), "--format", "json", "--output", str(out)]) == EXIT_OK
    rows = json.loads(out.read_text())
    assert rows[0]["ratio"] == 0.0


def test_certify_bad_config_exits_2(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"grade": 4}))
    assert main(["certify", str(cfg)]) == EXIT_USAGE
    cfg.write_text(json.dumps({"no_such_key": 1}))
    assert main(["certify", str(cfg)]) == EXIT_USAGE


def test_certify_empirical_large_perturbation(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(
        json.dumps(
            {
                "kind": "symmetric",
                "grade": 3,
                "n": 2,
                "pert_norms": [1e-3],
                "trials": 2,
                "seed": 11,
                "mode": "empirical",
            }
        )
    )
    assert main(["certify", str(cfg)]) == EXIT_OK


def test_unknown_subcommand_exits_2():
    assert main(["frobnicate"]) == EXIT_USAGE


def test_config_validation_direct():
    with pytest.raises(StruktError):
        ExperimentConfig(grade=4).validate()
    with pytest.raises(StruktError):
        ExperimentConfig(trials=0).validate()
    cfg = ExperimentConfig(kind="odd").validate()
    assert cfg.sigma == -1
