#!/usr/bin/env python3
"""
Tests for the command-line layer: config loading, CSV ingestion, synthetic
data and the subcommands end to end on tiny inputs.

Run:
    python scripts/test_cli.py
    pytest scripts/test_cli.py
"""

import json
import math
import sys
import tempfile
import traceback
from pathlib import Path

import numpy as np
import pandas as pd
import yaml
from scipy import integrate

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from cli import (
    ConfigLoader,
    RunConfig,
    build_parser,
    ingest_csv,
    load_config,
    main as cli_main,
    moment_set_masses,
    reference_density,
    reference_mean,
    simulate_ais_like,
    simulate_reference_data,
    simulate_two_regime,
)
from exceptions import ConfigValidationError, DataIngestError
from mixture import GaussNIGConfig

CONFIG_DIR = Path(__file__).parent.parent / "config"


def _write(directory: Path, name: str, text: str) -> Path:
    path = directory / name
    path.write_text(text, encoding="utf-8")
    return path


def _tiny_run_config(directory: Path, **overrides) -> Path:
    payload = {
        "name": "tiny",
        "seed": 3,
        "output_dir": str(directory / "run"),
        "kappa": 1.0,
        "epsilon": 1e-3,
        "intensity": {"kind": "gamma", "omega": 1.0},
        "data": {"simulate": "five_gaussian", "n": 60},
        "chain": {"n_burnin": 20, "n_samples": 10, "thinning": 1},
        "grid": {"points": 50},
    }
    payload.update(overrides)
    path = directory / "tiny.yaml"
    with open(path, "w", encoding="utf-8") as f:
        yaml.safe_dump(payload, f)
    return path


def _field_errors(call) -> list[str]:
    try:
        call()
    except ConfigValidationError as e:
        return [err["field"] for err in e.errors]
    raise AssertionError("expected ConfigValidationError")


# ============================================================================
# Configuration
# ============================================================================

def test_shipped_configs_validate():
    loader = ConfigLoader()
    for name in ("simulated_a5.yaml", "lindep.yaml", "stamps.yaml"):
        assert loader.validate_file(CONFIG_DIR / name) == [], name
    config = load_config(CONFIG_DIR / "simulated_a5.yaml")
    assert config.intensity.kind == "bessel"
    assert config.intensity.omega == 1.05 and config.kappa == 0.11


def test_preset_and_explicit_values():
    base = {"data": {"simulate": "five_gaussian"}}
    config = RunConfig(preset="A5", **base)
    assert (config.intensity.omega, config.kappa) == (1.05, 0.11)
    config = RunConfig(preset="A5", kappa=0.5, **base)
    assert config.kappa == 0.5 and config.intensity.omega == 1.05
    config = RunConfig(kappa=2.0, **base)
    assert config.intensity.kind == "bessel"
    chain = config.chain_config()
    assert chain.kappa == 2.0 and chain.seed == config.seed
    assert "config" in _field_errors(lambda: ConfigLoader().load_dict({"preset": "nope", **base}))


def test_loader_collects_every_error():
    loader = ConfigLoader()
    bad = {
        "model": {"kind": "gauss_nig"},
        "data": {"simulate": "two_regime", "response": "z", "covariates": ["x"]},
        "grid": {"covariate_vectors": [[1.0]]},
        "epsilon": 1e-2,
        "epsilon_prior": {"kind": "log_uniform", "lower": 1e-8, "upper": 1e-4},
    }
    fields = _field_errors(lambda: loader.load_dict(bad))
    for expected in ("data.response", "data.covariates", "grid.covariate_vectors", "kappa", "epsilon"):
        assert expected in fields, (expected, fields)
    assert loader.errors and len(loader.errors) == len(fields)

    both = {"data": {"simulate": "five_gaussian"}, "kappa": 1.0, "calibration": {"kind": "pair_tie", "value": 0.5}}
    assert "calibration" in _field_errors(lambda: loader.load_dict(both))

    lindep = {
        "kappa": 1.0,
        "model": {"kind": "lindep", "b0": [0.0, 0.0], "sigma0": [1.0, 1.0]},
        "data": {"simulate": "two_regime", "covariates": ["x"]},
        "grid": {"covariate_vectors": [[1.0, 2.0]]},
    }
    assert _field_errors(lambda: loader.load_dict(lindep)) == ["grid.covariate_vectors.0"]

    schema = _field_errors(lambda: loader.load_dict({"data": {}, "kappa": -1.0}))
    assert "kappa" in schema and any(f.startswith("data") for f in schema)


def test_loader_files():
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        _write(tmp, "values.csv", "y,x\n1.0,2.0\n")
        path = _write(tmp, "run.json", json.dumps({"kappa": 1.0, "data": {"path": "values.csv"}}))
        config = ConfigLoader().load(path, overrides={"seed": 9})
        assert config.seed == 9 and Path(config.data.path).exists()

        fields = _field_errors(lambda: ConfigLoader().load(_write(tmp, "run.toml", "kappa = 1")))
        assert fields == ["file"]
        assert ConfigLoader().validate_file(tmp / "absent.yaml")[0]["field"] == "file"
        missing = _write(tmp, "missing.yaml", "kappa: 1.0\ndata:\n  path: nowhere.csv\n")
        assert _field_errors(lambda: ConfigLoader().load(missing)) == ["data.path"]
        try:
            ConfigLoader().load(tmp / "absent.yaml")
        except FileNotFoundError:
            pass
        else:
            raise AssertionError("a missing file should raise FileNotFoundError")


# ============================================================================
# Data
# ============================================================================

def test_ingest_csv():
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        good = _write(tmp, "good.csv", "lbm,rcc,Ht\n60.5, 4.1,170\n70,5.0,180\n55.25,4.4,165\n")
        data = ingest_csv(good, "lbm", ["rcc", "Ht"])
        assert data.n == 3 and data.p == 2
        assert np.allclose(data.y, [60.5, 70.0, 55.25])
        assert data.covariates == ("rcc", "Ht")
        assert ingest_csv(good, "lbm").X is None

        try:
            ingest_csv(good, "lbm", ["Wt"])
        except DataIngestError as e:
            assert "Wt" in e.reason
        else:
            raise AssertionError("a missing column should raise DataIngestError")

        gap = _write(tmp, "gap.csv", "y\n1.0\n\n2.0\nNA\n")
        try:
            ingest_csv(gap, "y")
        except DataIngestError as e:
            assert e.rows and e.reason == "missing values"
        else:
            raise AssertionError("a missing value should raise DataIngestError")

        text = _write(tmp, "text.csv", "y,x\n1.0,2\n2.0,abc\n3.0,4\n")
        try:
            ingest_csv(text, "y", ["x"])
        except DataIngestError as e:
            assert e.rows == [2] and "x" in e.reason
        else:
            raise AssertionError("a non-numeric cell should raise DataIngestError")

        try:
            ingest_csv(tmp / "none.csv", "y")
        except DataIngestError:
            pass
        else:
            raise AssertionError("a missing file should raise DataIngestError")


def test_stamps_fixture_loads():
    data = ingest_csv(CONFIG_DIR / "data" / "stamps.csv", "thickness")
    assert data.n == 53 and np.all(data.y > 0)


def test_reference_data():
    data = simulate_reference_data(seed=4, n=5000)
    grid = np.linspace(-20.0, 90.0, 20001)
    mean = reference_mean()
    second = integrate.trapezoid(grid ** 2 * reference_density(grid), grid)
    sd = math.sqrt(second - mean ** 2)
    assert abs(data.y.mean() - mean) < 3.0 * sd / math.sqrt(data.n)
    assert abs(integrate.trapezoid(reference_density(grid), grid) - 1.0) < 1e-6
    assert np.array_equal(simulate_reference_data(seed=4, n=50).y, simulate_reference_data(seed=4, n=50).y)


def test_other_generators():
    data, labels = simulate_two_regime(seed=1, n=300, return_labels=True)
    assert data.n == 300 and data.covariates == ("x",)
    resid = data.y - data.X[:, 0] - np.where(labels == 1, 15.0, 0.0)
    assert abs(resid.std() - 0.5) < 0.1
    ais = simulate_ais_like(seed=1)
    assert ais.n == 202 and ais.covariates == ("rcc", "Ht", "Wt") and ais.response == "lbm"


def test_moment_set_masses():
    masses = moment_set_masses(GaussNIGConfig(m0=0.0))
    assert len(masses) == 3
    half, other, both = masses[0]
    assert abs(half - 0.5) < 1e-12 and abs(other - 0.5) < 1e-12 and both == 0.0
    for b1, b2, joint in masses:
        assert 0.0 <= joint <= min(b1, b2)


# ============================================================================
# Subcommands
# ============================================================================

def test_parser():
    parser = build_parser()
    args = parser.parse_args(["eppf-check", "--kappa", "1.5"])
    assert args.intensity == "gamma" and args.nmax == 5 and args.kappa == 1.5
    args = parser.parse_args(["calibrate", "--target-p2", "0.9"])
    assert args.intensity == "bessel" and args.target_p2 == 0.9
    try:
        parser.parse_args(["eppf-check"])
    except SystemExit:
        pass
    else:
        raise AssertionError("eppf-check without --kappa should exit")


def test_eppf_check_command():
    with tempfile.TemporaryDirectory() as tmp:
        out = Path(tmp) / "eppf"
        code = cli_main(["eppf-check", "--intensity", "gamma", "--omega", "1", "--kappa", "1",
                     "--nmax", "4", "--eps", "1e-6", "--out", str(out)])
        assert code == 0
        norm = pd.read_csv(out / "normalization.csv")
        assert list(norm["n"]) == [1, 2, 3, 4]
        assert norm["residual"].max() < 1e-4
        values = pd.read_csv(out / "eppf.csv")
        # 1 + 2 + 3 + 5 integer partitions
        assert len(values) == 11
        conv = pd.read_csv(out / "convergence.csv")
        gaps = conv["max_gap"].to_numpy()
        assert gaps[-1] < gaps[0] and gaps[-1] < 0.05, gaps


def test_calibrate_and_prior_commands():
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        code = cli_main(["calibrate", "--intensity", "gamma", "--omega", "1", "--eps", "1e-3",
                     "--target-p2", "0.5", "--out", str(tmp / "cal")])
        assert code == 0
        with open(tmp / "cal" / "calibration.json", encoding="utf-8") as f:
            result = json.load(f)
        assert abs(result["achieved"] - 0.5) < 0.02

        code = cli_main(["prior-simulate", "--intensity", "gamma", "--omega", "1", "--kappa", "1",
                     "--eps", "1e-3", "--n", "20", "--reps", "300", "--moment-reps", "300",
                     "--out", str(tmp / "prior")])
        assert code == 0
        kn = pd.read_csv(tmp / "prior" / "kn_prior.csv")
        assert abs(kn["prob"].sum() - 1.0) < 1e-9
        assert len(pd.read_csv(tmp / "prior" / "prior_moments.csv")) == 3

        assert cli_main(["calibrate", "--intensity", "gamma", "--omega", "1"]) == 2
        assert cli_main(["calibrate", "--target-p2", "1.5", "--out", str(tmp / "bad")]) == 2


def test_run_and_diagnose():
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        path = _tiny_run_config(tmp)
        assert cli_main(["run", "--config", str(path)]) == 0
        run_dir = tmp / "run"
        for name in ("config.yaml", "chain_0/chain.csv", "chain_0/atoms.csv", "chain_0/allocations.csv",
                     "chain_0/fit_report.json", "chain_0/grid.csv", "chain_0/cpo.csv"):
            assert (run_dir / name).exists(), name
        echo = yaml.safe_load((run_dir / "config.yaml").read_text(encoding="utf-8"))
        assert echo["seed"] == 3 and echo["kappa"] == 1.0 and echo["calibration"] is None

        grid = pd.read_csv(run_dir / "chain_0" / "grid.csv")
        assert len(grid) == 50
        assert np.all(grid["q05"] <= grid["mean"] + 1e-12) and np.all(grid["mean"] <= grid["q95"] + 1e-12)

        # same seed, same report
        assert cli_main(["run", "--config", str(path), "--out", str(tmp / "again")]) == 0
        first = json.loads((run_dir / "chain_0" / "fit_report.json").read_text(encoding="utf-8"))
        second = json.loads((tmp / "again" / "chain_0" / "fit_report.json").read_text(encoding="utf-8"))
        assert first == second

        # diagnose recomputes the report from the archive files
        assert cli_main(["diagnose", "--archive", str(run_dir), "--out", str(tmp / "diag")]) == 0
        third = json.loads((tmp / "diag" / "chain_0" / "fit_report.json").read_text(encoding="utf-8"))
        assert third == first
        assert cli_main(["diagnose", "--archive", str(run_dir)]) == 0
        assert (run_dir / "chain_0" / "diagnose" / "fit_report.json").exists()

        assert cli_main(["diagnose", "--archive", str(tmp)]) == 2
        assert cli_main(["run", "--config", str(tmp / "absent.yaml")]) == 2


TESTS = [
    ("Shipped configs", test_shipped_configs_validate),
    ("Presets", test_preset_and_explicit_values),
    ("Loader error collection", test_loader_collects_every_error),
    ("Loader files", test_loader_files),
    ("CSV ingestion", test_ingest_csv),
    ("Stamps fixture", test_stamps_fixture_loads),
    ("Reference data", test_reference_data),
    ("Other generators", test_other_generators),
    ("Moment set masses", test_moment_set_masses),
    ("Parser", test_parser),
    ("eppf-check", test_eppf_check_command),
    ("calibrate / prior-simulate", test_calibrate_and_prior_commands),
    ("run / diagnose", test_run_and_diagnose),
]


def main() -> int:
    """Run every test and print a summary."""
    print("\n" + "=" * 70)
    print("🚀 CLI TESTS")
    print("=" * 70)

    results = []
    for name, test in TESTS:
        print("\n" + "=" * 70)
        print(f"🧪 {name}")
        print("=" * 70)
        try:
            test()
            print(f"✅ {name}")
            results.append((name, True))
        except Exception as e:
            print(f"❌ {type(e).__name__}: {e}")
            traceback.print_exc()
            results.append((name, False))

    print("\n" + "=" * 70)
    print("📊 SUMMARY")
    print("=" * 70)
    passed = sum(1 for _, ok in results if ok)
    for name, ok in results:
        print(f"{'✅ PASSED' if ok else '❌ FAILED'} - {name}")
    print(f"\nРезультат: {passed}/{len(results)}")
    return 0 if passed == len(results) else 1


if __name__ == "__main__":
    sys.exit(main())
